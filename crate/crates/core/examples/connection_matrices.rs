//! Validating, recognising and enumerating connection matrices over F2.

use conley_transit::block::BlockGradedMap;
use conley_transit::braid::ChainBraid;
use conley_transit::connection::{enumerate_connection_matrices, is_connection_matrix, validate, DEFAULT_BUDGET};
use conley_transit::field::PrimeField;
use conley_transit::graded::GradedSpace;
use conley_transit::matrix::Matrix;
use conley_transit::poset::Poset;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f2 = PrimeField::f2();
    let order = Poset::from_relations(3, &[(0, 2), (1, 2)])?;
    let spaces = vec![
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(1, 1),
    ];
    let mut delta = BlockGradedMap::zero(f2, 1, spaces.clone(), spaces.clone());
    delta.set_block(0, 2, 1, Matrix::from_i64(f2, 1, 1, &[1]))?;
    delta.set_block(1, 2, 1, Matrix::from_i64(f2, 1, 1, &[1]))?;
    println!("valid: {}", validate(&order, &delta)?.is_valid());

    let g = ChainBraid::new(&order, &delta)?.into_braid();
    let verdict = is_connection_matrix(&order, &delta, &g, None, DEFAULT_BUDGET)?;
    println!("recognised against its own braid: {}", verdict.is_connection_matrix);

    let all = enumerate_connection_matrices(&order, &spaces, &g, DEFAULT_BUDGET)?;
    println!("{} connection matrices generate this braid", all.len());
    for m in &all {
        let entries: Vec<String> = m.entries().keys().map(|(q, p)| format!("({q},{p})")).collect();
        println!("  nonzero entries {}", entries.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("connection example");
}
