//! The homology braid generated by a boundary matrix on a three-element chain.

use conley_transit::block::BlockGradedMap;
use conley_transit::braid::ChainBraid;
use conley_transit::field::PrimeField;
use conley_transit::graded::GradedSpace;
use conley_transit::matrix::Matrix;
use conley_transit::poset::{Interval, Poset};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f2 = PrimeField::f2();
    let chain = Poset::chain(3);
    // Two index-0 cells joined by an index-1 cell in the middle.
    let spaces = vec![
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(1, 1),
        GradedSpace::concentrated(2, 1),
    ];
    let mut delta = BlockGradedMap::zero(f2, 1, spaces.clone(), spaces);
    delta.set_block(0, 1, 1, Matrix::from_i64(f2, 1, 1, &[1]))?;

    let cb = ChainBraid::new(&chain, &delta)?;
    let braid = cb.braid();
    for i in braid.intervals() {
        let dims: Vec<String> = braid.dims(&i).iter().map(|(k, d)| format!("H{k}={d}")).collect();
        println!("{i}: {}", if dims.is_empty() { "0".into() } else { dims.join(" ") });
    }

    let pair = braid
        .pair(&Interval::new(vec![0]), &Interval::new(vec![1]))
        .expect("adjacent pair");
    println!("connecting map {{0}} <- {{1}} in degree 1: {:?}", pair.d.block(1));

    let report = braid.verify_axioms();
    println!("{} axiom checks, all pass: {}", report.checks.len(), report.all_pass());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("braid example");
}
