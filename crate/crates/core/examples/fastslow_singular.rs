//! Assemble a doubled-order connection matrix from two attractor-repeller
//! pairs and a corner block, then extract and certify the corner.

use conley_transit::block::BlockGradedMap;
use conley_transit::error::Error;
use conley_transit::fastslow::{
    assemble_fastslow, continuation_cover, extract_singular, SuspensionData, SuspensionStyle,
};
use conley_transit::field::Rationals;
use conley_transit::graded::GradedSpace;
use conley_transit::matrix::Matrix;
use conley_transit::poset::Poset;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q = Rationals;
    let order = Poset::chain(2);
    let spaces = vec![GradedSpace::concentrated(0, 1), GradedSpace::concentrated(1, 1)];
    let mut delta = BlockGradedMap::zero(q, 1, spaces.clone(), spaces.clone());
    delta.set_block(0, 1, 1, Matrix::from_i64(q, 1, 1, &[1]))?;

    let sigma = SuspensionData::shift(q, &spaces, SuspensionStyle::Sigma);
    let corner = |a: i64, b: i64| -> Result<BlockGradedMap<Rationals>, Error> {
        let mut t = BlockGradedMap::zero(q, 1, sigma.suspended_spaces(), spaces.clone());
        t.set_block(0, 0, 1, Matrix::from_i64(q, 1, 1, &[a]))?;
        t.set_block(1, 1, 2, Matrix::from_i64(q, 1, 1, &[b]))?;
        Ok(t)
    };

    match assemble_fastslow(&order, &order, &delta, &delta, &sigma, &corner(1, 2)?) {
        Err(Error::IncompatibleBlock { residual }) => {
            println!("rejected corner, residual blocks: {residual:?}")
        }
        other => println!("unexpected: {other:?}"),
    }

    let assembly = assemble_fastslow(&order, &order, &delta, &delta, &sigma, &corner(3, 3)?)?;
    println!("doubled order labels: {:?}", assembly.doubled.labels());
    let singular = extract_singular(&assembly, Some(&order))?;
    println!("certificate: {:?}", singular.certificate);
    let (t, covers) = continuation_cover(&order, &singular, &sigma)?;
    println!("degree-{} composite covers the continuation morphism: {covers}", t.degree());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fast-slow example");
}
