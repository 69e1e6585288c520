//! A change of basis between two connection matrices, checked as an
//! algebraic transition matrix and as a covering of the induced morphism.

use conley_transit::block::BlockGradedMap;
use conley_transit::field::Rationals;
use conley_transit::graded::GradedSpace;
use conley_transit::matrix::Matrix;
use conley_transit::poset::Poset;
use conley_transit::transition::{check_algebraic_tm, conjugate, TransitionSetting};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q = Rationals;
    let order = Poset::chain(3);
    let spaces = vec![
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(1, 1),
        GradedSpace::concentrated(1, 1),
    ];
    let mut delta = BlockGradedMap::zero(q, 1, spaces.clone(), spaces.clone());
    delta.set_block(0, 1, 1, Matrix::from_i64(q, 1, 1, &[1]))?;

    // Mix the two degree-1 summands.
    let mut t = BlockGradedMap::identity(q, &spaces);
    t.set_block(1, 1, 1, Matrix::from_i64(q, 1, 1, &[2]))?;
    t.set_block(1, 2, 1, Matrix::from_i64(q, 1, 1, &[3]))?;
    let delta_prime = conjugate(&order, &t, &delta)?;
    println!("conjugated entries: {:?}", delta_prime.entries().keys().collect::<Vec<_>>());

    let atm = check_algebraic_tm(&order, &t, &delta, &delta_prime)?;
    println!("algebraic transition matrix: {}", atm.holds());

    let setting = TransitionSetting::canonical(&order, &delta, &delta_prime)?;
    let theta = setting.induced(&t)?;
    let cover = setting.check_cover(&t, &theta)?;
    println!("covers its induced morphism: {}", cover.covers);
    let (props, inverse) = setting.property_report(&t, &theta)?;
    println!("properties: {props:?}");
    println!("inverse is triangular: {}", inverse.is_triangular(&order, false));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("transition example");
}
