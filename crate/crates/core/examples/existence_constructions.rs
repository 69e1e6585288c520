//! The three constructions of covering transition matrices: zero boundary
//! maps, stackable orders and degree-concentrated summands.

use conley_transit::block::BlockGradedMap;
use conley_transit::braid::BraidMorphism;
use conley_transit::connection::DEFAULT_BUDGET;
use conley_transit::field::PrimeField;
use conley_transit::graded::GradedSpace;
use conley_transit::matrix::Matrix;
use conley_transit::poset::Poset;
use conley_transit::transition::TransitionSetting;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f2 = PrimeField::f2();

    // Zero boundary maps on an antichain.
    let anti = Poset::antichain(2);
    let spaces = vec![GradedSpace::concentrated(0, 1); 2];
    let zero = BlockGradedMap::zero(f2, 1, spaces.clone(), spaces.clone());
    let setting = TransitionSetting::canonical(&anti, &zero, &zero)?;
    let theta = BraidMorphism::identity(setting.g());
    let t = setting.construct_trivial(&theta)?;
    println!("trivial construction covers: {}", setting.check_cover(&t, &theta)?.covers);

    // A stackable order: two minima below a maximum.
    let vee = Poset::from_relations(3, &[(0, 2), (1, 2)])?;
    let spaces = vec![
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(1, 1),
    ];
    let mut delta = BlockGradedMap::zero(f2, 1, spaces.clone(), spaces.clone());
    delta.set_block(0, 2, 1, Matrix::from_i64(f2, 1, 1, &[1]))?;
    let setting = TransitionSetting::canonical(&vee, &delta, &delta)?;
    let theta = BraidMorphism::identity(setting.g());
    let stack = vee.find_stack().expect("stackable");
    match setting.construct_stackable(&theta, &stack, DEFAULT_BUDGET)? {
        Some(t) => println!(
            "stackable construction weakly covers: {}",
            setting.check_weak_cover(&t, &theta, &stack.blocks)?
        ),
        None => println!("no stackable construction"),
    }

    // Degree-concentrated summands determine the matrix uniquely.
    let (t, cert) = setting.construct_unique_k(&theta, DEFAULT_BUDGET)?;
    println!(
        "unique construction: solution dimension {}, enumerated {:?}, covers {}",
        cert.solution_dim,
        cert.enumerated,
        setting.check_cover(&t, &theta)?.covers
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("construction example");
}
