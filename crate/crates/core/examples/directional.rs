//! Directional matrices from a transition matrix and a sign per element.

use conley_transit::block::BlockGradedMap;
use conley_transit::directional::{
    block_transform, directional_matrix, nonzero_entry_report, relabel_in_out, SignAssignment, Split,
    Transform,
};
use conley_transit::field::Rationals;
use conley_transit::graded::GradedSpace;
use conley_transit::matrix::Matrix;
use conley_transit::poset::{Interval, Poset};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q = Rationals;
    let order = Poset::chain(3);
    let spaces = vec![GradedSpace::concentrated(0, 1); 3];
    let mut t = BlockGradedMap::zero(q, 0, spaces.clone(), spaces);
    for (row, col, v) in [(0, 0, 2), (0, 1, 1), (0, 2, 4), (1, 1, 3), (1, 2, -1), (2, 2, 1)] {
        t.set_block(row, col, 0, Matrix::from_i64(q, 1, 1, &[v]))?;
    }

    let split = Split::new(3, Interval::new(vec![0]));
    let inverse = block_transform(&t, &split, Transform::A3)?;
    println!("A3 on {split} is the inverse: {}", inverse == t.inverse_triangular(&order)?);

    for signs in ["+,+,+", "-,-,-", "+,-,+", "-,+,+"] {
        let signs: SignAssignment = signs.parse()?;
        let out = directional_matrix(&order, &t, &signs)?;
        println!("signs {signs}: word {}", out.word.tokens().join(" "));
        for e in nonzero_entry_report(&out.d) {
            println!("  D({}, {}) nonzero in degrees {:?}", e.row, e.col, e.degrees);
        }
    }

    for l in relabel_in_out(&order, &"+,-,+".parse()?) {
        println!("element {}: out side {}, in side {}", l.element, l.out_side, l.in_side);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("directional example");
}
