//! Intervals, adjacent pairs and stack decompositions of a small order.

use conley_transit::poset::Poset;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // A diamond: 0 below 1 and 2, both below 3.
    let diamond = Poset::from_relations(4, &[(0, 1), (0, 2), (1, 3), (2, 3)])?
        .with_labels(vec!["bottom".into(), "left".into(), "right".into(), "top".into()]);

    let intervals = diamond.intervals();
    println!("{} intervals (including the empty one)", intervals.len());
    for i in intervals.iter().filter(|i| !i.is_empty()) {
        println!("  {i}");
    }

    println!("adjacent pairs:");
    for (a, b) in diamond.adjacent_pairs().iter().filter(|(a, b)| a.len() == 1 && b.len() == 1) {
        println!("  ({a}, {b})");
    }

    match diamond.find_stack() {
        Some(stack) => {
            let levels: Vec<String> = stack.blocks.iter().map(ToString::to_string).collect();
            println!("stack levels: {}", levels.join(" < "));
        }
        None => println!("not stackable"),
    }
    println!("linear extension: {:?}", diamond.linear_extension());

    let zigzag = Poset::from_relations(4, &[(0, 2), (1, 2), (1, 3)])?;
    println!("zigzag stackable: {}", zigzag.find_stack().is_some());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("poset example");
}
