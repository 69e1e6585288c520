//! Seeded generators and dense oracles shared by the integration tests.
#![allow(dead_code)]

use conley_transit::block::{triangular_slots, BlockGradedMap};
use conley_transit::field::Field;
use conley_transit::graded::GradedSpace;
use conley_transit::matrix::Matrix;
use conley_transit::poset::Poset;
use conley_transit::transition::conjugate;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random strict order on `n` elements in which index order is a linear
/// extension.
pub fn random_poset(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Poset {
    let mut rel = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                rel.push((a, b));
            }
        }
    }
    Poset::from_relations(n, &rel).expect("index order is acyclic")
}

/// Spaces with dimensions up to `max_dim` in degrees `0..=max_degree`.
pub fn random_spaces(rng: &mut ChaCha8Rng, n: usize, max_dim: usize, max_degree: i32) -> Vec<GradedSpace> {
    (0..n)
        .map(|_| {
            let count = rng.gen_range(1..=2);
            GradedSpace::from_pairs(
                (0..count).map(|_| (rng.gen_range(0..=max_degree), rng.gen_range(0..=max_dim))),
            )
        })
        .collect()
}

/// One space per element concentrated in a single degree.
pub fn random_concentrated(rng: &mut ChaCha8Rng, n: usize, max_dim: usize, max_degree: i32) -> Vec<GradedSpace> {
    (0..n)
        .map(|_| GradedSpace::concentrated(rng.gen_range(0..=max_degree), rng.gen_range(1..=max_dim)))
        .collect()
}

pub fn random_elem<F: Field>(f: F, rng: &mut ChaCha8Rng) -> F::Elem {
    match f.size() {
        Some(p) => f.from_i64(rng.gen_range(0..p as i64)),
        None => f.from_i64(rng.gen_range(-2..=2)),
    }
}

pub fn random_matrix<F: Field>(f: F, rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<F> {
    let data = (0..rows * cols).map(|_| random_elem(f, rng)).collect();
    Matrix::from_vec(f, rows, cols, data)
}

pub fn random_invertible<F: Field>(f: F, rng: &mut ChaCha8Rng, n: usize) -> Matrix<F> {
    loop {
        let m = random_matrix(f, rng, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Degree-0 map triangular for `poset` with invertible diagonal entries.
pub fn random_triangular_iso<F: Field>(
    f: F,
    rng: &mut ChaCha8Rng,
    poset: &Poset,
    spaces: &[GradedSpace],
) -> BlockGradedMap<F> {
    let slots = triangular_slots(poset, spaces, spaces, 0, true);
    let values: Vec<F::Elem> = slots.iter().map(|_| random_elem(f, rng)).collect();
    let mut t = BlockGradedMap::from_slots(f, 0, spaces.to_vec(), spaces.to_vec(), &slots, &values);
    for (p, s) in spaces.iter().enumerate() {
        for (k, d) in s.iter() {
            t.set_block(p, p, k, random_invertible(f, rng, d)).expect("square block");
        }
    }
    t
}

/// A valid boundary map: a random partial matching of cells one degree
/// apart along the order, conjugated by a random triangular isomorphism.
pub fn random_boundary<F: Field>(
    f: F,
    rng: &mut ChaCha8Rng,
    poset: &Poset,
    spaces: &[GradedSpace],
) -> BlockGradedMap<F> {
    let mut cells: Vec<(usize, i32, usize)> = Vec::new();
    for (p, s) in spaces.iter().enumerate() {
        for (k, d) in s.iter() {
            cells.extend((0..d).map(|i| (p, k, i)));
        }
    }
    let mut used = vec![false; cells.len()];
    let mut d0 = BlockGradedMap::zero(f, 1, spaces.to_vec(), spaces.to_vec());
    for b in 0..cells.len() {
        for a in 0..cells.len() {
            let ((q, ka, ia), (p, kb, ib)) = (cells[a], cells[b]);
            if used[a] || used[b] || ka + 1 != kb || !poset.lt(q, p) || !rng.gen_bool(0.5) {
                continue;
            }
            used[a] = true;
            used[b] = true;
            let mut e = d0.entry(q, p);
            let mut m = e.block(kb);
            m.set(ia, ib, f.one());
            e.set_block(kb, m).expect("shape");
            d0.set_entry(q, p, e).expect("shape");
        }
    }
    let t = random_triangular_iso(f, rng, poset, spaces);
    conjugate(poset, &t, &d0).expect("triangular iso inverts")
}

/// Whether `v` lies in the column span of `b`.
pub fn in_span<F: Field>(b: &Matrix<F>, v: &Matrix<F>) -> bool {
    if b.cols() == 0 {
        return v.is_zero();
    }
    b.rank() == b.hstack(v).rank()
}

/// Total homology dimension of a dense differential by ranks alone.
pub fn homology_dim_by_rank<F: Field>(d: &conley_transit::graded::GradedMap<F>) -> usize {
    d.source()
        .iter()
        .map(|(k, dim)| dim - d.block(k).rank() - d.block(k + 1).rank())
        .sum()
}
