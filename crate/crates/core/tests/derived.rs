//! Concrete instances checked against oracles written independently of the
//! library code paths they exercise.

mod common;

use std::collections::BTreeMap;

use common::{homology_dim_by_rank, random_boundary, random_poset, random_spaces, random_triangular_iso, rng};
use conley_transit::block::{triangular_slots, BlockGradedMap};
use conley_transit::braid::{find_isomorphism, BraidMorphism, ChainBraid};
use conley_transit::connection::{enumerate_connection_matrices, DEFAULT_BUDGET};
use conley_transit::directional::{directional_matrix, SignAssignment, WordToken};
use conley_transit::fastslow::{
    assemble_fastslow, continuation_cover, extract_singular, SuspensionData, SuspensionStyle,
};
use conley_transit::field::{Field, PrimeField, Rationals};
use conley_transit::graded::{ChainComplex, GradedMap, GradedSpace, Homology};
use conley_transit::matrix::Matrix;
use conley_transit::poset::{Interval, Poset};
use conley_transit::transition::{conjugate, TransitionSetting};

fn f2() -> PrimeField {
    PrimeField::f2()
}

fn all_values<F: Field>(f: F, len: usize) -> Vec<Vec<F::Elem>> {
    let elems = f.elements().expect("finite field");
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|v| {
                elems.iter().map(move |e| {
                    let mut w = v.clone();
                    w.push(e.clone());
                    w
                })
            })
            .collect()
    })
}

fn ordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in ordered_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].push(first);
            out.push(q);
        }
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, vec![first]);
            out.push(q);
        }
    }
    out
}

#[test]
fn n_shaped_order_has_no_stack() {
    let rel = [(0, 2), (1, 2), (1, 3)];
    let poset = Poset::from_relations(4, &rel).unwrap();
    assert!(poset.find_stack().is_none());
    let lt = |a: usize, b: usize| rel.contains(&(a, b));
    let stackable = ordered_partitions(&[0, 1, 2, 3]).into_iter().any(|blocks| {
        let levels_unordered = blocks
            .iter()
            .all(|b| b.iter().all(|&a| b.iter().all(|&c| !lt(a, c))));
        levels_unordered && blocks.iter().enumerate().all(|(i, lower)| {
            blocks[i + 1..]
                .iter()
                .all(|upper| lower.iter().all(|&a| upper.iter().all(|&b| lt(a, b))))
        })
    });
    assert!(!stackable);
    assert_eq!(ordered_partitions(&[0, 1, 2, 3]).len(), 75);
}

#[test]
fn acyclic_complex_by_rank_bookkeeping() {
    let f = f2();
    let space = GradedSpace::from_pairs([(0, 1), (1, 2), (2, 1)]);
    let blocks = BTreeMap::from([
        (1, Matrix::from_i64(f, 1, 2, &[1, 0])),
        (2, Matrix::from_i64(f, 2, 1, &[0, 1])),
    ]);
    let d = GradedMap::new(f, 1, space.clone(), space, blocks).unwrap();
    let h = Homology::of(&ChainComplex::new(d.clone()).unwrap());
    let by_rank: Vec<usize> = [(0, 1, 0, 1), (1, 2, 1, 1), (2, 1, 1, 0)]
        .iter()
        .map(|&(_, dim, r_in, r_out)| dim - r_in - r_out)
        .collect();
    assert_eq!(by_rank, vec![0, 0, 0]);
    for k in 0..=2 {
        assert_eq!(h.dims().dim(k), 0);
    }
    assert_eq!(homology_dim_by_rank(&d), 0);
}

#[test]
fn connecting_map_matches_snake() {
    // Elements 1 and 2 both sit in degree 1 and both bound the degree-0 cell at 0.
    let f = f2();
    let spaces = vec![
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(1, 1),
        GradedSpace::concentrated(1, 1),
    ];
    let poset = Poset::chain(3);
    let mut delta = BlockGradedMap::zero(f, 1, spaces.clone(), spaces);
    delta.set_block(0, 1, 1, Matrix::from_i64(f, 1, 1, &[1])).unwrap();
    delta.set_block(0, 2, 1, Matrix::from_i64(f, 1, 1, &[1])).unwrap();
    let cb = ChainBraid::new(&poset, &delta).unwrap();
    let (i, j) = (Interval::new(vec![0]), Interval::new(vec![1, 2]));

    // Snake by hand: H(J) has the two cells as a basis, each lifts to
    // itself in C(P), the boundary lands on the class of the cell at 0.
    let h_j = cb.homology(&j).representatives(1);
    let lifted = delta.dense(&i, &j).block(1).mul(&h_j);
    let expected = cb.homology(&i).coordinates(0, &lifted);
    assert_eq!(expected, Matrix::from_i64(f, 1, 2, &[1, 1]));

    let pair = cb.braid().pair(&i, &j).expect("adjacent pair");
    assert_eq!(pair.d.block(1), expected);
}

#[test]
fn isomorphism_search_on_small_chains() {
    let f = f2();
    for n in 2..=3 {
        let poset = Poset::chain(n);
        for code in 0..3usize.pow(n as u32) {
            let spaces: Vec<_> = (0..n)
                .map(|p| GradedSpace::concentrated((code / 3usize.pow(p as u32) % 3) as i32, 1))
                .collect();
            let slots = triangular_slots(&poset, &spaces, &spaces, 1, true);
            let deltas: Vec<_> = all_values(f, slots.len())
                .into_iter()
                .map(|v| BlockGradedMap::from_slots(f, 1, spaces.clone(), spaces.clone(), &slots, &v))
                .filter(|d| d.compose(d).is_zero())
                .collect();
            let braids: Vec<_> = deltas.iter().map(|d| ChainBraid::new(&poset, d).unwrap()).collect();
            for a in &braids {
                for b in &braids {
                    let dims_match = poset
                        .intervals()
                        .iter()
                        .all(|i| a.braid().dims(i) == b.braid().dims(i));
                    let found = find_isomorphism(a.braid(), b.braid(), DEFAULT_BUDGET).unwrap();
                    assert_eq!(found.is_some(), dims_match);
                    if let Some(phi) = found {
                        assert!(phi.is_braid_map(a.braid(), b.braid()).unwrap());
                    }
                }
            }
        }
    }
}

fn ar_spaces() -> Vec<GradedSpace> {
    vec![GradedSpace::concentrated(0, 1), GradedSpace::concentrated(1, 1)]
}

#[test]
fn attractor_repeller_with_acyclic_total() {
    let f = f2();
    let poset = Poset::chain(2);
    let mut reference = BlockGradedMap::zero(f, 1, ar_spaces(), ar_spaces());
    reference.set_block(0, 1, 1, Matrix::from_i64(f, 1, 1, &[1])).unwrap();
    let g = ChainBraid::new(&poset, &reference).unwrap().into_braid();
    assert!(g.dims(&Interval::full(2)).is_zero());

    let expected: Vec<_> = [0, 1]
        .into_iter()
        .map(|v| {
            let mut d = BlockGradedMap::zero(f, 1, ar_spaces(), ar_spaces());
            d.set_block(0, 1, 1, Matrix::from_i64(f, 1, 1, &[v])).unwrap();
            d
        })
        .filter(|d| homology_dim_by_rank(&d.total()) == 0)
        .collect();
    let found = enumerate_connection_matrices(&poset, &ar_spaces(), &g, DEFAULT_BUDGET).unwrap();
    assert_eq!(found, expected);
    assert_eq!(found.len(), 1);
}

#[test]
fn connection_matrices_are_not_unique() {
    let f = f2();
    let poset = Poset::chain(3);
    let spaces = vec![
        GradedSpace::concentrated(0, 1),
        GradedSpace::concentrated(1, 1),
        GradedSpace::concentrated(1, 1),
    ];
    let mut reference = BlockGradedMap::zero(f, 1, spaces.clone(), spaces.clone());
    reference.set_block(0, 1, 1, Matrix::from_i64(f, 1, 1, &[1])).unwrap();
    let g = ChainBraid::new(&poset, &reference).unwrap().into_braid();
    let found = enumerate_connection_matrices(&poset, &spaces, &g, DEFAULT_BUDGET).unwrap();
    assert!(found.len() >= 2);

    // Every boundary map conjugate to the reference by a triangular
    // isomorphism must be listed.
    let slots = triangular_slots(&poset, &spaces, &spaces, 0, false);
    for v in all_values(f, slots.len()) {
        let t = BlockGradedMap::from_slots(f, 0, spaces.clone(), spaces.clone(), &slots, &v);
        if !t.total().is_invertible() {
            continue;
        }
        let conj = conjugate(&poset, &t, &reference).unwrap();
        assert!(found.contains(&conj));
    }
}

#[test]
fn constructions_pass_general_properties() {
    let mut r = rng(21);
    for field_case in 0..30 {
        let f = if field_case % 2 == 0 { f2() } else { PrimeField::new(3).unwrap() };
        let n = 1 + field_case % 3;
        let poset = random_poset(&mut r, n, 0.5);
        let spaces = random_spaces(&mut r, n, 2, 2);
        let zero = BlockGradedMap::zero(f, 1, spaces.clone(), spaces.clone());
        let cb = ChainBraid::new(&poset, &zero).unwrap();
        let u = random_triangular_iso(f, &mut r, &poset, &spaces);
        let theta = BraidMorphism::induced(&u, &cb, &cb).unwrap();
        let setting = TransitionSetting::canonical(&poset, &zero, &zero).unwrap();
        let t = setting.construct_trivial(&theta).unwrap();
        let (report, _) = setting.property_report(&t, &theta).unwrap();
        assert!(report.chain && report.triangular && report.diagonal_matches);
        assert!(report.invertible && report.inverse_covers);
    }
}

#[test]
fn stackable_on_total_order_covers_singletons() {
    let f = f2();
    let mut r = rng(22);
    for _ in 0..20 {
        let poset = Poset::chain(3);
        let spaces = random_spaces(&mut r, 3, 1, 2);
        let delta = random_boundary(f, &mut r, &poset, &spaces);
        let t0 = random_triangular_iso(f, &mut r, &poset, &spaces);
        let delta_prime = conjugate(&poset, &t0, &delta).unwrap();
        let setting = TransitionSetting::canonical(&poset, &delta, &delta_prime).unwrap();
        let theta = setting.induced(&t0).unwrap();
        let singletons: Vec<_> = (0..3).map(Interval::singleton).collect();

        let slots = triangular_slots(&poset, &spaces, &spaces, 0, false);
        let exists = all_values(f, slots.len()).into_iter().any(|v| {
            let cand = BlockGradedMap::from_slots(f, 0, spaces.clone(), spaces.clone(), &slots, &v);
            setting.check_chain(&cand).unwrap() && setting.check_weak_cover(&cand, &theta, &singletons).unwrap()
        });
        assert!(exists);

        let stack = poset.find_stack().unwrap();
        let built = setting.construct_stackable(&theta, &stack, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(setting.check_weak_cover(&built, &theta, &singletons).unwrap());
    }
}

#[test]
fn weak_cover_ignores_unlisted_intervals() {
    let f = f2();
    let poset = Poset::chain(2);
    let spaces = vec![GradedSpace::concentrated(1, 1); 2];
    let zero = BlockGradedMap::zero(f, 1, spaces.clone(), spaces.clone());
    let setting = TransitionSetting::canonical(&poset, &zero, &zero).unwrap();
    let theta = setting.induced(&BlockGradedMap::identity(f, &spaces)).unwrap();
    let singletons = [Interval::singleton(0), Interval::singleton(1)];

    let slots = triangular_slots(&poset, &spaces, &spaces, 0, false);
    let witness = all_values(f, slots.len())
        .into_iter()
        .map(|v| BlockGradedMap::from_slots(f, 0, spaces.clone(), spaces.clone(), &slots, &v))
        .find(|t| {
            setting.check_weak_cover(t, &theta, &singletons).unwrap()
                && !setting.check_cover(t, &theta).unwrap().covers
        })
        .expect("a map that is the identity on singletons only");
    assert!(setting.weakly_covers_some(&witness, &theta, &singletons).unwrap());
    assert!(!setting.check_weak_cover(&witness, &theta, &[Interval::full(2)]).unwrap());
}

#[test]
fn distinct_degrees_give_a_single_solution() {
    let f = f2();
    let spaces: Vec<_> = (0..3).map(|k| GradedSpace::concentrated(k, 1)).collect();
    let order = Poset::order_k(&spaces).unwrap();
    let mut r = rng(23);
    for _ in 0..10 {
        let delta = random_boundary(f, &mut r, &order, &spaces);
        let setting = TransitionSetting::canonical(&order, &delta, &delta).unwrap();
        let theta = BraidMorphism::identity(setting.g());
        let (t, _) = setting.construct_unique_k(&theta, DEFAULT_BUDGET).unwrap();
        for p in 0..3 {
            assert!(t.entry(p, p).block(p as i32).is_identity());
        }
        let slots = triangular_slots(&order, &spaces, &spaces, 0, false);
        let solutions: Vec<_> = all_values(f, slots.len())
            .into_iter()
            .map(|v| BlockGradedMap::from_slots(f, 0, spaces.clone(), spaces.clone(), &slots, &v))
            .filter(|c| setting.check_chain(c).unwrap() && setting.check_cover(c, &theta).unwrap().covers)
            .collect();
        assert_eq!(solutions, vec![t]);
    }
}

fn ar_boundary<F: Field>(f: F) -> BlockGradedMap<F> {
    let mut d = BlockGradedMap::zero(f, 1, ar_spaces(), ar_spaces());
    d.set_block(0, 1, 1, Matrix::from_i64(f, 1, 1, &[1])).unwrap();
    d
}

fn diagonal_corner(sigma: &SuspensionData<Rationals>, a: i64, b: i64) -> BlockGradedMap<Rationals> {
    let q = Rationals;
    let mut t = BlockGradedMap::zero(q, 1, sigma.suspended_spaces(), ar_spaces());
    t.set_block(0, 0, 1, Matrix::from_i64(q, 1, 1, &[a])).unwrap();
    t.set_block(1, 1, 2, Matrix::from_i64(q, 1, 1, &[b])).unwrap();
    t
}

#[test]
fn attractor_repeller_corner_residual() {
    // With Δ± = [1] the only residual entry is at (0, 1), equal to b - a.
    let q = Rationals;
    let chain = Poset::chain(2);
    let sigma = SuspensionData::shift(q, &ar_spaces(), SuspensionStyle::Sigma);
    for (a, b) in [(1, 1), (1, 2), (3, 3), (0, 1)] {
        let t = diagonal_corner(&sigma, a, b);
        let ok = assemble_fastslow(&chain, &chain, &ar_boundary(q), &ar_boundary(q), &sigma, &t).is_ok();
        assert_eq!(ok, b - a == 0, "corner diag({a}, {b})");
    }
}

#[test]
fn pipeline_two_elements_per_side() {
    let q = Rationals;
    let chain = Poset::chain(2);
    let sigma = SuspensionData::shift(q, &ar_spaces(), SuspensionStyle::Sigma);
    let t = diagonal_corner(&sigma, 1, 1);
    let asm = assemble_fastslow(&chain, &chain, &ar_boundary(q), &ar_boundary(q), &sigma, &t).unwrap();
    let sing = extract_singular(&asm, Some(&chain)).unwrap();
    assert_eq!(sing.t_s, t);
    let (t0, covers) = continuation_cover(&chain, &sing, &sigma).unwrap();
    assert!(covers);
    assert_eq!(t0, BlockGradedMap::identity(q, &ar_spaces()));
}

#[test]
fn pipeline_end_to_end_over_f2() {
    let f = f2();
    let mut r = rng(24);
    for _ in 0..60 {
        let n = 1 + r_range(&mut r, 3);
        let order = random_poset(&mut r, n, 0.5);
        let spaces = random_spaces(&mut r, n, 2, 2);
        let delta_plus = random_boundary(f, &mut r, &order, &spaces);
        let t0 = random_triangular_iso(f, &mut r, &order, &spaces);
        let delta_minus = conjugate(&order, &t0, &delta_plus).unwrap();
        let sigma = SuspensionData::shift(f, &spaces, SuspensionStyle::Sigma);
        // The corner is T0 read one degree up.
        let mut t_s = BlockGradedMap::zero(f, 1, sigma.suspended_spaces(), spaces.clone());
        for ((row, col), m) in t0.entries() {
            for (k, b) in m.blocks() {
                t_s.set_block(*row, *col, k + 1, b.clone()).unwrap();
            }
        }
        let asm = assemble_fastslow(&order, &order, &delta_minus, &delta_plus, &sigma, &t_s).unwrap();
        let sing = extract_singular(&asm, Some(&order)).unwrap();
        assert!(sing.certificate.anticommutes && sing.certificate.invertible);
        let (t, covers) = continuation_cover(&order, &sing, &sigma).unwrap();
        assert_eq!(t, t0);
        assert!(covers);
    }
}

fn r_range(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> usize {
    use rand::Rng;
    r.gen_range(0..n)
}

#[test]
fn one_flip_of_a_unipotent_two_block_map() {
    let f = f2();
    let poset = Poset::chain(2);
    let spaces = vec![GradedSpace::concentrated(0, 1); 2];
    let mut a = BlockGradedMap::identity(f, &spaces);
    a.set_block(0, 1, 0, Matrix::from_i64(f, 1, 1, &[1])).unwrap();
    let out = directional_matrix(&poset, &a, &"+,-".parse::<SignAssignment>().unwrap()).unwrap();
    // By hand: E A E with Z⁻¹ = 1 leaves (1 1; 0 1) unchanged.
    let total = out.d.total().block(0);
    assert_eq!(total, Matrix::from_i64(f, 2, 2, &[1, 1, 0, 1]));
    assert_eq!(out.steps.len(), 1);
    assert_eq!(out.word.0.len(), 3);
    assert_eq!(out.word.0[1], WordToken::F01);
}

#[test]
fn zero_corner_keeps_all_homology() {
    let q = Rationals;
    let chain = Poset::chain(2);
    let sigma = SuspensionData::shift(q, &ar_spaces(), SuspensionStyle::Sigma);
    let zero = BlockGradedMap::zero(q, 1, ar_spaces(), ar_spaces());
    let asm = assemble_fastslow(&chain, &chain, &zero, &zero, &sigma, &diagonal_corner(&sigma, 0, 0)).unwrap();
    let sing = extract_singular(&asm, None).unwrap();
    assert!(!sing.certificate.connecting_iso);
    assert_eq!(homology_dim_by_rank(&asm.delta.total()), 4);
}
