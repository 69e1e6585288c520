//! Chain complex braids of a poset-graded boundary map, their homology
//! braids, braid axioms and braid morphisms.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::block::BlockGradedMap;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::{induced_map, induced_unchecked, ChainComplex, GradedMap, GradedSpace, Homology};
use crate::linsys::LinearSystem;
use crate::matrix::Matrix;
use crate::poset::{Interval, Poset};

/// The maps `i: H(I) -> H(IJ)`, `p: H(IJ) -> H(J)` and the degree-1
/// connecting map `d: H(J) -> H(I)` of an adjacent pair `(I, J)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairMaps<F: Field> {
    pub i: GradedMap<F>,
    pub p: GradedMap<F>,
    pub d: GradedMap<F>,
}

/// Graded spaces on every interval with the long exact sequence maps of
/// every adjacent pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyBraid<F: Field> {
    field: F,
    poset: Poset,
    dims: BTreeMap<Interval, GradedSpace>,
    pairs: BTreeMap<(Interval, Interval), PairMaps<F>>,
}

impl<F: Field> HomologyBraid<F> {
    /// Assemble a braid from explicit data. Missing intervals are zero;
    /// every adjacent pair must be present with maps of matching shape.
    pub fn new(
        field: F,
        poset: Poset,
        dims: BTreeMap<Interval, GradedSpace>,
        pairs: BTreeMap<(Interval, Interval), PairMaps<F>>,
    ) -> Result<Self> {
        let mut all = BTreeMap::new();
        for i in poset.intervals() {
            all.insert(i.clone(), dims.get(&i).cloned().unwrap_or_default());
        }
        if let Some(extra) = dims.keys().find(|i| !all.contains_key(*i)) {
            return Err(Error::ShapeMismatch(format!("{extra} is not an interval")));
        }
        for (i, j) in poset.adjacent_pairs() {
            let ij = i.union(&j);
            let maps = pairs.get(&(i.clone(), j.clone())).ok_or_else(|| {
                Error::ShapeMismatch(format!("missing maps for adjacent pair ({i},{j})"))
            })?;
            let ok = maps.i.degree() == 0
                && maps.p.degree() == 0
                && maps.d.degree() == 1
                && maps.i.source() == &all[&i]
                && maps.i.target() == &all[&ij]
                && maps.p.source() == &all[&ij]
                && maps.p.target() == &all[&j]
                && maps.d.source() == &all[&j]
                && maps.d.target() == &all[&i];
            if !ok {
                return Err(Error::ShapeMismatch(format!(
                    "maps for pair ({i},{j}) have the wrong shape"
                )));
            }
        }
        Ok(HomologyBraid {
            field,
            poset,
            dims: all,
            pairs,
        })
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn dims(&self, i: &Interval) -> &GradedSpace {
        &self.dims[i]
    }

    pub fn all_dims(&self) -> &BTreeMap<Interval, GradedSpace> {
        &self.dims
    }

    pub fn pair(&self, i: &Interval, j: &Interval) -> Option<&PairMaps<F>> {
        self.pairs.get(&(i.clone(), j.clone()))
    }

    pub fn pairs(&self) -> &BTreeMap<(Interval, Interval), PairMaps<F>> {
        &self.pairs
    }

    /// Nonempty intervals in canonical order.
    pub fn intervals(&self) -> Vec<Interval> {
        let mut v: Vec<Interval> = self.dims.keys().filter(|i| !i.is_empty()).cloned().collect();
        v.sort_by(Interval::canonical_cmp);
        v
    }

    fn pair_of(&self, i: &Interval, j: &Interval) -> &PairMaps<F> {
        self.pairs
            .get(&(i.clone(), j.clone()))
            .unwrap_or_else(|| panic!("({i},{j}) is not an adjacent pair"))
    }

    /// Exactness failures of the long exact sequence of one pair.
    pub fn exactness_failures(&self, i: &Interval, j: &Interval) -> Vec<String> {
        let maps = self.pair_of(i, j);
        let ij = i.union(j);
        let (hi, hij, hj) = (&self.dims[i], &self.dims[&ij], &self.dims[j]);
        let mut degrees: Vec<i32> = hi
            .degrees()
            .chain(hij.degrees())
            .chain(hj.degrees())
            .flat_map(|k| [k - 1, k, k + 1])
            .collect();
        degrees.sort_unstable();
        degrees.dedup();
        let mut out = Vec::new();
        for k in degrees {
            let ik = maps.i.block(k);
            let pk = maps.p.block(k);
            let dk = maps.d.block(k);
            let dk1 = maps.d.block(k + 1);
            let node = |name: &str, into: &Matrix<F>, out_of: &Matrix<F>, dim: usize| {
                let composite_zero = out_of.mul(into).is_zero();
                let ranks_match = into.rank() + out_of.rank() == dim;
                (!(composite_zero && ranks_match))
                    .then(|| format!("pair ({i},{j}) not exact at H_{k}({name})"))
            };
            out.extend(node(&i.to_string(), &dk1, &ik, hi.dim(k)));
            out.extend(node(&ij.to_string(), &ik, &pk, hij.dim(k)));
            out.extend(node(&j.to_string(), &pk, &dk, hj.dim(k)));
        }
        out
    }

    /// Check exactness, the noncomparable splitting identity and every
    /// braid square.
    pub fn verify_axioms(&self) -> BraidReport {
        let mut checks = Vec::new();
        for (i, j) in self.poset.adjacent_pairs() {
            let failures = self.exactness_failures(&i, &j);
            checks.push(AxiomCheck {
                axiom: "exactness".into(),
                tuple: format!("({i},{j})"),
                passed: failures.is_empty(),
            });
            if self.pairs.contains_key(&(j.clone(), i.clone())) {
                let lhs = self.pair_of(&j, &i).p.compose(&self.pair_of(&i, &j).i);
                checks.push(AxiomCheck {
                    axiom: "noncomparable-splitting".into(),
                    tuple: format!("({i},{j})"),
                    passed: lhs == GradedMap::identity(self.field, &self.dims[&i]),
                });
            }
        }
        for (i, j, k) in self.poset.adjacent_triples() {
            let ij = i.union(&j);
            let jk = j.union(&k);
            let p_ij = self.pair_of(&i, &j);
            let p_jk = self.pair_of(&j, &k);
            let p_ij_k = self.pair_of(&ij, &k);
            let p_i_jk = self.pair_of(&i, &jk);
            let squares: [(&str, GradedMap<F>, GradedMap<F>); 6] = [
                ("i-i", p_ij_k.i.compose(&p_ij.i), p_i_jk.i.clone()),
                ("p-i", p_i_jk.p.compose(&p_ij_k.i), p_jk.i.compose(&p_ij.p)),
                ("p-p", p_jk.p.compose(&p_i_jk.p), p_ij_k.p.clone()),
                ("d-i", p_i_jk.d.compose(&p_jk.i), p_ij.d.clone()),
                ("p-d", p_ij.p.compose(&p_ij_k.d), p_jk.d.clone()),
                ("i-d-p", p_ij.i.compose(&p_i_jk.d), p_ij_k.d.compose(&p_jk.p)),
            ];
            for (name, lhs, rhs) in squares {
                checks.push(AxiomCheck {
                    axiom: format!("braid-square-{name}"),
                    tuple: format!("({i},{j},{k})"),
                    passed: lhs == rhs,
                });
            }
        }
        BraidReport { checks }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub tuple: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BraidReport {
    pub checks: Vec<AxiomCheck>,
}

impl BraidReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// The complexes `(⊕_{p ∈ I} C(p), Δ(I))` for every interval `I`, with
/// their homology and the homology braid they generate.
#[derive(Clone, Debug)]
pub struct ChainBraid<F: Field> {
    delta: BlockGradedMap<F>,
    homology: BTreeMap<Interval, Homology<F>>,
    braid: HomologyBraid<F>,
}

impl<F: Field> ChainBraid<F> {
    /// Builds every interval complex and every long exact sequence.
    ///
    /// `delta` must be a strictly triangular degree-1 endomorphism squaring
    /// to zero; see [`crate::connection::validate`].
    pub fn new(poset: &Poset, delta: &BlockGradedMap<F>) -> Result<Self> {
        if delta.degree() != 1 || delta.source() != delta.target() || delta.len() != poset.len() {
            return Err(Error::ShapeMismatch(
                "boundary map must be a degree-1 endomorphism on the poset".into(),
            ));
        }
        let field = delta.field();
        let mut homology = BTreeMap::new();
        let mut dims = BTreeMap::new();
        for i in poset.intervals() {
            let h = Homology::of(&ChainComplex::new(delta.restrict(&i))?);
            dims.insert(i.clone(), h.dims().clone());
            homology.insert(i, h);
        }
        let ident = BlockGradedMap::identity(field, delta.source());
        let mut pairs = BTreeMap::new();
        for (i, j) in poset.adjacent_pairs() {
            let ij = i.union(&j);
            let (hi, hij, hj) = (&homology[&i], &homology[&ij], &homology[&j]);
            let maps = PairMaps {
                i: induced_unchecked(&ident.dense(&ij, &i), hi, hij),
                p: induced_unchecked(&ident.dense(&j, &ij), hij, hj),
                d: induced_unchecked(&delta.dense(&i, &j), hj, hi),
            };
            pairs.insert((i, j), maps);
        }
        let braid = HomologyBraid {
            field,
            poset: poset.clone(),
            dims,
            pairs,
        };
        for (i, j) in poset.adjacent_pairs() {
            if let Some(first) = braid.exactness_failures(&i, &j).into_iter().next() {
                return Err(Error::ExactnessFailure(first));
            }
        }
        Ok(ChainBraid {
            delta: delta.clone(),
            homology,
            braid,
        })
    }

    pub fn delta(&self) -> &BlockGradedMap<F> {
        &self.delta
    }

    pub fn poset(&self) -> &Poset {
        self.braid.poset()
    }

    pub fn homology(&self, i: &Interval) -> &Homology<F> {
        &self.homology[i]
    }

    pub fn braid(&self) -> &HomologyBraid<F> {
        &self.braid
    }

    pub fn into_braid(self) -> HomologyBraid<F> {
        self.braid
    }
}

/// One graded map per interval, of a common degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidMorphism<F: Field> {
    degree: i32,
    maps: BTreeMap<Interval, GradedMap<F>>,
}

impl<F: Field> BraidMorphism<F> {
    pub fn new(degree: i32, maps: BTreeMap<Interval, GradedMap<F>>) -> Result<Self> {
        if let Some((i, _)) = maps.iter().find(|(_, m)| m.degree() != degree) {
            return Err(Error::ShapeMismatch(format!(
                "component on {i} does not have degree {degree}"
            )));
        }
        Ok(BraidMorphism { degree, maps })
    }

    pub fn identity(braid: &HomologyBraid<F>) -> Self {
        BraidMorphism {
            degree: 0,
            maps: braid
                .intervals()
                .into_iter()
                .map(|i| {
                    let m = GradedMap::identity(braid.field, braid.dims(&i));
                    (i, m)
                })
                .collect(),
        }
    }

    /// The morphism induced on every interval by a triangular chain map.
    pub fn induced(t: &BlockGradedMap<F>, src: &ChainBraid<F>, tgt: &ChainBraid<F>) -> Result<Self> {
        let mut maps = BTreeMap::new();
        for i in src.braid.intervals() {
            let m = induced_map(&t.restrict(&i), src.homology(&i), tgt.homology(&i))
                .map_err(|e| match e {
                    Error::NotChainMap(msg) => Error::NotChainMap(format!("on interval {i}: {msg}")),
                    other => other,
                })?;
            maps.insert(i, m);
        }
        Ok(BraidMorphism {
            degree: t.degree(),
            maps,
        })
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn get(&self, i: &Interval) -> Option<&GradedMap<F>> {
        self.maps.get(i)
    }

    pub fn maps(&self) -> &BTreeMap<Interval, GradedMap<F>> {
        &self.maps
    }

    fn component(&self, i: &Interval) -> Result<&GradedMap<F>> {
        self.maps
            .get(i)
            .ok_or_else(|| Error::MissingInterval(i.to_string()))
    }

    /// `self` after `other`, on the intervals of `other`.
    pub fn compose(&self, other: &BraidMorphism<F>) -> Result<Self> {
        let mut maps = BTreeMap::new();
        for (i, m) in &other.maps {
            maps.insert(i.clone(), self.component(i)?.compose(m));
        }
        Ok(BraidMorphism {
            degree: self.degree + other.degree,
            maps,
        })
    }

    pub fn inverse(&self) -> Option<Self> {
        let maps = self
            .maps
            .iter()
            .map(|(i, m)| Some((i.clone(), m.inverse()?)))
            .collect::<Option<_>>()?;
        Some(BraidMorphism {
            degree: -self.degree,
            maps,
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.maps.values().all(GradedMap::is_invertible)
    }

    /// Ladder squares of every adjacent pair that fail to commute. The
    /// connecting square commutes up to `(-1)^r`.
    pub fn ladder_failures(&self, h: &HomologyBraid<F>, g: &HomologyBraid<F>) -> Result<Vec<String>> {
        if h.poset != g.poset {
            return Err(Error::ShapeMismatch("braids over different orders".into()));
        }
        for i in h.intervals() {
            let m = self.component(&i)?;
            if m.source() != h.dims(&i) || m.target() != g.dims(&i) {
                return Err(Error::ShapeMismatch(format!(
                    "component on {i} does not map between the braids"
                )));
            }
        }
        let sign = h.field.sign(self.degree);
        let mut out = Vec::new();
        for ((i, j), a) in &h.pairs {
            let b = g.pair_of(i, j);
            let ij = i.union(j);
            let (ti, tij, tj) = (self.component(i)?, self.component(&ij)?, self.component(j)?);
            if tij.compose(&a.i) != b.i.compose(ti) {
                out.push(format!("i-square of ({i},{j})"));
            }
            if tj.compose(&a.p) != b.p.compose(tij) {
                out.push(format!("p-square of ({i},{j})"));
            }
            if ti.compose(&a.d) != b.d.compose(tj).scale(&sign) {
                out.push(format!("connecting square of ({i},{j})"));
            }
        }
        Ok(out)
    }

    /// Whether every ladder square commutes.
    pub fn is_braid_map(&self, h: &HomologyBraid<F>, g: &HomologyBraid<F>) -> Result<bool> {
        Ok(self.ladder_failures(h, g)?.is_empty())
    }
}

/// Search for a degree-0 braid isomorphism `h -> g`.
///
/// Intervals are assigned small to large; each new component enters every
/// ladder square linearly once its partners are fixed, so candidates are
/// enumerated from an affine solution set. Over the rationals only uniquely
/// determined components can be handled.
pub fn find_isomorphism<F: Field>(
    h: &HomologyBraid<F>,
    g: &HomologyBraid<F>,
    budget: u64,
) -> Result<Option<BraidMorphism<F>>> {
    if h.poset != g.poset {
        return Err(Error::ShapeMismatch("braids over different orders".into()));
    }
    let order = h.intervals();
    if order.iter().any(|i| h.dims(i) != g.dims(i)) {
        return Ok(None);
    }
    let mut search = IsoSearch {
        h,
        g,
        order,
        budget,
        used: 0,
        assigned: BTreeMap::new(),
    };
    if search.assign(0)? {
        Ok(Some(BraidMorphism {
            degree: 0,
            maps: search.assigned,
        }))
    } else {
        Ok(None)
    }
}

struct IsoSearch<'a, F: Field> {
    h: &'a HomologyBraid<F>,
    g: &'a HomologyBraid<F>,
    order: Vec<Interval>,
    budget: u64,
    used: u64,
    assigned: BTreeMap<Interval, GradedMap<F>>,
}

impl<F: Field> IsoSearch<'_, F> {
    fn unpack(&self, u: &Interval, x: &[F::Elem]) -> GradedMap<F> {
        let f = self.h.field;
        let space = self.h.dims(u);
        let mut m = GradedMap::zero(f, 0, space.clone(), space.clone());
        let mut at = 0;
        for (k, d) in space.iter() {
            m.set_block(k, Matrix::from_vec(f, d, d, x[at..at + d * d].to_vec()))
                .expect("square block");
            at += d * d;
        }
        m
    }

    fn residual(&self, u: &Interval, cand: &GradedMap<F>) -> Vec<F::Elem> {
        let mut out = Vec::new();
        let mut push = |m: GradedMap<F>| {
            for b in m.blocks().values() {
                out.extend(b.entries().iter().cloned());
            }
        };
        let get = |i: &Interval| if i == u { Some(cand) } else { self.assigned.get(i) };
        for ((i, j), a) in &self.h.pairs {
            let b = self.g.pair_of(i, j);
            let ij = i.union(j);
            let touches = [i, j, &ij].contains(&u);
            if !touches {
                continue;
            }
            if let (Some(ti), Some(tij)) = (get(i), get(&ij)) {
                push(tij.compose(&a.i).sub(&b.i.compose(ti)));
            }
            if let (Some(tj), Some(tij)) = (get(j), get(&ij)) {
                push(tj.compose(&a.p).sub(&b.p.compose(tij)));
            }
            if let (Some(ti), Some(tj)) = (get(i), get(j)) {
                push(ti.compose(&a.d).sub(&b.d.compose(tj)));
            }
        }
        out
    }

    fn assign(&mut self, pos: usize) -> Result<bool> {
        let Some(u) = self.order.get(pos).cloned() else {
            return Ok(true);
        };
        let f = self.h.field;
        let unknowns: usize = self.h.dims(&u).iter().map(|(_, d)| d * d).sum();
        let system = LinearSystem::linearize(f, unknowns, |x| self.residual(&u, &self.unpack(&u, x)));
        let Some(space) = system.solve() else {
            return Ok(false);
        };
        let candidates: Box<dyn Iterator<Item = Vec<F::Elem>>> = match space.points() {
            Some(points) => Box::new(points),
            None if space.dim() == 0 => Box::new(std::iter::once(space.first())),
            None => return Err(Error::InfiniteField),
        };
        for x in candidates {
            self.used += 1;
            if self.used > self.budget {
                return Err(Error::SearchBudgetExceeded {
                    budget: self.budget,
                });
            }
            let cand = self.unpack(&u, &x);
            if !cand.is_invertible() {
                continue;
            }
            self.assigned.insert(u.clone(), cand);
            if self.assign(pos + 1)? {
                return Ok(true);
            }
            self.assigned.remove(&u);
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn attractor_repeller<F: Field>(f: F, entry: i64) -> (Poset, BlockGradedMap<F>) {
        let poset = Poset::chain(2);
        let spaces = vec![GradedSpace::concentrated(0, 1), GradedSpace::concentrated(1, 1)];
        let mut delta = BlockGradedMap::zero(f, 1, spaces.clone(), spaces);
        delta.set_block(0, 1, 1, Matrix::from_i64(f, 1, 1, &[entry])).unwrap();
        (poset, delta)
    }

    #[test]
    fn zero_interval_and_singletons() {
        let q = Rationals;
        let (poset, delta) = attractor_repeller(q, 1);
        let cb = ChainBraid::new(&poset, &delta).unwrap();
        assert!(cb.homology(&Interval::empty()).dims().is_zero());
        assert_eq!(cb.homology(&Interval::singleton(1)).dims(), &GradedSpace::concentrated(1, 1));
        assert!(cb.braid().dims(&Interval::full(2)).is_zero());
        let maps = cb.braid().pair(&Interval::singleton(0), &Interval::singleton(1)).unwrap();
        assert!(maps.d.is_invertible());
        assert!(cb.braid().verify_axioms().all_pass());
    }

    #[test]
    fn zero_boundary_splits() {
        let q = Rationals;
        let (poset, delta) = attractor_repeller(q, 0);
        let cb = ChainBraid::new(&poset, &delta).unwrap();
        let b = cb.braid();
        assert_eq!(b.dims(&Interval::full(2)).total_dim(), 2);
        assert!(b.pair(&Interval::singleton(0), &Interval::singleton(1)).unwrap().d.is_zero());
    }

    #[test]
    fn corrupted_connecting_map_breaks_exactness() {
        let f2 = PrimeField::f2();
        let (poset, delta) = attractor_repeller(f2, 1);
        let cb = ChainBraid::new(&poset, &delta).unwrap();
        let mut braid = cb.into_braid();
        let key = (Interval::singleton(0), Interval::singleton(1));
        let maps = braid.pairs.get_mut(&key).unwrap();
        maps.d = maps.d.scale(&0);
        let report = braid.verify_axioms();
        assert!(!report.all_pass());
        assert!(report.failures().all(|c| c.axiom == "exactness"));
    }

    #[test]
    fn antichain_splitting_identity() {
        let f2 = PrimeField::f2();
        let poset = Poset::antichain(3);
        let spaces = vec![GradedSpace::concentrated(0, 1); 3];
        let delta = BlockGradedMap::zero(f2, 1, spaces.clone(), spaces);
        let report = ChainBraid::new(&poset, &delta).unwrap().braid().verify_axioms();
        assert!(report.all_pass());
        assert!(report.checks.iter().any(|c| c.axiom == "noncomparable-splitting"));
    }

    #[test]
    fn morphism_ladders() {
        let q = Rationals;
        let (poset, delta) = attractor_repeller(q, 0);
        let cb = ChainBraid::new(&poset, &delta).unwrap();
        let b = cb.braid();
        let id = BraidMorphism::identity(b);
        assert!(id.is_braid_map(b, b).unwrap());
        let mut scaled = id.clone();
        let one = Interval::singleton(0);
        let m = scaled.maps[&one].scale(&q.from_i64(2));
        scaled.maps.insert(one, m);
        assert!(!scaled.is_braid_map(b, b).unwrap());
        let mut missing = id.clone();
        missing.maps.remove(&Interval::full(2));
        assert!(matches!(missing.is_braid_map(b, b), Err(Error::MissingInterval(_))));
    }

    #[test]
    fn isomorphism_search() {
        let f2 = PrimeField::f2();
        let (poset, delta) = attractor_repeller(f2, 1);
        let h = ChainBraid::new(&poset, &delta).unwrap().into_braid();
        let phi = find_isomorphism(&h, &h, 1 << 20).unwrap().unwrap();
        assert!(phi.is_braid_map(&h, &h).unwrap());
        let (_, zero) = attractor_repeller(f2, 0);
        let g = ChainBraid::new(&poset, &zero).unwrap().into_braid();
        assert!(find_isomorphism(&h, &g, 1 << 20).unwrap().is_none());
    }
}
