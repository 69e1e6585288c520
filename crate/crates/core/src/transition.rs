//! Transition matrices between connection matrices: chain condition,
//! covering of braid isomorphisms, the structural properties of covering
//! matrices, algebraic transition matrices, and three constructions.

use serde::Serialize;

use crate::block::{triangular_slots, BlockGradedMap, Slot};
use crate::braid::{BraidMorphism, ChainBraid, HomologyBraid};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::{induced_unchecked, GradedMap};
#[cfg(test)]
use crate::graded::GradedSpace;
use crate::linsys::LinearSystem;
use crate::poset::{Interval, Poset, StackDecomposition};

/// Whether `t delta = (-1)^r delta' t`.
pub fn check_chain<F: Field>(
    t: &BlockGradedMap<F>,
    delta: &BlockGradedMap<F>,
    delta_prime: &BlockGradedMap<F>,
) -> Result<bool> {
    if t.source() != delta.target() || t.target() != delta_prime.source() {
        return Err(Error::ShapeMismatch(
            "transition matrix does not map between the two complexes".into(),
        ));
    }
    Ok(chain_residual(t, delta, delta_prime).is_zero())
}

fn chain_residual<F: Field>(
    t: &BlockGradedMap<F>,
    delta: &BlockGradedMap<F>,
    delta_prime: &BlockGradedMap<F>,
) -> BlockGradedMap<F> {
    let sign = t.field().sign(t.degree());
    t.compose(delta).sub(&delta_prime.compose(t).scale(&sign))
}

/// Flattened entries of a block map in a fixed layout.
fn flatten<F: Field>(m: &GradedMap<F>, out: &mut Vec<F::Elem>) {
    for b in m.blocks().values() {
        out.extend(b.entries().iter().cloned());
    }
}

#[derive(Clone, Debug)]
pub struct CoverReport<F: Field> {
    pub covers: bool,
    pub failing_intervals: Vec<Interval>,
    pub induced: BraidMorphism<F>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub chain: bool,
    pub triangular: bool,
    /// Each diagonal entry equals `Φ'({p})⁻¹ θ({p}) Φ({p})`.
    pub diagonal_matches: bool,
    /// Each diagonal entry is literally the identity.
    pub diagonal_identity: bool,
    pub invertible: bool,
    pub inverse_covers: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtmCheck {
    pub degree_zero: bool,
    pub triangular: bool,
    pub diagonal_invertible: bool,
    pub intertwines: bool,
}

impl AtmCheck {
    pub fn holds(&self) -> bool {
        self.degree_zero && self.triangular && self.diagonal_invertible && self.intertwines
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniquenessCertificate {
    /// Dimension of the affine space of covering triangular matrices.
    pub solution_dim: usize,
    /// Number of covering matrices found by exhaustive enumeration, when
    /// the space was small enough to enumerate.
    pub enumerated: Option<u64>,
}

/// Two connection matrices on one poset, each with a verified degree-0
/// braid isomorphism onto the braid it is compared against.
#[derive(Clone, Debug)]
pub struct TransitionSetting<F: Field> {
    poset: Poset,
    source: ChainBraid<F>,
    target: ChainBraid<F>,
    g: HomologyBraid<F>,
    g_prime: HomologyBraid<F>,
    phi: BraidMorphism<F>,
    phi_prime: BraidMorphism<F>,
}

fn verify_iso<F: Field>(
    name: &str,
    m: &BraidMorphism<F>,
    degree: i32,
    h: &HomologyBraid<F>,
    g: &HomologyBraid<F>,
) -> Result<()> {
    if m.degree() != degree || !m.is_isomorphism() || !m.is_braid_map(h, g)? {
        return Err(Error::UnverifiedMorphism(name.to_string()));
    }
    Ok(())
}

impl<F: Field> TransitionSetting<F> {
    /// Builds both chain braids and verifies `phi: HΔ -> g` and
    /// `phi_prime: HΔ' -> g_prime`.
    pub fn new(
        poset: &Poset,
        delta: &BlockGradedMap<F>,
        delta_prime: &BlockGradedMap<F>,
        g: HomologyBraid<F>,
        g_prime: HomologyBraid<F>,
        phi: BraidMorphism<F>,
        phi_prime: BraidMorphism<F>,
    ) -> Result<Self> {
        let source = ChainBraid::new(poset, delta)?;
        let target = ChainBraid::new(poset, delta_prime)?;
        verify_iso("Φ", &phi, 0, source.braid(), &g)?;
        verify_iso("Φ'", &phi_prime, 0, target.braid(), &g_prime)?;
        Ok(TransitionSetting {
            poset: poset.clone(),
            source,
            target,
            g,
            g_prime,
            phi,
            phi_prime,
        })
    }

    /// Each side compared against its own generated braid through the
    /// identity.
    pub fn canonical(
        poset: &Poset,
        delta: &BlockGradedMap<F>,
        delta_prime: &BlockGradedMap<F>,
    ) -> Result<Self> {
        let source = ChainBraid::new(poset, delta)?;
        let target = ChainBraid::new(poset, delta_prime)?;
        let g = source.braid().clone();
        let g_prime = target.braid().clone();
        let phi = BraidMorphism::identity(&g);
        let phi_prime = BraidMorphism::identity(&g_prime);
        Ok(TransitionSetting {
            poset: poset.clone(),
            source,
            target,
            g,
            g_prime,
            phi,
            phi_prime,
        })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn delta(&self) -> &BlockGradedMap<F> {
        self.source.delta()
    }

    pub fn delta_prime(&self) -> &BlockGradedMap<F> {
        self.target.delta()
    }

    pub fn source(&self) -> &ChainBraid<F> {
        &self.source
    }

    pub fn target(&self) -> &ChainBraid<F> {
        &self.target
    }

    pub fn g(&self) -> &HomologyBraid<F> {
        &self.g
    }

    pub fn g_prime(&self) -> &HomologyBraid<F> {
        &self.g_prime
    }

    pub fn phi(&self) -> &BraidMorphism<F> {
        &self.phi
    }

    pub fn phi_prime(&self) -> &BraidMorphism<F> {
        &self.phi_prime
    }

    fn field(&self) -> F {
        self.g.field()
    }

    /// The setting with source and target exchanged.
    pub fn swapped(&self) -> Self {
        TransitionSetting {
            poset: self.poset.clone(),
            source: self.target.clone(),
            target: self.source.clone(),
            g: self.g_prime.clone(),
            g_prime: self.g.clone(),
            phi: self.phi_prime.clone(),
            phi_prime: self.phi.clone(),
        }
    }

    /// Chain from this setting's source to `next`'s target. The target of
    /// `self` must coincide with the source of `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.delta_prime() != next.delta() || self.g_prime != next.g || self.phi_prime != next.phi {
            return Err(Error::ShapeMismatch(
                "settings do not share the intermediate connection matrix".into(),
            ));
        }
        Ok(TransitionSetting {
            poset: self.poset.clone(),
            source: self.source.clone(),
            target: next.target.clone(),
            g: self.g.clone(),
            g_prime: next.g_prime.clone(),
            phi: self.phi.clone(),
            phi_prime: next.phi_prime.clone(),
        })
    }

    pub fn check_chain(&self, t: &BlockGradedMap<F>) -> Result<bool> {
        check_chain(t, self.delta(), self.delta_prime())
    }

    fn require_chain(&self, t: &BlockGradedMap<F>) -> Result<()> {
        if let Some((q, p)) = t.triangularity_violation(&self.poset, false) {
            return Err(Error::Precondition(format!(
                "transition matrix entry ({q},{p}) is not upper triangular"
            )));
        }
        if !self.check_chain(t)? {
            return Err(Error::NotChainMap(
                "transition matrix does not intertwine the boundary maps".into(),
            ));
        }
        Ok(())
    }

    /// The braid morphism `T_*` induced on every interval.
    pub fn induced(&self, t: &BlockGradedMap<F>) -> Result<BraidMorphism<F>> {
        self.require_chain(t)?;
        BraidMorphism::induced(t, &self.source, &self.target)
    }

    fn square_holds(&self, i: &Interval, t_star: &GradedMap<F>, theta: &BraidMorphism<F>) -> Result<bool> {
        let comp = |m: &BraidMorphism<F>| {
            m.get(i).cloned().ok_or_else(|| Error::MissingInterval(i.to_string()))
        };
        let lhs = comp(&self.phi_prime)?.compose(t_star);
        let rhs = comp(theta)?.compose(&comp(&self.phi)?);
        Ok(lhs == rhs)
    }

    /// Whether `Φ'(I) T_*(I) = θ(I) Φ(I)` on every interval.
    pub fn check_cover(&self, t: &BlockGradedMap<F>, theta: &BraidMorphism<F>) -> Result<CoverReport<F>> {
        verify_iso("θ", theta, t.degree(), &self.g, &self.g_prime)?;
        let induced = self.induced(t)?;
        let mut failing = Vec::new();
        for i in self.g.intervals() {
            let t_star = induced.get(&i).expect("induced on every interval");
            if !self.square_holds(&i, t_star, theta)? {
                failing.push(i);
            }
        }
        Ok(CoverReport {
            covers: failing.is_empty(),
            failing_intervals: failing,
            induced,
        })
    }

    /// Whether the covering square commutes on every listed interval.
    pub fn check_weak_cover(
        &self,
        t: &BlockGradedMap<F>,
        theta: &BraidMorphism<F>,
        intervals: &[Interval],
    ) -> Result<bool> {
        self.require_chain(t)?;
        for i in intervals {
            let t_star = self.induced_on(t, i);
            if !self.square_holds(i, &t_star, theta)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the covering square commutes on at least one listed interval.
    pub fn weakly_covers_some(
        &self,
        t: &BlockGradedMap<F>,
        theta: &BraidMorphism<F>,
        intervals: &[Interval],
    ) -> Result<bool> {
        self.require_chain(t)?;
        for i in intervals {
            let t_star = self.induced_on(t, i);
            if self.square_holds(i, &t_star, theta)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn induced_on(&self, t: &BlockGradedMap<F>, i: &Interval) -> GradedMap<F> {
        induced_unchecked(&t.restrict(i), self.source.homology(i), self.target.homology(i))
    }

    /// Check the chain condition, triangularity with the prescribed diagonal,
    /// invertibility by back-substitution, and that the inverse covers
    /// `θ⁻¹`. Returns the inverse.
    pub fn property_report(
        &self,
        t: &BlockGradedMap<F>,
        theta: &BraidMorphism<F>,
    ) -> Result<(PropertyReport, BlockGradedMap<F>)> {
        let fail = |clause: &str, detail: String| Error::PropertyFailure {
            clause: clause.into(),
            detail,
        };
        if t.degree() != 0 {
            return Err(Error::Precondition("structural properties need degree 0".into()));
        }
        let chain = self.check_chain(t)?;
        if !chain {
            return Err(fail("i", "T Δ ≠ Δ' T".into()));
        }
        if let Some((q, p)) = t.triangularity_violation(&self.poset, false) {
            return Err(fail("ii", format!("entry ({q},{p}) is below the diagonal")));
        }
        let mut diagonal_identity = true;
        for p in 0..self.poset.len() {
            let i = Interval::singleton(p);
            let d = t.entry(p, p);
            let expected = self.phi_prime.get(&i).and_then(|m| m.inverse()).map(|inv| {
                inv.compose(&theta.get(&i).expect("θ on every interval").compose(self.phi.get(&i).expect("Φ on every interval")))
            });
            if expected.as_ref() != Some(&d) {
                return Err(fail("ii", format!("diagonal entry ({p},{p}) is not the prescribed isomorphism")));
            }
            diagonal_identity &= d.source() == d.target() && d == GradedMap::identity(t.field(), d.source());
        }
        let inverse = t
            .inverse_triangular(&self.poset)
            .map_err(|e| fail("iii", e.to_string()))?;
        let id_src = BlockGradedMap::identity(t.field(), t.source());
        let id_tgt = BlockGradedMap::identity(t.field(), t.target());
        if inverse.compose(t) != id_src || t.compose(&inverse) != id_tgt {
            return Err(fail("iii", "back-substitution does not invert".into()));
        }
        let theta_inv = theta
            .inverse()
            .ok_or_else(|| fail("iv", "θ is not invertible".into()))?;
        let inverse_covers = self.swapped().check_cover(&inverse, &theta_inv)?.covers;
        if !inverse_covers {
            return Err(fail("iv", "T⁻¹ does not cover θ⁻¹".into()));
        }
        Ok((
            PropertyReport {
                chain,
                triangular: true,
                diagonal_matches: true,
                diagonal_identity,
                invertible: true,
                inverse_covers,
            },
            inverse,
        ))
    }

    /// With both boundary maps zero, `T = Φ'(P)⁻¹ θ(P) Φ(P)`.
    pub fn construct_trivial(&self, theta: &BraidMorphism<F>) -> Result<BlockGradedMap<F>> {
        if !self.delta().is_zero() || !self.delta_prime().is_zero() {
            return Err(Error::NonTrivialConnection);
        }
        verify_iso("θ", theta, theta.degree(), &self.g, &self.g_prime)?;
        let all = Interval::full(self.poset.len());
        let get = |m: &BraidMorphism<F>| {
            m.get(&all).cloned().ok_or_else(|| Error::MissingInterval(all.to_string()))
        };
        let phi_prime_inv = get(&self.phi_prime)?
            .inverse()
            .ok_or_else(|| Error::UnverifiedMorphism("Φ'".into()))?;
        let dense = phi_prime_inv.compose(&get(theta)?.compose(&get(&self.phi)?));
        BlockGradedMap::from_dense(
            self.field(),
            self.delta().source().to_vec(),
            self.delta_prime().source().to_vec(),
            &all,
            &all,
            &dense,
        )
    }

    fn slots(&self, degree: i32) -> Vec<Slot> {
        triangular_slots(
            &self.poset,
            self.delta().source(),
            self.delta_prime().source(),
            degree,
            false,
        )
    }

    fn assemble(&self, degree: i32, slots: &[Slot], x: &[F::Elem]) -> BlockGradedMap<F> {
        BlockGradedMap::from_slots(
            self.field(),
            degree,
            self.delta().source().to_vec(),
            self.delta_prime().source().to_vec(),
            slots,
            x,
        )
    }

    /// Residual of the chain condition followed by the covering squares on
    /// `intervals`, as a function of the triangular entries.
    fn cover_system(
        &self,
        theta: &BraidMorphism<F>,
        intervals: &[Interval],
        slots: &[Slot],
    ) -> Result<LinearSystem<F>> {
        let r = theta.degree();
        let f = self.field();
        let mut rhs = Vec::new();
        for i in intervals {
            let get = |m: &BraidMorphism<F>| {
                m.get(i).cloned().ok_or_else(|| Error::MissingInterval(i.to_string()))
            };
            rhs.push((get(&self.phi_prime)?, get(theta)?.compose(&get(&self.phi)?)));
        }
        let all = Interval::full(self.poset.len());
        Ok(LinearSystem::linearize(f, slots.len(), |x| {
            let t = self.assemble(r, slots, x);
            let mut out = Vec::new();
            flatten(&chain_residual(&t, self.delta(), self.delta_prime()).dense(&all, &all), &mut out);
            for (i, (phi_prime, target)) in intervals.iter().zip(&rhs) {
                let t_star = self.induced_on(&t, i);
                flatten(&phi_prime.compose(&t_star).sub(target), &mut out);
            }
            out
        }))
    }

    fn diagonal_invertible(&self, t: &BlockGradedMap<F>) -> bool {
        (0..self.poset.len()).all(|p| t.entry(p, p).is_invertible())
    }

    /// A triangular chain map with invertible diagonal covering `theta` on
    /// every block of the stack; the lexicographically smallest over a
    /// finite field. `None` when no such matrix exists.
    pub fn construct_stackable(
        &self,
        theta: &BraidMorphism<F>,
        stack: &StackDecomposition,
        budget: u64,
    ) -> Result<Option<BlockGradedMap<F>>> {
        if !stack.is_valid_for(&self.poset) {
            return Err(Error::Precondition("not a stack decomposition of the order".into()));
        }
        verify_iso("θ", theta, theta.degree(), &self.g, &self.g_prime)?;
        let slots = self.slots(theta.degree());
        let system = self.cover_system(theta, &stack.blocks, &slots)?;
        let Some(space) = system.solve() else {
            return Ok(None);
        };
        let Some(points) = space.points() else {
            let t = self.assemble(theta.degree(), &slots, &space.first());
            return if self.diagonal_invertible(&t) {
                Ok(Some(t))
            } else if space.dim() == 0 {
                Ok(None)
            } else {
                Err(Error::InfiniteField)
            };
        };
        for (n, x) in points.enumerate() {
            if n as u64 >= budget {
                return Err(Error::SearchBudgetExceeded { budget });
            }
            let t = self.assemble(theta.degree(), &slots, &x);
            if self.diagonal_invertible(&t) {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    /// The unique transition matrix covering `theta` when every summand is
    /// concentrated in one degree and the order is the degree order.
    pub fn construct_unique_k(
        &self,
        theta: &BraidMorphism<F>,
        budget: u64,
    ) -> Result<(BlockGradedMap<F>, UniquenessCertificate)> {
        let c = self.delta().source();
        let c_prime = self.delta_prime().source();
        let order = Poset::order_k(c)?;
        let order_prime = Poset::order_k(c_prime)?;
        for p in 0..c.len() {
            let (a, b) = (c[p].concentrated_degree(p)?, c_prime[p].concentrated_degree(p)?);
            if let (Some(a), Some(b)) = (a, b) {
                if a != b {
                    return Err(Error::Precondition(format!(
                        "element {p} sits in degree {a} on one side and {b} on the other"
                    )));
                }
            }
        }
        if order.relations() != self.poset.relations() || order_prime.relations() != self.poset.relations() {
            return Err(Error::Precondition("the order is not the degree order".into()));
        }
        verify_iso("θ", theta, theta.degree(), &self.g, &self.g_prime)?;
        let slots = self.slots(theta.degree());
        let intervals = self.g.intervals();
        let system = self.cover_system(theta, &intervals, &slots)?;
        let space = system
            .solve()
            .ok_or_else(|| Error::UniquenessViolated("no covering transition matrix".into()))?;
        if space.dim() > 0 {
            return Err(Error::UniquenessViolated(format!(
                "covering matrices form an affine space of dimension {}",
                space.dim()
            )));
        }
        let t = self.assemble(theta.degree(), &slots, &space.first());
        let enumerated = self.count_covering(theta, &slots, budget)?;
        if enumerated.is_some_and(|n| n != 1) {
            return Err(Error::UniquenessViolated(format!(
                "exhaustive enumeration found {} covering matrices",
                enumerated.unwrap()
            )));
        }
        Ok((
            t,
            UniquenessCertificate {
                solution_dim: 0,
                enumerated,
            },
        ))
    }

    /// Count covering triangular matrices by brute force, if the candidate
    /// space is finite and within budget.
    fn count_covering(&self, theta: &BraidMorphism<F>, slots: &[Slot], budget: u64) -> Result<Option<u64>> {
        let Some(elements) = self.field().elements() else {
            return Ok(None);
        };
        let total = (0..slots.len()).try_fold(1u64, |acc, _| acc.checked_mul(elements.len() as u64));
        if total.is_none_or(|t| t > budget) {
            return Ok(None);
        }
        let mut count = 0;
        let mut counter = vec![0usize; slots.len()];
        loop {
            let x: Vec<F::Elem> = counter.iter().map(|&i| elements[i].clone()).collect();
            let t = self.assemble(theta.degree(), slots, &x);
            if self.check_chain(&t)? && self.check_cover(&t, theta)?.covers {
                count += 1;
            }
            let mut carried = true;
            for slot in counter.iter_mut().rev() {
                *slot += 1;
                if *slot < elements.len() {
                    carried = false;
                    break;
                }
                *slot = 0;
            }
            if carried {
                return Ok(Some(count));
            }
        }
    }
}

/// Triangular, invertible diagonal entries, and `Δ' T = T Δ`.
pub fn check_algebraic_tm<F: Field>(
    poset: &Poset,
    t: &BlockGradedMap<F>,
    delta: &BlockGradedMap<F>,
    delta_prime: &BlockGradedMap<F>,
) -> Result<AtmCheck> {
    let intertwines = check_chain(t, delta, delta_prime)?;
    Ok(AtmCheck {
        degree_zero: t.degree() == 0,
        triangular: t.is_triangular(poset, false),
        diagonal_invertible: (0..poset.len()).all(|p| t.entry(p, p).is_invertible()),
        intertwines,
    })
}

/// `T Δ T⁻¹`.
pub fn conjugate<F: Field>(
    poset: &Poset,
    t: &BlockGradedMap<F>,
    delta: &BlockGradedMap<F>,
) -> Result<BlockGradedMap<F>> {
    let inv = t.inverse_triangular(poset)?;
    Ok(t.compose(delta).compose(&inv))
}

/// For `Δ' = T Δ T⁻¹` and `Φ: HΔ -> G`, the isomorphism `Φ ∘ T_*⁻¹: HΔ' -> G`.
pub fn conjugated_phi<F: Field>(
    poset: &Poset,
    t: &BlockGradedMap<F>,
    delta: &BlockGradedMap<F>,
    phi: &BraidMorphism<F>,
) -> Result<(BlockGradedMap<F>, BraidMorphism<F>)> {
    let delta_prime = conjugate(poset, t, delta)?;
    let src = ChainBraid::new(poset, delta)?;
    let tgt = ChainBraid::new(poset, &delta_prime)?;
    let t_star = BraidMorphism::induced(t, &src, &tgt)?;
    let inv = t_star
        .inverse()
        .ok_or_else(|| Error::UnverifiedMorphism("T_*".into()))?;
    Ok((delta_prime, phi.compose(&inv)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtmBlockFlags {
    /// Number of algebraic transition matrices enumerated.
    pub count: u64,
    /// For consecutive blocks `(I_{j-1}, I_j)`, whether every enumerated
    /// matrix has a nonzero `(I_{j-1}, I_j)` block.
    pub always_nonzero: Vec<bool>,
}

/// Enumerate all algebraic transition matrices from `delta` to
/// `delta_prime` over a finite field and record which consecutive block
/// pairs are never zero.
pub fn atm_block_flags<F: Field>(
    poset: &Poset,
    delta: &BlockGradedMap<F>,
    delta_prime: &BlockGradedMap<F>,
    blocks: &[Interval],
    budget: u64,
) -> Result<AtmBlockFlags> {
    let f = delta.field();
    let slots = triangular_slots(poset, delta.source(), delta_prime.source(), 0, false);
    let all = Interval::full(poset.len());
    let build = |x: &[F::Elem]| {
        BlockGradedMap::from_slots(
            f,
            0,
            delta.source().to_vec(),
            delta_prime.source().to_vec(),
            &slots,
            x,
        )
    };
    let system = LinearSystem::linearize(f, slots.len(), |x| {
        let mut out = Vec::new();
        flatten(&chain_residual(&build(x), delta, delta_prime).dense(&all, &all), &mut out);
        out
    });
    let mut flags = AtmBlockFlags {
        count: 0,
        always_nonzero: vec![true; blocks.len().saturating_sub(1)],
    };
    let Some(space) = system.solve() else {
        return Ok(flags);
    };
    let points = space.points().ok_or(Error::InfiniteField)?;
    if space.count().is_none_or(|c| c > budget) {
        return Err(Error::SearchBudgetExceeded { budget });
    }
    for x in points {
        let t = build(&x);
        if !(0..poset.len()).all(|p| t.entry(p, p).is_invertible()) {
            continue;
        }
        flags.count += 1;
        for (j, w) in blocks.windows(2).enumerate() {
            if t.dense(&w[0], &w[1]).is_zero() {
                flags.always_nonzero[j] = false;
            }
        }
    }
    Ok(flags)
}
