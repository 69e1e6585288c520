//! Poset-indexed block matrices of graded maps.
//!
//! Entry `(q, p)` maps the summand of element `p` into the summand of
//! element `q`. Direct sums over a set of elements are laid out in
//! increasing element order within each degree.

use std::collections::BTreeMap;

use crate::error::{Error, ResidualBlock, Result};
use crate::field::Field;
use crate::graded::{GradedMap, GradedSpace};
use crate::matrix::Matrix;
use crate::poset::{Interval, Poset};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGradedMap<F: Field> {
    field: F,
    degree: i32,
    source: Vec<GradedSpace>,
    target: Vec<GradedSpace>,
    entries: BTreeMap<(usize, usize), GradedMap<F>>,
}

/// `⊕_{p ∈ members} spaces[p]`.
pub fn sum_space(spaces: &[GradedSpace], members: &[usize]) -> GradedSpace {
    GradedSpace::direct_sum(members.iter().map(|&p| &spaces[p]))
}

/// Offset of each member's degree-`k` part inside the direct sum.
fn offsets(spaces: &[GradedSpace], members: &[usize], k: i32) -> Vec<usize> {
    let mut acc = 0;
    members
        .iter()
        .map(|&p| {
            let o = acc;
            acc += spaces[p].dim(k);
            o
        })
        .collect()
}

impl<F: Field> BlockGradedMap<F> {
    /// The zero map.
    ///
    /// # Panics
    /// If source and target index different element counts.
    pub fn zero(field: F, degree: i32, source: Vec<GradedSpace>, target: Vec<GradedSpace>) -> Self {
        assert_eq!(source.len(), target.len(), "one source and target space per element");
        BlockGradedMap {
            field,
            degree,
            source,
            target,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(field: F, spaces: &[GradedSpace]) -> Self {
        let mut m = Self::zero(field, 0, spaces.to_vec(), spaces.to_vec());
        for (p, s) in spaces.iter().enumerate() {
            if !s.is_zero() {
                m.entries.insert((p, p), GradedMap::identity(field, s));
            }
        }
        m
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn source(&self) -> &[GradedSpace] {
        &self.source
    }

    pub fn target(&self) -> &[GradedSpace] {
        &self.target
    }

    fn check_index(&self, q: usize, p: usize) -> Result<()> {
        let n = self.len();
        for element in [q, p] {
            if element >= n {
                return Err(Error::ElementOutOfRange { element, n });
            }
        }
        Ok(())
    }

    /// Set entry `(q, p)`; zero maps clear the entry.
    pub fn set_entry(&mut self, q: usize, p: usize, map: GradedMap<F>) -> Result<()> {
        self.check_index(q, p)?;
        if map.degree() != self.degree
            || map.source() != &self.source[p]
            || map.target() != &self.target[q]
        {
            return Err(Error::ShapeMismatch(format!(
                "entry ({q},{p}) does not map C({p}) to C({q}) in degree {}",
                self.degree
            )));
        }
        if map.is_zero() {
            self.entries.remove(&(q, p));
        } else {
            self.entries.insert((q, p), map);
        }
        Ok(())
    }

    /// Set the degree-`k` block of entry `(q, p)`.
    pub fn set_block(&mut self, q: usize, p: usize, k: i32, m: Matrix<F>) -> Result<()> {
        let mut e = self.entry(q, p);
        e.set_block(k, m)
            .map_err(|e| Error::ShapeMismatch(format!("entry ({q},{p}): {e}")))?;
        self.set_entry(q, p, e)
    }

    pub fn entry(&self, q: usize, p: usize) -> GradedMap<F> {
        self.entries.get(&(q, p)).cloned().unwrap_or_else(|| {
            GradedMap::zero(
                self.field,
                self.degree,
                self.source[p].clone(),
                self.target[q].clone(),
            )
        })
    }

    /// Nonzero entries keyed by `(row, column)`.
    pub fn entries(&self) -> &BTreeMap<(usize, usize), GradedMap<F>> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// First nonzero entry `(q, p)` violating `q < p` (or `q <= p` when not
    /// strict).
    pub fn triangularity_violation(&self, poset: &Poset, strict: bool) -> Option<(usize, usize)> {
        self.entries
            .keys()
            .copied()
            .find(|&(q, p)| if strict { !poset.lt(q, p) } else { !poset.le(q, p) })
    }

    pub fn is_triangular(&self, poset: &Poset, strict: bool) -> bool {
        self.triangularity_violation(poset, strict).is_none()
    }

    /// The map from `⊕_{p ∈ cols} C(p)` to `⊕_{q ∈ rows} C'(q)`.
    pub fn dense(&self, rows: &Interval, cols: &Interval) -> GradedMap<F> {
        let r = self.degree;
        let src = sum_space(&self.source, cols.members());
        let tgt = sum_space(&self.target, rows.members());
        let mut out = GradedMap::zero(self.field, r, src.clone(), tgt.clone());
        for k in src.degrees() {
            let col_off = offsets(&self.source, cols.members(), k);
            let row_off = offsets(&self.target, rows.members(), k - r);
            let mut m = Matrix::zeros(self.field, tgt.dim(k - r), src.dim(k));
            for (a, &q) in rows.members().iter().enumerate() {
                for (b, &p) in cols.members().iter().enumerate() {
                    let Some(e) = self.entries.get(&(q, p)) else { continue };
                    let block = e.block(k);
                    for i in 0..block.rows() {
                        for j in 0..block.cols() {
                            m.set(row_off[a] + i, col_off[b] + j, block.get(i, j).clone());
                        }
                    }
                }
            }
            out.set_block(k, m).expect("dense block has the summed shape");
        }
        out
    }

    /// The square restriction to an interval.
    pub fn restrict(&self, i: &Interval) -> GradedMap<F> {
        self.dense(i, i)
    }

    /// The map on all elements.
    pub fn total(&self) -> GradedMap<F> {
        let all = Interval::full(self.len());
        self.dense(&all, &all)
    }

    /// Split a dense map on direct sums back into entries on `rows x cols`.
    pub fn from_dense(
        field: F,
        source: Vec<GradedSpace>,
        target: Vec<GradedSpace>,
        rows: &Interval,
        cols: &Interval,
        map: &GradedMap<F>,
    ) -> Result<Self> {
        let r = map.degree();
        if map.source() != &sum_space(&source, cols.members())
            || map.target() != &sum_space(&target, rows.members())
        {
            return Err(Error::ShapeMismatch(
                "dense map does not match the block layout".into(),
            ));
        }
        let mut out = Self::zero(field, r, source, target);
        for (a, &q) in rows.members().iter().enumerate() {
            for (b, &p) in cols.members().iter().enumerate() {
                let mut e = GradedMap::zero(
                    field,
                    r,
                    out.source[p].clone(),
                    out.target[q].clone(),
                );
                for k in out.source[p].degrees().collect::<Vec<_>>() {
                    let col_off = offsets(&out.source, cols.members(), k)[b];
                    let row_off = offsets(&out.target, rows.members(), k - r)[a];
                    let big = map.block(k);
                    let row_idx: Vec<usize> =
                        (row_off..row_off + out.target[q].dim(k - r)).collect();
                    let col_idx: Vec<usize> = (col_off..col_off + out.source[p].dim(k)).collect();
                    e.set_block(k, big.select(&row_idx, &col_idx))?;
                }
                out.set_entry(q, p, e)?;
            }
        }
        Ok(out)
    }

    /// `self` after `g`.
    ///
    /// # Panics
    /// If `g`'s targets are not `self`'s sources.
    pub fn compose(&self, g: &BlockGradedMap<F>) -> Self {
        assert_eq!(self.source, g.target, "composition of incompatible block maps");
        let mut out = Self::zero(
            self.field,
            self.degree + g.degree,
            g.source.clone(),
            self.target.clone(),
        );
        let mut acc: BTreeMap<(usize, usize), GradedMap<F>> = BTreeMap::new();
        for (&(q, m), a) in &self.entries {
            for (&(m2, p), b) in g.entries.range((m, 0)..(m + 1, 0)) {
                debug_assert_eq!(m, m2);
                let prod = a.compose(b);
                match acc.get_mut(&(q, p)) {
                    Some(sum) => *sum = sum.add(&prod),
                    None => {
                        acc.insert((q, p), prod);
                    }
                }
            }
        }
        for ((q, p), e) in acc {
            out.set_entry(q, p, e).expect("product entries are well shaped");
        }
        out
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(&GradedMap<F>, &GradedMap<F>) -> GradedMap<F>) -> Self {
        assert!(
            self.degree == rhs.degree && self.source == rhs.source && self.target == rhs.target,
            "block maps of different shapes"
        );
        let mut out = Self::zero(self.field, self.degree, self.source.clone(), self.target.clone());
        let keys: std::collections::BTreeSet<_> =
            self.entries.keys().chain(rhs.entries.keys()).copied().collect();
        for (q, p) in keys {
            out.set_entry(q, p, op(&self.entry(q, p), &rhs.entry(q, p)))
                .expect("same shapes");
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, GradedMap::add)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, GradedMap::sub)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = Self::zero(self.field, self.degree, self.source.clone(), self.target.clone());
        for (&(q, p), e) in &self.entries {
            out.set_entry(q, p, e.scale(c)).expect("same shapes");
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    /// Inverse of a `poset`-triangular map by block back-substitution:
    /// `S(p,p) = T(p,p)^-1` and
    /// `S(q,p) = -T(q,q)^-1 Σ_{q<m<=p} T(q,m) S(m,p)`.
    pub fn inverse_triangular(&self, poset: &Poset) -> Result<Self> {
        if let Some((q, p)) = self.triangularity_violation(poset, false) {
            return Err(Error::Precondition(format!(
                "entry ({q},{p}) is not upper triangular"
            )));
        }
        let n = self.len();
        let mut diag_inv = Vec::with_capacity(n);
        for p in 0..n {
            let d = self.entry(p, p);
            let inv = d.inverse().ok_or_else(|| {
                Error::Precondition(format!("diagonal entry ({p},{p}) is not invertible"))
            })?;
            diag_inv.push(inv);
        }
        let mut out = Self::zero(self.field, -self.degree, self.target.clone(), self.source.clone());
        let order = poset.linear_extension();
        for &p in &order {
            out.set_entry(p, p, diag_inv[p].clone())?;
        }
        for &q in order.iter().rev() {
            for p in (0..n).filter(|&p| poset.lt(q, p)) {
                let mut sum = GradedMap::zero(self.field, 0, self.target[p].clone(), self.target[q].clone());
                for m in (0..n).filter(|&m| poset.lt(q, m) && poset.le(m, p)) {
                    let Some(t) = self.entries.get(&(q, m)) else { continue };
                    sum = sum.add(&t.compose(&out.entry(m, p)));
                }
                let s = diag_inv[q].compose(&sum).neg();
                out.set_entry(q, p, s)?;
            }
        }
        Ok(out)
    }

    /// Nonzero blocks in a field-agnostic form, for diagnostics.
    pub fn residual_blocks(&self) -> Vec<ResidualBlock> {
        let mut out = Vec::new();
        for (&(q, p), e) in &self.entries {
            for (&k, m) in e.blocks() {
                if !m.is_zero() {
                    out.push(ResidualBlock {
                        row: q,
                        col: p,
                        source_degree: k,
                        data: m.to_strings(),
                    });
                }
            }
        }
        out
    }
}

/// One scalar position inside a block map: entry `(row, col)`, source
/// degree `degree`, matrix position `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slot {
    pub row: usize,
    pub col: usize,
    pub degree: i32,
    pub i: usize,
    pub j: usize,
}

/// Every scalar position of a degree-`r` block map allowed by
/// triangularity (`row < col`, or `row <= col` when not strict), in
/// lexicographic order.
pub fn triangular_slots(
    poset: &Poset,
    source: &[GradedSpace],
    target: &[GradedSpace],
    degree: i32,
    strict: bool,
) -> Vec<Slot> {
    let mut out = Vec::new();
    for q in 0..poset.len() {
        for p in 0..poset.len() {
            let allowed = if strict { poset.lt(q, p) } else { poset.le(q, p) };
            if !allowed {
                continue;
            }
            for (k, cols) in source[p].iter() {
                for i in 0..target[q].dim(k - degree) {
                    for j in 0..cols {
                        out.push(Slot {
                            row: q,
                            col: p,
                            degree: k,
                            i,
                            j,
                        });
                    }
                }
            }
        }
    }
    out
}

impl<F: Field> BlockGradedMap<F> {
    /// The map with `values[n]` at `slots[n]` and zero elsewhere.
    pub fn from_slots(
        field: F,
        degree: i32,
        source: Vec<GradedSpace>,
        target: Vec<GradedSpace>,
        slots: &[Slot],
        values: &[F::Elem],
    ) -> Self {
        let mut blocks: BTreeMap<(usize, usize, i32), Matrix<F>> = BTreeMap::new();
        for (s, v) in slots.iter().zip(values) {
            if field.is_zero(v) {
                continue;
            }
            let m = blocks.entry((s.row, s.col, s.degree)).or_insert_with(|| {
                Matrix::zeros(
                    field,
                    target[s.row].dim(s.degree - degree),
                    source[s.col].dim(s.degree),
                )
            });
            m.set(s.i, s.j, v.clone());
        }
        let mut out = Self::zero(field, degree, source, target);
        for ((q, p, k), m) in blocks {
            out.set_block(q, p, k, m).expect("slots lie inside their blocks");
        }
        out
    }

    /// The values at the given slots.
    pub fn slot_values(&self, slots: &[Slot]) -> Vec<F::Elem> {
        slots
            .iter()
            .map(|s| match self.entries.get(&(s.row, s.col)) {
                Some(e) => e.block(s.degree).get(s.i, s.j).clone(),
                None => self.field.zero(),
            })
            .collect()
    }
}
