//! Graded vector spaces, graded maps, chain complexes and homology with
//! canonical bases.
//!
//! A map of degree `r` sends grade `k` to grade `k - r`. A degree-`r` map
//! `f` between complexes is a chain map when `f d = (-1)^r d' f`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{kernel_image, reduce_columns, Matrix};

/// Dimension per degree, with finite support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedSpace {
    dims: BTreeMap<i32, usize>,
}

impl GradedSpace {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i32, usize)>) -> Self {
        let mut s = Self::default();
        for (k, d) in pairs {
            *s.dims.entry(k).or_default() += d;
        }
        s.dims.retain(|_, d| *d > 0);
        s
    }

    pub fn concentrated(k: i32, dim: usize) -> Self {
        Self::from_pairs([(k, dim)])
    }

    pub fn dim(&self, k: i32) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    /// Degrees with nonzero dimension, ascending.
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.dims.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.dims.iter().map(|(&k, &d)| (k, d))
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// The space with every degree raised by `s`.
    pub fn shift(&self, s: i32) -> Self {
        Self::from_pairs(self.iter().map(|(k, d)| (k + s, d)))
    }

    pub fn direct_sum<'a>(spaces: impl IntoIterator<Item = &'a GradedSpace>) -> Self {
        Self::from_pairs(spaces.into_iter().flat_map(|s| s.iter()))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.iter()
            .map(|(k, d)| if k.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// The single degree carrying this space, `None` if the space is zero.
    /// `element` is only used to label the error.
    pub fn concentrated_degree(&self, element: usize) -> Result<Option<i32>> {
        let degrees: Vec<i32> = self.degrees().collect();
        match degrees.as_slice() {
            [] => Ok(None),
            [k] => Ok(Some(*k)),
            _ => Err(Error::DegreeNotConcentrated { element, degrees }),
        }
    }
}

/// A degree-`r` linear map between graded spaces, one matrix per source
/// degree `k` of shape `target.dim(k - r) x source.dim(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap<F: Field> {
    field: F,
    degree: i32,
    source: GradedSpace,
    target: GradedSpace,
    blocks: BTreeMap<i32, Matrix<F>>,
}

impl<F: Field> GradedMap<F> {
    /// Blocks absent from `blocks` are zero; blocks on degrees where the
    /// source vanishes must have no columns and are dropped.
    pub fn new(
        field: F,
        degree: i32,
        source: GradedSpace,
        target: GradedSpace,
        blocks: BTreeMap<i32, Matrix<F>>,
    ) -> Result<Self> {
        let mut map = Self::zero(field, degree, source, target);
        for (k, m) in blocks {
            let want = (map.target.dim(k - degree), map.source.dim(k));
            if m.shape() != want {
                return Err(Error::ShapeMismatch(format!(
                    "block at source degree {k} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
            if want.1 > 0 {
                map.blocks.insert(k, m);
            }
        }
        Ok(map)
    }

    pub fn zero(field: F, degree: i32, source: GradedSpace, target: GradedSpace) -> Self {
        let blocks = source
            .iter()
            .map(|(k, d)| (k, Matrix::zeros(field, target.dim(k - degree), d)))
            .collect();
        GradedMap {
            field,
            degree,
            source,
            target,
            blocks,
        }
    }

    pub fn identity(field: F, space: &GradedSpace) -> Self {
        let blocks = space
            .iter()
            .map(|(k, d)| (k, Matrix::identity(field, d)))
            .collect();
        GradedMap {
            field,
            degree: 0,
            source: space.clone(),
            target: space.clone(),
            blocks,
        }
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace {
        &self.target
    }

    /// The block leaving source degree `k`.
    pub fn block(&self, k: i32) -> Matrix<F> {
        self.blocks.get(&k).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.field, self.target.dim(k - self.degree), self.source.dim(k))
        })
    }

    pub fn blocks(&self) -> &BTreeMap<i32, Matrix<F>> {
        &self.blocks
    }

    pub fn set_block(&mut self, k: i32, m: Matrix<F>) -> Result<()> {
        let want = (self.target.dim(k - self.degree), self.source.dim(k));
        if m.shape() != want {
            return Err(Error::ShapeMismatch(format!(
                "block at source degree {k} is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                want.0,
                want.1
            )));
        }
        if want.1 > 0 {
            self.blocks.insert(k, m);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(Matrix::is_zero)
    }

    /// `self` after `g`.
    ///
    /// # Panics
    /// If `g`'s target is not `self`'s source.
    pub fn compose(&self, g: &GradedMap<F>) -> GradedMap<F> {
        assert_eq!(g.target, self.source, "composition of incompatible graded maps");
        let degree = self.degree + g.degree;
        let blocks = g
            .source
            .degrees()
            .map(|k| (k, self.block(k - g.degree).mul(&g.block(k))))
            .collect();
        GradedMap {
            field: self.field,
            degree,
            source: g.source.clone(),
            target: self.target.clone(),
            blocks,
        }
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(&Matrix<F>, &Matrix<F>) -> Matrix<F>) -> Self {
        assert!(
            self.degree == rhs.degree && self.source == rhs.source && self.target == rhs.target,
            "graded maps of different shapes"
        );
        let blocks = self
            .blocks
            .iter()
            .map(|(&k, m)| (k, op(m, &rhs.blocks[&k])))
            .collect();
        GradedMap {
            blocks,
            ..self.clone()
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, Matrix::add)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, Matrix::sub)
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let blocks = self.blocks.iter().map(|(&k, m)| (k, m.scale(c))).collect();
        GradedMap {
            blocks,
            ..self.clone()
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    /// The inverse map of degree `-r`, if every block is invertible and the
    /// grading of the target is exactly the shifted grading of the source.
    pub fn inverse(&self) -> Option<Self> {
        if self.target != self.source.shift(-self.degree) {
            return None;
        }
        let mut blocks = BTreeMap::new();
        for (&k, m) in &self.blocks {
            blocks.insert(k - self.degree, m.inverse()?);
        }
        Some(GradedMap {
            field: self.field,
            degree: -self.degree,
            source: self.target.clone(),
            target: self.source.clone(),
            blocks,
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_some()
    }

    /// Whether `self d_src = (-1)^r d_tgt self`.
    pub fn is_chain_map(&self, d_src: &GradedMap<F>, d_tgt: &GradedMap<F>) -> bool {
        let lhs = self.compose(d_src);
        let rhs = d_tgt.compose(self).scale(&self.field.sign(self.degree));
        lhs == rhs
    }
}

/// A graded space with a degree-one differential squaring to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex<F: Field> {
    d: GradedMap<F>,
}

impl<F: Field> ChainComplex<F> {
    pub fn new(d: GradedMap<F>) -> Result<Self> {
        if d.degree() != 1 || d.source() != d.target() {
            return Err(Error::ShapeMismatch(
                "a differential is a degree-1 endomorphism".into(),
            ));
        }
        let dd = d.compose(&d);
        if let Some((&k, _)) = dd.blocks.iter().find(|(_, m)| !m.is_zero()) {
            return Err(Error::NotABoundary { degree: k });
        }
        Ok(ChainComplex { d })
    }

    pub fn zero(field: F, space: GradedSpace) -> Self {
        ChainComplex {
            d: GradedMap::zero(field, 1, space.clone(), space),
        }
    }

    pub fn space(&self) -> &GradedSpace {
        self.d.source()
    }

    pub fn differential(&self) -> &GradedMap<F> {
        &self.d
    }

    pub fn field(&self) -> F {
        self.d.field()
    }
}

/// Per-degree homology data: cycle and boundary bases and one representative
/// cycle per homology basis vector, all as matrix columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyDegree<F: Field> {
    pub cycles: Matrix<F>,
    pub boundaries: Matrix<F>,
    pub representatives: Matrix<F>,
    /// Maps a cycle to its coordinates in the representative basis.
    coordinates: Matrix<F>,
}

/// Homology of a complex with a deterministic basis.
///
/// Boundaries come from left-to-right column reduction of the incoming
/// differential; the representatives are the kernel basis vectors that stay
/// independent when reduced after the boundaries. A zero differential gives
/// the standard basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology<F: Field> {
    complex: ChainComplex<F>,
    dims: GradedSpace,
    degrees: BTreeMap<i32, HomologyDegree<F>>,
}

impl<F: Field> Homology<F> {
    pub fn of(complex: &ChainComplex<F>) -> Self {
        let f = complex.field();
        let d = complex.differential();
        let mut degrees = BTreeMap::new();
        let mut dims = Vec::new();
        for (k, n) in complex.space().iter() {
            let cycles = kernel_image(&d.block(k)).kernel;
            let boundaries = kernel_image(&d.block(k + 1)).image;
            let stacked = boundaries.hstack(&cycles);
            let red = reduce_columns(&stacked);
            let b = boundaries.cols();
            let survivors: Vec<usize> = (b..stacked.cols())
                .filter(|&j| red.low[j].is_some())
                .collect();
            let idx: Vec<usize> = (0..n).collect();
            let representatives = stacked.select(&idx, &survivors);
            let basis = boundaries.hstack(&representatives);
            let c = basis.cols();
            let (r, pivots) = basis.hstack(&Matrix::identity(f, n)).rref();
            debug_assert_eq!(pivots.iter().filter(|&&p| p < c).count(), c);
            let rows: Vec<usize> = (b..c).collect();
            let cols: Vec<usize> = (c..c + n).collect();
            let coordinates = r.select(&rows, &cols);
            dims.push((k, representatives.cols()));
            degrees.insert(
                k,
                HomologyDegree {
                    cycles,
                    boundaries,
                    representatives,
                    coordinates,
                },
            );
        }
        Homology {
            complex: complex.clone(),
            dims: GradedSpace::from_pairs(dims),
            degrees,
        }
    }

    pub fn complex(&self) -> &ChainComplex<F> {
        &self.complex
    }

    pub fn dims(&self) -> &GradedSpace {
        &self.dims
    }

    pub fn degree(&self, k: i32) -> Option<&HomologyDegree<F>> {
        self.degrees.get(&k)
    }

    /// Representative cycles in degree `k`, one column each.
    pub fn representatives(&self, k: i32) -> Matrix<F> {
        match self.degrees.get(&k) {
            Some(h) => h.representatives.clone(),
            None => Matrix::zeros(self.complex.field(), self.complex.space().dim(k), 0),
        }
    }

    /// Homology coordinates of the cycles given as columns of `z`.
    /// The columns must be cycles; this is not checked.
    pub fn coordinates(&self, k: i32, z: &Matrix<F>) -> Matrix<F> {
        match self.degrees.get(&k) {
            Some(h) => h.coordinates.mul(z),
            None => Matrix::zeros(self.complex.field(), 0, z.cols()),
        }
    }

    /// Whether the columns of `z` are cycles in degree `k`.
    pub fn are_cycles(&self, k: i32, z: &Matrix<F>) -> bool {
        self.complex.differential().block(k).mul(z).is_zero()
    }
}

/// The map on homology of a chain map, in canonical bases.
pub fn induced_map<F: Field>(
    f: &GradedMap<F>,
    src: &Homology<F>,
    tgt: &Homology<F>,
) -> Result<GradedMap<F>> {
    if f.source() != src.complex.space() || f.target() != tgt.complex.space() {
        return Err(Error::ShapeMismatch(
            "chain map does not match the complexes".into(),
        ));
    }
    if !f.is_chain_map(src.complex.differential(), tgt.complex.differential()) {
        return Err(Error::NotChainMap(format!(
            "degree-{} map does not commute with the differentials",
            f.degree()
        )));
    }
    Ok(induced_unchecked(f, src, tgt))
}

/// As [`induced_map`] without the chain-map check.
pub(crate) fn induced_unchecked<F: Field>(
    f: &GradedMap<F>,
    src: &Homology<F>,
    tgt: &Homology<F>,
) -> GradedMap<F> {
    let r = f.degree();
    let mut out = GradedMap::zero(f.field(), r, src.dims.clone(), tgt.dims.clone());
    for k in src.dims.degrees() {
        let image = f.block(k).mul(&src.representatives(k));
        let coords = tgt.coordinates(k - r, &image);
        out.set_block(k, coords).expect("shapes follow from the dims");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    fn complex<F: Field>(f: F, space: &GradedSpace, blocks: Vec<(i32, Matrix<F>)>) -> ChainComplex<F> {
        let d = GradedMap::new(f, 1, space.clone(), space.clone(), blocks.into_iter().collect()).unwrap();
        ChainComplex::new(d).unwrap()
    }

    #[test]
    fn isomorphism_kills_homology() {
        let f2 = PrimeField::f2();
        let space = GradedSpace::from_pairs([(0, 1), (1, 1)]);
        let c = complex(f2, &space, vec![(1, Matrix::from_i64(f2, 1, 1, &[1]))]);
        assert!(Homology::of(&c).dims().is_zero());
    }

    #[test]
    fn zero_differential_keeps_chains() {
        let q = Rationals;
        let space = GradedSpace::from_pairs([(0, 2), (3, 1)]);
        let h = Homology::of(&ChainComplex::zero(q, space.clone()));
        assert_eq!(h.dims(), &space);
        assert!(h.representatives(0).is_identity());
    }

    #[test]
    fn rank_bookkeeping() {
        let q = Rationals;
        let space = GradedSpace::from_pairs([(0, 1), (1, 2), (2, 1)]);
        let c = complex(
            q,
            &space,
            vec![
                (1, Matrix::from_i64(q, 1, 2, &[1, 0])),
                (2, Matrix::from_i64(q, 2, 1, &[0, 1])),
            ],
        );
        let h = Homology::of(&c);
        assert!(h.dims().is_zero());
        assert_eq!(h.dims().euler_characteristic(), space.euler_characteristic());
    }

    #[test]
    fn non_boundary_is_rejected() {
        let q = Rationals;
        let space = GradedSpace::from_pairs([(0, 1), (1, 1), (2, 1)]);
        let d = GradedMap::new(
            q,
            1,
            space.clone(),
            space,
            [
                (1, Matrix::from_i64(q, 1, 1, &[1])),
                (2, Matrix::from_i64(q, 1, 1, &[1])),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        assert!(matches!(ChainComplex::new(d), Err(Error::NotABoundary { degree: 2 })));
    }

    #[test]
    fn induced_identity_zero_and_flat() {
        let q = Rationals;
        let space = GradedSpace::from_pairs([(0, 1), (1, 2)]);
        let c = complex(q, &space, vec![(1, Matrix::from_i64(q, 1, 2, &[1, 1]))]);
        let h = Homology::of(&c);
        let id = induced_map(&GradedMap::identity(q, &space), &h, &h).unwrap();
        assert_eq!(id, GradedMap::identity(q, h.dims()));
        let zero = induced_map(&GradedMap::zero(q, 0, space.clone(), space.clone()), &h, &h).unwrap();
        assert!(zero.is_zero());

        let flat = Homology::of(&ChainComplex::zero(q, space.clone()));
        let f = GradedMap::new(
            q,
            0,
            space.clone(),
            space.clone(),
            [
                (0, Matrix::from_i64(q, 1, 1, &[3])),
                (1, Matrix::from_i64(q, 2, 2, &[1, 2, 0, 5])),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        assert_eq!(induced_map(&f, &flat, &flat).unwrap(), f);
    }

    #[test]
    fn non_chain_map_is_rejected() {
        let q = Rationals;
        let space = GradedSpace::from_pairs([(0, 1), (1, 1)]);
        let c = complex(q, &space, vec![(1, Matrix::from_i64(q, 1, 1, &[1]))]);
        let h = Homology::of(&c);
        let flat = Homology::of(&ChainComplex::zero(q, space.clone()));
        let id = GradedMap::identity(q, &space);
        assert!(matches!(induced_map(&id, &h, &flat), Err(Error::NotChainMap(_))));
    }
}
