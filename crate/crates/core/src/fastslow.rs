//! Suspension conjugation, assembly of the doubled-order connection matrix
//! of a fast-slow family, and extraction of its degree-1 corner block.
//!
//! Suspension raises every degree by one. Conjugating a boundary map by a
//! suspension carries the usual Koszul sign, `Δ^Σ = -Σ Δ Σ⁻¹`, so that
//! `Σ` is a chain map of degree -1 and `T_s ∘ Σ` is an honest chain map
//! whenever the corner block `T_s` anticommutes with the boundaries.

use serde::{Deserialize, Serialize};

use crate::block::BlockGradedMap;
use crate::braid::{BraidMorphism, ChainBraid};
use crate::connection::validate;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::{induced_unchecked, ChainComplex, GradedMap, GradedSpace, Homology};
use crate::poset::{Interval, Poset};
use crate::transition::TransitionSetting;

/// Which suspension isomorphisms produced the data; both use identical
/// matrix plumbing and differ only in the morphism they are said to cover.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuspensionStyle {
    #[default]
    Sigma,
    Psi,
}

/// Per-element isomorphisms `Σ(p): C(p) -> C(p)` shifted up one degree,
/// stored as degree -1 maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspensionData<F: Field> {
    pub style: SuspensionStyle,
    maps: Vec<GradedMap<F>>,
}

impl<F: Field> SuspensionData<F> {
    pub fn new(style: SuspensionStyle, maps: Vec<GradedMap<F>>) -> Result<Self> {
        for (p, m) in maps.iter().enumerate() {
            if m.degree() != -1 || m.target() != &m.source().shift(1) {
                return Err(Error::ShapeMismatch(format!(
                    "suspension on element {p} must raise degrees by one"
                )));
            }
            if !m.is_invertible() {
                return Err(Error::ShapeMismatch(format!(
                    "suspension on element {p} is not invertible"
                )));
            }
        }
        Ok(SuspensionData { style, maps })
    }

    /// Identity matrices between each space and its shifted copy.
    pub fn shift(field: F, spaces: &[GradedSpace], style: SuspensionStyle) -> Self {
        let maps = spaces
            .iter()
            .map(|s| {
                let blocks = s
                    .iter()
                    .map(|(k, d)| (k, crate::matrix::Matrix::identity(field, d)))
                    .collect();
                GradedMap::new(field, -1, s.clone(), s.shift(1), blocks).expect("square blocks")
            })
            .collect();
        SuspensionData { style, maps }
    }

    pub fn maps(&self) -> &[GradedMap<F>] {
        &self.maps
    }

    pub fn spaces(&self) -> Vec<GradedSpace> {
        self.maps.iter().map(|m| m.source().clone()).collect()
    }

    pub fn suspended_spaces(&self) -> Vec<GradedSpace> {
        self.maps.iter().map(|m| m.target().clone()).collect()
    }

    /// The block-diagonal map `⊕ Σ(p)`.
    pub fn as_block(&self, field: F) -> BlockGradedMap<F> {
        let mut out = BlockGradedMap::zero(field, -1, self.spaces(), self.suspended_spaces());
        for (p, m) in self.maps.iter().enumerate() {
            out.set_entry(p, p, m.clone()).expect("diagonal entry");
        }
        out
    }

    fn inverse_block(&self, field: F) -> BlockGradedMap<F> {
        let mut out = BlockGradedMap::zero(field, 1, self.suspended_spaces(), self.spaces());
        for (p, m) in self.maps.iter().enumerate() {
            out.set_entry(p, p, m.inverse().expect("checked invertible"))
                .expect("diagonal entry");
        }
        out
    }
}

/// `Δ^Σ = -Σ Δ Σ⁻¹` on the suspended spaces.
pub fn suspend_conjugate<F: Field>(
    delta: &BlockGradedMap<F>,
    sigma: &SuspensionData<F>,
) -> Result<BlockGradedMap<F>> {
    if delta.source() != sigma.spaces().as_slice() || delta.target() != delta.source() {
        return Err(Error::ShapeMismatch(
            "suspension does not match the boundary map's spaces".into(),
        ));
    }
    let f = delta.field();
    Ok(sigma
        .as_block(f)
        .compose(delta)
        .compose(&sigma.inverse_block(f))
        .neg())
}

/// Inverse of [`suspend_conjugate`]: `Δ = -Σ⁻¹ Δ^Σ Σ`.
pub fn desuspend<F: Field>(
    suspended: &BlockGradedMap<F>,
    sigma: &SuspensionData<F>,
) -> Result<BlockGradedMap<F>> {
    if suspended.source() != sigma.suspended_spaces().as_slice()
        || suspended.target() != suspended.source()
    {
        return Err(Error::ShapeMismatch(
            "suspension does not match the suspended boundary map".into(),
        ));
    }
    let f = suspended.field();
    Ok(sigma
        .inverse_block(f)
        .compose(suspended)
        .compose(&sigma.as_block(f))
        .neg())
}

/// A fast-slow connection matrix on the doubled order: element `p` is the
/// minus copy, element `n + p` the plus copy.
#[derive(Clone, Debug)]
pub struct FastSlowAssembly<F: Field> {
    pub doubled: Poset,
    pub delta: BlockGradedMap<F>,
    pub style: SuspensionStyle,
}

/// Assemble `(Δ₋ T; 0 Δ₊^Σ)` on the doubled order. The corner `t_block` is
/// a degree-1 map from the suspended plus spaces to the minus spaces.
pub fn assemble_fastslow<F: Field>(
    order_minus: &Poset,
    order_plus: &Poset,
    delta_minus: &BlockGradedMap<F>,
    delta_plus: &BlockGradedMap<F>,
    sigma: &SuspensionData<F>,
    t_block: &BlockGradedMap<F>,
) -> Result<FastSlowAssembly<F>> {
    for (name, order, d) in [("minus", order_minus, delta_minus), ("plus", order_plus, delta_plus)] {
        if !validate(order, d)?.is_valid() {
            return Err(Error::NotValid(format!("{name} boundary map")));
        }
    }
    let suspended = suspend_conjugate(delta_plus, sigma)?;
    if t_block.degree() != 1
        || t_block.source() != suspended.source()
        || t_block.target() != delta_minus.source()
    {
        return Err(Error::ShapeMismatch(
            "corner block must be a degree-1 map from suspended plus spaces to minus spaces".into(),
        ));
    }
    let residual = delta_minus.compose(t_block).add(&t_block.compose(&suspended));
    if !residual.is_zero() {
        return Err(Error::IncompatibleBlock {
            residual: residual.residual_blocks(),
        });
    }
    let doubled = Poset::doubled(order_minus, order_plus)?;
    let n = order_minus.len();
    let spaces: Vec<GradedSpace> = delta_minus
        .source()
        .iter()
        .chain(suspended.source())
        .cloned()
        .collect();
    let mut delta = BlockGradedMap::zero(delta_minus.field(), 1, spaces.clone(), spaces);
    for (&(q, p), e) in delta_minus.entries() {
        delta.set_entry(q, p, e.clone())?;
    }
    for (&(q, p), e) in suspended.entries() {
        delta.set_entry(n + q, n + p, e.clone())?;
    }
    for (&(q, p), e) in t_block.entries() {
        delta.set_entry(q, n + p, e.clone())?;
    }
    debug_assert!(validate(&doubled, &delta)?.is_valid());
    Ok(FastSlowAssembly {
        doubled,
        delta,
        style: sigma.style,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularCertificate {
    pub style: SuspensionStyle,
    /// `Δ₋ T + T Δ₊^Σ = 0`.
    pub anticommutes: bool,
    pub invertible: bool,
    /// Triangularity with respect to the continuation order, when given.
    pub triangular: Option<bool>,
    /// The connecting map of the pair (minus copies, plus copies) is an
    /// isomorphism.
    pub connecting_iso: bool,
    /// The total homology of the doubled complex vanishes, by ranks.
    pub total_homology_zero: bool,
}

/// The pieces of a doubled-order connection matrix.
#[derive(Clone, Debug)]
pub struct Singular<F: Field> {
    pub delta_minus: BlockGradedMap<F>,
    pub delta_plus_suspended: BlockGradedMap<F>,
    pub t_s: BlockGradedMap<F>,
    pub certificate: SingularCertificate,
}

/// Split a valid doubled-order connection matrix into its diagonal parts
/// and its corner `T_s`, and certify the corner.
pub fn extract_singular<F: Field>(
    assembly: &FastSlowAssembly<F>,
    continuation: Option<&Poset>,
) -> Result<Singular<F>> {
    let delta = &assembly.delta;
    if !delta.len().is_multiple_of(2) || !validate(&assembly.doubled, delta)?.is_valid() {
        return Err(Error::NotValid("doubled boundary map".into()));
    }
    let f = delta.field();
    let n = delta.len() / 2;
    let minus = delta.source()[..n].to_vec();
    let plus = delta.source()[n..].to_vec();
    let mut d_minus = BlockGradedMap::zero(f, 1, minus.clone(), minus.clone());
    let mut d_plus = BlockGradedMap::zero(f, 1, plus.clone(), plus.clone());
    let mut t_s = BlockGradedMap::zero(f, 1, plus.clone(), minus.clone());
    for (&(q, p), e) in delta.entries() {
        match (q < n, p < n) {
            (true, true) => d_minus.set_entry(q, p, e.clone())?,
            (false, false) => d_plus.set_entry(q - n, p - n, e.clone())?,
            (true, false) => t_s.set_entry(q, p - n, e.clone())?,
            (false, true) => return Err(Error::NotValid("entry below the diagonal".into())),
        }
    }
    let anticommutes = d_minus.compose(&t_s).add(&t_s.compose(&d_plus)).is_zero();
    let t_total = t_s.total();
    let invertible = t_total.is_invertible();
    let triangular = continuation.map(|c| t_s.is_triangular(c, false));

    let h_minus = Homology::of(&ChainComplex::new(d_minus.total())?);
    let h_plus = Homology::of(&ChainComplex::new(d_plus.total())?);
    let connecting = induced_unchecked(&t_total, &h_plus, &h_minus);
    let connecting_iso = connecting.is_invertible();
    let total_homology_zero = homology_vanishes_by_rank(&delta.total());

    Ok(Singular {
        delta_minus: d_minus,
        delta_plus_suspended: d_plus,
        t_s,
        certificate: SingularCertificate {
            style: assembly.style,
            anticommutes,
            invertible,
            triangular,
            connecting_iso,
            total_homology_zero,
        },
    })
}

/// `Σ_k dim C_k - rank d_k - rank d_{k+1} = 0`.
fn homology_vanishes_by_rank<F: Field>(d: &GradedMap<F>) -> bool {
    d.source()
        .iter()
        .all(|(k, dim)| dim == d.block(k).rank() + d.block(k + 1).rank())
}

/// `T = T_s ∘ ⊕Σ(p)`, a degree-0 map from the plus spaces to the minus spaces.
pub fn compose_with_suspension<F: Field>(
    t_s: &BlockGradedMap<F>,
    sigma: &SuspensionData<F>,
) -> Result<BlockGradedMap<F>> {
    if t_s.source() != sigma.suspended_spaces().as_slice() {
        return Err(Error::ShapeMismatch(
            "corner block does not start at the suspended spaces".into(),
        ));
    }
    Ok(t_s.compose(&sigma.as_block(t_s.field())))
}

/// The degree-1 braid morphism induced by `T_s` on every interval of the
/// continuation order, from the suspended plus braid to the minus braid.
pub fn connecting_morphism<F: Field>(
    continuation: &Poset,
    delta_minus: &BlockGradedMap<F>,
    delta_plus_suspended: &BlockGradedMap<F>,
    t_s: &BlockGradedMap<F>,
) -> Result<BraidMorphism<F>> {
    let src = ChainBraid::new(continuation, delta_plus_suspended)?;
    let tgt = ChainBraid::new(continuation, delta_minus)?;
    BraidMorphism::induced(t_s, &src, &tgt)
}

/// `F(I) = ∂(I) ∘ Σ_*(I)` on every interval of the continuation order,
/// from the plus braid to the minus braid.
pub fn canonical_continuation<F: Field>(
    continuation: &Poset,
    delta_minus: &BlockGradedMap<F>,
    delta_plus: &BlockGradedMap<F>,
    sigma: &SuspensionData<F>,
    t_s: &BlockGradedMap<F>,
) -> Result<BraidMorphism<F>> {
    let suspended = suspend_conjugate(delta_plus, sigma)?;
    let plus = ChainBraid::new(continuation, delta_plus)?;
    let plus_s = ChainBraid::new(continuation, &suspended)?;
    let sigma_star = BraidMorphism::induced(&sigma.as_block(delta_plus.field()), &plus, &plus_s)?;
    let d = connecting_morphism(continuation, delta_minus, &suspended, t_s)?;
    d.compose(&sigma_star)
}

/// `T = T_s ∘ Σ` together with whether it covers the canonical
/// continuation morphism on every interval of the continuation order.
pub fn continuation_cover<F: Field>(
    continuation: &Poset,
    singular: &Singular<F>,
    sigma: &SuspensionData<F>,
) -> Result<(BlockGradedMap<F>, bool)> {
    let delta_plus = desuspend(&singular.delta_plus_suspended, sigma)?;
    let t = compose_with_suspension(&singular.t_s, sigma)?;
    let f = canonical_continuation(continuation, &singular.delta_minus, &delta_plus, sigma, &singular.t_s)?;
    let setting = TransitionSetting::canonical(continuation, &delta_plus, &singular.delta_minus)?;
    let covers = setting.check_cover(&t, &f)?.covers;
    Ok((t, covers))
}

/// Intervals of the continuation order on which `F` fails to be invertible.
pub fn singular_intervals<F: Field>(f: &BraidMorphism<F>) -> Vec<Interval> {
    f.maps()
        .iter()
        .filter(|(_, m)| !m.is_invertible())
        .map(|(i, _)| i.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::matrix::Matrix;

    fn ar_spaces() -> Vec<GradedSpace> {
        vec![GradedSpace::concentrated(0, 1), GradedSpace::concentrated(1, 1)]
    }

    fn ar<F: Field>(f: F, v: i64) -> BlockGradedMap<F> {
        let s = ar_spaces();
        let mut d = BlockGradedMap::zero(f, 1, s.clone(), s);
        d.set_block(0, 1, 1, Matrix::from_i64(f, 1, 1, &[v])).unwrap();
        d
    }

    #[test]
    fn suspension_of_zero_shifts_homology() {
        let q = Rationals;
        let sigma = SuspensionData::shift(q, &ar_spaces(), SuspensionStyle::Sigma);
        let s = suspend_conjugate(&ar(q, 0), &sigma).unwrap();
        assert!(s.is_zero());
        assert_eq!(s.source()[1], GradedSpace::concentrated(2, 1));
    }

    #[test]
    fn shift_suspension_negates_entries() {
        let q = Rationals;
        let sigma = SuspensionData::shift(q, &ar_spaces(), SuspensionStyle::Sigma);
        let s = suspend_conjugate(&ar(q, 5), &sigma).unwrap();
        assert_eq!(s.entry(0, 1).block(2), Matrix::from_i64(q, 1, 1, &[-5]));
        let f2 = PrimeField::f2();
        let sigma = SuspensionData::shift(f2, &ar_spaces(), SuspensionStyle::Sigma);
        let s = suspend_conjugate(&ar(f2, 1), &sigma).unwrap();
        assert_eq!(s.entry(0, 1).block(2), Matrix::from_i64(f2, 1, 1, &[1]));
    }

    #[test]
    fn round_trip_recovers_delta() {
        let q = Rationals;
        let s = ar_spaces();
        let scale = |v: i64| {
            s.iter()
                .map(|sp| {
                    let blocks = sp.iter().map(|(k, _)| (k, Matrix::from_i64(q, 1, 1, &[v]))).collect();
                    GradedMap::new(q, -1, sp.clone(), sp.shift(1), blocks).unwrap()
                })
                .collect::<Vec<_>>()
        };
        let sigma = SuspensionData::new(SuspensionStyle::Psi, scale(3)).unwrap();
        let suspended = suspend_conjugate(&ar(q, 2), &sigma).unwrap();
        let back = sigma
            .inverse_block(q)
            .compose(&suspended)
            .compose(&sigma.as_block(q))
            .neg();
        assert_eq!(back, ar(q, 2));
    }

    #[test]
    fn zero_sides_accept_any_corner() {
        let q = Rationals;
        let one = Poset::antichain(1);
        let s = vec![GradedSpace::concentrated(0, 1)];
        let zero = BlockGradedMap::zero(q, 1, s.clone(), s.clone());
        let sigma = SuspensionData::shift(q, &s, SuspensionStyle::Sigma);
        let mut t = BlockGradedMap::zero(q, 1, sigma.suspended_spaces(), s.clone());
        t.set_block(0, 0, 1, Matrix::from_i64(q, 1, 1, &[7])).unwrap();
        let asm = assemble_fastslow(&one, &one, &zero, &zero, &sigma, &t).unwrap();
        let sing = extract_singular(&asm, Some(&one)).unwrap();
        assert!(sing.certificate.invertible && sing.certificate.anticommutes);
        assert!(sing.certificate.connecting_iso && sing.certificate.total_homology_zero);
        let t0 = compose_with_suspension(&sing.t_s, &sigma).unwrap();
        assert_eq!(t0.entry(0, 0).block(0), Matrix::from_i64(q, 1, 1, &[7]));
    }

    #[test]
    fn incompatible_corner_reports_residual() {
        let q = Rationals;
        let chain = Poset::chain(2);
        let sigma = SuspensionData::shift(q, &ar_spaces(), SuspensionStyle::Sigma);
        let mut t = BlockGradedMap::zero(q, 1, sigma.suspended_spaces(), ar_spaces());
        t.set_block(0, 0, 1, Matrix::from_i64(q, 1, 1, &[1])).unwrap();
        t.set_block(1, 1, 2, Matrix::from_i64(q, 1, 1, &[1])).unwrap();
        // Δ₋ T + T Δ₊^Σ on the (0,1) block: 1·1 + 1·(-1) = 0 with equal entries.
        assert!(assemble_fastslow(&chain, &chain, &ar(q, 1), &ar(q, 1), &sigma, &t).is_ok());
        let err = assemble_fastslow(&chain, &chain, &ar(q, 1), &ar(q, 2), &sigma, &t).unwrap_err();
        match err {
            Error::IncompatibleBlock { residual } => {
                assert_eq!(residual.len(), 1);
                assert_eq!((residual[0].row, residual[0].col), (0, 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pipeline_covers_continuation() {
        let f2 = PrimeField::f2();
        let chain = Poset::chain(2);
        let sigma = SuspensionData::shift(f2, &ar_spaces(), SuspensionStyle::Sigma);
        let mut t = BlockGradedMap::zero(f2, 1, sigma.suspended_spaces(), ar_spaces());
        t.set_block(0, 0, 1, Matrix::from_i64(f2, 1, 1, &[1])).unwrap();
        t.set_block(1, 1, 2, Matrix::from_i64(f2, 1, 1, &[1])).unwrap();
        let asm = assemble_fastslow(&chain, &chain, &ar(f2, 1), &ar(f2, 1), &sigma, &t).unwrap();
        let sing = extract_singular(&asm, Some(&chain)).unwrap();
        let c = &sing.certificate;
        assert!(c.anticommutes && c.invertible && c.triangular == Some(true));
        assert!(c.connecting_iso && c.total_homology_zero);
        let (t0, covers) = continuation_cover(&chain, &sing, &sigma).unwrap();
        assert!(covers);
        assert_eq!(t0, BlockGradedMap::identity(f2, &ar_spaces()));
    }
}
