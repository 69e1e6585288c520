//! Directional transition matrices: triangular block transforms that flip
//! the orientation of part of a transition matrix, their scheduling from a
//! sign assignment, and the bookkeeping of which isomorphisms are covered.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::block::BlockGradedMap;
use crate::error::{Error, Result, SplitSide};
use crate::field::Field;
use crate::graded::GradedMap;
use crate::poset::{Interval, Poset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A sign for every element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignAssignment(pub Vec<Sign>);

impl SignAssignment {
    pub fn constant(n: usize, s: Sign) -> Self {
        SignAssignment(vec![s; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, p: usize) -> Sign {
        self.0[p]
    }
}

impl FromStr for SignAssignment {
    type Err = Error;

    /// Parses `+,-,+` (commas optional).
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(Error::Precondition(format!("invalid sign '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignAssignment)
    }
}

impl fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Sign::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// `(X, YZ⁻¹; 0, Z⁻¹)`: flips the upper part.
    A1,
    /// `(X⁻¹, -X⁻¹Y; 0, Z)`: flips the lower part.
    A2,
    /// `(X⁻¹, -X⁻¹YZ⁻¹; 0, Z⁻¹)`: the inverse.
    A3,
}

/// A partition of the elements into a lower part and an upper part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Split {
    pub lower: Interval,
    pub upper: Interval,
}

impl Split {
    pub fn new(n: usize, lower: Interval) -> Self {
        let upper = Interval::new((0..n).filter(|p| !lower.contains(*p)).collect());
        Split { lower, upper }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.lower, self.upper)
    }
}

fn invert_diagonal<F: Field>(m: &GradedMap<F>, side: SplitSide, split: &Split) -> Result<GradedMap<F>> {
    if let Some(inv) = m.inverse() {
        return Ok(inv);
    }
    let degree = m
        .source()
        .degrees()
        .chain(m.target().degrees())
        .filter(|&k| {
            let b = m.block(k);
            !(b.is_square() && b.is_invertible())
        })
        .min()
        .unwrap_or(0);
    Err(Error::SingularDiagonalBlock {
        side,
        degree,
        split: split.to_string(),
    })
}

/// Apply one of the three transforms to a degree-0 map that is block upper
/// triangular with respect to `split`.
pub fn block_transform<F: Field>(
    a: &BlockGradedMap<F>,
    split: &Split,
    which: Transform,
) -> Result<BlockGradedMap<F>> {
    if a.degree() != 0 {
        return Err(Error::Precondition("block transforms need a degree-0 map".into()));
    }
    let (l, u) = (&split.lower, &split.upper);
    if l.len() + u.len() != a.len() || l.members().iter().any(|&p| u.contains(p)) {
        return Err(Error::Precondition(format!("{split} does not partition the elements")));
    }
    if !a.dense(u, l).is_zero() {
        return Err(Error::Precondition(format!("map is not upper triangular for {split}")));
    }
    let f = a.field();
    let x = a.dense(l, l);
    let y = a.dense(l, u);
    let z = a.dense(u, u);
    let flip_lower = matches!(which, Transform::A2 | Transform::A3);
    let flip_upper = matches!(which, Transform::A1 | Transform::A3);
    let x_inv = if flip_lower { Some(invert_diagonal(&x, SplitSide::Lower, split)?) } else { None };
    let z_inv = if flip_upper { Some(invert_diagonal(&z, SplitSide::Upper, split)?) } else { None };

    let (x2, y2, z2) = match which {
        Transform::A1 => {
            let zi = z_inv.expect("computed");
            (x, y.compose(&zi), zi)
        }
        Transform::A2 => {
            let xi = x_inv.expect("computed");
            let y2 = xi.compose(&y).neg();
            (xi, y2, z)
        }
        Transform::A3 => {
            let xi = x_inv.expect("computed");
            let zi = z_inv.expect("computed");
            let y2 = xi.compose(&y).compose(&zi).neg();
            (xi, y2, zi)
        }
    };

    let mut source = a.source().to_vec();
    let mut target = a.target().to_vec();
    for p in 0..a.len() {
        let flipped = if l.contains(p) { flip_lower } else { flip_upper };
        if flipped {
            std::mem::swap(&mut source[p], &mut target[p]);
        }
    }
    let part = |rows: &Interval, cols: &Interval, m: &GradedMap<F>| {
        BlockGradedMap::from_dense(f, source.clone(), target.clone(), rows, cols, m)
    };
    Ok(part(l, l, &x2)?.add(&part(l, u, &y2)?).add(&part(u, u, &z2)?))
}

/// One entry of a covered isomorphism word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "token")]
pub enum WordToken {
    F01,
    G {
        index: usize,
        transform: Transform,
        split: String,
    },
}

impl fmt::Display for WordToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordToken::F01 => f.write_str("F01"),
            WordToken::G { index, transform, split } => write!(f, "G{index}[{transform:?} {split}]"),
        }
    }
}

/// `G_n ... G_1 F01 G_1 ... G_n`, one `G_i` per transform applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CoveredWord(pub Vec<WordToken>);

impl CoveredWord {
    fn from_steps(steps: &[(Transform, Split)]) -> Self {
        let g: Vec<WordToken> = steps
            .iter()
            .enumerate()
            .map(|(i, (t, s))| WordToken::G {
                index: i + 1,
                transform: *t,
                split: s.to_string(),
            })
            .collect();
        let mut word: Vec<WordToken> = g.iter().rev().cloned().collect();
        word.push(WordToken::F01);
        word.extend(g);
        CoveredWord(word)
    }

    pub fn applications(&self) -> usize {
        self.0.len() / 2
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.0.len();
        n % 2 == 1
            && self.0[n / 2] == WordToken::F01
            && self.0.iter().filter(|t| **t == WordToken::F01).count() == 1
            && self.0.iter().eq(self.0.iter().rev())
    }

    pub fn tokens(&self) -> Vec<String> {
        self.0.iter().map(WordToken::to_string).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Directional<F: Field> {
    pub d: BlockGradedMap<F>,
    pub word: CoveredWord,
    pub steps: Vec<(Transform, Split)>,
}

/// Transform a degree-0 triangular isomorphism `T` (side 1 to side 0) into
/// a map from outgoing to incoming sides, processing maximal constant-sign
/// runs of a linear extension from the bottom up.
pub fn directional_matrix<F: Field>(
    poset: &Poset,
    t: &BlockGradedMap<F>,
    signs: &SignAssignment,
) -> Result<Directional<F>> {
    let n = poset.len();
    if signs.len() != n || t.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} signs and a map on {} elements for a poset on {n}",
            signs.len(),
            t.len()
        )));
    }
    if t.degree() != 0 || !t.is_triangular(poset, false) {
        return Err(Error::Precondition("T must be a degree-0 triangular map".into()));
    }
    let ext = poset.linear_extension();
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for &p in &ext {
        match runs.last_mut() {
            Some(run) if signs.get(run[0]) == signs.get(p) => run.push(p),
            _ => runs.push(vec![p]),
        }
    }
    let first_negative = runs.first().is_some_and(|r| signs.get(r[0]) == Sign::Minus);
    let mut steps = Vec::new();
    if runs.len() == 1 && first_negative {
        steps.push((Transform::A3, Split::new(n, Interval::full(n))));
    }
    let mut prefix = Vec::new();
    for (j, run) in runs.iter().enumerate().take(runs.len().saturating_sub(1)) {
        prefix.extend(run.iter().copied());
        let split = Split::new(n, Interval::new(prefix.clone()));
        let which = if j == 0 && first_negative { Transform::A2 } else { Transform::A1 };
        steps.push((which, split));
    }
    let mut d = t.clone();
    for (which, split) in &steps {
        d = block_transform(&d, split, *which)?;
        debug_assert!(d.is_triangular(poset, false));
    }
    Ok(Directional {
        d,
        word: CoveredWord::from_steps(&steps),
        steps,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relabel {
    Identity,
    Exchange,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementLabel {
    pub element: usize,
    pub label: String,
    pub sign: Sign,
    /// Which side (0 or 1) the outgoing index lives on.
    pub out_side: u8,
    pub in_side: u8,
    pub r_1_out: Relabel,
    pub r_in_0: Relabel,
}

/// Per-element identification of outgoing and incoming sides; the matrix
/// of `D` is the same under either presentation.
pub fn relabel_in_out(poset: &Poset, signs: &SignAssignment) -> Vec<ElementLabel> {
    (0..poset.len())
        .map(|p| {
            let sign = signs.get(p);
            let (out_side, in_side) = match sign {
                Sign::Plus => (1, 0),
                Sign::Minus => (0, 1),
            };
            let rel = |same: bool| if same { Relabel::Identity } else { Relabel::Exchange };
            ElementLabel {
                element: p,
                label: poset.label(p).to_string(),
                sign,
                out_side,
                in_side,
                r_1_out: rel(out_side == 1),
                r_in_0: rel(in_side == 0),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonzeroEntry {
    pub row: usize,
    pub col: usize,
    /// Source degrees carrying a nonzero block.
    pub degrees: Vec<i32>,
}

pub fn nonzero_entry_report<F: Field>(d: &BlockGradedMap<F>) -> Vec<NonzeroEntry> {
    d.entries()
        .iter()
        .filter_map(|(&(row, col), e)| {
            let degrees: Vec<i32> = e
                .blocks()
                .iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|(&k, _)| k)
                .collect();
            (!degrees.is_empty()).then_some(NonzeroEntry { row, col, degrees })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::graded::GradedSpace;
    use crate::matrix::Matrix;

    fn two<F: Field>(f: F, x: i64, y: i64, z: i64) -> BlockGradedMap<F> {
        let s = vec![GradedSpace::concentrated(0, 1); 2];
        let mut t = BlockGradedMap::zero(f, 0, s.clone(), s);
        t.set_block(0, 0, 0, Matrix::from_i64(f, 1, 1, &[x])).unwrap();
        t.set_block(0, 1, 0, Matrix::from_i64(f, 1, 1, &[y])).unwrap();
        t.set_block(1, 1, 0, Matrix::from_i64(f, 1, 1, &[z])).unwrap();
        t
    }

    #[test]
    fn identity_diagonals() {
        let q = Rationals;
        let split = Split::new(2, Interval::singleton(0));
        let a = two(q, 1, 3, 1);
        assert_eq!(block_transform(&a, &split, Transform::A1).unwrap(), a);
        assert_eq!(block_transform(&a, &split, Transform::A2).unwrap(), two(q, 1, -3, 1));
        assert_eq!(block_transform(&a, &split, Transform::A3).unwrap(), two(q, 1, -3, 1));
    }

    #[test]
    fn a3_is_inverse() {
        let q = Rationals;
        let split = Split::new(2, Interval::singleton(0));
        let a = two(q, 2, 3, 5);
        let inv = block_transform(&a, &split, Transform::A3).unwrap();
        assert!(inv.total().compose(&a.total()).blocks().values().all(|m| m.is_identity()));
    }

    #[test]
    fn singular_block_is_named() {
        let q = Rationals;
        let split = Split::new(2, Interval::singleton(0));
        let err = block_transform(&two(q, 1, 1, 0), &split, Transform::A1).unwrap_err();
        assert!(matches!(
            err,
            Error::SingularDiagonalBlock { side: SplitSide::Upper, degree: 0, .. }
        ));
    }

    #[test]
    fn degenerate_sign_assignments() {
        let q = Rationals;
        let chain = Poset::chain(2);
        let t = two(q, 2, 3, 5);
        let plus = directional_matrix(&chain, &t, &"+,+".parse().unwrap()).unwrap();
        assert_eq!(plus.d, t);
        assert_eq!(plus.word.tokens(), vec!["F01"]);
        let minus = directional_matrix(&chain, &t, &"-,-".parse().unwrap()).unwrap();
        assert_eq!(minus.d, t.inverse_triangular(&chain).unwrap());
        assert_eq!(minus.word.applications(), 1);
        assert!(minus.word.is_palindromic());
    }

    #[test]
    fn plus_minus_over_f2() {
        let f2 = PrimeField::f2();
        let chain = Poset::chain(2);
        let t = two(f2, 1, 1, 1);
        let out = directional_matrix(&chain, &t, &"+-".parse().unwrap()).unwrap();
        assert_eq!(out.d, two(f2, 1, 1, 1));
        assert_eq!(out.steps[0].0, Transform::A1);
        let report = nonzero_entry_report(&out.d);
        assert_eq!(report.len(), 3);
        assert_eq!((report[1].row, report[1].col), (0, 1));
    }

    #[test]
    fn labels_follow_signs() {
        let labels = relabel_in_out(&Poset::chain(2), &"+-".parse().unwrap());
        assert_eq!((labels[0].out_side, labels[0].in_side), (1, 0));
        assert_eq!(labels[1].r_1_out, Relabel::Exchange);
    }
}
