//! Connection matrices: validation, recognition against a homology braid,
//! and exhaustive enumeration over finite fields.

use serde::Serialize;

use crate::block::{triangular_slots, BlockGradedMap};
use crate::braid::{find_isomorphism, BraidMorphism, ChainBraid, HomologyBraid};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::graded::GradedSpace;
use crate::poset::{Interval, Poset};

/// Budget used when none is configured.
pub const DEFAULT_BUDGET: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub degree_one: bool,
    /// First entry `(q, p)` with `q` not strictly below `p`.
    pub triangularity_violation: Option<(usize, usize)>,
    pub squares_to_zero: bool,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.degree_one && self.triangularity_violation.is_none() && self.squares_to_zero
    }
}

/// Check that `delta` is a strictly triangular degree-1 map squaring to zero.
pub fn validate<F: Field>(poset: &Poset, delta: &BlockGradedMap<F>) -> Result<Validation> {
    if delta.len() != poset.len() || delta.source() != delta.target() {
        return Err(Error::ShapeMismatch(format!(
            "boundary map on {} elements must be an endomorphism of a poset on {}",
            delta.len(),
            poset.len()
        )));
    }
    Ok(Validation {
        degree_one: delta.degree() == 1,
        triangularity_violation: delta.triangularity_violation(poset, true),
        squares_to_zero: delta.compose(delta).is_zero(),
    })
}

fn require_valid<F: Field>(poset: &Poset, delta: &BlockGradedMap<F>) -> Result<()> {
    let v = validate(poset, delta)?;
    if v.is_valid() {
        return Ok(());
    }
    let reason = if !v.degree_one {
        "degree is not 1".to_string()
    } else if let Some((q, p)) = v.triangularity_violation {
        format!("entry ({q},{p}) is not strictly upper triangular")
    } else {
        "does not square to zero".to_string()
    };
    Err(Error::NotValid(reason))
}

#[derive(Clone, Debug)]
pub struct ConnectionVerdict<F: Field> {
    pub is_connection_matrix: bool,
    /// A braid isomorphism from the generated braid onto the target braid.
    pub witness: Option<BraidMorphism<F>>,
    /// Whether every summand has the dimensions of the braid on its singleton.
    pub summands_match: bool,
}

/// Decide whether the braid generated by `delta` is isomorphic to `g`,
/// checking `phi` when supplied and searching for a witness otherwise.
pub fn is_connection_matrix<F: Field>(
    poset: &Poset,
    delta: &BlockGradedMap<F>,
    g: &HomologyBraid<F>,
    phi: Option<&BraidMorphism<F>>,
    budget: u64,
) -> Result<ConnectionVerdict<F>> {
    require_valid(poset, delta)?;
    let generated = ChainBraid::new(poset, delta)?;
    let h = generated.braid();
    let summands_match = (0..poset.len())
        .all(|p| delta.source()[p] == *g.dims(&Interval::singleton(p)));
    let witness = match phi {
        Some(phi) => {
            let ok = phi.degree() == 0 && phi.is_isomorphism() && phi.is_braid_map(h, g)?;
            ok.then(|| phi.clone())
        }
        None => find_isomorphism(h, g, budget)?,
    };
    Ok(ConnectionVerdict {
        is_connection_matrix: witness.is_some(),
        witness,
        summands_match,
    })
}

/// Every connection matrix on the given summands whose braid is isomorphic
/// to `g`, in lexicographic order of entries.
pub fn enumerate_connection_matrices<F: Field>(
    poset: &Poset,
    spaces: &[GradedSpace],
    g: &HomologyBraid<F>,
    budget: u64,
) -> Result<Vec<BlockGradedMap<F>>> {
    let f = g.field();
    let elements = f.elements().ok_or(Error::InfiniteField)?;
    let slots = triangular_slots(poset, spaces, spaces, 1, true);
    let q = elements.len() as u64;
    let total = (0..slots.len()).try_fold(1u64, |acc, _| acc.checked_mul(q));
    if total.is_none_or(|t| t > budget) {
        return Err(Error::SearchBudgetExceeded { budget });
    }
    let mut out = Vec::new();
    let mut counter = vec![0usize; slots.len()];
    loop {
        let values: Vec<F::Elem> = counter.iter().map(|&i| elements[i].clone()).collect();
        let delta =
            BlockGradedMap::from_slots(f, 1, spaces.to_vec(), spaces.to_vec(), &slots, &values);
        if delta.compose(&delta).is_zero()
            && is_connection_matrix(poset, &delta, g, None, budget)?.is_connection_matrix
        {
            out.push(delta);
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
            return Ok(out);
        }
    }
}
