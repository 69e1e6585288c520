//! Affine solution sets of linear systems, with lexicographic enumeration
//! over finite fields.

use crate::field::Field;
use crate::matrix::Matrix;

/// `a * x = b`.
#[derive(Clone, Debug)]
pub struct LinearSystem<F: Field> {
    pub a: Matrix<F>,
    pub b: Vec<F::Elem>,
}

impl<F: Field> LinearSystem<F> {
    /// Recover the system `residual(x) = 0` from an affine residual map by
    /// evaluating it at zero and at the unit vectors.
    pub fn linearize(
        field: F,
        unknowns: usize,
        residual: impl Fn(&[F::Elem]) -> Vec<F::Elem>,
    ) -> Self {
        let mut x = vec![field.zero(); unknowns];
        let r0 = residual(&x);
        let mut a = Matrix::zeros(field, r0.len(), unknowns);
        for j in 0..unknowns {
            x[j] = field.one();
            let rj = residual(&x);
            x[j] = field.zero();
            for (i, (v, v0)) in rj.iter().zip(&r0).enumerate() {
                a.set(i, j, field.sub(v, v0));
            }
        }
        let b = r0.iter().map(|v| field.neg(v)).collect();
        LinearSystem { a, b }
    }

    /// The full solution set, parametrised so that lexicographic order on
    /// the free variables is lexicographic order on solutions.
    pub fn solve(&self) -> Option<AffineSpace<F>> {
        let f = self.a.field();
        let n = self.a.cols();
        let m = self.a.rows();
        // Reversing the columns makes every pivot variable depend only on
        // free variables with smaller index.
        let aug = Matrix::from_fn(f, m, n + 1, |i, j| {
            if j < n {
                self.a.get(i, n - 1 - j).clone()
            } else {
                self.b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&n) {
            return None;
        }
        let pivot_vars: Vec<usize> = pivots.iter().map(|&c| n - 1 - c).collect();
        let free: Vec<usize> = (0..n).filter(|v| !pivot_vars.contains(v)).collect();
        let mut bound = Vec::new();
        for (row, &c) in pivots.iter().enumerate() {
            let mut terms = Vec::new();
            for j in c + 1..n {
                let coef = r.get(row, j);
                if !f.is_zero(coef) {
                    terms.push((n - 1 - j, f.neg(coef)));
                }
            }
            bound.push(BoundVar {
                var: n - 1 - c,
                constant: r.get(row, n).clone(),
                terms,
            });
        }
        Some(AffineSpace {
            field: f,
            unknowns: n,
            free,
            bound,
        })
    }
}

#[derive(Clone, Debug)]
struct BoundVar<F: Field> {
    var: usize,
    constant: F::Elem,
    terms: Vec<(usize, F::Elem)>,
}

#[derive(Clone, Debug)]
pub struct AffineSpace<F: Field> {
    field: F,
    unknowns: usize,
    free: Vec<usize>,
    bound: Vec<BoundVar<F>>,
}

impl<F: Field> AffineSpace<F> {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    /// Number of points over a finite field, saturating.
    pub fn count(&self) -> Option<u64> {
        let q = self.field.size()?;
        Some(
            (0..self.dim())
                .try_fold(1u64, |acc, _| acc.checked_mul(q))
                .unwrap_or(u64::MAX),
        )
    }

    /// The solution with the given free-variable values.
    pub fn point(&self, free_values: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field;
        let mut x = vec![f.zero(); self.unknowns];
        for (&v, val) in self.free.iter().zip(free_values) {
            x[v] = val.clone();
        }
        for b in &self.bound {
            let mut val = b.constant.clone();
            for (v, c) in &b.terms {
                val = f.add(&val, &f.mul(c, &x[*v]));
            }
            x[b.var] = val;
        }
        x
    }

    /// The lexicographically smallest solution.
    pub fn first(&self) -> Vec<F::Elem> {
        self.point(&vec![self.field.zero(); self.dim()])
    }

    /// All solutions in lexicographic order; `None` over an infinite field.
    pub fn points(&self) -> Option<AffinePoints<'_, F>> {
        let elements = self.field.elements()?;
        Some(AffinePoints {
            space: self,
            counter: vec![0; self.dim()],
            elements,
            done: false,
        })
    }
}

pub struct AffinePoints<'a, F: Field> {
    space: &'a AffineSpace<F>,
    counter: Vec<usize>,
    elements: Vec<F::Elem>,
    done: bool,
}

impl<F: Field> Iterator for AffinePoints<'_, F> {
    type Item = Vec<F::Elem>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let values: Vec<F::Elem> = self
            .counter
            .iter()
            .map(|&i| self.elements[i].clone())
            .collect();
        let point = self.space.point(&values);
        self.done = true;
        for slot in self.counter.iter_mut().rev() {
            *slot += 1;
            if *slot < self.elements.len() {
                self.done = false;
                break;
            }
            *slot = 0;
        }
        Some(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn enumerates_in_lex_order() {
        let f3 = PrimeField::new(3).unwrap();
        // x0 + x1 + x2 = 1
        let sys = LinearSystem {
            a: Matrix::from_i64(f3, 1, 3, &[1, 1, 1]),
            b: vec![1],
        };
        let space = sys.solve().unwrap();
        assert_eq!(space.dim(), 2);
        let pts: Vec<_> = space.points().unwrap().collect();
        assert_eq!(pts.len(), 9);
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
        assert_eq!(pts[0], vec![0, 0, 1]);
        for p in &pts {
            assert_eq!((p[0] + p[1] + p[2]) % 3, 1);
        }
    }

    #[test]
    fn linearize_recovers_affine_map() {
        let q = Rationals;
        // residual = (2x - y - 1, y - 3)
        let sys = LinearSystem::linearize(q, 2, |x| {
            vec![
                q.sub(&q.sub(&q.mul(&q.from_i64(2), &x[0]), &x[1]), &q.one()),
                q.sub(&x[1], &q.from_i64(3)),
            ]
        });
        let space = sys.solve().unwrap();
        assert_eq!(space.dim(), 0);
        assert_eq!(space.first(), vec![q.from_i64(2), q.from_i64(3)]);
    }

    #[test]
    fn inconsistent_system_has_no_solutions() {
        let f2 = PrimeField::f2();
        let sys = LinearSystem {
            a: Matrix::from_i64(f2, 2, 1, &[1, 1]),
            b: vec![0, 1],
        };
        assert!(sys.solve().is_none());
    }
}
