//! Dense matrices over a [`Field`] with exact elimination.

use std::collections::HashMap;
use std::fmt;

use crate::field::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_strings()).finish()
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(
        field: F,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> F::Elem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Row-major integer entries, reduced into the field.
    ///
    /// # Panics
    /// If `values.len() != rows * cols`.
    pub fn from_i64(field: F, rows: usize, cols: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), rows * cols, "entry count does not match shape");
        Matrix {
            field,
            rows,
            cols,
            data: values.iter().map(|&v| field.from_i64(v)).collect(),
        }
    }

    /// Row-major entries already in the field.
    ///
    /// # Panics
    /// If `data.len() != rows * cols`.
    pub fn from_vec(field: F, rows: usize, cols: usize, data: Vec<F::Elem>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length does not match row count");
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> F {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F::Elem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.field, self.rows)
    }

    /// # Panics
    /// If the inner dimensions differ.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len(), "vector length does not match column count");
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(&F::Elem, &F::Elem) -> F::Elem) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in elementwise op");
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| op(a, b)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let f = self.field;
        self.zip_with(rhs, |a, b| f.add(a, b))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let f = self.field;
        self.zip_with(rhs, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.neg(&self.field.one()))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// The submatrix on the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "hstack needs equal row counts");
        Self::from_fn(self.field, self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "vstack needs equal column counts");
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Matrix {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&Self::identity(self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (0..n).collect();
        let right: Vec<usize> = (n..2 * n).collect();
        Some(r.select(&idx, &right))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Some `X` with `self * X = rhs`, or `None` when inconsistent.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve needs matching row counts");
        let n = self.cols;
        let aug = self.hstack(rhs);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut x = Self::zeros(self.field, n, rhs.cols);
        for (row, &c) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(c, j, r.get(row, n + j).clone());
            }
        }
        Some(x)
    }

    /// Basis of the null space, one column per vector.
    pub fn kernel(&self) -> Self {
        kernel_image(self).kernel
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| self.field.format(x)).collect())
            .collect()
    }
}

/// Result of left-to-right column reduction: `reduced = original * transform`.
#[derive(Clone, Debug)]
pub struct ColumnReduction<F: Field> {
    pub reduced: Matrix<F>,
    pub transform: Matrix<F>,
    /// Row index of the lowest nonzero entry of each reduced column.
    pub low: Vec<Option<usize>>,
}

/// Reduce columns left to right until all nonzero columns have distinct
/// lowest nonzero rows, recording the column operations.
pub fn reduce_columns<F: Field>(m: &Matrix<F>) -> ColumnReduction<F> {
    let f = m.field();
    let mut cols = m.columns();
    let mut v = Matrix::identity(f, m.cols()).columns();
    let mut low = vec![None; m.cols()];
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for j in 0..cols.len() {
        while let Some(l) = lowest(f, &cols[j]) {
            let Some(&i) = owner.get(&l) else {
                owner.insert(l, j);
                low[j] = Some(l);
                break;
            };
            let factor = f.mul(&cols[j][l], &f.inv(&cols[i][l]).expect("pivot is nonzero"));
            let (ci, vi) = (cols[i].clone(), v[i].clone());
            axpy(f, &mut cols[j], &factor, &ci);
            axpy(f, &mut v[j], &factor, &vi);
        }
    }
    ColumnReduction {
        reduced: Matrix::from_columns(f, m.rows(), &cols),
        transform: Matrix::from_columns(f, m.cols(), &v),
        low,
    }
}

fn lowest<F: Field>(f: F, col: &[F::Elem]) -> Option<usize> {
    col.iter().rposition(|x| !f.is_zero(x))
}

/// `y -= a * x`
fn axpy<F: Field>(f: F, y: &mut [F::Elem], a: &F::Elem, x: &[F::Elem]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !f.is_zero(xi) {
            *yi = f.sub(yi, &f.mul(a, xi));
        }
    }
}

/// Column bases for the null space and the column space.
#[derive(Clone, Debug)]
pub struct KernelImage<F: Field> {
    pub kernel: Matrix<F>,
    pub image: Matrix<F>,
}

pub fn kernel_image<F: Field>(m: &Matrix<F>) -> KernelImage<F> {
    let f = m.field();
    let red = reduce_columns(m);
    let mut kernel = Vec::new();
    let mut image = Vec::new();
    for j in 0..m.cols() {
        if red.low[j].is_some() {
            image.push(red.reduced.column(j));
        } else {
            kernel.push(red.transform.column(j));
        }
    }
    KernelImage {
        kernel: Matrix::from_columns(f, m.cols(), &kernel),
        image: Matrix::from_columns(f, m.rows(), &image),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn empty_matrix_inverts() {
        let m = Matrix::zeros(Rationals, 0, 0);
        assert_eq!(m.inverse(), Some(m));
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let f2 = PrimeField::f2();
        let ki = kernel_image(&Matrix::identity(f2, 2));
        assert_eq!(ki.kernel.cols(), 0);
        assert_eq!(ki.image.cols(), 2);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let ki = kernel_image(&Matrix::zeros(Rationals, 2, 3));
        assert_eq!(ki.kernel.cols(), 3);
        assert_eq!(ki.image.cols(), 0);
    }

    #[test]
    fn rank_one_kernel() {
        let q = Rationals;
        let m = Matrix::from_i64(q, 2, 2, &[1, 1, 1, 1]);
        let ki = kernel_image(&m);
        assert_eq!(ki.image.cols(), 1);
        assert_eq!(ki.kernel.cols(), 1);
        assert_eq!(ki.kernel, Matrix::from_i64(q, 2, 1, &[-1, 1]));
        assert!(m.mul(&ki.kernel).is_zero());
    }

    #[test]
    fn inverse_and_solve() {
        let q = Rationals;
        let m = Matrix::from_i64(q, 2, 2, &[2, 1, 1, 1]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let b = Matrix::from_i64(q, 2, 1, &[3, 2]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul(&x), b);
        let singular = Matrix::from_i64(q, 2, 2, &[1, 2, 2, 4]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&Matrix::from_i64(q, 2, 1, &[1, 0])).is_none());
    }

    #[test]
    fn reduction_tracks_transform() {
        let f3 = PrimeField::new(3).unwrap();
        let m = Matrix::from_i64(f3, 3, 4, &[1, 1, 0, 2, 0, 1, 1, 1, 1, 0, 2, 1]);
        let red = reduce_columns(&m);
        assert_eq!(m.mul(&red.transform), red.reduced);
        let lows: Vec<_> = red.low.iter().flatten().collect();
        let mut dedup = lows.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(lows.len(), dedup.len());
    }
}
