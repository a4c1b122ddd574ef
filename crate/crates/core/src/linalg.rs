//! Dense matrices over the Gaussian rationals: reduced row-echelon form,
//! kernels and row-space queries. Everything here is exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gauss::GQ;

/// Row-major dense matrix with an explicit column count (so 0×n is representable).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    cols: usize,
    rows: Vec<Vec<GQ>>,
}

impl Matrix {
    pub fn zeros(nrows: usize, cols: usize) -> Self {
        Self { cols, rows: vec![vec![GQ::zero(); cols]; nrows] }
    }

    pub fn empty(cols: usize) -> Self {
        Self { cols, rows: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.rows[k][k] = GQ::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(cols: usize, rows: Vec<Vec<GQ>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self { cols, rows }
    }

    pub fn from_ints(cols: usize, rows: &[&[i64]]) -> Self {
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&v| GQ::int(v)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<GQ>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[GQ] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &GQ {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GQ) {
        self.rows[i][j] = v;
    }

    pub fn push_row(&mut self, row: Vec<GQ>) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(GQ::is_zero)
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "stacking matrices of different width");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Self { cols: self.cols, rows }
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.nrows(), "dimension mismatch in product");
        let mut out = Matrix::zeros(self.nrows(), rhs.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.rows[k][j];
                    if !b.is_zero() {
                        out.rows[i][j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[GQ]) -> Vec<GQ> {
        assert_eq!(v.len(), self.cols);
        self.rows.iter().map(|r| r.iter().zip(v).fold(GQ::zero(), |acc, (a, b)| acc + a * b)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                out.rows[j][i] = v.clone();
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Matrix {
        let mut t = self.transpose();
        for v in t.rows.iter_mut().flatten() {
            *v = v.conj();
        }
        t
    }

    pub fn scale(&self, c: &GQ) -> Matrix {
        Self { cols: self.cols, rows: self.rows.iter().map(|r| r.iter().map(|v| v * c).collect()).collect() }
    }

    /// Reorders columns: column `j` of the result is column `perm[j]` of `self`.
    pub fn select_columns(&self, perm: &[usize]) -> Matrix {
        Self {
            cols: perm.len(),
            rows: self.rows.iter().map(|r| perm.iter().map(|&j| r[j].clone()).collect()).collect(),
        }
    }

    /// Reduced row-echelon form with zero rows removed. The result has full row rank
    /// and is unique for a given row space.
    pub fn rref(&self) -> Matrix {
        let mut rows = self.rows.clone();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            let Some(p) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(pivot_row, p);
            let inv = rows[pivot_row][col].recip().expect("nonzero pivot");
            for v in rows[pivot_row].iter_mut() {
                *v = &*v * &inv;
            }
            let pivot = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == pivot_row || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    if !pv.is_zero() {
                        *v -= &(&f * pv);
                    }
                }
            }
            pivot_row += 1;
            if pivot_row == rows.len() {
                break;
            }
        }
        rows.truncate(pivot_row);
        Self { cols: self.cols, rows }
    }

    pub fn rank(&self) -> usize {
        self.rref().nrows()
    }

    /// Pivot column of each row of a matrix already in RREF.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.iter().position(|v| !v.is_zero()).expect("zero row in rref")).collect()
    }

    /// Basis of the right kernel `{v : self·v = 0}`, as vectors.
    pub fn kernel(&self) -> Vec<Vec<GQ>> {
        let r = self.rref();
        let pivots = r.pivots();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![GQ::zero(); self.cols];
            v[free] = GQ::one();
            for (row, &p) in r.rows.iter().zip(&pivots) {
                v[p] = -&row[free];
            }
            basis.push(v);
        }
        basis
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_vectors(cols: usize, vs: &[Vec<GQ>]) -> Matrix {
        Self::from_rows(cols, vs.to_vec())
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[GQ]) -> bool {
        let mut m = self.clone();
        m.push_row(v.to_vec());
        m.rank() == self.rank()
    }

    /// Whether every row of `other` lies in the row space of `self`.
    pub fn row_space_includes(&self, other: &Matrix) -> bool {
        self.rank() == self.stack(other).rank()
    }

    /// Row space intersected with the coordinate subspace spanned by `keep`,
    /// returned in RREF over the full column set.
    pub fn row_space_within(&self, keep: &[usize]) -> Matrix {
        let others: Vec<usize> = (0..self.cols).filter(|c| !keep.contains(c)).collect();
        let mut perm = others.clone();
        perm.extend_from_slice(keep);
        let r = self.select_columns(&perm).rref();
        let mut out = Matrix::empty(self.cols);
        for row in r.rows.iter() {
            if row[..others.len()].iter().all(GQ::is_zero) {
                let mut full = vec![GQ::zero(); self.cols];
                for (k, &c) in perm.iter().enumerate() {
                    full[c] = row[k].clone();
                }
                out.push_row(full);
            }
        }
        out.rref()
    }

    /// Determinant of a square matrix (fraction-free not needed at these sizes).
    pub fn det(&self) -> GQ {
        assert_eq!(self.nrows(), self.cols, "determinant of non-square matrix");
        let mut rows = self.rows.clone();
        let n = self.cols;
        let mut det = GQ::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
                return GQ::zero();
            };
            if p != col {
                rows.swap(p, col);
                det = -det;
            }
            let pivot = rows[col][col].clone();
            det = &det * &pivot;
            let inv = pivot.recip().unwrap();
            for r in col + 1..n {
                if rows[r][col].is_zero() {
                    continue;
                }
                let f = &rows[r][col] * &inv;
                for c in col..n {
                    let d = &f * &rows[col][c];
                    rows[r][c] -= &d;
                }
            }
        }
        det
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let txt: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", txt.join(" "))?;
        }
        write!(f, "] ({}×{})", self.nrows(), self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rref_removes_dependent_rows() {
        let m = Matrix::from_ints(3, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let r = m.rref();
        assert_eq!(r, Matrix::from_ints(3, &[&[1, 0, 1], &[0, 1, 1]]));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let m = Matrix::from_ints(3, &[&[1, 2, 3]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(GQ::is_zero));
        }
        assert_eq!(Matrix::empty(2).kernel().len(), 2);
    }

    #[test]
    fn row_space_within_coordinates() {
        // rows: e0 + e1, e1 ; intersection with span{e0} is e0
        let m = Matrix::from_ints(2, &[&[1, 1], &[0, 1]]);
        assert_eq!(m.row_space_within(&[0]), Matrix::from_ints(2, &[&[1, 0]]));
        // e0 + e1 alone has nothing in span{e0}
        let m = Matrix::from_ints(2, &[&[1, 1]]);
        assert_eq!(m.row_space_within(&[0]).nrows(), 0);
    }

    #[test]
    fn determinant() {
        let m = Matrix::from_ints(2, &[&[1, 1], &[1, -1]]);
        assert_eq!(m.det(), GQ::int(-2));
        assert_eq!(Matrix::from_ints(2, &[&[1, 2], &[2, 4]]).det(), GQ::zero());
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..4, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec((-3i64..4, -2i64..3), c), r).prop_map(move |rows| {
                Matrix::from_rows(
                    c,
                    rows.into_iter().map(|row| row.into_iter().map(|(a, b)| GQ::from_ints(a, b)).collect()).collect(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent_and_preserves_row_space(m in small_matrix()) {
            let r = m.rref();
            prop_assert_eq!(r.rref(), r.clone());
            prop_assert!(m.row_space_includes(&r) && r.row_space_includes(&m));
            let k = m.kernel();
            prop_assert_eq!(k.len() + r.nrows(), m.ncols());
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(GQ::is_zero));
            }
        }
    }
}
