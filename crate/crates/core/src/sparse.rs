//! Compressed-row storage for symmetric sparse matrices.

use rayon::prelude::*;

use crate::error::{MattingError, Result};

const PAR_ROWS: usize = 4096;

/// An `n x n` symmetric matrix in CSR form with both triangles stored.
///
/// Column indices are sorted within each row. Constructors only accept the
/// upper triangle (or mirror a value computed once), so `a[i][j]` and
/// `a[j][i]` are always the same `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from `(row, col, value)` triplets; each triplet is mirrored, duplicates are summed.
    ///
    /// Triplets may name either triangle; `(i, j)` and `(j, i)` address the same entry.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut upper: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(MattingError::InvalidData(format!(
                    "entry ({i}, {j}) outside {n}x{n} matrix"
                )));
            }
            upper.push((i.min(j), i.max(j), v));
        }
        upper.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in &merged {
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        Ok(Self::from_rows(n, rows))
    }

    /// Rows of `(col, value)`; caller guarantees symmetry.
    pub(crate) fn from_rows(n: usize, mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            for &(c, v) in row.iter() {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// `y = A x`. Each row is summed sequentially, so the result does not depend on threading.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let row_dot = |i: usize| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum::<f64>()
        };
        if self.n >= PAR_ROWS {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| *yi = row_dot(i));
        } else {
            y.iter_mut().enumerate().for_each(|(i, yi)| *yi = row_dot(i));
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `c * A + diag(d)`. Entries keep their structure; the diagonal must already be stored.
    pub fn scaled_plus_diagonal(&self, c: f64, d: &[f64]) -> Result<Self> {
        if d.len() != self.n {
            return Err(MattingError::LengthMismatch {
                expected: self.n,
                found: d.len(),
            });
        }
        let mut out = self.scaled(c);
        for i in 0..self.n {
            let r = out.row_ptr[i]..out.row_ptr[i + 1];
            match out.cols[r.clone()].binary_search(&i) {
                Ok(k) => out.vals[r.start + k] += d[i],
                Err(_) => {
                    return Err(MattingError::InvalidData(format!(
                        "row {i} has no stored diagonal"
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Row-major dense copy, for tests and small problems.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                dense[i * self.n + c] = v;
            }
        }
        dense
    }

    /// Exact (bitwise) symmetry check.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .all(|(&c, &v)| self.get(c, i).to_bits() == v.to_bits())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triplets_merge_and_mirror() {
        let a = SparseSymMatrix::from_triplets(3, [(0, 1, 2.0), (1, 0, 1.0), (2, 2, 4.0)]).unwrap();
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.get(1, 0), 3.0);
        assert_eq!(a.get(2, 2), 4.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert_eq!(a.nnz(), 3);
        assert!(a.is_symmetric());
        assert!(SparseSymMatrix::from_triplets(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn diagonal_update() {
        let a = SparseSymMatrix::from_triplets(2, [(0, 0, 1.0), (0, 1, -1.0), (1, 1, 1.0)]).unwrap();
        let b = a.scaled_plus_diagonal(2.0, &[0.5, 0.25]).unwrap();
        assert_eq!(b.to_dense(), vec![2.5, -2.0, -2.0, 2.25]);
        let c = SparseSymMatrix::from_triplets(2, [(0, 1, 1.0)]).unwrap();
        assert!(c.scaled_plus_diagonal(1.0, &[1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn matvec_matches_dense(
            entries in proptest::collection::vec((0usize..6, 0usize..6, -2.0f64..2.0), 0..20),
            x in proptest::collection::vec(-1.0f64..1.0, 6),
        ) {
            let a = SparseSymMatrix::from_triplets(6, entries).unwrap();
            prop_assert!(a.is_symmetric());
            let dense = a.to_dense();
            let y = a.mul_vec(&x);
            for i in 0..6 {
                let expected: f64 = (0..6).map(|j| dense[i * 6 + j] * x[j]).sum();
                prop_assert!((y[i] - expected).abs() < 1e-12);
            }
        }
    }
}
