//! Compressed sparse row matrices for the normalized graph operators.

use crate::matrix::DenseMatrix;

/// Square CSR matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from per-row (column, value) pairs. Columns are sorted within each row.
    pub fn from_rows(n: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        assert_eq!(rows.len(), n);
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                debug_assert!(j < n);
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let a = self.indptr[i];
        let b = self.indptr[i + 1];
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Row sums accumulated in CSR storage order.
    pub fn rowsums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    /// y = self * x for dense x.
    pub fn mul_dense(&self, x: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, x.rows(), "sparse-dense shape");
        let cols = x.cols();
        let mut out = DenseMatrix::zeros(self.n, cols);
        for i in 0..self.n {
            let (idx, vals) = self.row(i);
            let o_row = out.row_mut(i);
            for (&j, &v) in idx.iter().zip(vals) {
                let x_row = x.row(j);
                for (o, &xv) in o_row.iter_mut().zip(x_row) {
                    *o += v * xv;
                }
            }
        }
        out
    }

    /// y = self * x for a single column.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let (idx, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in idx.iter().zip(vals) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
    }

    /// Exact sparse-sparse product self * other.
    pub fn matmul_sparse(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n, other.n, "sparse-sparse shape");
        let n = self.n;
        let mut acc = vec![0.0f64; n];
        let mut mark = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        for i in 0..n {
            touched.clear();
            let (a_idx, a_vals) = self.row(i);
            for (&k, &av) in a_idx.iter().zip(a_vals) {
                let (b_idx, b_vals) = other.row(k);
                for (&j, &bv) in b_idx.iter().zip(b_vals) {
                    if !mark[j] {
                        mark[j] = true;
                        touched.push(j);
                    }
                    acc[j] += av * bv;
                }
            }
            touched.sort_unstable();
            let mut row = Vec::with_capacity(touched.len());
            for &j in &touched {
                row.push((j, acc[j]));
                acc[j] = 0.0;
                mark[j] = false;
            }
            rows.push(row);
        }
        CsrMatrix::from_rows(n, rows)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                d.set(i, j, v);
            }
        }
        d
    }

    /// Copy with all values multiplied by s.
    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    pub fn max_symmetry_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (idx, vals) = self.row(i);
            for (&j, &v) in idx.iter().zip(vals) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }
}
