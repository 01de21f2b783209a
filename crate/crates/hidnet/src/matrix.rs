//! Dense row-major matrix used for node features, logits, and verification kernels.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Dense n x q matrix of f64, row-major. Rows index nodes, columns features.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from a flat row-major buffer. Length must equal rows * cols.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values", rows * cols),
                got: format!("{}", data.len()),
                context: "DenseMatrix::from_vec",
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        DenseMatrix { rows: r, cols: c, data }
    }

    /// Column vector from a slice.
    pub fn column(values: &[f64]) -> Self {
        DenseMatrix {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn same_shape(&self, other: &DenseMatrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn shape_check(&self, other: &DenseMatrix, context: &'static str) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
                context,
            });
        }
        Ok(())
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// self += s * other
    pub fn add_scaled(&mut self, s: f64, other: &DenseMatrix) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// self * other, skipping zero entries of self (pays off on sparse features).
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let o_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let b_row = other.row(k);
                for (o, &b) in o_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// self^T * other without materializing the transpose.
    pub fn matmul_tn(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows, "matmul_tn shape");
        let mut out = DenseMatrix::zeros(self.cols, other.cols);
        for i in 0..self.rows {
            let a_row = self.row(i);
            let b_row = other.row(i);
            for (k, &a) in a_row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let o_row = &mut out.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in o_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// self * other^T.
    pub fn matmul_nt(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.cols, "matmul_nt shape");
        let mut out = DenseMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a_row = self.row(i);
            for j in 0..other.rows {
                let b_row = other.row(j);
                let mut acc = 0.0;
                for (&a, &b) in a_row.iter().zip(b_row) {
                    acc += a * b;
                }
                out.data[i * other.rows + j] = acc;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        debug_assert!(self.same_shape(other));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Minimum Euclidean distance between distinct rows.
    pub fn min_pairwise_row_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.rows {
            for j in (i + 1)..self.rows {
                let mut d = 0.0;
                for (a, b) in self.row(i).iter().zip(self.row(j)) {
                    d += (a - b) * (a - b);
                }
                best = best.min(d.sqrt());
            }
        }
        best
    }

    /// Maximum Euclidean distance between rows.
    pub fn max_pairwise_row_distance(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.rows {
                let mut d = 0.0;
                for (a, b) in self.row(i).iter().zip(self.row(j)) {
                    d += (a - b) * (a - b);
                }
                best = best.max(d.sqrt());
            }
        }
        best
    }

    /// Text format: header line `n q`, then n whitespace-separated rows.
    pub fn read_text(path: &Path) -> Result<Self> {
        let show = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|e| Error::io(&show, e))?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(&show, "empty file"))?
            .map_err(|e| Error::io(&show, e))?;
        let mut it = header.split_whitespace();
        let rows: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(&show, "bad header: expected `n q`"))?;
        let cols: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(&show, "bad header: expected `n q`"))?;
        let mut data = Vec::with_capacity(rows * cols);
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(&show, e))?;
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| {
                    Error::parse(&show, format!("bad number `{tok}` on line {}", lineno + 2))
                })?;
                data.push(v);
            }
        }
        if data.len() != rows * cols {
            return Err(Error::parse(
                &show,
                format!("expected {} values, found {}", rows * cols, data.len()),
            ));
        }
        DenseMatrix::from_vec(rows, cols, data)
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        let show = path.display().to_string();
        let mut f = std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Error::io(&show, e))?,
        );
        writeln!(f, "{} {}", self.rows, self.cols).map_err(|e| Error::io(&show, e))?;
        for i in 0..self.rows {
            let row = self.row(i);
            let line = row
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(f, "{line}").map_err(|e| Error::io(&show, e))?;
        }
        Ok(())
    }
}
