//! Linear solvers: conjugate gradient on a matrix-free symmetric operator,
//! with a dense Gaussian-elimination fallback for small systems.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Largest n for which the dense fallback (and dense kernels) may allocate.
pub const DENSE_GUARD: usize = 2000;

pub const CG_TOLERANCE: f64 = 1e-10;

/// Solve M y = b for each column of b, where `apply` computes M x.
/// M must be symmetric positive definite. Falls back to a dense solve
/// (n <= DENSE_GUARD) when CG stalls.
pub fn solve_spd<F>(apply: F, b: &DenseMatrix, to_dense: impl Fn() -> DenseMatrix) -> Result<DenseMatrix>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.rows();
    let cols = b.cols();
    let mut out = DenseMatrix::zeros(n, cols);
    let mut dense: Option<DenseFactor> = None;
    for c in 0..cols {
        let rhs: Vec<f64> = (0..n).map(|i| b.get(i, c)).collect();
        let sol = match conjugate_gradient(&apply, &rhs, CG_TOLERANCE, 20 * n.max(100)) {
            Some(x) => x,
            None => {
                if n > DENSE_GUARD {
                    return Err(Error::SingularSystem);
                }
                let f = match &dense {
                    Some(f) => f,
                    None => {
                        dense = Some(DenseFactor::new(to_dense())?);
                        dense.as_ref().unwrap()
                    }
                };
                f.solve(&rhs)?
            }
        };
        for (i, v) in sol.iter().enumerate() {
            out.set(i, c, *v);
        }
    }
    Ok(out)
}

/// Standard conjugate gradient. Returns None if the residual target is not met.
pub fn conjugate_gradient<F>(apply: &F, b: &[f64], tol: f64, max_iter: usize) -> Option<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Some(vec![0.0; n]);
    }
    let target = tol * b_norm;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rs = dot(&r, &r);
    for _ in 0..max_iter {
        if rs.sqrt() <= target {
            return Some(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap.is_finite()) || pap <= 0.0 {
            return None;
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rs.sqrt() <= target {
        Some(x)
    } else {
        None
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// LU factorization with partial pivoting.
struct DenseFactor {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseFactor {
    fn new(m: DenseMatrix) -> Result<Self> {
        let n = m.rows();
        let mut lu = m.data().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best < 1e-14 {
                return Err(Error::SingularSystem);
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Ok(DenseFactor { n, lu, perm })
    }

    fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                y[i] -= self.lu[i * n + j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                y[i] -= self.lu[i * n + j] * y[j];
            }
            y[i] /= self.lu[i * n + i];
        }
        Ok(y)
    }
}
