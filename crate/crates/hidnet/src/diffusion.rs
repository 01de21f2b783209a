//! The generalized diffusion step with fidelity term, the high-order DMP
//! iteration, its closed-form steady state and propagation kernel, and the
//! reductions to SGC, APPNP, GAT, AMP, and DAGNN propagation.
//!
//! All operations are pure, single-threaded functions of their inputs.

use crate::error::{Error, Result};
use crate::graph::{Graph, NormalizedOperator};
use crate::matrix::DenseMatrix;
use crate::solver::{self, DENSE_GUARD};

/// Propagation flavor. Mode parameters are carried by the variant that needs them.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// High-order diffusion step driven by (alpha, beta, gamma, dt).
    Hid,
    /// X <- A_hat X per step.
    Sgc,
    /// X <- (1 - eta) A_hat X + eta X0 per step.
    Appnp { eta: f64 },
    /// X <- F X per step with a fixed row-stochastic attention matrix.
    Gat { attention: DenseMatrix },
    /// Adaptive message passing with per-node residual clamp.
    Amp { eps: f64, lambda: f64 },
    /// Weighted combination of powers, X = sum_k s_k A_hat^k X0.
    Dagnn { weights: Vec<f64> },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Hid => "hid",
            Mode::Sgc => "sgc",
            Mode::Appnp { .. } => "appnp",
            Mode::Gat { .. } => "gat",
            Mode::Amp { .. } => "amp",
            Mode::Dagnn { .. } => "dagnn",
        }
    }
}

/// Full coefficient set of the diffusion process.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub dt: f64,
    pub steps: usize,
    pub mode: Mode,
}

impl DiffusionConfig {
    pub fn hid(alpha: f64, beta: f64, gamma: f64, dt: f64, steps: usize) -> Self {
        DiffusionConfig {
            alpha,
            beta,
            gamma,
            dt,
            steps,
            mode: Mode::Hid,
        }
    }

    pub fn sgc(steps: usize) -> Self {
        DiffusionConfig {
            alpha: 0.0,
            beta: 1.0,
            gamma: 0.0,
            dt: 1.0,
            steps,
            mode: Mode::Sgc,
        }
    }

    /// Per-step coefficients of the high-order iteration:
    /// X' = alpha dt X0 + (c0 I + c1 A_hat + c2 A_hat^2) X.
    pub fn step_coefficients(&self) -> (f64, f64, f64, f64) {
        let c0 = 1.0 - (self.alpha + self.beta) * self.dt;
        let c1 = (self.beta - self.beta * self.gamma) * self.dt;
        let c2 = self.beta * self.gamma * self.dt;
        (self.alpha * self.dt, c0, c1, c2)
    }

    /// Convergence-gated coefficient range: alpha, beta, gamma, dt in (0, 1]
    /// and alpha > 0 so the fidelity anchor is present.
    pub fn validate_convergence_range(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !(in_unit(self.alpha) && in_unit(self.beta) && in_unit(self.gamma) && in_unit(self.dt))
        {
            return Err(Error::InvalidConfig(format!(
                "alpha, beta, gamma, dt must lie in (0, 1]; got ({}, {}, {}, {})",
                self.alpha, self.beta, self.gamma, self.dt
            )));
        }
        Ok(())
    }

    fn validate_mode(&self, n: usize) -> Result<()> {
        match &self.mode {
            Mode::Hid | Mode::Sgc => Ok(()),
            Mode::Appnp { eta } => {
                if *eta > 0.0 && *eta <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!(
                        "appnp eta must lie in (0, 1]; got {eta}"
                    )))
                }
            }
            Mode::Gat { attention } => validate_attention(attention, n),
            Mode::Amp { eps, lambda } => {
                let open = |v: f64| v > 0.0 && v < 1.0;
                if open(*eps) && open(*lambda) {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!(
                        "amp eps and lambda must lie in (0, 1); got ({eps}, {lambda})"
                    )))
                }
            }
            Mode::Dagnn { weights } => validate_combine_weights(weights),
        }
    }
}

fn validate_attention(attention: &DenseMatrix, n: usize) -> Result<()> {
    if attention.rows() != n || attention.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", attention.rows(), attention.cols()),
            context: "attention matrix",
        });
    }
    for i in 0..n {
        let mut sum = 0.0;
        for &v in attention.row(i) {
            if v < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "attention entry at row {i} is negative ({v})"
                )));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotRowStochastic { row: i, sum });
        }
    }
    Ok(())
}

/// Check that nonzero attention entries stay inside the closed 1-hop neighborhood.
pub fn validate_attention_support(attention: &DenseMatrix, g: &Graph) -> Result<()> {
    validate_attention(attention, g.n())?;
    let adj = g.adjacency_with_loops();
    for i in 0..g.n() {
        for (j, &v) in attention.row(i).iter().enumerate() {
            if v != 0.0 && adj.get(i, j) == 0.0 {
                return Err(Error::AttentionSupport { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn validate_combine_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidConfig("combination weights are empty".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::WeightsNotNormalized { sum });
    }
    Ok(())
}

fn check_op_rows(op: &NormalizedOperator, x: &DenseMatrix, context: &'static str) -> Result<()> {
    if x.rows() != op.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", op.n()),
            got: format!("{} rows", x.rows()),
            context,
        });
    }
    Ok(())
}

fn divergence_with(weights: &crate::sparse::CsrMatrix, x: &DenseMatrix) -> DenseMatrix {
    let cols = x.cols();
    let mut out = DenseMatrix::zeros(x.rows(), cols);
    for i in 0..weights.n() {
        let (idx, vals) = weights.row(i);
        let o_row = out.row_mut(i);
        let x_i = &x.data()[i * cols..(i + 1) * cols];
        for (&j, &v) in idx.iter().zip(vals) {
            let x_j = &x.data()[j * cols..(j + 1) * cols];
            for k in 0..cols {
                o_row[k] += v * (x_j[k] - x_i[k]);
            }
        }
    }
    out
}

/// First-order divergence, literal form: sum_j A_hat_ij (x_j - x_i), which is
/// row i of (A_hat - diag(rowsum A_hat)) X. The difference form keeps constant
/// fields at exactly zero.
pub fn divergence_first(op: &NormalizedOperator, x: &DenseMatrix) -> Result<DenseMatrix> {
    check_op_rows(op, x, "divergence_first")?;
    Ok(divergence_with(op.a_hat(), x))
}

/// Second-order divergence: sum_j B_ij (x_j - x_i) with B = A_hat^2, i.e. row i
/// of (B - diag(rowsum B)) X. This is the 2-hop term whose scaled form
/// beta gamma dt (B - I) X enters the high-order step on rowsum-1 graphs.
pub fn divergence_second(op: &NormalizedOperator, x: &DenseMatrix) -> Result<DenseMatrix> {
    check_op_rows(op, x, "divergence_second")?;
    Ok(divergence_with(op.a_hat_sq(), x))
}

/// One high-order diffusion step:
/// X' = alpha dt X0 + [(1 - (alpha + beta) dt) I
///      + (beta - beta gamma) dt A_hat + beta gamma dt A_hat^2] X.
pub fn dmp_step(
    x_t: &DenseMatrix,
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
) -> Result<DenseMatrix> {
    if cfg.mode != Mode::Hid {
        return Err(Error::InvalidConfig(format!(
            "dmp_step requires hid mode, got {}",
            cfg.mode.name()
        )));
    }
    x_t.shape_check(x_0, "dmp_step")?;
    check_op_rows(op, x_t, "dmp_step")?;
    if !x_t.is_finite() || !x_0.is_finite() {
        return Err(Error::NonFinite("dmp_step input"));
    }
    Ok(hid_step_unchecked(x_t, x_0, op, cfg))
}

fn hid_step_unchecked(
    x_t: &DenseMatrix,
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
) -> DenseMatrix {
    let (a_dt, c0, c1, c2) = cfg.step_coefficients();
    let mut out = x_0.clone();
    out.scale(a_dt);
    out.add_scaled(c0, x_t);
    out.add_scaled(c1, &op.a_hat().mul_dense(x_t));
    out.add_scaled(c2, &op.a_hat_sq().mul_dense(x_t));
    out
}

/// Apply the configured step `cfg.steps` times, starting from and anchored at x0.
pub fn propagate(
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
) -> Result<DenseMatrix> {
    check_op_rows(op, x_0, "propagate")?;
    if !x_0.is_finite() {
        return Err(Error::NonFinite("propagate input"));
    }
    cfg.validate_mode(op.n())?;
    if let Mode::Dagnn { weights } = &cfg.mode {
        return reduce_dagnn_combine(x_0, op, weights);
    }
    let mut x = x_0.clone();
    for _ in 0..cfg.steps {
        x = match &cfg.mode {
            Mode::Hid => hid_step_unchecked(&x, x_0, op, cfg),
            Mode::Sgc => op.a_hat().mul_dense(&x),
            Mode::Appnp { eta } => {
                let mut next = op.a_hat().mul_dense(&x);
                next.scale(1.0 - eta);
                next.add_scaled(*eta, x_0);
                next
            }
            Mode::Gat { attention } => attention.matmul(&x),
            Mode::Amp { eps, lambda } => amp_step_unchecked(&x, x_0, op, *eps, *lambda),
            Mode::Dagnn { .. } => unreachable!(),
        };
        if !x.is_finite() {
            return Err(Error::NonFinite("propagate state"));
        }
    }
    Ok(x)
}

/// Closed-form steady state of the high-order iteration:
/// solves ((alpha + beta) I - beta (1 - gamma) A_hat - beta gamma A_hat^2) Y = alpha X0.
pub fn steady_state(
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
) -> Result<DenseMatrix> {
    check_op_rows(op, x_0, "steady_state")?;
    cfg.validate_convergence_range()?;
    let n = op.n();
    let d0 = cfg.alpha + cfg.beta;
    let d1 = cfg.beta * (1.0 - cfg.gamma);
    let d2 = cfg.beta * cfg.gamma;
    let mut rhs = x_0.clone();
    rhs.scale(cfg.alpha);
    let a = op.a_hat();
    let b = op.a_hat_sq();
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut t = vec![0.0; n];
        a.mul_vec(x, &mut t);
        for i in 0..n {
            y[i] = d0 * x[i] - d1 * t[i];
        }
        b.mul_vec(x, &mut t);
        for i in 0..n {
            y[i] -= d2 * t[i];
        }
    };
    let to_dense = || {
        let mut m = a.to_dense();
        m.scale(-d1);
        m.add_scaled(-d2, &b.to_dense());
        for i in 0..n {
            m.set(i, i, m.get(i, i) + d0);
        }
        m
    };
    solver::solve_spd(apply, &rhs, to_dense)
}

/// Fixed point of the Euler-Lagrange equation
/// 0 = alpha (x - x0) + beta ((1 - gamma)(A_hat - I) + gamma (A_hat^2 - I)) x,
/// solved as [alpha I + beta ((1-gamma)(A_hat - I) + gamma (A_hat^2 - I))] y = alpha x0.
/// beta may be negative, as in the APPNP assignment beta = 1 - 1/eta.
pub fn el_fixed_point(
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<DenseMatrix> {
    check_op_rows(op, x_0, "el_fixed_point")?;
    let n = op.n();
    let w1 = beta * (1.0 - gamma);
    let w2 = beta * gamma;
    let diag = alpha - w1 - w2;
    let mut rhs = x_0.clone();
    rhs.scale(alpha);
    let a = op.a_hat();
    let b = op.a_hat_sq();
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut t = vec![0.0; n];
        a.mul_vec(x, &mut t);
        for i in 0..n {
            y[i] = diag * x[i] + w1 * t[i];
        }
        if w2 != 0.0 {
            b.mul_vec(x, &mut t);
            for i in 0..n {
                y[i] += w2 * t[i];
            }
        }
    };
    let to_dense = || {
        let mut m = a.to_dense();
        m.scale(w1);
        m.add_scaled(w2, &b.to_dense());
        for i in 0..n {
            m.set(i, i, m.get(i, i) + diag);
        }
        m
    };
    solver::solve_spd(apply, &rhs, to_dense)
}

/// Dense propagation kernel H mapping X0 to the state after `steps` steps,
/// together with the per-step operator C.
#[derive(Debug, Clone)]
pub struct PropagationKernel {
    pub h: DenseMatrix,
    pub c: DenseMatrix,
    pub steps: usize,
}

impl PropagationKernel {
    pub fn apply(&self, x_0: &DenseMatrix) -> DenseMatrix {
        self.h.matmul(x_0)
    }
}

/// Build H by unrolling H <- alpha dt I + C H from H = I. Verification-scale
/// only: refuses n above the dense guard.
pub fn build_kernel(op: &NormalizedOperator, cfg: &DiffusionConfig) -> Result<PropagationKernel> {
    if cfg.mode != Mode::Hid {
        return Err(Error::InvalidConfig(format!(
            "build_kernel requires hid mode, got {}",
            cfg.mode.name()
        )));
    }
    let n = op.n();
    if n > DENSE_GUARD {
        return Err(Error::DenseGuardExceeded {
            n,
            limit: DENSE_GUARD,
        });
    }
    let (a_dt, c0, c1, c2) = cfg.step_coefficients();
    let mut c = op.a_hat().to_dense();
    c.scale(c1);
    c.add_scaled(c2, &op.a_hat_sq().to_dense());
    for i in 0..n {
        c.set(i, i, c.get(i, i) + c0);
    }
    let mut h = DenseMatrix::identity(n);
    for _ in 0..cfg.steps {
        let mut next = op.a_hat().mul_dense(&h);
        next.scale(c1);
        next.add_scaled(c2, &op.a_hat_sq().mul_dense(&h));
        next.add_scaled(c0, &h);
        for i in 0..n {
            next.set(i, i, next.get(i, i) + a_dt);
        }
        h = next;
    }
    Ok(PropagationKernel {
        h,
        c,
        steps: cfg.steps,
    })
}

/// Discrete energy of the first-order flow (gamma = 0 semantics), with
/// f = 1 and each undirected edge counted once:
/// E = alpha sum_i |x_i - x0_i|^2 plus
/// beta f^2 sum over edges of |x_j / sqrt(d_j) - x_i / sqrt(d_i)|^2.
/// The degree-normalized difference makes E decrease monotonically along
/// the explicit iteration for small dt.
pub fn energy(
    x: &DenseMatrix,
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
) -> Result<f64> {
    x.shape_check(x_0, "energy")?;
    check_op_rows(op, x, "energy")?;
    let f_sq = 1.0;
    let mut fidelity = 0.0;
    for i in 0..x.rows() {
        for (a, b) in x.row(i).iter().zip(x_0.row(i)) {
            fidelity += (a - b) * (a - b);
        }
    }
    let inv_sqrt: Vec<f64> = op
        .degrees()
        .iter()
        .map(|&d| 1.0 / (d as f64).sqrt())
        .collect();
    let mut dirichlet = 0.0;
    for (i, j) in op.edge_iter() {
        for (a, b) in x.row(i).iter().zip(x.row(j)) {
            let d = b * inv_sqrt[j] - a * inv_sqrt[i];
            dirichlet += d * d;
        }
    }
    Ok(cfg.alpha * fidelity + cfg.beta * f_sq * dirichlet)
}

/// SGC propagation: A_hat^steps X0 by repeated sparse multiplication.
pub fn reduce_sgc(x_0: &DenseMatrix, op: &NormalizedOperator, steps: usize) -> Result<DenseMatrix> {
    check_op_rows(op, x_0, "reduce_sgc")?;
    let mut x = x_0.clone();
    for _ in 0..steps {
        x = op.a_hat().mul_dense(&x);
    }
    Ok(x)
}

/// APPNP / personalized-PageRank fixed point: solves (I - (1 - eta) A_hat) Y = eta X0.
pub fn reduce_appnp_fixed_point(
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    eta: f64,
) -> Result<DenseMatrix> {
    check_op_rows(op, x_0, "reduce_appnp_fixed_point")?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "appnp eta must lie in (0, 1]; got {eta}"
        )));
    }
    let n = op.n();
    let w = 1.0 - eta;
    let mut rhs = x_0.clone();
    rhs.scale(eta);
    let a = op.a_hat();
    let apply = |x: &[f64], y: &mut [f64]| {
        a.mul_vec(x, y);
        for i in 0..n {
            y[i] = x[i] - w * y[i];
        }
    };
    let to_dense = || {
        let mut m = a.to_dense();
        m.scale(-w);
        for i in 0..n {
            m.set(i, i, m.get(i, i) + 1.0);
        }
        m
    };
    solver::solve_spd(apply, &rhs, to_dense)
}

/// GAT propagation step: X' = F X for a row-stochastic attention matrix.
pub fn reduce_gat_step(x_t: &DenseMatrix, attention: &DenseMatrix) -> Result<DenseMatrix> {
    validate_attention(attention, x_t.rows())?;
    Ok(attention.matmul(x_t))
}

/// The generic framework step with per-edge diffusivity f_ij = attention:
/// x' = x + sum_j F_ij (x_j - x_i). Coincides with `reduce_gat_step` when
/// rows of F sum to one.
pub fn framework_gat_step(x_t: &DenseMatrix, attention: &DenseMatrix) -> Result<DenseMatrix> {
    validate_attention(attention, x_t.rows())?;
    let mut out = attention.matmul(x_t);
    for i in 0..x_t.rows() {
        let rowsum: f64 = attention.row(i).iter().sum();
        let x_row = x_t.row(i);
        for (o, &xv) in out.row_mut(i).iter_mut().zip(x_row) {
            *o += (1.0 - rowsum) * xv;
        }
    }
    Ok(out)
}

fn amp_beta(y_row: &[f64], x0_row: &[f64], eps: f64, lambda: f64) -> f64 {
    let mut norm_sq = 0.0;
    for (a, b) in y_row.iter().zip(x0_row) {
        norm_sq += (a - b) * (a - b);
    }
    let norm = norm_sq.sqrt();
    if norm == 0.0 {
        // residual is zero: the clamp takes the max with 0
        return 0.0;
    }
    (1.0 - eps * lambda / norm).max(0.0)
}

fn amp_step_unchecked(
    x_t: &DenseMatrix,
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    eps: f64,
    lambda: f64,
) -> DenseMatrix {
    let w = 2.0 * eps * (1.0 - lambda);
    let ax = op.a_hat().mul_dense(x_t);
    let mut y = x_t.clone();
    y.scale(1.0 - w);
    y.add_scaled(w, &ax);
    let mut out = DenseMatrix::zeros(x_t.rows(), x_t.cols());
    for i in 0..x_t.rows() {
        let beta_i = amp_beta(y.row(i), x_0.row(i), eps, lambda);
        let (y_row, x0_row) = (y.row(i), x_0.row(i));
        for (k, o) in out.row_mut(i).iter_mut().enumerate() {
            *o = (1.0 - beta_i) * x0_row[k] + beta_i * y_row[k];
        }
    }
    out
}

/// One AMP step: Y = (1 - 2 eps (1 - lambda)) X + 2 eps (1 - lambda) A_hat X,
/// per-node beta_i = max(1 - eps lambda / |Y_i - x0_i|, 0),
/// x_i' = (1 - beta_i) x0_i + beta_i Y_i.
pub fn reduce_amp_step(
    x_t: &DenseMatrix,
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    eps: f64,
    lambda: f64,
) -> Result<DenseMatrix> {
    x_t.shape_check(x_0, "reduce_amp_step")?;
    check_op_rows(op, x_t, "reduce_amp_step")?;
    let open = |v: f64| v > 0.0 && v < 1.0;
    if !(open(eps) && open(lambda)) {
        return Err(Error::InvalidConfig(format!(
            "amp eps and lambda must lie in (0, 1); got ({eps}, {lambda})"
        )));
    }
    Ok(amp_step_unchecked(x_t, x_0, op, eps, lambda))
}

/// The framework step evaluated with the per-node AMP assignment
/// alpha_i = 1 - beta_i, beta'_i = 2 eps (1 - lambda) beta_i, dt = 1, gamma = 0:
/// x_i' = alpha_i x0_i + (1 - alpha_i - beta'_i) x_i + beta'_i (A_hat X)_i.
pub fn framework_amp_step(
    x_t: &DenseMatrix,
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    eps: f64,
    lambda: f64,
) -> Result<DenseMatrix> {
    x_t.shape_check(x_0, "framework_amp_step")?;
    check_op_rows(op, x_t, "framework_amp_step")?;
    let w = 2.0 * eps * (1.0 - lambda);
    let ax = op.a_hat().mul_dense(x_t);
    let mut y = x_t.clone();
    y.scale(1.0 - w);
    y.add_scaled(w, &ax);
    let mut out = DenseMatrix::zeros(x_t.rows(), x_t.cols());
    for i in 0..x_t.rows() {
        let beta_i = amp_beta(y.row(i), x_0.row(i), eps, lambda);
        let alpha_i = 1.0 - beta_i;
        let beta_eff = w * beta_i;
        let (x_row, x0_row, ax_row) = (x_t.row(i), x_0.row(i), ax.row(i));
        for (k, o) in out.row_mut(i).iter_mut().enumerate() {
            *o = alpha_i * x0_row[k] + (1.0 - alpha_i - beta_eff) * x_row[k] + beta_eff * ax_row[k];
        }
    }
    Ok(out)
}

/// DAGNN combination, Horner-style: sum_k s_k A_hat^k X0.
pub fn reduce_dagnn_combine(
    x_0: &DenseMatrix,
    op: &NormalizedOperator,
    weights: &[f64],
) -> Result<DenseMatrix> {
    check_op_rows(op, x_0, "reduce_dagnn_combine")?;
    validate_combine_weights(weights)?;
    let k_max = weights.len() - 1;
    let mut acc = x_0.clone();
    acc.scale(weights[k_max]);
    for k in (0..k_max).rev() {
        acc = op.a_hat().mul_dense(&acc);
        acc.add_scaled(weights[k], x_0);
    }
    Ok(acc)
}

/// Coefficients (rho0, rho1, rho2) of I, A_hat, A_hat^2 applied to X^(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientTriple {
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientRatios {
    /// One high-order step: (1 - (a+b) dt, b (1-g) dt, b g dt).
    pub hid_single_step: CoefficientTriple,
    /// Two first-order steps (gamma = 0):
    /// ((1 - (a+b) dt)^2, 2 b dt (1 - (a+b) dt), (b dt)^2).
    pub first_order_two_step: CoefficientTriple,
}

/// How one high-order step and two first-order steps weight the node itself,
/// its 1-hop, and its 2-hop neighborhood. With alpha + beta = 1 the two-step
/// ratio rho1 : rho2 reduces to 2 (1 - dt) : beta dt, while the high-order
/// step keeps the freely tunable ratio (1 - gamma) : gamma.
pub fn coefficient_ratios(cfg: &DiffusionConfig) -> CoefficientRatios {
    let (_, c0, c1, c2) = cfg.step_coefficients();
    let s = 1.0 - (cfg.alpha + cfg.beta) * cfg.dt;
    let bdt = cfg.beta * cfg.dt;
    CoefficientRatios {
        hid_single_step: CoefficientTriple {
            rho0: c0,
            rho1: c1,
            rho2: c2,
        },
        first_order_two_step: CoefficientTriple {
            rho0: s * s,
            rho1: 2.0 * bdt * s,
            rho2: bdt * bdt,
        },
    }
}
