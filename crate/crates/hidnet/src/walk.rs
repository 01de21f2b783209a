//! Second-order random walk with restart: the probabilistic face of the
//! high-order diffusion step, plus a Monte Carlo sampler for regular graphs
//! where the transition weights form a proper distribution.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::diffusion::{build_kernel, propagate, DiffusionConfig, Mode};
use crate::error::{Error, Result};
use crate::graph::{normalize, Graph, NormalizedOperator};
use crate::matrix::DenseMatrix;
use crate::sparse::CsrMatrix;

/// Transition weights of the walk: stay with 1 - (alpha + beta) dt, move to a
/// 1-hop neighbor with (beta - beta gamma) dt A_hat, to a 2-hop neighbor with
/// beta gamma dt A_hat^2, or teleport back to the walk's root with alpha dt.
#[derive(Debug, Clone)]
pub struct WalkKernel {
    pub self_prob: f64,
    pub restart_prob: f64,
    pub first_order: CsrMatrix,
    pub second_order: CsrMatrix,
}

impl WalkKernel {
    pub fn new(op: &NormalizedOperator, cfg: &DiffusionConfig) -> Result<Self> {
        let (restart_prob, self_prob, c1, c2) = cfg.step_coefficients();
        if self_prob < 0.0 || restart_prob < 0.0 || c1 < 0.0 || c2 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "walk weights must be nonnegative: self {self_prob}, restart {restart_prob}, \
                 first-order {c1}, second-order {c2}"
            )));
        }
        Ok(WalkKernel {
            self_prob,
            restart_prob,
            first_order: op.a_hat().scaled(c1),
            second_order: op.a_hat_sq().scaled(c2),
        })
    }

    /// Total outgoing mass from node i (column mass, by symmetry of the operators).
    pub fn column_mass(&self, i: usize) -> f64 {
        let first: f64 = self.first_order.row(i).1.iter().sum();
        let second: f64 = self.second_order.row(i).1.iter().sum();
        self.self_prob + self.restart_prob + first + second
    }

    /// Error unless every column mass is 1 within `tol` (regular graphs).
    pub fn validate_proper(&self, tol: f64) -> Result<()> {
        for i in 0..self.first_order.n() {
            let mass = self.column_mass(i);
            if (mass - 1.0).abs() > tol {
                return Err(Error::ImproperDistribution { node: i, mass });
            }
        }
        Ok(())
    }
}

/// One sampled walk. Every transition is a stay, a 1-hop move, a 2-hop move,
/// or a restart to `root`; `restarts` records the steps where teleports fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    pub root: usize,
    pub positions: Vec<usize>,
    pub restarts: Vec<usize>,
    pub rng_seed: u64,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn step_from(kernel: &WalkKernel, at: usize, root: usize, u: f64) -> (usize, bool) {
    if u < kernel.restart_prob {
        return (root, true);
    }
    let mut acc = kernel.restart_prob + kernel.self_prob;
    if u < acc {
        return (at, false);
    }
    let (idx, vals) = kernel.first_order.row(at);
    for (&j, &v) in idx.iter().zip(vals) {
        acc += v;
        if u < acc {
            return (j, false);
        }
    }
    let (idx, vals) = kernel.second_order.row(at);
    for (&j, &v) in idx.iter().zip(vals) {
        acc += v;
        if u < acc {
            return (j, false);
        }
    }
    // residual rounding mass lands on the last support entry
    (*idx.last().unwrap_or(&at), false)
}

/// Sample a single seeded walk of `steps` transitions starting at `root`.
pub fn sample_trace(
    g: &Graph,
    cfg: &DiffusionConfig,
    root: usize,
    steps: usize,
    seed: u64,
    trial: u64,
) -> Result<WalkTrace> {
    if root >= g.n() {
        return Err(Error::NodeIndexOutOfRange {
            index: root,
            n: g.n(),
        });
    }
    let op = normalize(g);
    let kernel = WalkKernel::new(&op, cfg)?;
    kernel.validate_proper(1e-9)?;
    let mut rng = trial_rng(seed, trial);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut restarts = Vec::new();
    let mut at = root;
    positions.push(at);
    for step in 0..steps {
        let (next, restarted) = step_from(&kernel, at, root, rng.gen::<f64>());
        if restarted {
            restarts.push(step);
        }
        at = next;
        positions.push(at);
    }
    Ok(WalkTrace {
        root,
        positions,
        restarts,
        rng_seed: seed,
    })
}

/// Empirical distribution of the walker position after `steps` transitions,
/// over `trials` independent walks from `root`. Requires the kernel to be a
/// proper distribution (d-regular graphs under symmetric normalization).
pub fn monte_carlo_estimate(
    g: &Graph,
    cfg: &DiffusionConfig,
    root: usize,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if root >= g.n() {
        return Err(Error::NodeIndexOutOfRange {
            index: root,
            n: g.n(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let op = normalize(g);
    let kernel = WalkKernel::new(&op, cfg)?;
    kernel.validate_proper(1e-9)?;
    let mut counts = vec![0u64; g.n()];
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let mut at = root;
        for _ in 0..steps {
            let (next, _) = step_from(&kernel, at, root, rng.gen::<f64>());
            at = next;
        }
        counts[at] += 1;
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / trials as f64)
        .collect())
}

/// Deterministic check of the walk/diffusion equivalence: builds the dense
/// kernel H by its recursion and returns max |propagate(x0) - H x0|.
pub fn expectation_equivalence(
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
    x_0: &DenseMatrix,
    steps: usize,
) -> Result<f64> {
    let run = DiffusionConfig {
        steps,
        mode: Mode::Hid,
        ..cfg.clone()
    };
    let kernel = build_kernel(op, &run)?;
    let via_kernel = kernel.apply(x_0);
    let via_iteration = propagate(x_0, op, &run)?;
    Ok(via_kernel.max_abs_diff(&via_iteration))
}
