//! Deterministic proposition checks behind `hidnet verify` and the
//! acceptance suite: kernel equivalence, convergence to the closed form,
//! non-collapse, the five reductions, and the Monte Carlo walk comparison.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::diffusion::{
    build_kernel, dmp_step, el_fixed_point, framework_amp_step, framework_gat_step, propagate,
    reduce_amp_step, reduce_appnp_fixed_point, reduce_dagnn_combine, reduce_gat_step, reduce_sgc,
    steady_state, DiffusionConfig, Mode,
};
use crate::error::Result;
use crate::graph::{build_graph, normalize, Graph};
use crate::matrix::DenseMatrix;
use crate::walk::monte_carlo_estimate;

pub const KERNEL_EQUIVALENCE_TOL: f64 = 1e-10;
pub const CONVERGENCE_TOL: f64 = 1e-8;
pub const CONVERGENCE_STEPS: usize = 10_000;
pub const NON_COLLAPSE_MIN_DISTANCE: f64 = 1e-6;
pub const COLLAPSE_SPREAD_RATIO: f64 = 1e-3;
pub const NON_COLLAPSE_STEPS: usize = 1000;
pub const REDUCTION_TOL: f64 = 1e-12;
pub const APPNP_FIXED_POINT_TOL: f64 = 1e-10;
pub const WALK_ENTRY_TOL: f64 = 5e-3;

/// One named check with its worst measured deviation and pinned threshold.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub worst: f64,
    pub threshold: f64,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, worst: f64, threshold: f64, detail: String) -> Self {
        CheckOutcome {
            name: name.into(),
            worst,
            threshold,
            pass: worst < threshold,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {}: worst {:.3e} vs threshold {:.1e} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.threshold,
            self.detail
        )
    }
}

fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    build_graph(&edges, n).unwrap()
}

fn random_features(n: usize, q: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * q).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    DenseMatrix::from_vec(n, q, data).unwrap()
}

fn cycle_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build_graph(&edges, n).unwrap()
}

/// Coefficient fixtures inside (0, 1]^4 with (alpha + beta) dt <= 1, the
/// stochastic regime where the per-step operator is a contraction.
fn coefficient_fixtures() -> Vec<(f64, f64, f64, f64)> {
    vec![
        (0.1, 0.9, 0.3, 0.8),
        (0.05, 0.95, 0.1, 1.0),
        (0.2, 0.8, 0.5, 0.9),
        (0.3, 0.7, 0.05, 1.0),
        (0.5, 0.5, 0.9, 0.6),
        (0.08, 0.92, 0.3, 1.0),
        (0.1, 0.6, 0.2, 0.7),
        (0.4, 0.4, 0.6, 1.0),
        (0.15, 0.85, 0.25, 0.4),
        (0.99, 0.01, 0.5, 1.0),
    ]
}

/// Max deviation between iterated propagation and the dense kernel product
/// over `graphs` random fixtures.
pub fn kernel_equivalence_check(graphs: usize, max_n: usize, max_steps: usize) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g_idx in 0..graphs {
        let n = rng.gen_range(5..=max_n);
        let p = rng.gen_range(0.08..0.4);
        let steps = rng.gen_range(0..=max_steps);
        let g = random_graph(n, p, 500 + g_idx as u64);
        let op = normalize(&g);
        let coeffs = coefficient_fixtures();
        let (a, b, gm, dt) = coeffs[g_idx % coeffs.len()];
        let cfg = DiffusionConfig::hid(a, b, gm, dt, steps);
        let x0 = random_features(n, 3, 900 + g_idx as u64);
        let kernel = build_kernel(&op, &cfg)?;
        let dev = kernel.apply(&x0).max_abs_diff(&propagate(&x0, &op, &cfg)?);
        worst = worst.max(dev);
    }
    Ok(CheckOutcome::new(
        "kernel equivalence",
        worst,
        KERNEL_EQUIVALENCE_TOL,
        format!("{graphs} random graphs, n <= {max_n}, steps <= {max_steps}"),
    ))
}

/// Max inf-norm gap between 10^4-step propagation and the closed-form steady
/// state over the coefficient fixtures.
pub fn convergence_check(fixtures: usize) -> Result<CheckOutcome> {
    let coeffs = coefficient_fixtures();
    let mut worst: f64 = 0.0;
    for (i, &(a, b, g, dt)) in coeffs.iter().take(fixtures).enumerate() {
        let graph = random_graph(10 + 2 * i, 0.3, 300 + i as u64);
        let op = normalize(&graph);
        let x0 = random_features(graph.n(), 2, 400 + i as u64);
        let cfg = DiffusionConfig::hid(a, b, g, dt, CONVERGENCE_STEPS);
        let long = propagate(&x0, &op, &cfg)?;
        let fixed = steady_state(&x0, &op, &cfg)?;
        worst = worst.max(long.max_abs_diff(&fixed));
    }
    Ok(CheckOutcome::new(
        "convergence",
        worst,
        CONVERGENCE_TOL,
        format!("{fixtures} fixtures, {CONVERGENCE_STEPS} steps vs closed form"),
    ))
}

/// Two-sided non-collapse check. Returns (hid_outcome, sgc_outcome): the
/// high-order anchored iteration keeps distinct rows apart, while the pure
/// first-order power iteration collapses them on a connected non-bipartite
/// regular fixture.
pub fn non_collapse_check() -> Result<(CheckOutcome, CheckOutcome)> {
    // distinct initial rows on a connected fixture
    let g = random_graph(16, 0.3, 77);
    let op = normalize(&g);
    let x0 = random_features(16, 3, 78);
    let cfg = DiffusionConfig::hid(0.1, 0.9, 0.3, 0.8, NON_COLLAPSE_STEPS);
    let hid = propagate(&x0, &op, &cfg)?;
    let hid_min = hid.min_pairwise_row_distance();
    // report as "worst" the negated margin so pass means distance above floor
    let hid_outcome = CheckOutcome {
        name: "non-collapse (hid)".into(),
        worst: hid_min,
        threshold: NON_COLLAPSE_MIN_DISTANCE,
        pass: hid_min > NON_COLLAPSE_MIN_DISTANCE,
        detail: format!(
            "min pairwise row distance after {NON_COLLAPSE_STEPS} steps (must stay above threshold)"
        ),
    };

    // connected, non-bipartite, regular: odd cycle
    let c7 = cycle_graph(7);
    let op7 = normalize(&c7);
    let y0 = random_features(7, 3, 79);
    let spread = y0.max_pairwise_row_distance();
    let sgc = propagate(&y0, &op7, &DiffusionConfig::sgc(NON_COLLAPSE_STEPS))?;
    let ratio = sgc.min_pairwise_row_distance() / spread;
    let sgc_outcome = CheckOutcome::new(
        "collapse (sgc contrast)",
        ratio,
        COLLAPSE_SPREAD_RATIO,
        format!("min pairwise distance over initial spread after {NON_COLLAPSE_STEPS} steps"),
    );
    Ok((hid_outcome, sgc_outcome))
}

/// Per-step / fixed-point agreement of every reduction with its framework
/// instantiation on `fixtures` random graphs each.
pub fn reduction_checks(fixtures: usize) -> Result<Vec<CheckOutcome>> {
    let mut sgc_worst: f64 = 0.0;
    let mut gat_worst: f64 = 0.0;
    let mut amp_worst: f64 = 0.0;
    let mut appnp_worst: f64 = 0.0;
    let mut dagnn_worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..fixtures {
        let n = rng.gen_range(6..20);
        let g = random_graph(n, 0.35, 1000 + i as u64);
        let op = normalize(&g);
        let x = random_features(n, 3, 2000 + i as u64);
        let x0 = random_features(n, 3, 3000 + i as u64);

        // SGC: generic step with alpha=0, beta=1, dt=1, gamma=0
        let cfg = DiffusionConfig {
            alpha: 0.0,
            beta: 1.0,
            gamma: 0.0,
            dt: 1.0,
            steps: 1,
            mode: Mode::Hid,
        };
        let generic = dmp_step(&x, &x, &op, &cfg)?;
        let reduced = reduce_sgc(&x, &op, 1)?;
        sgc_worst = sgc_worst.max(generic.max_abs_diff(&reduced));

        // GAT: random row-stochastic attention on the closed neighborhood
        let mut f = DenseMatrix::zeros(n, n);
        for r in 0..n {
            let mut nbrs: Vec<usize> = g.neighbors(r).collect();
            nbrs.push(r);
            let ws: Vec<f64> = nbrs.iter().map(|_| rng.gen::<f64>() + 0.05).collect();
            let total: f64 = ws.iter().sum();
            for (&j, w) in nbrs.iter().zip(ws) {
                f.set(r, j, w / total);
            }
        }
        gat_worst = gat_worst.max(
            reduce_gat_step(&x, &f)?.max_abs_diff(&framework_gat_step(&x, &f)?),
        );

        // AMP: per-node assignment
        amp_worst = amp_worst.max(
            reduce_amp_step(&x, &x0, &op, 0.2, 0.4)?
                .max_abs_diff(&framework_amp_step(&x, &x0, &op, 0.2, 0.4)?),
        );

        // APPNP: direct solve vs Euler-Lagrange fixed point
        let eta = 0.05 + 0.9 * rng.gen::<f64>();
        let direct = reduce_appnp_fixed_point(&x0, &op, eta)?;
        let el = el_fixed_point(&x0, &op, 1.0, 1.0 - 1.0 / eta, 0.0)?;
        appnp_worst = appnp_worst.max(direct.max_abs_diff(&el));

        // DAGNN: Horner combine vs dense powers
        let raw: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() + 0.1).collect();
        let total: f64 = raw.iter().sum();
        let s: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let combined = reduce_dagnn_combine(&x0, &op, &s)?;
        let ad = op.a_hat().to_dense();
        let mut power = DenseMatrix::identity(n);
        let mut oracle = DenseMatrix::zeros(n, 3);
        for &w in &s {
            oracle.add_scaled(w, &power.matmul(&x0));
            power = ad.matmul(&power);
        }
        dagnn_worst = dagnn_worst.max(combined.max_abs_diff(&oracle));
    }
    let detail = format!("{fixtures} random fixtures");
    Ok(vec![
        CheckOutcome::new("reduction sgc", sgc_worst, REDUCTION_TOL, detail.clone()),
        CheckOutcome::new("reduction gat", gat_worst, REDUCTION_TOL, detail.clone()),
        CheckOutcome::new("reduction amp", amp_worst, REDUCTION_TOL, detail.clone()),
        CheckOutcome::new(
            "reduction appnp",
            appnp_worst,
            APPNP_FIXED_POINT_TOL,
            detail.clone(),
        ),
        CheckOutcome::new("reduction dagnn", dagnn_worst, REDUCTION_TOL, detail),
    ])
}

/// Per-node rows of the walk comparison: (node, empirical frequency, kernel probability).
pub type WalkComparisonRow = (usize, f64, f64);

/// Walk comparison on a 2-regular cycle: empirical visit frequencies of
/// `trials` walkers against the kernel column, per-entry.
pub fn walk_monte_carlo_check(
    cycle_len: usize,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<(CheckOutcome, Vec<WalkComparisonRow>)> {
    let g = cycle_graph(cycle_len);
    let op = normalize(&g);
    let cfg = DiffusionConfig::hid(0.1, 0.9, 0.3, 0.8, steps);
    let root = 0;
    let freq = monte_carlo_estimate(&g, &cfg, root, steps, trials, seed)?;
    let kernel = build_kernel(&op, &cfg)?;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::with_capacity(cycle_len);
    for i in 0..cycle_len {
        let p = kernel.h.get(i, root);
        worst = worst.max((freq[i] - p).abs());
        rows.push((i, freq[i], p));
    }
    Ok((
        CheckOutcome::new(
            "walk monte carlo",
            worst,
            WALK_ENTRY_TOL,
            format!("{cycle_len}-cycle, {trials} walkers, {steps} steps"),
        ),
        rows,
    ))
}
