//! Decoupled classifier: a two-layer MLP feature transform followed by
//! parameter-free propagation, trained with masked softmax cross-entropy.
//!
//! Propagation is linear in the MLP output and its per-step operator is
//! symmetric, so the loss gradient at the MLP output is obtained by running
//! the same propagation on the logit gradient (the kernel is self-adjoint);
//! the dense kernel is never materialized.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::dataset::LabeledSplit;
use crate::diffusion::{propagate, DiffusionConfig, Mode};
use crate::error::{Error, Result};
use crate::graph::NormalizedOperator;
use crate::matrix::DenseMatrix;

/// Two-layer perceptron parameters with the dropout rate used in training.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
    pub dropout_rate: f64,
}

/// Gradients with the same shapes as `MlpParams`.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
}

impl MlpParams {
    /// Uniform init in +-sqrt(6 / (fan_in + fan_out)), zero biases, seeded.
    pub fn init(
        in_dim: usize,
        hidden_dim: usize,
        out_dim: usize,
        dropout_rate: f64,
        seed: u64,
    ) -> Result<Self> {
        if hidden_dim == 0 {
            return Err(Error::InvalidConfig("hidden_dim must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(Error::InvalidConfig(format!(
                "dropout_rate must lie in [0, 1), got {dropout_rate}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut uniform = |rows: usize, cols: usize| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            let data: Vec<f64> = (0..rows * cols)
                .map(|_| rng.gen::<f64>() * 2.0 * limit - limit)
                .collect();
            DenseMatrix::from_vec(rows, cols, data).unwrap()
        };
        Ok(MlpParams {
            w1: uniform(in_dim, hidden_dim),
            b1: vec![0.0; hidden_dim],
            w2: uniform(hidden_dim, out_dim),
            b2: vec![0.0; out_dim],
            dropout_rate,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.w1.rows()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.w2.cols()
    }

    /// Plain text checkpoint: free-form `#` header lines (the producing
    /// config), then each tensor as `name rows cols` followed by its rows.
    pub fn save(&self, path: &Path, header: &str) -> Result<()> {
        let show = path.display().to_string();
        let mut f = std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Error::io(&show, e))?,
        );
        for line in header.lines() {
            writeln!(f, "# {line}").map_err(|e| Error::io(&show, e))?;
        }
        writeln!(f, "dropout_rate {}", self.dropout_rate).map_err(|e| Error::io(&show, e))?;
        let mut tensor = |name: &str, rows: usize, cols: usize, data: &[f64]| -> Result<()> {
            writeln!(f, "{name} {rows} {cols}").map_err(|e| Error::io(&show, e))?;
            for r in 0..rows {
                let line = data[r * cols..(r + 1) * cols]
                    .iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(f, "{line}").map_err(|e| Error::io(&show, e))?;
            }
            Ok(())
        };
        tensor("w1", self.w1.rows(), self.w1.cols(), self.w1.data())?;
        tensor("b1", 1, self.b1.len(), &self.b1)?;
        tensor("w2", self.w2.rows(), self.w2.cols(), self.w2.data())?;
        tensor("b2", 1, self.b2.len(), &self.b2)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let show = path.display().to_string();
        let file = std::fs::File::open(path).map_err(|e| Error::io(&show, e))?;
        let mut lines = BufReader::new(file)
            .lines()
            .collect::<std::io::Result<Vec<_>>>()
            .map_err(|e| Error::io(&show, e))?
            .into_iter()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let dropout_line = lines
            .next()
            .ok_or_else(|| Error::parse(&show, "missing dropout_rate"))?;
        let dropout_rate: f64 = dropout_line
            .strip_prefix("dropout_rate ")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::parse(&show, "bad dropout_rate line"))?;
        let mut read_tensor = |expect: &str| -> Result<DenseMatrix> {
            let head = lines
                .next()
                .ok_or_else(|| Error::parse(&show, format!("missing tensor {expect}")))?;
            let mut it = head.split_whitespace();
            let name = it.next().unwrap_or("");
            if name != expect {
                return Err(Error::parse(
                    &show,
                    format!("expected tensor {expect}, found {name}"),
                ));
            }
            let rows: usize = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(&show, "bad tensor header"))?;
            let cols: usize = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(&show, "bad tensor header"))?;
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::parse(&show, "truncated tensor"))?;
                for tok in line.split_whitespace() {
                    data.push(
                        tok.parse()
                            .map_err(|_| Error::parse(&show, format!("bad value `{tok}`")))?,
                    );
                }
            }
            DenseMatrix::from_vec(rows, cols, data)
        };
        let w1 = read_tensor("w1")?;
        let b1 = read_tensor("b1")?.data().to_vec();
        let w2 = read_tensor("w2")?;
        let b2 = read_tensor("b2")?.data().to_vec();
        Ok(MlpParams {
            w1,
            b1,
            w2,
            b2,
            dropout_rate,
        })
    }
}

/// Training modes require a symmetric linear propagation kernel so the
/// adjoint can be applied by forward iteration.
fn check_trainable_mode(cfg: &DiffusionConfig) -> Result<()> {
    match cfg.mode {
        Mode::Hid | Mode::Sgc | Mode::Appnp { .. } => Ok(()),
        _ => Err(Error::InvalidConfig(format!(
            "training supports hid/sgc/appnp propagation, got {}",
            cfg.mode.name()
        ))),
    }
}

struct ForwardCache {
    x_dropped: DenseMatrix,
    pre1: DenseMatrix,
    h1_dropped: DenseMatrix,
    hidden_mask: Option<Vec<f64>>,
    logits: DenseMatrix,
}

fn dropout_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn apply_dropout(x: &DenseMatrix, rate: f64, rng: &mut ChaCha8Rng) -> (DenseMatrix, Vec<f64>) {
    let keep = 1.0 - rate;
    let scale = 1.0 / keep;
    let mut out = x.clone();
    let mut mask = vec![0.0; x.rows() * x.cols()];
    for (m, v) in mask.iter_mut().zip(out.data_mut()) {
        if rng.gen::<f64>() < keep {
            *m = scale;
            *v *= scale;
        } else {
            *v = 0.0;
        }
    }
    (out, mask)
}

fn forward_cache(
    x: &DenseMatrix,
    params: &MlpParams,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
    training: bool,
    seed: u64,
) -> Result<ForwardCache> {
    if x.cols() != params.in_dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} feature columns", params.in_dim()),
            got: format!("{}", x.cols()),
            context: "forward",
        });
    }
    let dropout = training && params.dropout_rate > 0.0;
    let mut rng = dropout_rng(seed);
    let (x_dropped, _) = if dropout {
        apply_dropout(x, params.dropout_rate, &mut rng)
    } else {
        (x.clone(), Vec::new())
    };
    let mut pre1 = x_dropped.matmul(&params.w1);
    for i in 0..pre1.rows() {
        let row = pre1.row_mut(i);
        for (v, b) in row.iter_mut().zip(&params.b1) {
            *v += b;
        }
    }
    let mut h1 = pre1.clone();
    for v in h1.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let (h1_dropped, hidden_mask) = if dropout {
        let (h, m) = apply_dropout(&h1, params.dropout_rate, &mut rng);
        (h, Some(m))
    } else {
        (h1, None)
    };
    let mut z = h1_dropped.matmul(&params.w2);
    for i in 0..z.rows() {
        let row = z.row_mut(i);
        for (v, b) in row.iter_mut().zip(&params.b2) {
            *v += b;
        }
    }
    let logits = propagate(&z, op, cfg)?;
    Ok(ForwardCache {
        x_dropped,
        pre1,
        h1_dropped,
        hidden_mask,
        logits,
    })
}

/// Logits of the propagated MLP. Dropout is active only when `training`.
pub fn forward(
    x: &DenseMatrix,
    params: &MlpParams,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
    training: bool,
    seed: u64,
) -> Result<DenseMatrix> {
    Ok(forward_cache(x, params, op, cfg, training, seed)?.logits)
}

/// Row-wise softmax.
pub fn softmax(logits: &DenseMatrix) -> DenseMatrix {
    let mut out = logits.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    out
}

/// Mean cross-entropy over masked rows.
pub fn masked_cross_entropy(logits: &DenseMatrix, split: &LabeledSplit, mask: &[bool]) -> f64 {
    let mut loss = 0.0;
    let mut count = 0usize;
    for i in 0..logits.rows() {
        if !mask[i] {
            continue;
        }
        let row = logits.row(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
        loss += log_sum - row[split.labels.get(i)];
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        loss / count as f64
    }
}

/// Loss and exact parameter gradients of the masked cross-entropy. The
/// gradient at the MLP output is the propagated logit gradient (self-adjoint
/// kernel). With `training` false the path is deterministic and matches
/// `forward(..., false, _)`, which is what the finite-difference checks probe.
pub fn backward(
    x: &DenseMatrix,
    params: &MlpParams,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
    split: &LabeledSplit,
    training: bool,
    seed: u64,
) -> Result<(f64, MlpGrads)> {
    check_trainable_mode(cfg)?;
    if split.n() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", split.n()),
            got: format!("{}", x.rows()),
            context: "backward",
        });
    }
    let cache = forward_cache(x, params, op, cfg, training, seed)?;
    let loss = masked_cross_entropy(&cache.logits, split, &split.train);
    if !loss.is_finite() {
        return Err(Error::NonFinite("training loss"));
    }
    let train_count = LabeledSplit::count(&split.train).max(1);

    let probs = softmax(&cache.logits);
    let mut g_logits = DenseMatrix::zeros(probs.rows(), probs.cols());
    for i in 0..probs.rows() {
        if !split.train[i] {
            continue;
        }
        let p_row = probs.row(i);
        let g_row = g_logits.row_mut(i);
        for (g, &p) in g_row.iter_mut().zip(p_row) {
            *g = p / train_count as f64;
        }
        g_row[split.labels.get(i)] -= 1.0 / train_count as f64;
    }

    // H^T g via the same forward recursion (C is symmetric)
    let g_z = propagate(&g_logits, op, cfg)?;

    let w2_grad = cache.h1_dropped.matmul_tn(&g_z);
    let mut b2_grad = vec![0.0; params.out_dim()];
    for i in 0..g_z.rows() {
        for (b, &v) in b2_grad.iter_mut().zip(g_z.row(i)) {
            *b += v;
        }
    }

    let mut g_h1 = g_z.matmul_nt(&params.w2);
    if let Some(mask) = &cache.hidden_mask {
        for (g, &m) in g_h1.data_mut().iter_mut().zip(mask) {
            *g *= m;
        }
    }
    for (g, &pre) in g_h1.data_mut().iter_mut().zip(cache.pre1.data()) {
        if pre <= 0.0 {
            *g = 0.0;
        }
    }

    let w1_grad = cache.x_dropped.matmul_tn(&g_h1);
    let mut b1_grad = vec![0.0; params.hidden_dim()];
    for i in 0..g_h1.rows() {
        for (b, &v) in b1_grad.iter_mut().zip(g_h1.row(i)) {
            *b += v;
        }
    }

    Ok((
        loss,
        MlpGrads {
            w1: w1_grad,
            b1: b1_grad,
            w2: w2_grad,
            b2: b2_grad,
        },
    ))
}

/// Central finite-difference check of `backward` on the deterministic path.
/// Probes every parameter with step `eps` and returns the worst relative
/// error against the analytic gradient. Verification utility; the relative
/// denominator is floored at 1e-3 so near-zero gradients are compared on the
/// loss scale.
pub fn finite_difference_worst_rel_error(
    x: &DenseMatrix,
    params: &mut MlpParams,
    op: &NormalizedOperator,
    cfg: &DiffusionConfig,
    split: &LabeledSplit,
    grads: &MlpGrads,
    eps: f64,
) -> f64 {
    let eval = |params: &MlpParams| {
        let logits = forward(x, params, op, cfg, false, 0).unwrap();
        masked_cross_entropy(&logits, split, &split.train)
    };
    let mut worst: f64 = 0.0;
    let mut probe = |params: &mut MlpParams,
                     analytic: f64,
                     bump: &mut dyn FnMut(&mut MlpParams, f64)| {
        bump(params, eps);
        let plus = eval(params);
        bump(params, -2.0 * eps);
        let minus = eval(params);
        bump(params, eps);
        let fd = (plus - minus) / (2.0 * eps);
        let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-3);
        worst = worst.max(rel);
    };
    let (w1r, w1c) = (params.w1.rows(), params.w1.cols());
    for r in 0..w1r {
        for c in 0..w1c {
            probe(params, grads.w1.get(r, c), &mut |p, d| {
                let v = p.w1.get(r, c);
                p.w1.set(r, c, v + d)
            });
        }
    }
    for k in 0..grads.b1.len() {
        probe(params, grads.b1[k], &mut |p, d| p.b1[k] += d);
    }
    let (w2r, w2c) = (params.w2.rows(), params.w2.cols());
    for r in 0..w2r {
        for c in 0..w2c {
            probe(params, grads.w2.get(r, c), &mut |p, d| {
                let v = p.w2.get(r, c);
                p.w2.set(r, c, v + d)
            });
        }
    }
    for k in 0..grads.b2.len() {
        probe(params, grads.b2[k], &mut |p, d| p.b2[k] += d);
    }
    worst
}
