//! Evaluation metrics: accuracy, F1 macro/micro, and one-vs-rest ROC AUC
//! (macro-averaged, trapezoidal rule).

use crate::classifier::softmax;
use crate::dataset::LabeledSplit;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub f1_macro: f64,
    pub f1_micro: f64,
    pub auc: f64,
}

/// Argmax with the lowest class index winning ties.
pub fn predict(logits: &DenseMatrix) -> Vec<usize> {
    (0..logits.rows())
        .map(|i| {
            let row = logits.row(i);
            let mut best = 0;
            for (k, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Metrics over the test mask. Classes with no true test instances are
/// skipped in the macro averages; AUC additionally skips classes without both
/// a positive and a negative test example.
pub fn evaluate(logits: &DenseMatrix, split: &LabeledSplit) -> Result<Metrics> {
    if logits.rows() != split.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", split.n()),
            got: format!("{}", logits.rows()),
            context: "evaluate",
        });
    }
    if !logits.is_finite() {
        return Err(Error::NonFinite("evaluate logits"));
    }
    evaluate_on_mask(logits, split, &split.test)
}

pub fn evaluate_on_mask(
    logits: &DenseMatrix,
    split: &LabeledSplit,
    mask: &[bool],
) -> Result<Metrics> {
    let classes = split.labels.num_classes();
    let preds = predict(logits);
    let nodes: Vec<usize> = (0..split.n()).filter(|&i| mask[i]).collect();
    if nodes.is_empty() {
        return Err(Error::InvalidConfig("evaluation mask is empty".into()));
    }

    let mut correct = 0usize;
    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fn_ = vec![0usize; classes];
    let mut support = vec![0usize; classes];
    for &i in &nodes {
        let truth = split.labels.get(i);
        let pred = preds[i];
        support[truth] += 1;
        if pred == truth {
            correct += 1;
            tp[truth] += 1;
        } else {
            fp[pred] += 1;
            fn_[truth] += 1;
        }
    }
    let accuracy = correct as f64 / nodes.len() as f64;

    let mut f1_sum = 0.0;
    let mut f1_count = 0usize;
    for c in 0..classes {
        if support[c] == 0 {
            continue;
        }
        let denom = 2 * tp[c] + fp[c] + fn_[c];
        let f1 = if denom == 0 {
            0.0
        } else {
            2.0 * tp[c] as f64 / denom as f64
        };
        f1_sum += f1;
        f1_count += 1;
    }
    let f1_macro = if f1_count == 0 { 0.0 } else { f1_sum / f1_count as f64 };

    let total_tp: usize = tp.iter().sum();
    let total_fp: usize = fp.iter().sum();
    let total_fn: usize = fn_.iter().sum();
    let micro_denom = 2 * total_tp + total_fp + total_fn;
    let f1_micro = if micro_denom == 0 {
        0.0
    } else {
        2.0 * total_tp as f64 / micro_denom as f64
    };

    let probs = softmax(logits);
    let mut auc_sum = 0.0;
    let mut auc_count = 0usize;
    for c in 0..classes {
        let pos = support[c];
        let neg = nodes.len() - pos;
        if pos == 0 || neg == 0 {
            continue;
        }
        auc_sum += one_vs_rest_auc(&probs, &nodes, split, c);
        auc_count += 1;
    }
    let auc = if auc_count == 0 {
        0.0
    } else {
        auc_sum / auc_count as f64
    };

    Ok(Metrics {
        accuracy,
        f1_macro,
        f1_micro,
        auc,
    })
}

/// Trapezoidal ROC area with tie groups handled as diagonal segments.
fn one_vs_rest_auc(probs: &DenseMatrix, nodes: &[usize], split: &LabeledSplit, class: usize) -> f64 {
    let mut scored: Vec<(f64, bool)> = nodes
        .iter()
        .map(|&i| (probs.get(i, class), split.labels.get(i) == class))
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let total_pos = scored.iter().filter(|&&(_, p)| p).count() as f64;
    let total_neg = scored.len() as f64 - total_pos;
    let mut area = 0.0;
    let mut tp = 0.0;
    let mut i = 0;
    while i < scored.len() {
        let mut j = i;
        let mut dtp = 0.0;
        let mut dfp = 0.0;
        while j < scored.len() && scored[j].0 == scored[i].0 {
            if scored[j].1 {
                dtp += 1.0;
            } else {
                dfp += 1.0;
            }
            j += 1;
        }
        area += dfp * (tp + dtp / 2.0);
        tp += dtp;
        i = j;
    }
    area / (total_pos * total_neg)
}
