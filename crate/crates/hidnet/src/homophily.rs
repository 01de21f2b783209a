//! K-hop neighbor label-similarity scores: the fraction of nodes whose label
//! matches the most frequent label among their exact-k-hop neighbors.

use crate::dataset::LabelVector;
use crate::error::{Error, Result};
use crate::graph::{khop_neighbors, Graph};

/// h1, h2 and the combined 1+2-hop score, with the number of nodes that had a
/// nonempty neighborhood for each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityReport {
    pub h1: f64,
    pub h2: f64,
    pub h12: f64,
    pub counted_h1: usize,
    pub counted_h2: usize,
    pub counted_h12: usize,
}

fn check_labels(g: &Graph, labels: &LabelVector) -> Result<()> {
    if labels.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} labels", g.n()),
            got: format!("{}", labels.len()),
            context: "similarity",
        });
    }
    Ok(())
}

/// A node matches when its own label reaches the maximum frequency among the
/// neighbor labels (ties count as a match only if the node's label is tied).
fn label_matches_mode(own: usize, members: &[usize], labels: &LabelVector) -> bool {
    let mut counts = vec![0usize; labels.num_classes()];
    for &j in members {
        counts[labels.get(j)] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    max > 0 && counts[own] == max
}

fn similarity_over<F>(g: &Graph, labels: &LabelVector, neighborhood: F) -> Result<f64>
where
    F: Fn(usize) -> Result<Vec<usize>>,
{
    check_labels(g, labels)?;
    let mut matched = 0usize;
    let mut counted = 0usize;
    for i in 0..g.n() {
        let members = neighborhood(i)?;
        if members.is_empty() {
            continue;
        }
        counted += 1;
        if label_matches_mode(labels.get(i), &members, labels) {
            matched += 1;
        }
    }
    if counted == 0 {
        return Ok(0.0);
    }
    Ok(matched as f64 / counted as f64)
}

/// Fraction of nodes (among those with nonempty N_k) whose label equals the
/// mode of their exact-k-hop neighbors' labels. k must be 1 or 2.
pub fn khop_similarity(g: &Graph, labels: &LabelVector, k: usize) -> Result<f64> {
    if !(k == 1 || k == 2) {
        return Err(Error::InvalidConfig(format!(
            "similarity is defined for k in {{1, 2}}, got {k}"
        )));
    }
    similarity_over(g, labels, |i| Ok(khop_neighbors(g, i, k)?.members))
}

/// Same score with the mode taken over the union N_1(i) + N_2(i).
pub fn combined_similarity(g: &Graph, labels: &LabelVector) -> Result<f64> {
    similarity_over(g, labels, |i| {
        let mut m = khop_neighbors(g, i, 1)?.members;
        m.extend(khop_neighbors(g, i, 2)?.members);
        Ok(m)
    })
}

/// All three scores plus per-score node counts.
pub fn similarity_report(g: &Graph, labels: &LabelVector) -> Result<SimilarityReport> {
    check_labels(g, labels)?;
    let mut counted = [0usize; 3];
    let mut matched = [0usize; 3];
    for i in 0..g.n() {
        let n1 = khop_neighbors(g, i, 1)?.members;
        let n2 = khop_neighbors(g, i, 2)?.members;
        let own = labels.get(i);
        for (slot, members) in [
            (0, n1.clone()),
            (1, n2.clone()),
            (2, n1.iter().chain(n2.iter()).copied().collect::<Vec<_>>()),
        ] {
            if members.is_empty() {
                continue;
            }
            counted[slot] += 1;
            if label_matches_mode(own, &members, labels) {
                matched[slot] += 1;
            }
        }
    }
    let frac = |m: usize, c: usize| if c == 0 { 0.0 } else { m as f64 / c as f64 };
    Ok(SimilarityReport {
        h1: frac(matched[0], counted[0]),
        h2: frac(matched[1], counted[1]),
        h12: frac(matched[2], counted[2]),
        counted_h1: counted[0],
        counted_h2: counted[1],
        counted_h12: counted[2],
    })
}
