//! Mean/variance aggregation over experiment repeats. Values are sorted
//! before accumulation so results do not depend on completion order.

/// Welford one-pass mean and population standard deviation.
pub fn one_pass_mean_std(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    if sorted.is_empty() {
        (0.0, 0.0)
    } else {
        (mean, (m2 / sorted.len() as f64).sqrt())
    }
}

/// Two-pass reference implementation (cross-check oracle).
pub fn two_pass_mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let var = sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / sorted.len() as f64;
    (mean, var.sqrt())
}
