//! Small numeric helpers shared across the crate.

use rand::Rng;

/// Derive an independent stream seed from a master seed and a tag
/// (splitmix64 finalizer).
pub(crate) fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut z = master ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Neumaier-compensated sum; keeps the acceptance-grade identities tight
/// when tens of thousands of log-gamma terms are accumulated.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Draw an index proportional to non-negative weights.
pub(crate) fn sample_from_weights<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0 && total.is_finite(), "bad weights {weights:?}");
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Draw an index proportional to exp(log-weights); -inf entries get zero
/// mass. Overwrites `log_weights` with the shifted exponentials.
pub(crate) fn sample_from_log_weights<R: Rng + ?Sized>(
    log_weights: &mut [f64],
    rng: &mut R,
) -> usize {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    debug_assert!(max.is_finite(), "all candidates excluded: {log_weights:?}");
    for lw in log_weights.iter_mut() {
        *lw = (*lw - max).exp();
    }
    sample_from_weights(log_weights, rng)
}
