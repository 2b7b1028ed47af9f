//! Shared oracles for the acceptance suite: partition enumeration, CRP
//! masses, an independent collapsed-likelihood tally, compatibility by
//! pair comparison, and a two-sample Kolmogorov-Smirnov p-value.
//!
//! Everything here is deliberately written from the definitions, not via
//! the library's incremental machinery, so it can serve as an independent
//! reference for the sampler.

use statrs::function::gamma::ln_gamma;

/// All set partitions of n items as canonical label vectors (restricted
/// growth strings).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut z = vec![0usize; n];
    fn rec(z: &mut Vec<usize>, i: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == z.len() {
            out.push(z.clone());
            return;
        }
        for label in 0..=max + 1 {
            z[i] = label;
            rec(z, i + 1, max.max(label), out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    z[0] = 0;
    rec(&mut z, 1, 0, &mut out);
    out
}

/// Exact CRP mass of a canonical label vector.
pub fn crp_mass(z: &[usize], eta: f64) -> f64 {
    let n = z.len();
    let h = z.iter().copied().max().map_or(0, |v| v + 1);
    let mut sizes = vec![0usize; h];
    for &l in z {
        sizes[l] += 1;
    }
    let mut log = h as f64 * eta.ln() + ln_gamma(eta) - ln_gamma(eta + n as f64);
    for &s in &sizes {
        log += ln_gamma(s as f64);
    }
    log.exp()
}

/// Restricted set partitions agree iff every pair inside `keep` agrees.
pub fn compat_by_pairs(u: &[usize], v: &[usize], keep: &[usize]) -> bool {
    for (a_pos, &a) in keep.iter().enumerate() {
        for &b in &keep[a_pos + 1..] {
            if (u[a] == u[b]) != (v[a] == v[b]) {
                return false;
            }
        }
    }
    true
}

/// Straight tally of the collapsed log-likelihood for one index of a
/// directed network (labels may mark an excluded row/column with
/// usize::MAX).
#[allow(clippy::too_many_arguments)]
pub fn loglik_directed(
    n: usize,
    cats: &dyn Fn(usize, usize) -> usize,
    z1: &[usize],
    z2: &[usize],
    c: usize,
    a_theta: &[f64],
    include_diagonal: bool,
) -> f64 {
    let h = z1
        .iter()
        .filter(|&&l| l != usize::MAX)
        .max()
        .map_or(0, |&v| v + 1);
    let k = z2
        .iter()
        .filter(|&&l| l != usize::MAX)
        .max()
        .map_or(0, |&v| v + 1);
    let mut counts = vec![0u32; h * k * c];
    for i in 0..n {
        if z1[i] == usize::MAX {
            continue;
        }
        for j in 0..n {
            if z2[j] == usize::MAX || (i == j && !include_diagonal) {
                continue;
            }
            counts[(z1[i] * k + z2[j]) * c + cats(i, j)] += 1;
        }
    }
    block_product(&counts, c, a_theta)
}

/// Straight tally over unordered pairs for undirected networks.
pub fn loglik_undirected(
    n: usize,
    cats: &dyn Fn(usize, usize) -> usize,
    z: &[usize],
    c: usize,
    a_theta: &[f64],
) -> f64 {
    let h = z
        .iter()
        .filter(|&&l| l != usize::MAX)
        .max()
        .map_or(0, |&v| v + 1);
    let mut counts = vec![0u32; h * h * c];
    for i in 0..n {
        if z[i] == usize::MAX {
            continue;
        }
        for j in (i + 1)..n {
            if z[j] == usize::MAX {
                continue;
            }
            let (a, b) = if z[i] >= z[j] {
                (z[i], z[j])
            } else {
                (z[j], z[i])
            };
            counts[(a * h + b) * c + cats(i, j)] += 1;
        }
    }
    block_product(&counts, c, a_theta)
}

fn block_product(counts: &[u32], c: usize, a_theta: &[f64]) -> f64 {
    let a_dot: f64 = a_theta.iter().sum();
    let mut out = 0.0;
    for block in counts.chunks_exact(c) {
        let tot: u32 = block.iter().sum();
        if tot == 0 {
            continue;
        }
        out += ln_gamma(a_dot) - ln_gamma(a_dot + tot as f64);
        for (cc, &cnt) in block.iter().enumerate() {
            if cnt > 0 {
                out += ln_gamma(a_theta[cc] + cnt as f64) - ln_gamma(a_theta[cc]);
            }
        }
    }
    out
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic with the usual
/// small-sample correction); ties are allowed, which only makes the test
/// conservative.
pub fn ks_two_sample_p(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n1, n2) = (xs.len(), ys.len());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n1 && j < n2 {
        let x = xs[i].min(ys[j]);
        while i < n1 && xs[i] <= x {
            i += 1;
        }
        while j < n2 && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 as f64 + n2 as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
    }
    p.clamp(0.0, 1.0)
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
