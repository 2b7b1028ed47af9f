//! The supervised Chinese restaurant process (CRP-w) and its dependent
//! sequence extension (DRPM-w): cohesion function, mass function,
//! predictive probabilities, and prior sampling.
//!
//! The CRP-w reweights CRP seating by a Dirichlet-categorical cohesion
//! over node macro-categories, favoring clusters that are homogeneous in
//! the external classification. The DRPM-w chains CRP-w marginals over the
//! sequence index: per-node persistence indicators decide which nodes keep
//! their cluster from the previous index, and the remaining nodes are
//! re-seated by CRP-w predictive steps.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::partition::{check_compatibility, cluster_count, PartitionSequence};
use crate::util::sample_from_weights;

/// Parameters of the CRP-w prior over a single partition.
#[derive(Debug, Clone)]
pub struct CrpwParams {
    /// Concentration; larger values favor more clusters.
    pub eta: f64,
    /// Dirichlet-categorical cohesion parameters, one per macro-category.
    pub a_w: Vec<f64>,
    /// When false, the covariate factors are dropped and this is a plain
    /// CRP.
    pub supervised: bool,
}

impl CrpwParams {
    pub fn unsupervised(eta: f64) -> Self {
        assert!(eta > 0.0);
        CrpwParams {
            eta,
            a_w: Vec::new(),
            supervised: false,
        }
    }

    pub fn supervised(eta: f64, a_w: Vec<f64>) -> Self {
        assert!(eta > 0.0);
        assert!(!a_w.is_empty() && a_w.iter().all(|&a| a > 0.0));
        CrpwParams {
            eta,
            a_w,
            supervised: true,
        }
    }

    fn a_dot(&self) -> f64 {
        self.a_w.iter().sum()
    }
}

/// Per-transition persistence draws of a DRPM-w sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDraw {
    /// `gamma[x-1][i]` is the indicator for node i persisting from index
    /// x-1 to x (m-1 transitions).
    pub gamma: Vec<Vec<bool>>,
    /// Persistence probabilities per transition.
    pub alpha: Vec<f64>,
}

impl PersistenceDraw {
    /// Nodes persisting across transition x-1 -> x.
    pub fn persisting(&self, t: usize) -> Vec<usize> {
        self.gamma[t]
            .iter()
            .enumerate()
            .filter_map(|(i, &g)| g.then_some(i))
            .collect()
    }
}

/// Log Dirichlet-categorical cohesion of a cluster whose members carry the
/// macro-categories `w_h`. Empty clusters yield log 1 = 0.
pub fn cohesion_log(w_h: &[usize], a_w: &[f64]) -> f64 {
    if w_h.is_empty() {
        return 0.0;
    }
    let a_dot: f64 = a_w.iter().sum();
    let mut counts = vec![0usize; a_w.len()];
    for &wi in w_h {
        counts[wi] += 1;
    }
    let mut out = ln_gamma(a_dot) - ln_gamma(a_dot + w_h.len() as f64);
    for (l, &cnt) in counts.iter().enumerate() {
        if cnt > 0 {
            out += ln_gamma(a_w[l] + cnt as f64) - ln_gamma(a_w[l]);
        }
    }
    out
}

/// Log unnormalized CRP-w mass of a label vector over any node subset.
///
/// `w` must align with `z` by position and is required when the params are
/// supervised.
pub fn crpw_log_mass(z: &[usize], w: Option<&[usize]>, params: &CrpwParams) -> f64 {
    let n = z.len();
    if n == 0 {
        return 0.0;
    }
    let h_count = cluster_count(z);
    let mut sizes = vec![0usize; h_count];
    for &zi in z {
        sizes[zi] += 1;
    }
    let mut out =
        (h_count as f64) * params.eta.ln() + ln_gamma(params.eta) - ln_gamma(params.eta + n as f64);
    for &s in &sizes {
        debug_assert!(s > 0, "labels must be dense");
        out += ln_gamma(s as f64); // log (n_h - 1)!
    }
    if params.supervised {
        let w = w.expect("supervised mass needs covariates");
        debug_assert_eq!(w.len(), n);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); h_count];
        for (i, &zi) in z.iter().enumerate() {
            members[zi].push(w[i]);
        }
        for m in &members {
            out += cohesion_log(m, &params.a_w);
        }
    }
    out
}

/// Unnormalized seating weights from cluster occupancy counts.
///
/// `sizes[h]` counts the other nodes in cluster h; `cov_match[h]` counts
/// those sharing the incoming node's macro-category (supervised only).
/// Appends the new-cluster weight as the last entry.
pub(crate) fn predictive_weights_from_counts(
    params: &CrpwParams,
    sizes: &[u32],
    cov_match: Option<&[u32]>,
    a_wi: f64,
    out: &mut Vec<f64>,
) {
    out.clear();
    if params.supervised {
        let a_dot = params.a_dot();
        let cov = cov_match.expect("supervised predictive needs covariate counts");
        for (h, &nh) in sizes.iter().enumerate() {
            let w = nh as f64 * (cov[h] as f64 + a_wi) / (nh as f64 + a_dot);
            out.push(w);
        }
        out.push(params.eta * a_wi / a_dot);
    } else {
        out.extend(sizes.iter().map(|&nh| nh as f64));
        out.push(params.eta);
    }
}

/// Normalized seating probabilities for a node joining the partition
/// `z_rest` (labels of the other nodes): one entry per existing cluster
/// plus a final new-cluster entry.
///
/// `w_rest` aligns with `z_rest`; `w_i` is the incoming node's
/// macro-category. Both are ignored for unsupervised params.
pub fn crpw_predictive(
    params: &CrpwParams,
    z_rest: &[usize],
    w_rest: Option<&[usize]>,
    w_i: usize,
) -> Vec<f64> {
    let h_count = cluster_count(z_rest);
    let mut sizes = vec![0u32; h_count];
    for &z in z_rest {
        sizes[z] += 1;
    }
    let cov = if params.supervised {
        let w_rest = w_rest.expect("supervised predictive needs covariates");
        let mut cov = vec![0u32; h_count];
        for (&z, &w) in z_rest.iter().zip(w_rest) {
            if w == w_i {
                cov[z] += 1;
            }
        }
        Some(cov)
    } else {
        None
    };
    let a_wi = if params.supervised {
        params.a_w[w_i]
    } else {
        0.0
    };
    let mut weights = Vec::with_capacity(h_count + 1);
    predictive_weights_from_counts(params, &sizes, cov.as_deref(), a_wi, &mut weights);
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    weights
}

/// Incremental seating state used by prior sampling: cluster sizes plus,
/// when supervised, per-cluster per-category counts.
struct Seating<'a> {
    params: &'a CrpwParams,
    w: Option<&'a [usize]>,
    sizes: Vec<u32>,
    cov: Vec<u32>, // [h * L + l], supervised only
    live: usize,
}

impl<'a> Seating<'a> {
    fn new(params: &'a CrpwParams, w: Option<&'a [usize]>) -> Self {
        if params.supervised {
            assert!(w.is_some(), "supervised prior needs covariates");
        }
        Seating {
            params,
            w,
            sizes: Vec::new(),
            cov: Vec::new(),
            live: 0,
        }
    }

    fn l(&self) -> usize {
        self.params.a_w.len()
    }

    fn seat_count(&mut self, label: usize, w_i: usize, delta: i64) {
        let l = self.l();
        if label >= self.sizes.len() {
            self.sizes.resize(label + 1, 0);
            if self.params.supervised {
                self.cov.resize((label + 1) * l, 0);
            }
        }
        let s = &mut self.sizes[label];
        if delta > 0 {
            if *s == 0 {
                self.live += 1;
            }
            *s += 1;
        } else {
            *s -= 1;
            if *s == 0 {
                self.live -= 1;
            }
        }
        if self.params.supervised {
            let cell = &mut self.cov[label * l + w_i];
            if delta > 0 {
                *cell += 1;
            } else {
                *cell -= 1;
            }
        }
    }

    /// Draw a seat for node i; returns the chosen label (existing or the
    /// smallest unused one).
    fn draw_seat<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        rng: &mut R,
        weights: &mut Vec<f64>,
    ) -> usize {
        let w_i = self.w.map_or(0, |w| w[i]);
        let a_wi = if self.params.supervised {
            self.params.a_w[w_i]
        } else {
            0.0
        };
        weights.clear();
        if self.params.supervised {
            let a_dot = self.params.a_dot();
            for (h, &nh) in self.sizes.iter().enumerate() {
                if nh == 0 {
                    weights.push(0.0);
                } else {
                    let m = self.cov[h * self.l() + w_i] as f64;
                    weights.push(nh as f64 * (m + a_wi) / (nh as f64 + a_dot));
                }
            }
            weights.push(self.params.eta * a_wi / a_dot);
        } else {
            weights.extend(self.sizes.iter().map(|&nh| nh as f64));
            weights.push(self.params.eta);
        }
        let pick = sample_from_weights(weights, rng);
        let label = if pick == self.sizes.len() {
            // reuse the lowest dead label, if any
            self.sizes
                .iter()
                .position(|&s| s == 0)
                .unwrap_or(self.sizes.len())
        } else {
            pick
        };
        self.seat_count(label, w_i, 1);
        label
    }
}

/// Draw a DRPM-w partition sequence together with its persistence
/// indicators.
///
/// `alpha` holds the m-1 per-transition persistence probabilities. Nodes
/// with indicator 0 are removed and re-seated in ascending node order; the
/// result always lies in the compatible set of the previous partition.
pub fn drpmw_sample<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    params: &CrpwParams,
    w: Option<&[usize]>,
    alpha: &[f64],
    rng: &mut R,
) -> Result<(PartitionSequence, PersistenceDraw)> {
    if alpha.len() + 1 != m {
        return Err(Error::Dimension(format!(
            "{} transition probabilities for m={}",
            alpha.len(),
            m
        )));
    }
    if let Some(&bad) = alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Invalid(format!("alpha {bad} outside [0, 1]")));
    }
    let mut weights = Vec::new();
    let mut z: Vec<Vec<usize>> = Vec::with_capacity(m);
    let mut gamma: Vec<Vec<bool>> = Vec::with_capacity(m.saturating_sub(1));

    let mut seating = Seating::new(params, w);
    let mut z1 = vec![0usize; n];
    for (i, slot) in z1.iter_mut().enumerate() {
        *slot = seating.draw_seat(i, rng, &mut weights);
    }
    z.push(z1);

    for t in 0..m - 1 {
        let prev = z[t].clone();
        let g: Vec<bool> = (0..n).map(|_| rng.gen_bool(alpha[t])).collect();
        let mut seating = Seating::new(params, w);
        let mut cur = prev.clone();
        for i in 0..n {
            if g[i] {
                let w_i = w.map_or(0, |w| w[i]);
                seating.seat_count(cur[i], w_i, 1);
            }
        }
        for i in 0..n {
            if !g[i] {
                cur[i] = seating.draw_seat(i, rng, &mut weights);
            }
        }
        gamma.push(g);
        z.push(cur);
    }

    let seq = PartitionSequence::new(z)?;
    for t in 0..m - 1 {
        let keep: Vec<usize> = (0..n).filter(|&i| gamma[t][i]).collect();
        debug_assert!(check_compatibility(seq.labels(t), seq.labels(t + 1), &keep));
    }
    Ok((
        seq,
        PersistenceDraw {
            gamma,
            alpha: alpha.to_vec(),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn cohesion_hand_values() {
        // one member, a_w = (1,1): Gamma(2)/Gamma(3) * Gamma(2)/Gamma(1) = 1/2
        assert_abs_diff_eq!(
            cohesion_log(&[0], &[1.0, 1.0]),
            0.5f64.ln(),
            epsilon = 1e-12
        );
        // empty cluster
        assert_eq!(cohesion_log(&[], &[1.0, 1.0]), 0.0);
        // two members, same category: Gamma(2)/Gamma(4) * Gamma(3)/Gamma(1) = 1/3
        assert_abs_diff_eq!(
            cohesion_log(&[1, 1], &[1.0, 1.0]),
            (1.0f64 / 3.0).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mass_single_node_equals_cohesion() {
        let p = CrpwParams::supervised(1.7, vec![0.5, 2.0]);
        assert_abs_diff_eq!(
            crpw_log_mass(&[0], Some(&[1]), &p),
            cohesion_log(&[1], &p.a_w),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mass_two_nodes_unit_eta_splits_evenly() {
        let p = CrpwParams::unsupervised(1.0);
        let together = crpw_log_mass(&[0, 0], None, &p);
        let apart = crpw_log_mass(&[0, 1], None, &p);
        assert_abs_diff_eq!(together, 0.5f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(apart, 0.5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn predictive_hand_example() {
        // three nodes in one cluster, all sharing the new node's category;
        // L=2, a_w=(1,1), eta=1: unnormalized (3*4/5, 1*1/2)
        let p = CrpwParams::supervised(1.0, vec![1.0, 1.0]);
        let probs = crpw_predictive(&p, &[0, 0, 0], Some(&[0, 0, 0]), 0);
        assert_eq!(probs.len(), 2);
        assert_abs_diff_eq!(probs[0], 2.4 / 2.9, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 0.5 / 2.9, epsilon = 1e-12);
    }

    #[test]
    fn predictive_empty_rest_opens_new_cluster() {
        let p = CrpwParams::supervised(0.3, vec![1.0, 2.0]);
        let probs = crpw_predictive(&p, &[], Some(&[]), 1);
        assert_eq!(probs, vec![1.0]);
    }

    #[test]
    fn single_macro_category_reduces_to_crp() {
        let sup = CrpwParams::supervised(2.0, vec![3.7]);
        let uns = CrpwParams::unsupervised(2.0);
        let z = [0, 1, 1, 0, 2];
        let w = [0, 0, 0, 0, 0];
        let a = crpw_predictive(&sup, &z, Some(&w), 0);
        let b = crpw_predictive(&uns, &z, None, 0);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn predictive_sums_to_one_with_h_plus_one_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let n = rng.gen_range(1..8);
            let l = rng.gen_range(1..4);
            let z: Vec<usize> = {
                let mut z: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                crate::partition::canonicalize(&mut z);
                z
            };
            let w: Vec<usize> = (0..n).map(|_| rng.gen_range(0..l)).collect();
            let a_w: Vec<f64> = (0..l).map(|_| rng.gen_range(0.1..3.0)).collect();
            let p = CrpwParams::supervised(rng.gen_range(0.1..5.0), a_w);
            let probs = crpw_predictive(&p, &z, Some(&w), rng.gen_range(0..l));
            assert_eq!(probs.len(), cluster_count(&z) + 1);
            assert_abs_diff_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    /// Mass ratios with node i seated anywhere are proportional to the
    /// predictive vector, with an h-independent constant.
    #[test]
    fn mass_ratio_matches_predictive() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let n = rng.gen_range(1..7);
            let l = 3;
            let mut z_rest: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            crate::partition::canonicalize(&mut z_rest);
            let w_rest: Vec<usize> = (0..n).map(|_| rng.gen_range(0..l)).collect();
            let w_i = rng.gen_range(0..l);
            let a_w: Vec<f64> = (0..l).map(|_| rng.gen_range(0.2..2.0)).collect();
            let p = CrpwParams::supervised(rng.gen_range(0.2..4.0), a_w);
            let probs = crpw_predictive(&p, &z_rest, Some(&w_rest), w_i);
            let base = crpw_log_mass(&z_rest, Some(&w_rest), &p);
            let h_count = cluster_count(&z_rest);
            let mut consts = Vec::new();
            for h in 0..=h_count {
                let mut z = z_rest.clone();
                let mut w = w_rest.clone();
                z.push(h);
                w.push(w_i);
                let ratio = (crpw_log_mass(&z, Some(&w), &p) - base).exp();
                consts.push(ratio / probs[h]);
            }
            for c in &consts {
                assert!((c / consts[0] - 1.0).abs() <= 1e-10, "{consts:?}");
            }
        }
    }

    #[test]
    fn full_persistence_freezes_the_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = CrpwParams::unsupervised(1.5);
        let (seq, draw) = drpmw_sample(8, 4, &p, None, &[1.0, 1.0, 1.0], &mut rng).unwrap();
        for x in 1..4 {
            assert_eq!(seq.labels(0), seq.labels(x));
        }
        assert!(draw.gamma.iter().flatten().all(|&g| g));
    }

    #[test]
    fn draws_always_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = CrpwParams::supervised(1.0, vec![0.5, 0.5, 1.5]);
        let w: Vec<usize> = (0..10).map(|i| i % 3).collect();
        for _ in 0..200 {
            let alpha = [0.3, 0.8];
            let (seq, draw) = drpmw_sample(10, 3, &p, Some(&w), &alpha, &mut rng).unwrap();
            for t in 0..2 {
                let keep = draw.persisting(t);
                assert!(check_compatibility(seq.labels(t), seq.labels(t + 1), &keep));
            }
        }
    }

    /// With alpha = 0 every node is re-seated, so the second index is an
    /// unrestricted CRP draw: its marginal matches the exact CRP law.
    #[test]
    fn zero_alpha_reseats_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let p = CrpwParams::unsupervised(1.0);
        let table = [
            (vec![0, 0, 0], 2.0 / 6.0),
            (vec![0, 0, 1], 1.0 / 6.0),
            (vec![0, 1, 0], 1.0 / 6.0),
            (vec![0, 1, 1], 1.0 / 6.0),
            (vec![0, 1, 2], 1.0 / 6.0),
        ];
        let draws = 100_000usize;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            let (seq, draw) = drpmw_sample(3, 2, &p, None, &[0.0], &mut rng).unwrap();
            assert!(draw.gamma[0].iter().all(|&g| !g));
            let idx = table
                .iter()
                .position(|(z, _)| z.as_slice() == seq.labels(1))
                .unwrap();
            counts[idx] += 1;
        }
        let chi2: f64 = table
            .iter()
            .zip(&counts)
            .map(|((_, prob), &obs)| {
                let exp = prob * draws as f64;
                (obs as f64 - exp).powi(2) / exp
            })
            .sum();
        let p_value = 1.0 - ChiSquared::new(4.0).unwrap().cdf(chi2);
        assert!(p_value > 0.01, "chi2 = {chi2}, p = {p_value}");
    }

    /// Unsupervised single-index draws hit the exact CRP law on 3 items
    /// (chi-squared over the 5 partitions).
    #[test]
    fn three_item_crp_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let p = CrpwParams::unsupervised(1.0);
        // canonical label vectors and their CRP(1) probabilities
        let table = [
            (vec![0, 0, 0], 2.0 / 6.0),
            (vec![0, 0, 1], 1.0 / 6.0),
            (vec![0, 1, 0], 1.0 / 6.0),
            (vec![0, 1, 1], 1.0 / 6.0),
            (vec![0, 1, 2], 1.0 / 6.0),
        ];
        let draws = 100_000usize;
        let mut counts = [0usize; 5];
        for _ in 0..draws {
            let (seq, _) = drpmw_sample(3, 1, &p, None, &[], &mut rng).unwrap();
            let idx = table
                .iter()
                .position(|(z, _)| z.as_slice() == seq.labels(0))
                .unwrap();
            counts[idx] += 1;
        }
        let chi2: f64 = table
            .iter()
            .zip(&counts)
            .map(|((_, prob), &obs)| {
                let exp = prob * draws as f64;
                (obs as f64 - exp).powi(2) / exp
            })
            .sum();
        let p_value = 1.0 - ChiSquared::new(4.0).unwrap().cdf(chi2);
        assert!(p_value > 0.01, "chi2 = {chi2}, p = {p_value}");
    }
}
