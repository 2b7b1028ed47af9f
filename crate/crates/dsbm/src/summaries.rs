//! Posterior summaries: similarity matrices, minimum-VI point estimates,
//! meet partitions, plug-in block probabilities, marginal connectivity
//! scores, and clustering accuracy metrics.
//!
//! Information quantities use base-2 logarithms throughout; NMI is
//! normalized by the arithmetic mean of the two entropies (recorded in the
//! run metadata).

use crate::data::{Mode, NetworkSequence};
use crate::error::{Error, Result};
use crate::partition::{cluster_count, PartitionSequence};
use crate::stats::build_suff_stats;
use crate::tempering::SampleSet;

pub use crate::partition::meet_partition;

/// Dense symmetric n×n matrix of co-clustering frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub n: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        SimilarityMatrix { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }
}

/// Entry (i, i') is the share of samples co-clustering i and i' at index x.
pub fn similarity_matrix(samples: &SampleSet, cols: bool, x: usize) -> SimilarityMatrix {
    let n = samples.meta.n;
    let s_count = samples.len();
    assert!(s_count >= 1, "similarity needs at least one sample");
    let mut sums = vec![0u32; n * n];
    for s in 0..s_count {
        let z = samples.labels(s, cols, x);
        for i in 0..n {
            for j in (i + 1)..n {
                if z[i] == z[j] {
                    sums[i * n + j] += 1;
                }
            }
        }
    }
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = sums[i * n + j] as f64 / s_count as f64;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    SimilarityMatrix::from_rows(n, data)
}

fn entropy_bits(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn contingency(z_a: &[usize], z_b: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>, usize, usize) {
    let (ha, hb) = (cluster_count(z_a), cluster_count(z_b));
    let mut a = vec![0usize; ha];
    let mut b = vec![0usize; hb];
    let mut joint = vec![0usize; ha * hb];
    for (&za, &zb) in z_a.iter().zip(z_b) {
        a[za] += 1;
        b[zb] += 1;
        joint[za * hb + zb] += 1;
    }
    (a, b, joint, ha, hb)
}

/// Variation of information between two partitions, in bits.
pub fn vi_distance(z_a: &[usize], z_b: &[usize]) -> f64 {
    assert_eq!(z_a.len(), z_b.len(), "vi over unequal lengths");
    let n = z_a.len() as f64;
    let (a, b, joint, _, _) = contingency(z_a, z_b);
    let h_a = entropy_bits(&a, n);
    let h_b = entropy_bits(&b, n);
    let h_joint = entropy_bits(&joint, n);
    // VI = 2 H(joint) - H(a) - H(b), clamped against rounding
    (2.0 * h_joint - h_a - h_b).max(0.0)
}

/// Rand index, adjusted Rand index, and normalized mutual information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringMetrics {
    pub ri: f64,
    pub ari: f64,
    pub nmi: f64,
}

/// Pairwise agreement measures between an estimated and a reference
/// partition; invariant to label permutations on either side.
pub fn clustering_metrics(z_true: &[usize], z_est: &[usize]) -> ClusteringMetrics {
    assert_eq!(z_true.len(), z_est.len(), "metrics over unequal lengths");
    let n = z_true.len();
    let (a, b, joint, _, _) = contingency(z_true, z_est);
    let choose2 = |v: usize| (v * v.saturating_sub(1) / 2) as f64;
    let total_pairs = choose2(n);
    let same_true: f64 = a.iter().map(|&v| choose2(v)).sum();
    let same_est: f64 = b.iter().map(|&v| choose2(v)).sum();
    let same_both: f64 = joint.iter().map(|&v| choose2(v)).sum();
    // RI: pairs agreeing in both partitions (together or apart)
    let ri = if total_pairs == 0.0 {
        1.0
    } else {
        (total_pairs + 2.0 * same_both - same_true - same_est) / total_pairs
    };
    // ARI: permutation-model chance correction
    let expected = if total_pairs == 0.0 {
        0.0
    } else {
        same_true * same_est / total_pairs
    };
    let max_index = 0.5 * (same_true + same_est);
    let ari = if (max_index - expected).abs() < 1e-12 {
        1.0
    } else {
        (same_both - expected) / (max_index - expected)
    };
    // NMI with arithmetic-mean normalization
    let nf = n as f64;
    let h_t = entropy_bits(&a, nf);
    let h_e = entropy_bits(&b, nf);
    let mi = h_t + h_e - entropy_bits(&joint, nf);
    let denom = 0.5 * (h_t + h_e);
    let nmi = if denom <= 0.0 {
        1.0
    } else {
        (mi / denom).clamp(0.0, 1.0)
    };
    ClusteringMetrics { ri, ari, nmi }
}

/// PSM-based lower bound on the posterior expected VI of `z` (bits per
/// node).
pub fn vi_lower_bound(z: &[usize], psm: &SimilarityMatrix) -> f64 {
    let n = z.len();
    assert_eq!(n, psm.n);
    let mut total = 0.0;
    for i in 0..n {
        let mut size = 0.0f64;
        let mut psum = 0.0f64;
        let mut cross = 0.0f64;
        for j in 0..n {
            let p = psm.get(i, j);
            psum += p;
            if z[i] == z[j] {
                size += 1.0;
                cross += p;
            }
        }
        total += size.log2() + psum.log2() - 2.0 * cross.log2();
    }
    total / n as f64
}

/// Average-linkage agglomerative clustering on dissimilarity 1 - PSM;
/// returns the cut with `k` clusters for every k in 1..=k_max, canonical.
/// Merge ties break toward the lexicographically first pair.
fn average_linkage_cuts(psm: &SimilarityMatrix, k_max: usize) -> Vec<Vec<usize>> {
    let n = psm.n;
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut diss: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 1.0 - psm.get(i, j)).collect())
        .collect();
    let mut cuts: Vec<Vec<usize>> = Vec::new();
    let snapshot = |members: &[Vec<usize>]| {
        let mut z = vec![0usize; n];
        for (label, ms) in members.iter().enumerate() {
            for &i in ms {
                z[i] = label;
            }
        }
        crate::partition::canonicalize(&mut z);
        z
    };
    if n <= k_max {
        cuts.push(snapshot(&members));
    }
    while members.len() > 1 {
        let (mut bi, mut bj, mut best) = (0usize, 1usize, f64::INFINITY);
        for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                if diss[i][j] < best {
                    best = diss[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        // Lance-Williams average-linkage update, order-stable removal
        let (si, sj) = (members[bi].len() as f64, members[bj].len() as f64);
        let merged_row: Vec<f64> = (0..members.len())
            .filter(|&k| k != bj)
            .map(|k| (si * diss[bi][k] + sj * diss[bj][k]) / (si + sj))
            .collect();
        let moved = members.remove(bj);
        members[bi].extend(moved);
        members[bi].sort_unstable();
        diss.remove(bj);
        for row in diss.iter_mut() {
            row.remove(bj);
        }
        for (k, &v) in merged_row.iter().enumerate() {
            let v = if k == bi { 0.0 } else { v };
            diss[bi][k] = v;
            diss[k][bi] = v;
        }
        if members.len() <= k_max {
            cuts.push(snapshot(&members));
        }
    }
    cuts
}

/// Strategy for assembling the candidate set of the VI minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateStrategy {
    /// Sampled partitions plus average-linkage cuts of 1 - PSM (default).
    DrawsAndHierarchical,
    /// Sampled partitions only.
    DrawsOnly,
}

/// Minimum-VI point estimate: argmin of the PSM lower bound over the
/// candidate set. Deterministic: ties break toward the earlier candidate.
pub fn minvi_estimate(
    samples: &SampleSet,
    psm: &SimilarityMatrix,
    cols: bool,
    x: usize,
    strategy: CandidateStrategy,
) -> Vec<usize> {
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for s in 0..samples.len() {
        let z = samples.labels(s, cols, x).to_vec();
        if seen.insert(z.clone()) {
            candidates.push(z);
        }
    }
    if strategy == CandidateStrategy::DrawsAndHierarchical {
        let max_h = candidates
            .iter()
            .map(|z| cluster_count(z))
            .max()
            .unwrap_or(1);
        let k_max = (2 * max_h + 2).min(psm.n);
        for cut in average_linkage_cuts(psm, k_max) {
            if seen.insert(cut.clone()) {
                candidates.push(cut);
            }
        }
    }
    let mut best = 0usize;
    let mut best_vi = f64::INFINITY;
    for (idx, cand) in candidates.iter().enumerate() {
        let v = vi_lower_bound(cand, psm);
        if v < best_vi {
            best_vi = v;
            best = idx;
        }
    }
    candidates.swap_remove(best)
}

/// Plug-in posterior means of the block category probabilities under the
/// point-estimate partitions (Dirichlet-categorical conjugacy).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaEstimate {
    pub h: usize,
    pub k: usize,
    pub c: usize,
    /// Row-major `[h][k][c]`.
    pub probs: Vec<f64>,
}

impl ThetaEstimate {
    pub fn get(&self, h: usize, k: usize, c: usize) -> f64 {
        self.probs[(h * self.k + k) * self.c + c]
    }
}

/// `theta_hat[x][h][k][c] = (a_c + n_hkxc) / (a_dot + n_hkx.)` with counts
/// under the estimated partitions.
pub fn theta_plugin(
    y: &NetworkSequence,
    zhat1: &PartitionSequence,
    zhat2: &PartitionSequence,
    a_theta: &[f64],
) -> Result<Vec<ThetaEstimate>> {
    let stats = build_suff_stats(y, zhat1, zhat2)?;
    let a_dot: f64 = a_theta.iter().sum();
    let mut out = Vec::with_capacity(y.m);
    for x in 0..y.m {
        let idx = stats.index(x);
        let (h_count, k_count) = (idx.rows(), idx.cols());
        let mut probs = vec![0.0; h_count * k_count * y.c];
        for h in 0..h_count {
            for k in 0..k_count {
                let block = idx.block(h, k);
                let total = idx.total(h, k) as f64;
                for c in 0..y.c {
                    probs[(h * k_count + k) * y.c + c] =
                        (a_theta[c] + block[c] as f64) / (a_dot + total);
                }
            }
        }
        out.push(ThetaEstimate {
            h: h_count,
            k: k_count,
            c: y.c,
            probs,
        });
    }
    Ok(out)
}

/// Marginal connectivity scores at one index: for each row group, the mean
/// over column groups of the `present` + `frequent` probability mass, and
/// vice versa. Defined for the four-level coding only.
pub fn mcs(theta: &ThetaEstimate) -> Result<(Vec<f64>, Vec<f64>)> {
    if theta.c != 4 {
        return Err(Error::McsRequiresFourCategories(theta.c));
    }
    let strong = |h: usize, k: usize| theta.get(h, k, 2) + theta.get(h, k, 3);
    let rows = (0..theta.h)
        .map(|h| (0..theta.k).map(|k| strong(h, k)).sum::<f64>() / theta.k as f64)
        .collect();
    let cols = (0..theta.k)
        .map(|k| (0..theta.h).map(|h| strong(h, k)).sum::<f64>() / theta.h as f64)
        .collect();
    Ok((rows, cols))
}

/// Complete posterior summary of a sample set.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    pub psm1: Vec<SimilarityMatrix>,
    pub psm2: Vec<SimilarityMatrix>,
    pub zhat1: PartitionSequence,
    pub zhat2: PartitionSequence,
    pub theta: Vec<ThetaEstimate>,
    pub mcs1: Vec<Vec<f64>>,
    pub mcs2: Vec<Vec<f64>>,
    /// Meet of the row/column point estimates over the requested index
    /// sets (0-based), one entry per request.
    pub meets1: Vec<(Vec<usize>, Vec<usize>)>,
    pub meets2: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Compute every summary; `meet_indices` lists 0-based index subsets for
/// meet partitions. MCS tables are skipped (empty) when C != 4.
pub fn summarize(
    y: &NetworkSequence,
    samples: &SampleSet,
    meet_indices: &[Vec<usize>],
) -> Result<PosteriorSummary> {
    if samples.is_empty() {
        return Err(Error::Invalid("empty sample set".into()));
    }
    if samples.meta.n != y.n || samples.meta.m != y.m {
        return Err(Error::Dimension(format!(
            "samples were drawn for n={}, m={}, network is n={}, m={}",
            samples.meta.n, samples.meta.m, y.n, y.m
        )));
    }
    let m = y.m;
    let directed = y.mode == Mode::Directed;
    let mut psm1 = Vec::with_capacity(m);
    let mut psm2 = Vec::with_capacity(m);
    let mut zhat1 = Vec::with_capacity(m);
    let mut zhat2 = Vec::with_capacity(m);
    for x in 0..m {
        let p1 = similarity_matrix(samples, false, x);
        let z1 = minvi_estimate(
            samples,
            &p1,
            false,
            x,
            CandidateStrategy::DrawsAndHierarchical,
        );
        if directed {
            let p2 = similarity_matrix(samples, true, x);
            let z2 = minvi_estimate(
                samples,
                &p2,
                true,
                x,
                CandidateStrategy::DrawsAndHierarchical,
            );
            psm2.push(p2);
            zhat2.push(z2);
        } else {
            psm2.push(p1.clone());
            zhat2.push(z1.clone());
        }
        psm1.push(p1);
        zhat1.push(z1);
    }
    let zhat1 = PartitionSequence::new(zhat1)?;
    let zhat2 = PartitionSequence::new(zhat2)?;
    let theta = theta_plugin(y, &zhat1, &zhat2, &samples_a_theta(samples, y))?;
    let (mut mcs1, mut mcs2) = (Vec::new(), Vec::new());
    if y.c == 4 {
        for t in &theta {
            let (r, c) = mcs(t)?;
            mcs1.push(r);
            mcs2.push(c);
        }
    }
    let meet_of = |seq: &PartitionSequence, idxs: &[usize]| -> Result<(Vec<usize>, Vec<usize>)> {
        let parts: Vec<&[usize]> = idxs.iter().map(|&x| seq.labels(x)).collect();
        Ok((idxs.to_vec(), meet_partition(&parts)?))
    };
    let mut meets1 = Vec::new();
    let mut meets2 = Vec::new();
    for idxs in meet_indices {
        if let Some(&bad) = idxs.iter().find(|&&x| x >= m) {
            return Err(Error::Invalid(format!(
                "meet index {} out of range 1..={}",
                bad + 1,
                m
            )));
        }
        meets1.push(meet_of(&zhat1, idxs)?);
        meets2.push(meet_of(&zhat2, idxs)?);
    }
    Ok(PosteriorSummary {
        psm1,
        psm2,
        zhat1,
        zhat2,
        theta,
        mcs1,
        mcs2,
        meets1,
        meets2,
    })
}

fn samples_a_theta(_samples: &SampleSet, y: &NetworkSequence) -> Vec<f64> {
    // plug-in uses the diffuse default when the run metadata carries no
    // explicit a_theta; fits always use the CLI-provided Dirichlet, which
    // currently is the uniform one
    vec![1.0; y.c]
}
