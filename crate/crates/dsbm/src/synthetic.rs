//! Planted-structure generators for the two simulation scenarios, plus the
//! replicated accuracy study.
//!
//! A scenario plants per-index partition schedules (cluster counts and
//! movers per transition), assigns each block one of a small set of
//! category-probability rows, and draws edges categorically. Scenario 2
//! forces a single shared partition, symmetric theta, and symmetric edges.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{CatMatrix, Hyperparameters, Mode, NetworkSequence};
use crate::error::{Error, Result};
use crate::partition::PartitionSequence;
use crate::summaries::{clustering_metrics, summarize};
use crate::tempering::{run, Ladder, RunConfig};
use crate::util::{derive_seed, sample_from_weights};

/// Planted-structure recipe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n: usize,
    pub m: usize,
    pub c: usize,
    pub mode: Mode,
    pub include_diagonal: bool,
    /// Non-empty cluster count per index.
    pub clusters: Vec<usize>,
    /// Nodes reallocated at each transition.
    pub movers: Vec<usize>,
    /// Block probability rows, each of length `c`.
    pub theta_rows: Vec<Vec<f64>>,
}

/// The four block configurations used by both simulation scenarios.
pub fn default_theta_rows() -> Vec<Vec<f64>> {
    vec![
        vec![0.85, 0.05, 0.05, 0.05],
        vec![0.05, 0.05, 0.85, 0.05],
        vec![0.05, 0.05, 0.05, 0.85],
        vec![0.1, 0.4, 0.4, 0.1],
    ]
}

impl ScenarioSpec {
    /// Directed two-partition scenario at paper scale: n = 100, m = 10,
    /// gradual cluster births up to 6.
    pub fn scenario1() -> Self {
        ScenarioSpec {
            n: 100,
            m: 10,
            c: 4,
            mode: Mode::Directed,
            include_diagonal: true,
            clusters: vec![3, 4, 4, 5, 5, 6, 6, 6, 6, 6],
            movers: vec![10; 9],
            theta_rows: default_theta_rows(),
        }
    }

    /// Undirected single-partition scenario at paper scale.
    pub fn scenario2() -> Self {
        ScenarioSpec {
            mode: Mode::Undirected,
            include_diagonal: false,
            ..ScenarioSpec::scenario1()
        }
    }

    /// Shrink to a faster instance, keeping the block structure: `movers`
    /// is set to ~10% of n per transition and clusters are capped by n.
    pub fn desk_scale(mut self, n: usize, m: usize, clusters: usize) -> Self {
        self.n = n;
        self.m = m;
        self.clusters = vec![clusters; m];
        self.movers = vec![(n / 10).max(1); m.saturating_sub(1)];
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.clusters.len() != self.m {
            return Err(Error::Dimension(format!(
                "{} cluster targets for m = {}",
                self.clusters.len(),
                self.m
            )));
        }
        if self.movers.len() + 1 != self.m {
            return Err(Error::Dimension(format!(
                "{} mover counts for m = {}",
                self.movers.len(),
                self.m
            )));
        }
        if let Some(&h) = self.clusters.iter().find(|&&h| h == 0 || h > self.n) {
            return Err(Error::Invalid(format!(
                "cluster target {h} infeasible for n = {}",
                self.n
            )));
        }
        if self.theta_rows.is_empty()
            || self
                .theta_rows
                .iter()
                .any(|r| r.len() != self.c || r.iter().any(|&p| p < 0.0))
        {
            return Err(Error::Invalid(
                "theta rows must be non-negative vectors of length C".into(),
            ));
        }
        Ok(())
    }
}

/// Draw one partition schedule honoring cluster counts and mover counts.
fn plant_partitions(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<usize>>> {
    let n = spec.n;
    let mut z = Vec::with_capacity(spec.m);
    // first index: distinct seeds for each cluster, rest uniform
    let h0 = spec.clusters[0];
    let mut first = vec![0usize; n];
    let mut order: Vec<usize> = (0..n).collect();
    partial_shuffle(&mut order, rng);
    for (slot, &node) in order.iter().enumerate() {
        first[node] = if slot < h0 {
            slot
        } else {
            rng.gen_range(0..h0)
        };
    }
    z.push(first);

    for t in 0..spec.m - 1 {
        let h_cur = spec.clusters[t];
        let h_next = spec.clusters[t + 1];
        let q = spec.movers[t];
        let births = h_next.saturating_sub(h_cur);
        if q > n {
            return Err(Error::Invalid(format!(
                "transition {} moves {q} of {n} nodes",
                t + 1
            )));
        }
        if births > q {
            return Err(Error::Invalid(format!(
                "transition {} births {births} clusters with only {q} movers",
                t + 1
            )));
        }
        let prev = z[t].clone();
        let mut ok = None;
        for _ in 0..500 {
            let mut cur = prev.clone();
            // clusters to dissolve when the count shrinks
            let mut dissolved: Vec<usize> = Vec::new();
            if h_next < h_cur {
                let mut labels: Vec<usize> = (0..h_cur).collect();
                partial_shuffle(&mut labels, rng);
                dissolved = labels[..h_cur - h_next].to_vec();
            }
            let forced: Vec<usize> = (0..n).filter(|&i| dissolved.contains(&prev[i])).collect();
            if forced.len() > q {
                continue;
            }
            let mut movers = forced.clone();
            let mut pool: Vec<usize> = (0..n).filter(|i| !movers.contains(i)).collect();
            partial_shuffle(&mut pool, rng);
            movers.extend(pool.into_iter().take(q - movers.len()));
            // relabel surviving clusters densely, then append births
            let mut relabel = vec![usize::MAX; h_cur];
            let mut next = 0;
            for h in 0..h_cur {
                if !dissolved.contains(&h) {
                    relabel[h] = next;
                    next += 1;
                }
            }
            for i in 0..n {
                if !movers.contains(&i) {
                    cur[i] = relabel[prev[i]];
                }
            }
            // seed each newborn cluster, then scatter the rest uniformly
            partial_shuffle(&mut movers, rng);
            for (slot, &i) in movers.iter().enumerate() {
                cur[i] = if slot < births {
                    h_next - births + slot
                } else {
                    rng.gen_range(0..h_next)
                };
            }
            let mut seen = vec![false; h_next];
            for &l in &cur {
                seen[l] = true;
            }
            if seen.iter().all(|&s| s) {
                ok = Some(cur);
                break;
            }
        }
        match ok {
            Some(cur) => z.push(cur),
            None => {
                return Err(Error::Invalid(format!(
                    "could not realize the schedule at transition {} \
                     (clusters {} -> {}, movers {})",
                    t + 1,
                    h_cur,
                    h_next,
                    q
                )))
            }
        }
    }
    Ok(z)
}

fn partial_shuffle(v: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..v.len()).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
}

/// Generate one scenario draw: the network plus the true row and column
/// partition sequences (identical in undirected mode).
pub fn generate_scenario(
    spec: &ScenarioSpec,
    rng: &mut ChaCha8Rng,
) -> Result<(NetworkSequence, PartitionSequence, PartitionSequence)> {
    spec.validate()?;
    let n = spec.n;
    let z1_raw = plant_partitions(spec, rng)?;
    let z2_raw = match spec.mode {
        Mode::Directed => plant_partitions(spec, rng)?,
        Mode::Undirected => z1_raw.clone(),
    };
    let uniform = vec![1.0; spec.theta_rows.len()];
    let mut mats = Vec::with_capacity(spec.m);
    for x in 0..spec.m {
        let h = spec.clusters[x];
        // block -> theta row assignment; symmetric in undirected mode
        let mut assign = vec![0usize; h * h];
        for a in 0..h {
            for b in 0..h {
                if spec.mode == Mode::Undirected && b > a {
                    continue;
                }
                assign[a * h + b] = sample_from_weights(&uniform, rng);
            }
        }
        if spec.mode == Mode::Undirected {
            for a in 0..h {
                for b in (a + 1)..h {
                    assign[a * h + b] = assign[b * h + a];
                }
            }
        }
        let mut mat = vec![0u8; n * n];
        match spec.mode {
            Mode::Directed => {
                for i in 0..n {
                    for j in 0..n {
                        if i == j && !spec.include_diagonal {
                            continue; // stays `absent`, ignored by the likelihood
                        }
                        let row = &spec.theta_rows[assign[z1_raw[x][i] * h + z2_raw[x][j]]];
                        mat[i * n + j] = sample_from_weights(row, rng) as u8;
                    }
                }
            }
            Mode::Undirected => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let row = &spec.theta_rows[assign[z1_raw[x][i] * h + z1_raw[x][j]]];
                        let cat = sample_from_weights(row, rng) as u8;
                        mat[i * n + j] = cat;
                        mat[j * n + i] = cat;
                    }
                }
            }
        }
        mats.push(CatMatrix::new(n, mat));
    }
    let y = NetworkSequence::new(n, spec.c, spec.mode, spec.include_diagonal, mats)?;
    Ok((
        y,
        PartitionSequence::new(z1_raw)?,
        PartitionSequence::new(z2_raw)?,
    ))
}

/// One replicate-index-side measurement.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub replicate: usize,
    /// "rows" or "cols".
    pub side: String,
    /// 1-based sequence index.
    pub index: usize,
    pub ri: f64,
    pub ari: f64,
    pub nmi: f64,
}

/// Median / quartiles / range of one metric at one index and side.
#[derive(Debug, Clone, Serialize)]
pub struct StudySummary {
    pub side: String,
    pub index: usize,
    pub metric: String,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone)]
pub struct StudyTable {
    pub rows: Vec<StudyRow>,
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

impl StudyTable {
    /// Per (side, index, metric) medians, interquartile ranges and ranges.
    pub fn summaries(&self) -> Vec<StudySummary> {
        let mut out = Vec::new();
        let sides: Vec<String> = {
            let mut s: Vec<String> = self.rows.iter().map(|r| r.side.clone()).collect();
            s.dedup();
            s.sort();
            s.dedup();
            s
        };
        let max_index = self.rows.iter().map(|r| r.index).max().unwrap_or(0);
        for side in &sides {
            for index in 1..=max_index {
                for metric in ["ri", "ari", "nmi"] {
                    let mut vals: Vec<f64> = self
                        .rows
                        .iter()
                        .filter(|r| &r.side == side && r.index == index)
                        .map(|r| match metric {
                            "ri" => r.ri,
                            "ari" => r.ari,
                            _ => r.nmi,
                        })
                        .collect();
                    if vals.is_empty() {
                        continue;
                    }
                    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    out.push(StudySummary {
                        side: side.clone(),
                        index,
                        metric: metric.into(),
                        median: percentile(&vals, 0.5),
                        q1: percentile(&vals, 0.25),
                        q3: percentile(&vals, 0.75),
                        min: vals[0],
                        max: *vals.last().unwrap(),
                    });
                }
            }
        }
        out
    }
}

/// Generate -> fit -> score, `replicates` times. Replicates run
/// concurrently on independent derived seeds; row order is deterministic.
pub fn replicate_study(
    spec: &ScenarioSpec,
    replicates: usize,
    hyper: &Hyperparameters,
    fit: &RunConfig,
    ladder: &Ladder,
) -> Result<StudyTable> {
    spec.validate()?;
    let results: Result<Vec<Vec<StudyRow>>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut gen_rng = ChaCha8Rng::seed_from_u64(derive_seed(fit.seed, 0x5e0 + r as u64));
            let (y, z1_true, z2_true) = generate_scenario(spec, &mut gen_rng)?;
            let mut cfg = fit.clone();
            cfg.seed = derive_seed(fit.seed, 0xf17 + r as u64);
            cfg.threads = Some(1); // replicates already run in parallel
            let samples = run(&y, None, hyper, &cfg, ladder)?;
            let summary = summarize(&y, &samples, &[])?;
            let mut rows = Vec::new();
            for x in 0..y.m {
                let m1 = clustering_metrics(z1_true.labels(x), summary.zhat1.labels(x));
                rows.push(StudyRow {
                    replicate: r + 1,
                    side: "rows".into(),
                    index: x + 1,
                    ri: m1.ri,
                    ari: m1.ari,
                    nmi: m1.nmi,
                });
                if y.mode == Mode::Directed {
                    let m2 = clustering_metrics(z2_true.labels(x), summary.zhat2.labels(x));
                    rows.push(StudyRow {
                        replicate: r + 1,
                        side: "cols".into(),
                        index: x + 1,
                        ri: m2.ri,
                        ari: m2.ari,
                        nmi: m2.nmi,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    Ok(StudyTable {
        rows: results?.into_iter().flatten().collect(),
    })
}
