//! Collapsed Gibbs sweep over both partition sequences, persistence
//! indicators, and hyperparameters, at a given inverse temperature.
//!
//! One sweep scans, for each side: labels (x = 1..m, persistence-gated),
//! persistence indicators (x = 2..m), transition probabilities, and the
//! concentration parameter; the column pass is skipped in undirected mode.
//! Label moves keep the block counts incrementally in sync and respect the
//! forward compatibility constraint against index x+1.

use rand::distributions::Distribution;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, Normal};
use statrs::function::gamma::ln_gamma;

use crate::data::{Covariates, Hyperparameters, Mode, NetworkSequence};
use crate::error::Result;
use crate::likelihood::{attach_log_ratio, log_marginal_with, LikTables};
use crate::partition::{check_compatibility, PartitionSequence};
use crate::prior::{drpmw_sample, predictive_weights_from_counts, CrpwParams, PersistenceDraw};
use crate::stats::{
    build_suff_stats, col_counts_into, commit_detached_move, node_counts_into, row_counts_into,
    Axis, BlockSuffStats,
};
use crate::util::{sample_from_log_weights, sample_from_weights};

/// Engine switches; fixing a hyperparameter disables its update.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EngineOpts {
    pub fixed_alpha: Option<f64>,
    pub fixed_eta: Option<f64>,
    /// Standard deviation of the Gaussian log-scale proposal for eta.
    pub eta_proposal_sd: f64,
}

impl Default for EngineOpts {
    fn default() -> Self {
        EngineOpts {
            fixed_alpha: None,
            fixed_eta: None,
            eta_proposal_sd: 0.5,
        }
    }
}

/// Everything a sweep needs to read: data, covariates, hyperparameters.
pub struct ModelCtx<'a> {
    pub y: &'a NetworkSequence,
    pub w: Option<&'a Covariates>,
    pub hyper: &'a Hyperparameters,
    pub opts: EngineOpts,
}

impl<'a> ModelCtx<'a> {
    pub fn new(
        y: &'a NetworkSequence,
        w: Option<&'a Covariates>,
        hyper: &'a Hyperparameters,
        opts: EngineOpts,
    ) -> Result<Self> {
        hyper.validate()?;
        if hyper.a_theta.len() != y.c {
            return Err(crate::Error::Dimension(format!(
                "a_theta has {} entries for C = {}",
                hyper.a_theta.len(),
                y.c
            )));
        }
        if let Some(w) = w {
            if w.w.len() != y.n {
                return Err(crate::Error::Dimension(format!(
                    "{} covariates for {} nodes",
                    w.w.len(),
                    y.n
                )));
            }
            if hyper.a_w.len() != w.l {
                return Err(crate::Error::Dimension(format!(
                    "a_w has {} entries for L = {}",
                    hyper.a_w.len(),
                    w.l
                )));
            }
        }
        Ok(ModelCtx { y, w, hyper, opts })
    }

    fn crpw(&self, eta: f64) -> CrpwParams {
        match self.w {
            Some(_) => CrpwParams::supervised(eta, self.hyper.a_w.clone()),
            None => CrpwParams::unsupervised(eta),
        }
    }
}

/// One sequence's sampler state: labels, persistence draws, concentration.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqState {
    pub z: PartitionSequence,
    pub persistence: PersistenceDraw,
    pub eta: f64,
}

/// One tempered chain's full state (everything a replica swap moves).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub rows: SeqState,
    /// Column sequence; `None` in undirected mode, where the row sequence
    /// is shared by both axes.
    pub cols: Option<SeqState>,
    pub stats: BlockSuffStats,
    /// Untempered collapsed log-likelihood, refreshed at the end of every
    /// sweep.
    pub log_lik: f64,
}

impl ChainState {
    /// Initialize from a DRPM-w prior draw.
    pub fn from_prior(ctx: &ModelCtx, rng: &mut ChaCha8Rng) -> Result<ChainState> {
        let (n, m) = (ctx.y.n, ctx.y.m);
        let draw_side = |rng: &mut ChaCha8Rng| -> Result<SeqState> {
            let eta = ctx.opts.fixed_eta.unwrap_or(1.0);
            let alpha: Vec<f64> = match ctx.opts.fixed_alpha {
                Some(a) => vec![a; m - 1],
                None => {
                    let beta = Beta::new(ctx.hyper.a_alpha, ctx.hyper.b_alpha).expect("validated");
                    (0..m - 1).map(|_| beta.sample(rng)).collect()
                }
            };
            let params = ctx.crpw(eta);
            let (z, persistence) =
                drpmw_sample(n, m, &params, ctx.w.map(|w| w.w.as_slice()), &alpha, rng)?;
            Ok(SeqState {
                z,
                persistence,
                eta,
            })
        };
        let rows = draw_side(rng)?;
        let cols = match ctx.y.mode {
            Mode::Directed => Some(draw_side(rng)?),
            Mode::Undirected => None,
        };
        let col_z = cols
            .as_ref()
            .map(|c| c.z.clone())
            .unwrap_or_else(|| rows.z.clone());
        let stats = build_suff_stats(ctx.y, &rows.z, &col_z)?;
        let log_lik = crate::likelihood::log_marginal_likelihood(&stats, &ctx.hyper.a_theta);
        Ok(ChainState {
            rows,
            cols,
            stats,
            log_lik,
        })
    }

    /// Column labels: the column sequence in directed mode, the shared
    /// sequence otherwise.
    pub fn col_z(&self) -> &PartitionSequence {
        self.cols.as_ref().map(|c| &c.z).unwrap_or(&self.rows.z)
    }

    /// Re-derive everything from scratch and check the incremental state:
    /// stats, compatibility, canonical labels, cached log-likelihood.
    pub fn validate(&self, ctx: &ModelCtx) -> Result<()> {
        let rebuilt = build_suff_stats(ctx.y, &self.rows.z, self.col_z())?;
        if rebuilt != self.stats {
            return Err(crate::Error::Invalid(
                "incremental stats diverged from rebuild".into(),
            ));
        }
        for side in [Some(&self.rows), self.cols.as_ref()].into_iter().flatten() {
            for t in 0..ctx.y.m - 1 {
                let keep = side.persistence.persisting(t);
                if !check_compatibility(side.z.labels(t), side.z.labels(t + 1), &keep) {
                    return Err(crate::Error::Invalid(format!(
                        "compatibility violated at transition {}",
                        t + 1
                    )));
                }
            }
        }
        let fresh = crate::likelihood::log_marginal_likelihood(&self.stats, &ctx.hyper.a_theta);
        if (fresh - self.log_lik).abs() > 1e-6 {
            return Err(crate::Error::Invalid(format!(
                "stale log-likelihood cache: {} vs {}",
                self.log_lik, fresh
            )));
        }
        Ok(())
    }
}

/// Reusable per-chain buffers plus the log-gamma memo tables.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub(crate) tables: LikTables,
    per: Vec<u32>,
    sizes: Vec<u32>,
    covm: Vec<u32>,
    cand: Vec<Option<usize>>,
    logw: Vec<f64>,
    weights: Vec<f64>,
    persister: Vec<bool>,
}

impl Workspace {
    pub fn new(hyper: &Hyperparameters) -> Self {
        Workspace {
            tables: LikTables::new(&hyper.a_theta),
            per: Vec::new(),
            sizes: Vec::new(),
            covm: Vec::new(),
            cand: Vec::new(),
            logw: Vec::new(),
            weights: Vec::new(),
            persister: Vec::new(),
        }
    }
}

/// Eq.-5 persistence probability given the compatibility indicator and the
/// reduced-partition seating ratio R.
pub fn persistence_probability(alpha: f64, ratio: f64, compatible: bool) -> f64 {
    if !compatible {
        return 0.0;
    }
    alpha / (alpha + (1.0 - alpha) * ratio)
}

/// Candidate filter imposed by compatibility with the next index.
enum Allowed {
    All,
    /// Only the cluster currently hosting i's forward block-mates.
    Only(usize),
    /// i is a forward singleton: clusters free of persisting nodes, or a
    /// fresh one.
    NoPersisters,
}

impl Allowed {
    fn permits(&self, h: usize, persister: &[bool]) -> bool {
        match self {
            Allowed::All => true,
            Allowed::Only(only) => h == *only,
            Allowed::NoPersisters => !persister[h],
        }
    }

    fn permits_fresh(&self) -> bool {
        !matches!(self, Allowed::Only(_))
    }
}

fn sweep_side(
    own: &mut SeqState,
    other_z: Option<&PartitionSequence>,
    stats: &mut BlockSuffStats,
    axis: Axis,
    ctx: &ModelCtx,
    beta: f64,
    rng: &mut ChaCha8Rng,
    ws: &mut Workspace,
) {
    let (n, m) = (ctx.y.n, ctx.y.m);
    for x in 0..m {
        for i in 0..n {
            if x > 0 && own.persistence.gamma[x - 1][i] {
                continue;
            }
            update_label(own, other_z, stats, axis, ctx, beta, x, i, rng, ws);
        }
    }
    for t in 0..m - 1 {
        for i in 0..n {
            update_gamma(own, ctx, t, i, rng, ws);
        }
    }
    if ctx.opts.fixed_alpha.is_none() {
        update_alpha(own, ctx, rng);
    }
    if ctx.opts.fixed_eta.is_none() {
        update_eta(own, ctx, rng);
    }
}

/// One full systematic scan; refreshes the cached log-likelihood.
pub fn sweep(
    state: &mut ChainState,
    ctx: &ModelCtx,
    beta: f64,
    rng: &mut ChaCha8Rng,
    ws: &mut Workspace,
) {
    let ChainState {
        rows, cols, stats, ..
    } = state;
    match cols {
        Some(cols) => {
            sweep_side(rows, Some(&cols.z), stats, Axis::Row, ctx, beta, rng, ws);
            sweep_side(cols, Some(&rows.z), stats, Axis::Col, ctx, beta, rng, ws);
        }
        None => sweep_side(rows, None, stats, Axis::Node, ctx, beta, rng, ws),
    }
    state.log_lik = log_marginal_with(&state.stats, &mut ws.tables);
}

#[allow(clippy::too_many_arguments)]
fn update_label(
    own: &mut SeqState,
    other_z: Option<&PartitionSequence>,
    stats: &mut BlockSuffStats,
    axis: Axis,
    ctx: &ModelCtx,
    beta: f64,
    x: usize,
    i: usize,
    rng: &mut ChaCha8Rng,
    ws: &mut Workspace,
) {
    let n = ctx.y.n;
    let supervised = ctx.w.is_some();
    let w = ctx.w.map(|c| c.w.as_slice());
    let idx = stats.index_mut(x);
    let own_len = match axis {
        Axis::Row | Axis::Node => idx.rows(),
        Axis::Col => idx.cols(),
    };
    let (z_x, z_next) = own.z.labels_pair_mut(x);
    let f = z_x[i];

    // the moving node's per-opposite-cluster category counts
    match axis {
        Axis::Row => row_counts_into(
            ctx.y,
            x,
            i,
            other_z.unwrap().labels(x),
            idx.cols(),
            &mut ws.per,
        ),
        Axis::Col => col_counts_into(
            ctx.y,
            x,
            i,
            other_z.unwrap().labels(x),
            idx.rows(),
            &mut ws.per,
        ),
        Axis::Node => node_counts_into(ctx.y, x, i, z_x, idx.rows(), &mut ws.per),
    }
    idx.detach(axis, f, &ws.per);

    // occupancy without i, and macro-category matches when supervised
    ws.sizes.clear();
    ws.sizes.resize(own_len, 0);
    ws.covm.clear();
    ws.covm.resize(own_len, 0);
    for (j, &zj) in z_x.iter().enumerate() {
        if j == i {
            continue;
        }
        ws.sizes[zj] += 1;
        if supervised && w.unwrap()[j] == w.unwrap()[i] {
            ws.covm[zj] += 1;
        }
    }
    let f_empty = ws.sizes[f] == 0;

    // forward compatibility: which seats keep index x+1 reachable
    ws.persister.clear();
    ws.persister.resize(own_len, false);
    let allowed = match z_next {
        Some(z_next) if own.persistence.gamma[x][i] => {
            let gamma_next = &own.persistence.gamma[x];
            let mut mate_cluster = None;
            for j in 0..n {
                if j == i || !gamma_next[j] {
                    continue;
                }
                ws.persister[z_x[j]] = true;
                if z_next[j] == z_next[i] {
                    debug_assert!(
                        mate_cluster.is_none() || mate_cluster == Some(z_x[j]),
                        "forward block-mates split across clusters"
                    );
                    mate_cluster = Some(z_x[j]);
                }
            }
            match mate_cluster {
                Some(h) => Allowed::Only(h),
                None => Allowed::NoPersisters,
            }
        }
        _ => Allowed::All,
    };

    // prior seating weights over existing clusters + fresh
    let eta = own.eta;
    let params = ctx.crpw(eta);
    let a_wi = if supervised {
        ctx.hyper.a_w[w.unwrap()[i]]
    } else {
        0.0
    };
    predictive_weights_from_counts(
        &params,
        &ws.sizes,
        supervised.then_some(&ws.covm),
        a_wi,
        &mut ws.weights,
    );

    ws.cand.clear();
    ws.logw.clear();
    for h in 0..own_len {
        if ws.sizes[h] == 0 || !allowed.permits(h, &ws.persister) {
            continue;
        }
        let mut lw = ws.weights[h].ln();
        if beta > 0.0 {
            lw += beta * attach_log_ratio(idx, axis, h, &ws.per, &mut ws.tables);
        }
        ws.cand.push(Some(h));
        ws.logw.push(lw);
    }
    if allowed.permits_fresh() {
        let mut lw = ws.weights[own_len].ln();
        if beta > 0.0 {
            lw += beta * attach_log_ratio(idx, axis, own_len, &ws.per, &mut ws.tables);
        }
        ws.cand.push(None);
        ws.logw.push(lw);
    }
    assert!(!ws.cand.is_empty(), "no admissible seat for node {i}");

    let pick = sample_from_log_weights(&mut ws.logw, rng);
    commit_detached_move(idx, axis, z_x, i, f, f_empty, ws.cand[pick], &ws.per);
}

fn update_gamma(
    own: &mut SeqState,
    ctx: &ModelCtx,
    t: usize,
    i: usize,
    rng: &mut ChaCha8Rng,
    ws: &mut Workspace,
) {
    let n = ctx.y.n;
    let alpha = own.persistence.alpha[t];
    let z_prev = own.z.labels(t);
    let z_cur = own.z.labels(t + 1);
    let gamma = &own.persistence.gamma[t];
    let supervised = ctx.w.is_some();
    let w = ctx.w.map(|c| c.w.as_slice());

    // indicator: including i keeps the restrictions to x-1 and x matched
    let mut compatible = true;
    let h_count = own.z.h(t + 1);
    ws.sizes.clear();
    ws.sizes.resize(h_count, 0);
    ws.covm.clear();
    ws.covm.resize(h_count, 0);
    for j in 0..n {
        if j == i || !gamma[j] {
            continue;
        }
        let mate_prev = z_prev[j] == z_prev[i];
        let mate_cur = z_cur[j] == z_cur[i];
        if mate_prev != mate_cur {
            compatible = false;
            break;
        }
        ws.sizes[z_cur[j]] += 1;
        if supervised && w.unwrap()[j] == w.unwrap()[i] {
            ws.covm[z_cur[j]] += 1;
        }
    }

    let p1 = if !compatible {
        0.0
    } else {
        let params = ctx.crpw(own.eta);
        let a_wi = if supervised {
            ctx.hyper.a_w[w.unwrap()[i]]
        } else {
            0.0
        };
        predictive_weights_from_counts(
            &params,
            &ws.sizes,
            supervised.then_some(&ws.covm),
            a_wi,
            &mut ws.weights,
        );
        let total: f64 = ws.weights.iter().sum();
        let seat = if ws.sizes[z_cur[i]] > 0 {
            ws.weights[z_cur[i]]
        } else {
            ws.weights[h_count]
        };
        persistence_probability(alpha, seat / total, true)
    };
    own.persistence.gamma[t][i] = rng.gen_bool(p1);
}

fn update_alpha(own: &mut SeqState, ctx: &ModelCtx, rng: &mut ChaCha8Rng) {
    let n = ctx.y.n as f64;
    for t in 0..own.persistence.gamma.len() {
        let s = own.persistence.gamma[t].iter().filter(|&&g| g).count() as f64;
        let beta = Beta::new(ctx.hyper.a_alpha + s, ctx.hyper.b_alpha + n - s).expect("positive");
        own.persistence.alpha[t] = beta.sample(rng);
    }
}

/// Per-index concentration factors of the sequence prior: the number of
/// clusters born during re-seating and the persisting-node count. Index 1
/// re-seats everyone from an empty base.
fn eta_factors(own: &SeqState, n: usize) -> Vec<(u32, u32)> {
    let m = own.z.m();
    let mut out = Vec::with_capacity(m);
    out.push((own.z.h(0) as u32, 0));
    for t in 0..m - 1 {
        let z_cur = own.z.labels(t + 1);
        let gamma = &own.persistence.gamma[t];
        let h = own.z.h(t + 1);
        let mut persisted = vec![false; h];
        let mut g = 0u32;
        for j in 0..z_cur.len() {
            if gamma[j] {
                persisted[z_cur[j]] = true;
                g += 1;
            }
        }
        let fresh = persisted.iter().filter(|&&p| !p).count() as u32;
        out.push((fresh, g));
    }
    let _ = n;
    out
}

fn eta_log_target(eta: f64, factors: &[(u32, u32)], n: usize, hyper: &Hyperparameters) -> f64 {
    let mut lt = (hyper.a_eta - 1.0) * eta.ln() - hyper.b_eta * eta;
    for &(fresh, g) in factors {
        lt += fresh as f64 * eta.ln() + ln_gamma(eta + g as f64) - ln_gamma(eta + n as f64);
    }
    lt
}

fn update_eta(own: &mut SeqState, ctx: &ModelCtx, rng: &mut ChaCha8Rng) {
    let n = ctx.y.n;
    let factors = eta_factors(own, n);
    let cur = own.eta;
    let noise: f64 = Normal::new(0.0, 1.0).unwrap().sample(rng);
    let prop = (cur.ln() + ctx.opts.eta_proposal_sd * noise).exp();
    if !prop.is_finite() || prop <= 0.0 {
        return;
    }
    // log-scale proposal: Jacobian contributes ln(eta) to each side
    let log_accept = eta_log_target(prop, &factors, n, ctx.hyper) + prop.ln()
        - eta_log_target(cur, &factors, n, ctx.hyper)
        - cur.ln();
    if log_accept >= 0.0 || rng.gen::<f64>().ln() < log_accept {
        own.eta = prop;
    }
}

/// Normalized full-conditional over seats for one label update, exposed
/// for exactness tests. Entries align with `(seat, probability)` where
/// `None` is the fresh-cluster seat.
#[doc(hidden)]
pub fn label_conditional(
    state: &ChainState,
    ctx: &ModelCtx,
    side_cols: bool,
    beta: f64,
    x: usize,
    i: usize,
) -> Vec<(Option<usize>, f64)> {
    let mut st = state.clone();
    let mut ws = Workspace::new(ctx.hyper);
    let ChainState {
        rows, cols, stats, ..
    } = &mut st;
    let (own, other_z, axis) = if side_cols {
        (cols.as_mut().expect("directed"), Some(&rows.z), Axis::Col)
    } else {
        match cols {
            Some(c) => (rows, Some(&c.z), Axis::Row),
            None => (rows, None, Axis::Node),
        }
    };
    // replicate update_label's candidate enumeration without sampling
    let n = ctx.y.n;
    let supervised = ctx.w.is_some();
    let w = ctx.w.map(|c| c.w.as_slice());
    let idx = stats.index_mut(x);
    let own_len = match axis {
        Axis::Row | Axis::Node => idx.rows(),
        Axis::Col => idx.cols(),
    };
    let (z_x, z_next) = own.z.labels_pair_mut(x);
    let f = z_x[i];
    match axis {
        Axis::Row => row_counts_into(
            ctx.y,
            x,
            i,
            other_z.unwrap().labels(x),
            idx.cols(),
            &mut ws.per,
        ),
        Axis::Col => col_counts_into(
            ctx.y,
            x,
            i,
            other_z.unwrap().labels(x),
            idx.rows(),
            &mut ws.per,
        ),
        Axis::Node => node_counts_into(ctx.y, x, i, z_x, idx.rows(), &mut ws.per),
    }
    idx.detach(axis, f, &ws.per);
    ws.sizes.clear();
    ws.sizes.resize(own_len, 0);
    ws.covm.clear();
    ws.covm.resize(own_len, 0);
    for (j, &zj) in z_x.iter().enumerate() {
        if j == i {
            continue;
        }
        ws.sizes[zj] += 1;
        if supervised && w.unwrap()[j] == w.unwrap()[i] {
            ws.covm[zj] += 1;
        }
    }
    ws.persister.clear();
    ws.persister.resize(own_len, false);
    let allowed = match z_next {
        Some(z_next) if own.persistence.gamma[x][i] => {
            let gamma_next = &own.persistence.gamma[x];
            let mut mate_cluster = None;
            for j in 0..n {
                if j == i || !gamma_next[j] {
                    continue;
                }
                ws.persister[z_x[j]] = true;
                if z_next[j] == z_next[i] {
                    mate_cluster = Some(z_x[j]);
                }
            }
            match mate_cluster {
                Some(h) => Allowed::Only(h),
                None => Allowed::NoPersisters,
            }
        }
        _ => Allowed::All,
    };
    let params = ctx.crpw(own.eta);
    let a_wi = if supervised {
        ctx.hyper.a_w[w.unwrap()[i]]
    } else {
        0.0
    };
    predictive_weights_from_counts(
        &params,
        &ws.sizes,
        supervised.then_some(&ws.covm),
        a_wi,
        &mut ws.weights,
    );
    let mut out = Vec::new();
    let mut logw = Vec::new();
    for h in 0..own_len {
        if ws.sizes[h] == 0 || !allowed.permits(h, &ws.persister) {
            continue;
        }
        let mut lw = ws.weights[h].ln();
        if beta > 0.0 {
            lw += beta * attach_log_ratio(idx, axis, h, &ws.per, &mut ws.tables);
        }
        out.push((Some(h), 0.0));
        logw.push(lw);
    }
    if allowed.permits_fresh() {
        let mut lw = ws.weights[own_len].ln();
        if beta > 0.0 {
            lw += beta * attach_log_ratio(idx, axis, own_len, &ws.per, &mut ws.tables);
        }
        out.push((None, 0.0));
        logw.push(lw);
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = logw.iter().map(|lw| (lw - max).exp()).sum();
    for (slot, lw) in out.iter_mut().zip(&logw) {
        slot.1 = (lw - max).exp() / total;
    }
    out
}

/// Draw from the weights vector by inverse CDF; exposed for determinism
/// tests of the sampling path.
#[doc(hidden)]
pub fn sample_weighted(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    sample_from_weights(weights, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CatMatrix;
    use crate::likelihood::{log_marginal_likelihood, row_move_log_ratio, Seat};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma as GammaDist};

    fn toy_network(rng: &mut ChaCha8Rng, n: usize, m: usize, c: usize) -> NetworkSequence {
        let mats: Vec<CatMatrix> = (0..m)
            .map(|_| CatMatrix::new(n, (0..n * n).map(|_| rng.gen_range(0..c) as u8).collect()))
            .collect();
        NetworkSequence::new(n, c, Mode::Directed, true, mats).unwrap()
    }

    #[test]
    fn persistence_probability_hand_values() {
        // indicator fails -> 0
        assert_eq!(persistence_probability(0.9, 0.2, false), 0.0);
        // alpha = 1 and indicator holds -> 1
        assert_eq!(persistence_probability(1.0, 5.0, true), 1.0);
        // alpha = 0.5, R = 0.25 -> 0.8
        assert_abs_diff_eq!(
            persistence_probability(0.5, 0.25, true),
            0.8,
            epsilon = 1e-15
        );
    }

    #[test]
    fn alpha_full_conditional_parameters() {
        // all gammas on, Beta(1,1), n = 10 -> Beta(11, 1); some off -> Beta(5, 7)
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y = toy_network(&mut rng, 10, 2, 2);
        let hyper = Hyperparameters::diffuse(2, 1);
        let ctx = ModelCtx::new(&y, None, &hyper, EngineOpts::default()).unwrap();
        let mut state = ChainState::from_prior(&ctx, &mut rng).unwrap();
        state.rows.persistence.gamma[0] = vec![true; 10];
        let draws = 100_000;
        let mut sum = 0.0;
        for _ in 0..draws {
            update_alpha(&mut state.rows, &ctx, &mut rng);
            sum += state.rows.persistence.alpha[0];
        }
        // Beta(11, 1) has mean 11/12 and sd ~ 0.0765
        let mean = sum / draws as f64;
        let se = 0.0765 / (draws as f64).sqrt() * 3.0;
        assert!((mean - 11.0 / 12.0).abs() < se + 1e-3, "mean {mean}");

        state.rows.persistence.gamma[0] = vec![
            true, true, true, true, false, false, false, false, false, false,
        ];
        let mut sum = 0.0;
        for _ in 0..draws {
            update_alpha(&mut state.rows, &ctx, &mut rng);
            sum += state.rows.persistence.alpha[0];
        }
        let mean = sum / draws as f64;
        // Beta(5, 7): mean 5/12, sd ~ 0.1367
        let se = 0.1367 / (draws as f64).sqrt() * 3.0;
        assert!((mean - 5.0 / 12.0).abs() < se + 1e-3, "mean {mean}");
    }

    #[test]
    fn sweeps_are_replayable_and_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let y = toy_network(&mut rng, 8, 3, 3);
        let hyper = Hyperparameters {
            a_eta: 2.0,
            b_eta: 2.0,
            ..Hyperparameters::diffuse(3, 1)
        };
        let ctx = ModelCtx::new(&y, None, &hyper, EngineOpts::default()).unwrap();
        let mut a = ChainState::from_prior(&ctx, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut b = a.clone();
        let mut ws_a = Workspace::new(&hyper);
        let mut ws_b = Workspace::new(&hyper);
        let mut rng_a = ChaCha8Rng::seed_from_u64(99);
        let mut rng_b = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..25 {
            sweep(&mut a, &ctx, 1.0, &mut rng_a, &mut ws_a);
            sweep(&mut b, &ctx, 1.0, &mut rng_b, &mut ws_b);
        }
        assert_eq!(a, b);
        a.validate(&ctx).unwrap();
    }

    #[test]
    fn supervised_sweeps_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let y = toy_network(&mut rng, 7, 3, 3);
        let w = Covariates::new(vec![0, 1, 2, 0, 1, 2, 0], 3).unwrap();
        let hyper = Hyperparameters {
            a_eta: 2.0,
            b_eta: 2.0,
            a_w: vec![0.5, 1.0, 2.0],
            ..Hyperparameters::diffuse(3, 3)
        };
        let ctx = ModelCtx::new(&y, Some(&w), &hyper, EngineOpts::default()).unwrap();
        let mut state = ChainState::from_prior(&ctx, &mut rng).unwrap();
        let mut ws = Workspace::new(&hyper);
        for _ in 0..40 {
            sweep(&mut state, &ctx, 0.7, &mut rng, &mut ws);
        }
        state.validate(&ctx).unwrap();
    }

    #[test]
    fn undirected_sweeps_share_one_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 8;
        let mut mats = Vec::new();
        for _ in 0..2 {
            let mut v = vec![0u8; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let c = rng.gen_range(0..3);
                    v[i * n + j] = c;
                    v[j * n + i] = c;
                }
            }
            mats.push(CatMatrix::new(n, v));
        }
        let y = NetworkSequence::new(n, 3, Mode::Undirected, false, mats).unwrap();
        let hyper = Hyperparameters {
            a_eta: 2.0,
            b_eta: 2.0,
            ..Hyperparameters::diffuse(3, 1)
        };
        let ctx = ModelCtx::new(&y, None, &hyper, EngineOpts::default()).unwrap();
        let mut state = ChainState::from_prior(&ctx, &mut rng).unwrap();
        assert!(state.cols.is_none());
        let mut ws = Workspace::new(&hyper);
        for _ in 0..30 {
            sweep(&mut state, &ctx, 1.0, &mut rng, &mut ws);
        }
        state.validate(&ctx).unwrap();
    }

    /// The label full conditional factorizes as Eq.-3 predictive times the
    /// tempered Eq.-7 ratio (both independently validated).
    #[test]
    fn label_conditional_matches_prior_times_likelihood() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let y = toy_network(&mut rng, 5, 1, 2);
        let hyper = Hyperparameters::diffuse(2, 1);
        let opts = EngineOpts {
            fixed_eta: Some(1.0),
            fixed_alpha: Some(0.5),
            ..EngineOpts::default()
        };
        let ctx = ModelCtx::new(&y, None, &hyper, opts).unwrap();
        let state = ChainState::from_prior(&ctx, &mut rng).unwrap();
        for beta in [0.0, 0.5, 1.0] {
            for i in 0..5 {
                let cond = label_conditional(&state, &ctx, false, beta, 0, i);
                // independent route: CRP predictive x exp(beta * Eq. 7)
                let z1 = state.rows.z.labels(0);
                let z2 = state.col_z().labels(0);
                let mut rest: Vec<usize> = Vec::new();
                let mut remap = std::collections::BTreeMap::new();
                for (j, &l) in z1.iter().enumerate() {
                    if j != i {
                        let next = remap.len();
                        let lab = *remap.entry(l).or_insert(next);
                        rest.push(lab);
                    }
                }
                let pred =
                    crate::prior::crpw_predictive(&CrpwParams::unsupervised(1.0), &rest, None, 0);
                // order of live clusters by original label
                let live: Vec<usize> = remap.keys().copied().collect();
                let mut expected: Vec<(Option<usize>, f64)> = Vec::new();
                for (pos, &h) in live.iter().enumerate() {
                    let lik = row_move_log_ratio(
                        &state.stats,
                        &y,
                        0,
                        i,
                        Seat::Existing(h),
                        z1,
                        z2,
                        &hyper.a_theta,
                    );
                    expected.push((Some(h), pred[pos].ln() + beta * lik));
                }
                let lik_fresh =
                    row_move_log_ratio(&state.stats, &y, 0, i, Seat::Fresh, z1, z2, &hyper.a_theta);
                expected.push((None, pred[live.len()].ln() + beta * lik_fresh));
                let max = expected
                    .iter()
                    .map(|e| e.1)
                    .fold(f64::NEG_INFINITY, f64::max);
                let total: f64 = expected.iter().map(|e| (e.1 - max).exp()).sum();
                for e in &mut expected {
                    e.1 = (e.1 - max).exp() / total;
                }
                assert_eq!(cond.len(), expected.len());
                let total: f64 = cond.iter().map(|e| e.1).sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
                for (got, want) in cond.iter().zip(&expected) {
                    assert_eq!(got.0, want.0);
                    assert_abs_diff_eq!(got.1, want.1, epsilon = 1e-10);
                }
            }
        }
    }

    /// Moving i to a candidate that would merge forward-separated clusters
    /// gets probability zero.
    #[test]
    fn forward_indicator_excludes_merging_candidates() {
        // m = 2, n = 4; at x = 1 persisting nodes {1, 2} sit in separate
        // clusters; node 0 persists and shares a cluster with node 1 at
        // x = 1, so at x = 0 it may only sit with node 1.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let y = toy_network(&mut rng, 4, 2, 2);
        let hyper = Hyperparameters::diffuse(2, 1);
        let opts = EngineOpts {
            fixed_eta: Some(1.0),
            fixed_alpha: Some(0.5),
            ..EngineOpts::default()
        };
        let ctx = ModelCtx::new(&y, None, &hyper, opts).unwrap();
        let mut state = ChainState::from_prior(&ctx, &mut rng).unwrap();
        let z = PartitionSequence::new(vec![vec![0, 0, 1, 2], vec![0, 0, 1, 1]]).unwrap();
        state.rows.persistence.gamma[0] = vec![true, true, true, false];
        state.rows.z = z;
        state.stats = build_suff_stats(&y, &state.rows.z, &state.cols.as_ref().unwrap().z).unwrap();
        state.log_lik = log_marginal_likelihood(&state.stats, &hyper.a_theta);

        let cond = label_conditional(&state, &ctx, false, 1.0, 0, 0);
        // node 0 must stay with node 1's cluster (label 0); cluster 1
        // (node 2, persisting, separated at x+1) and fresh are excluded
        assert_eq!(cond.len(), 1);
        assert_eq!(cond[0].0, Some(0));
        assert_abs_diff_eq!(cond[0].1, 1.0, epsilon = 1e-12);
    }

    /// Metropolis eta update matches the Escobar-West stationary law on a
    /// single fixed partition (m = 1).
    #[test]
    fn eta_update_matches_escobar_west() {
        let n = 8usize;
        let h = 3usize;
        let (a, b) = (2.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2025);
        let y = toy_network(&mut rng, n, 1, 2);
        let hyper = Hyperparameters {
            a_eta: a,
            b_eta: b,
            ..Hyperparameters::diffuse(2, 1)
        };
        let ctx = ModelCtx::new(&y, None, &hyper, EngineOpts::default()).unwrap();
        let mut state = ChainState::from_prior(&ctx, &mut rng).unwrap();
        state.rows.z = PartitionSequence::new(vec![vec![0, 0, 0, 1, 1, 1, 2, 2]]).unwrap();
        assert_eq!(state.rows.z.h(0), h);

        // reference: auxiliary-variable Gibbs (phi ~ Beta(eta+1, n), then a
        // two-Gamma mixture)
        let mut eta_ref = 1.0f64;
        let mut ref_samples = Vec::new();
        for it in 0..60_000 {
            let phi: f64 = Beta::new(eta_ref + 1.0, n as f64).unwrap().sample(&mut rng);
            let odds = (a + h as f64 - 1.0) / ((n as f64) * (b - phi.ln()));
            let shape = if rng.gen::<f64>() < odds / (1.0 + odds) {
                a + h as f64
            } else {
                a + h as f64 - 1.0
            };
            eta_ref = GammaDist::new(shape, b - phi.ln())
                .unwrap()
                .sample(&mut rng);
            if it >= 10_000 && it % 5 == 0 {
                ref_samples.push(eta_ref);
            }
        }

        let mut mh_samples = Vec::new();
        for it in 0..60_000 {
            update_eta(&mut state.rows, &ctx, &mut rng);
            if it >= 10_000 && it % 5 == 0 {
                mh_samples.push(state.rows.eta);
            }
        }

        // two-sample chi-squared over reference deciles
        let mut sorted = ref_samples.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let bins = 10;
        let edges: Vec<f64> = (1..bins).map(|q| sorted[q * sorted.len() / bins]).collect();
        let count = |samples: &[f64]| {
            let mut c = vec![0f64; bins];
            for &s in samples {
                let b = edges.iter().take_while(|&&e| s >= e).count();
                c[b] += 1.0;
            }
            c
        };
        let c1 = count(&ref_samples);
        let c2 = count(&mh_samples);
        let chi2: f64 = c1
            .iter()
            .zip(&c2)
            .map(|(&o1, &o2)| (o1 - o2).powi(2) / (o1 + o2))
            .sum();
        let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.01, "chi2 {chi2}, p {p}");
    }

    #[test]
    fn zero_proposal_step_freezes_eta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = toy_network(&mut rng, 5, 2, 2);
        let hyper = Hyperparameters {
            a_eta: 2.0,
            b_eta: 2.0,
            ..Hyperparameters::diffuse(2, 1)
        };
        let opts = EngineOpts {
            eta_proposal_sd: 0.0,
            ..EngineOpts::default()
        };
        let ctx = ModelCtx::new(&y, None, &hyper, opts).unwrap();
        let mut state = ChainState::from_prior(&ctx, &mut rng).unwrap();
        let before = state.rows.eta;
        for _ in 0..100 {
            update_eta(&mut state.rows, &ctx, &mut rng);
        }
        assert_eq!(state.rows.eta, before);
    }
}
