//! Dirichlet-categorical collapsed likelihood and single-move ratios.
//!
//! With the block probability vectors integrated out, the joint likelihood
//! is a product of Dirichlet-categorical marginals per block and index;
//! undirected mode runs the block product over the lower triangle h >= k.
//! Everything here evaluates on integer counts, so log-gamma values at
//! `a + t` are memoized in growable per-`a` tables.

use statrs::function::gamma::ln_gamma;

use crate::data::Mode;
use crate::error::{Error, Result};
use crate::stats::{
    col_counts_into, node_counts_into, row_counts_into, Axis, BlockSuffStats, IndexStats,
};
use crate::util::compensated_sum;
use crate::NetworkSequence;

/// Memoized ln Gamma(offset + t) over integer t.
#[derive(Debug, Clone)]
pub struct LogGammaTable {
    offset: f64,
    vals: Vec<f64>,
}

impl LogGammaTable {
    pub fn new(offset: f64) -> Self {
        assert!(offset > 0.0);
        LogGammaTable {
            offset,
            vals: Vec::new(),
        }
    }

    #[inline]
    pub fn get(&mut self, t: u32) -> f64 {
        let t = t as usize;
        if t >= self.vals.len() {
            let mut next = self.vals.len();
            self.vals.reserve(t + 1 - next);
            while next <= t {
                self.vals.push(ln_gamma(self.offset + next as f64));
                next += 1;
            }
        }
        self.vals[t]
    }
}

/// Per-chain memo tables for one `a_theta` vector.
#[derive(Debug, Clone)]
pub struct LikTables {
    /// Category c -> index into `tables` (distinct a values share tables).
    per_cat: Vec<usize>,
    tables: Vec<LogGammaTable>,
    dot: LogGammaTable,
}

impl LikTables {
    pub fn new(a_theta: &[f64]) -> Self {
        assert!(a_theta.len() >= 2 && a_theta.iter().all(|&a| a > 0.0));
        let mut distinct: Vec<f64> = Vec::new();
        let per_cat = a_theta
            .iter()
            .map(|&a| match distinct.iter().position(|&d| d == a) {
                Some(p) => p,
                None => {
                    distinct.push(a);
                    distinct.len() - 1
                }
            })
            .collect();
        LikTables {
            per_cat,
            tables: distinct.into_iter().map(LogGammaTable::new).collect(),
            dot: LogGammaTable::new(a_theta.iter().sum()),
        }
    }

    #[inline]
    fn cat(&mut self, c: usize, t: u32) -> f64 {
        self.tables[self.per_cat[c]].get(t)
    }

    /// Contribution of one block: ln Gamma(a.)/Gamma(a. + tot) +
    /// sum_c ln Gamma(a_c + n_c)/Gamma(a_c).
    fn block_term(&mut self, counts: &[u32], total: u32) -> f64 {
        if total == 0 {
            return 0.0;
        }
        let mut term = self.dot.get(0) - self.dot.get(total);
        for (c, &cnt) in counts.iter().enumerate() {
            if cnt > 0 {
                term += self.cat(c, cnt) - self.cat(c, 0);
            }
        }
        term
    }
}

pub(crate) fn log_marginal_with(stats: &BlockSuffStats, tables: &mut LikTables) -> f64 {
    let mut terms = Vec::new();
    for x in 0..stats.m() {
        let idx = stats.index(x);
        for h in 0..idx.rows() {
            let k_hi = match stats.mode {
                Mode::Directed => idx.cols(),
                Mode::Undirected => h + 1,
            };
            for k in 0..k_hi {
                terms.push(tables.block_term(idx.block(h, k), idx.total(h, k)));
            }
        }
    }
    compensated_sum(terms)
}

/// Log of the collapsed likelihood (sum over indices and blocks).
pub fn log_marginal_likelihood(stats: &BlockSuffStats, a_theta: &[f64]) -> f64 {
    log_marginal_with(stats, &mut LikTables::new(a_theta))
}

/// `beta * log_marginal_likelihood`; hot chains flatten the likelihood.
pub fn tempered_log_likelihood(stats: &BlockSuffStats, a_theta: &[f64], beta: f64) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::Invalid(format!(
            "inverse temperature must be positive, got {beta}"
        )));
    }
    debug_assert!(beta <= 1.0);
    Ok(beta * log_marginal_likelihood(stats, a_theta))
}

/// Candidate seat for a single-node move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seat {
    /// An existing cluster label (must keep at least one other member).
    Existing(usize),
    /// Open a fresh cluster.
    Fresh,
}

/// Log-likelihood ratio of attaching per-opposite-cluster counts `per` at
/// candidate cluster `cand` of a detached index (the moving node's counts
/// already subtracted). `cand == axis length` means a fresh cluster.
pub(crate) fn attach_log_ratio(
    idx: &IndexStats,
    axis: Axis,
    cand: usize,
    per: &[u32],
    tables: &mut LikTables,
) -> f64 {
    let c = per.len() / opposite_len(idx, axis).max(1);
    let mut out = 0.0;
    for k in 0..opposite_len(idx, axis) {
        let add = &per[k * c..(k + 1) * c];
        let add_tot: u32 = add.iter().sum();
        if add_tot == 0 {
            continue;
        }
        let fresh = cand >= own_len(idx, axis);
        let (base, base_tot) = if fresh {
            (None, 0)
        } else {
            match axis {
                Axis::Row | Axis::Node => (Some(idx.block(cand, k)), idx.total(cand, k)),
                Axis::Col => (Some(idx.block(k, cand)), idx.total(k, cand)),
            }
        };
        out += tables.dot.get(base_tot) - tables.dot.get(base_tot + add_tot);
        for (cc, &a) in add.iter().enumerate() {
            if a > 0 {
                let b = base.map_or(0, |blk| blk[cc]);
                out += tables.cat(cc, b + a) - tables.cat(cc, b);
            }
        }
    }
    out
}

fn own_len(idx: &IndexStats, axis: Axis) -> usize {
    match axis {
        Axis::Row | Axis::Node => idx.rows(),
        Axis::Col => idx.cols(),
    }
}

fn opposite_len(idx: &IndexStats, axis: Axis) -> usize {
    match axis {
        Axis::Row => idx.cols(),
        Axis::Col | Axis::Node => idx.rows(),
    }
}

fn move_log_ratio(
    stats: &BlockSuffStats,
    y: &NetworkSequence,
    x: usize,
    i: usize,
    seat: Seat,
    own_labels: &[usize],
    opposite_labels: &[usize],
    axis: Axis,
    a_theta: &[f64],
) -> f64 {
    let mut tables = LikTables::new(a_theta);
    let mut idx = stats.index(x).clone();
    let mut per = Vec::new();
    match axis {
        Axis::Row => row_counts_into(y, x, i, opposite_labels, idx.cols(), &mut per),
        Axis::Col => col_counts_into(y, x, i, opposite_labels, idx.rows(), &mut per),
        Axis::Node => node_counts_into(y, x, i, own_labels, idx.rows(), &mut per),
    }
    idx.detach(axis, own_labels[i], &per);
    let cand = match seat {
        Seat::Existing(h) => {
            debug_assert!(
                own_labels
                    .iter()
                    .enumerate()
                    .any(|(j, &l)| j != i && l == h),
                "existing seat must keep another member"
            );
            h
        }
        Seat::Fresh => own_len(&idx, axis),
    };
    attach_log_ratio(&idx, axis, cand, &per, &mut tables)
}

/// Closed-form log ratio p(Y_x | row i at seat) / p(Y_x without row i).
///
/// Equals the difference of full collapsed log-likelihoods restricted to
/// index x. In undirected mode the "row" is the node's single cluster and
/// all incident unordered pairs move with it.
pub fn row_move_log_ratio(
    stats: &BlockSuffStats,
    y: &NetworkSequence,
    x: usize,
    i: usize,
    seat: Seat,
    z1_x: &[usize],
    z2_x: &[usize],
    a_theta: &[f64],
) -> f64 {
    let axis = match stats.mode {
        Mode::Directed => Axis::Row,
        Mode::Undirected => Axis::Node,
    };
    move_log_ratio(stats, y, x, i, seat, z1_x, z2_x, axis, a_theta)
}

/// Column-side counterpart of [`row_move_log_ratio`] (directed mode).
pub fn col_move_log_ratio(
    stats: &BlockSuffStats,
    y: &NetworkSequence,
    x: usize,
    j: usize,
    seat: Seat,
    z1_x: &[usize],
    z2_x: &[usize],
    a_theta: &[f64],
) -> f64 {
    debug_assert_eq!(stats.mode, Mode::Directed);
    move_log_ratio(stats, y, x, j, seat, z2_x, z1_x, Axis::Col, a_theta)
}
