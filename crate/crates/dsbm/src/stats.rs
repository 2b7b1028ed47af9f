//! Block sufficient statistics: per-index category counts n_{hkxc} powering
//! every likelihood evaluation.
//!
//! Directed mode stores an H×K×C array per index over ordered pairs (i, j);
//! undirected mode stores the lower triangle h >= k over unordered pairs
//! i < j. Single-cell moves are maintained incrementally and must stay
//! integer-identical to a full rebuild.

use crate::data::{Mode, NetworkSequence};
use crate::error::{Error, Result};
use crate::partition::{canonical_map, cluster_count, PartitionSequence};

/// Counts for one sequence index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexStats {
    rows: usize,
    cols: usize,
    tri: bool,
    c: usize,
    /// Directed: `[h][k][c]` row-major. Triangular: `[tri(h,k)][c]`.
    counts: Vec<u32>,
    /// Per-block totals, same block layout.
    totals: Vec<u32>,
}

impl IndexStats {
    fn directed(rows: usize, cols: usize, c: usize) -> Self {
        IndexStats {
            rows,
            cols,
            tri: false,
            c,
            counts: vec![0; rows * cols * c],
            totals: vec![0; rows * cols],
        }
    }

    fn triangular(rows: usize, c: usize) -> Self {
        let blocks = rows * (rows + 1) / 2;
        IndexStats {
            rows,
            cols: rows,
            tri: true,
            c,
            counts: vec![0; blocks * c],
            totals: vec![0; blocks],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn block_index(&self, h: usize, k: usize) -> usize {
        if self.tri {
            let (a, b) = if h >= k { (h, k) } else { (k, h) };
            a * (a + 1) / 2 + b
        } else {
            h * self.cols + k
        }
    }

    /// Category counts of block (h, k).
    #[inline]
    pub fn block(&self, h: usize, k: usize) -> &[u32] {
        let b = self.block_index(h, k) * self.c;
        &self.counts[b..b + self.c]
    }

    #[inline]
    pub fn total(&self, h: usize, k: usize) -> u32 {
        self.totals[self.block_index(h, k)]
    }

    #[inline]
    fn bump(&mut self, h: usize, k: usize, cat: u8) {
        let b = self.block_index(h, k);
        self.counts[b * self.c + cat as usize] += 1;
        self.totals[b] += 1;
    }

    fn add_block(&mut self, h: usize, k: usize, add: &[u32]) {
        let b = self.block_index(h, k);
        let mut tot = 0;
        for (c, &a) in add.iter().enumerate() {
            self.counts[b * self.c + c] += a;
            tot += a;
        }
        self.totals[b] += tot;
    }

    fn sub_block(&mut self, h: usize, k: usize, sub: &[u32]) {
        let b = self.block_index(h, k);
        let mut tot = 0;
        for (c, &s) in sub.iter().enumerate() {
            debug_assert!(self.counts[b * self.c + c] >= s);
            self.counts[b * self.c + c] -= s;
            tot += s;
        }
        self.totals[b] -= tot;
    }

    fn push_row(&mut self) {
        assert!(!self.tri);
        self.rows += 1;
        self.counts
            .extend(std::iter::repeat_n(0, self.cols * self.c));
        self.totals.extend(std::iter::repeat_n(0, self.cols));
    }

    fn push_col(&mut self) {
        assert!(!self.tri);
        let (rows, cols, c) = (self.rows, self.cols, self.c);
        let mut counts = vec![0; rows * (cols + 1) * c];
        let mut totals = vec![0; rows * (cols + 1)];
        for h in 0..rows {
            for k in 0..cols {
                let old = (h * cols + k) * c;
                let new = (h * (cols + 1) + k) * c;
                counts[new..new + c].copy_from_slice(&self.counts[old..old + c]);
                totals[h * (cols + 1) + k] = self.totals[h * cols + k];
            }
        }
        self.cols += 1;
        self.counts = counts;
        self.totals = totals;
    }

    fn push_cluster_tri(&mut self) {
        assert!(self.tri);
        self.rows += 1;
        self.cols += 1;
        self.counts
            .extend(std::iter::repeat_n(0, self.rows * self.c));
        self.totals.extend(std::iter::repeat_n(0, self.rows));
    }

    /// Remove row cluster h; its blocks must already be empty.
    fn drop_row(&mut self, h: usize) {
        assert!(!self.tri);
        let (cols, c) = (self.cols, self.c);
        debug_assert!((0..cols).all(|k| self.total(h, k) == 0));
        let start = h * cols;
        self.counts.drain(start * c..(start + cols) * c);
        self.totals.drain(start..start + cols);
        self.rows -= 1;
    }

    fn drop_col(&mut self, k: usize) {
        assert!(!self.tri);
        let (rows, cols, c) = (self.rows, self.cols, self.c);
        debug_assert!((0..rows).all(|h| self.total(h, k) == 0));
        let mut counts = vec![0; rows * (cols - 1) * c];
        let mut totals = vec![0; rows * (cols - 1)];
        for h in 0..rows {
            let mut kk = 0;
            for k2 in 0..cols {
                if k2 == k {
                    continue;
                }
                let old = (h * cols + k2) * c;
                let new = (h * (cols - 1) + kk) * c;
                counts[new..new + c].copy_from_slice(&self.counts[old..old + c]);
                totals[h * (cols - 1) + kk] = self.totals[h * cols + k2];
                kk += 1;
            }
        }
        self.cols -= 1;
        self.counts = counts;
        self.totals = totals;
    }

    fn drop_cluster_tri(&mut self, h: usize) {
        assert!(self.tri);
        let rows = self.rows;
        debug_assert!((0..rows).all(|k| self.total(h, k) == 0));
        let mut out = IndexStats::triangular(rows - 1, self.c);
        let remap = |v: usize| if v > h { v - 1 } else { v };
        for a in 0..rows {
            if a == h {
                continue;
            }
            for b in 0..=a {
                if b == h {
                    continue;
                }
                let old = self.block_index(a, b);
                let new = out.block_index(remap(a), remap(b));
                out.counts[new * self.c..(new + 1) * self.c]
                    .copy_from_slice(&self.counts[old * self.c..(old + 1) * self.c]);
                out.totals[new] = self.totals[old];
            }
        }
        *self = out;
    }

    fn permute_rows(&mut self, map: &[usize]) {
        assert!(!self.tri);
        let (rows, cols, c) = (self.rows, self.cols, self.c);
        let mut counts = vec![0; rows * cols * c];
        let mut totals = vec![0; rows * cols];
        for h in 0..rows {
            for k in 0..cols {
                let old = (h * cols + k) * c;
                let new = (map[h] * cols + k) * c;
                counts[new..new + c].copy_from_slice(&self.counts[old..old + c]);
                totals[map[h] * cols + k] = self.totals[h * cols + k];
            }
        }
        self.counts = counts;
        self.totals = totals;
    }

    fn permute_cols(&mut self, map: &[usize]) {
        assert!(!self.tri);
        let (rows, cols, c) = (self.rows, self.cols, self.c);
        let mut counts = vec![0; rows * cols * c];
        let mut totals = vec![0; rows * cols];
        for h in 0..rows {
            for k in 0..cols {
                let old = (h * cols + k) * c;
                let new = (h * cols + map[k]) * c;
                counts[new..new + c].copy_from_slice(&self.counts[old..old + c]);
                totals[h * cols + map[k]] = self.totals[h * cols + k];
            }
        }
        self.counts = counts;
        self.totals = totals;
    }

    fn permute_tri(&mut self, map: &[usize]) {
        assert!(self.tri);
        let rows = self.rows;
        let mut out = IndexStats::triangular(rows, self.c);
        for a in 0..rows {
            for b in 0..=a {
                let old = self.block_index(a, b);
                let new = out.block_index(map[a], map[b]);
                out.counts[new * self.c..(new + 1) * self.c]
                    .copy_from_slice(&self.counts[old * self.c..(old + 1) * self.c]);
                out.totals[new] = self.totals[old];
            }
        }
        *self = out;
    }

    fn grand_total(&self) -> u64 {
        self.totals.iter().map(|&t| t as u64).sum()
    }
}

/// All per-index block counts for a network sequence under a pair of
/// partition sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSuffStats {
    pub c: usize,
    pub mode: Mode,
    pub include_diagonal: bool,
    per_index: Vec<IndexStats>,
}

impl BlockSuffStats {
    pub fn index(&self, x: usize) -> &IndexStats {
        &self.per_index[x]
    }

    pub(crate) fn index_mut(&mut self, x: usize) -> &mut IndexStats {
        &mut self.per_index[x]
    }

    pub fn m(&self) -> usize {
        self.per_index.len()
    }

    /// Pairs tallied at index x: n^2 (diagonal in), n^2 - n (diagonal out),
    /// or n(n-1)/2 (undirected).
    pub fn pair_total(&self, x: usize) -> u64 {
        self.per_index[x].grand_total()
    }
}

/// Tally n_{hkxc} for every index of the sequence.
pub fn build_suff_stats(
    y: &NetworkSequence,
    z1: &PartitionSequence,
    z2: &PartitionSequence,
) -> Result<BlockSuffStats> {
    if z1.n() != y.n || z2.n() != y.n || z1.m() != y.m || z2.m() != y.m {
        return Err(Error::Dimension(format!(
            "network is n={}, m={} but partitions are ({}, {}) and ({}, {})",
            y.n,
            y.m,
            z1.n(),
            z1.m(),
            z2.n(),
            z2.m()
        )));
    }
    if y.mode == Mode::Undirected && z1 != z2 {
        return Err(Error::Invalid(
            "undirected mode uses a single shared partition sequence".into(),
        ));
    }
    let per_index = (0..y.m)
        .map(|x| build_index(y, x, z1.labels(x), z2.labels(x)))
        .collect();
    Ok(BlockSuffStats {
        c: y.c,
        mode: y.mode,
        include_diagonal: y.include_diagonal,
        per_index,
    })
}

pub(crate) fn build_index(
    y: &NetworkSequence,
    x: usize,
    z1_x: &[usize],
    z2_x: &[usize],
) -> IndexStats {
    let n = y.n;
    let mat = &y.y[x];
    match y.mode {
        Mode::Directed => {
            let mut s = IndexStats::directed(cluster_count(z1_x), cluster_count(z2_x), y.c);
            for i in 0..n {
                for j in 0..n {
                    if i == j && !y.include_diagonal {
                        continue;
                    }
                    s.bump(z1_x[i], z2_x[j], mat.get(i, j));
                }
            }
            s
        }
        Mode::Undirected => {
            let mut s = IndexStats::triangular(cluster_count(z1_x), y.c);
            for i in 0..n {
                for j in (i + 1)..n {
                    s.bump(z1_x[i], z1_x[j], mat.get(i, j));
                }
            }
            s
        }
    }
}

/// Per-column-cluster category counts of row i at index x: out[k*C + c].
pub(crate) fn row_counts_into(
    y: &NetworkSequence,
    x: usize,
    i: usize,
    z2_x: &[usize],
    k_count: usize,
    out: &mut Vec<u32>,
) {
    out.clear();
    out.resize(k_count * y.c, 0);
    let mat = &y.y[x];
    for (j, &k) in z2_x.iter().enumerate() {
        if j == i && !y.include_diagonal {
            continue;
        }
        out[k * y.c + mat.get(i, j) as usize] += 1;
    }
}

/// Per-row-cluster category counts of column j at index x: out[h*C + c].
pub(crate) fn col_counts_into(
    y: &NetworkSequence,
    x: usize,
    j: usize,
    z1_x: &[usize],
    h_count: usize,
    out: &mut Vec<u32>,
) {
    out.clear();
    out.resize(h_count * y.c, 0);
    let mat = &y.y[x];
    for (i, &h) in z1_x.iter().enumerate() {
        if i == j && !y.include_diagonal {
            continue;
        }
        out[h * y.c + mat.get(i, j) as usize] += 1;
    }
}

/// Per-cluster category counts of the unordered pairs incident to node i,
/// excluding the self pair: out[k*C + c].
pub(crate) fn node_counts_into(
    y: &NetworkSequence,
    x: usize,
    i: usize,
    z_x: &[usize],
    h_count: usize,
    out: &mut Vec<u32>,
) {
    out.clear();
    out.resize(h_count * y.c, 0);
    let mat = &y.y[x];
    for (j, &k) in z_x.iter().enumerate() {
        if j == i {
            continue;
        }
        out[k * y.c + mat.get(i, j) as usize] += 1;
    }
}

/// Which axis of the counts a single-node move touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Axis {
    Row,
    Col,
    /// Undirected: the node's cluster on the single shared axis.
    Node,
}

impl IndexStats {
    /// Subtract a node's per-opposite-cluster counts from its current
    /// cluster `f` on the given axis.
    pub(crate) fn detach(&mut self, axis: Axis, f: usize, per: &[u32]) {
        let c = self.c;
        match axis {
            Axis::Row => {
                for k in 0..self.cols {
                    self.sub_block(f, k, &per[k * c..(k + 1) * c]);
                }
            }
            Axis::Col => {
                for h in 0..self.rows {
                    self.sub_block(h, f, &per[h * c..(h + 1) * c]);
                }
            }
            Axis::Node => {
                for k in 0..self.rows {
                    self.sub_block(f, k, &per[k * c..(k + 1) * c]);
                }
            }
        }
    }

    /// Add a node's counts at cluster `to` on the given axis. `to` may be
    /// one past the end, growing the axis.
    pub(crate) fn attach(&mut self, axis: Axis, to: usize, per: &[u32]) {
        let c = self.c;
        match axis {
            Axis::Row => {
                if to == self.rows {
                    self.push_row();
                }
                for k in 0..self.cols {
                    self.add_block(to, k, &per[k * c..(k + 1) * c]);
                }
            }
            Axis::Col => {
                if to == self.cols {
                    self.push_col();
                }
                for h in 0..self.rows {
                    self.add_block(h, to, &per[h * c..(h + 1) * c]);
                }
            }
            Axis::Node => {
                if to == self.rows {
                    self.push_cluster_tri();
                }
                // `per` covers the clusters that existed without the node;
                // a fresh cluster has no own-block pairs.
                for (k, chunk) in per.chunks_exact(c).enumerate() {
                    self.add_block(to, k, chunk);
                }
            }
        }
    }

    pub(crate) fn drop_cluster(&mut self, axis: Axis, h: usize) {
        match axis {
            Axis::Row => self.drop_row(h),
            Axis::Col => self.drop_col(h),
            Axis::Node => self.drop_cluster_tri(h),
        }
    }

    pub(crate) fn permute(&mut self, axis: Axis, map: &[usize]) {
        match axis {
            Axis::Row => self.permute_rows(map),
            Axis::Col => self.permute_cols(map),
            Axis::Node => self.permute_tri(map),
        }
    }
}

/// Finish a move whose counts are already detached from cluster `f`:
/// attach at `target` (`None` opens a fresh cluster), drop `f` when it
/// emptied, and re-canonicalize labels together with the stats axis.
pub(crate) fn commit_detached_move(
    idx: &mut IndexStats,
    axis: Axis,
    z_x: &mut [usize],
    i: usize,
    f: usize,
    f_empty: bool,
    target: Option<usize>,
    per: &[u32],
) {
    let own = |idx: &IndexStats| match axis {
        Axis::Row | Axis::Node => idx.rows,
        Axis::Col => idx.cols,
    };
    let label = match target {
        Some(h) => h,
        // a singleton opening a fresh cluster keeps its seat
        None if f_empty => f,
        None => own(idx),
    };
    idx.attach(axis, label, per);
    z_x[i] = label;
    if f_empty && label != f {
        idx.drop_cluster(axis, f);
        for l in z_x.iter_mut() {
            if *l > f {
                *l -= 1;
            }
        }
    }
    if let Some(map) = canonical_map(z_x, own(idx)) {
        idx.permute(axis, &map);
        for l in z_x.iter_mut() {
            *l = map[*l];
        }
    }
}

/// Move node i's row to cluster `to` at index x, keeping `stats` and the
/// label vector in lockstep. `to == H` opens a fresh cluster. Labels are
/// re-canonicalized and empty clusters dropped, so afterwards the stats
/// equal a full rebuild on the updated partition.
pub fn update_row_label(
    stats: &mut BlockSuffStats,
    y: &NetworkSequence,
    x: usize,
    i: usize,
    z1_x: &mut Vec<usize>,
    z2_x: &[usize],
    to: usize,
) -> Result<()> {
    let axis = match stats.mode {
        Mode::Directed => Axis::Row,
        Mode::Undirected => Axis::Node,
    };
    let idx = &mut stats.per_index[x];
    let h_count = idx.rows;
    if to > h_count {
        return Err(Error::Invalid(format!(
            "target cluster {} out of range 0..={}",
            to, h_count
        )));
    }
    let f = z1_x[i];
    if to == f {
        return Ok(());
    }
    let mut per = Vec::new();
    match axis {
        Axis::Row => row_counts_into(y, x, i, z2_x, idx.cols, &mut per),
        Axis::Node => node_counts_into(y, x, i, z1_x, h_count, &mut per),
        Axis::Col => unreachable!(),
    }
    idx.detach(axis, f, &per);
    let f_empty = !z1_x.iter().enumerate().any(|(j, &l)| j != i && l == f);
    let target = if to == h_count { None } else { Some(to) };
    commit_detached_move(idx, axis, z1_x, i, f, f_empty, target, &per);
    Ok(())
}

/// Column-side counterpart of [`update_row_label`] (directed mode only).
pub fn update_col_label(
    stats: &mut BlockSuffStats,
    y: &NetworkSequence,
    x: usize,
    j: usize,
    z1_x: &[usize],
    z2_x: &mut Vec<usize>,
    to: usize,
) -> Result<()> {
    if stats.mode != Mode::Directed {
        return Err(Error::Invalid(
            "column moves only exist in directed mode".into(),
        ));
    }
    let idx = &mut stats.per_index[x];
    let k_count = idx.cols;
    if to > k_count {
        return Err(Error::Invalid(format!(
            "target cluster {} out of range 0..={}",
            to, k_count
        )));
    }
    let f = z2_x[j];
    if to == f {
        return Ok(());
    }
    let mut per = Vec::new();
    col_counts_into(y, x, j, z1_x, idx.rows, &mut per);
    idx.detach(Axis::Col, f, &per);
    let f_empty = !z2_x.iter().enumerate().any(|(jj, &l)| jj != j && l == f);
    let target = if to == k_count { None } else { Some(to) };
    commit_detached_move(idx, Axis::Col, z2_x, j, f, f_empty, target, &per);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CatMatrix;
    use proptest::{prop_assert_eq, proptest};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn seq_of(n: usize, c: usize, mode: Mode, diag: bool, cats: Vec<Vec<u8>>) -> NetworkSequence {
        let y = cats.into_iter().map(|v| CatMatrix::new(n, v)).collect();
        NetworkSequence::new(n, c, mode, diag, y).unwrap()
    }

    fn parts(z: Vec<Vec<usize>>) -> PartitionSequence {
        PartitionSequence::new(z).unwrap()
    }

    #[test]
    fn single_block_tally() {
        // n=2, m=1, C=2, one cluster, all edges category 1, diagonal in
        let y = seq_of(2, 2, Mode::Directed, true, vec![vec![0, 0, 0, 0]]);
        let z = parts(vec![vec![0, 0]]);
        let s = build_suff_stats(&y, &z, &z).unwrap();
        assert_eq!(s.index(0).block(0, 0), &[4, 0]);
        assert_eq!(s.pair_total(0), 4);
    }

    #[test]
    fn undirected_hand_tally() {
        // n=3, one cluster, pairs {12:1, 13:2, 23:2} (1-based categories)
        let y = seq_of(
            3,
            2,
            Mode::Undirected,
            false,
            vec![vec![0, 0, 1, 0, 0, 1, 1, 1, 0]],
        );
        let z = parts(vec![vec![0, 0, 0]]);
        let s = build_suff_stats(&y, &z, &z).unwrap();
        assert_eq!(s.index(0).block(0, 0), &[1, 2]);
        assert_eq!(s.pair_total(0), 3);
    }

    #[test]
    fn pair_totals_by_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 5;
        let cats: Vec<u8> = (0..n * n).map(|_| rng.gen_range(0..3)).collect();
        let z = parts(vec![vec![0, 1, 0, 2, 1]]);
        let with_diag = seq_of(n, 3, Mode::Directed, true, vec![cats.clone()]);
        assert_eq!(
            build_suff_stats(&with_diag, &z, &z).unwrap().pair_total(0),
            (n * n) as u64
        );
        let no_diag = seq_of(n, 3, Mode::Directed, false, vec![cats.clone()]);
        assert_eq!(
            build_suff_stats(&no_diag, &z, &z).unwrap().pair_total(0),
            (n * n - n) as u64
        );
        let mut sym = cats;
        for i in 0..n {
            for j in (i + 1)..n {
                sym[j * n + i] = sym[i * n + j];
            }
        }
        let und = seq_of(n, 3, Mode::Undirected, false, vec![sym]);
        assert_eq!(
            build_suff_stats(&und, &z, &z).unwrap().pair_total(0),
            (n * (n - 1) / 2) as u64
        );
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let y = seq_of(2, 2, Mode::Directed, true, vec![vec![0, 0, 0, 0]]);
        let z3 = parts(vec![vec![0, 0, 0]]);
        assert!(build_suff_stats(&y, &z3, &z3).is_err());
    }

    #[test]
    fn move_out_and_back_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 6;
        let cats: Vec<u8> = (0..n * n).map(|_| rng.gen_range(0..4)).collect();
        let y = seq_of(n, 4, Mode::Directed, true, vec![cats]);
        let z1 = parts(vec![vec![0, 0, 1, 1, 2, 2]]);
        let z2 = parts(vec![vec![0, 1, 0, 1, 0, 1]]);
        let mut s = build_suff_stats(&y, &z1, &z2).unwrap();
        let orig = s.clone();
        let mut z1_x = z1.labels(0).to_vec();
        // move node 0 to a fresh cluster, then back into its old cluster
        update_row_label(&mut s, &y, 0, 0, &mut z1_x, z2.labels(0), 3).unwrap();
        let h_of_mate = z1_x[1];
        update_row_label(&mut s, &y, 0, 0, &mut z1_x, z2.labels(0), h_of_mate).unwrap();
        assert_eq!(z1_x, z1.labels(0));
        assert_eq!(s, orig);
    }

    #[test]
    fn emptying_a_cluster_drops_and_recanonicalizes() {
        let y = seq_of(3, 2, Mode::Directed, true, vec![vec![0; 9]]);
        let z1 = parts(vec![vec![0, 1, 2]]);
        let z2 = parts(vec![vec![0, 0, 0]]);
        let mut s = build_suff_stats(&y, &z1, &z2).unwrap();
        let mut z1_x = z1.labels(0).to_vec();
        // move the singleton node 1 into cluster 0: cluster 1 empties,
        // node 2's label shifts down
        update_row_label(&mut s, &y, 0, 1, &mut z1_x, z2.labels(0), 0).unwrap();
        assert_eq!(z1_x, vec![0, 0, 1]);
        assert_eq!(s.index(0).rows(), 2);
        let rebuilt = build_suff_stats(&y, &parts(vec![z1_x.clone()]), &z2).unwrap();
        assert_eq!(s, rebuilt);
    }

    #[test]
    fn undirected_invariant_under_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 6;
        let mut cats = vec![0u8; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = rng.gen_range(0..4);
                cats[i * n + j] = v;
                cats[j * n + i] = v;
            }
        }
        let y = seq_of(n, 4, Mode::Undirected, false, vec![cats]);
        let z = parts(vec![vec![0, 1, 0, 2, 1, 2]]);
        let a = build_suff_stats(&y, &z, &z).unwrap();
        let b = build_suff_stats(&y.transposed(), &z, &z).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        /// Random move sequences stay integer-identical to full rebuilds.
        #[test]
        fn incremental_equals_rebuild(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..7);
            let m = rng.gen_range(1..4);
            let c = rng.gen_range(2..5);
            let undirected = rng.gen_bool(0.4);
            let diag = !undirected && rng.gen_bool(0.5);
            let mode = if undirected { Mode::Undirected } else { Mode::Directed };
            let mats: Vec<Vec<u8>> = (0..m)
                .map(|_| {
                    let mut v = vec![0u8; n * n];
                    for i in 0..n {
                        for j in 0..n {
                            v[i * n + j] = rng.gen_range(0..c) as u8;
                        }
                    }
                    if undirected {
                        for i in 0..n {
                            for j in (i + 1)..n {
                                v[j * n + i] = v[i * n + j];
                            }
                        }
                    }
                    v
                })
                .collect();
            let y = seq_of(n, c, mode, diag, mats);
            let zs: Vec<Vec<usize>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
                .collect();
            let z1 = parts(zs);
            let mut z2 = if undirected {
                z1.clone()
            } else {
                parts((0..m).map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect()).collect())
            };
            let mut z1 = z1;
            let mut s = build_suff_stats(&y, &z1, &z2).unwrap();
            for _ in 0..30 {
                let x = rng.gen_range(0..m);
                let i = rng.gen_range(0..n);
                if undirected || rng.gen_bool(0.5) {
                    let h = s.index(x).rows();
                    let to = rng.gen_range(0..=h);
                    let mut zx = z1.labels(x).to_vec();
                    update_row_label(&mut s, &y, x, i, &mut zx, &z2.labels(x).to_vec(), to).unwrap();
                    *z1.labels_mut(x) = zx.clone();
                    if undirected {
                        *z2.labels_mut(x) = zx;
                    }
                } else {
                    let k = s.index(x).cols();
                    let to = rng.gen_range(0..=k);
                    let mut zx = z2.labels(x).to_vec();
                    update_col_label(&mut s, &y, x, i, &z1.labels(x).to_vec(), &mut zx, to).unwrap();
                    *z2.labels_mut(x) = zx;
                }
                let rebuilt = build_suff_stats(&y, &z1, &z2).unwrap();
                prop_assert_eq!(&s, &rebuilt);
            }
        }
    }
}
