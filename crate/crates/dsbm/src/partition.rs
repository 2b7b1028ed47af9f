//! Label vectors, canonical form, and set-partition comparisons.
//!
//! A label vector assigns each node a 0-based cluster label. The canonical
//! form relabels clusters in order of first appearance, so two label
//! vectors induce the same set partition iff their canonical forms are
//! equal.

use crate::error::{Error, Result};

/// Relabel `z` in place so clusters are numbered by order of first
/// appearance. Returns `true` when anything changed.
pub fn canonicalize(z: &mut [usize]) -> bool {
    let cap = z.iter().copied().max().map_or(0, |v| v + 1);
    let mut map: Vec<Option<usize>> = vec![None; cap];
    let mut next = 0;
    let mut changed = false;
    for zi in z.iter_mut() {
        let new = match map[*zi] {
            Some(v) => v,
            None => {
                map[*zi] = Some(next);
                next += 1;
                next - 1
            }
        };
        if new != *zi {
            changed = true;
        }
        *zi = new;
    }
    changed
}

/// The canonical relabeling map for `z`: `map[old_label] = new_label`.
///
/// `z` must use dense labels `0..h`. Returns `None` when `z` is already
/// canonical.
pub fn canonical_map(z: &[usize], h: usize) -> Option<Vec<usize>> {
    let mut map: Vec<usize> = vec![usize::MAX; h];
    let mut next = 0;
    for &zi in z {
        if map[zi] == usize::MAX {
            map[zi] = next;
            next += 1;
        }
    }
    debug_assert_eq!(next, h, "labels must be dense in 0..h");
    if map.iter().enumerate().all(|(old, &new)| old == new) {
        None
    } else {
        Some(map)
    }
}

/// Number of clusters of a canonical label vector.
pub fn cluster_count(z: &[usize]) -> usize {
    z.iter().copied().max().map_or(0, |v| v + 1)
}

/// True iff the set partitions induced by `z_a` and `z_b` restricted to
/// `keep` are identical. Labels themselves are irrelevant.
pub fn check_compatibility(z_a: &[usize], z_b: &[usize], keep: &[usize]) -> bool {
    debug_assert_eq!(z_a.len(), z_b.len());
    let n = z_a.len();
    // Pair up first-appearance ids along keep; the restriction partitions
    // match iff the pairing is a bijection.
    let mut a_to_b: Vec<usize> = vec![usize::MAX; n];
    let mut b_to_a: Vec<usize> = vec![usize::MAX; n];
    for &i in keep {
        let (a, b) = (z_a[i], z_b[i]);
        if a_to_b[a] == usize::MAX && b_to_a[b] == usize::MAX {
            a_to_b[a] = b;
            b_to_a[b] = a;
        } else if a_to_b[a] != b || b_to_a[b] != a {
            return false;
        }
    }
    true
}

/// Coarsest common refinement: nodes share a meet label iff they share a
/// label in every input partition. Output is canonical.
pub fn meet_partition(partitions: &[&[usize]]) -> Result<Vec<usize>> {
    let first = partitions
        .first()
        .ok_or_else(|| Error::Invalid("meet of an empty partition list".into()))?;
    let n = first.len();
    for p in partitions {
        if p.len() != n {
            return Err(Error::Dimension(format!(
                "meet over partitions of unequal length ({} vs {})",
                p.len(),
                n
            )));
        }
    }
    let mut labels: Vec<usize> = first.to_vec();
    for p in &partitions[1..] {
        // combine (labels, p) pairwise; dense bound is n in both coordinates
        let mut seen: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let key = (labels[i], p[i]);
            let next = seen.len();
            out.push(*seen.entry(key).or_insert(next));
        }
        labels = out;
    }
    canonicalize(&mut labels);
    Ok(labels)
}

/// Per-index label vectors with a varying number of non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSequence {
    z: Vec<Vec<usize>>,
}

impl PartitionSequence {
    /// Build from raw label vectors, canonicalizing each index.
    pub fn new(mut z: Vec<Vec<usize>>) -> Result<Self> {
        let n = z
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::Invalid("empty partition sequence".into()))?;
        for zx in &mut z {
            if zx.len() != n {
                return Err(Error::Dimension(format!(
                    "label vectors of unequal length ({} vs {})",
                    zx.len(),
                    n
                )));
            }
            if let Some(&bad) = zx.iter().find(|&&l| l >= n) {
                return Err(Error::Invalid(format!(
                    "label {} out of range for {} nodes",
                    bad + 1,
                    n
                )));
            }
            canonicalize(zx);
        }
        Ok(PartitionSequence { z })
    }

    pub fn constant(n: usize, m: usize) -> Self {
        PartitionSequence {
            z: vec![vec![0; n]; m],
        }
    }

    pub fn n(&self) -> usize {
        self.z[0].len()
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    /// Cluster count at index x.
    pub fn h(&self, x: usize) -> usize {
        cluster_count(&self.z[x])
    }

    pub fn labels(&self, x: usize) -> &[usize] {
        &self.z[x]
    }

    pub fn labels_mut(&mut self, x: usize) -> &mut Vec<usize> {
        &mut self.z[x]
    }

    /// Mutable labels at x together with read access to x+1 (when present).
    pub(crate) fn labels_pair_mut(&mut self, x: usize) -> (&mut Vec<usize>, Option<&Vec<usize>>) {
        let (left, right) = self.z.split_at_mut(x + 1);
        (&mut left[x], right.first().map(|v| &*v))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.z.iter()
    }

    pub fn into_inner(self) -> Vec<Vec<usize>> {
        self.z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn canonical_first_appearance() {
        let mut z = vec![2, 2, 0, 1, 0];
        canonicalize(&mut z);
        assert_eq!(z, vec![0, 0, 1, 2, 1]);
    }

    #[test]
    fn canonicalize_is_idempotent_and_preserves_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..10);
            let mut z: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let orig = z.clone();
            canonicalize(&mut z);
            let once = z.clone();
            canonicalize(&mut z);
            assert_eq!(once, z);
            let keep: Vec<usize> = (0..n).collect();
            assert!(check_compatibility(&orig, &once, &keep));
        }
    }

    #[test]
    fn compatibility_examples() {
        let keep_all = vec![0, 1, 2];
        assert!(check_compatibility(&[0, 0, 1], &[0, 0, 1], &keep_all));
        // label permutation, same set partition
        assert!(check_compatibility(&[0, 0, 1], &[1, 1, 0], &keep_all));
        // restricted to {0, 1}: {01} vs {0}{1}
        assert!(!check_compatibility(&[0, 0, 1], &[0, 1, 1], &[0, 1]));
        // empty keep set is always compatible
        assert!(check_compatibility(&[0, 1, 2], &[0, 0, 0], &[]));
    }

    #[test]
    fn meet_examples() {
        // single input -> itself
        assert_eq!(meet_partition(&[&[0, 0, 1]]).unwrap(), vec![0, 0, 1]);
        // (1,1,2,2) meet (1,2,2,1) -> all singletons
        assert_eq!(
            meet_partition(&[&[0, 0, 1, 1], &[0, 1, 1, 0]]).unwrap(),
            vec![0, 1, 2, 3]
        );
        // meet with all-singletons absorbs
        assert_eq!(
            meet_partition(&[&[0, 0, 0, 0], &[0, 1, 2, 3]]).unwrap(),
            vec![0, 1, 2, 3]
        );
        assert!(meet_partition(&[]).is_err());
    }

    #[test]
    fn partition_sequence_canonicalizes() {
        let seq = PartitionSequence::new(vec![vec![1, 1, 0], vec![2, 1, 0]]).unwrap();
        assert_eq!(seq.labels(0), &[0, 0, 1]);
        assert_eq!(seq.labels(1), &[0, 1, 2]);
        assert_eq!(seq.h(0), 2);
        assert_eq!(seq.h(1), 3);
    }
}
