//! Core domain types: network sequences, node covariates, model hyperparameters.
//!
//! Categories and cluster labels are 0-based everywhere inside the crate;
//! file formats and display use 1-based values (see [`crate::io`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the adjacency matrices are read as directed (two partitions,
/// ordered pairs) or undirected (one shared partition, unordered pairs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Directed,
    Undirected,
}

/// Dense n×n matrix of edge categories in `0..c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatMatrix {
    n: usize,
    data: Vec<u8>,
}

impl CatMatrix {
    pub fn new(n: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), n * n);
        CatMatrix { n, data }
    }

    pub fn filled(n: usize, cat: u8) -> Self {
        CatMatrix {
            n,
            data: vec![cat; n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, cat: u8) {
        self.data[i * self.n + j] = cat;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// A sequence of m categorically-weighted adjacency matrices over n nodes.
///
/// Entry `y[x].get(i, j)` is the 0-based category of the directed relation
/// from node i to node j at sequence index x.
#[derive(Debug, Clone)]
pub struct NetworkSequence {
    pub n: usize,
    pub m: usize,
    /// Number of edge categories.
    pub c: usize,
    pub mode: Mode,
    /// Whether (i, i) cells enter the likelihood. Always false in
    /// undirected mode.
    pub include_diagonal: bool,
    pub y: Vec<CatMatrix>,
    pub node_names: Option<Vec<String>>,
    pub index_labels: Option<Vec<String>>,
}

impl NetworkSequence {
    pub fn new(
        n: usize,
        c: usize,
        mode: Mode,
        include_diagonal: bool,
        y: Vec<CatMatrix>,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("need n >= 2 nodes, got {n}")));
        }
        if y.is_empty() {
            return Err(Error::Invalid("need m >= 1 matrices".into()));
        }
        if c < 2 {
            return Err(Error::Invalid(format!("need C >= 2 categories, got {c}")));
        }
        let include_diagonal = match mode {
            Mode::Directed => include_diagonal,
            Mode::Undirected => false,
        };
        for (x, mat) in y.iter().enumerate() {
            if mat.n != n {
                return Err(Error::Dimension(format!(
                    "matrix at index {} is {}x{}, expected {}x{}",
                    x + 1,
                    mat.n,
                    mat.n,
                    n,
                    n
                )));
            }
            if let Some((i, j)) = (0..n).find_map(|i| {
                (0..n)
                    .find(|&j| mat.get(i, j) as usize >= c)
                    .map(|j| (i, j))
            }) {
                return Err(Error::Invalid(format!(
                    "category {} at (x={}, i={}, j={}) out of range 1..={}",
                    mat.get(i, j) as usize + 1,
                    x + 1,
                    i + 1,
                    j + 1,
                    c
                )));
            }
            if mode == Mode::Undirected && !mat.is_symmetric() {
                return Err(Error::Invalid(format!(
                    "undirected mode requires symmetric matrices; index {} is not",
                    x + 1
                )));
            }
        }
        Ok(NetworkSequence {
            n,
            m: y.len(),
            c,
            mode,
            include_diagonal,
            y,
            node_names: None,
            index_labels: None,
        })
    }

    pub fn with_node_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} node names for {} nodes",
                names.len(),
                self.n
            )));
        }
        self.node_names = Some(names);
        Ok(self)
    }

    pub fn with_index_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.m {
            return Err(Error::Dimension(format!(
                "{} index labels for {} indices",
                labels.len(),
                self.m
            )));
        }
        self.index_labels = Some(labels);
        Ok(self)
    }

    /// Name of node i, or its 1-based number when names are absent.
    pub fn node_name(&self, i: usize) -> String {
        match &self.node_names {
            Some(v) => v[i].clone(),
            None => (i + 1).to_string(),
        }
    }

    pub fn transposed(&self) -> NetworkSequence {
        let mut out = self.clone();
        for mat in &mut out.y {
            let n = mat.n;
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = mat.get(i, j);
                    let b = mat.get(j, i);
                    mat.set(i, j, b);
                    mat.set(j, i, a);
                }
            }
        }
        out
    }
}

/// Node-level macro-category labels supervising the partition prior.
#[derive(Debug, Clone)]
pub struct Covariates {
    /// 0-based macro-category of each node.
    pub w: Vec<usize>,
    /// Number of macro-categories.
    pub l: usize,
    /// Category names in label order, when read from a file.
    pub names: Option<Vec<String>>,
}

impl Covariates {
    pub fn new(w: Vec<usize>, l: usize) -> Result<Self> {
        if l < 1 {
            return Err(Error::Invalid("need L >= 1 macro-categories".into()));
        }
        if let Some(&bad) = w.iter().find(|&&wi| wi >= l) {
            return Err(Error::Invalid(format!(
                "macro-category {} out of range 1..={}",
                bad + 1,
                l
            )));
        }
        Ok(Covariates { w, l, names: None })
    }
}

/// Fixed prior hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Dirichlet parameters for the block-specific category probabilities,
    /// length C.
    pub a_theta: Vec<f64>,
    /// Dirichlet-categorical cohesion parameters, length L.
    pub a_w: Vec<f64>,
    /// Beta parameters for the transition probabilities.
    pub a_alpha: f64,
    pub b_alpha: f64,
    /// Gamma shape/rate for the concentration parameters.
    pub a_eta: f64,
    pub b_eta: f64,
}

impl Hyperparameters {
    /// Diffuse defaults: Dirichlet(1,...,1), Beta(1,1), Gamma(0.002, 0.001),
    /// unit cohesion parameters.
    pub fn diffuse(c: usize, l: usize) -> Self {
        Hyperparameters {
            a_theta: vec![1.0; c],
            a_w: vec![1.0; l],
            a_alpha: 1.0,
            b_alpha: 1.0,
            a_eta: 0.002,
            b_eta: 0.001,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !self.a_theta.iter().copied().all(pos) || self.a_theta.len() < 2 {
            return Err(Error::Invalid(
                "a_theta must have >= 2 strictly positive entries".into(),
            ));
        }
        if !self.a_w.iter().copied().all(pos) || self.a_w.is_empty() {
            return Err(Error::Invalid(
                "a_w must have >= 1 strictly positive entries".into(),
            ));
        }
        for (name, v) in [
            ("a_alpha", self.a_alpha),
            ("b_alpha", self.b_alpha),
            ("a_eta", self.a_eta),
            ("b_eta", self.b_eta),
        ] {
            if !pos(v) {
                return Err(Error::Invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize, cats: &[u8]) -> CatMatrix {
        CatMatrix::new(n, cats.to_vec())
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(NetworkSequence::new(1, 2, Mode::Directed, true, vec![toy(1, &[0])]).is_err());
        assert!(NetworkSequence::new(2, 2, Mode::Directed, true, vec![]).is_err());
        assert!(
            NetworkSequence::new(2, 1, Mode::Directed, true, vec![toy(2, &[0, 0, 0, 0])]).is_err()
        );
    }

    #[test]
    fn rejects_out_of_range_category() {
        let err = NetworkSequence::new(2, 2, Mode::Directed, true, vec![toy(2, &[0, 2, 0, 0])])
            .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn undirected_requires_symmetry_and_drops_diagonal() {
        let asym = toy(2, &[0, 1, 0, 0]);
        assert!(NetworkSequence::new(2, 2, Mode::Undirected, false, vec![asym]).is_err());
        let sym = toy(2, &[0, 1, 1, 0]);
        let seq = NetworkSequence::new(2, 2, Mode::Undirected, true, vec![sym]).unwrap();
        assert!(!seq.include_diagonal);
    }

    #[test]
    fn covariate_range_checked() {
        assert!(Covariates::new(vec![0, 1, 2], 3).is_ok());
        assert!(Covariates::new(vec![0, 3], 3).is_err());
    }

    #[test]
    fn hyperparameters_validate() {
        let mut h = Hyperparameters::diffuse(4, 2);
        assert!(h.validate().is_ok());
        h.a_theta[2] = 0.0;
        assert!(h.validate().is_err());
    }
}
