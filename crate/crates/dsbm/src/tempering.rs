//! Adaptive parallel tempering: temperature ladder, non-reversible
//! deterministic swaps, Robbins-Monro ladder adaptation, sample
//! collection.
//!
//! Only the likelihood is tempered; the sequence prior is common to all
//! chains, so swap acceptance depends only on the collapsed log-likelihood
//! difference. States move between temperature slots while each beta stays
//! attached to its slot; slot 0 always holds beta = 1 and is the only one
//! that contributes samples.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Covariates, Hyperparameters, Mode, NetworkSequence};
use crate::error::{Error, Result};
use crate::gibbs::{sweep, ChainState, EngineOpts, ModelCtx, Workspace};
use crate::util::derive_seed;

/// Decreasing inverse temperatures with their adaptation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ladder {
    /// Strictly decreasing, `betas[0] = 1`.
    pub betas: Vec<f64>,
    /// Log-spacing parameters: `beta_{l+1} = beta_l / (1 + exp(rho_l))`.
    pub rho: Vec<f64>,
    /// Desired swap acceptance rate.
    pub target_acc: f64,
    /// Robbins-Monro gain exponent: step t uses gain t^(-adapt_rate).
    pub adapt_rate: f64,
    /// Sweeps between swap rounds.
    pub swap_period: usize,
}

impl Ladder {
    /// Geometric start: `beta_l = ratio^l`.
    pub fn geometric(chains: usize, ratio: f64) -> Self {
        assert!(chains >= 1);
        assert!(ratio > 0.0 && ratio < 1.0);
        let rho = vec![(1.0 / ratio - 1.0).ln(); chains - 1];
        let mut ladder = Ladder {
            betas: vec![1.0; chains],
            rho,
            target_acc: 0.234,
            adapt_rate: 0.6,
            swap_period: 1,
        };
        ladder.rebuild_betas();
        ladder
    }

    pub fn from_betas(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas[0] != 1.0 {
            return Err(Error::Invalid("ladder must start at beta = 1".into()));
        }
        if betas.windows(2).any(|w| w[1] >= w[0]) || betas.iter().any(|&b| b <= 0.0) {
            return Err(Error::Invalid(
                "inverse temperatures must be strictly decreasing and positive".into(),
            ));
        }
        let rho = betas.windows(2).map(|w| (w[0] / w[1] - 1.0).ln()).collect();
        Ok(Ladder {
            betas,
            rho,
            target_acc: 0.234,
            adapt_rate: 0.6,
            swap_period: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    fn rebuild_betas(&mut self) {
        let mut beta = 1.0;
        self.betas[0] = 1.0;
        for (l, &rho) in self.rho.iter().enumerate() {
            beta /= 1.0 + rho.exp();
            self.betas[l + 1] = beta;
        }
    }

    /// Robbins-Monro step toward the target acceptance; monotone by
    /// construction. Adaptation is only ever applied during burn-in.
    pub fn adapt(&mut self, records: &[SwapRecord], t_step: usize) {
        let gain = (t_step as f64).powf(-self.adapt_rate);
        for rec in records {
            self.rho[rec.pair] += gain * (rec.accept_prob - self.target_acc);
        }
        self.rebuild_betas();
    }
}

/// MCMC schedule and seeding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub burn_in: usize,
    pub kept_iterations: usize,
    pub thin: usize,
    pub seed: u64,
    pub chains: usize,
    /// Progress line every this many sweeps on stderr; 0 silences.
    pub progress: usize,
    /// Worker cap for the parallel chain sweeps.
    pub threads: Option<usize>,
    pub engine: EngineOpts,
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        RunConfig {
            burn_in: 10_000,
            kept_iterations: 40_000,
            thin: 10,
            seed,
            chains: 4,
            progress: 0,
            threads: None,
            engine: EngineOpts::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kept_iterations == 0 || self.thin == 0 || self.chains == 0 {
            return Err(Error::Invalid(
                "kept_iterations, thin and chains must be positive".into(),
            ));
        }
        if self.kept_iterations % self.thin != 0 {
            return Err(Error::Invalid(format!(
                "kept_iterations {} not divisible by thin {}",
                self.kept_iterations, self.thin
            )));
        }
        Ok(())
    }
}

/// One attempted adjacent-pair swap.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SwapRecord {
    /// Pair index l for the slots (l, l+1).
    pub pair: usize,
    pub accept_prob: f64,
    pub accepted: bool,
}

/// Metropolis acceptance probability for exchanging states between
/// adjacent inverse temperatures; the prior is untempered, so only the
/// collapsed log-likelihoods enter.
pub fn swap_accept_prob(beta_l: f64, beta_next: f64, ll_l: f64, ll_next: f64) -> f64 {
    ((beta_l - beta_next) * (ll_next - ll_l)).exp().min(1.0)
}

/// One deterministic even-odd (DEO) swap round: even rounds try pairs
/// (0,1), (2,3), ...; odd rounds (1,2), (3,4), .... States are exchanged
/// whole; betas stay attached to their slots.
pub fn swap_round(
    states: &mut [ChainState],
    betas: &[f64],
    round: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<SwapRecord> {
    debug_assert_eq!(states.len(), betas.len());
    let mut records = Vec::new();
    let start = round % 2;
    let mut l = start;
    while l + 1 < states.len() {
        let prob = swap_accept_prob(
            betas[l],
            betas[l + 1],
            states[l].log_lik,
            states[l + 1].log_lik,
        );
        let accepted = rng.gen::<f64>() < prob;
        if accepted {
            states.swap(l, l + 1);
        }
        records.push(SwapRecord {
            pair: l,
            accept_prob: prob,
            accepted,
        });
        l += 2;
    }
    records
}

/// One kept posterior draw from the cold chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub iteration: u64,
    /// Row-partition labels per index (0-based in memory).
    pub z1: Vec<Vec<usize>>,
    pub alpha1: Vec<f64>,
    pub eta1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z2: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta2: Option<f64>,
    pub log_lik: f64,
}

/// Run provenance carried in the sample-file header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub version: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub c: usize,
    pub mode: Mode,
    pub supervised: bool,
    pub config: RunConfig,
    pub ladder_initial: Vec<f64>,
    pub ladder_final: Vec<f64>,
    pub mean_swap_acceptance: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_names: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_labels: Option<Vec<String>>,
    /// Normalization used by mutual-information summaries downstream.
    pub nmi_normalization: String,
}

impl PartialEq for RunConfig {
    fn eq(&self, other: &Self) -> bool {
        serde_json::to_string(self).unwrap() == serde_json::to_string(other).unwrap()
    }
}

/// Thinned cold-chain draws with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub meta: RunMeta,
    pub samples: Vec<SampleRecord>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Labels of the requested side at index x for sample s; falls back to
    /// the shared sequence in undirected mode.
    pub fn labels(&self, s: usize, cols: bool, x: usize) -> &[usize] {
        let rec = &self.samples[s];
        if cols {
            rec.z2
                .as_ref()
                .map(|z| z[x].as_slice())
                .unwrap_or(&rec.z1[x])
        } else {
            &rec.z1[x]
        }
    }
}

struct Slot {
    state: ChainState,
    rng: ChaCha8Rng,
    ws: Workspace,
}

/// Fit the model: prior-initialized chains, `swap_period` sweeps between
/// DEO swap rounds, Robbins-Monro ladder adaptation during burn-in, then
/// thinned cold-chain collection.
pub fn run(
    y: &NetworkSequence,
    w: Option<&Covariates>,
    hyper: &Hyperparameters,
    config: &RunConfig,
    ladder: &Ladder,
) -> Result<SampleSet> {
    config.validate()?;
    if ladder.len() != config.chains {
        return Err(Error::Invalid(format!(
            "ladder has {} rungs but config asks for {} chains",
            ladder.len(),
            config.chains
        )));
    }
    match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
            .install(|| run_inner(y, w, hyper, config, ladder)),
        None => run_inner(y, w, hyper, config, ladder),
    }
}

fn run_inner(
    y: &NetworkSequence,
    w: Option<&Covariates>,
    hyper: &Hyperparameters,
    config: &RunConfig,
    ladder: &Ladder,
) -> Result<SampleSet> {
    let ctx = ModelCtx::new(y, w, hyper, config.engine.clone())?;
    let t_chains = ladder.len();
    let mut slots: Vec<Slot> = (0..t_chains)
        .map(|l| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 1 + l as u64));
            Ok(Slot {
                state: ChainState::from_prior(&ctx, &mut rng)?,
                rng,
                ws: Workspace::new(hyper),
            })
        })
        .collect::<Result<_>>()?;
    let mut swap_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 0xace));
    let mut ladder = ladder.clone();
    let initial_betas = ladder.betas.clone();
    let total = config.burn_in + config.kept_iterations;
    let mut samples = Vec::with_capacity(config.kept_iterations / config.thin);
    let mut acc_sum = vec![0.0; t_chains.saturating_sub(1)];
    let mut acc_n = vec![0u64; t_chains.saturating_sub(1)];
    let mut round = 0usize;
    let mut adapt_step = 0usize;

    for it in 1..=total {
        let betas = ladder.betas.clone();
        slots
            .par_iter_mut()
            .zip(betas.par_iter())
            .for_each(|(slot, &beta)| {
                sweep(&mut slot.state, &ctx, beta, &mut slot.rng, &mut slot.ws);
            });
        if t_chains > 1 && it % ladder.swap_period == 0 {
            let mut states: Vec<&mut ChainState> = slots.iter_mut().map(|s| &mut s.state).collect();
            let records = swap_round_ref(&mut states, &ladder.betas, round, &mut swap_rng);
            for rec in &records {
                acc_sum[rec.pair] += rec.accept_prob;
                acc_n[rec.pair] += 1;
            }
            if it <= config.burn_in {
                adapt_step += 1;
                ladder.adapt(&records, adapt_step);
            }
            round += 1;
        }
        if it > config.burn_in && (it - config.burn_in) % config.thin == 0 {
            let cold = &slots[0].state;
            samples.push(SampleRecord {
                iteration: it as u64,
                z1: cold.rows.z.iter().cloned().collect(),
                alpha1: cold.rows.persistence.alpha.clone(),
                eta1: cold.rows.eta,
                z2: cold.cols.as_ref().map(|c| c.z.iter().cloned().collect()),
                alpha2: cold.cols.as_ref().map(|c| c.persistence.alpha.clone()),
                eta2: cold.cols.as_ref().map(|c| c.eta),
                log_lik: cold.log_lik,
            });
        }
        if config.progress > 0 && it % config.progress == 0 {
            let acc: Vec<String> = acc_sum
                .iter()
                .zip(&acc_n)
                .map(|(&s, &n)| format!("{:.2}", if n > 0 { s / n as f64 } else { f64::NAN }))
                .collect();
            eprintln!(
                "sweep {it}/{total} cold log-lik {:.3} swap acc [{}]",
                slots[0].state.log_lik,
                acc.join(" ")
            );
        }
    }

    let mean_acc: Vec<f64> = acc_sum
        .iter()
        .zip(&acc_n)
        .map(|(&s, &n)| if n > 0 { s / n as f64 } else { f64::NAN })
        .collect();
    Ok(SampleSet {
        meta: RunMeta {
            version: "1".into(),
            seed: config.seed,
            n: y.n,
            m: y.m,
            c: y.c,
            mode: y.mode,
            supervised: w.is_some(),
            config: config.clone(),
            ladder_initial: initial_betas,
            ladder_final: ladder.betas.clone(),
            mean_swap_acceptance: mean_acc,
            node_names: y.node_names.clone(),
            index_labels: y.index_labels.clone(),
            nmi_normalization: "arithmetic-mean".into(),
        },
        samples,
    })
}

fn swap_round_ref(
    states: &mut [&mut ChainState],
    betas: &[f64],
    round: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<SwapRecord> {
    let mut records = Vec::new();
    let mut l = round % 2;
    while l + 1 < states.len() {
        let prob = swap_accept_prob(
            betas[l],
            betas[l + 1],
            states[l].log_lik,
            states[l + 1].log_lik,
        );
        let accepted = rng.gen::<f64>() < prob;
        if accepted {
            states.swap(l, l + 1);
        }
        records.push(SwapRecord {
            pair: l,
            accept_prob: prob,
            accepted,
        });
        l += 2;
    }
    records
}
