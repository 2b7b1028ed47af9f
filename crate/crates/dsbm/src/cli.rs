//! Command-line wiring: `simulate`, `ingest`, `fit`, `summarize`, `eval`,
//! `plot`. Exit codes: 0 success, 2 usage, 3 data problems, 4 runtime
//! failures.
//!
//! `fit` accepts a flat `key = value` config file mirroring its flags;
//! explicit flags win over file values.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{Covariates, Hyperparameters, Mode};
use crate::error::{Error, Result};
use crate::gibbs::EngineOpts;
use crate::partition::PartitionSequence;
use crate::synthetic::{generate_scenario, ScenarioSpec};
use crate::tempering::{run, Ladder, RunConfig};
use crate::{io as fio, plot, summaries};

#[derive(Parser)]
#[command(
    name = "dsbm",
    version,
    about = "Dependent stochastic block models for sequences of categorically-weighted networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a planted-structure network sequence with its true partitions
    Simulate(SimulateArgs),
    /// Discretize long-format co-occurrence counts into a category network
    Ingest(IngestArgs),
    /// Sample the posterior with tempered collapsed Gibbs
    Fit(FitArgs),
    /// Turn a sample file into similarity matrices, point estimates, meet
    /// clusters, block probabilities and connectivity scores
    Summarize(SummarizeArgs),
    /// Score estimated partitions against a reference (RI, ARI, NMI)
    Eval(EvalArgs),
    /// Render a group-reordered adjacency heatmap as SVG
    Plot(PlotArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario 1 (directed, two partitions) or 2 (undirected, shared)
    #[arg(long, default_value_t = 1)]
    scenario: u8,
    /// Nodes
    #[arg(long)]
    n: Option<usize>,
    /// Sequence length
    #[arg(long)]
    m: Option<usize>,
    /// Cluster count per index: one value or a comma list of length m
    #[arg(long)]
    clusters: Option<String>,
    /// Movers per transition: one value or a comma list of length m-1
    #[arg(long)]
    movers: Option<String>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out_network: PathBuf,
    #[arg(long)]
    out_truth_rows: Option<PathBuf>,
    #[arg(long)]
    out_truth_cols: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// Long-format counts CSV: x,row,col,count
    #[arg(long)]
    counts: PathBuf,
    /// Ascending inclusive upper bounds; K cuts give K+1 categories
    #[arg(long, default_value = "0,10,100")]
    thresholds: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Directed)]
    mode: ModeArg,
    /// Drop (i,i) cells from the likelihood
    #[arg(long)]
    exclude_diagonal: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ModeArg {
    Directed,
    Undirected,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Directed => Mode::Directed,
            ModeArg::Undirected => Mode::Undirected,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    network: PathBuf,
    /// Node macro-categories: node,category CSV (supervised prior)
    #[arg(long)]
    covariates: Option<PathBuf>,
    /// Drop the covariate factors even when --covariates is given
    #[arg(long)]
    unsupervised: bool,
    /// Flat key = value file mirroring these flags (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Post-burn-in sweeps before thinning
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long)]
    chains: Option<usize>,
    /// Initial geometric ladder ratio
    #[arg(long)]
    beta_ratio: Option<f64>,
    #[arg(long)]
    target_acceptance: Option<f64>,
    #[arg(long)]
    adapt_rate: Option<f64>,
    #[arg(long)]
    swap_period: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Progress line on stderr every N sweeps (0 = off)
    #[arg(long)]
    progress: Option<usize>,
    /// Dirichlet parameters for the edge categories, comma list of length C
    #[arg(long)]
    a_theta: Option<String>,
    /// Cohesion parameters, comma list of length L
    #[arg(long)]
    a_w: Option<String>,
    #[arg(long)]
    a_alpha: Option<f64>,
    #[arg(long)]
    b_alpha: Option<f64>,
    #[arg(long)]
    a_eta: Option<f64>,
    #[arg(long)]
    b_eta: Option<f64>,
    /// Freeze every transition probability at this value
    #[arg(long)]
    fixed_alpha: Option<f64>,
    /// Freeze the concentration parameters at this value
    #[arg(long)]
    fixed_eta: Option<f64>,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Meet partition over these 1-based indices (repeatable), e.g. 6,7,8
    #[arg(long)]
    meet: Vec<String>,
}

#[derive(Args)]
struct EvalArgs {
    /// Reference partitions: x,node,label CSV
    #[arg(long)]
    truth: PathBuf,
    /// Estimated partitions in the same format
    #[arg(long)]
    est: PathBuf,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    network: PathBuf,
    /// Row partitions: x,node,label CSV (e.g. summarize's partitions_rows.csv)
    #[arg(long)]
    partitions_rows: PathBuf,
    /// Column partitions; defaults to the row file
    #[arg(long)]
    partitions_cols: Option<PathBuf>,
    /// 1-based sequence index to draw
    #[arg(long)]
    index: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Parse argv and dispatch; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Ingest(a) => cmd_ingest(a),
        Cmd::Fit(a) => cmd_fit(a),
        Cmd::Summarize(a) => cmd_summarize(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Plot(a) => cmd_plot(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::Invalid(format!("invalid {what} entry {tok:?}")))
        })
        .collect()
}

fn expand<T: Clone>(vals: Vec<T>, len: usize, what: &str) -> Result<Vec<T>> {
    if vals.len() == len {
        Ok(vals)
    } else if vals.len() == 1 {
        Ok(vec![vals[0].clone(); len])
    } else {
        Err(Error::Invalid(format!(
            "{what} needs 1 or {len} entries, got {}",
            vals.len()
        )))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let mut spec = match a.scenario {
        1 => ScenarioSpec::scenario1(),
        2 => ScenarioSpec::scenario2(),
        other => return Err(Error::Invalid(format!("unknown scenario {other}"))),
    };
    if let Some(n) = a.n {
        spec.n = n;
        spec.movers = vec![(n / 10).max(1); spec.m - 1];
    }
    if let Some(m) = a.m {
        spec.m = m;
        let last = *spec.clusters.last().unwrap();
        spec.clusters.resize(m, last);
        let mv = *spec.movers.first().unwrap_or(&1);
        spec.movers = vec![mv; m - 1];
    }
    if let Some(c) = &a.clusters {
        spec.clusters = expand(parse_list(c, "clusters")?, spec.m, "--clusters")?;
    }
    if let Some(mv) = &a.movers {
        spec.movers = expand(parse_list(mv, "movers")?, spec.m - 1, "--movers")?;
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let (y, z1, z2) = generate_scenario(&spec, &mut rng)?;
    fio::write_network_csv(&y, &mut create(&a.out_network)?)?;
    let names: Vec<String> = (0..y.n).map(|i| y.node_name(i)).collect();
    if let Some(path) = &a.out_truth_rows {
        let z: Vec<Vec<usize>> = z1.iter().cloned().collect();
        fio::write_partitions_csv(&z, &names, &mut create(path)?)?;
    }
    if let Some(path) = &a.out_truth_cols {
        let z: Vec<Vec<usize>> = z2.iter().cloned().collect();
        fio::write_partitions_csv(&z, &names, &mut create(path)?)?;
    }
    Ok(())
}

fn cmd_ingest(a: IngestArgs) -> Result<()> {
    let counts = fio::read_counts_csv(open(&a.counts)?, &a.counts.to_string_lossy())?;
    let thresholds: Vec<u64> = parse_list(&a.thresholds, "threshold")?;
    let y = fio::discretize(
        &counts,
        &thresholds,
        a.mode.into(),
        !a.exclude_diagonal,
        None,
    )?;
    fio::write_network_csv(&y, &mut create(&a.out)?)?;
    Ok(())
}

fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_string_lossy().into_owned(),
            line: lineno + 1,
            msg: "expected key = value".into(),
        })?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn cfg_get<T: std::str::FromStr>(cfg: &HashMap<String, String>, key: &str) -> Result<Option<T>> {
    match cfg.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Invalid(format!("config {key}: invalid value {raw:?}"))),
    }
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let cfg = match &a.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };
    macro_rules! merged {
        ($flag:expr, $key:literal) => {
            match $flag {
                Some(v) => Some(v),
                None => cfg_get(&cfg, $key)?,
            }
        };
    }
    let y = fio::read_network_csv(open(&a.network)?, &a.network.to_string_lossy())?;
    let covariates: Option<Covariates> = match (&a.covariates, a.unsupervised) {
        (Some(path), false) => {
            let names: Vec<String> = (0..y.n).map(|i| y.node_name(i)).collect();
            Some(fio::read_covariates_csv(
                open(path)?,
                &path.to_string_lossy(),
                &names,
            )?)
        }
        _ => None,
    };
    let seed = merged!(a.seed, "seed")
        .ok_or_else(|| Error::Invalid("--seed is required (flag or config file)".into()))?;
    let mut config = RunConfig::with_seed(seed);
    if let Some(v) = merged!(a.burn_in, "burn_in") {
        config.burn_in = v;
    }
    if let Some(v) = merged!(a.iterations, "iterations") {
        config.kept_iterations = v;
    }
    if let Some(v) = merged!(a.thin, "thin") {
        config.thin = v;
    }
    if let Some(v) = merged!(a.chains, "chains") {
        config.chains = v;
    }
    if let Some(v) = merged!(a.threads, "threads") {
        config.threads = Some(v);
    }
    if let Some(v) = merged!(a.progress, "progress") {
        config.progress = v;
    }
    config.engine = EngineOpts {
        fixed_alpha: merged!(a.fixed_alpha, "fixed_alpha"),
        fixed_eta: merged!(a.fixed_eta, "fixed_eta"),
        eta_proposal_sd: 0.5,
    };
    let l = covariates.as_ref().map_or(1, |c| c.l);
    let mut hyper = Hyperparameters::diffuse(y.c, l);
    if let Some(list) = merged!(a.a_theta.clone(), "a_theta") {
        hyper.a_theta = parse_list(&list, "a_theta")?;
    }
    if let Some(list) = merged!(a.a_w.clone(), "a_w") {
        hyper.a_w = parse_list(&list, "a_w")?;
    }
    if let Some(v) = merged!(a.a_alpha, "a_alpha") {
        hyper.a_alpha = v;
    }
    if let Some(v) = merged!(a.b_alpha, "b_alpha") {
        hyper.b_alpha = v;
    }
    if let Some(v) = merged!(a.a_eta, "a_eta") {
        hyper.a_eta = v;
    }
    if let Some(v) = merged!(a.b_eta, "b_eta") {
        hyper.b_eta = v;
    }
    let mut ladder = Ladder::geometric(
        config.chains,
        merged!(a.beta_ratio, "beta_ratio").unwrap_or(0.6),
    );
    if let Some(v) = merged!(a.target_acceptance, "target_acceptance") {
        ladder.target_acc = v;
    }
    if let Some(v) = merged!(a.adapt_rate, "adapt_rate") {
        ladder.adapt_rate = v;
    }
    if let Some(v) = merged!(a.swap_period, "swap_period") {
        ladder.swap_period = v;
    }

    let samples = run(&y, covariates.as_ref(), &hyper, &config, &ladder)?;
    fio::write_samples(&samples, &mut create(&a.out)?)?;

    // machine-readable run manifest next to the sample file
    #[derive(serde::Serialize)]
    struct Manifest<'a> {
        tool: &'static str,
        tool_version: &'static str,
        network: String,
        covariates: Option<String>,
        out: String,
        seed: u64,
        config: &'a RunConfig,
        hyperparameters: &'a Hyperparameters,
        ladder_initial: &'a [f64],
        ladder_final: &'a [f64],
    }
    let manifest = Manifest {
        tool: "dsbm",
        tool_version: env!("CARGO_PKG_VERSION"),
        network: a.network.to_string_lossy().into_owned(),
        covariates: a
            .covariates
            .as_ref()
            .map(|p| p.to_string_lossy().into_owned()),
        out: a.out.to_string_lossy().into_owned(),
        seed,
        config: &config,
        hyperparameters: &hyper,
        ladder_initial: &samples.meta.ladder_initial,
        ladder_final: &samples.meta.ladder_final,
    };
    let manifest_path = a.out.with_extension("manifest.json");
    serde_json::to_writer_pretty(&mut create(&manifest_path)?, &manifest)?;
    Ok(())
}

fn cmd_summarize(a: SummarizeArgs) -> Result<()> {
    let y = fio::read_network_csv(open(&a.network)?, &a.network.to_string_lossy())?;
    let samples = fio::read_samples(open(&a.samples)?, &a.samples.to_string_lossy())?;
    let meet_indices: Vec<Vec<usize>> = a
        .meet
        .iter()
        .map(|s| -> Result<Vec<usize>> {
            let idx: Vec<usize> = parse_list(s, "meet index")?;
            idx.iter()
                .map(|&x| {
                    if x == 0 {
                        Err(Error::Invalid("meet indices are 1-based".into()))
                    } else {
                        Ok(x - 1)
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let summary = summaries::summarize(&y, &samples, &meet_indices)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let names: Vec<String> = (0..y.n).map(|i| y.node_name(i)).collect();
    let dir = &a.out_dir;
    for x in 0..y.m {
        fio::write_matrix_csv(
            &summary.psm1[x],
            &names,
            &mut create(&dir.join(format!("psm_rows_{:02}.csv", x + 1)))?,
        )?;
        if y.mode == Mode::Directed {
            fio::write_matrix_csv(
                &summary.psm2[x],
                &names,
                &mut create(&dir.join(format!("psm_cols_{:02}.csv", x + 1)))?,
            )?;
        }
    }
    let z1: Vec<Vec<usize>> = summary.zhat1.iter().cloned().collect();
    fio::write_partitions_csv(&z1, &names, &mut create(&dir.join("partitions_rows.csv"))?)?;
    if y.mode == Mode::Directed {
        let z2: Vec<Vec<usize>> = summary.zhat2.iter().cloned().collect();
        fio::write_partitions_csv(&z2, &names, &mut create(&dir.join("partitions_cols.csv"))?)?;
    }
    fio::write_theta_csv(&summary.theta, &mut create(&dir.join("theta.csv"))?)?;
    if y.c == 4 {
        fio::write_mcs_csv(
            &summary.mcs1,
            &summary.mcs2,
            &mut create(&dir.join("mcs.csv"))?,
        )?;
    }
    let write_meets = |meets: &[(Vec<usize>, Vec<usize>)], side: &str| -> Result<()> {
        for (idxs, labels) in meets {
            let tag: Vec<String> = idxs.iter().map(|x| (x + 1).to_string()).collect();
            let path = dir.join(format!("meet_{side}_{}.csv", tag.join("-")));
            let mut w = csv::Writer::from_writer(create(&path)?);
            w.write_record(["node", "meet_cluster"])
                .map_err(Error::from)?;
            for (i, &l) in labels.iter().enumerate() {
                w.write_record([names[i].clone(), (l + 1).to_string()])
                    .map_err(Error::from)?;
            }
            w.flush()?;
        }
        Ok(())
    };
    write_meets(&summary.meets1, "rows")?;
    if y.mode == Mode::Directed {
        write_meets(&summary.meets2, "cols")?;
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let (z_true, names_true) =
        fio::read_partitions_csv(open(&a.truth)?, &a.truth.to_string_lossy())?;
    let (z_est, names_est) = fio::read_partitions_csv(open(&a.est)?, &a.est.to_string_lossy())?;
    if z_true.len() != z_est.len() {
        return Err(Error::Dimension(format!(
            "truth has {} indices, estimate has {}",
            z_true.len(),
            z_est.len()
        )));
    }
    // align estimate to the truth's node order by name
    let pos: HashMap<&str, usize> = names_est
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mapping: Vec<usize> = names_true
        .iter()
        .map(|name| {
            pos.get(name.as_str())
                .copied()
                .ok_or_else(|| Error::Invalid(format!("node {name:?} missing from the estimate")))
        })
        .collect::<Result<_>>()?;
    if names_est.len() != names_true.len() {
        return Err(Error::Dimension(format!(
            "truth has {} nodes, estimate has {}",
            names_true.len(),
            names_est.len()
        )));
    }
    let mut out: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(out, "# nmi-normalization=arithmetic-mean")?;
    writeln!(out, "x,ri,ari,nmi")?;
    for (x, zt) in z_true.iter().enumerate() {
        let ze: Vec<usize> = mapping.iter().map(|&j| z_est[x][j]).collect();
        let m = summaries::clustering_metrics(zt, &ze);
        writeln!(out, "{},{},{},{}", x + 1, m.ri, m.ari, m.nmi)?;
    }
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    let y = fio::read_network_csv(open(&a.network)?, &a.network.to_string_lossy())?;
    let names: Vec<String> = (0..y.n).map(|i| y.node_name(i)).collect();
    let load = |path: &Path| -> Result<PartitionSequence> {
        let (z, znames) = fio::read_partitions_csv(open(path)?, &path.to_string_lossy())?;
        if znames != names {
            // reorder by the network's node order
            let pos: HashMap<&str, usize> = znames
                .iter()
                .enumerate()
                .map(|(i, s)| (s.as_str(), i))
                .collect();
            let mapping: Vec<usize> = names
                .iter()
                .map(|n| {
                    pos.get(n.as_str())
                        .copied()
                        .ok_or_else(|| Error::Invalid(format!("node {n:?} missing from {path:?}")))
                })
                .collect::<Result<_>>()?;
            let reordered: Vec<Vec<usize>> = z
                .iter()
                .map(|zx| mapping.iter().map(|&j| zx[j]).collect())
                .collect();
            PartitionSequence::new(reordered)
        } else {
            PartitionSequence::new(z)
        }
    };
    let z_rows = load(&a.partitions_rows)?;
    let z_cols = match &a.partitions_cols {
        Some(path) => load(path)?,
        None => z_rows.clone(),
    };
    if a.index == 0 {
        return Err(Error::Invalid("--index is 1-based".into()));
    }
    let svg = plot::adjacency_heatmap_svg(
        &y,
        a.index - 1,
        z_rows.labels(a.index - 1),
        z_cols.labels(a.index - 1),
    )?;
    std::fs::write(&a.out, svg)?;
    Ok(())
}
