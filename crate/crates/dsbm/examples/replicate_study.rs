//! Replicated accuracy benchmark: generate -> fit -> score several times
//! and summarize RI/ARI/NMI with medians, interquartile ranges and ranges.
//!
//! Run with `cargo run --release -p dsbm --example replicate_study`.

use dsbm::data::{Hyperparameters, Mode};
use dsbm::synthetic::{default_theta_rows, replicate_study, ScenarioSpec};
use dsbm::tempering::{Ladder, RunConfig};

fn main() {
    let spec = ScenarioSpec {
        n: 24,
        m: 3,
        c: 4,
        mode: Mode::Directed,
        include_diagonal: true,
        clusters: vec![3; 3],
        movers: vec![2, 2],
        theta_rows: default_theta_rows(),
    };
    let hyper = Hyperparameters::diffuse(spec.c, 1);
    let mut fit = RunConfig::with_seed(1234);
    fit.burn_in = 800;
    fit.kept_iterations = 2_000;
    fit.thin = 4;
    fit.chains = 2;
    let replicates = 4;
    eprintln!("running {replicates} replicates (a minute or so)...");
    let table =
        replicate_study(&spec, replicates, &hyper, &fit, &Ladder::geometric(2, 0.6)).unwrap();

    println!("side  x  metric  median  q1..q3        range");
    for s in table.summaries() {
        println!(
            "{:<5} {}  {:<6}  {:.3}   {:.3}..{:.3}  {:.3}..{:.3}",
            s.side, s.index, s.metric, s.median, s.q1, s.q3, s.min, s.max
        );
    }
}
