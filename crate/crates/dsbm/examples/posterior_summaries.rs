//! The full post-processing toolchain on one fit: similarity matrices,
//! minimum-VI point estimates, meet clusters across contiguous indices,
//! plug-in block probabilities and marginal connectivity scores.
//!
//! Run with `cargo run --release -p dsbm --example posterior_summaries`.

use dsbm::data::{Hyperparameters, Mode};
use dsbm::summaries::summarize;
use dsbm::synthetic::{default_theta_rows, generate_scenario, ScenarioSpec};
use dsbm::tempering::{run, Ladder, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let spec = ScenarioSpec {
        n: 18,
        m: 3,
        c: 4,
        mode: Mode::Directed,
        include_diagonal: true,
        clusters: vec![3; 3],
        movers: vec![2, 2],
        theta_rows: default_theta_rows(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (y, _, _) = generate_scenario(&spec, &mut rng).unwrap();
    let hyper = Hyperparameters::diffuse(y.c, 1);
    let mut config = RunConfig::with_seed(22);
    config.burn_in = 1_000;
    config.kept_iterations = 4_000;
    config.thin = 4;
    config.chains = 2;
    let samples = run(&y, None, &hyper, &config, &Ladder::geometric(2, 0.6)).unwrap();

    // meet over all three indices: nodes that stay together everywhere
    let summary = summarize(&y, &samples, &[vec![0, 1, 2]]).unwrap();

    println!("similarity matrix, rows side, x = 1 (first 6 nodes):");
    for i in 0..6 {
        let row: Vec<String> = (0..6)
            .map(|j| format!("{:.2}", summary.psm1[0].get(i, j)))
            .collect();
        println!("  {}", row.join(" "));
    }

    println!("\nmin-VI row partitions:");
    for x in 0..y.m {
        println!("  x = {}: {:?}", x + 1, summary.zhat1.labels(x));
    }

    let (indices, meet) = &summary.meets1[0];
    println!(
        "\nmeet over indices {:?}: {} clusters, labels {:?}",
        indices.iter().map(|x| x + 1).collect::<Vec<_>>(),
        meet.iter().max().unwrap() + 1,
        meet
    );

    let t = &summary.theta[0];
    println!("\nblock category probabilities at x = 1 (rows = row group):");
    for h in 0..t.h {
        for k in 0..t.k {
            let probs: Vec<String> = (0..t.c).map(|c| format!("{:.2}", t.get(h, k, c))).collect();
            print!("  ({},{}) [{}]", h + 1, k + 1, probs.join(" "));
        }
        println!();
    }

    println!("\nmarginal connectivity scores at x = 1:");
    println!(
        "  row groups: {:?}",
        summary.mcs1[0]
            .iter()
            .map(|s| (s * 100.0).round() / 100.0)
            .collect::<Vec<_>>()
    );
    println!(
        "  col groups: {:?}",
        summary.mcs2[0]
            .iter()
            .map(|s| (s * 100.0).round() / 100.0)
            .collect::<Vec<_>>()
    );
}
