//! Ladder adaptation in action: start from a deliberately bad geometric
//! ladder and watch the Robbins-Monro updates pull the swap acceptance
//! toward the 0.234 target during burn-in.
//!
//! Run with `cargo run --release -p dsbm --example tempering_ladder`.

use dsbm::data::{Hyperparameters, Mode};
use dsbm::synthetic::{default_theta_rows, generate_scenario, ScenarioSpec};
use dsbm::tempering::{run, Ladder, RunConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

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
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (y, _, _) = generate_scenario(&spec, &mut rng).unwrap();
    let hyper = Hyperparameters::diffuse(y.c, 1);

    for ratio in [0.95, 0.6, 0.2] {
        let mut config = RunConfig::with_seed(10);
        config.burn_in = 4_000;
        config.kept_iterations = 2_000;
        config.thin = 10;
        config.chains = 4;
        let ladder = Ladder::geometric(4, ratio);
        let samples = run(&y, None, &hyper, &config, &ladder).unwrap();
        let meta = &samples.meta;
        let fmt = |v: &[f64]| {
            v.iter()
                .map(|b| format!("{b:.3}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("initial ratio {ratio}");
        println!("  betas start  [{}]", fmt(&meta.ladder_initial));
        println!("  betas final  [{}]", fmt(&meta.ladder_final));
        println!(
            "  mean accept  [{}]  (target {})",
            fmt(&meta.mean_swap_acceptance),
            0.234
        );
    }
}
