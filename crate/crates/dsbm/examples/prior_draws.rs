//! DRPM-w prior behavior: how persistence probabilities tie consecutive
//! partitions together, how the concentration parameter drives the number
//! of clusters, and what covariate supervision does to cluster purity.
//!
//! Run with `cargo run --release -p dsbm --example prior_draws`.

use dsbm::prior::{drpmw_sample, CrpwParams};
use dsbm::summaries::clustering_metrics;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let n = 60;
    let m = 6;
    let draws = 2_000;

    println!("persistence: mean ARI(z_x, z_x+1) across {draws} prior draws (n = {n})");
    for alpha in [0.0, 0.5, 0.9, 1.0] {
        let params = CrpwParams::unsupervised(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ari = 0.0;
        for _ in 0..draws {
            let (z, _) = drpmw_sample(n, m, &params, None, &[alpha; 5], &mut rng).unwrap();
            for x in 0..m - 1 {
                ari += clustering_metrics(z.labels(x), z.labels(x + 1)).ari;
            }
        }
        println!(
            "  alpha = {alpha:.1}  ->  {:.3}",
            ari / (draws * (m - 1)) as f64
        );
    }

    println!("\nconcentration: mean cluster count at the first index");
    for eta in [0.3, 1.0, 3.0, 10.0] {
        let params = CrpwParams::unsupervised(eta);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mean: f64 = (0..draws)
            .map(|_| {
                let (z, _) = drpmw_sample(n, 1, &params, None, &[], &mut rng).unwrap();
                z.h(0) as f64
            })
            .sum::<f64>()
            / draws as f64;
        let expected: f64 = (0..n).map(|i| eta / (eta + i as f64)).sum();
        println!("  eta = {eta:>4.1}  ->  {mean:.2}  (theory {expected:.2})");
    }

    // supervision: concentrated cohesion parameters reward clusters that
    // are homogeneous in the external macro-categories
    let l = 4;
    let w: Vec<usize> = (0..n).map(|i| i % l).collect();
    let purity = |z: &[usize]| -> f64 {
        let h = z.iter().max().unwrap() + 1;
        let mut counts = vec![0usize; h * l];
        for (i, &zi) in z.iter().enumerate() {
            counts[zi * l + w[i]] += 1;
        }
        (0..h)
            .map(|c| counts[c * l..(c + 1) * l].iter().max().unwrap())
            .sum::<usize>() as f64
            / n as f64
    };
    println!("\nsupervision: mean macro-category purity of prior draws (L = {l})");
    for (label, params) in [
        ("unsupervised", CrpwParams::unsupervised(1.0)),
        ("a_w = 1.0", CrpwParams::supervised(1.0, vec![1.0; l])),
        ("a_w = 0.1", CrpwParams::supervised(1.0, vec![0.1; l])),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let wref = params.supervised.then_some(w.as_slice());
        let mean: f64 = (0..draws)
            .map(|_| {
                let (z, _) = drpmw_sample(n, 1, &params, wref, &[], &mut rng).unwrap();
                purity(z.labels(0))
            })
            .sum::<f64>()
            / draws as f64;
        println!("  {label:<13} ->  {mean:.3}");
    }
}
