//! From raw co-occurrence counts to a fit-ready category network:
//! threshold discretization, covariate attachment, and the on-disk
//! formats.
//!
//! Run with `cargo run --release -p dsbm --example discretize_counts`.

use dsbm::io::{
    categorize, default_thresholds, discretize, read_covariates_csv, read_network_csv,
    write_network_csv, CountRecord,
};
use dsbm::Mode;

fn main() {
    let thresholds = default_thresholds();
    println!("default cuts {thresholds:?} (inclusive upper bounds):");
    for count in [0u64, 1, 7, 10, 11, 99, 100, 101, 3_500] {
        println!(
            "  count {count:>5} -> category {}",
            categorize(count, &thresholds)
        );
    }

    // a small long-format extract: (index, underlying, contributing, count)
    let rows = [
        (1, "heart", "lung", 230),
        (1, "heart", "kidney", 42),
        (1, "lung", "heart", 8),
        (2, "heart", "lung", 610),
        (2, "lung", "kidney", 3),
        (2, "kidney", "kidney", 115),
    ];
    let counts: Vec<CountRecord> = rows
        .iter()
        .map(|&(x, row, col, count)| CountRecord {
            x,
            row: row.into(),
            col: col.into(),
            count,
        })
        .collect();
    let y = discretize(&counts, &thresholds, Mode::Directed, true, None).unwrap();
    println!(
        "\ndiscretized network: n = {}, m = {}, C = {} (missing pairs -> category 1)",
        y.n, y.m, y.c
    );

    let mut buf = Vec::new();
    write_network_csv(&y, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    println!("\nnetwork file starts with:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }
    let reread = read_network_csv(&buf[..], "mem").unwrap();
    assert_eq!(reread.y[0], y.y[0]);

    let cov_csv = "node,category\nheart,circulatory\nlung,respiratory\nkidney,genitourinary\n";
    let names: Vec<String> = (0..y.n).map(|i| y.node_name(i)).collect();
    let cov = read_covariates_csv(cov_csv.as_bytes(), "w.csv", &names).unwrap();
    println!(
        "\ncovariates: L = {} macro-categories, labels {:?}",
        cov.l,
        cov.names.as_ref().unwrap()
    );
}
