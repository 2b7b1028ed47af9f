//! File formats: category networks, raw co-occurrence counts,
//! covariates, partition files, sample sets, and summary tables.
//!
//! Conventions shared by every format: sequence indices, cluster labels
//! and categories are 1-based on disk (0-based in memory); node
//! identifiers are arbitrary strings; CSV files may carry `#` comment
//! lines. Readers reject malformed input with the offending line number.
//!
//! Byte-level examples live in the README.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::data::{CatMatrix, Covariates, Mode, NetworkSequence};
use crate::error::{Error, Result};
use crate::summaries::SimilarityMatrix;
use crate::summaries::ThetaEstimate;
use crate::tempering::SampleSet;

/// Default discretization cuts: 0 -> absent, 1-10 -> rare, 11-100 ->
/// present, >100 -> frequent.
pub fn default_thresholds() -> Vec<u64> {
    vec![0, 10, 100]
}

/// One long-format count record (1-based index, string node ids).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRecord {
    pub x: usize,
    pub row: String,
    pub col: String,
    pub count: u64,
}

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Map a count to its 1-based category: thresholds are inclusive upper
/// bounds, so `category = 1 + #{t : count > t}`.
pub fn categorize(count: u64, thresholds: &[u64]) -> u8 {
    (1 + thresholds.iter().filter(|&&t| count > t).count()) as u8
}

/// Turn long-format counts into a category network. Missing (x, row, col)
/// records are category 1 (`absent`); duplicates and non-ascending
/// thresholds are errors. Node order follows first appearance unless
/// `nodes` pins it.
pub fn discretize(
    counts: &[CountRecord],
    thresholds: &[u64],
    mode: Mode,
    include_diagonal: bool,
    nodes: Option<Vec<String>>,
) -> Result<NetworkSequence> {
    if thresholds.is_empty() || thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(
            "thresholds must be strictly ascending and non-empty".into(),
        ));
    }
    let mut names: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    if let Some(nodes) = nodes {
        for name in nodes {
            if index_of.insert(name.clone(), names.len()).is_some() {
                return Err(Error::Invalid(format!("duplicate node {name:?}")));
            }
            names.push(name);
        }
    } else {
        for rec in counts {
            for name in [&rec.row, &rec.col] {
                if !index_of.contains_key(name) {
                    index_of.insert(name.clone(), names.len());
                    names.push(name.clone());
                }
            }
        }
    }
    let m = counts.iter().map(|r| r.x).max().unwrap_or(0);
    if m == 0 || names.len() < 2 {
        return Err(Error::Invalid(
            "counts must cover at least one index and two nodes".into(),
        ));
    }
    let n = names.len();
    let c = thresholds.len() + 1;
    let mut mats = vec![CatMatrix::filled(n, 0); m];
    let mut seen: HashMap<(usize, usize, usize), u64> = HashMap::new();
    for rec in counts {
        if rec.x == 0 {
            return Err(Error::Invalid("index x must be 1-based".into()));
        }
        let i = *index_of
            .get(&rec.row)
            .ok_or_else(|| Error::Invalid(format!("node {:?} not in the node list", rec.row)))?;
        let j = *index_of
            .get(&rec.col)
            .ok_or_else(|| Error::Invalid(format!("node {:?} not in the node list", rec.col)))?;
        if seen.insert((rec.x, i, j), rec.count).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate record for (x={}, {}, {})",
                rec.x, rec.row, rec.col
            )));
        }
        mats[rec.x - 1].set(i, j, categorize(rec.count, thresholds) - 1);
    }
    if mode == Mode::Undirected {
        // counts may list each unordered pair once; mirror before the
        // symmetry check, erroring on conflicting mirrored records
        for ((x, i, j), &cnt) in seen.iter() {
            if let Some(&other) = seen.get(&(*x, *j, *i)) {
                if other != cnt && i != j {
                    return Err(Error::Invalid(format!(
                        "asymmetric counts for undirected pair ({}, {}) at x={x}",
                        names[*i], names[*j]
                    )));
                }
            } else {
                let cat = mats[x - 1].get(*i, *j);
                mats[x - 1].set(*j, *i, cat);
            }
        }
    }
    NetworkSequence::new(n, c, mode, include_diagonal, mats)?.with_node_names(names)
}

/// Read `x,row,col,count` records.
pub fn read_counts_csv(reader: impl Read, path: &str) -> Result<Vec<CountRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    expect_headers(&mut rdr, path, &["x", "row", "col", "count"])?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let x: usize = field(&rec, 0, path, line, "index x")?;
        let count: u64 = field(&rec, 3, path, line, "count")?;
        out.push(CountRecord {
            x,
            row: rec[1].to_string(),
            col: rec[2].to_string(),
            count,
        });
    }
    Ok(out)
}

fn expect_headers(rdr: &mut csv::Reader<impl Read>, path: &str, want: &[&str]) -> Result<()> {
    let headers = rdr.headers()?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != want {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected header {:?}, found {:?}",
                want.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    idx: usize,
    path: &str,
    line: usize,
    what: &str,
) -> Result<T> {
    rec.get(idx)
        .ok_or_else(|| parse_err(path, line, format!("missing {what}")))?
        .parse::<T>()
        .map_err(|_| parse_err(path, line, format!("invalid {what}: {:?}", &rec[idx])))
}

/// Write a category network with its metadata header.
pub fn write_network_csv(y: &NetworkSequence, out: &mut impl Write) -> Result<()> {
    writeln!(out, "# dsbm-network v1")?;
    writeln!(
        out,
        "# mode={} diagonal={} categories={}",
        match y.mode {
            Mode::Directed => "directed",
            Mode::Undirected => "undirected",
        },
        if y.include_diagonal {
            "include"
        } else {
            "exclude"
        },
        y.c
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "row", "col", "category"])?;
    for x in 0..y.m {
        for i in 0..y.n {
            for j in 0..y.n {
                w.write_record([
                    (x + 1).to_string(),
                    y.node_name(i),
                    y.node_name(j),
                    (y.y[x].get(i, j) + 1).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a category network written by [`write_network_csv`]. Sparse files
/// are accepted: missing cells default to category 1.
pub fn read_network_csv(reader: impl Read, path: &str) -> Result<NetworkSequence> {
    let mut lines = BufReader::new(reader);
    let mut first = String::new();
    lines.read_line(&mut first)?;
    if first.trim_end() != "# dsbm-network v1" {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected \"# dsbm-network v1\" header, found {:?}",
                first.trim_end()
            ),
        ));
    }
    let mut meta = String::new();
    lines.read_line(&mut meta)?;
    let meta = meta.trim_end();
    let mut mode = None;
    let mut diagonal = None;
    let mut categories = None;
    for token in meta.trim_start_matches('#').split_whitespace() {
        match token.split_once('=') {
            Some(("mode", v)) => {
                mode = Some(match v {
                    "directed" => Mode::Directed,
                    "undirected" => Mode::Undirected,
                    other => {
                        return Err(parse_err(path, 2, format!("unknown mode {other:?}")));
                    }
                })
            }
            Some(("diagonal", v)) => diagonal = Some(v == "include"),
            Some(("categories", v)) => {
                categories = Some(
                    v.parse::<usize>()
                        .map_err(|_| parse_err(path, 2, format!("invalid categories {v:?}")))?,
                )
            }
            _ => {}
        }
    }
    let (mode, diagonal, c) = match (mode, diagonal, categories) {
        (Some(m), Some(d), Some(c)) => (m, d, c),
        _ => {
            return Err(parse_err(
                path,
                2,
                "metadata line must carry mode=, diagonal=, categories=",
            ))
        }
    };
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(lines);
    expect_headers(&mut rdr, path, &["x", "row", "col", "category"])?;
    let mut names: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let mut cells: Vec<(usize, usize, usize, u8)> = Vec::new();
    let mut seen: std::collections::HashSet<(usize, usize, usize)> = Default::default();
    let mut m = 0usize;
    for rec in rdr.records() {
        let rec = rec?;
        // the two metadata lines were consumed before the csv reader saw
        // the stream
        let line = rec.position().map_or(0, |p| p.line() as usize + 2);
        let x: usize = field(&rec, 0, path, line, "index x")?;
        if x == 0 {
            return Err(parse_err(path, line, "index x must be 1-based"));
        }
        let cat: usize = field(&rec, 3, path, line, "category")?;
        if cat == 0 || cat > c {
            return Err(parse_err(
                path,
                line,
                format!("category {cat} outside 1..={c}"),
            ));
        }
        let mut idx = |name: &str| -> usize {
            *index_of.entry(name.to_string()).or_insert_with(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        let (i, j) = (idx(&rec[1]), idx(&rec[2]));
        if !seen.insert((x, i, j)) {
            return Err(parse_err(
                path,
                line,
                format!("duplicate cell (x={x}, {}, {})", &rec[1], &rec[2]),
            ));
        }
        m = m.max(x);
        cells.push((x, i, j, (cat - 1) as u8));
    }
    if m == 0 || names.len() < 2 {
        return Err(parse_err(path, 0, "no records"));
    }
    let n = names.len();
    let mut mats = vec![CatMatrix::filled(n, 0); m];
    for (x, i, j, cat) in cells {
        mats[x - 1].set(i, j, cat);
    }
    NetworkSequence::new(n, c, mode, diagonal, mats)?.with_node_names(names)
}

/// Read `node,category` covariates; macro-categories are numbered by first
/// appearance. Every network node must appear exactly once, and every file
/// node must exist in the network.
pub fn read_covariates_csv(
    reader: impl Read,
    path: &str,
    node_names: &[String],
) -> Result<Covariates> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    expect_headers(&mut rdr, path, &["node", "category"])?;
    let index_of: HashMap<&str, usize> = node_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut cat_names: Vec<String> = Vec::new();
    let mut w: Vec<Option<usize>> = vec![None; node_names.len()];
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let node = &rec[0];
        let i = *index_of
            .get(node)
            .ok_or_else(|| parse_err(path, line, format!("node {node:?} is not in the network")))?;
        if w[i].is_some() {
            return Err(parse_err(path, line, format!("duplicate node {node:?}")));
        }
        let cat = rec[1].to_string();
        let l = match cat_names.iter().position(|c| *c == cat) {
            Some(l) => l,
            None => {
                cat_names.push(cat);
                cat_names.len() - 1
            }
        };
        w[i] = Some(l);
    }
    let missing: Vec<&String> = node_names
        .iter()
        .zip(&w)
        .filter_map(|(name, w)| w.is_none().then_some(name))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Invalid(format!(
            "covariates missing for node(s) {:?}",
            missing.iter().take(5).collect::<Vec<_>>()
        )));
    }
    let mut cov = Covariates::new(w.into_iter().flatten().collect(), cat_names.len())?;
    cov.names = Some(cat_names);
    Ok(cov)
}

/// Write `x,node,label` partition records (1-based labels).
pub fn write_partitions_csv(
    z: &[Vec<usize>],
    node_names: &[String],
    out: &mut impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "node", "label"])?;
    for (x, zx) in z.iter().enumerate() {
        for (i, &l) in zx.iter().enumerate() {
            w.write_record([
                (x + 1).to_string(),
                node_names[i].clone(),
                (l + 1).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read partition records back: per-index label vectors (0-based) in node
/// first-appearance order, plus the node names.
pub fn read_partitions_csv(
    reader: impl Read,
    path: &str,
) -> Result<(Vec<Vec<usize>>, Vec<String>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    expect_headers(&mut rdr, path, &["x", "node", "label"])?;
    let mut names: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let mut records: Vec<(usize, usize, usize)> = Vec::new();
    let mut m = 0;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let x: usize = field(&rec, 0, path, line, "index x")?;
        let label: usize = field(&rec, 2, path, line, "label")?;
        if x == 0 || label == 0 {
            return Err(parse_err(path, line, "x and label are 1-based"));
        }
        let i = match index_of.get(&rec[1]) {
            Some(&i) => i,
            None => {
                index_of.insert(rec[1].to_string(), names.len());
                names.push(rec[1].to_string());
                names.len() - 1
            }
        };
        m = m.max(x);
        records.push((x, i, label - 1));
    }
    if m == 0 || names.is_empty() {
        return Err(parse_err(path, 0, "no records"));
    }
    let n = names.len();
    let mut z: Vec<Vec<Option<usize>>> = vec![vec![None; n]; m];
    for (x, i, l) in records {
        if z[x - 1][i].replace(l).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate label for node {:?} at x={x}",
                names[i]
            )));
        }
    }
    let mut out = Vec::with_capacity(m);
    for (x, zx) in z.into_iter().enumerate() {
        let mut row = Vec::with_capacity(n);
        for (i, l) in zx.into_iter().enumerate() {
            row.push(l.ok_or_else(|| {
                Error::Invalid(format!("node {:?} has no label at x={}", names[i], x + 1))
            })?);
        }
        out.push(row);
    }
    Ok((out, names))
}

const SAMPLE_VERSION: &str = "1";

/// Write a sample set: one JSON header line (metadata), then one JSON
/// record per kept sample, labels 1-based on disk.
pub fn write_samples(set: &SampleSet, out: &mut impl Write) -> Result<()> {
    serde_json::to_writer(&mut *out, &set.meta)?;
    out.write_all(b"\n")?;
    for rec in &set.samples {
        let mut on_disk = rec.clone();
        shift_labels(&mut on_disk.z1, 1);
        if let Some(z2) = &mut on_disk.z2 {
            shift_labels(z2, 1);
        }
        serde_json::to_writer(&mut *out, &on_disk)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn shift_labels(z: &mut [Vec<usize>], by: i64) {
    for zx in z {
        for l in zx {
            *l = (*l as i64 + by) as usize;
        }
    }
}

/// Read a sample set written by [`write_samples`]; checks the format
/// version and that the record count matches the header's schedule.
pub fn read_samples(reader: impl Read, path: &str) -> Result<SampleSet> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty sample file"))??;
    let meta: crate::tempering::RunMeta = serde_json::from_str(&header)
        .map_err(|e| parse_err(path, 1, format!("bad header: {e}")))?;
    if meta.version != SAMPLE_VERSION {
        return Err(Error::Version {
            found: meta.version,
            expected: SAMPLE_VERSION.into(),
        });
    }
    let expected = meta.config.kept_iterations / meta.config.thin;
    let mut samples = Vec::with_capacity(expected);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut rec: crate::tempering::SampleRecord = serde_json::from_str(&line)
            .map_err(|e| parse_err(path, lineno + 2, format!("bad sample: {e}")))?;
        if rec.z1.iter().flatten().any(|&l| l == 0) {
            return Err(parse_err(path, lineno + 2, "labels are 1-based on disk"));
        }
        shift_labels(&mut rec.z1, -1);
        if let Some(z2) = &mut rec.z2 {
            if z2.iter().flatten().any(|&l| l == 0) {
                return Err(parse_err(path, lineno + 2, "labels are 1-based on disk"));
            }
            shift_labels(z2, -1);
        }
        samples.push(rec);
    }
    if samples.len() != expected {
        return Err(Error::Invalid(format!(
            "truncated sample file: header promises {expected} samples, found {}",
            samples.len()
        )));
    }
    Ok(SampleSet { meta, samples })
}

/// Write a similarity matrix with node names on both borders.
pub fn write_matrix_csv(
    mat: &SimilarityMatrix,
    node_names: &[String],
    out: &mut impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node".to_string()];
    header.extend_from_slice(node_names);
    w.write_record(&header)?;
    for (i, row) in mat.rows().enumerate() {
        let mut rec = vec![node_names[i].clone()];
        rec.extend(row.iter().map(|v| format!("{v}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format block probabilities: x,row_group,col_group,category,probability.
pub fn write_theta_csv(theta: &[ThetaEstimate], out: &mut impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "row_group", "col_group", "category", "probability"])?;
    for (x, t) in theta.iter().enumerate() {
        for h in 0..t.h {
            for k in 0..t.k {
                for c in 0..t.c {
                    w.write_record([
                        (x + 1).to_string(),
                        (h + 1).to_string(),
                        (k + 1).to_string(),
                        (c + 1).to_string(),
                        format!("{}", t.get(h, k, c)),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready long-format connectivity scores: side,x,group,score.
pub fn write_mcs_csv(
    mcs_rows: &[Vec<f64>],
    mcs_cols: &[Vec<f64>],
    out: &mut impl Write,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["side", "x", "group", "score"])?;
    for (side, table) in [("rows", mcs_rows), ("cols", mcs_cols)] {
        for (x, scores) in table.iter().enumerate() {
            for (g, s) in scores.iter().enumerate() {
                w.write_record([
                    side.to_string(),
                    (x + 1).to_string(),
                    (g + 1).to_string(),
                    format!("{s}"),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Hyperparameters;
    use crate::tempering::{run, Ladder, RunConfig};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn categorize_boundaries() {
        let t = default_thresholds();
        assert_eq!(categorize(0, &t), 1);
        assert_eq!(categorize(1, &t), 2);
        assert_eq!(categorize(5, &t), 2);
        assert_eq!(categorize(10, &t), 2);
        assert_eq!(categorize(11, &t), 3);
        assert_eq!(categorize(50, &t), 3);
        assert_eq!(categorize(100, &t), 3);
        assert_eq!(categorize(101, &t), 4);
        assert_eq!(categorize(500, &t), 4);
    }

    #[test]
    fn discretize_fills_missing_with_absent() {
        let counts = vec![
            CountRecord {
                x: 2,
                row: "a".into(),
                col: "b".into(),
                count: 5,
            },
            CountRecord {
                x: 1,
                row: "b".into(),
                col: "a".into(),
                count: 500,
            },
        ];
        let y = discretize(&counts, &default_thresholds(), Mode::Directed, true, None).unwrap();
        assert_eq!((y.n, y.m, y.c), (2, 2, 4));
        assert_eq!(y.y[1].get(0, 1), 1); // count 5 -> rare
        assert_eq!(y.y[0].get(1, 0), 3); // count 500 -> frequent
        assert_eq!(y.y[0].get(0, 1), 0); // missing -> absent
    }

    #[test]
    fn all_zero_counts_give_an_all_absent_sequence() {
        let counts: Vec<CountRecord> = (1..=2)
            .flat_map(|x| {
                [("a", "b"), ("b", "a")].map(|(r, c)| CountRecord {
                    x,
                    row: r.into(),
                    col: c.into(),
                    count: 0,
                })
            })
            .collect();
        let y = discretize(&counts, &default_thresholds(), Mode::Directed, true, None).unwrap();
        for x in 0..y.m {
            for i in 0..y.n {
                for j in 0..y.n {
                    assert_eq!(y.y[x].get(i, j), 0);
                }
            }
        }
    }

    #[test]
    fn covariates_parse_at_mortality_scale() {
        // 139 causes spread over 19 macro-categories
        let names: Vec<String> = (0..139).map(|i| format!("cause{i:03}")).collect();
        let mut text = String::from("node,category\n");
        for (i, name) in names.iter().enumerate() {
            text.push_str(&format!("{name},macro{:02}\n", i % 19));
        }
        let cov = read_covariates_csv(text.as_bytes(), "w.csv", &names).unwrap();
        assert_eq!(cov.l, 19);
        assert_eq!(cov.w.len(), 139);
    }

    #[test]
    fn discretize_rejects_duplicates_and_bad_thresholds() {
        let counts = vec![
            CountRecord {
                x: 1,
                row: "a".into(),
                col: "b".into(),
                count: 1,
            },
            CountRecord {
                x: 1,
                row: "a".into(),
                col: "b".into(),
                count: 2,
            },
        ];
        assert!(discretize(&counts, &default_thresholds(), Mode::Directed, true, None).is_err());
        let one = &counts[..1];
        assert!(discretize(one, &[10, 10], Mode::Directed, true, None).is_err());
        assert!(discretize(one, &[], Mode::Directed, true, None).is_err());
    }

    #[test]
    fn network_csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 4;
        let mats = (0..3)
            .map(|_| CatMatrix::new(n, (0..n * n).map(|_| rng.gen_range(0..4)).collect()))
            .collect();
        let y = NetworkSequence::new(n, 4, Mode::Directed, true, mats)
            .unwrap()
            .with_node_names(vec!["a".into(), "b".into(), "c".into(), "d".into()])
            .unwrap();
        let mut buf = Vec::new();
        write_network_csv(&y, &mut buf).unwrap();
        let back = read_network_csv(&buf[..], "test").unwrap();
        assert_eq!(back.n, y.n);
        assert_eq!(back.m, y.m);
        assert_eq!(back.c, y.c);
        assert_eq!(back.mode, y.mode);
        assert_eq!(back.include_diagonal, y.include_diagonal);
        assert_eq!(back.node_names, y.node_names);
        for x in 0..y.m {
            assert_eq!(back.y[x], y.y[x]);
        }
    }

    #[test]
    fn network_csv_errors_carry_positions() {
        let text = "# dsbm-network v1\n# mode=directed diagonal=include categories=4\n\
                    x,row,col,category\n1,a,b,9\n";
        let err = read_network_csv(text.as_bytes(), "net.csv").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("net.csv:4"), "{msg}");
        assert!(msg.contains("category 9"), "{msg}");

        let bad_header = "x,row,col,category\n1,a,b,1\n";
        let err = read_network_csv(bad_header.as_bytes(), "net.csv").unwrap_err();
        assert!(format!("{err}").contains("dsbm-network"), "{err}");
    }

    #[test]
    fn covariates_examples() {
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let ok = "node,category\na,circulatory\nb,neoplasm\nc,circulatory\n";
        let cov = read_covariates_csv(ok.as_bytes(), "w.csv", &names).unwrap();
        assert_eq!(cov.l, 2);
        assert_eq!(cov.w, vec![0, 1, 0]);

        // single category: supervision is vacuous but valid, L = 1
        let single = "node,category\na,x\nb,x\nc,x\n";
        let cov = read_covariates_csv(single.as_bytes(), "w.csv", &names).unwrap();
        assert_eq!(cov.l, 1);

        // a node missing from the network errors with its name
        let extra = "node,category\na,x\nb,x\nc,x\nghost,x\n";
        let err = read_covariates_csv(extra.as_bytes(), "w.csv", &names).unwrap_err();
        assert!(format!("{err}").contains("ghost"), "{err}");

        // a network node missing from the file errors too
        let missing = "node,category\na,x\nb,x\n";
        let err = read_covariates_csv(missing.as_bytes(), "w.csv", &names).unwrap_err();
        assert!(format!("{err}").contains('c'), "{err}");

        let dup = "node,category\na,x\na,y\nb,x\nc,x\n";
        assert!(read_covariates_csv(dup.as_bytes(), "w.csv", &names).is_err());
    }

    #[test]
    fn partitions_csv_round_trip() {
        let z = vec![vec![0, 0, 1], vec![0, 1, 2]];
        let names: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let mut buf = Vec::new();
        write_partitions_csv(&z, &names, &mut buf).unwrap();
        let (back, back_names) = read_partitions_csv(&buf[..], "z.csv").unwrap();
        assert_eq!(back, z);
        assert_eq!(back_names, names);
    }

    #[test]
    fn samples_round_trip_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 4;
        let mats = (0..2)
            .map(|_| CatMatrix::new(n, (0..n * n).map(|_| rng.gen_range(0..2)).collect()))
            .collect();
        let y = NetworkSequence::new(n, 2, Mode::Directed, true, mats).unwrap();
        let hyper = Hyperparameters {
            a_eta: 2.0,
            b_eta: 2.0,
            ..Hyperparameters::diffuse(2, 1)
        };
        let mut cfg = RunConfig::with_seed(3);
        cfg.burn_in = 20;
        cfg.kept_iterations = 50;
        cfg.thin = 5;
        cfg.chains = 2;
        let set = run(&y, None, &hyper, &cfg, &Ladder::geometric(2, 0.6)).unwrap();
        let mut buf = Vec::new();
        write_samples(&set, &mut buf).unwrap();
        let back = read_samples(&buf[..], "s.ndj").unwrap();
        assert_eq!(back, set);

        // version mismatch is rejected
        let text = String::from_utf8(buf.clone()).unwrap();
        let bumped = text.replacen("\"version\":\"1\"", "\"version\":\"9\"", 1);
        assert!(matches!(
            read_samples(bumped.as_bytes(), "s.ndj").unwrap_err(),
            Error::Version { .. }
        ));

        // truncation is detected
        let cut: Vec<&str> = text.lines().take(4).collect();
        let err = read_samples(cut.join("\n").as_bytes(), "s.ndj").unwrap_err();
        assert!(format!("{err}").contains("truncated"), "{err}");
    }
}
