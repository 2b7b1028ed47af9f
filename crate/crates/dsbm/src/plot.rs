//! SVG heatmaps of adjacency matrices with rows and columns reordered by
//! estimated groups. Display only.

use crate::data::NetworkSequence;
use crate::error::{Error, Result};

/// Sequential fill colors per category (light to dark).
fn palette(c: usize) -> Vec<String> {
    (0..c)
        .map(|i| {
            let t = i as f64 / (c - 1) as f64;
            // white -> deep red ramp
            let r = (250.0 - 100.0 * t) as u8;
            let g = (250.0 - 215.0 * t) as u8;
            let b = (248.0 - 205.0 * t) as u8;
            format!("#{r:02x}{g:02x}{b:02x}")
        })
        .collect()
}

/// Nodes sorted by cluster then node index, with the positions where the
/// cluster changes.
fn ordering(z: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by_key(|&i| (z[i], i));
    let bounds = (1..order.len())
        .filter(|&p| z[order[p]] != z[order[p - 1]])
        .collect();
    (order, bounds)
}

/// Render the adjacency matrix at index x (0-based) with rows ordered by
/// `z_rows` and columns by `z_cols`; group boundaries are drawn as lines.
pub fn adjacency_heatmap_svg(
    y: &NetworkSequence,
    x: usize,
    z_rows: &[usize],
    z_cols: &[usize],
) -> Result<String> {
    if x >= y.m {
        return Err(Error::Invalid(format!(
            "index {} out of range 1..={}",
            x + 1,
            y.m
        )));
    }
    if z_rows.len() != y.n || z_cols.len() != y.n {
        return Err(Error::Dimension(format!(
            "partition lengths ({}, {}) for {} nodes",
            z_rows.len(),
            z_cols.len(),
            y.n
        )));
    }
    let n = y.n;
    let cell = (720.0 / n as f64).clamp(2.0, 24.0);
    let margin = 28.0;
    let size = margin * 2.0 + cell * n as f64;
    let colors = palette(y.c);
    let (row_order, row_bounds) = ordering(z_rows);
    let (col_order, col_bounds) = ordering(z_cols);

    let mut svg = String::with_capacity(n * n * 60);
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.0}\" height=\"{size:.0}\" \
         viewBox=\"0 0 {size:.0} {size:.0}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{size:.0}\" height=\"{size:.0}\" fill=\"white\"/>\n"
    ));
    let title = match &y.index_labels {
        Some(labels) => labels[x].clone(),
        None => format!("index {}", x + 1),
    };
    svg.push_str(&format!(
        "<text x=\"{margin}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        margin - 10.0,
        xml_escape(&title)
    ));
    for (r, &i) in row_order.iter().enumerate() {
        for (cpos, &j) in col_order.iter().enumerate() {
            let cat = y.y[x].get(i, j) as usize;
            if cat == 0 {
                continue; // keep `absent` as background
            }
            svg.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" fill=\"{}\"/>\n",
                margin + cpos as f64 * cell,
                margin + r as f64 * cell,
                colors[cat]
            ));
        }
    }
    let extent = cell * n as f64;
    for &b in &row_bounds {
        let ypos = margin + b as f64 * cell;
        svg.push_str(&format!(
            "<line x1=\"{margin}\" y1=\"{ypos:.1}\" x2=\"{:.1}\" y2=\"{ypos:.1}\" \
             stroke=\"black\" stroke-width=\"1\"/>\n",
            margin + extent
        ));
    }
    for &b in &col_bounds {
        let xpos = margin + b as f64 * cell;
        svg.push_str(&format!(
            "<line x1=\"{xpos:.1}\" y1=\"{margin}\" x2=\"{xpos:.1}\" y2=\"{:.1}\" \
             stroke=\"black\" stroke-width=\"1\"/>\n",
            margin + extent
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{margin}\" y=\"{margin}\" width=\"{extent:.1}\" height=\"{extent:.1}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
    ));
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
