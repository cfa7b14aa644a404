//! Stable CSV/JSON serialization of matrices, grids, and rank tables.
//!
//! Default precision is 3 decimals (ranks stay integers); every emitter has
//! a full-precision switch that prints the shortest exact representation
//! instead. Emitters and parsers round-trip.

use serde::Serialize;

use crate::error::Error;
use crate::graph::Graph;
use crate::ranking::{AtvGrid, RankTable};
use crate::tv::{SetTv, TvMatrix};
use crate::Result;

/// Rounds to 3 decimals, normalizing a negative zero away.
pub fn round3(x: f64) -> f64 {
    let r = (x * 1000.0).round() / 1000.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// 3-decimal rendering that never prints `-0.000`. Snaps through [`round3`]
/// first so a printed cell always reparses to exactly `round3(x)`, even when
/// `x` sits within one ulp of a thousandth boundary.
pub fn fmt3(x: f64) -> String {
    format!("{:.3}", round3(x))
}

fn fmt_cell(x: f64, full_precision: bool) -> String {
    if full_precision {
        format!("{x}")
    } else {
        fmt3(x)
    }
}

/// Labels become CSV cells and file names unquoted, so they are restricted
/// to a safe charset up front.
pub fn check_label(label: &str) -> Result<()> {
    let ok = !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Csv {
            detail: format!(
                "label '{label}' must be non-empty and use only [A-Za-z0-9_.-]"
            ),
        })
    }
}

fn split_csv_line(line: &str) -> Vec<String> {
    line.split(',').map(|c| c.trim().to_owned()).collect()
}

fn content_lines(input: &str) -> Vec<(usize, Vec<String>)> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, split_csv_line(l)))
        .collect()
}

/// TvMatrix as CSV oriented heatmap-style: columns are the primary
/// algorithms, rows the alternatives, so cell (row a, col p) holds the score
/// of primary p against alternative a.
pub fn heatmap_csv(m: &TvMatrix, full_precision: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!(",{}\n", m.algorithms.join(",")));
    for (a, alt) in m.algorithms.iter().enumerate() {
        let cells: Vec<String> = (0..m.algorithms.len())
            .map(|p| fmt_cell(m.values[p][a], full_precision))
            .collect();
        out.push_str(&format!("{},{}\n", alt, cells.join(",")));
    }
    out
}

/// Inverse of [`heatmap_csv`].
pub fn parse_heatmap_csv(input: &str) -> Result<TvMatrix> {
    let rows = content_lines(input);
    if rows.is_empty() {
        return Err(Error::Csv {
            detail: "heatmap csv is empty".to_owned(),
        });
    }
    let header = &rows[0].1;
    let algorithms: Vec<String> = header[1..].to_vec();
    let n = algorithms.len();
    if rows.len() != n + 1 {
        return Err(Error::Csv {
            detail: format!("heatmap csv: expected {} data rows, found {}", n, rows.len() - 1),
        });
    }
    let mut values = vec![vec![0.0; n]; n];
    for (a, (line_no, cells)) in rows[1..].iter().enumerate() {
        if cells.len() != n + 1 {
            return Err(Error::CsvShape {
                row: *line_no,
                expected: n + 1,
                found: cells.len(),
            });
        }
        if cells[0] != algorithms[a] {
            return Err(Error::Csv {
                detail: format!(
                    "heatmap csv row {}: row label '{}' does not match column label '{}'",
                    line_no, cells[0], algorithms[a]
                ),
            });
        }
        for (p, cell) in cells[1..].iter().enumerate() {
            values[p][a] = parse_numeric(cell, *line_no, p + 2)?;
        }
    }
    Ok(TvMatrix { algorithms, values })
}

fn parse_numeric(cell: &str, row: usize, col: usize) -> Result<f64> {
    cell.parse::<f64>().map_err(|_| Error::CsvCell {
        row,
        col,
        value: cell.to_owned(),
    })
}

/// ATV grid as CSV: header row carries dataset labels, first column the
/// algorithm labels.
pub fn atv_grid_csv(grid: &AtvGrid, full_precision: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("algorithm,{}\n", grid.datasets.join(",")));
    for (i, algo) in grid.algorithms.iter().enumerate() {
        let cells: Vec<String> = grid.values[i]
            .iter()
            .map(|&x| fmt_cell(x, full_precision))
            .collect();
        out.push_str(&format!("{},{}\n", algo, cells.join(",")));
    }
    out
}

/// Parses an ATV grid CSV (same layout as [`atv_grid_csv`]; the corner cell
/// of the header is ignored). Rejects ragged rows, non-numeric cells with
/// their coordinates, and duplicate labels.
pub fn import_atv_grid(input: &str) -> Result<AtvGrid> {
    let rows = content_lines(input);
    if rows.len() < 2 {
        return Err(Error::Csv {
            detail: "atv grid csv needs a header row and at least one algorithm row".to_owned(),
        });
    }
    let header = &rows[0].1;
    if header.len() < 2 {
        return Err(Error::NoDatasets);
    }
    let datasets: Vec<String> = header[1..].to_vec();
    for (i, d) in datasets.iter().enumerate() {
        if datasets[..i].contains(d) {
            return Err(Error::DuplicateLabel {
                kind: "dataset",
                label: d.clone(),
            });
        }
    }
    let mut algorithms = Vec::new();
    let mut values = Vec::new();
    for (line_no, cells) in &rows[1..] {
        if cells.len() != header.len() {
            return Err(Error::CsvShape {
                row: *line_no,
                expected: header.len(),
                found: cells.len(),
            });
        }
        let label = cells[0].clone();
        if algorithms.contains(&label) {
            return Err(Error::DuplicateLabel {
                kind: "algorithm",
                label,
            });
        }
        let mut row = Vec::with_capacity(datasets.len());
        for (c, cell) in cells[1..].iter().enumerate() {
            row.push(parse_numeric(cell, *line_no, c + 2)?);
        }
        algorithms.push(label);
        values.push(row);
    }
    Ok(AtvGrid::new(algorithms, datasets, values))
}

/// Per-dataset ranks as CSV: one row per dataset, integer cells.
pub fn dtv_csv(table: &RankTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("dataset,{}\n", table.grid.algorithms.join(",")));
    for (d, dataset) in table.grid.datasets.iter().enumerate() {
        let cells: Vec<String> = table.dtv[d].iter().map(usize::to_string).collect();
        out.push_str(&format!("{},{}\n", dataset, cells.join(",")));
    }
    out
}

/// Inverse of [`dtv_csv`]: (algorithms, per-dataset rows).
pub fn parse_dtv_csv(input: &str) -> Result<(Vec<String>, Vec<(String, Vec<usize>)>)> {
    let rows = content_lines(input);
    if rows.is_empty() {
        return Err(Error::Csv {
            detail: "rank csv is empty".to_owned(),
        });
    }
    let header = &rows[0].1;
    let algorithms: Vec<String> = header[1..].to_vec();
    let mut parsed = Vec::new();
    for (line_no, cells) in &rows[1..] {
        if cells.len() != header.len() {
            return Err(Error::CsvShape {
                row: *line_no,
                expected: header.len(),
                found: cells.len(),
            });
        }
        let mut ranks = Vec::with_capacity(algorithms.len());
        for (c, cell) in cells[1..].iter().enumerate() {
            let r: usize = cell.parse().map_err(|_| Error::CsvCell {
                row: *line_no,
                col: c + 2,
                value: cell.clone(),
            })?;
            ranks.push(r);
        }
        parsed.push((cells[0].clone(), ranks));
    }
    Ok((algorithms, parsed))
}

/// Overall scores and ranks as CSV, one row per algorithm.
pub fn otv_csv(table: &RankTable, full_precision: bool) -> String {
    let mut out = String::from("algorithm,mean_atv,otv_rank\n");
    for (i, algo) in table.grid.algorithms.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            algo,
            fmt_cell(table.otv_scores[i], full_precision),
            table.otv_ranks[i]
        ));
    }
    out
}

/// Inverse of [`otv_csv`]: (algorithm, mean score, rank) triples.
pub fn parse_otv_csv(input: &str) -> Result<Vec<(String, f64, usize)>> {
    let rows = content_lines(input);
    let mut parsed = Vec::new();
    for (line_no, cells) in rows.iter().skip(1) {
        if cells.len() != 3 {
            return Err(Error::CsvShape {
                row: *line_no,
                expected: 3,
                found: cells.len(),
            });
        }
        let score = parse_numeric(&cells[1], *line_no, 2)?;
        let rank: usize = cells[2].parse().map_err(|_| Error::CsvCell {
            row: *line_no,
            col: 3,
            value: cells[2].clone(),
        })?;
        parsed.push((cells[0].clone(), score, rank));
    }
    Ok(parsed)
}

/// One metrics row; modularity is absent for covers.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub algorithm: String,
    pub dataset: String,
    pub isolability: f64,
    pub modularity: Option<f64>,
    pub conductance: f64,
}

/// Metrics table as CSV, with the conductance aggregation rule recorded in
/// a leading comment so the choice is visible in the output itself.
pub fn metrics_csv(rows: &[MetricRow], conductance_aggregation: &str, full_precision: bool) -> String {
    let mut out = format!("# conductance_aggregation={conductance_aggregation}\n");
    out.push_str("algorithm,dataset,isolability,modularity,conductance\n");
    for r in rows {
        let modularity = match r.modularity {
            Some(q) => fmt_cell(q, full_precision),
            None => "NA".to_owned(),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.algorithm,
            r.dataset,
            fmt_cell(r.isolability, full_precision),
            modularity,
            fmt_cell(r.conductance, full_precision)
        ));
    }
    out
}

/// JSON shape of one comparable pair in a `compare` report.
#[derive(Debug, Clone, Serialize)]
pub struct PairJson {
    pub primary_index: usize,
    pub alt_index: usize,
    pub overlap: usize,
    pub analytical_nodes: Vec<String>,
    pub tv: f64,
    pub defined: bool,
}

/// JSON shape of a full directed comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CompareJson {
    pub value: f64,
    pub pair_count: usize,
    pub empty_delta: bool,
    pub skipped_primary_indices: Vec<usize>,
    pub pairs: Vec<PairJson>,
}

/// Builds the `compare` JSON from a finished set comparison, resolving
/// analytical nodes back to their input tokens.
pub fn compare_json(g: &Graph, s: &SetTv, full_precision: bool) -> CompareJson {
    let maybe_round = |x: f64| if full_precision { x } else { round3(x) };
    let pairs = s
        .assignment
        .pairs
        .iter()
        .zip(&s.pair_values)
        .map(|(p, t)| PairJson {
            primary_index: p.primary_index,
            alt_index: p.alt_index,
            overlap: p.overlap,
            analytical_nodes: p
                .analytical_nodes
                .iter()
                .map(|&v| g.token(v).to_owned())
                .collect(),
            tv: maybe_round(t.value),
            defined: t.defined,
        })
        .collect();
    CompareJson {
        value: maybe_round(s.value),
        pair_count: s.pair_count(),
        empty_delta: s.empty_delta(),
        skipped_primary_indices: s.assignment.skipped.clone(),
        pairs,
    }
}

/// JSON shape of a TvMatrix (same orientation as the in-memory matrix:
/// `values[primary][alternative]`).
#[derive(Debug, Clone, Serialize)]
pub struct TvMatrixJson {
    pub algorithms: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

pub fn tv_matrix_json(m: &TvMatrix, full_precision: bool) -> TvMatrixJson {
    TvMatrixJson {
        algorithms: m.algorithms.clone(),
        values: m
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| if full_precision { x } else { round3(x) })
                    .collect()
            })
            .collect(),
    }
}

/// JSON shape of the full ranking output.
#[derive(Debug, Clone, Serialize)]
pub struct RankJson {
    pub algorithms: Vec<String>,
    pub datasets: Vec<String>,
    pub atv: Vec<Vec<f64>>,
    pub dtv: Vec<Vec<usize>>,
    pub otv_scores: Vec<f64>,
    pub otv_ranks: Vec<usize>,
}

pub fn rank_json(table: &RankTable, full_precision: bool) -> RankJson {
    let maybe_round = |x: &f64| if full_precision { *x } else { round3(*x) };
    RankJson {
        algorithms: table.grid.algorithms.clone(),
        datasets: table.grid.datasets.clone(),
        atv: table
            .grid
            .values
            .iter()
            .map(|row| row.iter().map(maybe_round).collect())
            .collect(),
        dtv: table.dtv.clone(),
        otv_scores: table.otv_scores.iter().map(maybe_round).collect(),
        otv_ranks: table.otv_ranks.clone(),
    }
}
