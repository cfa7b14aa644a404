//! Aggregation of TV matrices into per-dataset and overall algorithm ranks.

use crate::error::Error;
use crate::tv::TvMatrix;
use crate::Result;

/// ATV values laid out algorithms × datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct AtvGrid {
    pub algorithms: Vec<String>,
    pub datasets: Vec<String>,
    /// `values[algorithm][dataset]`
    pub values: Vec<Vec<f64>>,
}

impl AtvGrid {
    pub fn new(algorithms: Vec<String>, datasets: Vec<String>, values: Vec<Vec<f64>>) -> AtvGrid {
        assert_eq!(values.len(), algorithms.len());
        for row in &values {
            assert_eq!(row.len(), datasets.len());
        }
        AtvGrid {
            algorithms,
            datasets,
            values,
        }
    }

    /// ATV of every algorithm on dataset `d`.
    pub fn column(&self, d: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[d]).collect()
    }
}

/// The full ranking output: the ATV grid it was built from, per-dataset rank
/// vectors, and the overall scores/ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub grid: AtvGrid,
    /// `dtv[dataset][algorithm]`
    pub dtv: Vec<Vec<usize>>,
    /// Mean ATV across datasets, per algorithm.
    pub otv_scores: Vec<f64>,
    /// `otv_ranks[algorithm]`
    pub otv_ranks: Vec<usize>,
}

/// Mean of one full matrix row (self entry included as 0): the algorithm's
/// average score against the whole field.
pub fn row_atv(row: &[f64]) -> Result<f64> {
    if row.len() < 2 {
        return Err(Error::InsufficientAlgorithms { got: row.len() });
    }
    Ok(row.iter().sum::<f64>() / row.len() as f64)
}

/// ATV of algorithm `algo_index` in `m`.
pub fn atv(m: &TvMatrix, algo_index: usize) -> Result<f64> {
    row_atv(&m.values[algo_index])
}

/// Descending competition ranks: the maximum score gets rank 1, equal scores
/// share the minimum rank, and the next distinct score's rank skips by the
/// tie size.
pub fn competition_ranks_desc(scores: &[f64]) -> Result<Vec<usize>> {
    if scores.len() < 2 {
        return Err(Error::InsufficientAlgorithms { got: scores.len() });
    }
    Ok(scores
        .iter()
        .map(|&s| 1 + scores.iter().filter(|&&o| o > s).count())
        .collect())
}

/// Per-dataset ranks from one ATV column.
pub fn dtv_ranks(atv_column: &[f64]) -> Result<Vec<usize>> {
    competition_ranks_desc(atv_column)
}

/// Overall scores (mean ATV across datasets) and their descending ranks.
pub fn otv_ranks(grid: &AtvGrid) -> Result<(Vec<f64>, Vec<usize>)> {
    if grid.datasets.is_empty() {
        return Err(Error::NoDatasets);
    }
    if grid.algorithms.len() < 2 {
        return Err(Error::InsufficientAlgorithms {
            got: grid.algorithms.len(),
        });
    }
    let scores: Vec<f64> = grid
        .values
        .iter()
        .map(|row| row.iter().sum::<f64>() / row.len() as f64)
        .collect();
    let ranks = competition_ranks_desc(&scores)?;
    Ok((scores, ranks))
}

/// Builds the ATV grid for several datasets' matrices. Every matrix must
/// cover the same algorithms in the same order; a hole aborts with the
/// algorithm and dataset named.
pub fn grid_from_matrices(per_dataset: &[(String, TvMatrix)]) -> Result<AtvGrid> {
    if per_dataset.is_empty() {
        return Err(Error::NoDatasets);
    }
    let algorithms = per_dataset[0].1.algorithms.clone();
    if algorithms.len() < 2 {
        return Err(Error::InsufficientAlgorithms {
            got: algorithms.len(),
        });
    }
    for (dataset, m) in per_dataset {
        for algo in &algorithms {
            if !m.algorithms.contains(algo) {
                return Err(Error::MissingPartition {
                    algorithm: algo.clone(),
                    dataset: dataset.clone(),
                });
            }
        }
        for algo in &m.algorithms {
            if !algorithms.contains(algo) {
                return Err(Error::MissingPartition {
                    algorithm: algo.clone(),
                    dataset: per_dataset[0].0.clone(),
                });
            }
        }
    }
    let datasets: Vec<String> = per_dataset.iter().map(|(d, _)| d.clone()).collect();
    let mut values = vec![vec![0.0; datasets.len()]; algorithms.len()];
    for (d, (_, m)) in per_dataset.iter().enumerate() {
        for (i, algo) in algorithms.iter().enumerate() {
            // Position may differ per matrix; resolve by label.
            let row = m.algorithms.iter().position(|a| a == algo).unwrap();
            values[i][d] = atv(m, row)?;
        }
    }
    Ok(AtvGrid::new(algorithms, datasets, values))
}

/// Full ranking pipeline over a finished grid.
///
/// A single-algorithm grid is allowed here: an imported grid with one row
/// still ranks, trivially, at 1 everywhere. Pairwise comparison (and thus
/// the primitives above) still requires at least two algorithms.
pub fn build_rank_table(grid: AtvGrid) -> Result<RankTable> {
    if grid.datasets.is_empty() {
        return Err(Error::NoDatasets);
    }
    if grid.algorithms.len() == 1 {
        let dtv = vec![vec![1]; grid.datasets.len()];
        let row = &grid.values[0];
        let otv_scores = vec![row.iter().sum::<f64>() / row.len() as f64];
        return Ok(RankTable {
            grid,
            dtv,
            otv_scores,
            otv_ranks: vec![1],
        });
    }
    let mut dtv = Vec::with_capacity(grid.datasets.len());
    for d in 0..grid.datasets.len() {
        dtv.push(dtv_ranks(&grid.column(d))?);
    }
    let (otv_scores, otv_ranks) = otv_ranks(&grid)?;
    Ok(RankTable {
        grid,
        dtv,
        otv_scores,
        otv_ranks,
    })
}
