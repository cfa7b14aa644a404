//! Topological variance: pair-level, set-level, and the all-pairs matrix.

use rayon::prelude::*;

use crate::community::{Community, CommunitySet};
use crate::error::Error;
use crate::graph::Graph;
use crate::pairing::{pair_communities, ComparablePair, PairAssignment};
use crate::Result;

/// Score of one comparable pair.
///
/// For each analytical node the pair contributes the fraction of its
/// neighborhood kept by the primary community minus the fraction kept by the
/// alternative, averaged over the analytical nodes. A subset pair has no
/// analytical nodes; its score is fixed at 0 with `defined = false`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTv {
    pub value: f64,
    pub analytical_count: usize,
    pub defined: bool,
}

/// Score of one directed (primary, alternative) comparison: the mean of its
/// pair scores. Undefined pairs stay in the mean as zeros; when no pair
/// exists at all the value is 0 and `empty_delta()` reports it.
#[derive(Debug, Clone, PartialEq)]
pub struct SetTv {
    pub value: f64,
    /// Aligned with `assignment.pairs`.
    pub pair_values: Vec<PairTv>,
    pub assignment: PairAssignment,
}

impl SetTv {
    pub fn pair_count(&self) -> usize {
        self.pair_values.len()
    }

    /// True when no primary community overlapped any alternative one.
    pub fn empty_delta(&self) -> bool {
        self.pair_values.is_empty()
    }
}

/// All-pairs set scores for m algorithms on one graph: `values[p][a]` is the
/// score of primary p against alternative a, diagonal fixed at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TvMatrix {
    pub algorithms: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl TvMatrix {
    pub fn len(&self) -> usize {
        self.algorithms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.algorithms.is_empty()
    }
}

/// Scores one comparable pair. `cp_i`/`ca_j` must be the communities the
/// pair's indices point at. A degree-0 analytical node contributes 0 to the
/// sum but still counts in the denominator.
pub fn pair_tv(g: &Graph, pair: &ComparablePair, cp_i: &Community, ca_j: &Community) -> PairTv {
    let analytical = &pair.analytical_nodes;
    if analytical.is_empty() {
        return PairTv {
            value: 0.0,
            analytical_count: 0,
            defined: false,
        };
    }
    let mut sum = 0.0;
    for &v in analytical {
        let neighbors = g.adj(v);
        if neighbors.is_empty() {
            continue;
        }
        let kept_primary = cp_i.neighbor_overlap(neighbors) as f64;
        let kept_alt = ca_j.neighbor_overlap(neighbors) as f64;
        sum += (kept_primary - kept_alt) / neighbors.len() as f64;
    }
    PairTv {
        value: sum / analytical.len() as f64,
        analytical_count: analytical.len(),
        defined: true,
    }
}

/// Pairs `cp` against `ca` and averages the pair scores. Both sets must
/// reference `g`.
pub fn set_tv(g: &Graph, cp: &CommunitySet, ca: &CommunitySet) -> SetTv {
    let assignment = pair_communities(cp, ca);
    let pair_values: Vec<PairTv> = assignment
        .pairs
        .iter()
        .map(|p| {
            pair_tv(
                g,
                p,
                &cp.communities()[p.primary_index],
                &ca.communities()[p.alt_index],
            )
        })
        .collect();
    let value = if pair_values.is_empty() {
        0.0
    } else {
        pair_values.iter().map(|t| t.value).sum::<f64>() / pair_values.len() as f64
    };
    SetTv {
        value,
        pair_values,
        assignment,
    }
}

/// Directed scores for every ordered algorithm pair. Cells are independent
/// and computed in parallel; the result does not depend on scheduling.
pub fn tv_matrix(g: &Graph, sets: &[CommunitySet]) -> Result<TvMatrix> {
    if sets.len() < 2 {
        return Err(Error::InsufficientAlgorithms { got: sets.len() });
    }
    let values: Vec<Vec<f64>> = (0..sets.len())
        .into_par_iter()
        .map(|p| {
            (0..sets.len())
                .map(|a| {
                    if p == a {
                        0.0
                    } else {
                        set_tv(g, &sets[p], &sets[a]).value
                    }
                })
                .collect()
        })
        .collect();
    Ok(TvMatrix {
        algorithms: sets.iter().map(|s| s.algorithm().to_owned()).collect(),
        values,
    })
}
