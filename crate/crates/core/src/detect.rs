//! Deterministic reference detectors: label propagation and greedy
//! modularity agglomeration. Both exist so the pipeline can run end-to-end
//! without external partition files; neither aims to beat the literature.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::community::CommunitySet;
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorAlgo {
    Lpa,
    GreedyModularity,
}

impl DetectorAlgo {
    pub fn name(self) -> &'static str {
        match self {
            DetectorAlgo::Lpa => "lpa",
            DetectorAlgo::GreedyModularity => "greedy_modularity",
        }
    }

    pub fn parse(s: &str) -> Option<DetectorAlgo> {
        match s {
            "lpa" => Some(DetectorAlgo::Lpa),
            "greedy_modularity" | "gm" => Some(DetectorAlgo::GreedyModularity),
            _ => None,
        }
    }
}

/// Which detector to run and with what randomness. The seed fully determines
/// the output for a given graph; greedy modularity ignores it (the
/// agglomeration is already deterministic).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorConfig {
    pub algorithm: DetectorAlgo,
    pub seed: u64,
    /// LPA sweep cap.
    pub max_iterations: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            algorithm: DetectorAlgo::Lpa,
            seed: 0,
            max_iterations: 100,
        }
    }
}

pub fn run_detector(g: &Graph, cfg: &DetectorConfig) -> CommunitySet {
    match cfg.algorithm {
        DetectorAlgo::Lpa => run_lpa(g, cfg),
        DetectorAlgo::GreedyModularity => run_greedy_modularity(g, cfg),
    }
}

/// Asynchronous label propagation.
///
/// Every node starts with its own label. Sweeps visit nodes in a freshly
/// shuffled seeded order; each node adopts the label held by the most
/// neighbors. A node whose current label is already among the top labels
/// keeps it (this is what lets the process reach a fixpoint); otherwise the
/// tie is broken by a seeded uniform choice. Stops when a sweep changes
/// nothing or after `max_iterations` sweeps.
pub fn run_lpa(g: &Graph, cfg: &DetectorConfig) -> CommunitySet {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut labels: Vec<u32> = (0..n as u32).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut counts: HashMap<u32, usize> = HashMap::new();

    for _ in 0..cfg.max_iterations {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &vi in &order {
            let neighbors = g.adj(crate::graph::NodeId::new(vi as u32));
            if neighbors.is_empty() {
                continue;
            }
            counts.clear();
            for &u in neighbors {
                *counts.entry(labels[u.index()]).or_insert(0) += 1;
            }
            let top = *counts.values().max().unwrap();
            let current = labels[vi];
            if counts.get(&current) == Some(&top) {
                continue;
            }
            // Sorted candidate list keeps the draw independent of hash order.
            let mut candidates: Vec<u32> = counts
                .iter()
                .filter(|(_, &c)| c == top)
                .map(|(&l, _)| l)
                .collect();
            candidates.sort_unstable();
            let pick = candidates[rng.gen_range(0..candidates.len())];
            labels[vi] = pick;
            changed = true;
        }
        if !changed {
            break;
        }
    }

    groups_from_labels(g, &labels, DetectorAlgo::Lpa.name())
}

/// Greedy modularity agglomeration.
///
/// Starts from singleton communities and repeatedly merges the connected
/// pair with the largest modularity gain e_ab/m − d_a·d_b/(2m²), as long as
/// the gain is positive. Ties go to the smallest (id, id) pair; a merged
/// community keeps the smaller id. Unconnected pairs never have positive
/// gain and are never considered.
pub fn run_greedy_modularity(g: &Graph, cfg: &DetectorConfig) -> CommunitySet {
    let _ = cfg;
    let n = g.node_count();
    let m = g.edge_count() as f64;
    let mut comm_of: Vec<u32> = (0..n as u32).collect();
    let mut degree_sum: HashMap<u32, f64> = (0..n as u32)
        .map(|v| (v, g.degree(crate::graph::NodeId::new(v)) as f64))
        .collect();
    // Inter-community edge counts keyed by (smaller id, larger id).
    let mut between: HashMap<(u32, u32), f64> = HashMap::new();
    for v in g.nodes() {
        for &u in g.adj(v) {
            if v < u {
                *between.entry((v.index() as u32, u.index() as u32)).or_insert(0.0) += 1.0;
            }
        }
    }

    while m > 0.0 {
        let mut connected: Vec<(u32, u32)> = between.keys().copied().collect();
        connected.sort_unstable();
        let mut best: Option<((u32, u32), f64)> = None;
        for key in connected {
            let e_ab = between[&key];
            let gain = e_ab / m - degree_sum[&key.0] * degree_sum[&key.1] / (2.0 * m * m);
            // Strict > keeps the first (smallest) pair on equal gains.
            if best.map_or(true, |(_, g0)| gain > g0) {
                best = Some((key, gain));
            }
        }
        let Some(((a, b), gain)) = best else {
            break;
        };
        if gain <= 0.0 {
            break;
        }

        // Merge b into a (a < b by key construction).
        for c in comm_of.iter_mut() {
            if *c == b {
                *c = a;
            }
        }
        let db = degree_sum.remove(&b).unwrap();
        *degree_sum.get_mut(&a).unwrap() += db;
        let mut merged: HashMap<(u32, u32), f64> = HashMap::new();
        for ((x, y), w) in between.drain() {
            let x = if x == b { a } else { x };
            let y = if y == b { a } else { y };
            if x == y {
                continue;
            }
            let key = (x.min(y), x.max(y));
            *merged.entry(key).or_insert(0.0) += w;
        }
        between = merged;
    }

    groups_from_labels(g, &comm_of, DetectorAlgo::GreedyModularity.name())
}

/// Groups nodes by final label; communities ordered by their smallest
/// member id, so output is stable for a given labeling.
fn groups_from_labels(g: &Graph, labels: &[u32], algorithm: &str) -> CommunitySet {
    let mut by_label: HashMap<u32, Vec<crate::graph::NodeId>> = HashMap::new();
    for v in g.nodes() {
        by_label.entry(labels[v.index()]).or_default().push(v);
    }
    let mut groups: Vec<Vec<crate::graph::NodeId>> = by_label.into_values().collect();
    groups.sort_by_key(|members| members.iter().copied().min().unwrap());
    CommunitySet::from_node_groups(g, algorithm, groups)
        .expect("non-empty graph yields at least one community")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::SetKind;
    use crate::metrics::modularity;

    fn triangles() -> Graph {
        Graph::from_str_input("1 2\n1 3\n2 3\n4 5\n4 6\n5 6\n").unwrap()
    }

    fn tokens(g: &Graph, cs: &CommunitySet) -> Vec<Vec<String>> {
        cs.communities()
            .iter()
            .map(|c| c.members().iter().map(|&v| g.token(v).to_owned()).collect())
            .collect()
    }

    fn lpa_cfg(seed: u64) -> DetectorConfig {
        DetectorConfig {
            algorithm: DetectorAlgo::Lpa,
            seed,
            ..DetectorConfig::default()
        }
    }

    fn gm_cfg() -> DetectorConfig {
        DetectorConfig {
            algorithm: DetectorAlgo::GreedyModularity,
            ..DetectorConfig::default()
        }
    }

    #[test]
    fn lpa_splits_disconnected_triangles_for_every_seed() {
        let g = triangles();
        for seed in 0..25 {
            let cs = run_lpa(&g, &lpa_cfg(seed));
            assert_eq!(
                tokens(&g, &cs),
                vec![vec!["1", "2", "3"], vec!["4", "5", "6"]],
                "seed {seed}"
            );
        }
    }

    #[test]
    fn lpa_unifies_a_single_edge() {
        let g = Graph::from_str_input("a b\n").unwrap();
        let cs = run_lpa(&g, &lpa_cfg(3));
        assert_eq!(tokens(&g, &cs), vec![vec!["a", "b"]]);
    }

    #[test]
    fn lpa_unifies_a_star() {
        let g = Graph::from_str_input("h a\nh b\nh c\nh d\n").unwrap();
        for seed in 0..25 {
            let cs = run_lpa(&g, &lpa_cfg(seed));
            assert_eq!(cs.len(), 1, "seed {seed}");
            assert_eq!(cs.communities()[0].len(), 5);
        }
    }

    #[test]
    fn lpa_output_is_always_a_partition() {
        let g = Graph::from_str_input("1 2\n1 3\n2 3\n3 4\n4 5\n4 6\n5 6\n2 5\n").unwrap();
        for seed in 0..50 {
            let cs = run_lpa(&g, &lpa_cfg(seed));
            assert_eq!(cs.kind(), SetKind::Partition, "seed {seed}");
        }
    }

    #[test]
    fn lpa_keeps_isolated_nodes_as_singletons() {
        let g = Graph::from_str_input("9 9\n1 2\n").unwrap();
        let cs = run_lpa(&g, &lpa_cfg(1));
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.kind(), SetKind::Partition);
    }

    #[test]
    fn lpa_is_deterministic_per_seed() {
        let g = triangles();
        for seed in [0, 1, 7, 123456789] {
            let a = run_lpa(&g, &lpa_cfg(seed));
            let b = run_lpa(&g, &lpa_cfg(seed));
            assert_eq!(a.to_format_a(&g), b.to_format_a(&g));
        }
    }

    #[test]
    fn greedy_modularity_splits_disconnected_triangles() {
        let g = triangles();
        let cs = run_greedy_modularity(&g, &gm_cfg());
        assert_eq!(tokens(&g, &cs), vec![vec!["1", "2", "3"], vec!["4", "5", "6"]]);
        assert!((modularity(&g, &cs).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn greedy_modularity_merges_a_triangle_fully() {
        let g = Graph::from_str_input("1 2\n1 3\n2 3\n").unwrap();
        let cs = run_greedy_modularity(&g, &gm_cfg());
        assert_eq!(cs.len(), 1);
    }

    #[test]
    fn greedy_modularity_merges_a_single_edge() {
        let g = Graph::from_str_input("a b\n").unwrap();
        let cs = run_greedy_modularity(&g, &gm_cfg());
        assert_eq!(cs.len(), 1);
    }

    #[test]
    fn greedy_modularity_respects_the_bridge() {
        let g = Graph::from_str_input("1 2\n1 3\n2 3\n3 4\n4 5\n4 6\n5 6\n").unwrap();
        let cs = run_greedy_modularity(&g, &gm_cfg());
        assert_eq!(tokens(&g, &cs), vec![vec!["1", "2", "3"], vec!["4", "5", "6"]]);
    }

    #[test]
    fn greedy_modularity_is_deterministic() {
        let g = Graph::from_str_input("1 2\n2 3\n3 4\n4 1\n1 3\n5 6\n6 7\n7 5\n4 5\n").unwrap();
        let a = run_greedy_modularity(&g, &gm_cfg());
        let b = run_greedy_modularity(&g, &gm_cfg());
        assert_eq!(a.to_format_a(&g), b.to_format_a(&g));
    }

    #[test]
    fn detector_names_round_trip() {
        assert_eq!(DetectorAlgo::parse("lpa"), Some(DetectorAlgo::Lpa));
        assert_eq!(DetectorAlgo::parse("gm"), Some(DetectorAlgo::GreedyModularity));
        assert_eq!(
            DetectorAlgo::parse("greedy_modularity"),
            Some(DetectorAlgo::GreedyModularity)
        );
        assert_eq!(DetectorAlgo::parse("agdl"), None);
    }
}
