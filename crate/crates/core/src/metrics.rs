//! Classical partition quality metrics used to cross-check TV rankings.

use crate::community::{Community, CommunitySet, SetKind};
use crate::error::Error;
use crate::graph::Graph;
use crate::Result;

/// How per-community conductance terms are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConductanceAggregation {
    #[default]
    Mean,
    Max,
}

impl ConductanceAggregation {
    pub fn name(self) -> &'static str {
        match self {
            ConductanceAggregation::Mean => "mean",
            ConductanceAggregation::Max => "max",
        }
    }
}

/// All three metrics for one algorithm on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub algorithm: String,
    pub dataset: String,
    pub modularity: f64,
    pub conductance: f64,
    pub isolability: f64,
}

/// Twice the internal edge count and the degree volume of a community.
fn edge_profile(g: &Graph, c: &Community) -> (usize, usize) {
    let mut internal_twice = 0;
    let mut volume = 0;
    for &v in c.members() {
        let neighbors = g.adj(v);
        volume += neighbors.len();
        internal_twice += c.neighbor_overlap(neighbors);
    }
    (internal_twice, volume)
}

/// Newman modularity Q = Σ_c [e_in(c)/m − (deg(c)/2m)²]. Defined for
/// partitions only; a cover raises an error naming the offending set. An
/// edgeless graph scores 0.
pub fn modularity(g: &Graph, cs: &CommunitySet) -> Result<f64> {
    if cs.kind() != SetKind::Partition {
        return Err(Error::PartitionRequired {
            metric: "modularity",
            label: cs.algorithm().to_owned(),
        });
    }
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let mut q = 0.0;
    for c in cs.communities() {
        let (internal_twice, volume) = edge_profile(g, c);
        let e_in = internal_twice as f64 / 2.0;
        let frac = volume as f64 / (2.0 * m);
        q += e_in / m - frac * frac;
    }
    Ok(q)
}

/// Conductance aggregated with the default (mean) rule.
pub fn conductance(g: &Graph, cs: &CommunitySet) -> f64 {
    conductance_with(g, cs, ConductanceAggregation::Mean)
}

/// Per-community conductance cut(c)/min(vol(c), vol(V∖c)), combined by
/// `agg`. A community with no outgoing edges contributes 0, which also
/// covers the whole-graph community where both cut and the opposite volume
/// vanish.
pub fn conductance_with(g: &Graph, cs: &CommunitySet, agg: ConductanceAggregation) -> f64 {
    let total_volume = 2 * g.edge_count();
    let terms = cs.communities().iter().map(|c| {
        let (internal_twice, volume) = edge_profile(g, c);
        let cut = volume - internal_twice;
        if cut == 0 {
            0.0
        } else {
            cut as f64 / volume.min(total_volume - volume) as f64
        }
    });
    match agg {
        ConductanceAggregation::Mean => terms.sum::<f64>() / cs.len() as f64,
        ConductanceAggregation::Max => terms.fold(0.0, f64::max),
    }
}

/// Mean over communities of e_in/(e_in + e_out); a community with no edges
/// at all contributes 0.
pub fn isolability(g: &Graph, cs: &CommunitySet) -> f64 {
    let sum: f64 = cs
        .communities()
        .iter()
        .map(|c| {
            let (internal_twice, volume) = edge_profile(g, c);
            if volume == 0 {
                return 0.0;
            }
            let e_in = internal_twice as f64 / 2.0;
            let e_out = (volume - internal_twice) as f64;
            e_in / (e_in + e_out)
        })
        .sum();
    sum / cs.len() as f64
}

/// Bundles all three metrics; fails like [`modularity`] on covers.
pub fn metric_report(
    g: &Graph,
    cs: &CommunitySet,
    dataset: &str,
    agg: ConductanceAggregation,
) -> Result<MetricReport> {
    Ok(MetricReport {
        algorithm: cs.algorithm().to_owned(),
        dataset: dataset.to_owned(),
        modularity: modularity(g, cs)?,
        conductance: conductance_with(g, cs, agg),
        isolability: isolability(g, cs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::load_communities_from_str;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fixture() -> Graph {
        Graph::from_str_input("1 2\n1 3\n2 3\n3 4\n4 5\n4 6\n5 6\n").unwrap()
    }

    fn triangles() -> Graph {
        Graph::from_str_input("1 2\n1 3\n2 3\n4 5\n4 6\n5 6\n").unwrap()
    }

    fn set(g: &Graph, input: &str) -> CommunitySet {
        load_communities_from_str(input, g, "t").unwrap()
    }

    #[test]
    fn whole_graph_community_is_the_null_case() {
        let g = fixture();
        let cs = set(&g, "1 2 3 4 5 6\n");
        assert_eq!(modularity(&g, &cs).unwrap(), 0.0);
        assert_eq!(conductance(&g, &cs), 0.0);
        assert_eq!(isolability(&g, &cs), 1.0);
    }

    #[test]
    fn disconnected_triangles_split_cleanly() {
        let g = triangles();
        let cs = set(&g, "1 2 3\n4 5 6\n");
        assert!((modularity(&g, &cs).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(conductance(&g, &cs), 0.0);
        assert_eq!(isolability(&g, &cs), 1.0);
    }

    #[test]
    fn bridge_split_values_match_hand_counts() {
        let g = fixture();
        let cs = set(&g, "1 2 3\n4 5 6\n");
        assert!((modularity(&g, &cs).unwrap() - 5.0 / 14.0).abs() < 1e-12);
        assert!((conductance(&g, &cs) - 1.0 / 7.0).abs() < 1e-12);
        assert!((isolability(&g, &cs) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn modularity_rejects_covers() {
        let g = fixture();
        let cs = load_communities_from_str("1 2 3 4\n3 4 5 6\n", &g, "scan").unwrap();
        match modularity(&g, &cs).unwrap_err() {
            Error::PartitionRequired { metric, label } => {
                assert_eq!(metric, "modularity");
                assert_eq!(label, "scan");
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn conductance_and_isolability_accept_covers() {
        let g = fixture();
        let cs = set(&g, "1 2 3\n3 4\n");
        // {1,2,3}: cut 1 over volume 7; {3,4}: cut 4 over volume 6.
        let expected_mean = (1.0 / 7.0 + 4.0 / 6.0) / 2.0;
        assert!((conductance(&g, &cs) - expected_mean).abs() < 1e-12);
        assert!(
            (conductance_with(&g, &cs, ConductanceAggregation::Max) - 4.0 / 6.0).abs() < 1e-12
        );
        let expected_iso = (3.0 / 4.0 + 1.0 / 5.0) / 2.0;
        assert!((isolability(&g, &cs) - expected_iso).abs() < 1e-12);
    }

    #[test]
    fn singleton_of_connected_node_has_zero_isolability_term() {
        let g = fixture();
        let cs = set(&g, "1\n2 3 4 5 6\n");
        // {1} contributes 0; the rest keeps 5 of its 7 incident edges.
        assert!((isolability(&g, &cs) - (5.0 / 7.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn edgeless_community_contributes_zero() {
        let g = Graph::from_str_input("9 9\n1 2\n").unwrap();
        let cs = set(&g, "9\n1 2\n");
        assert!((isolability(&g, &cs) - 0.5).abs() < 1e-12);
        assert_eq!(conductance(&g, &cs), 0.0);
        assert_eq!(modularity(&g, &cs).unwrap(), 0.0);
    }

    #[test]
    fn clique_partition_beats_sampled_random_partitions() {
        let g = triangles();
        let natural = set(&g, "1 2 3\n4 5 6\n");
        let best = modularity(&g, &natural).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let ids: Vec<_> = g.nodes().collect();
        for _ in 0..200 {
            let blocks = rng.gen_range(1..=3);
            let mut shuffled = ids.clone();
            shuffled.shuffle(&mut rng);
            let mut groups = vec![Vec::new(); blocks];
            for (i, &v) in shuffled.iter().enumerate() {
                groups[i % blocks].push(v);
            }
            groups.retain(|b| !b.is_empty());
            let cs = CommunitySet::from_node_groups(&g, "r", groups).unwrap();
            assert!(modularity(&g, &cs).unwrap() <= best + 1e-12);
        }
    }

    #[test]
    fn metrics_ignore_node_relabeling() {
        let a = fixture();
        // Same topology, tokens permuted: x<->numbers mapped 1:1.
        let b = Graph::from_str_input("u v\nu w\nv w\nw x\nx y\nx z\ny z\n").unwrap();
        let ca = set(&a, "1 2 3\n4 5 6\n");
        let cb = set(&b, "u v w\nx y z\n");
        assert!((modularity(&a, &ca).unwrap() - modularity(&b, &cb).unwrap()).abs() < 1e-12);
        assert!((conductance(&a, &ca) - conductance(&b, &cb)).abs() < 1e-12);
        assert!((isolability(&a, &ca) - isolability(&b, &cb)).abs() < 1e-12);
    }

    #[test]
    fn best_isolability_partition_is_also_best_conductance() {
        // Enumerated 2-block partitions: the top split by isolability and
        // the bottom split by conductance coincide (the bridge split).
        let g = fixture();
        let ids: Vec<_> = g.nodes().collect();
        let mut best_iso = (f64::MIN, 0usize);
        let mut best_cond = (f64::MAX, 0usize);
        for mask in 1u32..(1 << 5) {
            let mut left = vec![ids[0]];
            let mut right = Vec::new();
            for bit in 0..5 {
                let v = ids[bit + 1];
                if mask & (1 << bit) != 0 {
                    left.push(v);
                } else {
                    right.push(v);
                }
            }
            if right.is_empty() {
                continue;
            }
            let cs = CommunitySet::from_node_groups(&g, "e", vec![left, right]).unwrap();
            let iso = isolability(&g, &cs);
            let cond = conductance(&g, &cs);
            if iso > best_iso.0 {
                best_iso = (iso, mask as usize);
            }
            if cond < best_cond.0 {
                best_cond = (cond, mask as usize);
            }
        }
        assert_eq!(best_iso.1, best_cond.1);
        assert!((best_iso.0 - 0.75).abs() < 1e-12);
        assert!((best_cond.0 - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn report_bundles_all_three() {
        let g = fixture();
        let cs = set(&g, "1 2 3\n4 5 6\n");
        let r = metric_report(&g, &cs, "bridged", ConductanceAggregation::Mean).unwrap();
        assert_eq!(r.dataset, "bridged");
        assert!((r.modularity - 5.0 / 14.0).abs() < 1e-12);
        assert!((r.conductance - 1.0 / 7.0).abs() < 1e-12);
        assert!((r.isolability - 0.75).abs() < 1e-12);
    }
}
