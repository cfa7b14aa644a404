//! Pairing of primary communities with their most-overlapping alternatives.

use crate::community::CommunitySet;
use crate::graph::NodeId;

/// A primary community matched to the alternative community sharing the most
/// nodes with it, plus the members the alternative does not keep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparablePair {
    pub primary_index: usize,
    pub alt_index: usize,
    /// |C_i ∩ C_j|, always ≥ 1.
    pub overlap: usize,
    /// Members of the primary community absent from the paired alternative,
    /// sorted by id. Empty when the primary community is a subset.
    pub analytical_nodes: Vec<NodeId>,
}

/// All comparable pairs for one (primary, alternative) direction.
///
/// The mapping is one-directional: each primary community appears at most
/// once, but several may share one alternative partner. Primary communities
/// that overlap nothing are listed in `skipped` instead of being forced into
/// a meaningless pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairAssignment {
    pub pairs: Vec<ComparablePair>,
    pub skipped: Vec<usize>,
}

impl PairAssignment {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// For each primary community, selects the alternative with maximum overlap.
/// Ties go to the lowest alternative index; zero overlap everywhere sends the
/// primary index to `skipped`. Both sets must reference the same graph.
pub fn pair_communities(cp: &CommunitySet, ca: &CommunitySet) -> PairAssignment {
    let mut pairs = Vec::with_capacity(cp.len());
    let mut skipped = Vec::new();
    for (i, primary) in cp.communities().iter().enumerate() {
        let mut best_overlap = 0usize;
        let mut best_j = 0usize;
        for (j, alt) in ca.communities().iter().enumerate() {
            let overlap = primary.overlap(alt);
            if overlap > best_overlap {
                best_overlap = overlap;
                best_j = j;
            }
        }
        if best_overlap == 0 {
            skipped.push(i);
            continue;
        }
        pairs.push(ComparablePair {
            primary_index: i,
            alt_index: best_j,
            overlap: best_overlap,
            analytical_nodes: primary.difference(&ca.communities()[best_j]),
        });
    }
    PairAssignment { pairs, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::load_communities_from_str;
    use crate::graph::Graph;

    fn fixture() -> Graph {
        Graph::from_str_input("1 2\n1 3\n2 3\n3 4\n4 5\n4 6\n5 6\n").unwrap()
    }

    fn set(g: &Graph, input: &str) -> CommunitySet {
        load_communities_from_str(input, g, "t").unwrap()
    }

    fn analytical_tokens(g: &Graph, p: &ComparablePair) -> Vec<String> {
        p.analytical_nodes.iter().map(|&v| g.token(v).to_owned()).collect()
    }

    #[test]
    fn picks_maximum_overlap_per_primary() {
        let g = fixture();
        let cp = set(&g, "1 2 3\n4 5 6\n");
        let ca = set(&g, "1 2\n3 4 5 6\n");
        let pa = pair_communities(&cp, &ca);
        assert!(pa.skipped.is_empty());
        assert_eq!(pa.pairs.len(), 2);
        assert_eq!((pa.pairs[0].primary_index, pa.pairs[0].alt_index), (0, 0));
        assert_eq!(pa.pairs[0].overlap, 2);
        assert_eq!((pa.pairs[1].primary_index, pa.pairs[1].alt_index), (1, 1));
        assert_eq!(pa.pairs[1].overlap, 3);
    }

    #[test]
    fn ties_go_to_the_lowest_alt_index() {
        let g = fixture();
        let cp = set(&g, "1 2 3 4\n");
        let ca = set(&g, "1 2\n3 4\n");
        let pa = pair_communities(&cp, &ca);
        assert_eq!(pa.pairs.len(), 1);
        assert_eq!(pa.pairs[0].alt_index, 0);
        assert_eq!(pa.pairs[0].overlap, 2);
        assert_eq!(analytical_tokens(&g, &pa.pairs[0]), ["3", "4"]);
    }

    #[test]
    fn zero_overlap_is_skipped() {
        let g = fixture();
        let cp = set(&g, "1 2\n");
        let ca = set(&g, "5 6\n");
        let pa = pair_communities(&cp, &ca);
        assert!(pa.pairs.is_empty());
        assert_eq!(pa.skipped, vec![0]);
    }

    #[test]
    fn subset_primary_has_no_analytical_nodes() {
        let g = fixture();
        let cp = set(&g, "4 5 6\n");
        let ca = set(&g, "3 4 5 6\n");
        let pa = pair_communities(&cp, &ca);
        assert_eq!(pa.pairs[0].overlap, 3);
        assert!(pa.pairs[0].analytical_nodes.is_empty());
    }

    #[test]
    fn overlap_plus_analytical_equals_primary_size() {
        let g = fixture();
        let cp = set(&g, "1 2 3\n3 4 5\n2 6\n");
        let ca = set(&g, "1 2\n3 4\n5 6\n");
        let pa = pair_communities(&cp, &ca);
        for p in &pa.pairs {
            let size = cp.communities()[p.primary_index].len();
            assert_eq!(p.overlap + p.analytical_nodes.len(), size);
        }
    }

    #[test]
    fn two_primaries_may_share_one_alternative() {
        let g = fixture();
        let cp = set(&g, "1 2\n3\n4 5 6\n");
        let ca = set(&g, "1 2 3\n4 5 6\n");
        let pa = pair_communities(&cp, &ca);
        assert_eq!(pa.pairs[0].alt_index, 0);
        assert_eq!(pa.pairs[1].alt_index, 0);
        assert_eq!(pa.pairs[2].alt_index, 1);
    }

    #[test]
    fn matches_independent_exhaustive_scan() {
        let g = Graph::from_str_input(
            "1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 1\n1 5\n2 6\n",
        )
        .unwrap();
        let cp = set(&g, "1 2 3\n4 5\n6 7 8\n");
        let ca = set(&g, "1 2\n3 4 5 6\n7\n8\n");
        let pa = pair_communities(&cp, &ca);
        for (i, primary) in cp.communities().iter().enumerate() {
            let overlaps: Vec<usize> =
                ca.communities().iter().map(|alt| primary.overlap(alt)).collect();
            let best = *overlaps.iter().max().unwrap();
            if best == 0 {
                assert!(pa.skipped.contains(&i));
            } else {
                let expected_j = overlaps.iter().position(|&o| o == best).unwrap();
                let pair = pa.pairs.iter().find(|p| p.primary_index == i).unwrap();
                assert_eq!(pair.alt_index, expected_j);
                assert_eq!(pair.overlap, best);
            }
        }
    }
}
