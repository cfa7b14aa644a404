//! Community sets (partitions or covers) attributed to a named algorithm.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::Error;
use crate::graph::{Graph, NodeId};
use crate::Result;

/// Whether a community set tiles the graph exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// Pairwise disjoint and every graph node assigned exactly once.
    Partition,
    /// Overlaps and/or unassigned nodes present.
    Cover,
}

/// One community: a non-empty set of graph nodes, stored sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    members: Vec<NodeId>,
}

impl Community {
    /// Builds from any id list; sorts and deduplicates. Empty input is the
    /// caller's bug, not a data error.
    pub(crate) fn new(mut members: Vec<NodeId>) -> Community {
        members.sort_unstable();
        members.dedup();
        assert!(!members.is_empty(), "community cannot be empty");
        Community { members }
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Count of `v`'s neighbors that lie inside this community.
    pub(crate) fn neighbor_overlap(&self, neighbors: &[NodeId]) -> usize {
        // Both slices are sorted; walk the shorter one with binary search on
        // the longer for balanced cost at both extremes.
        if neighbors.len() <= self.members.len() {
            neighbors.iter().filter(|v| self.contains(**v)).count()
        } else {
            self.members
                .iter()
                .filter(|v| neighbors.binary_search(v).is_ok())
                .count()
        }
    }

    /// |self ∩ other| via a merge walk over the sorted member lists.
    pub fn overlap(&self, other: &Community) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// self − other, preserving sorted order.
    pub fn difference(&self, other: &Community) -> Vec<NodeId> {
        self.members
            .iter()
            .copied()
            .filter(|v| !other.contains(*v))
            .collect()
    }
}

/// Counters for community-file lines that were skipped rather than loaded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CommunityWarnings {
    pub empty_lines_skipped: usize,
}

/// Findings from checking a community set against its graph. Never fatal:
/// covers are legitimate inputs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommunityDiagnostics {
    /// Graph nodes assigned to no community, sorted by id.
    pub uncovered: Vec<NodeId>,
    /// Graph nodes assigned to two or more communities, sorted by id.
    pub overlapping: Vec<NodeId>,
    pub singleton_count: usize,
}

impl CommunityDiagnostics {
    pub fn is_clean(&self) -> bool {
        self.uncovered.is_empty() && self.overlapping.is_empty()
    }

    /// Human-readable findings, e.g. `uncovered: {6}`; empty for a partition.
    pub fn findings(&self, g: &Graph) -> Vec<String> {
        let show = |ids: &[NodeId]| {
            let toks: Vec<&str> = ids.iter().map(|&v| g.token(v)).collect();
            format!("{{{}}}", toks.join(","))
        };
        let mut out = Vec::new();
        if !self.uncovered.is_empty() {
            out.push(format!("uncovered: {}", show(&self.uncovered)));
        }
        if !self.overlapping.is_empty() {
            out.push(format!("overlap: {}", show(&self.overlapping)));
        }
        out
    }
}

/// The full output of one detection algorithm on one graph.
///
/// Community order is ingestion order and is load-bearing: pairing breaks
/// ties by the lowest alternative index.
#[derive(Debug, Clone)]
pub struct CommunitySet {
    algorithm: String,
    dataset: String,
    communities: Vec<Community>,
    kind: SetKind,
    warnings: CommunityWarnings,
}

impl PartialEq for CommunitySet {
    fn eq(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm
            && self.dataset == other.dataset
            && self.kind == other.kind
            && self.communities == other.communities
    }
}

impl CommunitySet {
    /// Wraps detector output (or any programmatic grouping) into a set,
    /// inferring the kind. Groups must be non-empty and reference `g`.
    pub fn from_node_groups(
        g: &Graph,
        algorithm: &str,
        groups: Vec<Vec<NodeId>>,
    ) -> Result<CommunitySet> {
        if groups.is_empty() {
            return Err(Error::EmptyCommunities);
        }
        let communities: Vec<Community> = groups.into_iter().map(Community::new).collect();
        let kind = infer_kind(g, &communities);
        Ok(CommunitySet {
            algorithm: algorithm.to_owned(),
            dataset: String::new(),
            communities,
            kind,
            warnings: CommunityWarnings::default(),
        })
    }

    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    pub fn dataset(&self) -> &str {
        &self.dataset
    }

    pub fn set_dataset(&mut self, dataset: &str) {
        self.dataset = dataset.to_owned();
    }

    pub fn set_algorithm(&mut self, algorithm: &str) {
        self.algorithm = algorithm.to_owned();
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn warnings(&self) -> CommunityWarnings {
        self.warnings
    }

    pub fn communities(&self) -> &[Community] {
        &self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Uncovered/overlapping nodes and singleton count; read-only.
    pub fn validate_against(&self, g: &Graph) -> CommunityDiagnostics {
        let mut assignment_count = vec![0usize; g.node_count()];
        for c in &self.communities {
            for v in c.members() {
                assignment_count[v.index()] += 1;
            }
        }
        let uncovered = g.nodes().filter(|v| assignment_count[v.index()] == 0).collect();
        let overlapping = g.nodes().filter(|v| assignment_count[v.index()] > 1).collect();
        CommunityDiagnostics {
            uncovered,
            overlapping,
            singleton_count: self.communities.iter().filter(|c| c.len() == 1).count(),
        }
    }

    /// One community per line, member tokens in id order. Reloading the
    /// result reproduces an equal set.
    ///
    /// A file where every line has exactly two tokens and a trailing token
    /// repeats would be misread as the node/label layout on reload. In that
    /// corner one member of the first community is written twice; the loader
    /// de-duplicates members within a line, so the set is unchanged.
    pub fn to_format_a(&self, g: &Graph) -> String {
        let mut lines: Vec<String> = self
            .communities
            .iter()
            .map(|c| {
                let toks: Vec<&str> = c.members().iter().map(|&v| g.token(v)).collect();
                toks.join(" ")
            })
            .collect();
        if self.communities.iter().all(|c| c.len() == 2) {
            let mut trailing_counts: HashMap<NodeId, usize> = HashMap::new();
            for c in &self.communities {
                *trailing_counts.entry(c.members()[1]).or_insert(0) += 1;
            }
            if trailing_counts.values().any(|&n| n > 1) {
                let first = g.token(self.communities[0].members()[0]).to_owned();
                lines[0].push(' ');
                lines[0].push_str(&first);
            }
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

fn infer_kind(g: &Graph, communities: &[Community]) -> SetKind {
    let mut assignment_count = vec![0usize; g.node_count()];
    for c in communities {
        for v in c.members() {
            assignment_count[v.index()] += 1;
        }
    }
    if assignment_count.iter().all(|&n| n == 1) {
        SetKind::Partition
    } else {
        SetKind::Cover
    }
}

/// Loads a community file in either supported layout.
///
/// Layout A: one community per line, whitespace-separated node tokens.
/// Layout B: one `node community-label` pair per line; detected when every
/// content line has exactly two tokens and some label repeats. Communities
/// keep first-seen label order; labels themselves are not retained.
///
/// `#`/`%` comment lines and blank lines are skipped; blank lines count as
/// skipped empty communities in the warnings.
pub fn load_communities<R: BufRead>(reader: R, g: &Graph, algorithm: &str) -> Result<CommunitySet> {
    let mut warnings = CommunityWarnings::default();
    // (line number, tokens) for every content line, format decided afterwards.
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<String> = trimmed.split_whitespace().map(str::to_owned).collect();
        if fields.is_empty() {
            warnings.empty_lines_skipped += 1;
            continue;
        }
        rows.push((idx + 1, fields));
    }
    if rows.is_empty() {
        return Err(Error::EmptyCommunities);
    }

    let pair_layout = rows.iter().all(|(_, f)| f.len() == 2) && {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (_, f) in &rows {
            *seen.entry(f[1].as_str()).or_insert(0) += 1;
        }
        seen.values().any(|&n| n > 1)
    };

    let resolve = |token: &str, line: usize| -> Result<NodeId> {
        g.node_id(token).ok_or_else(|| Error::UnknownNode {
            token: token.to_owned(),
            line,
        })
    };

    let groups: Vec<Vec<NodeId>> = if pair_layout {
        let mut order: Vec<String> = Vec::new();
        let mut by_label: HashMap<String, Vec<NodeId>> = HashMap::new();
        for (line, f) in &rows {
            let v = resolve(&f[0], *line)?;
            if !by_label.contains_key(&f[1]) {
                order.push(f[1].clone());
            }
            by_label.entry(f[1].clone()).or_default().push(v);
        }
        order.into_iter().map(|l| by_label.remove(&l).unwrap()).collect()
    } else {
        let mut groups = Vec::with_capacity(rows.len());
        for (line, f) in &rows {
            let mut members = Vec::with_capacity(f.len());
            for tok in f {
                members.push(resolve(tok, *line)?);
            }
            groups.push(members);
        }
        groups
    };

    let mut cs = CommunitySet::from_node_groups(g, algorithm, groups)?;
    cs.warnings = warnings;
    Ok(cs)
}

pub fn load_communities_from_path<P: AsRef<Path>>(
    path: P,
    g: &Graph,
    algorithm: &str,
) -> Result<CommunitySet> {
    let p = path.as_ref();
    let file = File::open(p).map_err(|e| Error::from(e).with_path(p))?;
    load_communities(BufReader::new(file), g, algorithm)
}

pub fn load_communities_from_str(input: &str, g: &Graph, algorithm: &str) -> Result<CommunitySet> {
    load_communities(input.as_bytes(), g, algorithm)
}
