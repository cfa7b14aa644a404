//! Undirected simple graph loaded from a whitespace-separated edge list.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::Error;
use crate::Result;

/// Dense internal node index. Assigned in first-seen order of the node's
/// token in the input, so the same file always yields the same ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub(crate) fn new(index: u32) -> Self {
        NodeId(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Counters for input lines that were understood but not kept as edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadWarnings {
    /// Edges of the form `u u`. The node is still registered.
    pub self_loops_dropped: usize,
    /// Repeats of an already-seen edge, in either direction.
    pub duplicate_edges_dropped: usize,
}

/// Node/edge counts and average degree of a loaded graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub avg_degree: f64,
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes={} edges={} avg_degree={:.2}",
            self.nodes, self.edges, self.avg_degree
        )
    }
}

/// Undirected simple graph with string-token node names.
///
/// Self-loops and duplicate edges in the input are dropped (counted in
/// [`LoadWarnings`]); a directed source listing both `u v` and `v u` therefore
/// collapses to one undirected edge. Nodes whose only mentions were dropped
/// lines keep degree 0.
#[derive(Debug, Clone)]
pub struct Graph {
    tokens: Vec<String>,
    by_token: HashMap<String, NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
    warnings: LoadWarnings,
}

impl Graph {
    /// Parses an edge list: one `u v` pair per line, arbitrary string tokens,
    /// `#`/`%` comment lines and blank lines skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Graph> {
        let mut tokens: Vec<String> = Vec::new();
        let mut by_token: HashMap<String, NodeId> = HashMap::new();
        let mut adjacency: Vec<BTreeSet<NodeId>> = Vec::new();
        let mut warnings = LoadWarnings::default();

        let mut intern = |tok: &str,
                          tokens: &mut Vec<String>,
                          adjacency: &mut Vec<BTreeSet<NodeId>>|
         -> NodeId {
            if let Some(&id) = by_token.get(tok) {
                return id;
            }
            let id = NodeId::new(tokens.len() as u32);
            tokens.push(tok.to_owned());
            adjacency.push(BTreeSet::new());
            by_token.insert(tok.to_owned(), id);
            id
        };

        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::MalformedEdgeLine {
                    line: idx + 1,
                    found: fields.len(),
                });
            }
            let u = intern(fields[0], &mut tokens, &mut adjacency);
            let v = intern(fields[1], &mut tokens, &mut adjacency);
            if u == v {
                warnings.self_loops_dropped += 1;
                continue;
            }
            if !adjacency[u.index()].insert(v) {
                warnings.duplicate_edges_dropped += 1;
                continue;
            }
            adjacency[v.index()].insert(u);
        }

        if tokens.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let adjacency: Vec<Vec<NodeId>> =
            adjacency.into_iter().map(|s| s.into_iter().collect()).collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;

        Ok(Graph {
            tokens,
            by_token,
            adjacency,
            edge_count,
            warnings,
        })
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Graph> {
        let p = path.as_ref();
        let file = File::open(p).map_err(|e| Error::from(e).with_path(p))?;
        Graph::from_reader(BufReader::new(file))
    }

    pub fn from_str_input(input: &str) -> Result<Graph> {
        Graph::from_reader(input.as_bytes())
    }

    pub fn node_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn warnings(&self) -> LoadWarnings {
        self.warnings
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            nodes: self.node_count(),
            edges: self.edge_count,
            avg_degree: 2.0 * self.edge_count as f64 / self.node_count() as f64,
        }
    }

    /// Ids in first-seen order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.tokens.len() as u32).map(NodeId::new)
    }

    pub fn node_id(&self, token: &str) -> Option<NodeId> {
        self.by_token.get(token).copied()
    }

    /// Original input token for `v`. Panics on an id from a different graph.
    pub fn token(&self, v: NodeId) -> &str {
        &self.tokens[v.index()]
    }

    /// Sorted neighbor list; errors when `v` is out of range for this graph.
    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.adjacency
            .get(v.index())
            .map(Vec::as_slice)
            .ok_or(Error::NodeLookup { index: v.index() })
    }

    /// Unchecked neighbor access for hot loops; ids must come from `self`.
    pub(crate) fn adj(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u.index()].binary_search(&v).is_ok()
    }
}
