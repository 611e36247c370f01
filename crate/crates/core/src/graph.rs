//! Undirected simple graphs with contiguous node ids and sorted adjacency.
//!
//! Graphs are immutable once built. Node ids run from 0 to `num_nodes() - 1`
//! and are assigned in first-appearance order when parsing an edge list, so
//! parsing the same input twice yields identical graphs.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{self, BufRead, Write};

use thiserror::Error;

/// Dense node index. Ids are contiguous within a graph.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected at least two tokens, found {found}")]
    MalformedLine { line: usize, found: usize },
    #[error("line {line}: self-loop on {label:?}")]
    SelfLoop { line: usize, label: String },
    #[error("line {line}: duplicate edge {a:?} {b:?}")]
    DuplicateEdge { line: usize, a: String, b: String },
    #[error("no edges left after cleaning the input")]
    Empty,
    #[error("node id {0} out of range")]
    InvalidNode(NodeId),
    #[error("edge ({0}, {1}) has an endpoint out of range")]
    EdgeOutOfRange(NodeId, NodeId),
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfEdge(NodeId),
    #[error("label list has {labels} entries for {nodes} nodes")]
    LabelCountMismatch { labels: usize, nodes: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Token separator for edge-list text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Whitespace,
    Comma,
}

/// Knobs for [`Graph::parse_edge_list`].
///
/// `symmetrize` treats a reversed repetition of an earlier line (`b a` after
/// `a b`) as the same edge; with it off the two lines count as distinct arcs
/// that still induce a single undirected edge. `collapse_multi` silently
/// merges repeated edges instead of rejecting them, and `drop_self_loops`
/// silently skips lines joining a node to itself.
#[derive(Debug, Clone)]
pub struct EdgeListOptions {
    pub symmetrize: bool,
    pub collapse_multi: bool,
    pub drop_self_loops: bool,
    pub comment_prefixes: Vec<char>,
    pub delimiter: Delimiter,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            symmetrize: true,
            collapse_multi: true,
            drop_self_loops: true,
            comment_prefixes: vec!['#', '%'],
            delimiter: Delimiter::Whitespace,
        }
    }
}

/// Immutable undirected simple graph.
///
/// Adjacency lists are sorted ascending and free of duplicates and
/// self-loops. Isolated nodes cannot be expressed in edge-list text; they
/// arise only through [`Graph::build`] with an explicit node count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    num_edges: usize,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph over `num_nodes` ids from an edge iterator.
    ///
    /// Duplicate edges (in either orientation) are merged. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn build(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        Self::build_inner(num_nodes, edges, None)
    }

    /// Like [`Graph::build`], keeping one display label per node.
    pub fn build_with_labels(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        labels: Vec<String>,
    ) -> Result<Self, GraphError> {
        if labels.len() != num_nodes {
            return Err(GraphError::LabelCountMismatch {
                labels: labels.len(),
                nodes: num_nodes,
            });
        }
        Self::build_inner(num_nodes, edges, Some(labels))
    }

    fn build_inner(
        num_nodes: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); num_nodes];
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfEdge(a));
            }
            if a >= num_nodes || b >= num_nodes {
                return Err(GraphError::EdgeOutOfRange(a, b));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut num_edges = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            num_edges += list.len();
        }
        Ok(Graph {
            adj,
            num_edges: num_edges / 2,
            labels,
        })
    }

    /// Parses edge-list text: one edge per line, two tokens per line, extra
    /// tokens ignored, blank lines and comment lines skipped.
    ///
    /// Node ids are assigned by first appearance among the kept lines.
    pub fn parse_edge_list<R: BufRead>(
        reader: R,
        opts: &EdgeListOptions,
    ) -> Result<Self, GraphError> {
        let mut labels: Vec<String> = Vec::new();
        let mut ids: HashMap<String, NodeId> = HashMap::new();
        let mut intern = |token: &str, labels: &mut Vec<String>| -> NodeId {
            if let Some(&id) = ids.get(token) {
                return id;
            }
            let id = labels.len();
            labels.push(token.to_string());
            ids.insert(token.to_string(), id);
            id
        };

        let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(first) = trimmed.chars().next() {
                if opts.comment_prefixes.contains(&first) {
                    continue;
                }
            }
            let tokens: Box<dyn Iterator<Item = &str>> = match opts.delimiter {
                Delimiter::Whitespace => Box::new(trimmed.split_whitespace()),
                Delimiter::Comma => Box::new(trimmed.split(',')),
            };
            let mut tokens = tokens.map(str::trim).filter(|t| !t.is_empty());
            let (t0, t1) = match (tokens.next(), tokens.next()) {
                (Some(a), Some(b)) => (a, b),
                (first, _) => {
                    return Err(GraphError::MalformedLine {
                        line: line_no,
                        found: first.map_or(0, |_| 1),
                    })
                }
            };
            if t0 == t1 {
                if opts.drop_self_loops {
                    continue;
                }
                return Err(GraphError::SelfLoop {
                    line: line_no,
                    label: t0.to_string(),
                });
            }
            let a = intern(t0, &mut labels);
            let b = intern(t1, &mut labels);
            let key = if opts.symmetrize || a < b { (a.min(b), a.max(b)) } else { (a, b) };
            if !seen.insert(key) {
                if opts.collapse_multi {
                    continue;
                }
                return Err(GraphError::DuplicateEdge {
                    line: line_no,
                    a: t0.to_string(),
                    b: t1.to_string(),
                });
            }
            edges.push((a, b));
        }
        if edges.is_empty() {
            return Err(GraphError::Empty);
        }
        Self::build_with_labels(labels.len(), edges, labels)
    }

    /// Convenience wrapper over [`Graph::parse_edge_list`] for in-memory text.
    pub fn from_edge_list_str(text: &str, opts: &EdgeListOptions) -> Result<Self, GraphError> {
        Self::parse_edge_list(text.as_bytes(), opts)
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Degree of `u`. Panics if `u` is out of range.
    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    /// Sorted open neighborhood of `u`. Panics if `u` is out of range.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    /// Checked variant of [`Graph::neighbors`].
    pub fn try_neighbors(&self, u: NodeId) -> Result<&[NodeId], GraphError> {
        self.adj.get(u).map(Vec::as_slice).ok_or(GraphError::InvalidNode(u))
    }

    /// Sorted closed neighborhood: `u` together with its neighbors.
    pub fn closed_neighborhood(&self, u: NodeId) -> Result<Vec<NodeId>, GraphError> {
        let nbrs = self.try_neighbors(u)?;
        let mut out = Vec::with_capacity(nbrs.len() + 1);
        let split = nbrs.partition_point(|&v| v < u);
        out.extend_from_slice(&nbrs[..split]);
        out.push(u);
        out.extend_from_slice(&nbrs[split..]);
        Ok(out)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        match self.adj.get(u) {
            Some(list) => list.binary_search(&v).is_ok(),
            None => false,
        }
    }

    /// All edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .skip_while(move |&&v| v < u)
                .map(move |&v| (u, v))
        })
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Result<Vec<Option<u32>>, GraphError> {
        if source >= self.num_nodes() {
            return Err(GraphError::InvalidNode(source));
        }
        let mut dist = vec![u32::MAX; self.num_nodes()];
        self.bfs_raw(source, &mut dist);
        Ok(dist
            .into_iter()
            .map(|d| if d == u32::MAX { None } else { Some(d) })
            .collect())
    }

    /// BFS into a caller-provided buffer, `u32::MAX` marking unreachable.
    /// The buffer must have length `num_nodes()` and be pre-filled with
    /// `u32::MAX`.
    pub(crate) fn bfs_raw(&self, source: NodeId, dist: &mut [u32]) {
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u] + 1;
            for &v in &self.adj[u] {
                if dist[v] == u32::MAX {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
    }

    /// Display label for `u`: the parsed token, or the id itself for graphs
    /// built programmatically.
    pub fn label(&self, u: NodeId) -> String {
        match &self.labels {
            Some(labels) => labels[u].clone(),
            None => u.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label-to-id lookup table.
    pub fn label_index(&self) -> HashMap<String, NodeId> {
        match &self.labels {
            Some(labels) => labels
                .iter()
                .enumerate()
                .map(|(id, l)| (l.clone(), id))
                .collect(),
            None => (0..self.num_nodes()).map(|id| (id.to_string(), id)).collect(),
        }
    }

    /// Writes the graph back out as edge-list text.
    ///
    /// For graphs that came from [`Graph::parse_edge_list`], edges are ordered
    /// so that labels reappear in id order: re-parsing the output reproduces
    /// the same graph, ids and labels included. Graphs built with ids that do
    /// not follow the first-appearance pattern fall back to plain sorted
    /// order, which re-parses to an isomorphic graph.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.num_nodes();
        let mut intro: Vec<(NodeId, NodeId)> = Vec::new();
        let mut replay_ok = n >= 2 && self.has_edge(0, 1);
        if replay_ok {
            intro.push((0, 1));
            let mut k = 2;
            while k < n {
                if let Some(&j) = self.adj[k].first().filter(|&&j| j < k) {
                    intro.push((j, k));
                    k += 1;
                } else if k + 1 < n && self.has_edge(k, k + 1) {
                    intro.push((k, k + 1));
                    k += 2;
                } else {
                    replay_ok = false;
                    break;
                }
            }
        }
        if replay_ok {
            let introduced: HashSet<(NodeId, NodeId)> = intro
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect();
            for &(a, b) in &intro {
                writeln!(w, "{} {}", self.label(a), self.label(b))?;
            }
            for (u, v) in self.edges() {
                if !introduced.contains(&(u, v)) {
                    writeln!(w, "{} {}", self.label(u), self.label(v))?;
                }
            }
        } else {
            for (u, v) in self.edges() {
                writeln!(w, "{} {}", self.label(u), self.label(v))?;
            }
        }
        Ok(())
    }
}
