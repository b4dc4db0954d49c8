//! Directed simple graph and the edge-list text format.
//!
//! Node identifiers are arbitrary non-negative integers. Internally nodes are
//! re-indexed densely in ascending identifier order; the dense index never
//! appears in any output.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for NodeId {
    fn from(id: u64) -> Self {
        NodeId(id)
    }
}

/// Immutable directed graph without self-loops or parallel edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    // undirected projection, sorted and deduplicated
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty() -> Self {
        GraphBuilder::new().build()
    }

    /// Builds a graph from an edge iterator, silently dropping self-loops and
    /// duplicates. Use [`GraphBuilder`] to observe what was dropped.
    pub fn from_edges<I, A, B>(edges: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<NodeId>,
        B: Into<NodeId>,
    {
        let mut b = GraphBuilder::new();
        for (s, t) in edges {
            b.add_edge(s.into(), t.into());
        }
        b.build()
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Node identifiers in ascending order.
    pub fn node_ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.index.contains_key(&node)
    }

    pub fn has_edge(&self, source: NodeId, target: NodeId) -> bool {
        match (self.index.get(&source), self.index.get(&target)) {
            (Some(&s), Some(&t)) => self.out_adj[s].binary_search(&t).is_ok(),
            _ => false,
        }
    }

    /// All directed edges, ordered by (source, target).
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(move |(s, ts)| ts.iter().map(move |&t| (self.ids[s], self.ids[t])))
    }

    pub fn indegree(&self, node: NodeId) -> Result<usize> {
        Ok(self.in_adj[self.idx(node)?].len())
    }

    pub fn outdegree(&self, node: NodeId) -> Result<usize> {
        Ok(self.out_adj[self.idx(node)?].len())
    }

    pub(crate) fn idx(&self, node: NodeId) -> Result<usize> {
        self.index
            .get(&node)
            .copied()
            .ok_or(Error::NodeNotFound(node))
    }

    pub(crate) fn id_at(&self, idx: usize) -> NodeId {
        self.ids[idx]
    }

    pub(crate) fn out_at(&self, idx: usize) -> &[usize] {
        &self.out_adj[idx]
    }

    pub(crate) fn in_at(&self, idx: usize) -> &[usize] {
        &self.in_adj[idx]
    }

    pub(crate) fn neighbors_at(&self, idx: usize) -> &[usize] {
        &self.neighbors[idx]
    }

    /// Writes the graph in edge-list format. Isolated nodes are not
    /// representable and are omitted.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# {} nodes, {} directed edges",
            self.node_count(),
            self.edge_count()
        )?;
        for (s, t) in self.edges() {
            writeln!(w, "{s} {t}")?;
        }
        Ok(())
    }
}

/// Incremental constructor enforcing the simple-graph invariants.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: NodeId) {
        self.nodes.insert(node);
    }

    /// Returns what happened to the edge.
    pub fn add_edge(&mut self, source: NodeId, target: NodeId) -> EdgeInsert {
        if source == target {
            self.nodes.insert(source);
            return EdgeInsert::SelfLoop;
        }
        self.nodes.insert(source);
        self.nodes.insert(target);
        if self.edges.insert((source, target)) {
            EdgeInsert::Added
        } else {
            EdgeInsert::Duplicate
        }
    }

    pub fn build(self) -> Graph {
        let ids: Vec<NodeId> = self.nodes.into_iter().collect();
        let index: HashMap<NodeId, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let n = ids.len();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        // BTreeSet iteration keeps each adjacency list sorted
        for &(s, t) in &self.edges {
            let (si, ti) = (index[&s], index[&t]);
            out_adj[si].push(ti);
            in_adj[ti].push(si);
        }
        for list in &mut in_adj {
            list.sort_unstable();
        }
        let neighbors = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = out_adj[v].iter().chain(&in_adj[v]).copied().collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        Graph {
            ids,
            index,
            out_adj,
            in_adj,
            neighbors,
            edge_count: self.edges.len(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeInsert {
    Added,
    Duplicate,
    SelfLoop,
}

/// Result of parsing an edge list, including the dropped-line tallies.
#[derive(Clone, Debug)]
pub struct LoadReport {
    pub graph: Graph,
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Parses edge-list text: one `src dst` pair per line, separated by
/// whitespace or a comma. Blank lines and lines starting with `#` are ignored.
pub fn load_edge_list(text: &str) -> Result<LoadReport> {
    let mut builder = GraphBuilder::new();
    let mut duplicates = 0;
    let mut self_loops = 0;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = lineno + 1;
        let tokens: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two node ids, found {} tokens", tokens.len()),
            });
        }
        let parse = |tok: &str| {
            tok.parse::<u64>().map(NodeId).map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node id '{tok}'"),
            })
        };
        let (s, t) = (parse(tokens[0])?, parse(tokens[1])?);
        match builder.add_edge(s, t) {
            EdgeInsert::Added => {}
            EdgeInsert::Duplicate => duplicates += 1,
            EdgeInsert::SelfLoop => self_loops += 1,
        }
    }

    if duplicates > 0 {
        log::warn!("collapsed {duplicates} duplicate edge(s)");
    }
    if self_loops > 0 {
        log::warn!("skipped {self_loops} self-loop(s)");
    }
    Ok(LoadReport {
        graph: builder.build(),
        duplicates,
        self_loops,
    })
}
