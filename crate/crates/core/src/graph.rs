//! Simple undirected graphs on dense vertex ids `0..n`, plus vertex partitions.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

pub type Vertex = u32;

/// An undirected edge, always stored with `0 <= u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        if a <= b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    #[inline]
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.u, self.v)
    }
}

impl From<(Vertex, Vertex)> for Edge {
    fn from((a, b): (Vertex, Vertex)) -> Self {
        Edge::new(a, b)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

/// Immutable simple graph. Edge ids index into [`Graph::edges`], which keeps
/// the construction order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new<I, E>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = E>,
        E: Into<(Vertex, Vertex)>,
    {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for e in edges {
            let (a, b) = e.into();
            for x in [a, b] {
                if x as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let edge = Edge::new(a, b);
            if !seen.insert(edge) {
                return Err(GraphError::DuplicateEdge(edge.u, edge.v));
            }
            list.push(edge);
        }
        Ok(Self::from_simple_edges(n, list))
    }

    /// Trusted constructor for edge lists already known to be simple and in range.
    pub(crate) fn from_simple_edges(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            debug_assert!(e.u < e.v && (e.v as usize) < n);
            adj[e.u as usize].push(e.v);
            adj[e.v as usize].push(e.u);
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_simple_edges(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                edges.push(Edge { u, v });
            }
        }
        Self::from_simple_edges(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let edges = (0..n as Vertex).map(|i| Edge::new(i, (i + 1) % n as Vertex)).collect();
        Self::from_simple_edges(n, edges)
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n as Vertex).map(|i| Edge::new(i - 1, i)).collect();
        Self::from_simple_edges(n, edges)
    }

    /// Star with centre 0.
    pub fn star(n: usize) -> Self {
        let edges = (1..n as Vertex).map(|i| Edge::new(0, i)).collect();
        Self::from_simple_edges(n, edges)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        let (x, y) = if self.degree(a) <= self.degree(b) { (a, b) } else { (b, a) };
        self.adj[x as usize].contains(&y)
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adj.iter().map(Vec::len)
    }

    /// δ(G).
    pub fn min_degree(&self) -> Result<usize, GraphError> {
        self.degrees().min().ok_or(GraphError::Empty)
    }

    /// Δ(G).
    pub fn max_degree(&self) -> Result<usize, GraphError> {
        self.degrees().max().ok_or(GraphError::Empty)
    }

    /// A vertex of minimum degree (the smallest id among ties).
    pub fn min_degree_vertex(&self) -> Option<Vertex> {
        (0..self.n as Vertex).min_by_key(|&v| (self.degree(v), v))
    }

    /// Maximal connected vertex sets, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s as Vertex);
            let mut comp = Vec::new();
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &y in self.neighbors(x) {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    fn membership(&self, set: &[Vertex]) -> Result<Vec<bool>, GraphError> {
        let mut inside = vec![false; self.n];
        for &v in set {
            if v as usize >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            inside[v as usize] = true;
        }
        Ok(inside)
    }

    /// E(S, S̄): every edge with exactly one endpoint in `set`.
    pub fn edge_boundary(&self, set: &[Vertex]) -> Result<Vec<Edge>, GraphError> {
        let inside = self.membership(set)?;
        Ok(self.edges.iter().copied().filter(|e| inside[e.u as usize] != inside[e.v as usize]).collect())
    }

    /// |E(S, S̄)| without materialising the edges.
    pub fn boundary_size(&self, set: &[Vertex]) -> Result<usize, GraphError> {
        let inside = self.membership(set)?;
        Ok(self.edges.iter().filter(|e| inside[e.u as usize] != inside[e.v as usize]).count())
    }

    /// Number of edges whose endpoints lie in different blocks of `partition`.
    pub fn crossing_edges(&self, partition: &Partition) -> Result<usize, GraphError> {
        let block = partition.block_map(self.n)?;
        Ok(self.crossing_edges_by_label(&block))
    }

    /// Crossing count for a labelling `vertex -> block id`, assumed valid.
    pub(crate) fn crossing_edges_by_label<T: PartialEq>(&self, label: &[T]) -> usize {
        self.edges.iter().filter(|e| label[e.u as usize] != label[e.v as usize]).count()
    }

    /// G[S] relabelled to `0..|S|`; the returned map sends new ids to old ones.
    pub fn induced_subgraph(&self, set: &[Vertex]) -> Result<(Graph, Vec<Vertex>), GraphError> {
        let mut new_id = vec![u32::MAX; self.n];
        let mut map = Vec::with_capacity(set.len());
        for &v in set {
            if v as usize >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            if new_id[v as usize] == u32::MAX {
                new_id[v as usize] = map.len() as Vertex;
                map.push(v);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| new_id[e.u as usize] != u32::MAX && new_id[e.v as usize] != u32::MAX)
            .map(|e| Edge::new(new_id[e.u as usize], new_id[e.v as usize]))
            .collect();
        Ok((Graph::from_simple_edges(map.len(), edges), map))
    }
}

/// Σ_{v∈S} deg(v) − 2|E(G[S])| with a prepared membership mask.
pub(crate) fn boundary_size_with(g: &Graph, set: &[Vertex], inside: &[bool]) -> usize {
    let mut total = 0;
    for &v in set {
        for &w in g.neighbors(v) {
            if !inside[w as usize] {
                total += 1;
            }
        }
    }
    total
}

/// A partition of `0..n` into nonempty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Partition {
    blocks: Vec<Vec<Vertex>>,
}

impl Partition {
    /// Validates that `blocks` partition `0..n`. Blocks are normalised: each is
    /// sorted and blocks are ordered by their smallest vertex.
    pub fn new(n: usize, blocks: Vec<Vec<Vertex>>) -> Result<Self, GraphError> {
        let p = Self::normalized(blocks);
        p.block_map(n)?;
        Ok(p)
    }

    fn normalized(mut blocks: Vec<Vec<Vertex>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b.first().copied());
        Partition { blocks }
    }

    /// Builds a partition from a block label per vertex (labels need not be dense).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<Vertex>> = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            let i = *index.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[i].push(v as Vertex);
        }
        Self::normalized(blocks)
    }

    pub fn singletons(n: usize) -> Self {
        Partition { blocks: (0..n as Vertex).map(|v| vec![v]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        Partition { blocks: vec![(0..n as Vertex).collect()] }
    }

    pub fn blocks(&self) -> &[Vec<Vertex>] {
        &self.blocks
    }

    /// |P|.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of each vertex; fails unless the blocks partition `0..n`.
    pub fn block_map(&self, n: usize) -> Result<Vec<usize>, GraphError> {
        if self.blocks.is_empty() {
            return Err(GraphError::InvalidPartition("no blocks".into()));
        }
        let mut map = vec![usize::MAX; n];
        for (i, b) in self.blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(GraphError::InvalidPartition(format!("block {i} is empty")));
            }
            for &v in b {
                let slot = map.get_mut(v as usize).ok_or(GraphError::VertexOutOfRange { vertex: v, n })?;
                if *slot != usize::MAX {
                    return Err(GraphError::InvalidPartition(format!("vertex {v} appears twice")));
                }
                *slot = i;
            }
        }
        if let Some(v) = map.iter().position(|&b| b == usize::MAX) {
            return Err(GraphError::InvalidPartition(format!("vertex {v} is missing")));
        }
        Ok(map)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let line: Vec<String> = b.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
