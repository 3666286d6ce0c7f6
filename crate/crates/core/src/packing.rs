//! Edge-disjoint spanning tree packing by matroid-union forest augmentation.
//!
//! `k` edge-disjoint forests are grown one edge at a time. An unused edge is
//! inserted directly when some forest does not already connect its endpoints;
//! otherwise a breadth-first labelling over the exchange structure looks for
//! a sequence of swaps that frees room for it. Inside one search the labelled
//! edges of each forest are contracted with a union-find so every forest edge
//! is walked at most once.
//!
//! When the forests cannot reach `k(n-1)` edges, the labelled closure of all
//! unused edges spans the same vertex classes in every forest; those classes
//! are a partition whose crossing edges all lie in the forests, which gives a
//! partition violating the tree-packing condition at level `k`.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, Partition, Vertex};
use crate::oracle;
use crate::unionfind::UnionFind;

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackingError {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("number of trees must be positive")]
    ZeroTrees,
    #[error("a certificate needs at least two vertices")]
    TooFewVertices,
    #[error("graph has {0} edge-disjoint spanning trees, no certificate exists")]
    NoViolation(usize),
    #[error("internal error: extracted partition does not violate the packing condition")]
    CertificateRejected,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
}

/// An acyclic edge set over the vertices of a host graph, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Forest {
    edges: Vec<Edge>,
}

impl Forest {
    pub fn new(mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        Forest { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl<E: Into<(Vertex, Vertex)>> FromIterator<E> for Forest {
    fn from_iter<I: IntoIterator<Item = E>>(iter: I) -> Self {
        Forest::new(iter.into_iter().map(|e| Edge::from(e.into())).collect())
    }
}

/// σ(G), a packing attaining it, and a partition proving σ+1 trees impossible.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PackingResult {
    pub sigma: usize,
    pub trees: Vec<Forest>,
    pub certificate: Option<Partition>,
}

/// Why [`verify_packing`] rejected a family of trees.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackingDefect {
    #[error("tree {tree} has {found} edges, expected {expected}")]
    WrongSize { tree: usize, found: usize, expected: usize },
    #[error("tree {tree} uses {edge}, which is not an edge of the graph")]
    ForeignEdge { tree: usize, edge: Edge },
    #[error("tree {tree} contains a cycle through {edge}")]
    Cycle { tree: usize, edge: Edge },
    #[error("edge {edge} is shared by trees {first} and {second}")]
    Shared { edge: Edge, first: usize, second: usize },
}

/// Checks that `trees` are pairwise edge-disjoint spanning trees of `g`.
///
/// Independent of the packing algorithm: edge membership, size, and
/// acyclicity via a fresh union-find per tree.
pub fn verify_packing(g: &Graph, trees: &[Forest]) -> Result<(), PackingDefect> {
    let n = g.vertex_count();
    let mut used = std::collections::HashMap::new();
    for (t, tree) in trees.iter().enumerate() {
        let expected = n.saturating_sub(1);
        if tree.len() != expected {
            return Err(PackingDefect::WrongSize { tree: t, found: tree.len(), expected });
        }
        let mut uf = UnionFind::new(n);
        for &edge in tree.edges() {
            if edge.v as usize >= n || edge.u == edge.v || !g.has_edge(edge.u, edge.v) {
                return Err(PackingDefect::ForeignEdge { tree: t, edge });
            }
            if let Some(first) = used.insert(edge, t) {
                return Err(PackingDefect::Shared { edge, first, second: t });
            }
            if !uf.union(edge.u as usize, edge.v as usize) {
                return Err(PackingDefect::Cycle { tree: t, edge });
            }
        }
    }
    Ok(())
}

/// Returns `k` edge-disjoint spanning trees when they exist.
pub fn has_k_spanning_trees(g: &Graph, k: usize) -> Result<Option<Vec<Forest>>, PackingError> {
    check_args(g, k)?;
    if !level_is_plausible(g, k) {
        return Ok(None);
    }
    let mut packer = ForestPacker::new(g, k);
    packer.saturate();
    Ok(packer.is_full().then(|| packer.trees()))
}

/// A partition `P` with `crossing(P) < k(|P|-1)`, proving that `g` does not
/// contain `k` edge-disjoint spanning trees.
pub fn extract_certificate(g: &Graph, k: usize) -> Result<Partition, PackingError> {
    check_args(g, k)?;
    if g.vertex_count() < 2 {
        return Err(PackingError::TooFewVertices);
    }
    let cert = if let Some(p) = trivial_certificate(g, k) {
        p
    } else {
        let mut packer = ForestPacker::new(g, k);
        packer.saturate();
        if packer.is_full() {
            return Err(PackingError::NoViolation(k));
        }
        packer.closure_partition()
    };
    validated(g, k, cert)
}

/// Computes σ(G) with a maximum packing and a certificate for level σ+1.
///
/// The search starts at the upper bound `min(δ, ⌊m/(n-1)⌋)`. A failed level
/// yields a violating partition `P`, and `⌊crossing(P)/(|P|-1)⌋` is then a
/// strictly smaller bound; forests are kept between levels. The partition of
/// the last failed level also violates level σ+1, and when the first level
/// succeeds a degree cut or the singleton partition does.
pub fn max_packing(g: &Graph) -> Result<PackingResult, PackingError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(PackingError::EmptyGraph);
    }
    if n == 1 {
        return Ok(PackingResult { sigma: 0, trees: Vec::new(), certificate: None });
    }
    let comps = g.connected_components();
    if comps.len() > 1 {
        let cert = Partition::new(n, comps)?;
        let cert = validated(g, 1, cert)?;
        return Ok(PackingResult { sigma: 0, trees: Vec::new(), certificate: Some(cert) });
    }

    let mut level = upper_bound(g);
    debug_assert!(level >= 1);
    let mut packer = ForestPacker::new(g, level);
    let mut last_failure: Option<Partition> = None;
    loop {
        packer.saturate();
        if packer.is_full() {
            break;
        }
        let cert = packer.closure_partition();
        let crossing = g.crossing_edges(&cert)?;
        let next = crossing / (cert.len() - 1);
        debug_assert!(next < level && next >= 1);
        level = next;
        last_failure = Some(cert);
        packer.shrink_to(level);
    }
    let certificate = match last_failure {
        Some(p) => p,
        None => trivial_certificate(g, level + 1).expect("upper bound is attained by δ or m/(n-1)"),
    };
    let certificate = validated(g, level + 1, certificate)?;
    let result = PackingResult { sigma: level, trees: packer.trees(), certificate: Some(certificate) };
    debug_assert!(verify_packing(g, &result.trees).is_ok());
    Ok(result)
}

/// `min(δ, ⌊m/(n-1)⌋)`, an upper bound on σ for `n >= 2`.
pub fn upper_bound(g: &Graph) -> usize {
    let n = g.vertex_count();
    let delta = g.min_degree().unwrap_or(0);
    delta.min(g.edge_count() / (n - 1).max(1))
}

fn check_args(g: &Graph, k: usize) -> Result<(), PackingError> {
    if g.vertex_count() == 0 {
        return Err(PackingError::EmptyGraph);
    }
    if k == 0 {
        return Err(PackingError::ZeroTrees);
    }
    Ok(())
}

fn level_is_plausible(g: &Graph, k: usize) -> bool {
    let n = g.vertex_count();
    n == 1 || (k <= g.min_degree().unwrap_or(0) && k * (n - 1) <= g.edge_count())
}

/// Cheap witnesses: disconnection, a minimum-degree vertex, or all singletons.
fn trivial_certificate(g: &Graph, k: usize) -> Option<Partition> {
    let n = g.vertex_count();
    let comps = g.connected_components();
    if comps.len() > 1 {
        return Partition::new(n, comps).ok();
    }
    let v = g.min_degree_vertex()?;
    if g.degree(v) < k {
        let rest: Vec<Vertex> = (0..n as Vertex).filter(|&x| x != v).collect();
        return Partition::new(n, vec![vec![v], rest]).ok();
    }
    if g.edge_count() < k * (n - 1) {
        return Some(Partition::singletons(n));
    }
    None
}

fn validated(g: &Graph, k: usize, cert: Partition) -> Result<Partition, PackingError> {
    if oracle::nw_check(g, k, &cert)? {
        Err(PackingError::CertificateRejected)
    } else {
        Ok(cert)
    }
}

/// Rooted view of one forest, rebuilt lazily after it changes.
#[derive(Clone, Default)]
struct RootedForest {
    adj: Vec<Vec<(Vertex, u32)>>,
    parent: Vec<Vertex>,
    parent_edge: Vec<u32>,
    depth: Vec<u32>,
    root: Vec<Vertex>,
    size: usize,
    dirty: bool,
    // contraction of labelled edges for the current search
    jump: Vec<Vertex>,
    stamp: Vec<u32>,
}

impl RootedForest {
    fn new(n: usize) -> Self {
        RootedForest {
            adj: vec![Vec::new(); n],
            parent: vec![0; n],
            parent_edge: vec![NONE; n],
            depth: vec![0; n],
            root: (0..n as Vertex).collect(),
            size: 0,
            dirty: false,
            jump: vec![0; n],
            stamp: vec![0; n],
        }
    }

    fn insert(&mut self, id: u32, e: Edge) {
        self.adj[e.u as usize].push((e.v, id));
        self.adj[e.v as usize].push((e.u, id));
        self.size += 1;
        self.dirty = true;
    }

    fn remove(&mut self, id: u32, e: Edge) {
        for x in [e.u, e.v] {
            let list = &mut self.adj[x as usize];
            let pos = list.iter().position(|&(_, i)| i == id).expect("edge present in forest");
            list.swap_remove(pos);
        }
        self.size -= 1;
        self.dirty = true;
    }

    fn rebuild(&mut self, queue: &mut Vec<Vertex>) {
        let n = self.adj.len();
        self.parent_edge.iter_mut().for_each(|p| *p = NONE);
        self.root.iter_mut().for_each(|r| *r = NONE);
        for s in 0..n as Vertex {
            if self.root[s as usize] != NONE {
                continue;
            }
            self.root[s as usize] = s;
            self.parent[s as usize] = s;
            self.depth[s as usize] = 0;
            queue.clear();
            queue.push(s);
            let mut head = 0;
            while head < queue.len() {
                let x = queue[head];
                head += 1;
                for &(y, id) in &self.adj[x as usize] {
                    if self.root[y as usize] == NONE {
                        self.root[y as usize] = s;
                        self.parent[y as usize] = x;
                        self.parent_edge[y as usize] = id;
                        self.depth[y as usize] = self.depth[x as usize] + 1;
                        queue.push(y);
                    }
                }
            }
        }
        self.dirty = false;
    }

    /// Topmost vertex reachable from `x` through contracted (labelled) edges.
    fn top(&mut self, x: Vertex, stamp: u32) -> Vertex {
        let mut r = x;
        while self.stamp[r as usize] == stamp {
            r = self.jump[r as usize];
        }
        let mut y = x;
        while self.stamp[y as usize] == stamp {
            let next = self.jump[y as usize];
            self.jump[y as usize] = r;
            y = next;
        }
        r
    }
}

enum Search {
    Augmented,
    Closed(Vec<u32>),
}

/// `k` edge-disjoint forests over a graph, grown to maximum total size.
struct ForestPacker<'g> {
    g: &'g Graph,
    /// edge ids in ascending `(u, v)` order
    order: Vec<u32>,
    owner: Vec<u32>,
    forests: Vec<RootedForest>,
    label_from: Vec<u32>,
    label_stamp: Vec<u32>,
    stamp: u32,
    scratch: Vec<Vertex>,
}

impl<'g> ForestPacker<'g> {
    fn new(g: &'g Graph, k: usize) -> Self {
        let m = g.edge_count();
        let mut order: Vec<u32> = (0..m as u32).collect();
        order.sort_unstable_by_key(|&i| g.edges()[i as usize]);
        ForestPacker {
            g,
            order,
            owner: vec![NONE; m],
            forests: (0..k).map(|_| RootedForest::new(g.vertex_count())).collect(),
            label_from: vec![NONE; m],
            label_stamp: vec![0; m],
            stamp: 0,
            scratch: Vec::new(),
        }
    }

    fn k(&self) -> usize {
        self.forests.len()
    }

    fn target(&self) -> usize {
        self.k() * (self.g.vertex_count() - 1)
    }

    fn total(&self) -> usize {
        self.forests.iter().map(|f| f.size).sum()
    }

    fn is_full(&self) -> bool {
        self.total() == self.target()
    }

    fn edge(&self, id: u32) -> Edge {
        self.g.edges()[id as usize]
    }

    /// Drops forests `k..`, returning their edges to the unused pool.
    fn shrink_to(&mut self, k: usize) {
        self.forests.truncate(k);
        for o in &mut self.owner {
            if *o != NONE && *o as usize >= k {
                *o = NONE;
            }
        }
    }

    fn assign(&mut self, id: u32, to: u32) {
        let e = self.edge(id);
        let from = self.owner[id as usize];
        if from != NONE {
            self.forests[from as usize].remove(id, e);
        }
        if to != NONE {
            self.forests[to as usize].insert(id, e);
        }
        self.owner[id as usize] = to;
    }

    /// Grows the forests until no unused edge can be added.
    fn saturate(&mut self) {
        self.greedy();
        let order = self.order.clone();
        for id in order {
            if self.is_full() {
                break;
            }
            if self.owner[id as usize] == NONE {
                // a failed search leaves the edge in the span for good
                let _ = self.search(&[id]);
            }
        }
    }

    fn greedy(&mut self) {
        let n = self.g.vertex_count();
        let mut ufs: Vec<UnionFind> = (0..self.k()).map(|_| UnionFind::new(n)).collect();
        for (id, &o) in self.owner.iter().enumerate() {
            if o != NONE {
                let e = self.g.edges()[id];
                ufs[o as usize].union(e.u as usize, e.v as usize);
            }
        }
        let target = self.target();
        let mut total = self.total();
        for idx in 0..self.order.len() {
            if total == target {
                break;
            }
            let id = self.order[idx];
            if self.owner[id as usize] != NONE {
                continue;
            }
            let e = self.edge(id);
            if let Some(i) = ufs.iter_mut().position(|uf| uf.union(e.u as usize, e.v as usize)) {
                self.assign(id, i as u32);
                total += 1;
            }
        }
    }

    fn refresh(&mut self) {
        for f in &mut self.forests {
            if f.dirty {
                f.rebuild(&mut self.scratch);
            }
        }
    }

    /// Breadth-first exchange search from the given unused edges. Either
    /// performs one augmentation or returns every labelled edge.
    ///
    /// Spanning trees never accept an edge, so only forests below `n-1`
    /// edges are probed, and each edge is probed as soon as it is labelled.
    fn search(&mut self, sources: &[u32]) -> Search {
        self.refresh();
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.label_stamp.iter_mut().for_each(|s| *s = 0);
            for f in &mut self.forests {
                f.stamp.iter_mut().for_each(|s| *s = 0);
            }
            self.stamp = 1;
        }
        let stamp = self.stamp;
        let spanning = self.g.vertex_count() - 1;
        let open: Vec<u32> = (0..self.k() as u32).filter(|&i| self.forests[i as usize].size < spanning).collect();
        let fits = |forests: &[RootedForest], owner: u32, e: Edge| {
            open.iter().copied().find(|&i| {
                let f = &forests[i as usize];
                i != owner && f.root[e.u as usize] != f.root[e.v as usize]
            })
        };

        let mut queue: VecDeque<u32> = VecDeque::new();
        let mut labelled = Vec::new();
        for &s in sources {
            self.label_stamp[s as usize] = stamp;
            self.label_from[s as usize] = NONE;
            if let Some(i) = fits(&self.forests, NONE, self.edge(s)) {
                self.augment(s, i);
                return Search::Augmented;
            }
            queue.push_back(s);
            labelled.push(s);
        }
        while let Some(id) = queue.pop_front() {
            let e = self.edge(id);
            let own = self.owner[id as usize];
            for i in 0..self.forests.len() {
                if i as u32 == own {
                    continue;
                }
                let mut a = self.forests[i].top(e.u, stamp);
                let mut b = self.forests[i].top(e.v, stamp);
                while a != b {
                    let f = &mut self.forests[i];
                    if f.depth[a as usize] < f.depth[b as usize] {
                        std::mem::swap(&mut a, &mut b);
                    }
                    let tree_edge = f.parent_edge[a as usize];
                    let up = f.parent[a as usize];
                    f.jump[a as usize] = up;
                    f.stamp[a as usize] = stamp;
                    debug_assert_ne!(self.label_stamp[tree_edge as usize], stamp);
                    self.label_stamp[tree_edge as usize] = stamp;
                    self.label_from[tree_edge as usize] = id;
                    if let Some(j) = fits(&self.forests, i as u32, self.edge(tree_edge)) {
                        self.augment(tree_edge, j);
                        return Search::Augmented;
                    }
                    queue.push_back(tree_edge);
                    labelled.push(tree_edge);
                    a = self.forests[i].top(up, stamp);
                }
            }
        }
        Search::Closed(labelled)
    }

    /// Applies the swap chain ending with `last` entering forest `into`.
    fn augment(&mut self, last: u32, into: u32) {
        let mut cur = last;
        let mut to = into;
        loop {
            let from = self.owner[cur as usize];
            let prev = self.label_from[cur as usize];
            self.assign(cur, to);
            if prev == NONE {
                debug_assert_eq!(from, NONE);
                break;
            }
            to = from;
            cur = prev;
        }
    }

    /// Vertex classes spanned by the labelled closure of all unused edges.
    fn closure_partition(&mut self) -> Partition {
        loop {
            let unused: Vec<u32> = self.order.iter().copied().filter(|&id| self.owner[id as usize] == NONE).collect();
            match self.search(&unused) {
                // only reachable if an earlier failure was not final
                Search::Augmented => continue,
                Search::Closed(labelled) => {
                    let n = self.g.vertex_count();
                    let mut uf = UnionFind::new(n);
                    for id in labelled {
                        let e = self.edge(id);
                        uf.union(e.u as usize, e.v as usize);
                    }
                    let labels: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
                    return Partition::from_labels(&labels);
                }
            }
        }
    }

    fn trees(&self) -> Vec<Forest> {
        let mut out = vec![Vec::new(); self.k()];
        for (id, &o) in self.owner.iter().enumerate() {
            if o != NONE {
                out[o as usize].push(self.g.edges()[id]);
            }
        }
        out.into_iter().map(Forest::new).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4() -> Graph {
        Graph::complete(4)
    }

    #[test]
    fn k4_two_trees() {
        let trees = has_k_spanning_trees(&k4(), 2).unwrap().expect("two trees");
        assert_eq!(trees.len(), 2);
        assert_eq!(verify_packing(&k4(), &trees), Ok(()));
        assert!(has_k_spanning_trees(&k4(), 3).unwrap().is_none());
    }

    #[test]
    fn path_is_its_own_packing() {
        let p4 = Graph::path(4);
        let trees = has_k_spanning_trees(&p4, 1).unwrap().unwrap();
        assert_eq!(trees[0].edges(), p4.edges());
    }

    #[test]
    fn argument_errors() {
        assert_eq!(has_k_spanning_trees(&k4(), 0), Err(PackingError::ZeroTrees));
        assert_eq!(has_k_spanning_trees(&Graph::empty(0), 1), Err(PackingError::EmptyGraph));
        assert_eq!(max_packing(&Graph::empty(0)), Err(PackingError::EmptyGraph));
        assert_eq!(extract_certificate(&k4(), 2), Err(PackingError::NoViolation(2)));
        assert_eq!(extract_certificate(&Graph::empty(1), 1), Err(PackingError::TooFewVertices));
    }

    #[test]
    fn small_values() {
        assert_eq!(max_packing(&k4()).unwrap().sigma, 2);
        assert_eq!(max_packing(&Graph::complete(6)).unwrap().sigma, 3);
        let c5 = max_packing(&Graph::cycle(5)).unwrap();
        assert_eq!(c5.sigma, 1);
        assert_eq!(c5.certificate, Some(Partition::singletons(5)));
    }

    #[test]
    fn disconnected_graph_has_component_certificate() {
        let two = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let r = max_packing(&two).unwrap();
        assert_eq!(r.sigma, 0);
        assert!(r.trees.is_empty());
        let cert = r.certificate.unwrap();
        assert_eq!(cert.blocks(), &[vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(extract_certificate(&two, 1).unwrap(), cert);
    }

    #[test]
    fn certificates_from_closure() {
        assert_eq!(extract_certificate(&Graph::cycle(4), 2).unwrap(), Partition::singletons(4));
        assert_eq!(extract_certificate(&k4(), 3).unwrap(), Partition::singletons(4));
        // the closure route directly, bypassing the cheap witnesses
        let g = k4();
        let mut packer = ForestPacker::new(&g, 3);
        packer.saturate();
        assert!(!packer.is_full());
        assert_eq!(packer.closure_partition(), Partition::singletons(4));
    }

    #[test]
    fn closure_certificate_on_dense_core_with_hanging_triangle() {
        // K5 with a triangle hanging off vertex 4: {K5, {5}, {6}} has 3 < 2·2 crossing edges
        let mut edges: Vec<(u32, u32)> = Graph::complete(5).edges().iter().map(|e| (e.u, e.v)).collect();
        edges.push((4, 5));
        edges.push((5, 6));
        edges.push((4, 6));
        let g = Graph::new(7, edges).unwrap();
        let r = max_packing(&g).unwrap();
        assert_eq!(r.sigma, 1);
        assert_eq!(oracle::nw_check(&g, 2, r.certificate.as_ref().unwrap()), Ok(false));
        let mut packer = ForestPacker::new(&g, 2);
        packer.saturate();
        let p = packer.closure_partition();
        assert_eq!(oracle::nw_check(&g, 2, &p), Ok(false));
    }

    #[test]
    fn verify_rejects_defects() {
        let g = k4();
        let a: Forest = [(0, 1), (1, 2), (2, 3)].into_iter().collect();
        let b: Forest = [(0, 1), (0, 2), (0, 3)].into_iter().collect();
        assert!(matches!(verify_packing(&g, &[a, b]), Err(PackingDefect::Shared { .. })));
        let short: Forest = [(0, 1), (1, 2)].into_iter().collect();
        assert!(matches!(verify_packing(&Graph::path(4), &[short]), Err(PackingDefect::WrongSize { .. })));
        let cyc: Forest = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert!(matches!(verify_packing(&g, &[cyc]), Err(PackingDefect::Cycle { .. })));
        let foreign: Forest = [(0, 1), (1, 2), (0, 3)].into_iter().collect();
        assert!(matches!(verify_packing(&Graph::path(4), &[foreign]), Err(PackingDefect::ForeignEdge { .. })));
    }

    #[test]
    fn deterministic() {
        let g = crate::random::sample_gnp(30, 0.3, crate::random::Seed(7)).unwrap();
        assert_eq!(max_packing(&g).unwrap(), max_packing(&g).unwrap());
    }

    #[test]
    fn single_vertex() {
        let r = max_packing(&Graph::empty(1)).unwrap();
        assert_eq!(r.sigma, 0);
        assert_eq!(r.certificate, None);
        assert_eq!(has_k_spanning_trees(&Graph::empty(1), 3).unwrap(), Some(vec![Forest::default(); 3]));
    }
}
