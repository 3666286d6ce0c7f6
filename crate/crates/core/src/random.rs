//! Seeded Erdős–Rényi sampling and random graph processes.
//!
//! All randomness comes from [`SplitMix64`], a counter-based generator whose
//! exact output stream is part of the file-format contract:
//!
//! * draw `i` (0-based) is `mix(seed + (i + 1) * 0x9E3779B97F4A7C15)` with
//!   wrapping arithmetic, where `mix` is the splitmix64 finaliser
//!   (`z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!   z *= 0x94D049BB133111EB; z ^= z >> 31`);
//! * a uniform real is `(draw >> 11) * 2^-53`, in `[0, 1)`;
//! * a uniform integer below `b` is `(draw * b) >> 64` computed in 128 bits;
//! * `G(n, p)` visits pairs `(u, v)`, `u < v`, lexicographically and keeps a
//!   pair when its uniform real is `< p`;
//! * a process is a Fisher–Yates shuffle of the lexicographic pair list,
//!   swapping position `i` with a uniform index below `i + 1` for
//!   `i = len-1` down to `1`.

use thiserror::Error;

use crate::graph::{Edge, Graph, Vertex};
use crate::packing::{self, PackingError};

/// Generator version tag recorded alongside experiment outputs.
pub const GENERATOR: &str = "splitmix64-v1";

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RandomError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("a random graph process needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error(transparent)]
    Packing(#[from] PackingError),
}

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: Seed) -> Self {
        SplitMix64 { state: seed.0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Number of successes in `trials` Bernoulli(p) draws.
    pub fn binomial(&mut self, trials: u64, p: f64) -> u64 {
        (0..trials).filter(|_| self.bernoulli(p)).count() as u64
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `count` distinct elements of `pool`, uniformly (partial Fisher–Yates).
    pub fn sample_distinct<T: Copy>(&mut self, pool: &mut [T], count: usize) -> Vec<T> {
        let count = count.min(pool.len());
        for i in 0..count {
            let j = i + self.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool[..count].to_vec()
    }
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_probability(p: f64) -> Result<(), RandomError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(RandomError::Probability(p))
    }
}

/// G(n, p): each of the `n(n-1)/2` pairs is kept independently with probability `p`.
pub fn sample_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph, RandomError> {
    check_probability(p)?;
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.bernoulli(p) {
                edges.push(Edge { u, v });
            }
        }
    }
    Ok(Graph::from_simple_edges(n, edges))
}

/// A uniformly random ordering of all pairs of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePermutation {
    n: usize,
    order: Vec<Edge>,
}

impl EdgePermutation {
    /// Wraps an explicit ordering; `None` unless it lists every pair exactly once.
    pub fn new(n: usize, order: Vec<Edge>) -> Option<Self> {
        if order.len() != n * n.saturating_sub(1) / 2 {
            return None;
        }
        let mut seen = vec![false; order.len()];
        for e in &order {
            if e.u >= e.v || e.v as usize >= n {
                return None;
            }
            let (u, v) = (e.u as usize, e.v as usize);
            let idx = u * (2 * n - u - 1) / 2 + (v - u - 1);
            if std::mem::replace(&mut seen[idx], true) {
                return None;
            }
        }
        Some(EdgePermutation { n, order })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> &[Edge] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// G_m, the graph of the first `m` edges.
    pub fn prefix_graph(&self, m: usize) -> Graph {
        Graph::from_simple_edges(self.n, self.order[..m].to_vec())
    }
}

pub fn sample_process(n: usize, seed: Seed) -> Result<EdgePermutation, RandomError> {
    if n < 2 {
        return Err(RandomError::TooFewVertices(n));
    }
    let mut order = Graph::complete(n).edges().to_vec();
    SplitMix64::new(seed).shuffle(&mut order);
    Ok(EdgePermutation { n, order })
}

/// Smallest `m` with δ(G_m) >= k, or `None` when even K_n falls short.
pub fn hitting_time_min_degree(perm: &EdgePermutation, k: usize) -> Option<usize> {
    let n = perm.n;
    if k == 0 {
        return Some(0);
    }
    let mut degree = vec![0usize; n];
    let mut deficient = n;
    for (i, e) in perm.order.iter().enumerate() {
        for x in [e.u, e.v] {
            let d = &mut degree[x as usize];
            *d += 1;
            if *d == k {
                deficient -= 1;
            }
        }
        if deficient == 0 {
            return Some(i + 1);
        }
    }
    None
}

/// Smallest `m` such that G_m has `k` edge-disjoint spanning trees.
///
/// The property is monotone along the process, so the search gallops up from
/// `max(τ_δ(k), k(n-1))` and finishes with a binary search, recomputing the
/// packing at every probe.
pub fn hitting_time_packing(perm: &EdgePermutation, k: usize) -> Result<Option<usize>, RandomError> {
    let n = perm.n;
    if k == 0 {
        return Ok(Some(0));
    }
    if n >= 2 && k > n / 2 {
        return Ok(None);
    }
    let Some(tau_delta) = hitting_time_min_degree(perm, k) else {
        return Ok(None);
    };
    let total = perm.len();
    let holds = |m: usize| -> Result<bool, PackingError> {
        Ok(packing::has_k_spanning_trees(&perm.prefix_graph(m), k)?.is_some())
    };

    let mut fail = tau_delta.max(k * (n - 1)) - 1; // every prefix up to here fails
    let mut step = 1;
    let mut ok = loop {
        let probe = (fail + step).min(total);
        if holds(probe)? {
            break probe;
        }
        if probe == total {
            return Ok(None);
        }
        fail = probe;
        step *= 2;
    };
    while ok - fail > 1 {
        let mid = fail + (ok - fail) / 2;
        if holds(mid)? {
            ok = mid;
        } else {
            fail = mid;
        }
    }
    Ok(Some(ok))
}
