//! Exponential reference computations over all set partitions, for small graphs.
//!
//! These are the ground truth the packing algorithm is checked against and
//! deliberately share no code with it.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, GraphError, Partition};

/// Largest ground set the enumerator accepts (Bell(12) = 4 213 597).
pub const MAX_ENUMERATION: usize = 12;
/// Largest graph `brute_eta` accepts.
pub const MAX_ETA: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("size {n} outside the supported range {min}..={max}")]
    OutOfRange { n: usize, min: usize, max: usize },
    #[error("strength is only defined here for connected graphs")]
    Disconnected,
    #[error("number of trees must be positive")]
    ZeroTrees,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_range(n: usize, min: usize, max: usize) -> Result<(), OracleError> {
    if (min..=max).contains(&n) {
        Ok(())
    } else {
        Err(OracleError::OutOfRange { n, min, max })
    }
}

/// Restricted-growth strings of length `n` in lexicographic order: `a[0] = 0`
/// and `a[i] <= 1 + max(a[..i])`. Each string is one set partition.
#[derive(Clone, Debug)]
pub struct RestrictedGrowth {
    rgs: Vec<u8>,
    /// `prefix_max[i] = max(rgs[..=i])`
    prefix_max: Vec<u8>,
    started: bool,
    done: bool,
}

impl RestrictedGrowth {
    pub fn new(n: usize) -> Result<Self, OracleError> {
        check_range(n, 1, MAX_ENUMERATION)?;
        Ok(RestrictedGrowth { rgs: vec![0; n], prefix_max: vec![0; n], started: false, done: false })
    }

    /// Current string; valid after `advance` returned true.
    pub fn labels(&self) -> &[u8] {
        &self.rgs
    }

    /// Number of blocks of the current string.
    pub fn blocks(&self) -> usize {
        *self.prefix_max.last().unwrap() as usize + 1
    }

    /// Moves to the next string. Returns false once the enumeration is exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        let n = self.rgs.len();
        let mut i = n - 1;
        while i > 0 {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
            i -= 1;
        }
        self.done = true;
        false
    }
}

impl Iterator for RestrictedGrowth {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.advance() {
            let labels: Vec<usize> = self.rgs.iter().map(|&x| x as usize).collect();
            Some(Partition::from_labels(&labels))
        } else {
            None
        }
    }
}

/// Every partition of `0..n`, each exactly once.
pub fn enumerate_partitions(n: usize) -> Result<RestrictedGrowth, OracleError> {
    RestrictedGrowth::new(n)
}

/// The tree-packing condition for one partition: `crossing(P) >= k(|P|-1)`.
pub fn nw_check(g: &Graph, k: usize, p: &Partition) -> Result<bool, OracleError> {
    if k == 0 {
        return Err(OracleError::ZeroTrees);
    }
    let crossing = g.crossing_edges(p)?;
    Ok(crossing >= k * (p.len() - 1))
}

/// First partition of `0..n` violating the condition at level `k`, if any.
pub fn find_violation(g: &Graph, k: usize) -> Result<Option<Partition>, OracleError> {
    if k == 0 {
        return Err(OracleError::ZeroTrees);
    }
    let mut it = RestrictedGrowth::new(g.vertex_count())?;
    while it.advance() {
        let t = it.blocks();
        if g.crossing_edges_by_label(it.labels()) < k * (t - 1) {
            let labels: Vec<usize> = it.labels().iter().map(|&x| x as usize).collect();
            return Ok(Some(Partition::from_labels(&labels)));
        }
    }
    Ok(None)
}

/// Visits `(crossing, blocks)` for every partition with at least two blocks.
fn for_each_nontrivial(g: &Graph, mut f: impl FnMut(usize, usize)) -> Result<(), OracleError> {
    let mut it = RestrictedGrowth::new(g.vertex_count())?;
    while it.advance() {
        let t = it.blocks();
        if t >= 2 {
            f(g.crossing_edges_by_label(it.labels()), t);
        }
    }
    Ok(())
}

/// σ(G) as the minimum of `⌊crossing(P)/(|P|-1)⌋` over partitions with two or more blocks.
pub fn brute_sigma(g: &Graph) -> Result<usize, OracleError> {
    check_range(g.vertex_count(), 2, MAX_ENUMERATION)?;
    let mut best = usize::MAX;
    for_each_nontrivial(g, |c, t| best = best.min(c / (t - 1)))?;
    Ok(best)
}

/// Exact strength: min over edge sets `E'` with `ω(G-E') >= 2` of
/// `|E'|/(ω(G-E')-1)`, evaluated over partitions.
pub fn brute_eta(g: &Graph) -> Result<Rational, OracleError> {
    check_range(g.vertex_count(), 2, MAX_ETA)?;
    if !g.is_connected() {
        return Err(OracleError::Disconnected);
    }
    let mut best: Option<Rational> = None;
    for_each_nontrivial(g, |c, t| {
        let r = Rational::new(c as u64, (t - 1) as u64);
        if best.is_none_or(|b| r < b) {
            best = Some(r);
        }
    })?;
    Ok(best.expect("n >= 2 has a two-block partition"))
}

/// Nonnegative rational in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    numer: u64,
    denom: u64,
}

impl Rational {
    pub fn new(numer: u64, denom: u64) -> Self {
        assert!(denom > 0, "zero denominator");
        let g = gcd(numer, denom);
        Rational { numer: numer / g, denom: denom / g }
    }

    pub fn numer(&self) -> u64 {
        self.numer
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn floor(&self) -> u64 {
        self.numer / self.denom
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numer as u128 * other.denom as u128).cmp(&(other.numer as u128 * self.denom as u128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Bell numbers by the Bell triangle, independent of the enumerator.
    fn bell(n: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                next.push(next.last().unwrap() + x);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_partitions(1).unwrap().count(), 1);
        assert_eq!(enumerate_partitions(3).unwrap().count(), 5);
        assert_eq!(enumerate_partitions(4).unwrap().count(), 15);
        for n in 1..=8 {
            let all: Vec<_> = enumerate_partitions(n).unwrap().collect();
            assert_eq!(all.len() as u64, bell(n));
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), all.len());
            for p in &all {
                assert!(p.block_map(n).is_ok());
            }
        }
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(13).is_err());
    }

    #[test]
    fn lexicographic_order() {
        let mut it = RestrictedGrowth::new(3).unwrap();
        let mut seen = Vec::new();
        while it.advance() {
            seen.push(it.labels().to_vec());
        }
        assert_eq!(seen, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn nw_check_arithmetic() {
        let k4 = Graph::complete(4);
        assert_eq!(nw_check(&k4, 2, &Partition::singletons(4)), Ok(true));
        assert_eq!(nw_check(&k4, 3, &Partition::singletons(4)), Ok(false));
        assert_eq!(nw_check(&Graph::empty(4), 9, &Partition::whole(4)), Ok(true));
        assert_eq!(nw_check(&k4, 0, &Partition::whole(4)), Err(OracleError::ZeroTrees));
        let bad = Partition::from_labels(&[0, 0, 1]);
        assert!(nw_check(&k4, 1, &bad).is_err());
    }

    #[test]
    fn sigma_values() {
        assert_eq!(brute_sigma(&Graph::complete(4)), Ok(2));
        assert_eq!(brute_sigma(&Graph::path(6)), Ok(1));
        assert_eq!(brute_sigma(&Graph::star(5)), Ok(1));
        let two = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(brute_sigma(&two), Ok(0));
        for n in 2..=8 {
            assert_eq!(brute_sigma(&Graph::complete(n)), Ok(n / 2), "K{n}");
        }
        assert!(brute_sigma(&Graph::empty(1)).is_err());
    }

    #[test]
    fn eta_values() {
        assert_eq!(brute_eta(&Graph::cycle(5)), Ok(Rational::new(5, 4)));
        assert_eq!(brute_eta(&Graph::path(5)), Ok(Rational::new(1, 1)));
        assert_eq!(brute_eta(&Graph::complete(4)), Ok(Rational::new(2, 1)));
        assert_eq!(brute_eta(&Graph::empty(3)), Err(OracleError::Disconnected));
        assert!(brute_eta(&Graph::complete(11)).is_err());
    }

    #[test]
    fn eta_matches_edge_subset_definition() {
        // direct 2^m enumeration of removed edge sets on a few small graphs
        let graphs = [Graph::cycle(5), Graph::complete(4), Graph::path(4), {
            Graph::new(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap()
        }];
        for g in graphs {
            let m = g.edge_count();
            let mut best: Option<Rational> = None;
            for mask in 1u32..(1 << m) {
                let kept: Vec<_> = (0..m).filter(|i| mask & (1 << i) == 0).map(|i| g.edges()[i]).collect();
                let h = Graph::new(g.vertex_count(), kept.iter().map(|e| (e.u, e.v))).unwrap();
                let w = h.connected_components().len();
                if w >= 2 {
                    let r = Rational::new(mask.count_ones() as u64, (w - 1) as u64);
                    if best.is_none_or(|b| r < b) {
                        best = Some(r);
                    }
                }
            }
            assert_eq!(brute_eta(&g).unwrap(), best.unwrap());
        }
    }

    #[test]
    fn rational_ordering() {
        assert!(Rational::new(5, 4) < Rational::new(4, 3));
        assert_eq!(Rational::new(6, 4), Rational::new(3, 2));
        assert_eq!(Rational::new(5, 4).floor(), 1);
        assert_eq!(Rational::new(0, 7).denom(), 1);
    }

    #[test]
    fn violation_search() {
        assert_eq!(find_violation(&Graph::complete(4), 2), Ok(None));
        let v = find_violation(&Graph::complete(4), 3).unwrap().unwrap();
        assert_eq!(nw_check(&Graph::complete(4), 3, &v), Ok(false));
    }
}
