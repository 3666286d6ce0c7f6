//! Structural measurements on sampled graphs: small/large vertex split,
//! separation of small vertices, edge expansion minima, degree windows and
//! Chernoff tail bounds.

use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};
use crate::packing::{self, PackingError};
use crate::random::{Seed, SplitMix64};

/// Above this many candidate sets the expansion search switches to sampling.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
/// Sets drawn per size when sampling and no budget is given.
pub const DEFAULT_BUDGET: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("set sizes {min}..={max} invalid for a graph on {n} vertices")]
    SizeRange { min: usize, max: usize, n: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Packing(#[from] PackingError),
}

/// `log n / 6` with the natural logarithm.
pub fn small_threshold(n: usize) -> f64 {
    (n as f64).ln() / 6.0
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SmallLargeSplit {
    pub threshold: f64,
    pub small: Vec<Vertex>,
    pub large: Vec<Vertex>,
}

/// Small vertices have degree `<= log n / 6`, all others are large.
pub fn classify_small_large(g: &Graph) -> Result<SmallLargeSplit, StatsError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(StatsError::TooFewVertices(n));
    }
    let threshold = small_threshold(n);
    let (small, large) = (0..n as Vertex).partition(|&v| g.degree(v) as f64 <= threshold);
    Ok(SmallLargeSplit { threshold, small, large })
}

/// Two small vertices that are adjacent (`via == None`) or share the neighbour `via`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SeparationWitness {
    pub a: Vertex,
    pub b: Vertex,
    pub via: Option<Vertex>,
}

/// `Ok(None)` when small vertices are pairwise non-adjacent and share no neighbour.
pub fn check_small_separation(g: &Graph) -> Result<Option<SeparationWitness>, StatsError> {
    let split = classify_small_large(g)?;
    let mut is_small = vec![false; g.vertex_count()];
    for &v in &split.small {
        is_small[v as usize] = true;
    }
    for &a in &split.small {
        if let Some(&b) = g.neighbors(a).iter().filter(|&&b| is_small[b as usize]).min() {
            return Ok(Some(SeparationWitness { a: a.min(b), b: a.max(b), via: None }));
        }
    }
    for w in 0..g.vertex_count() as Vertex {
        let mut smalls = g.neighbors(w).iter().copied().filter(|&x| is_small[x as usize]);
        if let (Some(x), Some(y)) = (smalls.next(), smalls.next()) {
            return Ok(Some(SeparationWitness { a: x.min(y), b: x.max(y), via: Some(w) }));
        }
    }
    Ok(None)
}

/// `(|SMALL| <= sqrt n, |SMALL|)`.
pub fn small_count_check(g: &Graph) -> Result<(bool, usize), StatsError> {
    let count = classify_small_large(g)?.small.len();
    Ok(((count as f64) <= (g.vertex_count() as f64).sqrt(), count))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SetFamily {
    pub min_size: usize,
    pub max_size: usize,
    /// restrict members to LARGE vertices
    pub large_only: bool,
}

impl SetFamily {
    pub fn up_to(max_size: usize) -> Self {
        SetFamily { min_size: 1, max_size, large_only: false }
    }

    pub fn large_up_to(max_size: usize) -> Self {
        SetFamily { min_size: 1, max_size, large_only: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ExpansionReport {
    pub family: SetFamily,
    /// `|E(S, S̄)| / |S|` minimised over the examined sets; infinite when none were examined
    pub min_ratio: f64,
    pub argmin: Vec<Vertex>,
    pub boundary: usize,
    pub mode: SearchMode,
    pub sets_examined: u64,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

struct Best {
    boundary: usize,
    size: usize,
    set: Vec<Vertex>,
}

impl Best {
    fn offer(&mut self, boundary: usize, set: &[Vertex]) {
        if self.set.is_empty() || boundary * self.size < self.boundary * set.len() {
            self.boundary = boundary;
            self.size = set.len();
            self.set = set.to_vec();
        }
    }
}

/// Minimum of `|E(S, S̄)| / |S|` over the sets of `family`.
///
/// Exhaustive when the family has at most [`EXHAUSTIVE_LIMIT`] members,
/// otherwise `budget` uniform sets per size drawn with `seed`.
pub fn min_expansion_ratio(
    g: &Graph,
    family: SetFamily,
    budget: Option<usize>,
    seed: Seed,
) -> Result<ExpansionReport, StatsError> {
    let n = g.vertex_count();
    if family.min_size < 1 || family.min_size > family.max_size || family.max_size > n / 2 {
        return Err(StatsError::SizeRange { min: family.min_size, max: family.max_size, n });
    }
    let mut pool: Vec<Vertex> =
        if family.large_only { classify_small_large(g)?.large } else { (0..n as Vertex).collect() };
    let hi = family.max_size.min(pool.len());
    let total = (family.min_size..=hi).map(|s| binomial(pool.len() as u64, s as u64)).fold(0u64, u64::saturating_add);

    let mut best = Best { boundary: 0, size: 1, set: Vec::new() };
    let mut examined = 0u64;
    let mode = if total <= EXHAUSTIVE_LIMIT {
        let mut inside = vec![false; n];
        let mut current = Vec::with_capacity(hi);
        exhaustive(g, &pool, 0, family.min_size, hi, 0, &mut inside, &mut current, &mut best, &mut examined);
        SearchMode::Exhaustive
    } else {
        let per_size = budget.unwrap_or(DEFAULT_BUDGET);
        let mut rng = SplitMix64::new(seed);
        let mut inside = vec![false; n];
        for size in family.min_size..=hi {
            for _ in 0..per_size {
                let set = rng.sample_distinct(&mut pool, size);
                for &v in &set {
                    inside[v as usize] = true;
                }
                let b = crate::graph::boundary_size_with(g, &set, &inside);
                for &v in &set {
                    inside[v as usize] = false;
                }
                best.offer(b, &set);
                examined += 1;
            }
        }
        SearchMode::Sampled
    };
    let min_ratio = if best.set.is_empty() { f64::INFINITY } else { best.boundary as f64 / best.size as f64 };
    let mut argmin = best.set;
    argmin.sort_unstable();
    Ok(ExpansionReport { family, min_ratio, argmin, boundary: best.boundary, mode, sets_examined: examined })
}

#[allow(clippy::too_many_arguments)]
fn exhaustive(
    g: &Graph,
    pool: &[Vertex],
    start: usize,
    min: usize,
    max: usize,
    boundary: usize,
    inside: &mut [bool],
    current: &mut Vec<Vertex>,
    best: &mut Best,
    examined: &mut u64,
) {
    for i in start..pool.len() {
        let v = pool[i];
        let internal = g.neighbors(v).iter().filter(|&&w| inside[w as usize]).count();
        let b = boundary + g.degree(v) - 2 * internal;
        current.push(v);
        inside[v as usize] = true;
        if current.len() >= min {
            best.offer(b, current);
            *examined += 1;
        }
        if current.len() < max {
            exhaustive(g, pool, i + 1, min, max, b, inside, current, best, examined);
        }
        inside[v as usize] = false;
        current.pop();
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct DegreeWindow {
    pub n: usize,
    pub p: f64,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    /// Δ <= 1.5 (n-1) p
    pub max_ok: bool,
    /// δ >= 0.8 (n-1) p
    pub min_ok: bool,
    /// |E|/(n-1) <= 0.75 n p, the edge bound the Δ window implies
    pub edge_ok: bool,
}

pub fn degree_window_check(g: &Graph, p: f64) -> Result<DegreeWindow, StatsError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(StatsError::Parameter(format!("p = {p} outside (0, 1]")));
    }
    let n = g.vertex_count();
    if n < 2 {
        return Err(StatsError::TooFewVertices(n));
    }
    let min_degree = g.min_degree()?;
    let max_degree = g.max_degree()?;
    let scale = (n - 1) as f64 * p;
    let edges = g.edge_count();
    Ok(DegreeWindow {
        n,
        p,
        edges,
        min_degree,
        max_degree,
        max_ok: max_degree as f64 <= 1.5 * scale,
        min_ok: min_degree as f64 >= 0.8 * scale,
        edge_ok: edges as f64 / (n - 1) as f64 <= 0.75 * n as f64 * p,
    })
}

/// σ(G) = ⌊|E|/(n-1)⌋.
pub fn catlin_check(g: &Graph) -> Result<bool, StatsError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(StatsError::TooFewVertices(n));
    }
    Ok(packing::max_packing(g)?.sigma == g.edge_count() / (n - 1))
}

fn chernoff_args(n: u64, p: f64, a: f64) -> Result<f64, StatsError> {
    if n == 0 || !(p > 0.0 && p <= 1.0) || a.is_nan() || a <= 0.0 || !a.is_finite() {
        return Err(StatsError::Parameter(format!(
            "chernoff bound needs n >= 1, 0 < p <= 1, a > 0 (got {n}, {p}, {a})"
        )));
    }
    Ok(n as f64 * p)
}

/// Bound on `Pr(X < np - a)` for `X ~ Bin(n, p)`: `exp(-a²/(2np))`.
pub fn chernoff_lower(n: u64, p: f64, a: f64) -> Result<f64, StatsError> {
    let mu = chernoff_args(n, p, a)?;
    Ok((-a * a / (2.0 * mu)).exp())
}

/// Bound on `Pr(X > np + a)`: `exp(-a²/(2np) + a³/(2(np)²))`, capped at 1.
pub fn chernoff_upper(n: u64, p: f64, a: f64) -> Result<f64, StatsError> {
    let mu = chernoff_args(n, p, a)?;
    Ok((-a * a / (2.0 * mu) + a * a * a / (2.0 * mu * mu)).exp().min(1.0))
}

/// Upper-tail bound `exp(-a²/(4np))`, valid for `a <= np/2`.
pub fn chernoff_upper_half(n: u64, p: f64, a: f64) -> Result<f64, StatsError> {
    let mu = chernoff_args(n, p, a)?;
    if a > mu / 2.0 {
        return Err(StatsError::Parameter(format!("a = {a} exceeds np/2 = {}", mu / 2.0)));
    }
    Ok((-a * a / (4.0 * mu)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn split_examples() {
        let k4 = classify_small_large(&Graph::complete(4)).unwrap();
        assert!(k4.small.is_empty());
        assert!((k4.threshold - 4f64.ln() / 6.0).abs() < 1e-15);
        assert_eq!(classify_small_large(&Graph::empty(10)).unwrap().small.len(), 10);
        assert!(classify_small_large(&Graph::star(10)).unwrap().small.is_empty());
        assert!(classify_small_large(&Graph::empty(1)).is_err());
    }

    #[test]
    fn separation_examples() {
        assert_eq!(check_small_separation(&Graph::complete(5)), Ok(None));
        assert_eq!(check_small_separation(&Graph::path(3)), Ok(None));
        // 20 vertices, a cycle on 18 plus two isolated vertices
        let edges: Vec<(u32, u32)> = (0..18).map(|i| (i, (i + 1) % 18)).collect();
        let g = Graph::new(20, edges).unwrap();
        let split = classify_small_large(&g).unwrap();
        assert_eq!(split.small, vec![18, 19]);
        assert_eq!(check_small_separation(&g), Ok(None));
    }

    #[test]
    fn separation_witnesses() {
        // n = 30: threshold ln 30 / 6 ≈ 0.567, so only isolated vertices are small
        let mut edges: Vec<(u32, u32)> = (0..26).map(|i| (i, (i + 1) % 26)).collect();
        edges.push((26, 27));
        let g = Graph::new(30, edges).unwrap();
        assert_eq!(check_small_separation(&g), Ok(None));
        // threshold for n = 1000 is ≈ 1.15: degree-1 vertices are small
        let mut edges: Vec<(u32, u32)> = (0..998).map(|i| (i, (i + 1) % 998)).collect();
        edges.push((998, 999));
        let g = Graph::new(1000, edges.clone()).unwrap();
        assert_eq!(check_small_separation(&g), Ok(Some(SeparationWitness { a: 998, b: 999, via: None })));
        edges.pop();
        edges.push((998, 5));
        edges.push((999, 5));
        let g = Graph::new(1000, edges).unwrap();
        assert_eq!(check_small_separation(&g), Ok(Some(SeparationWitness { a: 998, b: 999, via: Some(5) })));
    }

    #[test]
    fn small_counts() {
        assert_eq!(small_count_check(&Graph::complete(4)), Ok((true, 0)));
        assert_eq!(small_count_check(&Graph::empty(9)), Ok((false, 9)));
    }

    #[test]
    fn expansion_examples() {
        let r = min_expansion_ratio(&Graph::cycle(6), SetFamily::up_to(3), None, Seed(0)).unwrap();
        assert_eq!(r.mode, SearchMode::Exhaustive);
        assert!((r.min_ratio - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.argmin, vec![0, 1, 2]);
        assert_eq!(r.sets_examined, 6 + 15 + 20);

        let r = min_expansion_ratio(&Graph::complete(4), SetFamily::up_to(2), None, Seed(0)).unwrap();
        assert_eq!(r.min_ratio, 2.0);
        assert_eq!(r.sets_examined, 10);

        let star = Graph::star(8);
        let r = min_expansion_ratio(&star, SetFamily::up_to(1), None, Seed(0)).unwrap();
        assert_eq!(r.min_ratio, 1.0);

        assert!(min_expansion_ratio(&star, SetFamily::up_to(5), None, Seed(0)).is_err());
        assert!(min_expansion_ratio(&star, SetFamily::up_to(0), None, Seed(0)).is_err());
    }

    #[test]
    fn expansion_switches_to_sampling() {
        let g = crate::random::sample_gnp(200, 0.05, Seed(4)).unwrap();
        let fam = SetFamily { min_size: 10, max_size: 12, large_only: false };
        let r = min_expansion_ratio(&g, fam, Some(5), Seed(1)).unwrap();
        assert_eq!(r.mode, SearchMode::Sampled);
        assert_eq!(r.sets_examined, 15);
        assert_eq!(g.boundary_size(&r.argmin).unwrap(), r.boundary);
        assert!(r.argmin.len() >= 10 && r.argmin.len() <= 12);
        let again = min_expansion_ratio(&g, fam, Some(5), Seed(1)).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn degree_windows() {
        let w = degree_window_check(&Graph::complete(10), 1.0).unwrap();
        assert!(w.max_ok && w.min_ok && w.edge_ok);
        let w = degree_window_check(&Graph::empty(10), 0.5).unwrap();
        assert!(!w.min_ok);
        assert!(degree_window_check(&Graph::empty(10), 0.0).is_err());
    }

    #[test]
    fn catlin_examples() {
        assert_eq!(catlin_check(&Graph::complete(4)), Ok(true));
        let two = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(catlin_check(&two), Ok(false));
    }

    #[test]
    fn chernoff_values() {
        assert_eq!(chernoff_lower(100, 0.5, 50.0).unwrap(), (-25.0f64).exp());
        assert!((chernoff_lower(100, 0.5, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!((chernoff_upper(100, 0.5, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(chernoff_upper_half(100, 0.5, 10.0).unwrap(), (-100.0f64 / 200.0).exp());
        assert!(chernoff_upper_half(100, 0.5, 26.0).is_err());
        assert!(chernoff_lower(0, 0.5, 1.0).is_err());
        assert!(chernoff_lower(10, 0.0, 1.0).is_err());
        assert!(chernoff_lower(10, 0.5, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn chernoff_in_unit_interval_and_decreasing(n in 1u64..10_000, p in 0.001f64..1.0, a in 0.001f64..500.0, da in 0.001f64..50.0) {
            let lo = chernoff_lower(n, p, a).unwrap();
            let up = chernoff_upper(n, p, a).unwrap();
            prop_assert!(lo > 0.0 || lo == 0.0 && a * a / (2.0 * n as f64 * p) > 700.0);
            prop_assert!(lo <= 1.0 && (0.0..=1.0).contains(&up));
            prop_assert!(chernoff_lower(n, p, a + da).unwrap() <= lo);
        }

        #[test]
        fn singleton_ratio_is_min_degree(n in 2usize..14, p in 0.0f64..1.0, s in any::<u64>()) {
            let g = crate::random::sample_gnp(n, p, Seed(s)).unwrap();
            let r = min_expansion_ratio(&g, SetFamily::up_to(1), None, Seed(0)).unwrap();
            prop_assert_eq!(r.min_ratio, g.min_degree().unwrap() as f64);
        }

        #[test]
        fn split_matches_threshold(n in 2usize..40, p in 0.0f64..0.3, s in any::<u64>()) {
            let g = crate::random::sample_gnp(n, p, Seed(s)).unwrap();
            let split = classify_small_large(&g).unwrap();
            prop_assert_eq!(split.small.len() + split.large.len(), n);
            for v in split.small { prop_assert!(g.degree(v) as f64 <= split.threshold); }
            for v in split.large { prop_assert!(g.degree(v) as f64 > split.threshold); }
        }
    }
}
