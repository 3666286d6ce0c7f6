//! Monte Carlo campaigns over `G(n, p)` samples and random graph processes.
//!
//! A campaign is a grid of cells (one per `n` and `p` value, or `n` and `k`
//! for hitting times). Every trial is a pure function of a seed derived from
//! the master seed and the trial's coordinates, so trials may run in any
//! order on any thread. Records are emitted cell by cell in
//! `(n, p index, trial)` order and summaries are always recomputed from them.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::packing::{self, PackingError};
use crate::random::{self, RandomError, Seed, SplitMix64};
use crate::stats::{self, SetFamily, StatsError};

/// z-value of the 95% normal-approximation interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },
    #[error("p rule `{rule}` gives p = {p} for n = {n}, outside (0, 1]")]
    InfeasibleP { rule: String, n: usize, p: f64 },
    #[error("k = {k} exceeds n/2 = {} for n = {n}; the packing never reaches k", n / 2)]
    UnreachableK { k: usize, n: usize },
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Random(#[from] RandomError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Equality,
    Dense,
    Hitting,
    Structure,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Equality => "equality",
            ExperimentKind::Dense => "dense",
            ExperimentKind::Hitting => "hitting",
            ExperimentKind::Structure => "structure",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equality" => Ok(ExperimentKind::Equality),
            "dense" => Ok(ExperimentKind::Dense),
            "hitting" => Ok(ExperimentKind::Hitting),
            "structure" => Ok(ExperimentKind::Structure),
            other => Err(ExperimentError::Config(format!("unknown experiment `{other}`"))),
        }
    }
}

/// How edge probabilities are chosen for each `n`.
#[derive(Clone, Debug, PartialEq)]
pub enum PRule {
    /// `points` values evenly spaced between `(log n + log log n)/n` and `1.1 log n/n`
    Th1 {
        points: usize,
    },
    /// `min(1, 51 log n/n)`
    Th2,
    /// `c · log n/n`
    LogScaled(f64),
    Explicit(Vec<f64>),
}

impl PRule {
    pub fn values(&self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        let ln = nf.ln();
        match self {
            PRule::Th1 { points } => {
                let a = (ln + ln.ln()) / nf;
                let b = 1.1 * ln / nf;
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                match points {
                    0 => Vec::new(),
                    1 => vec![hi],
                    &k => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
                }
            }
            PRule::Th2 => vec![(51.0 * ln / nf).min(1.0)],
            PRule::LogScaled(c) => vec![c * ln / nf],
            PRule::Explicit(ps) => ps.clone(),
        }
    }

    fn checked_values(&self, n: usize) -> Result<Vec<f64>> {
        let ps = self.values(n);
        if ps.is_empty() {
            return Err(ExperimentError::Config(format!("p rule `{self}` yields no values")));
        }
        for &p in &ps {
            if !(p > 0.0 && p <= 1.0) {
                return Err(ExperimentError::InfeasibleP { rule: self.to_string(), n, p });
            }
        }
        Ok(ps)
    }
}

impl fmt::Display for PRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PRule::Th1 { points } => write!(f, "th1:{points}"),
            PRule::Th2 => write!(f, "th2"),
            PRule::LogScaled(c) => write!(f, "logn:{c}"),
            PRule::Explicit(ps) => {
                let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                f.write_str(&s.join(","))
            }
        }
    }
}

impl FromStr for PRule {
    type Err = ExperimentError;

    /// `th1`, `th1:<points>`, `th2`, `logn:<c>`, or a comma-separated list of probabilities.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || ExperimentError::Config(format!("cannot parse p rule `{s}`"));
        if s == "th1" {
            return Ok(PRule::Th1 { points: 3 });
        }
        if let Some(k) = s.strip_prefix("th1:") {
            return Ok(PRule::Th1 { points: k.parse().map_err(|_| bad())? });
        }
        if s == "th2" {
            return Ok(PRule::Th2);
        }
        if let Some(c) = s.strip_prefix("logn:") {
            return Ok(PRule::LogScaled(c.parse().map_err(|_| bad())?));
        }
        let ps: std::result::Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
        Ok(PRule::Explicit(ps.map_err(|_| bad())?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub ns: Vec<usize>,
    pub p_rule: PRule,
    pub trials: usize,
    pub seed: Seed,
    /// hitting experiment only
    pub ks: Vec<usize>,
    pub out: Option<PathBuf>,
    pub sequential: bool,
    /// largest set size in the small-set expansion checks
    pub expansion_max_size: usize,
    /// sampled sets per size for small-set expansion
    pub expansion_budget: usize,
    /// sampled sets per size in the mid-size window
    pub mid_budget: usize,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            ns: Vec::new(),
            p_rule: match kind {
                ExperimentKind::Dense => PRule::Th2,
                _ => PRule::Th1 { points: 3 },
            },
            trials: 100,
            seed: Seed(0),
            ks: vec![1, 2, 3],
            out: None,
            sequential: false,
            expansion_max_size: 16,
            expansion_budget: stats::DEFAULT_BUDGET,
            mid_budget: 4,
        }
    }

    /// Parses flat `key = value` text. `#` starts a comment. Recognised keys:
    /// `experiment`, `n`, `p`, `trials`, `seed`, `k`, `out`, `sequential`,
    /// `expansion_max_size`, `expansion_budget`, `mid_budget`.
    pub fn parse(text: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut file_kind = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ExperimentError::ConfigSyntax { line: i + 1, message: "expected key = value".into() })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "experiment" {
                file_kind = Some(value.parse::<ExperimentKind>()?);
            } else {
                pairs.push((i + 1, key.to_owned(), value.to_owned()));
            }
        }
        let kind = kind.or(file_kind).ok_or_else(|| ExperimentError::Config("experiment kind not given".into()))?;
        let mut cfg = ExperimentConfig::new(kind);
        for (line, key, value) in pairs {
            cfg.set(&key, &value).map_err(|e| ExperimentError::ConfigSyntax { line, message: e.to_string() })?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let int = |v: &str| -> Result<usize> {
            v.parse().map_err(|_| ExperimentError::Config(format!("`{key}` expects an integer, got `{v}`")))
        };
        let list = |v: &str| -> Result<Vec<usize>> { v.split(',').map(|x| int(x.trim())).collect() };
        match key {
            "n" => self.ns = list(value)?,
            "p" => self.p_rule = value.parse()?,
            "trials" => self.trials = int(value)?,
            "seed" => {
                self.seed = Seed(value.parse().map_err(|_| ExperimentError::Config(format!("bad seed `{value}`")))?)
            }
            "k" => self.ks = list(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "sequential" => {
                self.sequential = value
                    .parse()
                    .map_err(|_| ExperimentError::Config(format!("`sequential` expects true/false, got `{value}`")))?
            }
            "expansion_max_size" => self.expansion_max_size = int(value)?,
            "expansion_budget" => self.expansion_budget = int(value)?,
            "mid_budget" => self.mid_budget = int(value)?,
            other => return Err(ExperimentError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(ExperimentError::Config("no n values".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 4) {
            return Err(ExperimentError::Config(format!("n = {n} is below the minimum of 4")));
        }
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        if self.kind == ExperimentKind::Hitting {
            if self.ks.is_empty() || self.ks.contains(&0) {
                return Err(ExperimentError::Config("k list must be nonempty and positive".into()));
            }
            for &n in &self.ns {
                if let Some(&k) = self.ks.iter().find(|&&k| k > n / 2) {
                    return Err(ExperimentError::UnreachableK { k, n });
                }
            }
        } else {
            for &n in &self.ns {
                self.p_rule.checked_values(n)?;
            }
        }
        if self.kind == ExperimentKind::Structure && self.expansion_max_size == 0 {
            return Err(ExperimentError::Config("expansion_max_size must be positive".into()));
        }
        Ok(())
    }
}

/// Seed of one trial: the first 8 bytes (big-endian) of SHA-256 over
/// `master: u64 BE | len(id): u8 | id: UTF-8 | n: u64 BE | p_index: u32 BE | trial: u64 BE`.
pub fn derive_trial_seed(master: Seed, experiment: &str, n: u64, p_index: u32, trial: u64) -> Seed {
    let id = experiment.as_bytes();
    assert!(id.len() <= u8::MAX as usize, "experiment id too long");
    let mut h = Sha256::new();
    h.update(master.0.to_be_bytes());
    h.update([id.len() as u8]);
    h.update(id);
    h.update(n.to_be_bytes());
    h.update(p_index.to_be_bytes());
    h.update(trial.to_be_bytes());
    let digest = h.finalize();
    Seed(u64::from_be_bytes(digest[..8].try_into().unwrap()))
}

/// Half-width of the 95% normal-approximation interval for a proportion.
pub fn ci_halfwidth(fraction: f64, trials: usize) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    Z95 * (fraction * (1.0 - fraction) / trials as f64).sqrt()
}

/// One `G(n, p)` sample in the equality or dense campaign.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub p_index: usize,
    pub p: f64,
    pub trial: u64,
    pub seed: u64,
    pub edges: usize,
    pub delta: usize,
    pub sigma: usize,
    pub equal: bool,
    pub strict: bool,
    pub catlin: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub p_index: usize,
    pub p: f64,
    pub trials: usize,
    pub frac_equal: f64,
    pub frac_strict: f64,
    pub frac_catlin: f64,
    pub mean_delta: f64,
    pub mean_sigma: f64,
    pub ci_equal: f64,
    pub ci_strict: f64,
    pub ci_catlin: f64,
}

/// One random graph process in the hitting campaign.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct HittingRecord {
    pub n: usize,
    pub k: usize,
    pub trial: u64,
    pub seed: u64,
    pub tau_delta: Option<usize>,
    pub tau_sigma: Option<usize>,
    pub equal: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct HittingSummary {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub frac_equal: f64,
    pub ci_equal: f64,
    pub mean_tau_delta: f64,
    pub mean_tau_sigma: f64,
}

/// Structural measurements on one `G(n, p)` sample.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct StructureRecord {
    pub n: usize,
    pub p_index: usize,
    pub p: f64,
    pub trial: u64,
    pub seed: u64,
    pub delta: usize,
    /// δ <= log n / 30
    pub delta_small: bool,
    pub small_count: usize,
    /// |SMALL| <= sqrt n
    pub small_count_ok: bool,
    pub separated: bool,
    /// sampled or exhaustive minimum of |E(S,S̄)|/|S| over LARGE-only sets up to the size cap
    pub large_min_ratio: f64,
    /// `large_min_ratio > log n / 10`
    pub large_ok: bool,
    /// sampled minimum over sizes n/(log n)^3 ..= n/2
    pub mid_min_ratio: f64,
    /// `mid_min_ratio >= log n / 10`
    pub mid_ok: bool,
    /// minimum over all sets of size <= max(1, n/(log n)^3), capped
    pub small_set_min_ratio: f64,
    /// `small_set_min_ratio >= δ`
    pub small_set_ok: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct StructureSummary {
    pub n: usize,
    pub p_index: usize,
    pub p: f64,
    pub trials: usize,
    pub freq_delta_small: f64,
    pub freq_small_count: f64,
    pub freq_separated: f64,
    pub freq_large_expansion: f64,
    pub freq_mid_expansion: f64,
    pub freq_small_set_expansion: f64,
    pub ci_delta_small: f64,
    pub ci_small_count: f64,
    pub ci_separated: f64,
    pub ci_large_expansion: f64,
    pub ci_mid_expansion: f64,
    pub ci_small_set_expansion: f64,
}

/// Records of a campaign plus the summary recomputed from them.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<R, S> {
    pub records: Vec<R>,
    pub summary: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CampaignReport {
    Packing(Outcome<TrialRecord, SummaryRow>),
    Hitting(Outcome<HittingRecord, HittingSummary>),
    Structure(Outcome<StructureRecord, StructureSummary>),
}

/// One grid cell. Hitting campaigns set `k` and leave `p` at 0.
#[derive(Clone, Copy, Debug)]
struct Cell {
    n: usize,
    index: usize,
    p: f64,
    k: usize,
}

trait Timed {
    fn elapsed(&self) -> Duration;
}

impl Timed for TrialRecord {
    fn elapsed(&self) -> Duration {
        self.elapsed
    }
}
impl Timed for HittingRecord {
    fn elapsed(&self) -> Duration {
        self.elapsed
    }
}
impl Timed for StructureRecord {
    fn elapsed(&self) -> Duration {
        self.elapsed
    }
}

/// Incremental record output: `records.csv` plus `timings.csv`.
struct RecordSink {
    records: csv::Writer<BufWriter<File>>,
    timings: BufWriter<File>,
}

impl RecordSink {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let records = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("records.csv"))?));
        let mut timings = BufWriter::new(File::create(dir.join("timings.csv"))?);
        writeln!(timings, "row,elapsed_us")?;
        Ok(RecordSink { records, timings })
    }
}

fn run_cells<R, F>(
    cells: &[Cell],
    cfg: &ExperimentConfig,
    mut sink: Option<&mut RecordSink>,
    trial: F,
) -> Result<Vec<R>>
where
    R: Serialize + Send + Timed,
    F: Fn(&Cell, u64) -> Result<R> + Sync,
{
    let mut all = Vec::new();
    let mut row = 0usize;
    for cell in cells {
        let batch: Vec<R> = if cfg.sequential {
            (0..cfg.trials as u64).map(|t| trial(cell, t)).collect::<Result<_>>()?
        } else {
            (0..cfg.trials as u64).into_par_iter().map(|t| trial(cell, t)).collect::<Result<_>>()?
        };
        if let Some(sink) = sink.as_deref_mut() {
            for r in &batch {
                sink.records.serialize(r)?;
                writeln!(sink.timings, "{row},{}", r.elapsed().as_micros())?;
                row += 1;
            }
            sink.records.flush()?;
            sink.timings.flush()?;
        }
        all.extend(batch);
    }
    Ok(all)
}

fn graph_cells(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for &n in &cfg.ns {
        for (index, p) in cfg.p_rule.checked_values(n)?.into_iter().enumerate() {
            cells.push(Cell { n, index, p, k: 0 });
        }
    }
    Ok(cells)
}

fn packing_trial(kind: ExperimentKind, master: Seed, cell: &Cell, trial: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = derive_trial_seed(master, kind.as_str(), cell.n as u64, cell.index as u32, trial);
    let g = random::sample_gnp(cell.n, cell.p, seed)?;
    let delta = g.min_degree().map_err(PackingError::from)?;
    let sigma = packing::max_packing(&g)?.sigma;
    assert!(sigma <= delta, "σ > δ on seed {}", seed.0);
    Ok(TrialRecord {
        n: cell.n,
        p_index: cell.index,
        p: cell.p,
        trial,
        seed: seed.0,
        edges: g.edge_count(),
        delta,
        sigma,
        equal: sigma == delta,
        strict: sigma < delta,
        catlin: sigma == g.edge_count() / (cell.n - 1),
        elapsed: start.elapsed(),
    })
}

fn fraction<R>(rs: &[&R], f: impl Fn(&R) -> bool) -> f64 {
    rs.iter().filter(|r| f(r)).count() as f64 / rs.len() as f64
}

fn mean<R>(rs: &[&R], f: impl Fn(&R) -> f64) -> f64 {
    rs.iter().map(|r| f(r)).sum::<f64>() / rs.len() as f64
}

/// Consecutive records sharing a key, in order of first appearance.
fn groups<R, K: PartialEq>(records: &[R], key: impl Fn(&R) -> K) -> Vec<Vec<&R>> {
    let mut out: Vec<Vec<&R>> = Vec::new();
    for r in records {
        match out.last_mut() {
            Some(g) if key(g[0]) == key(r) => g.push(r),
            _ => out.push(vec![r]),
        }
    }
    out
}

pub fn summarize_trials(records: &[TrialRecord]) -> Vec<SummaryRow> {
    groups(records, |r| (r.n, r.p_index))
        .into_iter()
        .map(|g| {
            let t = g.len();
            let (fe, fs, fc) = (fraction(&g, |r| r.equal), fraction(&g, |r| r.strict), fraction(&g, |r| r.catlin));
            SummaryRow {
                n: g[0].n,
                p_index: g[0].p_index,
                p: g[0].p,
                trials: t,
                frac_equal: fe,
                frac_strict: fs,
                frac_catlin: fc,
                mean_delta: mean(&g, |r| r.delta as f64),
                mean_sigma: mean(&g, |r| r.sigma as f64),
                ci_equal: ci_halfwidth(fe, t),
                ci_strict: ci_halfwidth(fs, t),
                ci_catlin: ci_halfwidth(fc, t),
            }
        })
        .collect()
}

pub fn summarize_hitting(records: &[HittingRecord]) -> Vec<HittingSummary> {
    groups(records, |r| (r.n, r.k))
        .into_iter()
        .map(|g| {
            let fe = fraction(&g, |r| r.equal);
            HittingSummary {
                n: g[0].n,
                k: g[0].k,
                trials: g.len(),
                frac_equal: fe,
                ci_equal: ci_halfwidth(fe, g.len()),
                mean_tau_delta: mean(&g, |r| r.tau_delta.map_or(f64::NAN, |t| t as f64)),
                mean_tau_sigma: mean(&g, |r| r.tau_sigma.map_or(f64::NAN, |t| t as f64)),
            }
        })
        .collect()
}

pub fn summarize_structure(records: &[StructureRecord]) -> Vec<StructureSummary> {
    groups(records, |r| (r.n, r.p_index))
        .into_iter()
        .map(|g| {
            let t = g.len();
            let f = [
                fraction(&g, |r| r.delta_small),
                fraction(&g, |r| r.small_count_ok),
                fraction(&g, |r| r.separated),
                fraction(&g, |r| r.large_ok),
                fraction(&g, |r| r.mid_ok),
                fraction(&g, |r| r.small_set_ok),
            ];
            StructureSummary {
                n: g[0].n,
                p_index: g[0].p_index,
                p: g[0].p,
                trials: t,
                freq_delta_small: f[0],
                freq_small_count: f[1],
                freq_separated: f[2],
                freq_large_expansion: f[3],
                freq_mid_expansion: f[4],
                freq_small_set_expansion: f[5],
                ci_delta_small: ci_halfwidth(f[0], t),
                ci_small_count: ci_halfwidth(f[1], t),
                ci_separated: ci_halfwidth(f[2], t),
                ci_large_expansion: ci_halfwidth(f[3], t),
                ci_mid_expansion: ci_halfwidth(f[4], t),
                ci_small_set_expansion: ci_halfwidth(f[5], t),
            }
        })
        .collect()
}

fn run_packing_campaign(
    kind: ExperimentKind,
    cfg: &ExperimentConfig,
    sink: Option<&mut RecordSink>,
) -> Result<Outcome<TrialRecord, SummaryRow>> {
    cfg.validate()?;
    let cells = graph_cells(cfg)?;
    let records = run_cells(&cells, cfg, sink, |c, t| packing_trial(kind, cfg.seed, c, t))?;
    let summary = summarize_trials(&records);
    Ok(Outcome { records, summary })
}

/// Fraction of samples with σ = δ per `(n, p)` cell.
pub fn run_equality_experiment(cfg: &ExperimentConfig) -> Result<Outcome<TrialRecord, SummaryRow>> {
    run_packing_campaign(ExperimentKind::Equality, cfg, None)
}

/// Fractions of samples with σ < δ and with σ = ⌊|E|/(n-1)⌋ per cell.
pub fn run_dense_experiment(cfg: &ExperimentConfig) -> Result<Outcome<TrialRecord, SummaryRow>> {
    run_packing_campaign(ExperimentKind::Dense, cfg, None)
}

fn hitting_trial(master: Seed, cell: &Cell, trial: u64) -> Result<HittingRecord> {
    let start = Instant::now();
    let seed = derive_trial_seed(master, "hitting", cell.n as u64, cell.index as u32, trial);
    let perm = random::sample_process(cell.n, seed)?;
    let tau_delta = random::hitting_time_min_degree(&perm, cell.k);
    let tau_sigma = random::hitting_time_packing(&perm, cell.k)?;
    if let (Some(d), Some(s)) = (tau_delta, tau_sigma) {
        assert!(s >= d, "τ_σ < τ_δ on seed {}", seed.0);
    }
    Ok(HittingRecord {
        n: cell.n,
        k: cell.k,
        trial,
        seed: seed.0,
        tau_delta,
        tau_sigma,
        equal: tau_delta == tau_sigma,
        elapsed: start.elapsed(),
    })
}

fn run_hitting(
    cfg: &ExperimentConfig,
    sink: Option<&mut RecordSink>,
) -> Result<Outcome<HittingRecord, HittingSummary>> {
    cfg.validate()?;
    let cells: Vec<Cell> = cfg
        .ns
        .iter()
        .flat_map(|&n| cfg.ks.iter().enumerate().map(move |(index, &k)| Cell { n, index, p: 0.0, k }))
        .collect();
    let records = run_cells(&cells, cfg, sink, |c, t| hitting_trial(cfg.seed, c, t))?;
    let summary = summarize_hitting(&records);
    Ok(Outcome { records, summary })
}

/// Fraction of processes where the k-tree hitting time equals the min-degree-k hitting time.
pub fn run_hitting_experiment(cfg: &ExperimentConfig) -> Result<Outcome<HittingRecord, HittingSummary>> {
    run_hitting(cfg, None)
}

fn structure_trial(cfg: &ExperimentConfig, cell: &Cell, trial: u64) -> Result<StructureRecord> {
    let start = Instant::now();
    let seed = derive_trial_seed(cfg.seed, "structure", cell.n as u64, cell.index as u32, trial);
    let g = random::sample_gnp(cell.n, cell.p, seed)?;
    let n = cell.n;
    let ln = (n as f64).ln();
    let delta = g.min_degree().map_err(StatsError::from)?;
    let (small_count_ok, small_count) = stats::small_count_check(&g)?;
    let separated = stats::check_small_separation(&g)?.is_none();

    let mut sub = SplitMix64::new(seed);
    let half = n / 2;
    let large = stats::min_expansion_ratio(
        &g,
        SetFamily::large_up_to(cfg.expansion_max_size.min(half)),
        Some(cfg.expansion_budget),
        Seed(sub.next_u64()),
    )?;
    let mid_lo = ((n as f64 / ln.powi(3)).ceil() as usize).clamp(1, half);
    let mid = stats::min_expansion_ratio(
        &g,
        SetFamily { min_size: mid_lo, max_size: half, large_only: false },
        Some(cfg.mid_budget),
        Seed(sub.next_u64()),
    )?;
    let small_hi = ((n as f64 / ln.powi(3)).floor() as usize).max(1).min(cfg.expansion_max_size).min(half);
    let small_sets =
        stats::min_expansion_ratio(&g, SetFamily::up_to(small_hi), Some(cfg.expansion_budget), Seed(sub.next_u64()))?;

    Ok(StructureRecord {
        n,
        p_index: cell.index,
        p: cell.p,
        trial,
        seed: seed.0,
        delta,
        delta_small: delta as f64 <= ln / 30.0,
        small_count,
        small_count_ok,
        separated,
        large_min_ratio: large.min_ratio,
        large_ok: large.min_ratio > ln / 10.0,
        mid_min_ratio: mid.min_ratio,
        mid_ok: mid.min_ratio >= ln / 10.0,
        small_set_min_ratio: small_sets.min_ratio,
        small_set_ok: small_sets.min_ratio >= delta as f64,
        elapsed: start.elapsed(),
    })
}

fn run_structure(
    cfg: &ExperimentConfig,
    sink: Option<&mut RecordSink>,
) -> Result<Outcome<StructureRecord, StructureSummary>> {
    cfg.validate()?;
    let cells = graph_cells(cfg)?;
    let records = run_cells(&cells, cfg, sink, |c, t| structure_trial(cfg, c, t))?;
    let summary = summarize_structure(&records);
    Ok(Outcome { records, summary })
}

/// Frequencies of the small-vertex and expansion properties per cell.
pub fn run_structure_experiment(cfg: &ExperimentConfig) -> Result<Outcome<StructureRecord, StructureSummary>> {
    run_structure(cfg, None)
}

/// Runs the configured campaign. With `cfg.out` set, writes `records.csv`
/// (flushed per cell), `timings.csv`, `summary.csv`, `summary.json` and
/// `plot.svg` into that directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let mut sink = match &cfg.out {
        Some(dir) => Some(RecordSink::create(dir)?),
        None => None,
    };
    let report = match cfg.kind {
        ExperimentKind::Equality | ExperimentKind::Dense => {
            CampaignReport::Packing(run_packing_campaign(cfg.kind, cfg, sink.as_mut())?)
        }
        ExperimentKind::Hitting => CampaignReport::Hitting(run_hitting(cfg, sink.as_mut())?),
        ExperimentKind::Structure => CampaignReport::Structure(run_structure(cfg, sink.as_mut())?),
    };
    if let Some(dir) = &cfg.out {
        let (series, title) = plot_series(cfg.kind, &report);
        match &report {
            CampaignReport::Packing(o) => write_summary(dir, &o.summary)?,
            CampaignReport::Hitting(o) => write_summary(dir, &o.summary)?,
            CampaignReport::Structure(o) => write_summary(dir, &o.summary)?,
        }
        fs::write(dir.join("plot.svg"), svg_plot(&title, &series))?;
    }
    Ok(report)
}

fn write_summary<S: Serialize>(dir: &Path, rows: &[S]) -> Result<()> {
    emit_csv(rows, &dir.join("summary.csv"))?;
    emit_json(rows, &dir.join("summary.json"))
}

/// CSV with a header derived from the field names, also for an empty slice.
pub fn emit_csv<S: Serialize>(rows: &[S], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    if rows.is_empty() {
        if let Some(header) = header_for::<S>() {
            w.write_record(header)?;
        }
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn header_for<S>() -> Option<&'static [&'static str]> {
    let name = std::any::type_name::<S>();
    let h: &'static [&'static str] = if name.ends_with("::TrialRecord") {
        &["n", "p_index", "p", "trial", "seed", "edges", "delta", "sigma", "equal", "strict", "catlin"]
    } else if name.ends_with("::SummaryRow") {
        &[
            "n",
            "p_index",
            "p",
            "trials",
            "frac_equal",
            "frac_strict",
            "frac_catlin",
            "mean_delta",
            "mean_sigma",
            "ci_equal",
            "ci_strict",
            "ci_catlin",
        ]
    } else if name.ends_with("::HittingRecord") {
        &["n", "k", "trial", "seed", "tau_delta", "tau_sigma", "equal"]
    } else if name.ends_with("::HittingSummary") {
        &["n", "k", "trials", "frac_equal", "ci_equal", "mean_tau_delta", "mean_tau_sigma"]
    } else if name.ends_with("::StructureSummary") {
        &[
            "n",
            "p_index",
            "p",
            "trials",
            "freq_delta_small",
            "freq_small_count",
            "freq_separated",
            "freq_large_expansion",
            "freq_mid_expansion",
            "freq_small_set_expansion",
            "ci_delta_small",
            "ci_small_count",
            "ci_separated",
            "ci_large_expansion",
            "ci_mid_expansion",
            "ci_small_set_expansion",
        ]
    } else {
        return None;
    };
    Some(h)
}

/// Pretty-printed JSON array of objects with the CSV field names.
pub fn emit_json<S: Serialize>(rows: &[S], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// A named polyline of `(n, fraction)` points.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn plot_series(kind: ExperimentKind, report: &CampaignReport) -> (Vec<Series>, String) {
    fn collect<S>(rows: &[S], key: impl Fn(&S) -> (usize, String), point: impl Fn(&S) -> (f64, f64)) -> Vec<Series> {
        let mut out: Vec<(usize, Series)> = Vec::new();
        for r in rows {
            let (idx, label) = key(r);
            match out.iter_mut().find(|(i, _)| *i == idx) {
                Some((_, s)) => s.points.push(point(r)),
                None => out.push((idx, Series { label, points: vec![point(r)] })),
            }
        }
        out.into_iter().map(|(_, s)| s).collect()
    }
    match report {
        CampaignReport::Packing(o) => {
            let strict = kind == ExperimentKind::Dense;
            let series = collect(
                &o.summary,
                |r| (r.p_index, format!("p #{}", r.p_index)),
                |r| (r.n as f64, if strict { r.frac_strict } else { r.frac_equal }),
            );
            let title = if strict { "fraction with sigma < delta" } else { "fraction with sigma = delta" };
            (series, title.to_string())
        }
        CampaignReport::Hitting(o) => (
            collect(&o.summary, |r| (r.k, format!("k = {}", r.k)), |r| (r.n as f64, r.frac_equal)),
            "fraction with equal hitting times".to_string(),
        ),
        CampaignReport::Structure(o) => (
            collect(&o.summary, |r| (r.p_index, format!("p #{}", r.p_index)), |r| (r.n as f64, r.freq_separated)),
            "fraction with separated small vertices".to_string(),
        ),
    }
}

/// Standalone SVG line chart of fraction (y, in `[0, 1]`) against n (x).
pub fn svg_plot(title: &str, series: &[Series]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const L: f64 = 60.0;
    const R: f64 = 150.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (mut xmin, mut xmax) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !xmin.is_finite() {
        (xmin, xmax) = (0.0, 1.0);
    }
    if xmax <= xmin {
        xmax = xmin + 1.0;
    }
    let px = |x: f64| L + (x - xmin) / (xmax - xmin) * (W - L - R);
    let py = |y: f64| H - B - y.clamp(0.0, 1.0) * (H - T - B);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    s.push_str(&format!("<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        (W - R + L) / 2.0,
        xml_escape(title)
    ));
    // axes
    s.push_str(&format!("<line x1=\"{L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", H - B, W - R, H - B));
    s.push_str(&format!("<line x1=\"{L}\" y1=\"{T}\" x2=\"{L}\" y2=\"{}\" stroke=\"black\"/>\n", H - B));
    for i in 0..=4 {
        let y = i as f64 / 4.0;
        s.push_str(&format!("<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{y:.2}</text>\n", L - 6.0, py(y) + 4.0));
    }
    let mut ticks: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for x in ticks {
        s.push_str(&format!("<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{x}</text>\n", px(x), H - B + 16.0));
    }
    s.push_str(&format!("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">n</text>\n", (W - R + L) / 2.0, H - 12.0));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">fraction</text>\n",
        (H - B + T) / 2.0,
        (H - B + T) / 2.0
    ));
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        let ly = T + 16.0 * i as f64;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{ly}\" fill=\"{color}\">{}</text>\n",
            W - R + 12.0,
            xml_escape(&ser.label)
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Convenience for callers holding a finished summary.
pub fn emit_svg_plot(title: &str, series: &[Series], path: &Path) -> Result<()> {
    fs::write(path, svg_plot(title, series))?;
    Ok(())
}

/// Summary series for an equality or dense campaign, one polyline per p index.
pub fn packing_series(rows: &[SummaryRow], strict: bool) -> Vec<Series> {
    plot_series(
        if strict { ExperimentKind::Dense } else { ExperimentKind::Equality },
        &CampaignReport::Packing(Outcome { records: Vec::new(), summary: rows.to_vec() }),
    )
    .0
}
