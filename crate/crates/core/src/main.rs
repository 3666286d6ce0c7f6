use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treepack::experiment::{self, CampaignReport, ExperimentConfig, ExperimentKind};
use treepack::io::{read_edge_list_file, write_edge_list, write_permutation, LabeledGraph};
use treepack::{oracle, packing, random, stats, Partition, Seed};

#[derive(Parser)]
#[command(name = "treepack", version, about = "Spanning tree packing and random-graph experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum number of edge-disjoint spanning trees, with the trees and a certificate partition
    Pack {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check every partition for the k-tree condition (n <= 12)
    Verify {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Sample G(n, p), or a random graph process with --process
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "process")]
        p: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        process: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree and small-vertex statistics as one JSON record
    Stats {
        graph: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Run a Monte Carlo campaign
    Experiment {
        kind: Kind,
        /// flat `key = value` file; flags override its values
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Option<Vec<usize>>,
        /// `th1[:points]`, `th2`, `logn:<c>` or a comma-separated list
        #[arg(long)]
        p: Option<String>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        k: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Equality,
    Dense,
    Hitting,
    Structure,
}

impl From<Kind> for ExperimentKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Equality => ExperimentKind::Equality,
            Kind::Dense => ExperimentKind::Dense,
            Kind::Hitting => ExperimentKind::Hitting,
            Kind::Structure => ExperimentKind::Structure,
        }
    }
}

fn load(path: &Path) -> Result<LabeledGraph> {
    read_edge_list_file(path).with_context(|| format!("reading {}", path.display()))
}

fn block_line(g: &LabeledGraph, block: &[u32]) -> String {
    block.iter().map(|&v| g.label(v)).collect::<Vec<_>>().join(" ")
}

fn label_value(g: &LabeledGraph, v: u32) -> Value {
    match g.labels {
        Some(_) => Value::String(g.label(v)),
        None => json!(v),
    }
}

fn pack(path: &Path, as_json: bool) -> Result<()> {
    let g = load(path)?;
    let result = packing::max_packing(&g.graph)?;
    let out = io::stdout();
    let mut out = BufWriter::new(out.lock());
    if as_json {
        let trees: Vec<Value> = result
            .trees
            .iter()
            .map(|t| t.edges().iter().map(|e| json!([label_value(&g, e.u), label_value(&g, e.v)])).collect())
            .collect();
        let certificate = result.certificate.as_ref().map(|p| {
            p.blocks().iter().map(|b| b.iter().map(|&v| label_value(&g, v)).collect::<Vec<_>>()).collect::<Vec<_>>()
        });
        let doc = json!({ "sigma": result.sigma, "trees": trees, "certificate": certificate });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
    } else {
        writeln!(out, "{}", result.sigma)?;
        for (i, t) in result.trees.iter().enumerate() {
            writeln!(out, "# tree {}", i + 1)?;
            for e in t.edges() {
                writeln!(out, "{} {}", g.label(e.u), g.label(e.v))?;
            }
        }
        if let Some(p) = &result.certificate {
            writeln!(out, "# certificate")?;
            for b in p.blocks() {
                writeln!(out, "{}", block_line(&g, b))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn verify(path: &Path, k: usize) -> Result<()> {
    let g = load(path)?;
    match oracle::find_violation(&g.graph, k)? {
        None => println!("OK"),
        Some(p) => print_partition(&g, &p),
    }
    Ok(())
}

fn print_partition(g: &LabeledGraph, p: &Partition) {
    for b in p.blocks() {
        println!("{}", block_line(g, b));
    }
}

fn gen(n: usize, p: Option<f64>, seed: u64, process: bool, out: Option<PathBuf>) -> Result<()> {
    let sink: Box<dyn Write> = match &out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    };
    if process {
        if p.is_some() {
            bail!("--p has no meaning with --process");
        }
        write_permutation(&random::sample_process(n, Seed(seed))?, sink)?;
    } else {
        let p = p.expect("clap enforces --p");
        write_edge_list(&random::sample_gnp(n, p, Seed(seed))?, sink)?;
    }
    Ok(())
}

fn graph_stats(path: &Path, p: f64) -> Result<()> {
    let g = load(path)?;
    let window = stats::degree_window_check(&g.graph, p)?;
    let split = stats::classify_small_large(&g.graph)?;
    let witness = stats::check_small_separation(&g.graph)?;
    let record = json!({
        "n": window.n,
        "edges": window.edges,
        "p": p,
        "min_degree": window.min_degree,
        "max_degree": window.max_degree,
        "small_count": split.small.len(),
        "small_threshold": split.threshold,
        "separated": witness.is_none(),
        "separation_witness": witness.map(|w| json!({
            "a": label_value(&g, w.a),
            "b": label_value(&g, w.b),
            "via": w.via.map(|v| label_value(&g, v)),
        })),
        "max_degree_ok": window.max_ok,
        "min_degree_ok": window.min_ok,
        "edge_ok": window.edge_ok,
        "catlin": stats::catlin_check(&g.graph)?,
    });
    println!("{}", serde_json::to_string(&record)?);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_experiment(
    kind: Kind,
    config: Option<PathBuf>,
    n: Option<Vec<usize>>,
    p: Option<String>,
    k: Option<Vec<usize>>,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    sequential: bool,
) -> Result<()> {
    let kind = ExperimentKind::from(kind);
    let mut cfg = match &config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::parse(&text, Some(kind)).with_context(|| format!("in {}", path.display()))?
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(n) = n {
        cfg.ns = n;
    }
    if let Some(p) = p {
        cfg.p_rule = p.parse()?;
    }
    if let Some(k) = k {
        cfg.ks = k;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = Seed(s);
    }
    if out.is_some() {
        cfg.out = out;
    }
    cfg.sequential |= sequential;

    let report = experiment::run_experiment(&cfg)?;
    let summary = match &report {
        CampaignReport::Packing(o) => serde_json::to_string_pretty(&o.summary)?,
        CampaignReport::Hitting(o) => serde_json::to_string_pretty(&o.summary)?,
        CampaignReport::Structure(o) => serde_json::to_string_pretty(&o.summary)?,
    };
    println!("{summary}");
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Pack { graph, json } => pack(&graph, json),
        Command::Verify { graph, k } => verify(&graph, k),
        Command::Gen { n, p, seed, process, out } => gen(n, p, seed, process, out),
        Command::Stats { graph, p } => graph_stats(&graph, p),
        Command::Experiment { kind, config, n, p, k, trials, seed, out, sequential } => {
            run_experiment(kind, config, n, p, k, trials, seed, out, sequential)
        }
    }
}
