use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use mmimpute::experiments::{
    best_cell, run_grid, simulate_missingness, summarize, synth_generate, write_ndjson,
    GridDataset, GridSpec, MissingnessSpec, SynthSpec,
};
use mmimpute::graph::build_item_graph;
use mmimpute::homophily::feature_homophily;
use mmimpute::impute::{impute, Fallback, ImputationConfig, Method};
use mmimpute::ingest::{
    dataset_stats, holdout_split, read_features, read_interactions, read_mask, write_features,
    write_mask, AvailabilityMask, IdMap, InteractionMatrix, ParsedInteractions,
};
use mmimpute::{Error, FeaturesF32, FeaturesF64, Result};

#[derive(Debug, Parser)]
#[command(
    name = "mmimpute",
    version,
    about = "Graph-based imputation of missing item modality features"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dataset and missing-modality statistics.
    Stats(StatsArgs),
    /// Per-user hold-out split of an interaction log.
    Split(SplitArgs),
    /// Impute the missing rows of one modality.
    Impute(ImputeArgs),
    /// Feature homophily of the sparsified item-item graph.
    Homophily(HomophilyArgs),
    /// Hide extra items to simulate higher missingness.
    Simulate(SimulateArgs),
    /// Sweep methods and hyper-parameters, scoring reconstructions of hidden rows.
    Grid(GridArgs),
    /// Generate a synthetic clustered dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct InteractionInput {
    /// Interaction log, `user<TAB>item[<TAB>...]`.
    #[arg(long)]
    interactions: PathBuf,
    /// Skip the first line of the interaction log.
    #[arg(long, default_value_t = false)]
    has_header: bool,
    /// Id-map (`dense_index<TAB>item_id`) fixing item order; default is first appearance.
    #[arg(long)]
    item_map: Option<PathBuf>,
}

impl InteractionInput {
    fn load(&self) -> Result<(ParsedInteractions, InteractionMatrix)> {
        let parsed = read_interactions(&self.interactions, self.has_header)?;
        let matrix = match &self.item_map {
            Some(p) => {
                let file = File::open(p).map_err(|e| io_err(p, e))?;
                parsed.align_items(&IdMap::read_tsv(std::io::BufReader::new(file))?)?
            }
            None => parsed.matrix.clone(),
        };
        Ok((parsed, matrix))
    }
}

#[derive(Debug, Args)]
struct JsonOut {
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

impl JsonOut {
    fn emit(&self, v: &Value) -> Result<()> {
        let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
        match &self.out_json {
            Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InteractionInput,
    /// Missing-item list, one file per modality, in modality order.
    #[arg(long = "mask")]
    masks: Vec<PathBuf>,
    /// Persist the dense item index -> id table.
    #[arg(long)]
    item_map_out: Option<PathBuf>,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[command(flatten)]
    input: InteractionInput,
    /// Fraction of each user's interactions kept for training.
    #[arg(long, default_value_t = 0.8)]
    ratio: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    train_out: PathBuf,
    #[arg(long)]
    test_out: PathBuf,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Debug, Args)]
struct MethodParams {
    /// TopN sparsification rate.
    #[arg(long, default_value_t = 20)]
    top_n: usize,
    /// Diffusion steps [default: 3 for multi-hop, 1 otherwise].
    #[arg(long)]
    hops: Option<usize>,
    /// PersPageRank restart probability.
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    /// Heat diffusion time.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Terms of the Neumann / Taylor series.
    #[arg(long, default_value_t = 30)]
    series_k: usize,
    /// Seed of the random baseline.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Policy for isolated missing items: global-mean or zeros.
    #[arg(long, default_value = "global-mean")]
    fallback: String,
    /// Early-stop tolerance on the missing rows; 0 disables.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Largest catalog solved exactly by PersPageRank.
    #[arg(long, default_value_t = 2048)]
    dense_solve_threshold: usize,
}

impl MethodParams {
    fn config(&self, method: Method) -> Result<ImputationConfig> {
        let mut cfg = ImputationConfig::new(method);
        cfg.top_n = self.top_n;
        if let Some(h) = self.hops {
            cfg.hops = h;
        }
        cfg.alpha = self.alpha;
        cfg.diffusion_time = self.b;
        cfg.series_order = self.series_k;
        cfg.seed = self.seed;
        cfg.fallback = self.fallback.parse::<Fallback>()?;
        cfg.tolerance = self.tolerance;
        cfg.dense_solve_threshold = self.dense_solve_threshold;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct ImputeArgs {
    #[command(flatten)]
    input: InteractionInput,
    /// Feature matrix (MMFI, or TSV `item_index<TAB>values...`).
    #[arg(long)]
    features: PathBuf,
    /// Missing-item list of this modality.
    #[arg(long)]
    mask: PathBuf,
    /// Modality index, echoed in the summary.
    #[arg(long)]
    modality: usize,
    /// zeros, random, global-mean, neigh-mean, multi-hop, pers-page-rank or heat.
    #[arg(long)]
    method: String,
    #[command(flatten)]
    params: MethodParams,
    /// Output MMFI file.
    #[arg(long)]
    out: PathBuf,
    /// Report wall time in the summary (makes it non-reproducible).
    #[arg(long, default_value_t = false)]
    wall_time: bool,
    #[command(flatten)]
    json: JsonOut,
}

#[derive(Debug, Args)]
struct HomophilyArgs {
    #[command(flatten)]
    input: InteractionInput,
    /// Feature matrix per modality, in modality order.
    #[arg(long = "features", required = true)]
    features: Vec<PathBuf>,
    /// Missing-item list per modality, same order as --features.
    #[arg(long = "mask")]
    masks: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    top_n: usize,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InteractionInput,
    /// Missing-item list per modality (omit for a fully available modality).
    #[arg(long = "mask")]
    masks: Vec<PathBuf>,
    /// Number of modalities when no --mask is given.
    #[arg(long, default_value_t = 1)]
    num_modalities: usize,
    /// Percentage of the catalog to hide per listed modality.
    #[arg(long)]
    pct: u32,
    /// Modalities to degrade, comma separated [default: all].
    #[arg(long, value_delimiter = ',')]
    modalities: Vec<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Receives `mask_r{repeat}_m{modality}.txt` and `hidden_r{repeat}_m{modality}.txt`.
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    out: JsonOut,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    input: InteractionInput,
    #[arg(long)]
    features: PathBuf,
    /// Missing-item list of the modality [default: fully available].
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    modality: usize,
    /// Methods, comma separated [default: all seven].
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// TopN values, comma separated [default: 10,20,...,100].
    #[arg(long, value_delimiter = ',')]
    top_n_grid: Vec<usize>,
    /// Hop counts, comma separated [default: 1,2,...,20].
    #[arg(long, value_delimiter = ',')]
    hops_grid: Vec<usize>,
    /// Missingness percentages, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pct: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    #[arg(long, default_value_t = 30)]
    series_k: usize,
    #[arg(long, default_value = "global-mean")]
    fallback: String,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, default_value_t = 2048)]
    dense_solve_threshold: usize,
    /// NDJSON report path.
    #[arg(long)]
    out: PathBuf,
    /// Fill `wall_ms` (makes the report non-reproducible).
    #[arg(long, default_value_t = false)]
    wall_time: bool,
    #[command(flatten)]
    json: JsonOut,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    num_items: usize,
    #[arg(long, default_value_t = 400)]
    num_users: usize,
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    /// Planted homophily in [0, 1].
    #[arg(long, default_value_t = 0.8)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long, default_value_t = 10)]
    interactions_per_user: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Receives interactions.tsv, features.mmfi, mask.txt and item_map.tsv.
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    out: JsonOut,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_err(path, e))
}

fn load_features(path: &Path, num_items: usize) -> Result<FeaturesF32> {
    let f = read_features(path)?;
    if f.rows() != num_items {
        return Err(Error::ShapeMismatch(format!(
            "{}: {} feature rows for {num_items} items",
            path.display(),
            f.rows()
        )));
    }
    Ok(f)
}

fn load_mask_columns(
    paths: &[PathBuf],
    num_items: usize,
    default_modalities: usize,
) -> Result<AvailabilityMask> {
    if paths.is_empty() {
        return Ok(AvailabilityMask::all_available(
            num_items,
            default_modalities,
        ));
    }
    let cols = paths
        .iter()
        .map(|p| read_mask(p, num_items))
        .collect::<Result<Vec<_>>>()?;
    AvailabilityMask::from_columns(&cols)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Split(a) => cmd_split(a),
        Command::Impute(a) => cmd_impute(a),
        Command::Homophily(a) => cmd_homophily(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let (parsed, r) = a.input.load()?;
    let mask = load_mask_columns(&a.masks, r.num_items(), 0)?;
    let stats = dataset_stats(&r, &mask)?;
    if let Some(p) = &a.item_map_out {
        let mut w = create(p)?;
        parsed
            .items
            .write_tsv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| io_err(p, e))?;
    }
    a.out
        .emit(&serde_json::to_value(&stats).expect("serializable"))
}

fn cmd_split(a: SplitArgs) -> Result<()> {
    let parsed = read_interactions(&a.input.interactions, a.input.has_header)?;
    let (train, test) = holdout_split(&parsed.matrix, a.ratio, a.seed)?;
    for (path, m) in [(&a.train_out, &train), (&a.test_out, &test)] {
        let mut w = create(path)?;
        parsed
            .write_tsv(m, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| io_err(path, e))?;
    }
    a.out.emit(&json!({
        "train_interactions": train.num_interactions(),
        "test_interactions": test.num_interactions(),
        "ratio": a.ratio,
        "seed": a.seed,
    }))
}

fn cmd_impute(a: ImputeArgs) -> Result<()> {
    let started = Instant::now();
    let method: Method = a.method.parse()?;
    let cfg = a.params.config(method)?;
    let (_, r) = a.input.load()?;
    let features = load_features(&a.features, r.num_items())?;
    let available = read_mask(&a.mask, r.num_items())?;
    let graph = build_item_graph(&r, cfg.top_n)?;
    let result = impute(&features.cast::<f64>(), &available, &graph, &cfg)?;
    let out: FeaturesF32 = result.features.cast();
    write_features(&a.out, &out)?;
    a.json.emit(&json!({
        "method": method.name(),
        "modality": a.modality,
        "num_items": r.num_items(),
        "imputed_rows": result.imputed_rows.len(),
        "fallback_rows": result.fallback_rows.len(),
        "iterations_run": result.iterations_run,
        "top_n": cfg.top_n,
        "hops": cfg.hops,
        "alpha": cfg.alpha,
        "b": cfg.diffusion_time,
        "series_k": cfg.series_order,
        "wall_ms": a.wall_time.then(|| started.elapsed().as_secs_f64() * 1e3),
    }))
}

fn cmd_homophily(a: HomophilyArgs) -> Result<()> {
    let (_, r) = a.input.load()?;
    if !a.masks.is_empty() && a.masks.len() != a.features.len() {
        return Err(Error::InvalidConfig(format!(
            "{} --features but {} --mask",
            a.features.len(),
            a.masks.len()
        )));
    }
    let mask = load_mask_columns(&a.masks, r.num_items(), a.features.len())?;
    let graph = build_item_graph(&r, a.top_n)?;
    let mut entries = Vec::new();
    for (m, path) in a.features.iter().enumerate() {
        let f: FeaturesF64 = load_features(path, r.num_items())?.cast();
        let e = feature_homophily(&f, &mask.column(m), &graph)?;
        entries.push(json!({
            "modality": m,
            "homophily": e.homophily,
            "edges_used": e.edges_used,
            "edges_skipped": e.edges_skipped,
        }));
    }
    a.out
        .emit(&json!({ "top_n": a.top_n, "modalities": entries }))
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let (_, r) = a.input.load()?;
    let mask = load_mask_columns(&a.masks, r.num_items(), a.num_modalities)?;
    let modalities = if a.modalities.is_empty() {
        (0..mask.num_modalities()).collect()
    } else {
        a.modalities.clone()
    };
    let spec = MissingnessSpec {
        percentage: a.pct,
        modalities,
        seed: a.seed,
        repeats: a.repeats,
    };
    let degraded = simulate_missingness(&mask, &spec)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;
    let mut repeats = Vec::new();
    for (rep, d) in degraded.iter().enumerate() {
        let mut hidden = Vec::new();
        for (m, rows) in &d.masked {
            let mask_path = a.out_dir.join(format!("mask_r{rep}_m{m}.txt"));
            let mut w = create(&mask_path)?;
            write_mask(&d.mask.column(*m), &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_err(&mask_path, e))?;
            let hidden_path = a.out_dir.join(format!("hidden_r{rep}_m{m}.txt"));
            let text: String = rows.iter().map(|i| format!("{i}\n")).collect();
            std::fs::write(&hidden_path, text).map_err(|e| io_err(&hidden_path, e))?;
            hidden.push(json!({ "modality": m, "hidden": rows.len(), "missing_total": d.mask.missing_count(*m) }));
        }
        repeats.push(json!({ "repeat": rep, "modalities": hidden }));
    }
    a.out
        .emit(&json!({ "pct": a.pct, "seed": a.seed, "repeats": repeats }))
}

fn cmd_grid(a: GridArgs) -> Result<()> {
    let (_, r) = a.input.load()?;
    let features: FeaturesF64 = load_features(&a.features, r.num_items())?.cast();
    let mask = match &a.mask {
        Some(p) => {
            let col = read_mask(p, r.num_items())?;
            let mut cols = vec![vec![true; r.num_items()]; a.modality + 1];
            cols[a.modality] = col;
            AvailabilityMask::from_columns(&cols)?
        }
        None => AvailabilityMask::all_available(r.num_items(), a.modality + 1),
    };
    let methods = if a.methods.is_empty() {
        Method::ALL.to_vec()
    } else {
        a.methods.iter().map(|m| m.parse()).collect::<Result<_>>()?
    };
    let mut base = ImputationConfig::default();
    base.alpha = a.alpha;
    base.diffusion_time = a.b;
    base.series_order = a.series_k;
    base.fallback = a.fallback.parse()?;
    base.tolerance = a.tolerance;
    base.dense_solve_threshold = a.dense_solve_threshold;
    let defaults = GridSpec::default();
    let spec = GridSpec {
        methods,
        top_n_grid: if a.top_n_grid.is_empty() {
            defaults.top_n_grid
        } else {
            a.top_n_grid.clone()
        },
        hops_grid: if a.hops_grid.is_empty() {
            defaults.hops_grid
        } else {
            a.hops_grid.clone()
        },
        percentages: a.pct.clone(),
        repeats: a.repeats,
        seed: a.seed,
        base,
        record_wall_time: a.wall_time,
    };
    let data = GridDataset {
        interactions: &r,
        features: &features,
        mask: &mask,
        modality: a.modality,
    };
    let records = run_grid(data, &spec)?;
    let mut w = create(&a.out)?;
    write_ndjson(&records, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&a.out, e))?;
    let best = best_cell(&records).map(|b| {
        json!({ "method": b.method, "top_n": b.top_n, "hops": b.hops, "pct": b.pct, "mean_cosine": b.mean_cosine })
    });
    a.json.emit(&json!({
        "cells": records.len(),
        "failed_cells": records.iter().filter(|r| r.error.is_some()).count(),
        "best": best,
        "summary": summarize(&records),
    }))
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        num_items: a.num_items,
        num_users: a.num_users,
        dim: a.dim,
        clusters: a.clusters,
        homophily: a.rho,
        noise_scale: a.noise,
        interactions_per_user: a.interactions_per_user,
        seed: a.seed,
    };
    let d = synth_generate::<f32>(&spec)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| io_err(&a.out_dir, e))?;
    let path = a.out_dir.join("interactions.tsv");
    let mut w = create(&path)?;
    for (u, i) in d.interactions.pairs() {
        writeln!(w, "u{u}\ti{i}").map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    // ids in first-appearance order of the log above
    let path = a.out_dir.join("item_map.tsv");
    let mut seen = IdMap::new();
    for (_, i) in d.interactions.pairs() {
        seen.intern(&format!("i{i}"));
    }
    for i in 0..d.interactions.num_items() {
        seen.intern(&format!("i{i}"));
    }
    let mut w = create(&path)?;
    seen.write_tsv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&path, e))?;
    // feature rows follow the same order
    let order: Vec<usize> = seen
        .iter()
        .map(|(_, id)| id[1..].parse::<usize>().expect("synthetic id"))
        .collect();
    let mut values = Vec::with_capacity(d.features.as_slice().len());
    for &i in &order {
        values.extend_from_slice(d.features.row(i));
    }
    let features = FeaturesF32::new(d.features.rows(), d.features.cols(), values)?;
    write_features(&a.out_dir.join("features.mmfi"), &features)?;
    let path = a.out_dir.join("mask.txt");
    std::fs::write(&path, "").map_err(|e| io_err(&path, e))?;
    a.out.emit(&json!({
        "num_users": d.interactions.num_users(),
        "num_items": d.interactions.num_items(),
        "num_interactions": d.interactions.num_interactions(),
        "dim": a.dim,
        "rho": a.rho,
        "seed": a.seed,
    }))
}
