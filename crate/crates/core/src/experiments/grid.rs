use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{score_reconstruction, simulate_missingness, DegradedMask, MissingnessSpec};
use crate::error::{Error, Result};
use crate::graph::{build_item_graph, SparsifiedAdjacency};
use crate::homophily::feature_homophily;
use crate::impute::{impute, ImputationConfig, Method};
use crate::ingest::{AvailabilityMask, FeatureMatrix, InteractionMatrix};
use crate::scalar::Scalar;

pub const DEFAULT_TOP_N_GRID: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];
pub const DEFAULT_HOPS_GRID: [usize; 20] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20,
];

/// One modality of one dataset.
#[derive(Debug, Clone, Copy)]
pub struct GridDataset<'a, T> {
    pub interactions: &'a InteractionMatrix,
    pub features: &'a FeatureMatrix<T>,
    pub mask: &'a AvailabilityMask,
    pub modality: usize,
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub methods: Vec<Method>,
    pub top_n_grid: Vec<usize>,
    pub hops_grid: Vec<usize>,
    pub percentages: Vec<u32>,
    pub repeats: usize,
    pub seed: u64,
    /// Source of alpha, b, series order, tolerance, fallback and solve threshold.
    pub base: ImputationConfig,
    /// Fill `wall_ms`; leaves the report non-reproducible.
    pub record_wall_time: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            top_n_grid: DEFAULT_TOP_N_GRID.to_vec(),
            hops_grid: DEFAULT_HOPS_GRID.to_vec(),
            percentages: vec![10],
            repeats: 1,
            seed: 42,
            base: ImputationConfig::default(),
            record_wall_time: false,
        }
    }
}

/// One line of the NDJSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRecord {
    pub method: Method,
    pub top_n: usize,
    pub hops: usize,
    pub alpha: f64,
    pub b: f64,
    pub pct: u32,
    pub modality: usize,
    pub repeat: usize,
    pub mean_cosine: Option<f64>,
    pub mse: Option<f64>,
    pub homophily: Option<f64>,
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Cell {
    method: Method,
    top_n: usize,
    hops: usize,
    pct: u32,
    repeat: usize,
}

/// Sweeps methods x TopN x hops x missingness x repeats. Cells run in
/// parallel; records come back in grid order. A failing cell is recorded
/// with its error and the sweep continues.
pub fn run_grid<T: Scalar>(data: GridDataset<'_, T>, spec: &GridSpec) -> Result<Vec<GridRecord>> {
    if spec.methods.is_empty()
        || spec.top_n_grid.is_empty()
        || spec.hops_grid.is_empty()
        || spec.percentages.is_empty()
    {
        return Err(Error::InvalidConfig(
            "every grid axis needs at least one value".into(),
        ));
    }
    let n = data.interactions.num_items();
    if data.features.rows() != n || data.mask.num_items() != n {
        return Err(Error::ShapeMismatch(format!(
            "{n} items in the log, {} feature rows, {} mask rows",
            data.features.rows(),
            data.mask.num_items()
        )));
    }
    if data.modality >= data.mask.num_modalities() {
        return Err(Error::Range {
            index: data.modality,
            limit: data.mask.num_modalities(),
        });
    }
    spec.base.validate()?;

    let available = data.mask.column(data.modality);
    let mut graphs: BTreeMap<usize, (SparsifiedAdjacency, Option<f64>)> = BTreeMap::new();
    for &top_n in &spec.top_n_grid {
        if let std::collections::btree_map::Entry::Vacant(e) = graphs.entry(top_n) {
            let g = build_item_graph(data.interactions, top_n)?;
            let h = feature_homophily(data.features, &available, &g)?.homophily;
            e.insert((g, h));
        }
    }
    let mut masks: BTreeMap<u32, Result<Vec<DegradedMask>>> = BTreeMap::new();
    for &pct in &spec.percentages {
        masks.entry(pct).or_insert_with(|| {
            simulate_missingness(
                data.mask,
                &MissingnessSpec {
                    percentage: pct,
                    modalities: vec![data.modality],
                    seed: spec.seed,
                    repeats: spec.repeats.max(1),
                },
            )
        });
    }

    let mut cells = Vec::new();
    for &method in &spec.methods {
        for &top_n in &spec.top_n_grid {
            for &hops in &spec.hops_grid {
                for &pct in &spec.percentages {
                    for repeat in 0..spec.repeats.max(1) {
                        cells.push(Cell {
                            method,
                            top_n,
                            hops,
                            pct,
                            repeat,
                        });
                    }
                }
            }
        }
    }

    Ok(cells
        .par_iter()
        .map(|cell| {
            let (graph, homophily) = &graphs[&cell.top_n];
            let mut cfg = spec.base.clone();
            cfg.method = cell.method;
            cfg.top_n = cell.top_n;
            cfg.hops = cell.hops;
            cfg.seed = spec.seed.wrapping_add(cell.repeat as u64);
            let started = Instant::now();
            let outcome = masks[&cell.pct]
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|ms| {
                    let degraded = &ms[cell.repeat];
                    let hidden = degraded.masked_for(data.modality);
                    let col = degraded.mask.column(data.modality);
                    impute(data.features, &col, graph, &cfg)
                        .and_then(|r| score_reconstruction(&r, data.features, hidden))
                        .map_err(|e| e.to_string())
                });
            let wall_ms = spec
                .record_wall_time
                .then(|| started.elapsed().as_secs_f64() * 1e3);
            let (mean_cosine, mse, error) = match outcome {
                Ok(m) => (Some(m.mean_cosine), Some(m.mean_squared_error), None),
                Err(e) => (None, None, Some(e)),
            };
            GridRecord {
                method: cell.method,
                top_n: cell.top_n,
                hops: cell.hops,
                alpha: cfg.alpha,
                b: cfg.diffusion_time,
                pct: cell.pct,
                modality: data.modality,
                repeat: cell.repeat,
                mean_cosine,
                mse,
                homophily: *homophily,
                wall_ms,
                error,
            }
        })
        .collect())
}

pub fn write_ndjson<W: Write>(records: &[GridRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Record with the highest mean cosine; the first one wins ties.
pub fn best_cell(records: &[GridRecord]) -> Option<&GridRecord> {
    records
        .iter()
        .filter(|r| r.mean_cosine.is_some())
        .fold(None, |best: Option<&GridRecord>, r| match best {
            Some(b) if b.mean_cosine >= r.mean_cosine => Some(b),
            _ => Some(r),
        })
}

/// Median over repeats of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub method: Method,
    pub top_n: usize,
    pub hops: usize,
    pub pct: u32,
    pub median_mean_cosine: Option<f64>,
    pub repeats_scored: usize,
}

pub fn summarize(records: &[GridRecord]) -> Vec<CellSummary> {
    let mut groups: Vec<(CellSummary, Vec<f64>)> = Vec::new();
    for r in records {
        let key = (r.method, r.top_n, r.hops, r.pct);
        let pos = groups
            .iter()
            .position(|(s, _)| (s.method, s.top_n, s.hops, s.pct) == key);
        let slot = match pos {
            Some(p) => &mut groups[p].1,
            None => {
                groups.push((
                    CellSummary {
                        method: r.method,
                        top_n: r.top_n,
                        hops: r.hops,
                        pct: r.pct,
                        median_mean_cosine: None,
                        repeats_scored: 0,
                    },
                    Vec::new(),
                ));
                &mut groups.last_mut().expect("pushed").1
            }
        };
        slot.extend(r.mean_cosine);
    }
    groups
        .into_iter()
        .map(|(mut s, vals)| {
            s.repeats_scored = vals.len();
            s.median_mean_cosine = median(vals);
            s
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}
