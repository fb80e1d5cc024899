//! Missingness simulation, synthetic data, reconstruction scoring and
//! hyper-parameter sweeps.

mod grid;
mod metrics;
mod missingness;
mod synth;

pub use grid::{
    best_cell, run_grid, summarize, write_ndjson, CellSummary, GridDataset, GridRecord, GridSpec,
    DEFAULT_HOPS_GRID, DEFAULT_TOP_N_GRID,
};
pub use metrics::{score_reconstruction, ReconstructionMetrics};
pub use missingness::{simulate_missingness, DegradedMask, MissingnessSpec};
pub use synth::{synth_generate, SynthDataset, SynthSpec};
