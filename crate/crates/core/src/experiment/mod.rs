//! End-to-end experiment: score every measured pair of a device, estimate
//! each pair's protocol fidelity, select the most entangled pair and compare
//! it with the average case.

mod config;
mod output;
mod run;
mod stats;

pub use config::{ExperimentConfig, Toggle, DEFAULT_OUTPUT_DIR, NOISELESS_PROFILE};
pub use output::{bar_chart_svg, pairs_csv, write_outputs, BarChart, OUTPUT_FILES};
pub use run::{compute_experiment, load_noise, run_full_experiment, Baseline, ExperimentReport, PairSummary};
pub use stats::{mean, ranks, spearman};
