//! Configuration-driven experiments: error-versus-iteration curves over
//! replicates, log-log slope fits and coverage diagnostics.

mod chain;
mod config;
mod curve;
mod diagnostics;
mod run;

pub use chain::{axis_values, start_offsets, Advance, Chain, ChainSpec, RunningMean};
pub use config::{
    parse_samplers, CoefficientMode, ExperimentConfig, ExperimentKind, ImageSource, ReferenceMode, SamplerKind,
    TargetSpec,
};
pub use curve::{loglog_slope, loglog_slope_points, median, quantile, record_schedule, ErrorCurve};
pub use diagnostics::{
    cell_coverage, coverage_and_period, ks_statistic, l1_distance, sequence_period, trajectory_coverage, Coverage,
};
pub use run::{
    add_flip_noise, denoise_disagreement, ising_hitting_iterations, long_run_reference, output_paths, prepare,
    run_experiment, run_prepared, run_replicate, synthetic_binary_image, synthetic_image, BuiltTarget,
    ExperimentOutput, Metric, Prepared, Reference, SamplerRun,
};
