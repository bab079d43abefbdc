//! Experiment harness: builds examples, times query batches, compares
//! measured against predicted visits and writes reports.

mod checks;
mod config;
mod harness;
mod presets;
mod report;
mod stats;
mod verify;

pub use checks::{argmax_octaves, preset_checks, r2_against_time, relative_error};
pub use config::{ExampleConfig, ExperimentConfig, ModelSpec, NamedModel};
pub use harness::{
    measure_visits, median, run_build_phase, run_search_phase, BatchPrediction, Example,
    Measurement, SearchPhase,
};
pub use presets::{
    experiment_presets, preset, BIASES, DESK_SCALE, PRESETS, SKEWS, SKEW_BUCKETS, SWEEP_DIMS,
};
pub use report::{
    emit_report, read_measurements_csv, write_measurements_csv, Check, EvalReport, GroupSummary,
    MachineInfo, ReferenceFit, REFERENCE_FIT,
};
pub use stats::{coefficient_of_variation, fit_linear, mape, metrics, r_squared, Metrics, RegressionFit};
pub use verify::{verify_oracle, VerifyReport};
