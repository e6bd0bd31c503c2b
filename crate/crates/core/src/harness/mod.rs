//! JSON-driven experiments: replicates, parameter sweeps, self-checks and
//! the files they write.

mod checks;
mod experiment;
pub mod output;
mod spec;

pub use checks::{
    fit_histogram, oracle_check, read_histogram_csv, run_kinetic, KineticReport, OfflineFit,
    OracleReport, FORMULA_TOLERANCE, ORACLE_KS_TOLERANCE,
};
pub use experiment::{
    analyze, run_experiment, run_sweep, sweep_assignments, Analysis, AssertionOutcome,
    ExperimentResult, ExperimentRun, ReplicateSummary, SweepPoint, SweepResult, Theory,
};
pub use spec::{
    AnalysisSpec, Expectations, ExperimentSpec, KineticSpec, OutputKind, SchemaError, SweepAxis,
    SCHEMA_VERSION,
};
