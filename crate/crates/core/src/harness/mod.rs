//! Experiment drivers: single runs, temporal convergence, scheme
//! comparisons and long-time coarsening, plus their file formats.

pub mod config;
pub mod initial;
pub mod io;
mod run;
mod studies;

pub use config::{apply_overrides, InitialSpec, KappaName, KappaSpec, OutputSpec, PotentialName, RunConfig};
pub use initial::build_initial;
pub use run::{run_simulation, RunOutput};
pub use studies::{
    coarsening_study, comparison_study, convergence_study, convergence_study_schemes,
    final_field, observed_orders, CoarseningResult, ComparisonRow, ConvergenceRecord,
    BOUND_TOL,
};
