//! The convergence study: observation designs, synthetic data, `L²` errors,
//! noise-averaged rate tables, the Matérn baseline and the kernel
//! perturbation bound.

mod baseline;
mod convergence;
mod data;
mod points;
mod posterior;
mod problem;
mod prop6;
mod verify;

pub use baseline::{
    baseline_params, matern_baseline, run_baseline, BASELINE_LENGTHSCALE, BASELINE_NU_SHIFT,
    BASELINE_SIGMA,
};
pub use convergence::{
    fit_loglog_slope, heuristic_n_fe, mean_and_std, realization_errors, run_convergence,
    theory_slope, ExperimentConfig, GridPredictor, RateRow, RateTable, SeriesFit, CSV_HEADER,
    DEFAULT_FIT_SKIP, DEFAULT_SEED, FE_ORDER, MIN_FIT_POINTS,
};
pub use data::{l2_error, simulate_data, substream, L2Quadrature, L2_PANELS};
pub use points::{
    fill_metrics, random_uniform_points, uniform_points, FillMetrics, PointGenerator, PointSet,
};
pub use posterior::{posterior_snapshot, PosteriorRow, PosteriorSnapshot, POSTERIOR_GRID};
pub use problem::{OperatorChoice, Truth};
pub use prop6::{prop6_check, random_trial, unit_grid, Prop6Report, PROP6_GRID_SIZE};
pub use verify::{
    fe_sup_error, run_verify, SuiteResult, VerifyReport, BOUNDARY_TOLERANCE, FE_RATE_BAND,
    FE_RATE_N, NODAL_TOLERANCE_H2, ORACLE_GRID_TOLERANCE, ORACLE_N, PROP6_MAX_N, PROP6_TRIALS,
    PSD_INSTANCES, PSD_RELATIVE_TOLERANCE,
};
