//! Readout training and error-versus-capacity experiments.

mod experiment;
mod features;
mod probe;
mod ridge;
mod targets;

pub use experiment::{
    approximation_experiment, is_non_increasing, median, summarize, Capacity, DataSpec,
    ExperimentSpec, Family, LevelSummary, LsmFamily, QrcFamily, SimulationSpec, TargetSource,
    TargetSpec, TrainReport,
};
pub use features::{feature_count, monomial_exponents, polynomial_features, MAX_FEATURES};
pub use probe::{separation_probe, PairGap, ProbeFamily};
pub use ridge::{nrmse, ridge_train, ridge_train_multi, RidgeFit};
pub use targets::{target_eval, TargetFilter, NARMA_DIVERGENCE};
