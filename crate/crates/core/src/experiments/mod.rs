//! Numerical experiments: spectrum-matching training and the
//! gradient-variance sweep, with the paired exact Wilcoxon test.

mod config;
mod train;
mod variance;
mod wilcoxon;

pub use config::TrainConfig;
pub use train::{
    adam_train, adam_train_from, gen_dataset, run_seed, spectrum_matching_experiment, Adam, Dataset, ScaleSummary,
    SeedRun, TrainOutcome, TrainReport,
};
pub use variance::{
    analytic_variance_oracle, gradients, sample_angles, variance_sweep, weighted_generator, VarianceSweepReport,
    WeightPoint, PUBLISHED_SAMPLES,
};
pub use wilcoxon::{wilcoxon_exact, WilcoxonResult, MAX_PAIRS};
