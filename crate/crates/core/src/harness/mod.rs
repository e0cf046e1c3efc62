//! Simulation harness: environments, the protocol loop, regret, and I/O.

pub mod config;
pub mod envs;
pub mod experiment;
pub mod generate;
pub mod output;

pub use config::ExperimentConfig;
pub use envs::{make_environment_sequence, EnvSpec, IidWeights};
pub use experiment::{
    compute_regret_curve, regret_bound, run_experiment, Experiment, ExperimentResult, RegretSummary, TrialRecord,
};
pub use generate::{generate_random_tree, random_tree, LossLaw, TreeShape};
pub use output::write_outputs;
