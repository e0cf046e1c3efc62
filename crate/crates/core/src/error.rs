use crate::game_tree::NodeId;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no root")]
    NoRoot,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: loss out of range: {value}")]
    LossOutOfRange { line: usize, value: f64 },

    #[error("invalid tree: {}", join_violations(.0))]
    InvalidTree(Vec<crate::game_tree::Violation>),

    #[error("reduced sub-strategy count overflows at node {0}")]
    CountOverflow(NodeId),

    #[error("enumeration cap exceeded: {count} > {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("strategy undefined at reached infoset {0}")]
    StrategyUndefined(NodeId),

    #[error("invalid reduced strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("epsilon {0} outside (0, 1); pass allow-large-epsilon to override")]
    EpsilonOutOfRange(f64),

    #[error("horizon must be at least 2, got {0}")]
    HorizonTooShort(u64),

    #[error("report domain does not match the strategy's action set: {0}")]
    ReportDomain(String),

    #[error("non-finite report value at action {0}")]
    NonFiniteReport(NodeId),

    #[error("non-positive probability at action {0}")]
    NonPositiveProbability(NodeId),

    #[error("outcome inconsistent with strategy: {0}")]
    InconsistentOutcome(String),

    #[error("insufficient samples: no bin reached the minimum count")]
    InsufficientSamples,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config: {0}")]
    Config(String),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[crate::game_tree::Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
