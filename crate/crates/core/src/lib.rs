//! Locally differentially private bandit learning in one-sided extensive-form games.
//!
//! A server maintains a per-infoset policy over the learner's actions, samples a
//! reduced strategy every trial, and updates from a Laplace-privatized report sent
//! back by the user. The crate also carries the brute-force oracles, a privacy
//! auditor and the simulation harness used to check the algorithm end to end.
//!
//! Module map:
//!
//! - [`game_tree`]: tree model, file format, play semantics, profile recursions.
//! - [`oracle`]: enumeration and dynamic-programming ground truth.
//! - [`server`]: schedule, policy, sampling and the multiplicative update.
//! - [`user`]: Laplace sampling and report construction.
//! - [`audit`]: analytic and empirical privacy checks.
//! - [`harness`]: environment sequences, experiments, regret accounting, outputs.

pub mod audit;
pub mod error;
pub mod game_tree;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod server;
pub mod sumtree;
pub mod user;

pub use error::{Error, Result};
pub use game_tree::{Environment, Game, GameTree, NodeId, NodeKind, PlayOutcome, ReducedStrategy, TreeProfiles};
pub use server::{Schedule, ServerState};
pub use user::UserReport;

/// Default cap on the number of objects any enumeration oracle will produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;
