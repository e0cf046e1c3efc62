//! User-side local randomizer.
//!
//! The user plays the sampled strategy, then reports one Laplace-noised value
//! per traversed-strategy action: the realized loss at the last action taken,
//! pure noise everywhere else. The [`UserReport`] is the only thing the server
//! ever sees from a trial.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game_tree::{reachable_sets, GameTree, NodeId, PlayOutcome, ReducedStrategy};
use crate::rng::open_unit;

/// Privatized report d_t over A(σ_t).
#[derive(Debug, Clone, PartialEq)]
pub struct UserReport {
    pub trial: u64,
    pub values: BTreeMap<NodeId, f64>,
}

impl UserReport {
    pub fn get(&self, action: NodeId) -> Option<f64> {
        self.values.get(&action).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Laplace noise source with density exp(-|x|/scale) / (2 scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceMechanism {
    pub scale: f64,
}

impl LaplaceMechanism {
    /// Scale 2/ε: one unit-sensitivity coordinate costs ε/2.
    pub fn for_epsilon(epsilon: f64) -> Self {
        LaplaceMechanism { scale: 2.0 / epsilon }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = open_unit(rng) - 0.5;
        -self.scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
    }

    pub fn density(&self, x: f64) -> f64 {
        (-x.abs() / self.scale).exp() / (2.0 * self.scale)
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.scale * self.scale
    }

    /// Builds d_t for a played strategy.
    pub fn report<R: Rng + ?Sized>(
        &self,
        tree: &GameTree,
        sigma: &ReducedStrategy,
        outcome: &PlayOutcome,
        trial: u64,
        rng: &mut R,
    ) -> Result<UserReport> {
        check_outcome(tree, sigma, outcome)?;
        let actions = reachable_sets(tree, sigma).actions;
        if !actions.contains(&outcome.last_action) {
            return Err(Error::InconsistentOutcome(format!(
                "last action {} outside A(sigma)",
                outcome.last_action
            )));
        }
        let values = actions
            .into_iter()
            .map(|a| {
                let noise = self.sample(rng);
                let signal = if a == outcome.last_action { outcome.loss } else { 0.0 };
                (a, signal + noise)
            })
            .collect();
        Ok(UserReport { trial, values })
    }
}

/// One draw from the Laplace law with parameter 2/ε.
pub fn sample_laplace<R: Rng + ?Sized>(epsilon: f64, rng: &mut R) -> f64 {
    LaplaceMechanism::for_epsilon(epsilon).sample(rng)
}

pub fn laplace_density(epsilon: f64, x: f64) -> f64 {
    LaplaceMechanism::for_epsilon(epsilon).density(x)
}

pub fn build_report<R: Rng + ?Sized>(
    tree: &GameTree,
    sigma: &ReducedStrategy,
    outcome: &PlayOutcome,
    epsilon: f64,
    trial: u64,
    rng: &mut R,
) -> Result<UserReport> {
    LaplaceMechanism::for_epsilon(epsilon).report(tree, sigma, outcome, trial, rng)
}

fn check_outcome(tree: &GameTree, sigma: &ReducedStrategy, outcome: &PlayOutcome) -> Result<()> {
    if !(0.0..=1.0).contains(&outcome.loss) {
        return Err(Error::InconsistentOutcome(format!(
            "loss {} outside [0,1]",
            outcome.loss
        )));
    }
    let path = &outcome.path;
    if path.first() != Some(&tree.root()) {
        return Err(Error::InconsistentOutcome("path does not start at the root".into()));
    }
    for w in path.windows(2) {
        let (v, next) = (w[0], w[1]);
        if !tree.children(v).contains(&next) {
            return Err(Error::InconsistentOutcome(format!("{next} is not a child of {v}")));
        }
        if tree.is_infoset(v) && sigma.get(v) != Some(next) {
            return Err(Error::InconsistentOutcome(format!(
                "path leaves infoset {v} off-strategy"
            )));
        }
    }
    let last = *path.last().unwrap();
    if tree.leaf_loss(last) != Some(outcome.loss) {
        return Err(Error::InconsistentOutcome(
            "path does not end at a leaf with the reported loss".into(),
        ));
    }
    if path.iter().rev().find(|&&v| tree.is_action(v)) != Some(&outcome.last_action) {
        return Err(Error::InconsistentOutcome(
            "last action is not the final action on the path".into(),
        ));
    }
    Ok(())
}
