//! Oblivious environment sequences.
//!
//! The whole sequence μ_1..μ_T is materialized before the first trial.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::error::{Error, Result};
use crate::game_tree::{Environment, GameTree, NodeId};

/// Categorical weights over each action's children, aligned with child order.
#[derive(Debug, Clone, PartialEq)]
pub struct IidWeights {
    per_action: Vec<(NodeId, Vec<f64>)>,
}

impl IidWeights {
    pub fn uniform(tree: &GameTree) -> Self {
        IidWeights {
            per_action: tree
                .actions()
                .iter()
                .map(|&a| (a, vec![1.0; tree.children(a).len()]))
                .collect(),
        }
    }

    /// Parses `action:child=w,child=w;action:child=w`. Actions not listed stay uniform.
    pub fn parse(tree: &GameTree, text: &str) -> Result<Self> {
        let mut out = Self::uniform(tree);
        for group in text.split(';').map(str::trim).filter(|g| !g.is_empty()) {
            let (a, rest) = group
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("weights group `{group}` lacks `action:`")))?;
            let a: u32 = a
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad action id `{a}`")))?;
            let a = NodeId(a);
            let entry = out
                .per_action
                .iter_mut()
                .find(|(x, _)| *x == a)
                .ok_or_else(|| Error::Config(format!("weights given for non-action {a}")))?;
            let children = tree.children(a);
            let mut w = vec![0.0; children.len()];
            for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (c, x) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("expected child=weight, got `{item}`")))?;
                let c: u32 = c
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad child id `{c}`")))?;
                let x: f64 = x
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad weight `{x}`")))?;
                let slot = children
                    .iter()
                    .position(|&k| k == NodeId(c))
                    .ok_or_else(|| Error::Config(format!("weight for nonexistent child {c} of {a}")))?;
                w[slot] = x;
            }
            entry.1 = w;
        }
        out.check()?;
        Ok(out)
    }

    fn check(&self) -> Result<()> {
        for (a, w) in &self.per_action {
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::Config(format!("negative or non-finite weight at action {a}")));
            }
            if w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::Config(format!("weights at action {a} sum to zero")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    /// Environments cycled in order until the horizon is filled.
    Fixed(Vec<Environment>),
    /// Each trial's environment drawn independently from per-action categoricals.
    Iid { weights: IidWeights, seed: u64 },
    /// Consecutive fixed segments with explicit lengths summing to the horizon.
    Piecewise(Vec<(Vec<Environment>, u64)>),
}

pub fn make_environment_sequence<R: Rng + ?Sized>(
    tree: &GameTree,
    spec: &EnvSpec,
    horizon: u64,
    rng: &mut R,
) -> Result<Vec<Environment>> {
    let horizon = horizon as usize;
    match spec {
        EnvSpec::Fixed(list) => cycle(list, horizon),
        EnvSpec::Piecewise(segments) => {
            let total: u64 = segments.iter().map(|(_, len)| len).sum();
            if total as usize != horizon {
                return Err(Error::Config(format!(
                    "segment lengths sum to {total}, horizon is {horizon}"
                )));
            }
            let mut out = Vec::with_capacity(horizon);
            for (list, len) in segments {
                out.extend(cycle(list, *len as usize)?);
            }
            Ok(out)
        }
        EnvSpec::Iid { weights, .. } => {
            weights.check()?;
            let dists = weights
                .per_action
                .iter()
                .map(|(a, w)| {
                    if w.len() != tree.children(*a).len() {
                        return Err(Error::Config(format!("weights do not match children of {a}")));
                    }
                    WeightedIndex::new(w)
                        .map(|d| (*a, d))
                        .map_err(|e| Error::Config(format!("weights at {a}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            (0..horizon)
                .map(|_| {
                    let pairs: Vec<(NodeId, NodeId)> = dists
                        .iter()
                        .map(|(a, d)| (*a, tree.children(*a)[d.sample(rng)]))
                        .collect();
                    Environment::new(tree, pairs)
                })
                .collect()
        }
    }
}

fn cycle(list: &[Environment], len: usize) -> Result<Vec<Environment>> {
    if list.is_empty() {
        return Err(Error::Config("empty environment list".into()));
    }
    Ok(list.iter().cycle().take(len).cloned().collect())
}
