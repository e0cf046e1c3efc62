//! The per-trial protocol loop and regret accounting.

use std::sync::Arc;

use rayon::prelude::*;

use super::envs::{make_environment_sequence, EnvSpec};
use crate::error::{Error, Result};
use crate::game_tree::{play, Environment, Game, GameTree, NodeId};
use crate::oracle::best_fixed_dp;
use crate::rng::{env_stream, stream, user_stream};
use crate::server::{complexity_budget, compute_schedule, noise_factor, PolicySnapshot, Schedule, ServerState};
use crate::user::build_report;

/// Per-trial segment-tree work may not exceed this multiple of the budget + 1.
pub const OPS_FACTOR: u64 = 8;

/// Fully resolved experiment (no file paths).
#[derive(Debug, Clone)]
pub struct Experiment {
    pub game: Arc<Game>,
    pub horizon: u64,
    pub epsilon: f64,
    pub env: EnvSpec,
    pub seed: u64,
    pub replications: u32,
    pub allow_large_epsilon: bool,
    /// Snapshot the policy every this many trials; 0 disables.
    pub record_policy_every: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub t: u64,
    pub sigma: Vec<(NodeId, NodeId)>,
    pub loss: f64,
    pub cum_loss: f64,
    pub best_fixed_cum: f64,
    pub regret: f64,
}

#[derive(Debug, Clone)]
pub struct ReplicationResult {
    pub records: Vec<TrialRecord>,
    pub final_regret: f64,
    pub clamp_events: u64,
    pub max_trial_ops: u64,
    /// Trials whose op count exceeded OPS_FACTOR·(budget + 1).
    pub ops_budget_violations: u64,
    pub init_ops: u64,
    pub policy_snapshots: Vec<(u64, PolicySnapshot)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretSummary {
    pub seed: u64,
    pub horizon: u64,
    pub epsilon: f64,
    pub eta: f64,
    pub gamma: f64,
    pub final_regrets: Vec<f64>,
    pub final_regret_mean: f64,
    pub final_regret_stderr: f64,
    pub theorem_bound: f64,
    pub clamp_events: u64,
    pub max_trial_ops: u64,
    pub ops_budget_violations: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub replications: Vec<ReplicationResult>,
    pub summary: RegretSummary,
}

/// 1 + 2 √((6 ln T/ε + 9(e−2)/ε²) · |A| · ln|S| · T).
pub fn regret_bound(game: &Game, horizon: u64, epsilon: f64) -> f64 {
    let actions = game.tree.actions().len() as f64;
    let ln_s = (game.profiles.n(game.tree.root()) as f64).ln();
    1.0 + 2.0 * (noise_factor(horizon, epsilon) * actions * ln_s * horizon as f64).sqrt()
}

pub fn run_experiment(exp: &Experiment) -> Result<ExperimentResult> {
    if exp.replications == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    let schedule = compute_schedule(&exp.game, exp.horizon, exp.epsilon, exp.allow_large_epsilon)?;
    let replications = (0..exp.replications)
        .into_par_iter()
        .map(|k| run_replication(exp, schedule, k as u64))
        .collect::<Result<Vec<_>>>()?;

    let finals: Vec<f64> = replications.iter().map(|r| r.final_regret).collect();
    let (mean, stderr) = mean_stderr(&finals);
    let summary = RegretSummary {
        seed: exp.seed,
        horizon: exp.horizon,
        epsilon: exp.epsilon,
        eta: schedule.eta,
        gamma: schedule.gamma,
        final_regrets: finals,
        final_regret_mean: mean,
        final_regret_stderr: stderr,
        theorem_bound: regret_bound(&exp.game, exp.horizon, exp.epsilon),
        clamp_events: replications.iter().map(|r| r.clamp_events).sum(),
        max_trial_ops: replications.iter().map(|r| r.max_trial_ops).max().unwrap_or(0),
        ops_budget_violations: replications.iter().map(|r| r.ops_budget_violations).sum(),
    };
    Ok(ExperimentResult { replications, summary })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// The environment sequence replication `k` faces; depends only on the spec
/// and the environment seed.
pub fn replication_environments(exp: &Experiment, k: u64) -> Result<Vec<Environment>> {
    let env_seed = match &exp.env {
        EnvSpec::Iid { seed, .. } => *seed,
        _ => 0,
    };
    make_environment_sequence(&exp.game.tree, &exp.env, exp.horizon, &mut env_stream(env_seed, k))
}

pub fn run_replication(exp: &Experiment, schedule: Schedule, k: u64) -> Result<ReplicationResult> {
    let tree = &exp.game.tree;
    let envs = replication_environments(exp, k)?;
    let mut server = ServerState::new(Arc::clone(&exp.game), schedule);
    let mut server_rng = stream(exp.seed, k);
    let mut user_rng = user_stream(exp.seed, k);

    let mut losses = Vec::with_capacity(envs.len());
    let mut sigmas = Vec::with_capacity(envs.len());
    let mut max_trial_ops = 0;
    let mut violations = 0;
    let mut snapshots = Vec::new();

    for (i, mu) in envs.iter().enumerate() {
        let t = i as u64 + 1;
        let trial = |e: Error| Error::Trial {
            trial: t,
            source: Box::new(e),
        };
        let sigma = server.sample_strategy(&mut server_rng);
        // user side: only the report crosses back
        let outcome = play(tree, &sigma, mu).map_err(trial)?;
        let report = build_report(tree, &sigma, &outcome, exp.epsilon, t, &mut user_rng).map_err(trial)?;
        server.update_policy(&sigma, &report).map_err(trial)?;

        let ops = server.counters().tree_ops;
        max_trial_ops = max_trial_ops.max(ops);
        if ops > OPS_FACTOR * (complexity_budget(tree, &sigma) + 1) {
            violations += 1;
        }
        if exp.record_policy_every > 0 && t.is_multiple_of(exp.record_policy_every) {
            snapshots.push((t, server.snapshot_policy()));
        }
        losses.push(outcome.loss);
        sigmas.push(sigma.iter().collect::<Vec<_>>());
    }

    let curve = compute_regret_curve(tree, &losses, &envs)?;
    let mut cum = 0.0;
    let records: Vec<TrialRecord> = losses
        .iter()
        .zip(sigmas)
        .enumerate()
        .map(|(i, (&loss, sigma))| {
            cum += loss;
            TrialRecord {
                t: i as u64 + 1,
                sigma,
                loss,
                cum_loss: cum,
                best_fixed_cum: curve.best_fixed_cum[i],
                regret: curve.regret[i],
            }
        })
        .collect();
    Ok(ReplicationResult {
        final_regret: records.last().map_or(0.0, |r| r.regret),
        records,
        clamp_events: server.clamp_events(),
        max_trial_ops,
        ops_budget_violations: violations,
        init_ops: server.init_ops(),
        policy_snapshots: snapshots,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub checkpoints: Vec<usize>,
    pub best_fixed_cum: Vec<f64>,
    pub regret: Vec<f64>,
}

/// Checkpoints 1, 2, 4, … and T.
pub fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut c = 1;
    while c < horizon {
        out.push(c);
        c *= 2;
    }
    out.push(horizon);
    out
}

/// regret_t = Σ_{s≤t} ℓ_s − best fixed cumulative loss on the prefix.
///
/// The prefix minimum is solved exactly at each checkpoint; between
/// checkpoints the next checkpoint's minimizer is evaluated on the prefix.
pub fn compute_regret_curve(tree: &GameTree, losses: &[f64], envs: &[Environment]) -> Result<RegretCurve> {
    if losses.len() != envs.len() {
        return Err(Error::InvalidArgument(
            "losses and environments differ in length".into(),
        ));
    }
    if losses.is_empty() {
        return Ok(RegretCurve {
            checkpoints: vec![],
            best_fixed_cum: vec![],
            regret: vec![],
        });
    }
    let cps = checkpoints(losses.len());
    let mut best = vec![0.0; losses.len()];
    let mut start = 0;
    for &c in &cps {
        let result = best_fixed_dp(tree, &envs[..c])?;
        let mut acc = 0.0;
        for (s, &l) in result.per_trial_loss.iter().enumerate() {
            acc += l;
            if s >= start {
                best[s] = acc;
            }
        }
        start = c;
    }
    let mut cum = 0.0;
    let regret = losses
        .iter()
        .zip(&best)
        .map(|(l, b)| {
            cum += l;
            cum - b
        })
        .collect();
    Ok(RegretCurve {
        checkpoints: cps,
        best_fixed_cum: best,
        regret,
    })
}
