//! CSV and summary writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::experiment::{ExperimentResult, RegretSummary, TrialRecord};
use crate::error::Result;
use crate::game_tree::GameTree;
use crate::server::PolicySnapshot;

pub const TRIAL_HEADER: &str = "trial,loss,cum_loss,best_fixed_cum,regret";

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48);
    out.push_str(TRIAL_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.t, r.loss, r.cum_loss, r.best_fixed_cum, r.regret
        )
        .unwrap();
    }
    out
}

pub fn summary_text(s: &RegretSummary) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("seed", s.seed.to_string());
    kv("eta", s.eta.to_string());
    kv("gamma", s.gamma.to_string());
    kv("epsilon", s.epsilon.to_string());
    kv("T", s.horizon.to_string());
    kv("replications", s.final_regrets.len().to_string());
    kv("final_regret_mean", s.final_regret_mean.to_string());
    kv("final_regret_stderr", s.final_regret_stderr.to_string());
    kv("theorem_bound", s.theorem_bound.to_string());
    kv("clamp_events", s.clamp_events.to_string());
    kv("max_trial_ops", s.max_trial_ops.to_string());
    kv("ops_budget_violations", s.ops_budget_violations.to_string());
    out
}

pub fn policy_csv(tree: &GameTree, snapshots: &[(u64, PolicySnapshot)]) -> String {
    let mut out = String::from("trial,action,prob\n");
    for (t, snap) in snapshots {
        for &a in tree.actions() {
            writeln!(out, "{t},{a},{}", snap.prob(a)).unwrap();
        }
    }
    out
}

/// Writes `replication_<k>.csv`, optional `policy_<k>.csv`, and `summary.txt` into `dir`.
pub fn write_outputs(tree: &GameTree, result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (k, rep) in result.replications.iter().enumerate() {
        fs::write(dir.join(format!("replication_{k}.csv")), trials_csv(&rep.records))?;
        if !rep.policy_snapshots.is_empty() {
            fs::write(
                dir.join(format!("policy_{k}.csv")),
                policy_csv(tree, &rep.policy_snapshots),
            )?;
        }
    }
    fs::write(dir.join("summary.txt"), summary_text(&result.summary))?;
    Ok(())
}
