//! Privacy audit of the user's report mechanism.
//!
//! For a fixed strategy the report is a product of independent Laplace
//! coordinates whose means depend on the environment only through the last
//! action and its loss. The analytic bound is therefore the L1 distance between
//! the two mean vectors divided by the noise scale. The empirical check
//! histograms each coordinate under both environments and sums the per-coordinate
//! worst log count ratios; it can refute privacy, never certify it.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game_tree::{play, reachable_sets, Environment, GameTree, NodeId, ReducedStrategy};
use crate::user::LaplaceMechanism;

/// Bins need at least this many samples under both environments to count.
pub const MIN_BIN_COUNT: u64 = 50;
/// Lower tail mass trimmed from each side before binning.
pub const QUANTILE_CLIP: f64 = 0.001;

pub fn empirical_slack() -> f64 {
    3.0 * (2.0 / MIN_BIN_COUNT as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditResult {
    pub analytic_sup_log_ratio: f64,
    pub empirical_max_log_ratio: f64,
    pub bins_used: usize,
    pub slack: f64,
    /// Empirical ratio within ε + slack.
    pub empirical_ok: bool,
    pub pass: bool,
}

fn mean_vector(tree: &GameTree, sigma: &ReducedStrategy, mu: &Environment) -> Result<BTreeMap<NodeId, f64>> {
    let outcome = play(tree, sigma, mu)?;
    Ok(reachable_sets(tree, sigma)
        .actions
        .into_iter()
        .map(|a| (a, if a == outcome.last_action { outcome.loss } else { 0.0 }))
        .collect())
}

/// Supremum over reports of |ln p_μ(d) − ln p_μ'(d)| for the given mechanism.
pub fn analytic_log_ratio_bound_with(
    tree: &GameTree,
    sigma: &ReducedStrategy,
    mu: &Environment,
    mu_prime: &Environment,
    mechanism: LaplaceMechanism,
) -> Result<f64> {
    let m = mean_vector(tree, sigma, mu)?;
    let m2 = mean_vector(tree, sigma, mu_prime)?;
    Ok(m.iter().map(|(a, x)| (x - m2[a]).abs()).sum::<f64>() / mechanism.scale)
}

pub fn analytic_log_ratio_bound(
    tree: &GameTree,
    sigma: &ReducedStrategy,
    mu: &Environment,
    mu_prime: &Environment,
    epsilon: f64,
) -> Result<f64> {
    analytic_log_ratio_bound_with(tree, sigma, mu, mu_prime, LaplaceMechanism::for_epsilon(epsilon))
}

#[allow(clippy::too_many_arguments)]
pub fn empirical_dp_check<R: Rng + ?Sized>(
    tree: &GameTree,
    sigma: &ReducedStrategy,
    mu: &Environment,
    mu_prime: &Environment,
    epsilon: f64,
    samples: usize,
    bins: usize,
    rng: &mut R,
) -> Result<AuditResult> {
    audit_mechanism(
        tree,
        sigma,
        mu,
        mu_prime,
        epsilon,
        LaplaceMechanism::for_epsilon(epsilon),
        samples,
        bins,
        rng,
    )
}

/// Audits an arbitrary Laplace scale against the ε target (used for negative controls).
#[allow(clippy::too_many_arguments)]
pub fn audit_mechanism<R: Rng + ?Sized>(
    tree: &GameTree,
    sigma: &ReducedStrategy,
    mu: &Environment,
    mu_prime: &Environment,
    epsilon: f64,
    mechanism: LaplaceMechanism,
    samples: usize,
    bins: usize,
    rng: &mut R,
) -> Result<AuditResult> {
    if samples < 100_000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1e5 samples, got {samples}"
        )));
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be positive".into()));
    }
    sigma.validate(tree)?;
    let analytic = analytic_log_ratio_bound_with(tree, sigma, mu, mu_prime, mechanism)?;

    let draw = |env: &Environment, rng: &mut R| -> Result<BTreeMap<NodeId, Vec<f64>>> {
        let outcome = play(tree, sigma, env)?;
        let mut cols: BTreeMap<NodeId, Vec<f64>> = BTreeMap::new();
        for t in 0..samples {
            let report = mechanism.report(tree, sigma, &outcome, t as u64, rng)?;
            for (a, x) in report.values {
                cols.entry(a).or_insert_with(|| Vec::with_capacity(samples)).push(x);
            }
        }
        Ok(cols)
    };
    let p_cols = draw(mu, rng)?;
    let q_cols = draw(mu_prime, rng)?;

    let mut total = 0.0;
    let mut bins_used = 0;
    for (a, p) in &p_cols {
        let q = &q_cols[a];
        let (worst, used) = coordinate_max_log_ratio(p, q, bins);
        total += worst;
        bins_used += used;
    }
    if bins_used == 0 {
        return Err(Error::InsufficientSamples);
    }
    let slack = empirical_slack();
    let empirical_ok = total <= epsilon + slack;
    Ok(AuditResult {
        analytic_sup_log_ratio: analytic,
        empirical_max_log_ratio: total,
        bins_used,
        slack,
        empirical_ok,
        pass: analytic <= epsilon + 1e-9 && empirical_ok,
    })
}

/// Max over qualifying bins of |ln(p̂/q̂)| and the number of qualifying bins.
fn coordinate_max_log_ratio(p: &[f64], q: &[f64], bins: usize) -> (f64, usize) {
    let mut pooled: Vec<f64> = p.iter().chain(q).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let at = |f: f64| pooled[((pooled.len() - 1) as f64 * f).round() as usize];
    let (lo, hi) = (at(QUANTILE_CLIP), at(1.0 - QUANTILE_CLIP));
    if hi <= lo {
        return (0.0, 0);
    }
    let width = (hi - lo) / bins as f64;
    let histogram = |xs: &[f64]| {
        let mut h = vec![0u64; bins];
        for &x in xs {
            if x >= lo && x <= hi {
                let b = (((x - lo) / width) as usize).min(bins - 1);
                h[b] += 1;
            }
        }
        h
    };
    let hp = histogram(p);
    let hq = histogram(q);
    let scale = q.len() as f64 / p.len() as f64;
    let mut worst = 0.0f64;
    let mut used = 0;
    for (&cp, &cq) in hp.iter().zip(&hq) {
        if cp >= MIN_BIN_COUNT && cq >= MIN_BIN_COUNT {
            used += 1;
            worst = worst.max((cp as f64 * scale / cq as f64).ln().abs());
        }
    }
    (worst, used)
}
