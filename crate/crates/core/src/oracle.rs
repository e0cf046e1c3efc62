//! Exhaustive and dynamic-programming ground truth over reduced strategies.
//!
//! Everything here is exponential in the worst case and guarded by an
//! enumeration cap; it exists to check the server at desk scale.

use crate::error::{Error, Result};
use crate::game_tree::{play, reachable_from, Environment, GameTree, NodeId, NodeKind, ReducedStrategy, TreeProfiles};

/// All reduced sub-strategies rooted at `anchor`.
#[derive(Debug, Clone)]
pub struct SubStrategyCatalog {
    pub anchor: NodeId,
    pub strategies: Vec<ReducedStrategy>,
}

#[derive(Debug, Clone)]
pub struct BestFixedResult {
    pub sigma_star: ReducedStrategy,
    pub total_loss: f64,
    pub per_trial_loss: Vec<f64>,
}

pub fn enumerate_reduced_strategies(
    tree: &GameTree,
    profiles: &TreeProfiles,
    anchor: NodeId,
    cap: u128,
) -> Result<SubStrategyCatalog> {
    let count = profiles.n(anchor);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    Ok(SubStrategyCatalog {
        anchor,
        strategies: enumerate_below(tree, anchor),
    })
}

fn enumerate_below(tree: &GameTree, v: NodeId) -> Vec<ReducedStrategy> {
    match tree.kind(v) {
        NodeKind::Leaf { .. } => vec![ReducedStrategy::new()],
        NodeKind::Infoset => {
            let mut out = Vec::new();
            for &a in tree.children(v) {
                for mut s in enumerate_below(tree, a) {
                    s.insert(v, a);
                    out.push(s);
                }
            }
            out
        }
        NodeKind::Action => {
            let mut acc = vec![ReducedStrategy::new()];
            for c in tree.infoset_children(v) {
                let sub = enumerate_below(tree, c);
                let mut next = Vec::with_capacity(acc.len() * sub.len());
                for base in &acc {
                    for s in &sub {
                        let mut merged = base.clone();
                        merged.extend(s);
                        next.push(merged);
                    }
                }
                acc = next;
            }
            acc
        }
    }
}

/// Best fixed reduced strategy by recursion over (node, trial subset).
///
/// Ties go to the lowest action id at every infoset.
pub fn best_fixed_dp(tree: &GameTree, envs: &[Environment]) -> Result<BestFixedResult> {
    if envs.is_empty() {
        return Err(Error::InvalidArgument("empty environment list".into()));
    }
    let trials: Vec<u32> = (0..envs.len() as u32).collect();
    let (_, sigma_star) = best_at_infoset(tree, envs, tree.root(), &trials);
    finish(tree, envs, sigma_star)
}

fn best_at_infoset(tree: &GameTree, envs: &[Environment], v: NodeId, trials: &[u32]) -> (f64, ReducedStrategy) {
    let mut best: Option<(f64, NodeId, ReducedStrategy)> = None;
    for &a in tree.children(v) {
        let (loss, s) = best_at_action(tree, envs, a, trials);
        let better = match &best {
            None => true,
            Some((bl, ba, _)) => loss < *bl || (loss == *bl && a < *ba),
        };
        if better {
            best = Some((loss, a, s));
        }
    }
    let (loss, a, mut s) = best.expect("infoset has children");
    s.insert(v, a);
    (loss, s)
}

fn best_at_action(tree: &GameTree, envs: &[Environment], a: NodeId, trials: &[u32]) -> (f64, ReducedStrategy) {
    let children = tree.children(a);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); children.len()];
    let mut total = 0.0;
    for &t in trials {
        let next = envs[t as usize].get(a);
        match tree.leaf_loss(next) {
            Some(loss) => total += loss,
            None => {
                let slot = children.iter().position(|&c| c == next).unwrap();
                buckets[slot].push(t);
            }
        }
    }
    let mut strategy = ReducedStrategy::new();
    for (slot, &c) in children.iter().enumerate() {
        if tree.is_infoset(c) {
            let (loss, s) = best_at_infoset(tree, envs, c, &buckets[slot]);
            total += loss;
            strategy.extend(&s);
        }
    }
    (total, strategy)
}

/// Exhaustive minimum over every reduced strategy. Ties keep the first
/// strategy in enumeration order.
pub fn best_fixed_bruteforce(
    tree: &GameTree,
    profiles: &TreeProfiles,
    envs: &[Environment],
    cap: u128,
) -> Result<BestFixedResult> {
    if envs.is_empty() {
        return Err(Error::InvalidArgument("empty environment list".into()));
    }
    let catalog = enumerate_reduced_strategies(tree, profiles, tree.root(), cap)?;
    let mut best: Option<(f64, ReducedStrategy)> = None;
    for s in catalog.strategies {
        let mut total = 0.0;
        for mu in envs {
            total += play(tree, &s, mu)?.loss;
        }
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, s));
        }
    }
    finish(tree, envs, best.unwrap().1)
}

fn finish(tree: &GameTree, envs: &[Environment], sigma_star: ReducedStrategy) -> Result<BestFixedResult> {
    let per_trial_loss = envs
        .iter()
        .map(|mu| play(tree, &sigma_star, mu).map(|o| o.loss))
        .collect::<Result<Vec<_>>>()?;
    Ok(BestFixedResult {
        sigma_star,
        total_loss: per_trial_loss.iter().sum(),
        per_trial_loss,
    })
}

/// Σ over sub-strategies σ anchored at `action` of Π_{a' ∈ A(σ)} π(a').
pub fn policy_marginal(
    tree: &GameTree,
    profiles: &TreeProfiles,
    pi: impl Fn(NodeId) -> f64,
    action: NodeId,
    cap: u128,
) -> Result<f64> {
    if !tree.is_action(action) {
        return Err(Error::InvalidArgument(format!("{action} is not an action")));
    }
    let catalog = enumerate_reduced_strategies(tree, profiles, action, cap)?;
    Ok(catalog
        .strategies
        .iter()
        .map(|s| {
            reachable_from(tree, s, action)
                .actions
                .iter()
                .map(|&a| pi(a))
                .product::<f64>()
        })
        .sum())
}

/// Σ_{a ∈ A(σ)} ln π(a).
pub fn potential_delta(tree: &GameTree, pi: impl Fn(NodeId) -> f64, sigma: &ReducedStrategy) -> Result<f64> {
    let reach = reachable_from(tree, sigma, tree.root());
    let mut acc = 0.0;
    for a in reach.actions {
        let p = pi(a);
        if p.is_nan() || p <= 0.0 {
            return Err(Error::NonPositiveProbability(a));
        }
        acc += p.ln();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_tree::{compute_profiles, enumerate_environments, fixtures::T4, parse_tree};

    fn t4() -> (GameTree, TreeProfiles) {
        let tree = parse_tree(T4).unwrap();
        let p = compute_profiles(&tree).unwrap();
        (tree, p)
    }

    fn sigma(pairs: &[(u32, u32)]) -> ReducedStrategy {
        ReducedStrategy::from_pairs(pairs.iter().map(|&(v, a)| (NodeId(v), NodeId(a))))
    }

    fn pi1<'a>(tree: &GameTree, p: &'a TreeProfiles) -> impl Fn(NodeId) -> f64 + 'a {
        let tree = tree.clone();
        move |a| p.initial_probability(&tree, a)
    }

    #[test]
    fn enumerate_t4() {
        let (tree, p) = t4();
        let root = enumerate_reduced_strategies(&tree, &p, tree.root(), 100).unwrap();
        assert_eq!(
            root.strategies,
            vec![sigma(&[(0, 1)]), sigma(&[(0, 2), (5, 6)]), sigma(&[(0, 2), (5, 7)])]
        );
        let a1 = enumerate_reduced_strategies(&tree, &p, NodeId(1), 100).unwrap();
        assert_eq!(a1.strategies, vec![ReducedStrategy::new()]);
        let v2 = enumerate_reduced_strategies(&tree, &p, NodeId(5), 100).unwrap();
        assert_eq!(v2.strategies.len(), 2);
        assert!(enumerate_reduced_strategies(&tree, &p, tree.root(), 2).is_err());
    }

    #[test]
    fn best_fixed_t4() {
        let (tree, p) = t4();
        let envs = enumerate_environments(&tree, 10).unwrap();
        let dp = best_fixed_dp(&tree, &envs).unwrap();
        assert_eq!(dp.sigma_star, sigma(&[(0, 2), (5, 6)]));
        assert_eq!(dp.total_loss, 0.0);
        assert_eq!(dp.per_trial_loss, vec![0.0, 0.0]);
        let bf = best_fixed_bruteforce(&tree, &p, &envs, 100).unwrap();
        assert_eq!(bf.total_loss, 0.0);
        assert_eq!(bf.sigma_star, dp.sigma_star);

        let one = best_fixed_dp(&tree, &envs[..1]).unwrap();
        assert_eq!(one.total_loss, 0.0);
        assert_eq!(one.sigma_star, dp.sigma_star);
        assert!(best_fixed_dp(&tree, &[]).is_err());
    }

    #[test]
    fn all_unit_losses_tie_to_lowest_ids() {
        let tree = parse_tree(&T4.replace("0.3", "1").replace("0.7", "1").replace("0.0", "1")).unwrap();
        let envs = enumerate_environments(&tree, 10).unwrap();
        let dp = best_fixed_dp(&tree, &envs).unwrap();
        assert_eq!(dp.total_loss, envs.len() as f64);
        assert_eq!(dp.sigma_star, sigma(&[(0, 1)]));
    }

    #[test]
    fn bandit_best_arm() {
        let tree = parse_tree("0 I -\n1 A 0\n2 A 0\n3 A 0\n4 L 1 0.9\n5 L 2 0.2\n6 L 3 0.4\n").unwrap();
        let p = compute_profiles(&tree).unwrap();
        let envs = enumerate_environments(&tree, 10).unwrap();
        let envs = vec![envs[0].clone(); 3];
        let bf = best_fixed_bruteforce(&tree, &p, &envs, 10).unwrap();
        assert_eq!(bf.sigma_star, sigma(&[(0, 2)]));
        assert!((bf.total_loss - 0.6).abs() < 1e-12);
    }

    #[test]
    fn marginal_t4() {
        let (tree, p) = t4();
        let pi = pi1(&tree, &p);
        let m = policy_marginal(&tree, &p, &pi, NodeId(2), 100).unwrap();
        assert!((m - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(policy_marginal(&tree, &p, &pi, NodeId(1), 100).unwrap(), pi(NodeId(1)));
        assert!(policy_marginal(&tree, &p, &pi, NodeId(5), 100).is_err());
    }

    #[test]
    fn potential_t4() {
        let (tree, p) = t4();
        let pi = pi1(&tree, &p);
        let d = potential_delta(&tree, &pi, &sigma(&[(0, 2), (5, 6)])).unwrap();
        assert!((d + 3f64.ln()).abs() < 1e-12);
        let d = potential_delta(&tree, &pi, &sigma(&[(0, 1)])).unwrap();
        assert!((d - (1.0f64 / 3.0).ln()).abs() < 1e-12);
        let zero = |_a: NodeId| 0.0;
        assert!(matches!(
            potential_delta(&tree, zero, &sigma(&[(0, 1)])),
            Err(Error::NonPositiveProbability(_))
        ));
    }

    #[test]
    fn uniform_bandit_potential() {
        let tree = parse_tree("0 I -\n1 A 0\n2 A 0\n3 A 0\n4 L 1 0\n5 L 2 0\n6 L 3 0\n").unwrap();
        let d = potential_delta(&tree, |_| 1.0 / 3.0, &sigma(&[(0, 3)])).unwrap();
        assert!((d + 3f64.ln()).abs() < 1e-12);
    }
}
