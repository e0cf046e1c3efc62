//! Test-side oracles shared by the integration and acceptance suites.
//!
//! Nothing here calls into the library's own enumeration or update code; the
//! point is to have a second, naive implementation to compare against.

#![allow(dead_code)]

use std::collections::BTreeMap;

use dpefb::harness::{random_tree, TreeShape};
use dpefb::rng::stream;
use dpefb::{GameTree, NodeId, ReducedStrategy, UserReport};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub const T4: &str = "\
0 I -
1 A 0
2 A 0
3 L 1 0.3
4 L 1 0.7
5 I 2
6 A 5
7 A 5
8 L 6 0.0
9 L 7 1.0
";

/// Infoset probability used for the random-tree corpus. Higher values make
/// strategy counts too large to enumerate at depth 4.
pub const CORPUS_INFOSET_PROB: f64 = 0.3;

/// Random trees with depth in 1..=max_depth and branching in 2..=max_branch.
pub fn corpus(seed: u64, count: usize, max_depth: u32, max_branch: u32) -> Vec<GameTree> {
    let mut rng = stream(seed, 0);
    (0..count)
        .map(|_| {
            let mut shape = TreeShape::new(rng.gen_range(1..=max_depth), rng.gen_range(2..=max_branch));
            shape.infoset_prob = CORPUS_INFOSET_PROB;
            random_tree(&shape, &mut rng)
        })
        .collect()
}

pub fn sigma(pairs: &[(u32, u32)]) -> ReducedStrategy {
    ReducedStrategy::from_pairs(pairs.iter().map(|&(v, a)| (NodeId(v), NodeId(a))))
}

fn infoset_children(tree: &GameTree, a: NodeId) -> Vec<NodeId> {
    tree.children(a)
        .iter()
        .copied()
        .filter(|&c| tree.is_infoset(c))
        .collect()
}

/// Calls `f` once per reduced strategy with its (infoset, action) choices.
///
/// Depth-first over a stack of undecided infosets: pick an action, push the
/// infosets below it, recurse, undo.
type Visit<'a> = dyn FnMut(&[(NodeId, NodeId)]) + 'a;

pub fn for_each_strategy(tree: &GameTree, mut f: impl FnMut(&[(NodeId, NodeId)])) {
    fn go(tree: &GameTree, pending: &mut Vec<NodeId>, chosen: &mut Vec<(NodeId, NodeId)>, f: &mut Visit) {
        let Some(v) = pending.pop() else {
            f(chosen);
            return;
        };
        for &a in tree.children(v) {
            let mark = pending.len();
            pending.extend(infoset_children(tree, a));
            chosen.push((v, a));
            go(tree, pending, chosen, f);
            chosen.pop();
            pending.truncate(mark);
        }
        pending.push(v);
    }
    go(tree, &mut vec![tree.root()], &mut Vec::new(), &mut f);
}

/// Every reduced strategy as a sorted (infoset, action) list.
pub fn naive_strategies(tree: &GameTree) -> Vec<Vec<(NodeId, NodeId)>> {
    let mut all = Vec::new();
    for_each_strategy(tree, |s| {
        let mut s = s.to_vec();
        s.sort();
        all.push(s);
    });
    all
}

/// Actions chosen by σ at infosets reachable under σ.
pub fn reached_actions(tree: &GameTree, sigma: &BTreeMap<NodeId, NodeId>) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        let a = sigma[&v];
        out.push(a);
        stack.extend(infoset_children(tree, a));
    }
    out
}

/// (min, max) over all environments μ of Σ_{a ∈ Z(μ)} f(a), where Z(μ) are
/// the actions reachable under μ whose μ-child is a leaf. Every infoset is
/// followed into all of its actions; at each action μ picks one child.
pub fn terminal_sum_range(tree: &GameTree, f: &dyn Fn(NodeId) -> f64) -> (f64, f64) {
    fn at_infoset(tree: &GameTree, v: NodeId, f: &dyn Fn(NodeId) -> f64) -> (f64, f64) {
        tree.children(v).iter().fold((0.0, 0.0), |(lo, hi), &a| {
            let (l, h) = at_action(tree, a, f);
            (lo + l, hi + h)
        })
    }
    fn at_action(tree: &GameTree, a: NodeId, f: &dyn Fn(NodeId) -> f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &c in tree.children(a) {
            let (l, h) = if tree.is_leaf(c) {
                (f(a), f(a))
            } else {
                at_infoset(tree, c, f)
            };
            lo = lo.min(l);
            hi = hi.max(h);
        }
        (lo, hi)
    }
    at_infoset(tree, tree.root(), f)
}

/// Test-side n(v): number of reduced sub-strategies at v.
pub fn naive_count(tree: &GameTree, v: NodeId) -> u128 {
    if tree.is_leaf(v) {
        return 1;
    }
    if tree.is_infoset(v) {
        tree.children(v).iter().map(|&a| naive_count(tree, a)).sum()
    } else {
        infoset_children(tree, v)
            .iter()
            .map(|&c| naive_count(tree, c))
            .product()
    }
}

/// Explicit policy over actions, indexed by node id.
#[derive(Debug, Clone)]
pub struct ReferencePolicy {
    pub pi: Vec<f64>,
}

pub struct ReferenceStep {
    pub infoset: NodeId,
    pub omega: f64,
    pub psi: f64,
}

impl ReferencePolicy {
    pub fn from_fn(tree: &GameTree, pi: impl Fn(NodeId) -> f64) -> Self {
        let mut v = vec![f64::NAN; tree.len()];
        for &a in tree.actions() {
            v[a.index()] = pi(a);
        }
        ReferencePolicy { pi: v }
    }

    /// One update, written step by step: recurse into children with the
    /// old reach, form ω, rescale every sibling by the explicit normalizer,
    /// return that normalizer. Steps are recorded children first.
    pub fn update(
        &mut self,
        tree: &GameTree,
        beta: &dyn Fn(NodeId) -> f64,
        eta: f64,
        gamma: f64,
        sigma: &ReducedStrategy,
        report: &UserReport,
    ) -> Vec<ReferenceStep> {
        let mut steps = Vec::new();
        self.visit(tree, beta, eta, gamma, sigma, report, tree.root(), 1.0, &mut steps);
        steps
    }

    #[allow(clippy::too_many_arguments)]
    fn visit(
        &mut self,
        tree: &GameTree,
        beta: &dyn Fn(NodeId) -> f64,
        eta: f64,
        gamma: f64,
        sigma: &ReducedStrategy,
        report: &UserReport,
        v: NodeId,
        x: f64,
        steps: &mut Vec<ReferenceStep>,
    ) -> f64 {
        let a = sigma.get(v).unwrap();
        let pi_a = self.pi[a.index()];
        let mut product = 1.0;
        for c in infoset_children(tree, a) {
            product *= self.visit(tree, beta, eta, gamma, sigma, report, c, pi_a * x, steps);
        }
        let d = report.get(a).unwrap();
        let omega = (-eta * d / (gamma * beta(a) + pi_a * x)).exp() * product;
        let norm = 1.0 - (1.0 - omega) * pi_a;
        for &b in tree.children(v) {
            let p = self.pi[b.index()];
            self.pi[b.index()] = if b == a { omega * p / norm } else { p / norm };
        }
        steps.push(ReferenceStep {
            infoset: v,
            omega,
            psi: norm,
        });
        norm
    }
}

/// Report over A(σ) with Laplace-like noise of the given scale added to a
/// random signal in [0, 1].
pub fn random_report<R: Rng>(tree: &GameTree, sigma: &ReducedStrategy, scale: f64, rng: &mut R) -> UserReport {
    let map: BTreeMap<NodeId, NodeId> = sigma.iter().collect();
    let values = reached_actions(tree, &map)
        .into_iter()
        .map(|a| {
            let u: f64 = rng.gen_range(-0.5..0.5);
            let noise = -scale * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln();
            (a, rng.gen::<f64>() + noise)
        })
        .collect();
    UserReport { trial: 0, values }
}

/// Pearson χ² statistic and upper-tail p-value for counts against
/// expected probabilities (which must sum to 1).
pub fn chi_square(observed: &[u64], probs: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let p = ChiSquared::new(df).unwrap().sf(stat);
    (stat, p)
}
