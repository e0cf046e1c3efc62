//! Server side of the protocol: step-size schedule, the per-infoset policy, and
//! the sample / update pair run once per trial.
//!
//! Each infoset keeps unnormalized weights over its actions in a [`SumTree`],
//! so π(a) = w(a) / W(v). Sampling and updating only touch the infosets the
//! sampled strategy reaches, with O(log |C(v)|) segment-tree work at each.

use std::f64::consts::E;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::game_tree::{Game, GameTree, NodeId, ReducedStrategy};
use crate::rng::open_unit;
use crate::sumtree::SumTree;
use crate::user::UserReport;

/// Bound on |exponent| before exponentiation.
pub const EXPONENT_CLAMP: f64 = 700.0;
/// Weights at an infoset are renormalized when their total leaves this band.
pub const WEIGHT_RANGE: (f64, f64) = (1e-100, 1e100);
// Above this |ln ω| the infoset is renormalized before the multiply.
const PRE_NORMALIZE_LOG: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub epsilon: f64,
    pub horizon: u64,
    pub eta: f64,
    pub gamma: f64,
    /// Set when ε ≥ 1 was explicitly allowed.
    pub large_epsilon: bool,
}

/// 6 ln(T)/ε + 9(e−2)/ε², the factor shared by η and the regret bound.
pub fn noise_factor(horizon: u64, epsilon: f64) -> f64 {
    6.0 * (horizon as f64).ln() / epsilon + 9.0 * (E - 2.0) / (epsilon * epsilon)
}

pub fn compute_schedule(game: &Game, horizon: u64, epsilon: f64, allow_large_epsilon: bool) -> Result<Schedule> {
    if horizon < 2 {
        return Err(Error::HorizonTooShort(horizon));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let large_epsilon = epsilon >= 1.0;
    if large_epsilon && !allow_large_epsilon {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let root = game.tree.root();
    let n_root = game.profiles.n(root);
    if n_root < 2 {
        return Err(Error::InvalidArgument(format!("n(root) = {n_root} < 2")));
    }
    let m_root = game.profiles.m(root) as f64;
    let t = horizon as f64;
    let eta = (noise_factor(horizon, epsilon) * m_root * t / (n_root as f64).ln()).powf(-0.5);
    let gamma = 6.0 * t.ln() * eta / epsilon;
    Ok(Schedule {
        epsilon,
        horizon,
        eta,
        gamma,
        large_epsilon,
    })
}

/// Σ_{v ∈ N(σ)} ⌈log₂ |C(v)|⌉, the per-trial work scale.
pub fn complexity_budget(tree: &GameTree, sigma: &ReducedStrategy) -> u64 {
    sigma
        .iter()
        .map(|(v, _)| {
            let k = tree.children(v).len() as u64;
            k.next_power_of_two().trailing_zeros() as u64
        })
        .sum()
}

/// Per-trial instrumentation; reset when a new strategy is sampled.
#[derive(Debug, Clone, Default)]
pub struct TrialCounters {
    /// Segment-tree node reads and writes.
    pub tree_ops: u64,
    /// Game-tree nodes visited by sampling and updating.
    pub touched: Vec<NodeId>,
    pub clamp_events: u64,
    pub rescales: u64,
}

/// One infoset's step of the update, in the order steps complete (children first).
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateStep {
    pub infoset: NodeId,
    pub action: NodeId,
    /// Probability under π_t that the infoset is reached.
    pub reach: f64,
    /// π_t of the chosen action.
    pub pi: f64,
    /// Product of the children's returned normalizers.
    pub child_psi_product: f64,
    pub omega: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateTrace {
    pub steps: Vec<UpdateStep>,
}

impl UpdateTrace {
    pub fn root_step(&self) -> Option<&UpdateStep> {
        self.steps.last()
    }
}

/// π_t(a) for every action, indexed by node id (NaN at non-actions).
#[derive(Debug, Clone)]
pub struct PolicySnapshot {
    probs: Vec<f64>,
}

/// Bitwise equality, so the NaN placeholders compare equal.
impl PartialEq for PolicySnapshot {
    fn eq(&self, other: &Self) -> bool {
        self.probs.len() == other.probs.len()
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl PolicySnapshot {
    pub fn prob(&self, action: NodeId) -> f64 {
        self.probs[action.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

#[derive(Debug, Clone)]
pub struct ServerState {
    game: Arc<Game>,
    schedule: Schedule,
    trees: Vec<SumTree>,
    // node id -> ordinal of the infoset's sum tree
    tree_of: Vec<u32>,
    // node id -> position among its parent's children
    slot: Vec<u32>,
    trial: u64,
    counters: TrialCounters,
    init_ops: u64,
    clamp_total: u64,
}

impl ServerState {
    /// Builds π₁ with π₁(a) = n(a)/n(parent(a)).
    pub fn new(game: Arc<Game>, schedule: Schedule) -> Self {
        let tree = &game.tree;
        let profiles = &game.profiles;
        let mut tree_of = vec![u32::MAX; tree.len()];
        let mut slot = vec![u32::MAX; tree.len()];
        let mut trees = Vec::with_capacity(tree.infosets().len());
        let mut ops = 0u64;
        for &v in tree.infosets() {
            tree_of[v.index()] = trees.len() as u32;
            let nv = profiles.n(v) as f64;
            let weights: Vec<f64> = tree
                .children(v)
                .iter()
                .enumerate()
                .map(|(i, &a)| {
                    slot[a.index()] = i as u32;
                    profiles.n(a) as f64 / nv
                })
                .collect();
            ops += 1;
            trees.push(SumTree::new(&weights, &mut ops));
        }
        ServerState {
            game,
            schedule,
            trees,
            tree_of,
            slot,
            trial: 0,
            counters: TrialCounters::default(),
            init_ops: ops,
            clamp_total: 0,
        }
    }

    pub fn game(&self) -> &Arc<Game> {
        &self.game
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Number of completed updates.
    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub fn counters(&self) -> &TrialCounters {
        &self.counters
    }

    pub fn init_ops(&self) -> u64 {
        self.init_ops
    }

    pub fn clamp_events(&self) -> u64 {
        self.clamp_total
    }

    fn sum_tree(&self, infoset: NodeId) -> &SumTree {
        &self.trees[self.tree_of[infoset.index()] as usize]
    }

    /// π_t(a), uncounted.
    pub fn probability(&self, action: NodeId) -> f64 {
        let parent = self.game.tree.parent(action).expect("action has a parent");
        let st = self.sum_tree(parent);
        let mut scratch = 0;
        st.weight(self.slot[action.index()] as usize, &mut scratch) / st.total(&mut scratch)
    }

    /// Product of π_t over the actions on the root→`action` path, inclusive.
    pub fn reach_probability(&self, action: NodeId) -> f64 {
        let tree = &self.game.tree;
        let mut p = 1.0;
        let mut v = Some(action);
        while let Some(x) = v {
            if tree.is_action(x) {
                p *= self.probability(x);
            }
            v = tree.parent(x);
        }
        p
    }

    pub fn snapshot_policy(&self) -> PolicySnapshot {
        let tree = &self.game.tree;
        let mut probs = vec![f64::NAN; tree.len()];
        for &v in tree.infosets() {
            let st = self.sum_tree(v);
            let mut scratch = 0;
            let total = st.total(&mut scratch);
            for (&a, &w) in tree.children(v).iter().zip(st.weights()) {
                probs[a.index()] = w / total;
            }
        }
        PolicySnapshot { probs }
    }

    /// Draws σ_t from π_t by descending from the root. Resets the trial counters.
    pub fn sample_strategy<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ReducedStrategy {
        self.counters = TrialCounters::default();
        let game = Arc::clone(&self.game);
        let tree = &game.tree;
        let mut sigma = ReducedStrategy::new();
        let mut stack = vec![tree.root()];
        while let Some(v) = stack.pop() {
            let st = &self.trees[self.tree_of[v.index()] as usize];
            let i = st.sample(open_unit(rng), &mut self.counters.tree_ops);
            let a = tree.children(v)[i];
            sigma.insert(v, a);
            self.counters.touched.push(v);
            self.counters.touched.push(a);
            stack.extend(tree.infoset_children(a));
        }
        sigma
    }

    /// Runs the recursive update from the root with reach 1 and retains π at
    /// every infoset σ_t does not reach.
    pub fn update_policy(&mut self, sigma: &ReducedStrategy, report: &UserReport) -> Result<UpdateTrace> {
        self.check_report(sigma, report)?;
        let game = Arc::clone(&self.game);
        let mut trace = UpdateTrace::default();
        self.update_at(&game.tree, game.tree.root(), 1.0, sigma, report, &mut trace);
        self.trial += 1;
        Ok(trace)
    }

    fn check_report(&self, sigma: &ReducedStrategy, report: &UserReport) -> Result<()> {
        let tree = &self.game.tree;
        let mut count = 0usize;
        let mut stack = vec![tree.root()];
        while let Some(v) = stack.pop() {
            let a = sigma.get(v).ok_or(Error::StrategyUndefined(v))?;
            if !tree.children(v).contains(&a) {
                return Err(Error::InvalidStrategy(format!("{a} is not a child of {v}")));
            }
            match report.get(a) {
                None => return Err(Error::ReportDomain(format!("missing value for action {a}"))),
                Some(x) if !x.is_finite() => return Err(Error::NonFiniteReport(a)),
                Some(_) => {}
            }
            count += 1;
            stack.extend(tree.infoset_children(a));
        }
        if count != report.len() {
            return Err(Error::ReportDomain(format!(
                "{} values for {} reachable actions",
                report.len(),
                count
            )));
        }
        if count != sigma.len() {
            return Err(Error::InvalidStrategy(
                "domain differs from reachable infoset set".into(),
            ));
        }
        Ok(())
    }

    fn update_at(
        &mut self,
        tree: &GameTree,
        v: NodeId,
        reach: f64,
        sigma: &ReducedStrategy,
        report: &UserReport,
        trace: &mut UpdateTrace,
    ) -> f64 {
        let a = sigma.get(v).expect("checked");
        let ti = self.tree_of[v.index()] as usize;
        let i = self.slot[a.index()] as usize;
        let ops = &mut self.counters.tree_ops;
        let pi = self.trees[ti].weight(i, ops) / self.trees[ti].total(ops);
        self.counters.touched.push(v);
        self.counters.touched.push(a);

        let mut ln_child = 0.0;
        for c in tree.infoset_children(a) {
            ln_child += self.update_at(tree, c, pi * reach, sigma, report, trace).ln();
        }

        let d = report.get(a).expect("checked");
        let beta = self.game.profiles.beta(a);
        let denom = self.schedule.gamma * beta + pi * reach;
        let exponent = self.clamp(-self.schedule.eta * d / denom);
        let ln_omega = self.clamp(exponent + ln_child);
        let omega = ln_omega.exp();

        let ops = &mut self.counters.tree_ops;
        let st = &mut self.trees[ti];
        if ln_omega.abs() > PRE_NORMALIZE_LOG {
            let total = st.total(ops);
            st.rescale(1.0 / total, ops);
            self.counters.rescales += 1;
        }
        let w_old = st.weight(i, ops);
        let total_old = st.total(ops);
        let mut w_new = w_old * omega;
        if w_new < f64::MIN_POSITIVE {
            w_new = f64::MIN_POSITIVE;
            self.counters.clamp_events += 1;
            self.clamp_total += 1;
        }
        st.set(i, w_new, ops);
        let total_new = st.total(ops);
        let psi = total_new / total_old;
        if !(WEIGHT_RANGE.0..=WEIGHT_RANGE.1).contains(&total_new) {
            st.rescale(1.0 / total_new, ops);
            self.counters.rescales += 1;
        }

        trace.steps.push(UpdateStep {
            infoset: v,
            action: a,
            reach,
            pi,
            child_psi_product: ln_child.exp(),
            omega,
            psi,
        });
        psi
    }

    fn clamp(&mut self, x: f64) -> f64 {
        if x.abs() > EXPONENT_CLAMP {
            self.counters.clamp_events += 1;
            self.clamp_total += 1;
            x.clamp(-EXPONENT_CLAMP, EXPONENT_CLAMP)
        } else {
            x
        }
    }
}
