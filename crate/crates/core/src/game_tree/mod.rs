//! One-sided extensive-form game model.
//!
//! The tree alternates learner infosets and learner actions; an action's children
//! are the infosets or leaves an opponent/chance resolution can lead to. An
//! [`Environment`] fixes that resolution for every action, a [`ReducedStrategy`]
//! fixes the learner's choice at exactly the infosets it can reach.

mod parse;
mod profiles;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use parse::{format_environments, format_tree, parse_environments, parse_tree};
pub use profiles::{compute_profiles, TreeProfiles};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Infoset,
    Action,
    Leaf { loss: f64 },
}

impl NodeKind {
    pub fn tag(&self) -> char {
        match self {
            NodeKind::Infoset => 'I',
            NodeKind::Action => 'A',
            NodeKind::Leaf { .. } => 'L',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
}

/// Structural rule broken by a [`GameTree`], reported against a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub node: NodeId,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    RootNotInfoset,
    RootHasParent,
    InfosetChildNotAction(NodeId),
    ActionChildIsAction(NodeId),
    TooFewInfosetChildren(usize),
    ActionWithoutChildren,
    LeafWithChildren,
    LossOutOfRange(f64),
    DanglingReference(u32),
    ParentMismatch(NodeId),
    Unreachable,
    Revisited,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: ", self.node)?;
        match &self.kind {
            ViolationKind::RootNotInfoset => write!(f, "root must be infoset"),
            ViolationKind::RootHasParent => write!(f, "root must not have a parent"),
            ViolationKind::InfosetChildNotAction(c) => {
                write!(f, "infoset child {c} is not an action")
            }
            ViolationKind::ActionChildIsAction(c) => {
                write!(f, "action child {c} must be an infoset or leaf")
            }
            ViolationKind::TooFewInfosetChildren(k) => {
                write!(f, "|C(v)| > 1 required (has {k})")
            }
            ViolationKind::ActionWithoutChildren => write!(f, "action must have a child"),
            ViolationKind::LeafWithChildren => write!(f, "leaf must not have children"),
            ViolationKind::LossOutOfRange(x) => write!(f, "loss out of range: {x}"),
            ViolationKind::DanglingReference(i) => write!(f, "reference to missing node {i}"),
            ViolationKind::ParentMismatch(p) => {
                write!(f, "parent link disagrees with children of {p}")
            }
            ViolationKind::Unreachable => write!(f, "not reachable from root"),
            ViolationKind::Revisited => write!(f, "reached twice (not a tree)"),
        }
    }
}

/// Rooted game tree with dense node ids. Children keep file order.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTree {
    nodes: Vec<Node>,
    root: NodeId,
    actions: Vec<NodeId>,
    infosets: Vec<NodeId>,
}

impl GameTree {
    /// Builds a tree without checking the structural rules; see [`validate_tree`].
    pub fn from_nodes_unchecked(nodes: Vec<Node>, root: NodeId) -> Self {
        let actions = collect_kind(&nodes, |k| matches!(k, NodeKind::Action));
        let infosets = collect_kind(&nodes, |k| matches!(k, NodeKind::Infoset));
        GameTree {
            nodes,
            root,
            actions,
            infosets,
        }
    }

    /// Builds and validates.
    pub fn from_nodes(nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        let tree = Self::from_nodes_unchecked(nodes, root);
        validate_tree(&tree).map_err(Error::InvalidTree)?;
        Ok(tree)
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id.index()].kind
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.index()].children
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn is_infoset(&self, id: NodeId) -> bool {
        matches!(self.kind(id), NodeKind::Infoset)
    }

    pub fn is_action(&self, id: NodeId) -> bool {
        matches!(self.kind(id), NodeKind::Action)
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        matches!(self.kind(id), NodeKind::Leaf { .. })
    }

    pub fn leaf_loss(&self, id: NodeId) -> Option<f64> {
        match self.kind(id) {
            NodeKind::Leaf { loss } => Some(loss),
            _ => None,
        }
    }

    /// All action ids in ascending order.
    pub fn actions(&self) -> &[NodeId] {
        &self.actions
    }

    /// All infoset ids in ascending order.
    pub fn infosets(&self) -> &[NodeId] {
        &self.infosets
    }

    /// Infoset children of a node (for an action: the infosets it may lead to).
    pub fn infoset_children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children(id).iter().copied().filter(move |&c| self.is_infoset(c))
    }

    /// Nodes in breadth-first order from the root; parents precede children.
    pub fn bfs_order(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.len());
        order.push(self.root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            order.extend_from_slice(self.children(v));
        }
        order
    }
}

fn collect_kind(nodes: &[Node], pred: impl Fn(&NodeKind) -> bool) -> Vec<NodeId> {
    nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| pred(&n.kind))
        .map(|(i, _)| NodeId(i as u32))
        .collect()
}

/// Checks every structural rule and reports all violations found.
pub fn validate_tree(tree: &GameTree) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let n = tree.nodes.len();
    let push = |out: &mut Vec<Violation>, node: NodeId, kind| out.push(Violation { node, kind });

    if tree.root.index() >= n {
        push(&mut out, tree.root, ViolationKind::DanglingReference(tree.root.0));
        return Err(out);
    }
    if !tree.is_infoset(tree.root) {
        push(&mut out, tree.root, ViolationKind::RootNotInfoset);
    }
    if tree.parent(tree.root).is_some() {
        push(&mut out, tree.root, ViolationKind::RootHasParent);
    }

    let mut links_ok = true;
    for (i, node) in tree.nodes.iter().enumerate() {
        let id = NodeId(i as u32);
        for &c in &node.children {
            if c.index() >= n {
                push(&mut out, id, ViolationKind::DanglingReference(c.0));
                links_ok = false;
                continue;
            }
            if tree.parent(c) != Some(id) {
                push(&mut out, c, ViolationKind::ParentMismatch(id));
                links_ok = false;
            }
        }
        if let Some(p) = node.parent {
            if p.index() >= n {
                push(&mut out, id, ViolationKind::DanglingReference(p.0));
                links_ok = false;
            } else if !tree.children(p).contains(&id) {
                push(&mut out, id, ViolationKind::ParentMismatch(p));
                links_ok = false;
            }
        }
        match node.kind {
            NodeKind::Infoset => {
                if node.children.len() < 2 {
                    push(&mut out, id, ViolationKind::TooFewInfosetChildren(node.children.len()));
                }
                for &c in node.children.iter().filter(|c| c.index() < n) {
                    if !tree.is_action(c) {
                        push(&mut out, id, ViolationKind::InfosetChildNotAction(c));
                    }
                }
            }
            NodeKind::Action => {
                if node.children.is_empty() {
                    push(&mut out, id, ViolationKind::ActionWithoutChildren);
                }
                for &c in node.children.iter().filter(|c| c.index() < n) {
                    if tree.is_action(c) {
                        push(&mut out, id, ViolationKind::ActionChildIsAction(c));
                    }
                }
            }
            NodeKind::Leaf { loss } => {
                if !node.children.is_empty() {
                    push(&mut out, id, ViolationKind::LeafWithChildren);
                }
                if !(0.0..=1.0).contains(&loss) {
                    push(&mut out, id, ViolationKind::LossOutOfRange(loss));
                }
            }
        }
    }

    if links_ok {
        let mut seen = vec![false; n];
        let mut stack = vec![tree.root];
        while let Some(v) = stack.pop() {
            if seen[v.index()] {
                push(&mut out, v, ViolationKind::Revisited);
                continue;
            }
            seen[v.index()] = true;
            stack.extend_from_slice(tree.children(v));
        }
        for (i, s) in seen.iter().enumerate() {
            if !s {
                push(&mut out, NodeId(i as u32), ViolationKind::Unreachable);
            }
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A validated tree together with its per-node profiles. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct Game {
    pub tree: GameTree,
    pub profiles: TreeProfiles,
}

impl Game {
    pub fn new(tree: GameTree) -> Result<Arc<Self>> {
        validate_tree(&tree).map_err(Error::InvalidTree)?;
        let profiles = compute_profiles(&tree)?;
        Ok(Arc::new(Game { tree, profiles }))
    }

    pub fn parse(text: &str) -> Result<Arc<Self>> {
        Self::new(parse_tree(text)?)
    }
}

/// Partial map infoset -> chosen action whose domain is its own reachable set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedStrategy {
    choices: BTreeMap<NodeId, NodeId>,
}

impl ReducedStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        ReducedStrategy {
            choices: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, infoset: NodeId) -> Option<NodeId> {
        self.choices.get(&infoset).copied()
    }

    pub fn insert(&mut self, infoset: NodeId, action: NodeId) {
        self.choices.insert(infoset, action);
    }

    pub fn extend(&mut self, other: &ReducedStrategy) {
        self.choices.extend(other.choices.iter().map(|(&k, &v)| (k, v)));
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    /// (infoset, action) pairs in infoset-id order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.choices.iter().map(|(&k, &v)| (k, v))
    }

    /// Checks that choices are legal and the domain is exactly the reachable
    /// infoset set below `anchor`.
    pub fn validate_from(&self, tree: &GameTree, anchor: NodeId) -> Result<()> {
        for (v, a) in self.iter() {
            if v.index() >= tree.len() || !tree.is_infoset(v) {
                return Err(Error::InvalidStrategy(format!("{v} is not an infoset")));
            }
            if !tree.children(v).contains(&a) {
                return Err(Error::InvalidStrategy(format!("{a} is not a child of {v}")));
            }
        }
        let reach = reachable_from(tree, self, anchor);
        if reach.infosets.len() != self.len() || reach.infosets.iter().any(|v| self.get(*v).is_none()) {
            return Err(Error::InvalidStrategy(
                "domain differs from reachable infoset set".into(),
            ));
        }
        Ok(())
    }

    pub fn validate(&self, tree: &GameTree) -> Result<()> {
        self.validate_from(tree, tree.root())
    }
}

impl fmt::Display for ReducedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, a) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{v}={a}")?;
        }
        Ok(())
    }
}

/// Total map action -> child, fixed for one trial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Environment {
    // Indexed by node id; `Some` exactly at actions.
    choices: Vec<Option<NodeId>>,
}

impl Environment {
    pub fn new(tree: &GameTree, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut choices = vec![None; tree.len()];
        for (a, c) in pairs {
            if a.index() >= tree.len() || !tree.is_action(a) {
                return Err(Error::InvalidEnvironment(format!("{a} is not an action")));
            }
            if !tree.children(a).contains(&c) {
                return Err(Error::InvalidEnvironment(format!("{c} is not a child of {a}")));
            }
            if choices[a.index()].replace(c).is_some() {
                return Err(Error::InvalidEnvironment(format!("action {a} assigned twice")));
            }
        }
        if let Some(a) = tree.actions().iter().find(|a| choices[a.index()].is_none()) {
            return Err(Error::InvalidEnvironment(format!("action {a} unassigned")));
        }
        Ok(Environment { choices })
    }

    pub fn get(&self, action: NodeId) -> NodeId {
        self.choices[action.index()].expect("environment queried at a non-action")
    }

    /// (action, child) pairs in action-id order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.choices
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (NodeId(i as u32), c)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayOutcome {
    pub path: Vec<NodeId>,
    pub last_action: NodeId,
    pub loss: f64,
}

/// Plays `(sigma, mu)` from the root to a leaf.
pub fn play(tree: &GameTree, sigma: &ReducedStrategy, mu: &Environment) -> Result<PlayOutcome> {
    let mut path = Vec::new();
    let mut last_action = None;
    let mut v = tree.root();
    loop {
        path.push(v);
        match tree.kind(v) {
            NodeKind::Infoset => {
                v = sigma.get(v).ok_or(Error::StrategyUndefined(v))?;
            }
            NodeKind::Action => {
                last_action = Some(v);
                v = mu.get(v);
            }
            NodeKind::Leaf { loss } => {
                return Ok(PlayOutcome {
                    path,
                    last_action: last_action.expect("validated tree has an action above every leaf"),
                    loss,
                });
            }
        }
    }
}

/// Reachable infosets N(σ) and actions A(σ).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReachableSets {
    pub infosets: BTreeSet<NodeId>,
    pub actions: BTreeSet<NodeId>,
}

pub fn reachable_sets(tree: &GameTree, sigma: &ReducedStrategy) -> ReachableSets {
    reachable_from(tree, sigma, tree.root())
}

/// Closure below an arbitrary anchor (infoset or action).
pub fn reachable_from(tree: &GameTree, sigma: &ReducedStrategy, anchor: NodeId) -> ReachableSets {
    let mut out = ReachableSets::default();
    let mut stack = vec![anchor];
    while let Some(v) = stack.pop() {
        match tree.kind(v) {
            NodeKind::Infoset => {
                out.infosets.insert(v);
                if let Some(a) = sigma.get(v) {
                    stack.push(a);
                }
            }
            NodeKind::Action => {
                out.actions.insert(v);
                stack.extend(tree.infoset_children(v));
            }
            NodeKind::Leaf { .. } => {}
        }
    }
    out
}

/// Z(μ): actions reachable under μ whose μ-successor is a leaf.
pub fn terminal_actions(tree: &GameTree, mu: &Environment) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let mut stack = vec![tree.root()];
    while let Some(v) = stack.pop() {
        match tree.kind(v) {
            NodeKind::Infoset => stack.extend_from_slice(tree.children(v)),
            NodeKind::Action => {
                let next = mu.get(v);
                if tree.is_leaf(next) {
                    out.insert(v);
                } else {
                    stack.push(next);
                }
            }
            NodeKind::Leaf { .. } => {}
        }
    }
    out
}

/// Number of environments, Π_a |C(a)|, or `None` on overflow.
pub fn environment_count(tree: &GameTree) -> Option<u128> {
    tree.actions()
        .iter()
        .try_fold(1u128, |acc, &a| acc.checked_mul(tree.children(a).len() as u128))
}

/// All environments, lexicographic by action id (lowest action id most significant,
/// children in file order).
pub fn enumerate_environments(tree: &GameTree, cap: u128) -> Result<Vec<Environment>> {
    let count = environment_count(tree).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let actions = tree.actions();
    let mut digits = vec![0usize; actions.len()];
    let mut out = Vec::with_capacity(count as usize);
    loop {
        let mut choices = vec![None; tree.len()];
        for (&a, &d) in actions.iter().zip(&digits) {
            choices[a.index()] = Some(tree.children(a)[d]);
        }
        out.push(Environment { choices });
        // odometer, least significant digit last
        let mut i = actions.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < tree.children(actions[i]).len() {
                break;
            }
            digits[i] = 0;
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::T4;
    use super::*;

    fn id(i: u32) -> NodeId {
        NodeId(i)
    }

    fn sigma(pairs: &[(u32, u32)]) -> ReducedStrategy {
        ReducedStrategy::from_pairs(pairs.iter().map(|&(v, a)| (id(v), id(a))))
    }

    fn t4() -> GameTree {
        parse_tree(T4).unwrap()
    }

    fn mu(tree: &GameTree, a1_child: u32) -> Environment {
        Environment::new(
            tree,
            [(1, a1_child), (2, 5), (6, 8), (7, 9)]
                .iter()
                .map(|&(a, c)| (id(a), id(c))),
        )
        .unwrap()
    }

    #[test]
    fn play_t4() {
        let tree = t4();
        let out = play(&tree, &sigma(&[(0, 1)]), &mu(&tree, 3)).unwrap();
        assert_eq!(out.loss, 0.3);
        assert_eq!(out.last_action, id(1));
        assert_eq!(out.path, vec![id(0), id(1), id(3)]);

        for m in [mu(&tree, 3), mu(&tree, 4)] {
            let out = play(&tree, &sigma(&[(0, 2), (5, 7)]), &m).unwrap();
            assert_eq!((out.loss, out.last_action), (1.0, id(7)));
            let out = play(&tree, &sigma(&[(0, 2), (5, 6)]), &m).unwrap();
            assert_eq!((out.loss, out.last_action), (0.0, id(6)));
        }
    }

    #[test]
    fn play_missing_choice_errors() {
        let tree = t4();
        let err = play(&tree, &sigma(&[(0, 2)]), &mu(&tree, 3)).unwrap_err();
        assert!(matches!(err, Error::StrategyUndefined(NodeId(5))));
    }

    #[test]
    fn reachable_t4() {
        let tree = t4();
        let r = reachable_sets(&tree, &sigma(&[(0, 2), (5, 6)]));
        assert_eq!(r.infosets, [id(0), id(5)].into());
        assert_eq!(r.actions, [id(2), id(6)].into());
        let r = reachable_sets(&tree, &sigma(&[(0, 1)]));
        assert_eq!(r.infosets, [id(0)].into());
        assert_eq!(r.actions, [id(1)].into());
        assert!(reachable_sets(&tree, &ReducedStrategy::new())
            .infosets
            .contains(&tree.root()));
    }

    #[test]
    fn terminal_actions_t4() {
        let tree = t4();
        let z = terminal_actions(&tree, &mu(&tree, 3));
        assert_eq!(z, [id(1), id(6), id(7)].into());
    }

    #[test]
    fn environments_t4() {
        let tree = t4();
        let envs = enumerate_environments(&tree, 1_000_000).unwrap();
        assert_eq!(envs.len(), 2);
        assert_eq!(envs[0], mu(&tree, 3));
        assert_eq!(envs[1], mu(&tree, 4));
        assert!(matches!(
            enumerate_environments(&tree, 1),
            Err(Error::CapExceeded { count: 2, cap: 1 })
        ));
    }

    #[test]
    fn single_environment_when_actions_have_one_child() {
        let tree = parse_tree("0 I -\n1 A 0\n2 A 0\n3 L 1 0\n4 L 2 1\n").unwrap();
        assert_eq!(enumerate_environments(&tree, 10).unwrap().len(), 1);
    }

    #[test]
    fn validate_reports_root_action() {
        let nodes = vec![
            Node {
                kind: NodeKind::Action,
                parent: None,
                children: vec![id(1)],
            },
            Node {
                kind: NodeKind::Leaf { loss: 0.5 },
                parent: Some(id(0)),
                children: vec![],
            },
        ];
        let tree = GameTree::from_nodes_unchecked(nodes, id(0));
        let v = validate_tree(&tree).unwrap_err();
        assert!(v.iter().any(|x| x.kind == ViolationKind::RootNotInfoset));
        assert!(v.iter().any(|x| x.to_string().contains("root must be infoset")));
    }

    #[test]
    fn validate_reports_single_child_infoset() {
        let nodes = vec![
            Node {
                kind: NodeKind::Infoset,
                parent: None,
                children: vec![id(1)],
            },
            Node {
                kind: NodeKind::Action,
                parent: Some(id(0)),
                children: vec![id(2)],
            },
            Node {
                kind: NodeKind::Leaf { loss: 0.5 },
                parent: Some(id(1)),
                children: vec![],
            },
        ];
        let tree = GameTree::from_nodes_unchecked(nodes, id(0));
        let v = validate_tree(&tree).unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].node, id(0));
        assert!(v[0].to_string().contains("|C(v)| > 1 required"));
    }

    #[test]
    fn validate_reports_cycles_and_bad_links() {
        let nodes = vec![
            Node {
                kind: NodeKind::Infoset,
                parent: None,
                children: vec![id(1), id(2)],
            },
            Node {
                kind: NodeKind::Action,
                parent: Some(id(0)),
                children: vec![id(3)],
            },
            Node {
                kind: NodeKind::Action,
                parent: Some(id(1)),
                children: vec![id(3)],
            },
            Node {
                kind: NodeKind::Leaf { loss: 0.5 },
                parent: Some(id(1)),
                children: vec![],
            },
        ];
        let tree = GameTree::from_nodes_unchecked(nodes, id(0));
        let v = validate_tree(&tree).unwrap_err();
        assert!(v.iter().any(|x| matches!(x.kind, ViolationKind::ParentMismatch(_))));
    }

    #[test]
    fn strategy_validation() {
        let tree = t4();
        assert!(sigma(&[(0, 2), (5, 6)]).validate(&tree).is_ok());
        assert!(sigma(&[(0, 1)]).validate(&tree).is_ok());
        // extra infoset outside the closure
        assert!(sigma(&[(0, 1), (5, 6)]).validate(&tree).is_err());
        // missing reachable infoset
        assert!(sigma(&[(0, 2)]).validate(&tree).is_err());
        // illegal choice
        assert!(sigma(&[(0, 6)]).validate(&tree).is_err());
    }

    #[test]
    fn environment_rejects_partial_and_illegal() {
        let tree = t4();
        assert!(Environment::new(&tree, [(id(1), id(3))]).is_err());
        assert!(Environment::new(&tree, [(id(1), id(5))]).is_err());
    }
}
