//! Random valid trees for property tests and benchmarks.

use rand::Rng;

use crate::game_tree::{format_tree, GameTree, Node, NodeId, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossLaw {
    Uniform,
    /// Each leaf is 0 or 1 with equal probability.
    Binary,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeShape {
    /// Maximum number of infoset levels on any root-to-leaf path.
    pub depth: u32,
    pub max_branch: u32,
    /// Probability that an action's child (above the last level) is an infoset.
    pub infoset_prob: f64,
    pub loss: LossLaw,
}

impl TreeShape {
    pub fn new(depth: u32, max_branch: u32) -> Self {
        TreeShape {
            depth,
            max_branch,
            infoset_prob: 0.5,
            loss: LossLaw::Uniform,
        }
    }
}

/// Builds a random tree: infoset arity in [2, B], action arity in [1, B].
pub fn random_tree<R: Rng + ?Sized>(shape: &TreeShape, rng: &mut R) -> GameTree {
    assert!(shape.depth >= 1 && shape.max_branch >= 2);
    let mut nodes: Vec<Node> = Vec::new();
    let new_node = |nodes: &mut Vec<Node>, kind, parent: Option<NodeId>| {
        let id = NodeId(nodes.len() as u32);
        nodes.push(Node {
            kind,
            parent,
            children: Vec::new(),
        });
        if let Some(p) = parent {
            nodes[p.index()].children.push(id);
        }
        id
    };
    let root = new_node(&mut nodes, NodeKind::Infoset, None);
    // (infoset, level) pending expansion, depth-first
    let mut stack = vec![(root, 1u32)];
    while let Some((v, level)) = stack.pop() {
        let k = rng.gen_range(2..=shape.max_branch);
        for _ in 0..k {
            let a = new_node(&mut nodes, NodeKind::Action, Some(v));
            let j = rng.gen_range(1..=shape.max_branch);
            for _ in 0..j {
                if level < shape.depth && rng.gen_bool(shape.infoset_prob) {
                    let c = new_node(&mut nodes, NodeKind::Infoset, Some(a));
                    stack.push((c, level + 1));
                } else {
                    let loss = match shape.loss {
                        LossLaw::Uniform => rng.gen::<f64>(),
                        LossLaw::Binary => f64::from(u8::from(rng.gen_bool(0.5))),
                        LossLaw::Constant(x) => x,
                    };
                    new_node(&mut nodes, NodeKind::Leaf { loss }, Some(a));
                }
            }
        }
    }
    GameTree::from_nodes(nodes, root).expect("generator produces valid trees")
}

/// Tree-file text for a random tree.
pub fn generate_random_tree<R: Rng + ?Sized>(shape: &TreeShape, rng: &mut R) -> String {
    format_tree(&random_tree(shape, rng))
}
