use super::{GameTree, NodeId, NodeKind};
use crate::error::{Error, Result};

/// Per-node counts and weights driving the initial policy and the exploration term.
///
/// * `n`: number of reduced sub-strategies starting at the node (exact).
/// * `m`: number of action nodes in the subtree, the node included.
/// * `beta`: implicit-exploration weight, 1 at the root.
///
/// Leaves carry `n = 1`, `m = 0`, `beta = 0`; none of the recursions read them.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeProfiles {
    n: Vec<u128>,
    m: Vec<u64>,
    beta: Vec<f64>,
}

impl TreeProfiles {
    pub fn n(&self, v: NodeId) -> u128 {
        self.n[v.index()]
    }

    pub fn m(&self, v: NodeId) -> u64 {
        self.m[v.index()]
    }

    pub fn beta(&self, v: NodeId) -> f64 {
        self.beta[v.index()]
    }

    /// Initial probability n(a)/n(parent(a)) of an action.
    pub fn initial_probability(&self, tree: &GameTree, action: NodeId) -> f64 {
        let parent = tree.parent(action).expect("action has a parent");
        self.n(action) as f64 / self.n(parent) as f64
    }
}

pub fn compute_profiles(tree: &GameTree) -> Result<TreeProfiles> {
    let len = tree.len();
    let order = tree.bfs_order();
    let mut n = vec![1u128; len];
    let mut m = vec![0u64; len];

    for &v in order.iter().rev() {
        match tree.kind(v) {
            NodeKind::Leaf { .. } => {}
            NodeKind::Action => {
                let mut count = 1u128;
                let mut desc = 1u64;
                for c in tree.infoset_children(v) {
                    count = count.checked_mul(n[c.index()]).ok_or(Error::CountOverflow(v))?;
                    desc += m[c.index()];
                }
                n[v.index()] = count;
                m[v.index()] = desc;
            }
            NodeKind::Infoset => {
                let mut count = 0u128;
                let mut desc = 0u64;
                for &a in tree.children(v) {
                    count = count.checked_add(n[a.index()]).ok_or(Error::CountOverflow(v))?;
                    desc += m[a.index()];
                }
                n[v.index()] = count;
                m[v.index()] = desc;
            }
        }
    }

    let mut beta = vec![0.0; len];
    for &v in &order {
        beta[v.index()] = match (tree.kind(v), tree.parent(v)) {
            (NodeKind::Leaf { .. }, _) => 0.0,
            (_, None) => 1.0,
            (NodeKind::Action, Some(p)) => m[v.index()] as f64 * beta[p.index()],
            (NodeKind::Infoset, Some(p)) => beta[p.index()] / m[v.index()] as f64,
        };
    }

    Ok(TreeProfiles { n, m, beta })
}

#[cfg(test)]
mod tests {
    use super::super::{fixtures::T4, parse_tree};
    use super::*;

    #[test]
    fn t4_profiles() {
        let tree = parse_tree(T4).unwrap();
        let p = compute_profiles(&tree).unwrap();
        let id = NodeId;
        assert_eq!(p.m(id(0)), 4);
        assert_eq!(p.n(id(0)), 3);
        assert_eq!(p.n(id(2)), 2);
        assert_eq!(p.m(id(2)), 3);
        assert_eq!(p.m(id(5)), 2);
        assert_eq!(p.beta(id(0)), 1.0);
        assert_eq!(p.beta(id(1)), 1.0);
        assert_eq!(p.beta(id(2)), 3.0);
        assert_eq!(p.beta(id(5)), 1.5);
        assert_eq!(p.beta(id(6)), 1.5);
        assert_eq!(p.beta(id(7)), 1.5);
        assert!((p.initial_probability(&tree, id(2)) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bandit_special_case() {
        let k = 5;
        let mut text = String::from("0 I -\n");
        for i in 0..k {
            text += &format!("{} A 0\n", i + 1);
        }
        for i in 0..k {
            text += &format!("{} L {} 0.5\n", k + 1 + i, i + 1);
        }
        let tree = parse_tree(&text).unwrap();
        let p = compute_profiles(&tree).unwrap();
        assert_eq!(p.n(tree.root()), k as u128);
        assert_eq!(p.m(tree.root()), k as u64);
        for &a in tree.actions() {
            assert_eq!(p.beta(a), 1.0);
        }
    }

    #[test]
    fn overflow_is_reported() {
        // chain of actions each with two infoset children, each infoset binary:
        // n doubles-and-squares quickly
        let mut text = String::from("0 I -\n");
        let mut next = 1u32;
        let mut frontier = vec![0u32];
        for _ in 0..9 {
            let mut new_frontier = Vec::new();
            for &v in &frontier {
                let a = next;
                let b = next + 1;
                next += 2;
                text += &format!("{a} A {v}\n{b} A {v}\n");
                text += &format!("{} L {b} 0\n", next);
                next += 1;
                for _ in 0..2 {
                    text += &format!("{next} I {a}\n");
                    new_frontier.push(next);
                    next += 1;
                }
            }
            frontier = new_frontier;
            if frontier.len() > 600 {
                break;
            }
        }
        for &v in &frontier {
            text += &format!("{} A {v}\n{} A {v}\n", next, next + 1);
            text += &format!("{} L {} 0\n{} L {} 0\n", next + 2, next, next + 3, next + 1);
            next += 4;
        }
        let tree = parse_tree(&text).unwrap();
        assert!(matches!(compute_profiles(&tree), Err(Error::CountOverflow(_))));
    }
}
