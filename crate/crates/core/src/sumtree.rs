//! Array-backed segment tree of positive weights.
//!
//! Supports O(log k) point multiplication and O(log k) categorical sampling by
//! prefix-sum descent. Every method takes an operation counter and adds the
//! number of tree nodes it reads or writes.

#[derive(Debug, Clone, PartialEq)]
pub struct SumTree {
    cap: usize,
    len: usize,
    // 1-based heap layout, leaves at [cap, cap + len)
    nodes: Vec<f64>,
}

impl SumTree {
    pub fn new(weights: &[f64], ops: &mut u64) -> Self {
        assert!(!weights.is_empty(), "sum tree needs at least one weight");
        let cap = weights.len().next_power_of_two();
        let mut nodes = vec![0.0; 2 * cap];
        nodes[cap..cap + weights.len()].copy_from_slice(weights);
        let mut tree = SumTree {
            cap,
            len: weights.len(),
            nodes,
        };
        tree.rebuild(ops);
        tree
    }

    fn rebuild(&mut self, ops: &mut u64) {
        *ops += self.len as u64;
        for i in (1..self.cap).rev() {
            self.nodes[i] = self.nodes[2 * i] + self.nodes[2 * i + 1];
        }
        *ops += (self.cap - 1) as u64;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of levels between the root and the leaves.
    pub fn depth(&self) -> u32 {
        self.cap.trailing_zeros()
    }

    pub fn total(&self, ops: &mut u64) -> f64 {
        *ops += 1;
        self.nodes[1]
    }

    pub fn weight(&self, i: usize, ops: &mut u64) -> f64 {
        debug_assert!(i < self.len);
        *ops += 1;
        self.nodes[self.cap + i]
    }

    /// All leaf weights, uncounted (snapshots and tests).
    pub fn weights(&self) -> &[f64] {
        &self.nodes[self.cap..self.cap + self.len]
    }

    pub fn set(&mut self, i: usize, value: f64, ops: &mut u64) {
        assert!(i < self.len, "index out of bounds");
        let mut idx = self.cap + i;
        self.nodes[idx] = value;
        *ops += 1;
        while idx > 1 {
            idx /= 2;
            self.nodes[idx] = self.nodes[2 * idx] + self.nodes[2 * idx + 1];
            *ops += 1;
        }
    }

    pub fn multiply(&mut self, i: usize, factor: f64, ops: &mut u64) {
        let w = self.weight(i, ops);
        self.set(i, w * factor, ops);
    }

    /// Multiplies every weight by `factor`; proportions are unchanged.
    pub fn rescale(&mut self, factor: f64, ops: &mut u64) {
        for w in &mut self.nodes[self.cap..self.cap + self.len] {
            *w *= factor;
        }
        self.rebuild(ops);
    }

    /// Index drawn with probability weight/total, given `u` uniform in [0, 1).
    pub fn sample(&self, u: f64, ops: &mut u64) -> usize {
        let mut target = u * self.total(ops);
        let mut idx = 1;
        while idx < self.cap {
            *ops += 1;
            let left = self.nodes[2 * idx];
            let right = self.nodes[2 * idx + 1];
            if (target < left && left > 0.0) || right <= 0.0 {
                idx *= 2;
            } else {
                target -= left;
                idx = 2 * idx + 1;
            }
        }
        (idx - self.cap).min(self.len - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn totals_and_updates() {
        let mut ops = 0;
        let mut t = SumTree::new(&[1.0, 2.0, 3.0], &mut ops);
        assert_eq!(t.total(&mut ops), 6.0);
        t.multiply(1, 0.5, &mut ops);
        assert_eq!(t.total(&mut ops), 5.0);
        assert_eq!(t.weights(), &[1.0, 1.0, 3.0]);
        t.rescale(2.0, &mut ops);
        assert_eq!(t.total(&mut ops), 10.0);
    }

    #[test]
    fn sample_boundaries() {
        let mut ops = 0;
        let t = SumTree::new(&[1.0, 2.0, 3.0], &mut ops);
        assert_eq!(t.sample(0.0, &mut ops), 0);
        assert_eq!(t.sample(0.16, &mut ops), 0);
        assert_eq!(t.sample(0.17, &mut ops), 1);
        assert_eq!(t.sample(0.49, &mut ops), 1);
        assert_eq!(t.sample(0.51, &mut ops), 2);
        assert_eq!(t.sample(0.999_999_999, &mut ops), 2);
    }

    #[test]
    fn single_leaf() {
        let mut ops = 0;
        let t = SumTree::new(&[4.0], &mut ops);
        assert_eq!(t.depth(), 0);
        assert_eq!(t.sample(0.7, &mut ops), 0);
    }

    #[test]
    fn op_counts_are_logarithmic() {
        let mut ops = 0;
        let mut t = SumTree::new(&vec![1.0; 1000], &mut ops);
        assert!(ops <= 2 * 1024);
        let mut ops = 0;
        t.sample(0.3, &mut ops);
        assert_eq!(ops, 1 + 10);
        let mut ops = 0;
        t.multiply(17, 2.0, &mut ops);
        assert_eq!(ops, 1 + 11);
    }

    proptest! {
        #[test]
        fn sample_matches_linear_scan(
            weights in proptest::collection::vec(0.01f64..10.0, 1..40),
            u in 0.0f64..1.0,
        ) {
            let mut ops = 0;
            let t = SumTree::new(&weights, &mut ops);
            let total: f64 = weights.iter().sum();
            let target = u * t.total(&mut ops);
            let mut acc = 0.0;
            let mut expect = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                acc += w;
                if target < acc {
                    expect = i;
                    break;
                }
            }
            let got = t.sample(u, &mut ops);
            // prefix sums accumulate in a different order; allow a neighbour at exact boundaries
            if got != expect {
                let lo: f64 = weights[..got.min(expect) + 1].iter().sum();
                prop_assert!((lo - target).abs() < 1e-9 * total, "got {got}, expected {expect}");
            }
        }
    }
}
