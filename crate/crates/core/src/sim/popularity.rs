//! Global visit counts with O(log S) weighted sampling.

use rand::Rng;

use crate::error::{Error, Result};

/// Fenwick (binary indexed) tree over non-negative `f64` weights.
#[derive(Debug, Clone)]
pub struct FenwickTree {
    tree: Vec<f64>,
}

impl FenwickTree {
    pub fn from_weights(weights: &[f64]) -> Self {
        let n = weights.len();
        let mut tree = vec![0.0; n + 1];
        tree[1..].copy_from_slice(weights);
        for i in 1..=n {
            let parent = i + lowbit(i);
            if parent <= n {
                tree[parent] += tree[i];
            }
        }
        FenwickTree { tree }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn add(&mut self, index: usize, delta: f64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += lowbit(i);
        }
    }

    /// Sum of weights `[0, index)`.
    pub fn prefix(&self, index: usize) -> f64 {
        let mut i = index;
        let mut sum = 0.0;
        while i > 0 {
            sum += self.tree[i];
            i -= lowbit(i);
        }
        sum
    }

    pub fn total(&self) -> f64 {
        self.prefix(self.len())
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    pub fn find(&self, mut target: f64) -> usize {
        let n = self.len();
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        // rounding at the upper edge can walk one past the end
        pos.min(n - 1)
    }
}

#[inline]
fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}

/// Per-location visit counts `m_i`, sampled with weight `m_i + epsilon`.
#[derive(Debug, Clone)]
pub struct PopularityTable {
    counts: Vec<u64>,
    epsilon: f64,
    tree: FenwickTree,
}

impl PopularityTable {
    pub fn new(locations: usize, epsilon: f64) -> Self {
        Self::from_counts(vec![0; locations], epsilon)
    }

    pub fn from_counts(counts: Vec<u64>, epsilon: f64) -> Self {
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64 + epsilon).collect();
        PopularityTable {
            tree: FenwickTree::from_weights(&weights),
            counts,
            epsilon,
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.counts[index] as f64 + self.epsilon
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.tree.total()
    }

    pub fn increment(&mut self, index: usize, delta: u64) {
        self.counts[index] += delta;
        self.tree.add(index, delta as f64);
    }

    /// Draw an index with probability `weight(i) / total_weight()`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        let total = self.total_weight();
        if self.is_empty() || total <= 0.0 {
            return Err(Error::ZeroWeight);
        }
        let mut target = rng.random::<f64>() * total;
        // skip over zero-weight slots that `find` could land on at the boundary
        loop {
            let i = self.tree.find(target);
            if self.weight(i) > 0.0 {
                return Ok(i);
            }
            target = rng.random::<f64>() * total;
        }
    }
}
