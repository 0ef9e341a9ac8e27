//! Random draws used by the simulator: Poisson tie creation and
//! strength-proportional partner selection without replacement.

use rand::Rng;

/// Poisson variate by inversion with sequential search.
///
/// Exact for the small rates the model uses (`(N - 1) / T`, well below 30).
pub fn poisson_inversion<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u32 {
    if lambda <= 0.0 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / f64::from(k);
        cdf += p;
        // Tail mass underflowed; cdf cannot advance any further.
        if p == 0.0 {
            break;
        }
    }
    k
}

/// Fenwick tree over partner strengths supporting proportional draws and
/// removal, both `O(log n)`.
#[derive(Debug, Clone, Default)]
pub struct PartnerSampler {
    tree: Vec<f64>,
    weights: Vec<f64>,
    remaining: usize,
}

impl PartnerSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Resets the sampler to `weights`; every index becomes eligible.
    pub fn reset(&mut self, weights: &[f64]) {
        let n = weights.len();
        self.weights.clear();
        self.weights.extend_from_slice(weights);
        self.tree.clear();
        self.tree.resize(n + 1, 0.0);
        for (i, &w) in weights.iter().enumerate() {
            let node = i + 1;
            self.tree[node] += w;
            let parent = node + lowbit(node);
            if parent <= n {
                let carried = self.tree[node];
                self.tree[parent] += carried;
            }
        }
        self.remaining = weights.iter().filter(|&&w| w > 0.0).count();
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    fn total(&self) -> f64 {
        let mut node = self.weights.len();
        let mut sum = 0.0;
        while node > 0 {
            sum += self.tree[node];
            node -= lowbit(node);
        }
        sum
    }

    /// Draws an eligible index with probability proportional to its weight
    /// and removes it. `None` once every positive-weight index is used.
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        if self.remaining == 0 {
            return None;
        }
        let n = self.weights.len();
        let target = rng.random::<f64>() * self.total();
        let mut pos = 0usize;
        let mut rest = target;
        let mut step = highest_power_of_two(n);
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= rest {
                pos = next;
                rest -= self.tree[next];
            }
            step >>= 1;
        }
        // `pos` is the 0-based index whose cumulative range holds `target`.
        // Accumulated rounding after removals may land on a spent slot.
        let idx = if pos < n && self.weights[pos] > 0.0 {
            pos
        } else {
            self.nearest_eligible(pos.min(n - 1))?
        };
        self.remove(idx);
        Some(idx)
    }

    fn nearest_eligible(&self, from: usize) -> Option<usize> {
        let n = self.weights.len();
        (from..n).chain((0..from).rev()).find(|&i| self.weights[i] > 0.0)
    }

    fn remove(&mut self, idx: usize) {
        let w = self.weights[idx];
        self.weights[idx] = 0.0;
        self.remaining -= 1;
        let mut node = idx + 1;
        while node < self.tree.len() {
            self.tree[node] -= w;
            node += lowbit(node);
        }
    }
}

fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}

fn highest_power_of_two(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - n.leading_zeros())
    }
}
