//! Network sampling algorithms.
//!
//! Brute-force reference samplers draw every node pair independently and
//! serve as distributional oracles. The fast samplers visit only a
//! near-linear number of candidate pairs: nodes are sorted so that edge
//! probabilities decrease along the scan, candidates are reached by
//! geometric skips drawn at an upper-bound proposal probability `q`, and
//! each reached candidate is accepted with `p/q`, which makes the net
//! inclusion probability exactly `p`.
//!
//! A single sampler invocation is single-threaded. Ensemble generation
//! parallelizes across samples with one [`RngStream`] per sample.

mod bipartite;
mod chung_lu;
mod rng;
mod ubcm;
mod uecm;

pub use bipartite::{sample_bipartite_fast, sample_directed_fast};
pub use chung_lu::{sample_chunglu_bruteforce, sample_chunglu_mh, sample_chunglu_stub};
pub use rng::{geometric_skip, RngStream};
pub use ubcm::{sample_ubcm_bruteforce, sample_ubcm_fast};
pub use uecm::{sample_uecm_bruteforce, sample_uecm_fast};

/// Relative slack for the `p <= q` acceptance-ratio check in the fast
/// samplers. Correctly-rounded kernel evaluation can break the real-valued
/// monotonicity by a couple of ulps when consecutive candidates have
/// near-identical keys; a genuine bound violation (an invalid `beta_min`)
/// is macroscopic and still trips the check.
pub(crate) const RATIO_SLACK: f64 = 16.0 * f64::EPSILON;

/// Node permutation sorted by a per-node key, ascending, ties broken by
/// node id so the order is deterministic.
#[derive(Debug, Clone)]
pub struct SortedNodeOrder {
    order: Vec<u32>,
    keys: Vec<f64>,
}

impl SortedNodeOrder {
    /// Sorts node ids `0..keys.len()` by `keys`, ascending. `NaN` keys are
    /// rejected by the parameter containers upstream; `+inf` keys (isolated
    /// nodes) sort last.
    pub fn ascending(keys: &[f64]) -> Self {
        let mut order: Vec<u32> = (0..keys.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| {
            keys[a as usize]
                .total_cmp(&keys[b as usize])
                .then(a.cmp(&b))
        });
        let keys = order.iter().map(|&v| keys[v as usize]).collect();
        Self { order, keys }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Original node id at sorted position `t`.
    #[inline]
    pub fn node(&self, t: usize) -> u32 {
        self.order[t]
    }

    /// Sort key at sorted position `t`.
    #[inline]
    pub fn key(&self, t: usize) -> f64 {
        self.keys[t]
    }

    pub fn keys(&self) -> &[f64] {
        &self.keys
    }

    pub fn permutation(&self) -> &[u32] {
        &self.order
    }
}

/// Suffix minima over a value array in sorted-position space:
/// `min_from(t)` is the smallest value at positions `>= t` (`+inf` when
/// the suffix is empty).
#[derive(Debug, Clone)]
pub struct BetaSuffixMin {
    m: Vec<f64>,
}

impl BetaSuffixMin {
    pub fn new(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = vec![f64::INFINITY; n + 1];
        for t in (0..n).rev() {
            m[t] = values[t].min(m[t + 1]);
        }
        Self { m }
    }

    #[inline]
    pub fn min_from(&self, t: usize) -> f64 {
        self.m[t.min(self.m.len() - 1)]
    }
}

#[inline]
pub(crate) fn ordered_pair(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
