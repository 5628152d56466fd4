//! UECM samplers: brute-force reference and the upper-bound rejection
//! sampler with geometric skipping.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    uecm_edge_prob_raw, uecm_upper_bound_prob_raw, Edge, EdgeList, UecmParams,
};
use crate::samplers::{geometric_skip, ordered_pair, BetaSuffixMin, SortedNodeOrder, RATIO_SLACK};

/// Draws an edge weight from the conditional geometric law on `w >= 1`
/// with ratio `r = exp(-beta_sum)`, by inverse transform
/// `w = 1 + floor(ln U / ln r)`.
#[inline]
pub(crate) fn sample_weight<R: Rng + ?Sized>(beta_sum: f64, rng: &mut R) -> u64 {
    let u = 1.0 - rng.random::<f64>(); // (0, 1]
    // ln r = -beta_sum exactly
    let g = (u.ln() / -beta_sum).floor();
    if g >= u64::MAX as f64 {
        u64::MAX
    } else {
        1 + g as u64
    }
}

/// Draws every unordered pair independently: an edge with the UECM edge
/// probability, then a geometric weight given the edge exists. O(N^2).
pub fn sample_uecm_bruteforce<R: Rng + ?Sized>(params: &UecmParams, rng: &mut R) -> EdgeList {
    let alpha = params.alpha();
    let beta = params.beta();
    let n = params.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let beta_sum = beta[i] + beta[j];
            let p = uecm_edge_prob_raw(alpha[i] + alpha[j] + beta_sum, beta_sum);
            if rng.random::<f64>() < p {
                edges.push(Edge {
                    src: i as u32,
                    dst: j as u32,
                    weight: sample_weight(beta_sum, rng),
                });
            }
        }
    }
    EdgeList::from_parts(n, edges, false, true, None)
}

/// Samples the UECM in near-linear expected time; the output distribution
/// is identical to [`sample_uecm_bruteforce`].
///
/// Nodes are sorted by ascending `alpha + beta`. Sorting cannot order the
/// true probabilities (they depend on the pair's `beta` sum through the
/// denominator), so the scan proposes with the upper-bound probability
/// obtained by replacing the pair's `exp(-beta_i-beta_j)` with
/// `exp(-beta_min)`, where `beta_min` is the focal node's `beta` plus the
/// suffix minimum of `beta` over its candidates. That bound is monotone
/// along the scan, so geometric skips at the bound plus `p/q` acceptance
/// give exact per-pair inclusion.
///
/// Every candidate, including the first, is reached by a geometric skip,
/// so net inclusion is `q * (p/q) = p` for each scanned pair.
pub fn sample_uecm_fast<R: Rng + ?Sized>(params: &UecmParams, rng: &mut R) -> Result<EdgeList> {
    let n = params.len();
    let sort_keys: Vec<f64> = params
        .alpha()
        .iter()
        .zip(params.beta())
        .map(|(a, b)| a + b)
        .collect();
    let order = SortedNodeOrder::ascending(&sort_keys);
    let beta_sorted: Vec<f64> = order
        .permutation()
        .iter()
        .map(|&v| params.beta()[v as usize])
        .collect();
    let suffix_min = BetaSuffixMin::new(&beta_sorted);
    // tightest bound valid for every remaining candidate of the focal
    // node: beta_i plus the smallest beta among positions > i
    let edges = uecm_scan(&order, &beta_sorted, rng, |i| {
        beta_sorted[i] + suffix_min.min_from(i + 1)
    })?;
    Ok(EdgeList::from_parts(n, edges, false, true, None))
}

/// The skip/accept scan over sorted positions, with `beta_min_for(i)`
/// supplying the per-focal-node bound. Errors if the bound ever fails to
/// dominate a true pair probability.
fn uecm_scan<R: Rng + ?Sized>(
    order: &SortedNodeOrder,
    beta_sorted: &[f64],
    rng: &mut R,
    beta_min_for: impl Fn(usize) -> f64,
) -> Result<Vec<Edge>> {
    let n = order.len();
    let keys = order.keys();
    let mut edges = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let beta_min = beta_min_for(i);
        let mut q = uecm_upper_bound_prob_raw(keys[i] + keys[i], beta_min);
        let mut j = i;
        while q > 0.0 {
            let skip = geometric_skip(q, rng).expect("q in (0, 1]");
            j = j.saturating_add(skip as usize);
            if j >= n {
                break;
            }
            let full_sum = keys[i] + keys[j];
            let beta_sum = beta_sorted[i] + beta_sorted[j];
            let p = uecm_edge_prob_raw(full_sum, beta_sum);
            if p > q * (1.0 + RATIO_SLACK) {
                return Err(Error::ContractViolation(format!(
                    "acceptance ratio p/q = {p}/{q} > 1 at sorted pair ({i}, {j}); \
                     beta_min = {beta_min} does not bound the pair"
                )));
            }
            if rng.random::<f64>() < p / q {
                let (src, dst) = ordered_pair(order.node(i), order.node(j));
                edges.push(Edge {
                    src,
                    dst,
                    weight: sample_weight(beta_sum, rng),
                });
            }
            q = uecm_upper_bound_prob_raw(full_sum, beta_min);
        }
    }
    Ok(edges)
}
