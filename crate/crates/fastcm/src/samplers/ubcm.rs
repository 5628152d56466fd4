//! UBCM samplers: the O(N^2) brute-force reference and the geometric-skip
//! rejection sampler.

use rand::Rng;

use crate::model::{ubcm_edge_prob_raw, Edge, EdgeList, UbcmParams};
use crate::samplers::{geometric_skip, ordered_pair, SortedNodeOrder, RATIO_SLACK};

/// Includes every unordered pair independently with its UBCM probability.
/// O(N^2) kernel evaluations; the distributional reference for
/// [`sample_ubcm_fast`].
pub fn sample_ubcm_bruteforce<R: Rng + ?Sized>(params: &UbcmParams, rng: &mut R) -> EdgeList {
    let alpha = params.alpha();
    let n = alpha.len();
    let mut edges = Vec::new();
    for i in 0..n {
        let ai = alpha[i];
        for j in (i + 1)..n {
            let p = ubcm_edge_prob_raw(ai + alpha[j]);
            if rng.random::<f64>() < p {
                edges.push(Edge {
                    src: i as u32,
                    dst: j as u32,
                    weight: 1,
                });
            }
        }
    }
    EdgeList::from_parts(n, edges, false, false, None)
}

/// Samples the UBCM in near-linear expected time; the output distribution
/// is identical to [`sample_ubcm_bruteforce`].
///
/// Nodes are sorted by ascending `alpha` so that, for a focal node, edge
/// probabilities decrease along the candidate scan. Candidates are reached
/// by geometric skips at the proposal probability `q` (initialized to the
/// focal node's self-pair probability, which dominates every true pair
/// probability) and accepted with `p/q`; `q` is then lowered to `p`.
pub fn sample_ubcm_fast<R: Rng + ?Sized>(params: &UbcmParams, rng: &mut R) -> EdgeList {
    let n = params.len();
    let order = SortedNodeOrder::ascending(params.alpha());
    let keys = order.keys();

    let mut edges = Vec::new();
    for i in 0..n {
        let ai = keys[i];
        let mut q = ubcm_edge_prob_raw(ai + ai);
        let mut j = i;
        while q > 0.0 {
            let skip = geometric_skip(q, rng).expect("q in (0, 1]");
            j = j.saturating_add(skip as usize);
            if j >= n {
                break;
            }
            let p = ubcm_edge_prob_raw(ai + keys[j]);
            debug_assert!(p <= q * (1.0 + RATIO_SLACK), "acceptance ratio {p}/{q} > 1");
            if rng.random::<f64>() < p / q {
                let (src, dst) = ordered_pair(order.node(i), order.node(j));
                edges.push(Edge {
                    src,
                    dst,
                    weight: 1,
                });
            }
            q = p;
        }
    }
    EdgeList::from_parts(n, edges, false, false, None)
}
