//! Bipartite and directed adapters for the fast samplers.
//!
//! Bipartite sampling scans the full `-` set for every `+` node with the
//! same skip/accept scheme as the within-set samplers. A directed network
//! is the bipartite network over (out-node, in-node) copies with the
//! diagonal excluded, so directed sampling reduces to the bipartite case.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    ubcm_edge_prob_raw, uecm_edge_prob_raw, uecm_upper_bound_prob_raw, Edge, EdgeList, Params,
    UbcmParams, UecmParams,
};
use crate::samplers::uecm::sample_weight;
use crate::samplers::{geometric_skip, BetaSuffixMin, SortedNodeOrder, RATIO_SLACK};

/// Samples a bipartite network between a `+` and a `-` node set of the
/// same model kind. Output node ids: `+` nodes are `0..n_plus`, `-` nodes
/// are `n_plus..n_plus+n_minus`; the partition sizes are recorded on the
/// edge list.
pub fn sample_bipartite_fast<R: Rng + ?Sized>(
    plus: &Params,
    minus: &Params,
    rng: &mut R,
) -> Result<EdgeList> {
    match (plus, minus) {
        (Params::Ubcm(p), Params::Ubcm(m)) => Ok(bipartite_ubcm(p, m, rng)),
        (Params::Uecm(p), Params::Uecm(m)) => Ok(bipartite_uecm(p, m, rng)),
        _ => Err(Error::invalid(
            "bipartite sampling requires both parameter sets to be the same model kind",
        )),
    }
}

fn bipartite_ubcm<R: Rng + ?Sized>(
    plus: &UbcmParams,
    minus: &UbcmParams,
    rng: &mut R,
) -> EdgeList {
    let np = plus.len();
    let nm = minus.len();
    let po = SortedNodeOrder::ascending(plus.alpha());
    let mo = SortedNodeOrder::ascending(minus.alpha());
    let mk = mo.keys();

    let mut edges = Vec::new();
    for i in 0..np {
        let ai = po.key(i);
        // the smallest `-` key dominates every pair of this focal node
        let mut q = ubcm_edge_prob_raw(ai + mk[0]);
        let mut pos = 0usize; // 1-based candidate position after the skip
        while q > 0.0 {
            let skip = geometric_skip(q, rng).expect("q in (0, 1]");
            pos = pos.saturating_add(skip as usize);
            if pos > nm {
                break;
            }
            let p = ubcm_edge_prob_raw(ai + mk[pos - 1]);
            debug_assert!(p <= q * (1.0 + RATIO_SLACK));
            if rng.random::<f64>() < p / q {
                edges.push(Edge {
                    src: po.node(i),
                    dst: np as u32 + mo.node(pos - 1),
                    weight: 1,
                });
            }
            q = p;
        }
    }
    EdgeList::from_parts(np + nm, edges, false, false, Some((np, nm)))
}

fn bipartite_uecm<R: Rng + ?Sized>(
    plus: &UecmParams,
    minus: &UecmParams,
    rng: &mut R,
) -> EdgeList {
    let np = plus.len();
    let nm = minus.len();
    let keys_of = |p: &UecmParams| -> Vec<f64> {
        p.alpha().iter().zip(p.beta()).map(|(a, b)| a + b).collect()
    };
    let po = SortedNodeOrder::ascending(&keys_of(plus));
    let mo = SortedNodeOrder::ascending(&keys_of(minus));
    let pbeta: Vec<f64> = po.permutation().iter().map(|&v| plus.beta()[v as usize]).collect();
    let mbeta: Vec<f64> = mo.permutation().iter().map(|&v| minus.beta()[v as usize]).collect();
    // every `-` node is a candidate for every focal `+` node, so the
    // per-focal bound uses the global minimum over the `-` set
    let minus_min = BetaSuffixMin::new(&mbeta).min_from(0);
    let mk = mo.keys();

    let mut edges = Vec::new();
    for i in 0..np {
        let ki = po.key(i);
        let beta_min = pbeta[i] + minus_min;
        let mut q = uecm_upper_bound_prob_raw(ki + mk[0], beta_min);
        let mut pos = 0usize;
        while q > 0.0 {
            let skip = geometric_skip(q, rng).expect("q in (0, 1]");
            pos = pos.saturating_add(skip as usize);
            if pos > nm {
                break;
            }
            let full_sum = ki + mk[pos - 1];
            let beta_sum = pbeta[i] + mbeta[pos - 1];
            let p = uecm_edge_prob_raw(full_sum, beta_sum);
            debug_assert!(p <= q * (1.0 + RATIO_SLACK));
            if rng.random::<f64>() < p / q {
                edges.push(Edge {
                    src: po.node(i),
                    dst: np as u32 + mo.node(pos - 1),
                    weight: sample_weight(beta_sum, rng),
                });
            }
            q = uecm_upper_bound_prob_raw(full_sum, beta_min);
        }
    }
    EdgeList::from_parts(np + nm, edges, false, true, Some((np, nm)))
}

/// Samples a directed network from out-node and in-node parameter vectors
/// of equal length: pair (i -> j) uses the cross kernel of out-parameters
/// i and in-parameters j, with self-loops (i -> i) excluded.
pub fn sample_directed_fast<R: Rng + ?Sized>(
    params_out: &Params,
    params_in: &Params,
    rng: &mut R,
) -> Result<EdgeList> {
    let n = params_out.len();
    if n != params_in.len() {
        return Err(Error::invalid(
            "directed sampling requires out/in parameter vectors of equal length",
        ));
    }
    let bip = sample_bipartite_fast(params_out, params_in, rng)?;
    let edges: Vec<Edge> = bip
        .edges()
        .iter()
        .filter_map(|e| {
            let src = e.src;
            let dst = e.dst - n as u32;
            (src != dst).then_some(Edge {
                src,
                dst,
                weight: e.weight,
            })
        })
        .collect();
    Ok(EdgeList::from_parts(
        n,
        edges,
        true,
        bip.is_weighted(),
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ubcm_edge_prob, uecm_edge_prob};
    use crate::samplers::RngStream;

    fn ubcm(alpha: Vec<f64>) -> Params {
        Params::Ubcm(UbcmParams::new(alpha).unwrap())
    }

    fn uecm(alpha: Vec<f64>, beta: Vec<f64>) -> Params {
        Params::Uecm(UecmParams::new(alpha, beta).unwrap())
    }

    #[test]
    fn mismatched_kinds_are_rejected() {
        let a = ubcm(vec![0.0, 0.0]);
        let b = uecm(vec![0.0, 0.0], vec![1.0, 1.0]);
        let mut rng = RngStream::new(1, 0).rng();
        assert!(sample_bipartite_fast(&a, &b, &mut rng).is_err());
    }

    #[test]
    fn equal_params_give_bipartite_erdos_renyi_block() {
        let a = 0.4f64;
        let plus = ubcm(vec![a; 6]);
        let minus = ubcm(vec![a; 5]);
        let p = ubcm_edge_prob(a, a).unwrap();
        let n_samples = 20_000;
        let mut rng = RngStream::new(5, 0).rng();
        let total: u64 = (0..n_samples)
            .map(|_| {
                let el = sample_bipartite_fast(&plus, &minus, &mut rng).unwrap();
                // all edges cross the partition
                assert!(el.edges().iter().all(|e| e.src < 6 && e.dst >= 6));
                el.n_edges() as u64
            })
            .sum();
        let pairs = 30.0;
        let mean = total as f64 / n_samples as f64;
        let se = (pairs * p * (1.0 - p) / n_samples as f64).sqrt();
        assert!((mean - pairs * p).abs() < 4.0 * se);
    }

    #[test]
    fn isolated_plus_node_stays_isolated() {
        let plus = ubcm(vec![50.0, -1.0, -1.0, -1.0]);
        let minus = ubcm(vec![-1.0; 4]);
        let mut rng = RngStream::new(6, 0).rng();
        for _ in 0..100 {
            let el = sample_bipartite_fast(&plus, &minus, &mut rng).unwrap();
            assert!(el.edges().iter().all(|e| e.src != 0));
        }
    }

    #[test]
    fn bipartite_ubcm_matches_bruteforce_oracle() {
        let ap = vec![-0.8, -0.2, 0.4, 1.0];
        let am = vec![-0.5, 0.0, 0.6, 1.2];
        let plus = ubcm(ap.clone());
        let minus = ubcm(am.clone());
        let n_samples = 40_000usize;
        let mut counts = vec![vec![0u64; 4]; 4];
        let mut rng = RngStream::new(7, 0).rng();
        for _ in 0..n_samples {
            let el = sample_bipartite_fast(&plus, &minus, &mut rng).unwrap();
            for e in el.edges() {
                counts[e.src as usize][(e.dst - 4) as usize] += 1;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let p = ubcm_edge_prob(ap[i], am[j]).unwrap();
                let sd = (n_samples as f64 * p * (1.0 - p)).sqrt();
                let diff = counts[i][j] as f64 - n_samples as f64 * p;
                assert!(
                    diff.abs() <= 4.0 * sd,
                    "pair (+{i}, -{j}): {} vs {:.1}",
                    counts[i][j],
                    n_samples as f64 * p
                );
            }
        }
    }

    #[test]
    fn bipartite_uecm_matches_bruteforce_oracle() {
        let ap = vec![-0.4, 0.2, 0.8];
        let bp = vec![0.5, 0.8, 0.4];
        let am = vec![-0.6, 0.1, 0.7];
        let bm = vec![0.6, 0.3, 0.9];
        let plus = uecm(ap.clone(), bp.clone());
        let minus = uecm(am.clone(), bm.clone());
        let n_samples = 40_000usize;
        let mut counts = vec![vec![0u64; 3]; 3];
        let mut wsum = vec![vec![0u64; 3]; 3];
        let mut rng = RngStream::new(8, 0).rng();
        for _ in 0..n_samples {
            let el = sample_bipartite_fast(&plus, &minus, &mut rng).unwrap();
            for e in el.edges() {
                counts[e.src as usize][(e.dst - 3) as usize] += 1;
                wsum[e.src as usize][(e.dst - 3) as usize] += e.weight;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let p = uecm_edge_prob(ap[i], am[j], bp[i], bm[j]).unwrap();
                let sd = (n_samples as f64 * p * (1.0 - p)).sqrt();
                let diff = counts[i][j] as f64 - n_samples as f64 * p;
                assert!(diff.abs() <= 4.0 * sd, "edge freq (+{i}, -{j})");
                // conditional mean weight = 1 / (1 - exp(-beta_sum))
                let mw = wsum[i][j] as f64 / counts[i][j] as f64;
                let expect = 1.0 / -(-(bp[i] + bm[j])).exp_m1();
                assert!(
                    (mw - expect).abs() < 0.1,
                    "mean weight (+{i}, -{j}): {mw} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn directed_excludes_diagonal_and_matches_marginals() {
        let out = vec![-0.5, 0.0, 0.5, 1.0, -1.0, 0.2];
        let inn = vec![0.3, -0.2, 0.8, -0.6, 0.1, 0.5];
        let po = ubcm(out.clone());
        let pi = ubcm(inn.clone());
        let n_samples = 40_000usize;
        let mut counts = vec![vec![0u64; 6]; 6];
        let mut rng = RngStream::new(9, 0).rng();
        for _ in 0..n_samples {
            let el = sample_directed_fast(&po, &pi, &mut rng).unwrap();
            assert!(el.is_directed());
            for e in el.edges() {
                counts[e.src as usize][e.dst as usize] += 1;
            }
        }
        for i in 0..6 {
            assert_eq!(counts[i][i], 0, "diagonal must be excluded");
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let p = ubcm_edge_prob(out[i], inn[j]).unwrap();
                let sd = (n_samples as f64 * p * (1.0 - p)).sqrt();
                let diff = counts[i][j] as f64 - n_samples as f64 * p;
                assert!(diff.abs() <= 4.0 * sd, "ordered pair ({i} -> {j})");
            }
        }
    }

    #[test]
    fn symmetric_directed_params_balance_in_and_out_degree() {
        let a = vec![-0.2, 0.1, 0.4, 0.7];
        let po = ubcm(a.clone());
        let n_samples = 30_000usize;
        let mut out_deg = vec![0u64; 4];
        let mut in_deg = vec![0u64; 4];
        let mut rng = RngStream::new(10, 0).rng();
        for _ in 0..n_samples {
            let el = sample_directed_fast(&po, &po, &mut rng).unwrap();
            for e in el.edges() {
                out_deg[e.src as usize] += 1;
                in_deg[e.dst as usize] += 1;
            }
        }
        for v in 0..4 {
            let o = out_deg[v] as f64 / n_samples as f64;
            let i = in_deg[v] as f64 / n_samples as f64;
            // identical marginals in expectation
            assert!((o - i).abs() < 0.05, "node {v}: out {o} vs in {i}");
        }
    }
}
