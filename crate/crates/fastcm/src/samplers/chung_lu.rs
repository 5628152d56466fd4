//! Chung-Lu baselines: the Miller-Hagberg geometric-skip sampler, its
//! per-pair brute-force counterpart, and strength-proportional stub
//! matching for weighted networks.
//!
//! Both Chung-Lu samplers deliberately treat the clamped rate
//! `min(1, k_i k_j / 2M)` as an inclusion probability. That is the common
//! misapplication of the model that oversamples hub-hub edges; it is kept
//! here as the biased baseline practitioners actually use.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::model::{chung_lu_rate_raw, DegreeSequence, Edge, EdgeList, StrengthSequence};
use crate::samplers::{geometric_skip, ordered_pair, SortedNodeOrder, RATIO_SLACK};

fn check_two_m(k: &DegreeSequence) -> Result<f64> {
    let two_m: f64 = k.values().iter().sum();
    if !(two_m > 0.0) {
        return Err(Error::invalid("degree sequence must have positive total"));
    }
    Ok(two_m)
}

/// Miller-Hagberg sampler: nodes sorted by decreasing degree, candidates
/// reached by geometric skips with the adaptive proposal, each pair
/// included with probability `min(1, k_i k_j / 2M)`.
pub fn sample_chunglu_mh<R: Rng + ?Sized>(k: &DegreeSequence, rng: &mut R) -> Result<EdgeList> {
    let two_m = check_two_m(k)?;
    let n = k.len();
    // ascending order of -k == descending degree, ties by node id
    let neg: Vec<f64> = k.values().iter().map(|v| -v).collect();
    let order = SortedNodeOrder::ascending(&neg);
    let deg: Vec<f64> = order.keys().iter().map(|v| -v).collect();

    let mut edges = Vec::new();
    for i in 0..n {
        let ki = deg[i];
        if ki <= 0.0 {
            break; // zero-degree tail: every remaining pair has rate 0
        }
        let mut q = chung_lu_rate_raw(ki, ki, two_m).min(1.0);
        let mut j = i;
        while q > 0.0 {
            let skip = geometric_skip(q, rng).expect("q in (0, 1]");
            j = j.saturating_add(skip as usize);
            if j >= n {
                break;
            }
            let p = chung_lu_rate_raw(ki, deg[j], two_m).min(1.0);
            debug_assert!(p <= q * (1.0 + RATIO_SLACK));
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
    Ok(EdgeList::from_parts(n, edges, false, false, None))
}

/// Per-pair reference for the (misapplied) Chung-Lu inclusion probability
/// `min(1, k_i k_j / 2M)`; used for oracle tests and timing baselines.
pub fn sample_chunglu_bruteforce<R: Rng + ?Sized>(
    k: &DegreeSequence,
    rng: &mut R,
) -> Result<EdgeList> {
    let two_m = check_two_m(k)?;
    let kv = k.values();
    let n = kv.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = chung_lu_rate_raw(kv[i], kv[j], two_m).min(1.0);
            if rng.random::<f64>() < p {
                edges.push(Edge {
                    src: i as u32,
                    dst: j as u32,
                    weight: 1,
                });
            }
        }
    }
    Ok(EdgeList::from_parts(n, edges, false, false, None))
}

/// Stub matching for weighted Chung-Lu: draws `C ~ Poisson(sum(s)/2)`
/// endpoint pairs with each endpoint proportional to strength, redraws
/// self-pairs, and aggregates repeated pairs into integer weights.
pub fn sample_chunglu_stub<R: Rng + ?Sized>(
    k: &DegreeSequence,
    s: &StrengthSequence,
    rng: &mut R,
) -> Result<EdgeList> {
    if k.len() != s.len() {
        return Err(Error::invalid("degree and strength lengths differ"));
    }
    let total: f64 = s.values().iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("strength sequence must have positive total"));
    }
    let n = s.len();
    let mut cum = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &v in s.values() {
        acc += v;
        cum.push(acc);
    }

    let draw_node = |rng: &mut R| -> u32 {
        let x = rng.random::<f64>() * total;
        cum.partition_point(|&c| c <= x).min(n - 1) as u32
    };

    let c_mean = total / 2.0;
    let draws = Poisson::new(c_mean)
        .map_err(|e| Error::invalid(format!("invalid Poisson mean {c_mean}: {e}")))?
        .sample(rng) as u64;

    let mut weights: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for _ in 0..draws {
        loop {
            let a = draw_node(rng);
            let b = draw_node(rng);
            if a != b {
                *weights.entry(ordered_pair(a, b)).or_insert(0) += 1;
                break;
            }
        }
    }
    let edges = weights
        .into_iter()
        .map(|((src, dst), weight)| Edge { src, dst, weight })
        .collect();
    Ok(EdgeList::from_parts(n, edges, false, true, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;

    #[test]
    fn clamped_hub_pair_is_always_present() {
        // two hubs with k_i * k_j > 2M: rate clamps to probability 1
        let k = DegreeSequence::new(vec![8.0, 8.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let mut rng = RngStream::new(3, 0).rng();
        for _ in 0..200 {
            let el = sample_chunglu_mh(&k, &mut rng).unwrap();
            assert!(el.edges().iter().any(|e| (e.src, e.dst) == (0, 1)));
        }
    }

    #[test]
    fn frequencies_match_clamped_rate() {
        let kv = vec![6.0, 5.0, 4.0, 3.0, 2.0, 2.0, 1.0, 1.0];
        let k = DegreeSequence::new(kv.clone()).unwrap();
        let two_m: f64 = kv.iter().sum();
        let n_samples = 30_000usize;
        let mut counts = vec![vec![0u64; 8]; 8];
        let mut rng = RngStream::new(17, 0).rng();
        for _ in 0..n_samples {
            let el = sample_chunglu_mh(&k, &mut rng).unwrap();
            for e in el.edges() {
                counts[e.src as usize][e.dst as usize] += 1;
            }
        }
        for i in 0..8 {
            for j in (i + 1)..8 {
                let p = (kv[i] * kv[j] / two_m).min(1.0);
                let sd = (n_samples as f64 * p * (1.0 - p)).sqrt();
                let diff = counts[i][j] as f64 - n_samples as f64 * p;
                assert!(
                    diff.abs() <= 4.0 * sd.max(1.0),
                    "pair ({i},{j}): {} vs {:.1}",
                    counts[i][j],
                    n_samples as f64 * p
                );
            }
        }
    }

    #[test]
    fn mh_matches_bruteforce_on_uniform_degrees() {
        // identical degrees reduce to Erdos-Renyi; compare edge-count means
        let k = DegreeSequence::new(vec![3.0; 12]).unwrap();
        let p: f64 = 9.0 / 36.0;
        let pairs = 66.0;
        let n_samples = 20_000;
        let mut rng = RngStream::new(29, 0).rng();
        let total: u64 = (0..n_samples)
            .map(|_| sample_chunglu_mh(&k, &mut rng).unwrap().n_edges() as u64)
            .sum();
        let mean = total as f64 / n_samples as f64;
        let se = (pairs * p * (1.0 - p) / n_samples as f64).sqrt();
        assert!((mean - pairs * p).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn stub_matching_two_node_process() {
        // s = (2, 2): C ~ Poisson(2); the only valid pair is (0, 1), so the
        // edge weight given an edge equals C conditioned on C >= 1
        let k = DegreeSequence::new(vec![1.0, 1.0]).unwrap();
        let s = StrengthSequence::new(vec![2.0, 2.0]).unwrap();
        let n_samples = 50_000usize;
        let mut rng = RngStream::new(31, 0).rng();
        let mut hist = [0u64; 8]; // weight 1..=7, index 0 = no edge
        for _ in 0..n_samples {
            let el = sample_chunglu_stub(&k, &s, &mut rng).unwrap();
            match el.edges() {
                [] => hist[0] += 1,
                [e] => {
                    assert_eq!((e.src, e.dst), (0, 1));
                    hist[e.weight.min(7) as usize] += 1;
                }
                _ => panic!("two-node graph cannot have two edges"),
            }
        }
        // direct enumeration of the process: P(no edge) = e^-2,
        // P(w) = 2^w e^-2 / w!
        let lambda: f64 = 2.0;
        let mut expected = [0.0f64; 8];
        expected[0] = (-lambda).exp();
        let mut fact = 1.0;
        for w in 1..=6usize {
            fact *= w as f64;
            expected[w] = lambda.powi(w as i32) * (-lambda).exp() / fact;
        }
        expected[7] = 1.0 - expected[..7].iter().sum::<f64>();
        for w in 0..8 {
            let sd = (n_samples as f64 * expected[w] * (1.0 - expected[w])).sqrt();
            let diff = hist[w] as f64 - n_samples as f64 * expected[w];
            assert!(
                diff.abs() <= 4.0 * sd.max(1.0),
                "w={w}: {} vs {:.1}",
                hist[w],
                n_samples as f64 * expected[w]
            );
        }
    }

    #[test]
    fn stub_matching_uniform_mean_strength() {
        let n = 10usize;
        let k = DegreeSequence::new(vec![2.0; n]).unwrap();
        let s = StrengthSequence::new(vec![4.0; n]).unwrap();
        let n_samples = 10_000usize;
        let mut rng = RngStream::new(37, 0).rng();
        let mut sums = vec![0.0f64; n];
        let mut sq = vec![0.0f64; n];
        for _ in 0..n_samples {
            let el = sample_chunglu_stub(&k, &s, &mut rng).unwrap();
            let mut st = vec![0.0f64; n];
            for e in el.edges() {
                st[e.src as usize] += e.weight as f64;
                st[e.dst as usize] += e.weight as f64;
            }
            for v in 0..n {
                sums[v] += st[v];
                sq[v] += st[v] * st[v];
            }
        }
        for v in 0..n {
            let mean = sums[v] / n_samples as f64;
            let var = sq[v] / n_samples as f64 - mean * mean;
            let se = (var / n_samples as f64).sqrt();
            assert!(
                (mean - 4.0).abs() <= 3.0 * se,
                "node {v}: mean strength {mean}"
            );
        }
    }

    #[test]
    fn zero_total_strength_is_rejected() {
        let k = DegreeSequence::new(vec![0.0, 0.0]).unwrap();
        let s = StrengthSequence::new(vec![0.0, 0.0]).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        assert!(sample_chunglu_stub(&k, &s, &mut rng).is_err());
    }
}
