//! Synthetic inputs for experiments: the Holme-Kim growing network and the
//! common-neighbor weighting transform.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Edge, EdgeList};

/// Grows a scale-free clustered network: starting from a complete graph on
/// `m` nodes, each new node attaches `m` edges. Each attachment is, with
/// probability `p_triad`, a triad-closure step (connect to a random
/// neighbor of the previously attached target), otherwise a
/// degree-preferential attachment step; triad steps with no eligible
/// neighbor fall back to preferential attachment, and collisions are
/// redrawn.
pub fn holme_kim<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    p_triad: f64,
    rng: &mut R,
) -> Result<EdgeList> {
    if m < 1 || m >= n {
        return Err(Error::invalid(format!(
            "need 1 <= m < n, got m = {m}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p_triad) {
        return Err(Error::invalid("p_triad must be in [0, 1]"));
    }

    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut edge_set: HashSet<(u32, u32)> = HashSet::new();
    // flat endpoint list: picking a uniform entry is exactly
    // degree-proportional sampling
    let mut endpoints: Vec<u32> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();

    let add_edge = |a: u32,
                        b: u32,
                        adj: &mut Vec<Vec<u32>>,
                        edge_set: &mut HashSet<(u32, u32)>,
                        endpoints: &mut Vec<u32>,
                        edges: &mut Vec<Edge>| {
        let (src, dst) = if a < b { (a, b) } else { (b, a) };
        adj[a as usize].push(b);
        adj[b as usize].push(a);
        edge_set.insert((src, dst));
        endpoints.push(a);
        endpoints.push(b);
        edges.push(Edge {
            src,
            dst,
            weight: 1,
        });
    };

    for i in 0..m as u32 {
        for j in (i + 1)..m as u32 {
            add_edge(i, j, &mut adj, &mut edge_set, &mut endpoints, &mut edges);
        }
    }

    for v in m as u32..n as u32 {
        let mut targets: Vec<u32> = Vec::with_capacity(m);
        let mut prev: Option<u32> = None;
        for _ in 0..m {
            let mut target = None;
            if let Some(p) = prev {
                if rng.random::<f64>() < p_triad {
                    let eligible: Vec<u32> = adj[p as usize]
                        .iter()
                        .copied()
                        .filter(|w| *w != v && !targets.contains(w))
                        .collect();
                    if !eligible.is_empty() {
                        target = Some(eligible[rng.random_range(0..eligible.len())]);
                    }
                }
            }
            let target = target.unwrap_or_else(|| loop {
                let t = if endpoints.is_empty() {
                    // seedless start (m = 1): attach uniformly
                    rng.random_range(0..v)
                } else {
                    endpoints[rng.random_range(0..endpoints.len())]
                };
                if t != v && !targets.contains(&t) {
                    break t;
                }
            });
            add_edge(v, target, &mut adj, &mut edge_set, &mut endpoints, &mut edges);
            targets.push(target);
            prev = Some(target);
        }
    }

    Ok(EdgeList::from_parts(n, edges, false, false, None))
}

/// Assigns each edge the weight `1 + |N(i) ∩ N(j)|` (one plus the number
/// of common neighbors); topology is preserved exactly.
pub fn common_neighbor_weights(edges: &EdgeList) -> Result<EdgeList> {
    if edges.is_directed() {
        return Err(Error::invalid("expected an undirected network"));
    }
    if edges.is_weighted() {
        return Err(Error::invalid("expected an unweighted network"));
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); edges.n_nodes()];
    for e in edges.edges() {
        adj[e.src as usize].push(e.dst);
        adj[e.dst as usize].push(e.src);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let weighted = edges
        .edges()
        .iter()
        .map(|e| {
            let (mut a, mut b) = (&adj[e.src as usize][..], &adj[e.dst as usize][..]);
            let mut common = 0u64;
            while let (Some(&x), Some(&y)) = (a.first(), b.first()) {
                match x.cmp(&y) {
                    std::cmp::Ordering::Less => a = &a[1..],
                    std::cmp::Ordering::Greater => b = &b[1..],
                    std::cmp::Ordering::Equal => {
                        common += 1;
                        a = &a[1..];
                        b = &b[1..];
                    }
                }
            }
            Edge {
                src: e.src,
                dst: e.dst,
                weight: 1 + common,
            }
        })
        .collect();
    Ok(EdgeList::from_parts(
        edges.n_nodes(),
        weighted,
        false,
        true,
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngStream;

    fn connected(el: &EdgeList) -> bool {
        let n = el.n_nodes();
        let mut adj = vec![Vec::new(); n];
        for e in el.edges() {
            adj[e.src as usize].push(e.dst as usize);
            adj[e.dst as usize].push(e.src as usize);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn mean_clustering(el: &EdgeList) -> f64 {
        let n = el.n_nodes();
        let mut adj = vec![HashSet::new(); n];
        for e in el.edges() {
            adj[e.src as usize].insert(e.dst);
            adj[e.dst as usize].insert(e.src);
        }
        let mut total = 0.0;
        for v in 0..n {
            let neigh: Vec<u32> = adj[v].iter().copied().collect();
            let d = neigh.len();
            if d < 2 {
                continue;
            }
            let mut links = 0usize;
            for i in 0..d {
                for j in (i + 1)..d {
                    if adj[neigh[i] as usize].contains(&neigh[j]) {
                        links += 1;
                    }
                }
            }
            total += 2.0 * links as f64 / (d * (d - 1)) as f64;
        }
        total / n as f64
    }

    #[test]
    fn edge_count_is_exact() {
        let mut rng = RngStream::new(5, 0).rng();
        let el = holme_kim(500, 10, 0.1, &mut rng).unwrap();
        // m(n - m) growth edges plus the complete seed
        assert_eq!(el.n_edges(), 10 * (500 - 10) + 45);
        assert_eq!(el.n_nodes(), 500);
    }

    #[test]
    fn output_is_simple_and_connected() {
        let mut rng = RngStream::new(6, 0).rng();
        for (n, m, p) in [(80, 1, 0.0), (120, 3, 0.5), (60, 5, 1.0)] {
            let el = holme_kim(n, m, p, &mut rng).unwrap();
            el.validate().unwrap();
            assert!(connected(&el), "n={n} m={m} p={p}");
        }
    }

    #[test]
    fn triad_closure_raises_clustering() {
        // paired comparison over 20 seeds
        let mut wins = 0;
        for seed in 0..20 {
            let c0 = mean_clustering(
                &holme_kim(300, 4, 0.0, &mut RngStream::new(seed, 0).rng()).unwrap(),
            );
            let c1 = mean_clustering(
                &holme_kim(300, 4, 1.0, &mut RngStream::new(seed, 1).rng()).unwrap(),
            );
            if c1 > c0 {
                wins += 1;
            }
        }
        assert!(wins >= 19, "triad closure won only {wins}/20 comparisons");
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let a = holme_kim(200, 3, 0.3, &mut RngStream::new(9, 2).rng()).unwrap();
        let b = holme_kim(200, 3, 0.3, &mut RngStream::new(9, 2).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!(holme_kim(5, 5, 0.1, &mut rng).is_err());
        assert!(holme_kim(5, 0, 0.1, &mut rng).is_err());
        assert!(holme_kim(5, 2, 1.5, &mut rng).is_err());
    }

    #[test]
    fn common_neighbor_weight_examples() {
        let tri = EdgeList::new(
            3,
            [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(src, dst)| Edge {
                    src,
                    dst,
                    weight: 1,
                })
                .collect(),
            false,
            false,
            None,
        )
        .unwrap();
        let w = common_neighbor_weights(&tri).unwrap();
        assert!(w.edges().iter().all(|e| e.weight == 2));

        let star = EdgeList::new(
            5,
            (1..5)
                .map(|d| Edge {
                    src: 0,
                    dst: d,
                    weight: 1,
                })
                .collect(),
            false,
            false,
            None,
        )
        .unwrap();
        let w = common_neighbor_weights(&star).unwrap();
        assert!(w.edges().iter().all(|e| e.weight == 1));

        let mut pairs = Vec::new();
        for i in 0..4u32 {
            for j in (i + 1)..4 {
                pairs.push(Edge {
                    src: i,
                    dst: j,
                    weight: 1,
                });
            }
        }
        let k4 = EdgeList::new(4, pairs, false, false, None).unwrap();
        let w = common_neighbor_weights(&k4).unwrap();
        assert!(w.edges().iter().all(|e| e.weight == 3));

        // topology preserved, weighted input rejected
        assert_eq!(
            w.edges().iter().map(|e| (e.src, e.dst)).collect::<Vec<_>>(),
            k4.edges().iter().map(|e| (e.src, e.dst)).collect::<Vec<_>>()
        );
        assert!(common_neighbor_weights(&w).is_err());
    }
}
