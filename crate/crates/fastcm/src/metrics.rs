//! Network statistics used in the evaluation harness: degree/strength
//! recovery, rich-club density, triangle counts, and per-sample records.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::model::{DegreeSequence, EdgeList, StrengthSequence};

/// Mean squared error of logarithmic values,
/// `N^-1 sum_i [ln(x_i + 1) - ln(xhat_i + 1)]^2`; shared by the degree and
/// strength comparisons.
pub fn log_sequence_mse(reference: &[f64], sampled: &[f64]) -> Result<f64> {
    if reference.len() != sampled.len() {
        return Err(Error::invalid("sequence lengths differ"));
    }
    if reference.is_empty() {
        return Err(Error::invalid("empty sequences"));
    }
    let sum: f64 = reference
        .iter()
        .zip(sampled)
        .map(|(&a, &b)| {
            let d = a.ln_1p() - b.ln_1p();
            d * d
        })
        .sum();
    Ok(sum / reference.len() as f64)
}

/// Mean squared error of logarithmic degrees,
/// `N^-1 sum_i [ln(k_i + 1) - ln(khat_i + 1)]^2`.
pub fn log_degree_mse(k_ref: &DegreeSequence, k_sampled: &DegreeSequence) -> Result<f64> {
    log_sequence_mse(k_ref.values(), k_sampled.values())
}

/// Density of edges within the top `ceil(alpha * N)` nodes ranked by the
/// reference degree sequence (ties broken by ascending node id, so group
/// membership is fixed across an ensemble).
pub fn rich_club_density(edges: &EdgeList, k: &DegreeSequence, alpha: f64) -> Result<f64> {
    if edges.is_directed() {
        return Err(Error::invalid("rich-club density expects an undirected network"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha must be in (0, 1]"));
    }
    let n = k.len();
    if n != edges.n_nodes() {
        return Err(Error::invalid("degree sequence length differs from node count"));
    }
    let group = (alpha * n as f64).ceil() as usize;
    if group < 2 {
        return Err(Error::invalid(format!(
            "rich-club group of {group} node(s) is too small; need at least 2"
        )));
    }
    let mut ranked: Vec<u32> = (0..n as u32).collect();
    ranked.sort_unstable_by(|&a, &b| {
        k.values()[b as usize]
            .total_cmp(&k.values()[a as usize])
            .then(a.cmp(&b))
    });
    let mut in_group = vec![false; n];
    for &v in &ranked[..group] {
        in_group[v as usize] = true;
    }
    let inside = edges
        .edges()
        .iter()
        .filter(|e| in_group[e.src as usize] && in_group[e.dst as usize])
        .count();
    let pairs = group * (group - 1) / 2;
    Ok(inside as f64 / pairs as f64)
}

fn sorted_adjacency(edges: &EdgeList) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); edges.n_nodes()];
    for e in edges.edges() {
        adj[e.src as usize].push(e.dst);
        adj[e.dst as usize].push(e.src);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Number of node triples with all three edges present. Weights are
/// ignored: any weight >= 1 counts as a binary edge.
pub fn triangle_count(edges: &EdgeList) -> Result<u64> {
    if edges.is_directed() {
        return Err(Error::invalid("triangle count expects an undirected network"));
    }
    let adj = sorted_adjacency(edges);
    let mut triangles = 0u64;
    // each triangle a < b < c is counted once: at edge (a, b), as the
    // common neighbor c > b
    for e in edges.edges() {
        let (u, v) = (e.src as usize, e.dst as usize);
        let (mut a, mut b) = (&adj[u][..], &adj[v][..]);
        while let (Some(&x), Some(&y)) = (a.first(), b.first()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => a = &a[1..],
                std::cmp::Ordering::Greater => b = &b[1..],
                std::cmp::Ordering::Equal => {
                    if x > e.dst {
                        triangles += 1;
                    }
                    a = &a[1..];
                    b = &b[1..];
                }
            }
        }
    }
    Ok(triangles)
}

/// Realized degree (edge count per node) and strength (weight sum per
/// node) of a sampled network.
pub fn degree_and_strength(edges: &EdgeList) -> (DegreeSequence, StrengthSequence) {
    let n = edges.n_nodes();
    let mut k = vec![0.0f64; n];
    let mut s = vec![0.0f64; n];
    for e in edges.edges() {
        k[e.src as usize] += 1.0;
        k[e.dst as usize] += 1.0;
        s[e.src as usize] += e.weight as f64;
        s[e.dst as usize] += e.weight as f64;
    }
    (
        DegreeSequence::new(k).expect("realized degrees are finite"),
        StrengthSequence::new(s).expect("realized strengths are finite"),
    )
}

/// Per-sample measurements of one ensemble member.
#[derive(Debug, Clone)]
pub struct SampleRecord {
    pub sample_id: usize,
    pub seed: u64,
    pub stream: u64,
    pub wall_time: Duration,
    pub n_edges: usize,
    pub degrees: Vec<f64>,
    pub strengths: Option<Vec<f64>>,
    pub triangles: u64,
    pub log_degree_mse: f64,
    pub log_strength_mse: Option<f64>,
    /// `(alpha_level, density)` pairs, one per requested level.
    pub rich_club: Vec<(f64, f64)>,
}

/// Records for a full ensemble; one entry per requested sample.
#[derive(Debug, Clone, Default)]
pub struct EnsembleReport {
    pub records: Vec<SampleRecord>,
}

impl EnsembleReport {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn triangle_counts(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.triangles).collect()
    }

    pub fn mean_log_degree_mse(&self) -> f64 {
        let n = self.records.len().max(1) as f64;
        self.records.iter().map(|r| r.log_degree_mse).sum::<f64>() / n
    }

    /// Ensemble mean of the realized degree of every node.
    pub fn mean_degrees(&self) -> Vec<f64> {
        let Some(first) = self.records.first() else {
            return Vec::new();
        };
        let mut acc = vec![0.0; first.degrees.len()];
        for r in &self.records {
            for (a, &d) in acc.iter_mut().zip(&r.degrees) {
                *a += d;
            }
        }
        let n = self.records.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    /// Mean rich-club density per level, in the level order of the records.
    pub fn mean_rich_club(&self) -> Vec<(f64, f64)> {
        let Some(first) = self.records.first() else {
            return Vec::new();
        };
        let mut acc: Vec<(f64, f64)> = first.rich_club.iter().map(|&(l, _)| (l, 0.0)).collect();
        for r in &self.records {
            for (slot, &(_, d)) in acc.iter_mut().zip(&r.rich_club) {
                slot.1 += d;
            }
        }
        let n = self.records.len() as f64;
        acc.iter_mut().for_each(|slot| slot.1 /= n);
        acc
    }
}
