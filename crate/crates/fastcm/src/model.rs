//! Parameter containers and probability kernels.
//!
//! Every downstream module computes edge and weight probabilities through
//! the functions defined here. All kernels are pure, symmetric in the two
//! node arguments, and evaluated through overflow-safe branches so that
//! parameter sums of magnitude well beyond 700 (hub nodes in heavy-tailed
//! fits) neither overflow nor lose the saturation limits.

use crate::error::{Error, Result};

/// Per-node Lagrange multipliers of the unweighted (binary) model.
///
/// Entries may be `+inf`: that is the isolated-node sentinel (the node
/// connects with probability exactly zero). `NaN` and `-inf` are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct UbcmParams {
    alpha: Vec<f64>,
}

impl UbcmParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::invalid("need at least 2 nodes"));
        }
        if alpha.iter().any(|a| a.is_nan() || *a == f64::NEG_INFINITY) {
            return Err(Error::invalid("alpha entries must not be NaN or -inf"));
        }
        Ok(Self { alpha })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
}

/// Per-node multiplier pairs of the weighted model: `alpha` couples to the
/// degree constraint, `beta` to the strength constraint.
///
/// All `beta` entries are strictly positive so the geometric weight ratio
/// `exp(-beta_i - beta_j)` stays below one and weights are finite. As for
/// [`UbcmParams`], `alpha` entries may be `+inf` (isolated nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct UecmParams {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl UecmParams {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::invalid("alpha and beta lengths differ"));
        }
        if alpha.len() < 2 {
            return Err(Error::invalid("need at least 2 nodes"));
        }
        if alpha.iter().any(|a| a.is_nan() || *a == f64::NEG_INFINITY) {
            return Err(Error::invalid("alpha entries must not be NaN or -inf"));
        }
        if beta.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(Error::invalid("beta entries must be finite and > 0"));
        }
        Ok(Self { alpha, beta })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }
}

/// Either kind of fitted parameters; used where the model kind is decided
/// at run time (parameter files, bipartite/directed sampling, the CLI).
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Ubcm(UbcmParams),
    Uecm(UecmParams),
}

impl Params {
    pub fn len(&self) -> usize {
        match self {
            Params::Ubcm(p) => p.len(),
            Params::Uecm(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_weighted(&self) -> bool {
        matches!(self, Params::Uecm(_))
    }
}

/// Target or realized degrees. Real-valued: the canonical ensemble
/// constrains degrees in expectation, not exactly.
///
/// Entries are finite and non-negative. Consumers that need more (the
/// solvers require at least two positive entries and `k_i < N - 1`, the
/// Chung-Lu samplers a positive total) check it at their boundary, so the
/// type can also hold realized sequences of sparse or empty graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSequence {
    k: Vec<f64>,
}

impl DegreeSequence {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("degrees must be finite and >= 0"));
        }
        Ok(Self { k })
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.k
    }

    /// Expected edge count `M = sum(k) / 2`.
    pub fn edge_count(&self) -> f64 {
        self.k.iter().sum::<f64>() / 2.0
    }
}

/// Target expected strengths (weight sums per node).
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthSequence {
    s: Vec<f64>,
}

impl StrengthSequence {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("strengths must be finite and >= 0"));
        }
        Ok(Self { s })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }

    /// Checks the pairing constraints against a degree sequence: every edge
    /// carries weight >= 1, so `s_i >= k_i`, and `s_i = 0` exactly when
    /// `k_i = 0`.
    pub fn validate_against(&self, k: &DegreeSequence) -> Result<()> {
        if self.len() != k.len() {
            return Err(Error::invalid("degree and strength lengths differ"));
        }
        for (i, (&si, &ki)) in self.s.iter().zip(k.values()).enumerate() {
            if si < ki {
                return Err(Error::invalid(format!(
                    "strength s[{i}] = {si} below degree k[{i}] = {ki}"
                )));
            }
            if (ki == 0.0) != (si == 0.0) {
                return Err(Error::invalid(format!(
                    "node {i} has k = {ki} but s = {si}; both must vanish together"
                )));
            }
        }
        Ok(())
    }
}

/// One edge of a sampled or ingested network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub weight: u64,
}

/// A sampled network as a flat edge list.
///
/// Undirected edges are stored once with `src < dst`; there are never
/// self-loops or duplicate pairs, and all weights are >= 1. `weighted`
/// records whether the weights are meaningful (UECM, stub matching,
/// common-neighbor transform) or all-ones bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    n_nodes: usize,
    edges: Vec<Edge>,
    directed: bool,
    weighted: bool,
    bipartite: Option<(usize, usize)>,
}

impl EdgeList {
    /// Validates the full set of invariants and builds the list.
    pub fn new(
        n_nodes: usize,
        edges: Vec<Edge>,
        directed: bool,
        weighted: bool,
        bipartite: Option<(usize, usize)>,
    ) -> Result<Self> {
        let el = Self::from_parts(n_nodes, edges, directed, weighted, bipartite);
        el.validate()?;
        Ok(el)
    }

    /// Builds without the O(M log M) duplicate scan; for sampler output
    /// that is correct by construction. Debug builds still validate.
    pub(crate) fn from_parts(
        n_nodes: usize,
        edges: Vec<Edge>,
        directed: bool,
        weighted: bool,
        bipartite: Option<(usize, usize)>,
    ) -> Self {
        let el = Self {
            n_nodes,
            edges,
            directed,
            weighted,
            bipartite,
        };
        debug_assert!(el.validate().is_ok(), "sampler emitted an invalid edge list");
        el
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((p, q)) = self.bipartite {
            if p + q != self.n_nodes {
                return Err(Error::invalid("bipartite partition sizes do not sum to n_nodes"));
            }
        }
        for e in &self.edges {
            if e.src as usize >= self.n_nodes || e.dst as usize >= self.n_nodes {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) out of range for {} nodes",
                    e.src, e.dst, self.n_nodes
                )));
            }
            if e.src == e.dst {
                return Err(Error::invalid(format!("self-loop at node {}", e.src)));
            }
            if !self.directed && e.src > e.dst {
                return Err(Error::invalid(format!(
                    "undirected edge ({}, {}) not stored as src < dst",
                    e.src, e.dst
                )));
            }
            if e.weight == 0 {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) has weight 0",
                    e.src, e.dst
                )));
            }
            if !self.weighted && e.weight != 1 {
                return Err(Error::invalid(format!(
                    "unweighted list carries weight {} on ({}, {})",
                    e.weight, e.src, e.dst
                )));
            }
        }
        let mut pairs: Vec<(u32, u32)> = self.edges.iter().map(|e| (e.src, e.dst)).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate edge pair"));
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn bipartite(&self) -> Option<(usize, usize)> {
        self.bipartite
    }

    /// Total edge weight.
    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Edges sorted by `(src, dst)`; the canonical on-disk order.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut edges = self.edges.clone();
        edges.sort_unstable_by_key(|e| (e.src, e.dst));
        edges
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v == f64::NEG_INFINITY {
        return Err(Error::invalid(format!("{name} must not be NaN or -inf")));
    }
    Ok(())
}

/// Numerically stable `exp(x) / (c + exp(x))` for `c > 0`.
///
/// `x = +inf` maps to 1 and `x = -inf` to 0; no intermediate overflow.
#[inline]
pub(crate) fn exp_ratio(x: f64, c: f64) -> f64 {
    if x > 0.0 {
        1.0 / (c * (-x).exp() + 1.0)
    } else {
        let e = x.exp();
        e / (c + e)
    }
}

/// Chung-Lu expected edge count `k_i * k_j / (2M)` for the pair.
///
/// The caller decides whether to clamp the rate when it is misused as an
/// inclusion probability; see the Chung-Lu samplers.
pub fn chung_lu_rate(k_i: f64, k_j: f64, m: f64) -> Result<f64> {
    if !k_i.is_finite() || !k_j.is_finite() || !m.is_finite() {
        return Err(Error::invalid("chung_lu_rate: non-finite input"));
    }
    if m <= 0.0 {
        return Err(Error::invalid("chung_lu_rate: M must be > 0"));
    }
    if k_i < 0.0 || k_j < 0.0 {
        return Err(Error::invalid("chung_lu_rate: degrees must be >= 0"));
    }
    Ok(k_i * k_j / (2.0 * m))
}

/// `k_i * k_j / two_m` without argument checks; hot-path form used by the
/// samplers after the degree sequence has been validated.
#[inline]
pub(crate) fn chung_lu_rate_raw(k_i: f64, k_j: f64, two_m: f64) -> f64 {
    k_i * k_j / two_m
}

/// UBCM edge probability, the sigmoid `exp(-a_i-a_j) / (1 + exp(-a_i-a_j))`.
pub fn ubcm_edge_prob(alpha_i: f64, alpha_j: f64) -> Result<f64> {
    check_finite("alpha_i", alpha_i)?;
    check_finite("alpha_j", alpha_j)?;
    Ok(ubcm_edge_prob_raw(alpha_i + alpha_j))
}

/// Sigmoid of `-alpha_sum` on the overflow-safe branch.
#[inline]
pub(crate) fn ubcm_edge_prob_raw(alpha_sum: f64) -> f64 {
    exp_ratio(-alpha_sum, 1.0)
}

fn check_beta_pair(beta_i: f64, beta_j: f64) -> Result<f64> {
    check_finite("beta_i", beta_i)?;
    check_finite("beta_j", beta_j)?;
    let bsum = beta_i + beta_j;
    if !(bsum > 0.0) {
        return Err(Error::invalid(format!(
            "beta_i + beta_j must be > 0, got {bsum}"
        )));
    }
    Ok(bsum)
}

/// UECM edge-existence probability:
/// `exp(-a_i-a_j-b_i-b_j) / (1 - exp(-b_i-b_j) + exp(-a_i-a_j-b_i-b_j))`.
pub fn uecm_edge_prob(alpha_i: f64, alpha_j: f64, beta_i: f64, beta_j: f64) -> Result<f64> {
    check_finite("alpha_i", alpha_i)?;
    check_finite("alpha_j", alpha_j)?;
    let bsum = check_beta_pair(beta_i, beta_j)?;
    Ok(uecm_edge_prob_raw(alpha_i + alpha_j + bsum, bsum))
}

/// `exp(-t) / (c + exp(-t))` with `t = a_i+a_j+b_i+b_j` and
/// `c = 1 - exp(-b_i-b_j)` evaluated via `expm1`.
#[inline]
pub(crate) fn uecm_edge_prob_raw(full_sum: f64, beta_sum: f64) -> f64 {
    exp_ratio(-full_sum, -(-beta_sum).exp_m1())
}

/// Conditional weight law given that the edge exists: geometric on
/// `w >= 1` with ratio `exp(-b_i-b_j)`.
pub fn uecm_weight_pmf(w: u64, beta_i: f64, beta_j: f64) -> Result<f64> {
    let bsum = check_beta_pair(beta_i, beta_j)?;
    if w < 1 {
        return Err(Error::invalid("weight must be >= 1"));
    }
    // r^(w-1) * (1 - r) with r = exp(-bsum), evaluated in log space so
    // large w cannot overflow the power.
    let log_pow = -(bsum) * (w - 1) as f64;
    Ok(log_pow.exp() * (-(-bsum).exp_m1()))
}

/// Upper bound on [`uecm_edge_prob`] obtained by replacing the pair's
/// `exp(-b_i-b_j)` in the denominator with `exp(-beta_min)`, where
/// `beta_min` lower-bounds `b_i + b_j` over the pairs still to be scanned.
pub fn uecm_upper_bound_prob(
    alpha_i: f64,
    alpha_j: f64,
    beta_i: f64,
    beta_j: f64,
    beta_min: f64,
) -> Result<f64> {
    check_finite("alpha_i", alpha_i)?;
    check_finite("alpha_j", alpha_j)?;
    let bsum = check_beta_pair(beta_i, beta_j)?;
    if !(beta_min > 0.0) {
        return Err(Error::invalid("beta_min must be > 0"));
    }
    if beta_min > bsum {
        return Err(Error::ContractViolation(format!(
            "beta_min = {beta_min} exceeds beta_i + beta_j = {bsum}; the bound premise fails"
        )));
    }
    Ok(uecm_upper_bound_prob_raw(
        alpha_i + alpha_j + bsum,
        beta_min,
    ))
}

#[inline]
pub(crate) fn uecm_upper_bound_prob_raw(full_sum: f64, beta_min: f64) -> f64 {
    exp_ratio(-full_sum, -(-beta_min).exp_m1())
}

/// Mean of the pair's weight including the no-edge case:
/// `uecm_edge_prob / (1 - exp(-b_i-b_j)) = sum_w w * P(w_ij = w)`.
pub fn uecm_expected_weight(alpha_i: f64, alpha_j: f64, beta_i: f64, beta_j: f64) -> Result<f64> {
    let p = uecm_edge_prob(alpha_i, alpha_j, beta_i, beta_j)?;
    let bsum = beta_i + beta_j;
    Ok(p / -(-bsum).exp_m1())
}

#[inline]
pub(crate) fn uecm_expected_weight_raw(full_sum: f64, beta_sum: f64) -> f64 {
    uecm_edge_prob_raw(full_sum, beta_sum) / -(-beta_sum).exp_m1()
}
