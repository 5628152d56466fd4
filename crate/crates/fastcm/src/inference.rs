//! Maximum-likelihood fitting of the per-node multipliers.
//!
//! The constraint systems (expected degrees equal `k`, and for the
//! weighted model expected strengths equal `s`) are solved by a damped
//! fixed-point iteration on the multipliers, with a bisection-safe
//! coordinate sweep as a fallback when the fixed point stalls. Nodes with
//! identical constraints share one unknown, which shrinks the system and
//! preserves exactness by symmetry. Zero-degree nodes are excluded from
//! the solve and assigned the `+inf` sentinel (probability zero with any
//! partner).

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{
    ubcm_edge_prob_raw, uecm_edge_prob_raw, uecm_expected_weight_raw, DegreeSequence, Params,
    StrengthSequence, UbcmParams, UecmParams,
};

const ALPHA_MAX: f64 = 800.0;
const BETA_FLOOR: f64 = 1e-12;
const BETA_MAX: f64 = 350.0;
/// Largest multiplier move per iteration; keeps early iterations from
/// overshooting when a residual ratio is extreme or has underflowed.
const STEP_CAP: f64 = 30.0;
/// Fixed-point iterations without a residual improvement before the
/// solver falls back to coordinate bisection.
const STALL_LIMIT: usize = 50;

/// Solver controls.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Max-norm of the relative constraint residual.
    pub tolerance: f64,
    /// Step fraction in (0, 1] applied to each multiplier update.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-8,
            damping: 1.0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::invalid("max_iterations must be >= 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid("tolerance must be positive and finite"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::invalid("damping must be in (0, 1]"));
        }
        Ok(())
    }
}

/// Outcome of a fit. `converged` implies `residual <= tolerance`; a fit
/// that ran out of iterations is returned with `converged = false`, never
/// silently.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FitReport {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub wall_time_seconds: f64,
}

/// Deduplicated constraint classes: nodes with identical targets share
/// one unknown.
struct Classes {
    k: Vec<f64>,
    s: Vec<f64>,
    count: Vec<f64>,
    /// node -> class index; usize::MAX marks excluded zero-degree nodes
    node_class: Vec<usize>,
}

impl Classes {
    fn build(k: &[f64], s: Option<&[f64]>) -> Self {
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        let mut ck = Vec::new();
        let mut cs = Vec::new();
        let mut count = Vec::new();
        let mut node_class = vec![usize::MAX; k.len()];
        for (i, &ki) in k.iter().enumerate() {
            if ki == 0.0 {
                continue;
            }
            let si = s.map_or(0.0, |s| s[i]);
            let key = (ki.to_bits(), si.to_bits());
            let c = *index.entry(key).or_insert_with(|| {
                ck.push(ki);
                cs.push(si);
                count.push(0.0);
                ck.len() - 1
            });
            count[c] += 1.0;
            node_class[i] = c;
        }
        Self {
            k: ck,
            s: cs,
            count,
            node_class,
        }
    }

    fn len(&self) -> usize {
        self.k.len()
    }
}

fn max_rel_residual(actual: &[f64], target: &[f64]) -> f64 {
    actual
        .iter()
        .zip(target)
        .map(|(&a, &t)| (a - t).abs() / t.max(1.0))
        .fold(0.0, f64::max)
}

/// Expected degree of each class under the current multipliers:
/// `f_c = sum_d w_cd p(c, d)` with `w_cd = count_d - [c == d]`.
fn ubcm_class_degrees(alpha: &[f64], count: &[f64], out: &mut [f64]) {
    let u = alpha.len();
    for c in 0..u {
        let mut sum = 0.0;
        for d in 0..u {
            sum += count[d] * ubcm_edge_prob_raw(alpha[c] + alpha[d]);
        }
        out[c] = sum - ubcm_edge_prob_raw(2.0 * alpha[c]);
    }
}

/// Monotone-decreasing residual target for the block update of class `c`:
/// every node of the class takes the trial value simultaneously.
fn ubcm_block_degree(alpha: &[f64], count: &[f64], c: usize, trial: f64) -> f64 {
    let mut sum = 0.0;
    for d in 0..alpha.len() {
        let partner = if d == c { trial } else { alpha[d] };
        let w = if d == c { count[d] - 1.0 } else { count[d] };
        sum += w * ubcm_edge_prob_raw(trial + partner);
    }
    sum
}

fn bisect(lo: f64, hi: f64, mut above: impl FnMut(f64) -> bool) -> f64 {
    // `above(x)` must be true near `lo` and false near `hi` (decreasing
    // residual); returns the crossing within ~1e-13 absolute
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if above(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Fits the UBCM multipliers to a target degree sequence.
pub fn solve_ubcm(k: &DegreeSequence, opts: &SolverOptions) -> Result<(UbcmParams, FitReport)> {
    opts.validate()?;
    let start = Instant::now();
    let n = k.len();
    if n < 2 {
        return Err(Error::invalid("need at least 2 nodes"));
    }
    let kv = k.values();
    if kv.iter().filter(|&&v| v > 0.0).count() < 2 {
        return Err(Error::invalid("need at least two positive degrees"));
    }
    for (i, &ki) in kv.iter().enumerate() {
        if ki >= (n - 1) as f64 {
            return Err(Error::invalid(format!(
                "k[{i}] = {ki} is >= N-1 = {}; the multiplier would diverge",
                n - 1
            )));
        }
    }

    let classes = Classes::build(kv, None);
    let u = classes.len();
    let two_m: f64 = kv.iter().sum();
    let mut alpha: Vec<f64> = classes
        .k
        .iter()
        .map(|&ki| -(ki / two_m.sqrt()).ln())
        .collect();

    let mut f = vec![0.0; u];
    let mut iterations = 0;
    let mut converged = false;
    let mut residual;
    let mut fixed_point = true;
    let mut best = f64::INFINITY;
    let mut since_best = 0;

    loop {
        ubcm_class_degrees(&alpha, &classes.count, &mut f);
        residual = max_rel_residual(&f, &classes.k);
        if residual <= opts.tolerance {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        if fixed_point {
            if residual < best * (1.0 - 1e-3) {
                best = residual;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best > STALL_LIMIT {
                    fixed_point = false;
                }
            }
        }
        if fixed_point {
            for c in 0..u {
                let step = (f[c] / classes.k[c]).ln().clamp(-STEP_CAP, STEP_CAP);
                alpha[c] = (alpha[c] + opts.damping * step).clamp(-ALPHA_MAX, ALPHA_MAX);
            }
        } else {
            for c in 0..u {
                let target = classes.k[c];
                let next = bisect(-ALPHA_MAX, ALPHA_MAX, |a| {
                    ubcm_block_degree(&alpha, &classes.count, c, a) > target
                });
                alpha[c] = next;
            }
        }
    }

    let per_node: Vec<f64> = classes
        .node_class
        .iter()
        .map(|&c| {
            if c == usize::MAX {
                f64::INFINITY
            } else {
                alpha[c]
            }
        })
        .collect();
    let report = FitReport {
        iterations,
        residual,
        converged,
        wall_time_seconds: start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE),
    };
    Ok((UbcmParams::new(per_node)?, report))
}

fn uecm_class_sums(
    alpha: &[f64],
    beta: &[f64],
    count: &[f64],
    deg: &mut [f64],
    str_: &mut [f64],
) {
    let u = alpha.len();
    for c in 0..u {
        let mut fd = 0.0;
        let mut fs = 0.0;
        for d in 0..u {
            let beta_sum = beta[c] + beta[d];
            let full = alpha[c] + alpha[d] + beta_sum;
            let w = if d == c { count[d] - 1.0 } else { count[d] };
            fd += w * uecm_edge_prob_raw(full, beta_sum);
            fs += w * uecm_expected_weight_raw(full, beta_sum);
        }
        deg[c] = fd;
        str_[c] = fs;
    }
}

fn uecm_block_degree(alpha: &[f64], beta: &[f64], count: &[f64], c: usize, trial: f64) -> f64 {
    let mut sum = 0.0;
    for d in 0..alpha.len() {
        let a_partner = if d == c { trial } else { alpha[d] };
        let w = if d == c { count[d] - 1.0 } else { count[d] };
        let beta_sum = beta[c] + beta[d];
        sum += w * uecm_edge_prob_raw(trial + a_partner + beta_sum, beta_sum);
    }
    sum
}

fn uecm_block_strength(alpha: &[f64], beta: &[f64], count: &[f64], c: usize, trial: f64) -> f64 {
    let mut sum = 0.0;
    for d in 0..alpha.len() {
        let b_partner = if d == c { trial } else { beta[d] };
        let w = if d == c { count[d] - 1.0 } else { count[d] };
        let beta_sum = trial + b_partner;
        sum += w * uecm_expected_weight_raw(alpha[c] + alpha[d] + beta_sum, beta_sum);
    }
    sum
}

/// Fits the UECM multiplier pairs to target degree and strength sequences.
pub fn solve_uecm(
    k: &DegreeSequence,
    s: &StrengthSequence,
    opts: &SolverOptions,
) -> Result<(UecmParams, FitReport)> {
    opts.validate()?;
    let start = Instant::now();
    let n = k.len();
    if n < 2 {
        return Err(Error::invalid("need at least 2 nodes"));
    }
    let kv = k.values();
    if kv.iter().filter(|&&v| v > 0.0).count() < 2 {
        return Err(Error::invalid("need at least two positive degrees"));
    }
    for (i, &ki) in kv.iter().enumerate() {
        if ki >= (n - 1) as f64 {
            return Err(Error::invalid(format!(
                "k[{i}] = {ki} is >= N-1 = {}; the multiplier would diverge",
                n - 1
            )));
        }
    }
    s.validate_against(k)?;

    let classes = Classes::build(kv, Some(s.values()));
    let u = classes.len();
    let two_m: f64 = kv.iter().sum();
    let mut alpha: Vec<f64> = classes
        .k
        .iter()
        .map(|&ki| -(ki / two_m.sqrt()).ln())
        .collect();
    // sparse-limit start: per-edge weight s/k implies ratio exp(-2 beta)
    // near 1 - k/s
    let mut beta: Vec<f64> = classes
        .k
        .iter()
        .zip(&classes.s)
        .map(|(&ki, &si)| (si / (si - ki + 1e-6)).ln().clamp(1e-6, BETA_MAX))
        .collect();

    let mut fd = vec![0.0; u];
    let mut fs = vec![0.0; u];
    let mut iterations = 0;
    let mut converged = false;
    let mut residual;
    let mut fixed_point = true;
    let mut best = f64::INFINITY;
    let mut since_best = 0;

    loop {
        uecm_class_sums(&alpha, &beta, &classes.count, &mut fd, &mut fs);
        residual = max_rel_residual(&fd, &classes.k).max(max_rel_residual(&fs, &classes.s));
        if residual <= opts.tolerance {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        if fixed_point {
            if residual < best * (1.0 - 1e-3) {
                best = residual;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best > STALL_LIMIT {
                    fixed_point = false;
                }
            }
        }
        if fixed_point {
            for c in 0..u {
                let da = (fd[c] / classes.k[c]).ln().clamp(-STEP_CAP, STEP_CAP);
                let db = (fs[c] / classes.s[c]).ln().clamp(-STEP_CAP, STEP_CAP);
                alpha[c] = (alpha[c] + opts.damping * da).clamp(-ALPHA_MAX, ALPHA_MAX);
                beta[c] = (beta[c] + opts.damping * db).clamp(BETA_FLOOR, BETA_MAX);
            }
        } else {
            for c in 0..u {
                let target = classes.k[c];
                let next = bisect(-ALPHA_MAX, ALPHA_MAX, |a| {
                    uecm_block_degree(&alpha, &beta, &classes.count, c, a) > target
                });
                alpha[c] = next;
            }
            for c in 0..u {
                let target = classes.s[c];
                if uecm_block_strength(&alpha, &beta, &classes.count, c, BETA_MAX) > target {
                    // even the stiffest weights overshoot: pin at the cap
                    // (the s = k regime) and let the alpha sweep absorb it
                    beta[c] = BETA_MAX;
                } else {
                    let next = bisect(BETA_FLOOR, BETA_MAX, |b| {
                        uecm_block_strength(&alpha, &beta, &classes.count, c, b) > target
                    });
                    beta[c] = next;
                }
            }
        }
    }

    let mut alpha_nodes = Vec::with_capacity(n);
    let mut beta_nodes = Vec::with_capacity(n);
    for &c in &classes.node_class {
        if c == usize::MAX {
            alpha_nodes.push(f64::INFINITY);
            beta_nodes.push(1.0);
        } else {
            alpha_nodes.push(alpha[c]);
            beta_nodes.push(beta[c]);
        }
    }
    let report = FitReport {
        iterations,
        residual,
        converged,
        wall_time_seconds: start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE),
    };
    Ok((UecmParams::new(alpha_nodes, beta_nodes)?, report))
}

/// Expected degree of every node by direct O(N^2) summation of the edge
/// probabilities; the reference path used in tests and reports.
pub fn expected_degrees(params: &Params) -> Vec<f64> {
    match params {
        Params::Ubcm(p) => {
            let a = p.alpha();
            (0..a.len())
                .map(|i| {
                    (0..a.len())
                        .filter(|&j| j != i)
                        .map(|j| ubcm_edge_prob_raw(a[i] + a[j]))
                        .sum()
                })
                .collect()
        }
        Params::Uecm(p) => {
            let (a, b) = (p.alpha(), p.beta());
            (0..a.len())
                .map(|i| {
                    (0..a.len())
                        .filter(|&j| j != i)
                        .map(|j| {
                            let bsum = b[i] + b[j];
                            uecm_edge_prob_raw(a[i] + a[j] + bsum, bsum)
                        })
                        .sum()
                })
                .collect()
        }
    }
}

/// Expected strength of every node by direct O(N^2) summation.
pub fn expected_strengths(params: &UecmParams) -> Vec<f64> {
    let (a, b) = (params.alpha(), params.beta());
    (0..a.len())
        .map(|i| {
            (0..a.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let bsum = b[i] + b[j];
                    uecm_expected_weight_raw(a[i] + a[j] + bsum, bsum)
                })
                .sum()
        })
        .collect()
}
