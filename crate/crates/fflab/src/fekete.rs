//! Weighted Fekete configurations and their Fejér constants.
//!
//! For nodes `x_1 < ... < x_n` and a weight `w = e^{-Q}` the energy is
//!
//! ```text
//! F(X) = 2 sum_{i<j} ln|x_i - x_j| - sum_k Q(x_k)
//! ```
//!
//! Its gradient components are the Fejér constants
//! `C_k = 2 sum_{i != k} 1/(x_k - x_i) - Q'(x_k)`, so a weighted Fekete
//! set (an interior maximizer of `F`) is exactly a configuration with
//! all Fejér constants zero. The Hessian has the arrow-free structure
//! `H_jk = 2/(x_j - x_k)^2` off the diagonal and
//! `H_jj = -2 sum_{i != j} 1/(x_j - x_i)^2 - Q''(x_j)`, which is
//! negative definite whenever `Q'' > 0` somewhere along the
//! configuration — that is what lets a plain damped Newton iteration on
//! the gradient converge quadratically from the orthogonal-polynomial
//! zeros.
//!
//! For `Q'' == 0` along the whole configuration (the `e^{-x}` weight,
//! or the unit jacobi weight) the Hessian annihilates the constant
//! vector, `F` has no interior maximizer, and the solver refuses to
//! start; the Fejér constants are still perfectly well defined there.

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::orthopoly::Recurrence;
use crate::quad::{neumaier, neumaier_sorted};
use crate::weights::Weight;

/// The weighted energy `F(X)`. Terms are accumulated through a sorted
/// compensated sum, so configurations that are reflections of each other
/// under an even weight produce bit-identical values.
pub fn objective(w: &Weight, x: &[f64]) -> f64 {
    let n = x.len();
    let mut terms = Vec::with_capacity(n * (n + 1) / 2);
    for j in 1..n {
        for i in 0..j {
            terms.push(2.0 * (x[j] - x[i]).abs().ln());
        }
    }
    for &xk in x {
        terms.push(-w.q(xk));
    }
    neumaier_sorted(&terms)
}

/// Fejér constants `C_k = 2 sum_{i != k} 1/(x_k - x_i) - Q'(x_k)`; the
/// gradient of [`objective`].
pub fn fejer_constants(w: &Weight, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let s = neumaier(
                (0..n)
                    .filter(|&i| i != k)
                    .map(|i| 1.0 / (x[k] - x[i])),
            );
            2.0 * s - w.q1(x[k])
        })
        .collect()
}

/// Dense row-major Hessian of [`objective`].
pub fn hessian(w: &Weight, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut h = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = -w.q2(x[j]);
        for k in 0..n {
            if k == j {
                continue;
            }
            let d = x[j] - x[k];
            let v = 2.0 / (d * d);
            h[j * n + k] = v;
            diag -= v;
        }
        h[j * n + j] = diag;
    }
    h
}

/// Result of a Fekete solve.
#[derive(Debug, Clone)]
pub struct FeketeResult {
    /// Converged configuration, strictly increasing.
    pub x: Vec<f64>,
    /// Newton iterations consumed (line-search retries not counted).
    pub iterations: usize,
    /// `max_k |C_k|` at the returned configuration.
    pub residual: f64,
    /// Energy at the returned configuration.
    pub objective: f64,
}

fn admissible(w: &Weight, x: &[f64]) -> bool {
    let (a, b) = w.support();
    let mut prev = f64::NEG_INFINITY;
    for &v in x {
        if !v.is_finite() || v <= a || v >= b || v <= prev {
            return false;
        }
        prev = v;
    }
    true
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
}

fn default_init(w: &Weight, n: usize) -> Result<Vec<f64>> {
    if let Ok(rec) = Recurrence::compute(w, n) {
        if let Ok(z) = rec.zeros(n) {
            return Ok(z);
        }
    }
    // Fall back to scaled Chebyshev points.
    let (a, b) = w.support();
    let cheb: Vec<f64> = (0..n)
        .map(|k| {
            let t = std::f64::consts::PI * (n as f64 - 0.5 - k as f64) / n as f64;
            t.cos()
        })
        .collect();
    if a.is_finite() && b.is_finite() {
        let mid = 0.5 * (a + b);
        let hw = 0.45 * (b - a);
        Ok(cheb.iter().map(|c| mid + hw * c).collect())
    } else if a.is_finite() {
        let scale = w.mrs_number(n as f64).unwrap_or(1.0 + (n as f64).sqrt());
        Ok(cheb.iter().map(|c| a + 0.5 * scale * (1.0 + c)).collect())
    } else {
        let scale = w.mrs_number(n as f64).unwrap_or(1.0 + (n as f64).sqrt());
        Ok(cheb.iter().map(|c| 0.9 * scale * c).collect())
    }
}

/// Damped Newton iteration on the Fejér constants, maximizing `F`.
///
/// Starts from `init` when given (must be strictly increasing and
/// interior), otherwise from the zeros of the degree-`n` orthogonal
/// polynomial of `w`. Convergence means `max_k |C_k| < 1e-10`; after
/// that a few undamped polishing steps push the residual toward
/// rounding level.
pub fn solve(w: &Weight, n: usize, init: Option<&[f64]>) -> Result<FeketeResult> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "fekete solve needs at least one node".into(),
        ));
    }
    let mut x = match init {
        Some(v) => {
            if v.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "initial configuration has {} nodes, expected {n}",
                    v.len()
                )));
            }
            if !admissible(w, v) {
                return Err(Error::InvalidParameter(
                    "initial configuration must be strictly increasing and interior".into(),
                ));
            }
            v.to_vec()
        }
        None => default_init(w, n)?,
    };

    // The energy only has an interior maximum when Q contributes some
    // convexity along the configuration.
    let mut curvature = 0.0;
    for &xk in &x {
        let c = w.q2(xk);
        if !c.is_finite() || c < -1e-12 {
            return Err(Error::InvalidParameter(format!(
                "potential is not convex at x = {xk} (Q'' = {c:e}); \
                 the energy has no interior maximum there"
            )));
        }
        curvature += c.max(0.0);
    }
    if curvature <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Q'' vanishes along the whole configuration of weight {}; \
             the energy gradient sums to a nonzero constant and no Fekete set exists",
            w.label()
        )));
    }

    let mut fx = objective(w, &x);
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..200 {
        let c = fejer_constants(w, &x);
        let res = max_abs(&c);
        if res < 1e-10 {
            converged = true;
            break;
        }
        let h = hessian(w, &x);
        let neg: Vec<f64> = h.iter().map(|v| -v).collect();
        let chol = Cholesky::factor(&neg, n).map_err(|e| {
            Error::NoConvergence(format!(
                "fekete newton: negated Hessian lost positive definiteness ({e})"
            ))
        })?;
        let s = chol.solve(&c);
        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&s).map(|(xi, si)| xi + t * si).collect();
            if admissible(w, &cand) {
                let fc = objective(w, &cand);
                // Near the maximizer the energy increments drop below
                // rounding; inside the quadratic basin accept on
                // admissibility alone.
                if fc > fx || res < 1e-6 {
                    x = cand;
                    fx = fc;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence(format!(
                "fekete newton stalled at residual {res:e} after {iterations} iterations"
            )));
        }
        iterations += 1;
    }
    if !converged {
        let res = max_abs(&fejer_constants(w, &x));
        return Err(Error::NoConvergence(format!(
            "fekete newton: residual {res:e} after {iterations} iterations"
        )));
    }

    // Undamped polish: keep stepping while the residual strictly drops.
    for _ in 0..3 {
        let c = fejer_constants(w, &x);
        let res = max_abs(&c);
        if res < 1e-14 {
            break;
        }
        let h = hessian(w, &x);
        let neg: Vec<f64> = h.iter().map(|v| -v).collect();
        let Ok(chol) = Cholesky::factor(&neg, n) else { break };
        let s = chol.solve(&c);
        let cand: Vec<f64> = x.iter().zip(&s).map(|(xi, si)| xi + si).collect();
        if !admissible(w, &cand) {
            break;
        }
        if max_abs(&fejer_constants(w, &cand)) < res {
            x = cand;
        } else {
            break;
        }
    }

    let residual = max_abs(&fejer_constants(w, &x));
    let objective = objective(w, &x);
    Ok(FeketeResult {
        x,
        iterations,
        residual,
        objective,
    })
}

/// Serializable record of the constants at one configuration.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FejerReport {
    pub nodes: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "max_abs_C")]
    pub max_abs_c: f64,
    /// The energy Hessian is negative definite at the configuration.
    #[serde(rename = "neg_def")]
    pub hessian_negative_definite: bool,
    /// Newton iterations behind the configuration (zero when the nodes
    /// were supplied rather than solved for).
    pub iterations: usize,
}

/// Bundle the Fejér constants, their sup, and the Hessian verdict at a
/// given configuration.
pub fn fejer_report(w: &Weight, nodes: &[f64], iterations: usize) -> Result<FejerReport> {
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("no nodes given".into()));
    }
    if !admissible(w, nodes) {
        return Err(Error::InvalidParameter(
            "nodes must be strictly increasing and interior to the support".into(),
        ));
    }
    let c = fejer_constants(w, nodes);
    let h = hessian(w, nodes);
    let neg: Vec<f64> = h.iter().map(|v| -v).collect();
    Ok(FejerReport {
        max_abs_c: max_abs(&c),
        hessian_negative_definite: Cholesky::factor(&neg, nodes.len()).is_ok(),
        nodes: nodes.to_vec(),
        c,
        iterations,
    })
}

/// Multi-start agreement probe.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UniquenessReport {
    pub starts: usize,
    /// Largest node-set distance between any two converged solutions.
    pub max_pairwise_distance: f64,
    /// Negated-Hessian Cholesky succeeded at every solution.
    pub all_hessians_negative_definite: bool,
    /// Solution from the first start.
    pub nodes: Vec<f64>,
}

/// Run [`solve`] from `starts` randomized initial configurations and
/// measure how far apart the solutions land. Each start jitters every
/// node of the default initialization within a fraction of its gaps
/// (ordering survives by construction) and stretches the whole
/// configuration about its mean.
pub fn uniqueness_probe(
    w: &Weight,
    n: usize,
    starts: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<UniquenessReport> {
    use rand::Rng;
    if starts == 0 {
        return Err(Error::InvalidParameter(
            "uniqueness probe needs at least one start".into(),
        ));
    }
    let base = default_init(w, n)?;
    let (a, b) = w.support();
    let mut solutions: Vec<Vec<f64>> = Vec::with_capacity(starts);
    let mut all_neg_def = true;
    for s in 0..starts {
        let mut init = Vec::with_capacity(n);
        let mut attempts = 0;
        loop {
            init.clear();
            let stretch = rng.gen_range(0.85..1.2);
            let mean = base.iter().sum::<f64>() / n as f64;
            for k in 0..n {
                let lo_gap = if k == 0 {
                    if a.is_finite() { base[k] - a } else { 1.0 }
                } else {
                    base[k] - base[k - 1]
                };
                let hi_gap = if k + 1 == n {
                    if b.is_finite() { b - base[k] } else { 1.0 }
                } else {
                    base[k + 1] - base[k]
                };
                let jitter = rng.gen_range(-0.35 * lo_gap..0.35 * hi_gap);
                init.push(mean + stretch * (base[k] - mean + jitter));
            }
            if admissible(w, &init) {
                break;
            }
            attempts += 1;
            if attempts > 100 {
                return Err(Error::InvalidParameter(format!(
                    "could not draw an admissible start for weight {}",
                    w.label()
                )));
            }
        }
        let sol = solve(w, n, Some(&init))
            .map_err(|e| Error::NoConvergence(format!("start {s}: {e}")))?;
        let h = hessian(w, &sol.x);
        let neg: Vec<f64> = h.iter().map(|v| -v).collect();
        all_neg_def &= Cholesky::factor(&neg, n).is_ok();
        solutions.push(sol.x);
    }
    let mut max_pairwise_distance = 0.0_f64;
    for i in 0..solutions.len() {
        for j in i + 1..solutions.len() {
            let d = solutions[i]
                .iter()
                .zip(&solutions[j])
                .fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
            max_pairwise_distance = max_pairwise_distance.max(d);
        }
    }
    Ok(UniquenessReport {
        starts,
        max_pairwise_distance,
        all_hessians_negative_definite: all_neg_def,
        nodes: solutions.swap_remove(0),
    })
}
