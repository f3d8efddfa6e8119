//! Orthonormal polynomials for a given weight: recurrence coefficients by
//! a discretized Stieltjes procedure, zeros via the Jacobi matrix, and
//! pointwise evaluation.
//!
//! Convention: `p_{-1} = 0`, `p_0 = 1/sqrt(m0)`, and
//!
//! ```text
//! x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1},
//! ```
//!
//! with every `p_k` orthonormal against `w`. The leading-coefficient
//! ratio `gamma_{n-1}/gamma_n` equals `b_n`, which is the normalizing
//! factor the induced weights divide by.

use crate::error::{Error, Result};
use crate::linalg::tridiag_eigenvalues;
use crate::quad::{composite_gl, panels_graded_left, panels_graded_right, panels_linear, Quad};
use crate::weights::Weight;

#[derive(Debug, Clone)]
pub struct Recurrence {
    /// `alpha[k] = a_k`, `k = 0..=n_max`.
    pub alpha: Vec<f64>,
    /// `beta[0] = 0` (sentinel), `beta[k] = b_k` for `k = 1..=n_max`.
    pub beta: Vec<f64>,
    /// Total mass of the weight.
    pub m0: f64,
    even: bool,
    /// The converged discretization: nodes and `lambda_i = w_i * w(x_i)`.
    /// Frozen so that later integrals against the same weight (the
    /// A-function above all) are evaluated consistently.
    nodes: Vec<f64>,
    lambda: Vec<f64>,
}

/// Truncation point for an unbounded support direction: walk outward
/// until `ln w(x) + (2 n_max + 2) ln(1 + |x|)` has dropped far enough
/// below its maximum that the discarded tail cannot show up in f64.
pub fn truncation_radius(w: &Weight, n_max: usize, from: f64) -> Result<f64> {
    let pow = (2 * n_max + 2) as f64;
    let h = |x: f64| w.log_w(x) + pow * (1.0 + x.abs()).ln();
    // Coarse scan for the maximum of h to the right of `from`.
    let mut hmax = f64::NEG_INFINITY;
    let mut t = from.max(1e-3);
    // The scan window grows with the polynomial degree so that slowly
    // decaying weights (laguerre-like, peak near x ~ 2n) stay covered.
    let step = 0.25 * (1.0 + t) + pow / 100.0;
    for i in 0..400 {
        let x = t + i as f64 * step;
        hmax = hmax.max(h(x));
    }
    let mut radius = t + 1.0;
    for _ in 0..400 {
        if h(radius) < hmax - 180.0 && h(radius * 1.5) < h(radius) {
            return Ok(radius);
        }
        radius *= 1.25;
        if !radius.is_finite() {
            break;
        }
    }
    t = radius;
    Err(Error::Precision(format!(
        "truncation radius for {} did not stabilize (reached {t:.3e})",
        w.label()
    )))
}

/// A weighted discretization: `sum lam_i f(x_i) ~ int f(x) w(x) dx`.
#[derive(Debug, Clone)]
struct Disc {
    x: Vec<f64>,
    lam: Vec<f64>,
}

impl Disc {
    fn push_plain(&mut self, rule: &Quad, w: &Weight) {
        for (&x, &qw) in rule.x.iter().zip(&rule.w) {
            let lw = w.log_w(x);
            self.x.push(x);
            self.lam.push(if lw == f64::NEG_INFINITY { 0.0 } else { qw * lw.exp() });
        }
    }

    /// Stack covering the `edge`-neighborhood of a finite endpoint where
    /// the weight behaves like `dist^expo`.
    ///
    /// For `expo >= 0` geometric grading is enough. For `-1 < expo < 0`
    /// substitute `dist = edge * s^k` so the transformed integrand is
    /// smooth, and take `ln w` from the distance directly — positions
    /// within ~1e-16 of the endpoint round onto it, but their mass
    /// (which is *not* negligible for negative exponents) must not.
    fn push_edge(
        &mut self,
        w: &Weight,
        endpoint: f64,
        edge: f64,
        expo: f64,
        left: bool,
        graded: usize,
        pts: usize,
    ) -> Result<()> {
        if expo >= 0.0 {
            let panels = if left {
                panels_graded_left(endpoint, endpoint + edge, graded, 0.5)
            } else {
                panels_graded_right(endpoint - edge, endpoint, graded, 0.5)
            };
            self.push_plain(&composite_gl(&panels, pts)?, w);
            return Ok(());
        }
        // k (1 + expo) >= 3 makes dist^expo * d(dist)/ds vanish like s^2.
        let k = ((3.0 / (1.0 + expo)).ceil() as i32).clamp(3, 60);
        let base = composite_gl(&panels_linear(0.0, 1.0, graded.max(12)), pts)?;
        for (&s, &qw) in base.x.iter().zip(&base.w) {
            let dist = edge * s.powi(k);
            // ln(qw * jacobian * w): assembled in log space because the
            // jacobian underflows and the weight overflows separately.
            let ln_jac = (edge * k as f64).ln() + (k - 1) as f64 * s.ln();
            let ln_lam = qw.ln() + ln_jac + w.log_w_at_dist(left, dist);
            self.x.push(if left { endpoint + dist } else { endpoint - dist });
            self.lam.push(ln_lam.exp());
        }
        Ok(())
    }
}

/// Discretization adapted to the weight's support, at a given refinement
/// level (each level roughly doubles the resolution).
fn weight_disc(w: &Weight, n_max: usize, level: u32) -> Result<Disc> {
    let (a, b) = w.support();
    let (e_left, e_right) = w.edge_exponents();
    let pts = 16;
    let lin = (80.max(6 * n_max)) << level;
    let graded = 30 + 14 * level as usize;
    let mut disc = Disc { x: Vec::new(), lam: Vec::new() };
    match (a.is_finite(), b.is_finite()) {
        (false, false) => {
            let t = truncation_radius(w, n_max, 0.0)?;
            disc.push_plain(&composite_gl(&panels_linear(-t, t, lin), pts)?, w);
        }
        (true, false) => {
            let t = truncation_radius(w, n_max, a)?;
            let edge = (0.05 * (t - a)).min(1.0);
            disc.push_edge(w, a, edge, e_left, true, graded, pts)?;
            disc.push_plain(&composite_gl(&panels_linear(a + edge, t, lin), pts)?, w);
        }
        (true, true) => {
            let edge = 0.05 * (b - a);
            disc.push_edge(w, a, edge, e_left, true, graded, pts)?;
            disc.push_plain(
                &composite_gl(&panels_linear(a + edge, b - edge, lin.max(60)), pts)?,
                w,
            );
            disc.push_edge(w, b, edge, e_right, false, graded, pts)?;
        }
        (false, true) => {
            return Err(Error::InvalidParameter(
                "weights supported on a left half-line are not implemented".into(),
            ));
        }
    }
    Ok(disc)
}

/// One Stieltjes pass over a fixed discretization.
fn stieltjes_pass(w: &Weight, disc: &Disc, n_max: usize) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let m = disc.x.len();
    let lambda = &disc.lam;
    let m0: f64 = crate::quad::neumaier(lambda.iter().copied());
    if !(m0 > 0.0) || !m0.is_finite() {
        return Err(Error::Precision(format!(
            "weight {} has non-positive or non-finite mass {m0:e}",
            w.label()
        )));
    }
    let mut alpha = vec![0.0_f64; n_max + 1];
    let mut beta = vec![0.0_f64; n_max + 1];
    let even = w.is_even();

    let mut p_prev = vec![0.0_f64; m];
    let mut p_cur = vec![1.0 / m0.sqrt(); m];
    let mut b_cur = 0.0_f64;
    for k in 0..=n_max {
        let a_k = if even {
            0.0
        } else {
            crate::quad::neumaier(
                (0..m).map(|i| lambda[i] * disc.x[i] * p_cur[i] * p_cur[i]),
            )
        };
        alpha[k] = a_k;
        if k == n_max {
            break;
        }
        // t = (x - a_k) p_k - b_k p_{k-1}; b_{k+1} = ||t||.
        let mut t = vec![0.0_f64; m];
        for i in 0..m {
            t[i] = (disc.x[i] - a_k) * p_cur[i] - b_cur * p_prev[i];
        }
        let norm2 = crate::quad::neumaier((0..m).map(|i| lambda[i] * t[i] * t[i]));
        if !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::Precision(format!(
                "stieltjes: degree {} norm degenerated ({norm2:e}) for weight {}",
                k + 1,
                w.label()
            )));
        }
        let b_next = norm2.sqrt();
        beta[k + 1] = b_next;
        for i in 0..m {
            let v = t[i] / b_next;
            p_prev[i] = p_cur[i];
            p_cur[i] = v;
        }
        b_cur = b_next;
    }
    Ok((alpha, beta, m0))
}

impl Recurrence {
    /// Compute recurrence coefficients `a_0..a_{n_max}`, `b_1..b_{n_max}`
    /// for the weight, refining the discretization until two consecutive
    /// levels agree to `1e-12` (relative).
    pub fn compute(w: &Weight, n_max: usize) -> Result<Recurrence> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("recurrence: n_max must be >= 1".into()));
        }
        let mut prev: Option<(Vec<f64>, Vec<f64>, f64)> = None;
        for level in 0..=4u32 {
            let disc = weight_disc(w, n_max, level)?;
            let (alpha, beta, m0) = stieltjes_pass(w, &disc, n_max)?;
            if let Some((pa, pb, pm0)) = &prev {
                let mut delta = (m0 - pm0).abs() / m0.max(1.0);
                for k in 0..=n_max {
                    delta = delta.max((alpha[k] - pa[k]).abs() / alpha[k].abs().max(1.0));
                    delta = delta.max((beta[k] - pb[k]).abs() / beta[k].abs().max(1.0));
                }
                if delta <= 1e-12 {
                    return Ok(Recurrence {
                        alpha,
                        beta,
                        m0,
                        even: w.is_even(),
                        nodes: disc.x,
                        lambda: disc.lam,
                    });
                }
            }
            prev = Some((alpha, beta, m0));
        }
        Err(Error::NoConvergence(format!(
            "recurrence coefficients for {} did not stabilize after 5 refinement levels",
            w.label()
        )))
    }

    pub fn n_max(&self) -> usize {
        self.alpha.len() - 1
    }

    /// `rho_n = gamma_{n-1} / gamma_n = b_n`.
    pub fn rho(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.n_max(), "rho: degree {n} out of range");
        self.beta[n]
    }

    /// The frozen discretization `(x_i, lambda_i)` with
    /// `sum lambda_i f(x_i) ~ int f w`.
    pub fn discretization(&self) -> (&[f64], &[f64]) {
        (&self.nodes, &self.lambda)
    }

    /// Zeros of `p_n`, ascending. For even weights the spectrum is
    /// symmetrized exactly (pairing off eigenvalues from both ends).
    pub fn zeros(&self, n: usize) -> Result<Vec<f64>> {
        if n < 1 || n > self.n_max() {
            return Err(Error::InvalidParameter(format!(
                "zeros: degree {n} outside computed range 1..={}",
                self.n_max()
            )));
        }
        let diag = &self.alpha[0..n];
        let off = &self.beta[1..n];
        let mut z = tridiag_eigenvalues(diag, off)?;
        if self.even {
            for i in 0..n / 2 {
                let v = 0.5 * (z[n - 1 - i] - z[i]);
                z[i] = -v;
                z[n - 1 - i] = v;
            }
            if n % 2 == 1 {
                z[n / 2] = 0.0;
            }
        }
        // Nodes of a quadrature formula must be simple; equal neighbors
        // mean the eigensolver lost them.
        for i in 1..n {
            if !(z[i] > z[i - 1]) {
                return Err(Error::Precision(format!(
                    "zeros of degree {n} are not strictly increasing near index {i}"
                )));
            }
        }
        Ok(z)
    }

    /// Evaluate the orthonormal `p_n(x)`.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        assert!(n <= self.n_max(), "eval: degree {n} out of range");
        let mut prev = 0.0_f64;
        let mut cur = 1.0 / self.m0.sqrt();
        for k in 0..n {
            let next = ((x - self.alpha[k]) * cur - self.beta[k] * prev) / self.beta[k + 1];
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Evaluate `p_0(x) .. p_n(x)` in one sweep.
    pub fn eval_all(&self, n: usize, x: f64) -> Vec<f64> {
        assert!(n <= self.n_max(), "eval_all: degree {n} out of range");
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = 0.0_f64;
        let mut cur = 1.0 / self.m0.sqrt();
        out.push(cur);
        for k in 0..n {
            let next = ((x - self.alpha[k]) * cur - self.beta[k] * prev) / self.beta[k + 1];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }
}
