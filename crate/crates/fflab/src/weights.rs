//! Weight families `w = e^{-Q}` and the machinery that depends only on
//! the potential `Q`: derivatives, Mhaskar-Rahmanov-Saff numbers, and the
//! tail modification `w~` used by the weighted interpolation operators.
//!
//! Conventions used throughout the crate:
//!
//! * a [`Weight`] is `w(x) = exp(log_c - Q(x))` on an open support
//!   interval; the constant `log_c` lets induced weights absorb exact
//!   scalar factors without touching `Q`;
//! * even potentials are evaluated through `u = x * x` so that
//!   `Q(-x) == Q(x)` holds *bitwise*, which downstream code exploits
//!   (symmetric node sets stay symmetric to the last ulp);
//! * `q1/q2/q3` are derivatives of the *effective* potential, i.e. they
//!   see the tail modification when one is attached.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{composite_gl, panels_linear};

/// User-supplied weight: potential and derivatives as closures.
///
/// `q4` is optional; it is only consulted for the third derivative of a
/// tail-modified weight, which no shipped pipeline needs.
#[derive(Clone)]
pub struct CustomWeight {
    pub q: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub q1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub q2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub q3: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub q4: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// Open support; use infinities for unbounded ends.
    pub support: (f64, f64),
    pub even: bool,
    pub label: String,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomWeight({})", self.label)
    }
}

/// The weight families the crate knows analytically.
#[derive(Debug, Clone)]
pub enum WeightSpec {
    /// `Q = x^2` on the whole line.
    Hermite,
    /// `Q = x - alpha ln x` on `(0, inf)`, `alpha > -1`.
    Laguerre { alpha: f64 },
    /// `Q = -alpha ln(1-x) - beta ln(1+x)` on `(-1, 1)`, both `> -1`.
    Jacobi { alpha: f64, beta: f64 },
    /// `Q = x^m` on the whole line, `m` even and `>= 2`.
    Freud { m: u32 },
    /// `Q = sum_k d_k x^{2k}`, `coeffs[k-1] = d_k >= 0`, some `d_k > 0`.
    EvenPoly { coeffs: Vec<f64> },
    Custom(CustomWeight),
}

/// Data for the tail modification: outside `[-1, 1]` the potential is
/// bridged by a quintic to `G(r) = Q(r) - ln r + ln Q'(r)` and follows
/// `G` exactly for `r >= d`.
#[derive(Debug, Clone)]
struct Tilde {
    d: f64,
    /// Hermite data of the bridge: value / first / second derivative at
    /// `r = 1` and at `r = d`.
    f0: f64,
    g0: f64,
    s0: f64,
    f1: f64,
    g1: f64,
    s1: f64,
}

#[derive(Debug, Clone)]
pub struct Weight {
    spec: WeightSpec,
    /// `w(x) = exp(log_c - Q(x))`.
    log_c: f64,
    tilde: Option<Tilde>,
}

// --- quintic Hermite basis on [0, 1] (value, d1, d2 at both ends) ------

fn quintic_eval(t: f64, f0: f64, g0: f64, s0: f64, f1: f64, g1: f64, s1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    f0 * h00 + g0 * h10 + s0 * h20 + f1 * h01 + g1 * h11 + s1 * h21
}

fn quintic_d1(t: f64, f0: f64, g0: f64, s0: f64, f1: f64, g1: f64, s1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let h00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let h10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let h20 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let h01 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    let h11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let h21 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    f0 * h00 + g0 * h10 + s0 * h20 + f1 * h01 + g1 * h11 + s1 * h21
}

fn quintic_d2(t: f64, f0: f64, g0: f64, s0: f64, f1: f64, g1: f64, s1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
    let h10 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
    let h20 = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
    let h01 = 60.0 * t - 180.0 * t2 + 120.0 * t3;
    let h11 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
    let h21 = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);
    f0 * h00 + g0 * h10 + s0 * h20 + f1 * h01 + g1 * h11 + s1 * h21
}

fn quintic_d3(t: f64, f0: f64, g0: f64, s0: f64, f1: f64, g1: f64, s1: f64) -> f64 {
    let t2 = t * t;
    let h00 = -60.0 + 360.0 * t - 360.0 * t2;
    let h10 = -36.0 + 192.0 * t - 180.0 * t2;
    let h20 = 0.5 * (-18.0 + 72.0 * t - 60.0 * t2);
    let h01 = 60.0 - 360.0 * t + 360.0 * t2;
    let h11 = -24.0 + 168.0 * t - 180.0 * t2;
    let h21 = 0.5 * (6.0 - 48.0 * t + 60.0 * t2);
    f0 * h00 + g0 * h10 + s0 * h20 + f1 * h01 + g1 * h11 + s1 * h21
}

impl WeightSpec {
    fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Hermite => Ok(()),
            WeightSpec::Laguerre { alpha } => {
                if !(*alpha > -1.0) || !alpha.is_finite() {
                    Err(Error::InvalidParameter(format!(
                        "laguerre: alpha must be finite and > -1, got {alpha}"
                    )))
                } else {
                    Ok(())
                }
            }
            WeightSpec::Jacobi { alpha, beta } => {
                if !(*alpha > -1.0) || !(*beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
                    Err(Error::InvalidParameter(format!(
                        "jacobi: alpha and beta must be finite and > -1, got ({alpha}, {beta})"
                    )))
                } else {
                    Ok(())
                }
            }
            WeightSpec::Freud { m } => {
                if *m < 2 || *m % 2 != 0 {
                    Err(Error::InvalidParameter(format!(
                        "freud: exponent must be even and >= 2, got {m}"
                    )))
                } else {
                    Ok(())
                }
            }
            WeightSpec::EvenPoly { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidParameter(
                        "even_poly: at least one coefficient is required".into(),
                    ));
                }
                if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(Error::InvalidParameter(
                        "even_poly: coefficients must be finite and >= 0".into(),
                    ));
                }
                if !coeffs.iter().any(|c| *c > 0.0) {
                    return Err(Error::InvalidParameter(
                        "even_poly: at least one coefficient must be positive".into(),
                    ));
                }
                Ok(())
            }
            WeightSpec::Custom(cw) => {
                if !(cw.support.0 < cw.support.1) {
                    return Err(Error::InvalidParameter(format!(
                        "custom weight {}: empty support",
                        cw.label
                    )));
                }
                Ok(())
            }
        }
    }

    fn q(&self, x: f64) -> f64 {
        match self {
            WeightSpec::Hermite => x * x,
            WeightSpec::Laguerre { alpha } => {
                if *alpha == 0.0 {
                    x
                } else {
                    x - alpha * x.ln()
                }
            }
            WeightSpec::Jacobi { alpha, beta } => {
                let mut q = 0.0;
                if *alpha != 0.0 {
                    q -= alpha * (1.0 - x).ln();
                }
                if *beta != 0.0 {
                    q -= beta * (1.0 + x).ln();
                }
                q
            }
            WeightSpec::Freud { m } => (x * x).powi((*m / 2) as i32),
            WeightSpec::EvenPoly { coeffs } => {
                let u = x * x;
                let mut q = 0.0;
                for &d in coeffs.iter().rev() {
                    q = u * (q + d);
                }
                q
            }
            WeightSpec::Custom(cw) => (cw.q)(x),
        }
    }

    fn q1(&self, x: f64) -> f64 {
        match self {
            WeightSpec::Hermite => 2.0 * x,
            WeightSpec::Laguerre { alpha } => 1.0 - alpha / x,
            WeightSpec::Jacobi { alpha, beta } => alpha / (1.0 - x) - beta / (1.0 + x),
            WeightSpec::Freud { m } => {
                let u = x * x;
                *m as f64 * x * u.powi((*m / 2) as i32 - 1)
            }
            WeightSpec::EvenPoly { coeffs } => {
                let u = x * x;
                let mut s = 0.0;
                for (k, &d) in coeffs.iter().enumerate().rev() {
                    let k = (k + 1) as f64;
                    s = s * u + 2.0 * k * d;
                }
                // s = sum 2k d_k u^{k-1}; odd part restored by the factor x.
                x * s
            }
            WeightSpec::Custom(cw) => (cw.q1)(x),
        }
    }

    fn q2(&self, x: f64) -> f64 {
        match self {
            WeightSpec::Hermite => 2.0,
            WeightSpec::Laguerre { alpha } => alpha / (x * x),
            WeightSpec::Jacobi { alpha, beta } => {
                let a = 1.0 - x;
                let b = 1.0 + x;
                alpha / (a * a) + beta / (b * b)
            }
            WeightSpec::Freud { m } => {
                let u = x * x;
                let m = *m;
                (m * (m - 1)) as f64 * u.powi((m / 2) as i32 - 1)
            }
            WeightSpec::EvenPoly { coeffs } => {
                let u = x * x;
                let mut s = 0.0;
                for (k, &d) in coeffs.iter().enumerate().rev() {
                    let k = (k + 1) as f64;
                    s = s * u + 2.0 * k * (2.0 * k - 1.0) * d;
                }
                s
            }
            WeightSpec::Custom(cw) => (cw.q2)(x),
        }
    }

    fn q3(&self, x: f64) -> f64 {
        match self {
            WeightSpec::Hermite => 0.0,
            WeightSpec::Laguerre { alpha } => -2.0 * alpha / (x * x * x),
            WeightSpec::Jacobi { alpha, beta } => {
                let a = 1.0 - x;
                let b = 1.0 + x;
                2.0 * alpha / (a * a * a) - 2.0 * beta / (b * b * b)
            }
            WeightSpec::Freud { m } => {
                let m = *m;
                if m == 2 {
                    return 0.0;
                }
                let u = x * x;
                (m * (m - 1) * (m - 2)) as f64 * x * u.powi((m / 2) as i32 - 2)
            }
            WeightSpec::EvenPoly { coeffs } => {
                let u = x * x;
                let mut s = 0.0;
                for (k, &d) in coeffs.iter().enumerate().rev().take_while(|(k, _)| *k >= 1) {
                    let k = (k + 1) as f64;
                    s = s * u + 2.0 * k * (2.0 * k - 1.0) * (2.0 * k - 2.0) * d;
                }
                x * s
            }
            WeightSpec::Custom(cw) => (cw.q3)(x),
        }
    }

    fn q4(&self, x: f64) -> Option<f64> {
        match self {
            WeightSpec::Hermite => Some(0.0),
            WeightSpec::Laguerre { alpha } => Some(6.0 * alpha / (x * x * x * x)),
            WeightSpec::Jacobi { alpha, beta } => {
                let a = 1.0 - x;
                let b = 1.0 + x;
                Some(6.0 * alpha / (a * a * a * a) + 6.0 * beta / (b * b * b * b))
            }
            WeightSpec::Freud { m } => {
                let m = *m;
                if m <= 2 {
                    return Some(0.0);
                }
                let u = x * x;
                Some((m * (m - 1) * (m - 2) * (m - 3)) as f64 * u.powi((m / 2) as i32 - 2))
            }
            WeightSpec::EvenPoly { coeffs } => {
                let u = x * x;
                let mut s = 0.0;
                for (k, &d) in coeffs.iter().enumerate().rev().take_while(|(k, _)| *k >= 1) {
                    let k = (k + 1) as f64;
                    s = s * u + 2.0 * k * (2.0 * k - 1.0) * (2.0 * k - 2.0) * (2.0 * k - 3.0) * d;
                }
                Some(s)
            }
            WeightSpec::Custom(cw) => cw.q4.as_ref().map(|f| f(x)),
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            WeightSpec::Hermite | WeightSpec::Freud { .. } | WeightSpec::EvenPoly { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            WeightSpec::Laguerre { .. } => (0.0, f64::INFINITY),
            WeightSpec::Jacobi { .. } => (-1.0, 1.0),
            WeightSpec::Custom(cw) => cw.support,
        }
    }

    fn is_even(&self) -> bool {
        match self {
            WeightSpec::Hermite | WeightSpec::Freud { .. } | WeightSpec::EvenPoly { .. } => true,
            WeightSpec::Laguerre { .. } => false,
            WeightSpec::Jacobi { alpha, beta } => alpha == beta,
            WeightSpec::Custom(cw) => cw.even,
        }
    }

    fn label(&self) -> String {
        match self {
            WeightSpec::Hermite => "hermite".into(),
            WeightSpec::Laguerre { alpha } => format!("laguerre(alpha={alpha})"),
            WeightSpec::Jacobi { alpha, beta } => format!("jacobi(alpha={alpha},beta={beta})"),
            WeightSpec::Freud { m } => format!("freud({m})"),
            WeightSpec::EvenPoly { coeffs } => format!("even_poly({coeffs:?})"),
            WeightSpec::Custom(cw) => cw.label.clone(),
        }
    }
}

impl Weight {
    pub fn new(spec: WeightSpec) -> Result<Weight> {
        spec.validate()?;
        Ok(Weight { spec, log_c: 0.0, tilde: None })
    }

    pub fn hermite() -> Weight {
        Weight::new(WeightSpec::Hermite).expect("hermite weight is always valid")
    }

    pub fn laguerre(alpha: f64) -> Result<Weight> {
        Weight::new(WeightSpec::Laguerre { alpha })
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Weight> {
        Weight::new(WeightSpec::Jacobi { alpha, beta })
    }

    pub fn freud(m: u32) -> Result<Weight> {
        Weight::new(WeightSpec::Freud { m })
    }

    pub fn even_poly(coeffs: Vec<f64>) -> Result<Weight> {
        Weight::new(WeightSpec::EvenPoly { coeffs })
    }

    pub fn custom(cw: CustomWeight) -> Result<Weight> {
        Weight::new(WeightSpec::Custom(cw))
    }

    /// Multiply the weight by `exp(c)` (exactly, via the stored offset).
    pub fn scaled_by_log(mut self, c: f64) -> Weight {
        self.log_c += c;
        self
    }

    pub fn log_scale(&self) -> f64 {
        self.log_c
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn support(&self) -> (f64, f64) {
        self.spec.support()
    }

    pub fn is_even(&self) -> bool {
        self.spec.is_even()
    }

    pub fn is_tilde(&self) -> bool {
        self.tilde.is_some()
    }

    pub fn label(&self) -> String {
        match &self.tilde {
            Some(t) => format!("tilde({}, d={})", self.spec.label(), t.d),
            None => self.spec.label(),
        }
    }

    /// True when the potential is structurally `sum d_k x^{2k}` with all
    /// `d_k >= 0` (`k >= 1`); the scalar offset does not matter.
    pub fn has_nonneg_even_coeffs(&self) -> bool {
        if self.tilde.is_some() {
            return false;
        }
        match &self.spec {
            WeightSpec::Hermite | WeightSpec::Freud { .. } => true,
            // Validation already forced the coefficients nonnegative.
            WeightSpec::EvenPoly { .. } => true,
            _ => false,
        }
    }

    // --- effective potential -------------------------------------------

    /// Bridge data evaluated at radius `r` (inside `[1, d]`).
    fn bridge(&self, t: &Tilde, r: f64, order: u32) -> f64 {
        let h = t.d - 1.0;
        let s = (r - 1.0) / h;
        // Scale derivative data to the unit interval, evaluate, then
        // scale the result back.
        let (f0, g0, s0) = (t.f0, t.g0 * h, t.s0 * h * h);
        let (f1, g1, s1) = (t.f1, t.g1 * h, t.s1 * h * h);
        match order {
            0 => quintic_eval(s, f0, g0, s0, f1, g1, s1),
            1 => quintic_d1(s, f0, g0, s0, f1, g1, s1) / h,
            2 => quintic_d2(s, f0, g0, s0, f1, g1, s1) / (h * h),
            3 => quintic_d3(s, f0, g0, s0, f1, g1, s1) / (h * h * h),
            _ => unreachable!(),
        }
    }

    /// Outer potential `G(r) = Q(r) - ln r + ln Q'(r)` and derivatives.
    fn outer(&self, r: f64, order: u32) -> f64 {
        let q1 = self.spec.q1(r);
        match order {
            0 => self.spec.q(r) - r.ln() + q1.ln(),
            1 => q1 - 1.0 / r + self.spec.q2(r) / q1,
            2 => {
                let q2 = self.spec.q2(r);
                let q3 = self.spec.q3(r);
                q2 + 1.0 / (r * r) + (q3 * q1 - q2 * q2) / (q1 * q1)
            }
            3 => {
                let q2 = self.spec.q2(r);
                let q3 = self.spec.q3(r);
                let q4 = self.spec.q4(r).expect(
                    "third derivative of a tail-modified weight needs q4 of the base potential",
                );
                q3 - 2.0 / (r * r * r) + q4 / q1 - 3.0 * q2 * q3 / (q1 * q1)
                    + 2.0 * q2 * q2 * q2 / (q1 * q1 * q1)
            }
            _ => unreachable!(),
        }
    }

    fn tilde_potential(&self, t: &Tilde, x: f64, order: u32) -> f64 {
        let r = x.abs();
        // Odd-order derivatives of an even function flip sign with x.
        let sign = if x < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
        let v = if r <= 1.0 {
            match order {
                0 => self.spec.q(r),
                1 => self.spec.q1(r),
                2 => self.spec.q2(r),
                3 => self.spec.q3(r),
                _ => unreachable!(),
            }
        } else if r < t.d {
            self.bridge(t, r, order)
        } else {
            self.outer(r, order)
        };
        sign * v
    }

    /// Effective potential (tail modification included when attached).
    pub fn q(&self, x: f64) -> f64 {
        match &self.tilde {
            Some(t) => self.tilde_potential(t, x, 0),
            None => self.spec.q(x),
        }
    }

    pub fn q1(&self, x: f64) -> f64 {
        match &self.tilde {
            Some(t) => self.tilde_potential(t, x, 1),
            None => self.spec.q1(x),
        }
    }

    pub fn q2(&self, x: f64) -> f64 {
        match &self.tilde {
            Some(t) => self.tilde_potential(t, x, 2),
            None => self.spec.q2(x),
        }
    }

    pub fn q3(&self, x: f64) -> f64 {
        match &self.tilde {
            Some(t) => self.tilde_potential(t, x, 3),
            None => self.spec.q3(x),
        }
    }

    /// `ln w(x)`, with endpoint limits handled so that boundary factors
    /// like `w(0)` for the laguerre family come out right.
    pub fn log_w(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x < a || x > b {
            return f64::NEG_INFINITY;
        }
        if x == a || x == b {
            // Finite endpoint: the weight extends continuously when the
            // log term is absent, vanishes when its exponent is positive
            // and blows up when it is negative.
            return match &self.spec {
                WeightSpec::Laguerre { alpha } => {
                    if x == 0.0 {
                        match alpha.partial_cmp(&0.0) {
                            Some(std::cmp::Ordering::Greater) => f64::NEG_INFINITY,
                            Some(std::cmp::Ordering::Equal) => self.log_c,
                            _ => f64::INFINITY,
                        }
                    } else {
                        self.log_c - self.spec.q(x)
                    }
                }
                WeightSpec::Jacobi { alpha, beta } => {
                    let e = if x == 1.0 { *alpha } else { *beta };
                    let other = if x == 1.0 {
                        -beta * 2.0_f64.ln()
                    } else {
                        -alpha * 2.0_f64.ln()
                    };
                    match e.partial_cmp(&0.0) {
                        Some(std::cmp::Ordering::Greater) => f64::NEG_INFINITY,
                        Some(std::cmp::Ordering::Equal) => self.log_c - other,
                        _ => f64::INFINITY,
                    }
                }
                _ => self.log_c - self.q(x),
            };
        }
        self.log_c - self.q(x)
    }

    pub fn w(&self, x: f64) -> f64 {
        self.log_w(x).exp()
    }

    /// `ln w` at distance `dist` from a finite endpoint (`left` selects
    /// which one), computed from `dist` directly.
    ///
    /// Within ~1e-16 of an algebraic endpoint the position `a + dist`
    /// rounds to `a` itself, so `log_w(a + dist)` loses the singular
    /// factor entirely; quadrature rules built in a transformed variable
    /// use this entry point instead.
    pub fn log_w_at_dist(&self, left: bool, dist: f64) -> f64 {
        match &self.spec {
            WeightSpec::Laguerre { alpha } if left => self.log_c + alpha * dist.ln() - dist,
            WeightSpec::Jacobi { alpha, beta } => {
                if left {
                    self.log_c + beta * dist.ln() + alpha * (2.0 - dist).ln()
                } else {
                    self.log_c + alpha * dist.ln() + beta * (2.0 - dist).ln()
                }
            }
            _ => {
                let (a, b) = self.support();
                self.log_w(if left { a + dist } else { b - dist })
            }
        }
    }

    // --- Mhaskar-Rahmanov-Saff numbers ----------------------------------

    /// The scaling radius `a_u` of the weight.
    ///
    /// For even weights on the whole line this is the MRS number, the
    /// solution of `(1/pi) * int_0^1 a t Q'(a t) / sqrt(1 - t^2) dt = u`.
    /// A weight on a half line `[a, inf)` is pushed to an even one by
    /// `x = a + t^2` (doubling the degree), and the radius is mapped
    /// back as `a + B^2`; for laguerre this recovers the familiar
    /// `a_u = 4u + 2 alpha`. On a bounded support the radius is simply
    /// the support radius, independent of `u`.
    pub fn mrs_number(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mrs_number: u must be positive and finite, got {u}"
            )));
        }
        let (a, b) = self.support();
        if a.is_finite() && b.is_finite() {
            return Ok(a.abs().max(b.abs()));
        }
        if a.is_finite() {
            let bb = self.mrs_bisect(2.0 * u, |t| 2.0 * t * self.q1(a + t * t))?;
            return Ok(a + bb * bb);
        }
        if !self.is_even() {
            return Err(Error::InvalidParameter(format!(
                "mrs_number: weight {} on the whole line must be even",
                self.label()
            )));
        }
        // Closed forms for pure powers Q = x^m:
        //   u(a) = a^m * m/pi * int_0^1 t^m / sqrt(1-t^2) dt
        // so a = (u / c_m)^(1/m) with c_m from the beta integral.
        if self.tilde.is_none() {
            if let Some(m) = match &self.spec {
                WeightSpec::Hermite => Some(2u32),
                WeightSpec::Freud { m } => Some(*m),
                _ => None,
            } {
                let cm = power_mrs_constant(m);
                return Ok((u / cm).powf(1.0 / m as f64));
            }
        }
        self.mrs_bisect(u, |t| self.q1(t))
    }

    /// Solve `(1/pi) int_0^{pi/2} B sin(th) * q1(B sin(th)) dth = u`
    /// for `B`: the map is increasing for admissible potentials, so
    /// bracket by doubling and bisect.
    fn mrs_bisect(&self, u: f64, q1: impl Fn(f64) -> f64) -> Result<f64> {
        let theta = composite_gl(&panels_linear(0.0, std::f64::consts::FRAC_PI_2, 8), 20)?;
        let u_of = |a: f64| -> f64 {
            theta.integrate(|th| {
                let t = th.sin();
                a * t * q1(a * t)
            }) / std::f64::consts::PI
        };
        let mut lo = 1e-8;
        let mut hi = 1.0;
        let mut guard = 0;
        while u_of(hi) < u {
            hi *= 2.0;
            guard += 1;
            if guard > 400 || !hi.is_finite() {
                return Err(Error::Precision(format!(
                    "mrs_number: failed to bracket a_u for u = {u} (weight {})",
                    self.label()
                )));
            }
        }
        while u_of(lo) > u {
            lo *= 0.5;
            guard += 1;
            if guard > 800 {
                return Err(Error::Precision(format!(
                    "mrs_number: failed to bracket a_u from below for u = {u}"
                )));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if u_of(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    // --- tail modification ----------------------------------------------

    /// Attach the tail modification: unchanged on `[-1, 1]`, equal to
    /// `exp(-(Q(r) - ln r + ln Q'(r)))` for `|x| >= d`, joined by a C^2
    /// quintic bridge in the potential on `1 <= |x| <= d`.
    ///
    /// Requires an even weight on the whole line and `d > 1`. The
    /// resulting potential is checked by sampling to have `U' > 0` and
    /// `U'' >= 0` on `(0, inf)`.
    pub fn tilde(&self, d: f64) -> Result<Weight> {
        if self.tilde.is_some() {
            return Err(Error::InvalidParameter(
                "tilde: weight already carries a tail modification".into(),
            ));
        }
        let (a, b) = self.support();
        if !self.is_even() || a.is_finite() || b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tilde: weight {} is not an even weight on the whole line",
                self.label()
            )));
        }
        if !(d > 1.0) || !d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tilde: junction d must be finite and > 1, got {d}"
            )));
        }
        if !(self.spec.q1(1.0) > 0.0) {
            return Err(Error::Domain(
                "tilde: base potential must have Q'(1) > 0".into(),
            ));
        }
        let mut out = Weight {
            spec: self.spec.clone(),
            log_c: self.log_c,
            tilde: Some(Tilde { d, f0: 0.0, g0: 0.0, s0: 0.0, f1: 0.0, g1: 0.0, s1: 0.0 }),
        };
        let t = Tilde {
            d,
            f0: self.spec.q(1.0),
            g0: self.spec.q1(1.0),
            s0: self.spec.q2(1.0),
            f1: out.outer(d, 0),
            g1: out.outer(d, 1),
            s1: out.outer(d, 2),
        };
        out.tilde = Some(t);

        // Admissibility: U' > 0 and U'' >= 0 on (0, inf), checked on a
        // log grid plus a dense sweep of the bridge, where overshoot
        // would happen if it happens at all.
        let mut samples: Vec<f64> = Vec::new();
        let lo: f64 = 1e-3;
        let hi: f64 = 10.0 * d;
        for i in 0..=300 {
            let s = i as f64 / 300.0;
            samples.push(lo * (hi / lo).powf(s));
        }
        for i in 0..=200 {
            samples.push(1.0 + (d - 1.0) * i as f64 / 200.0);
        }
        for &x in &samples {
            let u1 = out.q1(x);
            let u2 = out.q2(x);
            if !(u1 > 0.0) {
                return Err(Error::Domain(format!(
                    "tilde: modified potential fails U'(x) > 0 at x = {x:.6e} (U' = {u1:.6e})"
                )));
            }
            if !(u2 > 0.0) {
                return Err(Error::Domain(format!(
                    "tilde: modified potential fails U''(x) > 0 at x = {x:.6e} (U'' = {u2:.6e})"
                )));
            }
        }
        Ok(out)
    }

    /// Like [`Weight::tilde`], but when the requested junction is too
    /// tight for the quintic bridge to stay convex, widen `d` to the
    /// smallest admissible value (plus a 1% safety margin) instead of
    /// failing. Returns the modified weight together with the junction
    /// actually used.
    ///
    /// The underlying theory only guarantees that *some* admissible
    /// junction exists once `d` is large enough, so a fixed default like
    /// `d = 2` cannot work for every family (for `Q = x^2` the bridge
    /// convexity needs `d >= 1 + sqrt(5 ln 2 / sqrt 3) ~ 2.415`).
    pub fn tilde_auto(&self, d_req: f64) -> Result<(Weight, f64)> {
        match self.tilde(d_req) {
            Ok(w) => return Ok((w, d_req)),
            Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
        // Find an admissible junction by geometric growth...
        let mut lo = d_req.max(1.0 + 1e-6);
        let mut hi = lo;
        let mut found = false;
        for _ in 0..60 {
            hi *= 1.3;
            if self.tilde(hi).is_ok() {
                found = true;
                break;
            }
            lo = hi;
        }
        if !found {
            // Genuinely inadmissible; surface the original diagnosis.
            return self.tilde(d_req).map(|w| (w, d_req));
        }
        // ...then tighten by bisection and keep a small margin.
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tilde(mid).is_ok() {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-4 * hi {
                break;
            }
        }
        let d_used = hi * 1.01;
        let w = self.tilde(d_used)?;
        Ok((w, d_used))
    }

    /// Algebraic exponents of the weight at its finite endpoints,
    /// `(left, right)`: the weight behaves like `(x - a)^e_left` near a
    /// finite left endpoint and `(b - x)^e_right` near a finite right
    /// endpoint. Zero whenever the endpoint is infinite or the behavior
    /// is unknown; quadrature grading uses this to pick a substitution.
    pub fn edge_exponents(&self) -> (f64, f64) {
        match &self.spec {
            WeightSpec::Laguerre { alpha } => (*alpha, 0.0),
            WeightSpec::Jacobi { alpha, beta } => (*beta, *alpha),
            _ => (0.0, 0.0),
        }
    }
}

/// `c_m = m/pi * int_0^1 t^m / sqrt(1-t^2) dt` for even `m`, computed by
/// the half-integer factorial recursion (the integrand's beta integral).
fn power_mrs_constant(m: u32) -> f64 {
    // int_0^1 t^m (1-t^2)^{-1/2} dt = (pi/2) * (m-1)!! / m!! for even m.
    let mut ratio = 1.0_f64; // (m-1)!! / m!!
    let mut k = 2u32;
    while k <= m {
        ratio *= (k - 1) as f64 / k as f64;
        k += 2;
    }
    m as f64 * ratio / 2.0
}
