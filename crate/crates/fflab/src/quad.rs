//! Gauss-Legendre quadrature and compensated summation.
//!
//! Everything downstream (moment integrals, the A-function, convergence
//! sweeps) funnels through composite Gauss-Legendre rules built here, so
//! the rules are deliberately boring: Newton's method on the Legendre
//! recurrence for the base rule, affine maps for panels, and Neumaier
//! summation whenever many terms of mixed sign are added.

use crate::error::{Error, Result};

/// Neumaier's improved Kahan summation.
///
/// Cheap insurance: the quadrature weights are all positive but the
/// integrands oscillate, and the Fekete objective adds ~n^2 logs of wildly
/// different magnitude.
pub fn neumaier(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Neumaier summation after sorting by `total_cmp`.
///
/// Sorting makes the result invariant under permutation of the inputs,
/// which in turn makes quantities like the Fekete objective *exactly*
/// symmetric under `x -> -x` for even weights instead of only up to
/// rounding. Costs an allocation; use it only where that exactness pays.
pub fn neumaier_sorted(terms: &[f64]) -> f64 {
    let mut v = terms.to_vec();
    v.sort_by(f64::total_cmp);
    neumaier(v)
}

/// A quadrature rule: nodes and positive weights on some interval.
#[derive(Debug, Clone)]
pub struct Quad {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

impl Quad {
    /// Gauss-Legendre rule with `n` points on `[-1, 1]`.
    pub fn gauss_legendre(n: usize) -> Result<Quad> {
        if n == 0 {
            return Err(Error::InvalidParameter("gauss_legendre: n must be >= 1".into()));
        }
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        // Only the lower half; the rule is symmetric.
        // Legendre value and derivative at z via the three-term
        // recurrence (k+1) P_{k+1} = (2k+1) z P_k - k P_{k-1}.
        let eval = |z: f64| -> (f64, f64) {
            let mut p0 = 1.0_f64;
            let mut p1 = z;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = if n == 1 {
                1.0
            } else {
                n as f64 * (z * p1 - p0) / (z * z - 1.0)
            };
            (p1, dp)
        };
        for i in 0..(n + 1) / 2 {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut ok = n == 1;
            if n == 1 {
                z = 0.0;
            }
            for _ in 0..100 {
                let (p1, dp) = eval(z);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() <= 1e-15 * (1.0 + z.abs()) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::NoConvergence(format!(
                    "gauss_legendre: Newton stalled for n = {n}, node {i}"
                )));
            }
            // Fresh derivative at the converged root; reusing the one
            // from the last Newton step costs a few digits in the weight.
            let (_, dp) = eval(z);
            x[i] = -z;
            x[n - 1 - i] = z;
            let wi = 2.0 / ((1.0 - z * z) * dp * dp);
            w[i] = wi;
            w[n - 1 - i] = wi;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }
        Ok(Quad { x, w })
    }

    /// Affinely map a rule from `[-1, 1]` to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Quad {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        Quad {
            x: self.x.iter().map(|&t| mid + half * t).collect(),
            w: self.w.iter().map(|&w| w * half).collect(),
        }
    }

    /// Append another rule's nodes and weights.
    pub fn extend(&mut self, other: &Quad) {
        self.x.extend_from_slice(&other.x);
        self.w.extend_from_slice(&other.w);
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Integrate `f` against the rule with compensated summation.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        neumaier(self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(x)))
    }
}

/// Equal-width panels covering `[a, b]`.
pub fn panels_linear(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
            (lo, hi)
        })
        .collect()
}

/// Geometrically graded panels on `[a, b]`, refined toward `a`.
///
/// Used for weights with an integrable endpoint singularity (the
/// `x^alpha` factor of the laguerre family, the Jacobi endpoints): panel
/// widths shrink by `ratio` toward the singular end so plain
/// Gauss-Legendre inside each panel converges fast.
pub fn panels_graded_left(a: f64, b: f64, n: usize, ratio: f64) -> Vec<(f64, f64)> {
    assert!(ratio > 0.0 && ratio < 1.0, "grading ratio must be in (0,1)");
    let n = n.max(1);
    // Breakpoints a + (b-a) * ratio^k, k = n..0. Near a large-magnitude
    // endpoint the innermost offsets can round to the endpoint itself;
    // collapsed cuts are dropped rather than emitted as empty panels.
    let mut cuts = Vec::with_capacity(n + 1);
    cuts.push(a);
    for k in (0..n).rev() {
        let c = if k == 0 { b } else { a + (b - a) * ratio.powi(k as i32) };
        if c > *cuts.last().expect("cuts is non-empty") {
            cuts.push(c);
        }
    }
    cuts.windows(2).map(|p| (p[0], p[1])).collect()
}

/// Mirror image of [`panels_graded_left`]: refined toward `b`.
pub fn panels_graded_right(a: f64, b: f64, n: usize, ratio: f64) -> Vec<(f64, f64)> {
    panels_graded_left(-b, -a, n, ratio)
        .into_iter()
        .rev()
        .map(|(lo, hi)| (-hi, -lo))
        .collect()
}

/// Composite Gauss-Legendre rule: `pts` points on each panel.
pub fn composite_gl(panels: &[(f64, f64)], pts: usize) -> Result<Quad> {
    let base = Quad::gauss_legendre(pts)?;
    let mut out = Quad { x: Vec::new(), w: Vec::new() };
    for &(a, b) in panels {
        if !(b > a) {
            return Err(Error::InvalidParameter(format!(
                "composite_gl: degenerate panel [{a}, {b}]"
            )));
        }
        out.extend(&base.mapped(a, b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // An n-point rule is exact through degree 2n-1.
        let q = Quad::gauss_legendre(8).unwrap();
        for deg in 0..=15 {
            let val = q.integrate(|x| x.powi(deg));
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!(
                (val - exact).abs() < 1e-14,
                "degree {deg}: got {val}, want {exact}"
            );
        }
        // Degree 16 must NOT be exact (sanity that the test has teeth).
        let val = q.integrate(|x| x.powi(16));
        assert!((val - 2.0 / 17.0).abs() > 1e-12);
    }

    #[test]
    fn gl_weights_sum_to_length() {
        for n in [1, 2, 3, 7, 20, 64] {
            let q = Quad::gauss_legendre(n).unwrap();
            assert!((neumaier(q.w.iter().copied()) - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn mapped_rule_integrates() {
        let q = Quad::gauss_legendre(12).unwrap().mapped(1.0, 4.0);
        let val = q.integrate(f64::exp);
        assert!((val - (4.0_f64.exp() - 1.0_f64.exp())).abs() < 1e-11);
        let q = Quad::gauss_legendre(40).unwrap().mapped(1.0, 4.0);
        let val = q.integrate(|x| 1.0 / x);
        assert!((val - 4.0_f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn composite_matches_smooth_integral() {
        let q = composite_gl(&panels_linear(0.0, std::f64::consts::PI, 16), 12).unwrap();
        let val = q.integrate(f64::sin);
        assert!((val - 2.0).abs() < 1e-13);
    }

    #[test]
    fn graded_panels_tame_endpoint_derivatives() {
        // sqrt(x) has unbounded derivatives at 0: plain panels converge
        // slowly, grading restores fast convergence.
        let q = composite_gl(&panels_graded_left(0.0, 1.0, 40, 0.5), 16).unwrap();
        let val = q.integrate(f64::sqrt);
        assert!((val - 2.0 / 3.0).abs() < 1e-13, "got {val}");
        // Right-graded mirror.
        let q = composite_gl(&panels_graded_right(0.0, 1.0, 40, 0.5), 16).unwrap();
        let val = q.integrate(|x| (1.0 - x).sqrt());
        assert!((val - 2.0 / 3.0).abs() < 1e-13, "got {val}");
        // A mildly singular integrand at an endpoint of absolute scale 0
        // (so deep cuts cannot round onto it): x^(-1/4) over (0,1].
        let q = composite_gl(&panels_graded_left(0.0, 1.0, 60, 0.5), 16).unwrap();
        let val = q.integrate(|x| x.powf(-0.25));
        assert!((val - 4.0 / 3.0).abs() < 1e-9, "got {val}");
    }

    #[test]
    fn neumaier_beats_naive_on_cancellation() {
        // 1 + tiny - 1 repeated: naive drops the tiny part.
        let tiny = 1e-18;
        let mut terms = Vec::new();
        for _ in 0..1000 {
            terms.push(1.0);
            terms.push(tiny);
            terms.push(-1.0);
        }
        let val = neumaier(terms.iter().copied());
        assert!((val - 1000.0 * tiny).abs() < 1e-22);
    }

    #[test]
    fn sorted_sum_is_permutation_invariant() {
        let a = [0.1, -7.3, 2.11e-9, 55.0, -3.1e4, 0.77];
        let mut b = a;
        b.reverse();
        assert_eq!(neumaier_sorted(&a).to_bits(), neumaier_sorted(&b).to_bits());
    }
}
