//! Verdict layer: normality and stability of node systems, the
//! equivalence suite tying the Fejér constants to Fekete sets and
//! orthogonal-polynomial zeros, the two-regime band of the A-function,
//! kernel-norm curves under the modified weight, and the convergence
//! experiment.
//!
//! Sup norms here are grid suprema. The grid is Chebyshev-distributed
//! over a center interval, extended by geometric tails out to the
//! truncation radius (or toward finite endpoints), and refined with
//! five points within 1e-3 of every node; density is chosen so that
//! doubling the count moves reported sups by well under 1e-3 relative.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fekete;
use crate::induced;
use crate::interp::{grunwald_apply_log, grunwald_kernel, LagrangeBasis, LogVal};
use crate::orthopoly::{truncation_radius, Recurrence};
use crate::quad::neumaier;
use crate::weights::Weight;

/// Default number of Chebyshev points on the center interval.
pub const GRID_COUNT: usize = 4001;

/// Evaluation grid: `count` Chebyshev points on the center interval,
/// geometric tails, and five points within 1e-3 of every node. All
/// points are strictly interior to the support, and every node is on
/// the grid.
pub fn build_grid(
    w: &Weight,
    nodes: &[f64],
    half_extent: Option<f64>,
    count: usize,
) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidParameter(
            "grid needs at least two center points".into(),
        ));
    }
    let (a, b) = w.support();
    let node_lo = nodes.first().copied().unwrap_or(0.0);
    let node_hi = nodes.last().copied().unwrap_or(0.0);
    let scale = 1.0 + node_hi.abs().max(node_lo.abs());
    let r = half_extent.unwrap_or(1.1 * scale);

    // Center interval, clipped to stay inside the support.
    let mid = if a.is_finite() && b.is_finite() {
        0.5 * (a + b)
    } else if a.is_finite() {
        (a + r).min(0.5 * (node_lo + node_hi) + r).max(a + r)
    } else {
        0.0
    };
    let edge = |endpoint: f64| 1e-9 * (1.0 + endpoint.abs());
    let lo = if a.is_finite() {
        (mid - r).max(a + edge(a))
    } else {
        mid - r
    };
    let hi = if b.is_finite() {
        (mid + r).min(b - edge(b))
    } else {
        mid + r
    };
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "degenerate grid interval [{lo}, {hi}]"
        )));
    }

    let mut g: Vec<f64> = Vec::with_capacity(count + 200 + 5 * nodes.len());
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    for i in 0..count {
        let t = std::f64::consts::PI * i as f64 / (count - 1) as f64;
        g.push(c + h * t.cos());
    }

    // Tails: geometric points from the center edge toward each end of
    // the support.
    let deg = nodes.len().max(4);
    let trunc = if a.is_finite() && b.is_finite() {
        None
    } else {
        Some(truncation_radius(
            w,
            deg,
            if a.is_finite() { a } else { 0.0 },
        )?)
    };
    for (endpoint, from, outward) in [(a, lo, false), (b, hi, true)] {
        if endpoint.is_finite() {
            // Approach the endpoint geometrically.
            let mut gap = (endpoint - from).abs();
            let floor = edge(endpoint);
            for _ in 0..40 {
                gap *= 0.6;
                if gap <= floor {
                    break;
                }
                g.push(if outward { endpoint - gap } else { endpoint + gap });
            }
        } else {
            // March out to the truncation radius.
            let t = trunc.unwrap();
            let target = if outward { t } else { -t };
            if (outward && target > from) || (!outward && target < from) {
                let base = from.abs().max(0.5);
                let ratio = (target.abs() / base).max(1.0 + 1e-9).powf(1.0 / 60.0);
                let mut v = base;
                for _ in 0..60 {
                    v *= ratio;
                    g.push(if outward { v } else { -v });
                }
            }
        }
    }

    // Near-node refinement: the node itself plus four offset points.
    for &xk in nodes {
        for dx in [-1e-3, -5e-4, 0.0, 5e-4, 1e-3] {
            g.push(xk + dx);
        }
    }

    g.retain(|v| v.is_finite() && *v > a && *v < b);
    g.sort_by(f64::total_cmp);
    g.dedup();
    for &xk in nodes {
        if g.binary_search_by(|p| p.total_cmp(&xk)).is_err() {
            return Err(Error::InvalidParameter(format!(
                "node {xk} fell outside the grid support window"
            )));
        }
    }
    Ok(g)
}

/// Row-major `grid.len() x n` matrix of `w(x) l_k^2(x) / w(x_k)`.
///
/// These entries are exactly the terms of the weighted Grünwald kernel,
/// so normality (sup of row sums) and stability (row dot nonnegative
/// data) reduce to the same precomputed object.
fn weighted_basis_matrix(basis: &LagrangeBasis, w: &Weight, grid: &[f64]) -> Vec<f64> {
    let n = basis.len();
    let mut m = vec![0.0; grid.len() * n];
    for (gi, &x) in grid.iter().enumerate() {
        let lwx = w.log_w(x);
        let evs = basis.eval_all(x);
        for e in &evs {
            if e.sign == 0 {
                continue;
            }
            m[gi * n + e.k] = (lwx + 2.0 * e.log_abs - w.log_w(basis.nodes()[e.k])).exp();
        }
        if let Some(j) = basis.node_index(x) {
            m[gi * n + j] = 1.0;
        }
    }
    m
}

/// Outcome of a normality check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormalityReport {
    /// All nodes obey `|x_k| < L a_n`.
    pub node_bound: bool,
    /// Scaling radius `a_n` used by the bound.
    pub a_n: f64,
    pub l: f64,
    /// Grid supremum of the weighted Grünwald kernel.
    pub kernel_sup: f64,
    /// `node_bound` and `kernel_sup <= 1 + 1e-9`.
    pub pass: bool,
}

/// Check 1(w)-normality: the node-bound `|x_k| < L a_n` together with
/// the kernel bound `sup_x w(x) sum_k l_k^2(x)/w(x_k) <= 1`.
pub fn normality_check(
    w: &Weight,
    nodes: &[f64],
    l: f64,
    grid: &[f64],
) -> Result<NormalityReport> {
    let basis = LagrangeBasis::new(nodes)?;
    let a_n = w.mrs_number(nodes.len() as f64)?;
    let node_bound = nodes.iter().all(|&x| x.abs() < l * a_n);
    let m = weighted_basis_matrix(&basis, w, grid);
    let n = basis.len();
    let mut kernel_sup = 0.0_f64;
    for gi in 0..grid.len() {
        let s = neumaier(m[gi * n..(gi + 1) * n].iter().copied());
        kernel_sup = kernel_sup.max(s);
    }
    Ok(NormalityReport {
        node_bound,
        a_n,
        l,
        kernel_sup,
        pass: node_bound && kernel_sup <= 1.0 + 1e-9,
    })
}

/// Outcome of a stability check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub trials: usize,
    /// Largest `value - max_k y_k` seen (positive means violation).
    pub max_upper_violation: f64,
    /// Smallest operator value seen (negative means violation).
    pub min_value: f64,
    /// `sum_k deg l_k^2 = 2n(n-1)`, the economical lower bound.
    pub degree_sum: u64,
    /// Grid supremum of the kernel (the all-ones trial).
    pub kernel_sup: f64,
}

/// Check w-stability of the Grünwald system: for nonnegative data,
/// `0 <= w(x) sum_k l_k^2(x) y_k / w(x_k) <= max_k y_k` everywhere.
/// The first trial is deterministically all-ones — the binding case —
/// so the verdict coincides with the kernel bound of
/// [`normality_check`]; the remaining `trials - 1` vectors are uniform
/// draws from the given generator.
pub fn stability_check(
    w: &Weight,
    nodes: &[f64],
    trials: usize,
    grid: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<StabilityReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter(
            "stability check needs at least one trial".into(),
        ));
    }
    let basis = LagrangeBasis::new(nodes)?;
    let n = basis.len();
    let m = weighted_basis_matrix(&basis, w, grid);
    let mut max_upper_violation = f64::NEG_INFINITY;
    let mut min_value = f64::INFINITY;
    let mut kernel_sup = 0.0_f64;
    for trial in 0..trials {
        let y: Vec<f64> = if trial == 0 {
            vec![1.0; n]
        } else {
            (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()
        };
        let ymax = y.iter().fold(0.0_f64, |a, &v| a.max(v));
        for gi in 0..grid.len() {
            let row = &m[gi * n..(gi + 1) * n];
            let v = neumaier(row.iter().zip(&y).map(|(&mk, &yk)| mk * yk));
            if trial == 0 {
                kernel_sup = kernel_sup.max(v);
            }
            max_upper_violation = max_upper_violation.max(v - ymax);
            min_value = min_value.min(v);
        }
    }
    let stable = max_upper_violation <= 1e-9 && min_value >= -1e-12;
    Ok(StabilityReport {
        stable,
        trials,
        max_upper_violation,
        min_value,
        degree_sum: 2 * (n as u64) * (n as u64 - 1),
        kernel_sup,
    })
}

/// One property of the equivalence suite: a pass flag plus the numeric
/// residual it was judged on (NaN when the probe itself failed).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PropertyCheck {
    pub pass: bool,
    pub residual: f64,
}

/// Joint verdict on one node set (the zeros of the degree-n orthogonal
/// polynomial): Fejér constants, Fekete re-solves, stability and
/// normality, each under the base weight and under the induced weight.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EquivalenceVerdict {
    pub n: usize,
    pub nodes: Vec<f64>,
    /// `max_k |p_n(x_k)|` — the node set really is the zero set.
    pub op_zero_residual: f64,
    /// Fejér constants vanish under the base weight.
    pub fejer_zero: PropertyCheck,
    /// Fejér constants vanish under the induced weight.
    pub fejer_zero_induced: PropertyCheck,
    /// A fresh Fekete solve under the base weight lands on the nodes.
    pub fekete_match: PropertyCheck,
    /// A fresh Fekete solve under the induced weight lands on the nodes.
    pub fekete_match_induced: PropertyCheck,
    /// Grünwald system is stable under the base weight.
    pub stable: PropertyCheck,
    pub stable_induced: PropertyCheck,
    /// Nodes are 1(w)-normal under the base weight.
    pub normal: PropertyCheck,
    pub normal_induced: PropertyCheck,
    /// Structural flag: the potential is an even polynomial with
    /// nonnegative coefficients, the hypothesis under which the chains
    /// are actual equivalences rather than one-way implications.
    pub even_poly_hypothesis: bool,
    pub notes: Vec<String>,
}

/// Structural check of the even-polynomial hypothesis (`Q` of the form
/// `sum d_k x^{2k}`, all `d_k >= 0`): parity of exponents, not symbolic
/// differentiation.
pub fn even_poly_hypothesis(w: &Weight) -> bool {
    w.has_nonneg_even_coeffs()
}

fn node_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Default bound factor for the `|x_k| < L a_n` part of normality.
pub const DEFAULT_L: f64 = 1.2;

/// Run the whole property chain on the zeros of `p_{n,w}`.
pub fn equivalence_suite(
    w: &Weight,
    n: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<EquivalenceVerdict> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "equivalence suite needs n >= 2".into(),
        ));
    }
    let rec = Arc::new(Recurrence::compute(w, n + 1)?);
    let nodes = rec.zeros(n)?;
    let op_zero_residual = nodes
        .iter()
        .fold(0.0_f64, |m, &x| m.max(rec.eval(n, x).abs()));
    let wn = induced::induced(w, &rec, n)?;
    let mut notes = Vec::new();

    let c_base = fekete::fejer_constants(w, &nodes);
    let r = c_base.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let fejer_zero = PropertyCheck {
        pass: r < 1e-8,
        residual: r,
    };
    let c_ind = fekete::fejer_constants(&wn, &nodes);
    let r = c_ind.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let fejer_zero_induced = PropertyCheck {
        pass: r < 1e-8,
        residual: r,
    };

    let fekete_match = match fekete::solve(w, n, None) {
        Ok(sol) => {
            let d = node_distance(&sol.x, &nodes);
            PropertyCheck {
                pass: d < 1e-8,
                residual: d,
            }
        }
        Err(e) => {
            notes.push(format!("fekete solve under the base weight failed: {e}"));
            PropertyCheck {
                pass: false,
                residual: f64::NAN,
            }
        }
    };
    let fekete_match_induced = match fekete::solve(&wn, n, None) {
        Ok(sol) => {
            let d = node_distance(&sol.x, &nodes);
            PropertyCheck {
                pass: d < 1e-8,
                residual: d,
            }
        }
        Err(e) => {
            notes.push(format!(
                "fekete solve under the induced weight failed: {e}"
            ));
            PropertyCheck {
                pass: false,
                residual: f64::NAN,
            }
        }
    };

    let kernel_checks = |wx: &Weight,
                             rng: &mut ChaCha8Rng|
     -> Result<(PropertyCheck, PropertyCheck)> {
        let a_n = wx.mrs_number(n as f64)?;
        let grid = build_grid(wx, &nodes, Some(DEFAULT_L * a_n), GRID_COUNT)?;
        let norm = normality_check(wx, &nodes, DEFAULT_L, &grid)?;
        let stab = stability_check(wx, &nodes, trials, &grid, rng)?;
        Ok((
            PropertyCheck {
                pass: stab.stable,
                residual: stab.max_upper_violation.max(0.0),
            },
            PropertyCheck {
                pass: norm.pass,
                residual: (norm.kernel_sup - 1.0).max(0.0),
            },
        ))
    };
    let (stable, normal) = kernel_checks(w, rng)?;
    let (stable_induced, normal_induced) = kernel_checks(&wn, rng)?;

    Ok(EquivalenceVerdict {
        n,
        nodes,
        op_zero_residual,
        fejer_zero,
        fejer_zero_induced,
        fekete_match,
        fekete_match_induced,
        stable,
        stable_induced,
        normal,
        normal_induced,
        even_poly_hypothesis: even_poly_hypothesis(w),
        notes,
    })
}

/// One sampled ratio of the two-regime comparison.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct BandRow {
    pub n: usize,
    /// True for the inner regime `|x| <= L a_n` (ratio against
    /// `n/a_n^2`), false for the outer (ratio against `Q'(x)/x`).
    pub inner: bool,
    pub x: f64,
    pub ratio: f64,
}

/// Sampled two-regime band of `A_n/rho_n`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Lemma7Band {
    pub l: f64,
    /// The numerically determined threshold the default `L` is 1.2 of.
    pub l0: f64,
    pub n_list: Vec<usize>,
    pub rows: Vec<BandRow>,
    pub inner_min: f64,
    pub inner_max: f64,
    pub outer_min: f64,
    pub outer_max: f64,
}

impl Lemma7Band {
    /// max/min of the sampled ratios at one degree in one regime.
    pub fn spread(&self, n: usize, inner: bool) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in &self.rows {
            if r.n == n && r.inner == inner {
                lo = lo.min(r.ratio);
                hi = hi.max(r.ratio);
            }
        }
        hi / lo
    }
}

/// Degree of polynomial growth of the potential, for the band's scaling
/// threshold.
fn growth_degree(w: &Weight) -> Result<f64> {
    use crate::weights::WeightSpec;
    if w.is_tilde() {
        return Err(Error::InvalidParameter(
            "band sampling needs the unmodified weight".into(),
        ));
    }
    match w.spec() {
        WeightSpec::Hermite => Ok(2.0),
        WeightSpec::Freud { m } => Ok(*m as f64),
        WeightSpec::EvenPoly { coeffs } => {
            let k = coeffs
                .iter()
                .rposition(|&d| d > 0.0)
                .ok_or_else(|| Error::InvalidParameter("zero polynomial".into()))?;
            Ok(2.0 * (k + 1) as f64)
        }
        _ => Err(Error::InvalidParameter(format!(
            "band sampling needs an even polynomial-growth weight, not {}",
            w.label()
        ))),
    }
}

/// Sample `A_n/rho_n` against its two comparison regimes: `n/a_n^2`
/// inside `[0, L a_n]` (50 points) and `Q'(x)/x` on `[L a_n, 3 L a_n]`
/// (20 points).
pub fn lemma7_band(w: &Weight, n_list: &[usize], l: Option<f64>) -> Result<Lemma7Band> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("band needs a degree list".into()));
    }
    let deg = growth_degree(w)?;
    let n_top = *n_list.iter().max().unwrap();
    if n_list.iter().any(|&n| n < 1) {
        return Err(Error::InvalidParameter("band degrees start at 1".into()));
    }
    let rec = Recurrence::compute(w, n_top + 1)?;

    // Threshold: L a_n must dominate the scaling radius at degree
    // 2n + ceil(deg - 1) + 1 with a factor of two to spare.
    let shift = (deg - 1.0).ceil() as usize + 1;
    let mut l0 = 0.0_f64;
    for &n in n_list {
        let an = w.mrs_number(n as f64)?;
        let ahigh = w.mrs_number((2 * n + shift) as f64)?;
        l0 = l0.max(2.0 * ahigh / an);
    }
    let l = l.unwrap_or(1.2 * l0);
    if l <= l0 {
        return Err(Error::InvalidParameter(format!(
            "band bound factor L = {l} does not clear the threshold {l0}"
        )));
    }

    let mut rows = Vec::new();
    let (mut imin, mut imax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut omin, mut omax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &n in n_list {
        let an = w.mrs_number(n as f64)?;
        let inner_scale = n as f64 / (an * an);
        for i in 0..50 {
            let x = l * an * i as f64 / 49.0;
            let a = induced::a_over_rho(w, &rec, n, x)?;
            let ratio = a / inner_scale;
            imin = imin.min(ratio);
            imax = imax.max(ratio);
            rows.push(BandRow {
                n,
                inner: true,
                x,
                ratio,
            });
        }
        for i in 0..20 {
            let x = l * an * (1.0 + 2.0 * i as f64 / 19.0);
            let a = induced::a_over_rho(w, &rec, n, x)?;
            let ratio = a / (w.q1(x) / x);
            omin = omin.min(ratio);
            omax = omax.max(ratio);
            rows.push(BandRow {
                n,
                inner: false,
                x,
                ratio,
            });
        }
    }
    Ok(Lemma7Band {
        l,
        l0,
        n_list: n_list.to_vec(),
        rows,
        inner_min: imin,
        inner_max: imax,
        outer_min: omin,
        outer_max: omax,
    })
}

/// One degree of an [`ErrorCurve`].
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CurvePoint {
    pub n: usize,
    /// Sup of the weighted interpolation error; absent for pure kernel
    /// curves.
    pub sup_error: Option<f64>,
    /// Sup of the weighted Grünwald kernel on the same grid.
    pub kernel_sup: f64,
}

/// Kernel-norm or convergence curve under the modified weight.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ErrorCurve {
    pub d_requested: f64,
    /// Junction actually used; widened from the request when the
    /// blended potential would lose convexity.
    pub d_used: f64,
    /// Test-function name for convergence runs.
    pub function: Option<String>,
    pub points: Vec<CurvePoint>,
}

/// A sampled test function in log-magnitude form.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    pub f: Arc<dyn Fn(f64) -> LogVal + Send + Sync>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TestFunction({})", self.name)
    }
}

/// The two standard probes: `1/(1+x^2)` and `sin(x) e^{Q/4}`.
pub fn builtin_test_functions(w: &Weight) -> Vec<TestFunction> {
    let cauchy = TestFunction {
        name: "cauchy".into(),
        f: Arc::new(|x: f64| LogVal {
            log_abs: -(1.0 + x * x).ln(),
            sign: 1,
        }),
    };
    let wq = w.clone();
    let sine_grow = TestFunction {
        name: "sine-qquarter".into(),
        f: Arc::new(move |x: f64| {
            let s = x.sin();
            if s == 0.0 {
                return LogVal {
                    log_abs: f64::NEG_INFINITY,
                    sign: 0,
                };
            }
            LogVal {
                log_abs: s.abs().ln() + 0.25 * wq.q(x),
                sign: if s > 0.0 { 1 } else { -1 },
            }
        }),
    };
    vec![cauchy, sine_grow]
}

fn curve_setup(w: &Weight, d: f64, n_list: &[usize]) -> Result<(Weight, f64, Recurrence)> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("curve needs a degree list".into()));
    }
    if n_list.iter().any(|&n| n < 2) {
        return Err(Error::InvalidParameter(
            "curve degrees start at 2".into(),
        ));
    }
    let (wt, d_used) = w.tilde_auto(d)?;
    let n_top = *n_list.iter().max().unwrap();
    let rec = Recurrence::compute(w, n_top)?;
    Ok((wt, d_used, rec))
}

/// Kernel-norm curve: for each degree, nodes are the zeros of
/// `p_{n,w}` and the recorded value is the grid sup of the Grünwald
/// kernel under the modified weight — the boundedness proxy.
pub fn operator_norm_curve(w: &Weight, d: f64, n_list: &[usize]) -> Result<ErrorCurve> {
    let (wt, d_used, rec) = curve_setup(w, d, n_list)?;
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nodes = rec.zeros(n)?;
        let an = w.mrs_number(n as f64)?;
        let grid = build_grid(&wt, &nodes, Some(1.5 * an), GRID_COUNT)?;
        let basis = LagrangeBasis::new(&nodes)?;
        let mut sup = 0.0_f64;
        for &x in &grid {
            sup = sup.max(grunwald_kernel(&basis, &wt, x)?.value);
        }
        points.push(CurvePoint {
            n,
            sup_error: None,
            kernel_sup: sup,
        });
    }
    Ok(ErrorCurve {
        d_requested: d,
        d_used,
        function: None,
        points,
    })
}

/// Convergence experiment: weighted sup error of the Grünwald mean of
/// `f` on the zeros of `p_{n,w}`, measured against the modified weight.
///
/// The function must belong to the weighted class: `|f| w-tilde` at the
/// outermost grid points has to sit below 1e-3 of its overall sup, else
/// the input is rejected.
pub fn convergence_experiment(
    w: &Weight,
    d: f64,
    f: &TestFunction,
    n_list: &[usize],
) -> Result<ErrorCurve> {
    let (wt, d_used, rec) = curve_setup(w, d, n_list)?;
    let n_top = *n_list.iter().max().unwrap();

    // Membership screen on the widest grid.
    let top_nodes = rec.zeros(n_top)?;
    let an_top = w.mrs_number(n_top as f64)?;
    let screen = build_grid(&wt, &top_nodes, Some(1.5 * an_top), GRID_COUNT)?;
    let log_fw = |x: f64| {
        let lv = (f.f)(x);
        if lv.sign == 0 {
            f64::NEG_INFINITY
        } else {
            lv.log_abs + wt.log_w(x)
        }
    };
    let log_mid = screen
        .iter()
        .map(|&x| log_fw(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let log_out = log_fw(screen[0]).max(log_fw(*screen.last().unwrap()));
    if !(log_out < log_mid + (1e-3_f64).ln()) {
        return Err(Error::InvalidParameter(format!(
            "test function '{}' is not in the weighted class: |f w| = {:.3e} at the grid \
             boundary vs {:.3e} overall",
            f.name,
            log_out.exp(),
            log_mid.exp()
        )));
    }

    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nodes = rec.zeros(n)?;
        let an = w.mrs_number(n as f64)?;
        let grid = build_grid(&wt, &nodes, Some(1.5 * an), GRID_COUNT)?;
        let basis = LagrangeBasis::new(&nodes)?;
        let fvals: Vec<LogVal> = nodes.iter().map(|&t| (f.f)(t)).collect();
        let mut sup_err = 0.0_f64;
        let mut ksup = 0.0_f64;
        for &x in &grid {
            let y = grunwald_apply_log(&basis, &fvals, x)?.value;
            let fx = (f.f)(x).value();
            let err = (y - fx).abs() * wt.w(x);
            sup_err = sup_err.max(err);
            ksup = ksup.max(grunwald_kernel(&basis, &wt, x)?.value);
        }
        points.push(CurvePoint {
            n,
            sup_error: Some(sup_err),
            kernel_sup: ksup,
        });
    }
    Ok(ErrorCurve {
        d_requested: d,
        d_used,
        function: Some(f.name.clone()),
        points,
    })
}
