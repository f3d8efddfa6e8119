//! Overflow-safe Lagrange fundamentals and the weighted interpolation
//! operators built on them.
//!
//! Everything multiplicative — the fundamental polynomials `l_k`, the
//! weight ratios `w(x)/w(x_k)` — lives in log-magnitude + sign form.
//! For forty nodes under a quartic weight, `l_k^2(x)` and `e^{Q(x)}`
//! individually overflow doubles by hundreds of orders of magnitude
//! while their combination stays moderate; summing shifted
//! exponentials keeps the relative error at rounding level.
//!
//! Operators:
//!
//! ```text
//! Y_n(f, x)      = sum_k l_k^2(x) f(x_k)                      (Grünwald)
//! Y_{n,w}(x)     = w(x) sum_k l_k^2(x) / w(x_k)               (its kernel)
//! w H_{n,w}(f,x) = w(x) sum_k (1 - C_k (x-x_k)) l_k^2(x) (fw)(x_k) / w(x_k)
//! w H_n(f,f',x)  = w H_{n,w}(f,x)
//!                + w(x) sum_k (x-x_k) l_k^2(x) (fw)'(x_k) / w(x_k)
//! ```
//!
//! with `C_k` the Fejér constants of the nodes under `w`. The constants
//! are exactly what makes `w H_{n,w}` have vanishing derivatives at the
//! nodes, for any node set, not just Fekete ones.

use crate::error::{Error, Result};
use crate::fekete::fejer_constants;
use crate::quad::neumaier;
use crate::weights::Weight;

/// A signed number stored as `sign * e^{log_abs}`.
#[derive(Debug, Clone, Copy)]
pub struct LogVal {
    pub log_abs: f64,
    pub sign: i8,
}

impl LogVal {
    pub fn from_value(v: f64) -> LogVal {
        if v == 0.0 {
            LogVal {
                log_abs: f64::NEG_INFINITY,
                sign: 0,
            }
        } else {
            LogVal {
                log_abs: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }
}

/// One fundamental polynomial evaluated at one point.
#[derive(Debug, Clone, Copy)]
pub struct BasisEval {
    pub k: usize,
    /// `ln |l_k(x)|`; `-inf` when the value is zero.
    pub log_abs: f64,
    /// Zero exactly when `x` coincides with a node other than `x_k`.
    pub sign: i8,
}

/// Precomputed node data for the fundamental polynomials
/// `l_k(x) = prod_{i != k} (x - x_i) / (x_k - x_i)`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    nodes: Vec<f64>,
    /// `D_k = sum_{i != k} ln |x_k - x_i|`.
    dk: Vec<f64>,
    /// Sign of `prod_{i != k} (x_k - x_i) = (-1)^{n-1-k}` for ascending nodes.
    dsign: Vec<i8>,
}

impl LagrangeBasis {
    pub fn new(nodes: &[f64]) -> Result<LagrangeBasis> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter(
                "lagrange basis needs at least one node".into(),
            ));
        }
        let n = nodes.len();
        for i in 1..n {
            if !(nodes[i] > nodes[i - 1]) {
                return Err(Error::InvalidParameter(format!(
                    "nodes must be strictly increasing; node {} = {} follows {}",
                    i,
                    nodes[i],
                    nodes[i - 1]
                )));
            }
        }
        if !nodes.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("nodes must be finite".into()));
        }
        let mut dk = Vec::with_capacity(n);
        let mut dsign = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = 0.0;
            for (i, &xi) in nodes.iter().enumerate() {
                if i != k {
                    s += (nodes[k] - xi).abs().ln();
                }
            }
            dk.push(s);
            dsign.push(if (n - 1 - k) % 2 == 0 { 1 } else { -1 });
        }
        Ok(LagrangeBasis {
            nodes: nodes.to_vec(),
            dk,
            dsign,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Index of the node bitwise-equal to `x`, if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        self.nodes.binary_search_by(|p| p.total_cmp(&x)).ok()
    }

    /// `l_k` at `x` in log form. Exact at the nodes: `l_k(x_k) = 1`,
    /// `l_k(x_j) = 0` for `j != k`.
    pub fn eval(&self, k: usize, x: f64) -> BasisEval {
        assert!(k < self.nodes.len(), "basis index {k} out of range");
        if let Some(j) = self.node_index(x) {
            return if j == k {
                BasisEval {
                    k,
                    log_abs: 0.0,
                    sign: 1,
                }
            } else {
                BasisEval {
                    k,
                    log_abs: f64::NEG_INFINITY,
                    sign: 0,
                }
            };
        }
        let mut num = 0.0;
        let mut neg = 0usize;
        for (i, &xi) in self.nodes.iter().enumerate() {
            if i == k {
                continue;
            }
            let d = x - xi;
            if d < 0.0 {
                neg += 1;
            }
            num += d.abs().ln();
        }
        let sign = if neg % 2 == 0 { 1 } else { -1 };
        BasisEval {
            k,
            log_abs: num - self.dk[k],
            sign: sign * self.dsign[k],
        }
    }

    /// All `l_k` at one point, sharing the `sum_i ln |x - x_i|` pass.
    pub fn eval_all(&self, x: f64) -> Vec<BasisEval> {
        let n = self.nodes.len();
        if let Some(j) = self.node_index(x) {
            return (0..n)
                .map(|k| {
                    if k == j {
                        BasisEval {
                            k,
                            log_abs: 0.0,
                            sign: 1,
                        }
                    } else {
                        BasisEval {
                            k,
                            log_abs: f64::NEG_INFINITY,
                            sign: 0,
                        }
                    }
                })
                .collect();
        }
        let mut s = 0.0;
        let mut above = 0usize; // nodes strictly greater than x
        for &xi in &self.nodes {
            s += (x - xi).abs().ln();
            if xi > x {
                above += 1;
            }
        }
        (0..n)
            .map(|k| {
                // numerator omits the k factor; its sign contributes when
                // x_k > x.
                let omit_neg = if self.nodes[k] > x { 1 } else { 0 };
                let neg = above - omit_neg;
                let sign = if neg % 2 == 0 { 1 } else { -1 };
                BasisEval {
                    k,
                    log_abs: s - (x - self.nodes[k]).abs().ln() - self.dk[k],
                    sign: sign * self.dsign[k],
                }
            })
            .collect()
    }
}

/// Which operator produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Grunwald,
    GrunwaldKernel,
    HermiteFejer,
    Hermite,
}

/// One operator evaluation.
#[derive(Debug, Clone, Copy)]
pub struct OperatorSample {
    pub x: f64,
    pub value: f64,
    pub operator: OperatorKind,
}

/// `sum sign_i e^{t_i}` by shifting the largest exponent to zero.
fn max_shift_sum(terms: &[(f64, i8)]) -> f64 {
    let m = terms
        .iter()
        .filter(|t| t.1 != 0)
        .map(|t| t.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return 0.0;
    }
    let s = neumaier(
        terms
            .iter()
            .filter(|t| t.1 != 0)
            .map(|&(t, sign)| sign as f64 * (t - m).exp()),
    );
    s * m.exp()
}

fn check_len(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::InvalidParameter(format!(
            "{name} has length {got}, expected {want}"
        )));
    }
    Ok(())
}

/// Grünwald mean `Y_n(f, x) = sum_k l_k^2(x) f(x_k)` for plain data.
pub fn grunwald_apply(basis: &LagrangeBasis, fvals: &[f64], x: f64) -> Result<OperatorSample> {
    check_len("fvals", fvals.len(), basis.len())?;
    if let Some(j) = basis.node_index(x) {
        return Ok(OperatorSample {
            x,
            value: fvals[j],
            operator: OperatorKind::Grunwald,
        });
    }
    let logs: Vec<LogVal> = fvals.iter().map(|&v| LogVal::from_value(v)).collect();
    grunwald_apply_log(basis, &logs, x)
}

/// Same combination for data already in log form (large `f`).
pub fn grunwald_apply_log(
    basis: &LagrangeBasis,
    fvals: &[LogVal],
    x: f64,
) -> Result<OperatorSample> {
    check_len("fvals", fvals.len(), basis.len())?;
    let evs = basis.eval_all(x);
    let terms: Vec<(f64, i8)> = evs
        .iter()
        .zip(fvals)
        .map(|(e, f)| (2.0 * e.log_abs + f.log_abs, e.sign.pow(2) as i8 * f.sign))
        .collect();
    Ok(OperatorSample {
        x,
        value: max_shift_sum(&terms),
        operator: OperatorKind::Grunwald,
    })
}

/// The weighted Grünwald kernel `Y_{n,w}(x) = w(x) sum_k l_k^2(x)/w(x_k)`.
///
/// Equals 1 exactly at every node: the `k`-th term's exponent
/// `log w(x_k) + 2 ln|l_k(x_k)| - log w(x_k)` cancels bitwise and every
/// other term carries sign zero.
pub fn grunwald_kernel(basis: &LagrangeBasis, w: &Weight, x: f64) -> Result<OperatorSample> {
    let evs = basis.eval_all(x);
    let lwx = w.log_w(x);
    let terms: Vec<(f64, i8)> = evs
        .iter()
        .map(|e| {
            let t = lwx + 2.0 * e.log_abs - w.log_w(basis.nodes[e.k]);
            (t, if e.sign == 0 { 0 } else { 1 })
        })
        .collect();
    Ok(OperatorSample {
        x,
        value: max_shift_sum(&terms),
        operator: OperatorKind::GrunwaldKernel,
    })
}

fn hermite_core(
    basis: &LagrangeBasis,
    w: &Weight,
    fw_vals: &[f64],
    dfw_vals: Option<&[f64]>,
    x: f64,
) -> f64 {
    if let Some(j) = basis.node_index(x) {
        return fw_vals[j];
    }
    let evs = basis.eval_all(x);
    let c = fejer_constants(w, &basis.nodes);
    let lwx = w.log_w(x);
    let mut terms: Vec<(f64, i8)> = Vec::with_capacity(2 * basis.len());
    for e in &evs {
        let k = e.k;
        let base = lwx + 2.0 * e.log_abs - w.log_w(basis.nodes[k]);
        let hf = (1.0 - c[k] * (x - basis.nodes[k])) * fw_vals[k];
        if hf != 0.0 {
            terms.push((base + hf.abs().ln(), if hf > 0.0 { 1 } else { -1 }));
        }
        if let Some(d) = dfw_vals {
            let hd = (x - basis.nodes[k]) * d[k];
            if hd != 0.0 {
                terms.push((base + hd.abs().ln(), if hd > 0.0 { 1 } else { -1 }));
            }
        }
    }
    max_shift_sum(&terms)
}

/// Weighted Hermite–Fejér operator `w(x) H_{n,w}(f, x)`; expects the
/// weighted samples `fw_vals[k] = (f w)(x_k)`. Fejér constants are
/// computed internally from the nodes under `w`.
pub fn hermite_fejer_apply(
    basis: &LagrangeBasis,
    w: &Weight,
    fw_vals: &[f64],
    x: f64,
) -> Result<OperatorSample> {
    check_len("fw_vals", fw_vals.len(), basis.len())?;
    Ok(OperatorSample {
        x,
        value: hermite_core(basis, w, fw_vals, None, x),
        operator: OperatorKind::HermiteFejer,
    })
}

/// Weighted Hermite operator `w(x) H_n(f, f', x)`; additionally expects
/// `dfw_vals[k] = (f w)'(x_k)`. With `dfw_vals` identically zero the
/// derivative terms drop out of the summation entirely, so the result is
/// bit-identical to [`hermite_fejer_apply`].
pub fn hermite_apply(
    basis: &LagrangeBasis,
    w: &Weight,
    fw_vals: &[f64],
    dfw_vals: &[f64],
    x: f64,
) -> Result<OperatorSample> {
    check_len("fw_vals", fw_vals.len(), basis.len())?;
    check_len("dfw_vals", dfw_vals.len(), basis.len())?;
    Ok(OperatorSample {
        x,
        value: hermite_core(basis, w, fw_vals, Some(dfw_vals), x),
        operator: OperatorKind::Hermite,
    })
}
