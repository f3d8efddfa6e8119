//! Command-line front end: reads a JSON config, runs one task, writes
//! one report (JSON or CSV) to stdout or a file.
//!
//! Exit codes: 0 success, 2 configuration problem (bad flag, unknown
//! family or task, parameter out of range), 3 numerical failure at run
//! time — in which case the report slot receives a JSON error record
//! instead of a partial result.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use fflab::analysis::{
    build_grid, builtin_test_functions, convergence_experiment, equivalence_suite, lemma7_band,
    normality_check, operator_norm_curve, EquivalenceVerdict, ErrorCurve, Lemma7Band,
    NormalityReport, DEFAULT_L, GRID_COUNT,
};
use fflab::fekete::{fejer_report, solve, FejerReport};
use fflab::induced::{a_over_rho, closed_a_over_rho};
use fflab::orthopoly::Recurrence;
use fflab::weights::Weight;
use fflab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "fflab",
    about = "weighted Fekete sets, Fejer constants, and interpolation operators"
)]
struct Cli {
    /// Task to run; may instead be given as "task" in the config file.
    task: Option<String>,
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: json or csv (default: json).
    #[arg(long)]
    format: Option<String>,
    /// Seed for all randomized probes (default: 0).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TildeConfig {
    enabled: bool,
    d: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightConfig {
    family: String,
    alpha: Option<f64>,
    beta: Option<f64>,
    m: Option<u32>,
    d_coeffs: Option<Vec<f64>>,
    tilde: Option<TildeConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    task: Option<String>,
    weight: WeightConfig,
    n: Option<usize>,
    n_list: Option<Vec<usize>>,
    #[serde(rename = "L")]
    l: Option<f64>,
    d: Option<f64>,
    seed: Option<u64>,
    trials: Option<usize>,
    f: Option<String>,
    x_list: Option<Vec<f64>>,
    nodes: Option<Vec<f64>>,
    grid_count: Option<usize>,
    out: Option<String>,
    format: Option<String>,
}

impl WeightConfig {
    fn build(&self) -> Result<Weight> {
        let need = |field: &str, v: Option<f64>| {
            v.ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "weight family '{}' requires the field '{field}'",
                    self.family
                ))
            })
        };
        let w = match self.family.as_str() {
            "hermite" => Weight::hermite(),
            "laguerre" => Weight::laguerre(need("alpha", self.alpha)?)?,
            "jacobi" => Weight::jacobi(need("alpha", self.alpha)?, need("beta", self.beta)?)?,
            "freud" => Weight::freud(self.m.ok_or_else(|| {
                Error::InvalidParameter("weight family 'freud' requires the field 'm'".into())
            })?)?,
            "even-poly" => Weight::even_poly(self.d_coeffs.clone().ok_or_else(|| {
                Error::InvalidParameter(
                    "weight family 'even-poly' requires the field 'd_coeffs'".into(),
                )
            })?)?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown weight family '{other}'"
                )))
            }
        };
        match &self.tilde {
            Some(t) if t.enabled => w.tilde(t.d.unwrap_or(2.0)),
            _ => Ok(w),
        }
    }
}

const TASKS: &[&str] = &[
    "nodes",
    "fekete",
    "fejer",
    "anfun",
    "normality",
    "equivalence",
    "lemma7",
    "lemma8",
    "converge",
];

/// One row of the A-function report.
#[derive(serde::Serialize)]
struct AnRow {
    n: usize,
    x: f64,
    value: f64,
    method: &'static str,
}

#[derive(serde::Serialize)]
struct NodesReport {
    m0: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    nodes: Vec<f64>,
}

enum Report {
    Nodes(NodesReport),
    Fejer(FejerReport),
    An(Vec<AnRow>),
    Normality(NormalityReport),
    Equivalence(EquivalenceVerdict),
    Band(Lemma7Band),
    Curve(ErrorCurve),
}

fn require_n(cfg: &RunConfig) -> Result<usize> {
    let n = cfg
        .n
        .ok_or_else(|| Error::InvalidParameter("this task requires the field 'n'".into()))?;
    check_degree(n)?;
    Ok(n)
}

fn check_degree(n: usize) -> Result<()> {
    if n < 1 || n > 40 {
        return Err(Error::InvalidParameter(format!(
            "n must lie in 1..=40, got {n}"
        )));
    }
    Ok(())
}

fn n_list_or(cfg: &RunConfig, default: &[usize]) -> Result<Vec<usize>> {
    let list = match (&cfg.n_list, cfg.n) {
        (Some(list), _) => list.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => default.to_vec(),
    };
    if list.is_empty() {
        return Err(Error::InvalidParameter("'n_list' must not be empty".into()));
    }
    for &n in &list {
        check_degree(n)?;
    }
    Ok(list)
}

fn run_task(task: &str, cfg: &RunConfig, w: &Weight, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match task {
        "nodes" => {
            let n = require_n(cfg)?;
            let rec = Recurrence::compute(w, n)?;
            let nodes = rec.zeros(n)?;
            Ok(Report::Nodes(NodesReport {
                m0: rec.m0,
                alpha: rec.alpha.clone(),
                beta: rec.beta.clone(),
                nodes,
            }))
        }
        "fekete" => {
            let n = require_n(cfg)?;
            let sol = solve(w, n, cfg.nodes.as_deref())?;
            Ok(Report::Fejer(fejer_report(w, &sol.x, sol.iterations)?))
        }
        "fejer" => {
            let nodes = match &cfg.nodes {
                Some(v) => v.clone(),
                None => {
                    let n = require_n(cfg)?;
                    Recurrence::compute(w, n)?.zeros(n)?
                }
            };
            check_degree(nodes.len())?;
            Ok(Report::Fejer(fejer_report(w, &nodes, 0)?))
        }
        "anfun" => {
            let ns = n_list_or(cfg, &[])?;
            let (a, b) = w.support();
            let xs: Vec<f64> = cfg
                .x_list
                .clone()
                .unwrap_or_else(|| vec![0.1, 0.5, 1.0, 2.0])
                .into_iter()
                .filter(|&x| x > a && x < b)
                .collect();
            if xs.is_empty() {
                return Err(Error::InvalidParameter(
                    "'x_list' has no points interior to the support".into(),
                ));
            }
            let n_top = *ns.iter().max().unwrap();
            let rec = Recurrence::compute(w, n_top + 1)?;
            let mut rows = Vec::new();
            for &n in &ns {
                for &x in &xs {
                    rows.push(AnRow {
                        n,
                        x,
                        value: a_over_rho(w, &rec, n, x)?,
                        method: "quadrature",
                    });
                    if let Some(v) = closed_a_over_rho(w, &rec, n, x)? {
                        rows.push(AnRow {
                            n,
                            x,
                            value: v,
                            method: "closed_form",
                        });
                    }
                }
            }
            Ok(Report::An(rows))
        }
        "normality" => {
            let n = require_n(cfg)?;
            let nodes = Recurrence::compute(w, n)?.zeros(n)?;
            let l = cfg.l.unwrap_or(DEFAULT_L);
            let a_n = w.mrs_number(n as f64)?;
            let grid = build_grid(
                w,
                &nodes,
                Some(l * a_n),
                cfg.grid_count.unwrap_or(GRID_COUNT),
            )?;
            Ok(Report::Normality(normality_check(w, &nodes, l, &grid)?))
        }
        "equivalence" => {
            let n = require_n(cfg)?;
            let trials = cfg.trials.unwrap_or(100);
            Ok(Report::Equivalence(equivalence_suite(
                w, n, trials, &mut rng,
            )?))
        }
        "lemma7" => {
            let ns = n_list_or(cfg, &[4, 8, 12, 16, 20])?;
            Ok(Report::Band(lemma7_band(w, &ns, cfg.l)?))
        }
        "lemma8" => {
            let ns = n_list_or(cfg, &[5, 10, 20, 40])?;
            Ok(Report::Curve(operator_norm_curve(
                w,
                cfg.d.unwrap_or(2.0),
                &ns,
            )?))
        }
        "converge" => {
            let ns = n_list_or(cfg, &[5, 10, 20, 40])?;
            let fs = builtin_test_functions(w);
            let name = cfg.f.as_deref().unwrap_or("cauchy");
            let f = fs.iter().find(|tf| tf.name == name).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown test function '{name}' in field 'f' (available: {})",
                    fs.iter()
                        .map(|tf| tf.name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })?;
            Ok(Report::Curve(convergence_experiment(
                w,
                cfg.d.unwrap_or(2.0),
                f,
                &ns,
            )?))
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown task '{other}' (available: {})",
            TASKS.join(", ")
        ))),
    }
}

// --- emission -----------------------------------------------------------

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_f(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

fn to_csv(task: &str, report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# schema: fflab.{task}.v1");
    match report {
        Report::Nodes(r) => {
            let _ = writeln!(s, "# m0 = {}", f(r.m0));
            let _ = writeln!(s, "k,node,alpha,beta");
            for (k, &x) in r.nodes.iter().enumerate() {
                let _ = writeln!(s, "{k},{},{},{}", f(x), f(r.alpha[k]), f(r.beta[k]));
            }
        }
        Report::Fejer(r) => {
            let _ = writeln!(s, "# max_abs_C = {}", f(r.max_abs_c));
            let _ = writeln!(s, "# neg_def = {}", r.hessian_negative_definite);
            let _ = writeln!(s, "# iterations = {}", r.iterations);
            let _ = writeln!(s, "k,node,c");
            for (k, (&x, &c)) in r.nodes.iter().zip(&r.c).enumerate() {
                let _ = writeln!(s, "{k},{},{}", f(x), f(c));
            }
        }
        Report::An(rows) => {
            let _ = writeln!(s, "n,x,value,method");
            for r in rows {
                let _ = writeln!(s, "{},{},{},{}", r.n, f(r.x), f(r.value), r.method);
            }
        }
        Report::Normality(r) => {
            let _ = writeln!(s, "node_bound,a_n,L,kernel_sup,pass");
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.node_bound,
                f(r.a_n),
                f(r.l),
                f(r.kernel_sup),
                r.pass
            );
        }
        Report::Equivalence(v) => {
            let _ = writeln!(s, "# n = {}", v.n);
            let _ = writeln!(s, "# op_zero_residual = {}", f(v.op_zero_residual));
            let _ = writeln!(s, "# even_poly_hypothesis = {}", v.even_poly_hypothesis);
            for note in &v.notes {
                let _ = writeln!(s, "# note: {note}");
            }
            let _ = writeln!(s, "property,pass,residual");
            for (name, p) in [
                ("fejer_zero", v.fejer_zero),
                ("fejer_zero_induced", v.fejer_zero_induced),
                ("fekete_match", v.fekete_match),
                ("fekete_match_induced", v.fekete_match_induced),
                ("stable", v.stable),
                ("stable_induced", v.stable_induced),
                ("normal", v.normal),
                ("normal_induced", v.normal_induced),
            ] {
                let _ = writeln!(s, "{name},{},{}", p.pass, f(p.residual));
            }
        }
        Report::Band(b) => {
            let _ = writeln!(s, "# L = {}", f(b.l));
            let _ = writeln!(s, "# L0 = {}", f(b.l0));
            let _ = writeln!(s, "# inner_min = {}", f(b.inner_min));
            let _ = writeln!(s, "# inner_max = {}", f(b.inner_max));
            let _ = writeln!(s, "# outer_min = {}", f(b.outer_min));
            let _ = writeln!(s, "# outer_max = {}", f(b.outer_max));
            let _ = writeln!(s, "n,regime,x,ratio");
            for r in &b.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.n,
                    if r.inner { "inner" } else { "outer" },
                    f(r.x),
                    f(r.ratio)
                );
            }
        }
        Report::Curve(c) => {
            let _ = writeln!(s, "# d_requested = {}", f(c.d_requested));
            let _ = writeln!(s, "# d_used = {}", f(c.d_used));
            if let Some(name) = &c.function {
                let _ = writeln!(s, "# function = {name}");
            }
            let _ = writeln!(s, "n,sup_error,kernel_sup");
            for p in &c.points {
                let _ = writeln!(s, "{},{},{}", p.n, opt_f(p.sup_error), f(p.kernel_sup));
            }
        }
    }
    s
}

fn to_json(report: &Report) -> String {
    let v = match report {
        Report::Nodes(r) => serde_json::to_value(r),
        Report::Fejer(r) => serde_json::to_value(r),
        Report::An(r) => serde_json::to_value(r),
        Report::Normality(r) => serde_json::to_value(r),
        Report::Equivalence(r) => serde_json::to_value(r),
        Report::Band(r) => serde_json::to_value(r),
        Report::Curve(r) => serde_json::to_value(r),
    };
    let mut s = serde_json::to_string_pretty(&v.expect("report serialization cannot fail"))
        .expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn emit(out: Option<&PathBuf>, payload: &str) -> std::result::Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| format!("cannot write report to {}: {e}", path.display())),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let raw = match std::fs::read_to_string(&cli.config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot read config {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let cfg: RunConfig = match serde_json::from_str(&raw) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config does not parse: {e}");
            return ExitCode::from(2);
        }
    };

    // Task from the command line wins; the config may carry it instead.
    let task = match (cli.task.as_deref(), cfg.task.as_deref()) {
        (Some(a), Some(b)) if a != b => {
            eprintln!("error: task '{a}' on the command line but '{b}' in the config");
            return ExitCode::from(2);
        }
        (Some(a), _) => a.to_string(),
        (None, Some(b)) => b.to_string(),
        (None, None) => {
            eprintln!("error: no task given (field 'task'); available: {}", TASKS.join(", "));
            return ExitCode::from(2);
        }
    };
    if !TASKS.contains(&task.as_str()) {
        eprintln!(
            "error: unknown task '{task}' (field 'task'); available: {}",
            TASKS.join(", ")
        );
        return ExitCode::from(2);
    }

    let format = cli
        .format
        .clone()
        .or_else(|| cfg.format.clone())
        .unwrap_or_else(|| "json".into());
    if format != "json" && format != "csv" {
        eprintln!("error: unknown format '{format}' (field 'format'); use json or csv");
        return ExitCode::from(2);
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone().map(PathBuf::from));
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);

    let w = match cfg.weight.build() {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    match run_task(&task, &cfg, &w, seed) {
        Ok(report) => {
            let payload = match format.as_str() {
                "csv" => to_csv(&task, &report),
                _ => to_json(&report),
            };
            if let Err(msg) = emit(out.as_ref(), &payload) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) if e.is_config() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            let kind = match e {
                Error::NoConvergence(_) => "no_convergence",
                Error::Domain(_) => "domain",
                Error::Precision(_) => "precision",
                Error::InvalidParameter(_) => unreachable!(),
            };
            let record = serde_json::json!({
                "error": {
                    "kind": kind,
                    "message": e.to_string(),
                    "task": task,
                }
            });
            let mut payload =
                serde_json::to_string_pretty(&record).expect("error record serializes");
            payload.push('\n');
            eprintln!("error: {e}");
            let _ = emit(out.as_ref(), &payload);
            ExitCode::from(3)
        }
    }
}
