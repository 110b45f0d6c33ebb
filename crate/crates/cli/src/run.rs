//! Job dispatch. Every command produces a JSON report and a table.

use ovfree_core::analytic::{burgers_residual, subordination, SeriesCauchy, UpperHalfPoint};
use ovfree_core::balg::{AlgebraElement, LinearMap};
use ovfree_core::fock::{gram_positivity, Flavor, FockOperators};
use ovfree_core::transforms::{
    bb_alpha, bm_hat, boolean_pair_cumulants, convolution_power, convolve, make_distribution, phi, rb_hat_alpha, rm_hat, Kind,
};
use ovfree_core::{Dist, Error, Matrix, Result, Series};
use serde_json::{json, Value};

use crate::job::{Job, JobSpec, Model};
use crate::json::{self, num};
use crate::suites::run_suite;
use crate::table::{self, sig, Table};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// 0 on success or pass, 1 when a check fails.
    pub code: i32,
    pub report: Value,
    pub table: String,
}

/// Usage errors (bad sizes, guards) exit 2; numeric and domain errors exit 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Bounds(_) | Error::Argument(_) | Error::Parse(_) => EXIT_USAGE,
        Error::Domain(_) | Error::Numeric(_) | Error::Convergence { .. } => EXIT_NUMERIC,
    }
}

fn kind_label(k: Kind) -> &'static str {
    match k {
        Kind::Free => "free_cumulants",
        Kind::Boolean => "boolean_cumulants",
    }
}

/// `F^[n](1, ..., 1)` for every order.
fn diagonal(s: &Series) -> Vec<Matrix> {
    let one = AlgebraElement::identity(s.dim());
    s.terms().iter().map(|t| t.eval(&vec![one.clone(); t.order() - 1]).expect("arity")).collect()
}

fn series_outcome(base: Value, named: Vec<(&str, &Series)>) -> Outcome {
    let mut report = base;
    let mut diag = serde_json::Map::new();
    let mut t = Table::new(std::iter::once("n".to_string()).chain(named.iter().map(|(k, _)| k.to_string())));
    let cols: Vec<Vec<Matrix>> = named.iter().map(|(_, s)| diagonal(s)).collect();
    for (k, s) in &named {
        report[*k] = json::series(s);
    }
    for ((k, _), vals) in named.iter().zip(&cols) {
        diag.insert(k.to_string(), Value::Array(vals.iter().map(json::matrix).collect()));
    }
    report["diagonal"] = Value::Object(diag);
    let rows = cols.iter().map(|c| c.len()).max().unwrap_or(0);
    for n in 0..rows {
        t.row(std::iter::once((n + 1).to_string()).chain(cols.iter().map(|c| table::matrix(&c[n]))));
    }
    Outcome { code: EXIT_OK, report, table: t.render() }
}

fn fields_table(rows: &[(&str, String)]) -> String {
    let mut t = Table::new(["field", "value"]);
    for (k, v) in rows {
        t.row([k.to_string(), v.clone()]);
    }
    t.render()
}

fn pass_code(pass: bool) -> i32 {
    if pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub fn run(spec: &JobSpec) -> Result<Outcome> {
    let (d, n) = (spec.dim, spec.trunc);
    let mut base = json!({
        "schema": SCHEMA,
        "command": spec.job.command(),
        "dim": d,
        "trunc": n,
        "seed": spec.seed,
    });
    let dist = |s| make_distribution(s, n);
    match &spec.job {
        Job::Moments { dist: s } => {
            let mu = dist(s)?;
            Ok(series_outcome(base, vec![("moments", mu.moments())]))
        }
        Job::Cumulants { dist: s, kind } => {
            let mu = dist(s)?;
            let named = match kind {
                Some(k) => vec![(kind_label(*k), mu.cumulants(*k))],
                None => vec![("free_cumulants", mu.free_cumulants()), ("boolean_cumulants", mu.boolean_cumulants())],
            };
            Ok(series_outcome(base, named))
        }
        Job::Convolve { dist: a, other, kind } => {
            let nu = convolve(&dist(a)?, &dist(other)?, *kind)?;
            Ok(series_outcome(base, vec![("moments", nu.moments()), (kind_label(*kind), nu.cumulants(*kind))]))
        }
        Job::Power { dist: a, alpha, kind } => {
            let nu = convolution_power(&dist(a)?, alpha, *kind)?;
            Ok(series_outcome(base, vec![("moments", nu.moments()), (kind_label(*kind), nu.cumulants(*kind))]))
        }
        Job::BbAlpha { dist: a, alpha } => {
            let nu = bb_alpha(alpha, &dist(a)?)?;
            Ok(series_outcome(base, vec![("moments", nu.moments()), ("free_cumulants", nu.free_cumulants())]))
        }
        Job::Phi { beta } => {
            let nu = phi(beta, n)?;
            Ok(series_outcome(base, vec![("moments", nu.moments()), ("boolean_cumulants", nu.boolean_cumulants())]))
        }
        Job::Verify { suite, tol, count } => {
            let rep = run_suite(*suite, spec.seed, d, n, *tol, *count)?;
            base["suite"] = json!(suite.id());
            base["anchor"] = json!(suite.anchor());
            base["dim"] = json!(rep.dim);
            base["count"] = json!(rep.count);
            base["max_error"] = num(rep.max_error);
            base["tol"] = json!(rep.tol);
            base["pass"] = json!(rep.pass);
            base["checks"] =
                Value::Array(rep.checks.iter().map(|c| json!({ "name": c.name, "error": num(c.error) })).collect());
            let mut t = Table::new(["check", "error"]);
            for c in &rep.checks {
                t.row([c.name.clone(), table::error(c.error)]);
            }
            let head = fields_table(&[
                ("suite", suite.id().to_string()),
                ("anchor", suite.anchor().to_string()),
                ("max_error", table::error(rep.max_error)),
                ("tol", table::error(rep.tol)),
                ("pass", rep.pass.to_string()),
            ]);
            Ok(Outcome { code: pass_code(rep.pass), report: base, table: format!("{head}\n{}", t.render()) })
        }
        Job::Gram { dist: s, max_len, tol } => {
            let rep = gram_positivity(&dist(s)?, *max_len, *tol)?;
            base["L"] = json!(rep.max_len);
            base["size"] = json!(rep.size);
            base["min_eigenvalue"] = num(rep.min_eigenvalue);
            base["tol"] = json!(rep.tol);
            base["pass"] = json!(rep.pass);
            let table = fields_table(&[
                ("L", rep.max_len.to_string()),
                ("size", rep.size.to_string()),
                ("min_eigenvalue", table::error(rep.min_eigenvalue)),
                ("tol", table::error(rep.tol)),
                ("pass", rep.pass.to_string()),
            ]);
            Ok(Outcome { code: pass_code(rep.pass), report: base, table })
        }
        Job::Subordinate { dist: s, alpha, point, tol, max_iter, growth, power_growth } => {
            let mu = dist(s)?;
            let b = UpperHalfPoint::from_matrix(point.clone())?;
            let g_mu = SeriesCauchy::from_distribution(&mu, *growth)?;
            let powered = convolution_power(&mu, alpha, Kind::Free)?;
            let g_pow = SeriesCauchy::from_distribution(&powered, *power_growth)?;
            let sub = subordination(&g_mu, alpha, &b, *tol, *max_iter)?;
            let (lhs, t1) = g_mu.evaluate(&sub.omega)?;
            let (rhs, t2) = g_pow.evaluate(b.point())?;
            let difference = (&lhs - &rhs).norm();
            let bound = t1.value + t2.value + 1e-8;
            let pass = difference <= bound;
            base["omega"] = json::matrix(&sub.omega);
            base["iterations"] = json!(sub.iterations);
            base["residual"] = num(sub.residual);
            base["min_im_excess"] = num(sub.min_im_excess);
            base["g_subordinated"] = json::matrix(&lhs);
            base["g_power"] = json::matrix(&rhs);
            base["difference"] = num(difference);
            base["tail"] = json!({ "subordinated": t1, "power": t2 });
            base["bound"] = num(bound);
            base["pass"] = json!(pass);
            let table = fields_table(&[
                ("omega", table::matrix(&sub.omega)),
                ("iterations", sub.iterations.to_string()),
                ("G_mu(omega)", table::matrix(&lhs)),
                ("G_power(b)", table::matrix(&rhs)),
                ("difference", table::error(difference)),
                ("bound", table::error(bound)),
                ("pass", pass.to_string()),
            ]);
            Ok(Outcome { code: pass_code(pass), report: base, table })
        }
        Job::Burgers { dist: s, eta, rho, point, step_t, step_b, growth, tol } => {
            let mu = dist(s)?;
            let b = UpperHalfPoint::from_matrix(point.clone())?;
            let growth = match growth {
                Some(g) => *g,
                None => default_burgers_growth(&mu, eta, rho, *step_t)?,
            };
            let rep = burgers_residual(&mu, eta, rho, &b, *step_t, *step_b, growth)?;
            let pass = rep.residual <= *tol;
            base["residual"] = num(rep.residual);
            base["coarse_residual"] = num(rep.coarse_residual);
            base["ratio"] = num(rep.ratio);
            base["steps"] = json!({ "t": rep.step_t, "b": rep.step_b });
            base["growth"] = num(growth);
            base["tol"] = json!(tol);
            base["pass"] = json!(pass);
            let table = fields_table(&[
                ("residual", table::error(rep.residual)),
                ("coarse_residual", table::error(rep.coarse_residual)),
                ("ratio", sig(rep.ratio)),
                ("growth", sig(growth)),
                ("tol", table::error(*tol)),
                ("pass", pass.to_string()),
            ]);
            Ok(Outcome { code: pass_code(pass), report: base, table })
        }
        Job::ModelCheck { model, lambda, beta, alpha, tol } => {
            let flavor = match model {
                Model::Boolean => Flavor::Boolean,
                Model::Free => Flavor::Free,
                Model::BbAlpha => Flavor::BbAlpha(alpha.clone().expect("checked at parse")),
            };
            let ops = FockOperators::new(flavor, lambda.clone(), beta.clone(), n)?;
            let model_m = ops.moment_series(n)?;
            let b = boolean_pair_cumulants(lambda, beta, n)?;
            let expected = match model {
                Model::Boolean => bm_hat(&b)?,
                Model::Free => rm_hat(&b)?,
                Model::BbAlpha => bm_hat(&rb_hat_alpha(alpha.as_ref().expect("checked"), &b)?)?,
            };
            let errors: Vec<f64> =
                model_m.terms().iter().zip(expected.terms()).map(|(a, e)| a.max_abs_diff(e)).collect();
            let max_error = errors.iter().copied().fold(0.0, f64::max);
            let pass = max_error <= *tol;
            base["model"] = json!(match model {
                Model::Boolean => "boolean",
                Model::Free => "free",
                Model::BbAlpha => "bbalpha",
            });
            base["term_errors"] = Value::Array(errors.iter().map(|e| num(*e)).collect());
            base["max_error"] = num(max_error);
            base["tol"] = json!(tol);
            base["pass"] = json!(pass);
            let mut t = Table::new(["n", "error"]);
            for (i, e) in errors.iter().enumerate() {
                t.row([(i + 1).to_string(), table::error(*e)]);
            }
            let head = fields_table(&[("max_error", table::error(max_error)), ("tol", table::error(*tol)), ("pass", pass.to_string())]);
            Ok(Outcome { code: pass_code(pass), report: base, table: format!("{head}\n{}", t.render()) })
        }
    }
}

/// Growth of `μ` plus the semicircle bound `2√‖η'(1)‖` at the widest stencil
/// variance `η + 2 h_t ρ`.
fn default_burgers_growth(mu: &Dist, eta: &ovfree_core::Map, rho: &ovfree_core::Map, step_t: f64) -> Result<f64> {
    let base = SeriesCauchy::from_distribution(mu, None)?.growth();
    let widest = eta.add(&rho.scale(&ovfree_core::C64::new(2.0 * step_t, 0.0)));
    let one = AlgebraElement::identity(mu.dim());
    let spread = LinearMap::apply(&widest, &one).norm();
    Ok(base + 2.0 * spread.sqrt())
}
