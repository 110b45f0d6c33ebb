//! Job files: one JSON document per run.

use std::fmt;

use ovfree_core::balg::MAX_DIM;
use ovfree_core::series::N_MAX;
use ovfree_core::transforms::Kind;
use ovfree_core::{DistSpec, Map, Matrix, WordMap};
use serde_json::{json, Value};

use crate::json::{self, child, Decoder, FieldError};
use crate::suites::Suite;

#[derive(Clone, Debug, PartialEq)]
pub struct JobSpec {
    pub dim: usize,
    pub trunc: usize,
    pub seed: u64,
    pub job: Job,
}

/// Which Fock model a `model-check` job builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Boolean,
    Free,
    BbAlpha,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Moments { dist: DistSpec },
    /// `kind: None` reports both cumulant series.
    Cumulants { dist: DistSpec, kind: Option<Kind> },
    Convolve { dist: DistSpec, other: DistSpec, kind: Kind },
    Power { dist: DistSpec, alpha: Map, kind: Kind },
    BbAlpha { dist: DistSpec, alpha: Map },
    Phi { beta: WordMap },
    Verify { suite: Suite, tol: Option<f64>, count: Option<usize> },
    Gram { dist: DistSpec, max_len: usize, tol: f64 },
    Subordinate { dist: DistSpec, alpha: Map, point: Matrix, tol: f64, max_iter: usize, growth: Option<f64>, power_growth: Option<f64> },
    Burgers { dist: DistSpec, eta: Map, rho: Map, point: Matrix, step_t: f64, step_b: f64, growth: Option<f64>, tol: f64 },
    ModelCheck { model: Model, lambda: Matrix, beta: WordMap, alpha: Option<Map>, tol: f64 },
}

pub const COMMANDS: [&str; 11] =
    ["moments", "cumulants", "convolve", "power", "bbalpha", "phi", "verify", "gram", "subordinate", "burgers", "model-check"];

impl Job {
    pub fn command(&self) -> &'static str {
        match self {
            Job::Moments { .. } => "moments",
            Job::Cumulants { .. } => "cumulants",
            Job::Convolve { .. } => "convolve",
            Job::Power { .. } => "power",
            Job::BbAlpha { .. } => "bbalpha",
            Job::Phi { .. } => "phi",
            Job::Verify { .. } => "verify",
            Job::Gram { .. } => "gram",
            Job::Subordinate { .. } => "subordinate",
            Job::Burgers { .. } => "burgers",
            Job::ModelCheck { .. } => "model-check",
        }
    }
}

/// Every schema violation found in a job document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecErrors(pub Vec<FieldError>);

impl fmt::Display for SpecErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for SpecErrors {}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Free => "free",
        Kind::Boolean => "boolean",
    }
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Boolean => "boolean",
        Model::Free => "free",
        Model::BbAlpha => "bbalpha",
    }
}

pub const DEFAULT_GRAM_TOL: f64 = 1e-9;
pub const DEFAULT_MODEL_TOL: f64 = 1e-9;
pub const DEFAULT_BURGERS_TOL: f64 = 1e-5;
pub const DEFAULT_SUB_TOL: f64 = 1e-13;

/// Parses and validates a job document.
pub fn parse_spec(text: &str) -> Result<JobSpec, SpecErrors> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| SpecErrors(vec![FieldError { path: "$".into(), message: format!("invalid JSON: {e}") }]))?;
    parse_value(&v)
}

pub fn parse_value(v: &Value) -> Result<JobSpec, SpecErrors> {
    let mut dec = Decoder::default();
    let spec = parse_in(&mut dec, v);
    match spec {
        Some(s) if dec.errors.is_empty() => Ok(s),
        _ => Err(SpecErrors(dec.errors)),
    }
}

fn parse_in(dec: &mut Decoder, v: &Value) -> Option<JobSpec> {
    let root = dec.object(v, "$")?;
    let command = dec.required(root, "$", "command").and_then(|x| dec.str(x, "$.command"));
    let dim = dec.required(root, "$", "dim").and_then(|x| dec.usize(x, "$.dim"));
    let trunc = dec.required(root, "$", "trunc").and_then(|x| dec.usize(x, "$.trunc"));
    let seed = match root.get("seed") {
        Some(x) => match x.as_u64() {
            Some(s) => Some(s),
            None => dec.fail("$.seed", "expected a non-negative integer"),
        },
        None => Some(0),
    };
    let dim = dim.and_then(|d| if (1..=MAX_DIM).contains(&d) { Some(d) } else { dec.fail("$.dim", format!("must be in 1..={MAX_DIM}")) });
    let trunc =
        trunc.and_then(|n| if (1..=N_MAX).contains(&n) { Some(n) } else { dec.fail("$.trunc", format!("must be in 1..={N_MAX}")) });
    let command = command?;
    if !COMMANDS.contains(&command) {
        return dec.fail("$.command", format!("unknown command {command:?}"));
    }
    let (d, n, seed) = (dim?, trunc?, seed?);
    let job = parse_job(dec, root, command, d, n)?;
    Some(JobSpec { dim: d, trunc: n, seed, job })
}

fn opt_f64(dec: &mut Decoder, root: &serde_json::Map<String, Value>, key: &str, default: f64) -> Option<f64> {
    match root.get(key) {
        Some(x) => {
            let t = dec.f64(x, &child("$", key))?;
            if t > 0.0 {
                Some(t)
            } else {
                dec.fail(&child("$", key), "must be positive")
            }
        }
        None => Some(default),
    }
}

fn opt_growth(dec: &mut Decoder, root: &serde_json::Map<String, Value>, key: &str) -> Option<Option<f64>> {
    match root.get(key) {
        Some(_) => opt_f64(dec, root, key, 0.0).map(Some),
        None => Some(None),
    }
}

fn parse_kind(dec: &mut Decoder, v: &Value, path: &str) -> Option<Kind> {
    match dec.str(v, path)? {
        "free" => Some(Kind::Free),
        "boolean" => Some(Kind::Boolean),
        other => dec.fail(path, format!("expected \"free\" or \"boolean\", got {other:?}")),
    }
}

fn parse_job(dec: &mut Decoder, root: &serde_json::Map<String, Value>, command: &str, d: usize, n: usize) -> Option<Job> {
    let dist = |dec: &mut Decoder, key: &str| dec.required(root, "$", key).and_then(|x| dec.dist(x, &child("$", key), d, n));
    let map = |dec: &mut Decoder, key: &str| dec.required(root, "$", key).and_then(|x| dec.map(x, &child("$", key), d));
    let kind = |dec: &mut Decoder| dec.required(root, "$", "kind").and_then(|x| parse_kind(dec, x, "$.kind"));
    let point = |dec: &mut Decoder| dec.required(root, "$", "point").and_then(|x| dec.matrix(x, "$.point", d));
    match command {
        "moments" => Some(Job::Moments { dist: dist(dec, "dist")? }),
        "cumulants" => {
            let dist = dist(dec, "dist");
            let kind = match root.get("kind") {
                None => Some(None),
                Some(Value::String(s)) if s == "both" => Some(None),
                Some(x) => parse_kind(dec, x, "$.kind").map(Some),
            };
            Some(Job::Cumulants { dist: dist?, kind: kind? })
        }
        "convolve" => {
            let (a, b, k) = (dist(dec, "dist"), dist(dec, "other"), kind(dec));
            Some(Job::Convolve { dist: a?, other: b?, kind: k? })
        }
        "power" => {
            let (a, m, k) = (dist(dec, "dist"), map(dec, "alpha"), kind(dec));
            Some(Job::Power { dist: a?, alpha: m?, kind: k? })
        }
        "bbalpha" => {
            let (a, m) = (dist(dec, "dist"), map(dec, "alpha"));
            Some(Job::BbAlpha { dist: a?, alpha: m? })
        }
        "phi" => {
            let beta = dec.required(root, "$", "beta").and_then(|x| dec.word_map(x, "$.beta", d, n.saturating_sub(2)))?;
            if n >= 2 && beta.max_degree() + 2 < n {
                return dec.fail("$.beta", format!("needs degree {} for truncation {n}", n - 2));
            }
            Some(Job::Phi { beta })
        }
        "verify" => {
            let name = dec.required(root, "$", "suite").and_then(|x| dec.str(x, "$.suite"))?;
            let Some(suite) = Suite::from_id(name) else {
                let known: Vec<_> = Suite::ALL.iter().map(|s| s.id()).collect();
                return dec.fail("$.suite", format!("unknown suite {name:?}; known: {}", known.join(", ")));
            };
            let tol = match root.get("tol") {
                Some(_) => Some(opt_f64(dec, root, "tol", 0.0)?),
                None => None,
            };
            let count = match root.get("count") {
                Some(x) => Some(dec.usize(x, "$.count")?),
                None => None,
            };
            Some(Job::Verify { suite, tol, count })
        }
        "gram" => {
            let dist = dist(dec, "dist");
            let max_len = match root.get("L") {
                Some(x) => dec.usize(x, "$.L"),
                None => Some(2),
            };
            let tol = opt_f64(dec, root, "tol", DEFAULT_GRAM_TOL);
            let (dist, max_len, tol) = (dist?, max_len?, tol?);
            if 2 * max_len + 2 > n {
                return dec.fail("$.L", format!("L = {max_len} needs trunc >= {}", 2 * max_len + 2));
            }
            Some(Job::Gram { dist, max_len, tol })
        }
        "subordinate" => {
            let (a, m, p) = (dist(dec, "dist"), map(dec, "alpha"), point(dec));
            let tol = opt_f64(dec, root, "tol", DEFAULT_SUB_TOL);
            let max_iter = match root.get("max_iter") {
                Some(x) => dec.usize(x, "$.max_iter"),
                None => Some(ovfree_core::analytic::DEFAULT_MAX_ITER),
            };
            let growth = opt_growth(dec, root, "growth");
            let power_growth = opt_growth(dec, root, "power_growth");
            Some(Job::Subordinate {
                dist: a?,
                alpha: m?,
                point: p?,
                tol: tol?,
                max_iter: max_iter?,
                growth: growth?,
                power_growth: power_growth?,
            })
        }
        "burgers" => {
            let (a, e, r, p) = (dist(dec, "dist"), map(dec, "eta"), map(dec, "rho"), point(dec));
            let (st, sb) = match root.get("steps") {
                Some(x) => match dec.object(x, "$.steps") {
                    Some(o) => (opt_f64(dec, o, "t", ovfree_core::analytic::DEFAULT_STEP), opt_f64(dec, o, "b", ovfree_core::analytic::DEFAULT_STEP)),
                    None => (None, None),
                },
                None => (Some(ovfree_core::analytic::DEFAULT_STEP), Some(ovfree_core::analytic::DEFAULT_STEP)),
            };
            let growth = opt_growth(dec, root, "growth");
            let tol = opt_f64(dec, root, "tol", DEFAULT_BURGERS_TOL);
            Some(Job::Burgers {
                dist: a?,
                eta: e?,
                rho: r?,
                point: p?,
                step_t: st?,
                step_b: sb?,
                growth: growth?,
                tol: tol?,
            })
        }
        "model-check" => {
            let model = dec.required(root, "$", "model").and_then(|x| dec.str(x, "$.model")).and_then(|s| match s {
                "boolean" => Some(Model::Boolean),
                "free" => Some(Model::Free),
                "bbalpha" => Some(Model::BbAlpha),
                other => dec.fail("$.model", format!("expected boolean, free or bbalpha, got {other:?}")),
            });
            let lambda = dec.required(root, "$", "lambda").and_then(|x| dec.matrix(x, "$.lambda", d));
            let beta = dec.required(root, "$", "beta").and_then(|x| dec.word_map(x, "$.beta", d, n.saturating_sub(2)));
            let alpha = match root.get("alpha") {
                Some(x) => dec.map(x, "$.alpha", d).map(Some),
                None => Some(None),
            };
            let tol = opt_f64(dec, root, "tol", DEFAULT_MODEL_TOL);
            let (model, lambda, beta, alpha, tol) = (model?, lambda?, beta?, alpha?, tol?);
            if model == Model::BbAlpha && alpha.is_none() {
                return dec.fail("$.alpha", "missing field (required for the bbalpha model)");
            }
            if n >= 2 && beta.max_degree() + 2 < n {
                return dec.fail("$.beta", format!("needs degree {} for truncation {n}", n - 2));
            }
            Some(Job::ModelCheck { model, lambda, beta, alpha, tol })
        }
        _ => unreachable!("command checked"),
    }
}

/// The job document; `parse_spec(&to_json(j).to_string())` gives back `j`.
pub fn to_json(spec: &JobSpec) -> Value {
    let mut v = json!({
        "command": spec.job.command(),
        "dim": spec.dim,
        "trunc": spec.trunc,
        "seed": spec.seed,
    });
    let mut set = |k: &str, x: Value| {
        v[k] = x;
    };
    match &spec.job {
        Job::Moments { dist } => set("dist", json::dist(dist)),
        Job::Cumulants { dist, kind } => {
            set("dist", json::dist(dist));
            set("kind", json!(kind.map(kind_name).unwrap_or("both")));
        }
        Job::Convolve { dist, other, kind } => {
            set("dist", json::dist(dist));
            set("other", json::dist(other));
            set("kind", json!(kind_name(*kind)));
        }
        Job::Power { dist, alpha, kind } => {
            set("dist", json::dist(dist));
            set("alpha", json::map(alpha));
            set("kind", json!(kind_name(*kind)));
        }
        Job::BbAlpha { dist, alpha } => {
            set("dist", json::dist(dist));
            set("alpha", json::map(alpha));
        }
        Job::Phi { beta } => set("beta", json::word_map(beta)),
        Job::Verify { suite, tol, count } => {
            set("suite", json!(suite.id()));
            if let Some(t) = tol {
                set("tol", json!(t));
            }
            if let Some(c) = count {
                set("count", json!(c));
            }
        }
        Job::Gram { dist, max_len, tol } => {
            set("dist", json::dist(dist));
            set("L", json!(max_len));
            set("tol", json!(tol));
        }
        Job::Subordinate { dist, alpha, point, tol, max_iter, growth, power_growth } => {
            set("dist", json::dist(dist));
            set("alpha", json::map(alpha));
            set("point", json::matrix(point));
            set("tol", json!(tol));
            set("max_iter", json!(max_iter));
            if let Some(g) = growth {
                set("growth", json!(g));
            }
            if let Some(g) = power_growth {
                set("power_growth", json!(g));
            }
        }
        Job::Burgers { dist, eta, rho, point, step_t, step_b, growth, tol } => {
            set("dist", json::dist(dist));
            set("eta", json::map(eta));
            set("rho", json::map(rho));
            set("point", json::matrix(point));
            set("steps", json!({ "t": step_t, "b": step_b }));
            if let Some(g) = growth {
                set("growth", json!(g));
            }
            set("tol", json!(tol));
        }
        Job::ModelCheck { model, lambda, beta, alpha, tol } => {
            set("model", json!(model_name(*model)));
            set("lambda", json::matrix(lambda));
            set("beta", json::word_map(beta));
            if let Some(a) = alpha {
                set("alpha", json::map(a));
            }
            set("tol", json!(tol));
        }
    }
    v
}
