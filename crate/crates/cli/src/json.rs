//! JSON forms of the algebra types.
//!
//! Complex numbers are `[re, im]` or a bare number, matrices are nested rows
//! in the `E_ij` basis, and series terms are flat lists of matrices indexed
//! by argument tuples in radix `d²`, first argument most significant.

use std::fmt;

use ovfree_core::balg::{AlgebraElement, LinearMap, MultilinearFunctional, PolyLinearMap};
use ovfree_core::random::operator_word_map;
use ovfree_core::{DistSpec, Map, Matrix, Series, WordMap, C64};
use serde_json::{json, Map as Object, Value};

/// A schema violation at a JSON path such as `$.dist.lambda[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Collects field errors while decoding.
#[derive(Default, Debug)]
pub struct Decoder {
    pub errors: Vec<FieldError>,
}

impl Decoder {
    pub fn fail<T>(&mut self, path: &str, message: impl Into<String>) -> Option<T> {
        self.errors.push(FieldError { path: path.to_string(), message: message.into() });
        None
    }

    pub fn object<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a Object<String, Value>> {
        match v.as_object() {
            Some(o) => Some(o),
            None => self.fail(path, "expected an object"),
        }
    }

    pub fn required<'a>(&mut self, obj: &'a Object<String, Value>, path: &str, key: &str) -> Option<&'a Value> {
        match obj.get(key) {
            Some(v) => Some(v),
            None => self.fail(&child(path, key), "missing field"),
        }
    }

    pub fn usize(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64() {
            Some(n) => Some(n as usize),
            None => self.fail(path, "expected a non-negative integer"),
        }
    }

    pub fn f64(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => self.fail(path, "expected a finite number"),
        }
    }

    pub fn str<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a str> {
        match v.as_str() {
            Some(s) => Some(s),
            None => self.fail(path, "expected a string"),
        }
    }

    fn array<'a>(&mut self, v: &'a Value, path: &str, len: Option<usize>) -> Option<&'a Vec<Value>> {
        let Some(a) = v.as_array() else {
            return self.fail(path, "expected an array");
        };
        match len {
            Some(n) if a.len() != n => self.fail(path, format!("expected {n} entries, found {}", a.len())),
            _ => Some(a),
        }
    }

    pub fn complex(&mut self, v: &Value, path: &str) -> Option<C64> {
        if let Some(x) = v.as_f64() {
            return Some(C64::new(x, 0.0));
        }
        let parts = self.array(v, path, Some(2))?;
        let re = self.f64(&parts[0], &index(path, 0));
        let im = self.f64(&parts[1], &index(path, 1));
        Some(C64::new(re?, im?))
    }

    /// An `n x n` matrix given as rows.
    pub fn matrix(&mut self, v: &Value, path: &str, n: usize) -> Option<Matrix> {
        let rows = self.array(v, path, Some(n))?;
        let mut entries = Vec::with_capacity(n * n);
        let mut ok = true;
        for (i, row) in rows.iter().enumerate() {
            let p = index(path, i);
            match self.array(row, &p, Some(n)) {
                Some(row) => {
                    for (j, x) in row.iter().enumerate() {
                        match self.complex(x, &index(&p, j)) {
                            Some(c) => entries.push(c),
                            None => ok = false,
                        }
                    }
                }
                None => ok = false,
            }
        }
        if !ok {
            return None;
        }
        Some(Matrix::from_entries(n, entries).expect("square"))
    }

    fn matrices(&mut self, v: &Value, path: &str, d: usize, len: Option<usize>) -> Option<Vec<Matrix>> {
        let items = self.array(v, path, len)?;
        let out: Vec<Option<Matrix>> = items.iter().enumerate().map(|(i, x)| self.matrix(x, &index(path, i), d)).collect();
        out.into_iter().collect()
    }

    pub fn map(&mut self, v: &Value, path: &str, d: usize) -> Option<Map> {
        if let Some(s) = v.as_str() {
            return match s {
                "identity" => Some(LinearMap::identity(d)),
                "zero" => Some(LinearMap::zero(d)),
                "transpose" => Some(LinearMap::transpose_map(d)),
                _ => self.fail(path, format!("unknown map {s:?}")),
            };
        }
        let obj = self.object(v, path)?;
        if obj.len() != 1 {
            return self.fail(path, "expected exactly one of matrix, kraus, scalar, conjugation");
        }
        let (key, inner) = obj.iter().next().expect("one entry");
        let p = child(path, key);
        match key.as_str() {
            "matrix" => {
                let m = self.matrix(inner, &p, d * d)?;
                Some(LinearMap::from_matrix(d, m.entries().to_vec()).expect("shape"))
            }
            "kraus" => {
                let ks = self.matrices(inner, &p, d, None)?;
                if ks.is_empty() {
                    return self.fail(&p, "empty Kraus list");
                }
                Some(LinearMap::from_kraus(&ks).expect("same sizes"))
            }
            "scalar" => Some(LinearMap::scalar(d, self.complex(inner, &p)?)),
            "conjugation" => Some(LinearMap::conjugation(&self.matrix(inner, &p, d)?)),
            _ => self.fail(&p, "unknown map form"),
        }
    }

    /// `{"dim", "trunc", "terms"}`.
    pub fn series(&mut self, v: &Value, path: &str, d: usize) -> Option<Series> {
        let obj = self.object(v, path)?;
        let dim = self.required(obj, path, "dim").and_then(|x| self.usize(x, &child(path, "dim")));
        let trunc = self.required(obj, path, "trunc").and_then(|x| self.usize(x, &child(path, "trunc")));
        let terms = self.required(obj, path, "terms");
        let (dim, trunc, terms) = (dim?, trunc?, terms?);
        if dim != d {
            return self.fail(&child(path, "dim"), format!("series on {dim}x{dim} matrices, job dimension is {d}"));
        }
        if trunc == 0 || trunc > ovfree_core::series::N_MAX {
            return self.fail(&child(path, "trunc"), format!("truncation outside 1..={}", ovfree_core::series::N_MAX));
        }
        let p = child(path, "terms");
        let items = self.array(terms, &p, Some(trunc))?;
        let mut out = Vec::with_capacity(trunc);
        for (i, t) in items.iter().enumerate() {
            let n = i + 1;
            let data = self.matrices(t, &index(&p, i), d, Some((d * d).pow(n as u32 - 1)));
            if let Some(data) = data {
                out.push(MultilinearFunctional::from_data(d, n, data).expect("shape"));
            }
        }
        if out.len() != trunc {
            return None;
        }
        Some(Series::from_terms(out).expect("shape"))
    }

    /// A word map `B<X> -> B` as explicit layers or an operator model.
    /// `degree` is used when the operator model omits its own.
    pub fn word_map(&mut self, v: &Value, path: &str, d: usize, degree: usize) -> Option<WordMap> {
        let obj = self.object(v, path)?;
        if let Some(layers) = obj.get("layers") {
            let p = child(path, "layers");
            let items = self.array(layers, &p, None)?;
            if items.is_empty() {
                return self.fail(&p, "no layers");
            }
            let mut out = Vec::new();
            for (k, l) in items.iter().enumerate() {
                if let Some(data) = self.matrices(l, &index(&p, k), d, Some((d * d).pow(k as u32 + 1))) {
                    out.push(MultilinearFunctional::from_data(d, k + 2, data).expect("shape"));
                }
            }
            if out.len() != items.len() {
                return None;
            }
            return Some(PolyLinearMap::from_layers(out).expect("shape"));
        }
        if let Some(model) = obj.get("operator_model") {
            let p = child(path, "operator_model");
            let m = self.object(model, &p)?;
            let aux = self.required(m, &p, "aux").and_then(|x| self.usize(x, &child(&p, "aux")))?;
            if aux == 0 || aux > 4 {
                return self.fail(&child(&p, "aux"), "aux must be in 1..=4");
            }
            let n = d * aux;
            let t = self.required(m, &p, "t").and_then(|x| self.matrix(x, &child(&p, "t"), n));
            let v = self.required(m, &p, "v").and_then(|x| self.rect(x, &child(&p, "v"), n, d));
            let degree = match m.get("degree") {
                Some(x) => self.usize(x, &child(&p, "degree"))?,
                None => degree,
            };
            let (t, v) = (t?, v?);
            if degree > ovfree_core::balg::MAX_TENSOR_ORDER - 2 {
                return self.fail(&child(&p, "degree"), "degree above the tensor-order guard");
            }
            return Some(operator_word_map(d, aux, &t, &v, degree).expect("checked shapes"));
        }
        self.fail(path, "expected \"layers\" or \"operator_model\"")
    }

    fn rect(&mut self, v: &Value, path: &str, rows: usize, cols: usize) -> Option<Vec<C64>> {
        let items = self.array(v, path, Some(rows))?;
        let mut out = Vec::with_capacity(rows * cols);
        let mut ok = true;
        for (i, row) in items.iter().enumerate() {
            let p = index(path, i);
            match self.array(row, &p, Some(cols)) {
                Some(row) => {
                    for (j, x) in row.iter().enumerate() {
                        match self.complex(x, &index(&p, j)) {
                            Some(c) => out.push(c),
                            None => ok = false,
                        }
                    }
                }
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    /// A distribution spec; word maps default to degree `trunc - 2`.
    pub fn dist(&mut self, v: &Value, path: &str, d: usize, trunc: usize) -> Option<DistSpec> {
        let obj = self.object(v, path)?;
        let kind = self.required(obj, path, "type").and_then(|x| self.str(x, &child(path, "type")))?;
        if let Some(t) = obj.get("trunc") {
            let n = self.usize(t, &child(path, "trunc"))?;
            if n < trunc {
                return self.fail(&child(path, "trunc"), format!("distribution truncated at {n}, job needs {trunc}"));
            }
        }
        let field = |dec: &mut Self, key: &str| dec.required(obj, path, key).map(|x| (x, child(path, key)));
        match kind {
            "point_mass" => {
                let (x, p) = field(self, "lambda")?;
                Some(DistSpec::PointMass { lambda: self.matrix(x, &p, d)? })
            }
            "semicircular" => {
                let eta = field(self, "eta").and_then(|(x, p)| self.map(x, &p, d));
                let center = match obj.get("center") {
                    Some(x) => Some(self.matrix(x, &child(path, "center"), d)?),
                    None => None,
                };
                Some(DistSpec::Semicircular { eta: eta?, center })
            }
            "cp_free" | "cp_boolean" | "cp_free_root" => {
                let nu = field(self, "nu").and_then(|(x, p)| self.dist(x, &p, d, trunc));
                let alpha = field(self, "alpha").and_then(|(x, p)| self.map(x, &p, d));
                let (nu, alpha) = (Box::new(nu?), alpha?);
                match kind {
                    "cp_free" => Some(DistSpec::CompoundPoissonFree { nu, alpha }),
                    "cp_boolean" => Some(DistSpec::CompoundPoissonBoolean { nu, alpha }),
                    _ => {
                        let t = match obj.get("t") {
                            Some(x) => self.complex(x, &child(path, "t"))?,
                            None => C64::new(1.0, 0.0),
                        };
                        if t == C64::new(0.0, 0.0) {
                            return self.fail(&child(path, "t"), "must be nonzero");
                        }
                        Some(DistSpec::CompoundPoissonRoot { nu, alpha, t })
                    }
                }
            }
            "boolean_pair" => {
                let lambda = field(self, "lambda").and_then(|(x, p)| self.matrix(x, &p, d));
                let beta = field(self, "beta").and_then(|(x, p)| self.word_map(x, &p, d, trunc.saturating_sub(2)));
                let (lambda, beta) = (lambda?, beta?);
                if trunc >= 2 && beta.max_degree() + 2 < trunc {
                    return self.fail(&child(path, "beta"), format!("needs degree {} for truncation {trunc}", trunc - 2));
                }
                Some(DistSpec::BooleanPair { lambda, beta })
            }
            "raw_moments" | "raw_free_cumulants" | "raw_boolean_cumulants" => {
                let (x, p) = field(self, "series")?;
                let s = self.series(x, &p, d)?;
                if s.trunc() < trunc {
                    return self.fail(&child(&p, "trunc"), format!("series truncated at {}, job needs {trunc}", s.trunc()));
                }
                Some(match kind {
                    "raw_moments" => DistSpec::RawMoments(s),
                    "raw_free_cumulants" => DistSpec::RawFreeCumulants(s),
                    _ => DistSpec::RawBooleanCumulants(s),
                })
            }
            other => self.fail(&child(path, "type"), format!("unknown distribution type {other:?}")),
        }
    }
}

pub fn child(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

pub fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

/// Non-finite values become the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn complex(c: &C64) -> Value {
    json!([num(c.re), num(c.im)])
}

fn rows(entries: &[C64], n: usize) -> Value {
    Value::Array(entries.chunks(n).map(|r| Value::Array(r.iter().map(complex).collect())).collect())
}

pub fn matrix(m: &Matrix) -> Value {
    rows(m.entries(), m.dim())
}

pub fn map(m: &Map) -> Value {
    let n = m.dim() * m.dim();
    json!({ "matrix": rows(m.matrix(), n) })
}

fn matrices(ms: &[AlgebraElement<C64>]) -> Value {
    Value::Array(ms.iter().map(matrix).collect())
}

pub fn series(s: &Series) -> Value {
    json!({
        "dim": s.dim(),
        "trunc": s.trunc(),
        "terms": s.terms().iter().map(|t| matrices(t.data())).collect::<Vec<_>>(),
    })
}

pub fn word_map(w: &WordMap) -> Value {
    json!({ "layers": w.layers().iter().map(|l| matrices(l.data())).collect::<Vec<_>>() })
}

pub fn dist(spec: &DistSpec) -> Value {
    match spec {
        DistSpec::PointMass { lambda } => json!({ "type": "point_mass", "lambda": matrix(lambda) }),
        DistSpec::Semicircular { eta, center } => {
            let mut v = json!({ "type": "semicircular", "eta": map(eta) });
            if let Some(c) = center {
                v["center"] = matrix(c);
            }
            v
        }
        DistSpec::CompoundPoissonFree { nu, alpha } => json!({ "type": "cp_free", "nu": dist(nu), "alpha": map(alpha) }),
        DistSpec::CompoundPoissonBoolean { nu, alpha } => {
            json!({ "type": "cp_boolean", "nu": dist(nu), "alpha": map(alpha) })
        }
        DistSpec::CompoundPoissonRoot { nu, alpha, t } => {
            json!({ "type": "cp_free_root", "nu": dist(nu), "alpha": map(alpha), "t": complex(t) })
        }
        DistSpec::BooleanPair { lambda, beta } => {
            json!({ "type": "boolean_pair", "lambda": matrix(lambda), "beta": word_map(beta) })
        }
        DistSpec::RawMoments(s) => json!({ "type": "raw_moments", "series": series(s) }),
        DistSpec::RawFreeCumulants(s) => json!({ "type": "raw_free_cumulants", "series": series(s) }),
        DistSpec::RawBooleanCumulants(s) => json!({ "type": "raw_boolean_cumulants", "series": series(s) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let mut dec = Decoder::default();
        assert_eq!(dec.complex(&json!(2.5), "$"), Some(C64::new(2.5, 0.0)));
        assert_eq!(dec.complex(&json!([1, -2]), "$"), Some(C64::new(1.0, -2.0)));
        assert!(dec.complex(&json!([1, 2, 3]), "$.z").is_none());
        assert_eq!(dec.errors[0].path, "$.z");
    }

    #[test]
    fn matrix_errors_name_the_entry() {
        let mut dec = Decoder::default();
        assert!(dec.matrix(&json!([[1, 0], [0, "x"]]), "$.m", 2).is_none());
        assert_eq!(dec.errors.len(), 1);
        assert_eq!(dec.errors[0].path, "$.m[1][1]");
    }

    #[test]
    fn map_forms_agree() {
        let mut dec = Decoder::default();
        let a = json!([[0, 1], [1, 0]]);
        let conj = dec.map(&json!({ "conjugation": a }), "$", 2).unwrap();
        let kraus = dec.map(&json!({ "kraus": [a] }), "$", 2).unwrap();
        assert_eq!(conj, kraus);
        let back = dec.map(&map(&conj), "$", 2).unwrap();
        assert_eq!(back, conj);
        assert_eq!(dec.map(&json!("identity"), "$", 2).unwrap(), LinearMap::identity(2));
        assert!(dec.map(&json!("nope"), "$.alpha", 2).is_none());
        assert!(dec.errors.iter().any(|e| e.path == "$.alpha"));
    }

    #[test]
    fn series_round_trip() {
        let mut r = ovfree_core::random::rng(3);
        let s: Series = ovfree_core::random::random_series(&mut r, 2, 3, 0.5);
        let mut dec = Decoder::default();
        assert_eq!(dec.series(&series(&s), "$", 2).unwrap(), s);
        let mut bad = series(&s);
        bad["terms"][2] = json!([]);
        assert!(dec.series(&bad, "$.s", 2).is_none());
        assert_eq!(dec.errors.last().unwrap().path, "$.s.terms[2]");
    }

    #[test]
    fn operator_model_is_tabulated() {
        let mut dec = Decoder::default();
        let v = json!({ "operator_model": { "aux": 1, "t": [[1, 0], [0, -1]], "v": [[1, 0], [0, 1]] } });
        let w = dec.word_map(&v, "$", 2, 3).unwrap();
        assert_eq!(w.max_degree(), 3);
        // β[1 X 1] = T.
        let one = Matrix::identity(2);
        let t = w.eval(&[one.clone(), one]).unwrap();
        assert_eq!(t, Matrix::diag(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]));
        assert_eq!(dec.word_map(&word_map(&w), "$", 2, 0).unwrap(), w);
    }

    #[test]
    fn non_finite_numbers() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NAN), json!("nan"));
        assert_eq!(num(1.5), json!(1.5));
    }
}
