//! Seeded verification suites for `ovfree verify`.
//!
//! Random instances come from ChaCha8 seeded with the job seed, so a report
//! is reproducible from `(suite, seed, dim, trunc, count)`.

use ovfree_core::analytic::{
    burgers_residual_with, scalar_semicircle_family, subordination, CauchyTransform, ScalarSemicircle, UpperHalfPoint,
};
use ovfree_core::balg::{AlgebraElement, LinearMap};
use ovfree_core::fock::{bbalpha_model_cumulants, boolean_moment_sum, boolean_transport_cumulants, gram_positivity, model_moments};
use ovfree_core::fock::{FockOperators, Flavor};
use ovfree_core::ncpart::{catalan, enumerate, mobius_nc, Family, NCPartition};
use ovfree_core::random::{random_cp_word_map, random_element, random_hermitian, random_kraus_map, random_series, rng};
use ovfree_core::transforms::{
    bb_alpha, bm_hat, boolean_pair_cumulants, convolution_power, convolve, make_distribution, phi, rb_hat_alpha,
    restrict_to_words, rm_hat, Kind,
};
use ovfree_core::words::NcPolynomial;
use ovfree_core::{Dist, DistSpec, Map, Matrix, Result, Series, C64};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Combinatorics,
    BooleanFreeBridge,
    RbSemigroup,
    BbSemigroup,
    PowerIdentity,
    PhiSemicircle,
    OracleTriangle,
    BbAlphaModel,
    Positivity,
    Transport,
    ScalarRegression,
    Subordination,
    Burgers,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Combinatorics,
        Suite::BooleanFreeBridge,
        Suite::RbSemigroup,
        Suite::BbSemigroup,
        Suite::PowerIdentity,
        Suite::PhiSemicircle,
        Suite::OracleTriangle,
        Suite::BbAlphaModel,
        Suite::Positivity,
        Suite::Transport,
        Suite::ScalarRegression,
        Suite::Subordination,
        Suite::Burgers,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Combinatorics => "combinatorics",
            Suite::BooleanFreeBridge => "boolean-free-bridge",
            Suite::RbSemigroup => "rb-semigroup",
            Suite::BbSemigroup => "bb-semigroup",
            Suite::PowerIdentity => "power-identity",
            Suite::PhiSemicircle => "phi-semicircle",
            Suite::OracleTriangle => "oracle-triangle",
            Suite::BbAlphaModel => "bbalpha-model",
            Suite::Positivity => "positivity",
            Suite::Transport => "transport",
            Suite::ScalarRegression => "scalar-regression",
            Suite::Subordination => "subordination",
            Suite::Burgers => "burgers",
        }
    }

    pub fn from_id(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.id() == s)
    }

    /// The statement the suite checks.
    pub fn anchor(self) -> &'static str {
        match self {
            Suite::Combinatorics => "|NC(n)| = C_n, |Int(n)| = 2^(n-1), #{π ≪ 1_n} = C_(n-1), μ(0_n,1_n) = (-1)^(n-1) C_(n-1)",
            Suite::BooleanFreeBridge => "BM(RB_id(F)) = RM(F)",
            Suite::RbSemigroup => "RB_α ∘ RB_β = RB_(α+β), RB_(-α) ∘ RB_α = id",
            Suite::BbSemigroup => "B_α ∘ B_β = B_(α+β), B_0 = id, R of B_id(μ) = B of μ",
            Suite::PowerIdentity => "B_α(μ)^⊎(1+α) = μ^⊞(1+α)",
            Suite::PhiSemicircle => "Φ[β ⊞ γ_α] = B_α(Φ[β])",
            Suite::OracleTriangle => "interval sum = Boolean Fock moments = BM(B); free Fock moments = RM(B)",
            Suite::BbAlphaModel => "B_α Fock model cumulants = RB_α(B_μ)",
            Suite::Positivity => "Gram PSD for μ^⊎α, B_α(μ), μ^⊞(1+α); compound Poisson root rejected",
            Suite::Transport => "B of (1+Q)Y(1+Q*) = (1+e) B_μ (1+e*) = B of μ^⊎α",
            Suite::ScalarRegression => "d = 1: B_t = (μ^⊞(1+t))^⊎(1/(1+t)), γ^⊞t has moments t^k C_k",
            Suite::Subordination => "G_γ1(ω_t(z)) = G_γt(z)",
            Suite::Burgers => "∂_t G + ∂_z G · G = 0 for the semicircle family",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Suite::Combinatorics => 0.0,
            Suite::OracleTriangle | Suite::BbAlphaModel | Suite::Positivity => 1e-9,
            Suite::ScalarRegression => 1e-12,
            Suite::Subordination => 1e-8,
            Suite::Burgers => 1e-6,
            _ => 1e-10,
        }
    }

    fn default_count(self) -> usize {
        match self {
            Suite::BooleanFreeBridge => 5,
            Suite::Combinatorics | Suite::ScalarRegression | Suite::Subordination | Suite::Burgers => 1,
            _ => 3,
        }
    }

    /// Smallest truncation the suite can run at.
    fn min_trunc(self) -> usize {
        match self {
            Suite::Positivity => 6,
            Suite::PhiSemicircle | Suite::OracleTriangle | Suite::BbAlphaModel | Suite::Transport => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub dim: usize,
    pub trunc: usize,
    pub count: usize,
    pub checks: Vec<Check>,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, error: f64) {
        self.0.push(Check { name: name.into(), error });
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `(λ, β)` with `β` a random CP word map: a positive distribution.
fn random_pair(r: &mut impl Rng, d: usize, trunc: usize) -> Result<(Matrix, ovfree_core::WordMap, Dist)> {
    let beta = random_cp_word_map::<C64>(r, d, 2, trunc.saturating_sub(2), 0.5);
    let lambda = random_hermitian(r, d, 0.8);
    let mu = Dist::from_boolean_cumulants(boolean_pair_cumulants(&lambda, &beta, trunc)?)?;
    Ok((lambda, beta, mu))
}

fn random_cp(r: &mut impl Rng, d: usize) -> Map {
    random_kraus_map(r, d, 2, 0.7)
}

pub fn run_suite(suite: Suite, seed: u64, dim: usize, trunc: usize, tol: Option<f64>, count: Option<usize>) -> Result<SuiteReport> {
    if trunc < suite.min_trunc() {
        return Err(ovfree_core::Error::Bounds(format!("suite {} needs trunc >= {}", suite.id(), suite.min_trunc())));
    }
    let tol = tol.unwrap_or(suite.default_tol());
    let count = count.unwrap_or(suite.default_count()).max(1);
    let mut r = rng(seed);
    let mut out = Checks(Vec::new());
    let (d, n) = (dim, trunc);
    let (dim, trunc) = match suite {
        Suite::Combinatorics => {
            combinatorics(&mut out)?;
            (dim, n)
        }
        Suite::BooleanFreeBridge => {
            for i in 0..count {
                let f = random_series::<C64>(&mut r, d, n, 0.7);
                out.push(format!("instance {i}"), bm_hat(&rb_hat_alpha(&LinearMap::identity(d), &f)?)?.max_error(&rm_hat(&f)?));
            }
            (dim, n)
        }
        Suite::RbSemigroup => {
            for i in 0..count {
                let f = random_series::<C64>(&mut r, d, n, 0.7);
                let (a, b) = (random_cp(&mut r, d), random_cp(&mut r, d));
                let lhs = rb_hat_alpha(&a, &rb_hat_alpha(&b, &f)?)?;
                out.push(format!("composition {i}"), lhs.max_error(&rb_hat_alpha(&a.add(&b), &f)?));
                let back = rb_hat_alpha(&a.scale(&c(-1.0)), &rb_hat_alpha(&a, &f)?)?;
                out.push(format!("inverse {i}"), back.max_error(&f));
            }
            (dim, n)
        }
        Suite::BbSemigroup => {
            for i in 0..count {
                let mu = Dist::from_boolean_cumulants(random_series::<C64>(&mut r, d, n, 0.7))?;
                let (a, b) = (random_cp(&mut r, d), random_cp(&mut r, d));
                let lhs = bb_alpha(&a, &bb_alpha(&b, &mu)?)?;
                out.push(format!("composition {i}"), lhs.moments().max_error(bb_alpha(&a.add(&b), &mu)?.moments()));
                out.push(format!("zero {i}"), bb_alpha(&LinearMap::zero(d), &mu)?.moments().max_error(mu.moments()));
                let bp = bb_alpha(&LinearMap::identity(d), &mu)?;
                out.push(format!("bijection {i}"), bp.free_cumulants().max_error(mu.boolean_cumulants()));
                let back = bb_alpha(&a.scale(&c(-1.0)), &bb_alpha(&a, &mu)?)?;
                out.push(format!("inverse {i}"), back.moments().max_error(mu.moments()));
            }
            (dim, n)
        }
        Suite::PowerIdentity => {
            // -P with P a conditional expectation onto a corner: 1 - P is singular.
            let corner = LinearMap::conjugation(&AlgebraElement::elementary(d, 0, 0));
            let mut alphas: Vec<(String, Map)> =
                (0..count).map(|i| (format!("random {i}"), random_cp(&mut r, d))).collect();
            alphas.push(("singular 1+α".into(), corner.scale(&c(-1.0))));
            alphas.push(("α = -1".into(), LinearMap::scalar(d, c(-1.0))));
            let mu = Dist::from_boolean_cumulants(random_series::<C64>(&mut r, d, n, 0.7))?;
            for (name, a) in alphas {
                let one_plus = LinearMap::identity(d).add(&a);
                let lhs = convolution_power(&bb_alpha(&a, &mu)?, &one_plus, Kind::Boolean)?;
                let rhs = convolution_power(&mu, &one_plus, Kind::Free)?;
                out.push(name, lhs.moments().max_error(rhs.moments()));
            }
            (dim, n)
        }
        Suite::PhiSemicircle => {
            let k = n - 2;
            for i in 0..count {
                let beta = Dist::from_moments(random_series::<C64>(&mut r, d, k, 1.0));
                let a = random_cp(&mut r, d);
                let gamma = make_distribution(&DistSpec::Semicircular { eta: a.clone(), center: None }, k)?;
                let nu = convolve(&beta, &gamma, Kind::Free)?;
                let lhs = phi(&restrict_to_words(&nu, k)?, n)?;
                let rhs = bb_alpha(&a, &phi(&restrict_to_words(&beta, k)?, n)?)?;
                out.push(format!("instance {i}"), lhs.moments().max_error(rhs.moments()));
            }
            (dim, n)
        }
        Suite::OracleTriangle => {
            for i in 0..count {
                let (lambda, beta, mu) = random_pair(&mut r, d, n)?;
                let boolean = FockOperators::new(Flavor::Boolean, lambda.clone(), beta.clone(), n)?;
                let free = FockOperators::new(Flavor::Free, lambda.clone(), beta.clone(), n)?;
                let free_moments = rm_hat(mu.boolean_cumulants())?;
                let (mut e_sum, mut e_model, mut e_free) = (0.0f64, 0.0f64, 0.0f64);
                for m in 1..=n {
                    let args: Vec<Matrix> = (1..m).map(|_| random_element(&mut r, d, 1.0)).collect();
                    let sum = boolean_moment_sum(&lambda, &beta, m, &args)?;
                    let model = model_moments(&boolean, m, &args)?;
                    let rebuilt = mu.moments().term(m)?.eval(&args)?;
                    e_sum = e_sum.max(sum.max_abs_diff(&model));
                    e_model = e_model.max(model.max_abs_diff(&rebuilt));
                    e_free = e_free.max(model_moments(&free, m, &args)?.max_abs_diff(&free_moments.term(m)?.eval(&args)?));
                }
                out.push(format!("sum vs Boolean model {i}"), e_sum);
                out.push(format!("Boolean model vs BM {i}"), e_model);
                out.push(format!("free model vs RM {i}"), e_free);
            }
            (dim, n)
        }
        Suite::BbAlphaModel => {
            for i in 0..count {
                let (lambda, beta, mu) = random_pair(&mut r, d, n)?;
                let a = random_cp(&mut r, d);
                let model = bbalpha_model_cumulants(&lambda, &beta, &a, n)?;
                out.push(format!("instance {i}"), model.max_error(&rb_hat_alpha(&a, mu.boolean_cumulants())?));
            }
            (dim, n)
        }
        Suite::Positivity => {
            for i in 0..count {
                let (_, _, mu) = random_pair(&mut r, d, n)?;
                let a = random_cp(&mut r, d);
                let above = LinearMap::identity(d).add(&a);
                let cases = [
                    ("Boolean power", convolution_power(&mu, &a, Kind::Boolean)?),
                    ("B_α", bb_alpha(&a, &mu)?),
                    ("free power 1+α", convolution_power(&mu, &above, Kind::Free)?),
                ];
                for (name, nu) in cases {
                    let rep = gram_positivity(&nu, 2, tol)?;
                    out.push(format!("{name} {i}"), (-rep.min_eigenvalue).max(0.0));
                }
            }
            let (value, rejected) = counterexample()?;
            out.push("counterexample value", value);
            out.push("counterexample rejected", if rejected { 0.0 } else { 1.0 });
            (dim, n)
        }
        Suite::Transport => {
            for i in 0..count {
                let (_, _, mu) = random_pair(&mut r, d, n)?;
                let e = random_element(&mut r, d, 0.5);
                let one_e = &AlgebraElement::identity(d) + &e;
                let alpha = LinearMap::conjugation(&one_e);
                let transport = boolean_transport_cumulants(&mu, &e, n)?;
                let conjugated = mu.boolean_cumulants().compose_map(&alpha)?;
                let power = convolution_power(&mu, &alpha, Kind::Boolean)?;
                out.push(format!("transport vs conjugated {i}"), transport.max_error(&conjugated));
                out.push(format!("transport vs Boolean power {i}"), transport.max_error(power.boolean_cumulants()));
            }
            (dim, n)
        }
        Suite::ScalarRegression => {
            scalar_regression(&mut out, &mut r, n)?;
            (1, n)
        }
        Suite::Subordination => {
            let gamma = ScalarSemicircle { variance: 1.0, center: 0.0 };
            for t in [1.5, 2.0, 3.0] {
                for (re, im) in [(0.0, 2.0), (0.0, 3.0), (1.0, 3.0)] {
                    let z = UpperHalfPoint::from_matrix(Matrix::scalar(1, C64::new(re, im)))?;
                    let s = subordination(&gamma, &LinearMap::scalar(1, c(t)), &z, 1e-13, 200)?;
                    let lhs = gamma.cauchy(&s.omega)?.0;
                    let rhs = ScalarSemicircle { variance: t, center: 0.0 }.eval(C64::new(re, im))?;
                    out.push(format!("t={t} z={re}+{im}i"), (*lhs.get(0, 0) - rhs).norm());
                }
            }
            (1, n)
        }
        Suite::Burgers => {
            let one = LinearMap::scalar(1, c(1.0));
            let z = UpperHalfPoint::from_matrix(Matrix::scalar(1, C64::new(0.0, 3.0)))?;
            for base in [0.0, 1.0] {
                let family = scalar_semicircle_family(base, 0.0);
                let rep = burgers_residual_with(&family, &one, &one, &z, 1e-4, 1e-4)?;
                out.push(format!("variance {base}"), rep.residual);
                // Second order: halving the step should cut the residual by about 4.
                let decay = if rep.ratio > 3.0 && rep.ratio < 5.0 { 0.0 } else { 1.0 };
                out.push(format!("variance {base} step decay"), decay);
            }
            (1, n)
        }
    };
    let checks = out.0;
    let max_error = checks.iter().map(|c| c.error).fold(0.0, f64::max);
    let pass = checks.iter().all(|c| c.error <= tol);
    Ok(SuiteReport { suite, dim, trunc, count, checks, max_error, tol, pass })
}

fn combinatorics(out: &mut Checks) -> Result<()> {
    let top = 8;
    let mut bad = [0.0f64; 4];
    for k in 1..=top {
        let nc = enumerate(k, Family::NC)?;
        if nc.len() as u64 != catalan(k) {
            bad[0] += 1.0;
        }
        if enumerate(k, Family::INT)?.len() as u64 != 1 << (k - 1) {
            bad[1] += 1.0;
        }
        if enumerate(k, Family::LL_TOP)?.len() as u64 != catalan(k - 1) {
            bad[2] += 1.0;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        if mobius_nc(&NCPartition::zero(k), &NCPartition::one(k))? != sign * catalan(k - 1) as i64 {
            bad[3] += 1.0;
        }
    }
    out.push("NC counts", bad[0]);
    out.push("interval counts", bad[1]);
    out.push("single outer block counts", bad[2]);
    out.push("Möbius values", bad[3]);
    Ok(())
}

/// `μ` with moments `M^[n](b_1, ...) = flip(b_1 ⋯ b_(n-1))`; returns the
/// distance of `μ[(1 - bX)*(1 - bX)]` from `diag(-1, 2)` and whether Gram
/// positivity rejects it.
pub fn counterexample() -> Result<(f64, bool)> {
    let flip = AlgebraElement::from_rows(vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]])?;
    let spec = DistSpec::CompoundPoissonRoot {
        nu: Box::new(DistSpec::PointMass { lambda: AlgebraElement::identity(2) }),
        alpha: LinearMap::conjugation(&flip),
        t: c(1.0),
    };
    let mu = make_distribution(&spec, 6)?;
    let b = AlgebraElement::diag(vec![c(1.0), c(0.0)]);
    let p = NcPolynomial::constant(AlgebraElement::identity(2)).sub(&NcPolynomial::x(2).left_mul(&b));
    let value = mu.apply_polynomial(&p.adjoint().mul(&p))?;
    let err = value.max_abs_diff(&AlgebraElement::diag(vec![c(-1.0), c(2.0)]));
    Ok((err, !gram_positivity(&mu, 2, 1e-9)?.pass))
}

fn scalar_values(s: &Series) -> Vec<C64> {
    s.terms().iter().map(|t| *t.eval(&vec![Matrix::identity(1); t.order() - 1]).expect("arity").get(0, 0)).collect()
}

fn scalar_regression(out: &mut Checks, r: &mut impl Rng, n: usize) -> Result<()> {
    let (_, _, mu) = random_pair(r, 1, n)?;
    for t in [0.5, 2.0] {
        let bt = bb_alpha(&LinearMap::scalar(1, c(t)), &mu)?;
        let up = convolution_power(&mu, &LinearMap::scalar(1, c(1.0 + t)), Kind::Free)?;
        let down = convolution_power(&up, &LinearMap::scalar(1, c(1.0 / (1.0 + t))), Kind::Boolean)?;
        out.push(format!("B_t at t={t}"), bt.moments().max_error(down.moments()));
        let gamma = make_distribution(&DistSpec::Semicircular { eta: LinearMap::identity(1), center: None }, n)?;
        let gt = convolution_power(&gamma, &LinearMap::scalar(1, c(t)), Kind::Free)?;
        let err = scalar_values(gt.moments())
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let m = i + 1;
                let want = if m % 2 == 0 { t.powi(m as i32 / 2) * catalan(m / 2) as f64 } else { 0.0 };
                (v - c(want)).norm()
            })
            .fold(0.0, f64::max);
        out.push(format!("semicircle power t={t}"), err);
    }
    Ok(())
}
