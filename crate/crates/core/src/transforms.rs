//! Moment and cumulant transforms, distributions and the operations built on
//! them: convolutions, convolution powers, `𝔹_α` and `Φ`.

use std::sync::OnceLock;

use crate::balg::{AlgebraElement, LinearMap, MultilinearFunctional, PolyLinearMap};
use crate::error::{argument, bounds, Result};
use crate::ncpart::{enumerate, Coloring, Family, NCPartition};
use crate::scalar::Scalar;
use crate::series::{BSeries, NestPlan};
use crate::words::NcPolynomial;

/// Which cumulants: free (non-crossing) or Boolean (interval).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Free,
    Boolean,
}

fn plans(n: usize, family: Family, colored: bool) -> Result<Vec<NestPlan>> {
    enumerate(n, family)?
        .iter()
        .map(|pi| {
            if colored {
                Ok(NestPlan::new(pi, Some(&Coloring::outer(pi)?)))
            } else {
                Ok(NestPlan::new(pi, None))
            }
        })
        .collect()
}

/// `Σ_plans F^[π]` as an order-n functional, skipping plans that read a zero
/// term.
fn summed_term<S: Scalar>(series: &[&BSeries<S>], plans: &[NestPlan], n: usize) -> Result<MultilinearFunctional<S>> {
    let live: Vec<&NestPlan> = plans.iter().filter(|p| !p.hits_zero(series)).collect();
    if live.is_empty() {
        return Ok(MultilinearFunctional::zero(series[0].dim(), n));
    }
    MultilinearFunctional::tabulate(series[0].dim(), n, |args| {
        let mut acc = AlgebraElement::zeros(series[0].dim());
        for p in &live {
            acc.add_assign(&p.eval_raw(series, args));
        }
        acc
    })
}

fn forward<S: Scalar>(f: &BSeries<S>, family: Family) -> Result<BSeries<S>> {
    let terms = (1..=f.trunc())
        .map(|n| summed_term(&[f], &plans(n, family, false)?, n))
        .collect::<Result<Vec<_>>>()?;
    BSeries::from_terms(terms)
}

/// Triangular inversion: `F^[n] = G^[n] - Σ_{π ≠ 1_n} F^[π]`.
fn inverse<S: Scalar>(g: &BSeries<S>, family: Family) -> Result<BSeries<S>> {
    let d = g.dim();
    let mut terms: Vec<MultilinearFunctional<S>> = Vec::with_capacity(g.trunc());
    for n in 1..=g.trunc() {
        let one = NCPartition::one(n);
        let lower: Vec<NestPlan> = plans(n, family, false)?.into_iter().filter(|p| p.partition() != &one).collect();
        let mut partial = terms.clone();
        partial.push(MultilinearFunctional::zero(d, n));
        let partial = BSeries::from_terms(partial)?;
        let rest = summed_term(&[&partial], &lower, n)?;
        terms.push(MultilinearFunctional::lincomb(&S::one(), g.term(n)?, &(-S::one()), &rest));
    }
    BSeries::from_terms(terms)
}

/// Moments from free cumulants: sum over NC(n).
pub fn rm_hat<S: Scalar>(f: &BSeries<S>) -> Result<BSeries<S>> {
    forward(f, Family::NC)
}

pub fn rm_hat_inv<S: Scalar>(g: &BSeries<S>) -> Result<BSeries<S>> {
    inverse(g, Family::NC)
}

/// Moments from Boolean cumulants: sum over Int(n).
pub fn bm_hat<S: Scalar>(f: &BSeries<S>) -> Result<BSeries<S>> {
    forward(f, Family::INT)
}

pub fn bm_hat_inv<S: Scalar>(g: &BSeries<S>) -> Result<BSeries<S>> {
    inverse(g, Family::INT)
}

/// `G^[n] = Σ_{π ≪ 1_n} (F, α∘F)^[π, o_π]`: the outer block reads `F`,
/// every inner block reads `α∘F`.
pub fn rb_hat_alpha<S: Scalar>(alpha: &LinearMap<S>, f: &BSeries<S>) -> Result<BSeries<S>> {
    let af = f.compose_map(alpha)?;
    let terms = (1..=f.trunc())
        .map(|n| summed_term(&[f, &af], &plans(n, Family::LL_TOP, true)?, n))
        .collect::<Result<Vec<_>>>()?;
    BSeries::from_terms(terms)
}

/// A distribution, held as whichever of its moment, free cumulant or
/// Boolean cumulant series it was built from; the others are computed on
/// first use.
#[derive(Clone, Debug)]
pub struct Distribution<S> {
    dim: usize,
    trunc: usize,
    moments: OnceLock<BSeries<S>>,
    free: OnceLock<BSeries<S>>,
    boolean: OnceLock<BSeries<S>>,
}

impl<S: Scalar> Distribution<S> {
    fn empty(s: &BSeries<S>) -> Self {
        Distribution {
            dim: s.dim(),
            trunc: s.trunc(),
            moments: OnceLock::new(),
            free: OnceLock::new(),
            boolean: OnceLock::new(),
        }
    }

    pub fn from_moments(moments: BSeries<S>) -> Self {
        let d = Self::empty(&moments);
        let _ = d.moments.set(moments);
        d
    }

    pub fn from_free_cumulants(r: BSeries<S>) -> Result<Self> {
        let d = Self::empty(&r);
        let _ = d.free.set(r);
        Ok(d)
    }

    pub fn from_boolean_cumulants(b: BSeries<S>) -> Result<Self> {
        let d = Self::empty(&b);
        let _ = d.boolean.set(b);
        Ok(d)
    }

    pub fn from_cumulants(kind: Kind, c: BSeries<S>) -> Result<Self> {
        match kind {
            Kind::Free => Self::from_free_cumulants(c),
            Kind::Boolean => Self::from_boolean_cumulants(c),
        }
    }

    pub fn moments(&self) -> &BSeries<S> {
        self.moments.get_or_init(|| match (self.free.get(), self.boolean.get()) {
            (Some(r), _) => rm_hat(r).expect("valid cumulant series"),
            (None, Some(b)) => bm_hat(b).expect("valid cumulant series"),
            (None, None) => unreachable!("a distribution holds at least one series"),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn free_cumulants(&self) -> &BSeries<S> {
        self.free.get_or_init(|| rm_hat_inv(self.moments()).expect("valid moment series"))
    }

    pub fn boolean_cumulants(&self) -> &BSeries<S> {
        self.boolean.get_or_init(|| bm_hat_inv(self.moments()).expect("valid moment series"))
    }

    pub fn cumulants(&self, kind: Kind) -> &BSeries<S> {
        match kind {
            Kind::Free => self.free_cumulants(),
            Kind::Boolean => self.boolean_cumulants(),
        }
    }

    /// The series already at hand, cheapest first: free cumulants, Boolean
    /// cumulants, moments.
    pub fn known(&self) -> (Option<&BSeries<S>>, Option<&BSeries<S>>, Option<&BSeries<S>>) {
        (self.free.get(), self.boolean.get(), self.moments.get())
    }

    pub fn truncate(&self, trunc: usize) -> Result<Self> {
        match self.known() {
            (Some(r), _, _) => Self::from_free_cumulants(r.truncate(trunc)?),
            (None, Some(b), _) => Self::from_boolean_cumulants(b.truncate(trunc)?),
            _ => Ok(Self::from_moments(self.moments().truncate(trunc)?)),
        }
    }

    /// `μ[b_0 X b_1 ... X b_k] = b_0 M^[k](b_1, ..., b_{k-1}) b_k`.
    pub fn apply_word(&self, word: &[AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
        match word.len() {
            0 => argument("empty word"),
            1 => Ok(word[0].clone()),
            k => {
                let m = self.moments().term(k - 1)?.eval(&word[1..k - 1])?;
                Ok(word[0].matmul(&m).matmul(&word[k - 1]))
            }
        }
    }

    pub fn apply_polynomial(&self, p: &NcPolynomial<S>) -> Result<AlgebraElement<S>> {
        let mut acc = AlgebraElement::zeros(p.dim());
        for w in p.words() {
            acc.add_assign(&self.apply_word(w.coeffs())?);
        }
        Ok(acc)
    }
}

pub fn cumulants<S: Scalar>(mu: &Distribution<S>, kind: Kind) -> BSeries<S> {
    mu.cumulants(kind).clone()
}

/// `μ ⊞ ν` or `μ ⊎ ν`: the chosen cumulants add.
pub fn convolve<S: Scalar>(mu: &Distribution<S>, nu: &Distribution<S>, kind: Kind) -> Result<Distribution<S>> {
    Distribution::from_cumulants(kind, mu.cumulants(kind).add(nu.cumulants(kind))?)
}

/// `μ^{⊞α}` or `μ^{⊎α}`: the chosen cumulants composed with `α`.
pub fn convolution_power<S: Scalar>(mu: &Distribution<S>, alpha: &LinearMap<S>, kind: Kind) -> Result<Distribution<S>> {
    Distribution::from_cumulants(kind, mu.cumulants(kind).compose_map(alpha)?)
}

/// `𝔹_α(μ)`, defined by `R_{𝔹_α(μ)} = RB̂_α(R_μ)`.
pub fn bb_alpha<S: Scalar>(alpha: &LinearMap<S>, mu: &Distribution<S>) -> Result<Distribution<S>> {
    Distribution::from_free_cumulants(rb_hat_alpha(alpha, mu.free_cumulants())?)
}

/// `𝔹_α(μ)` through Boolean cumulants, `B_{𝔹_α(μ)} = RB̂_α(B_μ)`.
pub fn bb_alpha_via_boolean<S: Scalar>(alpha: &LinearMap<S>, mu: &Distribution<S>) -> Result<Distribution<S>> {
    Distribution::from_boolean_cumulants(rb_hat_alpha(alpha, mu.boolean_cumulants())?)
}

/// `Φ[β]`: Boolean cumulants `B^[1] = 0`, `B^[n](b_1..b_{n-1}) = β[b_1 X ... X b_{n-1}]`.
pub fn phi<S: Scalar>(beta: &PolyLinearMap<S>, trunc: usize) -> Result<Distribution<S>> {
    if trunc >= 2 && beta.max_degree() + 2 < trunc {
        return bounds(format!("Φ at order {trunc} needs β up to degree {}, have {}", trunc - 2, beta.max_degree()));
    }
    let d = beta.dim();
    let mut terms = vec![MultilinearFunctional::zero(d, 1)];
    for n in 2..=trunc {
        let layer = beta.layer(n - 2)?;
        terms.push(MultilinearFunctional::from_data(d, n, layer.data().to_vec())?);
    }
    Distribution::from_boolean_cumulants(BSeries::from_terms(terms)?)
}

/// `μ` restricted to words of degree `≤ max_degree`, as a map on `B<X>`.
pub fn restrict_to_words<S: Scalar>(mu: &Distribution<S>, max_degree: usize) -> Result<PolyLinearMap<S>> {
    if max_degree > mu.trunc() {
        return bounds(format!("words of degree {max_degree} need moments to order {max_degree}"));
    }
    PolyLinearMap::tabulate(mu.dim(), max_degree, |_, w| mu.apply_word(w).expect("within truncation"))
}

/// Named distributions.
#[derive(Clone, Debug, PartialEq)]
pub enum DistributionSpec<S> {
    PointMass { lambda: AlgebraElement<S> },
    Semicircular { eta: LinearMap<S>, center: Option<AlgebraElement<S>> },
    CompoundPoissonFree { nu: Box<DistributionSpec<S>>, alpha: LinearMap<S> },
    CompoundPoissonBoolean { nu: Box<DistributionSpec<S>>, alpha: LinearMap<S> },
    /// Moments `(1/t) α∘M_ν`: the free-cumulant series of the compound
    /// Poisson law at rate `1/t`, read as a moment series.
    CompoundPoissonRoot { nu: Box<DistributionSpec<S>>, alpha: LinearMap<S>, t: S },
    BooleanPair { lambda: AlgebraElement<S>, beta: PolyLinearMap<S> },
    RawMoments(BSeries<S>),
    RawFreeCumulants(BSeries<S>),
    RawBooleanCumulants(BSeries<S>),
}

impl<S: Scalar> DistributionSpec<S> {
    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::PointMass { lambda } | DistributionSpec::BooleanPair { lambda, .. } => lambda.dim(),
            DistributionSpec::Semicircular { eta, .. } => eta.dim(),
            DistributionSpec::CompoundPoissonFree { alpha, .. }
            | DistributionSpec::CompoundPoissonBoolean { alpha, .. }
            | DistributionSpec::CompoundPoissonRoot { alpha, .. } => alpha.dim(),
            DistributionSpec::RawMoments(s) | DistributionSpec::RawFreeCumulants(s) | DistributionSpec::RawBooleanCumulants(s) => {
                s.dim()
            }
        }
    }
}

/// Moment series of `δ_λ`: `λ b_1 λ ... b_{n-1} λ`.
pub fn point_mass_moments<S: Scalar>(lambda: &AlgebraElement<S>, trunc: usize) -> Result<BSeries<S>> {
    BSeries::from_fn(lambda.dim(), trunc, |_, args| {
        let mut acc = lambda.clone();
        for b in args {
            acc = acc.matmul(b).matmul(lambda);
        }
        acc
    })
}

/// Free cumulants `(λ_0, η, 0, ...)` of the semicircular law.
pub fn semicircular_cumulants<S: Scalar>(
    eta: &LinearMap<S>,
    center: Option<&AlgebraElement<S>>,
    trunc: usize,
) -> Result<BSeries<S>> {
    let d = eta.dim();
    BSeries::from_fn(d, trunc, |n, args| match n {
        1 => center.cloned().unwrap_or_else(|| AlgebraElement::zeros(d)),
        2 => eta.apply(&args[0]),
        _ => AlgebraElement::zeros(d),
    })
}

pub fn make_distribution<S: Scalar>(spec: &DistributionSpec<S>, trunc: usize) -> Result<Distribution<S>> {
    match spec {
        DistributionSpec::PointMass { lambda } => {
            // `δ_λ` has free cumulants `(λ, 0, 0, ...)`.
            Distribution::from_free_cumulants(BSeries::from_fn(lambda.dim(), trunc, |n, _| {
                if n == 1 {
                    lambda.clone()
                } else {
                    AlgebraElement::zeros(lambda.dim())
                }
            })?)
        }
        DistributionSpec::Semicircular { eta, center } => {
            if let Some(c) = center {
                if c.dim() != eta.dim() {
                    return argument("semicircular centre and variance of different sizes");
                }
            }
            Distribution::from_free_cumulants(semicircular_cumulants(eta, center.as_ref(), trunc)?)
        }
        DistributionSpec::CompoundPoissonFree { nu, alpha } => {
            let nu = make_distribution(nu, trunc)?;
            Distribution::from_free_cumulants(nu.moments().compose_map(alpha)?)
        }
        DistributionSpec::CompoundPoissonBoolean { nu, alpha } => {
            let nu = make_distribution(nu, trunc)?;
            Distribution::from_boolean_cumulants(nu.moments().compose_map(alpha)?)
        }
        DistributionSpec::CompoundPoissonRoot { nu, alpha, t } => {
            if t.is_zero() {
                return argument("rate parameter t must be nonzero");
            }
            let nu = make_distribution(nu, trunc)?;
            let inv = S::one() / t.clone();
            Ok(Distribution::from_moments(nu.moments().compose_map(&alpha.scale(&inv))?))
        }
        DistributionSpec::BooleanPair { lambda, beta } => {
            if lambda.dim() != beta.dim() {
                return argument("λ and β on different matrix sizes");
            }
            if trunc >= 2 && beta.max_degree() + 2 < trunc {
                return bounds(format!("order {trunc} needs β up to degree {}", trunc - 2));
            }
            Distribution::from_boolean_cumulants(boolean_pair_cumulants(lambda, beta, trunc)?)
        }
        DistributionSpec::RawMoments(s) => Ok(Distribution::from_moments(s.truncate(trunc)?)),
        DistributionSpec::RawFreeCumulants(s) => Distribution::from_free_cumulants(s.truncate(trunc)?),
        DistributionSpec::RawBooleanCumulants(s) => Distribution::from_boolean_cumulants(s.truncate(trunc)?),
    }
}

/// `B^[1] = λ`, `B^[n](b_1..b_{n-1}) = β[b_1 X ... X b_{n-1}]`.
pub fn boolean_pair_cumulants<S: Scalar>(
    lambda: &AlgebraElement<S>,
    beta: &PolyLinearMap<S>,
    trunc: usize,
) -> Result<BSeries<S>> {
    let d = lambda.dim();
    let mut terms = vec![MultilinearFunctional::constant(lambda.clone())];
    for n in 2..=trunc {
        terms.push(MultilinearFunctional::from_data(d, n, beta.layer(n - 2)?.data().to_vec())?);
    }
    BSeries::from_terms(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpart::{catalan, mobius_nc};
    use crate::random::{random_element, random_kraus_map, random_linear_map, random_series, rng};
    use crate::series::nested_eval;
    use num_complex::Complex;
    use num_rational::BigRational;

    type C64 = Complex<f64>;
    type M = AlgebraElement<C64>;
    const TOL: f64 = 1e-10;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn scalar_series(values: &[f64]) -> BSeries<C64> {
        BSeries::from_fn(1, values.len(), |n, a| AlgebraElement::product(1, a).scale(&c(values[n - 1]))).unwrap()
    }

    fn scalar_values(f: &BSeries<C64>) -> Vec<C64> {
        f.terms().iter().map(|t| t.data()[0].entries()[0]).collect()
    }

    fn close(a: &[C64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - c(*y)).norm() <= tol)
    }

    fn flip() -> LinearMap<C64> {
        LinearMap::conjugation(&M::from_rows(vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap())
    }

    #[test]
    fn rm_hat_examples() {
        let g = rm_hat(&scalar_series(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        let want: Vec<f64> = (1..=8).map(|n| if n % 2 == 0 { catalan(n / 2) as f64 } else { 0.0 }).collect();
        assert!(close(&scalar_values(&g), &want, 1e-12));
        let lam = random_element::<C64>(&mut rng(1), 2, 1.0);
        let mut only1 = BSeries::zero(2, 5).unwrap();
        only1 = only1.with_term(1, MultilinearFunctional::constant(lam.clone())).unwrap();
        assert!(rm_hat(&only1).unwrap().max_error(&point_mass_moments(&lam, 5).unwrap()) < TOL);
        assert!(rm_hat(&BSeries::<C64>::zero(2, 4).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn rm_hat_inv_examples() {
        let mut r = rng(2);
        for d in 1..=2 {
            let f = random_series::<C64>(&mut r, d, 6, 1.0);
            assert!(rm_hat_inv(&rm_hat(&f).unwrap()).unwrap().max_error(&f) < TOL);
        }
        let k = rm_hat_inv(&scalar_series(&[0.0, 1.0, 0.0, 2.0, 0.0, 5.0])).unwrap();
        assert!(close(&scalar_values(&k), &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 1e-12));
    }

    /// `Σ_π Moeb(π, 1_n) G^[π]`.
    #[test]
    fn rm_hat_inv_matches_mobius_sum() {
        let g = random_series::<C64>(&mut rng(3), 2, 5, 1.0);
        let f = rm_hat_inv(&g).unwrap();
        for n in 1..=5 {
            let one = NCPartition::one(n);
            let want = MultilinearFunctional::tabulate(2, n, |a| {
                let mut acc = M::zeros(2);
                for pi in enumerate(n, Family::NC).unwrap() {
                    let m = mobius_nc(&pi, &one).unwrap() as f64;
                    acc.axpy(&c(m), &nested_eval(&[&g], &pi, None, a).unwrap());
                }
                acc
            })
            .unwrap();
            assert!(f.term(n).unwrap().max_abs_diff(&want) < 1e-9 * (1.0 + want.max_abs()));
        }
    }

    #[test]
    fn bm_hat_examples() {
        let g = bm_hat(&scalar_series(&[1.0; 7])).unwrap();
        let want: Vec<f64> = (1..=7).map(|n| (1u64 << (n - 1)) as f64).collect();
        assert!(close(&scalar_values(&g), &want, 1e-12));
        let g = bm_hat(&scalar_series(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(close(&scalar_values(&g), &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0], 1e-12));
        let f = random_series::<C64>(&mut rng(4), 2, 6, 1.0);
        assert!(bm_hat_inv(&bm_hat(&f).unwrap()).unwrap().max_error(&f) < TOL);
    }

    /// `Σ_{π ∈ Int(n)} (-1)^{|π|-1} G^[π]`.
    #[test]
    fn bm_hat_inv_matches_signed_sum() {
        let g = random_series::<C64>(&mut rng(5), 2, 6, 1.0);
        let f = bm_hat_inv(&g).unwrap();
        for n in 1..=6 {
            let want = MultilinearFunctional::tabulate(2, n, |a| {
                let mut acc = M::zeros(2);
                for pi in enumerate(n, Family::INT).unwrap() {
                    let s = if pi.num_blocks() % 2 == 1 { 1.0 } else { -1.0 };
                    acc.axpy(&c(s), &nested_eval(&[&g], &pi, None, a).unwrap());
                }
                acc
            })
            .unwrap();
            assert!(f.term(n).unwrap().max_abs_diff(&want) < 1e-9 * (1.0 + want.max_abs()));
        }
    }

    #[test]
    fn rb_hat_alpha_examples() {
        let mut r = rng(6);
        let f = random_series::<C64>(&mut r, 2, 5, 1.0);
        let alpha = random_kraus_map::<C64>(&mut r, 2, 2, 1.0);
        let g = rb_hat_alpha(&alpha, &f).unwrap();
        let b: Vec<M> = (0..2).map(|_| random_element(&mut r, 2, 1.0)).collect();
        let af1 = alpha.apply(&f.term(1).unwrap().data()[0]);
        let want = &f.term(3).unwrap().eval(&b).unwrap() + &f.term(2).unwrap().eval(&[&(&b[0] * &af1) * &b[1]]).unwrap();
        assert!(g.term(3).unwrap().eval(&b).unwrap().max_abs_diff(&want) < 1e-12);
        assert!(rb_hat_alpha(&LinearMap::zero(2), &f).unwrap().max_error(&f) < 1e-14);
        let lhs = rb_hat_alpha(&alpha, &f).unwrap().compose_map(&alpha).unwrap();
        let rhs = rb_hat_alpha(&LinearMap::identity(2), &f.compose_map(&alpha).unwrap()).unwrap();
        assert!(lhs.max_error(&rhs) < TOL);
    }

    #[test]
    fn boolean_of_rb_is_moments() {
        let mut r = rng(7);
        for _ in 0..3 {
            let f = random_series::<C64>(&mut r, 2, 6, 1.0);
            let lhs = bm_hat(&rb_hat_alpha(&LinearMap::identity(2), &f).unwrap()).unwrap();
            assert!(lhs.max_error(&rm_hat(&f).unwrap()) < TOL);
        }
    }

    #[test]
    fn rb_semigroup_and_inverse() {
        let mut r = rng(8);
        let f = random_series::<C64>(&mut r, 2, 6, 1.0);
        let a = random_kraus_map::<C64>(&mut r, 2, 2, 1.0);
        let b = random_kraus_map::<C64>(&mut r, 2, 2, 1.0);
        assert!(a.compose(&b).max_abs_diff(&b.compose(&a)) > 1e-3);
        let lhs = rb_hat_alpha(&a, &rb_hat_alpha(&b, &f).unwrap()).unwrap();
        let rhs = rb_hat_alpha(&a.add(&b), &f).unwrap();
        assert!(lhs.max_error(&rhs) < TOL);
        let back = rb_hat_alpha(&a.scale(&c(-1.0)), &rb_hat_alpha(&a, &f).unwrap()).unwrap();
        assert!(back.max_error(&f) < TOL);
        let id = LinearMap::identity(2);
        let lhs = rb_hat_alpha(&id.scale(&c(-1.0)), &f).unwrap();
        let rhs = rb_hat_alpha(&id, &f.neg()).unwrap().neg();
        assert!(lhs.max_error(&rhs) < TOL);
    }

    #[test]
    fn exact_rational_identities() {
        type Q = Complex<BigRational>;
        let mut r = rng(9);
        let f = random_series::<Q>(&mut r, 2, 4, 1.0);
        let a = random_kraus_map::<Q>(&mut r, 2, 1, 1.0);
        let b = random_linear_map::<Q>(&mut r, 2, 1.0);
        let id = LinearMap::<Q>::identity(2);
        assert_eq!(bm_hat(&rb_hat_alpha(&id, &f).unwrap()).unwrap(), rm_hat(&f).unwrap());
        assert_eq!(
            rb_hat_alpha(&a, &rb_hat_alpha(&b, &f).unwrap()).unwrap(),
            rb_hat_alpha(&a.add(&b), &f).unwrap()
        );
        assert_eq!(rm_hat_inv(&rm_hat(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn cumulant_examples() {
        let lam = random_element::<C64>(&mut rng(10), 2, 1.0);
        let dl = make_distribution(&DistributionSpec::PointMass { lambda: lam.clone() }, 5).unwrap();
        let r = dl.free_cumulants();
        assert!(r.term(1).unwrap().data()[0].max_abs_diff(&lam) < 1e-14);
        assert!(rm_hat(r).unwrap().max_error(dl.moments()) < TOL);
        let eta = random_kraus_map::<C64>(&mut rng(11), 2, 2, 1.0);
        let g = make_distribution(&DistributionSpec::Semicircular { eta: eta.clone(), center: None }, 6).unwrap();
        let fresh = Distribution::from_moments(g.moments().clone());
        assert!(fresh.free_cumulants().max_error(&semicircular_cumulants(&eta, None, 6).unwrap()) < TOL);
        let beta = crate::random::random_cp_word_map::<C64>(&mut rng(12), 2, 2, 4, 0.7);
        let mu = make_distribution(&DistributionSpec::BooleanPair { lambda: lam.clone(), beta: beta.clone() }, 6).unwrap();
        let fresh = Distribution::from_moments(mu.moments().clone());
        let b = fresh.boolean_cumulants();
        assert!(b.term(1).unwrap().data()[0].max_abs_diff(&lam) < 1e-12);
        let mut r = rng(13);
        let args: Vec<M> = (0..3).map(|_| random_element(&mut r, 2, 1.0)).collect();
        let want = beta.eval(&args).unwrap();
        assert!(b.term(4).unwrap().eval(&args).unwrap().max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn convolution_examples() {
        let dp = |x: f64| make_distribution(&DistributionSpec::PointMass { lambda: M::scalar(1, c(x)) }, 6).unwrap();
        let s = convolve(&dp(0.5), &dp(-1.25), Kind::Free).unwrap();
        assert!(s.moments().max_error(dp(-0.75).moments()) < TOL);
        let mut r = rng(14);
        let eta = random_kraus_map::<C64>(&mut r, 2, 2, 1.0);
        let theta = random_kraus_map::<C64>(&mut r, 2, 1, 1.0);
        let semi = |e: &LinearMap<C64>| make_distribution(&DistributionSpec::Semicircular { eta: e.clone(), center: None }, 6).unwrap();
        let s = convolve(&semi(&eta), &semi(&theta), Kind::Free).unwrap();
        assert!(s.moments().max_error(semi(&eta.add(&theta)).moments()) < TOL);
        let mu = Distribution::from_moments(random_series::<C64>(&mut r, 2, 5, 1.0));
        let d0 = make_distribution(&DistributionSpec::PointMass { lambda: M::zeros(2) }, 5).unwrap();
        let u = convolve(&mu, &d0, Kind::Boolean).unwrap();
        let want = mu.boolean_cumulants().add(&bm_hat_inv(d0.moments()).unwrap()).unwrap();
        assert!(Distribution::from_moments(u.moments().clone()).boolean_cumulants().max_error(&want) < TOL);
    }

    #[test]
    fn power_examples() {
        let mut r = rng(15);
        let lam = random_element::<C64>(&mut r, 2, 1.0);
        let alpha = random_kraus_map::<C64>(&mut r, 2, 2, 1.0);
        let dl = make_distribution(&DistributionSpec::PointMass { lambda: lam.clone() }, 6).unwrap();
        let want = point_mass_moments(&alpha.apply(&lam), 6).unwrap();
        for kind in [Kind::Free, Kind::Boolean] {
            assert!(convolution_power(&dl, &alpha, kind).unwrap().moments().max_error(&want) < TOL);
        }
        let g1 = make_distribution(&DistributionSpec::Semicircular { eta: LinearMap::identity(2), center: None }, 6).unwrap();
        let ge = make_distribution(&DistributionSpec::Semicircular { eta: alpha.clone(), center: None }, 6).unwrap();
        assert!(convolution_power(&g1, &alpha, Kind::Free).unwrap().moments().max_error(ge.moments()) < TOL);
        let mu = Distribution::from_moments(random_series::<C64>(&mut r, 2, 5, 1.0));
        assert!(convolution_power(&mu, &LinearMap::identity(2), Kind::Free).unwrap().moments().max_error(mu.moments()) < TOL);
        let beta = random_linear_map::<C64>(&mut r, 2, 1.0);
        for kind in [Kind::Free, Kind::Boolean] {
            let lhs = convolution_power(&convolution_power(&mu, &alpha, kind).unwrap(), &beta, kind).unwrap();
            let rhs = convolution_power(&mu, &beta.compose(&alpha), kind).unwrap();
            assert!(lhs.moments().max_error(rhs.moments()) < TOL);
        }
    }

    #[test]
    fn bb_alpha_examples() {
        let mut r = rng(16);
        let mu = Distribution::from_moments(random_series::<C64>(&mut r, 2, 6, 1.0));
        assert!(bb_alpha(&LinearMap::zero(2), &mu).unwrap().moments().max_error(mu.moments()) < TOL);
        let b = bb_alpha(&LinearMap::identity(2), &mu).unwrap();
        assert!(b.free_cumulants().max_error(mu.boolean_cumulants()) < TOL);
        let alpha = random_kraus_map::<C64>(&mut r, 2, 2, 0.8);
        let via_b = bb_alpha_via_boolean(&alpha, &mu).unwrap();
        assert!(bb_alpha(&alpha, &mu).unwrap().moments().max_error(via_b.moments()) < TOL);
        let one_plus = LinearMap::identity(2).add(&alpha);
        let lhs = convolution_power(&bb_alpha(&alpha, &mu).unwrap(), &one_plus, Kind::Boolean).unwrap();
        let rhs = convolution_power(&mu, &one_plus, Kind::Free).unwrap();
        assert!(lhs.moments().max_error(rhs.moments()) < TOL);
    }

    #[test]
    fn bb_semigroup() {
        let mut r = rng(17);
        let mu = Distribution::from_moments(random_series::<C64>(&mut r, 2, 6, 1.0));
        let a = random_kraus_map::<C64>(&mut r, 2, 2, 0.8);
        let b = random_kraus_map::<C64>(&mut r, 2, 2, 0.8);
        let lhs = bb_alpha(&a, &bb_alpha(&b, &mu).unwrap()).unwrap();
        let rhs = bb_alpha(&a.add(&b), &mu).unwrap();
        assert!(lhs.moments().max_error(rhs.moments()) < TOL);
        let back = bb_alpha(&a.scale(&c(-1.0)), &bb_alpha(&a, &mu).unwrap()).unwrap();
        assert!(back.moments().max_error(mu.moments()) < TOL);
    }

    /// With `1 + α` invertible, `𝔹_α(μ) = (μ^{⊞(1+α)})^{⊎(1+α)^{-1}}`.
    #[test]
    fn bb_alpha_by_powers_when_invertible() {
        let mut r = rng(18);
        let mu = Distribution::from_moments(random_series::<C64>(&mut r, 2, 6, 1.0));
        let alpha = random_kraus_map::<C64>(&mut r, 2, 2, 0.8);
        let one_plus = LinearMap::identity(2).add(&alpha);
        let inv = one_plus.inverse().unwrap();
        let lhs = convolution_power(&convolution_power(&mu, &one_plus, Kind::Free).unwrap(), &inv, Kind::Boolean).unwrap();
        assert!(lhs.moments().max_error(bb_alpha(&alpha, &mu).unwrap().moments()) < 1e-9);
    }

    #[test]
    fn phi_examples() {
        let mut r = rng(19);
        let beta = Distribution::from_moments(random_series::<C64>(&mut r, 2, 4, 1.0));
        let bw = restrict_to_words(&beta, 4).unwrap();
        let p = phi(&bw, 6).unwrap();
        let bc = Distribution::from_moments(p.moments().clone());
        let b: Vec<M> = (0..5).map(|_| random_element(&mut r, 2, 1.0)).collect();
        assert!(bc.boolean_cumulants().term(2).unwrap().eval(&b[..1]).unwrap().max_abs_diff(&b[0]) < 1e-12);
        for n in 3..=6 {
            let got = bc.boolean_cumulants().term(n).unwrap().eval(&b[..n - 1]).unwrap();
            let inner = beta.moments().term(n - 2).unwrap().eval(&b[1..n - 2]).unwrap();
            let want = &(&b[0] * &inner) * &b[n - 2];
            assert!(got.max_abs_diff(&want) < 1e-10 * (1.0 + want.max_abs()));
        }
        assert!(matches!(phi(&bw, 7), Err(crate::Error::Bounds(_))));
        let zero_above = PolyLinearMap::tabulate(2, 4, |k, w| if k == 0 { w[0].clone() } else { M::zeros(2) }).unwrap();
        let z = phi(&zero_above, 6).unwrap();
        let zb = z.boolean_cumulants();
        assert!((3..=6).all(|n| zb.term(n).unwrap().is_zero()));
    }

    /// `Φ[β ⊞ γ_α] = 𝔹_α[Φ[β]]`.
    #[test]
    fn phi_intertwines_semicircular_shift() {
        let mut r = rng(20);
        for _ in 0..2 {
            let beta = Distribution::from_moments(random_series::<C64>(&mut r, 2, 4, 1.0));
            let alpha = random_kraus_map::<C64>(&mut r, 2, 2, 0.8);
            let gamma = make_distribution(&DistributionSpec::Semicircular { eta: alpha.clone(), center: None }, 4).unwrap();
            let nu = convolve(&beta, &gamma, Kind::Free).unwrap();
            let lhs = phi(&restrict_to_words(&nu, 4).unwrap(), 6).unwrap();
            let rhs = bb_alpha(&alpha, &phi(&restrict_to_words(&beta, 4).unwrap(), 6).unwrap()).unwrap();
            assert!(lhs.moments().max_error(rhs.moments()) < TOL);
        }
    }

    #[test]
    fn make_distribution_examples() {
        let lam = M::diag(vec![c(1.0), c(2.0)]);
        let dl = make_distribution(&DistributionSpec::PointMass { lambda: lam.clone() }, 4).unwrap();
        let mut r = rng(21);
        let b: Vec<M> = (0..3).map(|_| random_element(&mut r, 2, 1.0)).collect();
        let want = &(&(&(&(&lam * &b[0]) * &lam) * &b[1]) * &lam) * &(&b[2] * &lam);
        assert!(dl.moments().term(4).unwrap().eval(&b).unwrap().max_abs_diff(&want) < 1e-12);
        let g = make_distribution(&DistributionSpec::Semicircular { eta: LinearMap::identity(1), center: None }, 6).unwrap();
        assert!(close(&scalar_values(g.moments()), &[0.0, 1.0, 0.0, 2.0, 0.0, 5.0], 1e-12));
        let cp = DistributionSpec::CompoundPoissonFree {
            nu: Box::new(DistributionSpec::PointMass { lambda: M::identity(2) }),
            alpha: flip(),
        };
        let mu = make_distribution(&cp, 5).unwrap();
        let fresh = Distribution::from_moments(mu.moments().clone());
        for n in 1..=5 {
            let args: Vec<M> = b.iter().cloned().chain(std::iter::repeat(M::identity(2))).take(n - 1).collect();
            let got = fresh.free_cumulants().term(n).unwrap().eval(&args).unwrap();
            let want = flip().apply(&AlgebraElement::product(2, &args));
            assert!(got.max_abs_diff(&want) < 1e-10);
        }
        let bad = DistributionSpec::BooleanPair { lambda: lam, beta: PolyLinearMap::tabulate(2, 1, |_, w| w[0].clone()).unwrap() };
        assert!(make_distribution(&bad, 5).is_err());
    }

    /// Output term n only reads input terms ≤ n.
    #[test]
    fn degree_filtration() {
        let mut r = rng(22);
        let f = random_series::<C64>(&mut r, 2, 5, 1.0);
        let alpha = random_kraus_map::<C64>(&mut r, 2, 2, 1.0);
        let bumped = f.with_term(5, crate::random::random_functional(&mut r, 2, 5, 3.0)).unwrap();
        let ops: Vec<Box<dyn Fn(&BSeries<C64>) -> BSeries<C64>>> = vec![
            Box::new(|s| rm_hat(s).unwrap()),
            Box::new(|s| rm_hat_inv(s).unwrap()),
            Box::new(|s| bm_hat(s).unwrap()),
            Box::new(|s| bm_hat_inv(s).unwrap()),
            Box::new(|s| rb_hat_alpha(&alpha, s).unwrap()),
        ];
        for op in &ops {
            let a = op(&f).truncate(4).unwrap();
            let b = op(&bumped).truncate(4).unwrap();
            assert!(a.max_error(&b) == 0.0);
        }
    }

    /// d = 1: `𝔹_t(μ) = (μ^{⊞(1+t)})^{⊎(1+t)^{-1}}` and `γ^{⊞t}` has moments `t^k C_k`.
    #[test]
    fn scalar_regression() {
        let mu = Distribution::from_moments(random_series::<C64>(&mut rng(23), 1, 8, 1.0));
        for t in [0.5, 1.0, 2.0] {
            let lhs = bb_alpha(&LinearMap::scalar(1, c(t)), &mu).unwrap();
            let p = convolution_power(&mu, &LinearMap::scalar(1, c(1.0 + t)), Kind::Free).unwrap();
            let rhs = convolution_power(&p, &LinearMap::scalar(1, c(1.0 / (1.0 + t))), Kind::Boolean).unwrap();
            assert!(lhs.moments().max_error(rhs.moments()) < 1e-12);
            let g = make_distribution(&DistributionSpec::Semicircular { eta: LinearMap::identity(1), center: None }, 8).unwrap();
            let gt = convolution_power(&g, &LinearMap::scalar(1, c(t)), Kind::Free).unwrap();
            let want: Vec<f64> = (1..=8).map(|n| if n % 2 == 0 { t.powi(n as i32 / 2) * catalan(n / 2) as f64 } else { 0.0 }).collect();
            assert!(close(&scalar_values(gt.moments()), &want, 1e-12));
        }
    }

    #[test]
    fn words_evaluate_by_moments() {
        let lam = M::diag(vec![c(1.0), c(-2.0)]);
        let dl = make_distribution(&DistributionSpec::PointMass { lambda: lam.clone() }, 5).unwrap();
        // δ_λ[P] = P(λ)
        let x = NcPolynomial::<C64>::x(2);
        let b = random_element::<C64>(&mut rng(24), 2, 1.0);
        let p = x.mul(&NcPolynomial::constant(b.clone())).mul(&x).add(&NcPolynomial::constant(b.clone()));
        let want = &(&(&lam * &b) * &lam) + &b;
        assert!(dl.apply_polynomial(&p).unwrap().max_abs_diff(&want) < 1e-12);
    }
}
