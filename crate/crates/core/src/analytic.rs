//! Cauchy transforms on the upper half-plane of `B`, the `h`-transform,
//! subordination for `μ^{⊞α}`, and finite-difference checks of the Burgers
//! equation and of the `h`-family equation.
//!
//! Series evaluation is restricted to `‖b⁻¹‖·M < RHO_MAX`, where `M` bounds
//! the moment growth `‖M^[n](b_1..)‖ ≤ M^n Π‖b_i‖`.

use serde::Serialize;

use crate::balg::{AlgebraElement, LinearMap, CP_TOL};
use crate::error::{argument, domain, Error, Result};
use crate::ncpart::{enumerate, Family};
use crate::series::{BSeries, NestPlan};
use crate::transforms::{rb_hat_alpha, Distribution, Kind};
use crate::C64;

type Matrix = AlgebraElement<C64>;
type Map = LinearMap<C64>;
type Series = BSeries<C64>;

pub const RHO_MAX: f64 = 0.5;
pub const TOL_EQ: f64 = 1e-10;
pub const DEFAULT_STEP: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 200;

/// Smallest eigenvalue of `Im b = (b - b*)/2i`.
pub fn imag_floor(b: &Matrix) -> f64 {
    b.imag_part().hermitian_eigenvalues()[0]
}

/// `b` with `Im b ⪰ ε·1`.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperHalfPoint {
    b: Matrix,
    eps: f64,
}

impl UpperHalfPoint {
    pub fn new(b: Matrix, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return argument("ε must be positive");
        }
        let floor = imag_floor(&b);
        if floor < eps - TOL_EQ {
            return domain(format!("Im b has eigenvalue {floor:e} below ε = {eps:e}"));
        }
        Ok(UpperHalfPoint { b, eps })
    }

    /// Records `ε = λ_min(Im b)`.
    pub fn from_matrix(b: Matrix) -> Result<Self> {
        let floor = imag_floor(&b);
        if !(floor > 0.0) {
            return domain(format!("Im b is not positive definite (smallest eigenvalue {floor:e})"));
        }
        Ok(UpperHalfPoint { b, eps: floor })
    }

    /// `i·y·1 + h`.
    pub fn shifted(y: f64, h: &Matrix) -> Result<Self> {
        let d = h.dim();
        Self::from_matrix(h + &Matrix::scalar(d, C64::new(0.0, y)))
    }

    pub fn point(&self) -> &Matrix {
        &self.b
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }
}

/// `r (rM)^{N+1} / (1 - rM)` with `r = ‖b⁻¹‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBound {
    pub growth: f64,
    pub trunc: usize,
    pub r: f64,
    pub value: f64,
}

impl TailBound {
    pub fn new(growth: f64, trunc: usize, r: f64) -> Result<Self> {
        let q = r * growth;
        if !(q < RHO_MAX) {
            return domain(format!("outside series radius: ‖b⁻¹‖·M = {q:.4} ≥ {RHO_MAX}"));
        }
        Ok(TailBound { growth, trunc, r, value: r * q.powi(trunc as i32 + 1) / (1.0 - q) })
    }
}

/// `max_n ‖M^[n]‖^{1/n}` with the coordinate norm bound; over-estimates.
pub fn estimate_growth(moments: &Series) -> f64 {
    moments
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| t.norm_bound().powf(1.0 / (i + 1) as f64))
        .fold(0.0, f64::max)
}

/// Something that evaluates `G(b)` with an error bound.
pub trait CauchyTransform: Send + Sync {
    fn dim(&self) -> usize;

    fn cauchy(&self, b: &Matrix) -> Result<(Matrix, f64)>;

    /// `h(b) = G(b)⁻¹ - b`.
    fn h(&self, b: &Matrix) -> Result<Matrix> {
        let (g, _) = self.cauchy(b)?;
        Ok(&g.inverse()? - b)
    }
}

/// Series data a [`SeriesCauchy`] can start from.
#[derive(Clone, Debug)]
pub enum SeriesData {
    Moments(Series),
    FreeCumulants(Series),
    BooleanCumulants(Series),
}

impl SeriesData {
    fn series(&self) -> &Series {
        match self {
            SeriesData::Moments(s) | SeriesData::FreeCumulants(s) | SeriesData::BooleanCumulants(s) => s,
        }
    }
}

/// `G(b) = b⁻¹ + Σ_{n ≤ N} b⁻¹ M^[n](b⁻¹, ..., b⁻¹) b⁻¹` with a geometric tail.
///
/// Cumulant data is summed over partitions at the point, so nothing is
/// tabulated.
#[derive(Clone, Debug)]
pub struct SeriesCauchy {
    data: SeriesData,
    growth: f64,
    plans: Vec<Vec<NestPlan>>,
}

impl SeriesCauchy {
    /// Without `growth`, moments use [`estimate_growth`]; cumulants use
    /// `4K` (free) or `2K` (Boolean) with `K` the cumulant growth.
    pub fn new(data: SeriesData, growth: Option<f64>) -> Result<Self> {
        let s = data.series();
        let family = match &data {
            SeriesData::Moments(_) => None,
            SeriesData::FreeCumulants(_) => Some(Family::NC),
            SeriesData::BooleanCumulants(_) => Some(Family::INT),
        };
        let growth = match growth {
            Some(m) if m >= 0.0 && m.is_finite() => m,
            Some(m) => return argument(format!("growth constant {m} must be a finite nonnegative number")),
            None => match family {
                None => estimate_growth(s),
                Some(Family::NC) => 4.0 * estimate_growth(s),
                Some(_) => 2.0 * estimate_growth(s),
            },
        };
        let mut plans = Vec::new();
        if let Some(f) = family {
            for n in 1..=s.trunc() {
                let live: Vec<NestPlan> =
                    enumerate(n, f)?.iter().map(|pi| NestPlan::new(pi, None)).filter(|p| !p.hits_zero(&[s])).collect();
                plans.push(live);
            }
        }
        Ok(SeriesCauchy { data, growth, plans })
    }

    /// Uses whichever series `mu` already holds, preferring cumulants.
    pub fn from_distribution(mu: &Distribution<C64>, growth: Option<f64>) -> Result<Self> {
        let data = match mu.known() {
            (Some(r), _, _) => SeriesData::FreeCumulants(r.clone()),
            (None, Some(b), _) => SeriesData::BooleanCumulants(b.clone()),
            _ => SeriesData::Moments(mu.moments().clone()),
        };
        Self::new(data, growth)
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn trunc(&self) -> usize {
        self.data.series().trunc()
    }

    /// `M^[n](c, ..., c)` for `n = 1..=N`.
    pub fn diagonal_moments(&self, c: &Matrix) -> Vec<Matrix> {
        let s = self.data.series();
        (1..=s.trunc())
            .map(|n| {
                let args = vec![c.clone(); n - 1];
                match &self.data {
                    SeriesData::Moments(m) => m.terms()[n - 1].eval(&args).expect("shapes checked"),
                    _ => {
                        let mut acc = Matrix::zeros(s.dim());
                        for p in &self.plans[n - 1] {
                            acc.add_assign(&p.eval(&[s], &args).expect("shapes checked"));
                        }
                        acc
                    }
                }
            })
            .collect()
    }

    /// Value and tail bound.
    pub fn evaluate(&self, b: &Matrix) -> Result<(Matrix, TailBound)> {
        if b.dim() != self.dim() {
            return argument("point of the wrong size");
        }
        let c = b.inverse()?;
        let tail = TailBound::new(self.growth, self.trunc(), c.norm())?;
        let mut g = c.clone();
        for m in self.diagonal_moments(&c) {
            g.add_assign(&c.matmul(&m).matmul(&c));
        }
        Ok((g, tail))
    }
}

impl CauchyTransform for SeriesCauchy {
    fn dim(&self) -> usize {
        self.data.series().dim()
    }

    fn cauchy(&self, b: &Matrix) -> Result<(Matrix, f64)> {
        let (g, tail) = self.evaluate(b)?;
        Ok((g, tail.value))
    }
}

/// `δ_λ`: `G(b) = (b - λ)⁻¹`.
#[derive(Clone, Debug)]
pub struct PointMassCauchy {
    pub lambda: Matrix,
}

impl CauchyTransform for PointMassCauchy {
    fn dim(&self) -> usize {
        self.lambda.dim()
    }

    fn cauchy(&self, b: &Matrix) -> Result<(Matrix, f64)> {
        Ok(((b - &self.lambda).inverse()?, 0.0))
    }
}

/// Scalar semicircle of variance `t` and centre `c`:
/// `G(z) = (w - √(w² - 4t)) / 2t`, `w = z - c`, `Im √ > 0`.
#[derive(Clone, Copy, Debug)]
pub struct ScalarSemicircle {
    pub variance: f64,
    pub center: f64,
}

impl ScalarSemicircle {
    pub fn eval(&self, z: C64) -> Result<C64> {
        if !(z.im > 0.0) {
            return domain("closed form needs Im z > 0");
        }
        let w = z - self.center;
        if self.variance == 0.0 {
            return Ok(1.0 / w);
        }
        let mut s = (w * w - 4.0 * self.variance).sqrt();
        if s.im < 0.0 {
            s = -s;
        }
        Ok((w - s) / (2.0 * self.variance))
    }
}

impl CauchyTransform for ScalarSemicircle {
    fn dim(&self) -> usize {
        1
    }

    fn cauchy(&self, b: &Matrix) -> Result<(Matrix, f64)> {
        if b.dim() != 1 {
            return argument("scalar closed form at a matrix point");
        }
        Ok((Matrix::scalar(1, self.eval(*b.get(0, 0))?), 0.0))
    }
}

/// Truncated-series `G_μ(b)` with its tail bound. Without `growth` the
/// constant is estimated from the stored moments.
pub fn cauchy_transform(mu: &Distribution<C64>, b: &UpperHalfPoint, growth: Option<f64>) -> Result<(Matrix, TailBound)> {
    SeriesCauchy::from_distribution(mu, growth)?.evaluate(b.point())
}

pub fn h_transform(mu: &Distribution<C64>, b: &UpperHalfPoint, growth: Option<f64>) -> Result<Matrix> {
    SeriesCauchy::from_distribution(mu, growth)?.h(b.point())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subordination {
    pub omega: Matrix,
    pub iterations: usize,
    pub residual: f64,
    /// `min_k λ_min(Im ω_k - Im b)` over the iterates.
    pub min_im_excess: f64,
}

/// Fixed point of `ω ↦ b + (α - 1) h_μ(ω)` from `ω_0 = b`.
pub fn subordination(
    mu: &dyn CauchyTransform,
    alpha: &Map,
    b: &UpperHalfPoint,
    tol: f64,
    max_iter: usize,
) -> Result<Subordination> {
    let d = b.dim();
    if alpha.dim() != d || mu.dim() != d {
        return argument("inputs of different sizes");
    }
    let step = alpha.sub(&LinearMap::identity(d));
    if !step.is_completely_positive(CP_TOL) {
        log::warn!("α - 1 is not completely positive; iterating anyway");
    }
    let im_b = b.point().imag_part();
    let mut omega = b.point().clone();
    let mut min_excess = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for k in 0..max_iter {
        min_excess = min_excess.min((&omega.imag_part() - &im_b).hermitian_eigenvalues()[0]);
        let next = b.point() + &step.apply(&mu.h(&omega)?);
        residual = (&next - &omega).norm();
        if residual <= tol {
            return Ok(Subordination { omega, iterations: k, residual, min_im_excess: min_excess });
        }
        omega = next;
    }
    Err(Error::Convergence { iterations: max_iter, residual })
}

/// `G(η', b)` for one value of the variance `η'`.
pub type CauchyFamily<'a> = dyn Fn(&Map, &Matrix) -> Result<Matrix> + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BurgersReport {
    pub residual: f64,
    /// Residual with both steps doubled.
    pub coarse_residual: f64,
    /// `coarse / fine`; about 4 when the stencil error dominates.
    pub ratio: f64,
    pub step_t: f64,
    pub step_b: f64,
}

fn central<F>(f: F, h: f64) -> Result<Matrix>
where
    F: Fn(f64) -> Result<Matrix>,
{
    let plus = f(h)?;
    let minus = f(-h)?;
    Ok((&plus - &minus).scale(&C64::new(0.5 / h, 0.0)))
}

fn burgers_once(family: &CauchyFamily, eta: &Map, rho: &Map, b: &Matrix, ht: f64, hb: f64) -> Result<f64> {
    let g = family(eta, b)?;
    let delta = rho.apply(&g);
    let dt = central(|t| family(&eta.add(&rho.scale(&C64::new(t, 0.0))), b), ht)?;
    let db = central(|s| family(eta, &(b + &delta.scale(&C64::new(s, 0.0)))), hb)?;
    Ok((&dt + &db).norm())
}

/// `‖∂_η G(ρ) + ∂_b G(ρ(G))‖` by central differences, for any family.
pub fn burgers_residual_with(
    family: &CauchyFamily,
    eta: &Map,
    rho: &Map,
    b: &UpperHalfPoint,
    step_t: f64,
    step_b: f64,
) -> Result<BurgersReport> {
    if eta.dim() != b.dim() || rho.dim() != b.dim() {
        return argument("inputs of different sizes");
    }
    if !(step_t > 0.0 && step_b > 0.0) {
        return argument("steps must be positive");
    }
    let residual = burgers_once(family, eta, rho, b.point(), step_t, step_b)?;
    let coarse_residual = burgers_once(family, eta, rho, b.point(), 2.0 * step_t, 2.0 * step_b)?;
    Ok(BurgersReport { residual, coarse_residual, ratio: coarse_residual / residual, step_t, step_b })
}

/// Burgers residual for `G(η', b) = G_{μ ⊞ γ_η'}(b)` through free-cumulant
/// series; `growth` must bound the moment growth at every stencil variance.
pub fn burgers_residual(
    mu: &Distribution<C64>,
    eta: &Map,
    rho: &Map,
    b: &UpperHalfPoint,
    step_t: f64,
    step_b: f64,
    growth: f64,
) -> Result<BurgersReport> {
    let r = mu.free_cumulants().clone();
    if r.trunc() < 2 {
        return argument("the Burgers check needs free cumulants to order 2");
    }
    let family = move |e: &Map, p: &Matrix| -> Result<Matrix> {
        let old = &r.terms()[1];
        let shifted = crate::balg::MultilinearFunctional::tabulate(r.dim(), 2, |w| &old.eval_raw(w) + &e.apply(&w[0]))?;
        let series = r.with_term(2, shifted)?;
        Ok(SeriesCauchy::new(SeriesData::FreeCumulants(series), Some(growth))?.evaluate(p)?.0)
    };
    burgers_residual_with(&family, eta, rho, b, step_t, step_b)
}

/// Burgers family from the scalar closed form: `μ` is a semicircle of
/// variance `base` and centre `center`, so `μ ⊞ γ_t` has variance `base + t`.
pub fn scalar_semicircle_family(base: f64, center: f64) -> impl Fn(&Map, &Matrix) -> Result<Matrix> + Sync {
    move |e: &Map, p: &Matrix| {
        if e.dim() != 1 || p.dim() != 1 {
            return argument("scalar family at a matrix point");
        }
        let t = e.matrix()[0];
        if t.im.abs() > TOL_EQ {
            return argument("scalar variance must be real");
        }
        let g = ScalarSemicircle { variance: base + t.re, center }.eval(*p.get(0, 0))?;
        Ok(Matrix::scalar(1, g))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HFamilyReport {
    /// `‖h_{𝔹_η(μ)}(b) - h_μ(b + η(h_{𝔹_η(μ)}(b)))‖`.
    pub functional_residual: f64,
    /// `‖∂_η h(ρ) - ∂_b h(ρ(h))‖` when a direction was given.
    pub pde_residual: Option<f64>,
    /// Tail bounds of both `h` values, propagated through the inverse.
    pub tail: f64,
    pub step: Option<f64>,
}

/// Bound on `‖(G + E)⁻¹ - G⁻¹‖` for `‖E‖ ≤ e`, given `G⁻¹`.
fn inverse_error(g_inv: &Matrix, e: f64) -> f64 {
    let q = g_inv.norm();
    if q * e >= 1.0 {
        f64::INFINITY
    } else {
        q * q * e / (1.0 - q * e)
    }
}

fn bb_cauchy(mu_r: &Series, eta: &Map, growth: f64) -> Result<SeriesCauchy> {
    SeriesCauchy::new(SeriesData::FreeCumulants(rb_hat_alpha(eta, mu_r)?), Some(growth))
}

/// Checks `h(η, b) = h_{𝔹_η(μ)}(b)` against `h(η,b) = h_μ(b + η(h(η,b)))`
/// and, given `(ρ, step)`, the PDE `∂_η h(ρ) = ∂_b h(ρ(h))`.
/// `growth` must bound the moment growth of `μ` and of every `𝔹_η'(μ)` used.
pub fn h_family_residual(
    mu: &Distribution<C64>,
    eta: &Map,
    direction: Option<(&Map, f64)>,
    b: &UpperHalfPoint,
    growth: f64,
) -> Result<HFamilyReport> {
    let d = mu.dim();
    if eta.dim() != d || b.dim() != d {
        return argument("inputs of different sizes");
    }
    let r = mu.cumulants(Kind::Free);
    let base = SeriesCauchy::new(SeriesData::FreeCumulants(r.clone()), Some(growth))?;
    let bb = bb_cauchy(r, eta, growth)?;
    let (g, tail_bb) = bb.evaluate(b.point())?;
    let gi = g.inverse()?;
    let h = &gi - b.point();
    let shifted = b.point() + &eta.apply(&h);
    let (g0, tail_0) = base.evaluate(&shifted)?;
    let g0i = g0.inverse()?;
    let h0 = &g0i - &shifted;
    let functional_residual = (&h - &h0).norm();
    let (pde_residual, step) = match direction {
        None => (None, None),
        Some((rho, step)) => {
            if rho.dim() != d || !(step > 0.0) {
                return argument("direction of the wrong size or non-positive step");
            }
            let dt = central(|t| bb_cauchy(r, &eta.add(&rho.scale(&C64::new(t, 0.0))), growth)?.h(b.point()), step)?;
            let delta = rho.apply(&h);
            let db = central(|s| bb.h(&(b.point() + &delta.scale(&C64::new(s, 0.0)))), step)?;
            (Some((&dt - &db).norm()), Some(step))
        }
    };
    let tail = inverse_error(&gi, tail_bb.value) + inverse_error(&g0i, tail_0.value);
    Ok(HFamilyReport { functional_residual, pde_residual, tail, step })
}
