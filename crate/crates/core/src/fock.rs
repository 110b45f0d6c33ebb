//! Operator models for `(λ, β)` data: the Boolean Fock space, the full Fock
//! module, and the interpolated `𝔹_α` module. Also Gram positivity of
//! distributions and the Boolean transport `T = (1+Q) Y (1+Q*)`.
//!
//! Vectors are finite sums of pure tensors and the operators act on them
//! directly; no matrices are assembled.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::balg::{hermitian_eigenvalues, AlgebraElement, LinearMap, MultilinearFunctional, PolyLinearMap, CP_TOL};
use crate::error::{argument, bounds, Result};
use crate::scalar::Scalar;
use crate::series::{BSeries, N_MAX};
use crate::transforms::{bm_hat_inv, Distribution};
use crate::words::Word;
use crate::C64;

/// Longest word a model will hold.
pub const MAX_LEN: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum Flavor<S> {
    /// `B ⊕ B_0<X>`.
    Boolean,
    /// The full Fock module over `B_0<X>`.
    Free,
    /// The full Fock module with `α∘β` on all legs but the outermost.
    BbAlpha(LinearMap<S>),
}

/// `ξ_1 ⊗ ... ⊗ ξ_k` written as one word `s_0 X s_1 X ... X s_m`.
///
/// `legs[i]` counts the `X`s of `ξ_{i+1}`. Every leg but the last has right
/// coefficient 1, so the slot where two legs meet is the left coefficient of
/// the later one. Depth 0 is an element of `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureTensor<S> {
    legs: Vec<usize>,
    slots: Vec<AlgebraElement<S>>,
}

impl<S: Scalar> PureTensor<S> {
    pub fn new(legs: Vec<usize>, slots: Vec<AlgebraElement<S>>) -> Result<Self> {
        if legs.iter().any(|&m| m == 0) {
            return argument("every tensor leg needs at least one X");
        }
        if slots.len() != legs.iter().sum::<usize>() + 1 {
            return argument("slot count must be one more than the number of X");
        }
        let d = slots[0].dim();
        if slots.iter().any(|s| s.dim() != d) {
            return argument("tensor coefficients of different sizes");
        }
        Ok(PureTensor { legs, slots })
    }

    pub fn scalar(b: AlgebraElement<S>) -> Self {
        PureTensor { legs: Vec::new(), slots: vec![b] }
    }

    /// A single leg `b_0 X b_1 ... X b_m`.
    pub fn word(coeffs: Vec<AlgebraElement<S>>) -> Result<Self> {
        if coeffs.len() < 2 {
            return argument("a leg needs at least one X");
        }
        PureTensor::new(vec![coeffs.len() - 1], coeffs)
    }

    pub fn dim(&self) -> usize {
        self.slots[0].dim()
    }

    pub fn depth(&self) -> usize {
        self.legs.len()
    }

    /// Total number of `X`s.
    pub fn length(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn slots(&self) -> &[AlgebraElement<S>] {
        &self.slots
    }

    /// Coefficients of each leg, with the implicit right coefficients 1.
    fn leg_words(&self) -> Vec<Vec<AlgebraElement<S>>> {
        let d = self.dim();
        let k = self.legs.len();
        let mut out = Vec::with_capacity(k);
        let mut start = 0;
        for (i, &m) in self.legs.iter().enumerate() {
            let mut w = self.slots[start..start + m].to_vec();
            w.push(if i + 1 == k { self.slots[start + m].clone() } else { AlgebraElement::identity(d) });
            out.push(w);
            start += m;
        }
        out
    }
}

/// A finite sum of pure tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    dim: usize,
    terms: Vec<PureTensor<S>>,
}

impl<S: Scalar> FockVector<S> {
    pub fn zero(d: usize) -> Self {
        FockVector { dim: d, terms: Vec::new() }
    }

    pub fn vacuum(d: usize) -> Self {
        FockVector { dim: d, terms: vec![PureTensor::scalar(AlgebraElement::identity(d))] }
    }

    pub fn from_tensors(d: usize, terms: Vec<PureTensor<S>>) -> Result<Self> {
        if terms.iter().any(|t| t.dim() != d) {
            return argument("tensor of the wrong size");
        }
        Ok(FockVector { dim: d, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[PureTensor<S>] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        FockVector { dim: self.dim, terms }
    }

    pub fn max_length(&self) -> usize {
        self.terms.iter().map(|t| t.length()).max().unwrap_or(0)
    }

    /// Sum of the depth-0 components.
    pub fn vacuum_part(&self) -> AlgebraElement<S> {
        let mut acc = AlgebraElement::zeros(self.dim);
        for t in self.terms.iter().filter(|t| t.depth() == 0) {
            acc.add_assign(&t.slots[0]);
        }
        acc
    }
}

/// `a*`, `a`, `p` and the `λ` part of `X` for one of the three models,
/// acting on words up to `max_len` letters.
#[derive(Clone, Debug)]
pub struct FockOperators<S> {
    flavor: Flavor<S>,
    lambda: AlgebraElement<S>,
    deep_lambda: AlgebraElement<S>,
    beta: PolyLinearMap<S>,
    deep_beta: PolyLinearMap<S>,
    max_len: usize,
}

impl<S: Scalar> FockOperators<S> {
    pub fn new(flavor: Flavor<S>, lambda: AlgebraElement<S>, beta: PolyLinearMap<S>, max_len: usize) -> Result<Self> {
        let d = lambda.dim();
        if beta.dim() != d {
            return argument("λ and β on different matrix sizes");
        }
        if max_len == 0 || max_len > MAX_LEN {
            return bounds(format!("word length {max_len} outside 1..={MAX_LEN}"));
        }
        if max_len >= 2 && beta.max_degree() + 2 < max_len {
            return bounds(format!("words of length {max_len} need β up to degree {}", max_len - 2));
        }
        let (deep_lambda, deep_beta) = match &flavor {
            Flavor::BbAlpha(alpha) => {
                if alpha.dim() != d {
                    return argument("α on a different matrix size");
                }
                (alpha.apply(&lambda), beta.map_output(alpha))
            }
            _ => (lambda.clone(), beta.clone()),
        };
        Ok(FockOperators { flavor, lambda, deep_lambda, beta, deep_beta, max_len })
    }

    pub fn flavor(&self) -> &Flavor<S> {
        &self.flavor
    }

    pub fn dim(&self) -> usize {
        self.lambda.dim()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn is_boolean(&self) -> bool {
        matches!(self.flavor, Flavor::Boolean)
    }

    /// The map that pairs leg `i` (0-based) of a depth-`depth` tensor.
    fn leg_map(&self, i: usize, depth: usize) -> &PolyLinearMap<S> {
        if i + 1 < depth {
            &self.deep_beta
        } else {
            &self.beta
        }
    }

    pub fn creation(&self, v: &FockVector<S>) -> FockVector<S> {
        let d = v.dim;
        let terms = v
            .terms
            .iter()
            .filter(|t| !(self.is_boolean() && t.depth() > 0))
            .filter(|t| t.length() < self.max_len)
            .map(|t| {
                let mut legs = vec![1];
                legs.extend_from_slice(&t.legs);
                let mut slots = vec![AlgebraElement::identity(d)];
                slots.extend(t.slots.iter().cloned());
                PureTensor { legs, slots }
            })
            .collect();
        FockVector { dim: d, terms }
    }

    pub fn preservation(&self, v: &FockVector<S>) -> FockVector<S> {
        let d = v.dim;
        let terms = v
            .terms
            .iter()
            .filter(|t| t.depth() > 0 && t.length() < self.max_len)
            .map(|t| {
                let mut legs = t.legs.clone();
                legs[0] += 1;
                let mut slots = vec![AlgebraElement::identity(d)];
                slots.extend(t.slots.iter().cloned());
                PureTensor { legs, slots }
            })
            .collect();
        FockVector { dim: d, terms }
    }

    pub fn annihilation(&self, v: &FockVector<S>) -> Result<FockVector<S>> {
        let mut terms = Vec::new();
        for t in v.terms.iter().filter(|t| t.depth() > 0) {
            let m = t.legs[0];
            let f = self.leg_map(0, t.depth()).layer(m - 1)?;
            let head = f.eval_raw(&t.slots[..m]).matmul(&t.slots[m]);
            let mut slots = vec![head];
            slots.extend(t.slots[m + 1..].iter().cloned());
            terms.push(PureTensor { legs: t.legs[1..].to_vec(), slots });
        }
        Ok(FockVector { dim: v.dim, terms })
    }

    /// `L`: `λ` on `B`; deeper tensors see `λ` (free), nothing (Boolean) or
    /// `α[λ]` (`𝔹_α` model).
    pub fn lambda_part(&self, v: &FockVector<S>) -> FockVector<S> {
        let terms = v
            .terms
            .iter()
            .filter(|t| !(self.is_boolean() && t.depth() > 0))
            .map(|t| {
                let c = if t.depth() == 0 { &self.lambda } else { &self.deep_lambda };
                let mut t = t.clone();
                t.slots[0] = c.matmul(&t.slots[0]);
                t
            })
            .collect();
        FockVector { dim: v.dim, terms }
    }

    pub fn left_mul(&self, b: &AlgebraElement<S>, v: &FockVector<S>) -> FockVector<S> {
        let terms = v
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.slots[0] = b.matmul(&t.slots[0]);
                t
            })
            .collect();
        FockVector { dim: v.dim, terms }
    }

    /// `X = a* + a + p + L`.
    pub fn apply_x(&self, v: &FockVector<S>) -> Result<FockVector<S>> {
        let mut out = self.creation(v);
        out.terms.extend(self.annihilation(v)?.terms);
        out.terms.extend(self.preservation(v).terms);
        out.terms.extend(self.lambda_part(v).terms);
        Ok(out)
    }

    /// `<ξ, ζ>_f = c_k* f[c_{k-1}* X ... X c_0* b_0 X ... X b_{n-1}] b_n`.
    fn leg_pair(f: &PolyLinearMap<S>, xi: &[AlgebraElement<S>], zeta: &[AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
        let (n, k) = (xi.len() - 1, zeta.len() - 1);
        let mut word: Vec<AlgebraElement<S>> = zeta[1..k].iter().rev().map(|c| c.adjoint()).collect();
        word.push(zeta[0].adjoint().matmul(&xi[0]));
        word.extend(xi[1..n].iter().cloned());
        let inner = f.layer(n + k - 2)?.eval_raw(&word);
        Ok(zeta[k].adjoint().matmul(&inner).matmul(&xi[n]))
    }

    fn tensor_pair(&self, u: &PureTensor<S>, v: &PureTensor<S>) -> Result<AlgebraElement<S>> {
        let k = u.depth();
        if k != v.depth() {
            return Ok(AlgebraElement::zeros(u.dim()));
        }
        if k == 0 {
            return Ok(v.slots[0].adjoint().matmul(&u.slots[0]));
        }
        let (xs, zs) = (u.leg_words(), v.leg_words());
        let mut c: Option<AlgebraElement<S>> = None;
        for i in 0..k {
            // `<ξ_1 ⊗ ξ_2, ζ_1 ⊗ ζ_2> = <<ξ_1, ζ_1> ξ_2, ζ_2>`.
            let mut xi = xs[i].clone();
            if let Some(c) = &c {
                xi[0] = c.matmul(&xi[0]);
            }
            c = Some(Self::leg_pair(self.leg_map(i, k), &xi, &zs[i])?);
        }
        Ok(c.expect("depth is positive"))
    }

    /// The `B`-valued inner product, linear in `u` and conjugate linear in `v`.
    pub fn inner(&self, u: &FockVector<S>, v: &FockVector<S>) -> Result<AlgebraElement<S>> {
        if u.dim != v.dim || u.dim != self.dim() {
            return argument("vectors of different sizes");
        }
        let mut acc = AlgebraElement::zeros(u.dim);
        for s in &u.terms {
            for t in &v.terms {
                acc.add_assign(&self.tensor_pair(s, t)?);
            }
        }
        Ok(acc)
    }

    /// `<X b_1 X ... b_{n-1} X 1, 1>` and the longest word met on the way.
    pub fn moment_with_length(&self, args: &[AlgebraElement<S>]) -> Result<(AlgebraElement<S>, usize)> {
        let n = args.len() + 1;
        if n > self.max_len {
            return bounds(format!("order {n} moment needs words of length {n}, model holds {}", self.max_len));
        }
        let d = self.dim();
        if args.iter().any(|b| b.dim() != d) {
            return argument("argument of the wrong size");
        }
        let mut v = self.apply_x(&FockVector::vacuum(d))?;
        let mut longest = v.max_length();
        for (i, b) in args.iter().enumerate().rev() {
            v = self.apply_x(&self.left_mul(b, &v))?;
            // `i` applications of X remain; deeper tensors cannot reach the vacuum.
            v.terms.retain(|t| t.depth() <= i);
            longest = longest.max(v.max_length());
        }
        Ok((v.vacuum_part(), longest))
    }

    pub fn moment(&self, args: &[AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
        Ok(self.moment_with_length(args)?.0)
    }

    /// Moment series of the model up to order `trunc`.
    pub fn moment_series(&self, trunc: usize) -> Result<BSeries<S>> {
        if trunc > self.max_len {
            return bounds(format!("order {trunc} moments need words of length {trunc}"));
        }
        let d = self.dim();
        let terms = (1..=trunc)
            .map(|n| MultilinearFunctional::tabulate(d, n, |args| self.moment(args).expect("checked shapes")))
            .collect::<Result<Vec<_>>>()?;
        BSeries::from_terms(terms)
    }
}

/// `Σ` over interval compositions of `B^[m_1](..) b_{i_1} B^[m_2](..) ...`
/// where `block(slice)` returns the order `slice.len() + 1` block value.
fn interval_sum<S: Scalar>(
    d: usize,
    args: &[AlgebraElement<S>],
    block: impl Fn(&[AlgebraElement<S>]) -> Result<AlgebraElement<S>>,
) -> Result<AlgebraElement<S>> {
    let n = args.len() + 1;
    // tail[s]: the sum over the letters s..n.
    let mut tail: Vec<AlgebraElement<S>> = vec![AlgebraElement::zeros(d); n + 1];
    tail[n] = AlgebraElement::identity(d);
    for s in (0..n).rev() {
        let mut acc = AlgebraElement::zeros(d);
        for e in s..n {
            let head = block(&args[s..e])?;
            if e + 1 == n {
                acc.add_assign(&head);
            } else {
                acc.add_assign(&head.matmul(&args[e]).matmul(&tail[e + 1]));
            }
        }
        tail[s] = acc;
    }
    Ok(tail.swap_remove(0))
}

/// `μ_{(λ,β)}[X b_1 X ... b_{n-1} X]` summed over interval compositions, with
/// `β[∅] = λ`.
pub fn boolean_moment_sum<S: Scalar>(
    lambda: &AlgebraElement<S>,
    beta: &PolyLinearMap<S>,
    n: usize,
    args: &[AlgebraElement<S>],
) -> Result<AlgebraElement<S>> {
    let d = lambda.dim();
    if n == 0 || args.len() + 1 != n {
        return argument(format!("order {n} needs {} arguments, got {}", n.saturating_sub(1), args.len()));
    }
    if beta.dim() != d || args.iter().any(|b| b.dim() != d) {
        return argument("inputs of different sizes");
    }
    if n >= 2 && beta.max_degree() + 2 < n {
        return bounds(format!("order {n} needs β up to degree {}, have {}", n - 2, beta.max_degree()));
    }
    interval_sum(d, args, |w| if w.is_empty() { Ok(lambda.clone()) } else { beta.eval(w) })
}

/// Vacuum moment of the model; `n` must match `args`.
pub fn model_moments<S: Scalar>(ops: &FockOperators<S>, n: usize, args: &[AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
    if n == 0 || args.len() + 1 != n {
        return argument(format!("order {n} needs {} arguments, got {}", n.saturating_sub(1), args.len()));
    }
    ops.moment(args)
}

/// Boolean cumulants of the `𝔹_α` model built from `(λ, β)`.
pub fn bbalpha_model_cumulants(
    lambda: &AlgebraElement<C64>,
    beta: &PolyLinearMap<C64>,
    alpha: &LinearMap<C64>,
    trunc: usize,
) -> Result<BSeries<C64>> {
    if !alpha.is_completely_positive(CP_TOL) {
        log::warn!("α is not completely positive; the model inner product may be indefinite");
    }
    model_cumulants(lambda, beta, alpha, trunc)
}

/// [`bbalpha_model_cumulants`] without the positivity check, for any scalar.
pub fn model_cumulants<S: Scalar>(
    lambda: &AlgebraElement<S>,
    beta: &PolyLinearMap<S>,
    alpha: &LinearMap<S>,
    trunc: usize,
) -> Result<BSeries<S>> {
    if trunc == 0 || trunc > N_MAX {
        return bounds(format!("truncation {trunc} outside 1..={N_MAX}"));
    }
    let ops = FockOperators::new(Flavor::BbAlpha(alpha.clone()), lambda.clone(), beta.clone(), trunc)?;
    bm_hat_inv(&ops.moment_series(trunc)?)
}

/// Boolean cumulants of `T = (1+Q) Y (1+Q*)` with `M_Y = B_μ`, `E(Q) = e`,
/// `Var_Q = id` and `Q` Boolean independent from `Y`.
///
/// Mixed moments factor through `E(R_i) = E(1+Q*) b_i E(1+Q)`, so
/// `M_T^[n]` is an interval sum of blocks `(1+e) M_Y^[m](..) (1+e*)`.
pub fn boolean_transport_cumulants<S: Scalar>(mu: &Distribution<S>, e: &AlgebraElement<S>, trunc: usize) -> Result<BSeries<S>> {
    let d = mu.dim();
    if e.dim() != d {
        return argument("e on a different matrix size");
    }
    if trunc == 0 || trunc > mu.trunc() {
        return bounds(format!("truncation {trunc} outside 1..={}", mu.trunc()));
    }
    let my = mu.boolean_cumulants();
    let left = &AlgebraElement::identity(d) + e;
    let right = left.adjoint();
    let terms = (1..=trunc)
        .map(|n| {
            MultilinearFunctional::tabulate(d, n, |args| {
                interval_sum(d, args, |w| {
                    let inner = my.terms()[w.len()].eval_raw(w);
                    Ok(left.matmul(&inner).matmul(&right))
                })
                .expect("blocks within truncation")
            })
        })
        .collect::<Result<Vec<_>>>()?;
    bm_hat_inv(&BSeries::from_terms(terms)?)
}

/// Words `c_0 X c_1 ... X c_m`, `m ≤ L`, with `c_0..c_{m-1}` matrix units and
/// `c_m = E_{k0}`, and their Gram matrix `G_ij = (μ[w_j* w_i])_{00}`.
#[derive(Clone, Debug)]
pub struct WordSpace {
    dim: usize,
    max_len: usize,
    basis: Vec<Word<C64>>,
    gram: DMatrix<C64>,
}

impl WordSpace {
    pub fn new(mu: &Distribution<C64>, max_len: usize) -> Result<Self> {
        let d = mu.dim();
        if mu.trunc() < 2 * max_len + 2 {
            return bounds(format!("words of length {max_len} need moments to order {}, have {}", 2 * max_len + 2, mu.trunc()));
        }
        let mut basis = Vec::new();
        for m in 0..=max_len {
            let count = (d * d).pow(m as u32);
            for idx in 0..count {
                let coeffs: Vec<AlgebraElement<C64>> =
                    crate::balg::tuple_of_index(d, m, idx).into_iter().map(|k| AlgebraElement::basis(d, k)).collect();
                for k in 0..d {
                    let mut c = coeffs.clone();
                    c.push(AlgebraElement::elementary(d, k, 0));
                    basis.push(Word::new(c)?);
                }
            }
        }
        let n = basis.len();
        let mut gram = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let w = basis[j].adjoint().mul(&basis[i]);
                let g = *mu.apply_word(w.coeffs())?.get(0, 0);
                gram[(i, j)] = g;
                gram[(j, i)] = g.conj();
            }
        }
        Ok(WordSpace { dim: d, max_len, basis, gram })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn basis(&self) -> &[Word<C64>] {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.gram)[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramReport {
    pub min_eigenvalue: f64,
    pub pass: bool,
    #[serde(rename = "L")]
    pub max_len: usize,
    pub tol: f64,
    pub size: usize,
}

/// Positivity certificate on words of length `≤ L`. A failure is conclusive;
/// a pass is only a necessary condition.
pub fn gram_positivity(mu: &Distribution<C64>, max_len: usize, tol: f64) -> Result<GramReport> {
    let ws = WordSpace::new(mu, max_len)?;
    let min_eigenvalue = ws.min_eigenvalue();
    Ok(GramReport { min_eigenvalue, pass: min_eigenvalue >= -tol, max_len, tol, size: ws.basis.len() })
}
