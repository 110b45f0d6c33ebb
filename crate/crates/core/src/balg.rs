//! The base algebra `B = M_d(C)`, linear maps on it and dense multilinear
//! functionals `B^{n-1} -> B`.
//!
//! Every tensor uses the elementary basis `E_ij`, flattened row-major to the
//! index `i*d + j`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{argument, bounds, Error, Result};
use crate::scalar::Scalar;

/// Largest supported matrix size.
pub const MAX_DIM: usize = 3;
/// Largest supported tensor order (number of slots plus one).
pub const MAX_TENSOR_ORDER: usize = 10;
/// Default tolerance for the Choi-matrix eigenvalue test.
pub const CP_TOL: f64 = 1e-10;

type C64 = Complex<f64>;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        bounds(format!("matrix size {d} outside 1..={MAX_DIM}"))
    } else {
        Ok(())
    }
}

/// A `d x d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S> {
    dim: usize,
    entries: SmallVec<[S; 9]>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zeros(d: usize) -> Self {
        AlgebraElement { dim: d, entries: SmallVec::from_elem(S::zero(), d * d) }
    }

    pub fn identity(d: usize) -> Self {
        Self::scalar(d, S::one())
    }

    pub fn scalar(d: usize, c: S) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.entries[i * d + i] = c.clone();
        }
        m
    }

    /// Matrix unit `E_k`, `k = i*d + j`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut m = Self::zeros(d);
        m.entries[k] = S::one();
        m
    }

    pub fn elementary(d: usize, i: usize, j: usize) -> Self {
        Self::basis(d, i * d + j)
    }

    pub fn from_entries(d: usize, entries: Vec<S>) -> Result<Self> {
        if entries.len() != d * d {
            return argument(format!("{} entries for a {d}x{d} matrix", entries.len()));
        }
        Ok(AlgebraElement { dim: d, entries: entries.into() })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return argument("empty matrix");
        }
        if rows.iter().any(|r| r.len() != d) {
            return argument("matrix is not square");
        }
        Self::from_entries(d, rows.into_iter().flatten().collect())
    }

    pub fn diag(values: Vec<S>) -> Self {
        let d = values.len();
        let mut m = Self::zeros(d);
        for (i, v) in values.into_iter().enumerate() {
            m.entries[i * d + i] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.entries[j * d + i] = self.entries[i * d + j].clone();
            }
        }
        m
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.dim {
            t += &self.entries[i * self.dim + i];
        }
        t
    }

    pub fn scale(&self, c: &S) -> Self {
        AlgebraElement { dim: self.dim, entries: self.entries.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &S, other: &Self) {
        for (x, y) in self.entries.iter_mut().zip(other.entries.iter()) {
            if !y.is_zero() {
                *x += &(c.clone() * y.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (x, y) in self.entries.iter_mut().zip(other.entries.iter()) {
            *x += y;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        debug_assert_eq!(d, other.dim);
        let mut m = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = &self.entries[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &other.entries[k * d + j];
                    if !b.is_zero() {
                        m.entries[i * d + j] += &(a.clone() * b.clone());
                    }
                }
            }
        }
        m
    }

    /// Coordinates on the elementary basis that are nonzero.
    pub fn nonzero_coords(&self) -> SmallVec<[(usize, S); 9]> {
        self.entries.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (k, x.clone())).collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a.clone() - b.clone()).modulus()).fold(0.0, f64::max)
    }

    /// Product of a list of matrices, identity when empty.
    pub fn product<'a>(d: usize, factors: impl IntoIterator<Item = &'a Self>) -> Self {
        let mut acc = Self::identity(d);
        for f in factors {
            acc = acc.matmul(f);
        }
        acc
    }
}

impl<'a, S: Scalar> Add for &'a AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn add(self, rhs: Self) -> AlgebraElement<S> {
        let mut m = self.clone();
        m.add_assign(rhs);
        m
    }
}

impl<'a, S: Scalar> Sub for &'a AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn sub(self, rhs: Self) -> AlgebraElement<S> {
        AlgebraElement {
            dim: self.dim,
            entries: self.entries.iter().zip(rhs.entries.iter()).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<'a, S: Scalar> Mul for &'a AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn mul(self, rhs: Self) -> AlgebraElement<S> {
        self.matmul(rhs)
    }
}

impl<'a, S: Scalar> Neg for &'a AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn neg(self) -> AlgebraElement<S> {
        AlgebraElement { dim: self.dim, entries: self.entries.iter().map(|a| -a.clone()).collect() }
    }
}

impl<S: Scalar> Add for AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<S: Scalar> Sub for AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<S: Scalar> Mul for AlgebraElement<S> {
    type Output = AlgebraElement<S>;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs)
    }
}

impl AlgebraElement<C64> {
    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn from_dmatrix(m: &DMatrix<C64>) -> Self {
        let d = m.nrows();
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[i * d + j] = m[(i, j)];
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Numeric("non-finite matrix".into()));
        }
        let inv = self
            .to_dmatrix()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("singular matrix".into()))?;
        let out = Self::from_dmatrix(&inv);
        // reject numerically singular input
        let check = out.matmul(self).max_abs_diff(&Self::identity(self.dim));
        if !(check < 1e-6) {
            return Err(Error::Numeric(format!("ill-conditioned inverse (residual {check:e})")));
        }
        Ok(out)
    }

    /// Operator norm.
    pub fn norm(&self) -> f64 {
        self.to_dmatrix().singular_values().iter().cloned().fold(0.0, f64::max)
    }

    /// `(b + b*)/2`.
    pub fn real_part(&self) -> Self {
        (self + &self.adjoint()).scale(&C64::new(0.5, 0.0))
    }

    /// `(b - b*)/2i`.
    pub fn imag_part(&self) -> Self {
        (self - &self.adjoint()).scale(&C64::new(0.0, -0.5))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.real_part().to_dmatrix())
    }
}

/// Ascending eigenvalues of a Hermitian matrix (only the Hermitian part is read).
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// A C-linear map `B -> B`, stored as the `d^2 x d^2` matrix acting on
/// vectorized elements.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<S> {
    dim: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> LinearMap<S> {
    pub fn zero(d: usize) -> Self {
        LinearMap { dim: d, coeffs: vec![S::zero(); d.pow(4)] }
    }

    pub fn identity(d: usize) -> Self {
        Self::scalar(d, S::one())
    }

    /// `b ↦ c b`.
    pub fn scalar(d: usize, c: S) -> Self {
        let mut m = Self::zero(d);
        let n = d * d;
        for k in 0..n {
            m.coeffs[k * n + k] = c.clone();
        }
        m
    }

    pub fn from_matrix(d: usize, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != d.pow(4) {
            return argument(format!("{} coefficients for a map on {d}x{d} matrices", coeffs.len()));
        }
        Ok(LinearMap { dim: d, coeffs })
    }

    /// Tabulates `f` on the basis; `f` must be linear.
    pub fn from_fn(d: usize, f: impl Fn(&AlgebraElement<S>) -> AlgebraElement<S>) -> Self {
        let n = d * d;
        let mut m = Self::zero(d);
        for k in 0..n {
            let img = f(&AlgebraElement::basis(d, k));
            for (o, v) in img.entries.into_iter().enumerate() {
                m.coeffs[o * n + k] = v;
            }
        }
        m
    }

    /// `b ↦ Σ K b K*`.
    pub fn from_kraus(kraus: &[AlgebraElement<S>]) -> Result<Self> {
        let d = match kraus.first() {
            Some(k) => k.dim,
            None => return argument("empty Kraus list"),
        };
        if kraus.iter().any(|k| k.dim != d) {
            return argument("Kraus operators of different sizes");
        }
        let adj: Vec<_> = kraus.iter().map(|k| k.adjoint()).collect();
        Ok(Self::from_fn(d, |b| {
            let mut acc = AlgebraElement::zeros(d);
            for (k, ks) in kraus.iter().zip(adj.iter()) {
                acc.add_assign(&k.matmul(b).matmul(ks));
            }
            acc
        }))
    }

    /// `b ↦ a b a*`.
    pub fn conjugation(a: &AlgebraElement<S>) -> Self {
        Self::from_kraus(std::slice::from_ref(a)).expect("one Kraus operator")
    }

    pub fn transpose_map(d: usize) -> Self {
        Self::from_fn(d, |b| b.transpose())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[S] {
        &self.coeffs
    }

    pub fn apply(&self, b: &AlgebraElement<S>) -> AlgebraElement<S> {
        let n = self.dim * self.dim;
        let mut out = AlgebraElement::zeros(self.dim);
        for (k, x) in b.entries.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for o in 0..n {
                let c = &self.coeffs[o * n + k];
                if !c.is_zero() {
                    out.entries[o] += &(c.clone() * x.clone());
                }
            }
        }
        out
    }

    pub fn try_apply(&self, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        if b.dim != self.dim {
            return argument(format!("map on {0}x{0} applied to a {1}x{1} matrix", self.dim, b.dim));
        }
        Ok(self.apply(b))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.dim * self.dim;
        let mut m = Self::zero(self.dim);
        for o in 0..n {
            for k in 0..n {
                let a = &self.coeffs[o * n + k];
                if a.is_zero() {
                    continue;
                }
                for i in 0..n {
                    let b = &other.coeffs[k * n + i];
                    if !b.is_zero() {
                        m.coeffs[o * n + i] += &(a.clone() * b.clone());
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::lincomb(&S::one(), self, &S::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::lincomb(&S::one(), self, &(-S::one()), other)
    }

    pub fn scale(&self, c: &S) -> Self {
        LinearMap { dim: self.dim, coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn lincomb(c1: &S, a: &Self, c2: &S, b: &Self) -> Self {
        LinearMap {
            dim: a.dim,
            coeffs: a
                .coeffs
                .iter()
                .zip(b.coeffs.iter())
                .map(|(x, y)| c1.clone() * x.clone() + c2.clone() * y.clone())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_zero())
    }

    /// Choi matrix `Σ E_ij ⊗ m(E_ij)`, row-major `d^2 x d^2`.
    pub fn choi(&self) -> Vec<S> {
        let d = self.dim;
        let n = d * d;
        let mut c = vec![S::zero(); n * n];
        for i in 0..d {
            for j in 0..d {
                let img = self.apply(&AlgebraElement::elementary(d, i, j));
                for k in 0..d {
                    for l in 0..d {
                        c[(i * d + k) * n + (j * d + l)] = img.entries[k * d + l].clone();
                    }
                }
            }
        }
        c
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| (a.clone() - b.clone()).modulus()).fold(0.0, f64::max)
    }
}

impl LinearMap<C64> {
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let n = self.dim * self.dim;
        let c = DMatrix::from_row_slice(n, n, &self.choi());
        hermitian_eigenvalues(&c)[0]
    }

    /// Choi matrix is (numerically) Hermitian with min eigenvalue ≥ -tol.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        let n = self.dim * self.dim;
        let c = DMatrix::from_row_slice(n, n, &self.choi());
        let skew = (&c - c.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        skew <= tol.max(1e-12) && hermitian_eigenvalues(&c)[0] >= -tol
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim * self.dim;
        let m = DMatrix::from_row_slice(n, n, &self.coeffs);
        let inv = m.try_inverse().ok_or_else(|| Error::Numeric("map is not invertible".into()))?;
        let mut coeffs = Vec::with_capacity(n * n);
        for o in 0..n {
            for k in 0..n {
                coeffs.push(inv[(o, k)]);
            }
        }
        Ok(LinearMap { dim: self.dim, coeffs })
    }

    /// Norm of a CP map, `‖m(1)‖`.
    pub fn cp_norm(&self) -> f64 {
        self.apply(&AlgebraElement::identity(self.dim)).norm()
    }
}

/// Radix-`d^2` digits of a flat tensor index, most significant first.
pub fn tuple_of_index(d: usize, slots: usize, mut idx: usize) -> Vec<usize> {
    let base = d * d;
    let mut t = vec![0; slots];
    for s in (0..slots).rev() {
        t[s] = idx % base;
        idx /= base;
    }
    t
}

/// A C-multilinear map `B^{order-1} -> B` stored by its values on basis tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearFunctional<S> {
    dim: usize,
    order: usize,
    data: Vec<AlgebraElement<S>>,
}

impl<S: Scalar> MultilinearFunctional<S> {
    fn check_shape(d: usize, order: usize) -> Result<()> {
        check_dim(d)?;
        if order == 0 || order > MAX_TENSOR_ORDER {
            return bounds(format!("tensor order {order} outside 1..={MAX_TENSOR_ORDER}"));
        }
        Ok(())
    }

    pub fn zero(d: usize, order: usize) -> Self {
        let len = (d * d).pow(order as u32 - 1);
        MultilinearFunctional { dim: d, order, data: vec![AlgebraElement::zeros(d); len] }
    }

    pub fn constant(value: AlgebraElement<S>) -> Self {
        MultilinearFunctional { dim: value.dim, order: 1, data: vec![value] }
    }

    pub fn from_data(d: usize, order: usize, data: Vec<AlgebraElement<S>>) -> Result<Self> {
        Self::check_shape(d, order)?;
        let len = (d * d).pow(order as u32 - 1);
        if data.len() != len {
            return argument(format!("order-{order} tensor needs {len} entries, got {}", data.len()));
        }
        if data.iter().any(|m| m.dim != d) {
            return argument("tensor entry of the wrong size");
        }
        Ok(MultilinearFunctional { dim: d, order, data })
    }

    /// Reads `evaluator` on every basis tuple. The evaluator is assumed
    /// multilinear.
    pub fn tabulate<F>(d: usize, order: usize, evaluator: F) -> Result<Self>
    where
        F: Fn(&[AlgebraElement<S>]) -> AlgebraElement<S> + Sync,
    {
        Self::check_shape(d, order)?;
        let slots = order - 1;
        let len = (d * d).pow(slots as u32);
        let basis: Vec<AlgebraElement<S>> = (0..d * d).map(|k| AlgebraElement::basis(d, k)).collect();
        let data: Vec<AlgebraElement<S>> = (0..len)
            .into_par_iter()
            .map(|idx| {
                let args: Vec<AlgebraElement<S>> =
                    tuple_of_index(d, slots, idx).into_iter().map(|k| basis[k].clone()).collect();
                evaluator(&args)
            })
            .collect();
        Ok(MultilinearFunctional { dim: d, order, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[AlgebraElement<S>] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|m| m.is_zero())
    }

    pub fn eval(&self, args: &[AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
        if args.len() + 1 != self.order {
            return argument(format!("order-{} functional given {} arguments", self.order, args.len()));
        }
        if args.iter().any(|a| a.dim != self.dim) {
            return argument("argument of the wrong size");
        }
        Ok(self.eval_raw(args))
    }

    /// Contraction of the tensor with the basis coordinates of `args`.
    pub(crate) fn eval_raw(&self, args: &[AlgebraElement<S>]) -> AlgebraElement<S> {
        if args.is_empty() {
            return self.data[0].clone();
        }
        let coords: Vec<SmallVec<[(usize, S); 9]>> = args.iter().map(|a| a.nonzero_coords()).collect();
        let mut out = AlgebraElement::zeros(self.dim);
        if coords.iter().any(|c| c.is_empty()) {
            return out;
        }
        let base = self.dim * self.dim;
        let m = coords.len();
        let mut pos = vec![0usize; m];
        loop {
            let mut offset = 0;
            let mut coef = S::one();
            for s in 0..m {
                let (k, c) = &coords[s][pos[s]];
                offset = offset * base + k;
                coef = coef * c.clone();
            }
            out.axpy(&coef, &self.data[offset]);
            // odometer step
            let mut s = m;
            loop {
                if s == 0 {
                    return out;
                }
                s -= 1;
                pos[s] += 1;
                if pos[s] < coords[s].len() {
                    break;
                }
                pos[s] = 0;
            }
        }
    }

    /// `alpha ∘ self`.
    pub fn map_output(&self, alpha: &LinearMap<S>) -> Self {
        MultilinearFunctional { dim: self.dim, order: self.order, data: self.data.iter().map(|m| alpha.apply(m)).collect() }
    }

    pub fn lincomb(c1: &S, a: &Self, c2: &S, b: &Self) -> Self {
        MultilinearFunctional {
            dim: a.dim,
            order: a.order,
            data: a
                .data
                .iter()
                .zip(b.data.iter())
                .map(|(x, y)| {
                    let mut z = x.scale(c1);
                    z.axpy(c2, y);
                    z
                })
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }
}

impl MultilinearFunctional<C64> {
    /// Upper bound for the multilinear norm, `Σ_tuples ‖F(E_tuple)‖` scaled
    /// by the coordinate bound `|b_k| ≤ ‖b‖`.
    pub fn norm_bound(&self) -> f64 {
        self.data.iter().map(|m| m.norm()).sum()
    }
}

/// A C-linear map on words `b_0 X b_1 ... X b_k` for `k = 0..=max_degree`.
/// Layer `k` has `k + 1` slots.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyLinearMap<S> {
    dim: usize,
    layers: Vec<MultilinearFunctional<S>>,
}

impl<S: Scalar> PolyLinearMap<S> {
    pub fn from_layers(layers: Vec<MultilinearFunctional<S>>) -> Result<Self> {
        let d = match layers.first() {
            Some(l) => l.dim,
            None => return argument("no layers"),
        };
        for (k, l) in layers.iter().enumerate() {
            if l.dim != d || l.order != k + 2 {
                return argument(format!("layer {k} must have {} slots on {d}x{d} matrices", k + 1));
            }
        }
        Ok(PolyLinearMap { dim: d, layers })
    }

    /// Tabulates `f(k, word)` for every degree `k ≤ max_degree`.
    pub fn tabulate<F>(d: usize, max_degree: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, &[AlgebraElement<S>]) -> AlgebraElement<S> + Sync,
    {
        let layers =
            (0..=max_degree).map(|k| MultilinearFunctional::tabulate(d, k + 2, |w| f(k, w))).collect::<Result<Vec<_>>>()?;
        Ok(PolyLinearMap { dim: d, layers })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layer(&self, k: usize) -> Result<&MultilinearFunctional<S>> {
        self.layers.get(k).ok_or_else(|| Error::Bounds(format!("degree {k} above max degree {}", self.max_degree())))
    }

    pub fn layers(&self) -> &[MultilinearFunctional<S>] {
        &self.layers
    }

    /// Value on the word whose coefficients are `word` (degree `word.len()-1`).
    pub fn eval(&self, word: &[AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
        if word.is_empty() {
            return argument("empty word");
        }
        self.layer(word.len() - 1)?.eval(word)
    }

    /// `alpha ∘ self`.
    pub fn map_output(&self, alpha: &LinearMap<S>) -> Self {
        PolyLinearMap { dim: self.dim, layers: self.layers.iter().map(|l| l.map_output(alpha)).collect() }
    }

    /// Keeps degrees `0..=k`.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        self.layer(k)?;
        Ok(PolyLinearMap { dim: self.dim, layers: self.layers[..=k].to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, random_functional, random_kraus_map, rng};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn apply_map_examples() {
        let mut r = rng(1);
        let b = random_element::<C64>(&mut r, 2, 1.0);
        assert_eq!(LinearMap::identity(2).apply(&b), b);
        assert_eq!(LinearMap::scalar(2, c(2.0)).apply(&b), b.scale(&c(2.0)));
        let flip = AlgebraElement::from_rows(vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let m = LinearMap::conjugation(&flip);
        assert_eq!(m.apply(&AlgebraElement::diag(vec![c(1.0), c(2.0)])), AlgebraElement::diag(vec![c(2.0), c(1.0)]));
        assert!(LinearMap::<C64>::identity(2).try_apply(&AlgebraElement::identity(3)).is_err());
    }

    #[test]
    fn cp_examples() {
        assert!(LinearMap::<C64>::identity(2).is_completely_positive(CP_TOL));
        let t = LinearMap::<C64>::transpose_map(2);
        assert!(!t.is_completely_positive(CP_TOL));
        assert!((t.choi_min_eigenvalue() + 1.0).abs() < 1e-12);
        let mut r = rng(2);
        for _ in 0..5 {
            let a = random_element::<C64>(&mut r, 3, 1.0);
            assert!(LinearMap::conjugation(&a).is_completely_positive(CP_TOL));
        }
        assert!(!LinearMap::<C64>::scalar(2, c(-1.0)).is_completely_positive(CP_TOL));
    }

    #[test]
    fn cp_cone() {
        let mut r = rng(3);
        for _ in 0..10 {
            let a = random_kraus_map(&mut r, 2, 2, 1.0);
            let b = random_kraus_map(&mut r, 2, 3, 1.0);
            let s = LinearMap::lincomb(&c(0.3), &a, &c(1.7), &b);
            assert!(s.is_completely_positive(CP_TOL));
        }
    }

    #[test]
    fn compose_is_application_order() {
        let mut r = rng(4);
        let a = random_kraus_map(&mut r, 2, 2, 1.0);
        let t = LinearMap::<C64>::transpose_map(2);
        let b = random_element::<C64>(&mut r, 2, 1.0);
        let lhs = a.compose(&t).apply(&b);
        let rhs = a.apply(&t.apply(&b));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let inv = a.inverse().unwrap();
        assert!(inv.compose(&a).max_abs_diff(&LinearMap::identity(2)) < 1e-9);
    }

    #[test]
    fn eval_examples() {
        let lam = AlgebraElement::<C64>::diag(vec![c(1.0), c(2.0)]);
        assert_eq!(MultilinearFunctional::constant(lam.clone()).eval(&[]).unwrap(), lam);
        // d = 1: c z1 z2 z3
        let f = MultilinearFunctional::tabulate(1, 4, |_| AlgebraElement::scalar(1, C64::new(0.5, 1.0))).unwrap();
        let z = |x: f64, y: f64| AlgebraElement::scalar(1, C64::new(x, y));
        let v = f.eval(&[z(1.0, 1.0), z(2.0, 0.0), z(0.0, -1.0)]).unwrap();
        let want = C64::new(0.5, 1.0) * C64::new(1.0, 1.0) * C64::new(2.0, 0.0) * C64::new(0.0, -1.0);
        assert!((v.entries()[0] - want).norm() < 1e-14);
        assert!(f.eval(&[z(1.0, 0.0)]).is_err());
    }

    #[test]
    fn tabulate_examples() {
        let id = MultilinearFunctional::<C64>::tabulate(2, 2, |a| a[0].clone()).unwrap();
        for k in 0..4 {
            assert_eq!(id.data()[k], AlgebraElement::basis(2, k));
        }
        let prod = MultilinearFunctional::<C64>::tabulate(1, 3, |a| a[0].matmul(&a[1])).unwrap();
        assert!(prod.data().iter().all(|m| m.entries()[0] == c(1.0)));
        let mut r = rng(5);
        let f = random_functional::<C64>(&mut r, 2, 4, 1.0);
        let g = MultilinearFunctional::tabulate(2, 4, |a| f.eval(a).unwrap()).unwrap();
        assert_eq!(f, g);
        assert!(MultilinearFunctional::<C64>::tabulate(4, 2, |a| a[0].clone()).is_err());
    }

    #[test]
    fn exact_rational_eval() {
        type Q = Complex<BigRational>;
        let mut r = rng(6);
        let f = random_functional::<Q>(&mut r, 2, 3, 1.0);
        let a = random_element::<Q>(&mut r, 2, 1.0);
        let a2 = random_element::<Q>(&mut r, 2, 1.0);
        let b = random_element::<Q>(&mut r, 2, 1.0);
        let lhs = f.eval(&[&a + &a2, b.clone()]).unwrap();
        let rhs = &f.eval(&[a, b.clone()]).unwrap() + &f.eval(&[a2, b]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn poly_linear_examples() {
        let p = PolyLinearMap::<C64>::tabulate(2, 2, |_, w| AlgebraElement::product(2, w)).unwrap();
        let mut r = rng(7);
        let b = random_element::<C64>(&mut r, 2, 1.0);
        assert_eq!(p.eval(std::slice::from_ref(&b)).unwrap(), b);
        assert!(matches!(p.eval(&vec![b.clone(); 4]), Err(Error::Bounds(_))));
        let ones = PolyLinearMap::<C64>::tabulate(1, 2, |_, _| AlgebraElement::identity(1)).unwrap();
        let one = AlgebraElement::identity(1);
        assert_eq!(ones.eval(&[one.clone(), one.clone(), one]).unwrap(), AlgebraElement::identity(1));
    }

    proptest! {
        #[test]
        fn multilinear_in_each_slot(seed in 0u64..500, slot in 0usize..3, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let mut r = rng(seed);
            let f = random_functional::<C64>(&mut r, 2, 4, 1.0);
            let args: Vec<_> = (0..3).map(|_| random_element::<C64>(&mut r, 2, 1.0)).collect();
            let other = random_element::<C64>(&mut r, 2, 1.0);
            let z = C64::new(re, im);
            let mut mixed = args.clone();
            mixed[slot] = &args[slot].scale(&z) + &other;
            let lhs = f.eval(&mixed).unwrap();
            let mut alt = args.clone();
            alt[slot] = other;
            let rhs = &f.eval(&args).unwrap().scale(&z) + &f.eval(&alt).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * (1.0 + lhs.max_abs()));
        }

        #[test]
        fn compose_then_apply(seed in 0u64..500) {
            let mut r = rng(seed);
            let a = random_kraus_map(&mut r, 2, 2, 1.0);
            let b = random_kraus_map(&mut r, 2, 1, 1.0);
            let x = random_element::<C64>(&mut r, 2, 1.0);
            let lhs = a.compose(&b).apply(&x);
            let rhs = a.apply(&b.apply(&x));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * (1.0 + lhs.max_abs()));
        }
    }
}
