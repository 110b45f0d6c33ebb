//! Elements of `B<X>`: sums of words `b_0 X b_1 X ... X b_k`.

use crate::balg::AlgebraElement;
use crate::error::{argument, Result};
use crate::scalar::Scalar;

/// `b_0 X b_1 ... X b_k`, stored as its `k + 1` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Word<S> {
    coeffs: Vec<AlgebraElement<S>>,
}

impl<S: Scalar> Word<S> {
    pub fn new(coeffs: Vec<AlgebraElement<S>>) -> Result<Self> {
        let d = match coeffs.first() {
            Some(c) => c.dim(),
            None => return argument("word without coefficients"),
        };
        if coeffs.iter().any(|c| c.dim() != d) {
            return argument("word coefficients of different sizes");
        }
        Ok(Word { coeffs })
    }

    pub fn constant(b: AlgebraElement<S>) -> Self {
        Word { coeffs: vec![b] }
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    /// Number of `X`s.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[AlgebraElement<S>] {
        &self.coeffs
    }

    /// `(b_0 X ... X b_k)* = b_k* X ... X b_0*`.
    pub fn adjoint(&self) -> Self {
        Word { coeffs: self.coeffs.iter().rev().map(|c| c.adjoint()).collect() }
    }

    /// Concatenation; the touching coefficients multiply.
    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs[..self.coeffs.len() - 1].to_vec();
        coeffs.push(self.coeffs[self.coeffs.len() - 1].matmul(&other.coeffs[0]));
        coeffs.extend(other.coeffs[1..].iter().cloned());
        Word { coeffs }
    }
}

/// A finite sum of words.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPolynomial<S> {
    dim: usize,
    words: Vec<Word<S>>,
}

impl<S: Scalar> NcPolynomial<S> {
    pub fn zero(d: usize) -> Self {
        NcPolynomial { dim: d, words: Vec::new() }
    }

    pub fn constant(b: AlgebraElement<S>) -> Self {
        NcPolynomial { dim: b.dim(), words: vec![Word::constant(b)] }
    }

    /// The variable `X`.
    pub fn x(d: usize) -> Self {
        let one = AlgebraElement::identity(d);
        NcPolynomial { dim: d, words: vec![Word { coeffs: vec![one.clone(), one] }] }
    }

    pub fn from_words(d: usize, words: Vec<Word<S>>) -> Result<Self> {
        if words.iter().any(|w| w.dim() != d) {
            return argument("word of the wrong size");
        }
        Ok(NcPolynomial { dim: d, words })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[Word<S>] {
        &self.words
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut words = self.words.clone();
        words.extend(other.words.iter().cloned());
        NcPolynomial { dim: self.dim, words }
    }

    pub fn scale(&self, c: &S) -> Self {
        let words = self
            .words
            .iter()
            .map(|w| {
                let mut coeffs = w.coeffs.clone();
                coeffs[0] = coeffs[0].scale(c);
                Word { coeffs }
            })
            .collect();
        NcPolynomial { dim: self.dim, words }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-S::one())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut words = Vec::with_capacity(self.words.len() * other.words.len());
        for a in &self.words {
            for b in &other.words {
                words.push(a.mul(b));
            }
        }
        NcPolynomial { dim: self.dim, words }
    }

    /// Left multiplication by `b`.
    pub fn left_mul(&self, b: &AlgebraElement<S>) -> Self {
        NcPolynomial::constant(b.clone()).mul(self)
    }

    pub fn adjoint(&self) -> Self {
        NcPolynomial { dim: self.dim, words: self.words.iter().map(|w| w.adjoint()).collect() }
    }

    pub fn degree(&self) -> usize {
        self.words.iter().map(|w| w.degree()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_element, rng};
    use num_complex::Complex;

    type C64 = Complex<f64>;

    #[test]
    fn word_algebra() {
        let mut r = rng(1);
        let e: Vec<AlgebraElement<C64>> = (0..5).map(|_| random_element(&mut r, 2, 1.0)).collect();
        let u = Word::new(e[..3].to_vec()).unwrap();
        let v = Word::new(e[3..].to_vec()).unwrap();
        let uv = u.mul(&v);
        assert_eq!(uv.degree(), 3);
        assert_eq!(uv.coeffs()[2], e[2].matmul(&e[3]));
        // (uv)* = v* u*
        let lhs = uv.adjoint();
        let rhs = v.adjoint().mul(&u.adjoint());
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            assert!(a.max_abs_diff(b) < 1e-14);
        }
        let x = NcPolynomial::<C64>::x(2);
        assert_eq!(x.mul(&x).degree(), 2);
        assert_eq!(x.adjoint(), x);
    }
}
