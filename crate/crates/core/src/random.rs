//! Seeded random instances. The generator is ChaCha8, so a seed gives the
//! same instance on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::balg::{AlgebraElement, LinearMap, MultilinearFunctional, PolyLinearMap};
use crate::error::{argument, Result};
use crate::scalar::Scalar;
use crate::series::BSeries;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_element<S: Scalar>(rng: &mut impl Rng, d: usize, scale: f64) -> AlgebraElement<S> {
    AlgebraElement::from_entries(d, (0..d * d).map(|_| S::random(rng, scale)).collect()).expect("square")
}

pub fn random_hermitian<S: Scalar>(rng: &mut impl Rng, d: usize, scale: f64) -> AlgebraElement<S> {
    let a = random_element::<S>(rng, d, scale);
    (&a + &a.adjoint()).scale(&S::from_real(0.5))
}

/// A CP map with `n` random Kraus operators.
pub fn random_kraus_map<S: Scalar>(rng: &mut impl Rng, d: usize, n: usize, scale: f64) -> LinearMap<S> {
    let kraus: Vec<_> = (0..n).map(|_| random_element::<S>(rng, d, scale)).collect();
    LinearMap::from_kraus(&kraus).expect("nonempty")
}

/// A map with independent random coefficients (generally not CP).
pub fn random_linear_map<S: Scalar>(rng: &mut impl Rng, d: usize, scale: f64) -> LinearMap<S> {
    LinearMap::from_matrix(d, (0..d.pow(4)).map(|_| S::random(rng, scale)).collect()).expect("shape")
}

pub fn random_functional<S: Scalar>(rng: &mut impl Rng, d: usize, order: usize, scale: f64) -> MultilinearFunctional<S> {
    let len = (d * d).pow(order as u32 - 1);
    let data = (0..len).map(|_| random_element::<S>(rng, d, scale)).collect();
    MultilinearFunctional::from_data(d, order, data).expect("shape")
}

/// Series with term `n` drawn at size `scale^n`.
pub fn random_series<S: Scalar>(rng: &mut impl Rng, d: usize, trunc: usize, scale: f64) -> BSeries<S> {
    let terms = (1..=trunc).map(|n| random_functional::<S>(rng, d, n, scale.powi(n as i32))).collect();
    BSeries::from_terms(terms).expect("shape")
}

/// Dense `rows x cols` matrix product helper for the word-map model.
fn dense_mul<S: Scalar>(a: &[S], b: &[S], rows: usize, inner: usize, cols: usize) -> Vec<S> {
    let mut out = vec![S::zero(); rows * cols];
    for i in 0..rows {
        for k in 0..inner {
            let x = &a[i * inner + k];
            if x.is_zero() {
                continue;
            }
            for j in 0..cols {
                out[i * cols + j] += &(x.clone() * b[k * cols + j].clone());
            }
        }
    }
    out
}

/// Random completely positive `β : B<X> -> B` from [`operator_word_map`]
/// with random `T` (Hermitian) and `V`.
pub fn random_cp_word_map<S: Scalar>(
    rng: &mut impl Rng,
    d: usize,
    aux: usize,
    max_degree: usize,
    scale: f64,
) -> PolyLinearMap<S> {
    let n = d * aux;
    let t = random_hermitian::<S>(rng, n, scale);
    let v: Vec<S> = (0..n * d).map(|_| S::random(rng, scale)).collect();
    operator_word_map(d, aux, &t, &v, max_degree).expect("shape")
}

/// `β[b0 X b1 ... X bk] = V* (b0⊗1) T (b1⊗1) T ... T (bk⊗1) V` with `T` on
/// `C^d ⊗ C^aux` and `V : C^d -> C^d ⊗ C^aux` given row-major (`d·aux` rows,
/// `d` columns). Completely positive whenever `T` is Hermitian.
pub fn operator_word_map<S: Scalar>(
    d: usize,
    aux: usize,
    t: &AlgebraElement<S>,
    v: &[S],
    max_degree: usize,
) -> Result<PolyLinearMap<S>> {
    let n = d * aux;
    if aux == 0 || t.dim() != n || v.len() != n * d {
        return argument(format!("operator model needs T of size {n} and V with {} entries", n * d));
    }
    let mut vstar = vec![S::zero(); d * n];
    for i in 0..n {
        for j in 0..d {
            vstar[j * n + i] = v[i * d + j].conj();
        }
    }
    let t = t.entries().to_vec();
    let ampliate = |b: &AlgebraElement<S>| {
        let mut m = vec![S::zero(); n * n];
        for i in 0..d {
            for j in 0..d {
                for a in 0..aux {
                    m[(i * aux + a) * n + (j * aux + a)] = b.get(i, j).clone();
                }
            }
        }
        m
    };
    PolyLinearMap::tabulate(d, max_degree, |_, word| {
        let mut acc = ampliate(&word[0]);
        for b in &word[1..] {
            acc = dense_mul(&acc, &t, n, n, n);
            acc = dense_mul(&acc, &ampliate(b), n, n, n);
        }
        let left = dense_mul(&vstar, &acc, d, n, n);
        AlgebraElement::from_entries(d, dense_mul(&left, &v, d, n, d)).expect("square")
    })
}
