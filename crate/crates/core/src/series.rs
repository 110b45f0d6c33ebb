//! Truncated B-series `(F^[1], ..., F^[N])` and nested evaluation `F^[π]`.

use crate::balg::{check_dim, AlgebraElement, LinearMap, MultilinearFunctional};
use crate::error::{argument, bounds, Result};
use crate::ncpart::{nesting_forest, Coloring, NCPartition, NestingForest};
use crate::scalar::Scalar;

/// Largest supported truncation order.
pub const N_MAX: usize = 9;

#[derive(Clone, Debug, PartialEq)]
pub struct BSeries<S> {
    dim: usize,
    terms: Vec<MultilinearFunctional<S>>,
}

fn check_trunc(n: usize) -> Result<()> {
    if n == 0 || n > N_MAX {
        bounds(format!("truncation {n} outside 1..={N_MAX}"))
    } else {
        Ok(())
    }
}

impl<S: Scalar> BSeries<S> {
    pub fn zero(d: usize, trunc: usize) -> Result<Self> {
        check_dim(d)?;
        check_trunc(trunc)?;
        Ok(BSeries { dim: d, terms: (1..=trunc).map(|n| MultilinearFunctional::zero(d, n)).collect() })
    }

    pub fn from_terms(terms: Vec<MultilinearFunctional<S>>) -> Result<Self> {
        check_trunc(terms.len())?;
        let d = terms[0].dim();
        for (i, t) in terms.iter().enumerate() {
            if t.order() != i + 1 || t.dim() != d {
                return argument(format!("term {} has order {} on {}x{} matrices", i + 1, t.order(), t.dim(), t.dim()));
            }
        }
        Ok(BSeries { dim: d, terms })
    }

    /// Tabulates `term n = f(n, args)`.
    pub fn from_fn<F>(d: usize, trunc: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, &[AlgebraElement<S>]) -> AlgebraElement<S> + Sync,
    {
        check_dim(d)?;
        check_trunc(trunc)?;
        let terms =
            (1..=trunc).map(|n| MultilinearFunctional::tabulate(d, n, |a| f(n, a))).collect::<Result<Vec<_>>>()?;
        Ok(BSeries { dim: d, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[MultilinearFunctional<S>] {
        &self.terms
    }

    /// Term of order `n` (1-based).
    pub fn term(&self, n: usize) -> Result<&MultilinearFunctional<S>> {
        if n == 0 || n > self.trunc() {
            return bounds(format!("order {n} requested from a series truncated at {}", self.trunc()));
        }
        Ok(&self.terms[n - 1])
    }

    pub fn truncate(&self, trunc: usize) -> Result<Self> {
        if trunc == 0 || trunc > self.trunc() {
            return bounds(format!("cannot truncate order {} to {trunc}", self.trunc()));
        }
        Ok(BSeries { dim: self.dim, terms: self.terms[..trunc].to_vec() })
    }

    /// Copy with term `n` replaced.
    pub fn with_term(&self, n: usize, term: MultilinearFunctional<S>) -> Result<Self> {
        let mut terms = self.terms.clone();
        if n == 0 || n > terms.len() {
            return bounds(format!("no term of order {n}"));
        }
        terms[n - 1] = term;
        Self::from_terms(terms)
    }

    /// `alpha ∘ F`, termwise.
    pub fn compose_map(&self, alpha: &LinearMap<S>) -> Result<Self> {
        if alpha.dim() != self.dim {
            return argument("map and series on different matrix sizes");
        }
        Ok(BSeries { dim: self.dim, terms: self.terms.iter().map(|t| t.map_output(alpha)).collect() })
    }

    /// `c1 F1 + c2 F2`.
    pub fn linear_combine(c1: &S, f1: &Self, c2: &S, f2: &Self) -> Result<Self> {
        if f1.dim != f2.dim || f1.trunc() != f2.trunc() {
            return argument("series of different shapes");
        }
        Ok(BSeries {
            dim: f1.dim,
            terms: f1.terms.iter().zip(f2.terms.iter()).map(|(a, b)| MultilinearFunctional::lincomb(c1, a, c2, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::linear_combine(&S::one(), self, &S::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::linear_combine(&S::one(), self, &(-S::one()), other)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::linear_combine(c, self, &S::zero(), self).expect("same shape")
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-S::one()))
    }

    /// `F^[1] + Σ_{n ≥ 2} F^[n](b, ..., b)` over the stored terms.
    pub fn eval_at(&self, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        if b.dim() != self.dim {
            return argument("point of the wrong size");
        }
        let mut acc = AlgebraElement::zeros(self.dim);
        for (i, t) in self.terms.iter().enumerate() {
            acc.add_assign(&t.eval_raw(&vec![b.clone(); i]));
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_zero())
    }

    /// Largest entry difference, relative to the larger of the two terms'
    /// sizes when those exceed one. Compares the common orders.
    pub fn max_error(&self, other: &Self) -> f64 {
        self.terms
            .iter()
            .zip(other.terms.iter())
            .map(|(a, b)| a.max_abs_diff(b) / 1f64.max(a.max_abs()).max(b.max_abs()))
            .fold(0.0, f64::max)
    }
}

/// A partition prepared for repeated nested evaluation.
#[derive(Clone, Debug)]
pub struct NestPlan {
    pi: NCPartition,
    forest: NestingForest,
    /// Series index (0-based colour) per block.
    colors: Vec<usize>,
}

impl NestPlan {
    pub fn new(pi: &NCPartition, coloring: Option<&Coloring>) -> Self {
        let colors = match coloring {
            Some(c) => (0..pi.num_blocks()).map(|i| c.color(i) as usize - 1).collect(),
            None => vec![0; pi.num_blocks()],
        };
        NestPlan { pi: pi.clone(), forest: nesting_forest(pi), colors }
    }

    pub fn partition(&self) -> &NCPartition {
        &self.pi
    }

    /// True when some block would read a zero term.
    pub fn hits_zero<S: Scalar>(&self, series: &[&BSeries<S>]) -> bool {
        self.pi.blocks().iter().zip(self.colors.iter()).any(|(b, &c)| series[c].terms[b.len() - 1].is_zero())
    }

    fn check<S: Scalar>(&self, series: &[&BSeries<S>], nargs: usize) -> Result<()> {
        if series.is_empty() || series.len() > 3 {
            return argument(format!("{} series given, expected 1 to 3", series.len()));
        }
        let d = series[0].dim;
        if series.iter().any(|s| s.dim != d) {
            return argument("series on different matrix sizes");
        }
        if nargs + 1 != self.pi.n() {
            return argument(format!("partition of {} needs {} arguments, got {nargs}", self.pi.n(), self.pi.n() - 1));
        }
        for (b, &c) in self.pi.blocks().iter().zip(self.colors.iter()) {
            let s = series.get(c).ok_or_else(|| crate::Error::Argument(format!("colour {} has no series", c + 1)))?;
            if b.len() > s.trunc() {
                return bounds(format!("block of size {} needs a series of order ≥ {}", b.len(), b.len()));
            }
        }
        Ok(())
    }

    /// `(F_1, F_2, ...)^[π, c](args)` without validation.
    pub(crate) fn eval_raw<S: Scalar>(&self, series: &[&BSeries<S>], args: &[AlgebraElement<S>]) -> AlgebraElement<S> {
        let d = series[0].dim;
        let mut acc: Option<AlgebraElement<S>> = None;
        for &r in &self.forest.roots {
            let v = self.eval_block(series, args, r);
            acc = Some(match acc {
                None => v,
                Some(a) => a.matmul(&v),
            });
            let last = *self.pi.blocks()[r].last().expect("nonempty block");
            if last < self.pi.n() {
                acc = acc.map(|a| a.matmul(&args[last - 1]));
            }
        }
        acc.unwrap_or_else(|| AlgebraElement::identity(d))
    }

    fn eval_block<S: Scalar>(&self, series: &[&BSeries<S>], args: &[AlgebraElement<S>], w: usize) -> AlgebraElement<S> {
        let block = &self.pi.blocks()[w];
        let term = &series[self.colors[w]].terms[block.len() - 1];
        if block.len() == 1 {
            return term.data()[0].clone();
        }
        let children = &self.forest.children[w];
        let mut slot_args = Vec::with_capacity(block.len() - 1);
        for j in 0..block.len() - 1 {
            // b_{v_j} (child value · b_{max child})*
            let mut a = args[block[j] - 1].clone();
            for &(gap, c) in children {
                if gap == j {
                    let v = self.eval_block(series, args, c);
                    let cmax = *self.pi.blocks()[c].last().expect("nonempty block");
                    a = a.matmul(&v).matmul(&args[cmax - 1]);
                }
            }
            slot_args.push(a);
        }
        term.eval_raw(&slot_args)
    }

    pub fn eval<S: Scalar>(&self, series: &[&BSeries<S>], args: &[AlgebraElement<S>]) -> Result<AlgebraElement<S>> {
        self.check(series, args.len())?;
        if args.iter().any(|a| a.dim() != series[0].dim) {
            return argument("argument of the wrong size");
        }
        Ok(self.eval_raw(series, args))
    }
}

/// Nested evaluation `F^[π](args)`, or the coloured form when several
/// series and a colouring are given.
pub fn nested_eval<S: Scalar>(
    series: &[&BSeries<S>],
    pi: &NCPartition,
    coloring: Option<&Coloring>,
    args: &[AlgebraElement<S>],
) -> Result<AlgebraElement<S>> {
    check_palette(series, coloring)?;
    NestPlan::new(pi, coloring).eval(series, args)
}

fn check_palette<S: Scalar>(series: &[&BSeries<S>], coloring: Option<&Coloring>) -> Result<()> {
    let palette = coloring.map(|c| c.palette() as usize).unwrap_or(1);
    if palette != series.len() {
        return argument(format!("palette of {palette} colours for {} series", series.len()));
    }
    Ok(())
}

/// Tabulated `F^[π]` as an order-n functional.
pub fn nested_functional<S: Scalar>(
    series: &[&BSeries<S>],
    pi: &NCPartition,
    coloring: Option<&Coloring>,
) -> Result<MultilinearFunctional<S>> {
    check_palette(series, coloring)?;
    let plan = NestPlan::new(pi, coloring);
    plan.check(series, pi.n() - 1)?;
    MultilinearFunctional::tabulate(series[0].dim, pi.n(), |a| plan.eval_raw(series, a))
}
