//! Pointwise-evaluable functions on the unit cube.

use dashmap::DashMap;
use smallvec::SmallVec;
use std::sync::Arc;

/// Stack-allocated point; dimensions above 8 spill to the heap.
pub type Point = SmallVec<[f64; 8]>;

/// A real function on `[0,1]^d` that can be sampled pointwise.
///
/// Implementations must be pure and tolerate concurrent calls.
pub trait Oracle: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

impl<O: Oracle + ?Sized + Send> Oracle for Box<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

impl<O: Oracle + ?Sized + Send> Oracle for Arc<O> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

/// Wraps a closure as an oracle of fixed dimension.
#[derive(Clone)]
pub struct FnOracle<F> {
    dim: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Oracle for FnOracle<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.f)(x)
    }
}

/// Convenience constructor for univariate closures.
pub fn univariate<F>(f: F) -> FnOracle<impl Fn(&[f64]) -> f64 + Sync>
where
    F: Fn(f64) -> f64 + Sync,
{
    FnOracle::new(1, move |x: &[f64]| f(x[0]))
}

type Key = SmallVec<[u64; 8]>;

/// Memoizes an oracle on exact point coordinates (bit patterns).
///
/// The encoder samples almost exclusively at dyadic points, which are exact
/// in binary floating point, so repeated stencil evaluations hit the cache.
pub struct MemoOracle<O> {
    inner: O,
    cache: DashMap<Key, f64>,
}

impl<O: Oracle> MemoOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            cache: DashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }
}

impl<O: Oracle> Oracle for MemoOracle<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let key: Key = x.iter().map(|v| v.to_bits()).collect();
        if let Some(v) = self.cache.get(&key) {
            return *v;
        }
        let v = self.inner.eval(x);
        self.cache.insert(key, v);
        v
    }
}
