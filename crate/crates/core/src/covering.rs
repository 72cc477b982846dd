//! Finite coverings of the mixed Hölder unit ball by quantized sparse-grid
//! approximants.
//!
//! A [`CoveringCode`] stores, for every `(kbar, sbar)` of the trailing
//! `d - 1` coordinates with `|kbar|_1 <= m`, the univariate quantizer code of
//! the normalized slice functional [`KFunction`] at level `m - |kbar|_1`.

use num_bigint::BigUint;
use num_traits::One;
use smallvec::SmallVec;

use crate::combinatorics::{b_constant, binom, binom_f64};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::oracle::{Oracle, Point};
use crate::tensor::{
    levels_up_to, second_difference_stencil, sparse_truncate_with, MultiIndex,
    SparseFaberExpansion,
};
use crate::univariate::{
    active_shift, check_alpha, faber_eval_level, pow2, quantize, UnivariateQuantizedCode,
};

/// `K_{kbar,sbar}(f)(x_1)`: the product second difference of `f(x_1, .)` at
/// `2^{-kbar} sbar`, scaled by `prod_j (-1/2) 2^{alpha(k_j+1)}`.
///
/// The stencil and the scale factor are fixed at construction; each call
/// samples `f` at `3^{d-1}` points of the `x_1` fiber.
pub struct KFunction<'a, O: ?Sized> {
    f: &'a O,
    stencil: Vec<(f64, Point)>,
}

impl<'a, O: Oracle + ?Sized> KFunction<'a, O> {
    pub fn new(f: &'a O, kbar: &MultiIndex, sbar: &[u64], alpha: f64) -> Self {
        assert_eq!(kbar.dim() + 1, f.dim(), "kbar must cover coordinates 2..d");
        let k = kbar.as_slice();
        let base: Point = k.iter().zip(sbar).map(|(&ki, &si)| si as f64 / pow2(ki)).collect();
        let step: Point = k.iter().map(|&ki| 1.0 / pow2(ki + 1)).collect();
        let scale = (alpha * (kbar.l1() as f64 + kbar.dim() as f64)).exp2();
        let mut stencil = Vec::with_capacity(3usize.pow(kbar.dim() as u32));
        second_difference_stencil(&base, &step, |w, p| {
            let mut full: Point = SmallVec::with_capacity(p.len() + 1);
            full.push(0.0);
            full.extend_from_slice(p);
            stencil.push((scale * w, full));
        });
        Self { f, stencil }
    }

    pub fn eval(&self, x1: f64) -> f64 {
        let mut acc = 0.0;
        let mut p: Point = SmallVec::new();
        for (w, pt) in &self.stencil {
            p.clear();
            p.extend_from_slice(pt);
            p[0] = x1;
            acc += w * self.f.eval(&p);
        }
        acc
    }
}

impl<O: Oracle + ?Sized> Oracle for KFunction<'_, O> {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, x: &[f64]) -> f64 {
        KFunction::eval(self, x[0])
    }
}

/// Quantized approximant `S_m(f)` of a `d`-variate function.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringCode {
    dim: usize,
    level: u32,
    alpha: f64,
    keys: Vec<MultiIndex>,
    offsets: Vec<usize>,
    banks: Vec<UnivariateQuantizedCode>,
}

/// Canonical `kbar` blocks and their starting bank offsets.
fn bank_layout(dim: usize, level: u32) -> (Vec<MultiIndex>, Vec<usize>) {
    let keys = levels_up_to(dim - 1, level);
    let mut offsets = Vec::with_capacity(keys.len());
    let mut acc = 0;
    for k in &keys {
        offsets.push(acc);
        acc += k.shift_count();
    }
    (keys, offsets)
}

/// Number of univariate banks of a covering code, `sum_{|kbar|<=m} 2^{|kbar|}`.
pub fn bank_count(dim: usize, level: u32) -> usize {
    if dim == 1 {
        1
    } else {
        (0..=level as u64)
            .map(|t| (1usize << t) * binom(t + dim as u64 - 2, dim as u64 - 2) as usize)
            .sum()
    }
}

impl CoveringCode {
    /// Rebuilds a code from raw integer banks in canonical `(kbar, sbar)`
    /// order, validating every univariate chain.
    pub fn from_banks(dim: usize, level: u32, alpha: f64, banks: Vec<Vec<i64>>) -> Result<Self> {
        check_alpha(alpha)?;
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let (keys, offsets) = bank_layout(dim, level);
        if banks.len() != bank_count(dim, level) {
            return Err(Error::CorruptCode(format!(
                "expected {} banks, got {}",
                bank_count(dim, level),
                banks.len()
            )));
        }
        let mut out = Vec::with_capacity(banks.len());
        let mut it = banks.into_iter();
        for k in &keys {
            for _ in 0..k.shift_count() {
                let l = it.next().expect("bank count checked");
                out.push(UnivariateQuantizedCode::new(level - k.l1(), alpha, l)?);
            }
        }
        Ok(Self {
            dim,
            level,
            alpha,
            keys,
            offsets,
            banks: out,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Univariate codes in canonical `(kbar, sbar)` order.
    pub fn banks(&self) -> &[UnivariateQuantizedCode] {
        &self.banks
    }

    /// `(kbar, sbar, code)` triples in canonical order.
    pub fn iter_banks(&self) -> impl Iterator<Item = (&MultiIndex, Vec<u64>, &UnivariateQuantizedCode)> {
        self.keys.iter().zip(&self.offsets).flat_map(move |(k, &off)| {
            (0..k.shift_count()).map(move |flat| (k, k.unflatten_shift(flat), &self.banks[off + flat]))
        })
    }

    /// Concatenated integer banks; equal keys mean equal approximants.
    pub fn canonical_key(&self) -> Vec<i64> {
        self.banks.iter().flat_map(|b| b.l().iter().copied()).collect()
    }

    /// Evaluates `S_m(f)(x)`; zero when `x` leaves the unit cube.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return 0.0;
        }
        let mut sum = 0.0;
        let trailing = self.dim as f64 - 1.0;
        'keys: for (k, &off) in self.keys.iter().zip(&self.offsets) {
            let mut w = 1.0;
            let mut flat = 0usize;
            for (&ki, &xi) in k.as_slice().iter().zip(&x[1..]) {
                let s = active_shift(ki, xi);
                let v = faber_eval_level(ki, s, xi);
                if v == 0.0 {
                    continue 'keys;
                }
                w *= v;
                flat = (flat << ki) | s as usize;
            }
            let scale = (-self.alpha * (k.l1() as f64 + trailing)).exp2();
            sum += scale * w * self.banks[off + flat].eval(x[0]);
        }
        sum
    }

    /// Faber coefficients of the approximant, an element of `F^d(m)`.
    pub fn to_expansion(&self) -> SparseFaberExpansion {
        sparse_truncate_with(self, self.level, self.dim, Exec::Sequential)
    }
}

impl Oracle for CoveringCode {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        CoveringCode::eval(self, x)
    }
}

/// The all-zero code, `S_m(0)`.
pub fn zero_covering(dim: usize, level: u32, alpha: f64) -> Result<CoveringCode> {
    let banks = bank_layout_lengths(dim, level);
    CoveringCode::from_banks(dim, level, alpha, banks.into_iter().map(|n| vec![0; n]).collect())
}

fn bank_layout_lengths(dim: usize, level: u32) -> Vec<usize> {
    if dim == 0 {
        return Vec::new();
    }
    let (keys, _) = bank_layout(dim, level);
    keys.iter()
        .flat_map(|k| std::iter::repeat_n(1usize << (level - k.l1() + 1), k.shift_count()))
        .collect()
}

pub fn covering_eval(code: &CoveringCode, x: &[f64]) -> f64 {
    code.eval(x)
}

/// Builds `S_m(f)` by quantizing every slice functional.
pub fn build_covering<O: Oracle + ?Sized>(f: &O, m: u32, alpha: f64) -> Result<CoveringCode> {
    build_covering_with(f, m, alpha, Exec::default())
}

pub fn build_covering_with<O: Oracle + ?Sized>(
    f: &O,
    m: u32,
    alpha: f64,
    exec: Exec,
) -> Result<CoveringCode> {
    check_alpha(alpha)?;
    let dim = f.dim();
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let (keys, offsets) = bank_layout(dim, m);
    let total = bank_count(dim, m);
    let banks = exec.map(total, |i| {
        let b = offsets.partition_point(|&o| o <= i) - 1;
        let kbar = &keys[b];
        let sbar = kbar.unflatten_shift(i - offsets[b]);
        let k = KFunction::new(f, kbar, &sbar, alpha);
        quantize(|t| k.eval(t), m - kbar.l1(), alpha)
    });
    let banks = banks.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CoveringCode {
        dim,
        level: m,
        alpha,
        keys,
        offsets,
        banks,
    })
}

/// `B^d 2^{-alpha m} binom(m+d, d-1)`.
pub fn covering_error_bound(alpha: f64, d: usize, m: u32) -> f64 {
    b_constant(alpha).powi(d as i32)
        * (-alpha * m as f64).exp2()
        * binom_f64(m as u64 + d as u64, d as u64 - 1)
}

/// Upper bound `3^{2^{m+1} binom(m+d-1, d-1)}` on the number of distinct
/// covering approximants.
pub fn cardinality_bound(m: u32, d: usize) -> BigUint {
    let exponent = (1u64 << (m + 1)) * binom(m as u64 + d as u64 - 1, d as u64 - 1);
    let exponent = u32::try_from(exponent).expect("cardinality exponent too large");
    BigUint::from(3u32).pow(exponent).max(BigUint::one())
}
