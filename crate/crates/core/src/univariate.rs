//! Univariate Faber–Schauder basis, truncation `R_m` and the greedy
//! quantizer `S_f`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest |f(0)| accepted as "vanishing" by the quantizer.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Relative tolerance for detecting a tie between two rounding candidates.
pub const TIE_RTOL: f64 = 1e-12;

/// The hat `(1 - |x - 1|)_+`, supported on `[0, 2]`.
#[inline]
pub fn hat(x: f64) -> f64 {
    (1.0 - (x - 1.0).abs()).max(0.0)
}

#[inline]
pub(crate) fn pow2(k: u32) -> f64 {
    (1u64 << k) as f64
}

/// Index `(k, s)` of a Faber function: level `k >= -1`, shift `s` in `Z(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicIndex {
    level: i32,
    shift: i64,
}

impl DyadicIndex {
    pub fn new(level: i32, shift: i64) -> Result<Self> {
        let valid = match level {
            -1 => (0..=1).contains(&shift),
            k if (0..62).contains(&k) => shift >= 0 && shift < (1i64 << k),
            _ => false,
        };
        if valid {
            Ok(Self { level, shift })
        } else {
            Err(Error::InvalidIndex {
                level: level as i64,
                shift,
            })
        }
    }

    pub fn level(&self) -> i32 {
        self.level
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }
}

/// `phi_{k,s}(x)`. Zero outside `[2^-k s, 2^-k (s+1)]` for `k >= 0`.
pub fn faber_eval(idx: DyadicIndex, x: f64) -> f64 {
    if idx.level < 0 {
        hat(x - idx.shift as f64 + 1.0)
    } else {
        faber_eval_level(idx.level as u32, idx.shift as u64, x)
    }
}

/// Unchecked `phi_{k,s}` for `k >= 0`.
#[inline]
pub(crate) fn faber_eval_level(k: u32, s: u64, x: f64) -> f64 {
    hat(pow2(k + 1) * x - 2.0 * s as f64)
}

/// The shift `s` whose support `[2^-k s, 2^-k (s+1)]` contains `x`; the only
/// candidate for a nonzero `phi_{k,s}(x)`.
#[inline]
pub(crate) fn active_shift(k: u32, x: f64) -> u64 {
    let cells = 1u64 << k;
    let y = (x * cells as f64).floor();
    if y <= 0.0 {
        0
    } else {
        (y as u64).min(cells - 1)
    }
}

/// Nodal hat `phi*_{m,s}(x) = phi(2^{m+1} x - s + 1)` for `s` in `Z_*(m)`.
pub fn faber_star_eval(m: u32, s: i64, x: f64) -> Result<f64> {
    if s < 1 || s > (1i64 << (m + 1)) - 1 {
        return Err(Error::InvalidIndex {
            level: m as i64,
            shift: s,
        });
    }
    Ok(hat(pow2(m + 1) * x - s as f64 + 1.0))
}

/// `lambda_{k,s}(f)`: `-1/2` times the second difference with step
/// `2^{-k-1}` at `2^{-k} s`, or `f(s)` on level -1.
pub fn faber_coeff<F: Fn(f64) -> f64>(f: F, idx: DyadicIndex) -> f64 {
    if idx.level < 0 {
        return f(idx.shift as f64);
    }
    let k = idx.level as u32;
    let h = 1.0 / pow2(k + 1);
    let x = idx.shift as f64 / pow2(k);
    -0.5 * (f(x + 2.0 * h) - 2.0 * f(x + h) + f(x))
}

/// Finite univariate Faber series.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateExpansion {
    max_level: u32,
    coefficients: BTreeMap<DyadicIndex, f64>,
}

impl UnivariateExpansion {
    pub fn new(max_level: u32) -> Self {
        Self {
            max_level,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn from_coefficients(
        max_level: u32,
        coefficients: BTreeMap<DyadicIndex, f64>,
    ) -> Result<Self> {
        if let Some(bad) = coefficients.keys().find(|i| i.level > max_level as i32) {
            return Err(Error::InvalidInput(format!(
                "level {} exceeds max level {max_level}",
                bad.level
            )));
        }
        Ok(Self {
            max_level,
            coefficients,
        })
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn coefficients(&self) -> &BTreeMap<DyadicIndex, f64> {
        &self.coefficients
    }

    pub fn get(&self, idx: DyadicIndex) -> f64 {
        self.coefficients.get(&idx).copied().unwrap_or(0.0)
    }

    pub fn insert(&mut self, idx: DyadicIndex, value: f64) -> Result<()> {
        if idx.level > self.max_level as i32 {
            return Err(Error::InvalidInput(format!(
                "level {} exceeds max level {}",
                idx.level, self.max_level
            )));
        }
        self.coefficients.insert(idx, value);
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(&idx, &c)| c * faber_eval(idx, x))
            .sum()
    }
}

/// `R_m(f) = sum_{k=0}^m q_k(f)`. For `f` vanishing at 0 and 1 the result
/// interpolates `f` at `2^{-m-1} s`, `s` in `Z_*(m)`.
pub fn truncate_univariate<F: Fn(f64) -> f64>(f: F, m: u32) -> UnivariateExpansion {
    let mut coefficients = BTreeMap::new();
    for k in 0..=m {
        for s in 0..(1i64 << k) {
            let idx = DyadicIndex {
                level: k as i32,
                shift: s,
            };
            coefficients.insert(idx, faber_coeff(&f, idx));
        }
    }
    UnivariateExpansion {
        max_level: m,
        coefficients,
    }
}

/// Integer code `l_0..l_{2^{m+1}-1}` of a quantized approximant at level `m`.
///
/// The function value at node `2^{-m-1} s` is `2^{-alpha(m+1)} l_s`; the
/// value at `x = 1` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateQuantizedCode {
    level: u32,
    alpha: f64,
    l: Vec<i64>,
}

impl UnivariateQuantizedCode {
    /// Validates `l_0 = 0`, `|l_s - l_{s-1}| <= 1` and the length `2^{m+1}`.
    pub fn new(level: u32, alpha: f64, l: Vec<i64>) -> Result<Self> {
        check_alpha(alpha)?;
        if l.len() != 1usize << (level + 1) {
            return Err(Error::CorruptCode(format!(
                "level {level} needs {} entries, got {}",
                1usize << (level + 1),
                l.len()
            )));
        }
        if l[0] != 0 {
            return Err(Error::CorruptCode("l_0 must be 0".into()));
        }
        if let Some(s) = (1..l.len()).find(|&s| (l[s] - l[s - 1]).abs() > 1) {
            return Err(Error::CorruptCode(format!("chain broken at {s}")));
        }
        Ok(Self { level, alpha, l })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn l(&self) -> &[i64] {
        &self.l
    }

    /// Quantization step `2^{-alpha(m+1)}`.
    pub fn unit(&self) -> f64 {
        quant_unit(self.alpha, self.level)
    }

    /// Piecewise-linear nodal interpolant of `unit * l_s`; zero off `[0,1]`.
    pub fn eval(&self, x: f64) -> f64 {
        quantized_eval(self, x)
    }
}

#[inline]
pub(crate) fn quant_unit(alpha: f64, level: u32) -> f64 {
    (-alpha * (level as f64 + 1.0)).exp2()
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha = {alpha} not in (0, 1]")))
    }
}

/// Greedy left-to-right quantizer `S_f`.
///
/// `l_0 = 0`; each `l_s` is the integer nearest to `f(2^{-m-1}s) / unit`,
/// and a tie goes to the candidate nearest `l_{s-1}`. Rejects `f(0) != 0`,
/// and reports a broken chain (`|l_s - l_{s-1}| > 1`), which only happens
/// for functions outside the Hölder unit ball.
pub fn quantize<F: Fn(f64) -> f64>(f: F, m: u32, alpha: f64) -> Result<UnivariateQuantizedCode> {
    check_alpha(alpha)?;
    let f0 = f(0.0);
    if !(f0.abs() <= BOUNDARY_TOL) {
        return Err(Error::NotVanishing {
            point: vec![0.0],
            value: f0,
        });
    }
    let unit = quant_unit(alpha, m);
    let nodes = 1usize << (m + 1);
    let mut l = Vec::with_capacity(nodes);
    l.push(0i64);
    for s in 1..nodes {
        let v = f(s as f64 / nodes as f64);
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite value {v} at node {s}")));
        }
        let prev = l[s - 1];
        let lo = (v / unit).floor();
        let d_lo = (v - unit * lo).abs();
        let d_hi = (unit * (lo + 1.0) - v).abs();
        let lo = lo as i64;
        let hi = lo + 1;
        let pick = if (d_lo - d_hi).abs() <= TIE_RTOL * d_lo.max(d_hi) {
            if (lo - prev).abs() <= (hi - prev).abs() {
                lo
            } else {
                hi
            }
        } else if d_lo < d_hi {
            lo
        } else {
            hi
        };
        if (pick - prev).abs() > 1 {
            return Err(Error::ChainBroken { node: s });
        }
        l.push(pick);
    }
    Ok(UnivariateQuantizedCode {
        level: m,
        alpha,
        l,
    })
}

pub fn quantized_eval(code: &UnivariateQuantizedCode, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    let nodes = code.l.len();
    let y = x * nodes as f64;
    let i = (y.floor() as usize).min(nodes - 1);
    let t = y - i as f64;
    let unit = code.unit();
    let left = unit * code.l[i] as f64;
    let right = if i + 1 < nodes {
        unit * code.l[i + 1] as f64
    } else {
        0.0
    };
    (1.0 - t) * left + t * right
}
