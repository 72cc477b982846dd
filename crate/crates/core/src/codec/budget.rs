//! Parameter budgets, error bounds and parameter selection for the codec.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::{b_constant, binom, binom_big, binom_f64, factorial_f64, pow2_big};
use crate::covering::cardinality_bound;
use crate::error::{Error, Result};
use crate::tensor::dim_fdm;

/// `2^{1-alpha} (2B)^d 2^{-alpha(m+n)} binom(m+n+d, d-1)`.
pub fn pipeline_error_bound(alpha: f64, d: usize, m: u32, n: u32) -> f64 {
    let mn = (m + n) as u64;
    (1.0 - alpha).exp2()
        * (2.0 * b_constant(alpha)).powi(d as i32)
        * (-alpha * mn as f64).exp2()
        * binom_f64(mn + d as u64, d as u64 - 1)
}

/// `|Gamma_j(n)| = 2^{n+1} binom(n+j, j)`.
pub fn gamma_size(j: usize, n: u32) -> u64 {
    (1u64 << (n + 1)) * binom(n as u64 + j as u64, j as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamBudget {
    pub m: u32,
    pub n: u32,
    pub d: usize,
    /// `|Gamma_j(n)|` for `j = 0..d`.
    pub gamma_sizes: Vec<u64>,
    /// `N_{d-j}(m)`: bound on the layer-`j` dictionary size.
    pub dict_bounds: Vec<BigUint>,
    /// `M_{d-j}(m) = N_{d-j}(m) dim F^{d-j}(m)`.
    pub dict_param_bounds: Vec<BigUint>,
    /// `dim F^d(n) + sum_j (M_{d-j}(m) + |Gamma_j(n)|)`.
    pub n_mn: BigUint,
    /// Closed-form upper bound
    /// `3^{2^{m+1} binom(m+d-1,d-1)} 2^{m+1} binom(m+d,d-1) + 2^{n+2} binom(n+d,d-1)`.
    pub n_mn_bound: BigUint,
    /// `dim F^d(m+n+1)`, the dimension of the decoder's target space.
    pub k_mn: u64,
}

pub fn budget(m: u32, n: u32, d: usize) -> ParamBudget {
    assert!(d >= 1);
    let gamma_sizes: Vec<u64> = (0..d).map(|j| gamma_size(j, n)).collect();
    let dict_bounds: Vec<BigUint> = (0..d).map(|j| cardinality_bound(m, d - j)).collect();
    let dict_param_bounds: Vec<BigUint> = dict_bounds
        .iter()
        .enumerate()
        .map(|(j, nb)| nb * BigUint::from(dim_fdm(m, d - j)))
        .collect();
    let mut n_mn = BigUint::from(dim_fdm(n, d));
    for (mb, &g) in dict_param_bounds.iter().zip(&gamma_sizes) {
        n_mn += mb + BigUint::from(g);
    }
    ParamBudget {
        m,
        n,
        d,
        gamma_sizes,
        dict_bounds,
        dict_param_bounds,
        n_mn,
        n_mn_bound: lemma_budget_bound(m, n, d),
        k_mn: dim_fdm(m + n + 1, d),
    }
}

fn dictionary_term(m: u32, d: usize) -> BigUint {
    let (m, d) = (m as u64, d as u64);
    cardinality_bound(m as u32, d as usize) * pow2_big(m + 1) * binom_big(m + d, d - 1)
}

fn truncation_term(n: u32, d: usize) -> BigUint {
    let (n, d) = (n as u64, d as u64);
    pow2_big(n + 2) * binom_big(n + d, d - 1)
}

fn lemma_budget_bound(m: u32, n: u32, d: usize) -> BigUint {
    dictionary_term(m, d) + truncation_term(n, d)
}

/// Outcome of the parameter choice for a budget `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSelection {
    pub m: u32,
    pub n: u32,
    pub m_star: u32,
    /// `N(d) = 3^{2^{d+2} binom(2d,d-1)} 2^{d+3} binom(2d+1,d-1)`.
    pub threshold: BigUint,
    pub meets_threshold: bool,
    /// `n >= m >= d + 1`.
    pub regime_ok: bool,
}

/// `N(d)`, the budget above which the asymptotic bound is stated.
pub fn budget_threshold(d: usize) -> BigUint {
    let d = d as u64;
    let e = (1u64 << (d + 2)) * binom(2 * d, d - 1);
    BigUint::from(3u32).pow(u32::try_from(e).expect("threshold exponent too large"))
        * pow2_big(d + 3)
        * binom_big(2 * d + 1, d - 1)
}

/// Largest `m >= 1` with `2 * dictionary_term(m, d) <= N`, if any.
fn select_m(n_budget: &BigUint, d: usize) -> Option<u32> {
    let bits = n_budget.bits();
    let mut best = None;
    for m in 1u32.. {
        let e = (1u64 << (m + 1)).saturating_mul(binom(m as u64 + d as u64 - 1, d as u64 - 1));
        // 3^e alone has more than 1.58 e bits
        if (e as f64) * 1.58 > bits as f64 + 1.0 {
            break;
        }
        if dictionary_term(m, d) * 2u32 <= *n_budget {
            best = Some(m);
        } else {
            break;
        }
    }
    best
}

fn select_n(n_budget: &BigUint, d: usize) -> Option<u32> {
    let mut best = None;
    for n in 1u32..(n_budget.bits() as u32 + 2) {
        if truncation_term(n, d) * 2u32 <= *n_budget {
            best = Some(n);
        } else {
            break;
        }
    }
    best
}

/// Chooses `n` and `m` as the largest levels whose truncation and
/// dictionary budgets each fit in `N / 2`.
pub fn select_params(n_budget: &BigUint, d: usize) -> Result<ParamSelection> {
    if d == 0 || n_budget.is_zero() {
        return Err(Error::InvalidInput("need N >= 1 and d >= 1".into()));
    }
    let n = select_n(n_budget, d)
        .ok_or_else(|| Error::Infeasible(format!("N = {n_budget} admits no level n >= 1")))?;
    let m = select_m(n_budget, d)
        .ok_or_else(|| Error::Infeasible(format!("N = {n_budget} admits no level m >= 1")))?;
    let threshold = budget_threshold(d);
    Ok(ParamSelection {
        m,
        n,
        m_star: m + n,
        meets_threshold: *n_budget >= threshold,
        regime_ok: n >= m && m as usize > d,
        threshold,
    })
}

/// `log2 N` for arbitrarily large `N`.
pub fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").log2();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("finite");
    top.log2() + shift as f64
}

/// `K = (6 * 4^alpha / (2^alpha - 1))^{1/(2 alpha + 1)}`.
pub fn theorem_k(alpha: f64) -> f64 {
    (6.0 * 4f64.powf(alpha) / (alpha.exp2() - 1.0)).powf(1.0 / (2.0 * alpha + 1.0))
}

/// `C_alpha = 2^{7 alpha + 2} / (2^alpha - 1)`.
pub fn theorem_c(alpha: f64) -> f64 {
    (7.0 * alpha + 2.0).exp2() / (alpha.exp2() - 1.0)
}

/// `C (K^{d-1}/(d-1)!)^{2a+1} (log N)^{(d-1)(a+1)} (N log N)^{-a} (log log N)^{(d-1)a}`,
/// logarithms base 2, evaluated in log space so that huge `N` is fine.
pub fn theorem_upper_bound(n_budget: &BigUint, d: usize, alpha: f64) -> Result<f64> {
    theorem_upper_bound_log2(n_budget, d, alpha).map(f64::exp2)
}

/// `log2` of [`theorem_upper_bound`]; stays finite where the bound itself
/// underflows.
pub fn theorem_upper_bound_log2(n_budget: &BigUint, d: usize, alpha: f64) -> Result<f64> {
    if *n_budget < BigUint::from(4u32) || d == 0 {
        return Err(Error::InvalidInput("need N >= 4 and d >= 1".into()));
    }
    let dm1 = (d - 1) as f64;
    let ln = log2_big(n_budget);
    let lln = ln.log2();
    let log_bound = theorem_c(alpha).log2()
        + (2.0 * alpha + 1.0) * (dm1 * theorem_k(alpha).log2() - factorial_f64(d as u64 - 1).log2())
        + dm1 * (alpha + 1.0) * lln
        - alpha * (ln + lln)
        + if d > 1 { dm1 * alpha * lln.log2() } else { 0.0 };
    Ok(log_bound)
}
