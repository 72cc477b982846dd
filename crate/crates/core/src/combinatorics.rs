//! Binomial coefficients and powers in exact and floating arithmetic.

use num_bigint::BigUint;
use num_traits::One;

/// `binom(n, k)` exactly; panics on u64 overflow.
pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binom_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn pow2_big(e: u64) -> BigUint {
    BigUint::one() << e
}

pub fn factorial_f64(n: u64) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `B = (2^alpha - 1)^{-1}`.
pub fn b_constant(alpha: f64) -> f64 {
    1.0 / (alpha.exp2() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal() {
        for n in 1..40u64 {
            for k in 1..n {
                assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
                assert_eq!(binom_big(n, k), BigUint::from(binom(n, k)));
            }
        }
        assert_eq!(binom(5, 0), 1);
        assert_eq!(binom(3, 4), 0);
        assert_eq!(binom_f64(10, 2), 45.0);
    }

    #[test]
    fn b_at_one() {
        assert_eq!(b_constant(1.0), 1.0);
        assert!((b_constant(0.5) - 2.414213562373095).abs() < 1e-12);
    }
}
