//! Arbitrary-precision counting helpers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// x (x-1) ... (x-m+1); zero when m > x.
pub fn falling(x: usize, m: usize) -> BigUint {
    if m > x {
        return BigUint::zero();
    }
    ((x - m + 1)..=x).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Binomial coefficient; zero when k > n.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    falling(n, k) / factorial(k)
}

/// Binomial coefficient with a possibly negative lower index (zero outside 0..=n).
pub fn binomial_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as usize, k as usize)
    }
}

pub fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// sqrt(num/den) evaluated through the exact rational, safe for huge operands.
pub fn sqrt_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    ratio(num, den).to_f64().unwrap_or(f64::NAN).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(falling(5, 2), BigUint::from(20u32));
        assert_eq!(falling(2, 3), BigUint::zero());
        assert_eq!(falling(4, 0), BigUint::one());
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial_signed(3, -1), BigUint::zero());
    }

    #[test]
    fn big_ratio_to_float() {
        let a = factorial(200);
        let b = factorial(199);
        assert!((sqrt_ratio_f64(&a, &b) - 200f64.sqrt()).abs() < 1e-12);
    }
}
