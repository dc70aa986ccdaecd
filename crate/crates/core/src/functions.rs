//! The arithmetic functions `f`, `g` and `h`.
//!
//! `f(2^k l) = l^(1-k)` for odd `l`. `g(x)` is `x` on positive integers and 1
//! on other positive rationals. `h(r) = r / (g(r/2) g(r/4) g(r/8) ...)`.
//! `h` has a definitional evaluation and a closed form
//! `h(r) = 2^(k(3-k)/2) l^(1-k)`; both are public so each can check the other.

use num_rational::Ratio;

use crate::error::{domain, Result};
use crate::factored::FactoredRational;
use crate::valuation::{v2_split, DirectFactor, Factorize};

/// `k(3-k)/2`, the exponent of 2 in `h(2^k l)`. Negative for `k >= 4`.
pub fn h_two_exponent(k: u32) -> i64 {
    let k = i64::from(k);
    let twice = k * (3 - k);
    debug_assert!(twice % 2 == 0);
    twice / 2
}

pub fn f_with<F: Factorize + ?Sized>(fz: &F, n: u64) -> Result<FactoredRational> {
    let split = v2_split(n)?;
    fz.factor(split.ell)?.try_pow(1 - i64::from(split.k))
}

pub fn f(n: u64) -> Result<FactoredRational> {
    f_with(&DirectFactor, n)
}

pub fn g(x: Ratio<u64>) -> Result<u64> {
    if *x.numer() == 0 {
        return Err(domain("g is defined on positive rationals"));
    }
    Ok(if x.is_integer() { x.to_integer() } else { 1 })
}

pub fn h_definitional_with<F: Factorize + ?Sized>(fz: &F, r: u64) -> Result<FactoredRational> {
    if r == 0 {
        return Err(domain("h is defined on positive integers"));
    }
    let mut value = fz.factor(r)?;
    // g(r/2^i) = 1 as soon as 2^i > r.
    for i in (1..64).take_while(|&i| r >> i > 0) {
        let gi = g(Ratio::new(r, 1u64 << i))?;
        if gi > 1 {
            value = value.try_mul(&fz.factor(gi)?.recip())?;
        }
    }
    Ok(value)
}

pub fn h_definitional(r: u64) -> Result<FactoredRational> {
    h_definitional_with(&DirectFactor, r)
}

pub fn h_closed_with<F: Factorize + ?Sized>(fz: &F, r: u64) -> Result<FactoredRational> {
    let split = v2_split(r)?;
    let mut value = fz.factor(split.ell)?.try_pow(1 - i64::from(split.k))?;
    value.mul_prime_power(2, h_two_exponent(split.k))?;
    Ok(value)
}

pub fn h_closed(r: u64) -> Result<FactoredRational> {
    h_closed_with(&DirectFactor, r)
}

/// `f(r) = 2^(v2(r)(v2(r)-3)/2) h(r)`, applied to the definitional `h`.
pub fn f_from_h_with<F: Factorize + ?Sized>(fz: &F, r: u64) -> Result<FactoredRational> {
    let mut value = h_definitional_with(fz, r)?;
    let k = v2_split(r)?.k;
    value.mul_prime_power(2, -h_two_exponent(k))?;
    Ok(value)
}

pub fn f_from_h(r: u64) -> Result<FactoredRational> {
    f_from_h_with(&DirectFactor, r)
}
