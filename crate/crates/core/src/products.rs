//! Running products of `f` and `h` over `1..=n`.
//!
//! The accumulator advances one index at a time from sieve factorizations.
//! The closed form evaluates `prod h(r) = n! / (floor(n/2)! floor(n/4)! ...)`
//! prime by prime from Legendre sums, giving random access to any `n`.
//! `prod f(r)` is the odd part of `prod h(r)`.

use crate::error::{domain, Error, Result};
use crate::factored::FactoredRational;
use crate::functions::h_two_exponent;
use crate::valuation::{legendre_factorial_vp, Factorize, SpfSieve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductKind {
    F,
    H,
}

/// Exact running product of `f` or `h` over `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductAccumulator {
    kind: ProductKind,
    n: u64,
    value: FactoredRational,
    negatives: usize,
}

impl ProductAccumulator {
    /// Empty product (`n = 0`).
    pub fn new(kind: ProductKind) -> Self {
        ProductAccumulator {
            kind,
            n: 0,
            value: FactoredRational::one(),
            negatives: 0,
        }
    }

    /// Resumes from a known product over `1..=n`.
    pub fn from_state(kind: ProductKind, n: u64, value: FactoredRational) -> Self {
        let negatives = value.iter().filter(|&(_, e)| e < 0).count();
        ProductAccumulator {
            kind,
            n,
            value,
            negatives,
        }
    }

    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn value(&self) -> &FactoredRational {
        &self.value
    }

    pub fn into_value(self) -> FactoredRational {
        self.value
    }

    /// Constant-time integrality test, tracked across steps.
    pub fn is_integer(&self) -> bool {
        self.negatives == 0
    }

    /// Multiplies in the next term and returns its factorization.
    pub fn step(&mut self, sieve: &SpfSieve) -> Result<Vec<(u64, i64)>> {
        let r = self.n + 1;
        let k = r.trailing_zeros();
        let ell = r >> k;
        if r > sieve.limit() {
            return Err(Error::OutOfRange {
                value: r,
                limit: sieve.limit(),
            });
        }
        let mut term: Vec<(u64, i64)> = sieve
            .factor_pairs(ell)?
            .into_iter()
            .map(|(p, e)| (p, e * (1 - i64::from(k))))
            .filter(|&(_, e)| e != 0)
            .collect();
        if self.kind == ProductKind::H {
            let two = h_two_exponent(k);
            if two != 0 {
                term.insert(0, (2, two));
            }
        }
        for &(p, e) in &term {
            let (old, new) = self.value.mul_prime_power(p, e)?;
            match (old < 0, new < 0) {
                (false, true) => self.negatives += 1,
                (true, false) => self.negatives -= 1,
                _ => {}
            }
        }
        self.n = r;
        Ok(term)
    }

    pub fn advance_to(&mut self, target: u64, sieve: &SpfSieve) -> Result<()> {
        while self.n < target {
            self.step(sieve)?;
        }
        Ok(())
    }
}

fn check_n(sieve: &SpfSieve, n: u64) -> Result<()> {
    if n == 0 {
        return Err(domain("products start at n = 1"));
    }
    if n > sieve.limit() {
        return Err(Error::OutOfRange {
            value: n,
            limit: sieve.limit(),
        });
    }
    Ok(())
}

/// `prod_{r<=n} h(r)` from Legendre sums, without forming any factorial.
pub fn product_h_closed(sieve: &SpfSieve, n: u64) -> Result<FactoredRational> {
    check_n(sieve, n)?;
    let mut out = FactoredRational::one();
    for &p in sieve.primes_up_to(n) {
        let mut e = legendre_factorial_vp(n, p);
        let mut m = n >> 1;
        while m >= p {
            e -= legendre_factorial_vp(m, p);
            m >>= 1;
        }
        out.mul_prime_power(p, e as i64)?;
    }
    Ok(out)
}

/// `prod_{r<=n} f(r)`, the odd part of the `h` product.
pub fn product_f(sieve: &SpfSieve, n: u64) -> Result<FactoredRational> {
    Ok(product_h_closed(sieve, n)?.odd_part())
}

/// Exponent of 2 in `prod_{r<=n} h(r)`.
pub fn v2_of_product_h(n: u64) -> Result<i64> {
    if n == 0 {
        return Err(domain("products start at n = 1"));
    }
    let mut e = legendre_factorial_vp(n, 2) as i64;
    let mut m = n >> 1;
    while m > 0 {
        e -= legendre_factorial_vp(m, 2) as i64;
        m >>= 1;
    }
    Ok(e)
}

/// `sum_{i>=1} floor(n / 2^i)`.
pub fn floor_sum(n: u64) -> u64 {
    (1..64).map(|i| n >> i).take_while(|&q| q > 0).sum()
}

/// Integrality witness for the `h` product.
///
/// With parts `m_i = floor(n/2^i)` and `M = sum m_i <= n`, the product
/// splits as `M!/prod m_i!` (a multinomial coefficient) times `n!/M!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultinomialWitness {
    pub parts: Vec<u64>,
    pub total: u64,
    pub multinomial: FactoredRational,
    pub cofactor: FactoredRational,
}

pub fn multinomial_witness(sieve: &SpfSieve, n: u64) -> Result<MultinomialWitness> {
    check_n(sieve, n)?;
    let parts: Vec<u64> = (1..64).map(|i| n >> i).take_while(|&q| q > 0).collect();
    let total: u64 = parts.iter().sum();
    let mut multinomial = FactoredRational::one();
    let mut cofactor = FactoredRational::one();
    for &p in sieve.primes_up_to(n) {
        let top = legendre_factorial_vp(total, p) as i64;
        let parts_vp: i64 = parts
            .iter()
            .map(|&m| legendre_factorial_vp(m, p) as i64)
            .sum();
        multinomial.mul_prime_power(p, top - parts_vp)?;
        cofactor.mul_prime_power(p, legendre_factorial_vp(n, p) as i64 - top)?;
    }
    Ok(MultinomialWitness {
        parts,
        total,
        multinomial,
        cofactor,
    })
}
