//! p-adic valuations, Legendre sums, binary digits and the
//! smallest-prime-factor sieve.

use crate::error::{domain, Error, Result};
use crate::factored::FactoredRational;
use crate::interval::Log2Enclosure;

/// `n = 2^k * ell` with `ell` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValuationSplit {
    pub k: u32,
    pub ell: u64,
}

impl ValuationSplit {
    pub fn reconstruct(&self) -> u64 {
        self.ell << self.k
    }
}

pub fn v2_split(n: u64) -> Result<ValuationSplit> {
    if n == 0 {
        return Err(domain("v2 of zero"));
    }
    let k = n.trailing_zeros();
    Ok(ValuationSplit { k, ell: n >> k })
}

/// Largest `e` with `p^e | n`.
pub fn vp(n: u64, p: u64) -> Result<u32> {
    if n == 0 {
        return Err(domain("valuation of zero"));
    }
    if !is_prime(p) {
        return Err(domain(format!("{p} is not prime")));
    }
    Ok(vp_unchecked(n, p))
}

pub(crate) fn vp_unchecked(mut n: u64, p: u64) -> u32 {
    if p == 2 {
        return n.trailing_zeros();
    }
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// `v_p(n!) = sum_{i>=1} floor(n / p^i)`.
///
/// Each term is obtained from the previous one by a further division by `p`,
/// so no power of `p` is ever formed.
pub fn legendre_factorial_vp(n: u64, p: u64) -> u64 {
    let mut q = n / p;
    let mut sum = 0;
    while q > 0 {
        sum += q;
        q /= p;
    }
    sum
}

/// Largest `e` with `p^e <= n`: the exponent of `p` in `lcm(1, ..., n)`.
pub fn alpha_p(n: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut pow = 1u64;
    while pow <= n / p {
        pow *= p;
        e += 1;
    }
    e
}

/// Binary expansion `a_0 + a_1 2 + ... + a_s 2^s` with `a_s = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryDigits {
    digits: Vec<u8>,
}

impl BinaryDigits {
    /// Least significant first.
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Index `s` of the leading digit.
    pub fn top(&self) -> usize {
        self.digits.len() - 1
    }

    pub fn value(&self) -> u64 {
        self.digits
            .iter()
            .enumerate()
            .map(|(i, &a)| u64::from(a) << i)
            .sum()
    }

    /// `sum_i i * a_i`.
    pub fn weighted_sum(&self) -> u64 {
        self.digits
            .iter()
            .enumerate()
            .map(|(i, &a)| i as u64 * u64::from(a))
            .sum()
    }
}

pub fn binary_digits(n: u64) -> Result<BinaryDigits> {
    if n == 0 {
        return Err(domain("binary digits of zero"));
    }
    let len = 64 - n.leading_zeros() as usize;
    Ok(BinaryDigits {
        digits: (0..len).map(|i| ((n >> i) & 1) as u8).collect(),
    })
}

/// Deterministic Miller-Rabin over the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mul = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    'bases: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Anything that can factor a positive integer.
pub trait Factorize {
    /// Prime factorization of `m >= 1` as `(prime, exponent)` pairs in
    /// increasing prime order.
    fn factor_pairs(&self, m: u64) -> Result<Vec<(u64, i64)>>;

    fn factor(&self, m: u64) -> Result<FactoredRational> {
        let mut out = FactoredRational::one();
        for (p, e) in self.factor_pairs(m)? {
            out.mul_prime_power(p, e)?;
        }
        Ok(out)
    }
}

/// Factorization of arbitrary `u64` values: trial division by small primes,
/// then Miller-Rabin and Pollard-Brent rho on what remains.
#[derive(Clone, Copy, Debug, Default)]
pub struct DirectFactor;

impl Factorize for DirectFactor {
    fn factor_pairs(&self, mut m: u64) -> Result<Vec<(u64, i64)>> {
        if m == 0 {
            return Err(domain("factorization of zero"));
        }
        let mut found: Vec<u64> = Vec::new();
        let mut d = 2u64;
        while d < 1000 && d * d <= m {
            while m.is_multiple_of(d) {
                m /= d;
                found.push(d);
            }
            d += if d == 2 { 1 } else { 2 };
        }
        let mut stack = vec![m];
        while let Some(x) = stack.pop() {
            if x == 1 {
                continue;
            }
            if is_prime(x) {
                found.push(x);
                continue;
            }
            let f = pollard_brent(x);
            stack.push(f);
            stack.push(x / f);
        }
        found.sort_unstable();
        let mut out: Vec<(u64, i64)> = Vec::new();
        for p in found {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        Ok(out)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

/// A nontrivial factor of an odd composite `n` with no factor below 1000.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((u128::from(mul_mod(x, x, n)) + u128::from(c)) % u128::from(n)) as u64;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = num_integer::gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = num_integer::gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Smallest-prime-factor table for `2..=limit`, built by a linear sieve.
#[derive(Clone, Debug)]
pub struct SpfSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl SpfSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(domain("sieve limit must be at least 2"));
        }
        if limit > u64::from(u32::MAX) {
            return Err(domain("sieve limit exceeds 32-bit table entries"));
        }
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u64> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i] as u64;
            for &p in &primes {
                if p > si {
                    break;
                }
                let m = i as u64 * p;
                if m > limit {
                    break;
                }
                spf[m as usize] = p as u32;
            }
        }
        Ok(SpfSieve { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes up to the limit, increasing.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primes `<= n` (clamped to the limit).
    pub fn primes_up_to(&self, n: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= n);
        &self.primes[..end]
    }

    pub fn smallest_factor(&self, m: u64) -> Result<u64> {
        self.check(m)?;
        Ok(u64::from(self.spf[m as usize]))
    }

    pub fn is_prime(&self, m: u64) -> Result<bool> {
        if m < 2 {
            return Ok(false);
        }
        Ok(self.smallest_factor(m)? == m)
    }

    fn check(&self, m: u64) -> Result<()> {
        if m > self.limit {
            return Err(Error::OutOfRange {
                value: m,
                limit: self.limit,
            });
        }
        if m < 2 {
            return Err(domain(format!("{m} has no smallest prime factor")));
        }
        Ok(())
    }
}

impl Factorize for SpfSieve {
    fn factor_pairs(&self, mut m: u64) -> Result<Vec<(u64, i64)>> {
        if m == 1 {
            return Ok(Vec::new());
        }
        self.check(m)?;
        let mut out: Vec<(u64, i64)> = Vec::new();
        while m > 1 {
            let p = u64::from(self.spf[m as usize]);
            m /= p;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        Ok(out)
    }
}

/// Precomputed `log2` enclosures for every prime in a sieve.
#[derive(Clone, Debug)]
pub struct PrimeLogTable {
    primes: Vec<u64>,
    logs: Vec<Log2Enclosure>,
}

impl PrimeLogTable {
    pub fn build(sieve: &SpfSieve) -> Self {
        let primes = sieve.primes().to_vec();
        let logs = primes.iter().map(|&p| Log2Enclosure::of_u64(p)).collect();
        PrimeLogTable { primes, logs }
    }

    /// Enclosure of `log2(p)`; primes outside the table are computed directly.
    pub fn log2(&self, p: u64) -> Log2Enclosure {
        match self.primes.binary_search(&p) {
            Ok(i) => self.logs[i],
            Err(_) => Log2Enclosure::of_u64(p),
        }
    }
}
