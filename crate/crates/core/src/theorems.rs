//! Instance checkers for the integrality, divisibility, growth and
//! valuation statements about `prod f(r)` and `prod h(r)`.
//!
//! Each checker returns a [`Verdict`] carrying a margin, so callers can see
//! how tight a statement is at a given `n`, not just whether it held.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::factored::FactoredRational;
use crate::functions::h_two_exponent;
use crate::interval::{log2_bounds_big, Log2Enclosure};
use crate::products::{product_f, product_h_closed};
use crate::valuation::{alpha_p, binary_digits, is_prime, vp_unchecked, SpfSieve};
use crate::Interval64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    Cor1,
    Eq9,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::Thm1,
        TheoremId::Thm2,
        TheoremId::Thm3,
        TheoremId::Thm4,
        TheoremId::Thm5,
        TheoremId::Cor1,
        TheoremId::Eq9,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Thm1 => "thm1",
            TheoremId::Thm2 => "thm2",
            TheoremId::Thm3 => "thm3",
            TheoremId::Thm4 => "thm4",
            TheoremId::Thm5 => "thm5",
            TheoremId::Cor1 => "cor1",
            TheoremId::Eq9 => "eq9",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| domain(format!("unknown theorem id `{s}`")))
    }
}

/// Slack of a checked statement, in the statement's own units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Margin {
    /// Integer slack (exponents, valuation sums).
    Exact(i64),
    /// Slack in bits, `log2(bound) - log2(value)`.
    Bits(Interval64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub theorem: TheoremId,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub passed: bool,
    /// The compared quantities are exactly equal.
    pub tie: bool,
    /// The exact fallback decided the comparison.
    pub escalated: bool,
    pub margin: Margin,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn pass(theorem: TheoremId, n: u64, margin: Margin) -> Self {
        Verdict {
            theorem,
            n,
            p: None,
            passed: true,
            tie: false,
            escalated: false,
            margin,
            witness: None,
        }
    }

    pub fn fail(theorem: TheoremId, n: u64, margin: Margin, witness: String) -> Self {
        Verdict {
            passed: false,
            witness: Some(witness),
            ..Verdict::pass(theorem, n, margin)
        }
    }

    fn with_p(mut self, p: Option<u64>) -> Self {
        self.p = p;
        self
    }
}

/// The constant `c = P(1023)^(1/1023)` with `P(n) = prod_{r<=n} h(r)`.
///
/// Kept exactly as the pair `(P(1023), 1023)`; the floating enclosures are
/// for display only.
#[derive(Clone, Debug)]
pub struct ConstantC {
    pub base_n: u64,
    pub exact_rep: FactoredRational,
    pub log2_p: Log2Enclosure,
    pub log2_c: Interval64,
    pub c: Interval64,
}

impl ConstantC {
    pub const BASE_N: u64 = 1023;

    /// True if the enclosure meets `[prefix, prefix + ulp(prefix))`, where the
    /// prefix is a decimal string such as `"4.01055487"`. Decided in exact
    /// rational arithmetic.
    pub fn contains_decimal_prefix(&self, prefix: &str) -> bool {
        let Some((int, frac)) = prefix.split_once('.') else {
            return false;
        };
        let Ok(digits) = format!("{int}{frac}").parse::<BigInt>() else {
            return false;
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let a = BigRational::new(digits.clone(), scale.clone());
        let b = BigRational::new(digits + 1, scale);
        let lo = BigRational::from_float(self.c.lo()).unwrap();
        let hi = BigRational::from_float(self.c.hi()).unwrap();
        lo < b && hi >= a
    }
}

/// Encloses `n`-th root of `value` and certifies the bounds by exact
/// integer powering: `lo^n <= value <= hi^n`.
fn certified_root(value: &BigUint, n: u32, log2_value: &Log2Enclosure) -> Interval64 {
    let mut guess = log2_value
        .to_interval::<f64>()
        .div_scalar(f64::from(n))
        .exp2();
    loop {
        let lo_ok = pow_cmp(guess.lo(), n, value) != Ordering::Greater;
        let hi_ok = pow_cmp(guess.hi(), n, value) != Ordering::Less;
        if lo_ok && hi_ok {
            return guess;
        }
        let w = guess.width().max(f64::EPSILON);
        guess = Interval64::new(guess.lo() - w, guess.hi() + w);
    }
}

/// Order of `x^n` against `value`, exactly, for finite positive `x`.
fn pow_cmp(x: f64, n: u32, value: &BigUint) -> Ordering {
    let (mantissa, exp, _) = x.integer_decode();
    let lhs = BigUint::from(mantissa).pow(n);
    let shift = i64::from(exp) * i64::from(n);
    if shift >= 0 {
        (lhs << shift as u64).cmp(value)
    } else {
        lhs.cmp(&(value << (-shift) as u64))
    }
}

pub fn constant_c() -> Result<ConstantC> {
    let sieve = SpfSieve::new(ConstantC::BASE_N)?;
    let exact_rep = product_h_closed(&sieve, ConstantC::BASE_N)?;
    let log2_p = exact_rep.log2_enclosure();
    let log2_c = log2_p
        .to_interval::<f64>()
        .div_scalar(ConstantC::BASE_N as f64);
    let c = certified_root(&exact_rep.materialize()?, ConstantC::BASE_N as u32, &log2_p);
    Ok(ConstantC {
        base_n: ConstantC::BASE_N,
        exact_rep,
        log2_p,
        log2_c,
        c,
    })
}

/// Compares `value` with `c^n` by cross-powering: `value^1023` against
/// `P(1023)^n`. Returns the order and whether the exact path was needed.
pub fn cmp_with_c_power(
    n: u64,
    value: &FactoredRational,
    log2_value: &Log2Enclosure,
    c: &ConstantC,
) -> Result<(Ordering, bool)> {
    let lhs = log2_value.scale(c.base_n as i64);
    let rhs = c.log2_p.scale(n as i64);
    if let Some(ord) = lhs.cmp_enclosure(&rhs) {
        return Ok((ord, false));
    }
    let lhs = value.try_pow(c.base_n as i64)?;
    let rhs = c.exact_rep.try_pow(n as i64)?;
    Ok((lhs.cmp_exact(&rhs), true))
}

fn c_power_margin(n: u64, log2_value: &Log2Enclosure, c: &ConstantC) -> Interval64 {
    let diff = c.log2_p.scale(n as i64) + log2_value.scale(-(c.base_n as i64));
    diff.to_interval::<f64>().div_scalar(c.base_n as f64)
}

fn bound_by_c_power(
    theorem: TheoremId,
    n: u64,
    value: &FactoredRational,
    log2_value: &Log2Enclosure,
    c: &ConstantC,
) -> Result<Verdict> {
    let (ord, escalated) = cmp_with_c_power(n, value, log2_value, c)?;
    let margin = Margin::Bits(c_power_margin(n, log2_value, c));
    let mut v = if ord == Ordering::Greater {
        Verdict::fail(
            theorem,
            n,
            margin,
            format!("product exceeds c^{n}: {value}"),
        )
    } else {
        Verdict::pass(theorem, n, margin)
    };
    v.tie = ord == Ordering::Equal;
    v.escalated = escalated;
    Ok(v)
}

/// `P(n) <= c^n` given `P(n)` and its log enclosure.
pub fn thm3_verdict(
    n: u64,
    product_h: &FactoredRational,
    log2_h: &Log2Enclosure,
    c: &ConstantC,
) -> Result<Verdict> {
    bound_by_c_power(TheoremId::Thm3, n, product_h, log2_h, c)
}

pub fn check_thm3(sieve: &SpfSieve, n: u64, c: &ConstantC) -> Result<Verdict> {
    let ph = product_h_closed(sieve, n)?;
    let log = ph.log2_enclosure();
    thm3_verdict(n, &ph, &log, c)
}

/// `prod f <= c^n`, plus the bridge `prod f <= prod h`.
pub fn cor1_verdict(
    n: u64,
    product_f: &FactoredRational,
    log2_f: &Log2Enclosure,
    v2_h: i64,
    c: &ConstantC,
) -> Result<Verdict> {
    let mut v = bound_by_c_power(TheoremId::Cor1, n, product_f, log2_f, c)?;
    if v2_h < 0 {
        v.passed = false;
        v.witness = Some(format!("prod f exceeds prod h: v2(prod h) = {v2_h}"));
    }
    Ok(v)
}

pub fn check_cor1(sieve: &SpfSieve, n: u64, c: &ConstantC) -> Result<Verdict> {
    let ph = product_h_closed(sieve, n)?;
    let pf = ph.odd_part();
    let log = pf.log2_enclosure();
    cor1_verdict(n, &pf, &log, ph.exponent(2), c)
}

pub fn check_thm1(sieve: &SpfSieve, n: u64) -> Result<Verdict> {
    let pf = product_f(sieve, n)?;
    let min = pf.min_exponent().unwrap_or(0);
    Ok(if pf.is_integer() {
        Verdict::pass(TheoremId::Thm1, n, Margin::Exact(min))
    } else {
        Verdict::fail(
            TheoremId::Thm1,
            n,
            Margin::Exact(min),
            format!("product has negative exponents: {pf}"),
        )
    })
}

/// `v_p(prod f) - alpha_p(n)` for every odd prime `p <= n`.
pub fn thm2_slacks(sieve: &SpfSieve, n: u64) -> Result<Vec<(u64, i64)>> {
    let pf = product_f(sieve, n)?;
    Ok(sieve
        .primes_up_to(n)
        .iter()
        .filter(|&&p| p != 2)
        .map(|&p| (p, pf.exponent(p) - i64::from(alpha_p(n, p))))
        .collect())
}

/// Divisibility of `prod f` by `odd(lcm(1..n))`, and the stronger
/// `v_p(prod h) >= alpha_p` for every prime including 2.
pub fn thm2_verdict(
    n: u64,
    product_f: &FactoredRational,
    product_h: &FactoredRational,
    primes: &[u64],
) -> Verdict {
    let mut min: Option<(i64, u64)> = None;
    let mut failures = Vec::new();
    for &p in primes.iter().take_while(|&&p| p <= n) {
        let alpha = i64::from(alpha_p(n, p));
        let inner = product_h.exponent(p) - alpha;
        if inner < 0 {
            failures.push(format!(
                "v_{p}(prod h) = {} < {alpha}",
                product_h.exponent(p)
            ));
        }
        if p == 2 {
            continue;
        }
        let slack = product_f.exponent(p) - alpha;
        if slack < 0 {
            failures.push(format!(
                "v_{p}(prod f) = {} < {alpha}",
                product_f.exponent(p)
            ));
        }
        if min.is_none_or(|(m, _)| slack < m) {
            min = Some((slack, p));
        }
    }
    let (slack, p) = match min {
        Some((s, p)) => (s, Some(p)),
        None => (0, None),
    };
    let v = if failures.is_empty() {
        Verdict::pass(TheoremId::Thm2, n, Margin::Exact(slack))
    } else {
        Verdict::fail(
            TheoremId::Thm2,
            n,
            Margin::Exact(slack),
            failures.join("; "),
        )
    };
    v.with_p(p)
}

pub fn check_thm2(sieve: &SpfSieve, n: u64) -> Result<Verdict> {
    let ph = product_h_closed(sieve, n)?;
    let pf = ph.odd_part();
    Ok(thm2_verdict(n, &pf, &ph, sieve.primes_up_to(n)))
}

/// Outcome of an interval comparison that may need a second, finer pass.
fn eq9_decide_big(product_h: &FactoredRational, n: u64) -> Option<bool> {
    const BITS: u32 = 256;
    let mut lo = BigInt::from(0);
    let mut hi = BigInt::from(0);
    for (p, e) in product_h.iter() {
        let (plo, phi) = log2_bounds_big(&BigUint::from(p), BITS);
        if e >= 0 {
            lo += plo * e;
            hi += phi * e;
        } else {
            lo += phi * e;
            hi += plo * e;
        }
    }
    let (nlo, nhi) = log2_bounds_big(&BigUint::from(n), BITS);
    // Bound (log2 n)^2 + 2n at scale 2^(2*BITS).
    let two_n = BigInt::from(2 * n) << (2 * BITS);
    let rhs_lo = &nlo * &nlo + &two_n;
    let rhs_hi = &nhi * &nhi + &two_n;
    let lhs_lo = lo << BITS;
    let lhs_hi = hi << BITS;
    if lhs_hi <= rhs_lo {
        Some(true)
    } else if lhs_lo > rhs_hi {
        Some(false)
    } else {
        None
    }
}

/// `P(n) <= n^(log2 n) 4^n`, i.e. `log2 P(n) <= (log2 n)^2 + 2n`.
pub fn eq9_verdict(n: u64, product_h: &FactoredRational, log2_h: &Log2Enclosure) -> Verdict {
    let lhs = log2_h.to_interval::<f64>();
    let log_n = Log2Enclosure::of_u64(n).to_interval::<f64>();
    let rhs = log_n.square() + Interval64::point(2.0 * n as f64);
    let margin = Margin::Bits(rhs - lhs);
    let (decision, escalated) = match lhs.certainly_le(&rhs) {
        Some(d) => (Some(d), false),
        None => (eq9_decide_big(product_h, n), true),
    };
    let mut v = match decision {
        Some(true) => Verdict::pass(TheoremId::Eq9, n, margin),
        Some(false) => Verdict::fail(
            TheoremId::Eq9,
            n,
            margin,
            format!("log2 P(n) in [{}, {}] exceeds bound", lhs.lo(), lhs.hi()),
        ),
        None => Verdict::fail(
            TheoremId::Eq9,
            n,
            margin,
            "undecided at 256-bit precision".to_string(),
        ),
    };
    v.escalated = escalated;
    v
}

pub fn check_eq9(sieve: &SpfSieve, n: u64) -> Result<Verdict> {
    let ph = product_h_closed(sieve, n)?;
    let log = ph.log2_enclosure();
    Ok(eq9_verdict(n, &ph, &log))
}

/// Both sides of the valuation inequality for an odd prime `p`:
/// `sum v2(r) vp(r) <= sum vp(r) - alpha_p(n)`.
pub fn thm4_verdict(n: u64, p: u64, lhs: i64, sum_vp: i64) -> Verdict {
    let rhs = sum_vp - i64::from(alpha_p(n, p));
    let margin = Margin::Exact(rhs - lhs);
    let v = if lhs <= rhs {
        Verdict::pass(TheoremId::Thm4, n, margin)
    } else {
        Verdict::fail(
            TheoremId::Thm4,
            n,
            margin,
            format!("sum v2*vp = {lhs} > {rhs}"),
        )
    };
    v.with_p(Some(p))
}

/// Direct summation over `r <= n`.
pub fn check_thm4(n: u64, p: u64) -> Result<Verdict> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    if p == 2 || !is_prime(p) {
        return Err(domain(format!("{p} is not an odd prime")));
    }
    let (mut lhs, mut sum_vp) = (0i64, 0i64);
    for r in 1..=n {
        let e = i64::from(vp_unchecked(r, p));
        if e > 0 {
            lhs += i64::from(r.trailing_zeros()) * e;
            sum_vp += e;
        }
    }
    Ok(thm4_verdict(n, p, lhs, sum_vp))
}

/// Two sides of the binary-digit identity, given the summed left side.
pub fn thm5_verdict(n: u64, lhs: i64) -> Result<Verdict> {
    let rhs = binary_digits(n)?.weighted_sum() as i64;
    let margin = Margin::Exact(rhs - lhs);
    Ok(if lhs == rhs {
        let mut v = Verdict::pass(TheoremId::Thm5, n, margin);
        v.tie = true;
        v
    } else {
        Verdict::fail(
            TheoremId::Thm5,
            n,
            margin,
            format!("sum k(3-k)/2 = {lhs}, sum i*a_i = {rhs}"),
        )
    })
}

/// Left side by direct summation of `v2(r)(3 - v2(r))/2` over `r <= n`.
pub fn check_thm5(n: u64) -> Result<Verdict> {
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    let lhs: i64 = (1..=n).map(|r| h_two_exponent(r.trailing_zeros())).sum();
    thm5_verdict(n, lhs)
}

/// Enclosure of `x^(1/n)` from an enclosure of `log2 x`.
pub fn nth_root(log2: &Log2Enclosure, n: u64) -> Interval64 {
    log2.to_interval::<f64>().div_scalar(n as f64).exp2()
}
