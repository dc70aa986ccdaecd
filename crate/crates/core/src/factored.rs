//! Positive rationals stored as prime-exponent maps.

use std::cmp::Ordering;
use std::collections::btree_map::{self, BTreeMap, Entry};
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{domain, Error, Result};
use crate::interval::Log2Enclosure;
use crate::valuation::{is_prime, PrimeLogTable};

/// Materialization target for integer-valued products.
pub type BigNatural = BigUint;

/// A strictly positive rational `prod p^e`.
///
/// Zero exponents are never stored, so derived equality is value equality.
/// The empty map is 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FactoredRational {
    exps: BTreeMap<u64, i64>,
}

impl FactoredRational {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a value from `(prime, exponent)` pairs, merging repeats.
    pub fn from_pairs<I: IntoIterator<Item = (u64, i64)>>(pairs: I) -> Result<Self> {
        let mut out = Self::one();
        for (p, e) in pairs {
            if !is_prime(p) {
                return Err(domain(format!("{p} is not prime")));
            }
            out.mul_prime_power(p, e)?;
        }
        Ok(out)
    }

    /// Multiplies in `p^e` for a known prime `p`.
    ///
    /// Returns the old and new exponent so callers can track sign changes.
    pub(crate) fn mul_prime_power(&mut self, p: u64, e: i64) -> Result<(i64, i64)> {
        if e == 0 {
            let cur = self.exponent(p);
            return Ok((cur, cur));
        }
        match self.exps.entry(p) {
            Entry::Vacant(v) => {
                v.insert(e);
                Ok((0, e))
            }
            Entry::Occupied(mut o) => {
                let old = *o.get();
                let new = old.checked_add(e).ok_or(Error::ExponentOverflow(p))?;
                if new == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = new;
                }
                Ok((old, new))
            }
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.exps.get(&p).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// `(prime, exponent)` pairs in increasing prime order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.exps.iter().map(|(&p, &e)| (p, e))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.exps.values().copied().min()
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (mut acc, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (p, e) in small.iter() {
            acc.mul_prime_power(p, e)?;
        }
        Ok(acc)
    }

    pub fn try_pow(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one());
        }
        let mut exps = BTreeMap::new();
        for (p, e) in self.iter() {
            exps.insert(p, e.checked_mul(k).ok_or(Error::ExponentOverflow(p))?);
        }
        Ok(FactoredRational { exps })
    }

    pub fn recip(&self) -> Self {
        FactoredRational {
            exps: self.exps.iter().map(|(&p, &e)| (p, -e)).collect(),
        }
    }

    /// True iff every exponent is nonnegative.
    pub fn is_integer(&self) -> bool {
        self.exps.values().all(|&e| e >= 0)
    }

    /// The value with its power of two removed.
    pub fn odd_part(&self) -> Self {
        let mut exps = self.exps.clone();
        exps.remove(&2);
        FactoredRational { exps }
    }

    /// Exact integer value, multiplied out with a balanced product tree.
    pub fn materialize(&self) -> Result<BigNatural> {
        if let Some((&p, &e)) = self.exps.iter().find(|(_, &e)| e < 0) {
            return Err(Error::NotAnInteger {
                prime: p,
                exponent: e,
            });
        }
        Ok(product_tree(self.iter().map(|(p, e)| (p, e as u64))))
    }

    /// Numerator and denominator in lowest terms.
    pub fn numer_denom(&self) -> (BigNatural, BigNatural) {
        let num = product_tree(
            self.iter()
                .filter(|&(_, e)| e > 0)
                .map(|(p, e)| (p, e as u64)),
        );
        let den = product_tree(
            self.iter()
                .filter(|&(_, e)| e < 0)
                .map(|(p, e)| (p, e.unsigned_abs())),
        );
        (num, den)
    }

    /// Exact order of two values, by comparing the integers of their ratio.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let ratio = self / other;
        if ratio.is_one() {
            return Ordering::Equal;
        }
        let (num, den) = ratio.numer_denom();
        num.cmp(&den)
    }

    /// Enclosure of `log2` of the value, computing each prime's log on the fly.
    pub fn log2_enclosure(&self) -> Log2Enclosure {
        self.iter().fold(Log2Enclosure::ZERO, |acc, (p, e)| {
            acc + Log2Enclosure::of_u64(p).scale(e)
        })
    }

    /// Same as [`log2_enclosure`](Self::log2_enclosure) with table lookups.
    pub fn log2_enclosure_in(&self, table: &PrimeLogTable) -> Log2Enclosure {
        self.iter().fold(Log2Enclosure::ZERO, |acc, (p, e)| {
            acc + table.log2(p).scale(e)
        })
    }

    /// Reduced fraction form: `1`, `15`, `1/25`, `2/3`.
    pub fn fraction_string(&self) -> String {
        let (num, den) = self.numer_denom();
        if den.is_one() {
            num.to_string()
        } else {
            format!("{num}/{den}")
        }
    }
}

/// `p^e` products multiplied pairwise so operand sizes stay balanced.
fn product_tree<I: Iterator<Item = (u64, u64)>>(factors: I) -> BigUint {
    let mut layer: Vec<BigUint> = factors
        .map(|(p, e)| {
            BigUint::from(p).pow(u32::try_from(e).expect("exponent too large to materialize"))
        })
        .collect();
    if layer.is_empty() {
        return BigUint::one();
    }
    while layer.len() > 1 {
        layer = layer
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => a * b,
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    layer.pop().unwrap()
}

impl Mul for &FactoredRational {
    type Output = FactoredRational;

    fn mul(self, rhs: &FactoredRational) -> FactoredRational {
        self.try_mul(rhs).expect("exponent overflow")
    }
}

impl Mul for FactoredRational {
    type Output = FactoredRational;

    fn mul(self, rhs: FactoredRational) -> FactoredRational {
        &self * &rhs
    }
}

impl Div for &FactoredRational {
    type Output = FactoredRational;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &FactoredRational) -> FactoredRational {
        self * &rhs.recip()
    }
}

impl<'a> IntoIterator for &'a FactoredRational {
    type Item = (&'a u64, &'a i64);
    type IntoIter = btree_map::Iter<'a, u64, i64>;

    fn into_iter(self) -> Self::IntoIter {
        self.exps.iter()
    }
}

/// Factored form: `2^1 * 3^-1`, or `1` for the empty product.
impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}
