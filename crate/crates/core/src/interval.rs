//! Rigorous enclosures of base-2 logarithms.
//!
//! Two representations live here. [`Log2Enclosure`] is an exact fixed-point
//! pair of integers (units of `2^-FRAC_BITS`) whose sums and integer scalings
//! are exact, so an incrementally maintained enclosure is bit-identical to one
//! recomputed from scratch. [`Interval`] is a floating-point interval, generic
//! over the scalar type, used for reporting and for the few operations that
//! need real arithmetic (roots, squares).

use std::cmp::Ordering;
use std::ops::{Add, Sub};

use num_bigint::{BigInt, BigUint};
use num_traits::{Float, One, Zero};
use serde::{Deserialize, Serialize};

/// Fractional bits of a [`Log2Enclosure`].
pub const FRAC_BITS: u32 = 60;

/// Closed interval `[lo, hi]` over a floating-point scalar.
///
/// Every operation rounds outward, assuming the underlying primitive is
/// accurate to within one unit in the last place.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

/// Largest float strictly below `x` by at least one ulp.
fn widen_down<T: Float>(x: T) -> T {
    x - (x.abs() * T::epsilon()).max(T::min_positive_value())
}

fn widen_up<T: Float>(x: T) -> T {
    x + (x.abs() * T::epsilon()).max(T::min_positive_value())
}

impl<T: Float> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval { lo, hi }
    }

    pub fn point(x: T) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `Some(true)` if every point is `<= other`, `Some(false)` if every
    /// point is `> other`, `None` when the intervals overlap.
    pub fn certainly_le(&self, other: &Self) -> Option<bool> {
        if self.hi <= other.lo {
            Some(true)
        } else if self.lo > other.hi {
            Some(false)
        } else {
            None
        }
    }

    pub fn scale(&self, k: T) -> Self {
        let (a, b) = (self.lo * k, self.hi * k);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Interval::new(widen_down(a), widen_up(b))
    }

    /// Division by a strictly positive scalar.
    pub fn div_scalar(&self, k: T) -> Self {
        assert!(k > T::zero(), "divisor must be positive");
        Interval::new(widen_down(self.lo / k), widen_up(self.hi / k))
    }

    pub fn square(&self) -> Self {
        let a = self.lo * self.lo;
        let b = self.hi * self.hi;
        if self.lo >= T::zero() {
            Interval::new(widen_down(a), widen_up(b))
        } else if self.hi <= T::zero() {
            Interval::new(widen_down(b), widen_up(a))
        } else {
            Interval::new(T::zero(), widen_up(a.max(b)))
        }
    }

    /// `2^x` over the interval. The libm `exp2` is trusted to one ulp; two
    /// widening steps leave a margin over that.
    pub fn exp2(&self) -> Self {
        let lo = widen_down(widen_down(self.lo.exp2())).max(T::zero());
        let hi = widen_up(widen_up(self.hi.exp2()));
        Interval::new(lo, hi)
    }
}

impl<T: Float> Add for Interval<T> {
    type Output = Interval<T>;

    fn add(self, rhs: Self) -> Self {
        Interval::new(widen_down(self.lo + rhs.lo), widen_up(self.hi + rhs.hi))
    }
}

impl<T: Float> Sub for Interval<T> {
    type Output = Interval<T>;

    fn sub(self, rhs: Self) -> Self {
        Interval::new(widen_down(self.lo - rhs.hi), widen_up(self.hi - rhs.lo))
    }
}

/// Enclosure `[lo, hi] * 2^-FRAC_BITS` of a base-2 logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Log2Enclosure {
    lo: i128,
    hi: i128,
}

impl Log2Enclosure {
    pub const ZERO: Log2Enclosure = Log2Enclosure { lo: 0, hi: 0 };

    /// Bounds given directly in fixed-point units.
    pub fn from_fixed(lo: i128, hi: i128) -> Self {
        assert!(lo <= hi, "enclosure bounds out of order");
        Log2Enclosure { lo, hi }
    }

    /// The exact value `k`.
    pub fn integer(k: i64) -> Self {
        let v = i128::from(k) << FRAC_BITS;
        Log2Enclosure { lo: v, hi: v }
    }

    /// Enclosure of `log2(m)` for `m >= 1`.
    ///
    /// Bits of the fraction come from repeated squaring of the mantissa in
    /// `[1, 2)`. The lower chain floors every product and the upper chain
    /// takes ceilings, which keeps each chain a one-sided bound on its own.
    pub fn of_u64(m: u64) -> Self {
        assert!(m >= 1, "log2 of zero");
        let k = 63 - m.leading_zeros();
        let whole = i128::from(k) << FRAC_BITS;
        if m.is_power_of_two() {
            return Log2Enclosure {
                lo: whole,
                hi: whole,
            };
        }
        // Mantissa scaled by 2^62.
        const SCALE_BITS: u32 = 62;
        let (start_lo, start_hi) = if k <= SCALE_BITS {
            let y = u128::from(m) << (SCALE_BITS - k);
            (y, y)
        } else {
            let shift = k - SCALE_BITS;
            let y = u128::from(m) >> shift;
            let exact = (u128::from(m) & ((1u128 << shift) - 1)) == 0;
            (y, if exact { y } else { y + 1 })
        };
        let two_sq = 2u128 << (2 * SCALE_BITS);

        let mut frac_lo: i128 = 0;
        let mut x = start_lo;
        for _ in 0..FRAC_BITS {
            let sq = x * x;
            let bit = sq >= two_sq;
            x = sq >> (SCALE_BITS + u32::from(bit));
            frac_lo = (frac_lo << 1) | i128::from(bit);
        }

        let mut frac_hi: i128 = 0;
        let mut x = start_hi;
        for _ in 0..FRAC_BITS {
            let sq = x * x;
            let bit = sq >= two_sq;
            let shift = SCALE_BITS + u32::from(bit);
            let q = sq >> shift;
            x = if q << shift == sq { q } else { q + 1 };
            frac_hi = (frac_hi << 1) | i128::from(bit);
        }

        Log2Enclosure {
            lo: whole + frac_lo,
            hi: whole + frac_hi + 1,
        }
    }

    pub fn lo_fixed(&self) -> i128 {
        self.lo
    }

    pub fn hi_fixed(&self) -> i128 {
        self.hi
    }

    pub fn width_fixed(&self) -> i128 {
        self.hi - self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Multiplication by an integer; `None` on overflow.
    pub fn checked_scale(&self, e: i64) -> Option<Self> {
        let e = i128::from(e);
        let a = self.lo.checked_mul(e)?;
        let b = self.hi.checked_mul(e)?;
        Some(if e >= 0 {
            Log2Enclosure { lo: a, hi: b }
        } else {
            Log2Enclosure { lo: b, hi: a }
        })
    }

    pub fn scale(&self, e: i64) -> Self {
        self.checked_scale(e).expect("log2 enclosure overflow")
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(Log2Enclosure {
            lo: self.lo.checked_add(other.lo)?,
            hi: self.hi.checked_add(other.hi)?,
        })
    }

    /// Enclosure of `t - self`.
    pub fn subtracted_from(&self, t: i64) -> Self {
        let v = i128::from(t) << FRAC_BITS;
        Log2Enclosure {
            lo: v - self.hi,
            hi: v - self.lo,
        }
    }

    /// Decides the order of the enclosed value against the integer `t`, or
    /// `None` if `t` lies inside a non-degenerate enclosure.
    pub fn cmp_integer(&self, t: i64) -> Option<Ordering> {
        self.cmp_fixed(i128::from(t) << FRAC_BITS)
    }

    fn cmp_fixed(&self, v: i128) -> Option<Ordering> {
        if self.hi < v {
            Some(Ordering::Less)
        } else if self.lo > v {
            Some(Ordering::Greater)
        } else if self.lo == v && self.hi == v {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Order of two enclosed values when the enclosures do not overlap
    /// (or are both the same exact point).
    pub fn cmp_enclosure(&self, other: &Self) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Outward conversion to a floating-point interval.
    pub fn to_interval<T: Float>(&self) -> Interval<T> {
        Interval::new(fixed_to_float_down(self.lo), fixed_to_float_up(self.hi))
    }
}

impl Add for Log2Enclosure {
    type Output = Log2Enclosure;

    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("log2 enclosure overflow")
    }
}

fn fixed_unit<T: Float>() -> T {
    T::from(2.0f64).unwrap().powi(-(FRAC_BITS as i32))
}

/// Nearest float to `v`, plus whether the conversion was exact.
fn nearest<T: Float>(v: i128) -> (T, bool) {
    let x = T::from(v).expect("fixed-point value out of float range");
    (x, x.to_i128() == Some(v))
}

fn fixed_to_float_down<T: Float>(v: i128) -> T {
    let (x, exact) = nearest::<T>(v);
    let x = if exact { x } else { widen_down(x) };
    x * fixed_unit::<T>()
}

fn fixed_to_float_up<T: Float>(v: i128) -> T {
    let (x, exact) = nearest::<T>(v);
    let x = if exact { x } else { widen_up(x) };
    x * fixed_unit::<T>()
}

/// Arbitrary-precision enclosure of `log2(v)` scaled by `2^frac_bits`.
///
/// Same squaring scheme as [`Log2Enclosure::of_u64`] with a configurable
/// working precision; used where the 60-bit tier is inconclusive.
pub fn log2_bounds_big(v: &BigUint, frac_bits: u32) -> (BigInt, BigInt) {
    assert!(!v.is_zero(), "log2 of zero");
    let k = v.bits() - 1;
    let whole = BigInt::from(k) << frac_bits;
    if v.count_ones() == 1 {
        return (whole.clone(), whole);
    }
    let work = u64::from(frac_bits) + 32;
    let (start_lo, start_hi) = if k <= work {
        let y = v << (work - k);
        (y.clone(), y)
    } else {
        let shift = k - work;
        let y: BigUint = v >> shift;
        let exact = (&y << shift) == *v;
        let hi = if exact { y.clone() } else { &y + 1u32 };
        (y, hi)
    };
    let two = BigUint::one() << (work + 1);

    let run = |mut x: BigUint, ceil: bool| -> BigUint {
        let mut frac = BigUint::zero();
        for _ in 0..frac_bits {
            let sq = &x * &x;
            let bit = sq >= (&two << work);
            let shift = work + u64::from(bit);
            let q: BigUint = &sq >> shift;
            x = if ceil && (&q << shift) != sq {
                q + 1u32
            } else {
                q
            };
            frac = (frac << 1u32) + u32::from(bit);
        }
        frac
    };
    let lo = &whole + BigInt::from(run(start_lo, false));
    let hi = whole + BigInt::from(run(start_hi, true)) + 1;
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    // log2(3) to 40 digits, from an independent multiprecision evaluation.
    const LOG2_3: f64 = 1.584_962_500_721_156_181_453_738_943_947_816_508_76;

    #[test]
    fn exact_powers_of_two() {
        assert_eq!(Log2Enclosure::of_u64(1), Log2Enclosure::ZERO);
        let e = Log2Enclosure::of_u64(1024);
        assert!(e.is_exact());
        assert_eq!(e.cmp_integer(10), Some(Ordering::Equal));
        let iv: Interval<f64> = e.to_interval();
        assert_eq!((iv.lo(), iv.hi()), (10.0, 10.0));
    }

    #[test]
    fn log2_of_three_is_enclosed() {
        let e = Log2Enclosure::of_u64(3);
        assert!(e.width_fixed() <= 2);
        let iv: Interval<f64> = e.to_interval();
        assert!(iv.contains(LOG2_3));
        assert!(iv.width() < 1e-15);
    }

    #[test]
    fn small_and_big_routes_agree() {
        for m in [
            3u64,
            5,
            7,
            97,
            1_000_003,
            u64::MAX,
            (1u64 << 63) + 1,
            0xdead_beef,
        ] {
            let fast = Log2Enclosure::of_u64(m);
            let (lo, hi) = log2_bounds_big(&BigUint::from(m), 120);
            let shift = 120 - FRAC_BITS;
            // big enclosure is tighter; both must overlap and fast must contain big.
            assert!(BigInt::from(fast.lo_fixed()) << shift <= lo, "m={m}");
            assert!(BigInt::from(fast.hi_fixed()) << shift >= hi, "m={m}");
            assert!(&hi - &lo <= BigInt::from(4));
        }
    }

    #[test]
    fn enclosure_brackets_exact_powers() {
        // 2^lo <= m^(2^s) <= 2^hi, checked with integers for a few mantissa bits.
        for m in [3u64, 10, 12345, 999_983] {
            let e = Log2Enclosure::of_u64(m);
            let s = 16u32;
            let pow = BigUint::from(m).pow(1 << s);
            let lo = e.lo_fixed() >> (FRAC_BITS - s);
            let hi = (e.hi_fixed() >> (FRAC_BITS - s)) + 1;
            assert!(BigUint::one() << (lo as u64) <= pow);
            assert!(pow <= BigUint::one() << (hi as u64));
        }
    }

    #[test]
    fn generic_interval_in_both_widths() {
        let e = Log2Enclosure::of_u64(3);
        let a: Interval<f32> = e.to_interval();
        let b: Interval<f64> = e.to_interval();
        assert!(a.contains(LOG2_3 as f32) || a.lo() as f64 <= LOG2_3 && LOG2_3 <= a.hi() as f64);
        assert!(b.contains(LOG2_3));
        assert!(a.width() as f64 >= b.width());
    }

    #[test]
    fn interval_ops_round_outward() {
        let x = Interval::new(0.1f64, 0.1);
        let s = x + x + x;
        assert!(s.lo() < 0.3 && s.hi() > 0.3);
        let sq = Interval::new(-2.0f64, 1.0).square();
        assert_eq!(sq.lo(), 0.0);
        assert!(sq.hi() >= 4.0);
        let r = Interval::point(2.0f64).exp2();
        assert!(r.contains(4.0));
        assert_eq!(
            Interval::new(1.0, 2.0).certainly_le(&Interval::new(2.0, 3.0)),
            Some(true)
        );
        assert_eq!(
            Interval::new(1.0, 2.5).certainly_le(&Interval::new(2.0, 3.0)),
            None
        );
    }

    #[test]
    fn scaling_and_comparisons() {
        let e = Log2Enclosure::of_u64(3).scale(-2);
        assert!(e.lo_fixed() < e.hi_fixed());
        assert_eq!(e.cmp_integer(-3), Some(Ordering::Less));
        assert_eq!(e.cmp_integer(-4), Some(Ordering::Greater));
        assert_eq!(e.cmp_integer(-2), Some(Ordering::Less));
        let s = Log2Enclosure::integer(12).subtracted_from(12);
        assert_eq!(s, Log2Enclosure::ZERO);
    }
}
