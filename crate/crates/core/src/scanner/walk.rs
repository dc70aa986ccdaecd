//! Incremental state shared by the sweeps: the `f` product, its log
//! enclosure, and the exponent of 2 in the `h` product.

use crate::error::Result;
use crate::factored::FactoredRational;
use crate::functions::h_two_exponent;
use crate::interval::Log2Enclosure;
use crate::products::{product_f, v2_of_product_h, ProductAccumulator, ProductKind};
use crate::valuation::{PrimeLogTable, SpfSieve};

/// `sum_p e_p log2(p)` kept as a function of the current exponents.
///
/// Each prime contributes `scale(e_p)` of its enclosure. Updates subtract the
/// old contribution and add the new one in integers, so the sum depends only
/// on the exponent map and never on the path taken to reach it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct LogSum {
    lo: i128,
    hi: i128,
}

impl LogSum {
    pub(crate) fn of(value: &FactoredRational, table: &PrimeLogTable) -> Self {
        let mut s = LogSum { lo: 0, hi: 0 };
        for (p, e) in value.iter() {
            s.update(table.log2(p), 0, e);
        }
        s
    }

    fn update(&mut self, log_p: Log2Enclosure, old: i64, new: i64) {
        let (o, n) = (log_p.scale(old), log_p.scale(new));
        self.lo += n.lo_fixed() - o.lo_fixed();
        self.hi += n.hi_fixed() - o.hi_fixed();
    }

    pub(crate) fn enclosure(&self) -> Log2Enclosure {
        Log2Enclosure::from_fixed(self.lo, self.hi)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct FWalk {
    acc: ProductAccumulator,
    log_f: LogSum,
    h_v2: i64,
}

impl FWalk {
    pub(crate) fn new() -> Self {
        FWalk {
            acc: ProductAccumulator::new(ProductKind::F),
            log_f: LogSum { lo: 0, hi: 0 },
            h_v2: 0,
        }
    }

    /// State after `n` steps, from the closed form.
    pub(crate) fn at(sieve: &SpfSieve, table: &PrimeLogTable, n: u64) -> Result<Self> {
        if n == 0 {
            return Ok(Self::new());
        }
        Ok(Self::from_product(
            n,
            product_f(sieve, n)?,
            table,
            v2_of_product_h(n)?,
        ))
    }

    pub(crate) fn from_product(
        n: u64,
        pf: FactoredRational,
        table: &PrimeLogTable,
        h_v2: i64,
    ) -> Self {
        FWalk {
            log_f: LogSum::of(&pf, table),
            acc: ProductAccumulator::from_state(ProductKind::F, n, pf),
            h_v2,
        }
    }

    /// Advances one index and returns the odd factorization of the term.
    pub(crate) fn step(
        &mut self,
        sieve: &SpfSieve,
        table: &PrimeLogTable,
    ) -> Result<Vec<(u64, i64)>> {
        let term = self.acc.step(sieve)?;
        for &(p, e) in &term {
            let new = self.acc.value().exponent(p);
            self.log_f.update(table.log2(p), new - e, new);
        }
        self.h_v2 += h_two_exponent(self.acc.n().trailing_zeros());
        Ok(term)
    }

    pub(crate) fn n(&self) -> u64 {
        self.acc.n()
    }

    pub(crate) fn product_f(&self) -> &FactoredRational {
        self.acc.value()
    }

    pub(crate) fn is_integer(&self) -> bool {
        self.acc.is_integer()
    }

    pub(crate) fn h_v2(&self) -> i64 {
        self.h_v2
    }

    pub(crate) fn log_f(&self) -> Log2Enclosure {
        self.log_f.enclosure()
    }

    pub(crate) fn log_h(&self) -> Log2Enclosure {
        self.log_f() + Log2Enclosure::integer(self.h_v2)
    }

    /// `prod h` as a factored value: `prod f` times `2^h_v2`.
    pub(crate) fn product_h(&self) -> FactoredRational {
        let mut ph = self.acc.value().clone();
        ph.mul_prime_power(2, self.h_v2)
            .expect("fresh exponent of 2");
        ph
    }
}

/// Location of the largest `P(n)^(1/n)` seen so far, `P = prod h`.
///
/// Later indices attaining the same value are listed in `ties`; the
/// earliest index is kept as the maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RunningMax {
    pub(crate) n: u64,
    pub(crate) log: Log2Enclosure,
    pub(crate) ties: Vec<u64>,
}

impl RunningMax {
    pub(crate) fn new() -> Self {
        RunningMax {
            n: 0,
            log: Log2Enclosure::ZERO,
            ties: Vec::new(),
        }
    }

    pub(crate) fn offer(&mut self, sieve: &SpfSieve, n: u64, log: Log2Enclosure) -> Result<()> {
        self.offer_with_ties(sieve, n, log, &[])
    }

    /// Merges another maximum (and its ties) computed over later indices.
    pub(crate) fn merge(&mut self, sieve: &SpfSieve, other: &RunningMax) -> Result<()> {
        if other.n == 0 {
            return Ok(());
        }
        self.offer_with_ties(sieve, other.n, other.log, &other.ties)
    }

    fn offer_with_ties(
        &mut self,
        sieve: &SpfSieve,
        n: u64,
        log: Log2Enclosure,
        ties: &[u64],
    ) -> Result<()> {
        if self.n == 0 {
            *self = RunningMax {
                n,
                log,
                ties: ties.to_vec(),
            };
            return Ok(());
        }
        // log/n against best/b, cleared of denominators.
        let lhs = log.scale(self.n as i64);
        let rhs = self.log.scale(n as i64);
        let ord = match lhs.cmp_enclosure(&rhs) {
            Some(ord) => ord,
            None => {
                let a = crate::products::product_h_closed(sieve, n)?.try_pow(self.n as i64)?;
                let b = crate::products::product_h_closed(sieve, self.n)?.try_pow(n as i64)?;
                a.cmp_exact(&b)
            }
        };
        match ord {
            std::cmp::Ordering::Greater => {
                *self = RunningMax {
                    n,
                    log,
                    ties: ties.to_vec(),
                }
            }
            std::cmp::Ordering::Equal => {
                self.ties.push(n);
                self.ties.extend_from_slice(ties);
            }
            std::cmp::Ordering::Less => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incremental_log_matches_closed_form_state() {
        let sieve = SpfSieve::new(3000).unwrap();
        let table = PrimeLogTable::build(&sieve);
        let mut w = FWalk::new();
        for n in 1..=3000u64 {
            w.step(&sieve, &table).unwrap();
            if n % 97 == 0 || n == 3000 {
                let fresh = FWalk::at(&sieve, &table, n).unwrap();
                assert_eq!(w.log_f(), fresh.log_f(), "n = {n}");
                assert_eq!(w.h_v2(), fresh.h_v2());
                assert_eq!(w.product_f(), fresh.product_f());
            }
        }
    }

    #[test]
    fn log_encloses_the_product() {
        let sieve = SpfSieve::new(10).unwrap();
        let table = PrimeLogTable::build(&sieve);
        let w = FWalk::at(&sieve, &table, 6).unwrap();
        assert_eq!(w.product_f().materialize().unwrap(), 15u32.into());
        assert!(w.log_f().to_interval::<f64>().contains(15f64.log2()));
        assert_eq!(w.product_h().materialize().unwrap(), 120u32.into());
    }

    #[test]
    fn running_max_over_small_range() {
        let sieve = SpfSieve::new(2000).unwrap();
        let table = PrimeLogTable::build(&sieve);
        let mut w = FWalk::new();
        let mut best = RunningMax::new();
        for _ in 0..2000 {
            w.step(&sieve, &table).unwrap();
            best.offer(&sieve, w.n(), w.log_h()).unwrap();
        }
        assert_eq!(best.n, 1023);
        assert!(best.ties.is_empty());
    }
}
