//! Enclosures of `(prod f)^(1/n)` and `(prod h)^(1/n)` at structurally
//! interesting indices, with a check of every `(prod h)^(1/n)` against `c`.
//!
//! This only records the trend. Nothing here asserts a rate of convergence.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{domain, Result};
use crate::theorems::{cmp_with_c_power, constant_c, nth_root};
use crate::valuation::{PrimeLogTable, SpfSieve};
use crate::Interval64;

use super::walk::{FWalk, RunningMax};

pub const CSV_HEADER: &str = "n,root_f_lo,root_f_hi,root_h_lo,root_h_hi";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitSample {
    pub n: u64,
    pub root_f: Interval64,
    pub root_h: Interval64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    /// At `2^m`, `2^m - 1` and `n_max`, increasing.
    pub samples: Vec<LimitSample>,
    /// Index of the largest `(prod h)^(1/n)`.
    pub argmax: u64,
    /// Later indices with the same root as `argmax`.
    pub argmax_ties: Vec<u64>,
    /// Indices where `(prod h)^(1/n)` equals `c` exactly.
    pub c_ties: Vec<u64>,
    /// Indices where `(prod h)^(1/n)` exceeds `c`.
    pub violations: Vec<u64>,
}

impl LimitReport {
    pub fn within_c(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for s in &self.samples {
            writeln!(
                out,
                "{},{:?},{:?},{:?},{:?}",
                s.n,
                s.root_f.lo(),
                s.root_f.hi(),
                s.root_h.lo(),
                s.root_h.hi()
            )
            .unwrap();
        }
        out
    }
}

fn sample_points(n_max: u64) -> BTreeSet<u64> {
    let mut pts: BTreeSet<u64> = (0..64)
        .map(|m| 1u64 << m)
        .take_while(|&p| p <= n_max.saturating_add(1))
        .flat_map(|p| [p, p - 1])
        .filter(|&n| (1..=n_max).contains(&n))
        .collect();
    pts.insert(n_max);
    pts
}

pub fn limit_monitor(sieve: &SpfSieve, table: &PrimeLogTable, n_max: u64) -> Result<LimitReport> {
    if n_max < 4 {
        return Err(domain("the monitor needs n_max >= 4"));
    }
    super::check_range(sieve, n_max)?;
    let c = constant_c()?;
    let points = sample_points(n_max);
    let base = c.base_n as i64;

    let mut walk = FWalk::new();
    let mut best = RunningMax::new();
    let mut samples = Vec::with_capacity(points.len());
    let (mut c_ties, mut violations) = (Vec::new(), Vec::new());
    for _ in 0..n_max {
        walk.step(sieve, table)?;
        let n = walk.n();
        let log_h = walk.log_h();
        best.offer(sieve, n, log_h)?;

        let fast = log_h.scale(base).cmp_enclosure(&c.log2_p.scale(n as i64));
        let ord = match fast {
            Some(ord) => ord,
            None => cmp_with_c_power(n, &walk.product_h(), &log_h, &c)?.0,
        };
        match ord {
            Ordering::Equal => c_ties.push(n),
            Ordering::Greater => violations.push(n),
            Ordering::Less => {}
        }
        if points.contains(&n) {
            samples.push(LimitSample {
                n,
                root_f: nth_root(&walk.log_f(), n),
                root_h: nth_root(&log_h, n),
            });
        }
    }
    Ok(LimitReport {
        samples,
        argmax: best.n,
        argmax_ties: best.ties,
        c_ties,
        violations,
    })
}
