//! One incremental pass producing per-`n` verdicts for selected statements.

use std::collections::VecDeque;

use crate::error::{domain, Result};
use crate::functions::h_two_exponent;
use crate::theorems::{
    constant_c, cor1_verdict, eq9_verdict, thm2_verdict, thm3_verdict, thm4_verdict, thm5_verdict,
    ConstantC, Margin, TheoremId, Verdict,
};
use crate::valuation::{is_prime, Factorize, PrimeLogTable, SpfSieve};

use super::walk::FWalk;

/// Verdicts for `n = 1..=n_max`, grouped by `n` and ordered by
/// [`TheoremId::ALL`] within each `n`.
pub struct TheoremScan<'a> {
    sieve: &'a SpfSieve,
    table: &'a PrimeLogTable,
    n_max: u64,
    which: Vec<TheoremId>,
    start: u64,
    stride: u64,
    prime: Option<u64>,
    walk: FWalk,
    c: Option<ConstantC>,
    /// Per odd prime: `(sum v2(r) vp(r), sum vp(r))`, indexed like the sieve primes.
    thm4: Vec<(i64, i64)>,
    thm5_lhs: i64,
    pending: VecDeque<Verdict>,
}

pub fn scan_theorems<'a>(
    sieve: &'a SpfSieve,
    table: &'a PrimeLogTable,
    n_max: u64,
    which: &[TheoremId],
) -> Result<TheoremScan<'a>> {
    super::check_range(sieve, n_max)?;
    let which: Vec<TheoremId> = TheoremId::ALL
        .into_iter()
        .filter(|t| which.contains(t))
        .collect();
    if which.is_empty() {
        return Err(domain("no theorem selected"));
    }
    let c = if which.contains(&TheoremId::Thm3) || which.contains(&TheoremId::Cor1) {
        Some(constant_c()?)
    } else {
        None
    };
    Ok(TheoremScan {
        sieve,
        table,
        n_max,
        which,
        start: 1,
        stride: 1,
        prime: None,
        walk: FWalk::new(),
        c,
        thm4: vec![(0, 0); sieve.primes_up_to(n_max).len()],
        thm5_lhs: 0,
        pending: VecDeque::new(),
    })
}

impl<'a> TheoremScan<'a> {
    /// Restricts prime-indexed statements to one odd prime.
    pub fn with_prime(mut self, p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(domain(format!("{p} is not an odd prime")));
        }
        self.prime = Some(p);
        Ok(self)
    }

    /// Emits verdicts only for `n = start, start + stride, ...`.
    pub fn sampled(mut self, start: u64, stride: u64) -> Result<Self> {
        if start == 0 || stride == 0 {
            return Err(domain("start and stride must be positive"));
        }
        self.start = start;
        self.stride = stride;
        Ok(self)
    }

    fn thm4_sums(&self, p: u64) -> (i64, i64) {
        match self.sieve.primes().binary_search(&p) {
            Ok(i) if i < self.thm4.len() => self.thm4[i],
            _ => (0, 0),
        }
    }

    fn advance(&mut self) -> Result<()> {
        self.walk.step(self.sieve, self.table)?;
        let n = self.walk.n();
        let k = n.trailing_zeros();
        self.thm5_lhs += h_two_exponent(k);
        if self.which.contains(&TheoremId::Thm4) {
            for (p, e) in self.sieve.factor_pairs(n >> k)? {
                let i = self
                    .sieve
                    .primes()
                    .binary_search(&p)
                    .map_err(|_| domain("sieve prime lookup"))?;
                self.thm4[i].0 += i64::from(k) * e;
                self.thm4[i].1 += e;
            }
        }
        if n < self.start || !(n - self.start).is_multiple_of(self.stride) {
            return Ok(());
        }

        let needs_h = self
            .which
            .iter()
            .any(|t| matches!(t, TheoremId::Thm2 | TheoremId::Thm3 | TheoremId::Eq9));
        let ph = if needs_h {
            self.walk.product_h()
        } else {
            Default::default()
        };
        let pf = self.walk.product_f();
        for t in self.which.clone() {
            let v = match t {
                TheoremId::Thm1 => {
                    let margin = Margin::Exact(pf.min_exponent().unwrap_or(0));
                    if self.walk.is_integer() {
                        Verdict::pass(t, n, margin)
                    } else {
                        Verdict::fail(
                            t,
                            n,
                            margin,
                            format!("product has negative exponents: {pf}"),
                        )
                    }
                }
                TheoremId::Thm2 => match self.prime {
                    Some(p) => {
                        let mut v = thm2_verdict(n, pf, &ph, &[p]);
                        v.p = Some(p);
                        v
                    }
                    None => thm2_verdict(n, pf, &ph, self.sieve.primes()),
                },
                TheoremId::Thm3 => {
                    thm3_verdict(n, &ph, &self.walk.log_h(), self.c.as_ref().unwrap())?
                }
                TheoremId::Thm4 => self.thm4_verdict(n),
                TheoremId::Thm5 => thm5_verdict(n, self.thm5_lhs)?,
                TheoremId::Cor1 => cor1_verdict(
                    n,
                    pf,
                    &self.walk.log_f(),
                    self.walk.h_v2(),
                    self.c.as_ref().unwrap(),
                )?,
                TheoremId::Eq9 => eq9_verdict(n, &ph, &self.walk.log_h()),
            };
            self.pending.push_back(v);
        }
        Ok(())
    }

    /// For one prime if chosen, else the tightest odd prime `p <= n`.
    fn thm4_verdict(&self, n: u64) -> Verdict {
        if let Some(p) = self.prime {
            let (lhs, svp) = self.thm4_sums(p);
            return thm4_verdict(n, p, lhs, svp);
        }
        let margin = |v: &Verdict| match v.margin {
            Margin::Exact(m) => m,
            Margin::Bits(_) => unreachable!(),
        };
        self.sieve
            .primes_up_to(n)
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &p)| thm4_verdict(n, p, self.thm4[i].0, self.thm4[i].1))
            .min_by_key(margin)
            .unwrap_or_else(|| Verdict::pass(TheoremId::Thm4, n, Margin::Exact(0)))
    }
}

impl Iterator for TheoremScan<'_> {
    type Item = Result<Verdict>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.pending.is_empty() {
            if self.walk.n() >= self.n_max {
                return None;
            }
            if let Err(e) = self.advance() {
                self.n_max = self.walk.n();
                return Some(Err(e));
            }
        }
        self.pending.pop_front().map(Ok)
    }
}
