//! Sweeps over `n = 1..=N`: the `prod f < 4^n` scan, per-`n` theorem
//! verdicts, and the `n`-th root monitor.
//!
//! Every sweep walks the product incrementally and decides comparisons with
//! log enclosures, materializing big integers only when an enclosure is
//! inconclusive.

mod checkpoint;
mod monitor;
mod sweep;
mod walk;

use std::cmp::Ordering;
use std::path::PathBuf;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::factored::FactoredRational;
use crate::valuation::{PrimeLogTable, SpfSieve};
use crate::Interval64;

pub use checkpoint::{Checkpoint, HEADER as CHECKPOINT_HEADER};
pub use monitor::{limit_monitor, LimitReport, LimitSample, CSV_HEADER};
pub use sweep::{scan_theorems, TheoremScan};

use walk::{FWalk, RunningMax};

pub const DEFAULT_CHECKPOINT_EVERY: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanStatus {
    Pass,
    Fail,
    Tie,
}

/// Outcome of `prod_{r<=n} f(r) < 4^n` at one `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRecord {
    pub n: u64,
    pub log2_f_product: Interval64,
    /// `2n - log2 prod f`.
    pub slack_bits: Interval64,
    /// The enclosure straddled `2n` and the exact comparison decided.
    pub escalated: bool,
    pub status: ScanStatus,
}

#[derive(Serialize)]
struct RecordLine {
    n: u64,
    slack_bits_lo: f64,
    slack_bits_hi: f64,
    escalated: bool,
    status: ScanStatus,
}

impl ScanRecord {
    /// One JSON object, without the trailing newline.
    pub fn json_line(&self) -> String {
        serde_json::to_string(&RecordLine {
            n: self.n,
            slack_bits_lo: self.slack_bits.lo(),
            slack_bits_hi: self.slack_bits.hi(),
            escalated: self.escalated,
            status: self.status,
        })
        .expect("record serializes")
    }
}

/// Everything needed to inspect a failing or tied index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureWitness {
    pub n: u64,
    pub product: FactoredRational,
    pub transcript: String,
}

#[derive(Clone, Debug)]
pub struct CheckpointPolicy {
    pub path: PathBuf,
    pub every: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanSummary {
    pub n_done: u64,
    pub escalations: u64,
    /// Index of the largest `P(n)^(1/n)` with `P = prod h`.
    pub running_max: u64,
    /// Later indices attaining the same root.
    pub running_max_ties: Vec<u64>,
    pub witness: Option<ConjectureWitness>,
}

/// Sequential `prod f < 4^n` scan, one record per index.
///
/// Stops after the first failing or tied index; the witness is then
/// available from [`summary`](Self::summary).
pub struct ConjectureScan<'a> {
    sieve: &'a SpfSieve,
    table: &'a PrimeLogTable,
    n_max: u64,
    walk: FWalk,
    best: RunningMax,
    escalations: u64,
    checkpoint: Option<CheckpointPolicy>,
    witness: Option<ConjectureWitness>,
    halted: bool,
}

fn check_range(sieve: &SpfSieve, n_max: u64) -> Result<()> {
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    if n_max > sieve.limit() {
        return Err(Error::OutOfRange {
            value: n_max,
            limit: sieve.limit(),
        });
    }
    Ok(())
}

impl<'a> ConjectureScan<'a> {
    pub fn new(
        sieve: &'a SpfSieve,
        table: &'a PrimeLogTable,
        n_max: u64,
        checkpoint: Option<CheckpointPolicy>,
    ) -> Result<Self> {
        check_range(sieve, n_max)?;
        if checkpoint.as_ref().is_some_and(|c| c.every == 0) {
            return Err(domain("checkpoint interval must be positive"));
        }
        Ok(ConjectureScan {
            sieve,
            table,
            n_max,
            walk: FWalk::new(),
            best: RunningMax::new(),
            escalations: 0,
            checkpoint,
            witness: None,
            halted: false,
        })
    }

    /// Continues after a checkpoint.
    ///
    /// The prefix is replayed to rebuild the running maximum, and the
    /// replayed product must match the stored one.
    pub fn resume(
        sieve: &'a SpfSieve,
        table: &'a PrimeLogTable,
        checkpoint: &Checkpoint,
        n_max: u64,
        policy: Option<CheckpointPolicy>,
    ) -> Result<Self> {
        let mut scan = Self::new(sieve, table, n_max, policy)?;
        if checkpoint.n_done > n_max {
            return Err(domain(format!(
                "checkpoint at {} is past n_max = {n_max}",
                checkpoint.n_done
            )));
        }
        for _ in 0..checkpoint.n_done {
            scan.walk.step(sieve, table)?;
            scan.best.offer(sieve, scan.walk.n(), scan.walk.log_h())?;
        }
        if scan.walk.product_f() != &checkpoint.f_exponents || scan.walk.h_v2() != checkpoint.h_v2 {
            return Err(Error::CheckpointFormat(format!(
                "stored product does not match the product at n = {}",
                checkpoint.n_done
            )));
        }
        Ok(scan)
    }

    /// A scan of `start+1..=end` whose initial state comes from the closed form.
    fn block(sieve: &'a SpfSieve, table: &'a PrimeLogTable, start: u64, end: u64) -> Result<Self> {
        let mut scan = Self::new(sieve, table, end, None)?;
        scan.walk = FWalk::at(sieve, table, start)?;
        Ok(scan)
    }

    pub fn n_done(&self) -> u64 {
        self.walk.n()
    }

    pub fn escalations(&self) -> u64 {
        self.escalations
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            n_done: self.walk.n(),
            f_exponents: self.walk.product_f().clone(),
            h_v2: self.walk.h_v2(),
            running_max: (self.best.n > 0).then_some(self.best.n),
        }
    }

    pub fn summary(&self) -> ScanSummary {
        ScanSummary {
            n_done: self.walk.n(),
            escalations: self.escalations,
            running_max: self.best.n,
            running_max_ties: self.best.ties.clone(),
            witness: self.witness.clone(),
        }
    }

    fn advance(&mut self) -> Result<ScanRecord> {
        self.walk.step(self.sieve, self.table)?;
        let n = self.walk.n();
        let target = i64::try_from(2 * n).map_err(|_| domain("n too large"))?;
        let log_f = self.walk.log_f();
        self.best.offer(self.sieve, n, self.walk.log_h())?;

        let (ord, escalated) = match log_f.cmp_integer(target) {
            Some(ord) => (ord, false),
            None => {
                self.escalations += 1;
                let exact = self.walk.product_f().materialize()?;
                (exact.cmp(&(BigUint::from(1u32) << (2 * n))), true)
            }
        };
        let status = match ord {
            Ordering::Less => ScanStatus::Pass,
            Ordering::Equal => ScanStatus::Tie,
            Ordering::Greater => ScanStatus::Fail,
        };
        let record = ScanRecord {
            n,
            log2_f_product: log_f.to_interval(),
            slack_bits: log_f.subtracted_from(target).to_interval(),
            escalated,
            status,
        };
        if status != ScanStatus::Pass {
            self.witness = Some(self.witness_for(&record, ord));
            self.halted = true;
        }
        if let Some(policy) = &self.checkpoint {
            if n.is_multiple_of(policy.every) {
                self.checkpoint().save(&policy.path)?;
            }
        }
        Ok(record)
    }

    fn witness_for(&self, record: &ScanRecord, ord: Ordering) -> ConjectureWitness {
        let pf = self.walk.product_f();
        let rel = match ord {
            Ordering::Less => "<",
            Ordering::Equal => "=",
            Ordering::Greater => ">",
        };
        let transcript = format!(
            "n = {n}\nprod f = {pf}\nprod f = {value}\nlog2 prod f in [{lo}, {hi}]\nescalated = {esc}\nexact: prod f {rel} 4^{n}\n",
            n = record.n,
            value = pf.fraction_string(),
            lo = record.log2_f_product.lo(),
            hi = record.log2_f_product.hi(),
            esc = record.escalated,
        );
        ConjectureWitness {
            n: record.n,
            product: pf.clone(),
            transcript,
        }
    }
}

impl Iterator for ConjectureScan<'_> {
    type Item = Result<ScanRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.halted || self.walk.n() >= self.n_max {
            return None;
        }
        let out = self.advance();
        if out.is_err() {
            self.halted = true;
        }
        Some(out)
    }
}

/// Block-parallel scan over `1..=n_max` with `jobs` worker threads.
///
/// Each block starts from the closed-form product at its left edge. Records
/// and the summary are identical to the sequential scan.
pub fn scan_parallel(
    sieve: &SpfSieve,
    table: &PrimeLogTable,
    n_max: u64,
    jobs: usize,
) -> Result<(Vec<ScanRecord>, ScanSummary)> {
    check_range(sieve, n_max)?;
    if jobs == 0 {
        return Err(domain("jobs must be positive"));
    }
    let len = n_max.div_ceil(jobs as u64 * 4).max(1);
    let blocks: Vec<(u64, u64)> = (0..n_max)
        .step_by(len as usize)
        .map(|a| (a, (a + len).min(n_max)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| domain(e.to_string()))?;
    let outs: Vec<Result<(Vec<ScanRecord>, ScanSummary)>> = pool.install(|| {
        blocks
            .par_iter()
            .map(|&(a, b)| {
                let mut scan = ConjectureScan::block(sieve, table, a, b)?;
                let records = scan.by_ref().collect::<Result<Vec<_>>>()?;
                Ok((records, scan.summary()))
            })
            .collect()
    });

    let mut records = Vec::with_capacity(n_max as usize);
    let mut best = RunningMax::new();
    let mut summary = ScanSummary {
        n_done: 0,
        escalations: 0,
        running_max: 0,
        running_max_ties: Vec::new(),
        witness: None,
    };
    for out in outs {
        let (block_records, s) = out?;
        records.extend(block_records);
        summary.n_done = s.n_done;
        summary.escalations += s.escalations;
        best.merge(
            sieve,
            &RunningMax {
                n: s.running_max,
                log: max_log(sieve, table, s.running_max)?,
                ties: s.running_max_ties,
            },
        )?;
        if s.witness.is_some() {
            summary.witness = s.witness;
            break;
        }
    }
    summary.running_max = best.n;
    summary.running_max_ties = best.ties;
    Ok((records, summary))
}

fn max_log(sieve: &SpfSieve, table: &PrimeLogTable, n: u64) -> Result<crate::Log2Enclosure> {
    if n == 0 {
        return Ok(crate::Log2Enclosure::ZERO);
    }
    Ok(FWalk::at(sieve, table, n)?.log_h())
}
