//! Acceptance suite. Runs each criterion, prints one PASS/FAIL line per
//! criterion, and exits nonzero if any fails.

use std::cmp::Ordering;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use vforge_core::functions::{f, h_two_exponent};
use vforge_core::products::product_h_closed;
use vforge_core::scanner::{
    limit_monitor, scan_theorems, Checkpoint, CheckpointPolicy, ConjectureScan, ScanRecord,
    ScanStatus, CSV_HEADER,
};
use vforge_core::theorems::{check_thm4, cmp_with_c_power, constant_c};
use vforge_core::valuation::alpha_p;
use vforge_core::{
    FactoredRational, Margin, PrimeLogTable, ProductAccumulator, ProductKind, SpfSieve, TheoremId,
};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn setup(limit: u64) -> std::result::Result<(SpfSieve, PrimeLogTable), String> {
    let sieve = SpfSieve::new(limit).map_err(err)?;
    let table = PrimeLogTable::build(&sieve);
    Ok((sieve, table))
}

fn fr(pairs: &[(u64, i64)]) -> FactoredRational {
    FactoredRational::from_pairs(pairs.iter().copied()).unwrap()
}

fn examples() -> Check {
    let want = [
        (1, fr(&[])),
        (2, fr(&[])),
        (3, fr(&[(3, 1)])),
        (12, fr(&[(3, -1)])),
        (40, fr(&[(5, -2)])),
    ];
    for (n, v) in want {
        let got = f(n).map_err(err)?;
        ensure(got == v, || format!("f({n}) = {}", got.fraction_string()))?;
    }
    Ok("f(1)=1 f(2)=1 f(3)=3 f(12)=1/3 f(40)=1/25".into())
}

fn integrality() -> Check {
    let (sieve, _) = setup(100_000)?;
    let mut acc_f = ProductAccumulator::new(ProductKind::F);
    let mut acc_h = ProductAccumulator::new(ProductKind::H);
    for n in 1..=100_000u64 {
        acc_f.step(&sieve).map_err(err)?;
        ensure(acc_f.is_integer(), || {
            format!("prod f not integral at n = {n}")
        })?;
        if n <= 10_000 {
            acc_h.step(&sieve).map_err(err)?;
            let closed = product_h_closed(&sieve, n).map_err(err)?;
            ensure(acc_h.value() == &closed, || {
                format!("h product differs at n = {n}")
            })?;
            ensure(acc_f.value() == &closed.odd_part(), || {
                format!("f product differs at n = {n}")
            })?;
        }
    }
    Ok("integral to 1e5, incremental equals closed form to 1e4".into())
}

fn divisibility() -> Check {
    let (sieve, _) = setup(3000)?;
    let mut acc = ProductAccumulator::new(ProductKind::H);
    let mut acc_f = ProductAccumulator::new(ProductKind::F);
    let mut checked = 0u64;
    for n in 1..=3000u64 {
        acc.step(&sieve).map_err(err)?;
        acc_f.step(&sieve).map_err(err)?;
        for &p in sieve.primes_up_to(n) {
            let alpha = i64::from(alpha_p(n, p));
            let vh = acc.value().exponent(p);
            ensure(vh >= alpha, || format!("v_{p}(prod h) < alpha at n = {n}"))?;
            if p != 2 {
                let vf = acc_f.value().exponent(p);
                ensure(vf >= alpha, || format!("v_{p}(prod f) < alpha at n = {n}"))?;
            }
            checked += 1;
        }
    }
    let agree = scan_theorems(
        &sieve,
        &PrimeLogTable::build(&sieve),
        3000,
        &[TheoremId::Thm2],
    )
    .map_err(err)?
    .all(|v| v.is_ok_and(|v| v.passed));
    ensure(agree, || "thm2 checker disagrees".into())?;
    Ok(format!("{checked} (n, p) pairs to 3000"))
}

fn constant() -> Check {
    let c = constant_c().map_err(err)?;
    ensure(c.c.width() < 1e-9, || format!("width {}", c.c.width()))?;
    ensure(c.contains_decimal_prefix("4.01055487"), || {
        format!("{:?}", c.c)
    })?;
    let (sieve, table) = setup(20_000)?;
    let (ord, escalated) = cmp_with_c_power(1023, &c.exact_rep, &c.log2_p, &c).map_err(err)?;
    ensure(ord == Ordering::Equal && escalated, || {
        "no exact equality at 1023".into()
    })?;
    let mut escalations = 0;
    for v in scan_theorems(&sieve, &table, 20_000, &[TheoremId::Thm3]).map_err(err)? {
        let v = v.map_err(err)?;
        ensure(v.passed && v.tie == (v.n == 1023), || {
            format!("n = {}: {v:?}", v.n)
        })?;
        escalations += u64::from(v.escalated);
    }
    Ok(format!(
        "c in [{:.15}, {:.15}], width {:.1e}; strict below 20000 except 1023 ({escalations} exact)",
        c.c.lo(),
        c.c.hi(),
        c.c.width()
    ))
}

fn eq9() -> Check {
    let (sieve, table) = setup(10_000)?;
    let mut min = f64::INFINITY;
    for v in scan_theorems(&sieve, &table, 10_000, &[TheoremId::Eq9]).map_err(err)? {
        let v = v.map_err(err)?;
        ensure(v.passed, || format!("n = {}: {v:?}", v.n))?;
        if let Margin::Bits(iv) = v.margin {
            min = min.min(iv.lo());
        }
    }
    Ok(format!("n <= 1e4, least margin {min:.6} bits"))
}

fn conjecture() -> Check {
    let (sieve, table) = setup(100_000)?;
    let mut scan = ConjectureScan::new(&sieve, &table, 100_000, None).map_err(err)?;
    let (mut fails, mut ties, mut count) = (0u64, 0u64, 0u64);
    for r in scan.by_ref() {
        let r = r.map_err(err)?;
        count += 1;
        match r.status {
            ScanStatus::Pass => {}
            ScanStatus::Fail => fails += 1,
            ScanStatus::Tie => ties += 1,
        }
    }
    let s = scan.summary();
    ensure(count == 100_000 && fails == 0 && ties == 0, || {
        format!("{count} records, {fails} failures, {ties} ties")
    })?;
    Ok(format!(
        "100000 records, 0 failures, 0 ties, {} escalations",
        s.escalations
    ))
}

fn thm4() -> Check {
    let (sieve, table) = setup(3000)?;
    for v in scan_theorems(&sieve, &table, 3000, &[TheoremId::Thm4]).map_err(err)? {
        let v = v.map_err(err)?;
        ensure(v.passed, || format!("n = {}: {v:?}", v.n))?;
    }
    // Brute force at n = 9, p = 3.
    let lhs: u32 = (1..=9u64)
        .map(|r| {
            r.trailing_zeros() * (0..).take_while(|&e| r % 3u64.pow(e + 1) == 0).count() as u32
        })
        .sum();
    let sum_v3: u32 = (1..=9u64)
        .map(|r| (0..).take_while(|&e| r % 3u64.pow(e + 1) == 0).count() as u32)
        .sum();
    let rhs = sum_v3 - 2;
    ensure((lhs, rhs) == (1, 2), || {
        format!("brute force gave {lhs}, {rhs}")
    })?;
    let v = check_thm4(9, 3).map_err(err)?;
    ensure(v.margin == Margin::Exact(1), || format!("{v:?}"))?;
    Ok("margin >= 0 for all odd p <= n <= 3000; (9, 3) gives 1 <= 2".into())
}

fn thm5() -> Check {
    let mut lhs = 0i64;
    for n in 1..=100_000u64 {
        lhs += h_two_exponent(n.trailing_zeros());
        let rhs: i64 = (0..64).filter(|&i| n >> i & 1 == 1).sum();
        ensure(lhs == rhs, || format!("n = {n}: {lhs} != {rhs}"))?;
    }
    let mut partial = 0i64;
    for r in 1..=(1u64 << 16) {
        partial += h_two_exponent(r.trailing_zeros());
        if r.is_power_of_two() {
            let m = i64::from(r.trailing_zeros());
            ensure(partial == m, || format!("sum to 2^{m} is {partial}"))?;
        }
    }
    let (sieve, table) = setup(100_000)?;
    let all_ties = scan_theorems(&sieve, &table, 100_000, &[TheoremId::Thm5])
        .map_err(err)?
        .all(|v| v.is_ok_and(|v| v.passed && v.tie));
    ensure(all_ties, || "checker disagrees".into())?;
    Ok("equality for n <= 1e5; sum to 2^m is m for m <= 16".into())
}

fn determinism() -> Check {
    let (sieve, table) = setup(2000)?;
    let render = |rs: &[ScanRecord]| rs.iter().map(|r| r.json_line() + "\n").collect::<String>();
    let full: Vec<ScanRecord> = ConjectureScan::new(&sieve, &table, 2000, None)
        .map_err(err)?
        .collect::<vforge_core::Result<_>>()
        .map_err(err)?;

    let dir = tempfile::tempdir().map_err(err)?;
    let policy = CheckpointPolicy {
        path: dir.path().join("scan.ckpt"),
        every: 1000,
    };
    let mut head = Vec::new();
    for r in ConjectureScan::new(&sieve, &table, 2000, Some(policy.clone())).map_err(err)? {
        let r = r.map_err(err)?;
        head.push(r);
        if r.n == 1000 {
            break;
        }
    }
    let cp = Checkpoint::load(&policy.path).map_err(err)?;
    ensure(cp.n_done == 1000, || format!("checkpoint at {}", cp.n_done))?;
    let tail: Vec<ScanRecord> = ConjectureScan::resume(&sieve, &table, &cp, 2000, None)
        .map_err(err)?
        .collect::<vforge_core::Result<_>>()
        .map_err(err)?;
    let joined = render(&head) + &render(&tail);
    ensure(joined == render(&full), || "streams differ".into())?;
    Ok(format!(
        "{} bytes identical after resume at 1000",
        joined.len()
    ))
}

fn limit() -> Check {
    let (sieve, table) = setup(100_000)?;
    let r = limit_monitor(&sieve, &table, 100_000).map_err(err)?;
    ensure(r.within_c(), || format!("above c at {:?}", r.violations))?;
    ensure(r.argmax == 1023 && r.argmax_ties.is_empty(), || {
        format!("argmax {}", r.argmax)
    })?;
    ensure(r.c_ties == vec![1023], || {
        format!("equal to c at {:?}", r.c_ties)
    })?;
    let csv = r.to_csv();
    ensure(
        csv.starts_with(CSV_HEADER) && csv.lines().last().is_some_and(|l| l.starts_with("100000,")),
        || "csv does not reach 1e5".into(),
    )?;
    let last = r.samples.last().unwrap();
    Ok(format!(
        "root of prod h <= c to 1e5, max at 1023 only; {} samples, at 1e5 f-root {:.6} h-root {:.6}",
        r.samples.len(),
        last.root_f.lo(),
        last.root_h.lo()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("examples of f", examples, Duration::from_secs(1)),
        (
            "integrality of prod f",
            integrality,
            Duration::from_secs(120),
        ),
        (
            "odd lcm divides prod f",
            divisibility,
            Duration::from_secs(120),
        ),
        (
            "constant c and cross-powers",
            constant,
            Duration::from_secs(300),
        ),
        ("n^(log2 n) 4^n bound", eq9, Duration::from_secs(60)),
        ("prod f < 4^n to 1e5", conjecture, Duration::from_secs(300)),
        ("valuation inequality", thm4, Duration::from_secs(120)),
        ("binary digit identity", thm5, Duration::from_secs(60)),
        (
            "checkpoint determinism",
            determinism,
            Duration::from_secs(60),
        ),
        ("n-th root monitor", limit, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            if took <= budget {
                Ok(msg)
            } else {
                Err(format!("took {took:.1?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{took:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
