//! `vforge`: evaluate `f`, `g`, `h`, check the product statements, scan
//! `prod f < 4^n`, and report `n`-th root enclosures.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 usage error, 3 I/O error.

mod parse;

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use vforge_core::functions::{f, g, h_closed, h_definitional};
use vforge_core::scanner::{
    limit_monitor, scan_parallel, scan_theorems, Checkpoint, CheckpointPolicy, ConjectureScan,
    ScanRecord, ScanSummary, DEFAULT_CHECKPOINT_EVERY,
};
use vforge_core::theorems::constant_c;
use vforge_core::{Error, FactoredRational, Margin, PrimeLogTable, SpfSieve, TheoremId, Verdict};

const SIEVE_ENV: &str = "VFORGE_SIEVE_LIMIT";

#[derive(Parser)]
#[command(
    name = "vforge",
    version,
    about = "Exact checks on products of f(2^k l) = l^(1-k)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    F,
    G,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum HPath {
    Definitional,
    Closed,
}

#[derive(Subcommand)]
enum Command {
    /// Print an exact value of f, g or h.
    Eval {
        function: Function,
        /// Positive integer, or `a/b` for g.
        argument: String,
        /// Evaluation route for h.
        #[arg(long, value_enum, default_value = "definitional")]
        path: HPath,
    },
    /// Check a statement at one n or over an inclusive range.
    Verify {
        theorem: TheoremId,
        #[arg(long, value_parser = parse::positive, conflicts_with = "range")]
        n: Option<u64>,
        /// Inclusive range `a..b`.
        #[arg(long, value_parser = parse::range)]
        range: Option<(u64, u64)>,
        /// Restrict thm2 or thm4 to one odd prime.
        #[arg(long, value_parser = parse::positive)]
        p: Option<u64>,
        /// Check every `step`-th index of the range only.
        #[arg(long, value_parser = parse::positive, default_value = "1")]
        step: u64,
        /// One JSON object per verdict.
        #[arg(long)]
        json: bool,
    },
    /// Scan prod f(r) < 4^n for n = 1..=n_max.
    Scan {
        #[arg(value_parser = parse::positive)]
        n_max: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, value_parser = parse::positive, default_value_t = DEFAULT_CHECKPOINT_EVERY)]
        checkpoint_every: u64,
        /// Continue from the checkpoint file.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Worker threads for the block-parallel mode.
        #[arg(long, value_parser = parse::positive, default_value = "1")]
        jobs: u64,
        /// Record stream destination; `-` is stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Print the constant c = P(1023)^(1/1023).
    ConstantC {
        /// Also print the factored P(1023).
        #[arg(long)]
        exact: bool,
    },
    /// CSV of n-th root enclosures at 2^m, 2^m - 1 and n_max.
    Report {
        #[arg(value_parser = parse::positive)]
        n_max: u64,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

enum Failure {
    Math(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Math(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Math(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CheckpointIo(_) | Error::CheckpointFormat(_) => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval {
            function,
            argument,
            path,
        } => eval(function, &argument, path),
        Command::Verify {
            theorem,
            n,
            range,
            p,
            step,
            json,
        } => verify(theorem, n, range, p, step, json),
        Command::Scan {
            n_max,
            checkpoint,
            checkpoint_every,
            resume,
            jobs,
            out,
        } => scan(n_max, checkpoint, checkpoint_every, resume, jobs, &out),
        Command::ConstantC { exact } => constant(exact),
        Command::Report { n_max, out } => report(n_max, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vforge: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn sieve_for(n_max: u64) -> Result<SpfSieve, Failure> {
    let limit = match std::env::var(SIEVE_ENV) {
        Ok(s) => parse::positive(&s).map_err(|e| Failure::Usage(format!("{SIEVE_ENV}: {e}")))?,
        Err(_) => n_max.max(2),
    };
    Ok(SpfSieve::new(limit)?)
}

fn show(value: &FactoredRational) -> String {
    if value.is_one() {
        "1".to_string()
    } else {
        format!("{} = {value}", value.fraction_string())
    }
}

fn eval(function: Function, argument: &str, path: HPath) -> Outcome {
    let value = match function {
        Function::G => {
            let x = parse::ratio(argument).map_err(Failure::Usage)?;
            println!("{}", g(x)?);
            return Ok(());
        }
        Function::F => f(parse::positive(argument).map_err(Failure::Usage)?)?,
        Function::H => {
            let r = parse::positive(argument).map_err(Failure::Usage)?;
            match path {
                HPath::Definitional => h_definitional(r)?,
                HPath::Closed => h_closed(r)?,
            }
        }
    };
    println!("{}", show(&value));
    Ok(())
}

fn margin_text(m: &Margin) -> String {
    match m {
        Margin::Exact(v) => v.to_string(),
        Margin::Bits(iv) => format!("[{:?}, {:?}] bits", iv.lo(), iv.hi()),
    }
}

fn verdict_line(v: &Verdict) -> String {
    let mut line = format!("{} n={}", v.theorem, v.n);
    if let Some(p) = v.p {
        line += &format!(" p={p}");
    }
    line += if v.passed { " pass" } else { " FAIL" };
    line += &format!(" margin={}", margin_text(&v.margin));
    if v.tie {
        line += " equality";
    }
    if v.escalated {
        line += " escalated";
    }
    if let Some(w) = &v.witness {
        line += &format!(" witness: {w}");
    }
    line
}

fn verify(
    theorem: TheoremId,
    n: Option<u64>,
    range: Option<(u64, u64)>,
    p: Option<u64>,
    step: u64,
    json: bool,
) -> Outcome {
    let (a, b) = match (n, range) {
        (Some(n), None) => (n, n),
        (None, Some(r)) => r,
        _ => return Err(Failure::Usage("give --n or --range".into())),
    };
    if p.is_some() && !matches!(theorem, TheoremId::Thm2 | TheoremId::Thm4) {
        return Err(Failure::Usage("--p applies to thm2 and thm4 only".into()));
    }
    let sieve = sieve_for(b)?;
    let table = PrimeLogTable::build(&sieve);
    let mut scan = scan_theorems(&sieve, &table, b, &[theorem])?.sampled(a, step)?;
    if let Some(p) = p {
        scan = scan.with_prime(p)?;
    }

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let (mut total, mut failed, mut ties, mut escalated) = (0u64, 0u64, 0u64, 0u64);
    for v in scan {
        let v = v?;
        total += 1;
        failed += u64::from(!v.passed);
        ties += u64::from(v.tie);
        escalated += u64::from(v.escalated);
        if json {
            writeln!(
                out,
                "{}",
                serde_json::to_string(&v).expect("verdict serializes")
            )?;
        } else {
            writeln!(out, "{}", verdict_line(&v))?;
        }
    }
    if !json {
        writeln!(
            out,
            "{theorem}: {total} verdicts, {failed} failed, {ties} equalities, {escalated} escalated"
        )?;
    }
    out.flush()?;
    if failed > 0 {
        return Err(Failure::Math(format!(
            "{failed} of {total} verdicts failed"
        )));
    }
    Ok(())
}

/// Keeps the first `keep` lines of a record file written by an earlier run.
fn truncate_records(path: &Path, keep: u64) -> Outcome {
    let file = File::open(path)?;
    let mut kept = Vec::new();
    let mut lines = 0;
    for line in BufReader::new(file).lines() {
        if lines == keep {
            break;
        }
        kept.extend_from_slice(line?.as_bytes());
        kept.push(b'\n');
        lines += 1;
    }
    if lines < keep {
        return Err(Failure::Io(format!(
            "{} holds {lines} records, checkpoint is at {keep}",
            path.display()
        )));
    }
    fs::write(path, kept)?;
    Ok(())
}

fn summary_text(n_max: u64, s: &ScanSummary) -> String {
    let mut text = format!(
        "scanned to n={} of {n_max}: {} escalations, max (prod h)^(1/n) at n={}",
        s.n_done, s.escalations, s.running_max
    );
    if !s.running_max_ties.is_empty() {
        text += &format!(", tied at {:?}", s.running_max_ties);
    }
    text
}

fn scan(
    n_max: u64,
    checkpoint: Option<PathBuf>,
    every: u64,
    resume: bool,
    jobs: u64,
    out: &str,
) -> Outcome {
    if jobs > 1 && checkpoint.is_some() {
        return Err(Failure::Usage(
            "--jobs > 1 cannot be combined with --checkpoint".into(),
        ));
    }
    let started = Instant::now();
    let sieve = sieve_for(n_max)?;
    let table = PrimeLogTable::build(&sieve);
    let to_stdout = out == "-";

    let resumed = match (&checkpoint, resume) {
        (Some(path), true) => Some(Checkpoint::load(path)?),
        _ => None,
    };
    let mut sink: Box<dyn Write> = if to_stdout {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        let path = Path::new(out);
        match &resumed {
            Some(cp) => {
                truncate_records(path, cp.n_done)?;
                Box::new(BufWriter::new(
                    fs::OpenOptions::new().append(true).open(path)?,
                ))
            }
            None => Box::new(BufWriter::new(File::create(path)?)),
        }
    };
    let mut emit = |r: &ScanRecord| writeln!(sink, "{}", r.json_line());

    let summary = if jobs > 1 {
        let (records, summary) = scan_parallel(&sieve, &table, n_max, jobs as usize)?;
        for r in &records {
            emit(r)?;
        }
        summary
    } else {
        let policy = checkpoint.map(|path| CheckpointPolicy { path, every });
        let mut scan = match &resumed {
            Some(cp) => ConjectureScan::resume(&sieve, &table, cp, n_max, policy)?,
            None => ConjectureScan::new(&sieve, &table, n_max, policy)?,
        };
        for r in scan.by_ref() {
            emit(&r?)?;
        }
        scan.summary()
    };
    sink.flush()?;
    drop(sink);

    let text = summary_text(n_max, &summary);
    if to_stdout {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
    eprintln!("elapsed {:.2?}", started.elapsed());
    if let Some(w) = &summary.witness {
        eprint!("{}", w.transcript);
        return Err(Failure::Math(format!(
            "prod f < 4^n does not hold at n = {}",
            w.n
        )));
    }
    Ok(())
}

/// Longest common prefix of the two endpoints, at most `max` characters.
fn agreed_digits(lo: f64, hi: f64, max: usize) -> String {
    let (a, b) = (format!("{lo:.15}"), format!("{hi:.15}"));
    a.chars()
        .zip(b.chars())
        .take_while(|(x, y)| x == y)
        .take(max)
        .map(|(x, _)| x)
        .collect()
}

fn constant(exact: bool) -> Outcome {
    let c = constant_c()?;
    if !c.contains_decimal_prefix("4.01055487") {
        return Err(Failure::Math(format!(
            "internal error: enclosure [{}, {}] excludes 4.01055487",
            c.c.lo(),
            c.c.hi()
        )));
    }
    println!(
        "c = {}... (n={})",
        agreed_digits(c.c.lo(), c.c.hi(), 10),
        c.base_n
    );
    println!("enclosure = [{:.15}, {:.15}]", c.c.lo(), c.c.hi());
    println!("width = {:e}", c.c.width());
    if exact {
        println!("P({}) = {}", c.base_n, c.exact_rep);
    }
    Ok(())
}

fn report(n_max: u64, out: &str) -> Outcome {
    let sieve = sieve_for(n_max)?;
    let table = PrimeLogTable::build(&sieve);
    let r = limit_monitor(&sieve, &table, n_max)?;
    let csv = r.to_csv();
    if out == "-" {
        print!("{csv}");
    } else {
        fs::write(out, csv)?;
    }
    eprintln!(
        "max (prod h)^(1/n) at n={}; equal to c at {:?}; above c at {:?}",
        r.argmax, r.c_ties, r.violations
    );
    if !r.within_c() {
        return Err(Failure::Math(format!(
            "(prod h)^(1/n) > c at {:?}",
            r.violations
        )));
    }
    Ok(())
}
