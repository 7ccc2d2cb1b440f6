//! `carmichael` command-line tool.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use carmichael::stats::tables::{write_tables, TableKind};
use carmichael::stats::{StatsAccumulator, DEFAULT_MODULI, DEFAULT_PRIME_BOUND};
use carmichael::{
    carmichael_violation, enumerate_with_progress, open_catalog, oracle_enumerate, prime_sieve,
    smallest_with_factors, write_catalog_file, Certainty, CheckpointList, CompletionMode,
    EnumerationConfig, StatsSpec, WideUint, Word,
};

#[derive(Parser)]
#[command(
    name = "carmichael",
    version,
    about = "Enumerate and study Carmichael numbers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write every Carmichael number below a bound to a catalog.
    Enumerate(EnumerateArgs),
    /// Find the smallest Carmichael number with exactly d prime factors.
    Smallest(SmallestArgs),
    /// Check numbers against Korselt's criterion.
    Verify(VerifyArgs),
    /// Compute tables from a catalog.
    Stats(StatsArgs),
    /// Brute-force enumeration by trial division, for cross-checks.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Jobs {
    /// Worker threads.
    #[arg(long, env = "CARMICHAEL_JOBS", value_parser = parse_jobs)]
    jobs: Option<usize>,
}

impl Jobs {
    fn get(&self) -> usize {
        self.jobs
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Args)]
struct EnumerateArgs {
    /// Strict upper bound, e.g. 1e12 or 25e9.
    #[arg(long, value_parser = parse_number)]
    limit: u128,
    #[arg(long)]
    min_factors: Option<u32>,
    #[arg(long)]
    max_factors: Option<u32>,
    /// basic, last-prime or last-two.
    #[arg(long, default_value = "last-two")]
    mode: CompletionMode,
    #[command(flatten)]
    jobs: Jobs,
    /// Catalog path; a `.gz` suffix compresses.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SmallestArgs {
    /// Number of prime factors, 3 to 20.
    #[arg(long)]
    factors: u32,
    #[command(flatten)]
    jobs: Jobs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Numbers to check.
    #[arg(value_parser = parse_number, required_unless_present = "file", conflicts_with = "file")]
    numbers: Vec<u128>,
    /// File with one number per line, or a catalog; `#` lines are skipped.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Catalog file.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated bounds; defaults to decades up to the catalog limit.
    #[arg(long, value_delimiter = ',', value_parser = parse_number)]
    checkpoints: Vec<u128>,
    /// Comma-separated table names, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    tables: Vec<String>,
    /// Moduli of the residue table.
    #[arg(long = "mod", value_delimiter = ',')]
    moduli: Vec<u64>,
    /// Tabulate odd primes up to this bound.
    #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
    primes_up_to: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, value_parser = parse_number)]
    limit: u128,
    /// Also write the catalog here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Integer from a decimal or scientific literal: `1000`, `1e12`, `2.5e10`.
/// Values that are not whole numbers are rejected.
fn parse_number(s: &str) -> Result<u128, String> {
    let s = s.trim().replace('_', "");
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: u32 = s[i + 1..]
                .strip_prefix('+')
                .unwrap_or(&s[i + 1..])
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            (&s[..i], e)
        }
        None => (s.as_str(), 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(format!("not a number: {s:?}"));
    }
    let frac = frac.trim_end_matches('0');
    let shift = exp
        .checked_sub(frac.len() as u32)
        .ok_or_else(|| format!("{s:?} is not an integer"))?;
    let digits: u128 = format!("{int}{frac}")
        .parse::<u128>()
        .map_err(|_| format!("{s:?} is out of range"))?;
    10u128
        .checked_pow(shift)
        .and_then(|p| digits.checked_mul(p))
        .ok_or_else(|| format!("{s:?} is out of range"))
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("jobs must be a positive integer, got {s:?}")),
        Ok(n) => Ok(n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate(a) => run_enumerate(a),
        Command::Smallest(a) => run_smallest(a),
        Command::Verify(a) => run_verify(a),
        Command::Stats(a) => run_stats(a),
        Command::Oracle(a) => run_oracle(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run_enumerate(a: EnumerateArgs) -> anyhow::Result<ExitCode> {
    match u64::try_from(a.limit) {
        Ok(limit) => enumerate_into(limit, &a),
        Err(_) => enumerate_into(a.limit, &a),
    }
}

fn enumerate_into<W: Word>(limit: W, a: &EnumerateArgs) -> anyhow::Result<ExitCode> {
    let mut config = EnumerationConfig::new(limit)
        .with_mode(a.mode)
        .with_workers(a.jobs.get());
    let min = a.min_factors.unwrap_or(config.min_factors);
    let max = a.max_factors.unwrap_or(config.max_factors);
    config = config.with_factors(min, max);
    config.validate()?;
    let show = io::stderr().is_terminal();
    let progress = move |done: usize, total: usize| {
        if show && (done == total || done.is_multiple_of(64)) {
            eprint!("\r{done}/{total} subtrees");
            if done == total {
                eprintln!();
            }
        }
    };
    let catalog = enumerate_with_progress(&config, &progress)?;
    write_catalog_file(&catalog, &a.out).with_context(|| format!("writing {}", a.out.display()))?;
    println!("count={} limit={}", catalog.len(), limit);
    Ok(ExitCode::SUCCESS)
}

fn run_smallest(a: SmallestArgs) -> anyhow::Result<ExitCode> {
    let found = smallest_with_factors(a.factors, a.jobs.get())?;
    println!("{}", found.entry);
    if found.certainty == Certainty::Bpsw {
        eprintln!("note: factors above 2^64 are BPSW probable primes");
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(a: VerifyArgs) -> anyhow::Result<ExitCode> {
    let numbers = match &a.file {
        Some(path) => read_numbers(path)?,
        None => a.numbers,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut all = true;
    for n in numbers {
        let verdict = match u64::try_from(n) {
            Ok(small) => carmichael_violation(small).map(|v| v.to_string()),
            Err(_) => carmichael_violation(n).map(|v| v.to_string()),
        };
        match verdict {
            None => writeln!(out, "{n} carmichael")?,
            Some(reason) => {
                all = false;
                writeln!(out, "{n} not-carmichael ({reason})")?;
            }
        }
    }
    out.flush()?;
    Ok(if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// First field of every non-comment line.
fn read_numbers(path: &Path) -> anyhow::Result<Vec<u128>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut numbers = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split_whitespace().next().unwrap_or_default();
        match parse_number(field) {
            Ok(n) => numbers.push(n),
            Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
        }
    }
    Ok(numbers)
}

fn run_stats(a: StatsArgs) -> anyhow::Result<ExitCode> {
    let tables: Vec<TableKind> = if a.tables.iter().any(|t| t == "all") {
        TableKind::ALL.to_vec()
    } else {
        a.tables
            .iter()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()?
    };
    let reader = open_catalog::<WideUint>(&a.input, true)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let bound = reader.provenance().map(|p| p.limit);
    let checkpoints = if a.checkpoints.is_empty() {
        let Some(b) = bound else {
            bail!("catalog has no limit header; pass --checkpoints");
        };
        CheckpointList::default_for(b)?
    } else {
        CheckpointList::new(a.checkpoints.clone())?
    };
    if let (Some(b), Some(&top)) = (bound, checkpoints.points().last()) {
        if top > b {
            bail!("checkpoint {top} exceeds the catalog limit {b}");
        }
    }
    let moduli = if a.moduli.is_empty() {
        DEFAULT_MODULI.to_vec()
    } else {
        a.moduli.clone()
    };
    let primes: Vec<u64> = prime_sieve(a.primes_up_to)
        .into_iter()
        .filter(|&p| p > 2)
        .collect();
    let spec = StatsSpec::new(checkpoints)
        .with_moduli(moduli)?
        .with_primes(primes);
    let mut acc = StatsAccumulator::new(spec);
    for entry in reader {
        acc.push(&entry?);
    }
    let report = acc.finish()?;
    for path in write_tables(&report, &tables, &a.out_dir)? {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_oracle(a: OracleArgs) -> anyhow::Result<ExitCode> {
    let limit = u64::try_from(a.limit).context("oracle limit out of range")?;
    let catalog = oracle_enumerate(limit)?;
    if let Some(path) = &a.out {
        write_catalog_file(&catalog, path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    println!("count={}", catalog.len());
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::parse_number;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1e12"), Ok(1_000_000_000_000));
        assert_eq!(parse_number("25e9"), Ok(25_000_000_000));
        assert_eq!(parse_number("2.5e10"), Ok(25_000_000_000));
        assert_eq!(parse_number("561"), Ok(561));
        assert_eq!(parse_number("1.0"), Ok(1));
        assert_eq!(parse_number("1_000"), Ok(1000));
        assert!(parse_number("1.5").is_err());
        assert!(parse_number("2.55e1").is_err());
        assert!(parse_number("-3").is_err());
        assert!(parse_number("abc").is_err());
        assert!(parse_number("e5").is_err());
        assert!(parse_number("1e40").is_err());
    }
}
