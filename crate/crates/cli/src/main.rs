use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ncploc::correspondence::{plocal_lattice, product_lattice, psi, psi_inverse};
use ncploc::lattice::{Distributivity, FiniteLattice};
use ncploc::ncp::{catalan, NoncrossingPartition};
use ncploc::space::{Interval, Space};
use ncploc::supports::{
    brute_force_valid_plocal, enumerate_valid_plocal, universe_from_values, Limits, PLocalTuple, SupportTuple,
};
use ncploc::Error;

mod verify;

/// Supports of localizing subcategories over a finite totally ordered
/// space, and their noncrossing-partition models.
#[derive(Debug, Parser)]
#[command(name = "ncploc", version)]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Pretty-print JSON records instead of one record per line.
    #[arg(long, global = true)]
    pretty: bool,
    /// Largest n accepted by enumeration-based commands.
    #[arg(long, global = true, default_value_t = 8)]
    max_n: usize,
    /// Largest interval count n(n+1)/2 the brute-force oracle may scan.
    #[arg(long, global = true, env = "NCPLOC_BUDGET_BITS", default_value_t = 22)]
    max_bruteforce_bits: u32,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the intervals of the n-point space.
    Intervals {
        #[arg(long)]
        n: usize,
    },
    /// Print the maximal box based at an interval.
    Box {
        #[arg(long)]
        n: usize,
        /// Interval as "a,b".
        #[arg(long, value_parser = parse_interval)]
        y: Interval,
    },
    /// List every valid p-local tuple.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// Use the brute-force closure-equation filter.
        #[arg(long)]
        oracle: bool,
    },
    /// Validate a p-local or multi-prime support tuple.
    Check {
        /// JSON file, or "-" for stdin.
        #[arg(long)]
        file: PathBuf,
    },
    /// Map a valid p-local tuple to its noncrossing partition.
    Psi {
        #[arg(long)]
        file: PathBuf,
    },
    /// Map a noncrossing partition to its p-local tuple.
    PsiInv {
        #[arg(long)]
        file: PathBuf,
    },
    /// Emit the lattice of valid p-local tuples.
    Lattice {
        #[arg(long)]
        n: usize,
        /// Also write the Hasse diagram as DOT to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Emit the lattice of valid support tuples over a prime universe.
    Product {
        #[arg(long)]
        n: usize,
        /// Comma-separated primes; 0 is the generic point.
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Report a distributivity witness, or that the lattice is distributive.
    Distributive {
        #[arg(long)]
        n: usize,
        /// Prime universe; without it the single-prime lattice is used.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
    /// Print the k-th Catalan number.
    Catalan {
        #[arg(long)]
        k: usize,
    },
    /// Run the invariant suite for the n-point space.
    Verify {
        #[arg(long)]
        n: usize,
    },
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected \"a,b\", got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("bad endpoint {a:?}: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("bad endpoint {b:?}: {e}"))?;
    Interval::new(a, b).ok_or_else(|| format!("[{a},{b}] is not an interval"))
}

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
enum Failure {
    Input(String, String),
    Budget(String),
    Invariant(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(..) => 1,
            Failure::Budget(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Input(kind, msg) => json!({"error": kind, "message": msg}),
            Failure::Budget(msg) => json!({"error": "budget_exceeded", "message": msg}),
            Failure::Invariant(msg) => json!({"error": "invariant_failure", "message": msg}),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else if e.is_invariant() {
            Failure::Invariant(e.to_string())
        } else {
            Failure::Input(e.kind().to_string(), e.to_string())
        }
    }
}

struct Output {
    pretty: bool,
    out: io::BufWriter<io::Stdout>,
}

impl Output {
    fn record<T: Serialize>(&mut self, value: &T) -> Result<(), Failure> {
        let text = if self.pretty { serde_json::to_string_pretty(value) } else { serde_json::to_string(value) }
            .map_err(|e| Failure::Input("serialize".into(), e.to_string()))?;
        writeln!(self.out, "{text}").map_err(io_failure)
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Input("io".into(), e.to_string())
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(io_failure)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input("io".into(), format!("{}: {e}", path.display())))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input("bad_json".into(), e.to_string()))
}

fn space(n: usize) -> Result<Space, Failure> {
    Ok(Space::new(n)?)
}

fn write_dot<K: Serialize>(path: &Path, l: &FiniteLattice<K>) -> Result<(), Failure> {
    fs::write(path, l.to_dot()).map_err(|e| Failure::Input("io".into(), format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let limits = Limits { max_n: cli.opts.max_n, max_bruteforce_bits: cli.opts.max_bruteforce_bits };
    let mut out = Output { pretty: cli.opts.pretty, out: io::BufWriter::new(io::stdout()) };
    match cli.command {
        Command::Intervals { n } => {
            for y in space(n)?.intervals() {
                out.record(&y)?;
            }
        }
        Command::Box { n, y } => {
            out.record(&space(n)?.maximal_box(y)?)?;
        }
        Command::Enumerate { n, oracle } => {
            let s = space(n)?;
            let tuples = if oracle { brute_force_valid_plocal(s, &limits)? } else { enumerate_valid_plocal(s, &limits)? };
            for t in &tuples {
                out.record(t)?;
            }
        }
        Command::Check { file } => {
            let value: serde_json::Value = parse_json(&read_input(&file)?)?;
            let record = if value.get("universe").is_some() {
                let t: SupportTuple = serde_json::from_value(value).map_err(|e| Failure::Input("bad_json".into(), e.to_string()))?;
                let slices: Vec<_> = t.slices().map(|(p, sl)| json!({"prime": p, "valid": sl.is_valid()})).collect();
                json!({"kind": "support", "valid": t.is_valid(), "slices": slices})
            } else {
                let t: PLocalTuple = serde_json::from_value(value).map_err(|e| Failure::Input("bad_json".into(), e.to_string()))?;
                json!({"kind": "plocal", "valid": t.is_valid()})
            };
            out.record(&record)?;
        }
        Command::Psi { file } => {
            let t: PLocalTuple = parse_json(&read_input(&file)?)?;
            out.record(&psi(&t)?)?;
        }
        Command::PsiInv { file } => {
            let s: NoncrossingPartition = parse_json(&read_input(&file)?)?;
            out.record(&psi_inverse(&s)?)?;
        }
        Command::Lattice { n, dot } => {
            let l = plocal_lattice(space(n)?, &limits)?;
            if let Some(path) = dot {
                write_dot(&path, &l)?;
            }
            out.record(&l.to_json_document())?;
        }
        Command::Product { n, primes, dot } => {
            let universe = universe_from_values(&primes)?;
            let l = product_lattice(space(n)?, &universe, &limits)?;
            if let Some(path) = dot {
                write_dot(&path, &l)?;
            }
            out.record(&l.to_json_document())?;
        }
        Command::Distributive { n, primes } => {
            let s = space(n)?;
            let record = if primes.is_empty() {
                let l = plocal_lattice(s, &limits)?;
                distributivity_record(&l)
            } else {
                let l = product_lattice(s, &universe_from_values(&primes)?, &limits)?;
                distributivity_record(&l)
            };
            out.record(&record)?;
        }
        Command::Catalan { k } => {
            if k == 0 {
                return Err(Failure::Input("precondition".into(), "k must be at least 1".into()));
            }
            writeln!(out.out, "{}", catalan(k)).map_err(io_failure)?;
        }
        Command::Verify { n } => {
            let reports = verify::run_suite(space(n)?, &limits)?;
            let failed = reports.iter().filter(|r| r.status == verify::Status::Fail).count();
            for r in &reports {
                out.record(r)?;
            }
            out.out.flush().map_err(io_failure)?;
            if failed > 0 {
                return Err(Failure::Invariant(format!("{failed} invariant(s) failed")));
            }
        }
    }
    out.out.flush().map_err(io_failure)
}

fn distributivity_record<K: Serialize>(l: &FiniteLattice<K>) -> serde_json::Value {
    match l.is_distributive() {
        Distributivity::Distributive => json!({"distributive": true}),
        Distributivity::Witness(x, y, z) => json!({
            "distributive": false,
            "witness": [l.element(x), l.element(y), l.element(z)],
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("{}", json!({"error": "usage", "message": msg.trim_end()}));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
