//! The `polyiter` command line.
//!
//! Exit codes: 0 success, 1 a system outside the class (with its report),
//! 2 a budget or size guard, 3 unreadable input or bad arguments.

use std::ffi::OsString;
use std::fmt::{self, Display, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use polyiter_core::hash::{self, BitString, HashParams};
use polyiter_core::lincomp;
use polyiter_core::orbit::{self, OrbitState};
use polyiter_core::stats::{self, AvgKind, AvgSumSpec, PointSet, DISCREPANCY_MAX_DIM, DISCREPANCY_MAX_POINTS};
use polyiter_core::system::{self, DEFAULT_PERMUTATION_GUARD, DEFAULT_TERM_CAP};
use polyiter_core::{Error, SystemFamily};

use crate::format::{self, FormatError, LoadedSystems};
use crate::report::{self, AvgRow, DiscrepancyRow, SumRow};
use crate::sweep::{self, SweepError};

/// Environment variable read for the default `--budget`.
pub const BUDGET_ENV: &str = "POLYITER_BUDGET";

/// Comma-separated list argument such as `1,0,2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .enumerate()
            .map(|(i, part)| {
                part.trim()
                    .parse()
                    .map_err(|e| format!("entry {i} ({:?}): {e}", part.trim()))
            })
            .collect::<Result<_, _>>()
            .map(List)
    }
}

#[derive(Debug, Parser)]
#[command(name = "polyiter", version, about = "Triangular polynomial systems over prime fields")]
pub struct RunConfig {
    /// Write results to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Threads for parallel sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check class membership and bijectivity of every member.
    Validate {
        #[arg(long)]
        system: PathBuf,
        /// Largest state space searched for a colliding pair.
        #[arg(long, default_value_t = DEFAULT_PERMUTATION_GUARD)]
        guard: u128,
    },
    /// Print an orbit, one state per line.
    Gen {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        init: List<u64>,
        #[arg(long, required_unless_present = "period")]
        count: Option<usize>,
        /// Drop the last coordinate.
        #[arg(long)]
        truncate: bool,
        /// Print `tail tau` instead of the states.
        #[arg(long)]
        period: bool,
        #[arg(long)]
        guard: Option<u128>,
    },
    /// `tail tau` of one orbit, or every cycle length of a permutation.
    Period {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        init: Option<List<u64>>,
        #[arg(long)]
        guard: Option<u128>,
    },
    /// Hash a bit string with the walk described by a parameter file.
    Hash {
        #[arg(long)]
        params: PathBuf,
        /// Bits such as `0110`, or hex with a `0x` prefix.
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value_t = Emit::Bits)]
        emit: Emit,
        #[arg(long, default_value_t = DEFAULT_PERMUTATION_GUARD)]
        guard: u128,
    },
    #[command(subcommand)]
    Analyze(Analysis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Bits,
    Hex,
    Coords,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumKind {
    /// Over the first m coordinates.
    S,
    /// Over all coordinates.
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AvgSumKind {
    U,
    V,
}

#[derive(Debug, Subcommand)]
pub enum Analysis {
    /// Observed against predicted degrees of the iterates.
    Degrees {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        kmax: u64,
        #[arg(long, default_value_t = DEFAULT_TERM_CAP)]
        term_cap: usize,
    },
    /// Exponential sums along one orbit, one row per coefficient vector.
    Sums {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        init: List<u64>,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum)]
        kind: SumKind,
        #[arg(long, required = true, allow_hyphen_values = true)]
        coeffs: Vec<List<i64>>,
    },
    /// Sums averaged over every initial vector.
    AvgSums {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum)]
        kind: AvgSumKind,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: List<i64>,
        /// One row per value.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        c: List<i64>,
        #[arg(long = "M", default_value_t = 1)]
        big_m: u64,
        #[arg(long = "N")]
        n: usize,
        /// Largest p^(m+1) * N allowed.
        #[arg(long, env = BUDGET_ENV, default_value_t = stats::DEFAULT_SWEEP_BUDGET)]
        budget: u128,
    },
    /// Exact discrepancy and the Erdos-Turan-Koksma bound of orbit prefixes.
    Discrepancy {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        init: List<u64>,
        /// Prefix lengths, one row each.
        #[arg(long = "N")]
        n: List<usize>,
        /// State coordinates forming the points.
        #[arg(long)]
        coords: List<usize>,
        #[arg(long = "H", default_value_t = 8)]
        big_h: u32,
        /// Constant in front of the bound; (3/2)^s when absent.
        #[arg(long = "C")]
        c_s: Option<f64>,
    },
    /// Linear complexity of the truncated orbit.
    Lincomp {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        init: List<u64>,
        #[arg(long = "N")]
        n: usize,
    },
}

/// A failed run: the message for standard error and the exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Budget(String),
    Input(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Budget(_) => 2,
            Failure::Input(_) => 3,
        }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Budget(m) | Failure::Input(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } | Error::TermCap { .. } => Failure::Budget(e.to_string()),
            Error::InvalidSystem(_) => Failure::Validation(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Core(e) => e.into(),
            SweepError::Pool(e) => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn membership_report(loaded: &LoadedSystems) -> Option<String> {
    let failures = loaded.failures();
    if failures.is_empty() {
        return None;
    }
    let mut out = String::new();
    for (i, report) in failures {
        for line in report.to_string().lines() {
            writeln!(out, "member {i}: {line}").expect("string write");
        }
    }
    Some(out.trim_end().to_string())
}

/// Loads a system file and insists on class membership.
pub fn load_family(path: &Path) -> Result<SystemFamily, Failure> {
    let loaded = format::load_system_file(path)?;
    if let Some(report) = membership_report(&loaded) {
        return Err(Failure::Validation(report));
    }
    Ok(loaded.family()?)
}

/// Loads a parameter file, checking membership before the hash-specific checks.
pub fn load_params(path: &Path, guard: u128) -> Result<HashParams, Failure> {
    let file = format::load_params_file(path)?;
    let members = file.build_members()?;
    let loaded = LoadedSystems {
        members,
        schedule: polyiter_core::Schedule::Cyclic,
    };
    if let Some(report) = membership_report(&loaded) {
        return Err(Failure::Validation(report));
    }
    Ok(HashParams::new(loaded.members, file.r, file.w0.clone(), guard)?)
}

fn coords(w: &[u64]) -> String {
    w.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn validate(path: &Path, guard: u128) -> Outcome {
    let loaded = format::load_system_file(path)?;
    if let Some(report) = membership_report(&loaded) {
        return Err(Failure::Validation(report));
    }
    loaded.family()?;
    let mut witnesses = String::new();
    for (i, sys) in loaded.members.iter().enumerate() {
        let rep = sys.is_permutation(guard)?;
        if let Some((a, b)) = rep.witness {
            writeln!(witnesses, "member {i}: ({}) and ({}) have the same image", coords(&a), coords(&b))
                .expect("string write");
        }
    }
    Ok(format!("ok, permutation: {}\n{witnesses}", witnesses.is_empty()))
}

fn period_line(fam: &SystemFamily, init: &[u64], guard: Option<u128>) -> Outcome {
    let guard = guard.unwrap_or_else(|| orbit::default_period_guard(fam));
    let per = orbit::find_period(fam, init, guard)?;
    Ok(format!("{} {}\n", per.tail, per.tau))
}

fn gen(path: &Path, init: &[u64], count: Option<usize>, truncate: bool, period: bool, guard: Option<u128>) -> Outcome {
    let fam = load_family(path)?;
    if period {
        return period_line(&fam, init, guard);
    }
    let states = orbit::generate(&fam, init, count.expect("clap requires --count without --period"))?;
    let mut out = String::new();
    for s in &states {
        let w = if truncate { s.truncated() } else { &s.w[..] };
        writeln!(out, "{}", coords(w)).expect("string write");
    }
    Ok(out)
}

fn period(path: &Path, init: Option<&[u64]>, guard: Option<u128>) -> Outcome {
    let fam = load_family(path)?;
    if let Some(init) = init {
        return period_line(&fam, init, guard);
    }
    let guard = guard.unwrap_or(DEFAULT_PERMUTATION_GUARD);
    let lengths = orbit::cycle_lengths(&fam, guard)?;
    Ok(lengths.iter().map(|l| format!("{l}\n")).collect())
}

/// Bits, or hex when prefixed with `0x`.
pub fn parse_input(text: &str) -> polyiter_core::Result<BitString> {
    if text.starts_with("0x") || text.starts_with("0X") {
        BitString::parse_hex(text)
    } else {
        BitString::parse_bits(text)
    }
}

fn hash_cmd(path: &Path, input: &str, emit: Emit, guard: u128) -> Outcome {
    let params = load_params(path, guard)?;
    let input = parse_input(input)?;
    let d = hash::hash(&params, &input)?;
    Ok(match emit {
        Emit::Bits => format!("{}\n", d.bits),
        Emit::Hex => format!("{}\n", d.bits.to_hex()),
        Emit::Coords => format!("{}\n", coords(&d.coords)),
    })
}

fn degrees(path: &Path, k_max: u64, cap: usize) -> Outcome {
    let fam = load_family(path)?;
    let law = system::check_degree_law(&fam, k_max, cap)?;
    Ok(report::degrees_csv(&law.rows))
}

fn orbit_prefix(fam: &SystemFamily, init: &[u64], n: usize) -> Result<Vec<OrbitState>, Failure> {
    if n == 0 {
        return Err(Failure::Input("N must be positive".into()));
    }
    Ok(orbit::generate(fam, init, n)?)
}

fn sums(path: &Path, init: &[u64], n: usize, kind: SumKind, coeffs: &[List<i64>]) -> Outcome {
    let fam = load_family(path)?;
    let states = orbit_prefix(&fam, init, n)?;
    let p = fam.modulus();
    let mut rows = Vec::with_capacity(coeffs.len());
    for List(c) in coeffs {
        let (name, sum) = match kind {
            SumKind::S => ("S", stats::sum_s(&states, c, n, p)?),
            SumKind::T => ("T", stats::sum_t(&states, c, n, p)?),
        };
        rows.push(SumRow {
            kind: name,
            coeffs: c.clone(),
            n,
            re: sum.value.re,
            im: sum.value.im,
        });
    }
    Ok(report::sums_csv(&rows))
}

#[allow(clippy::too_many_arguments)]
fn avg_sums(
    path: &Path,
    kind: AvgSumKind,
    coeffs: &[i64],
    cs: &[i64],
    big_m: u64,
    n: usize,
    budget: u128,
    workers: usize,
) -> Outcome {
    let fam = load_family(path)?;
    let (kind, name) = match kind {
        AvgSumKind::U => (AvgKind::U, "U"),
        AvgSumKind::V => (AvgKind::V, "V"),
    };
    let specs: Vec<AvgSumSpec> = cs
        .iter()
        .map(|&c| AvgSumSpec {
            kind,
            coeffs: coeffs.to_vec(),
            c,
            big_m,
            n,
        })
        .collect();
    // refuse before any sweep starts
    for spec in &specs {
        spec.check_budget(&fam, budget)?;
    }
    let mut rows = Vec::with_capacity(specs.len());
    for spec in &specs {
        rows.push(AvgRow {
            kind: name,
            c: spec.c,
            big_m,
            n,
            value: sweep::avg_sum(&fam, spec, budget, workers)?,
            budget,
        });
    }
    Ok(report::avg_sums_csv(&rows))
}

fn discrepancy(path: &Path, init: &[u64], ns: &[usize], dims: &[usize], big_h: u32, c_s: Option<f64>) -> Outcome {
    if dims.is_empty() || dims.len() > DISCREPANCY_MAX_DIM {
        return Err(Failure::Budget(format!(
            "exact discrepancy needs 1 to {DISCREPANCY_MAX_DIM} coordinates, {} given",
            dims.len()
        )));
    }
    if let Some(&n) = ns.iter().find(|&&n| n > DISCREPANCY_MAX_POINTS) {
        return Err(Failure::Budget(format!(
            "exact discrepancy is limited to {DISCREPANCY_MAX_POINTS} points, N = {n} requested"
        )));
    }
    let fam = load_family(path)?;
    let longest = ns.iter().copied().max().unwrap_or(0);
    let states = orbit_prefix(&fam, init, longest)?;
    let c_s = c_s.unwrap_or_else(|| stats::default_etk_constant(dims.len()));
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Failure::Input("N must be positive".into()));
        }
        let ps = PointSet::from_orbit(&states[..n], dims, fam.modulus())?;
        rows.push(DiscrepancyRow {
            n,
            exact: stats::discrepancy_exact(&ps)?,
            etk_bound: stats::etk_bound(&ps, big_h, c_s)?,
            big_h,
            c_s,
        });
    }
    Ok(report::discrepancy_csv(&rows))
}

fn lincomp_cmd(path: &Path, init: &[u64], n: usize) -> Outcome {
    let fam = load_family(path)?;
    let states = orbit_prefix(&fam, init, n)?;
    let seq: Vec<Vec<u64>> = states.iter().map(|s| s.truncated().to_vec()).collect();
    let p = fam.modulus();
    let (l, witness) = lincomp::linear_complexity(&seq, p)?;
    let bound = lincomp::lower_bound_report(l, n, p, fam.m());
    let mut out = format!("L = {l}\n");
    for (h, c) in witness.coeffs.iter().enumerate() {
        writeln!(out, "c_{h} = {}", coords(c)).expect("string write");
    }
    writeln!(
        out,
        "N^(1/m)/p = {}, L / (N^(1/m)/p) = {}",
        report::sig12(bound.scale),
        report::sig12(bound.ratio)
    )
    .expect("string write");
    if let Some(note) = bound.note {
        writeln!(out, "note: {note}").expect("string write");
    }
    Ok(out)
}

/// Executes a parsed configuration and returns what it prints on success.
pub fn execute(cfg: &RunConfig) -> Outcome {
    match &cfg.command {
        Command::Validate { system, guard } => validate(system, *guard),
        Command::Gen {
            system,
            init,
            count,
            truncate,
            period,
            guard,
        } => gen(system, &init.0, *count, *truncate, *period, *guard),
        Command::Period { system, init, guard } => period(system, init.as_ref().map(|l| &l.0[..]), *guard),
        Command::Hash {
            params,
            input,
            emit,
            guard,
        } => hash_cmd(params, input, *emit, *guard),
        Command::Analyze(a) => match a {
            Analysis::Degrees { system, kmax, term_cap } => degrees(system, *kmax, *term_cap),
            Analysis::Sums {
                system,
                init,
                n,
                kind,
                coeffs,
            } => sums(system, &init.0, *n, *kind, coeffs),
            Analysis::AvgSums {
                system,
                kind,
                coeffs,
                c,
                big_m,
                n,
                budget,
            } => avg_sums(system, *kind, &coeffs.0, &c.0, *big_m, *n, *budget, cfg.workers),
            Analysis::Discrepancy {
                system,
                init,
                n,
                coords,
                big_h,
                c_s,
            } => discrepancy(system, &init.0, &n.0, &coords.0, *big_h, *c_s),
            Analysis::Lincomp { system, init, n } => lincomp_cmd(system, &init.0, *n),
        },
    }
}

/// Parses `argv`, runs it, and writes to `out` and `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 3;
            }
            // --help and --version
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match execute(&cfg) {
        Ok(text) => {
            let written = match &cfg.output {
                Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    3
                }
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code()
        }
    }
}

pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
