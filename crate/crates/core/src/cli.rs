//! Command-line harness behind the `hshift` binary.
//!
//! Every subcommand returns an exit code: 0 on success, 1 when a run fails
//! verification or a check finds a mismatch, 2 on usage errors and 3 when a
//! size guard trips.
//!
//! Any flag can also be given in a config file passed with `--config`. The
//! file holds one `key = value` pair per line, where `key` is the flag name
//! without dashes; `#` starts a comment, values may be quoted, and boolean
//! flags take `true` or `false`. Flags on the command line win.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::combine::{label_level_distribution, total_variation, AncillaMap};
use crate::cost_model::{self, Strategy};
use crate::error::{Error, Result};
use crate::group_arith::{ceil_log2, Modulus};
use crate::instance::{HiddenShiftInstance, Mode, Secret};
use crate::phase_sim::{statevector_combine_dist, statevector_generate};
use crate::pipeline::{
    schedule_affine, schedule_improved, schedule_increasing, schedule_single, schedule_uniform, Routine, Schedule,
    ScheduleKind,
};
use crate::recover::{recover, RecoverConfig};
use crate::seeding;
use crate::subset_sum::{
    self, IntervalInstance, ModularInstance, SolveOptions, SolverId, SubsetSumInstance, MAX_BRUTE_K, MAX_K,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

/// Version tag written into every JSONL record.
pub const SCHEMA_VERSION: u32 = 1;

/// Largest group order accepted by `solve`, in bits.
pub const MAX_SOLVE_BITS: u32 = 40;
/// Largest `n` and `k` accepted by `validate`.
pub const MAX_VALIDATE_N: u32 = 10;
pub const MAX_VALIDATE_K: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "hshift", version, about = "Hidden-shift sieve simulator and subset-sum toolkit")]
pub struct Cli {
    /// Read flags from a key=value file; command-line flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recover hidden shifts end to end.
    Solve(SolveArgs),
    /// Benchmark and cross-check the subset-sum solvers.
    SubsetSum(SubsetSumArgs),
    /// Compare the label-level simulation against full statevectors.
    Validate(ValidateArgs),
    /// Print a combination schedule.
    Schedule(ScheduleArgs),
    /// Print leading-order cost exponents.
    Exponents(ExponentsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunFormat {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Flavor {
    Mod,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoutineArg {
    Pow2,
    Interval,
}

#[derive(Args, Debug, Clone)]
pub struct ScheduleFlags {
    /// uniform, improved, minclass, quadgap or minquery.
    #[arg(long, default_value = "uniform")]
    pub strategy: ScheduleKind,
    /// Stage width of the uniform schedule.
    #[arg(long)]
    pub k: Option<usize>,
    /// Solver exponent; defaults to the chosen solver's.
    #[arg(long)]
    pub c: Option<f64>,
    /// Offset of the quadgap widths.
    #[arg(long)]
    pub beta: Option<f64>,
    /// brute, mitm, ss, rep or memless.
    #[arg(long, default_value = "brute")]
    pub solver: SolverId,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Group order.
    #[arg(long = "N", value_name = "N")]
    pub big_n: Option<u64>,
    /// Group order 2^n.
    #[arg(long = "n", value_name = "BITS")]
    pub n: Option<u32>,
    /// Require an odd group order.
    #[arg(long)]
    pub odd: bool,
    #[command(flatten)]
    pub schedule: ScheduleFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub runs: u32,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: RunFormat,
    /// Write `wall_s` as null so that output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SubsetSumArgs {
    /// One or more weight counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "16")]
    pub k: Vec<usize>,
    /// Modulus bits (mod) or ancilla bits (interval); density one by default.
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, value_enum, default_value = "mod")]
    pub flavor: Flavor,
    /// Weight bound of interval instances.
    #[arg(long, default_value_t = 1 << 32)]
    pub bound: u64,
    #[arg(long, default_value = "ss")]
    pub solver: SolverId,
    #[arg(long, default_value_t = 10)]
    pub instances: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare every solution set against brute force.
    #[arg(long)]
    pub check: bool,
    /// Abstract operation budget per instance.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 8)]
    pub max_n: u32,
    #[arg(long, default_value_t = 8)]
    pub max_k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ScheduleArgs {
    /// Bits of the group order.
    #[arg(long = "n", value_name = "BITS")]
    pub n: u32,
    #[arg(long, value_enum, default_value = "pow2")]
    pub routine: RoutineArg,
    #[command(flatten)]
    pub schedule: ScheduleFlags,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextFormat,
}

#[derive(Args, Debug, Clone)]
pub struct ExponentsArgs {
    /// Solver exponent; prints the reference tables when absent.
    #[arg(long)]
    pub c: Option<f64>,
    /// uniform_improved, min_classical, quad_gap or min_query; all when absent.
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// The solver runs in polynomial memory.
    #[arg(long)]
    pub poly_memory: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TableFormat,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse(&args) {
        Ok(cli) => cli,
        Err(ParseFailure::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
        Err(ParseFailure::Config(e)) => {
            eprintln!("hshift: {e}");
            return exit_code(&e);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::SubsetSum(a) => cmd_subset_sum(&a),
        Command::Validate(a) => cmd_validate(&a),
        Command::Schedule(a) => cmd_schedule(&a),
        Command::Exponents(a) => cmd_exponents(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hshift: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeGuard { .. } => EXIT_GUARD,
        Error::VerificationFailed { .. } | Error::RetryExhausted { .. } | Error::BudgetExhausted { .. } => EXIT_VERIFY,
        _ => EXIT_USAGE,
    }
}

enum ParseFailure {
    Clap(clap::Error),
    Config(Error),
}

fn parse(args: &[OsString]) -> std::result::Result<Cli, ParseFailure> {
    let first = parse_matches(args).map_err(ParseFailure::Clap)?;
    let Some(path) = first.config.clone() else {
        return Ok(first);
    };
    let extra = read_config(&path).map_err(ParseFailure::Config)?;
    let sub = subcommand_name(&first.command);
    let pos = args.iter().position(|a| a == sub).map_or(args.len(), |p| p + 1);
    let mut merged: Vec<OsString> = args[..pos].to_vec();
    merged.extend(extra.into_iter().map(OsString::from));
    merged.extend_from_slice(&args[pos..]);
    parse_matches(&merged).map_err(ParseFailure::Clap)
}

fn parse_matches(args: &[OsString]) -> std::result::Result<Cli, clap::Error> {
    let matches = Cli::command().args_override_self(true).try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Solve(_) => "solve",
        Command::SubsetSum(_) => "subset-sum",
        Command::Validate(_) => "validate",
        Command::Schedule(_) => "schedule",
        Command::Exponents(_) => "exponents",
    }
}

/// Turns a config file into flags.
pub fn read_config(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)?;
    config_flags(&text)
}

pub fn config_flags(text: &str) -> Result<Vec<String>> {
    let mut flags = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().trim_start_matches('-').replace('_', "-");
        let value = value.trim().trim_matches('"').trim_matches('\'');
        if key == "config" {
            return Err(Error::Usage("config files cannot include other config files".into()));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            v => flags.push(format!("--{key}={v}")),
        }
    }
    Ok(flags)
}

fn default_exponent(solver: SolverId) -> f64 {
    match solver {
        SolverId::Brute => 1.0,
        SolverId::Mitm | SolverId::SchroeppelShamir => 0.5,
        SolverId::Representation => 0.291,
        SolverId::Memoryless => 0.72,
    }
}

/// Builds and validates the schedule selected by the flags.
pub fn build_schedule(flags: &ScheduleFlags, n: u32, routine: Routine) -> Result<Schedule> {
    let kind = flags.strategy;
    if flags.k.is_some() && kind != ScheduleKind::Uniform {
        return Err(Error::Usage("--k only applies to the uniform strategy".into()));
    }
    if flags.c.is_some() && matches!(kind, ScheduleKind::Uniform | ScheduleKind::MinQuery) {
        return Err(Error::Usage("--c does not apply to the uniform or minquery strategies".into()));
    }
    if flags.beta.is_some() && kind != ScheduleKind::QuadGap {
        return Err(Error::Usage("--beta only applies to the quadgap strategy".into()));
    }
    let c = flags.c.unwrap_or_else(|| default_exponent(flags.solver));
    let sched = match kind {
        ScheduleKind::Uniform => schedule_uniform(n, flags.k.unwrap_or(8), routine)?,
        ScheduleKind::Improved => schedule_improved(n, c, routine)?,
        ScheduleKind::MinClass => schedule_increasing(n, c, routine)?,
        ScheduleKind::QuadGap => schedule_affine(n, c, flags.beta, routine)?,
        ScheduleKind::MinQuery => schedule_single(n, routine)?,
    }
    .with_solver(flags.solver);
    sched.validate()?;
    Ok(sched)
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleSummary {
    pub strategy: ScheduleKind,
    pub solver: SolverId,
    pub widths: Vec<usize>,
}

impl ScheduleSummary {
    fn of(sched: &Schedule) -> Self {
        ScheduleSummary {
            strategy: sched.params.kind,
            solver: sched.solver,
            widths: sched.stages.iter().map(|s| s.k).collect(),
        }
    }

    fn compact(&self) -> String {
        let widths: Vec<String> = self.widths.iter().map(usize::to_string).collect();
        format!("{}/{}/{}", serde_plain(&self.strategy), self.solver, widths.join("-"))
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

/// One line of `solve` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub version: u32,
    pub seed: u64,
    #[serde(rename = "N")]
    pub modulus: u64,
    pub s_found: Option<u64>,
    pub verified: bool,
    pub q_queries: u64,
    pub c_queries: u64,
    pub solver_ops: u64,
    pub mem_peak: u64,
    pub wall_s: Option<f64>,
    pub schedule: ScheduleSummary,
}

impl RunRecord {
    pub const CSV_HEADER: &'static str =
        "seed,N,s_found,verified,q_queries,c_queries,solver_ops,mem_peak,wall_s,schedule";

    pub fn csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.modulus,
            opt(self.s_found.map(|s| s.to_string())),
            self.verified,
            self.q_queries,
            self.c_queries,
            self.solver_ops,
            self.mem_peak,
            opt(self.wall_s.map(|w| format!("{w:.6}"))),
            self.schedule.compact()
        )
    }
}

fn group_order(a: &SolveArgs) -> Result<u64> {
    let modulus = match (a.big_n, a.n) {
        (Some(_), Some(_)) => return Err(Error::Usage("give either --N or --n, not both".into())),
        (None, None) => return Err(Error::Usage("one of --N or --n is required".into())),
        (None, Some(bits)) => {
            if bits > MAX_SOLVE_BITS {
                return Err(Error::SizeGuard { what: "n", value: bits as u64, limit: MAX_SOLVE_BITS as u64 });
            }
            1u64 << bits
        }
        (Some(n), None) => n,
    };
    let m = Modulus::new(modulus)?;
    if m.bits() > MAX_SOLVE_BITS {
        return Err(Error::SizeGuard { what: "log2 N", value: m.bits() as u64, limit: MAX_SOLVE_BITS as u64 });
    }
    if a.odd && !m.is_odd() {
        return Err(Error::Usage(format!("--odd given but N = {modulus} is even")));
    }
    if !m.is_odd() && !m.is_power_of_two() {
        return Err(Error::Usage(format!("N = {modulus} must be odd or a power of two")));
    }
    Ok(modulus)
}

/// Runs one seeded recovery.
pub fn solve_run(modulus: u64, sched: &Schedule, master_seed: u64, index: u64, timing: bool) -> Result<RunRecord> {
    let seed = seeding::derive(master_seed, "run", index);
    let start = Instant::now();
    let mut inst = HiddenShiftInstance::with_mode(modulus, Secret::Random, seed, Mode::Benchmark)?;
    let mut cfg = RecoverConfig::default();
    cfg.pipeline.solve.seed = seeding::derive(seed, "solver", 0);
    let mut rng = seeding::rng_for(seed, "pipeline", 0);
    let (s_found, verified, solver_ops, mem_peak) = match recover(&mut inst, sched, &cfg, &mut rng) {
        Ok(rec) => (Some(rec.s), rec.verified, rec.ledger.solver_ops, rec.ledger.mem_peak_cells),
        Err(Error::RetryExhausted { .. } | Error::VerificationFailed { .. }) => (None, false, 0, 0),
        Err(e) => return Err(e),
    };
    Ok(RunRecord {
        version: SCHEMA_VERSION,
        seed,
        modulus,
        s_found,
        verified,
        q_queries: inst.q_queries(),
        c_queries: inst.c_queries(),
        solver_ops,
        mem_peak,
        wall_s: timing.then(|| start.elapsed().as_secs_f64()),
        schedule: ScheduleSummary::of(sched),
    })
}

pub fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let modulus = group_order(a)?;
    let m = Modulus::new(modulus)?;
    let (bits, routine) = if m.is_odd() { (ceil_log2(modulus), Routine::Interval) } else { (m.bits(), Routine::Pow2) };
    let sched = build_schedule(&a.schedule, bits, routine)?;
    let pool = thread_pool(a.threads)?;
    let records: Vec<Result<RunRecord>> = pool.install(|| {
        (0..a.runs as u64).into_par_iter().map(|i| solve_run(modulus, &sched, a.seed, i, !a.no_timing)).collect()
    });
    let records: Vec<RunRecord> = records.into_iter().collect::<Result<_>>()?;

    let mut out = output(&a.out)?;
    if a.format == RunFormat::Csv {
        writeln!(out, "{}", RunRecord::CSV_HEADER)?;
    }
    for rec in &records {
        match a.format {
            RunFormat::Jsonl => writeln!(out, "{}", serde_json::to_string(rec)?)?,
            RunFormat::Csv => writeln!(out, "{}", rec.csv())?,
        }
    }
    out.flush()?;
    let verified = records.iter().filter(|r| r.verified).count();
    eprintln!("verified {verified}/{} runs", records.len());
    Ok(if verified == records.len() { EXIT_OK } else { EXIT_VERIFY })
}

/// Aggregate over the instances of one `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetSumRow {
    pub k: usize,
    pub r: u32,
    pub instances: u32,
    pub mean_solutions: f64,
    pub mean_log2_ops: f64,
    pub max_mem: u64,
    pub mismatches: u32,
}

fn random_instance(a: &SubsetSumArgs, k: usize, r: u32, index: u64) -> SubsetSumInstance {
    let mut rng = seeding::rng_for(seeding::derive(a.seed, "subset-sum", k as u64), "instance", index);
    match a.flavor {
        Flavor::Mod => ModularInstance::random_planted(k, r, &mut rng).into(),
        Flavor::Interval => IntervalInstance::random_planted(k, a.bound, r, &mut rng).into(),
    }
}

pub fn subset_sum_rows(a: &SubsetSumArgs) -> Result<Vec<SubsetSumRow>> {
    let mut rows = Vec::new();
    for &k in &a.k {
        if k == 0 || k > MAX_K {
            return Err(Error::SizeGuard { what: "k", value: k as u64, limit: MAX_K as u64 });
        }
        if (a.solver == SolverId::Brute || a.check) && k > MAX_BRUTE_K {
            return Err(Error::SizeGuard { what: "k", value: k as u64, limit: MAX_BRUTE_K as u64 });
        }
        let r = a.r.unwrap_or(match a.flavor {
            Flavor::Mod => k as u32,
            Flavor::Interval => (k as u32).saturating_sub(ceil_log2(k as u64)).max(1),
        });
        let per: Vec<Result<(usize, u64, u64, bool)>> = (0..a.instances as u64)
            .into_par_iter()
            .map(|i| {
                let inst = random_instance(a, k, r, i);
                let opts =
                    SolveOptions { budget: a.budget, seed: seeding::derive(a.seed, "solver", i), ..Default::default() };
                let set = subset_sum::solve(&inst, a.solver, &opts)?;
                let mismatch = a.check
                    && subset_sum::solve(&inst, SolverId::Brute, &SolveOptions::default())?.solutions != set.solutions;
                Ok((set.len(), set.op_count, set.mem_peak, mismatch))
            })
            .collect();
        let per: Vec<_> = per.into_iter().collect::<Result<_>>()?;
        let n = per.len().max(1) as f64;
        rows.push(SubsetSumRow {
            k,
            r,
            instances: a.instances,
            mean_solutions: per.iter().map(|p| p.0 as f64).sum::<f64>() / n,
            mean_log2_ops: per.iter().map(|p| (p.1.max(1) as f64).log2()).sum::<f64>() / n,
            max_mem: per.iter().map(|p| p.2).max().unwrap_or(0),
            mismatches: per.iter().filter(|p| p.3).count() as u32,
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn cmd_subset_sum(a: &SubsetSumArgs) -> Result<i32> {
    let pool = thread_pool(a.threads)?;
    let rows = pool.install(|| subset_sum_rows(a))?;
    let mut out = io::stdout().lock();
    writeln!(out, "solver {} ({:?} instances)", a.solver, a.flavor)?;
    writeln!(
        out,
        "{:>4} {:>4} {:>9} {:>10} {:>13} {:>10} {:>10}",
        "k", "r", "instances", "solutions", "log2(ops)", "mem", "mismatch"
    )?;
    for row in &rows {
        writeln!(
            out,
            "{:>4} {:>4} {:>9} {:>10.2} {:>13.3} {:>10} {:>10}",
            row.k, row.r, row.instances, row.mean_solutions, row.mean_log2_ops, row.max_mem, row.mismatches
        )?;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_log2_ops).collect();
    if let Some(slope) = fit_slope(&xs, &ys) {
        writeln!(out, "slope of log2(ops) against k: {slope:.3}")?;
    }
    let mismatches: u32 = rows.iter().map(|r| r.mismatches).sum();
    if a.check {
        writeln!(out, "mismatches against brute force: {mismatches}")?;
    }
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_VERIFY })
}

/// Largest deviations found by [`validate_suite`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub moduli: usize,
    pub combinations: usize,
    pub max_phase_deviation: f64,
    pub max_label_deviation: f64,
    pub max_tv_distance: f64,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.max_phase_deviation < 1e-9 && self.max_label_deviation < 1e-9 && self.max_tv_distance <= 1e-12
    }
}

fn validation_moduli(max_n: u32) -> Vec<u64> {
    let mut out = Vec::new();
    for j in 1..=max_n {
        out.push(1u64 << j);
        if j >= 2 {
            out.push((1u64 << j) - 1);
        }
        if j < max_n {
            out.push((1u64 << j) + 1);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Statevector against label-level checks for every modulus up to
/// `2^max_n` of the forms `2^j` and `2^j +- 1`, and `k` up to `max_k`.
pub fn validate_suite(max_n: u32, max_k: usize, seed: u64) -> Result<ValidationReport> {
    if max_n > MAX_VALIDATE_N {
        return Err(Error::SizeGuard { what: "max-n", value: max_n as u64, limit: MAX_VALIDATE_N as u64 });
    }
    if max_k > MAX_VALIDATE_K {
        return Err(Error::SizeGuard { what: "max-k", value: max_k as u64, limit: MAX_VALIDATE_K as u64 });
    }
    let moduli = validation_moduli(max_n.max(1));
    let reports: Vec<Result<ValidationReport>> = moduli
        .par_iter()
        .map(|&modulus| {
            let inst_seed = seeding::derive(seed, "validate", modulus);
            let mut inst = HiddenShiftInstance::new(modulus, Secret::Random, inst_seed)?;
            let generation = statevector_generate(&inst)?;
            let mut rep = ValidationReport {
                moduli: 1,
                max_phase_deviation: generation.max_phase_deviation,
                max_label_deviation: generation.max_uniform_deviation,
                ..Default::default()
            };
            let m = inst.modulus();
            let mut rng = seeding::rng_for(inst_seed, "labels", 0);
            for k in 2..=max_k.max(2) {
                let labels: Vec<u64> = (0..k).map(|_| rand::Rng::gen_range(&mut rng, 0..modulus)).collect();
                let map = if m.is_odd() {
                    AncillaMap::Interval { r: (k as u32).saturating_sub(ceil_log2(k as u64)).max(1), bound: modulus }
                } else {
                    AncillaMap::Pow2 { shift: 0, bits: (k as u32 - 1).clamp(1, m.bits().max(1)) }
                };
                let sv = statevector_combine_dist(&inst, &labels, &map)?;
                for solver in SolverId::ALL.into_iter().filter(SolverId::is_exact) {
                    let ll = label_level_distribution(&labels, &map, solver, &SolveOptions::default())?;
                    rep.max_tv_distance = rep.max_tv_distance.max(total_variation(&sv, &ll));
                    rep.combinations += 1;
                }
            }
            let _ = inst.sample_element();
            Ok(rep)
        })
        .collect();
    let mut total = ValidationReport::default();
    for r in reports {
        let r = r?;
        total.moduli += r.moduli;
        total.combinations += r.combinations;
        total.max_phase_deviation = total.max_phase_deviation.max(r.max_phase_deviation);
        total.max_label_deviation = total.max_label_deviation.max(r.max_label_deviation);
        total.max_tv_distance = total.max_tv_distance.max(r.max_tv_distance);
    }
    Ok(total)
}

pub fn cmd_validate(a: &ValidateArgs) -> Result<i32> {
    let rep = validate_suite(a.max_n, a.max_k, a.seed)?;
    println!("moduli checked:          {}", rep.moduli);
    println!("combinations checked:    {}", rep.combinations);
    println!("max phase deviation:     {:.3e}", rep.max_phase_deviation);
    println!("max label deviation:     {:.3e}", rep.max_label_deviation);
    println!("max TV distance:         {:.3e}", rep.max_tv_distance);
    println!("{}", if rep.passes() { "all checks passed" } else { "CHECKS FAILED" });
    Ok(if rep.passes() { EXIT_OK } else { EXIT_VERIFY })
}

pub fn cmd_schedule(a: &ScheduleArgs) -> Result<i32> {
    let routine = match a.routine {
        RoutineArg::Pow2 => Routine::Pow2,
        RoutineArg::Interval => Routine::Interval,
    };
    let sched = build_schedule(&a.schedule, a.n, routine)?;
    match a.format {
        TextFormat::Text => print!("{}", sched.render()),
        TextFormat::Json => println!("{}", serde_json::to_string_pretty(&sched)?),
    }
    Ok(EXIT_OK)
}

pub fn cmd_exponents(a: &ExponentsArgs) -> Result<i32> {
    let Some(c) = a.c else {
        if a.strategy.is_some() || a.poly_memory {
            return Err(Error::Usage("--strategy and --poly-memory need --c".into()));
        }
        let rows = cost_model::table_report();
        match a.format {
            TableFormat::Text => print!("{}", cost_model::render_table(&rows)),
            TableFormat::Csv => {
                println!("table,{},solver,source", cost_model::CSV_HEADER);
                for r in &rows {
                    println!("{},{},{},{}", r.table, cost_model::csv_row(&r.point), r.solver, r.source);
                }
            }
            TableFormat::Json => {
                for r in &rows {
                    let mut v = cost_model::json_row(&r.point);
                    v["table"] = r.table.into();
                    v["solver"] = r.solver.into();
                    v["source"] = r.source.into();
                    println!("{v}");
                }
            }
        }
        return Ok(EXIT_OK);
    };
    let strategies: Vec<Strategy> = a.strategy.map_or(Strategy::ALL.to_vec(), |s| vec![s]);
    let points = strategies
        .into_iter()
        .map(|s| cost_model::exponents_with_memory(c, s, a.poly_memory))
        .collect::<Result<Vec<_>>>()?;
    if a.format == TableFormat::Csv {
        println!("{}", cost_model::CSV_HEADER);
    }
    for p in &points {
        match a.format {
            TableFormat::Text => println!(
                "c={}  {:<17} queries {:<10} time {:<12} memory {}",
                p.c,
                p.strategy.name(),
                p.query_label(),
                p.time_label(),
                p.memory
            ),
            TableFormat::Csv => println!("{}", cost_model::csv_row(p)),
            TableFormat::Json => println!("{}", cost_model::json_row(p)),
        }
    }
    Ok(EXIT_OK)
}
