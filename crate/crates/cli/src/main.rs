use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mms_core::adapters::{solve_budget_adapter, solve_conflicts_adapter, solve_intervals_adapter};
use mms_core::driver::{solve, Mode, SolveConfig};
use mms_core::generators::{self, ValueRange};
use mms_core::io::{certify, parse_oracle, trace_lines, AllocationJson, ConfigJson, VerificationJson};
use mms_core::mms::{all_mms, compute_mms_exact, mms_bounds, verify_allocation, BRUTE_FORCE_GATE};
use mms_core::{rational, Error, Instance};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_GATE: u8 = 3;

#[derive(Parser)]
#[command(name = "mms", version, about = "Approximate maximin-share allocations under hereditary set systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance.
    Gen(GenArgs),
    /// Solve an instance and write the allocation.
    Solve(SolveArgs),
    /// Compute maximin shares by brute force.
    Mms(MmsArgs),
    /// Check an allocation against alpha times every maximin share.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    TwoThirds,
    AsymHalf,
    ThreePartition,
    Random,
    Additive,
    Budget,
    Conflict,
    Interval,
    Entitled,
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Agents of the first type in the two-thirds gadget.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Comma-separated numbers for the 3-PARTITION reduction.
    #[arg(long, value_delimiter = ',')]
    numbers: Vec<u64>,
    /// Item inclusion probability of random maximal sets.
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    lo: u32,
    #[arg(long, default_value_t = 10)]
    hi: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMode {
    Existence,
    #[value(name = "two_fifths", alias = "two-fifths")]
    TwoFifths,
    Alpha,
    Entitled,
    Budget,
    Conflicts,
    Intervals,
}

impl SolveMode {
    fn name(self) -> &'static str {
        match self {
            SolveMode::Existence => "existence",
            SolveMode::TwoFifths => "two_fifths",
            SolveMode::Alpha => "alpha",
            SolveMode::Entitled => "entitled",
            SolveMode::Budget => "budget",
            SolveMode::Conflicts => "conflicts",
            SolveMode::Intervals => "intervals",
        }
    }

    fn core(self) -> Option<Mode> {
        match self {
            SolveMode::Existence => Some(Mode::Existence),
            SolveMode::TwoFifths => Some(Mode::TwoFifths),
            SolveMode::Alpha => Some(Mode::Alpha),
            SolveMode::Entitled => Some(Mode::Entitled),
            _ => None,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Defaults to the configuration block's mode, then two_fifths.
    #[arg(long, value_enum)]
    mode: Option<SolveMode>,
    /// Oracle error bound, as "p/q" or a decimal.
    #[arg(long)]
    epsilon: Option<String>,
    /// default, exact or adversarial.
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Solver configuration block; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the round trace as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Attach exact maximin shares and ratios (brute force).
    #[arg(long)]
    certify: bool,
    #[arg(long, default_value_t = BRUTE_FORCE_GATE)]
    gate: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MmsArgs {
    instance: PathBuf,
    /// 1-based agent; all agents when omitted.
    #[arg(long)]
    agent: Option<usize>,
    #[arg(long, default_value_t = BRUTE_FORCE_GATE)]
    gate: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    allocation: PathBuf,
    /// Defaults to the guarantee recorded in the allocation file.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = BRUTE_FORCE_GATE)]
    gate: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => match writeln!(io::stdout(), "{text}") {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing to stdout"),
        },
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::from_json_str(&text)?)
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    let range = ValueRange { lo: args.lo, hi: args.hi };
    let inst = match args.family {
        Family::TwoThirds => generators::gen_two_thirds_bound(args.n, args.r)?,
        Family::AsymHalf => generators::gen_asymmetric_half(args.n)?,
        Family::ThreePartition => generators::gen_three_partition(&args.numbers)?,
        Family::Random => generators::gen_random_hereditary(args.m, args.n, args.density, range, args.seed),
        Family::Additive => generators::gen_random_additive(args.m, args.n, range, args.seed),
        Family::Budget => generators::gen_random_budget(args.m, args.n, range, args.seed),
        Family::Conflict => generators::gen_random_conflict(args.m, args.n, range, args.seed),
        Family::Interval => generators::gen_random_interval(args.m, args.n, range, args.seed),
        Family::Entitled => generators::gen_random_entitled(args.m, args.n, range, args.seed),
    };
    emit(args.out.as_deref(), &inst.to_json_string())?;
    Ok(ExitCode::SUCCESS)
}

fn solve_config(args: &SolveArgs) -> Result<(SolveMode, SolveConfig, bool)> {
    let (mut config, trace) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ConfigJson::from_json_str(&text)?.to_config()?
        }
        None => (SolveConfig::new(Mode::TwoFifths), false),
    };
    let mode = args.mode.unwrap_or(match config.mode {
        Mode::Existence => SolveMode::Existence,
        Mode::TwoFifths => SolveMode::TwoFifths,
        Mode::Alpha => SolveMode::Alpha,
        Mode::Entitled => SolveMode::Entitled,
    });
    if let Some(m) = mode.core() {
        config.mode = m;
    }
    if let Some(e) = &args.epsilon {
        config.epsilon = rational::parse(e)?;
    }
    if let Some(o) = &args.oracle {
        config.oracle = parse_oracle(o)?;
    }
    if let Some(d) = &args.delta {
        config.delta = Some(rational::parse(d)?);
    }
    config.gate = args.gate;
    Ok((mode, config, trace))
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let inst = read_instance(&args.instance)?;
    let (mode, config, config_trace) = solve_config(args)?;
    let (mut json, solution) = match mode {
        SolveMode::Budget => {
            let rep = solve_budget_adapter(&inst)?;
            (AllocationJson::from_report(&inst, mode.name(), &rep), rep.solution)
        }
        SolveMode::Conflicts => {
            let rep = solve_conflicts_adapter(&inst, args.gate)?;
            (AllocationJson::from_report(&inst, mode.name(), &rep), rep.solution)
        }
        SolveMode::Intervals => {
            let rep = solve_intervals_adapter(&inst)?;
            (AllocationJson::from_report(&inst, mode.name(), &rep), rep.solution)
        }
        _ => {
            let sol = solve(&inst, &config)?;
            (AllocationJson::from_solution(&inst, mode.name(), &sol), sol)
        }
    };
    if args.certify {
        match all_mms(&inst, args.gate) {
            Ok(records) => {
                let mut allocation = solution.allocation.clone();
                certify(&mut allocation, &inst, &records);
                let certified = AllocationJson::from_allocation(&inst, &allocation);
                for (a, c) in json.agents.iter_mut().zip(certified.agents) {
                    a.mu = c.mu;
                    a.ratio = c.ratio;
                }
            }
            Err(e @ Error::BruteForceGateExceeded { .. }) => eprintln!("not certified: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    // A configuration block asking for a trace puts it next to the output.
    let trace_path = args.trace.clone().or_else(|| {
        let out = args.out.as_ref().filter(|_| config_trace)?;
        Some(out.with_extension("trace.jsonl"))
    });
    if let Some(path) = &trace_path {
        let mut text = trace_lines(&solution).join("\n");
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(args.out.as_deref(), &json.to_json_string())?;
    if args.out.is_some() {
        for a in &json.agents {
            let value = a.value.as_deref().unwrap_or("-");
            match &a.ratio {
                Some(r) => println!("agent {}: value {value}, ratio {r}", a.agent),
                None => println!("agent {}: value {value}", a.agent),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mms(args: &MmsArgs) -> Result<ExitCode> {
    let inst = read_instance(&args.instance)?;
    let agents: Vec<usize> = match args.agent {
        Some(0) => bail!("agents are numbered from 1"),
        Some(a) if a > inst.n => bail!("agent {a} out of range for n = {}", inst.n),
        Some(a) => vec![a - 1],
        None => (0..inst.n).collect(),
    };
    let mut entries = Vec::new();
    let mut gated = false;
    for &i in &agents {
        let bounds = mms_bounds(&inst, i)?;
        let mut entry = serde_json::json!({
            "agent": i + 1,
            "lower": rational::format(&bounds.lower),
            "upper": rational::format(&bounds.upper),
        });
        match compute_mms_exact(&inst, i, inst.n, args.gate) {
            Ok(record) => {
                entry["mu"] = rational::format(&record.mu).into();
                let witness: Vec<Vec<usize>> = record.witness.iter().map(|b| b.to_one_based()).collect();
                entry["witness"] = serde_json::to_value(witness)?;
            }
            Err(e @ Error::BruteForceGateExceeded { .. }) => {
                gated = true;
                eprintln!("{e}; printing bounds only");
            }
            Err(e) => return Err(e.into()),
        }
        entries.push(entry);
    }
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&entries)?)?;
    Ok(if gated { ExitCode::from(EXIT_GATE) } else { ExitCode::SUCCESS })
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let inst = read_instance(&args.instance)?;
    let text = fs::read_to_string(&args.allocation).with_context(|| format!("reading {}", args.allocation.display()))?;
    let file = AllocationJson::from_json_str(&text)?;
    let alpha = match (&args.alpha, &file.guarantee) {
        (Some(a), _) | (None, Some(a)) => rational::parse(a)?,
        (None, None) => bail!("no --alpha given and the allocation records no guarantee"),
    };
    let allocation = file.to_allocation(&inst)?;
    let report = verify_allocation(&inst, &allocation, &alpha, args.gate, true)?;
    emit(args.out.as_deref(), &serde_json::to_string_pretty(&VerificationJson::from_report(&report))?)?;
    if args.out.is_some() {
        println!("{}", if report.pass { "pass" } else { "fail" });
    }
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VERIFY_FAILED) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Mms(a) => cmd_mms(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let gate = matches!(
                e.downcast_ref::<Error>(),
                Some(Error::BruteForceGateExceeded { .. } | Error::ExactnessGateExceeded { .. })
            );
            ExitCode::from(if gate { EXIT_GATE } else { EXIT_INPUT })
        }
    }
}
