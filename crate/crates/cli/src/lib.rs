//! The `ittm` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0  | halted (run, trace), some program halted (race), success (assemble, profile, stdlib) |
//! | 1  | I/O failure or engine error |
//! | 2  | usage error: bad flag, ordinal, input spec, budget or program name |
//! | 3  | a source failed to assemble |
//! | 10 | final loop: provably never halts |
//! | 11 | a budget was exceeded |

mod input;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ittm_core::asm::{assemble, disassemble};
use ittm_core::engine::{race_with, run, Budget, RaceWinner, RunOutcome};
use ittm_core::lab::{halting_spectrum_with, InputFamily};
use ittm_core::report::{
    profile_text, race_text, run_text, to_machine, Format, ProfileReport, RaceReport, RunReport,
    RunRequest,
};
use ittm_core::stdlib::{self, CATALOG};
use ittm_core::{LimitConvention, Ordinal, Program};

pub use input::parse_input;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ASSEMBLY: i32 = 3;
pub const EXIT_FINAL_LOOP: i32 = 10;
pub const EXIT_BUDGET: i32 = 11;

#[derive(Parser, Debug)]
#[command(
    name = "ittm",
    version,
    about = "Run infinite-time Turing machines through transfinite stages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble a source and print its canonical form.
    Assemble {
        program: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run one program on one input.
    Run {
        program: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run with the milestone trace included in the report.
    Trace {
        program: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run two programs in lockstep until one halts.
    Race {
        first: String,
        second: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run several programs over an input family and report stages and gaps.
    Profile {
        #[arg(required = true)]
        programs: Vec<String>,
        /// Family members; repeatable. Defaults to the zero input.
        #[arg(long = "input", conflicts_with = "family")]
        inputs: Vec<String>,
        /// `random-fin:COUNT:WIDTH[:DENSITY]` or `random-rel:COUNT:MAX[:DENSITY]`.
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// List the standard programs, or print one as source.
    Stdlib { name: Option<String> },
}

#[derive(Args, Debug)]
struct RunOpts {
    /// Input spec, e.g. `zero`, `bits:0110`, `fin:1,4`, `periodic:01/1`.
    #[arg(long, default_value = "zero")]
    input: String,
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// No stage beyond this ordinal is entered.
    #[arg(long, value_parser = parse_ordinal, default_value = "w^4")]
    budget_stage: Ordinal,
    /// Successor steps allowed between consecutive limits.
    #[arg(long, default_value_t = Budget::default().max_successor_steps_per_segment)]
    budget_steps: u64,
    /// Largest k for which jumps of length w^k are taken.
    #[arg(long, default_value_t = Budget::default().max_cycle_order)]
    max_order: u32,
    /// Limits of one order stored before giving up.
    #[arg(long, default_value_t = Budget::default().max_limits_per_order)]
    max_limits: usize,
    #[arg(long, value_enum, default_value_t = Convention::Liminf)]
    convention: Convention,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Convention {
    Liminf,
    HamkinsLewis,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

fn parse_ordinal(s: &str) -> Result<Ordinal, String> {
    s.parse::<Ordinal>().map_err(|e| e.to_string())
}

impl CommonOpts {
    fn budget(&self) -> Budget {
        Budget {
            max_stage: self.budget_stage.clone(),
            max_successor_steps_per_segment: self.budget_steps,
            max_cycle_order: self.max_order,
            max_limits_per_order: self.max_limits,
            ..Budget::default()
        }
    }

    fn convention(&self) -> LimitConvention {
        match self.convention {
            Convention::Liminf => LimitConvention::LiminfCells,
            Convention::HamkinsLewis => LimitConvention::HamkinsLewis,
        }
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Text => Format::Text,
            FormatArg::Machine => Format::Machine,
        }
    }
}

/// A failure with its exit code and diagnostic.
struct Fail(i32, String);

type Res<T> = Result<T, Fail>;

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

fn error(msg: impl Into<String>) -> Fail {
    Fail(EXIT_ERROR, msg.into())
}

/// Resolves `std:NAME` from the standard library, anything else as a path.
fn load_program(arg: &str) -> Res<Program> {
    if let Some(name) = arg.strip_prefix("std:") {
        return stdlib::by_name(name).ok_or_else(|| {
            usage(format!(
                "unknown standard program {name:?}; try `ittm stdlib`"
            ))
        });
    }
    let src = fs::read_to_string(arg).map_err(|e| error(format!("cannot read {arg}: {e}")))?;
    assemble(&src).map_err(|e| Fail(EXIT_ASSEMBLY, format!("{arg}: {e}")))
}

fn exit_for(o: &RunOutcome) -> i32 {
    match o {
        RunOutcome::Halted { .. } => EXIT_OK,
        RunOutcome::FinalLoop { .. } => EXIT_FINAL_LOOP,
        RunOutcome::BudgetExceeded { .. } => EXIT_BUDGET,
    }
}

/// Writes to a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, body: &str) -> Res<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let fail = |e: std::io::Error| error(format!("cannot write {}: {e}", path.display()));
    fs::write(&tmp, body).map_err(fail)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })
}

fn emit(out: &mut dyn Write, dest: Option<&Path>, body: &str) -> Res<()> {
    match dest {
        Some(p) => write_atomic(p, body),
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| error(format!("cannot write output: {e}"))),
    }
}

fn request(
    command: &str,
    programs: &[String],
    input: String,
    opts: &CommonOpts,
    trace: bool,
) -> RunRequest {
    RunRequest {
        command: command.into(),
        programs: programs.to_vec(),
        input,
        seed: opts.seed,
        budget: opts.budget(),
        convention: opts.convention(),
        trace,
    }
}

fn checked_budget(opts: &CommonOpts) -> Res<Budget> {
    let b = opts.budget();
    b.validate().map_err(|e| usage(e.to_string()))?;
    Ok(b)
}

fn cmd_run(program: String, opts: RunOpts, force_trace: bool, out: &mut dyn Write) -> Res<i32> {
    let trace = opts.trace || force_trace;
    let c = &opts.common;
    let budget = checked_budget(c)?;
    let x = parse_input(&opts.input, c.seed).map_err(usage)?;
    let p = load_program(&program)?;
    let (outcome, t) = run(&p, &x, &budget, c.convention()).map_err(|e| error(e.to_string()))?;
    let code = exit_for(&outcome);
    let report = RunReport {
        request: request(
            if force_trace { "trace" } else { "run" },
            &[program],
            opts.input.clone(),
            c,
            trace,
        ),
        outcome,
        trace: trace.then_some(t),
    };
    let body = match c.format() {
        Format::Text => run_text(&report),
        Format::Machine => to_machine(&report),
    };
    emit(out, c.output.as_deref(), &body)?;
    Ok(code)
}

fn cmd_race(first: String, second: String, opts: RunOpts, out: &mut dyn Write) -> Res<i32> {
    let c = &opts.common;
    let budget = checked_budget(c)?;
    let x = parse_input(&opts.input, c.seed).map_err(usage)?;
    let p = load_program(&first)?;
    let q = load_program(&second)?;
    let race = race_with(&p, &q, &x, &budget, c.convention()).map_err(|e| error(e.to_string()))?;
    let code = match race.winner {
        RaceWinner::Neither => exit_for(&race.joint),
        _ => EXIT_OK,
    };
    let report = RaceReport {
        request: request("race", &[first, second], opts.input.clone(), c, false),
        race,
    };
    let body = match c.format() {
        Format::Text => race_text(&report),
        Format::Machine => to_machine(&report),
    };
    emit(out, c.output.as_deref(), &body)?;
    Ok(code)
}

fn parse_family(spec: &str, seed: u64) -> Res<InputFamily> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("bad family spec {spec:?}"));
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let count: usize = parts[1].parse().map_err(|_| bad())?;
    let size: usize = parts[2].parse().map_err(|_| bad())?;
    let density: f64 = match parts.get(3) {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => 0.3,
    };
    if !(0.0..=1.0).contains(&density) {
        return Err(bad());
    }
    match parts[0] {
        "random-fin" => Ok(InputFamily::random_fin_support(seed, count, size, density)),
        "random-rel" => Ok(InputFamily::random_relations(seed, count, size, density)),
        _ => Err(bad()),
    }
}

fn cmd_profile(
    programs: Vec<String>,
    inputs: Vec<String>,
    family: Option<String>,
    c: CommonOpts,
    out: &mut dyn Write,
) -> Res<i32> {
    let budget = checked_budget(&c)?;
    let f = match &family {
        Some(spec) => parse_family(spec, c.seed.unwrap_or(0))?,
        None if inputs.is_empty() => InputFamily::zero(),
        None => {
            let tapes = inputs
                .iter()
                .map(|s| parse_input(s, c.seed).map(|t| (s.clone(), t)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            InputFamily::explicit("explicit", tapes)
        }
    };
    // Every source must assemble before anything runs.
    let ps = programs
        .iter()
        .map(|a| load_program(a))
        .collect::<Res<Vec<_>>>()?;
    let mut spectrum = halting_spectrum_with(&ps, &f, &budget, c.convention())
        .map_err(|e| error(e.to_string()))?;
    spectrum.programs = programs.clone();
    let report = ProfileReport {
        request: request("profile", &programs, f.name.clone(), &c, false),
        spectrum,
    };
    let body = match c.format() {
        Format::Text => profile_text(&report),
        Format::Machine => to_machine(&report),
    };
    emit(out, c.output.as_deref(), &body)?;
    Ok(EXIT_OK)
}

fn cmd_assemble(program: String, output: Option<PathBuf>, out: &mut dyn Write) -> Res<i32> {
    let p = load_program(&program)?;
    emit(out, output.as_deref(), &disassemble(&p))?;
    Ok(EXIT_OK)
}

fn cmd_stdlib(name: Option<String>, out: &mut dyn Write) -> Res<i32> {
    let body = match name {
        None => CATALOG.iter().map(|n| format!("{n}\n")).collect(),
        Some(n) => disassemble(
            &stdlib::by_name(&n).ok_or_else(|| usage(format!("unknown standard program {n:?}")))?,
        ),
    };
    emit(out, None, &body)?;
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match cli.command {
        Command::Assemble { program, output } => cmd_assemble(program, output, out),
        Command::Run { program, opts } => cmd_run(program, opts, false, out),
        Command::Trace { program, opts } => cmd_run(program, opts, true, out),
        Command::Race {
            first,
            second,
            opts,
        } => cmd_race(first, second, opts, out),
        Command::Profile {
            programs,
            inputs,
            family,
            common,
        } => cmd_profile(programs, inputs, family, common, out),
        Command::Stdlib { name } => cmd_stdlib(name, out),
    };
    match result {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "ittm: {msg}");
            code
        }
    }
}
