//! Command-line front end.
//!
//! `dfmo run` configures and executes one solver run, writing the final
//! front, the per-iteration trace and the lineage edge list under `--out`,
//! plus `run.json` with the fully resolved configuration and counters.
//! `dfmo serve` exposes a built-in problem over the line protocol so other
//! processes (or this binary's own `--external-cmd`) can evaluate it.
//!
//! Exit codes: 0 on a normal stop, 2 for configuration errors, 3 for oracle
//! failures, 4 when the evaluation budget truncated the run.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::problems::builtin;
use crate::protocol::serve;
use crate::run::{run, AlgoKind, ProblemSpec, RunArtifacts, RunConfig, StrategyKind};
use crate::trace::{emit_front, emit_lineage, emit_trace, OutputFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_TRUNCATED: i32 = 4;

#[derive(Parser)]
#[command(
    name = "dfmo",
    version,
    about = "Derivative-free multi-objective optimization with expanding linesearches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver and write front/trace/lineage artifacts.
    Run(Box<RunArgs>),
    /// Serve a built-in problem over stdin/stdout using the line protocol.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Strong,
    Light,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Min,
    Max,
    Rr,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in problem name.
    #[arg(long, conflicts_with = "external_cmd")]
    problem: Option<String>,

    /// External objective command speaking the line protocol.
    #[arg(long, requires = "external_n", requires = "external_q")]
    external_cmd: Option<String>,

    /// Decision dimension of the external objective.
    #[arg(long)]
    external_n: Option<usize>,

    /// Objective count of the external objective.
    #[arg(long)]
    external_q: Option<usize>,

    #[arg(long, value_enum, default_value = "strong")]
    algo: AlgoArg,

    /// Selection rule for --algo light.
    #[arg(long, value_enum, default_value = "min")]
    strategy: StrategyArg,

    /// Stepsize shrink factor after a failed exploration, in (0,1).
    #[arg(long, default_value_t = 0.5)]
    theta: f64,

    /// Sufficiency margin coefficient, in (0,1).
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,

    /// Expansion divisor (steps grow by 1/delta), in (0,1).
    #[arg(long, default_value_t = 0.5)]
    delta: f64,

    /// Exploration floor coefficient, in (0,1).
    #[arg(long, default_value_t = 0.9)]
    c: f64,

    /// Cost-function weight; must satisfy 0 < eta < gamma^q.
    /// Defaults to gamma^q / 2.
    #[arg(long)]
    eta: Option<f64>,

    /// Reference-point offset added to the observed objective maxima.
    #[arg(long, default_value_t = 1.0)]
    s: f64,

    /// Random unit directions added to the 2n coordinate directions.
    #[arg(long, default_value_t = 0)]
    r_extra: usize,

    /// Initial stepsize for every direction of every starting point.
    #[arg(long, default_value_t = 1.0)]
    alpha0: f64,

    #[arg(long)]
    max_iters: Option<u64>,

    #[arg(long)]
    max_evals: Option<u64>,

    /// Stop when the largest stepsize in the list falls to this value.
    #[arg(long)]
    delta_tol: Option<f64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Central-difference step for criticality diagnostics.
    #[arg(long, default_value_t = 1e-5)]
    fd_step: f64,

    /// Explicit reference point override, comma-separated objective values.
    #[arg(long)]
    ref_point: Option<String>,

    /// Record the criticality columns gamma_max and gamma_min per iteration.
    #[arg(long)]
    trace_criticality: bool,

    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,

    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct ServeArgs {
    /// Built-in problem to serve.
    #[arg(long)]
    problem: String,
}

/// Entry point used by the binary; returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; help/version are not errors.
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => match execute_run(&args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code_for(&e)
            }
        },
        Command::Serve(args) => match execute_serve(&args) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                exit_code_for(&e)
            }
        },
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Reference(_) => EXIT_CONFIG,
        Error::Oracle { .. }
        | Error::Protocol(_)
        | Error::Timeout { .. }
        | Error::StepOverflow { .. }
        | Error::NonFinite(_) => EXIT_ORACLE,
        Error::Io(_) => 1,
    }
}

fn parse_ref_point(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad reference-point component {tok:?}")))
        })
        .collect()
}

fn build_config(args: &RunArgs) -> Result<RunConfig> {
    let problem = match (&args.problem, &args.external_cmd) {
        (Some(name), None) => ProblemSpec::Builtin { name: name.clone() },
        (None, Some(cmd)) => ProblemSpec::External {
            cmd: cmd.clone(),
            n: args.external_n.expect("clap enforces external_n"),
            q: args.external_q.expect("clap enforces external_q"),
        },
        (None, None) => {
            return Err(Error::Config(
                "choose a problem with --problem or --external-cmd".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap marks the flags as conflicting"),
    };
    if args.max_iters.is_none() && args.max_evals.is_none() && args.delta_tol.is_none() {
        return Err(Error::Config(
            "set at least one stopping criterion (--max-iters, --max-evals or --delta-tol)".into(),
        ));
    }
    Ok(RunConfig {
        problem,
        algo: match args.algo {
            AlgoArg::Strong => AlgoKind::Strong,
            AlgoArg::Light => AlgoKind::Light,
        },
        strategy: match args.strategy {
            StrategyArg::Min => StrategyKind::Min,
            StrategyArg::Max => StrategyKind::Max,
            StrategyArg::Rr => StrategyKind::RoundRobin,
        },
        theta: args.theta,
        gamma: args.gamma,
        delta: args.delta,
        c: args.c,
        eta: args.eta,
        s: args.s,
        r_extra: args.r_extra,
        alpha0: args.alpha0,
        seed: args.seed,
        max_iters: args.max_iters,
        max_evals: args.max_evals,
        delta_tol: args.delta_tol,
        fd_step: args.fd_step,
        ref_point: args.ref_point.as_deref().map(parse_ref_point).transpose()?,
        trace_criticality: args.trace_criticality,
    })
}

fn execute_run(args: &RunArgs) -> Result<i32> {
    let config = build_config(args)?;
    let artifacts = run(&config)?;
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    write_artifacts(&artifacts, &args.out, format)?;
    if artifacts.clip_events > 0 {
        eprintln!(
            "warning: {} hypervolume clip event(s); the reference point did not dominate \
             every archived point (consider a larger --s)",
            artifacts.clip_events
        );
    }
    Ok(if artifacts.truncated() {
        EXIT_TRUNCATED
    } else {
        EXIT_OK
    })
}

/// Writes `trace.{ext}`, `front.{ext}`, `lineage.{ext}` and `run.json`.
pub fn write_artifacts(
    artifacts: &RunArtifacts,
    out: &Path,
    format: OutputFormat,
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let ext = format.extension();
    let file = |name: &str| -> std::io::Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(out.join(name))?))
    };
    emit_trace(
        &artifacts.trace,
        format,
        artifacts.config_echo.trace_criticality,
        file(&format!("trace.{ext}"))?,
    )?;
    emit_front(&artifacts.final_front, format, file(&format!("front.{ext}"))?)?;
    emit_lineage(&artifacts.lineage, format, file(&format!("lineage.{ext}"))?)?;
    let summary = serde_json::json!({
        "config": artifacts.config_echo,
        "counters": artifacts.counters,
        "stop": artifacts.stop,
        "clip_events": artifacts.clip_events,
        "iterations": artifacts.trace.len().saturating_sub(1),
        "front_size": artifacts.final_front.len(),
    });
    let mut w = file("run.json")?;
    serde_json::to_writer_pretty(&mut w, &summary).map_err(std::io::Error::other)?;
    writeln!(w)?;
    Ok(())
}

fn execute_serve(args: &ServeArgs) -> Result<()> {
    let mut problem = builtin(&args.problem)?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    serve(&mut problem, stdin.lock(), stdout.lock())
}
