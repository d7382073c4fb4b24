//! Command-line front end: run one protocol at fixed coefficients, sweep a
//! coefficient range to tabulate both total-success curves, or cross-check
//! the closed forms against the brute-force branch enumeration.

use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use wconc::oracle::{crosscheck, sample_coefficients, CROSSCHECK_TOL};
use wconc::protocols::{ecp1_run, ecp2_run, IterationSchedule, Protocol, ProtocolReport};
use wconc::state::{sig15, WCoefficients};

#[derive(Parser)]
#[command(
    name = "wconc",
    version,
    about = "Entanglement concentration for three-party W states: exact runs, coefficient sweeps, and brute-force verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol at fixed coefficients and print its report
    Run(RunArgs),
    /// Tabulate both protocols' total success probability over a grid of
    /// alpha-squared values at fixed beta-squared
    Sweep(SweepArgs),
    /// Cross-check every closed form against the enumerated outcome trees
    Verify(VerifyArgs),
}

/// Which protocol to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    /// Beam splitters and charge detectors, one round per step
    Ecp1,
    /// Parity-check gates with failure recycling
    Ecp2,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Protocol {
        match p {
            ProtocolArg::Ecp1 => Protocol::Ecp1,
            ProtocolArg::Ecp2 => Protocol::Ecp2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Protocol to run; may also be given as --protocol
    #[arg(value_enum, value_name = "PROTOCOL")]
    protocol_positional: Option<ProtocolArg>,
    /// Protocol to run (alternative to the positional form)
    #[arg(long, value_enum, conflicts_with = "protocol_positional")]
    protocol: Option<ProtocolArg>,
    /// Squared weight of the first resource-state term
    #[arg(long)]
    alpha_sq: f64,
    /// Squared weight of the second term; the third is derived as the
    /// complement
    #[arg(long, default_value_t = 1.0 / 3.0)]
    beta_sq: f64,
    /// Maximum step-1 rounds (iterated protocol only)
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Maximum step-2 rounds (iterated protocol only)
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Per-round success probability below which iteration stops early
    #[arg(long, default_value_t = 1e-12)]
    cutoff: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Fixed squared weight of the second term
    #[arg(long, default_value_t = 1.0 / 3.0)]
    beta_sq: f64,
    /// Number of grid points spread over the open alpha-squared interval
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u16).range(2..))]
    points: u16,
    /// Maximum step-1 rounds of the iterated protocol
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Maximum step-2 rounds of the iterated protocol
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Per-round success probability below which iteration stops early
    #[arg(long, default_value_t = 1e-12)]
    cutoff: f64,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the pseudo-random coefficient triples
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of pseudo-random triples checked on top of the fixtures
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u16).range(1..))]
    trials: u16,
    /// Maximum step-1 rounds of the iterated protocol
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Maximum step-2 rounds of the iterated protocol
    #[arg(long, default_value_t = 3)]
    m: usize,
    /// Corrupt one comparison on purpose to prove drift is detected
    #[arg(long, hide = true)]
    inject_error: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Box<dyn Error>> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Box<dyn Error>> {
    let protocol: Protocol = match (args.protocol_positional, args.protocol) {
        (Some(p), None) | (None, Some(p)) => p.into(),
        _ => {
            // the conflicting double spelling is already rejected by clap
            Cli::command()
                .error(
                    clap::error::ErrorKind::MissingRequiredArgument,
                    "a protocol is required, either positionally (run ecp1 ...) or via --protocol",
                )
                .exit();
        }
    };
    let c = WCoefficients::from_squares(args.alpha_sq, args.beta_sq)?;
    let report = match protocol {
        Protocol::Ecp1 => ecp1_run(&c)?,
        Protocol::Ecp2 => {
            let sched = IterationSchedule::new(args.n, args.m, args.cutoff)?;
            ecp2_run(&c, &sched)?
        }
    };
    let rendered = match args.format {
        Format::Csv => run_report_csv(protocol, &c, &report),
        Format::Json => run_report_json(protocol, &c, &report)?,
    };
    emit(&rendered, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

const RUN_HEADER: &str =
    "protocol,alpha_sq,beta_sq,gamma_sq,rounds_step1,rounds_step2,sum_step1,sum_step2,p_total";

fn run_report_csv(protocol: Protocol, c: &WCoefficients, report: &ProtocolReport) -> String {
    format!(
        "{RUN_HEADER}\n{},{},{},{},{},{},{},{},{}\n",
        protocol,
        sig15(c.alpha_sq()),
        sig15(c.beta_sq()),
        sig15(c.gamma_sq()),
        report.per_round_step1.len(),
        report.per_round_step2.len(),
        sig15(report.sum_step1),
        sig15(report.sum_step2),
        sig15(report.p_total),
    )
}

fn run_report_json(
    protocol: Protocol,
    c: &WCoefficients,
    report: &ProtocolReport,
) -> Result<String, Box<dyn Error>> {
    let final_state: Option<Vec<String>> = report
        .final_state
        .as_ref()
        .map(|s| s.render().lines().map(str::to_string).collect());
    let value = serde_json::json!({
        "protocol": protocol.to_string(),
        "alpha_sq": c.alpha_sq(),
        "beta_sq": c.beta_sq(),
        "gamma_sq": c.gamma_sq(),
        "rounds_step1": report.per_round_step1.len(),
        "rounds_step2": report.per_round_step2.len(),
        "sum_step1": report.sum_step1,
        "sum_step2": report.sum_step2,
        "p_total": report.p_total,
        "per_round_step1": report.per_round_step1,
        "per_round_step2": report.per_round_step2,
        "coeff_trace": report.coeff_trace,
        "final_state": final_state,
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&value)?))
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Box<dyn Error>> {
    let upper = 1.0 - args.beta_sq;
    if !(args.beta_sq > 0.0 && upper > 0.0) {
        return Err(Box::new(wconc::Error::InvalidArgument(format!(
            "beta_sq must lie strictly inside (0, 1), got {}",
            args.beta_sq
        ))));
    }
    let sched = IterationSchedule::new(args.n, args.m, args.cutoff)?;
    let points = usize::from(args.points);
    let mut out = String::from("alpha_sq,p_ecp1,p_ecp2\n");
    for i in 0..points {
        // midpoints of an even partition keep every grid point strictly
        // inside the open interval
        let alpha_sq = upper * (i as f64 + 0.5) / points as f64;
        let c = WCoefficients::from_squares(alpha_sq, args.beta_sq)?;
        let p_ecp1 = ecp1_run(&c)?.p_total;
        let p_ecp2 = ecp2_run(&c, &sched)?.p_total;
        out.push_str(&format!(
            "{},{},{}\n",
            sig15(alpha_sq),
            sig15(p_ecp1),
            sig15(p_ecp2)
        ));
    }
    emit(&out, args.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Box<dyn Error>> {
    let sched = IterationSchedule::new(args.n, args.m, 1e-12)?;
    let mut triples = vec![
        WCoefficients::symmetric(),
        WCoefficients::from_squares(0.5, 1.0 / 3.0)?,
    ];
    triples.extend(sample_coefficients(args.seed, usize::from(args.trials)));

    let mut all_pass = true;
    let mut worst: f64 = 0.0;
    for (index, c) in triples.iter().enumerate() {
        let mut report = crosscheck(c, &sched)?;
        if args.inject_error && index == 0 {
            report
                .deltas
                .push(("injected.corruption".to_string(), 1e-3));
            report.max_abs_delta = report.max_abs_delta.max(1e-3);
            report.pass = report.max_abs_delta <= CROSSCHECK_TOL;
        }
        worst = worst.max(report.max_abs_delta);
        if report.pass {
            println!(
                "ok    alpha_sq={} beta_sq={} max_delta={:.3e}",
                sig15(c.alpha_sq()),
                sig15(c.beta_sq()),
                report.max_abs_delta
            );
        } else {
            all_pass = false;
            println!(
                "FAIL  alpha_sq={} beta_sq={}",
                sig15(c.alpha_sq()),
                sig15(c.beta_sq())
            );
            for (label, delta) in &report.deltas {
                if delta.abs() > CROSSCHECK_TOL {
                    println!("      {label}: delta {delta:.3e}");
                }
            }
        }
    }
    if all_pass {
        println!(
            "verified {} coefficient triples, max delta {worst:.3e}",
            triples.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verification FAILED, max delta {worst:.3e}");
        Ok(ExitCode::FAILURE)
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
