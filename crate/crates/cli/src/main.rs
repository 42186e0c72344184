use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use choigram_cli::commands::{self, scan_summary, ChannelKind};
use choigram_cli::{threads_from_env, BasisName, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "choigram", version, about = "Choi/Gram positivity checks and CP-divisibility scans")]
struct Cli {
    /// Model configuration (JSON or TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (a directory for `figures`); stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Positivity tolerance on minimum eigenvalues.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    basis: Option<BasisName>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Choi and Gram positivity of a channel file. Exit 0 if CP, 2 if not.
    Check { input: PathBuf },
    /// CP-divisibility scan over all grid pairs t >= s.
    Scan,
    /// Figure data series as CSV files in the output directory.
    Figures,
    /// Characteristic-function table and Gram matrix of a channel file (JSON).
    Charfunc { input: PathBuf },
    /// Write a reference channel file.
    ExportChannel {
        #[arg(long, value_enum)]
        kind: ChannelKind,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// η for amplitude damping, λ for dephasing.
        #[arg(long, default_value_t = 1.0)]
        param: f64,
        /// Kraus rank for random channels.
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    if let Some(basis) = cli.basis {
        config.basis = basis;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let format = cli.format.unwrap_or_default();
    match &cli.command {
        Command::Check { input } => {
            let report = commands::cmd_channel_check(
                input,
                cli.basis.unwrap_or(BasisName::Pauli),
                cli.tol.unwrap_or(1e-10),
            )?;
            let mut out = open_output(cli.output.as_deref())?;
            commands::write_check_report(&report, format, &mut out)?;
            out.flush()?;
            Ok(if report.cp_verdict { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Scan => {
            let config = load_config(cli)?;
            let report = commands::cmd_scan(&config, threads_from_env()?)?;
            let mut out = open_output(cli.output.as_deref())?;
            match format {
                Format::Csv => commands::write_scan_csv(&report, &mut out)?,
                Format::Json => commands::write_scan_json(&report, &mut out)?,
            }
            out.flush()?;
            eprintln!("{}", scan_summary(&report));
            Ok(ExitCode::SUCCESS)
        }
        Command::Figures => {
            let config = load_config(cli)?;
            let dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("figures"));
            let summary = commands::cmd_figures(&config, &dir)?;
            for f in &summary.files {
                eprintln!("wrote {}", f.display());
            }
            eprintln!(
                "backflow: {} interval(s), measure {}",
                summary.backflow_intervals.len(),
                commands::fmt_float(summary.backflow_measure)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Charfunc { input } => {
            let export = commands::cmd_charfunc(input, cli.basis.unwrap_or(BasisName::Pauli))?;
            let mut out = open_output(cli.output.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &export)?;
            writeln!(out)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportChannel { kind, dim, param, rank } => {
            let file = commands::cmd_export_channel(*kind, *dim, *param, *rank, cli.seed)?;
            let mut out = open_output(cli.output.as_deref())?;
            serde_json::to_writer_pretty(&mut out, &file)?;
            writeln!(out)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "not CP"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
