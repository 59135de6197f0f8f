use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use svgcli::campaign::{run_decompose, run_optimize, CampaignSummary};
use svgcli::config::{CampaignConfig, Format};
use svgcli::error::CliResult;
use svgcli::report::write_report;
use svgcli::rows::{format_of, read_rows};
use svgcli::verify;

#[derive(Parser)]
#[command(name = "svg", version, about = "Decompose benchmark functions and optimize over the result")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose every configured (function, decomposer, seed) and score it.
    Decompose(CampaignArgs),
    /// Decompose, then run cooperative-coevolution DE within the budget.
    Optimize(CampaignArgs),
    /// Aggregate a row file into median/mean/std per function and metric.
    Report {
        /// A decompose or optimize row file (.csv or .json).
        input: PathBuf,
        /// Directory for summary.<ext>; defaults to the input's directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Print the default campaign configuration as TOML.
    Defaults,
    /// Run the scaled acceptance checks and print one line per criterion.
    Verify {
        /// Only these criteria (1-11); all when omitted.
        #[arg(long = "only", value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed_offset: Option<u64>,
}

impl CampaignArgs {
    fn resolve(self) -> CliResult<CampaignConfig> {
        let mut cfg = match &self.config {
            Some(path) => CampaignConfig::load(path)?,
            None => CampaignConfig::default(),
        };
        if let Some(out) = self.out {
            cfg.out_dir = out;
        }
        if let Some(format) = self.format {
            cfg.format = format;
        }
        if let Some(jobs) = self.jobs {
            cfg.jobs = jobs;
        }
        if let Some(offset) = self.seed_offset {
            cfg.seed_offset = offset;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn announce(summary: &CampaignSummary) {
    println!(
        "{}: {} rows ({} new, {} failed)",
        summary.path.display(),
        summary.rows.len(),
        summary.attempted,
        summary.failed
    );
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Decompose(args) => {
            let cfg = args.resolve()?;
            let summary = run_decompose(&cfg)?;
            announce(&summary);
            if !cfg.optimize {
                return Ok(summary.exit_code() as u8);
            }
            // `optimize = true` in the config chains an optimization campaign.
            let optimized = run_optimize(&cfg)?;
            announce(&optimized);
            Ok(summary.exit_code().max(optimized.exit_code()) as u8)
        }
        Command::Optimize(args) => {
            let summary = run_optimize(&args.resolve()?)?;
            announce(&summary);
            Ok(summary.exit_code() as u8)
        }
        Command::Report { input, out, format } => {
            let rows = read_rows(&input, format_of(&input)?)?;
            let dir = out.unwrap_or_else(|| input.parent().map(PathBuf::from).unwrap_or_default());
            let path = write_report(&rows, &dir, format.unwrap_or(format_of(&input)?))?;
            println!("{}", path.display());
            Ok(0)
        }
        Command::Defaults => {
            print!("{}", CampaignConfig::default().to_toml());
            Ok(0)
        }
        Command::Verify { only } => {
            if let Some(bad) = only.iter().find(|&&id| id == 0 || id > verify::CRITERIA) {
                return Err(svgcli::CliError::Usage(format!("no criterion {bad}; expected 1-{}", verify::CRITERIA)));
            }
            let checks = verify::run(&only);
            for c in &checks {
                println!("{c}");
            }
            Ok(if checks.iter().all(|c| c.passed) { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
