mod commands;
mod input;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use convexity::Limits;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "convexity",
    version,
    about = "Finite convexity spaces, Radon numbers and nerves"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalArgs {
    /// Worker threads (defaults to the available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated search units.
    #[arg(
        long,
        global = true,
        env = "CONVEXITY_BUDGET",
        default_value_t = 500_000_000
    )]
    budget: u64,
    /// Reduce searches by symmetry where supported.
    #[arg(long, global = true)]
    symmetry: bool,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, validate and query convexity spaces.
    #[command(subcommand)]
    Space(commands::SpaceCmd),
    /// Radon and Tverberg numbers.
    #[command(subcommand)]
    Radon(commands::RadonCmd),
    /// Nerves of point sets.
    #[command(subcommand)]
    Nerve(commands::NerveCmd),
    /// The nerve with r_2 = 4 and a large r_k.
    #[command(subcommand)]
    Cex(commands::CexCmd),
    /// Spaces with r_2 = 3.
    #[command(subcommand)]
    Jamison(commands::JamisonCmd),
    /// Combinatorial bounds.
    #[command(subcommand)]
    Bounds(commands::BoundsCmd),
}

/// Resolved settings, echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub budget_nodes: u64,
    pub parallelism: usize,
    pub seed: u64,
    pub symmetry: bool,
    pub output_path: Option<String>,
    pub timings: bool,
}

impl RunConfig {
    pub fn limits(&self) -> Limits {
        Limits::with_budget(self.budget_nodes)
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a [String],
    config: &'a RunConfig,
}

/// Where command output goes.
pub struct Output {
    pub config: RunConfig,
    command: Vec<String>,
}

impl Output {
    /// Writes a report wrapped with the run metadata.
    pub fn report<T: Serialize>(&self, report: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            meta: Meta<'a>,
            report: &'a T,
        }
        self.document(&Envelope {
            meta: Meta {
                tool: "convexity",
                version: env!("CARGO_PKG_VERSION"),
                command: &self.command,
                config: &self.config,
            },
            report,
        })
    }

    /// Writes a bare document.
    pub fn document<T: Serialize>(&self, doc: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(doc)?;
        text.push('\n');
        match &self.config.output_path {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Command result: success, or a property was found violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violated,
    /// A partial report was written after a budget was exhausted.
    OverBudget,
}

impl Verdict {
    pub fn from_holds(holds: bool) -> Self {
        if holds {
            Verdict::Ok
        } else {
            Verdict::Violated
        }
    }
}

fn exit_status(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<convexity::Error>() {
            return match e {
                convexity::Error::ResourceLimit { .. } => 3,
                convexity::Error::PropertyViolation(_) => 1,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let parallelism = g
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build_global()
    {
        eprintln!("error: cannot start worker pool: {e}");
        return ExitCode::from(2);
    }
    let config = RunConfig {
        budget_nodes: g.budget.max(1),
        parallelism,
        seed: g.seed,
        symmetry: g.symmetry,
        output_path: g.out.map(|p| p.display().to_string()),
        timings: g.timings,
    };
    let out = Output {
        config,
        command: std::env::args().skip(1).collect(),
    };
    let result = match cli.command {
        Command::Space(c) => commands::space(c, &out),
        Command::Radon(c) => commands::radon(c, &out),
        Command::Nerve(c) => commands::nerve(c, &out),
        Command::Cex(c) => commands::cex(c, &out),
        Command::Jamison(c) => commands::jamison(c, &out),
        Command::Bounds(c) => commands::bounds(c, &out),
    };
    match result {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Violated) => ExitCode::from(1),
        Ok(Verdict::OverBudget) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
