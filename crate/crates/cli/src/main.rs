//! `sonarsim`: render sonar frames, run MSIS scans, benchmark and compare frames.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "sonarsim", version, about = "Imaging sonar simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one frame and write the polar frame and a Cartesian image.
    Render {
        /// TOML file with any of the flags below; flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Sweep an MSIS head through a full revolution and write the mosaic.
    Scan {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Time the simulator over random four-primitive scenes.
    Bench {
        #[arg(long, value_enum, default_value_t = Preset::Fls)]
        preset: Preset,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compare selective and brute-force secondary tracing.
        #[arg(long)]
        ablation: bool,
        /// CSV report path; printed to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Similarity of two frame files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// TOML report path; printed to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Eight forward-looking setups: 128/256 beams, 500/1000 bins, 120°×20° and 90°×15°.
    #[value(name = "paper-fls")]
    Fls,
    /// Four scanning setups: 500/1000 bins, 3°×35° and 2°×20°.
    #[value(name = "paper-msis")]
    Msis,
    /// Both of the above.
    #[value(name = "paper")]
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Render { config, run } => commands::render(config.as_deref(), run),
        Command::Scan { config, run } => commands::scan(config.as_deref(), run),
        Command::Bench {
            preset,
            samples,
            seed,
            ablation,
            output,
        } => commands::bench(preset, samples, seed, ablation, output.as_deref()),
        Command::Compare { a, b, output } => commands::compare(&a, &b, output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sonarsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
