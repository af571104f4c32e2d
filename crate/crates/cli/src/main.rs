mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use easytime::runtime::GroupBy;
use easytime::Dialect;

/// Compile EasyTime programs and time races with them.
#[derive(Parser)]
#[command(name = "easytime", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize, parse and analyze a program.
    Check {
        program: PathBuf,
        #[arg(long, default_value_t = Dialect::EasyTimePlusPlus)]
        dialect: Dialect,
        /// Roster used to check category coverage.
        #[arg(long)]
        runners: Option<PathBuf>,
    },
    /// Replay event files and write results.
    Run {
        #[command(flatten)]
        race: RaceArgs,
        /// Event log(s); merged and sorted by timestamp.
        #[arg(long = "events", required = true, num_args = 1..)]
        events: Vec<PathBuf>,
    },
    /// Listen for events over TCP, journal them, write results on shutdown.
    Serve {
        #[command(flatten)]
        race: RaceArgs,
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "0.0.0.0")]
        bind: String,
        /// Rewrite result files every N applied events.
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Re-export results from a journal written by `serve`.
    Results {
        #[command(flatten)]
        race: RaceArgs,
        #[arg(long)]
        journal: PathBuf,
    },
    /// Print a language definition.
    Grammar {
        #[arg(long, default_value_t = Dialect::EasyTimePlusPlus)]
        dialect: Dialect,
    },
}

#[derive(Args, Clone)]
pub struct RaceArgs {
    pub program: PathBuf,
    #[arg(long, default_value_t = Dialect::EasyTimePlusPlus)]
    pub dialect: Dialect,
    #[arg(long)]
    pub runners: PathBuf,
    #[arg(long = "out", env = "EASYTIME_OUT", default_value = "out")]
    pub out_dir: PathBuf,
    /// Variable to rank by (ascending, undefined last).
    #[arg(long = "rank")]
    pub rank_var: Option<String>,
    /// category, gender or category-gender.
    #[arg(long = "group")]
    pub group_by: Option<GroupBy>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check {
            program,
            dialect,
            runners,
        } => commands::check(&program, dialect, runners.as_deref()),
        Command::Run { race, events } => commands::run(&race, &events),
        Command::Serve {
            race,
            port,
            bind,
            snapshot_every,
        } => commands::serve(&race, &bind, port, snapshot_every),
        Command::Results { race, journal } => commands::run(&race, &[journal]),
        Command::Grammar { dialect } => {
            print!("{}", dialect.language().to_definition_text());
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if let Some(msg) = failure.message() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
