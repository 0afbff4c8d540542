use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use semifield_core::census::ClassMode;

mod classify;
mod inspect;
mod io;
mod report;
mod search;

#[derive(Parser)]
#[command(
    name = "semifield",
    version,
    about = "Search and classify finite semifields of order p^d"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate standard sets seeded by primitive polynomials.
    Search(search::Args),
    /// Group a tuple stream into isomorphism, isotopy or S3 classes.
    Classify(classify::Args),
    /// Render class files as the per-plane or summary table.
    Report(report::Args),
    /// Describe one semifield given by its matrix codes.
    Inspect(inspect::Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Isomorphism,
    Isotopy,
    S3,
}

impl From<Mode> for ClassMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Isomorphism => ClassMode::Isomorphism,
            Mode::Isotopy => ClassMode::Isotopy,
            Mode::S3 => ClassMode::S3,
        }
    }
}

/// `<path>.jsonl`, the structured export written next to a text output.
fn jsonl_path(path: &std::path::Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".jsonl");
    PathBuf::from(s)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Search(args) => search::run(args),
        Command::Classify(args) => classify::run(args),
        Command::Report(args) => report::run(args),
        Command::Inspect(args) => inspect::run(args),
    }
}
