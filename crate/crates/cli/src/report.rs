use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::ValueEnum;
use semifield_core::census::{format_table1, format_table2, table1, ClassFile, Table2Row};

use crate::io::{jsonl, read, write_atomic};
use crate::jsonl_path;

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// One row per reference plane.
    Table1,
    /// Class counts per stage.
    Table2,
    /// The class records themselves.
    Lines,
}

#[derive(clap::Args)]
pub struct Args {
    /// Class files; `table2` takes one per stage.
    #[arg(long, num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    #[arg(long, value_enum)]
    format: Format,
    /// Report destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let files: Vec<ClassFile> = args
        .input
        .iter()
        .map(|p| Ok(ClassFile::parse(&read(p)?)?))
        .collect::<Result<_>>()?;
    let (text, structured) = match args.format {
        Format::Table1 => {
            if files.len() != 1 {
                bail!("table1 takes exactly one class file");
            }
            let rows = table1(&files[0].standard_sets()?)?;
            (format_table1(&rows), jsonl(&rows)?)
        }
        Format::Table2 => {
            let rows: Vec<Table2Row> = files.iter().map(Table2Row::from_file).collect();
            (format_table2(&rows), jsonl(&rows)?)
        }
        Format::Lines => {
            let text: String = files.iter().map(ClassFile::to_text).collect();
            let rows: Vec<_> = files.iter().flat_map(|f| f.rows.iter().cloned()).collect();
            (text, jsonl(&rows)?)
        }
    };
    match &args.output {
        Some(out) => {
            write_atomic(out, &text)?;
            write_atomic(&jsonl_path(out), &structured)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}
