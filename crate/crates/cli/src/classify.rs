use std::path::PathBuf;

use anyhow::Result;
use semifield_core::census::{parse_tuple_stream, ClassFile, ClassMode};
use semifield_core::classify::{isomorphism_classes, isotopy_classes, s3_classes};
use semifield_core::{FieldSpec, StandardSet};

use crate::io::{jsonl, read, write_atomic};
use crate::{jsonl_path, Mode};

#[derive(clap::Args)]
pub struct Args {
    /// Tuple stream from `search`, or a class file from an earlier stage.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Class file destination; a `.jsonl` export is written next to it.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Standard sets from either a tuple stream or a class file.
pub fn load_sets(text: &str) -> Result<(FieldSpec, Vec<StandardSet>)> {
    let is_class_file = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.contains("mode="));
    if is_class_file {
        let file = ClassFile::parse(text)?;
        Ok((file.spec, file.standard_sets()?))
    } else {
        let (spec, entries) = parse_tuple_stream(text, None)?;
        Ok((spec, entries.into_iter().map(|(_, s)| s).collect()))
    }
}

pub fn run(args: Args) -> Result<()> {
    let (spec, sets) = load_sets(&read(&args.input)?)?;
    let mode = ClassMode::from(args.mode);
    let file = match mode {
        ClassMode::Isomorphism => ClassFile::from_iso_records(spec, &isomorphism_classes(sets)?),
        ClassMode::Isotopy => ClassFile::from_plane_records(spec, mode, &isotopy_classes(&sets)?),
        ClassMode::S3 => ClassFile::from_plane_records(spec, mode, &s3_classes(&sets)?),
    };
    println!(
        "{} ({} commutative)",
        file.rows.len(),
        file.commutative_count()
    );
    if let Some(out) = &args.output {
        write_atomic(out, &file.to_text())?;
        write_atomic(&jsonl_path(out), &jsonl(&file.rows)?)?;
    }
    Ok(())
}
