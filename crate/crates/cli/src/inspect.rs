use anyhow::{Context, Result};
use semifield_core::classify::{aut_order, canonical_key, format_inventory, PlaneClassifier};
use semifield_core::{FieldSpec, StandardSet};

#[derive(clap::Args)]
pub struct Args {
    /// Codes of A_2..A_d, optionally preceded by the identity's code.
    #[arg(required = true)]
    codes: Vec<u64>,
    #[arg(long, default_value_t = 3)]
    p: u32,
    #[arg(long, default_value_t = 4)]
    d: usize,
    /// Also compute the autotopy order and the S3 orbit.
    #[arg(long)]
    at: bool,
}

pub fn run(args: Args) -> Result<()> {
    let spec = FieldSpec::new(args.p, args.d)?;
    let set = StandardSet::from_codes(spec, &args.codes).context("not a semifield")?;
    for (i, m) in set.matrices().iter().enumerate() {
        println!(
            "A_{} = {}  char poly {}",
            i + 1,
            m.code_value(),
            m.char_poly()
        );
        print!("{m}");
    }
    let pred = set.predicates();
    println!(
        "{}, {}, |Aut| = {}",
        if pred.commutative {
            "commutative"
        } else {
            "not commutative"
        },
        if pred.associative {
            "associative"
        } else {
            "not associative"
        },
        aut_order(&set)?
    );
    println!("canonical key {}", canonical_key(&set)?);
    if args.at {
        let rec = PlaneClassifier::new(spec).plane_record(&set)?;
        println!("order of At {}", rec.at_order);
        println!(
            "S/A sum {} = {}",
            format_inventory(&rec.inventory, " + "),
            rec.sa_sum
        );
        let f = rec.sigma_flags;
        println!(
            "S3 orbit size {}, (12)-isotopic {}, (13)-isotopic {}, (23)-isotopic {}",
            rec.s3_orbit_size, f.self_dual, f.self_transpose, f.iso_23
        );
    }
    Ok(())
}
