use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use semifield_core::census::{format_tuple_line, parse_tuple_stream, tuple_header};
use semifield_core::gf::primitive_polys;
use semifield_core::search::{complete_search, SearchConfig};
use semifield_core::{FieldSpec, StandardSet};

use crate::io::{read, write_atomic};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    d: usize,
    /// 1-based primitive polynomial index, or `all`.
    #[arg(long, default_value = "all")]
    poly: String,
    /// Worker threads for the shard pool (0 picks the core count).
    #[arg(long, default_value_t = 0)]
    shards: usize,
    /// Tuple stream destination. Shard checkpoints go to `<output>.parts`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Reuse shard checkpoints left by an earlier run.
    #[arg(long, requires = "output")]
    resume: bool,
}

fn selected(spec: FieldSpec, filter: &str) -> Result<Vec<usize>> {
    let count = primitive_polys(spec).len();
    if filter == "all" {
        return Ok((1..=count).collect());
    }
    let k: usize = filter
        .parse()
        .with_context(|| format!("bad --poly {filter:?}"))?;
    if !(1..=count).contains(&k) {
        bail!("--poly {k} out of range 1..={count}");
    }
    Ok(vec![k])
}

struct Shard {
    poly: usize,
    config: SearchConfig,
    /// Vector index of the fixed column, if the search is split.
    key: Option<u64>,
}

impl Shard {
    fn file_name(&self) -> String {
        match self.key {
            Some(k) => format!("poly{}-a3c2-{k}.txt", self.poly),
            None => format!("poly{}.txt", self.poly),
        }
    }

    fn run(&self, spec: FieldSpec, parts: Option<&Path>, resume: bool) -> Result<Vec<StandardSet>> {
        let path = parts.map(|dir| dir.join(self.file_name()));
        if let (Some(path), true) = (&path, resume) {
            if path.exists() {
                let (_, entries) = parse_tuple_stream(&read(path)?, Some(spec))
                    .with_context(|| format!("checkpoint {}", path.display()))?;
                return Ok(entries.into_iter().map(|(_, s)| s).collect());
            }
        }
        let sets: Vec<StandardSet> = complete_search(&self.config).collect();
        if let Some(path) = path {
            let mut text = format!("{} poly={}\n", tuple_header(spec), self.poly);
            for s in &sets {
                text.push_str(&format_tuple_line(self.poly, s));
                text.push('\n');
            }
            write_atomic(&path, &text)?;
        }
        Ok(sets)
    }
}

pub fn run(args: Args) -> Result<()> {
    let spec = FieldSpec::new(args.p, args.d)?;
    let polys = primitive_polys(spec);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.shards)
        .build()?;

    let parts = args.output.as_ref().map(|o| {
        let mut s = o.as_os_str().to_owned();
        s.push(".parts");
        PathBuf::from(s)
    });
    if let Some(dir) = &parts {
        if dir.exists() && !args.resume {
            fs::remove_dir_all(dir).with_context(|| format!("clearing {}", dir.display()))?;
        }
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let mut text = tuple_header(spec);
    text.push('\n');
    let mut total = 0;
    for k in selected(spec, &args.poly)? {
        let config = SearchConfig::from_poly(&polys[k - 1])?;
        let keys = config.shard_keys();
        let shards: Vec<Shard> = if keys.is_empty() {
            vec![Shard {
                poly: k,
                config,
                key: None,
            }]
        } else {
            keys.iter()
                .map(|v| Shard {
                    poly: k,
                    config: config.clone().with_prefix(*v),
                    key: Some(v.index()),
                })
                .collect()
        };
        let results: Vec<Vec<StandardSet>> = pool.install(|| {
            shards
                .par_iter()
                .map(|s| s.run(spec, parts.as_deref(), args.resume))
                .collect::<Result<_>>()
        })?;
        let count: usize = results.iter().map(Vec::len).sum();
        println!("poly ({k}) {}: {count}", polys[k - 1]);
        total += count;
        for set in results.iter().flatten() {
            text.push_str(&format_tuple_line(k, set));
            text.push('\n');
        }
    }
    println!("total: {total}");

    if let Some(out) = &args.output {
        write_atomic(out, &text)?;
    }
    if let Some(dir) = &parts {
        fs::remove_dir_all(dir).with_context(|| format!("removing {}", dir.display()))?;
    }
    Ok(())
}
