//! Reference planes of order 81, stage file formats and report tables.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::StandardSet;
use crate::classify::{
    format_inventory, parse_inventory, Fraction, IsoClassRecord, PlaneClassRecord, PlaneClassifier,
    SigmaFlags, SweepMode,
};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;

pub fn reference_spec() -> FieldSpec {
    FieldSpec::new(3, 4).expect("3^4 is a valid field spec")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneStatus {
    Known,
    New,
}

impl fmt::Display for PlaneStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaneStatus::Known => "known",
            PlaneStatus::New => "new",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KnownPlaneFixture {
    pub label: &'static str,
    pub codes: [u64; 3],
    pub expected_aut: u64,
    pub expected_at: u64,
    /// `(count, aut_order)` terms of the principal-isotope inventory.
    pub inventory: &'static [(u64, u64)],
    pub status: PlaneStatus,
}

impl KnownPlaneFixture {
    pub fn standard_set(&self) -> Result<StandardSet> {
        StandardSet::from_codes(reference_spec(), &self.codes)
    }

    pub fn expected_inventory(&self) -> BTreeMap<u64, u64> {
        self.inventory.iter().map(|&(n, aut)| (aut, n)).collect()
    }

    pub fn expected_sa(&self) -> Fraction {
        self.inventory
            .iter()
            .fold(Fraction::ZERO, |acc, &(n, aut)| {
                acc + Fraction::new(n, aut)
            })
    }
}

const fn plane(
    label: &'static str,
    codes: [u64; 3],
    expected_aut: u64,
    expected_at: u64,
    inventory: &'static [(u64, u64)],
    status: PlaneStatus,
) -> KnownPlaneFixture {
    KnownPlaneFixture {
        label,
        codes,
        expected_aut,
        expected_at,
        inventory,
        status,
    }
}

/// One representative semifield for each of the twelve planes of order 81.
pub const FIXTURES: [KnownPlaneFixture; 12] = [
    plane(
        "I",
        [19792, 8866, 186745],
        4,
        25600,
        &[(1, 4)],
        PlaneStatus::Known,
    ),
    plane(
        "II",
        [19792, 30332, 214473],
        1,
        640,
        &[(10, 1)],
        PlaneStatus::Known,
    ),
    plane(
        "III",
        [19818, 9001, 355161],
        4,
        512,
        &[(12, 1), (2, 4)],
        PlaneStatus::Known,
    ),
    plane(
        "IV",
        [19794, 428919, 473210],
        8,
        2048,
        &[(6, 2), (1, 8)],
        PlaneStatus::Known,
    ),
    plane(
        "V",
        [19801, 191026, 186259],
        4,
        1024,
        &[(6, 1), (1, 4)],
        PlaneStatus::Known,
    ),
    plane(
        "VI",
        [19794, 409289, 130416],
        2,
        128,
        &[(42, 1), (16, 2)],
        PlaneStatus::Known,
    ),
    plane(
        "VII",
        [19794, 519711, 29089],
        1,
        64,
        &[(100, 1)],
        PlaneStatus::Known,
    ),
    plane(
        "VIII",
        [19825, 253482, 243782],
        4,
        256,
        &[(24, 1), (1, 2), (2, 4)],
        PlaneStatus::New,
    ),
    plane(
        "IX",
        [19792, 8841, 198942],
        1,
        32,
        &[(200, 1)],
        PlaneStatus::New,
    ),
    plane(
        "X",
        [19792, 8956, 202821],
        1,
        32,
        &[(200, 1)],
        PlaneStatus::New,
    ),
    plane(
        "XI",
        [19792, 8956, 408532],
        1,
        16,
        &[(400, 1)],
        PlaneStatus::New,
    ),
    plane(
        "XII",
        [19792, 8984, 461005],
        1,
        64,
        &[(100, 1)],
        PlaneStatus::New,
    ),
];

/// Commutative isotope of Dickson's semifield, identity code included.
pub const COMMUTATIVE_ISOTOPE: [u64; 4] = [59293, 19818, 12291, 359225];

pub fn fixture(label: &str) -> Option<&'static KnownPlaneFixture> {
    FIXTURES.iter().find(|f| f.label == label)
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

/// `"# p=3 d=4"`, optionally with extra `key=value` pairs.
fn parse_header(line: &str) -> Result<(FieldSpec, BTreeMap<String, String>)> {
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    for token in line.trim_start_matches('#').split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header token {token:?}")))?;
        fields.insert(k.to_string(), v.to_string());
    }
    let get = |k: &str| {
        fields
            .get(k)
            .ok_or_else(|| Error::Parse(format!("header lacks {k}")))
            .and_then(|v| parse_u64(v))
    };
    let spec = FieldSpec::new(get("p")? as u32, get("d")? as usize)?;
    Ok((spec, fields))
}

pub fn tuple_header(spec: FieldSpec) -> String {
    format!("# p={} d={}", spec.p(), spec.d())
}

/// `"poly_index, a2, …, ad"`.
pub fn format_tuple_line(poly_index: usize, set: &StandardSet) -> String {
    let mut line = poly_index.to_string();
    for code in set.codes() {
        write!(line, ", {code}").unwrap();
    }
    line
}

pub fn parse_tuple_line(spec: FieldSpec, line: &str) -> Result<(usize, StandardSet)> {
    let mut fields = line.split(',');
    let poly = parse_u64(fields.next().unwrap_or_default())? as usize;
    let codes: Vec<u64> = fields.map(parse_u64).collect::<Result<_>>()?;
    Ok((poly, StandardSet::from_codes(spec, &codes)?))
}

/// Parses a tuple stream. The spec comes from a `# p= d=` header unless
/// `spec` is given.
pub fn parse_tuple_stream(
    text: &str,
    spec: Option<FieldSpec>,
) -> Result<(FieldSpec, Vec<(usize, StandardSet)>)> {
    let mut spec = spec;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if spec.is_none() {
                spec = Some(parse_header(line)?.0);
            }
            continue;
        }
        let spec = spec.ok_or_else(|| Error::Parse("tuple stream has no p/d header".into()))?;
        let entry = parse_tuple_line(spec, line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        out.push(entry);
    }
    let spec = spec.ok_or_else(|| Error::Parse("tuple stream has no p/d header".into()))?;
    Ok((spec, out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassMode {
    Isomorphism,
    Isotopy,
    S3,
}

impl fmt::Display for ClassMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassMode::Isomorphism => "isomorphism",
            ClassMode::Isotopy => "isotopy",
            ClassMode::S3 => "s3",
        })
    }
}

impl FromStr for ClassMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isomorphism" => Ok(ClassMode::Isomorphism),
            "isotopy" => Ok(ClassMode::Isotopy),
            "s3" => Ok(ClassMode::S3),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// One line of a classification output. Plane-level fields are absent in
/// isomorphism mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class_id: usize,
    pub codes: Vec<u64>,
    pub aut_order: u64,
    pub at_order: Option<u64>,
    pub sa_sum: Option<Fraction>,
    pub inventory: Option<BTreeMap<u64, u64>>,
    pub orbit_size: Option<usize>,
    pub flags: Option<SigmaFlags>,
    pub commutative: bool,
}

impl ClassRow {
    pub fn from_iso(class_id: usize, rec: &IsoClassRecord) -> Self {
        ClassRow {
            class_id,
            codes: rec.key.codes().to_vec(),
            aut_order: rec.aut_order,
            at_order: None,
            sa_sum: None,
            inventory: None,
            orbit_size: None,
            flags: None,
            commutative: rec.commutative,
        }
    }

    pub fn from_plane(class_id: usize, rec: &PlaneClassRecord) -> Self {
        ClassRow {
            class_id,
            codes: rec.representative.codes().to_vec(),
            aut_order: rec.representative_aut,
            at_order: Some(rec.at_order),
            sa_sum: Some(rec.sa_sum),
            inventory: Some(rec.inventory.clone()),
            orbit_size: Some(rec.s3_orbit_size),
            flags: Some(rec.sigma_flags),
            commutative: rec.commutative,
        }
    }

    fn flags_field(&self) -> String {
        let mut tokens = Vec::new();
        if self.commutative {
            tokens.push("comm");
        }
        if let Some(f) = self.flags {
            for (set, name) in [
                (f.self_dual, "(12)"),
                (f.self_transpose, "(13)"),
                (f.iso_23, "(23)"),
            ] {
                if set {
                    tokens.push(name);
                }
            }
        }
        if tokens.is_empty() {
            "-".into()
        } else {
            tokens.join("|")
        }
    }

    /// `"class_id, codes, aut_order, at_order, num/den, inventory, orbit_size, flags"`.
    pub fn to_line(&self) -> String {
        fn opt<T: fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
        }
        let codes: Vec<String> = self.codes.iter().map(u64::to_string).collect();
        format!(
            "{}, {}, {}, {}, {}, {}, {}, {}",
            self.class_id,
            codes.join(" "),
            self.aut_order,
            opt(&self.at_order),
            opt(&self.sa_sum),
            self.inventory
                .as_ref()
                .map_or_else(|| "-".into(), |i| format_inventory(i, "+")),
            opt(&self.orbit_size),
            self.flags_field(),
        )
    }

    pub fn parse_line(line: &str, mode: ClassMode) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 8 {
            return Err(Error::Parse(format!(
                "expected 8 fields, found {}",
                fields.len()
            )));
        }
        fn opt<T>(s: &str, f: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
            if s == "-" {
                Ok(None)
            } else {
                f(s).map(Some)
            }
        }
        let mut commutative = false;
        let mut flags = SigmaFlags::default();
        if fields[7] != "-" {
            for token in fields[7].split('|') {
                match token {
                    "comm" => commutative = true,
                    "(12)" => flags.self_dual = true,
                    "(13)" => flags.self_transpose = true,
                    "(23)" => flags.iso_23 = true,
                    other => return Err(Error::Parse(format!("unknown flag {other:?}"))),
                }
            }
        }
        let orbit_size = opt(fields[6], |s| parse_u64(s).map(|v| v as usize))?;
        Ok(ClassRow {
            class_id: parse_u64(fields[0])? as usize,
            codes: fields[1]
                .split_whitespace()
                .map(parse_u64)
                .collect::<Result<_>>()?,
            aut_order: parse_u64(fields[2])?,
            at_order: opt(fields[3], parse_u64)?,
            sa_sum: opt(fields[4], Fraction::from_str)?,
            inventory: opt(fields[5], parse_inventory)?,
            flags: (mode != ClassMode::Isomorphism).then_some(flags),
            orbit_size,
            commutative,
        })
    }
}

/// A classification stage output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFile {
    pub mode: ClassMode,
    pub spec: FieldSpec,
    pub rows: Vec<ClassRow>,
}

impl ClassFile {
    pub fn from_iso_records(spec: FieldSpec, records: &[IsoClassRecord]) -> Self {
        let rows = records
            .iter()
            .enumerate()
            .map(|(i, r)| ClassRow::from_iso(i + 1, r))
            .collect();
        ClassFile {
            mode: ClassMode::Isomorphism,
            spec,
            rows,
        }
    }

    pub fn from_plane_records(
        spec: FieldSpec,
        mode: ClassMode,
        records: &[PlaneClassRecord],
    ) -> Self {
        let rows = records
            .iter()
            .enumerate()
            .map(|(i, r)| ClassRow::from_plane(i + 1, r))
            .collect();
        ClassFile { mode, spec, rows }
    }

    pub fn commutative_count(&self) -> usize {
        self.rows.iter().filter(|r| r.commutative).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# mode={} p={} d={}\n",
            self.mode,
            self.spec.p(),
            self.spec.d()
        );
        for row in &self.rows {
            out.push_str(&row.to_line());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty class file".into()))?;
        if !header.starts_with('#') {
            return Err(Error::Parse("class file lacks header".into()));
        }
        let (spec, fields) = parse_header(header)?;
        let mode: ClassMode = fields
            .get("mode")
            .ok_or_else(|| Error::Parse("header lacks mode".into()))?
            .parse()?;
        let rows = lines
            .filter(|l| !l.starts_with('#'))
            .map(|l| ClassRow::parse_line(l, mode))
            .collect::<Result<_>>()?;
        Ok(ClassFile { mode, spec, rows })
    }

    pub fn standard_sets(&self) -> Result<Vec<StandardSet>> {
        self.rows
            .iter()
            .map(|r| StandardSet::from_codes(self.spec, &r.codes))
            .collect()
    }
}

/// One row of the per-plane table, computed from the plane's fixture tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub label: String,
    pub status: PlaneStatus,
    pub codes: Vec<u64>,
    /// 1-based index of the matched S3-class.
    pub class_id: usize,
    pub aut_order: u64,
    pub at_order: u64,
    pub sa_sum: Fraction,
    pub inventory: BTreeMap<u64, u64>,
    pub orbit_size: usize,
    pub flags: SigmaFlags,
    pub commutative: bool,
}

/// Matches each fixture to exactly one S3-class of `reps` and computes its
/// row. Fails if a fixture meets no class or two fixtures share one.
pub fn table1(reps: &[StandardSet]) -> Result<Vec<Table1Row>> {
    let spec = reference_spec();
    if reps.iter().any(|s| s.spec() != spec) {
        return Err(Error::FixtureMatch(
            "plane fixtures exist only for p=3, d=4".into(),
        ));
    }
    let mut classifier = PlaneClassifier::new(spec);
    let classes = classifier.sweep(reps, SweepMode::S3)?;
    let mut owner: Vec<Option<&str>> = vec![None; classes.len()];
    let mut rows = Vec::with_capacity(FIXTURES.len());
    for fx in &FIXTURES {
        let set = fx.standard_set()?;
        let id = classifier.isotopy_class(&set)?;
        let hits: Vec<usize> = (0..classes.len())
            .filter(|&i| classes[i].1.contains(&id))
            .collect();
        let &[hit] = hits.as_slice() else {
            return Err(Error::FixtureMatch(format!(
                "plane {} meets {} classes",
                fx.label,
                hits.len()
            )));
        };
        if let Some(other) = owner[hit].replace(fx.label) {
            return Err(Error::FixtureMatch(format!(
                "planes {other} and {} share class {}",
                fx.label,
                hit + 1
            )));
        }
        let rec = classifier.plane_record(&set)?;
        rows.push(Table1Row {
            label: fx.label.to_string(),
            status: fx.status,
            codes: fx.codes.to_vec(),
            class_id: hit + 1,
            aut_order: rec.representative_aut,
            at_order: rec.at_order,
            sa_sum: rec.sa_sum,
            inventory: rec.inventory,
            orbit_size: rec.s3_orbit_size,
            flags: rec.sigma_flags,
            commutative: rec.commutative,
        });
    }
    Ok(rows)
}

pub fn format_table1(rows: &[Table1Row]) -> String {
    let mut out = format!(
        "{:<6} {:<6} {:>5} {:<19} {:>5} {:>11}  {:<16} {}\n",
        "plane", "status", "orbit", "flags", "|Aut|", "order of At", "S/A sum", "tuple"
    );
    for r in rows {
        let flags = ClassRow {
            class_id: r.class_id,
            codes: Vec::new(),
            aut_order: r.aut_order,
            at_order: None,
            sa_sum: None,
            inventory: None,
            orbit_size: None,
            flags: Some(r.flags),
            commutative: r.commutative,
        }
        .flags_field();
        let codes: Vec<String> = r.codes.iter().map(u64::to_string).collect();
        writeln!(
            out,
            "{:<6} {:<6} {:>5} {:<19} {:>5} {:>11}  {:<16} ({})",
            r.label,
            r.status,
            r.orbit_size,
            flags,
            r.aut_order,
            r.at_order,
            format_inventory(&r.inventory, " + "),
            codes.join(", ")
        )
        .unwrap();
    }
    out
}

/// Class counts of one stage, with commutative classes in parentheses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2Row {
    pub mode: ClassMode,
    pub classes: usize,
    pub commutative: usize,
}

impl Table2Row {
    pub fn from_file(file: &ClassFile) -> Self {
        Table2Row {
            mode: file.mode,
            classes: file.rows.len(),
            commutative: file.commutative_count(),
        }
    }
}

pub fn format_table2(rows: &[Table2Row]) -> String {
    let mut out = String::new();
    for mode in [ClassMode::Isomorphism, ClassMode::Isotopy, ClassMode::S3] {
        if let Some(r) = rows.iter().find(|r| r.mode == mode) {
            writeln!(
                out,
                "{:<12} {} ({})",
                mode.to_string(),
                r.classes,
                r.commutative
            )
            .unwrap();
        }
    }
    out
}
