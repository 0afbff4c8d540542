use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use semifield_core::census::{format_tuple_line, tuple_header, FIXTURES};
use semifield_core::search::search_all;
use semifield_core::{FieldSpec, StandardSet};

fn semifield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semifield"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = semifield(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_fixture_stream(dir: &Path, take: usize) -> std::path::PathBuf {
    let file = dir.join("planes.txt");
    let mut text = tuple_header(FieldSpec::new(3, 4).unwrap()) + "\n";
    for fx in FIXTURES.iter().take(take) {
        text += &format_tuple_line(0, &fx.standard_set().unwrap());
        text.push('\n');
    }
    fs::write(&file, text).unwrap();
    file
}

#[test]
fn search_single_polynomial() {
    let out = ok(&["search", "--p", "3", "--d", "4", "--poly", "1"]);
    assert!(out.contains("poly (1) x^4 + x + 2: 6811"), "{out}");
    assert!(out.contains("total: 6811"));
}

#[test]
fn search_rejects_bad_arguments() {
    assert!(!semifield(&["search", "--p", "4", "--d", "2"])
        .status
        .success());
    assert!(
        !semifield(&["search", "--p", "3", "--d", "4", "--poly", "9"])
            .status
            .success()
    );
}

#[test]
fn small_search_writes_library_stream() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("t.txt");
    let stdout = ok(&[
        "search",
        "--p",
        "3",
        "--d",
        "3",
        "--shards",
        "2",
        "--output",
        path(&out_file),
    ]);
    let spec = FieldSpec::new(3, 3).unwrap();
    let expected: Vec<String> = search_all(spec)
        .map(|(k, s)| format_tuple_line(k, &s))
        .collect();
    let text = fs::read_to_string(&out_file).unwrap();
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines, expected);
    assert!(stdout.contains(&format!("total: {}", expected.len())));
    assert!(!dir.path().join("t.txt.parts").exists());

    let d2 = ok(&["search", "--p", "3", "--d", "2"]);
    assert!(d2.contains("total: 2"), "{d2}");
}

#[test]
fn resumed_search_reuses_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.txt");
    ok(&["search", "--p", "3", "--d", "3", "--output", path(&full)]);
    let full_text = fs::read_to_string(&full).unwrap();

    // Rebuild the checkpoints of polynomial 1 as an interrupted run would
    // have left them.
    let spec = FieldSpec::new(3, 3).unwrap();
    let mut shards: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    for line in full_text.lines().skip(1).filter(|l| l.starts_with("1,")) {
        let codes: Vec<u64> = line
            .split(',')
            .skip(1)
            .map(|c| c.trim().parse().unwrap())
            .collect();
        let set = StandardSet::from_codes(spec, &codes).unwrap();
        shards
            .entry(set.matrices()[2].column(1).index())
            .or_default()
            .push(line.to_string());
    }
    let resumed = dir.path().join("resumed.txt");
    let parts = dir.path().join("resumed.txt.parts");
    fs::create_dir(&parts).unwrap();
    let write_shard = |key: u64, lines: &[String]| {
        let text = format!("{} poly=1\n{}\n", tuple_header(spec), lines.join("\n"));
        fs::write(parts.join(format!("poly1-a3c2-{key}.txt")), text).unwrap();
    };
    let (&first, first_lines) = shards.iter().next().unwrap();
    write_shard(first, first_lines);
    ok(&[
        "search",
        "--p",
        "3",
        "--d",
        "3",
        "--output",
        path(&resumed),
        "--resume",
    ]);
    assert_eq!(fs::read_to_string(&resumed).unwrap(), full_text);
    assert!(!parts.exists());

    // A checkpoint really is read back rather than recomputed.
    fs::create_dir(&parts).unwrap();
    write_shard(first, &first_lines[1..]);
    ok(&[
        "search",
        "--p",
        "3",
        "--d",
        "3",
        "--output",
        path(&resumed),
        "--resume",
    ]);
    let text = fs::read_to_string(&resumed).unwrap();
    assert_eq!(text.lines().count() + 1, full_text.lines().count());
    assert!(!text.contains(&format!("{}\n", first_lines[0])));
}

#[test]
fn classify_and_report_reference_planes() {
    let dir = tempfile::tempdir().unwrap();
    let stream = write_fixture_stream(dir.path(), 12);
    let iso = dir.path().join("iso.txt");
    let s3 = dir.path().join("s3.txt");
    assert_eq!(
        ok(&[
            "classify",
            "--input",
            path(&stream),
            "--mode",
            "isomorphism",
            "--output",
            path(&iso)
        ]),
        "12 (2 commutative)\n"
    );
    assert_eq!(
        ok(&[
            "classify",
            "--input",
            path(&iso),
            "--mode",
            "s3",
            "--output",
            path(&s3)
        ]),
        "12 (2 commutative)\n"
    );
    let s3_text = fs::read_to_string(&s3).unwrap();
    assert!(s3_text.starts_with("# mode=s3 p=3 d=4\n"));
    assert_eq!(
        fs::read_to_string(dir.path().join("s3.txt.jsonl"))
            .unwrap()
            .lines()
            .count(),
        12
    );

    // Same input, same bytes.
    let again = dir.path().join("again.txt");
    ok(&[
        "classify",
        "--input",
        path(&iso),
        "--mode",
        "s3",
        "--output",
        path(&again),
    ]);
    assert_eq!(fs::read_to_string(&again).unwrap(), s3_text);

    let table1 = ok(&["report", "--input", path(&s3), "--format", "table1"]);
    let row = |label: &str| {
        table1
            .lines()
            .find(|l| l.split_whitespace().next() == Some(label))
            .unwrap()
            .to_string()
    };
    assert!(
        row("IX").contains(" 32 ") && row("IX").contains("200/1"),
        "{table1}"
    );
    assert!(
        row("VI").contains(" 128 ") && row("VI").contains("42/1 + 16/2"),
        "{table1}"
    );
    assert!(row("XII").contains(" new "));

    let table2 = ok(&[
        "report",
        "--input",
        path(&iso),
        path(&s3),
        "--format",
        "table2",
    ]);
    assert_eq!(table2, "isomorphism  12 (2)\ns3           12 (2)\n");
}

#[test]
fn table1_needs_every_plane() {
    let dir = tempfile::tempdir().unwrap();
    let stream = write_fixture_stream(dir.path(), 11);
    let s3 = dir.path().join("s3.txt");
    ok(&[
        "classify",
        "--input",
        path(&stream),
        "--mode",
        "s3",
        "--output",
        path(&s3),
    ]);
    let out = semifield(&["report", "--input", path(&s3), "--format", "table1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("plane XII"));
}

#[test]
fn classify_rejects_malformed_records() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "# p=3 d=4\n1, 19792, 8866, 1\n").unwrap();
    assert!(
        !semifield(&["classify", "--input", path(&bad), "--mode", "isomorphism"])
            .status
            .success()
    );
}

#[test]
fn inspect_reference_planes() {
    let plane_i = ok(&["inspect", "19792", "8866", "186745"]);
    assert!(
        plane_i.contains("commutative, associative, |Aut| = 4"),
        "{plane_i}"
    );
    let dickson = ok(&["inspect", "19818", "9001", "355161"]);
    assert!(
        dickson.contains("commutative, not associative, |Aut| = 4"),
        "{dickson}"
    );
    let explicit = ok(&["inspect", "59293", "19792", "8866", "186745"]);
    assert_eq!(explicit, plane_i);
    let with_at = ok(&["inspect", "19792", "8956", "408532", "--at"]);
    assert!(with_at.contains("order of At 16"), "{with_at}");
    assert!(!semifield(&["inspect", "19792", "8866", "1"])
        .status
        .success());
}
