use std::fs;

use glitchprop::cli::{self, EXIT_MISSING_ENTRY, EXIT_NOT_TIGHT, EXIT_NO_SOLUTION, EXIT_OK, EXIT_USAGE};
use glitchprop::float_kernel::{self as fk, FloatInterval};
use glitchprop::hexfloat;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let code = cli::run(std::iter::once("glitchprop").chain(args.iter().copied()), &mut o, &mut e);
    (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (c, o, e) = call(args);
    assert_eq!(c, EXIT_OK, "{args:?}: {e}");
    o
}

#[test]
fn survey_reports_the_injected_dip() {
    let o = ok(&["survey", "--fn", "synth:glitch1", "--domain", "[1,2]"]);
    let lines: Vec<&str> = o.lines().collect();
    assert!(lines[0].starts_with("survey synth:glitch1 binary32 [0x1p+0,0x1p+1] isotonic"));
    assert_eq!(lines[1], "forward 0x1.8p+0 0x1.800008p+0 5 3 0x1.7ffffep+0");
    assert_eq!(lines[2], "mirrored 0x1.7ffffap+0 0x1.7ffffep+0 3 3 0x1.7ffff8p+0");
    assert_eq!(lines[4], "synth:glitch1 binary32 1 3 5 0x1.7ffff8p+0 0x1.80000ap+0");
}

#[test]
fn survey_output_is_independent_of_jobs() {
    let base = ["survey", "--fn", "synth:glitch3", "--domain", "[1,2]"];
    let one = ok(&[&base[..], &["--jobs", "1"]].concat());
    for (jobs, chunk) in [("8", "65536"), ("3", "1000")] {
        assert_eq!(ok(&[&base[..], &["--jobs", jobs, "--chunk", chunk]].concat()), one);
    }
    assert_eq!(ok(&[&base[..], &["--jobs", "1"]].concat()), one);
}

#[test]
fn refine_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("g.db");
    let dbs = db.to_str().unwrap();
    ok(&["survey", "--fn", "synth:glitch1", "--domain", "[1,2]", "--out", dbs]);
    let refine = |y: &str, extra: &[&str]| {
        let mut a = vec!["refine", "--fn", "synth:glitch1", "--y", y, "--interval", "[1,2]"];
        a.extend_from_slice(extra);
        call(&a)
    };
    let (c, o, _) = refine("0x1.7ffffcp+0", &["--db", dbs]);
    assert_eq!(c, EXIT_OK);
    assert_eq!(o, "lower 0x1.7ffffcp+0 r=4 calls=4\nupper 0x1.80000ap+0 r=8 calls=7\n");
    let (c, o, _) = refine("0x1.7ffffcp+0", &["--db", dbs, "--t", "0", "--s", "0"]);
    assert_eq!(c, EXIT_NOT_TIGHT, "{o}");
    assert!(o.contains("r=2"));
    assert_eq!(refine("3", &["--db", dbs]).0, EXIT_NO_SOLUTION);
    let (c, _, e) = call(&["refine", "--fn", "synth:glitch3", "--y", "1.5", "--interval", "[1,2]", "--db", dbs]);
    assert_eq!(c, EXIT_MISSING_ENTRY, "{e}");
    assert_eq!(refine("1.5", &[]).0, EXIT_USAGE);
    assert_eq!(refine("1.5", &["--db", dbs, "--assume-monotone"]).0, EXIT_USAGE);
    assert_eq!(refine("zz", &["--db", dbs]).0, cli::EXIT_FAILURE);
    assert_eq!(call(&["worst-case", "--format", "binary16"]).0, EXIT_USAGE);
}

#[test]
fn refine_oracle_line_matches_bounds_on_small_intervals() {
    let o = ok(&[
        "refine", "--fn", "synth:glitch1", "--y", "0x1.7ffffcp+0", "--interval", "[0x1.7ffffp+0,0x1.80001p+0]",
        "--assume-monotone", "--oracle",
    ]);
    assert!(o.ends_with("oracle lower 0x1.7ffffcp+0 r=4 upper 0x1.80000ap+0 r=8\n"), "{o}");
}

#[test]
fn trig_split_respects_the_budget() {
    let args = |g: &'static str| {
        ["trig-split", "--fn", "sinf", "--y", "[0.25,0.5]", "--x", "[0,10]", "--assume-monotone", "--g", g]
    };
    let o = ok(&args("8"));
    let lines: Vec<&str> = o.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "sinf 0x0p+0 0x1.921fb4p+0 0x1.02be9cp-2 3 0x1.0c1524p-1 9 1");
    assert!(lines[3].starts_with("sinf 0x1.f6a7a4p+2 0x1.4p+3 "));
    assert_eq!(ok(&args("1")).lines().count(), 1);
    assert_eq!(ok(&args("3")).lines().count(), 3);
    let (c, _, _) = call(&["trig-split", "--fn", "expf", "--y", "[1,2]", "--x", "[0,1]", "--assume-monotone"]);
    assert_eq!(c, EXIT_USAGE);
    let (c, _, _) = call(&["trig-split", "--fn", "sinf", "--y", "[2,3]", "--x", "[0,10]", "--assume-monotone"]);
    assert_eq!(c, EXIT_NO_SOLUTION);
}

#[test]
fn worst_case_binary32_top_line() {
    let o = ok(&["worst-case", "--limit", "2"]);
    let lines: Vec<&str> = o.lines().collect();
    assert_eq!(lines[0], "0x1.4ac55cp+21 0x1.a1ccdff4d8196p-27 1725033 21 -27");
    assert!(lines[1].starts_with("-0x1.4ac55cp+21 "));
}

#[test]
fn worst_case_threshold_one_lists_the_whole_domain() {
    let o = ok(&["worst-case", "--domain", "[100,0x1.9000fp+6]", "--threshold", "1"]);
    let iv = FloatInterval::new(100.0f32, hexfloat::parse("0x1.9000fp+6").unwrap()).unwrap();
    let mut xs: Vec<f32> = o
        .lines()
        .map(|l| hexfloat::parse(l.split(' ').next().unwrap()).unwrap())
        .collect();
    xs.sort_by(|a, b| fk::total_cmp(*a, *b));
    let want: Vec<f32> = iv.iter().collect();
    assert_eq!(xs, want);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [&[&str]; 3] = [
        &["survey", "--fn", "synth:glitch3", "--domain", "[1,1.25]"],
        &["trig-split", "--fn", "cosf", "--y", "[-0.5,0.5]", "--x", "[-20,20]", "--assume-monotone"],
        &["worst-case", "--format", "binary64", "--limit", "3"],
    ];
    for a in cases {
        assert_eq!(ok(a), ok(a));
    }
}

#[test]
fn failed_survey_leaves_no_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("bad.db");
    fs::write(&db, "not a glitch db\n").unwrap();
    let (c, _, _) = call(&["survey", "--fn", "synth:glitch1", "--domain", "[1,2]", "--out", db.to_str().unwrap()]);
    assert_ne!(c, EXIT_OK);
    assert_eq!(fs::read_to_string(&db).unwrap(), "not a glitch db\n");
    let report = dir.path().join("missing").join("r.txt");
    let (c, _, _) = call(&[
        "survey", "--fn", "synth:glitch1", "--domain", "[1,2]", "--report", report.to_str().unwrap(),
    ]);
    assert_ne!(c, EXIT_OK);
    assert!(!report.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn survey_updates_an_existing_database() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("g.db");
    let dbs = db.to_str().unwrap();
    ok(&["survey", "--fn", "synth:glitch1", "--domain", "[1,2]", "--out", dbs]);
    ok(&["survey", "--fn", "synth:glitch3", "--domain", "[1,2]", "--out", dbs]);
    let text = fs::read_to_string(&db).unwrap();
    assert!(text.contains("synth:glitch1 ") && text.contains("synth:glitch3 "), "{text}");
    ok(&["refine", "--fn", "synth:glitch3", "--y", "1.5", "--interval", "[1,2]", "--db", dbs]);
}

#[test]
fn hex_output_parses_back() {
    let o = ok(&["worst-case", "--format", "binary64", "--limit", "5"]);
    for l in o.lines() {
        let mut it = l.split(' ');
        let x: f64 = hexfloat::parse(it.next().unwrap()).unwrap();
        let d: f64 = hexfloat::parse(it.next().unwrap()).unwrap();
        assert_eq!(hexfloat::format(x), l.split(' ').next().unwrap());
        assert!(d.abs() < 2f64.powi(-54));
    }
}
