use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use subharm::verify::Report;

fn subharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subharm"))
        .args(args)
        .output()
        .expect("run subharm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_CORPUS: &str = r#"{"cases": [
  {"label": "seg", "theorem": "COR-CURVE",
   "function": {"form": "rational", "zeros": [[2, 0]]},
   "measure": {"kind": "polyline_length", "vertices": [[0, 0], [1, 0]]},
   "r": 1, "R": 3},
  {"label": "disk", "theorem": "COR-DISKBALL",
   "function": {"form": "rational", "zeros": [[0, 0], [0.2, 0.35]], "poles": [[-0.45, -0.3]]},
   "measure": {"kind": "polyline_length", "vertices": [[-0.5, 0], [0.5, 0]]},
   "sweep": {"radii": [0.5, 0.7, 0.9], "s": {"kind": "unit_gap", "factor": 0.5}}}
]}"#;

#[test]
fn modulus_rows() {
    let dir = tempfile::tempdir().unwrap();
    let atoms = write(
        dir.path(),
        "atoms.json",
        r#"{"kind": "atomic", "atoms": [{"at": [0, 0], "mass": 0.5}, {"at": [0.5, 0], "mass": 0.5}]}"#,
    );
    let o = subharm(&["modulus", &atoms, "0.9"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "t,lower,upper,mode\n0.9,1,1,exact\n");

    let seg = write(dir.path(), "seg.json", r#"{"kind": "polyline_length", "vertices": [[0, 0], [1, 0]]}"#);
    assert_eq!(stdout(&subharm(&["modulus", &seg, "0.25"])), "t,lower,upper,mode\n0.25,0.5,0.5,exact\n");
    assert_eq!(stdout(&subharm(&["modulus", &seg])), "t,lower,upper,mode\n");
}

#[test]
fn modulus_writes_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "seg.json", r#"{"kind": "polyline_length", "vertices": [[0, 0], [1, 0]]}"#);
    let out = dir.path().join("out");
    let o = subharm(&["--out", out.to_str().unwrap(), "modulus", &seg, "0.1", "2"]);
    assert!(o.status.success());
    let text = fs::read_to_string(out.join("modulus.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn bad_measure_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind": "polyline_length",
        "vertices": oops}"#);
    let o = subharm(&["modulus", &bad, "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn content_examples() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "seg.json", r#"{"shape": "segment", "a": [0, 0], "b": [1, 0]}"#);
    let o = subharm(&["content", &seg, "--p", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let upper = v["upper"].as_f64().unwrap();
    assert!((upper - 1.0).abs() < 0.01, "{upper}");
    assert!(v["lower"].as_f64().unwrap() <= upper);

    let pt = write(dir.path(), "pt.json", r#"{"shape": "point", "at": [0, 0]}"#);
    let v: serde_json::Value = serde_json::from_slice(&subharm(&["content", &pt, "--p", "1"]).stdout).unwrap();
    assert_eq!(v["upper"].as_f64(), Some(0.0));
}

#[test]
fn content_with_bad_gauge() {
    let dir = tempfile::tempdir().unwrap();
    let seg = write(dir.path(), "seg.json", r#"{"shape": "segment", "a": [0, 0], "b": [1, 0]}"#);
    let g = write(dir.path(), "g.json", r#"{"kind": "power", "b": -1, "p": 1}"#);
    let o = subharm(&["content", &seg, "--gauge", &g]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    // exactly one of --gauge and --p
    assert_eq!(subharm(&["content", &seg]).status.code(), Some(2));
}

#[test]
fn verify_writes_reports_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "corpus.json", SMALL_CORPUS);
    let out = dir.path().join("out");
    let o = subharm(&["--out", out.to_str().unwrap(), "--seed", "7", "verify", &corpus]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let report: Report = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.seed, 7);
    assert_eq!(report.records.len(), 4);

    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# seed=7 tol=0.001"));
    assert_eq!(lines.next(), Some("label,theorem,lhs,lhs_err,rhs,ratio,ok,caveats,ms"));
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    for (row, rec) in rd.records().zip(&report.records) {
        let row = row.unwrap();
        assert_eq!(&row[0], rec.label);
        // every number parses back to the value in memory
        assert_eq!(row[2].parse::<f64>().unwrap(), rec.lhs);
        assert_eq!(row[3].parse::<f64>().unwrap(), rec.lhs_err);
        assert_eq!(row[4].parse::<f64>().unwrap(), rec.rhs);
        assert_eq!(row[5].parse::<f64>().unwrap(), rec.ratio);
        assert_eq!(&row[8], "");
    }

    let svg = fs::read_to_string(out.join("disk.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(!out.join("seg.svg").exists());

    let again = dir.path().join("again");
    subharm(&["--out", again.to_str().unwrap(), "--seed", "7", "verify", &corpus]);
    for f in ["report.json", "report.csv", "disk.svg"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn verify_timing_column() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "corpus.json", SMALL_CORPUS);
    let out = dir.path().join("out");
    subharm(&["--out", out.to_str().unwrap(), "--timing", "--jobs", "1", "verify", &corpus]);
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    let row = csv.lines().nth(2).unwrap();
    assert!(row.rsplit(',').next().unwrap().parse::<f64>().is_ok(), "{row}");
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let empty = write(dir.path(), "empty.json", r#"{"cases": []}"#);
    let o = subharm(&["--out", out, "verify", &empty]);
    assert_eq!(o.status.code(), Some(0));
    let report: Report = serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap();
    assert!(report.records.is_empty());

    let dini = write(
        dir.path(),
        "dini.json",
        r#"{"cases": [{"label": "atom", "theorem": "T1",
            "function": {"form": "rational", "zeros": [[0, 0]]},
            "measure": {"kind": "atomic", "atoms": [{"at": [0.5, 0], "mass": 1}]},
            "r": 1, "R": 2}]}"#,
    );
    let o = subharm(&["--out", out, "verify", &dini]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 rejected"));

    let corpus = write(dir.path(), "corpus.json", SMALL_CORPUS);
    let o = subharm(&["--out", out, "verify", &corpus, "--corrupt", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("VIOLATION seg"));

    let o = subharm(&["--out", out, "verify", "/no/such/corpus.json"]);
    assert_eq!(o.status.code(), Some(2));

    let missing = write(
        dir.path(),
        "missing.json",
        r#"{"cases": [{"label": "x", "theorem": "T1", "function": {"file": "nope.json"},
            "measure": {"file": "nope.json"}, "r": 1, "R": 2}]}"#,
    );
    let o = subharm(&["--out", out, "verify", &missing]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("nope.json"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(subharm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(subharm(&["verify"]).status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let o = subharm(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
