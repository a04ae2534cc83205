use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use subharm::hausdorff::{content, CompactSet};
use subharm::measures::{modulus_profile, MeasureRep, MeasureSpec, ModulusMode};
use subharm::verify::{run_corpus, Corpus, Report, Settings, VerificationRecord, DEFAULT_TOL};
use subharm::{c_p, constant_a, Dimension, Gauge};

/// Estimators and the verification harness for integral inequalities of
/// δ-subharmonic functions.
#[derive(Parser, Debug)]
#[command(name = "subharm", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Dyadic resolution of the content rasters.
    #[arg(long, global = true)]
    resolution: Option<u32>,
    /// Relative tolerance of the pass rule.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed recorded in the reports.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Add per-record wall time (makes reports run dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Modulus of continuity of a measure at the given radii, as CSV.
    Modulus {
        measure: PathBuf,
        t: Vec<f64>,
    },
    /// Upper and lower bounds for the h-content of a planar set, as JSON.
    Content {
        set: PathBuf,
        #[arg(long, conflicts_with = "p", required_unless_present = "p")]
        gauge: Option<PathBuf>,
        /// Use the normalized power gauge c_p x^p.
        #[arg(long)]
        p: Option<f64>,
        /// Cover radius; unbounded when omitted.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Run a corpus and write report.json, report.csv and sweep plots.
    Verify {
        corpus: PathBuf,
        /// Multiply every right-hand side by this factor (harness self-check).
        #[arg(long)]
        corrupt: Option<f64>,
    },
    /// Check the constants and that a corrupted run is caught.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Modulus { measure, t } => cmd_modulus(g, measure, t),
        Cmd::Content { set, gauge, p, t } => cmd_content(g, set, gauge.as_deref(), *p, *t),
        Cmd::Verify { corpus, corrupt } => cmd_verify(g, corpus, *corrupt),
        Cmd::Selftest => cmd_selftest(g),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn settings(g: &Global) -> Settings {
    let mut s = Settings {
        tolerance: g.tol,
        timing: g.timing,
        ..Settings::default()
    };
    if let Some(k) = g.resolution {
        s.resolution = k;
    }
    if let Some(seed) = g.seed {
        s.seed = seed;
    }
    s
}

/// Writes to `--out` when given, and to stdout otherwise.
fn emit(g: &Global, name: &str, text: &str) -> Result<()> {
    match &g.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_modulus(g: &Global, measure: &Path, ts: &[f64]) -> Result<u8> {
    let spec: MeasureSpec = read_json(measure)?;
    let mu = MeasureRep::try_from(spec)?;
    if let Some(t) = ts.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        bail!("radius must be finite and non-negative, got {t}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "lower", "upper", "mode"])?;
    for b in modulus_profile(&mu, ts) {
        let mode = match b.mode {
            ModulusMode::Exact => "exact",
            ModulusMode::Certified => "certified",
        };
        w.write_record([b.t.to_string(), b.lower.to_string(), b.upper.to_string(), mode.into()])?;
    }
    let text = String::from_utf8(w.into_inner()?)?;
    emit(g, "modulus.csv", &text)?;
    Ok(0)
}

fn cmd_content(g: &Global, set: &Path, gauge: Option<&Path>, p: Option<f64>, t: Option<f64>) -> Result<u8> {
    let set: CompactSet = read_json(set)?;
    set.validate()?;
    let h = match (gauge, p) {
        (Some(path), _) => read_json::<Gauge>(path)?,
        (None, Some(p)) => Gauge::hausdorff(p)?,
        (None, None) => bail!("give --gauge or --p"),
    };
    h.validate()?;
    let k = g.resolution.unwrap_or(subharm::hausdorff::DEFAULT_RESOLUTION);
    let est = content(&set, &h, t.unwrap_or(f64::INFINITY), k)?;
    let mut text = serde_json::to_string_pretty(&est)?;
    text.push('\n');
    emit(g, "content.json", &text)?;
    Ok(0)
}

fn cmd_verify(g: &Global, path: &Path, corrupt: Option<f64>) -> Result<u8> {
    let (corpus, base) = Corpus::from_file(path)?;
    let mut s = settings(g);
    s.corrupt = corrupt;
    let report = run_corpus(&corpus, &base, &s);
    let out = g.out.clone().unwrap_or_else(|| PathBuf::from("subharm-out"));
    write_report(&report, &out)?;
    let sm = &report.summary;
    println!(
        "{} cases, {} records: {} ok, {} violated, {} rejected; reports in {}",
        sm.cases,
        sm.records,
        sm.ok,
        sm.violations,
        sm.rejected,
        out.display()
    );
    for r in report.records.iter().filter(|r| !r.ok) {
        println!("VIOLATION {} [{}] lhs={} rhs={}", r.label, r.theorem, r.lhs, r.rhs);
    }
    for r in &report.rejected {
        println!("REJECTED {}: {}", r.label, r.reason);
    }
    Ok(if report.has_parse_error() {
        2
    } else if report.has_violation() {
        1
    } else {
        0
    })
}

fn write_report(report: &Report, out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(out.join("report.json"), json)?;
    fs::write(out.join("report.csv"), report_csv(report)?)?;
    for (label, recs) in sweeps(&report.records) {
        fs::write(out.join(format!("{}.svg", file_stem(label))), sweep_svg(label, &recs))?;
    }
    Ok(())
}

fn report_csv(report: &Report) -> Result<String> {
    let mut head = format!("# seed={} tol={}\n", report.seed, report.tolerance);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "theorem", "lhs", "lhs_err", "rhs", "ratio", "ok", "caveats", "ms"])?;
    for r in &report.records {
        w.write_record([
            r.label.clone(),
            r.theorem.to_string(),
            r.lhs.to_string(),
            r.lhs_err.to_string(),
            r.rhs.to_string(),
            r.ratio.to_string(),
            r.ok.to_string(),
            r.caveats.join(";"),
            r.ms.map(|m| m.to_string()).unwrap_or_default(),
        ])?;
    }
    head.push_str(&String::from_utf8(w.into_inner()?)?);
    Ok(head)
}

/// Sweep records grouped by case, keyed by the label before `@r=`.
fn sweeps(records: &[VerificationRecord]) -> BTreeMap<&str, Vec<&VerificationRecord>> {
    let mut m: BTreeMap<&str, Vec<&VerificationRecord>> = BTreeMap::new();
    for r in records {
        if let Some((case, _)) = r.label.split_once("@r=") {
            m.entry(case).or_default().push(r);
        }
    }
    m
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn sweep_svg(label: &str, recs: &[&VerificationRecord]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 60.0;
    let usable = |x: f64| x > 0.0 && x.is_finite();
    let pts = |f: fn(&VerificationRecord) -> f64| -> Vec<(f64, f64)> {
        recs.iter()
            .filter(|r| usable(r.r) && usable(f(r)))
            .map(|r| (r.r.log10(), f(r).log10()))
            .collect()
    };
    let lhs = pts(|r| r.lhs);
    let rhs = pts(|r| r.rhs);
    let all: Vec<_> = lhs.iter().chain(&rhs).collect();
    let span = |v: Vec<f64>| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(all.iter().map(|p| p.0).collect());
    let (y0, y1) = span(all.iter().map(|p| p.1).collect());
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(label));
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let tick = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{:.3e}</text>"#,
            10f64.powf(v)
        );
    };
    tick(&mut s, sx(x0), H - PAD + 16.0, "middle", x0);
    tick(&mut s, sx(x1), H - PAD + 16.0, "middle", x1);
    tick(&mut s, PAD - 4.0, sy(y0), "end", y0);
    tick(&mut s, PAD - 4.0, sy(y1), "end", y1);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">r (log)</text>"#, W / 2.0, H - 16.0);
    for (series, color, name, y) in [(&lhs, "#1f77b4", "lhs", 44.0), (&rhs, "#d62728", "rhs", 60.0)] {
        if !series.is_empty() {
            let d: Vec<String> = series
                .iter()
                .enumerate()
                .map(|(i, p)| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, sx(p.0), sy(p.1)))
                .collect();
            let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, d.join(" "));
            for p in series.iter() {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(p.0), sy(p.1));
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="12" fill="{color}">{name}</text>"#,
            W - PAD - 30.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const SELFTEST_CORPUS: &str = r#"{"cases": [
  {"label": "segment", "theorem": "COR-CURVE",
   "function": {"form": "rational", "zeros": [[2, 0]]},
   "measure": {"kind": "polyline_length", "vertices": [[0, 0], [1, 0]]},
   "r": 1, "R": 3},
  {"label": "square", "theorem": "COR-LEB",
   "function": {"form": "rational", "zeros": [[0, 0]]},
   "measure": {"kind": "grid_lebesgue", "cell": 0.125,
               "region": {"shape": "box", "lo": [0, 0], "hi": [1, 1]}},
   "r": 1.5, "R": 3}
]}"#;

fn cmd_selftest(g: &Global) -> Result<u8> {
    let mut failed = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    };
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    check("c_1 = 2", close(c_p(1.0)?, 2.0));
    check("c_2 = pi", close(c_p(2.0)?, std::f64::consts::PI));
    check("c_3 = 4pi/3", close(c_p(3.0)?, 4.0 * std::f64::consts::PI / 3.0));
    check("A_2(1, 2) = 15", close(constant_a(Dimension::new(2)?, 1.0, 2.0)?, 15.0));
    check("A_3(1, 3) = 40", close(constant_a(Dimension::new(3)?, 1.0, 3.0)?, 40.0));

    let corpus = Corpus::from_str(SELFTEST_CORPUS)?;
    let s = settings(g);
    let clean = run_corpus(&corpus, Path::new("."), &s);
    check(
        "reference cases hold",
        clean.summary.rejected == 0 && clean.summary.records > 0 && !clean.has_violation(),
    );
    let bad = run_corpus(&corpus, Path::new("."), &Settings { corrupt: Some(1e-6), ..s });
    check("corrupted constant is reported", bad.summary.violations == bad.summary.records);
    Ok(if failed == 0 { 0 } else { 1 })
}
