//! Both sides of the integral inequalities evaluated on concrete cases.

mod bounds;
mod case;
mod lemma;
mod restrict;
mod theorems;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bounds::ModulusProfile;
pub use case::{CaseSpec, Corpus, Geometry, Source, Sweep, SweepFn, VerificationCase};
pub use lemma::{lemma2_check, substitution_map, MonotoneCheck};
pub use restrict::{restrict_to_ball, Restricted};
pub use theorems::{
    verify_case, verify_cor_curve, verify_cor_leb, verify_cor_surf, verify_diskball, verify_t1,
    verify_t2, verify_t3_substitution, verify_t5,
};

use crate::error::Error;

/// Relative pass tolerance.
pub const DEFAULT_TOL: f64 = 1e-3;
/// Absolute slack added to the right-hand side.
pub const ABS_SLACK: f64 = 1e-9;
/// Dyadic resolution for contents inside the harness.
pub const DEFAULT_RESOLUTION: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    T1,
    T2C,
    T2D,
    T3i,
    T3ii,
    T5C,
    T5D,
    #[serde(rename = "COR-LEB")]
    CorLeb,
    #[serde(rename = "COR-LEB-SWEEP")]
    CorLebSweep,
    #[serde(rename = "COR-CURVE")]
    CorCurve,
    #[serde(rename = "COR-CURVE-SWEEP")]
    CorCurveSweep,
    #[serde(rename = "COR-SURF")]
    CorSurf,
    #[serde(rename = "COR-DISKBALL")]
    CorDiskBall,
}

impl TheoremId {
    pub const ALL: [TheoremId; 13] = [
        TheoremId::T1,
        TheoremId::T2C,
        TheoremId::T2D,
        TheoremId::T3i,
        TheoremId::T3ii,
        TheoremId::T5C,
        TheoremId::T5D,
        TheoremId::CorLeb,
        TheoremId::CorLebSweep,
        TheoremId::CorCurve,
        TheoremId::CorCurveSweep,
        TheoremId::CorSurf,
        TheoremId::CorDiskBall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T2C => "T2C",
            TheoremId::T2D => "T2D",
            TheoremId::T3i => "T3i",
            TheoremId::T3ii => "T3ii",
            TheoremId::T5C => "T5C",
            TheoremId::T5D => "T5D",
            TheoremId::CorLeb => "COR-LEB",
            TheoremId::CorLebSweep => "COR-LEB-SWEEP",
            TheoremId::CorCurve => "COR-CURVE",
            TheoremId::CorCurveSweep => "COR-CURVE-SWEEP",
            TheoremId::CorSurf => "COR-SURF",
            TheoremId::CorDiskBall => "COR-DISKBALL",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Floats that may be infinite, written as numbers or as `"inf"` / `"-inf"`.
pub(crate) mod xf64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("bad number {t:?}"))),
            },
        }
    }

    pub mod map {
        use std::collections::BTreeMap;

        use serde::ser::SerializeMap;
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(serde::Serialize, Deserialize)]
        struct W(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            let mut out = s.serialize_map(Some(m.len()))?;
            for (k, v) in m {
                out.serialize_entry(k, &W(*v))?;
            }
            out.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            let m = BTreeMap::<String, W>::deserialize(d)?;
            Ok(m.into_iter().map(|(k, w)| (k, w.0)).collect())
        }
    }
}

/// One multiplicative factor of a right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    #[serde(with = "xf64")]
    pub value: f64,
}

impl Factor {
    pub fn new(name: &str, value: f64) -> Self {
        Factor {
            name: name.to_string(),
            value,
        }
    }
}

/// Product of the factors, with `0 · ∞ = 0`.
pub fn factor_product(factors: &[Factor]) -> f64 {
    if factors.iter().any(|f| f.value == 0.0) {
        return 0.0;
    }
    factors.iter().fold(1.0, |acc, f| acc * f.value)
}

/// The pass rule `lhs + err ≤ rhs (1 + tol) + 1e-9`.
pub fn passes(lhs: f64, lhs_err: f64, rhs: f64, tol: f64) -> bool {
    lhs + lhs_err <= rhs * (1.0 + tol) + ABS_SLACK
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub label: String,
    pub theorem: TheoremId,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(with = "xf64")]
    pub lhs: f64,
    #[serde(with = "xf64")]
    pub lhs_err: f64,
    #[serde(with = "xf64")]
    pub rhs: f64,
    pub factors: Vec<Factor>,
    #[serde(with = "xf64")]
    pub ratio: f64,
    pub ok: bool,
    pub tolerance: f64,
    pub caveats: Vec<String>,
    /// Auxiliary quantities (inputs of the factors, side checks).
    #[serde(with = "xf64::map")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms: Option<f64>,
}

impl VerificationRecord {
    /// Recomputes the right-hand side from the logged factors.
    pub fn rhs_from_factors(&self) -> f64 {
        factor_product(&self.factors)
    }
}

/// A case that could not be evaluated, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub label: String,
    pub theorem: Option<TheoremId>,
    pub reason: String,
    /// The case could not be read, as opposed to failing a hypothesis.
    #[serde(default)]
    pub parse_error: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CaseOutcome {
    Records(Vec<VerificationRecord>),
    Rejected(Rejection),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub records: usize,
    pub ok: usize,
    pub violations: usize,
    pub rejected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tolerance: f64,
    pub seed: u64,
    pub records: Vec<VerificationRecord>,
    pub rejected: Vec<Rejection>,
    pub summary: Summary,
}

impl Report {
    pub fn has_violation(&self) -> bool {
        self.summary.violations > 0
    }

    pub fn has_parse_error(&self) -> bool {
        self.rejected.iter().any(|r| r.parse_error)
    }
}

/// Harness settings shared by all cases.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub tolerance: f64,
    pub resolution: u32,
    pub seed: u64,
    pub timing: bool,
    /// Extra factor multiplied into every right-hand side; only for checking
    /// that the harness reports violations.
    pub corrupt: Option<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tolerance: DEFAULT_TOL,
            resolution: DEFAULT_RESOLUTION,
            seed: crate::dsubh::MC_SEED,
            timing: false,
            corrupt: None,
        }
    }
}

/// Resolves and evaluates one corpus entry.
pub fn run_case(spec: &CaseSpec, base: &Path, settings: &Settings) -> CaseOutcome {
    let start = Instant::now();
    let reject = |e: Error| {
        CaseOutcome::Rejected(Rejection {
            label: spec.label.clone(),
            theorem: Some(spec.theorem),
            parse_error: matches!(e, Error::Parse(_)),
            reason: e.to_string(),
        })
    };
    let case = match spec.resolve(base) {
        Ok(c) => c,
        Err(e) => return reject(e),
    };
    match verify_case(&case, settings) {
        Ok(mut recs) => {
            if let Some(c) = settings.corrupt {
                for r in &mut recs {
                    corrupt_record(r, c);
                }
            }
            if settings.timing {
                let ms = start.elapsed().as_secs_f64() * 1e3 / recs.len().max(1) as f64;
                for r in &mut recs {
                    r.ms = Some(ms);
                }
            }
            CaseOutcome::Records(recs)
        }
        Err(e) => reject(e),
    }
}

fn corrupt_record(r: &mut VerificationRecord, c: f64) {
    r.factors.push(Factor::new("corruption", c));
    r.rhs = r.rhs_from_factors();
    r.ratio = if r.rhs > 0.0 { r.lhs / r.rhs } else { r.ratio };
    let side_ok = !r.caveats.iter().any(|c| c.starts_with("assertion-failed"));
    r.ok = r.lhs.is_finite() && side_ok && passes(r.lhs, r.lhs_err, r.rhs, r.tolerance);
}

/// Evaluates every case; the report follows corpus order.
pub fn run_corpus(corpus: &Corpus, base: &Path, settings: &Settings) -> Report {
    let outcomes: Vec<CaseOutcome> = corpus
        .cases
        .par_iter()
        .map(|c| run_case(c, base, settings))
        .collect();
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for o in outcomes {
        match o {
            CaseOutcome::Records(r) => records.extend(r),
            CaseOutcome::Rejected(r) => rejected.push(r),
        }
    }
    let ok = records.iter().filter(|r| r.ok).count();
    let summary = Summary {
        cases: corpus.cases.len(),
        records: records.len(),
        ok,
        violations: records.len() - ok,
        rejected: rejected.len(),
    };
    Report {
        tolerance: settings.tolerance,
        seed: settings.seed,
        records,
        rejected,
        summary,
    }
}
