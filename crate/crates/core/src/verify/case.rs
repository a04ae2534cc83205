//! Corpus file schema and resolution of file references.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dsubh::{DeltaSubharmonic, FunctionSpec};
use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::hausdorff::CompactSet;
use crate::measures::{MeasureRep, MeasureSpec};

use super::TheoremId;

/// Either an inline object or a path (relative to the corpus file) holding it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    File { file: PathBuf },
    Inline(T),
}

impl<T: DeserializeOwned + Clone> Source<T> {
    pub fn load(&self, base: &Path) -> Result<T> {
        match self {
            Source::Inline(v) => Ok(v.clone()),
            Source::File { file } => {
                let path = base.join(file);
                let text = fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
            }
        }
    }
}

/// The function `s(r) > 0` giving the outer radius `R = r + s(r)` of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepFn {
    Constant { value: f64 },
    /// `s(r) = factor · r`
    Proportional { factor: f64 },
    /// `s(r) = factor · (1 − r)`, for the unit disk or ball.
    UnitGap { factor: f64 },
}

impl SweepFn {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            SweepFn::Constant { value } => value,
            SweepFn::Proportional { factor } => factor * r,
            SweepFn::UnitGap { factor } => factor * (1.0 - r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub radii: Vec<f64>,
    pub s: SweepFn,
}

/// One corpus entry as written in the file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub label: String,
    pub theorem: TheoremId,
    pub function: Source<FunctionSpec>,
    pub measure: Source<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Source<Gauge>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Cover radius of the contents; defaults to `r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Set carrying the measure; defaults to its support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<Source<CompactSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Corpus {
    pub cases: Vec<CaseSpec>,
}

impl Corpus {
    pub fn from_file(path: &Path) -> Result<(Self, PathBuf)> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let corpus = Self::from_str(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            e => e,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((corpus, base))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Radii at which a case is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Fixed { r: f64, big_r: f64 },
    Sweep(Sweep),
}

/// A case with every reference loaded and every object constructed.
#[derive(Clone, Debug)]
pub struct VerificationCase {
    pub label: String,
    pub theorem: TheoremId,
    pub u: DeltaSubharmonic,
    pub mu: MeasureRep,
    pub geometry: Geometry,
    pub gauge: Option<Gauge>,
    pub p: Option<f64>,
    pub b: Option<f64>,
    pub t: Option<f64>,
    pub set: Option<CompactSet>,
    pub resolution: Option<u32>,
}

impl CaseSpec {
    pub fn resolve(&self, base: &Path) -> Result<VerificationCase> {
        let u = DeltaSubharmonic::try_from(self.function.load(base)?)?;
        let mu = MeasureRep::try_from(self.measure.load(base)?)?;
        let geometry = match (&self.sweep, self.r, self.big_r) {
            (Some(s), None, None) => {
                if s.radii.is_empty() {
                    return Err(Error::Parse("sweep needs at least one radius".into()));
                }
                Geometry::Sweep(s.clone())
            }
            (None, Some(r), Some(big_r)) => {
                if !(r > 0.0 && big_r > r && big_r.is_finite()) {
                    return Err(Error::Domain(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
                }
                Geometry::Fixed { r, big_r }
            }
            _ => {
                return Err(Error::Parse(
                    "give either r and R, or a sweep (and not both)".into(),
                ))
            }
        };
        let gauge = self.gauge.as_ref().map(|g| g.load(base)).transpose()?;
        if let Some(g) = &gauge {
            g.validate()?;
        }
        let set = self.set.as_ref().map(|s| s.load(base)).transpose()?;
        if let Some(s) = &set {
            s.validate()?;
        }
        Ok(VerificationCase {
            label: self.label.clone(),
            theorem: self.theorem,
            u,
            mu,
            geometry,
            gauge,
            p: self.p,
            b: self.b,
            t: self.t,
            set,
            resolution: self.resolution,
        })
    }
}
