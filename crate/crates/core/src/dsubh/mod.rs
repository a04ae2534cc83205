//! δ-subharmonic functions given by finitely many point charges:
//! `U(x) = c + Σ q_i K(|x - a_i|) - Σ s_j K(|x - b_j|)`.

mod integrate;
mod sphere;

#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::constants::{kernel_unchecked, Dimension, ExtendedReal};
use crate::error::{Error, Result};

pub use integrate::{integrate_plus_against, PlusIntegral};
pub use sphere::{SphereMean, MC_SAMPLES, MC_SEED};

/// Charges closer than this fraction of `R` to the sphere `|x| = R` are refused.
pub const EXCLUSION: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub at: Vec<f64>,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionSpec", into = "FunctionSpec")]
pub struct DeltaSubharmonic {
    dim: Dimension,
    positive: Vec<Charge>,
    negative: Vec<Charge>,
    constant: f64,
}

fn one() -> f64 {
    1.0
}

fn two() -> u32 {
    2
}

/// File form of a function: explicit charges, or for `d = 2` the zeros and
/// poles of a rational function (repeated for multiplicity).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FunctionSpec {
    Charges {
        #[serde(default = "two")]
        dim: u32,
        #[serde(default)]
        positive: Vec<Charge>,
        #[serde(default)]
        negative: Vec<Charge>,
        #[serde(default)]
        constant: f64,
    },
    Rational {
        #[serde(default)]
        zeros: Vec<[f64; 2]>,
        #[serde(default)]
        poles: Vec<[f64; 2]>,
        #[serde(default = "one")]
        leading: f64,
    },
}

impl TryFrom<FunctionSpec> for DeltaSubharmonic {
    type Error = Error;

    fn try_from(s: FunctionSpec) -> Result<Self> {
        match s {
            FunctionSpec::Charges {
                dim,
                positive,
                negative,
                constant,
            } => DeltaSubharmonic::new(Dimension::new(dim)?, positive, negative, constant),
            FunctionSpec::Rational {
                zeros,
                poles,
                leading,
            } => DeltaSubharmonic::rational(&zeros, &poles, leading),
        }
    }
}

impl From<DeltaSubharmonic> for FunctionSpec {
    fn from(u: DeltaSubharmonic) -> Self {
        FunctionSpec::Charges {
            dim: u.dim.get(),
            positive: u.positive,
            negative: u.negative,
            constant: u.constant,
        }
    }
}

/// `|K'(t)|`.
pub(crate) fn kernel_slope(d: Dimension, t: f64) -> f64 {
    match d.get() {
        2 => 1.0 / t,
        k => (k - 2) as f64 * t.powi(1 - k as i32),
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl DeltaSubharmonic {
    pub fn new(dim: Dimension, positive: Vec<Charge>, negative: Vec<Charge>, constant: f64) -> Result<Self> {
        for c in positive.iter().chain(&negative) {
            if c.at.len() != dim.as_usize() {
                return Err(Error::Domain(format!(
                    "charge at {:?} does not have {} coordinates",
                    c.at, dim
                )));
            }
            if !(c.mass > 0.0 && c.mass.is_finite()) || c.at.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("charge masses must be positive and finite, got {}", c.mass)));
            }
        }
        if !constant.is_finite() {
            return Err(Error::Domain("additive constant must be finite".into()));
        }
        Ok(DeltaSubharmonic {
            dim,
            positive,
            negative,
            constant,
        })
    }

    /// `ln |leading · Π (z - zeros) / Π (z - poles)|`.
    pub fn rational(zeros: &[[f64; 2]], poles: &[[f64; 2]], leading: f64) -> Result<Self> {
        if leading == 0.0 || !leading.is_finite() {
            return Err(Error::Domain("leading coefficient must be finite and non-zero".into()));
        }
        let unit = |z: &[f64; 2]| Charge {
            at: z.to_vec(),
            mass: 1.0,
        };
        Self::new(
            Dimension::PLANE,
            zeros.iter().map(unit).collect(),
            poles.iter().map(unit).collect(),
            leading.abs().ln(),
        )
    }

    /// Single positive charge of mass `q` at `a`, with `U = q K(|x - a|)`.
    pub fn point_charge(dim: Dimension, a: Vec<f64>, q: f64) -> Result<Self> {
        Self::new(dim, vec![Charge { at: a, mass: q }], vec![], 0.0)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn positive(&self) -> &[Charge] {
        &self.positive
    }

    pub fn negative(&self) -> &[Charge] {
        &self.negative
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn charges(&self) -> impl Iterator<Item = (&Charge, f64)> {
        self.positive
            .iter()
            .map(|c| (c, 1.0))
            .chain(self.negative.iter().map(|c| (c, -1.0)))
    }

    /// Regular part of `U(x)` and the net charge sitting exactly at `x`.
    fn split(&self, x: &[f64]) -> (f64, f64) {
        let mut sum = self.constant;
        let mut net = 0.0;
        for (c, sign) in self.charges() {
            let r = distance(&c.at, x);
            if r == 0.0 {
                net += sign * c.mass;
            } else {
                sum += sign * c.mass * kernel_unchecked(self.dim, r);
            }
        }
        (sum, net)
    }

    /// `U(x)`. A point carrying both kinds of charge takes the sign of the
    /// net charge there; equal charges cancel.
    pub fn evaluate(&self, x: &[f64]) -> ExtendedReal {
        let (sum, net) = self.split(x);
        if net > 0.0 {
            ExtendedReal::NegInf
        } else if net < 0.0 {
            ExtendedReal::PosInf
        } else {
            ExtendedReal::from_f64(sum)
        }
    }

    /// `U⁺(x)` as a float, `+inf` at negative charges.
    pub fn plus(&self, x: &[f64]) -> f64 {
        let (sum, net) = self.split(x);
        if net > 0.0 {
            0.0
        } else if net < 0.0 {
            f64::INFINITY
        } else {
            sum.max(0.0)
        }
    }

    /// Bound for `|∇U|` on the closed ball `B̄(c, rho)`; infinite when a
    /// charge lies in the ball.
    pub fn gradient_bound(&self, c: &[f64], rho: f64) -> f64 {
        self.charges()
            .map(|(q, _)| {
                let t = distance(&q.at, c) - rho;
                if t <= 0.0 {
                    f64::INFINITY
                } else {
                    q.mass * kernel_slope(self.dim, t)
                }
            })
            .sum()
    }

    /// Refuses spheres passing within `EXCLUSION · R` of a charge.
    pub fn check_sphere(&self, big_r: f64) -> Result<()> {
        let required = EXCLUSION * big_r;
        for (c, _) in self.charges() {
            let distance = (norm(&c.at) - big_r).abs();
            if distance < required {
                return Err(Error::ChargeTooClose {
                    distance,
                    radius: big_r,
                    required,
                });
            }
        }
        Ok(())
    }

    /// Spherical mean of `U⁺` over `|x| = R`.
    pub fn sphere_mean_plus(&self, big_r: f64) -> Result<SphereMean> {
        sphere::mean(self, big_r, |x| self.plus(x))
    }

    /// Spherical mean of `U` itself, for calibration against the mean-value
    /// property.
    pub fn sphere_mean(&self, big_r: f64) -> Result<SphereMean> {
        sphere::mean(self, big_r, |x| self.evaluate(x).to_f64())
    }

    /// `ĥd ∫_r^R ν⁻(B̄(t)) t^{1-d} dt` for the negative charges, in closed form.
    pub fn counting_between(&self, r: f64, big_r: f64) -> f64 {
        let d = self.dim;
        let hd = d.hat_d() as f64;
        let mut sum = 0.0;
        for c in &self.negative {
            let a = norm(&c.at).max(r);
            if a >= big_r {
                continue;
            }
            if a == 0.0 {
                return f64::INFINITY;
            }
            let piece = match d.get() {
                2 => (big_r / a).ln(),
                k => {
                    let e = 2 - k as i32;
                    (a.powi(e) - big_r.powi(e)) / (k - 2) as f64
                }
            };
            sum += c.mass * piece;
        }
        hd * sum
    }
}

/// Value of a characteristic `T_U(r, R)` with the pieces it is made of.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicValue {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub value: f64,
    /// Sphere-mean part.
    pub mean_term: f64,
    /// Counting part.
    pub counting_term: f64,
    /// Quadrature error estimate of the mean part.
    pub error: f64,
    pub nodes: usize,
    pub stochastic: bool,
}

/// A functional `T_U(r, R)` playing the role of the characteristic in the
/// inequalities; the harness only needs its value.
pub trait Characteristic: Sync {
    fn name(&self) -> &'static str;
    fn eval(&self, u: &DeltaSubharmonic, r: f64, big_r: f64) -> Result<CharacteristicValue>;
}

/// `m(R, U) + N(r, R; ν⁻)`: mean of `U⁺` over `|x| = R` plus the counting
/// integral of the negative charges between `r` and `R`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NevanlinnaT;

impl Characteristic for NevanlinnaT {
    fn name(&self) -> &'static str {
        "m + N"
    }

    fn eval(&self, u: &DeltaSubharmonic, r: f64, big_r: f64) -> Result<CharacteristicValue> {
        if !(r >= 0.0 && big_r > r && big_r.is_finite()) {
            return Err(Error::Domain(format!("need 0 ≤ r < R, got r = {r}, R = {big_r}")));
        }
        let m = u.sphere_mean_plus(big_r)?;
        let n = u.counting_between(r, big_r);
        Ok(CharacteristicValue {
            r,
            big_r,
            value: m.value + n,
            mean_term: m.value,
            counting_term: n,
            error: m.error,
            nodes: m.nodes,
            stochastic: m.stochastic,
        })
    }
}

pub fn nevanlinna_t(u: &DeltaSubharmonic, r: f64, big_r: f64) -> Result<CharacteristicValue> {
    NevanlinnaT.eval(u, r, big_r)
}
