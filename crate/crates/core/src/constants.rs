//! Dimension-dependent kernels and normalizing constants.
//!
//! The kernel `K` is the fundamental solution up to normalization:
//! `K(t) = ln t` in the plane and `K(t) = -t^(2-d)` for `d > 2`. This is the
//! form that makes the logarithmic and Newtonian cases share one set of
//! formulas; other normalizations differ by positive constants only.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient Euclidean dimension, always at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub const PLANE: Dimension = Dimension(2);
    pub const SPACE: Dimension = Dimension(3);

    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
        }
        Ok(Dimension(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// `max{1, d-1}`, the weight in front of radial counting integrals.
    pub fn hat_d(self) -> u32 {
        hat_d(self)
    }

    /// Quadrature-backed operations are implemented for the plane and space only.
    pub fn require_quadrature(self) -> Result<()> {
        if self.0 == 2 || self.0 == 3 {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "quadrature is available for d = 2, 3 only (got d = {})",
                self.0
            )))
        }
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A real number or one of the two infinities.
///
/// Multiplication follows the measure-theoretic convention `0 * (±inf) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtendedReal::NegInf
        } else {
            ExtendedReal::Finite(x)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn positive_part(self) -> Self {
        match self {
            ExtendedReal::NegInf => ExtendedReal::ZERO,
            ExtendedReal::Finite(x) => ExtendedReal::Finite(x.max(0.0)),
            ExtendedReal::PosInf => ExtendedReal::PosInf,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInf => write!(f, "inf"),
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x)
    }
}

impl Neg for ExtendedReal {
    type Output = ExtendedReal;

    fn neg(self) -> Self {
        match self {
            ExtendedReal::NegInf => ExtendedReal::PosInf,
            ExtendedReal::Finite(x) => ExtendedReal::Finite(-x),
            ExtendedReal::PosInf => ExtendedReal::NegInf,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    /// `inf + (-inf)` has no meaning; it panics in debug builds and yields
    /// `+inf` otherwise.
    fn add(self, rhs: Self) -> Self {
        use ExtendedReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => ExtendedReal::from_f64(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => {
                debug_assert!(false, "inf - inf is undefined");
                PosInf
            }
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }
}

impl Sub for ExtendedReal {
    type Output = ExtendedReal;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ExtendedReal {
    type Output = ExtendedReal;

    fn mul(self, rhs: Self) -> Self {
        use ExtendedReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => ExtendedReal::from_f64(a * b),
            (Finite(a), inf) | (inf, Finite(a)) => {
                if a == 0.0 {
                    Finite(0.0)
                } else if (a > 0.0) == (inf == PosInf) {
                    PosInf
                } else {
                    NegInf
                }
            }
            (a, b) => {
                if a == b {
                    PosInf
                } else {
                    NegInf
                }
            }
        }
    }
}

/// `K(t) = ln t` for `d = 2`, `K(t) = -t^(2-d)` for `d > 2`.
pub fn kernel_k(d: Dimension, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("kernel argument must be positive, got {t}")));
    }
    Ok(kernel_unchecked(d, t))
}

#[inline]
pub(crate) fn kernel_unchecked(d: Dimension, t: f64) -> f64 {
    match d.get() {
        2 => t.ln(),
        3 => -1.0 / t,
        k => -t.powi(2 - k as i32),
    }
}

/// `A_d(r, R) = 5 max{1, d-2} ((R+r)/(R-r))^(d-1) max{1, (R-r)^(d-2)}`.
pub fn constant_a(d: Dimension, r: f64, big_r: f64) -> Result<f64> {
    if !(r > 0.0) || !(big_r > r) || !big_r.is_finite() {
        return Err(Error::Domain(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    let dd = d.get() as i32;
    let lead = 5.0 * f64::from((d.get() - 2).max(1));
    let ratio = ((big_r + r) / (big_r - r)).powi(dd - 1);
    let gap = (big_r - r).powi(dd - 2).max(1.0);
    Ok(lead * ratio * gap)
}

/// `max{1, d-1}`.
pub fn hat_d(d: Dimension) -> u32 {
    (d.get() - 1).max(1)
}

/// Normalizing factor `c_p = pi^(p/2) / Gamma(p/2 + 1)` of the `p`-dimensional
/// Hausdorff measure; `c_d` is the volume of the unit ball in `R^d`.
pub fn c_p(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("c_p needs p > 0, got {p}")));
    }
    Ok(std::f64::consts::PI.powf(p / 2.0) / statrs::function::gamma::gamma(p / 2.0 + 1.0))
}
