use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

use super::DeltaSubharmonic;

const REL_TOL: f64 = 1e-6;
const ABS_TOL: f64 = 1e-14;
const START_CIRCLE: usize = 64;
const MAX_CIRCLE: usize = 1 << 22;
const START_POLAR: usize = 16;
const MAX_POLAR: usize = 1024;

/// Sample count of the Monte Carlo mean for `d ≥ 4`.
pub const MC_SAMPLES: usize = 1_000_000;
pub const MC_SEED: u64 = 0x5eed_2021;

/// A spherical mean with the doubling history that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereMean {
    pub value: f64,
    /// Last successive difference, or the standard error for Monte Carlo.
    pub error: f64,
    pub nodes: usize,
    pub converged: bool,
    /// `(nodes, value)` at each doubling.
    pub history: Vec<(usize, f64)>,
    /// Set for Monte Carlo means (`d ≥ 4`).
    pub stochastic: bool,
}

/// Parallel evaluation with a sequential sum, so results do not depend on
/// the thread count.
fn ordered_sum<I: IndexedParallelIterator<Item = f64>>(it: I) -> f64 {
    it.collect::<Vec<f64>>().iter().sum()
}

fn settled(prev: f64, cur: f64) -> bool {
    (cur - prev).abs() <= (REL_TOL * cur.abs()).max(ABS_TOL)
}

pub(super) fn mean<F: Fn(&[f64]) -> f64 + Sync>(u: &DeltaSubharmonic, big_r: f64, f: F) -> Result<SphereMean> {
    if !(big_r > 0.0 && big_r.is_finite()) {
        return Err(Error::Domain(format!("sphere radius must be positive, got {big_r}")));
    }
    u.check_sphere(big_r)?;
    match u.dim().get() {
        2 => Ok(circle(big_r, &f)),
        3 => Ok(sphere(big_r, &f)),
        d => Ok(monte_carlo(d as usize, big_r, &f)),
    }
}

/// Periodic trapezoid rule; each doubling reuses the previous nodes.
fn circle<F: Fn(&[f64]) -> f64 + Sync>(big_r: f64, f: &F) -> SphereMean {
    let at = |k: usize, n: usize| {
        let th = TAU * k as f64 / n as f64;
        f(&[big_r * th.cos(), big_r * th.sin()])
    };
    let mut n = START_CIRCLE;
    let mut sum = ordered_sum((0..n).into_par_iter().map(|k| at(k, n)));
    let mut value = sum / n as f64;
    let mut history = vec![(n, value)];
    let mut error = f64::INFINITY;
    let mut converged = false;
    while n < MAX_CIRCLE {
        let m = 2 * n;
        sum += ordered_sum((0..n).into_par_iter().map(|k| at(2 * k + 1, m)));
        n = m;
        let next = sum / n as f64;
        error = (next - value).abs();
        converged = settled(value, next);
        value = next;
        history.push((n, value));
        if converged {
            break;
        }
    }
    SphereMean {
        value,
        error,
        nodes: n,
        converged,
        history,
        stochastic: false,
    }
}

/// Gauss–Legendre in `cos θ` times the trapezoid rule in `φ`.
fn sphere<F: Fn(&[f64]) -> f64 + Sync>(big_r: f64, f: &F) -> SphereMean {
    let product = |n: usize| -> f64 {
        let m = 2 * n;
        ordered_sum(gauss_legendre(n).into_par_iter().map(|(z, w)| {
                let s = (1.0 - z * z).max(0.0).sqrt();
                let ring: f64 = (0..m)
                    .map(|k| {
                        let ph = TAU * k as f64 / m as f64;
                        f(&[big_r * s * ph.cos(), big_r * s * ph.sin(), big_r * z])
                    })
                    .sum();
            w * ring / m as f64
        })) / 2.0
    };
    let mut n = START_POLAR;
    let mut value = product(n);
    let mut history = vec![(2 * n * n, value)];
    let mut error = f64::INFINITY;
    let mut converged = false;
    while n < MAX_POLAR {
        n *= 2;
        let next = product(n);
        error = (next - value).abs();
        converged = settled(value, next);
        value = next;
        history.push((2 * n * n, value));
        if converged {
            break;
        }
    }
    SphereMean {
        value,
        error,
        nodes: 2 * n * n,
        converged,
        history,
        stochastic: false,
    }
}

fn monte_carlo<F: Fn(&[f64]) -> f64>(d: usize, big_r: f64, f: &F) -> SphereMean {
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let mut x = vec![0.0; d];
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..MC_SAMPLES {
        loop {
            for v in x.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                x.iter_mut().for_each(|v| *v *= big_r / n);
                break;
            }
        }
        let y = f(&x);
        s1 += y;
        s2 += y * y;
    }
    let n = MC_SAMPLES as f64;
    let value = s1 / n;
    let var = (s2 / n - value * value).max(0.0);
    SphereMean {
        value,
        error: (var / n).sqrt(),
        nodes: MC_SAMPLES,
        converged: true,
        history: vec![(MC_SAMPLES, value)],
        stochastic: true,
    }
}
