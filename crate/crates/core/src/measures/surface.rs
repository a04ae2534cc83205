use crate::error::{Error, Result};
use crate::geom::{dist, sub, triangle_area, triangle_ball_area, Point, Point2};

use super::curves::LipschitzConstants;

/// Surface area on a triangulated patch in `R^3`, optionally with reference
/// (parameter-domain) coordinates for each triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct Surface {
    pub(crate) triangles: Vec<[Point; 3]>,
    pub(crate) reference: Option<Vec<[Point2; 3]>>,
}

impl Surface {
    pub fn new(triangles: Vec<[Point; 3]>, reference: Option<Vec<[Point2; 3]>>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(r) = &reference {
            if r.len() != triangles.len() {
                return Err(Error::Domain("reference list length differs from triangles".into()));
            }
        }
        for (i, tri) in triangles.iter().enumerate() {
            if tri.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("triangle {i} has a non-finite vertex")));
            }
            let scale = dist(&tri[0], &tri[1]).max(dist(&tri[0], &tri[2]));
            if triangle_area(tri) <= 1e-14 * scale * scale {
                return Err(Error::Degenerate(format!("triangle {i} has zero area")));
            }
        }
        Ok(Surface {
            triangles,
            reference,
        })
    }

    /// Unit square `[0,1]^2` lifted by `z = slope * x`, split into `2 n^2`
    /// triangles; reference coordinates are `(x, y)`.
    pub fn tilted_square(n: usize, slope: f64) -> Self {
        let mut tris = Vec::with_capacity(2 * n * n);
        let h = 1.0 / n as f64;
        let p = |i: usize, j: usize| {
            let (x, y) = (i as f64 * h, j as f64 * h);
            [x, y, slope * x]
        };
        for i in 0..n {
            for j in 0..n {
                tris.push([p(i, j), p(i + 1, j), p(i + 1, j + 1)]);
                tris.push([p(i, j), p(i + 1, j + 1), p(i, j + 1)]);
            }
        }
        Surface::new(tris, None).expect("valid square triangulation")
    }

    pub fn triangles(&self) -> &[[Point; 3]] {
        &self.triangles
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(triangle_area).sum()
    }

    pub fn ball_mass(&self, y: &Point, t: f64) -> f64 {
        self.triangles
            .iter()
            .map(|tri| triangle_ball_area(tri, y, t))
            .sum()
    }

    fn reference_of(&self, i: usize) -> [Point2; 3] {
        match &self.reference {
            Some(r) => r[i],
            None => {
                let t = &self.triangles[i];
                [[t[0][0], t[0][1]], [t[1][0], t[1][1]], [t[2][0], t[2][1]]]
            }
        }
    }

    /// `Lip` is the largest Jacobian singular value (exact for a convex
    /// parameter domain). `Lip⁻¹` is the larger of the inverse smallest singular
    /// value and the reference-over-image distance ratio over vertex pairs.
    pub fn lipschitz_constants(&self) -> Result<LipschitzConstants> {
        let mut lip: f64 = 0.0;
        let mut lip_inv: f64 = 0.0;
        let mut verts: Vec<(Point, Point2)> = Vec::new();
        for (i, tri) in self.triangles.iter().enumerate() {
            let r = self.reference_of(i);
            let u1 = [r[1][0] - r[0][0], r[1][1] - r[0][1]];
            let u2 = [r[2][0] - r[0][0], r[2][1] - r[0][1]];
            let det = u1[0] * u2[1] - u1[1] * u2[0];
            if det.abs() <= 1e-300 {
                return Err(Error::Degenerate(format!(
                    "triangle {i} has a degenerate reference image; supply reference coordinates"
                )));
            }
            let w1 = sub(&tri[1], &tri[0]);
            let w2 = sub(&tri[2], &tri[0]);
            // J = W U^{-1}, columns are images of the reference unit vectors
            let inv = [[u2[1] / det, -u2[0] / det], [-u1[1] / det, u1[0] / det]];
            let col = |k: usize| -> Point {
                let (a, b) = (inv[0][k], inv[1][k]);
                [
                    a * w1[0] + b * w2[0],
                    a * w1[1] + b * w2[1],
                    a * w1[2] + b * w2[2],
                ]
            };
            let (j1, j2) = (col(0), col(1));
            let g11 = j1.iter().map(|x| x * x).sum::<f64>();
            let g22 = j2.iter().map(|x| x * x).sum::<f64>();
            let g12 = j1.iter().zip(&j2).map(|(x, y)| x * y).sum::<f64>();
            let tr = g11 + g22;
            let disc = ((g11 - g22).powi(2) + 4.0 * g12 * g12).sqrt();
            let smax = ((tr + disc) / 2.0).sqrt();
            let smin = ((tr - disc) / 2.0).max(0.0).sqrt();
            lip = lip.max(smax);
            lip_inv = lip_inv.max(if smin > 0.0 { 1.0 / smin } else { f64::INFINITY });
            for k in 0..3 {
                if !verts.iter().any(|(p, _)| *p == tri[k]) {
                    verts.push((tri[k], r[k]));
                }
            }
        }
        for a in 0..verts.len() {
            for b in a + 1..verts.len() {
                let dw = dist(&verts[a].0, &verts[b].0);
                let du = ((verts[a].1[0] - verts[b].1[0]).powi(2)
                    + (verts[a].1[1] - verts[b].1[1]).powi(2))
                .sqrt();
                if du == 0.0 {
                    return Err(Error::Degenerate(format!(
                        "vertices {a} and {b} share reference coordinates"
                    )));
                }
                lip = lip.max(dw / du);
                lip_inv = lip_inv.max(du / dw);
            }
        }
        let bilipschitz = lip_inv.is_finite() && lip_inv < 1e8;
        Ok(LipschitzConstants {
            lip,
            lip_inv,
            bilipschitz,
        })
    }
}
