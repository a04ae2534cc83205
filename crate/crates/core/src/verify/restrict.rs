//! Restriction `μ|_{B̄(r)}` of a measure to a closed centered ball.

use crate::error::{Error, Result};
use crate::geom::{norm, rect_far_dist2, segment_ball_clip, Point2};
use crate::measures::{Atomic, Grid, MeasureRep, Polyline, Surface};

/// Restricted measure (`None` when nothing is left) and whether it is the
/// exact restriction. Grids and surfaces keep only the cells or triangles
/// lying entirely in the ball, which restricts to a smaller set.
pub struct Restricted {
    pub measure: Option<MeasureRep>,
    pub exact: bool,
}

fn inside(r: f64) -> impl Fn(f64) -> bool {
    move |x| x <= r * (1.0 + 1e-12)
}

pub fn restrict_to_ball(mu: &MeasureRep, r: f64) -> Result<Restricted> {
    let ok = inside(r);
    if ok(mu.support_radius()) {
        return Ok(Restricted {
            measure: Some(mu.clone()),
            exact: true,
        });
    }
    let measure = match mu {
        MeasureRep::Atomic(a) => {
            let atoms: Vec<_> = a.atoms().iter().filter(|(p, _)| ok(norm(p))).cloned().collect();
            if atoms.is_empty() {
                None
            } else {
                Some(MeasureRep::Atomic(Atomic::new(a.dim, atoms)?))
            }
        }
        MeasureRep::GridLebesgue(g) => {
            let (cells, density): (Vec<_>, Vec<_>) = g
                .cells()
                .iter()
                .zip(g.densities())
                .filter(|(c, _)| {
                    let (lo, hi) = g.cell_box(c);
                    ok(rect_far_dist2(&lo, &hi, &[0.0; 3]).sqrt())
                })
                .map(|(c, d)| (*c, *d))
                .unzip();
            if cells.is_empty() {
                None
            } else {
                Some(MeasureRep::GridLebesgue(Grid::new(
                    g.dim,
                    g.cell,
                    g.origin,
                    cells,
                    Some(density),
                )?))
            }
        }
        MeasureRep::TriangulatedArea(s) => {
            let keep: Vec<usize> = (0..s.triangles.len())
                .filter(|&i| s.triangles[i].iter().all(|p| ok(norm(p))))
                .collect();
            if keep.is_empty() {
                None
            } else {
                let tris = keep.iter().map(|&i| s.triangles[i]).collect();
                let refs = s
                    .reference
                    .as_ref()
                    .map(|r| keep.iter().map(|&i| r[i]).collect());
                Some(MeasureRep::TriangulatedArea(Surface::new(tris, refs)?))
            }
        }
        MeasureRep::PolylineLength(p) => clip_polyline(p, r)?.map(MeasureRep::PolylineLength),
        MeasureRep::CantorSelfSimilar(_) => {
            return Err(Error::Unsupported(
                "restriction of a Cantor measure to a ball it does not contain".into(),
            ))
        }
    };
    let exact = match (mu, &measure) {
        (MeasureRep::GridLebesgue(g), Some(MeasureRep::GridLebesgue(h))) => {
            g.cells().len() == h.cells().len()
        }
        (MeasureRep::TriangulatedArea(s), Some(MeasureRep::TriangulatedArea(t))) => {
            s.triangles.len() == t.triangles.len()
        }
        (MeasureRep::GridLebesgue(_) | MeasureRep::TriangulatedArea(_), None) => false,
        _ => true,
    };
    Ok(Restricted { measure, exact })
}

/// The part of an open polyline inside `B̄(r)`; it must be a single arc.
fn clip_polyline(p: &Polyline, r: f64) -> Result<Option<Polyline>> {
    if p.closed {
        return Err(Error::Unsupported("restriction of a closed curve to a ball".into()));
    }
    let mut pieces: Vec<Vec<Point2>> = Vec::new();
    let mut open = false;
    for (a, b) in p.segments() {
        let Some((s0, s1)) = segment_ball_clip(&a, &b, &[0.0; 3], r) else {
            open = false;
            continue;
        };
        let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt() * (s1 - s0);
        if len <= 1e-14 * r {
            open = false;
            continue;
        }
        if !(open && s0 == 0.0) {
            pieces.push(vec![at(s0)]);
        }
        pieces.last_mut().expect("piece").push(at(s1));
        open = s1 == 1.0;
    }
    match pieces.len() {
        0 => Ok(None),
        1 => Ok(Some(Polyline::new(pieces.remove(0), false, p.density)?)),
        n => Err(Error::Unsupported(format!(
            "the curve meets the disk of radius {r} in {n} arcs"
        ))),
    }
}
