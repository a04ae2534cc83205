//! File schema for measures.

use serde::{Deserialize, Serialize};

use crate::constants::Dimension;
use crate::error::{Error, Result};
use crate::geom::Point;

use super::{
    curve_measure_from_graph, Atomic, Cantor, CantorBase, Grid, MeasureRep, Polyline, Region,
    Surface,
};

fn two() -> u32 {
    2
}

fn one() -> f64 {
    1.0
}

fn default_level() -> u32 {
    Cantor::DEFAULT_LEVEL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    pub at: Vec<f64>,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    Atomic {
        #[serde(default = "two")]
        dim: u32,
        atoms: Vec<AtomSpec>,
    },
    GridLebesgue {
        #[serde(default = "two")]
        dim: u32,
        cell: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        origin: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        cells: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<Region>,
    },
    PolylineLength {
        vertices: Vec<[f64; 2]>,
        #[serde(default)]
        closed: bool,
        #[serde(default = "one")]
        density: f64,
    },
    /// Graph of a sampled function with slope bound `q`; becomes a polyline.
    GraphCurve { xs: Vec<f64>, ys: Vec<f64>, q: f64 },
    TriangulatedArea {
        triangles: Vec<[[f64; 3]; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference: Option<Vec<[[f64; 2]; 3]>>,
    },
    CantorSelfSimilar {
        #[serde(default = "two")]
        dim: u32,
        #[serde(default = "default_level")]
        level: u32,
        base: CantorBase,
        #[serde(default = "one")]
        mass: f64,
    },
}

pub(crate) fn point_from(v: &[f64], dim: Dimension) -> Result<Point> {
    let n = dim.as_usize();
    if v.len() != n || n > 3 {
        return Err(Error::Parse(format!(
            "point {v:?} must have {n} coordinates"
        )));
    }
    let mut p = [0.0; 3];
    p[..n].copy_from_slice(v);
    Ok(p)
}

fn point_to(p: &Point, dim: Dimension) -> Vec<f64> {
    p[..dim.as_usize()].to_vec()
}

impl TryFrom<MeasureSpec> for MeasureRep {
    type Error = Error;

    fn try_from(s: MeasureSpec) -> Result<Self> {
        Ok(match s {
            MeasureSpec::Atomic { dim, atoms } => {
                let dim = Dimension::new(dim)?;
                let atoms = atoms
                    .iter()
                    .map(|a| Ok((point_from(&a.at, dim)?, a.mass)))
                    .collect::<Result<Vec<_>>>()?;
                MeasureRep::Atomic(Atomic::new(dim, atoms)?)
            }
            MeasureSpec::GridLebesgue {
                dim,
                cell,
                origin,
                cells,
                density,
                region,
            } => {
                let dim = Dimension::new(dim)?;
                let origin = match origin {
                    Some(o) => point_from(&o, dim)?,
                    None => [0.0; 3],
                };
                match region {
                    Some(r) => {
                        if !cells.is_empty() || density.is_some() {
                            return Err(Error::Parse(
                                "give either a region or explicit cells".into(),
                            ));
                        }
                        MeasureRep::GridLebesgue(Grid::from_region(dim, cell, origin, &r)?)
                    }
                    None => {
                        let n = dim.as_usize();
                        let cells = cells
                            .iter()
                            .map(|c| {
                                if c.len() != n {
                                    return Err(Error::Parse(format!("cell {c:?} needs {n} indices")));
                                }
                                let mut k = [0i64; 3];
                                k[..n].copy_from_slice(c);
                                Ok(k)
                            })
                            .collect::<Result<Vec<_>>>()?;
                        MeasureRep::GridLebesgue(Grid::new(dim, cell, origin, cells, density)?)
                    }
                }
            }
            MeasureSpec::PolylineLength {
                vertices,
                closed,
                density,
            } => MeasureRep::PolylineLength(Polyline::new(vertices, closed, density)?),
            MeasureSpec::GraphCurve { xs, ys, q } => {
                MeasureRep::PolylineLength(curve_measure_from_graph(&xs, &ys, q)?.curve)
            }
            MeasureSpec::TriangulatedArea {
                triangles,
                reference,
            } => MeasureRep::TriangulatedArea(Surface::new(triangles, reference)?),
            MeasureSpec::CantorSelfSimilar {
                dim,
                level,
                base,
                mass,
            } => MeasureRep::CantorSelfSimilar(Cantor::new(Dimension::new(dim)?, level, base, mass)?),
        })
    }
}

impl From<MeasureRep> for MeasureSpec {
    fn from(m: MeasureRep) -> Self {
        match m {
            MeasureRep::Atomic(a) => MeasureSpec::Atomic {
                dim: a.dim.get(),
                atoms: a
                    .atoms
                    .iter()
                    .map(|(p, m)| AtomSpec {
                        at: point_to(p, a.dim),
                        mass: *m,
                    })
                    .collect(),
            },
            MeasureRep::GridLebesgue(g) => {
                let n = g.dim.as_usize();
                let uniform = g.density.iter().all(|&r| r == 1.0);
                MeasureSpec::GridLebesgue {
                    dim: g.dim.get(),
                    cell: g.cell,
                    origin: (g.origin != [0.0; 3]).then(|| point_to(&g.origin, g.dim)),
                    cells: g.cells.iter().map(|c| c[..n].to_vec()).collect(),
                    density: (!uniform).then(|| g.density.clone()),
                    region: None,
                }
            }
            MeasureRep::PolylineLength(p) => MeasureSpec::PolylineLength {
                vertices: p.vertices,
                closed: p.closed,
                density: p.density,
            },
            MeasureRep::TriangulatedArea(s) => MeasureSpec::TriangulatedArea {
                triangles: s.triangles,
                reference: s.reference,
            },
            MeasureRep::CantorSelfSimilar(c) => MeasureSpec::CantorSelfSimilar {
                dim: c.dim.get(),
                level: c.level,
                base: c.base,
                mass: c.mass,
            },
        }
    }
}
