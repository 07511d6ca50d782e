//! Total variation of the first variation of a discrete varifold.
//!
//! `δV_K` is concentrated on mesh faces. A face between two cells of
//! positive mass (internal) carries the density
//! `|[(m₊/|K₊|) Π₊ − (m₋/|K₋|) Π₋] n|`; a face between a positive cell and
//! an empty one (boundary) carries `(m_K/|K|) |Π_K n|`. Faces on the outer
//! hull of the grid lie on `∂Ω` and are not charged.

use crate::error::{Error, Result};
use crate::gridding::{discretize, CartesianGrid, CellIndex, DiscreteVarifold};
use crate::varifold::AtomicVarifold;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Internal,
    Boundary,
}

impl FaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FaceKind::Internal => "internal",
            FaceKind::Boundary => "boundary",
        }
    }
}

/// One charged face `σ`, identified by the cell on its lower side along `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceTerm {
    pub lower: CellIndex,
    pub axis: usize,
    pub kind: FaceKind,
    pub density: f64,
    pub area: f64,
    pub contribution: f64,
}

impl FaceTerm {
    pub fn upper(&self) -> CellIndex {
        let mut up = self.lower.clone();
        up[self.axis] += 1;
        up
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstVariationReport {
    pub terms: Vec<FaceTerm>,
    pub total: f64,
    pub internal_total: f64,
    pub boundary_total: f64,
}

/// `|δV_K|(Ω)` by face enumeration.
///
/// Faces are emitted per positive cell in index order: first the face
/// towards `+e_k`, then the face towards `−e_k` when that neighbour is empty
/// (a positive neighbour already emitted it).
pub fn first_variation(dv: &DiscreteVarifold) -> Result<FirstVariationReport> {
    if dv.cells().is_empty() {
        return Err(Error::EmptyVarifold("discrete varifold has no cells".into()));
    }
    let grid = dv.grid();
    let n = grid.dim();
    let volume = grid.cell_volume();
    let area = grid.face_area();
    let mut terms = Vec::new();

    for (index, cell) in dv.cells() {
        let density_here = cell.mass / volume;
        let proj = cell.plane.projector();
        for axis in 0..n {
            // face towards +e_axis
            if index[axis] + 1 < grid.counts()[axis] {
                let mut up = index.clone();
                up[axis] += 1;
                let term = match dv.cell(&up) {
                    Some(other) => {
                        let density_there = other.mass / volume;
                        let a = proj.column(axis);
                        let b = other.plane.projector().column(axis);
                        let jump: f64 = a
                            .iter()
                            .zip(b)
                            .map(|(x, y)| {
                                let t = density_here * x - density_there * y;
                                t * t
                            })
                            .sum();
                        (FaceKind::Internal, jump.sqrt())
                    }
                    None => (FaceKind::Boundary, density_here * norm(proj.column(axis))),
                };
                terms.push(FaceTerm {
                    lower: index.clone(),
                    axis,
                    kind: term.0,
                    density: term.1,
                    area,
                    contribution: term.1 * area,
                });
            }
            // face towards −e_axis, only when the neighbour is empty
            if index[axis] > 0 {
                let mut down = index.clone();
                down[axis] -= 1;
                if dv.cell(&down).is_none() {
                    let density = density_here * norm(proj.column(axis));
                    terms.push(FaceTerm {
                        lower: down,
                        axis,
                        kind: FaceKind::Boundary,
                        density,
                        area,
                        contribution: density * area,
                    });
                }
            }
        }
    }

    let mut internal_total = 0.0;
    let mut boundary_total = 0.0;
    let mut total = 0.0;
    for t in &terms {
        total += t.contribution;
        match t.kind {
            FaceKind::Internal => internal_total += t.contribution,
            FaceKind::Boundary => boundary_total += t.contribution,
        }
    }
    Ok(FirstVariationReport {
        terms,
        total,
        internal_total,
        boundary_total,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One row of an [`explosion_sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub total: f64,
    pub scaled_total: f64,
}

/// Discretizes `v` on grids of decreasing size covering its domain and
/// records `|δV_K|(Ω)` and `h · |δV_K|(Ω)` at each size.
pub fn explosion_sweep(v: &AtomicVarifold, h_list: &[f64]) -> Result<Vec<SweepRow>> {
    if h_list.is_empty() {
        return Err(crate::error::invalid("h_list", "empty"));
    }
    h_list
        .iter()
        .map(|&h| {
            let grid = CartesianGrid::covering(v.domain(), h)?;
            let report = first_variation(&discretize(v, &grid)?)?;
            Ok(SweepRow {
                h,
                total: report.total,
                scaled_total: h * report.total,
            })
        })
        .collect()
}
