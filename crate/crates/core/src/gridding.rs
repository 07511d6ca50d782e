//! Uniform cartesian meshes and discrete varifolds
//! `Σ_K (m_K/|K|) L^n|_K ⊗ δ_{P_K}`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grassmann::{mean_plane_spectrum, Plane};
use crate::varifold::{Atom, AtomicVarifold, BoxRegion};

/// Default quadrature nodes per axis used by [`DiscreteVarifold::atomize`] callers.
pub const DEFAULT_QUADRATURE: usize = 3;

/// Multi-index of a cell.
pub type CellIndex = Vec<usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    origin: Vec<f64>,
    h: f64,
    counts: Vec<usize>,
}

impl CartesianGrid {
    pub fn new(origin: Vec<f64>, h: f64, counts: Vec<usize>) -> Result<Self> {
        if origin.len() != counts.len() || origin.is_empty() {
            return Err(Error::DimensionMismatch("grid origin vs counts".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid("h", format!("{h} is not a positive cell size")));
        }
        if counts.contains(&0) {
            return Err(invalid("counts", "every axis needs at least one cell"));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(invalid("origin", "not finite"));
        }
        Ok(Self { origin, h, counts })
    }

    /// Smallest grid anchored at `region.lo()` whose hull contains `region`.
    pub fn covering(region: &BoxRegion, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(invalid("h", format!("{h} is not a positive cell size")));
        }
        let counts = region
            .lo()
            .iter()
            .zip(region.hi())
            .map(|(a, b)| (((b - a) / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
            .collect();
        Self::new(region.lo().to_vec(), h, counts)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// `|K| = h^n`
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    /// `H^{n-1}(σ) = h^{n-1}`
    pub fn face_area(&self) -> f64 {
        self.h.powi(self.dim() as i32 - 1)
    }

    pub fn hull(&self) -> BoxRegion {
        let hi = self
            .origin
            .iter()
            .zip(&self.counts)
            .map(|(o, &c)| o + c as f64 * self.h)
            .collect();
        BoxRegion::new(self.origin.clone(), hi).expect("valid grid")
    }

    pub fn contains_index(&self, index: &[usize]) -> bool {
        index.len() == self.dim() && index.iter().zip(&self.counts).all(|(i, c)| i < c)
    }

    /// Cell containing `x`, with half-open cells `[lo, lo + h)` on every axis.
    pub fn cell_of(&self, x: &[f64]) -> Option<CellIndex> {
        if x.len() != self.dim() {
            return None;
        }
        x.iter()
            .zip(self.origin.iter().zip(&self.counts))
            .map(|(v, (o, &c))| {
                let k = ((v - o) / self.h).floor();
                (k >= 0.0 && k < c as f64).then_some(k as usize)
            })
            .collect()
    }

    pub fn cell_lo(&self, index: &[usize]) -> Vec<f64> {
        self.origin
            .iter()
            .zip(index)
            .map(|(o, &i)| o + i as f64 * self.h)
            .collect()
    }

    pub fn cell_center(&self, index: &[usize]) -> Vec<f64> {
        self.cell_lo(index)
            .into_iter()
            .map(|c| c + 0.5 * self.h)
            .collect()
    }
}

/// Per-cell data of a discrete varifold.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub mass: f64,
    pub plane: Plane,
    /// The mean projector had no unique dominant subspace.
    pub degenerate: bool,
}

/// Sparse cell list over a [`CartesianGrid`]; cells absent from the map carry zero mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteVarifold {
    d: usize,
    grid: CartesianGrid,
    cells: BTreeMap<CellIndex, Cell>,
}

impl DiscreteVarifold {
    pub fn new(d: usize, grid: CartesianGrid, cells: BTreeMap<CellIndex, Cell>) -> Result<Self> {
        let n = grid.dim();
        for (index, cell) in &cells {
            if !grid.contains_index(index) {
                return Err(invalid("cell", format!("index {index:?} outside the grid")));
            }
            if !(cell.mass > 0.0 && cell.mass.is_finite()) {
                return Err(invalid("mass", format!("cell {index:?} has mass {}", cell.mass)));
            }
            if cell.plane.ambient_dim() != n || cell.plane.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "cell {index:?} plane is not in G({d},{n})"
                )));
            }
        }
        Ok(Self { d, grid, cells })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn ambient_dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn cells(&self) -> &BTreeMap<CellIndex, Cell> {
        &self.cells
    }

    pub fn cell(&self, index: &[usize]) -> Option<&Cell> {
        self.cells.get(index)
    }

    pub fn mass_of(&self, index: &[usize]) -> f64 {
        self.cells.get(index).map_or(0.0, |c| c.mass)
    }

    pub fn total_mass(&self) -> f64 {
        self.cells.values().map(|c| c.mass).sum()
    }

    pub fn scale_masses(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("scale", format!("{c} is not positive")));
        }
        let mut out = self.clone();
        for cell in out.cells.values_mut() {
            cell.mass *= c;
        }
        Ok(out)
    }

    /// Drops one cell (it becomes a zero-mass cell).
    pub fn without_cell(&self, index: &[usize]) -> Self {
        let mut out = self.clone();
        out.cells.remove(index);
        out
    }

    /// Quadrature realization of the cell-wise uniform measure: `q^n`
    /// midpoint nodes per cell, each with mass `m_K / q^n` and plane `P_K`.
    pub fn atomize(&self, q: usize) -> Result<AtomicVarifold> {
        if q == 0 {
            return Err(invalid("q", "need at least one node per axis"));
        }
        let n = self.ambient_dim();
        let nodes = q.pow(n as u32);
        let step = self.grid.h / q as f64;
        let mut atoms = Vec::with_capacity(self.cells.len() * nodes);
        for (index, cell) in &self.cells {
            let lo = self.grid.cell_lo(index);
            let mass = cell.mass / nodes as f64;
            for flat in 0..nodes {
                let mut rest = flat;
                let mut x = lo.clone();
                for xk in x.iter_mut().rev() {
                    *xk += ((rest % q) as f64 + 0.5) * step;
                    rest /= q;
                }
                atoms.push(Atom::new(x, cell.plane.clone(), mass));
            }
        }
        AtomicVarifold::new(self.d, atoms, Some(self.grid.hull()))
    }
}

/// Volumetric approximation of `v` on `grid`: `m_K = ‖V‖(K)` and `P_K` the
/// mass-weighted mean plane of the atoms in `K`.
pub fn discretize(v: &AtomicVarifold, grid: &CartesianGrid) -> Result<DiscreteVarifold> {
    if grid.dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch("grid vs varifold dimension".into()));
    }
    let mut members: BTreeMap<CellIndex, Vec<usize>> = BTreeMap::new();
    for (i, atom) in v.atoms().iter().enumerate() {
        let index = grid.cell_of(&atom.x).ok_or_else(|| Error::AtomOutsideGrid {
            index: i,
            position: atom.x.clone(),
        })?;
        members.entry(index).or_default().push(i);
    }
    let groups: Vec<(CellIndex, Vec<usize>)> = members.into_iter().collect();
    let cells: Vec<(CellIndex, Cell)> = groups
        .into_par_iter()
        .map(|(index, ids)| {
            let atoms = v.atoms();
            let mass: f64 = ids.iter().map(|&i| atoms[i].mass).sum();
            let entries: Vec<(&Plane, f64)> =
                ids.iter().map(|&i| (&atoms[i].plane, atoms[i].mass)).collect();
            let spectrum = mean_plane_spectrum(&entries)?;
            Ok((
                index,
                Cell {
                    mass,
                    plane: spectrum.plane,
                    degenerate: spectrum.degenerate,
                },
            ))
        })
        .collect::<Result<_>>()?;
    DiscreteVarifold::new(v.dim(), grid.clone(), cells.into_iter().collect())
}
