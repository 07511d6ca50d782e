//! Atomic varifolds `Σ m_j δ_{x_j} ⊗ δ_{P_j}` and generators for
//! rectifiable test shapes.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::grassmann::{norm_sq, sub, Plane};

/// Axis-aligned box `[lo, hi]` in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch("box corners differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(invalid("box", "each axis needs finite lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    /// The unit cube `[0, 1]^n`.
    pub fn unit(n: usize) -> Self {
        Self {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    /// Bounding box of `points`, padded on every side by 10% of its largest extent.
    pub fn padded_bounds<'a>(points: impl Iterator<Item = &'a [f64]>) -> Option<Self> {
        let mut lo: Vec<f64> = Vec::new();
        let mut hi: Vec<f64> = Vec::new();
        for p in points {
            if lo.is_empty() {
                lo = p.to_vec();
                hi = p.to_vec();
                continue;
            }
            for k in 0..p.len() {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if lo.is_empty() {
            return None;
        }
        let extent = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| b - a)
            .fold(0.0_f64, f64::max);
        let pad = if extent > 0.0 { 0.1 * extent } else { 0.1 };
        Some(Self {
            lo: lo.iter().map(|a| a - pad).collect(),
            hi: hi.iter().map(|b| b + pad).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn contains_strictly(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a < *v && *v < *b)
    }

    /// `d(x, Ω^c)` for the open box; zero outside.
    pub fn dist_to_complement(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (a, b))| (v - a).min(b - v))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    /// `d(ω̄, Ω^c)` for a box `ω` nested in `self`; zero if not nested.
    pub fn inner_margin(&self, inner: &BoxRegion) -> f64 {
        self.lo
            .iter()
            .zip(&inner.lo)
            .map(|(a, b)| b - a)
            .chain(self.hi.iter().zip(&inner.hi).map(|(a, b)| a - b))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    pub fn intersects(&self, other: &BoxRegion) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((a0, a1), (b0, b1))| a0 < b1 && b0 < a1)
    }
}

/// One weighted point-plane pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub x: Vec<f64>,
    pub plane: Plane,
    pub mass: f64,
}

impl Atom {
    pub fn new(x: Vec<f64>, plane: Plane, mass: f64) -> Self {
        Self { x, plane, mass }
    }
}

/// Finite weighted family of atoms; the in-memory form of every varifold here.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicVarifold {
    n: usize,
    d: usize,
    atoms: Vec<Atom>,
    domain: BoxRegion,
}

impl AtomicVarifold {
    /// Validates atoms and picks the padded bounding box when `domain` is `None`.
    pub fn new(d: usize, atoms: Vec<Atom>, domain: Option<BoxRegion>) -> Result<Self> {
        let n = atoms
            .first()
            .map(|a| a.x.len())
            .ok_or_else(|| Error::EmptyVarifold("no atoms".into()))?;
        for (index, atom) in atoms.iter().enumerate() {
            if atom.x.len() != n || atom.plane.ambient_dim() != n || atom.plane.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "atom {index} does not live in G({d},{n})"
                )));
            }
            if !(atom.mass > 0.0 && atom.mass.is_finite()) {
                return Err(invalid("mass", format!("atom {index} has mass {}", atom.mass)));
            }
            if atom.x.iter().any(|c| !c.is_finite()) {
                return Err(invalid("position", format!("atom {index} is not finite")));
            }
        }
        let domain = match domain {
            Some(domain) => {
                if domain.dim() != n {
                    return Err(Error::DimensionMismatch("domain dimension".into()));
                }
                if let Some(index) = atoms.iter().position(|a| !domain.contains(&a.x)) {
                    return Err(Error::AtomOutsideDomain { index });
                }
                domain
            }
            None => BoxRegion::padded_bounds(atoms.iter().map(|a| a.x.as_slice()))
                .expect("nonempty"),
        };
        Ok(Self { n, d, atoms, domain })
    }

    /// Replaces the domain, checking that every atom lies inside it.
    pub fn with_domain(self, domain: BoxRegion) -> Result<Self> {
        Self::new(self.d, self.atoms, Some(domain))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn domain(&self) -> &BoxRegion {
        &self.domain
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `‖V‖(B_r(center))` over the open ball.
    pub fn mass_in_ball(&self, center: &[f64], r: f64) -> f64 {
        let r2 = r * r;
        self.atoms
            .iter()
            .filter(|a| dist_sq(&a.x, center) < r2)
            .map(|a| a.mass)
            .sum()
    }

    /// Atoms strictly inside `window`, with `window` as the new domain.
    pub fn restrict(&self, window: &BoxRegion) -> Result<Self> {
        if window.dim() != self.n {
            return Err(Error::DimensionMismatch("window dimension".into()));
        }
        if !window.intersects(&self.domain) {
            return Err(invalid("window", "does not intersect the domain"));
        }
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .filter(|a| window.contains_strictly(&a.x))
            .cloned()
            .collect();
        if atoms.is_empty() {
            return Err(Error::EmptyRestriction);
        }
        Ok(Self {
            n: self.n,
            d: self.d,
            atoms,
            domain: window.clone(),
        })
    }

    /// Multiplies every mass by `c > 0`.
    pub fn scale_masses(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(invalid("scale", format!("{c} is not positive")));
        }
        let mut out = self.clone();
        for a in &mut out.atoms {
            a.mass *= c;
        }
        Ok(out)
    }

    /// Distance from the atom nearest to `x` to its own nearest distinct neighbour.
    pub fn local_spacing(&self, x: &[f64]) -> Option<f64> {
        let anchor = self
            .atoms
            .iter()
            .min_by(|a, b| dist_sq(&a.x, x).total_cmp(&dist_sq(&b.x, x)))?;
        self.atoms
            .iter()
            .map(|a| dist_sq(&a.x, &anchor.x))
            .filter(|&d2| d2 > 0.0)
            .min_by(f64::total_cmp)
            .map(f64::sqrt)
    }
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Midpoint sampling of the segment `[a, b]` into `count` equal pieces.
pub fn sample_line(a: &[f64], b: &[f64], count: usize) -> Result<AtomicVarifold> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch("segment endpoints".into()));
    }
    if count < 2 {
        return Err(invalid("count", "need at least 2 atoms"));
    }
    let dir = sub(b, a);
    let length = norm_sq(&dir).sqrt();
    if length == 0.0 {
        return Err(invalid("segment", "endpoints coincide"));
    }
    let plane = Plane::line(&dir)?;
    let mass = length / count as f64;
    let atoms = (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            let x = a.iter().zip(&dir).map(|(ai, di)| ai + t * di).collect();
            Atom::new(x, plane.clone(), mass)
        })
        .collect();
    AtomicVarifold::new(1, atoms, None)
}

/// Equally spaced atoms on a circle in `R²`, carrying the tangent lines.
pub fn sample_circle(center: [f64; 2], radius: f64, count: usize) -> Result<AtomicVarifold> {
    if count < 3 {
        return Err(invalid("count", "need at least 3 atoms"));
    }
    if !(radius > 0.0) {
        return Err(invalid("radius", "must be positive"));
    }
    let mass = 2.0 * PI * radius / count as f64;
    let atoms = (0..count)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / count as f64;
            let (s, c) = theta.sin_cos();
            let plane = Plane::line(&[-s, c]).expect("unit tangent");
            Atom::new(vec![center[0] + radius * c, center[1] + radius * s], plane, mass)
        })
        .collect();
    AtomicVarifold::new(1, atoms, None)
}

/// Graph of `f : [0,1]^d → R` in `R^{d+1}`, sampled at cell centers of a
/// `grid^d` lattice. Area elements and tangents use central differences
/// with spacing equal to the cell width.
pub fn sample_graph(f: &dyn Fn(&[f64]) -> f64, d: usize, grid: usize) -> Result<AtomicVarifold> {
    if !(d == 1 || d == 2) {
        return Err(Error::Unsupported {
            d,
            n: d + 1,
            what: "graph sampling",
        });
    }
    if grid == 0 {
        return Err(invalid("grid", "need at least one cell per axis"));
    }
    let h = 1.0 / grid as f64;
    let cells = grid.pow(d as u32);
    let mut atoms = Vec::with_capacity(cells);
    for flat in 0..cells {
        let mut u = vec![0.0; d];
        let mut rest = flat;
        for uk in u.iter_mut() {
            *uk = ((rest % grid) as f64 + 0.5) * h;
            rest /= grid;
        }
        let mut grad = vec![0.0; d];
        for k in 0..d {
            let mut fwd = u.clone();
            let mut bwd = u.clone();
            fwd[k] += 0.5 * h;
            bwd[k] -= 0.5 * h;
            grad[k] = (f(&fwd) - f(&bwd)) / h;
        }
        let tangents: Vec<Vec<f64>> = (0..d)
            .map(|k| {
                let mut t = vec![0.0; d + 1];
                t[k] = 1.0;
                t[d] = grad[k];
                t
            })
            .collect();
        let mut x = u.clone();
        x.push(f(&u));
        let area = (1.0 + norm_sq(&grad)).sqrt() * h.powi(d as i32);
        atoms.push(Atom::new(x, Plane::from_basis(&tangents)?, area));
    }
    AtomicVarifold::new(d, atoms, None)
}

/// Seeded uniform cloud in the unit square with unit mass in total and
/// random tangent lines: a 2-dimensional measure posing as a 1-varifold.
pub fn sample_square_cloud(count: usize, seed: u64) -> Result<AtomicVarifold> {
    if count == 0 {
        return Err(invalid("count", "need at least one atom"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mass = 1.0 / count as f64;
    let atoms = (0..count)
        .map(|_| {
            let x = vec![rng.gen::<f64>(), rng.gen::<f64>()];
            let theta = rng.gen::<f64>() * PI;
            Atom::new(x, Plane::line(&[theta.cos(), theta.sin()]).expect("unit"), mass)
        })
        .collect();
    AtomicVarifold::new(1, atoms, None)
}
