//! Points of the Grassmannian `G(d, n)` and the symmetric eigen-solver that
//! every plane minimization in this crate reduces to.
//!
//! A [`Plane`] keeps an orthonormal frame together with its orthogonal
//! projector. Distances between planes are measured on projectors, with the
//! Frobenius norm as the default and the operator norm available for
//! comparison.

use crate::error::{invalid, Error, Result};

/// Relative residual below which a Gram–Schmidt step is rejected.
pub const FRAME_RANK_TOL: f64 = 1e-10;

/// Relative off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-12;

/// A principal subspace is flagged degenerate when `λ_d − λ_{d+1} <= DEGENERACY_RTOL · |λ_1|`.
pub const DEGENERACY_RTOL: f64 = 1e-6;

const MAX_SWEEPS: usize = 100;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Dense symmetric matrix. Writes go through [`SymMatrix::set`] and
/// [`SymMatrix::add_outer`], which keep both triangles identical.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from row-major rows, mirroring the upper triangle.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("matrix rows must be square".into()));
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, rows[i][j]);
            }
        }
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    /// `self += w · v vᵀ`
    pub fn add_outer(&mut self, w: f64, v: &[f64]) {
        let n = self.n;
        for i in 0..n {
            let wi = w * v[i];
            for j in i..n {
                let value = self.data[i * n + j] + wi * v[j];
                self.data[i * n + j] = value;
                self.data[j * n + i] = value;
            }
        }
    }

    /// `self += w · other`
    pub fn add_scaled(&mut self, w: f64, other: &SymMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += w * b;
        }
    }

    pub fn scale(&mut self, w: f64) {
        for a in &mut self.data {
            *a *= w;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm_sq(&self.data).sqrt()
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: sub(&self.data, &other.data),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], v))
            .collect()
    }

    /// Column `j` (equal to row `j`).
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    /// `trace(self · other)` for symmetric arguments.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        dot(&self.data, &other.data)
    }

    /// Operator (spectral) norm, i.e. the largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        symmetric_eigen(self)
            .values
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Eigenpairs sorted by descending eigenvalue; `vectors[k]` pairs with `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigen-decomposition.
///
/// Sweeps rotate every off-diagonal pair `(p, q)` with `p < q` in row order
/// until the off-diagonal Frobenius norm drops below `JACOBI_TOL · ‖m‖_F`.
/// Equal eigenvalues keep their column order after the stable sort, so ties
/// resolve towards lower canonical axes.
pub fn symmetric_eigen(m: &SymMatrix) -> SymmetricEigen {
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = SymMatrix::identity(n).data;
    let scale = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
        }
        if off.sqrt() <= JACOBI_TOL * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    SymmetricEigen {
        values: order.iter().map(|&i| a[i * n + i]).collect(),
        vectors: order
            .iter()
            .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
            .collect(),
    }
}

/// A `d`-dimensional linear subspace of `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    n: usize,
    d: usize,
    basis: Vec<f64>,
    projector: SymMatrix,
}

impl Plane {
    /// Orthonormalizes `vectors` with two-pass modified Gram–Schmidt.
    pub fn from_basis<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(invalid("basis", "at least one vector is required"));
        }
        let n = vectors[0].as_ref().len();
        if vectors.iter().any(|v| v.as_ref().len() != n) {
            return Err(Error::DimensionMismatch(
                "basis vectors have different lengths".into(),
            ));
        }
        if n < 2 || d >= n {
            return Err(invalid("basis", format!("need 1 <= d < n, got d={d}, n={n}")));
        }

        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut rank = 0;
        for v in vectors {
            let v = v.as_ref();
            let original = norm_sq(v).sqrt();
            let mut w = v.to_vec();
            for _ in 0..2 {
                for b in &frame {
                    let c = dot(&w, b);
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= c * bi;
                    }
                }
            }
            let residual = norm_sq(&w).sqrt();
            if original == 0.0 || residual <= FRAME_RANK_TOL * original {
                continue;
            }
            rank += 1;
            frame.push(w.iter().map(|x| x / residual).collect());
        }
        if rank < d {
            return Err(Error::DegenerateFrame { rank, expected: d });
        }
        Ok(Self::from_orthonormal(n, frame))
    }

    /// Keeps `vectors` verbatim when they are orthonormal to within
    /// `1e-12`; otherwise falls back to [`Plane::from_basis`].
    pub fn from_orthonormal_basis<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Self> {
        let orthonormal = !vectors.is_empty()
            && vectors.iter().enumerate().all(|(i, a)| {
                vectors.iter().enumerate().all(|(j, b)| {
                    let a = a.as_ref();
                    let b = b.as_ref();
                    let target = if i == j { 1.0 } else { 0.0 };
                    a.len() == b.len() && (dot(a, b) - target).abs() <= 1e-12
                })
            });
        let n = vectors.first().map_or(0, |v| v.as_ref().len());
        if orthonormal && n >= 2 && vectors.len() < n {
            Ok(Self::from_orthonormal(
                n,
                vectors.iter().map(|v| v.as_ref().to_vec()).collect(),
            ))
        } else {
            Self::from_basis(vectors)
        }
    }

    fn from_orthonormal(n: usize, frame: Vec<Vec<f64>>) -> Self {
        let d = frame.len();
        let mut projector = SymMatrix::zeros(n);
        for b in &frame {
            projector.add_outer(1.0, b);
        }
        Self {
            n,
            d,
            basis: frame.concat(),
            projector,
        }
    }

    /// The line spanned by `direction`.
    pub fn line(direction: &[f64]) -> Result<Self> {
        Self::from_basis(&[direction])
    }

    /// The span of the given canonical axes of `R^n`.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let vectors: Vec<Vec<f64>> = axes
            .iter()
            .map(|&k| {
                let mut e = vec![0.0; n];
                if k < n {
                    e[k] = 1.0;
                }
                e
            })
            .collect();
        Self::from_basis(&vectors)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Orthonormal basis vector `k`.
    pub fn basis_vector(&self, k: usize) -> &[f64] {
        &self.basis[k * self.n..(k + 1) * self.n]
    }

    /// Row-major `d × n` orthonormal frame.
    pub fn basis(&self) -> &[f64] {
        &self.basis
    }

    pub fn projector(&self) -> &SymMatrix {
        &self.projector
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for k in 0..self.d {
            let b = self.basis_vector(k);
            let c = dot(v, b);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// `|v − Π v|`, the distance from `v` to the subspace.
    pub fn dist_to(&self, v: &[f64]) -> f64 {
        self.dist_sq_to(v).sqrt()
    }

    /// `|v − Π v|²`, evaluated on the residual vector.
    #[inline]
    pub fn dist_sq_to(&self, v: &[f64]) -> f64 {
        const STACK: usize = 8;
        if self.n > STACK {
            let p = self.project(v);
            return v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
        }
        let mut residual = [0.0; STACK];
        residual[..self.n].copy_from_slice(v);
        for k in 0..self.d {
            let b = self.basis_vector(k);
            let c = dot(v, b);
            for (r, bi) in residual.iter_mut().zip(b) {
                *r -= c * bi;
            }
        }
        norm_sq(&residual[..self.n])
    }

    fn check_same_shape(&self, other: &Plane) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "planes in G({},{}) and G({},{})",
                self.d, self.n, other.d, other.n
            )));
        }
        Ok(())
    }

    /// Frobenius distance `‖Π_P − Π_Q‖_F`.
    pub fn distance(&self, other: &Plane) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.projector.sub(&other.projector).frobenius_norm())
    }

    /// Operator-norm distance `‖Π_P − Π_Q‖_op`, the sine of the largest principal angle.
    pub fn distance_op(&self, other: &Plane) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.projector.sub(&other.projector).operator_norm())
    }

    /// Largest principal angle in radians.
    pub fn angle(&self, other: &Plane) -> Result<f64> {
        Ok(self.distance_op(other)?.min(1.0).asin())
    }
}

/// Dominant `d`-dimensional eigenspace of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct PrincipalSubspace {
    pub plane: Plane,
    /// All `n` eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `λ_d − λ_{d+1}`.
    pub spectral_gap: f64,
    /// Set when the gap is too small for the subspace to be unique.
    pub degenerate: bool,
}

pub fn principal_subspace(m: &SymMatrix, d: usize) -> Result<PrincipalSubspace> {
    let n = m.dim();
    if d == 0 || d >= n {
        return Err(invalid("d", format!("need 1 <= d < n, got d={d}, n={n}")));
    }
    let eig = symmetric_eigen(m);
    let spectral_gap = eig.values[d - 1] - eig.values[d];
    let degenerate = spectral_gap <= DEGENERACY_RTOL * eig.values[0].abs();
    let frame: Vec<Vec<f64>> = eig.vectors[..d].to_vec();
    // Jacobi keeps the accumulated rotation orthogonal, but renormalize anyway.
    let plane = Plane::from_basis(&frame)
        .unwrap_or_else(|_| Plane::from_orthonormal(n, frame));
    Ok(PrincipalSubspace {
        plane,
        eigenvalues: eig.values,
        spectral_gap,
        degenerate,
    })
}

/// Weighted mean of projectors and its dominant subspace.
///
/// The returned plane minimizes `Σ w_j ‖Π_P − Π_j‖_F²` over `G(d, n)`.
pub fn mean_plane_spectrum(entries: &[(&Plane, f64)]) -> Result<PrincipalSubspace> {
    let first = entries
        .first()
        .ok_or(Error::EmptyCell)?
        .0;
    let (n, d) = (first.n, first.d);
    let mut total = 0.0;
    let mut mean = SymMatrix::zeros(n);
    for (plane, w) in entries {
        first.check_same_shape(plane)?;
        if *w < 0.0 || !w.is_finite() {
            return Err(invalid("weight", format!("{w} is not a finite nonnegative weight")));
        }
        if *w > 0.0 {
            mean.add_scaled(*w, &plane.projector);
            total += w;
        }
    }
    if total <= 0.0 {
        return Err(Error::EmptyCell);
    }
    mean.scale(1.0 / total);
    principal_subspace(&mean, d)
}

pub fn mean_plane(entries: &[(&Plane, f64)]) -> Result<Plane> {
    mean_plane_spectrum(entries).map(|s| s.plane)
}
