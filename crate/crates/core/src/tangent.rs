//! Tangent-plane estimation by minimizing `P ↦ E_α(x, P, V)` over `G(d, n)`.
//!
//! Since `d(v, P)² = |v|² − |Π_P v|²`, the energy at `P` equals
//! `trace(M) − trace(Π_P M)` with the kernel-weighted second moment
//! `M = Σ m_j W(ρ_j) (y_j − x)(y_j − x)ᵀ`. Its minimizers are exactly the
//! dominant `d`-dimensional eigenspaces of `M`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::energy::{energy_alpha_value, weight_kernel, EnergyParams};
use crate::error::{invalid, Error, Result};
use crate::grassmann::{principal_subspace, Plane, SymMatrix};
use crate::varifold::{dist_sq, AtomicVarifold};

/// Minimizing plane of `E_α(x, ·, V)` and the spectrum it came from.
#[derive(Debug, Clone)]
pub struct TangentEstimate {
    pub plane: Plane,
    /// `E_α` at `plane`, i.e. the sum of the `n − d` smallest eigenvalues of `M`.
    pub energy: f64,
    /// Eigenvalues of `M`, descending.
    pub eigenvalues: Vec<f64>,
    pub spectral_gap: f64,
    pub degenerate: bool,
}

/// `M = Σ m_j W(ρ_j) (y_j − x)(y_j − x)ᵀ` over atoms with `ρ_j < r_max`.
pub fn moment_matrix(x: &[f64], v: &AtomicVarifold, params: &EnergyParams) -> SymMatrix {
    let n = v.ambient_dim();
    let d = v.dim();
    let r2_max = params.r_max() * params.r_max();
    let mut m = SymMatrix::zeros(n);
    let mut diff = vec![0.0; n];
    for atom in v.atoms() {
        let r2 = dist_sq(&atom.x, x);
        if r2 >= r2_max || r2 == 0.0 || !params.sees(&atom.x) {
            continue;
        }
        for (k, (a, b)) in atom.x.iter().zip(x).enumerate() {
            diff[k] = a - b;
        }
        m.add_outer(atom.mass * weight_kernel(r2.sqrt(), params, d), &diff);
    }
    m
}

pub fn estimate_tangent(
    x: &[f64],
    v: &AtomicVarifold,
    params: &EnergyParams,
) -> Result<TangentEstimate> {
    if x.len() != v.ambient_dim() {
        return Err(Error::DimensionMismatch("evaluation point".into()));
    }
    let m = moment_matrix(x, v, params);
    if m.frobenius_norm() == 0.0 {
        return Err(Error::NoLocalData);
    }
    let d = v.dim();
    let spectrum = principal_subspace(&m, d)?;
    let energy = spectrum.eigenvalues[d..].iter().sum::<f64>().max(0.0);
    Ok(TangentEstimate {
        plane: spectrum.plane,
        energy,
        eigenvalues: spectrum.eigenvalues,
        spectral_gap: spectrum.spectral_gap,
        degenerate: spectrum.degenerate,
    })
}

/// Pointwise [`estimate_tangent`], in input order; failures stay per point.
pub fn tangent_field(
    points: &[Vec<f64>],
    v: &AtomicVarifold,
    params: &EnergyParams,
) -> Vec<Result<TangentEstimate>> {
    points
        .par_iter()
        .map(|x| estimate_tangent(x, v, params))
        .collect()
}

/// `k` sample planes covering `G(d, n)` for `(d, n) ∈ {(1,2), (1,3), (2,3)}`.
///
/// Lines in the plane use equally spaced angles in `[0, π)`; in `R³` the
/// directions (lines) or normals (planes) follow a Fibonacci lattice on the
/// upper hemisphere.
pub fn sample_planes(d: usize, n: usize, k: usize) -> Result<Vec<Plane>> {
    match (d, n) {
        (1, 2) => Ok((0..k)
            .map(|j| {
                let t = PI * j as f64 / k as f64;
                Plane::line(&[t.cos(), t.sin()]).expect("unit direction")
            })
            .collect()),
        (1, 3) | (2, 3) => {
            let golden = PI * (3.0 - 5f64.sqrt());
            Ok((0..k)
                .map(|j| {
                    let z = 1.0 - (j as f64 + 0.5) / k as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * j as f64;
                    let u = [r * phi.cos(), r * phi.sin(), z];
                    if d == 1 {
                        Plane::line(&u).expect("unit direction")
                    } else {
                        plane_with_normal(u)
                    }
                })
                .collect())
        }
        _ => Err(Error::Unsupported {
            d,
            n,
            what: "grid-search oracle",
        }),
    }
}

fn plane_with_normal(u: [f64; 3]) -> Plane {
    // the canonical axis least aligned with u keeps the cross products well conditioned
    let axis = (0..3)
        .min_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs()))
        .unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let a = cross(u, e);
    let b = cross(u, a);
    Plane::from_basis(&[a, b]).expect("independent tangents")
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Best of `k` sampled planes by direct evaluation of `E_α`.
pub fn grid_search_oracle(
    x: &[f64],
    v: &AtomicVarifold,
    params: &EnergyParams,
    k: usize,
) -> Result<(Plane, f64)> {
    if k < 16 {
        return Err(invalid("k", "need at least 16 samples"));
    }
    let candidates = sample_planes(v.dim(), v.ambient_dim(), k)?;
    let energies: Vec<f64> = candidates
        .par_iter()
        .map(|p| energy_alpha_value(x, p, v, params))
        .collect();
    let best = energies
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("k >= 16");
    Ok((candidates[best].clone(), energies[best]))
}
