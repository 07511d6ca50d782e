//! Averaged height-excess energies.
//!
//! For an atomic mass measure the radial integral
//!
//! ```text
//! E_α(x, P, V) = ∫_α^{r_max} r^{-(d+1)} ∫_{B_r(x)} (d(y − x, P) / r)² d‖V‖(y) dr
//! ```
//!
//! collapses onto the atoms: each atom at distance `ρ` is seen by every
//! radius `r > ρ`, so it contributes `m · d(y − x, P)² · W(ρ)` with
//! `W(ρ) = ∫_{max(α, ρ)}^{r_max} r^{-(d+3)} dr`. [`energy_alpha`] uses this
//! closed form; [`energy_alpha_oracle`] integrates the radial integral
//! numerically and shares none of that algebra.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grassmann::Plane;
use crate::varifold::{dist_sq, AtomicVarifold, BoxRegion};

/// Scale parameters of `E_α` and of its windowed variant `E_α^ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyParams {
    alpha: f64,
    r_max: f64,
    window: Option<BoxRegion>,
}

impl EnergyParams {
    /// Global energy: radii in `[alpha, 1]`.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_r_max(alpha, 1.0)
    }

    pub fn with_r_max(alpha: f64, r_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= r_max && r_max <= 1.0) {
            return Err(invalid(
                "alpha",
                format!("need 0 < alpha <= r_max <= 1, got alpha={alpha}, r_max={r_max}"),
            ));
        }
        Ok(Self {
            alpha,
            r_max,
            window: None,
        })
    }

    /// Local energy on the window `ω ⋐ Ω`; radii are truncated at
    /// `min(1, d(ω̄, Ω^c) / 2)`.
    pub fn local(alpha: f64, window: BoxRegion, domain: &BoxRegion) -> Result<Self> {
        let r_max = (domain.inner_margin(&window) / 2.0).min(1.0);
        let mut params = Self::with_r_max(alpha, r_max)?;
        params.window = Some(window);
        Ok(params)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn window(&self) -> Option<&BoxRegion> {
        self.window.as_ref()
    }

    #[inline]
    pub(crate) fn sees(&self, y: &[f64]) -> bool {
        self.window.as_ref().is_none_or(|w| w.contains_strictly(y))
    }
}

/// `W(ρ) = ∫_{max(α,ρ)}^{r_max} r^{-(d+3)} dr`, zero once `ρ >= r_max`.
#[inline]
pub fn weight_kernel(rho: f64, params: &EnergyParams, d: usize) -> f64 {
    if rho >= params.r_max {
        return 0.0;
    }
    let k = -((d + 2) as i32);
    let lo = params.alpha.max(rho);
    (lo.powi(k) - params.r_max.powi(k)) / (d + 2) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub value: f64,
    /// Per-atom terms in atom order; zero for atoms outside the window or beyond `r_max`.
    pub contributions: Vec<f64>,
    pub params: EnergyParams,
}

/// Term of one atom: `m · d(y − x, P)² · W(|y − x|)`.
#[inline]
fn atom_term(x: &[f64], p: &Plane, y: &[f64], mass: f64, params: &EnergyParams, d: usize) -> f64 {
    let r2 = dist_sq(y, x);
    if r2 >= params.r_max * params.r_max || !params.sees(y) {
        return 0.0;
    }
    let mut diff = [0.0; 8];
    let dsq = if y.len() <= diff.len() {
        for (k, (a, b)) in y.iter().zip(x).enumerate() {
            diff[k] = a - b;
        }
        p.dist_sq_to(&diff[..y.len()])
    } else {
        let v: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        p.dist_sq_to(&v)
    };
    if dsq == 0.0 {
        return 0.0;
    }
    mass * dsq * weight_kernel(r2.sqrt(), params, d)
}

/// `E_α(x, P, V)` (or `E_α^ω` when the params carry a window), exact on atoms.
pub fn energy_alpha(x: &[f64], p: &Plane, v: &AtomicVarifold, params: &EnergyParams) -> EnergyReport {
    let d = v.dim();
    let contributions: Vec<f64> = v
        .atoms()
        .iter()
        .map(|a| atom_term(x, p, &a.x, a.mass, params, d))
        .collect();
    EnergyReport {
        value: contributions.iter().sum(),
        contributions,
        params: params.clone(),
    }
}

/// Same value as [`energy_alpha`] without the per-atom breakdown.
pub fn energy_alpha_value(x: &[f64], p: &Plane, v: &AtomicVarifold, params: &EnergyParams) -> f64 {
    let d = v.dim();
    v.atoms()
        .iter()
        .map(|a| atom_term(x, p, &a.x, a.mass, params, d))
        .sum()
}

/// Midpoint quadrature in `r` of `r^{-(d+1)} Σ_{|y−x|<r} m (d(y−x,P)/r)²`.
///
/// The inner ball sum jumps whenever `r` crosses an atom, so nodes are laid
/// out piecewise between consecutive atom distances (about `steps` nodes in
/// total, at least one per piece).
pub fn energy_alpha_oracle(
    x: &[f64],
    p: &Plane,
    v: &AtomicVarifold,
    params: &EnergyParams,
    steps: usize,
) -> Result<f64> {
    if steps < 10 {
        return Err(invalid("steps", "need at least 10 quadrature nodes"));
    }
    let (alpha, r_max) = (params.alpha, params.r_max);
    if alpha >= r_max {
        return Ok(0.0);
    }
    let d = v.dim() as i32;

    let mut seen: Vec<(f64, f64)> = v
        .atoms()
        .iter()
        .filter(|a| params.sees(&a.x))
        .map(|a| {
            let diff: Vec<f64> = a.x.iter().zip(x).map(|(s, t)| s - t).collect();
            let rho = diff.iter().map(|c| c * c).sum::<f64>().sqrt();
            let height = p.dist_to(&diff);
            (rho, a.mass * height * height)
        })
        .filter(|(rho, _)| *rho < r_max)
        .collect();
    seen.sort_by(|a, b| a.0.total_cmp(&b.0));
    let radii: Vec<f64> = seen.iter().map(|s| s.0).collect();
    let mut prefix = Vec::with_capacity(seen.len() + 1);
    prefix.push(0.0);
    for (_, w) in &seen {
        prefix.push(prefix.last().unwrap() + w);
    }

    let mut breaks = vec![alpha];
    breaks.extend(radii.iter().copied().filter(|&r| r > alpha));
    breaks.push(r_max);
    breaks.dedup();

    let span = r_max - alpha;
    let mut total = 0.0;
    for piece in breaks.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        let nodes = ((steps as f64 * (b - a) / span).round() as usize).max(1);
        let dr = (b - a) / nodes as f64;
        for k in 0..nodes {
            let r = a + (k as f64 + 0.5) * dr;
            let inside = radii.partition_point(|&rho| rho < r);
            total += prefix[inside] * r.powi(-(d + 3)) * dr;
        }
    }
    Ok(total)
}

/// `(1/r^d) ∫_{B_r(x)} (d(y−x, P)/r)² d‖V‖(y)`.
pub fn height_excess(x: &[f64], p: &Plane, v: &AtomicVarifold, r: f64) -> f64 {
    let r2 = r * r;
    let d = v.dim() as i32;
    let sum: f64 = v
        .atoms()
        .iter()
        .filter(|a| dist_sq(&a.x, x) < r2)
        .map(|a| {
            let diff: Vec<f64> = a.x.iter().zip(x).map(|(s, t)| s - t).collect();
            a.mass * p.dist_sq_to(&diff)
        })
        .sum();
    sum / r.powi(d + 2)
}

/// Seeded uniform subsample of evaluation atoms, reweighted by `N / k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subsample {
    pub fraction: f64,
    pub seed: u64,
}

/// `∫ E_α(x, P, V_mass) dV_eval(x, P)` as an atomic sum over `v_eval`.
pub fn integrated_energy(
    v_eval: &AtomicVarifold,
    v_mass: &AtomicVarifold,
    params: &EnergyParams,
    subsample: Option<Subsample>,
) -> Result<f64> {
    if v_eval.dim() != v_mass.dim() || v_eval.ambient_dim() != v_mass.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "evaluation and mass varifolds differ in (d, n)".into(),
        ));
    }
    let eligible: Vec<usize> = (0..v_eval.len())
        .filter(|&i| params.sees(&v_eval.atoms()[i].x))
        .collect();
    let (chosen, reweight) = match subsample {
        None => (eligible, 1.0),
        Some(s) => {
            if !(s.fraction > 0.0 && s.fraction <= 1.0) {
                return Err(invalid("fraction", format!("{} not in (0, 1]", s.fraction)));
            }
            let total = eligible.len();
            let k = ((s.fraction * total as f64).round() as usize).clamp(1.min(total), total);
            if k == total {
                (eligible, 1.0)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
                let mut picks = sample(&mut rng, total, k).into_vec();
                picks.sort_unstable();
                (
                    picks.into_iter().map(|i| eligible[i]).collect(),
                    total as f64 / k as f64,
                )
            }
        }
    };
    let terms: Vec<f64> = chosen
        .par_iter()
        .map(|&i| {
            let a = &v_eval.atoms()[i];
            a.mass * energy_alpha_value(&a.x, &a.plane, v_mass, params)
        })
        .collect();
    Ok(reweight * terms.iter().sum::<f64>())
}
