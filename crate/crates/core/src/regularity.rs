//! Checkable hypotheses of quantitative rectifiability: Ahlfors density
//! bounds, Jones `β₂` numbers, and a per-scale report over a sequence of
//! discrete varifolds.

use std::f64::consts::PI;
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::energy::{integrated_energy, EnergyParams, Subsample};
use crate::error::{invalid, Error, Result};
use crate::grassmann::{symmetric_eigen, SymMatrix};
use crate::gridding::DiscreteVarifold;
use crate::varifold::{dist_sq, AtomicVarifold};

/// Radii per center on the log grid of [`ahlfors_constants`].
pub const DENSITY_RADII: usize = 32;

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * PI / d as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub r: f64,
    /// `‖V‖(B_r(x)) / (ω_d r^d)`; `None` when `r >= d(x, Ω^c)`.
    pub ratio: Option<f64>,
}

pub fn density_ratios(v: &AtomicVarifold, x: &[f64], radii: &[f64]) -> Vec<DensitySample> {
    let reach = v.domain().dist_to_complement(x);
    let omega = unit_ball_volume(v.dim());
    radii
        .iter()
        .map(|&r| DensitySample {
            r,
            ratio: (r > 0.0 && r < reach)
                .then(|| v.mass_in_ball(x, r) / (omega * r.powi(v.dim() as i32))),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhlforsConstants {
    pub c1: f64,
    pub c2: f64,
    /// Number of (center, radius) pairs that entered the bounds.
    pub pairs: usize,
}

/// Seeded, mass-weighted estimate of the density bounds `C₁ r^d <= ‖V‖(B_r(x)) <= C₂ r^d`
/// for `beta_cut < r < d(x, Ω^c)`.
pub fn ahlfors_constants(
    v: &AtomicVarifold,
    beta_cut: f64,
    sample: usize,
    seed: u64,
) -> Result<AhlforsConstants> {
    if !(beta_cut > 0.0) {
        return Err(invalid("beta_cut", "must be positive"));
    }
    if sample == 0 {
        return Err(invalid("sample", "need at least one center"));
    }
    let weights = WeightedIndex::new(v.atoms().iter().map(|a| a.mass))
        .map_err(|e| invalid("mass", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<usize> = (0..sample).map(|_| weights.sample(&mut rng)).collect();
    let omega = unit_ball_volume(v.dim());
    let d = v.dim() as i32;

    let per_center: Vec<Option<(f64, f64, usize)>> = centers
        .par_iter()
        .map(|&i| {
            let x = &v.atoms()[i].x;
            let reach = v.domain().dist_to_complement(x);
            if reach <= beta_cut {
                return None;
            }
            let mut by_distance: Vec<(f64, f64)> = v
                .atoms()
                .iter()
                .map(|a| (dist_sq(&a.x, x), a.mass))
                .filter(|(r2, _)| *r2 < reach * reach)
                .collect();
            by_distance.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cumulative = Vec::with_capacity(by_distance.len() + 1);
            cumulative.push(0.0);
            for (_, m) in &by_distance {
                cumulative.push(cumulative.last().unwrap() + m);
            }
            let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
            let ratio = reach / beta_cut;
            for k in 0..DENSITY_RADII {
                let r = beta_cut * ratio.powf((k as f64 + 0.5) / DENSITY_RADII as f64);
                let inside = by_distance.partition_point(|(r2, _)| *r2 < r * r);
                let density = cumulative[inside] / (omega * r.powi(d));
                lo = lo.min(density);
                hi = hi.max(density);
            }
            Some((lo, hi, DENSITY_RADII))
        })
        .collect();

    let mut out = AhlforsConstants {
        c1: f64::INFINITY,
        c2: 0.0,
        pairs: 0,
    };
    for (lo, hi, count) in per_center.into_iter().flatten() {
        out.c1 = out.c1.min(lo);
        out.c2 = out.c2.max(hi);
        out.pairs += count;
    }
    if out.pairs == 0 {
        return Err(Error::NoValidDensitySample);
    }
    Ok(out)
}

/// `β₂(x, r)`: the normalized L² distance of the atoms in `B_r(x)` to
/// their best affine `d`-plane (mass centroid plus principal subspace).
pub fn jones_beta(x: &[f64], r: f64, v: &AtomicVarifold) -> f64 {
    let n = v.ambient_dim();
    let d = v.dim();
    let r2 = r * r;
    let inside: Vec<_> = v.atoms().iter().filter(|a| dist_sq(&a.x, x) < r2).collect();
    let mass: f64 = inside.iter().map(|a| a.mass).sum();
    if inside.is_empty() || mass == 0.0 {
        return 0.0;
    }
    let mut centroid = vec![0.0; n];
    for a in &inside {
        for (c, y) in centroid.iter_mut().zip(&a.x) {
            *c += a.mass * y;
        }
    }
    for c in &mut centroid {
        *c /= mass;
    }
    let mut scatter = SymMatrix::zeros(n);
    let mut diff = vec![0.0; n];
    for a in &inside {
        for k in 0..n {
            diff[k] = a.x[k] - centroid[k];
        }
        scatter.add_outer(a.mass, &diff);
    }
    let residual: f64 = symmetric_eigen(&scatter).values[d..].iter().sum::<f64>().max(0.0);
    (residual / r.powi(d as i32 + 2)).sqrt()
}

/// Lower end of the radial range in [`jones_integral`]: twice the local atom spacing.
pub fn jones_floor(x: &[f64], v: &AtomicVarifold) -> Option<f64> {
    v.local_spacing(x).map(|s| 2.0 * s)
}

/// `∫ β₂(x, r)² dr/r` over `r ∈ [r_floor, 1]` by the midpoint rule in `ln r`.
pub fn jones_integral(x: &[f64], v: &AtomicVarifold, r_steps: usize) -> Result<f64> {
    if r_steps < 16 {
        return Err(invalid("r_steps", "need at least 16 radial nodes"));
    }
    let Some(floor) = jones_floor(x, v) else {
        return Ok(0.0);
    };
    if floor >= 1.0 {
        return Ok(0.0);
    }
    let span = -floor.ln();
    let du = span / r_steps as f64;
    Ok((0..r_steps)
        .map(|k| {
            let r = (floor.ln() + (k as f64 + 0.5) * du).exp();
            let b = jones_beta(x, r, v);
            b * b * du
        })
        .sum())
}

/// One scale of a discretization sequence.
#[derive(Debug, Clone)]
pub struct ScaleInput {
    pub varifold: DiscreteVarifold,
    pub alpha: f64,
    pub beta_cut: f64,
}

#[derive(Debug, Clone)]
pub struct ReportConfig {
    /// Quadrature nodes per axis when atomizing each scale.
    pub q: usize,
    pub density_samples: usize,
    pub seed: u64,
    /// Density hypothesis passes when `max c₂ / min c₁` stays within this band.
    pub density_band: f64,
    /// Energy hypothesis passes when `max/min` over the trailing window stays below this.
    pub energy_ratio_bound: f64,
    pub energy_window: usize,
    pub jones_points: usize,
    pub jones_steps: usize,
    pub subsample: Option<Subsample>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            q: crate::gridding::DEFAULT_QUADRATURE,
            density_samples: 64,
            seed: 0,
            density_band: 4.0,
            energy_ratio_bound: 2.0,
            energy_window: 3,
            jones_points: 8,
            jones_steps: 32,
            subsample: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRow {
    pub h: f64,
    pub alpha: f64,
    pub beta_cut: f64,
    pub c1: f64,
    pub c2: f64,
    pub integrated_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Distance to the threshold; positive when passing.
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub beta_cut: f64,
    pub jones_integrals: Vec<f64>,
    pub energy_sup: f64,
    pub last_energy_increment: f64,
    pub rows: Vec<ScaleRow>,
    pub density: HypothesisCheck,
    pub energy: HypothesisCheck,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.density.passed && self.energy.passed
    }
}

/// Measures the density and energy hypotheses at every scale of `seq`.
pub fn hypothesis_report(seq: &[ScaleInput], config: &ReportConfig) -> Result<RegularityReport> {
    if seq.is_empty() {
        return Err(invalid("sequence", "need at least one scale"));
    }
    if seq.windows(2).any(|w| w[1].alpha >= w[0].alpha) {
        return Err(invalid("alpha", "must be strictly decreasing along the sequence"));
    }
    let mut rows = Vec::with_capacity(seq.len());
    let mut finest = None;
    for scale in seq {
        let atoms = scale.varifold.atomize(config.q)?;
        let density = ahlfors_constants(&atoms, scale.beta_cut, config.density_samples, config.seed)?;
        let params = EnergyParams::new(scale.alpha)?;
        let energy = integrated_energy(&atoms, &atoms, &params, config.subsample)?;
        rows.push(ScaleRow {
            h: scale.varifold.grid().h(),
            alpha: scale.alpha,
            beta_cut: scale.beta_cut,
            c1: density.c1,
            c2: density.c2,
            integrated_energy: energy,
        });
        finest = Some(atoms);
    }
    let finest = finest.expect("nonempty");

    let jones_integrals = if config.jones_points == 0 {
        Vec::new()
    } else {
        let weights = WeightedIndex::new(finest.atoms().iter().map(|a| a.mass))
            .map_err(|e| invalid("mass", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
        let centers: Vec<usize> = (0..config.jones_points)
            .map(|_| weights.sample(&mut rng))
            .collect();
        centers
            .par_iter()
            .map(|&i| jones_integral(&finest.atoms()[i].x, &finest, config.jones_steps))
            .collect::<Result<_>>()?
    };

    let c1_hat = rows.iter().map(|r| r.c1).fold(f64::INFINITY, f64::min);
    let c2_hat = rows.iter().map(|r| r.c2).fold(0.0, f64::max);
    let spread = c2_hat / c1_hat;
    let density = HypothesisCheck {
        name: "density",
        passed: c1_hat > 0.0 && spread <= config.density_band,
        margin: config.density_band - spread,
        detail: format!(
            "C1={c1_hat:.6} C2={c2_hat:.6} C2/C1={spread:.4} (band {})",
            config.density_band
        ),
    };

    let energies: Vec<f64> = rows.iter().map(|r| r.integrated_energy).collect();
    let energy_sup = energies.iter().copied().fold(0.0, f64::max);
    let last_energy_increment = match energies.len() {
        0 | 1 => 0.0,
        k => energies[k - 1] - energies[k - 2],
    };
    let tail = &energies[energies.len().saturating_sub(config.energy_window.max(1))..];
    let (tmin, tmax) = tail
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let growth = if tmax == 0.0 { 1.0 } else { tmax / tmin };
    let energy = HypothesisCheck {
        name: "energy",
        passed: growth.is_finite() && growth < config.energy_ratio_bound,
        margin: config.energy_ratio_bound - growth,
        detail: format!(
            "sup={energy_sup:.6} last increment={last_energy_increment:.6} trailing max/min={growth:.4} (bound {})",
            config.energy_ratio_bound
        ),
    };

    Ok(RegularityReport {
        c1_hat,
        c2_hat,
        beta_cut: seq.last().unwrap().beta_cut,
        jones_integrals,
        energy_sup,
        last_energy_increment,
        rows,
        density,
        energy,
    })
}

impl fmt::Display for RegularityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scales: {}", self.rows.len())?;
        for row in &self.rows {
            writeln!(
                f,
                "  h={} alpha={} beta_cut={} c1={} c2={} energy={}",
                row.h, row.alpha, row.beta_cut, row.c1, row.c2, row.integrated_energy
            )?;
        }
        writeln!(f, "c1_hat={} c2_hat={} beta_cut={}", self.c1_hat, self.c2_hat, self.beta_cut)?;
        if !self.jones_integrals.is_empty() {
            let max = self.jones_integrals.iter().copied().fold(0.0, f64::max);
            writeln!(f, "jones integrals: {} points, max={}", self.jones_integrals.len(), max)?;
        }
        for check in [&self.density, &self.energy] {
            writeln!(
                f,
                "{}: {} (margin {:.4}) {}",
                check.name,
                if check.passed { "pass" } else { "fail" },
                check.margin,
                check.detail
            )?;
        }
        write!(f, "verdict: {}", if self.passed() { "pass" } else { "fail" })
    }
}
