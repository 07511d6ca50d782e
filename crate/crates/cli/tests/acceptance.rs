//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! terminal; the process fails if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varifold_cli::{cmd_sweep, discretize_atoms, load_atoms, ScaleRuleArgs};
use varifold_core::{
    ahlfors_constants, density_ratios, energy_alpha_oracle, energy_alpha_value, estimate_tangent,
    first_variation, jones_integral, sample_circle, sample_line, sample_square_cloud, Atom,
    AtomicVarifold, BoxRegion, EnergyParams, Plane,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < budget;
    let passed = outcome.passed && in_time;
    println!(
        "criterion {id} {}: {name}: {} [{:.2?} of {:.0?}]",
        if passed { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed,
        budget
    );
    passed
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.1 && norm <= 1.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

fn random_plane(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Plane {
    loop {
        let frame: Vec<Vec<f64>> = (0..d).map(|_| random_unit(rng, n)).collect();
        if let Ok(p) = Plane::from_basis(&frame) {
            return p;
        }
    }
}

fn random_varifold(rng: &mut ChaCha8Rng, d: usize, n: usize, count: usize) -> AtomicVarifold {
    let atoms = (0..count)
        .map(|_| {
            let x = (0..n).map(|_| rng.gen_range(-0.8..0.8)).collect();
            Atom::new(x, random_plane(rng, d, n), rng.gen_range(0.1..1.0))
        })
        .collect();
    AtomicVarifold::new(d, atoms, None).unwrap()
}

fn first_variation_closed_form() -> Outcome {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/diagonal.atoms");
    let v = load_atoms(&fixture).unwrap();
    let mut worst_rel = 0.0_f64;
    let mut min_scaled = f64::INFINITY;
    for k in 1..=3 {
        let h = 0.5_f64.powi(k);
        let computed = first_variation(&discretize_atoms(&v, h).unwrap()).unwrap().total;

        // count cell masses by hand, then sum |m+ - m-| over every face not on ∂Ω
        let cells = 1usize << k;
        let mut mass = BTreeMap::new();
        for a in v.atoms() {
            let i = (a.x[0] / h).floor() as usize;
            let j = (a.x[1] / h).floor() as usize;
            *mass.entry((i, j)).or_insert(0.0) += a.mass;
        }
        let m = |i: usize, j: usize| mass.get(&(i, j)).copied().unwrap_or(0.0);
        let mut jumps = 0.0;
        for i in 0..cells {
            for j in 0..cells {
                if i + 1 < cells {
                    jumps += (m(i + 1, j) - m(i, j)).abs();
                }
                if j + 1 < cells {
                    jumps += (m(i, j + 1) - m(i, j)).abs();
                }
            }
        }
        let formula = 2f64.sqrt() / (2.0 * h) * jumps;
        worst_rel = worst_rel.max((computed - formula).abs() / formula);
        min_scaled = min_scaled.min(h * computed / v.total_mass() * 2f64.sqrt());
    }
    Outcome {
        passed: worst_rel <= 1e-9 && min_scaled >= 1.0 - 1e-12,
        detail: format!(
            "max rel. deviation from face formula {worst_rel:.2e} (tol 1e-9), min h|dV|/((sqrt2/2)|V|) {min_scaled:.4} (>= 1)"
        ),
    }
}

fn energy_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for instance in 0..100 {
        let n = 2 + instance % 2;
        let count = rng.gen_range(1..=200);
        let v = random_varifold(&mut rng, 1, n, count);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let p = random_plane(&mut rng, 1, n);
        let alpha = 10f64.powf(rng.gen_range(-3.0..-0.3));
        let params = EnergyParams::new(alpha).unwrap();
        let exact = energy_alpha_value(&x, &p, &v, &params);
        let quad = energy_alpha_oracle(&x, &p, &v, &params, 100_000).unwrap();
        let rel = if exact == 0.0 { quad.abs() } else { (quad - exact).abs() / exact };
        worst = worst.max(rel);
    }
    Outcome {
        passed: worst <= 1e-4,
        detail: format!("100 instances, max rel. difference {worst:.2e} (tol 1e-4)"),
    }
}

fn minimizer_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_slack = f64::INFINITY;
    for _ in 0..100 {
        let v = random_varifold(&mut rng, 1, 2, 60);
        let x = vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        let alpha = rng.gen_range(0.05..0.5);
        let params = EnergyParams::new(alpha).unwrap();
        let est = estimate_tangent(&x, &v, &params).unwrap();
        let ours = energy_alpha_value(&x, &est.plane, &v, &params);
        let grid_best = (0..4096)
            .map(|j| {
                let t = PI * j as f64 / 4096.0;
                energy_alpha_value(&x, &Plane::line(&[t.cos(), t.sin()]).unwrap(), &v, &params)
            })
            .fold(f64::INFINITY, f64::min);
        let tolerance = 2.0 * v.total_mass() / alpha.powi(2) * (PI / 4096.0);
        worst_slack = worst_slack.min(grid_best + tolerance - ours);
    }

    let mut beaten = 0;
    let mut trials = 0;
    for (d, n) in [(1, 3), (2, 3)] {
        for _ in 0..50 {
            trials += 1;
            let v = random_varifold(&mut rng, d, n, 40);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let params = EnergyParams::new(rng.gen_range(0.05..0.5)).unwrap();
            let est = estimate_tangent(&x, &v, &params).unwrap();
            let ours = energy_alpha_value(&x, &est.plane, &v, &params);
            let sampled_best = (0..10_000)
                .map(|_| energy_alpha_value(&x, &random_plane(&mut rng, d, n), &v, &params))
                .fold(f64::INFINITY, f64::min);
            if ours > sampled_best * (1.0 + 1e-12) {
                beaten += 1;
            }
        }
    }
    Outcome {
        passed: worst_slack >= 0.0 && beaten == 0,
        detail: format!(
            "G(1,2): min slack to grid+Lipschitz bound {worst_slack:.3e} (>= 0) over 100; \
             G(1,3)/G(2,3): beaten by sampled planes in {beaten}/{trials}"
        ),
    }
}

fn blow_up_dichotomy() -> Outcome {
    let v = sample_circle([0.0, 0.0], 1.0, 10_000).unwrap();
    let x = [1.0, 0.0];
    let radial = Plane::coordinate(2, &[0]).unwrap();
    let tangent = Plane::coordinate(2, &[1]).unwrap();
    let alphas: Vec<f64> = (0..7).map(|k| 10f64.powf(-1.0 - 0.25 * k as f64)).collect();
    let energy = |p: &Plane, a: f64| energy_alpha_value(&x, p, &v, &EnergyParams::new(a).unwrap());

    let xs: Vec<f64> = alphas.iter().map(|a| (1.0 / a).ln()).collect();
    let ys: Vec<f64> = alphas.iter().map(|&a| energy(&radial, a)).collect();
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (mx, my) = (mean(&xs), mean(&ys));
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);

    let increments: Vec<f64> = alphas
        .iter()
        .map(|&a| energy(&tangent, a / 2.0) - energy(&tangent, a))
        .collect();
    let decreasing = increments.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        passed: slope > 0.0 && r2 > 0.99 && decreasing,
        detail: format!(
            "radial slope {slope:.4}, R^2 {r2:.6}; tangent increments {} ({:.3e} .. {:.3e})",
            if decreasing { "strictly decreasing" } else { "NOT decreasing" },
            increments[0],
            increments[increments.len() - 1]
        ),
    }
}

fn lipschitz_in_plane() -> Outcome {
    let v = sample_circle([0.0, 0.0], 1.0, 2000).unwrap();
    let mass = v.total_mass();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut tightest = 0.0_f64;
    for _ in 0..1000 {
        let x = vec![rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)];
        let p = random_plane(&mut rng, 1, 2);
        let q = random_plane(&mut rng, 1, 2);
        let alpha = 10f64.powf(rng.gen_range(-2.0..-0.3));
        let params = EnergyParams::new(alpha).unwrap();
        let lhs = (energy_alpha_value(&x, &p, &v, &params) - energy_alpha_value(&x, &q, &v, &params)).abs();
        let rhs = 2.0 / alpha.powi(2) * mass * p.distance_op(&q).unwrap();
        if lhs > rhs {
            violations += 1;
        }
        if rhs > 0.0 {
            tightest = tightest.max(lhs / rhs);
        }
    }
    Outcome {
        passed: violations == 0,
        detail: format!("1000 triples, {violations} violations, max lhs/rhs {tightest:.3e}"),
    }
}

fn estimator_convergence() -> Outcome {
    // spacing exactly 2^-i with 2^(i+3) atoms; the evaluation points sit at
    // lattice phase 1/3 or 2/3 on every level, mirror images of each other
    let radius = 8.0 / TAU;
    let angles: Vec<f64> = (0..64).map(|j| TAU * (j as f64 + 1.0 / 3.0) / 64.0).collect();
    let mut errors: Vec<Vec<f64>> = Vec::new();
    for i in 6..=12 {
        let delta = 2f64.powi(-i);
        let v = sample_circle([0.0, 0.0], radius, 1 << (i + 3)).unwrap();
        let params = EnergyParams::new(delta.powf(0.2)).unwrap();
        errors.push(
            angles
                .iter()
                .map(|t| {
                    let x = [radius * t.cos(), radius * t.sin()];
                    let est = estimate_tangent(&x, &v, &params).unwrap();
                    let truth = Plane::line(&[-t.sin(), t.cos()]).unwrap();
                    est.plane.angle(&truth).unwrap().to_degrees()
                })
                .collect(),
        );
    }
    let mut breaks = 0;
    for pair in errors.windows(2) {
        for (coarse, fine) in pair[0].iter().zip(&pair[1]) {
            if *fine > 1.1 * coarse {
                breaks += 1;
            }
        }
    }
    let max_final = errors.last().unwrap().iter().copied().fold(0.0, f64::max);
    let max_first = errors[0].iter().copied().fold(0.0, f64::max);
    Outcome {
        passed: breaks == 0 && max_final < 1.0,
        detail: format!(
            "64 points x 7 levels, {breaks} monotonicity breaks (10% slack); max error {max_first:.2e} deg at i=6, {max_final:.2e} deg at i=12 (< 1)"
        ),
    }
}

fn hypothesis_contrast() -> Outcome {
    let source = sample_circle([0.5, 0.5], 0.25, 65_536)
        .unwrap()
        .with_domain(BoxRegion::unit(2))
        .unwrap();
    let hs: Vec<f64> = (5..=9).map(|k| 2f64.powi(-k)).collect();
    let sweep = cmd_sweep(&source, &hs, &ScaleRuleArgs::with_exponent(0.2), 1.0).unwrap();
    let energies: Vec<f64> = sweep.rows.iter().map(|r| r.integrated_energy).collect();
    let tail = &energies[energies.len() - 3..];
    let ratio = tail.iter().copied().fold(0.0, f64::max) / tail.iter().copied().fold(f64::INFINITY, f64::min);
    let growth: Vec<f64> = sweep
        .rows
        .windows(2)
        .map(|w| w[1].first_variation / w[0].first_variation)
        .collect();
    let min_growth = growth.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome {
        passed: ratio < 2.0 && min_growth >= 1.8,
        detail: format!(
            "energy max/min over last 3 scales {ratio:.4} (< 2); |dV| growth per halving {} (min {min_growth:.3}, >= 1.8)",
            growth.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>().join(" ")
        ),
    }
}

fn jones_density_sanity() -> Outcome {
    let count = 20_000;
    let line = sample_line(&[-1.0, 0.0], &[1.0, 0.0], count).unwrap();
    let jones = [[0.0, 0.0], [0.3, 0.0], [-0.5, 0.0]]
        .iter()
        .map(|x| jones_integral(x, &line, 64).unwrap())
        .fold(0.0, f64::max);
    let radii = [0.01, 0.03, 0.1, 0.15];
    let density_dev = density_ratios(&line, &[0.0, 0.0], &radii)
        .iter()
        .map(|s| (s.ratio.unwrap() - 1.0).abs() * count as f64 * s.r / 2.0)
        .fold(0.0, f64::max);

    let cloud = sample_square_cloud(20_000, 8).unwrap();
    let spread = |beta_cut: f64| {
        let c = ahlfors_constants(&cloud, beta_cut, 128, 8).unwrap();
        c.c2 / c.c1
    };
    let (coarse, fine) = (spread(0.05), spread(0.025));
    Outcome {
        passed: jones <= 1e-10 && density_dev <= 1.0 && fine >= 1.5 * coarse,
        detail: format!(
            "line: max jones integral {jones:.1e} (<= 1e-10), density error {density_dev:.3} of the atomization bound; \
             square cloud c2/c1 {coarse:.3} -> {fine:.3} (x{:.3}, >= 1.5)",
            fine / coarse
        ),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        check(1, "first-variation closed form", secs(1), first_variation_closed_form),
        check(2, "energy oracle equivalence", secs(30), energy_oracle_equivalence),
        check(3, "minimizer exactness", secs(60), minimizer_exactness),
        check(4, "blow-up dichotomy", secs(30), blow_up_dichotomy),
        check(5, "Lipschitz-in-P bound", secs(30), lipschitz_in_plane),
        check(6, "estimator convergence under the scale rule", secs(120), estimator_convergence),
        check(7, "hypothesis report contrast", secs(120), hypothesis_contrast),
        check(8, "Jones/density sanity", secs(30), jones_density_sanity),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
