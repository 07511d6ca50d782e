//! Command implementations behind the `varifold` binary.
//!
//! Every command is split into a pure part that works on in-memory data and
//! returns CSV text, and a thin wrapper that reads inputs and writes outputs
//! atomically. Tests drive the pure parts directly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use varifold_core::io::{read_atoms, read_grid, write_atoms, write_grid};
use varifold_core::{
    discretize, energy_alpha_value, estimate_tangent, first_variation, hypothesis_report,
    integrated_energy, sample_circle, sample_graph, sample_line, sample_square_cloud,
    AtomicVarifold, BoxRegion, CartesianGrid, DiscreteVarifold, EnergyParams, Error,
    FirstVariationReport, RegularityReport, ReportConfig, ScaleInput,
};

pub mod schema;

pub const THREADS_ENV: &str = "VARIFOLD_THREADS";

/// Failure classes, each mapped to its own process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed inputs: exit code 2.
    Validation(anyhow::Error),
    /// Valid inputs on which a computation could not produce a value: exit code 3.
    Numeric(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn validation(msg: impl std::fmt::Display) -> Self {
        CliError::Validation(anyhow::anyhow!("{msg}"))
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(e) => write!(f, "invalid input: {e:#}"),
            CliError::Numeric(e) => write!(f, "numeric failure: {e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let numeric = matches!(
            e,
            Error::DegenerateFrame { .. }
                | Error::EmptyCell
                | Error::NoLocalData
                | Error::NoValidDensitySample
        );
        if numeric {
            CliError::Numeric(e.into())
        } else {
            CliError::Validation(e.into())
        }
    }
}

trait CliContext<T> {
    fn context_cli(self, what: impl Into<String>) -> std::result::Result<T, CliError>;
}

impl<T> CliContext<T> for std::result::Result<T, Error> {
    fn context_cli(self, what: impl Into<String>) -> std::result::Result<T, CliError> {
        self.map_err(|e| match CliError::from(e) {
            CliError::Validation(e) => CliError::Validation(e.context(what.into())),
            CliError::Numeric(e) => CliError::Numeric(e.context(what.into())),
        })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "varifold", version, about = "Rectifiability diagnostics for sampled varifolds")]
pub struct Cli {
    /// Worker threads; output never depends on this.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Print every file and CSV format, then exit.
    #[arg(long)]
    pub schema: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a sampled shape as an atomic varifold file.
    Generate(GenerateArgs),
    /// Bin an atomic varifold onto a cartesian grid.
    Discretize(DiscretizeArgs),
    /// Face-by-face first variation of a discrete varifold.
    Firstvar(FirstvarArgs),
    /// Averaged height excess at every atom, against the atom's own plane.
    Energy(EnergyArgs),
    /// Energy-minimizing tangent planes.
    Tangent(TangentArgs),
    /// Density and energy hypotheses over a sequence of discretizations.
    Regularity(RegularityArgs),
    /// Multi-scale run: first variation against integrated energy.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Line,
    Circle,
    Graph,
    SquareCloud,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFn {
    /// `|u|² / 2`
    Paraboloid,
    /// `u₁² − u₂²` (or `u²` when d = 1)
    Saddle,
    /// `0.1 sin(2π u₁)`
    Wave,
}

impl GraphFn {
    fn eval(self, u: &[f64]) -> f64 {
        match self {
            GraphFn::Paraboloid => 0.5 * u.iter().map(|t| t * t).sum::<f64>(),
            GraphFn::Saddle => u[0] * u[0] - u.get(1).map_or(0.0, |t| t * t),
            GraphFn::Wave => 0.1 * (std::f64::consts::TAU * u[0]).sin(),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub shape: Shape,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Segment start (line).
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0])]
    pub from: Vec<f64>,
    /// Segment end (line).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0])]
    pub to: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0])]
    pub center: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Graph dimension; the graph lives in `R^{d+1}` and uses `count^(1/d)` cells per axis.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = GraphFn::Paraboloid)]
    pub function: GraphFn,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Domain lower corner; defaults to the padded bounding box.
    #[arg(long, value_delimiter = ',', requires = "hi")]
    pub lo: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', requires = "lo")]
    pub hi: Option<Vec<f64>>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Cell side; the grid covers the varifold's domain.
    #[arg(long)]
    pub h: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FirstvarArgs {
    /// Grid file, or an atoms file together with `--h`.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r_max: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TangentArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r_max: f64,
    /// Evaluation points, one comma-separated point per line; defaults to the atoms.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct ScaleRuleArgs {
    /// Exponent `p` of the scale rule `α = δ^p`.
    #[arg(long = "alpha-exponent", short = 'p')]
    pub p: Option<f64>,
    /// Explicit alphas, one per scale; overrides the rule.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Lower radius for the density constants; defaults to two cell sides,
    /// since below `h` a discrete varifold is spread over whole cells.
    #[arg(long)]
    pub beta_cut: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    /// Density centers per scale.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate the integrated energy on this fraction of atoms.
    #[arg(long)]
    pub subsample: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RegularityArgs {
    /// Grid files, coarsest first.
    #[arg(long, short, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub rule: ScaleRuleArgs,
    /// Per-scale CSV rows.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Text report; printed to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Cell sides, strictly decreasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub h: Vec<f64>,
    #[command(flatten)]
    pub rule: ScaleRuleArgs,
    /// Regularity exponent `β` of the rule check `δ^β / α^{d+3} → 0`.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomically(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let run = || -> anyhow::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path)?;
        Ok(())
    };
    run()
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Validation)
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Validation)
}

pub fn load_atoms(path: &Path) -> CliResult<AtomicVarifold> {
    read_atoms(&read_text(path)?).context_cli(path.display().to_string())
}

pub fn load_grid(path: &Path) -> CliResult<DiscreteVarifold> {
    read_grid(&read_text(path)?).context_cli(path.display().to_string())
}

fn positive(name: &str, value: f64) -> CliResult<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(format!("--{name} must be positive, got {value}")))
    }
}

pub fn generate(args: &GenerateArgs) -> CliResult<AtomicVarifold> {
    let v = match args.shape {
        Shape::Line => sample_line(&args.from, &args.to, args.count),
        Shape::Circle => {
            let center: [f64; 2] = args
                .center
                .as_slice()
                .try_into()
                .map_err(|_| CliError::validation("--center needs two coordinates"))?;
            sample_circle(center, args.radius, args.count)
        }
        Shape::Graph => {
            if args.dim == 0 {
                return Err(CliError::validation("--dim must be at least 1"));
            }
            let per_axis = (args.count as f64).powf(1.0 / args.dim as f64).round() as usize;
            let f = args.function;
            sample_graph(&move |u: &[f64]| f.eval(u), args.dim, per_axis)
        }
        Shape::SquareCloud => sample_square_cloud(args.count, args.seed),
    }
    .context_cli("generating shape")?;
    match (&args.lo, &args.hi) {
        (Some(lo), Some(hi)) => {
            let domain = BoxRegion::new(lo.clone(), hi.clone()).context_cli("--lo/--hi")?;
            v.with_domain(domain).context_cli("--lo/--hi")
        }
        _ => Ok(v),
    }
}

pub fn discretize_atoms(v: &AtomicVarifold, h: f64) -> CliResult<DiscreteVarifold> {
    positive("h", h)?;
    let grid = CartesianGrid::covering(v.domain(), h).context_cli("--h")?;
    discretize(v, &grid).context_cli(format!("discretizing at h={h}"))
}

fn fmt_index(index: &[usize]) -> String {
    index.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn firstvar_csv(report: &FirstVariationReport) -> String {
    let mut out = String::from("kind,cell,axis,density,area,contribution\n");
    for t in &report.terms {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.kind.as_str(),
            fmt_index(&t.lower),
            t.axis,
            t.density,
            t.area,
            t.contribution
        )
        .unwrap();
    }
    writeln!(out, "internal_total,,,,,{}", report.internal_total).unwrap();
    writeln!(out, "boundary_total,,,,,{}", report.boundary_total).unwrap();
    writeln!(out, "total,,,,,{}", report.total).unwrap();
    out
}

fn header_coords(prefix: &str, n: usize) -> String {
    (1..=n).map(|k| format!("{prefix}{k}")).collect::<Vec<_>>().join(",")
}

fn join_floats(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// `E_α(x_i, P_i, V)` at every atom `(x_i, P_i)`.
pub fn energy_csv(v: &AtomicVarifold, params: &EnergyParams) -> String {
    let values: Vec<f64> = v
        .atoms()
        .par_iter()
        .map(|a| energy_alpha_value(&a.x, &a.plane, v, params))
        .collect();
    let mut out = format!("index,{},energy\n", header_coords("x", v.ambient_dim()));
    for (i, (a, e)) in v.atoms().iter().zip(&values).enumerate() {
        writeln!(out, "{i},{},{e}", join_floats(&a.x)).unwrap();
    }
    out
}

/// Tangent estimates at `points`, or at the atoms themselves. When evaluating
/// at atoms, the last column is the angle in degrees between the estimate and
/// the atom's own plane.
pub fn tangent_csv(
    v: &AtomicVarifold,
    params: &EnergyParams,
    points: Option<&[Vec<f64>]>,
) -> CliResult<String> {
    let owned;
    let (xs, reference): (&[Vec<f64>], bool) = match points {
        Some(p) => (p, false),
        None => {
            owned = v.atoms().iter().map(|a| a.x.clone()).collect::<Vec<_>>();
            (&owned, true)
        }
    };
    let n = v.ambient_dim();
    if let Some(bad) = xs.iter().position(|x| x.len() != n) {
        return Err(CliError::validation(format!("point {bad} is not in R^{n}")));
    }
    let rows: Vec<CliResult<String>> = xs
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let est = estimate_tangent(x, v, params).context_cli(format!("point {i}"))?;
            let mut row = format!("{i},{},", join_floats(x));
            let basis: Vec<String> = (0..est.plane.dim())
                .map(|k| {
                    est.plane
                        .basis_vector(k)
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect();
            write!(
                row,
                "{},{},{},{}",
                basis.join(";"),
                est.energy,
                est.spectral_gap,
                est.degenerate
            )
            .unwrap();
            if reference {
                let angle = est
                    .plane
                    .angle(&v.atoms()[i].plane)
                    .context_cli(format!("point {i}"))?;
                write!(row, ",{}", angle.to_degrees()).unwrap();
            } else {
                row.push(',');
            }
            Ok(row)
        })
        .collect();
    let mut out = format!(
        "index,{},basis,energy,spectral_gap,degenerate,angle_error_deg\n",
        header_coords("x", n)
    );
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_points(text: &str) -> CliResult<Vec<Vec<f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        CliError::validation(format!("points line {}: bad number `{s}`", i + 1))
                    })
                })
                .collect()
        })
        .collect()
}

impl ScaleRuleArgs {
    pub fn with_exponent(p: f64) -> Self {
        Self {
            p: Some(p),
            alpha: None,
            beta_cut: None,
            q: 3,
            samples: 64,
            seed: 0,
            subsample: None,
        }
    }

    fn alphas(&self, hs: &[f64]) -> CliResult<Vec<f64>> {
        match (&self.alpha, self.p) {
            (Some(list), _) => {
                if list.len() != hs.len() {
                    return Err(CliError::validation(format!(
                        "--alpha has {} values for {} scales",
                        list.len(),
                        hs.len()
                    )));
                }
                for &a in list {
                    positive("alpha", a)?;
                }
                Ok(list.clone())
            }
            (None, Some(p)) => {
                positive("alpha-exponent", p)?;
                Ok(hs.iter().map(|h| h.powf(p)).collect())
            }
            (None, None) => Err(CliError::validation(
                "need --alpha-exponent or --alpha for the scale rule",
            )),
        }
    }

    fn config(&self) -> CliResult<ReportConfig> {
        if self.q == 0 {
            return Err(CliError::validation("--q must be at least 1"));
        }
        if self.samples == 0 {
            return Err(CliError::validation("--samples must be at least 1"));
        }
        Ok(ReportConfig {
            q: self.q,
            density_samples: self.samples,
            seed: self.seed,
            subsample: self.subsample.map(|fraction| varifold_core::Subsample {
                fraction,
                seed: self.seed,
            }),
            ..ReportConfig::default()
        })
    }

    fn scales(&self, seq: Vec<DiscreteVarifold>) -> CliResult<Vec<ScaleInput>> {
        let hs: Vec<f64> = seq.iter().map(|v| v.grid().h()).collect();
        let alphas = self.alphas(&hs)?;
        if let Some(b) = self.beta_cut {
            positive("beta-cut", b)?;
        }
        Ok(seq
            .into_iter()
            .zip(alphas)
            .map(|(varifold, alpha)| {
                let beta_cut = self.beta_cut.unwrap_or(2.0 * varifold.grid().h());
                ScaleInput {
                    varifold,
                    alpha,
                    beta_cut,
                }
            })
            .collect())
    }
}

pub fn regularity(seq: Vec<DiscreteVarifold>, rule: &ScaleRuleArgs) -> CliResult<RegularityReport> {
    let config = rule.config()?;
    let scales = rule.scales(seq)?;
    hypothesis_report(&scales, &config).context_cli("regularity report")
}

pub fn regularity_csv(report: &RegularityReport) -> String {
    let mut out = String::from("delta,alpha,beta_cut,c1,c2,integrated_energy\n");
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.h, r.alpha, r.beta_cut, r.c1, r.c2, r.integrated_energy
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub alpha: f64,
    pub first_variation: f64,
    pub scaled_first_variation: f64,
    pub integrated_energy: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub report: RegularityReport,
    /// `δ_i^β / α_i^{d+3}` per scale.
    pub rule_ratios: Vec<f64>,
    /// Set when the ratios fail to decrease strictly.
    pub warning: Option<String>,
}

impl SweepOutput {
    pub fn csv(&self) -> String {
        let mut out = String::from(
            "delta,alpha,first_variation,scaled_first_variation,integrated_energy,c1,c2\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.delta,
                r.alpha,
                r.first_variation,
                r.scaled_first_variation,
                r.integrated_energy,
                r.c1,
                r.c2
            )
            .unwrap();
        }
        out
    }
}

/// Discretizes `source` at every `h`, then reports first variation, integrated
/// energy and density constants per scale.
pub fn cmd_sweep(
    source: &AtomicVarifold,
    hs: &[f64],
    rule: &ScaleRuleArgs,
    beta: f64,
) -> CliResult<SweepOutput> {
    if hs.is_empty() {
        return Err(CliError::validation("--h needs at least one value"));
    }
    for &h in hs {
        positive("h", h)?;
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::validation("--h must be strictly decreasing"));
    }
    positive("beta", beta)?;

    let discrete: Vec<DiscreteVarifold> = hs
        .par_iter()
        .map(|&h| discretize_atoms(source, h))
        .collect::<CliResult<_>>()?;
    let variations: Vec<FirstVariationReport> = discrete
        .par_iter()
        .zip(hs)
        .map(|(dv, h)| first_variation(dv).context_cli(format!("first variation at h={h}")))
        .collect::<CliResult<_>>()?;

    let report = regularity(discrete, rule)?;
    let d = source.dim() as i32;
    let rule_ratios: Vec<f64> = report
        .rows
        .iter()
        .map(|r| r.h.powf(beta) / r.alpha.powi(d + 3))
        .collect();
    let warning = rule_ratios
        .windows(2)
        .any(|w| w[1] >= w[0])
        .then(|| {
            format!(
                "warning: delta^beta / alpha^(d+3) is nondecreasing across the sweep ({}); \
                 the scale rule needs p < beta/(d+3) = {}",
                join_floats(&rule_ratios),
                beta / (d + 3) as f64
            )
        });
    let rows = report
        .rows
        .iter()
        .zip(&variations)
        .map(|(r, fv)| SweepRow {
            delta: r.h,
            alpha: r.alpha,
            first_variation: fv.total,
            scaled_first_variation: r.h * fv.total,
            integrated_energy: r.integrated_energy,
            c1: r.c1,
            c2: r.c2,
        })
        .collect();
    Ok(SweepOutput {
        rows,
        report,
        rule_ratios,
        warning,
    })
}

fn energy_params(alpha: f64, r_max: f64) -> CliResult<EnergyParams> {
    positive("alpha", alpha)?;
    EnergyParams::with_r_max(alpha, r_max).context_cli("--alpha/--r-max")
}

/// Runs one subcommand, writing its outputs and returning what goes to stdout.
pub fn execute(command: &Command) -> CliResult<String> {
    match command {
        Command::Generate(args) => {
            let v = generate(args)?;
            write_atomically(&args.out, &write_atoms(&v))?;
            Ok(format!("wrote {} atoms to {}", v.len(), args.out.display()))
        }
        Command::Discretize(args) => {
            let dv = discretize_atoms(&load_atoms(&args.input)?, args.h)?;
            write_atomically(&args.out, &write_grid(&dv))?;
            Ok(format!("wrote {} cells to {}", dv.cells().len(), args.out.display()))
        }
        Command::Firstvar(args) => {
            let text = read_text(&args.input)?;
            let dv = if text.starts_with(varifold_core::io::GRID_MAGIC) {
                if args.h.is_some() {
                    return Err(CliError::validation("--h only applies to atom files"));
                }
                read_grid(&text).context_cli(args.input.display().to_string())?
            } else {
                let h = args
                    .h
                    .ok_or_else(|| CliError::validation("--h is required for atom files"))?;
                let v = read_atoms(&text).context_cli(args.input.display().to_string())?;
                discretize_atoms(&v, h)?
            };
            let report = first_variation(&dv).context_cli("first variation")?;
            write_atomically(&args.out, &firstvar_csv(&report))?;
            Ok(format!("total={}", report.total))
        }
        Command::Energy(args) => {
            let params = energy_params(args.alpha, args.r_max)?;
            let v = load_atoms(&args.input)?;
            write_atomically(&args.out, &energy_csv(&v, &params))?;
            let total = integrated_energy(&v, &v, &params, None).context_cli("integrated energy")?;
            Ok(format!("integrated_energy={total}"))
        }
        Command::Tangent(args) => {
            let params = energy_params(args.alpha, args.r_max)?;
            let v = load_atoms(&args.input)?;
            let points = match &args.points {
                Some(p) => Some(parse_points(&read_text(p)?)?),
                None => None,
            };
            let csv = tangent_csv(&v, &params, points.as_deref())?;
            let rows = csv.lines().count() - 1;
            write_atomically(&args.out, &csv)?;
            Ok(format!("wrote {rows} tangent rows to {}", args.out.display()))
        }
        Command::Regularity(args) => {
            let seq = args
                .input
                .iter()
                .map(|p| load_grid(p))
                .collect::<CliResult<Vec<_>>>()?;
            let report = regularity(seq, &args.rule)?;
            write_atomically(&args.out, &regularity_csv(&report))?;
            match &args.report {
                Some(path) => {
                    write_atomically(path, &format!("{report}\n"))?;
                    Ok(format!("verdict: {}", if report.passed() { "pass" } else { "fail" }))
                }
                None => Ok(report.to_string()),
            }
        }
        Command::Sweep(args) => {
            let source = load_atoms(&args.input)?;
            let sweep = cmd_sweep(&source, &args.h, &args.rule, args.beta)?;
            write_atomically(&args.out, &sweep.csv())?;
            let mut msg = sweep.report.to_string();
            if let Some(w) = &sweep.warning {
                msg.push('\n');
                msg.push_str(w);
            }
            Ok(msg)
        }
    }
}

/// Parses arguments, runs the command on a pool of the requested size, and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if cli.schema {
        print!("{}", schema::SCHEMA);
        return 0;
    }
    let Some(command) = cli.command else {
        eprintln!("no command given; see --help");
        return 2;
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("invalid input: --threads must be at least 1");
            return 2;
        }
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("numeric failure: thread pool: {e}");
            return 3;
        }
    };
    match pool.install(|| execute(&command)) {
        Ok(msg) => {
            if !msg.is_empty() {
                println!("{msg}");
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
