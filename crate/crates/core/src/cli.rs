//! Command-line front end: one JSON config per run, one report per run.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{self, Format};
use crate::markov::{self, GaussianModel, MarkovReport};
use crate::phi4::{self, MCEstimate, Phi4Config, YoungBound};
use crate::rp::{self, RPReport};
use crate::spectral::{
    build_basis, sample_gff, CovarianceKernel, CutoffSpec, Geometry, GeometryKind, RhoSpec, SpectralBasis,
};
use crate::witness::{self, cylinder, halfline, halfspace, BumpSpec, WitnessCertificate, WitnessKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CONSTRUCTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "gff-cutoff",
    version,
    about = "Reflection positivity and Markov diagnostics for cut-off Gaussian free fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report path; stdout when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eigenvalues and parities of the Laplacian basis.
    Spectrum,
    /// One GFF sample.
    Sample,
    /// Builds and certifies a witness against reflection positivity.
    Witness {
        #[arg(long, value_enum)]
        kind: Option<WitnessKind>,
    },
    /// Reflected Gram matrix over a bump test family.
    RpCheck,
    /// Nested conditional predictor discrepancy.
    Markov,
    /// Importance-sampled Φ⁴ reflection pairing over a coupling sweep.
    Phi4Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Sample => "sample",
            Command::Witness { .. } => "witness",
            Command::RpCheck => "rp-check",
            Command::Markov => "markov",
            Command::Phi4Sweep => "phi4-sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryName {
    Circle,
    Torus,
    PeriodicGrid,
    Cylinder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    One(usize),
    Many(Vec<usize>),
}

impl Points {
    fn to_vec(&self) -> Vec<usize> {
        match self {
            Points::One(n) => vec![*n],
            Points::Many(v) => v.clone(),
        }
    }
}

/// `points` lists per-axis node counts; a cylinder takes
/// `[time_points, slice_points]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryName,
    pub points: Points,
    #[serde(default)]
    pub extent: Option<Vec<f64>>,
    #[serde(default)]
    pub time_extent: Option<f64>,
    #[serde(default)]
    pub reflection_axis: usize,
}

impl GeometryConfig {
    pub fn build(&self) -> Result<Geometry> {
        let points = self.points.to_vec();
        let kind = match self.kind {
            GeometryName::Circle => {
                if points.len() != 1 {
                    return Err(Error::config("geometry.points", "a circle takes one point count"));
                }
                GeometryKind::Circle { n_points: points[0] }
            }
            GeometryName::Torus => GeometryKind::Torus { dims: points },
            GeometryName::PeriodicGrid => {
                let extent = self
                    .extent
                    .clone()
                    .ok_or_else(|| Error::config("geometry.extent", "required for a periodic grid"))?;
                GeometryKind::PeriodicGrid { extent, points }
            }
            GeometryName::Cylinder => {
                if points.len() != 2 {
                    return Err(Error::config(
                        "geometry.points",
                        "a cylinder takes [time_points, slice_points]",
                    ));
                }
                GeometryKind::Cylinder {
                    time_points: points[0],
                    time_extent: self.time_extent.unwrap_or(cylinder::DEFAULT_TIME_EXTENT),
                    slice_points: points[1],
                }
            }
        };
        Geometry::new(kind, self.reflection_axis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    Cut,
    Uncut,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessConfig {
    pub kind: Option<WitnessKind>,
    pub lambda: Option<f64>,
    pub bump: BumpSpec,
    /// Derivative order for the cylinder; found by the half-line search
    /// when absent.
    pub n: Option<u32>,
    pub grid_points: Option<usize>,
    pub rho: Option<RhoSpec>,
    pub residual_bound: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RpConfig {
    pub widths: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    /// Append the compact witness to the test family (cut kernels only).
    pub include_witness: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkovModel {
    Cutoff,
    Path,
    Cycle,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarkovConfig {
    pub model: Option<MarkovModel>,
    pub vertices: Option<usize>,
    pub mass: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Phi4Section {
    pub couplings: Option<Vec<f64>>,
    pub counterterm: Option<f64>,
    pub rho: Option<RhoSpec>,
    pub num_samples: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<String>,
    pub geometry: Option<GeometryConfig>,
    pub cutoff: Option<CutoffSpec>,
    pub kernel: Option<KernelChoice>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<Format>,
    pub witness: WitnessConfig,
    pub rp: RpConfig,
    pub markov: MarkovConfig,
    pub phi4: Phi4Section,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(
                if path == "." { "<root>".into() } else { path },
                e.into_inner().to_string(),
            )
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn geometry_or(&self, default: impl FnOnce() -> Result<Geometry>) -> Result<Geometry> {
        match &self.geometry {
            Some(g) => g.build(),
            None => default(),
        }
    }

    fn cutoff_or(&self, default: CutoffSpec) -> Result<CutoffSpec> {
        let c = self.cutoff.unwrap_or(default);
        c.validate()?;
        Ok(c)
    }
}

/// A finished report: JSON always, CSV when the command has a tabular view.
pub struct Report {
    pub json: Vec<u8>,
    pub csv: Option<Vec<u8>>,
}

impl Report {
    fn new<S: Serialize>(value: &S, csv: Option<Vec<u8>>) -> Result<Self> {
        Ok(Report {
            json: io::to_json_bytes(value)?,
            csv,
        })
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    geometry: Geometry,
    cutoff: Option<CutoffSpec>,
    active_modes: Option<usize>,
    modes: Vec<io::ModeEntry>,
}

#[derive(Serialize)]
struct SampleReport {
    geometry: Geometry,
    kernel: KernelChoice,
    cutoff: Option<CutoffSpec>,
    seed: u64,
    coefficients: Vec<io::Coefficient>,
}

#[derive(Serialize)]
struct SweepEcho {
    geometry: Geometry,
    cutoff: CutoffSpec,
    rho: RhoSpec,
    counterterm: f64,
    counterterm_is_default: bool,
    num_samples: usize,
    seed: u64,
    couplings: Vec<f64>,
}

#[derive(Serialize)]
struct SweepReport {
    config: SweepEcho,
    young_bound: YoungBound,
    witness: WitnessCertificate,
    estimates: Vec<MCEstimate>,
}

fn kernel_for(basis: &Arc<SpectralBasis<f64>>, choice: KernelChoice, cutoff: CutoffSpec) -> CovarianceKernel<f64> {
    match choice {
        KernelChoice::Cut => CovarianceKernel::cut(basis.clone(), cutoff),
        KernelChoice::Uncut => CovarianceKernel::uncut(basis.clone()),
    }
}

fn default_circle() -> Result<Geometry> {
    Geometry::circle(64)
}

fn run_spectrum(cfg: &RunConfig) -> Result<Report> {
    let geom = cfg.geometry_or(default_circle)?;
    if let Some(c) = &cfg.cutoff {
        c.validate()?;
    }
    let basis = build_basis::<f64>(&geom);
    let modes = io::mode_table(&basis);
    let report = SpectrumReport {
        active_modes: cfg.cutoff.map(|c| basis.count_at_most(c.lambda_sq())),
        geometry: geom,
        cutoff: cfg.cutoff,
        modes,
    };
    let csv = io::spectrum_csv(&report.modes)?;
    Report::new(&report, Some(csv))
}

fn run_sample(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let geom = cfg.geometry_or(default_circle)?;
    let choice = cfg.kernel.unwrap_or(if cfg.cutoff.is_some() {
        KernelChoice::Cut
    } else {
        KernelChoice::Uncut
    });
    let cutoff = match choice {
        KernelChoice::Cut => Some(
            cfg.cutoff
                .ok_or_else(|| Error::config("cutoff", "required for a cut kernel"))
                .and_then(|c| c.validate().map(|_| c))?,
        ),
        KernelChoice::Uncut => None,
    };
    let basis = build_basis::<f64>(&geom);
    let kernel = kernel_for(&basis, choice, cutoff.unwrap_or(CutoffSpec::sharp(0.0)));
    let field = sample_gff(&kernel, seed);
    let report = SampleReport {
        geometry: geom,
        kernel: choice,
        cutoff,
        seed,
        coefficients: io::field_coefficients(&field),
    };
    Report::new(&report, Some(io::field_csv(&field)?))
}

fn positive(key: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::config(key, "must be a positive real"))
    }
}

fn run_witness(cfg: &RunConfig, kind: Option<WitnessKind>) -> Result<Report> {
    let w = &cfg.witness;
    let kind = match (kind, w.kind) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::config("witness.kind", "disagrees with --kind"));
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(Error::config("witness.kind", "pass --kind or set witness.kind")),
    };
    w.bump.validate()?;
    let lambda = |default: f64| -> Result<f64> {
        positive(
            "witness.lambda",
            w.lambda.or(cfg.cutoff.map(|c| c.lambda)).unwrap_or(default),
        )
    };
    match kind {
        WitnessKind::Halfline => {
            let points = w.grid_points.unwrap_or(halfline::DEFAULT_POINTS);
            let hw = witness::build_halfline_witness_on::<f64>(&w.bump, points)?;
            Report::new(&hw.certificate, Some(io::field_csv(&hw.h)?))
        }
        WitnessKind::Cylinder => {
            let geom = cfg.geometry_or(cylinder::default_cylinder)?;
            let n = match w.n {
                Some(n) => n,
                None => witness::build_halfline_witness::<f64>(&w.bump)?.n,
            };
            let cw = witness::build_cylinder_witness::<f64>(lambda(4.0)?, &geom, &w.bump, n, None)?;
            Report::new(&cw.certificate, Some(io::field_csv(&cw.f)?))
        }
        WitnessKind::Compact => {
            let geom = cfg.geometry_or(default_circle)?;
            let basis = build_basis::<f64>(&geom);
            let cw = witness::build_compact_witness(&basis, lambda(5.0)?, &geom.partition())?;
            Report::new(&cw.certificate, Some(io::field_csv(&cw.f)?))
        }
        WitnessKind::Halfspace => {
            let geom = cfg.geometry_or(|| Geometry::periodic_grid(&[32.0, 32.0], &[64, 64]))?;
            let basis = build_basis::<f64>(&geom);
            let lam = lambda(2.0)?;
            let cutoff = match cfg.cutoff {
                Some(c) => CutoffSpec { lambda: lam, ..c },
                None => CutoffSpec::smooth(lam, 0.25),
            };
            cutoff.validate()?;
            let rho_spec = w.rho.unwrap_or_else(|| halfspace::default_rho_spec(&basis));
            rho_spec.validate()?;
            let rho = rho_spec.field(basis.clone());
            let mask = halfspace::halfspace_mask(&rho);
            let bound = positive("witness.residual_bound", w.residual_bound.unwrap_or(0.1))?;
            let fit = witness::fit_fourier_restriction(&basis, &mask, lam, &rho, None, None)?;
            if fit.relative_residual() > bound {
                return Err(Error::FitFailed {
                    residual: fit.relative_residual(),
                    bound,
                });
            }
            let kernel = CovarianceKernel::cut(basis, cutoff);
            let cert = witness::halfspace_certificate(&fit.f, &kernel, &rho)?;
            Report::new(&cert, Some(io::field_csv(&fit.f)?))
        }
    }
}

fn run_rp_check(cfg: &RunConfig) -> Result<Report> {
    let geom = cfg.geometry_or(default_circle)?;
    let basis = build_basis::<f64>(&geom);
    let choice = cfg.kernel.unwrap_or(KernelChoice::Cut);
    let cutoff = cfg.cutoff_or(CutoffSpec::sharp(5.0))?;
    let kernel = kernel_for(&basis, choice, cutoff);
    let part = geom.partition();
    let widths = cfg.rp.widths.clone().unwrap_or_else(|| vec![2.0, 4.0]);
    for (i, &wd) in widths.iter().enumerate() {
        positive(&format!("rp.widths[{i}]"), wd)?;
    }
    let mut tests = rp::default_test_family(&basis, &part, &widths);
    if choice == KernelChoice::Cut && cfg.rp.include_witness.unwrap_or(true) {
        match witness::build_compact_witness(&basis, cutoff.lambda, &part) {
            Ok(w) => tests.push(w.f),
            Err(e) if e.is_construction_failure() => {}
            Err(e) => return Err(e),
        }
    }
    if tests.is_empty() {
        return Err(Error::config("rp.widths", "test family is empty"));
    }
    let gram = rp::assemble_rp_gram(&kernel, &tests, &part)?;
    let report: RPReport = rp::certify_rp(&gram.matrix, cfg.rp.tolerance)?;
    Report::new(&report, Some(io::matrix_csv(&gram.matrix)?))
}

fn run_markov(cfg: &RunConfig) -> Result<Report> {
    let m = &cfg.markov;
    let tolerance = m.tolerance.unwrap_or(markov::DEFAULT_TOLERANCE);
    let (report, positions): (MarkovReport, Option<Vec<f64>>) = match m.model.unwrap_or(MarkovModel::Cutoff) {
        MarkovModel::Cutoff => {
            let geom = cfg.geometry_or(default_circle)?;
            let basis = build_basis::<f64>(&geom);
            let cutoff = cfg.cutoff_or(CutoffSpec::sharp(5.0))?;
            let kernel = kernel_for(&basis, cfg.kernel.unwrap_or(KernelChoice::Cut), cutoff);
            let closed = geom.partition().closed_plus();
            let a: Vec<usize> = (0..geom.num_nodes()).filter(|&v| closed[v]).collect();
            let targets: Vec<usize> = (0..geom.num_nodes()).filter(|&v| !closed[v]).collect();
            let boundary = markov::graph_boundary(&geom.adjacency(), &a);
            let all: Vec<usize> = (0..geom.num_nodes()).collect();
            let model = GaussianModel::from_kernel(&kernel, &all)?;
            let pos = all.iter().map(|&v| geom.normal_coordinate(v)).collect();
            (
                markov::markov_discrepancy(&model, &a, &boundary, &targets, tolerance)?,
                Some(pos),
            )
        }
        graph @ (MarkovModel::Path | MarkovModel::Cycle) => {
            let n = m.vertices.unwrap_or(16);
            if n < 3 {
                return Err(Error::config("markov.vertices", "need at least 3 vertices"));
            }
            let adj = if graph == MarkovModel::Path {
                markov::path_graph(n)
            } else {
                markov::cycle_graph(n)
            };
            let model = markov::build_discrete_gff::<f64>(&adj, m.mass.unwrap_or(1.0)).map_err(|e| match e {
                Error::Config { message, .. } => Error::config("markov.mass", message),
                e => e,
            })?;
            let a: Vec<usize> = (0..n / 2).collect();
            let targets: Vec<usize> = (n / 2..n).collect();
            let boundary = markov::graph_boundary(&adj, &a);
            (
                markov::markov_discrepancy(&model, &a, &boundary, &targets, tolerance)?,
                None,
            )
        }
    };
    let csv = io::markov_csv(&report, positions.as_deref())?;
    Report::new(&report, Some(csv))
}

fn run_phi4_sweep(cfg: &RunConfig, seed: u64) -> Result<Report> {
    let p = &cfg.phi4;
    let geom = cfg.geometry_or(default_circle)?;
    let basis = build_basis::<f64>(&geom);
    let cutoff = cfg.cutoff_or(CutoffSpec::sharp(3.0))?;
    let rho = p.rho.unwrap_or(RhoSpec::new(2.4, 3.0));
    let couplings = p.couplings.clone().unwrap_or_else(|| vec![0.0, 1e-1, 1e-2, 1e-3]);
    for (i, &c) in couplings.iter().enumerate() {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::config(
                format!("phi4.couplings[{i}]"),
                "must be a nonnegative real",
            ));
        }
    }
    let num_samples = p.num_samples.unwrap_or(200_000);
    let config = Phi4Config::new(&basis, rho, cutoff, 0.0, p.counterterm, num_samples, seed)?;
    let part = geom.partition();
    let within: Vec<bool> = part.plus.iter().zip(&config.core_mask).map(|(&a, &b)| a && b).collect();
    let w = witness::build_compact_witness_within(&basis, cutoff.lambda, &part, Some(&within))?;
    let estimates = phi4::coupling_sweep(&w.f, &config, &couplings)?;
    let young = phi4::weight_lower_bound(&config.with_coupling(couplings.iter().copied().fold(0.0, f64::max)));
    let report = SweepReport {
        config: SweepEcho {
            geometry: geom,
            cutoff,
            rho,
            counterterm: config.counterterm,
            counterterm_is_default: p.counterterm.is_none(),
            num_samples,
            seed,
            couplings,
        },
        young_bound: young,
        witness: w.certificate,
        estimates,
    };
    Report::new(&report, Some(io::sweep_csv(&report.estimates)?))
}

/// Runs the command and writes its report. Returns the output path, if any.
pub fn run(cli: &Cli) -> Result<Option<PathBuf>> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(cmd) = &cfg.command {
        if cmd != cli.command.name() {
            return Err(Error::config(
                "command",
                format!("config is for `{cmd}`, invoked as `{}`", cli.command.name()),
            ));
        }
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let format = cli.format.or(cfg.output_format).unwrap_or(Format::Json);
    let output = cli.output.clone().or_else(|| cfg.output_path.clone());
    if let Some(c) = &cfg.cutoff {
        c.validate()?;
    }
    let report = match &cli.command {
        Command::Spectrum => run_spectrum(&cfg)?,
        Command::Sample => run_sample(&cfg, seed)?,
        Command::Witness { kind } => run_witness(&cfg, *kind)?,
        Command::RpCheck => run_rp_check(&cfg)?,
        Command::Markov => run_markov(&cfg)?,
        Command::Phi4Sweep => run_phi4_sweep(&cfg, seed)?,
    };
    let bytes = match format {
        Format::Json => report.json,
        Format::Csv => report
            .csv
            .ok_or_else(|| Error::config("output_format", "no CSV view for this command"))?,
    };
    match &output {
        Some(path) => io::write_atomic(path, &bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(output)
}

/// Process exit code for a run result.
pub fn exit_code<T>(result: &Result<T>) -> i32 {
    match result {
        Ok(_) => EXIT_OK,
        Err(e) if e.is_construction_failure() => EXIT_CONSTRUCTION,
        Err(_) => EXIT_CONFIG,
    }
}
