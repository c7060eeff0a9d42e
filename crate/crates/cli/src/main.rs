//! `axial-fisher` command-line front end.
//!
//! All inputs and outputs use z in units of z_R and Fisher information in
//! units of 1/z_R². `--w0` together with `--wavelength` adds physical-unit
//! copies of the results; the computation itself is unchanged.

mod manifest;
mod state_spec;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use axial_fisher::classical::{find_optimal_plane, scan_report};
use axial_fisher::estimation::crb_study;
use axial_fisher::oscillator::{hl_expand, FockState};
use axial_fisher::quantum::{qfi_hl_printed, qfi_oracle, qfi_printed_for};
use axial_fisher::{
    BeamGeometry, Error, EstimationConfig, Execution, FisherValue, HLIndex, ModeSuperposition,
    QuadratureConfig,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use manifest::RunManifest;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "axial-fisher",
    version,
    about = "Fisher information for axial localization with LG beams"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Initial radial quadrature nodes.
    #[arg(long, global = true, default_value_t = 256)]
    quad_radial: usize,
    /// Initial azimuthal quadrature nodes.
    #[arg(long, global = true, default_value_t = 256)]
    quad_azimuthal: usize,
    /// Relative refinement tolerance of the quadrature.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Write a run manifest (JSON) to this file.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Waist radius for physical-unit output; needs --wavelength.
    #[arg(long, global = true, requires = "wavelength")]
    w0: Option<f64>,
    /// Wavelength for physical-unit output, same length unit as --w0.
    #[arg(long, global = true, requires = "w0")]
    wavelength: Option<f64>,
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Args, Serialize)]
struct StateArgs {
    /// Single mode, e.g. p0l2.
    #[arg(long, conflicts_with = "superpose")]
    mode: Option<String>,
    /// Comma-separated superposition, e.g. p0l2,p0l0 or p0l1*0.6,p1l0*0.8i.
    #[arg(long, visible_alias = "state")]
    superpose: Option<String>,
    /// Put the --mode occupation numbers on the Hermite-Laguerre sphere at this polar angle.
    #[arg(long, requires = "mode")]
    hl_theta: Option<f64>,
    #[arg(long, requires = "hl_theta")]
    hl_phi: Option<f64>,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Quantum Fisher information of a state.
    Qfi {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Total, radial and azimuthal intensity information over a z grid (CSV).
    Scan {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 0.05)]
        z_min: f64,
        #[arg(long, default_value_t = 3.0)]
        z_max: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
        resolution: u64,
    },
    /// Detection plane that maximizes the intensity information (JSON).
    OptimalPlane {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 0.05)]
        z_min: f64,
        #[arg(long, default_value_t = 4.0)]
        z_max: f64,
    },
    /// Monte Carlo maximum-likelihood study against the Cramér-Rao bounds (JSON).
    CrbSim {
        #[command(flatten)]
        state: StateArgs,
        /// Expected photons per frame.
        #[arg(long, default_value_t = 1e4)]
        photons: f64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 1.0)]
        z_true: f64,
        #[arg(long, default_value_t = 0.05)]
        z_min: f64,
        #[arg(long, default_value_t = 4.0)]
        z_max: f64,
        /// Include every per-trial estimate.
        #[arg(long)]
        with_estimates: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Qfi { .. } => "qfi",
            Command::Scan { .. } => "scan",
            Command::OptimalPlane { .. } => "optimal-plane",
            Command::CrbSim { .. } => "crb-sim",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGeometry(_)
            | Error::InvalidState(_)
            | Error::InvalidConfig(_)
            | Error::EqualAzimuthalIndices(_) => Failure::Usage(e.to_string()),
            Error::CutoffTooSmall { .. } | Error::NonConvergence { .. } | Error::EmptySamples => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

struct Resolved {
    state: ModeSuperposition,
    hl: Option<HLIndex>,
}

impl Resolved {
    fn printed(&self) -> Option<FisherValue> {
        match &self.hl {
            Some(idx) => Some(qfi_hl_printed(idx)),
            None => qfi_printed_for(&self.state),
        }
    }

    fn label(&self) -> String {
        self.state.to_string()
    }
}

fn resolve_state(args: &StateArgs) -> Result<Resolved, Failure> {
    let usage = |e: state_spec::SpecError| Failure::Usage(e.to_string());
    if let Some(spec) = &args.mode {
        let terms = state_spec::parse_terms(spec).map_err(usage)?;
        if terms.len() != 1 {
            return Err(Failure::Usage(format!(
                "--mode takes a single mode, got {} terms (use --superpose)",
                terms.len()
            )));
        }
        let idx = terms[0].0;
        if let Some(theta) = args.hl_theta {
            let f = FockState::from(idx);
            let hl = HLIndex::new(f.n_plus, f.n_minus, theta, args.hl_phi.unwrap_or(0.0));
            return Ok(Resolved {
                state: hl_expand(&hl),
                hl: Some(hl),
            });
        }
        return Ok(Resolved {
            state: ModeSuperposition::pure(idx),
            hl: None,
        });
    }
    if let Some(spec) = &args.superpose {
        let terms = state_spec::parse_terms(spec).map_err(usage)?;
        let norm: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            eprintln!("warning: coefficients normalized (sum of |c|^2 was {norm})");
        }
        let state = ModeSuperposition::normalized(terms)?;
        return Ok(Resolved { state, hl: None });
    }
    Err(Failure::Usage(
        "a state is required: pass --mode or --superpose".into(),
    ))
}

fn geometry(common: &Common) -> Result<Option<BeamGeometry>, Failure> {
    match (common.w0, common.wavelength) {
        (Some(w0), Some(lambda)) => Ok(Some(BeamGeometry::from_wavelength(w0, lambda)?)),
        _ => Ok(None),
    }
}

fn quadrature(common: &Common) -> Result<QuadratureConfig, Failure> {
    let cfg = QuadratureConfig {
        n_radial: common.quad_radial,
        n_azimuthal: common.quad_azimuthal,
        refine_tolerance: common.tol,
        execution: execution(common),
        ..QuadratureConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn execution(common: &Common) -> Execution {
    if common.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Physical {
    w0: f64,
    wavelength: f64,
    rayleigh_range: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    lengths: BTreeMap<&'static str, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    informations: BTreeMap<&'static str, f64>,
}

impl Physical {
    fn new(
        geom: &BeamGeometry,
        common: &Common,
        lengths: Vec<(&'static str, f64)>,
        informations: Vec<(&'static str, f64)>,
    ) -> Self {
        let z_r = geom.rayleigh_range();
        Self {
            w0: geom.w0(),
            wavelength: common.wavelength.unwrap_or(f64::NAN),
            rayleigh_range: z_r,
            lengths: lengths.into_iter().map(|(k, v)| (k, v * z_r)).collect(),
            informations: informations
                .into_iter()
                .map(|(k, v)| (k, v / (z_r * z_r)))
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct QfiOutput {
    state: String,
    hl: Option<HLIndex>,
    q_oracle: f64,
    q_printed: Option<f64>,
    printed_source: Option<String>,
    ratio_printed_over_oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    physical: Option<Physical>,
}

fn cmd_qfi(common: &Common, state: &StateArgs) -> Result<String, Failure> {
    let resolved = resolve_state(state)?;
    let oracle = qfi_oracle(&resolved.state)?.value;
    let printed = resolved.printed();
    let physical = geometry(common)?.map(|g| {
        let mut info = vec![("q_oracle", oracle)];
        if let Some(p) = printed {
            info.push(("q_printed", p.value));
        }
        Physical::new(&g, common, Vec::new(), info)
    });
    Ok(to_json(&QfiOutput {
        state: resolved.label(),
        hl: resolved.hl,
        q_oracle: oracle,
        q_printed: printed.map(|p| p.value),
        printed_source: printed.map(|p| p.source.to_string()),
        ratio_printed_over_oracle: printed.map(|p| p.value / oracle),
        physical,
    }))
}

/// Shortest round-trip text, switching to exponent form for extreme magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

const SCAN_HEADER: &str = "z_over_zR,f_total,f_radial,f_azimuthal,q_oracle,q_printed,ratio_oracle,ratio_printed,converged";

fn cmd_scan(
    common: &Common,
    state: &StateArgs,
    z_min: f64,
    z_max: f64,
    resolution: u64,
) -> Result<(String, Option<Failure>), Failure> {
    if !(z_min.is_finite() && z_max.is_finite() && z_max >= z_min) {
        return Err(Failure::Usage(format!(
            "invalid z range [{z_min}, {z_max}]"
        )));
    }
    let resolved = resolve_state(state)?;
    let cfg = quadrature(common)?;
    let n = resolution as usize;
    let grid: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                z_min
            } else {
                z_min + (z_max - z_min) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let report = scan_report(&resolved.state, &BeamGeometry::unit(), &grid, &cfg)?;
    let q = report.qfi_reference.value;
    let printed = resolved.printed().map(|p| p.value);
    let geom = geometry(common)?;

    let mut out = String::from(SCAN_HEADER);
    if geom.is_some() {
        out.push_str(",z_physical,f_total_physical,f_radial_physical,f_azimuthal_physical");
    }
    out.push('\n');
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for i in 0..report.len() {
        let f = report.f_total[i];
        let mut row = format!(
            "{},{},{},{},{},{},{},{},{}",
            num(report.z_grid[i]),
            num(f),
            num(report.f_radial[i]),
            num(report.f_azimuthal[i]),
            num(q),
            opt(printed),
            num(f / q),
            opt(printed.map(|p| f / p)),
            report.converged[i]
        );
        if let Some(g) = &geom {
            let z_r = g.rayleigh_range();
            let s = z_r * z_r;
            row.push_str(&format!(
                ",{},{},{},{}",
                num(report.z_grid[i] * z_r),
                num(f / s),
                num(report.f_radial[i] / s),
                num(report.f_azimuthal[i] / s)
            ));
        }
        out.push_str(&row);
        out.push('\n');
    }
    let failed = report.converged.iter().filter(|c| !**c).count();
    let failure = if failed > 0 && failed == report.len() {
        Some(Failure::Numerical(
            "quadrature failed to converge at every grid point".into(),
        ))
    } else {
        if failed > 0 {
            eprintln!(
                "warning: {failed} of {} grid points did not converge",
                report.len()
            );
        }
        None
    };
    Ok((out, failure))
}

#[derive(Serialize)]
struct OptimalPlaneOutput {
    state: String,
    z_opt: f64,
    f_max: f64,
    q: f64,
    ratio: f64,
    q_printed: Option<f64>,
    ratio_printed: Option<f64>,
    at_boundary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    physical: Option<Physical>,
}

fn cmd_optimal_plane(
    common: &Common,
    state: &StateArgs,
    z_min: f64,
    z_max: f64,
) -> Result<String, Failure> {
    let resolved = resolve_state(state)?;
    let cfg = quadrature(common)?;
    let opt = find_optimal_plane(&resolved.state, &BeamGeometry::unit(), (z_min, z_max), &cfg)?;
    let q = qfi_oracle(&resolved.state)?.value;
    let printed = resolved.printed().map(|p| p.value);
    if opt.at_boundary {
        eprintln!("warning: maximum lies on the edge of the search range");
    }
    let physical = geometry(common)?.map(|g| {
        Physical::new(
            &g,
            common,
            vec![("z_opt", opt.z_opt)],
            vec![("f_max", opt.f_max), ("q", q)],
        )
    });
    Ok(to_json(&OptimalPlaneOutput {
        state: resolved.label(),
        z_opt: opt.z_opt,
        f_max: opt.f_max,
        q,
        ratio: opt.f_max / q,
        q_printed: printed,
        ratio_printed: printed.map(|p| opt.f_max / p),
        at_boundary: opt.at_boundary,
        physical,
    }))
}

#[derive(Serialize)]
struct CrbOutput {
    state: String,
    n_photons: f64,
    n_trials: usize,
    z_true: f64,
    search_range: (f64, f64),
    seed: u64,
    mean: Option<f64>,
    empirical_variance: Option<f64>,
    crb_classical: f64,
    crb_quantum: f64,
    efficiency: Option<f64>,
    normalized_variance: Option<f64>,
    cfi_at_truth: f64,
    qfi: f64,
    n_boundary_flags: usize,
    n_empty_frames: usize,
    unreliable: bool,
    variance_defined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimates: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    physical: Option<Physical>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_crb_sim(
    common: &Common,
    state: &StateArgs,
    photons: f64,
    trials: usize,
    z_true: f64,
    z_min: f64,
    z_max: f64,
    with_estimates: bool,
) -> Result<String, Failure> {
    let resolved = resolve_state(state)?;
    let cfg = EstimationConfig {
        n_photons: photons,
        n_trials: trials,
        z_true,
        search_range: (z_min, z_max),
        seed: common.seed,
        execution: execution(common),
        quadrature: quadrature(common)?,
    };
    let run = crb_study(&cfg, &resolved.state, &BeamGeometry::unit())?;
    if run.unreliable {
        eprintln!(
            "warning: unreliable run, {} boundary-flagged and {} empty frames out of {trials}",
            run.n_boundary_flags, run.n_empty_frames
        );
    }
    let physical = geometry(common)?.map(|g| {
        let z_r = g.rayleigh_range();
        let mut p = Physical::new(
            &g,
            common,
            vec![("z_true", z_true)],
            vec![("cfi_at_truth", run.cfi_at_truth), ("qfi", run.qfi)],
        );
        // variances scale with z_R²
        p.lengths
            .insert("crb_classical_sqrt", run.crb_classical.sqrt() * z_r);
        if let Some(v) = run.empirical_variance {
            p.lengths.insert("empirical_std", v.sqrt() * z_r);
        }
        p
    });
    Ok(to_json(&CrbOutput {
        state: resolved.label(),
        n_photons: photons,
        n_trials: trials,
        z_true,
        search_range: (z_min, z_max),
        seed: common.seed,
        mean: run.mean,
        empirical_variance: run.empirical_variance,
        crb_classical: run.crb_classical,
        crb_quantum: run.crb_quantum,
        efficiency: run.efficiency,
        normalized_variance: run.normalized_variance(),
        cfi_at_truth: run.cfi_at_truth,
        qfi: run.qfi,
        n_boundary_flags: run.n_boundary_flags,
        n_empty_frames: run.n_empty_frames,
        unreliable: run.unreliable,
        variance_defined: run.variance_defined(),
        estimates: with_estimates.then(|| run.estimates.clone()),
        physical,
    }))
}

fn run(cli: &Cli, argv: &[String]) -> Result<(), Failure> {
    let common = &cli.common;
    let (content, deferred) = match &cli.command {
        Command::Qfi { state } => (cmd_qfi(common, state)?, None),
        Command::Scan {
            state,
            z_min,
            z_max,
            resolution,
        } => cmd_scan(common, state, *z_min, *z_max, *resolution)?,
        Command::OptimalPlane {
            state,
            z_min,
            z_max,
        } => (cmd_optimal_plane(common, state, *z_min, *z_max)?, None),
        Command::CrbSim {
            state,
            photons,
            trials,
            z_true,
            z_min,
            z_max,
            with_estimates,
        } => (
            cmd_crb_sim(
                common,
                state,
                *photons,
                *trials,
                *z_true,
                *z_min,
                *z_max,
                *with_estimates,
            )?,
            None,
        ),
    };

    let target = match &common.out {
        Some(path) => {
            std::fs::write(path, &content)
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
            path.display().to_string()
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))?;
            "-".to_string()
        }
    };

    if let Some(path) = &common.manifest {
        let parameters = serde_json::to_value(cli).expect("serializable arguments");
        let m = RunManifest::new(
            cli.command.name(),
            argv,
            parameters,
            common.seed,
            &target,
            content.as_bytes(),
        );
        std::fs::write(path, to_json(&m))
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    deferred.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
