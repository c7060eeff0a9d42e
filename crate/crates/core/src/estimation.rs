//! Shot-noise Monte Carlo for axial estimation.
//!
//! Each frame draws `K ~ Poisson(N)` photon positions from the intensity
//! `p(ρ, φ | ζ)` and estimates ζ by maximum likelihood. A study repeats
//! this over independent frames and compares the empirical variance with
//! `1/(N·F)` and `1/(N·Q)`.
//!
//! Trial `t` uses ChaCha8 seeded with the master seed on stream `t`, so
//! results do not depend on scheduling or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::beam::{BeamGeometry, ModeSuperposition, StateProfile};
use crate::classical::{refine_at_zeta, QuadratureConfig};
use crate::error::{Error, Result};
use crate::exec::{compensated_sum, Execution};
use crate::optimize::bracket_and_refine;
use crate::quantum::qfi_oracle;

pub const SAMPLER_RADIAL: usize = 2048;
pub const SAMPLER_AZIMUTHAL: usize = 512;
/// Sampling support in units of w(z).
const SAMPLER_EXTENT: f64 = 8.0;
pub const ML_GRID: usize = 48;
/// Golden-section stopping width, z_R units.
pub const ML_TOLERANCE: f64 = 1e-4;
/// Share of flagged trials above which a study is marked unreliable.
pub const UNRELIABLE_FRACTION: f64 = 0.05;

/// A detected photon in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Photon {
    pub r: f64,
    pub phi: f64,
}

/// Bilinear interpolant of the density on a polar grid, sampled exactly.
///
/// Inside a cell the interpolant is a mixture of a triangular density in ρ
/// times one grid row in φ, which gives an exact two-level inverse CDF.
#[derive(Debug, Clone)]
pub struct PhotonSampler {
    d_rho: f64,
    d_phi: f64,
    /// Cumulative weights of the 2·n_radial radial components.
    radial_cdf: Vec<f64>,
    /// Per grid row, cumulative weights of the 2·n_azimuthal φ components.
    row_cdf: Vec<Vec<f64>>,
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

impl PhotonSampler {
    pub fn new(state: &ModeSuperposition, zeta: f64) -> Self {
        let profile = StateProfile::new(state, zeta);
        let d_rho = SAMPLER_EXTENT * profile.width() / SAMPLER_RADIAL as f64;
        let d_phi = std::f64::consts::TAU / SAMPLER_AZIMUTHAL as f64;
        // density with the ρ Jacobian on the (n_r+1) × n_φ grid
        let rows: Vec<Vec<f64>> = (0..=SAMPLER_RADIAL)
            .map(|i| {
                let rho = d_rho * i as f64;
                (0..SAMPLER_AZIMUTHAL)
                    .map(|k| rho * profile.intensity(rho, d_phi * k as f64))
                    .collect()
            })
            .collect();
        let masses: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
        let radial_cdf = cumulative((0..SAMPLER_RADIAL).flat_map(|i| [masses[i], masses[i + 1]]));
        let row_cdf = rows
            .iter()
            .map(|r| {
                let n = r.len();
                cumulative((0..n).flat_map(|k| [r[k], r[(k + 1) % n]]))
            })
            .collect();
        Self {
            d_rho,
            d_phi,
            radial_cdf,
            row_cdf,
        }
    }

    /// One position in dimensionless units (ρ in w₀).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let c = pick(&self.radial_cdf, rng.random());
        let (cell, upper) = (c / 2, c % 2 == 1);
        let v: f64 = rng.random();
        // weight (1−t) on the lower row, t on the upper row
        let t = if upper { v.sqrt() } else { 1.0 - v.sqrt() };
        let row = &self.row_cdf[cell + usize::from(upper)];
        let a = pick(row, rng.random());
        let (k, right) = (a / 2, a % 2 == 1);
        let w: f64 = rng.random();
        let s = if right { w.sqrt() } else { 1.0 - w.sqrt() };
        ((cell as f64 + t) * self.d_rho, (k as f64 + s) * self.d_phi)
    }

    /// A Poisson frame with mean `n_expected`.
    pub fn frame<R: Rng + ?Sized>(&self, n_expected: f64, rng: &mut R) -> Vec<(f64, f64)> {
        if !(n_expected > 0.0) {
            return Vec::new();
        }
        let k = Poisson::new(n_expected)
            .expect("positive finite Poisson mean")
            .sample(rng) as usize;
        (0..k).map(|_| self.draw(rng)).collect()
    }
}

/// Draws one Poisson frame at axial position `z` (geometry units).
pub fn sample_photons(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    z: f64,
    n_expected: f64,
    seed: u64,
) -> Vec<Photon> {
    let sampler = PhotonSampler::new(state, geom.zeta(z));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sampler
        .frame(n_expected, &mut rng)
        .into_iter()
        .map(|(rho, phi)| Photon {
            r: rho * geom.w0(),
            phi,
        })
        .collect()
}

/// Maximum-likelihood estimate of the axial position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlEstimate {
    /// z_R units from [`ml_estimate_dimensionless`], geometry units from
    /// [`ml_estimate`].
    pub z: f64,
    pub log_likelihood: f64,
    pub at_boundary: bool,
}

fn log_likelihood(samples: &[(f64, f64)], state: &ModeSuperposition, zeta: f64) -> f64 {
    let profile = StateProfile::new(state, zeta);
    compensated_sum(
        samples
            .iter()
            .map(|&(rho, phi)| profile.intensity(rho, phi).max(f64::MIN_POSITIVE).ln()),
    )
}

/// ML over `range` (z_R units) from dimensionless samples.
pub fn ml_estimate_dimensionless(
    samples: &[(f64, f64)],
    state: &ModeSuperposition,
    range: (f64, f64),
) -> Result<MlEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(range.1 > range.0) {
        return Err(Error::InvalidConfig(format!(
            "empty search range [{}, {}]",
            range.0, range.1
        )));
    }
    let f = |zeta: f64| Ok::<_, Error>(log_likelihood(samples, state, zeta));
    let m = bracket_and_refine(
        range.0,
        range.1,
        ML_GRID,
        ML_TOLERANCE,
        |grid| grid.iter().map(|&z| f(z)).collect(),
        f,
    )?;
    Ok(MlEstimate {
        z: m.x,
        log_likelihood: m.value,
        at_boundary: m.at_boundary,
    })
}

/// ML estimate of z (geometry units) over `search_range` (geometry units).
pub fn ml_estimate(
    samples: &[Photon],
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    search_range: (f64, f64),
) -> Result<MlEstimate> {
    let scaled: Vec<(f64, f64)> = samples.iter().map(|p| (p.r / geom.w0(), p.phi)).collect();
    let range = (geom.zeta(search_range.0), geom.zeta(search_range.1));
    let m = ml_estimate_dimensionless(&scaled, state, range)?;
    Ok(MlEstimate {
        z: m.z * geom.rayleigh_range(),
        ..m
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    /// Expected photons per frame.
    pub n_photons: f64,
    pub n_trials: usize,
    /// z_R units.
    pub z_true: f64,
    /// z_R units.
    pub search_range: (f64, f64),
    pub seed: u64,
    pub execution: Execution,
    /// Used for F(z_true).
    pub quadrature: QuadratureConfig,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            n_photons: 1e4,
            n_trials: 500,
            z_true: 1.0,
            search_range: (0.05, 4.0),
            seed: 42,
            execution: Execution::default(),
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl EstimationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.n_photons > 0.0 && self.n_photons.is_finite()) {
            return bad(format!(
                "n_photons must be positive, got {}",
                self.n_photons
            ));
        }
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1".into());
        }
        let (lo, hi) = self.search_range;
        if !(lo < self.z_true && self.z_true < hi) {
            return bad(format!(
                "z_true = {} must lie inside the search range ({lo}, {hi})",
                self.z_true
            ));
        }
        self.quadrature.validate()
    }
}

/// Outcome of a Monte Carlo study; all z quantities in z_R units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationRun {
    /// One entry per frame with at least one photon, in trial order.
    pub estimates: Vec<f64>,
    pub mean: Option<f64>,
    /// Unbiased sample variance; `None` with fewer than two estimates.
    pub empirical_variance: Option<f64>,
    pub cfi_at_truth: f64,
    pub qfi: f64,
    /// `1/(N·F(z_true))`.
    pub crb_classical: f64,
    /// `1/(N·Q)`.
    pub crb_quantum: f64,
    /// `crb_classical / empirical_variance`.
    pub efficiency: Option<f64>,
    pub n_boundary_flags: usize,
    pub n_empty_frames: usize,
    pub unreliable: bool,
}

impl EstimationRun {
    pub fn variance_defined(&self) -> bool {
        self.empirical_variance.is_some()
    }

    /// `N·F·Var`, which tends to 1 for an efficient estimator.
    pub fn normalized_variance(&self) -> Option<f64> {
        self.empirical_variance.map(|v| v / self.crb_classical)
    }

    /// One-sided check that the variance is not below `crb_classical` by
    /// more than `sigmas` standard errors of the sample variance.
    pub fn respects_crb(&self, sigmas: f64) -> bool {
        match self.empirical_variance {
            None => true,
            Some(v) => {
                let n = self.estimates.len() as f64;
                let se = v * (2.0 / (n - 1.0)).sqrt();
                v + sigmas * se >= self.crb_classical
            }
        }
    }
}

struct Trial {
    estimate: Option<f64>,
    at_boundary: bool,
}

/// Runs `cfg.n_trials` independent frames at `cfg.z_true`.
pub fn crb_study(
    cfg: &EstimationConfig,
    state: &ModeSuperposition,
    _geom: &BeamGeometry,
) -> Result<EstimationRun> {
    cfg.validate()?;
    let refinement = refine_at_zeta(state, cfg.z_true, &cfg.quadrature)?;
    let cfi_at_truth = refinement.last().total;
    if !refinement.converged {
        return Err(Error::NonConvergence {
            last: cfi_at_truth,
            previous: refinement.estimates[refinement.estimates.len() - 2].total,
            n_radial: refinement.last().n_radial,
            n_azimuthal: refinement.last().n_azimuthal,
        });
    }
    let qfi = qfi_oracle(state)?.value;
    let sampler = PhotonSampler::new(state, cfg.z_true);

    let trials: Vec<Result<Trial>> = cfg.execution.map_range(cfg.n_trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t as u64);
        let frame = sampler.frame(cfg.n_photons, &mut rng);
        match ml_estimate_dimensionless(&frame, state, cfg.search_range) {
            Ok(m) => Ok(Trial {
                estimate: Some(m.z),
                at_boundary: m.at_boundary,
            }),
            Err(Error::EmptySamples) => Ok(Trial {
                estimate: None,
                at_boundary: false,
            }),
            Err(e) => Err(e),
        }
    });
    let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;

    let estimates: Vec<f64> = trials.iter().filter_map(|t| t.estimate).collect();
    let n_boundary_flags = trials.iter().filter(|t| t.at_boundary).count();
    let n_empty_frames = trials.iter().filter(|t| t.estimate.is_none()).count();
    let n = estimates.len();
    let mean = (n > 0).then(|| compensated_sum(estimates.iter().copied()) / n as f64);
    let empirical_variance = mean
        .filter(|_| n >= 2)
        .map(|m| compensated_sum(estimates.iter().map(|&x| (x - m) * (x - m))) / (n - 1) as f64);
    let crb_classical = 1.0 / (cfg.n_photons * cfi_at_truth);
    let crb_quantum = 1.0 / (cfg.n_photons * qfi);
    let flagged = (n_boundary_flags + n_empty_frames) as f64;
    Ok(EstimationRun {
        efficiency: empirical_variance.map(|v| crb_classical / v),
        mean,
        empirical_variance,
        cfi_at_truth,
        qfi,
        crb_classical,
        crb_quantum,
        n_boundary_flags,
        n_empty_frames,
        unreliable: flagged > UNRELIABLE_FRACTION * cfg.n_trials as f64,
        estimates,
    })
}
