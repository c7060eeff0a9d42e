//! Classical Fisher information of ideal transverse intensity detection.
//!
//! The detection density is `p(ρ, φ | ζ) = |ψ|²` and its ζ-derivative is
//! `2 Re(ψ* ∂_ζ ψ)` from the analytic field derivative. Integrals use a
//! Gauss-Legendre rule in ρ on `[0, r_max_factor·w(ζ)]` tensored with the
//! periodic trapezoid rule in φ. Both node counts are doubled until the
//! total, radial and azimuthal informations all change by less than
//! `refine_tolerance`.
//!
//! The total is assembled as the radial information plus the expected
//! information of φ conditional on ρ, so `total ≥ radial` holds exactly.
//! Isolated zeros of ψ make `(∂p)²/p` discontinuous; they are located and
//! integrated separately on small polar patches (see `vortex`).
//!
//! Marginal informations differentiate under the integral sign:
//! `∂_ζ ∫p dφ = ∫∂_ζ p dφ`, and likewise for `∫p ρ dρ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::beam::{ln_factorial_ratio, BeamGeometry, LGIndex, ModeSuperposition, StateProfile};
use crate::error::{Error, Result};
use crate::exec::{compensated_sum, Execution};
use crate::optimize::bracket_and_refine;
use crate::quadrature::{periodic_trapezoid, GaussLegendre};
use crate::quantum::{pure_mode_coefficient, qfi_oracle, qfi_printed_for, FisherValue};

mod vortex;

/// Absolute floor (1/z_R² units) below which refinement changes count as
/// converged; pure modes at the waist carry exactly zero information.
const ABSOLUTE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub n_radial: usize,
    pub n_azimuthal: usize,
    /// Truncation radius in units of w(z).
    pub r_max_factor: f64,
    /// Points with `p < density_floor·max p` are left out of the integrand.
    pub density_floor: f64,
    pub refine_tolerance: f64,
    /// Number of node doublings attempted before giving up.
    pub max_refinements: usize,
    pub execution: Execution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_radial: 256,
            n_azimuthal: 256,
            r_max_factor: 8.0,
            density_floor: 1e-13,
            refine_tolerance: 1e-6,
            max_refinements: 3,
            execution: Execution::default(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_radial < 8 || self.n_azimuthal < 8 {
            return bad(format!(
                "need at least 8 nodes per direction, got {}x{}",
                self.n_radial, self.n_azimuthal
            ));
        }
        if !(self.r_max_factor >= 4.0) {
            return bad(format!(
                "r_max_factor must be ≥ 4, got {}",
                self.r_max_factor
            ));
        }
        if !(self.density_floor > 0.0 && self.density_floor <= 1e-8) {
            return bad(format!(
                "density_floor must lie in (0, 1e-8], got {}",
                self.density_floor
            ));
        }
        if !(self.refine_tolerance > 0.0 && self.refine_tolerance <= 1e-3) {
            return bad(format!(
                "refine_tolerance must lie in (0, 1e-3], got {}",
                self.refine_tolerance
            ));
        }
        Ok(())
    }
}

/// One quadrature estimate of the three informations (1/z_R² units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherComponents {
    pub total: f64,
    pub radial: f64,
    pub azimuthal: f64,
    /// ∫p, should be 1.
    pub norm: f64,
    pub n_radial: usize,
    pub n_azimuthal: usize,
}

impl FisherComponents {
    fn settled(&self, previous: &FisherComponents, tol: f64) -> bool {
        let scale = |x: f64| x.abs().max(self.total.abs()).max(ABSOLUTE_FLOOR);
        [
            (self.total, previous.total),
            (self.radial, previous.radial),
            (self.azimuthal, previous.azimuthal),
        ]
        .iter()
        .all(|&(a, b)| (a - b).abs() <= tol * scale(a))
    }
}

/// Successive estimates of a refinement run.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub estimates: Vec<FisherComponents>,
    pub converged: bool,
}

impl Refinement {
    pub fn last(&self) -> &FisherComponents {
        self.estimates
            .last()
            .expect("refinement has at least one estimate")
    }

    fn into_result(self) -> Result<FisherComponents> {
        if self.converged {
            return Ok(*self.last());
        }
        let n = self.estimates.len();
        let last = self.estimates[n - 1];
        let previous = self.estimates[n.saturating_sub(2)];
        Err(Error::NonConvergence {
            last: last.total,
            previous: previous.total,
            n_radial: last.n_radial,
            n_azimuthal: last.n_azimuthal,
        })
    }
}

/// Nodes per radial panel, and of the coarser rule that checks it.
const PANEL_NODES: usize = 16;
const CHECK_NODES: usize = 8;
const MAX_PANEL_DEPTH: usize = 16;
/// Share of `refine_tolerance` granted to the adaptive radial panels.
const PANEL_TOLERANCE: f64 = 0.02;

/// Per-ring contributions of one panel.
#[derive(Default)]
struct PanelSums {
    radial: Vec<f64>,
    conditional: Vec<f64>,
    norm: Vec<f64>,
    sector: Vec<f64>,
    sector_rate: Vec<f64>,
}

impl PanelSums {
    fn value(&self) -> f64 {
        self.radial.iter().sum::<f64>() + self.conditional.iter().sum::<f64>()
    }
}

/// One estimate at fixed node counts.
///
/// ρ is covered by Gauss-Legendre panels, `n_radial / PANEL_NODES` to start
/// with, bisected wherever a coarser rule disagrees: near-nodal rings give
/// the conditional integrand radial features far narrower than the beam.
fn quadrature_estimate(
    profile: &StateProfile,
    vortices: &[vortex::Vortex],
    n_radial: usize,
    n_azimuthal: usize,
    cfg: &QuadratureConfig,
) -> FisherComponents {
    let rho_max = cfg.r_max_factor * profile.width();
    let (phis, w_phi) = periodic_trapezoid(n_azimuthal);
    let trig: Vec<(f64, f64)> = phis.iter().map(|p| (p.cos(), p.sin())).collect();
    let terms = profile.terms();
    // e^{−ilφ_k}·c for each term, row-major by term
    let angular: Vec<Vec<Complex64>> = terms
        .iter()
        .map(|(c, l, _)| {
            phis.iter()
                .map(|&phi| c * Complex64::from_polar(1.0, -f64::from(*l) * phi))
                .collect()
        })
        .collect();
    let rows = |rhos: &[f64]| -> Vec<(Vec<f64>, Vec<f64>)> {
        cfg.execution.map_slice(rhos, |&rho| {
            let factors: Vec<(Complex64, Complex64)> =
                terms.iter().map(|(_, _, m)| m.radial(rho)).collect();
            let mut p = Vec::with_capacity(n_azimuthal);
            let mut dp = Vec::with_capacity(n_azimuthal);
            for k in 0..n_azimuthal {
                let mut psi = Complex64::new(0.0, 0.0);
                let mut dpsi = Complex64::new(0.0, 0.0);
                for (ang, (v, d)) in angular.iter().zip(&factors) {
                    psi += ang[k] * v;
                    dpsi += ang[k] * d;
                }
                p.push(psi.norm_sqr());
                dp.push(2.0 * (psi.conj() * dpsi).re);
            }
            (p, dp)
        })
    };
    let nodes = |panels: &[(f64, f64)], n: usize| -> (Vec<f64>, Vec<f64>) {
        let rule = GaussLegendre::cached(n);
        panels
            .iter()
            .flat_map(|&(a, b)| rule.on_interval(a, b).collect::<Vec<_>>())
            .map(|(rho, w)| (rho, w * rho))
            .unzip()
    };

    let n_panels = (n_radial / PANEL_NODES).max(1);
    let mut panels: Vec<(f64, f64)> = (0..n_panels)
        .map(|i| {
            let at = |j: usize| rho_max * j as f64 / n_panels as f64;
            (at(i), at(i + 1))
        })
        .collect();
    let (first_rho, first_w) = nodes(&panels, PANEL_NODES);
    let first_rows = rows(&first_rho);
    let p_max = first_rows
        .iter()
        .flat_map(|(p, _)| p.iter().copied())
        .fold(0.0f64, f64::max);
    let floor = cfg.density_floor * p_max;
    let ring_mass_max = first_rows
        .iter()
        .map(|(p, _)| p.iter().sum::<f64>() * w_phi)
        .fold(0.0f64, f64::max);
    let ring_floor = cfg.density_floor * ring_mass_max;

    // total = radial + E_ρ[information of φ given ρ], the second part being
    // a sum of non-negative terms (dp − p·∂ln M)²/p over each ring
    let summarize = |rhos: &[f64], weights: &[f64], rows: &[(Vec<f64>, Vec<f64>)], n: usize| {
        rhos.chunks(n)
            .zip(weights.chunks(n))
            .zip(rows.chunks(n))
            .map(|((rhos, weights), rows)| {
                let mut sums = PanelSums {
                    sector: vec![0.0; n_azimuthal],
                    sector_rate: vec![0.0; n_azimuthal],
                    ..Default::default()
                };
                for ((&rho, &w_r), (p, dp)) in rhos.iter().zip(weights).zip(rows) {
                    let mass: f64 = p.iter().sum::<f64>() * w_phi;
                    let mass_rate: f64 = dp.iter().sum::<f64>() * w_phi;
                    sums.norm.push(w_r * mass);
                    if mass > ring_floor {
                        sums.radial.push(w_r * mass_rate * mass_rate / mass);
                    }
                    let rate = if mass > 0.0 { mass_rate / mass } else { 0.0 };
                    let near: Vec<&vortex::Vortex> = vortices
                        .iter()
                        .filter(|v| (v.x.hypot(v.y) - rho).abs() < 2.0 * v.sigma)
                        .collect();
                    let mut row_info = 0.0;
                    for k in 0..n_azimuthal {
                        if p[k] <= floor {
                            continue;
                        }
                        let (x, y) = (rho * trig[k].0, rho * trig[k].1);
                        let keep = 1.0 - near.iter().map(|v| v.bump(x, y)).sum::<f64>();
                        let excess = dp[k] - p[k] * rate;
                        row_info += keep * excess * excess / p[k];
                    }
                    sums.conditional.push(w_r * w_phi * row_info);
                    for k in 0..n_azimuthal {
                        sums.sector[k] += w_r * p[k];
                        sums.sector_rate[k] += w_r * dp[k];
                    }
                }
                sums
            })
            .collect::<Vec<_>>()
    };

    let mut fine = summarize(&first_rho, &first_w, &first_rows, PANEL_NODES);
    let scale = fine
        .iter()
        .map(PanelSums::value)
        .sum::<f64>()
        .abs()
        .max(ABSOLUTE_FLOOR);
    // panels cannot beat roundoff, whatever refine_tolerance asks for
    let panel_tol = (PANEL_TOLERANCE * cfg.refine_tolerance).max(1e-13);
    let tol = panel_tol * scale;
    let mut accepted: Vec<PanelSums> = Vec::new();
    for depth in 0..=MAX_PANEL_DEPTH {
        let (check_rho, check_w) = nodes(&panels, CHECK_NODES);
        let coarse = summarize(&check_rho, &check_w, &rows(&check_rho), CHECK_NODES);
        let mut split = Vec::new();
        for ((&(a, b), f), c) in panels.iter().zip(fine).zip(&coarse) {
            let allowed = tol * (b - a) / rho_max;
            if depth == MAX_PANEL_DEPTH || (f.value() - c.value()).abs() <= allowed {
                accepted.push(f);
            } else {
                let mid = 0.5 * (a + b);
                split.push((a, mid));
                split.push((mid, b));
            }
        }
        if split.is_empty() {
            break;
        }
        panels = split;
        let (rho, w) = nodes(&panels, PANEL_NODES);
        fine = summarize(&rho, &w, &rows(&rho), PANEL_NODES);
    }

    let mut conditional_terms: Vec<f64> = Vec::new();
    let mut radial_terms: Vec<f64> = Vec::new();
    let mut norm_terms: Vec<f64> = Vec::new();
    let mut sector = vec![0.0; n_azimuthal];
    let mut sector_rate = vec![0.0; n_azimuthal];
    for sums in &accepted {
        conditional_terms.extend(&sums.conditional);
        radial_terms.extend(&sums.radial);
        norm_terms.extend(&sums.norm);
        for k in 0..n_azimuthal {
            sector[k] += sums.sector[k];
            sector_rate[k] += sums.sector_rate[k];
        }
    }
    let (patch_r, patch_a) = ((n_radial / 8).max(24), (n_azimuthal / 8).max(32));
    let patches = cfg.execution.map_slice(vortices, |v| {
        vortex::patch_integral(profile, v, patch_r, patch_a, floor, panel_tol)
    });
    conditional_terms.extend(patches);

    let radial_info = compensated_sum(radial_terms);
    let sector_floor = cfg.density_floor * sector.iter().copied().fold(0.0, f64::max);
    let azimuthal_info = compensated_sum(
        sector
            .iter()
            .zip(&sector_rate)
            .filter(|(&m, _)| m > sector_floor)
            .map(|(&m, &d)| w_phi * d * d / m),
    );
    let total = radial_info + compensated_sum(conditional_terms).max(0.0);

    FisherComponents {
        total,
        radial: radial_info,
        azimuthal: azimuthal_info,
        norm: compensated_sum(norm_terms),
        n_radial,
        n_azimuthal,
    }
}

/// Runs the doubling refinement at ζ and returns every estimate.
pub fn refine_at_zeta(
    state: &ModeSuperposition,
    zeta: f64,
    cfg: &QuadratureConfig,
) -> Result<Refinement> {
    cfg.validate()?;
    let profile = StateProfile::new(state, zeta);
    let vortices = vortex::locate(&profile, 0.6 * cfg.r_max_factor * profile.width());
    let (mut nr, mut na) = (cfg.n_radial, cfg.n_azimuthal);
    let mut estimates = vec![quadrature_estimate(&profile, &vortices, nr, na, cfg)];
    for _ in 0..cfg.max_refinements {
        nr *= 2;
        na *= 2;
        let next = quadrature_estimate(&profile, &vortices, nr, na, cfg);
        let done = next.settled(estimates.last().unwrap(), cfg.refine_tolerance);
        estimates.push(next);
        if done {
            return Ok(Refinement {
                estimates,
                converged: true,
            });
        }
    }
    Ok(Refinement {
        estimates,
        converged: false,
    })
}

/// Total, radial and azimuthal information at axial position `z`.
pub fn cfi_components(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<FisherComponents> {
    refine_at_zeta(state, geom.zeta(z), cfg)?.into_result()
}

/// `∫∫ (∂_z p)²/p r dr dφ` in units of 1/z_R².
pub fn cfi_total(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfi_components(state, geom, z, cfg).map(|c| c.total)
}

/// Information in the radial marginal `∫p dφ`.
pub fn cfi_radial(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfi_components(state, geom, z, cfg).map(|c| c.radial)
}

/// Information in the azimuthal marginal `∫p r dr`.
pub fn cfi_azimuthal(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    z: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfi_components(state, geom, z, cfg).map(|c| c.azimuthal)
}

/// Closed-form intensity information of a pure LG mode,
/// `[2p(p+|l|) + 2p + |l| + 1]·4/R(z)²`, in units of 1/z_R².
pub fn cfi_pure_closed(idx: LGIndex, geom: &BeamGeometry, z: f64) -> f64 {
    let zeta = geom.zeta(z);
    // z_R / R(z)
    let inv_radius = zeta / (1.0 + zeta * zeta);
    4.0 * pure_mode_coefficient(idx) * inv_radius * inv_radius
}

/// `C(x, n)` for real `x`.
fn real_binomial(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x - f64::from(i)) / f64::from(i + 1))
}

/// `∫₀^∞ e^{−t} t^μ L_p^α(t) L_{p'}^{α'}(t) dt` as the finite sum
/// `(−1)^{p+p'} Γ(μ+1) Σ_k C(μ−α, p−k) C(μ−α', p'−k) C(μ+k, k)`.
pub fn laguerre_product_integral(
    mu: f64,
    p: u32,
    alpha: f64,
    p_prime: u32,
    alpha_prime: f64,
) -> f64 {
    assert!(mu > -1.0, "weight exponent must exceed −1, got {mu}");
    let sign = if (p + p_prime).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let sum: f64 = (0..=p.min(p_prime))
        .map(|k| {
            real_binomial(mu - alpha, p - k)
                * real_binomial(mu - alpha_prime, p_prime - k)
                * real_binomial(mu + f64::from(k), k)
        })
        .sum();
    sign * gamma(mu + 1.0) * sum
}

/// Pure-mode information assembled from the six Laguerre product integrals
/// of `∫ e^{−t} t^a [2t L_{p−1}^{a+1} + (t−a−1) L_p^a]² dt`; an independent
/// route to [`cfi_pure_closed`].
pub fn cfi_pure_from_laguerre_integrals(idx: LGIndex, geom: &BeamGeometry, z: f64) -> f64 {
    let (p, a) = (idx.p, f64::from(idx.abs_l()));
    let zeta = geom.zeta(z);
    let rate = zeta / (1.0 + zeta * zeta);
    // bracket = 2t·L1 + t·L0 − (a+1)·L0 with L0 = L_p^a, L1 = L_{p−1}^{a+1}
    let i00 = |mu: f64| laguerre_product_integral(mu, p, a, p, a);
    let (i11, i10_hi, i10_lo) = if p == 0 {
        (0.0, 0.0, 0.0)
    } else {
        (
            laguerre_product_integral(a + 2.0, p - 1, a + 1.0, p - 1, a + 1.0),
            laguerre_product_integral(a + 2.0, p - 1, a + 1.0, p, a),
            laguerre_product_integral(a + 1.0, p - 1, a + 1.0, p, a),
        )
    };
    let integral = 4.0 * i11 + i00(a + 2.0) + (a + 1.0).powi(2) * i00(a) + 4.0 * i10_hi
        - 4.0 * (a + 1.0) * i10_lo
        - 2.0 * (a + 1.0) * i00(a + 1.0);
    let ratio = ln_factorial_ratio(idx.p, idx.abs_l()).exp();
    4.0 * ratio * rate * rate * integral
}

/// Maximizer of the total intensity information over an axial interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalPlane {
    /// Same length unit as the geometry.
    pub z_opt: f64,
    /// 1/z_R² units.
    pub f_max: f64,
    pub at_boundary: bool,
}

/// Number of points in the coarse scan that brackets the optimum.
pub const OPTIMAL_PLANE_GRID: usize = 64;
/// Golden-section stopping width, in units of z_R.
pub const OPTIMAL_PLANE_TOLERANCE: f64 = 1e-4;

/// Coarse scan over `z_range` followed by golden-section refinement of
/// [`cfi_total`]. The range must lie in `(0, 5 z_R]`.
pub fn find_optimal_plane(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    z_range: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<OptimalPlane> {
    let z_r = geom.rayleigh_range();
    let (lo, hi) = (z_range.0 / z_r, z_range.1 / z_r);
    if !(lo > 0.0 && hi > lo && hi <= 5.0 + 1e-12) {
        return Err(Error::InvalidConfig(format!(
            "optimal-plane search range must lie in (0, 5] z_R, got [{lo}, {hi}]"
        )));
    }
    let f = |zeta: f64| {
        refine_at_zeta(state, zeta, cfg)?
            .into_result()
            .map(|c| c.total)
    };
    let m = bracket_and_refine(
        lo,
        hi,
        OPTIMAL_PLANE_GRID,
        OPTIMAL_PLANE_TOLERANCE,
        |grid| {
            cfg.execution
                .map_slice(grid, |&zeta| f(zeta))
                .into_iter()
                .collect()
        },
        f,
    )?;
    Ok(OptimalPlane {
        z_opt: m.x * z_r,
        f_max: m.value,
        at_boundary: m.at_boundary,
    })
}

/// Information curves over an axial grid plus the quantum references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    /// Axial positions in units of z_R.
    pub z_grid: Vec<f64>,
    pub f_total: Vec<f64>,
    pub f_radial: Vec<f64>,
    pub f_azimuthal: Vec<f64>,
    pub converged: Vec<bool>,
    pub qfi_reference: FisherValue,
    /// Printed closed form for the state, when one applies.
    pub qfi_printed: Option<FisherValue>,
}

impl FisherReport {
    pub fn len(&self) -> usize {
        self.z_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z_grid.is_empty()
    }
}

/// Evaluates all three informations on `z_grid` (geometry length units).
/// Non-converged points keep their last estimate and are flagged.
pub fn scan_report(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    z_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<FisherReport> {
    cfg.validate()?;
    let qfi_reference = qfi_oracle(state)?;
    let zetas: Vec<f64> = z_grid.iter().map(|&z| geom.zeta(z)).collect();
    let points = cfg
        .execution
        .map_slice(&zetas, |&zeta| refine_at_zeta(state, zeta, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(FisherReport {
        f_total: points.iter().map(|r| r.last().total).collect(),
        f_radial: points.iter().map(|r| r.last().radial).collect(),
        f_azimuthal: points.iter().map(|r| r.last().azimuthal).collect(),
        converged: points.iter().map(|r| r.converged).collect(),
        z_grid: zetas,
        qfi_reference,
        qfi_printed: qfi_printed_for(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use crate::quantum::qfi_pure;

    fn unit() -> BeamGeometry {
        BeamGeometry::unit()
    }

    fn two_mode(l: i32) -> ModeSuperposition {
        ModeSuperposition::equal(&[LGIndex::new(0, l), LGIndex::new(0, 0)]).unwrap()
    }

    #[test]
    fn config_validation() {
        let ok = QuadratureConfig::default();
        assert!(ok.validate().is_ok());
        assert!(QuadratureConfig { n_radial: 4, ..ok }.validate().is_err());
        assert!(QuadratureConfig {
            r_max_factor: 3.0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(QuadratureConfig {
            density_floor: 1e-6,
            ..ok
        }
        .validate()
        .is_err());
        assert!(QuadratureConfig {
            density_floor: 0.0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(QuadratureConfig {
            refine_tolerance: 1e-2,
            ..ok
        }
        .validate()
        .is_err());
    }

    #[test]
    fn gaussian_saturates_at_rayleigh_plane() {
        let s = ModeSuperposition::pure(LGIndex::new(0, 0));
        let f = cfi_total(&s, &unit(), 1.0, &QuadratureConfig::default()).unwrap();
        assert!((f - 1.0).abs() < 1e-6, "{f}");
    }

    #[test]
    fn pure_modes_are_blind_at_waist() {
        for idx in [LGIndex::new(0, 0), LGIndex::new(1, 3), LGIndex::new(2, -1)] {
            let s = ModeSuperposition::pure(idx);
            let c = cfi_components(&s, &unit(), 0.0, &QuadratureConfig::default()).unwrap();
            assert!(c.total.abs() < 1e-20 && c.radial.abs() < 1e-20);
            assert_eq!(cfi_pure_closed(idx, &unit(), 0.0), 0.0);
        }
    }

    #[test]
    fn closed_form_values() {
        let g = BeamGeometry::new(0.5, 9.0).unwrap();
        let zr = g.rayleigh_range();
        assert!((cfi_pure_closed(LGIndex::new(0, 0), &g, zr) - 1.0).abs() < 1e-15);
        assert!(
            (cfi_pure_closed(LGIndex::new(0, 1), &g, -zr) - qfi_pure(LGIndex::new(0, 1)).value)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn pure_modes_have_symmetric_intensity() {
        let s = ModeSuperposition::pure(LGIndex::new(1, 2));
        let c = cfi_components(&s, &unit(), 0.7, &QuadratureConfig::default()).unwrap();
        // 1D oracle on the radial marginal m(ρ) = 2πρ|ψ|²
        let mode = crate::beam::ModeProfile::new(LGIndex::new(1, 2), 0.7);
        let oracle = GaussLegendre::new(600).integrate(0.0, 10.0, |rho| {
            let (v, d) = mode.radial(rho);
            let dp = 2.0 * (v.conj() * d).re;
            let p = v.norm_sqr();
            if p > 0.0 {
                std::f64::consts::TAU * rho * dp * dp / p
            } else {
                0.0
            }
        });
        assert!(
            (c.radial - oracle).abs() < 1e-9 * oracle,
            "{} vs {oracle}",
            c.radial
        );
        assert!(c.azimuthal < 1e-25);
        assert!((c.norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn laguerre_integral_special_cases() {
        for p in 0..5u32 {
            for l in 0..4u32 {
                let a = f64::from(l);
                let expected = (-crate::beam::ln_factorial_ratio(p, l)).exp();
                let got = laguerre_product_integral(a, p, a, p, a);
                assert!((got - expected).abs() < 1e-10 * expected);
                for q in 0..5u32 {
                    if q != p {
                        assert!(laguerre_product_integral(a, p, a, q, a).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn laguerre_integral_against_quadrature() {
        // direct Gauss-Legendre quadrature in u = √t, where t^μ is smooth
        let rule = GaussLegendre::new(400);
        let cases = [
            (2.0, 1, 1.0, 0, 0.0),
            (3.0, 2, 1.0, 1, 2.0),
            (1.5, 1, 0.0, 2, 1.0),
        ];
        for &(mu, p, a, q, b) in &cases {
            let oracle = rule.integrate(0.0, 11.0, |u: f64| {
                let t = u * u;
                2.0 * u
                    * (-t).exp()
                    * t.powf(mu)
                    * crate::beam::laguerre(p, a, t)
                    * crate::beam::laguerre(q, b, t)
            });
            let got = laguerre_product_integral(mu, p, a, q, b);
            assert!(
                (got - oracle).abs() < 1e-9 * oracle.abs().max(1.0),
                "{mu} {p} {a} {q} {b}: {got} vs {oracle}"
            );
        }
        assert!((laguerre_product_integral(2.0, 1, 1.0, 0, 0.0) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_from_six_integrals() {
        for p in 0..=3u32 {
            for l in -4..=4 {
                let idx = LGIndex::new(p, l);
                for z in [0.25, 1.0, 2.0] {
                    let a = cfi_pure_from_laguerre_integrals(idx, &unit(), z);
                    let b = cfi_pure_closed(idx, &unit(), z);
                    assert!((a - b).abs() < 1e-10 * b, "{idx} z={z}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn cfi_is_even_in_z() {
        let s = two_mode(2);
        let cfg = QuadratureConfig::default();
        for z in [0.3, 1.2] {
            let a = cfi_components(&s, &unit(), z, &cfg).unwrap();
            let b = cfi_components(&s, &unit(), -z, &cfg).unwrap();
            assert!((a.total - b.total).abs() < 1e-9 * a.total);
            assert!((a.radial - b.radial).abs() < 1e-9 * a.total);
            assert!((a.azimuthal - b.azimuthal).abs() < 1e-9 * a.total);
        }
    }

    #[test]
    fn refinement_converges_monotonically() {
        let s = two_mode(3);
        let cfg = QuadratureConfig {
            n_radial: 8,
            n_azimuthal: 8,
            max_refinements: 8,
            ..QuadratureConfig::default()
        };
        let run = refine_at_zeta(&s, 0.8, &cfg).unwrap();
        assert!(run.converged);
        let diffs: Vec<f64> = run
            .estimates
            .windows(2)
            .map(|w| (w[1].total - w[0].total).abs() / w[1].total)
            .collect();
        for pair in diffs.windows(2) {
            if pair[0] > 1e-12 {
                assert!(pair[1] < pair[0], "{diffs:?}");
            }
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let s = two_mode(5);
        let cfg = QuadratureConfig {
            n_radial: 8,
            n_azimuthal: 8,
            max_refinements: 1,
            refine_tolerance: 1e-9,
            ..QuadratureConfig::default()
        };
        match cfi_total(&s, &unit(), 0.5, &cfg) {
            Err(Error::NonConvergence { n_radial: 16, .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn floor_halving_is_stable() {
        let s = ModeSuperposition::equal(&[LGIndex::new(1, 1), LGIndex::new(0, -2)]).unwrap();
        let base = QuadratureConfig::default();
        let a = cfi_total(&s, &unit(), 0.6, &base).unwrap();
        let b = cfi_total(
            &s,
            &unit(),
            0.6,
            &QuadratureConfig {
                density_floor: 5e-14,
                ..base
            },
        )
        .unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn petals_rotate_only_with_unequal_gouy_orders() {
        let cfg = QuadratureConfig::default();
        // equal orders: the pattern is rigid and only scales
        let rigid = ModeSuperposition::equal(&[LGIndex::new(0, 1), LGIndex::new(0, -1)]).unwrap();
        let c = cfi_components(&rigid, &unit(), 0.1, &cfg).unwrap();
        assert!(c.azimuthal < 1e-12 * c.total.max(1e-12), "{c:?}");
        // orders 2 and 0: petals turn at rate 1/(1+ζ²)
        let f = cfi_azimuthal(&two_mode(2), &unit(), 0.1, &cfg).unwrap();
        assert!(f > 0.1, "{f}");
    }

    #[test]
    fn optimal_plane_of_pure_modes() {
        let cfg = QuadratureConfig::default();
        for (idx, fmax) in [(LGIndex::new(0, 0), 1.0), (LGIndex::new(0, 3), 4.0)] {
            let s = ModeSuperposition::pure(idx);
            let opt = find_optimal_plane(&s, &unit(), (0.05, 4.0), &cfg).unwrap();
            assert!((opt.z_opt - 1.0).abs() < 1e-3, "{opt:?}");
            assert!((opt.f_max - fmax).abs() < 1e-6 * fmax);
            assert!(!opt.at_boundary);
        }
        let opt = find_optimal_plane(&two_mode(2), &unit(), (0.05, 4.0), &cfg).unwrap();
        assert!((opt.z_opt - 1.0).abs() > 0.05, "{opt:?}");
        assert!(find_optimal_plane(&two_mode(2), &unit(), (0.0, 4.0), &cfg).is_err());
        assert!(find_optimal_plane(&two_mode(2), &unit(), (1.0, 6.0), &cfg).is_err());
    }

    #[test]
    fn empty_scan() {
        let r = scan_report(&two_mode(1), &unit(), &[], &QuadratureConfig::default()).unwrap();
        assert!(r.is_empty());
        assert!((r.qfi_reference.value - 1.75).abs() < 1e-14);
        assert_eq!(r.qfi_printed.unwrap().value, 7.0);
    }
}
