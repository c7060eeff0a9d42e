use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    laguerre_with_derivative, ln_factorial_ratio, BeamGeometry, CylindricalPoint, LGIndex,
    ModeSuperposition, PropagatedParams,
};

/// ζ-dependent constants of a single LG mode.
///
/// The dimensionless field factorizes as `ψ(ρ, φ, ζ) = radial(ρ, ζ)·e^{−ilφ}`
/// with phase convention `+ρ²ζ/(1+ζ²) − lφ − (2p+|l|+1)·arctan ζ`.
#[derive(Debug, Clone, Copy)]
pub struct ModeProfile {
    idx: LGIndex,
    alpha: f64,
    norm: f64,
    inv_s: f64,
    inv_s2: f64,
    log_width_rate: f64,
    gouy: f64,
    gouy_rate: f64,
    curvature: f64,
    curvature_rate: f64,
}

impl ModeProfile {
    pub fn new(idx: LGIndex, zeta: f64) -> Self {
        let s2 = 1.0 + zeta * zeta;
        let order_plus_one = f64::from(idx.order() + 1);
        // √(2 p! / (π (p+|l|)!)) without forming factorials
        let norm = ((2.0 / PI).ln() + ln_factorial_ratio(idx.p, idx.abs_l()))
            .mul_add(0.5, 0.0)
            .exp();
        Self {
            idx,
            alpha: f64::from(idx.abs_l()),
            norm,
            inv_s: s2.sqrt().recip(),
            inv_s2: s2.recip(),
            log_width_rate: zeta / s2,
            gouy: order_plus_one * zeta.atan(),
            gouy_rate: order_plus_one / s2,
            curvature: zeta / s2,
            curvature_rate: (1.0 - zeta * zeta) / (s2 * s2),
        }
    }

    pub fn index(&self) -> LGIndex {
        self.idx
    }

    /// Beam radius in units of w₀.
    pub fn width(&self) -> f64 {
        self.inv_s.recip()
    }

    fn envelope(&self, rho: f64) -> (f64, f64) {
        let t = 2.0 * rho * rho * self.inv_s2;
        let x = std::f64::consts::SQRT_2 * rho * self.inv_s;
        let base = self.norm * self.inv_s * x.powi(self.alpha as i32) * (-0.5 * t).exp();
        (t, base)
    }

    fn phase(&self, rho: f64) -> f64 {
        rho * rho * self.curvature - self.gouy
    }

    /// Radial factor (including curvature and Gouy phase) at ρ.
    pub fn radial_value(&self, rho: f64) -> Complex64 {
        let (t, base) = self.envelope(rho);
        let amp = base * laguerre_with_derivative(self.idx.p, self.alpha, t).0;
        Complex64::from_polar(1.0, self.phase(rho)) * amp
    }

    /// Radial factor and its ζ-derivative at ρ.
    pub fn radial(&self, rho: f64) -> (Complex64, Complex64) {
        let (t, base) = self.envelope(rho);
        let (lag, lowered) = laguerre_with_derivative(self.idx.p, self.alpha, t);
        let amp = base * lag;
        // dL/dt = −L_{p−1}^{|l|+1}, dt/dζ = −2t·(ζ/(1+ζ²))
        let d_amp = self.log_width_rate * base * ((t - self.alpha - 1.0) * lag + 2.0 * t * lowered);
        let d_phase = rho * rho * self.curvature_rate - self.gouy_rate;
        let rot = Complex64::from_polar(1.0, self.phase(rho));
        (rot * amp, rot * Complex64::new(d_amp, amp * d_phase))
    }
}

/// A superposition with all per-mode constants fixed at one ζ.
#[derive(Debug, Clone)]
pub struct StateProfile {
    terms: Vec<(Complex64, i32, ModeProfile)>,
    zeta: f64,
}

impl StateProfile {
    pub fn new(state: &ModeSuperposition, zeta: f64) -> Self {
        Self {
            terms: state
                .terms()
                .iter()
                .map(|&(idx, c)| (c, idx.l, ModeProfile::new(idx, zeta)))
                .collect(),
            zeta,
        }
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Beam radius w(ζ)/w₀ (shared by every mode).
    pub fn width(&self) -> f64 {
        (1.0 + self.zeta * self.zeta).sqrt()
    }

    pub fn terms(&self) -> &[(Complex64, i32, ModeProfile)] {
        &self.terms
    }

    pub fn field(&self, rho: f64, phi: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, l, m)| c * m.radial_value(rho) * azimuthal(*l, phi))
            .sum()
    }

    pub fn field_and_derivative(&self, rho: f64, phi: f64) -> (Complex64, Complex64) {
        let mut psi = Complex64::new(0.0, 0.0);
        let mut dpsi = Complex64::new(0.0, 0.0);
        for (c, l, m) in &self.terms {
            let (v, d) = m.radial(rho);
            let w = c * azimuthal(*l, phi);
            psi += w * v;
            dpsi += w * d;
        }
        (psi, dpsi)
    }

    pub fn intensity(&self, rho: f64, phi: f64) -> f64 {
        self.field(rho, phi).norm_sqr()
    }
}

#[inline]
pub(crate) fn azimuthal(l: i32, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, -f64::from(l) * phi)
}

/// Dimensionless field and ζ-derivative at (ρ, φ, ζ).
pub fn field_and_derivative(
    state: &ModeSuperposition,
    rho: f64,
    phi: f64,
    zeta: f64,
) -> (Complex64, Complex64) {
    StateProfile::new(state, zeta).field_and_derivative(rho, phi)
}

/// Curvature radius, beam radius and Gouy phase at `z` (same length unit as
/// `geom`).
pub fn propagate_params(geom: &BeamGeometry, idx: LGIndex, z: f64) -> PropagatedParams {
    let z_r = geom.rayleigh_range();
    let zeta = z / z_r;
    let radius = if z == 0.0 {
        f64::INFINITY
    } else {
        z * (1.0 + (z_r / z).powi(2))
    };
    PropagatedParams {
        radius,
        inv_radius: z / (z * z + z_r * z_r),
        width: geom.w0() * (1.0 + zeta * zeta).sqrt(),
        gouy: f64::from(idx.order() + 1) * zeta.atan(),
    }
}

/// Complex amplitude in units of 1/length.
pub fn evaluate_field(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    pt: &CylindricalPoint,
) -> Complex64 {
    let profile = StateProfile::new(state, geom.zeta(pt.z));
    profile.field(pt.r / geom.w0(), pt.phi) / geom.w0()
}

/// `|Ψ|²`, a probability density over the transverse plane.
pub fn intensity(state: &ModeSuperposition, geom: &BeamGeometry, pt: &CylindricalPoint) -> f64 {
    evaluate_field(state, geom, pt).norm_sqr()
}

/// Analytic `∂Ψ/∂z` in units of 1/length².
pub fn field_z_derivative(
    state: &ModeSuperposition,
    geom: &BeamGeometry,
    pt: &CylindricalPoint,
) -> Complex64 {
    let profile = StateProfile::new(state, geom.zeta(pt.z));
    let (_, d) = profile.field_and_derivative(pt.r / geom.w0(), pt.phi);
    d / (geom.w0() * geom.rayleigh_range())
}
