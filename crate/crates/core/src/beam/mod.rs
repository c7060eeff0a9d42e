//! Laguerre-Gauss beam model.
//!
//! Internally every quantity is dimensionless: ρ = r/w₀, ζ = z/z_R and the
//! field is measured in units of 1/w₀. The physical-unit entry points
//! ([`evaluate_field`], [`intensity`], [`field_z_derivative`]) convert at the
//! boundary.

mod field;
mod laguerre;

pub use field::{
    evaluate_field, field_and_derivative, field_z_derivative, intensity, propagate_params,
    ModeProfile, StateProfile,
};
pub use laguerre::laguerre;
pub(crate) use laguerre::{laguerre_with_derivative, ln_factorial_ratio};

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on Σ|c|² for [`ModeSuperposition::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Waist radius and wavenumber; the Rayleigh range follows from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    w0: f64,
    k: f64,
    z_r: f64,
}

impl BeamGeometry {
    pub fn new(w0: f64, k: f64) -> Result<Self> {
        if !(w0 > 0.0 && w0.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "waist radius must be positive, got {w0}"
            )));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "wavenumber must be positive, got {k}"
            )));
        }
        Ok(Self {
            w0,
            k,
            z_r: k * w0 * w0 / 2.0,
        })
    }

    /// `w₀ = 1`, `k = 2`, hence `z_R = 1`: lengths are then already in
    /// Rayleigh-range units.
    pub fn unit() -> Self {
        Self {
            w0: 1.0,
            k: 2.0,
            z_r: 1.0,
        }
    }

    pub fn from_wavelength(w0: f64, wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Self::new(w0, TAU / wavelength)
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn rayleigh_range(&self) -> f64 {
        self.z_r
    }

    /// Axial position in units of z_R.
    pub fn zeta(&self, z: f64) -> f64 {
        z / self.z_r
    }
}

/// Radial index `p` and azimuthal index `l` of an LG mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LGIndex {
    pub p: u32,
    pub l: i32,
}

impl LGIndex {
    pub const fn new(p: u32, l: i32) -> Self {
        Self { p, l }
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }

    /// Mode order `2p + |l|`; the Gouy phase is `(order + 1)·arctan ζ`.
    pub fn order(&self) -> u32 {
        2 * self.p + self.abs_l()
    }
}

impl fmt::Display for LGIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}l{}", self.p, self.l)
    }
}

/// Normalized complex superposition of distinct LG modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSuperposition {
    terms: Vec<(LGIndex, Complex64)>,
}

impl ModeSuperposition {
    /// Accepts only already-normalized coefficient lists.
    pub fn new(terms: Vec<(LGIndex, Complex64)>) -> Result<Self> {
        Self::check_terms(&terms)?;
        let norm: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("Σ|c|² = {norm}, expected 1")));
        }
        Ok(Self { terms })
    }

    /// Rescales the coefficients to unit norm.
    pub fn normalized(terms: Vec<(LGIndex, Complex64)>) -> Result<Self> {
        Self::check_terms(&terms)?;
        let norm: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState(format!(
                "cannot normalize, Σ|c|² = {norm}"
            )));
        }
        let scale = norm.sqrt().recip();
        Ok(Self {
            terms: terms.into_iter().map(|(i, c)| (i, c * scale)).collect(),
        })
    }

    pub fn pure(idx: LGIndex) -> Self {
        Self {
            terms: vec![(idx, Complex64::new(1.0, 0.0))],
        }
    }

    /// Equal-weight real superposition `Σ |idx⟩ / √n`.
    pub fn equal(indices: &[LGIndex]) -> Result<Self> {
        Self::normalized(
            indices
                .iter()
                .map(|&i| (i, Complex64::new(1.0, 0.0)))
                .collect(),
        )
    }

    fn check_terms(terms: &[(LGIndex, Complex64)]) -> Result<()> {
        if terms.is_empty() {
            return Err(Error::InvalidState("empty superposition".into()));
        }
        for (i, (a, c)) in terms.iter().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidState(format!(
                    "non-finite coefficient for {a}"
                )));
            }
            if terms[..i].iter().any(|(b, _)| b == a) {
                return Err(Error::InvalidState(format!("duplicate mode {a}")));
            }
        }
        Ok(())
    }

    pub fn terms(&self) -> &[(LGIndex, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single mode if the state is a pure LG mode (up to a global phase).
    pub fn as_pure(&self) -> Option<LGIndex> {
        match self.terms.as_slice() {
            [(idx, _)] => Some(*idx),
            _ => None,
        }
    }

    /// Largest `n₊ + n₋ = 2p + |l|` over the terms.
    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|(i, _)| i.order()).max().unwrap_or(0)
    }

    /// Same state with every coefficient multiplied by `phase`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let rot = Complex64::from_polar(1.0, phase);
        Self {
            terms: self.terms.iter().map(|&(i, c)| (i, c * rot)).collect(),
        }
    }
}

impl fmt::Display for ModeSuperposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{idx}*{}{:+}i", c.re, c.im)?;
        }
        Ok(())
    }
}

/// Beam parameters at an axial position for a given mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatedParams {
    /// Wavefront radius of curvature; infinite at the waist.
    pub radius: f64,
    pub inv_radius: f64,
    pub width: f64,
    pub gouy: f64,
}

/// Point in cylindrical coordinates, `phi` wrapped into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylindricalPoint {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

impl CylindricalPoint {
    pub fn new(r: f64, phi: f64, z: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "radius must be non-negative, got {r}"
            )));
        }
        Ok(Self {
            r,
            phi: phi.rem_euclid(TAU),
            z,
        })
    }
}
