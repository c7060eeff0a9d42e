//! Quantum Fisher information for axial displacement.
//!
//! Values are in units of 1/z_R². The printed closed forms for
//! Hermite-Laguerre modes and two-mode superpositions are evaluated
//! verbatim and kept distinct from the generator-variance oracle, which is
//! authoritative; the two disagree by a state-dependent factor (4 for the
//! two-mode formula).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::beam::{BeamGeometry, LGIndex, ModeSuperposition};
use crate::error::{Error, Result};
use crate::oscillator::{generator_variance, required_cutoff, HLIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FisherSource {
    ClosedFormPure,
    ClosedFormHl,
    ClosedFormSuperposition,
    VarianceOracle,
}

impl fmt::Display for FisherSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FisherSource::ClosedFormPure => "closed_form_pure",
            FisherSource::ClosedFormHl => "closed_form_hl",
            FisherSource::ClosedFormSuperposition => "closed_form_superposition",
            FisherSource::VarianceOracle => "variance_oracle",
        })
    }
}

/// A Fisher information in units of 1/z_R², tagged with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherValue {
    pub value: f64,
    pub source: FisherSource,
}

impl FisherValue {
    /// Value in 1/length² for the given geometry.
    pub fn physical(&self, geom: &BeamGeometry) -> f64 {
        self.value / geom.rayleigh_range().powi(2)
    }
}

/// `2p(p+|l|) + 2p + |l| + 1`.
pub fn pure_mode_coefficient(idx: LGIndex) -> f64 {
    let (p, a) = (f64::from(idx.p), f64::from(idx.abs_l()));
    2.0 * p * (p + a) + 2.0 * p + a + 1.0
}

pub fn qfi_pure(idx: LGIndex) -> FisherValue {
    FisherValue {
        value: pure_mode_coefficient(idx),
        source: FisherSource::ClosedFormPure,
    }
}

/// Printed Hermite-Laguerre expression, evaluated as written.
pub fn qfi_hl_printed(idx: &HLIndex) -> FisherValue {
    let (n1, n2) = (f64::from(idx.n1), f64::from(idx.n2));
    let value = 4.0
        + n1
        + n2 * (3.0 + n2)
        + n1 * (3.0 + 4.0 * n2)
        + (n1 - n1 * n1 + n2 + 4.0 * n1 * n2 - n2 * n2) * (2.0 * idx.theta).cos();
    FisherValue {
        value,
        source: FisherSource::ClosedFormHl,
    }
}

/// Printed formula for `(|LG_{0l}⟩ + |LG_{0l'}⟩)/√2`, evaluated as written.
pub fn qfi_two_mode_printed(l: i32, l_prime: i32) -> Result<FisherValue> {
    if l == l_prime {
        return Err(Error::EqualAzimuthalIndices(l));
    }
    let (a, b) = (
        f64::from(l.unsigned_abs()),
        f64::from(l_prime.unsigned_abs()),
    );
    Ok(FisherValue {
        value: 4.0 + 2.0 * (a + b) + (a - b).powi(2),
        source: FisherSource::ClosedFormSuperposition,
    })
}

/// `4·Var(G) = Var(G̃)/z_R²` from the truncated oscillator algebra.
pub fn qfi_oracle(state: &ModeSuperposition) -> Result<FisherValue> {
    Ok(FisherValue {
        value: generator_variance(state, required_cutoff(state))?,
        source: FisherSource::VarianceOracle,
    })
}

/// If `state` is an equal-weight two-term superposition of p = 0 modes,
/// their azimuthal indices.
pub fn two_mode_indices(state: &ModeSuperposition) -> Option<(i32, i32)> {
    match state.terms() {
        [(a, ca), (b, cb)]
            if a.p == 0 && b.p == 0 && a.l != b.l && (ca.norm() - cb.norm()).abs() < 1e-12 =>
        {
            Some((a.l, b.l))
        }
        _ => None,
    }
}

/// The printed closed form that applies to `state`, if any: the pure-mode
/// expression for a single mode, the two-mode formula for an equal-weight
/// pair of p = 0 modes.
pub fn qfi_printed_for(state: &ModeSuperposition) -> Option<FisherValue> {
    if let Some(idx) = state.as_pure() {
        return Some(qfi_pure(idx));
    }
    two_mode_indices(state).and_then(|(l, lp)| qfi_two_mode_printed(l, lp).ok())
}
