//! Fisher information for axial (defocus) localization with Laguerre-Gauss
//! vortex beams and their superpositions.
//!
//! The crate is organised bottom-up:
//!
//! * [`beam`] evaluates LG fields, intensities and their analytic
//!   z-derivatives in dimensionless coordinates (ρ = r/w₀, ζ = z/z_R).
//! * [`oscillator`] holds the two-mode Fock-space representation of the
//!   defocus generator and the Hermite-Laguerre sphere expansion.
//! * [`quantum`] gives the closed-form and variance-based quantum Fisher
//!   information.
//! * [`classical`] computes the Fisher information of ideal intensity
//!   detection by polar quadrature, plus its radial/azimuthal marginals.
//! * [`estimation`] simulates Poisson shot-noise frames and runs maximum
//!   likelihood axial estimation against the Cramér-Rao bounds.
//!
//! All Fisher quantities are reported in units of 1/z_R².

pub mod beam;
pub mod classical;
mod error;
pub mod estimation;
pub mod exec;
pub mod optimize;
pub mod oscillator;
pub mod quadrature;
pub mod quantum;

pub use beam::{BeamGeometry, CylindricalPoint, LGIndex, ModeSuperposition, PropagatedParams};
pub use classical::{FisherComponents, FisherReport, QuadratureConfig};
pub use error::{Error, Result};
pub use estimation::{EstimationConfig, EstimationRun};
pub use exec::Execution;
pub use oscillator::{FockState, GeneratorMatrix, HLIndex};
pub use quantum::{FisherSource, FisherValue};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
