use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid beam geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mode superposition: {0}")]
    InvalidState(String),

    #[error("generator cutoff {cutoff} too small, state needs at least {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("two-mode formula requires different azimuthal indices, got l = l' = {0}")]
    EqualAzimuthalIndices(i32),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "quadrature did not converge at {n_radial}x{n_azimuthal} nodes \
         (last {last:.12e}, previous {previous:.12e})"
    )]
    NonConvergence {
        last: f64,
        previous: f64,
        n_radial: usize,
        n_azimuthal: usize,
    },

    #[error("no photon samples to estimate from")]
    EmptySamples,
}
