//! Dense complex linear algebra for the lower-bound certificates: Jacobi SVD,
//! circulant spectra, mean square volume, r-volume, rigidity brackets and the
//! rank-`h` perturbation inequality.

mod matrix;
mod svd;
mod volume;

use thiserror::Error;

pub use matrix::{parse_complex_tokens, root_of_unity, ComplexMatrix};
pub use svd::{numerical_rank, svd, svd_with_vectors, SpectralData, RANK_TOL};
pub use volume::{
    check_perturbation, circulant_spectral_data, circulant_spectrum, log2_elementary_symmetric, log2_msv,
    log2_msv_all, msv, msv_bruteforce, orthonormal_completion, r_volume, rigidity_sandwich, PerturbationReport,
    PerturbationViolation, BRUTEFORCE_MSV_LIMIT, PERTURBATION_SLACK, R_VOLUME_ROW_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix must be square, got {0:?}")]
    NotSquare((usize, usize)),
    #[error("rows have different lengths")]
    Ragged,
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("index r = {r} outside {min}..={max}")]
    RankOutOfRange { r: usize, min: usize, max: usize },
    #[error("{what} is limited to {limit}, got {got}")]
    SizeGuard { what: &'static str, limit: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
