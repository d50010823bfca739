//! Dense complex linear algebra used throughout the crate.

pub mod eig;
pub mod matrix;
pub mod metrics;
pub mod ops;
pub mod random;
pub mod svd;

pub use eig::{herm_eig, normal_eig, psd_pinv_sqrt, psd_sqrt, support_projector, SpectralDecomposition};
pub use matrix::{c, cr, pauli, ComplexMatrix, I, ONE, ZERO};
pub use metrics::{check_state, relative_entropy, uhlmann_fidelity};
pub use ops::{gram_schmidt_complete, kron, kron_all, partial_trace, Keep};
pub use svd::{svd, Svd};
