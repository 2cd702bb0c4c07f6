//! Numerical laboratory for quaternion sample covariance spectra.
//!
//! The crate samples quaternion data matrices, embeds them as complex
//! matrices, forms sample covariance matrices, and measures how their
//! empirical spectral distributions converge to the Marchenko-Pastur law.
//! Alongside the Monte Carlo machinery it implements the structured-matrix
//! facts that make the quaternion case tractable: the multiplicative 2x2
//! block embedding, the Type-I/II/III block patterns with the
//! inverse-structure check, the Kramers pairing of the embedded spectrum,
//! and the truncation/centralization/rescaling preprocessing pipeline.

pub mod embed;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mp;
pub mod quad;
pub mod quat;
pub mod sampling;
pub mod spectra;
pub mod structure;

pub use embed::{embed_matrix, embed_scalar, ComplexMatrix, QuaternionMatrix};
pub use error::{Error, Result};
pub use experiment::{run_experiment, run_sweep, ConvergenceReport, ExperimentConfig};
pub use metrics::{kolmogorov_distance, levy_distance, Cdf, StepCdf};
pub use mp::MPLaw;
pub use quat::Quaternion;
pub use sampling::{
    lindeberg_estimate, preprocess_entries, sample_matrix, EntryDistribution, PipelineOutput,
};
pub use spectra::{
    empirical_stieltjes, esd_eval, hermitian_eigenvalues, sample_covariance, spectral_sample,
    SpectralSample,
};
pub use structure::{
    inverse_structure_check, random_type_iii, structure_residual, StructureKind, StructureReport,
};
