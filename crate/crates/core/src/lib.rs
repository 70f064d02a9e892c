//! Dephasing dynamics of classical and quantum correlations in two-photon
//! Bell-diagonal states.
//!
//! - [`qstate`]: density matrices, spectra and entropies
//! - [`correlations`]: closed-form measures for Bell-diagonal states
//! - [`oracle`]: brute-force minimization of the same measures
//! - [`dephasing`]: spectral models, decoherence parameters, echoes and sweeps
//! - [`tomography`]: simulated counts, reconstruction and bootstrap errors

pub mod correlations;
pub mod dephasing;
pub mod oracle;
pub mod qstate;
pub mod tomography;

pub use correlations::{CorrelationSet, KappaPair};
pub use dephasing::{SpectralModel, SweepConfig, SweepPoint};
pub use qstate::{BellSpectrum, TwoQubitState};
