//! Simulated two-photon polarization tomography.
//!
//! Coincidence counts are drawn for sixteen product projectors, the density
//! matrix is recovered by linear inversion followed by an eigenvalue
//! clip-and-renormalize projection, and statistical errors come from a
//! parametric Poisson bootstrap of the counts.
//!
//! The measurement set is fixed to the single-photon states
//! `H`, `V`, `D = (H+V)/sqrt 2` and `L = (H+iV)/sqrt 2` combined as
//!
//! ```text
//! HH HV VH VV HD HL DH DV DD DL LH LD LL LV VL VD
//! ```
//!
//! The right-circular state `R = (H-iV)/sqrt 2` is also understood by
//! [`ProjectorSetting::from_label`].

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use thiserror::Error;

use crate::correlations::CorrelationSet;
use crate::qstate::{
    hermitize, kron, product_ket, BellSpectrum, Matrix2c, Matrix4c, QStateError, TwoQubitState,
};

/// Labels of the canonical measurement set, in record order.
pub const STANDARD_LABELS: [&str; 16] = [
    "HH", "HV", "VH", "VV", "HD", "HL", "DH", "DV", "DD", "DL", "LH", "LD", "LL", "LV", "VL", "VD",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TomographyError {
    #[error("measurement settings are not informationally complete")]
    SingularSystem,
    #[error("record contains no counts")]
    EmptyRecord,
    #[error("unknown polarization label {0:?}")]
    UnknownLabel(String),
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("need at least {0} bootstrap resamples")]
    TooFewResamples(usize),
    #[error("counts per setting must be at least 1")]
    NoCounts,
    #[error(transparent)]
    State(#[from] QStateError),
}

/// Labelled rank-1 product projector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSetting {
    label: String,
    projector: Matrix4c,
}

fn single_ket(symbol: char) -> Option<[Complex64; 2]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = Complex64::new;
    Some(match symbol {
        'H' => [c(1.0, 0.0), c(0.0, 0.0)],
        'V' => [c(0.0, 0.0), c(1.0, 0.0)],
        'D' => [c(s, 0.0), c(s, 0.0)],
        'A' => [c(s, 0.0), c(-s, 0.0)],
        'L' => [c(s, 0.0), c(0.0, s)],
        'R' => [c(s, 0.0), c(0.0, -s)],
        _ => return None,
    })
}

impl ProjectorSetting {
    /// Two-letter label, photon a first, e.g. `"HD"`.
    pub fn from_label(label: &str) -> Result<Self, TomographyError> {
        let mut chars = label.chars();
        let (Some(a), Some(b), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(TomographyError::UnknownLabel(label.to_string()));
        };
        let (Some(ka), Some(kb)) = (single_ket(a), single_ket(b)) else {
            return Err(TomographyError::UnknownLabel(label.to_string()));
        };
        let v = product_ket(ka, kb);
        let mut projector = v * v.adjoint();
        hermitize(&mut projector);
        Ok(Self {
            label: label.to_string(),
            projector,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn projector(&self) -> &Matrix4c {
        &self.projector
    }

    /// `tr(rho P)`, clamped at zero.
    pub fn probability(&self, rho: &TwoQubitState) -> f64 {
        (rho.matrix() * self.projector).trace().re.max(0.0)
    }
}

pub fn standard_basis_set() -> Vec<ProjectorSetting> {
    STANDARD_LABELS
        .iter()
        .map(|l| ProjectorSetting::from_label(l).expect("standard labels are valid"))
        .collect()
}

/// Counts for each measurement setting.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyRecord {
    settings: Vec<ProjectorSetting>,
    counts: Vec<u64>,
    total_per_setting: u64,
}

impl TomographyRecord {
    pub fn new(
        settings: Vec<ProjectorSetting>,
        counts: Vec<u64>,
        total_per_setting: u64,
    ) -> Result<Self, TomographyError> {
        if settings.len() != counts.len() {
            return Err(TomographyError::InvalidRecord(format!(
                "{} settings but {} counts",
                settings.len(),
                counts.len()
            )));
        }
        let mut seen = HashSet::new();
        for s in &settings {
            if !seen.insert(s.label.clone()) {
                return Err(TomographyError::InvalidRecord(format!("duplicate setting {}", s.label)));
            }
        }
        Ok(Self { settings, counts, total_per_setting })
    }

    pub fn settings(&self) -> &[ProjectorSetting] {
        &self.settings
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_per_setting(&self) -> u64 {
        self.total_per_setting
    }

    /// `label,count` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,count\n");
        for (s, c) in self.settings.iter().zip(&self.counts) {
            out.push_str(&format!("{},{}\n", s.label, c));
        }
        out
    }

    pub fn from_csv(text: &str, total_per_setting: u64) -> Result<Self, TomographyError> {
        let mut settings = Vec::new();
        let mut counts = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line == "label,count") {
                continue;
            }
            let (label, count) = line.split_once(',').ok_or_else(|| {
                TomographyError::InvalidRecord(format!("line {}: expected label,count", lineno + 1))
            })?;
            settings.push(ProjectorSetting::from_label(label.trim())?);
            counts.push(count.trim().parse().map_err(|_| {
                TomographyError::InvalidRecord(format!("line {}: bad count {count:?}", lineno + 1))
            })?);
        }
        Self::new(settings, counts, total_per_setting)
    }
}

/// Expected counts `n tr(rho P_k)`.
pub fn expected_counts(rho: &TwoQubitState, settings: &[ProjectorSetting], n_per_setting: u64) -> Vec<f64> {
    settings
        .iter()
        .map(|s| n_per_setting as f64 * s.probability(rho))
        .collect()
}

fn poisson_draw(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Poisson-distributed counts for the standard settings.
pub fn simulate_counts(
    rho: &TwoQubitState,
    n_per_setting: u64,
    seed: u64,
) -> Result<TomographyRecord, TomographyError> {
    if n_per_setting == 0 {
        return Err(TomographyError::NoCounts);
    }
    let settings = standard_basis_set();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = expected_counts(rho, &settings, n_per_setting)
        .into_iter()
        .map(|m| poisson_draw(m, &mut rng))
        .collect();
    TomographyRecord::new(settings, counts, n_per_setting)
}

/// Hermitian operator basis `sigma_mu (x) sigma_nu`.
fn pauli_products() -> Vec<Matrix4c> {
    let c = Complex64::new;
    let paulis = [
        Matrix2c::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        Matrix2c::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Matrix2c::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        Matrix2c::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    ];
    let mut out = Vec::with_capacity(16);
    for a in &paulis {
        for b in &paulis {
            out.push(kron(a, b));
        }
    }
    out
}

/// Linear-inversion reconstructor for a fixed set of settings.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    settings: Vec<ProjectorSetting>,
    basis: Vec<Matrix4c>,
    inverse: DMatrix<f64>,
}

impl Reconstructor {
    pub fn new(settings: &[ProjectorSetting]) -> Result<Self, TomographyError> {
        let basis = pauli_products();
        // design[k][m] = tr(P_k sigma_m), real for Hermitian pairs.
        let design = DMatrix::from_fn(settings.len(), 16, |k, m| {
            (settings[k].projector * basis[m]).trace().re
        });
        let svd = design.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * smax.max(1.0))
            .count();
        if rank < 16 {
            return Err(TomographyError::SingularSystem);
        }
        let inverse = svd
            .pseudo_inverse(1e-12)
            .map_err(|_| TomographyError::SingularSystem)?;
        Ok(Self {
            settings: settings.to_vec(),
            basis,
            inverse,
        })
    }

    pub fn settings(&self) -> &[ProjectorSetting] {
        &self.settings
    }

    /// Reconstruct from (possibly non-integer) counts in settings order.
    pub fn reconstruct_rates(&self, rates: &[f64]) -> Result<TwoQubitState, TomographyError> {
        if rates.len() != self.settings.len() {
            return Err(TomographyError::InvalidRecord(format!(
                "expected {} counts, got {}",
                self.settings.len(),
                rates.len()
            )));
        }
        if rates.iter().all(|&r| r <= 0.0) {
            return Err(TomographyError::EmptyRecord);
        }
        physical_projection(&self.linear_estimate(rates))
    }

    /// Unnormalized Hermitian linear-inversion estimate.
    pub fn linear_estimate(&self, rates: &[f64]) -> Matrix4c {
        let coeffs = &self.inverse * DVector::from_column_slice(rates);
        let mut m = Matrix4c::zeros();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            m += b.scale(0.25 * c);
        }
        hermitize(&mut m);
        m
    }

    pub fn reconstruct(&self, record: &TomographyRecord) -> Result<TwoQubitState, TomographyError> {
        if record.settings.iter().map(|s| &s.label).ne(self.settings.iter().map(|s| &s.label)) {
            return Err(TomographyError::InvalidRecord(
                "record settings differ from the reconstructor's".into(),
            ));
        }
        let rates: Vec<f64> = record.counts.iter().map(|&c| c as f64).collect();
        self.reconstruct_rates(&rates)
    }
}

/// Clip negative eigenvalues of a Hermitian estimate and rescale to unit trace.
fn physical_projection(m: &Matrix4c) -> Result<TwoQubitState, TomographyError> {
    let eig = SymmetricEigen::new(*m);
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(TomographyError::EmptyRecord);
    }
    let mut out = Matrix4c::zeros();
    for (k, &w) in clipped.iter().enumerate() {
        if w > 0.0 {
            let v = eig.eigenvectors.column(k);
            out += (v * v.adjoint()).scale(w / total);
        }
    }
    hermitize(&mut out);
    let tr: f64 = (0..4).map(|i| out[(i, i)].re).sum();
    Ok(TwoQubitState::new(out.unscale(tr))?)
}

pub fn reconstruct(record: &TomographyRecord) -> Result<TwoQubitState, TomographyError> {
    Reconstructor::new(&record.settings)?.reconstruct(record)
}

/// Eigenvalues and correlation measures derived from a reconstructed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    pub lambdas: [f64; 4],
    pub correlations: CorrelationSet,
}

impl DerivedQuantities {
    /// Treats the state as Bell diagonal: every measure follows from its
    /// eigenvalues.
    pub fn of_state(state: &TwoQubitState) -> Result<Self, TomographyError> {
        let spectrum = BellSpectrum::of_state(state)?;
        Ok(Self {
            lambdas: spectrum.lambdas(),
            correlations: CorrelationSet::from_spectrum(&spectrum),
        })
    }

    fn as_array(&self) -> [f64; 8] {
        let c = self.correlations;
        let l = self.lambdas;
        [c.total_i, c.classical_c, c.quantum_q, c.ree, l[0], l[1], l[2], l[3]]
    }
}

/// Sample standard deviations from the bootstrap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBars {
    pub total_i: f64,
    pub classical_c: f64,
    pub quantum_q: f64,
    pub ree: f64,
    pub lambdas: [f64; 4],
}

pub const MIN_RESAMPLES: usize = 2;

/// Parametric Poisson bootstrap: each resample redraws every count from a
/// Poisson law with the observed count as mean.
///
/// Resample `i` uses ChaCha stream `i` under `seed`, so the result does not
/// depend on evaluation order.
pub fn error_bars(
    record: &TomographyRecord,
    resamples: usize,
    seed: u64,
) -> Result<ErrorBars, TomographyError> {
    if resamples < MIN_RESAMPLES {
        return Err(TomographyError::TooFewResamples(MIN_RESAMPLES));
    }
    if record.counts.iter().all(|&c| c == 0) {
        return Err(TomographyError::EmptyRecord);
    }
    let recon = Reconstructor::new(&record.settings)?;
    let samples: Vec<[f64; 8]> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let rates: Vec<f64> = record
                .counts
                .iter()
                .map(|&c| poisson_draw(c as f64, &mut rng) as f64)
                .collect();
            let state = recon.reconstruct_rates(&rates)?;
            Ok(DerivedQuantities::of_state(&state)?.as_array())
        })
        .collect::<Result<_, TomographyError>>()?;

    let n = samples.len() as f64;
    let std: [f64; 8] = std::array::from_fn(|q| {
        let mean = samples.iter().map(|s| s[q]).sum::<f64>() / n;
        let var = samples.iter().map(|s| (s[q] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        var.sqrt()
    });
    Ok(ErrorBars {
        total_i: std[0],
        classical_c: std[1],
        quantum_q: std[2],
        ree: std[3],
        lambdas: [std[4], std[5], std[6], std[7]],
    })
}
