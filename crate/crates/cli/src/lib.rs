//! Command-line front end for correlation-dynamics sweeps.
//!
//! `run` writes `sweep.csv`, `landmarks.txt` and, with a `[tomography]`
//! section, `noisy.csv`. `landmarks` re-derives the report from a CSV, and
//! `tomo-demo` pushes one state through simulated tomography.

pub mod config;
pub mod landmarks;
pub mod series;

use std::fs;
use std::path::{Path, PathBuf};

use corrdyn::dephasing::{self, evolve_state, DephasingError, DephasingPoint};
use corrdyn::tomography::{error_bars, reconstruct, simulate_counts, DerivedQuantities, ErrorBars, TomographyError};
use corrdyn::{correlations, CorrelationSet, KappaPair};
use num_complex::Complex64;
use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, TomographySpec};
pub use landmarks::Landmarks;
pub use series::Row;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) => 1,
            Self::Compute(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<DephasingError> for CliError {
    fn from(e: DephasingError) -> Self {
        Self::Compute(e.to_string())
    }
}

impl From<TomographyError> for CliError {
    fn from(e: TomographyError) -> Self {
        Self::Compute(e.to_string())
    }
}

/// Files produced by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<Row>,
    pub landmarks: Landmarks,
    pub files: Vec<PathBuf>,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Evaluate the sweep without touching the filesystem.
pub fn sweep_rows(config: &ExperimentConfig) -> Result<(Vec<corrdyn::SweepPoint>, Vec<Row>), CliError> {
    config.validate()?;
    let points = dephasing::sweep(&config.sweep_config()?)?;
    let rows = points.iter().map(|p| Row::from_point(p, config.lambda0_m())).collect();
    Ok((points, rows))
}

/// Run an experiment and write its outputs into `out_dir`.
///
/// Landmarks are computed from the CSV text as written, so the report is
/// reproducible from `sweep.csv` alone.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput, CliError> {
    let (points, rows) = sweep_rows(config)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;

    let csv = series::to_csv(&rows);
    let sweep_path = out_dir.join("sweep.csv");
    write(&sweep_path, &csv)?;
    let parsed = series::from_csv(&csv).map_err(CliError::Compute)?;
    let landmarks = landmarks::compute(&parsed);
    let landmarks_path = out_dir.join("landmarks.txt");
    write(&landmarks_path, &format!("# {}\n{}", config.name, landmarks.to_text()))?;

    let mut files = vec![sweep_path, landmarks_path];
    if let Some(spec) = &config.tomography {
        let noisy_path = out_dir.join("noisy.csv");
        write(&noisy_path, &noisy_csv(&points, spec, config.lambda0_m())?)?;
        files.push(noisy_path);
    }
    Ok(RunOutput { rows: parsed, landmarks, files })
}

/// Landmark report for an existing `sweep.csv`.
pub fn landmarks_from_file(path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let rows = series::from_csv(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(landmarks::compute(&rows).to_text())
}

fn mix_seed(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

const QUANTITIES: [&str; 8] = ["lambda1", "lambda2", "lambda3", "lambda4", "I", "C", "Q", "REE"];

fn error_values(e: &ErrorBars) -> [f64; 8] {
    let l = e.lambdas;
    [l[0], l[1], l[2], l[3], e.total_i, e.classical_c, e.quantum_q, e.ree]
}

fn derived_values(d: &DerivedQuantities) -> [f64; 8] {
    let l = d.lambdas;
    let c = d.correlations;
    [l[0], l[1], l[2], l[3], c.total_i, c.classical_c, c.quantum_q, c.ree]
}

/// Tomography-reconstructed series with bootstrap standard deviations.
pub fn noisy_csv(
    points: &[corrdyn::SweepPoint],
    spec: &TomographySpec,
    lambda0_m: f64,
) -> Result<String, CliError> {
    let mut out = String::from("x_over_lambda0");
    for n in QUANTITIES {
        out.push_str(&format!(",{n}"));
    }
    for n in QUANTITIES {
        out.push_str(&format!(",{n}_err"));
    }
    out.push('\n');
    for (i, p) in points.iter().enumerate() {
        let state = evolve_state(&p.point)?;
        let record = simulate_counts(&state, spec.n_per_setting, mix_seed(spec.seed, 2 * i as u64))?;
        let derived = DerivedQuantities::of_state(&reconstruct(&record)?)?;
        let e = error_bars(&record, spec.resamples, mix_seed(spec.seed, 2 * i as u64 + 1))?;
        let errs = error_values(&e);
        let mut cells = vec![series::format_sig9(p.x_b / lambda0_m)];
        cells.extend(derived_values(&derived).iter().chain(&errs).map(|&v| series::format_sig9(v)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Parameters of a single-state tomography demonstration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomoDemo {
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub counts: u64,
    pub seed: u64,
    pub resamples: usize,
}

/// Simulate, reconstruct and bootstrap one dephased state; returns a
/// human-readable report.
pub fn tomo_demo(demo: &TomoDemo) -> Result<String, CliError> {
    let pair = KappaPair::new(demo.kappa_a, demo.kappa_b)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let state = evolve_state(&DephasingPoint::from_kappas(
        Complex64::new(pair.kappa_a(), 0.0),
        Complex64::new(pair.kappa_b(), 0.0),
    )?)?;
    let record = simulate_counts(&state, demo.counts, demo.seed)?;
    let rebuilt = reconstruct(&record)?;
    let got = DerivedQuantities::of_state(&rebuilt)?;
    let exact_spec = correlations::bell_eigenvalues_from_kappas(&pair);
    let exact: CorrelationSet = correlations::correlations_from_kappas(&pair);
    let e = error_bars(&record, demo.resamples, mix_seed(demo.seed, 1))?;

    let mut out = format!(
        "# kappa_a = {}, kappa_b = {}, counts per setting = {}, seed = {}\n",
        demo.kappa_a, demo.kappa_b, demo.counts, demo.seed
    );
    out.push_str(&record.to_csv());
    out.push_str("\nquantity,exact,reconstructed,std\n");
    let exact_vals = {
        let l = exact_spec.lambdas();
        [l[0], l[1], l[2], l[3], exact.total_i, exact.classical_c, exact.quantum_q, exact.ree]
    };
    let errs = error_values(&e);
    for (k, name) in QUANTITIES.iter().enumerate() {
        out.push_str(&format!(
            "{name},{},{},{}\n",
            series::format_sig9(exact_vals[k]),
            series::format_sig9(derived_values(&got)[k]),
            series::format_sig9(errs[k])
        ));
    }
    out.push_str(&format!("trace_distance,{}\n", series::format_sig9(rebuilt.trace_distance(&state))));
    Ok(out)
}
