//! Brute-force evaluation of the relative-entropy correlation measures.
//!
//! These routines minimize the defining relative entropies numerically and
//! never use the Bell-diagonal closed forms, so they serve as an independent
//! check of [`crate::correlations`].
//!
//! Classical two-qubit states are exactly the states diagonal in some product
//! basis `{a, -a} (x) {b, -b}`, and for a fixed basis the closest classical
//! state to `rho` is `rho` dephased in that basis. The quantum correlation is
//! therefore a minimum over two Bloch directions, searched with a coarse grid
//! followed by shrinking local grids.

use rayon::prelude::*;
use thiserror::Error;

use crate::qstate::{
    dephase_in_product_basis, kron, shannon_entropy, BellSpectrum, BlochDirection, Matrix2c,
    QStateError, TwoQubitState, VonNeumannEntropy,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("local refinement did not converge after {rounds} rounds (last improvement {last_improvement:e})")]
    NonConvergence { rounds: usize, last_improvement: f64 },
    #[error("invalid search specification: {0}")]
    InvalidSpec(&'static str),
    #[error(transparent)]
    State(#[from] QStateError),
}

/// Search over pairs of Bloch directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Azimuth samples per side over `[0, 2 pi)`.
    pub phi_steps: usize,
    /// Polar samples per side over `[0, pi)`.
    pub theta_steps: usize,
    /// Refinement rounds that always run.
    pub refine_rounds: usize,
    /// Further rounds allowed while the objective still moves by more than
    /// `tolerance`.
    pub max_extra_rounds: usize,
    /// Cell shrink factor per round.
    pub shrink: f64,
    pub tolerance: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            phi_steps: 24,
            theta_steps: 12,
            refine_rounds: 3,
            max_extra_rounds: 12,
            shrink: 4.0,
            tolerance: 1e-6,
        }
    }
}

/// Search over the probability simplex of Bell-diagonal weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexGridSpec {
    /// Coarse grid spacing is `1 / resolution` per coordinate.
    pub resolution: usize,
    pub max_rounds: usize,
    pub shrink: f64,
    pub tolerance: f64,
    /// Refinement stops once the step falls below this.
    pub min_step: f64,
}

impl Default for SimplexGridSpec {
    fn default() -> Self {
        Self {
            resolution: 40,
            max_rounds: 200,
            shrink: 4.0,
            tolerance: 1e-9,
            min_step: 1e-12,
        }
    }
}

/// Minimizing product basis and the minimized relative entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSearch {
    pub basis_a: BlochDirection,
    pub basis_b: BlochDirection,
    pub quantum_q: f64,
}

/// `rho_A (x) rho_B`.
pub fn closest_product_state(rho: &TwoQubitState) -> TwoQubitState {
    rho.product_of_marginals()
}

/// Quantum mutual information `S(rho_A (x) rho_B) - S(rho)`.
pub fn oracle_total_mutual_information(rho: &TwoQubitState) -> f64 {
    (closest_product_state(rho).von_neumann_entropy() - rho.von_neumann_entropy()).max(0.0)
}

/// Real Pauli-basis coefficients `R[mu][nu] = tr(rho sigma_mu (x) sigma_nu)`.
fn pauli_coefficients(rho: &TwoQubitState) -> [[f64; 4]; 4] {
    use num_complex::Complex64 as C;
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    let paulis = [
        Matrix2c::new(one, z, z, one),
        Matrix2c::new(z, one, one, z),
        Matrix2c::new(z, -i, i, z),
        Matrix2c::new(one, z, z, -one),
    ];
    let mut r = [[0.0; 4]; 4];
    for (mu, pa) in paulis.iter().enumerate() {
        for (nu, pb) in paulis.iter().enumerate() {
            r[mu][nu] = (rho.matrix() * kron(pa, pb)).trace().re;
        }
    }
    r
}

/// Angles `(theta_a, phi_a, theta_b, phi_b)`.
type Angles = [f64; 4];

struct BasisObjective {
    coeffs: [[f64; 4]; 4],
    entropy: f64,
}

impl BasisObjective {
    fn new(rho: &TwoQubitState) -> Self {
        Self {
            coeffs: pauli_coefficients(rho),
            entropy: rho.von_neumann_entropy(),
        }
    }

    /// `S(dephased rho) - S(rho)`; the dephased state is diagonal with the
    /// product-basis outcome probabilities.
    fn eval(&self, x: &Angles) -> f64 {
        let a = BlochDirection::from_angles(x[0], x[1]).components();
        let b = BlochDirection::from_angles(x[2], x[3]).components();
        let r = &self.coeffs;
        let mut ar = 0.0;
        let mut br = 0.0;
        let mut atb = 0.0;
        for k in 0..3 {
            ar += a[k] * r[k + 1][0];
            br += b[k] * r[0][k + 1];
            for l in 0..3 {
                atb += a[k] * r[k + 1][l + 1] * b[l];
            }
        }
        let mut p = [0.0; 4];
        for (idx, (s, t)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .into_iter()
            .enumerate()
        {
            p[idx] = (0.25 * (1.0 + s * ar + t * br + s * t * atb)).max(0.0);
        }
        shannon_entropy(&p) - self.entropy
    }
}

/// Index of the smallest value; ties go to the lowest index.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Product basis minimizing `S(rho || dephased rho)`.
pub fn search_classical_basis(rho: &TwoQubitState, spec: &GridSpec) -> Result<BasisSearch, OracleError> {
    if spec.phi_steps == 0 || spec.theta_steps == 0 {
        return Err(OracleError::InvalidSpec("grid must have at least one point per axis"));
    }
    if spec.shrink <= 1.0 {
        return Err(OracleError::InvalidSpec("shrink factor must exceed 1"));
    }
    let objective = BasisObjective::new(rho);
    let dtheta = std::f64::consts::PI / spec.theta_steps as f64;
    let dphi = 2.0 * std::f64::consts::PI / spec.phi_steps as f64;
    let side: Vec<(f64, f64)> = (0..spec.theta_steps)
        .flat_map(|i| (0..spec.phi_steps).map(move |j| (i as f64 * dtheta, j as f64 * dphi)))
        .collect();
    let n = side.len();
    let coarse: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (ta, pa) = side[idx / n];
            let (tb, pb) = side[idx % n];
            objective.eval(&[ta, pa, tb, pb])
        })
        .collect();
    let i0 = argmin(&coarse);
    let mut best_x: Angles = {
        let (ta, pa) = side[i0 / n];
        let (tb, pb) = side[i0 % n];
        [ta, pa, tb, pb]
    };
    let mut best_f = coarse[i0];

    let offsets: Vec<[i32; 4]> = (0..625)
        .map(|k| {
            let d = |p: i32| ((k / 5_i32.pow(p as u32)) % 5) - 2;
            [d(3), d(2), d(1), d(0)]
        })
        .collect();
    let mut step = [dtheta, dphi, dtheta, dphi];
    let max_rounds = spec.refine_rounds + spec.max_extra_rounds;
    let mut last_improvement = f64::INFINITY;
    let mut rounds = 0;
    while rounds < max_rounds {
        step.iter_mut().for_each(|s| *s /= spec.shrink);
        let candidates: Vec<Angles> = offsets
            .iter()
            .map(|o| std::array::from_fn(|d| best_x[d] + o[d] as f64 * step[d]))
            .collect();
        let values: Vec<f64> = candidates.par_iter().map(|x| objective.eval(x)).collect();
        let k = argmin(&values);
        let improvement = if values[k] < best_f { best_f - values[k] } else { 0.0 };
        if values[k] < best_f {
            best_f = values[k];
            best_x = candidates[k];
        }
        last_improvement = improvement;
        rounds += 1;
        if rounds >= spec.refine_rounds && improvement <= spec.tolerance {
            break;
        }
    }
    if last_improvement > spec.tolerance {
        return Err(OracleError::NonConvergence { rounds, last_improvement });
    }
    Ok(BasisSearch {
        basis_a: BlochDirection::from_angles(best_x[0], best_x[1]),
        basis_b: BlochDirection::from_angles(best_x[2], best_x[3]),
        quantum_q: best_f.max(0.0),
    })
}

pub fn oracle_quantum_correlation(rho: &TwoQubitState, spec: &GridSpec) -> Result<f64, OracleError> {
    Ok(search_classical_basis(rho, spec)?.quantum_q)
}

/// `S(pi_chi) - S(chi)` for the closest classical state `chi` found by the
/// basis search.
pub fn oracle_classical_correlation(rho: &TwoQubitState, spec: &GridSpec) -> Result<f64, OracleError> {
    let found = search_classical_basis(rho, spec)?;
    Ok(classical_correlation_in_basis(rho, &found))
}

fn classical_correlation_in_basis(rho: &TwoQubitState, found: &BasisSearch) -> f64 {
    let chi = dephase_in_product_basis(rho, &found.basis_a, &found.basis_b);
    (closest_product_state(&chi).von_neumann_entropy() - chi.von_neumann_entropy()).max(0.0)
}

/// Quantum, classical and total correlation from a single basis search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCorrelations {
    pub total_i: f64,
    pub classical_c: f64,
    pub quantum_q: f64,
}

pub fn oracle_correlations(rho: &TwoQubitState, spec: &GridSpec) -> Result<OracleCorrelations, OracleError> {
    let found = search_classical_basis(rho, spec)?;
    Ok(OracleCorrelations {
        total_i: oracle_total_mutual_information(rho),
        classical_c: classical_correlation_in_basis(rho, &found),
        quantum_q: found.quantum_q,
    })
}

/// `S(rho || sigma)` for commuting states given by their weights in a shared
/// eigenbasis.
fn diagonal_relative_entropy(rho: &[f64; 4], sigma: &[f64; 4], rho_entropy: f64) -> f64 {
    let mut cross = 0.0;
    for (&p, &q) in rho.iter().zip(sigma) {
        if p <= 0.0 {
            continue;
        }
        if q <= 0.0 {
            return f64::INFINITY;
        }
        cross -= p * q.log2();
    }
    cross - rho_entropy
}

fn simplex_point(free: [f64; 3]) -> Option<[f64; 4]> {
    let last = 1.0 - free[0] - free[1] - free[2];
    let mu = [free[0], free[1], free[2], last];
    let eps = 1e-15;
    if mu.iter().all(|&m| (-eps..=0.5 + eps).contains(&m)) {
        Some(mu.map(|m| m.clamp(0.0, 0.5)))
    } else {
        None
    }
}

/// Minimum of `S(rho || sigma)` over Bell-diagonal `sigma` (same Bell basis)
/// whose weights are all at most 1/2, which are exactly the separable ones.
pub fn oracle_ree_bell(spec: &BellSpectrum, search: &SimplexGridSpec) -> Result<f64, OracleError> {
    if search.resolution < 2 {
        return Err(OracleError::InvalidSpec("simplex resolution must be at least 2"));
    }
    if search.shrink <= 1.0 {
        return Err(OracleError::InvalidSpec("shrink factor must exceed 1"));
    }
    let lambdas = spec.lambdas();
    let entropy = spec.von_neumann_entropy();
    let objective = |free: [f64; 3]| match simplex_point(free) {
        Some(mu) => diagonal_relative_entropy(&lambdas, &mu, entropy),
        None => f64::INFINITY,
    };

    let res = search.resolution;
    let h = 1.0 / res as f64;
    let per_axis = res / 2 + 1;
    let coarse_points: Vec<[f64; 3]> = (0..per_axis * per_axis * per_axis)
        .map(|idx| {
            let i = idx / (per_axis * per_axis);
            let j = (idx / per_axis) % per_axis;
            let k = idx % per_axis;
            [i as f64 * h, j as f64 * h, k as f64 * h]
        })
        .collect();
    let coarse: Vec<f64> = coarse_points.par_iter().map(|&p| objective(p)).collect();
    let i0 = argmin(&coarse);
    let mut best_x = coarse_points[i0];
    let mut best_f = coarse[i0];
    if !best_f.is_finite() {
        return Err(OracleError::NonConvergence { rounds: 0, last_improvement: f64::INFINITY });
    }

    let offsets: Vec<[i32; 3]> = (0..125)
        .map(|k| [k / 25 - 2, (k / 5) % 5 - 2, k % 5 - 2])
        .collect();
    // Pattern search: keep the step while the best candidate sits on the
    // stencil edge, shrink once it is interior.
    let mut step = h / search.shrink;
    let mut rounds = 0;
    let mut last_improvement = f64::INFINITY;
    while rounds < search.max_rounds {
        let candidates: Vec<[f64; 3]> = offsets
            .iter()
            .map(|o| std::array::from_fn(|d| best_x[d] + o[d] as f64 * step))
            .collect();
        let values: Vec<f64> = candidates.par_iter().map(|&p| objective(p)).collect();
        let k = argmin(&values);
        let improvement = if values[k] < best_f { best_f - values[k] } else { 0.0 };
        if values[k] < best_f {
            best_f = values[k];
            best_x = candidates[k];
        }
        last_improvement = improvement;
        rounds += 1;
        let on_edge = improvement > 0.0 && offsets[k].iter().any(|o| o.abs() == 2);
        if on_edge {
            continue;
        }
        if step <= search.min_step {
            break;
        }
        step /= search.shrink;
    }
    if last_improvement > search.tolerance {
        return Err(OracleError::NonConvergence { rounds, last_improvement });
    }
    Ok(best_f.max(0.0))
}
