//! Two-qubit and single-qubit density matrices, spectra and entropies.
//!
//! Matrices are stored in the product basis `{|HH>, |HV>, |VH>, |VV>}` with
//! qubit A as the most significant index. All entropies are in bits with the
//! convention `0 log2 0 = 0`.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use thiserror::Error;

pub type Matrix2c = Matrix2<Complex64>;
pub type Matrix4c = Matrix4<Complex64>;
pub type Vector4c = Vector4<Complex64>;

/// Largest tolerated deviation from Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest tolerated deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are treated as round-off and clipped.
pub const EIGEN_FLOOR: f64 = 1e-10;
/// Eigenvalues of the second argument of a relative entropy below this are
/// considered outside its support.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Weight of the first argument on a null direction of the second that
/// triggers an infinite relative entropy.
pub const SUPPORT_WEIGHT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QStateError {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),
    #[error("trace is {0} instead of 1")]
    TraceNotUnity(f64),
    #[error("matrix has eigenvalue {0:e} below the numeric floor")]
    NotPositive(f64),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("Bloch direction must have unit norm, got {0}")]
    NotUnitDirection(f64),
    #[error("state vector has zero norm")]
    ZeroVector,
}

/// Which factor of the bipartition to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_hermitian_deviation<const N: usize>(
    m: &nalgebra::SMatrix<Complex64, N, N>,
) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn trace_re<const N: usize>(m: &nalgebra::SMatrix<Complex64, N, N>) -> f64 {
    (0..N).map(|i| m[(i, i)].re).sum()
}

/// Real eigenvalues of a Hermitian matrix, in descending order.
fn hermitian_eigenvalues_desc<const N: usize>(m: &nalgebra::SMatrix<Complex64, N, N>) -> Vec<f64> {
    let dm = nalgebra::DMatrix::from_iterator(N, N, m.iter().copied());
    let mut vals: Vec<f64> = SymmetricEigen::new(dm).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Clip values in `[-EIGEN_FLOOR, 0)` to zero and renormalize to unit sum.
fn clip_and_renormalize(mut vals: Vec<f64>) -> Result<Vec<f64>, QStateError> {
    if let Some(&min) = vals.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -EIGEN_FLOOR {
            return Err(QStateError::NotPositive(min));
        }
    }
    for v in vals.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = vals.iter().sum();
    if total <= 0.0 {
        return Err(QStateError::TraceNotUnity(total));
    }
    vals.iter_mut().for_each(|v| *v /= total);
    Ok(vals)
}

/// Shannon entropy in bits of a probability vector, `0 log2 0 = 0`.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    let s: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// Descending, clipped and renormalized eigenvalues of a Hermitian 4x4 matrix.
pub fn eigenvalues_sorted(matrix: &Matrix4c) -> Result<[f64; 4], QStateError> {
    let dev = max_hermitian_deviation(matrix);
    if dev > HERMITIAN_TOL {
        return Err(QStateError::NonHermitian(dev));
    }
    let vals = clip_and_renormalize(hermitian_eigenvalues_desc(matrix))?;
    Ok([vals[0], vals[1], vals[2], vals[3]])
}

/// Anything with a probability spectrum has a von Neumann entropy.
pub trait VonNeumannEntropy {
    fn spectrum_values(&self) -> Vec<f64>;

    /// `-sum p log2 p` over the eigenvalues, in bits.
    fn von_neumann_entropy(&self) -> f64 {
        shannon_entropy(&self.spectrum_values())
    }
}

/// Validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Matrix4c,
}

impl TwoQubitState {
    pub fn new(matrix: Matrix4c) -> Result<Self, QStateError> {
        let dev = max_hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(QStateError::NonHermitian(dev));
        }
        let tr = trace_re(&matrix);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QStateError::TraceNotUnity(tr));
        }
        let min = *hermitian_eigenvalues_desc(&matrix).last().unwrap();
        if min < -EIGEN_FLOOR {
            return Err(QStateError::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: &Vector4c) -> Result<Self, QStateError> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(QStateError::ZeroVector);
        }
        let v = psi.unscale(norm);
        let mut m = v * v.adjoint();
        hermitize(&mut m);
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            matrix: Matrix4c::identity().scale(0.25),
        }
    }

    /// Bell-diagonal state with weights assigned, in order, to
    /// `Phi+`, `Phi-`, `Psi+`, `Psi-`.
    pub fn bell_diagonal(spectrum: &BellSpectrum) -> Self {
        let mut m = Matrix4c::zeros();
        for (w, b) in spectrum.lambdas().iter().zip(bell_states()) {
            m += (b * b.adjoint()).scale(*w);
        }
        hermitize(&mut m);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.matrix
    }

    pub fn eigenvalues_sorted(&self) -> [f64; 4] {
        // Construction already guarantees hermiticity and the eigenvalue floor.
        eigenvalues_sorted(&self.matrix).expect("validated state")
    }

    pub fn partial_trace(&self, keep: Subsystem) -> SingleQubitState {
        let mut r = Matrix2c::zeros();
        for i in 0..2 {
            for j in 0..2 {
                r[(i, j)] = (0..2)
                    .map(|k| match keep {
                        Subsystem::A => self.matrix[(2 * i + k, 2 * j + k)],
                        Subsystem::B => self.matrix[(2 * k + i, 2 * k + j)],
                    })
                    .sum();
            }
        }
        SingleQubitState { matrix: r }
    }

    /// `U rho U^dagger` for a local unitary `U = ua (x) ub`.
    pub fn apply_local_unitary(&self, ua: &Matrix2c, ub: &Matrix2c) -> Result<Self, QStateError> {
        let u = kron(ua, ub);
        let mut m = u * self.matrix * u.adjoint();
        hermitize(&mut m);
        Self::new(m)
    }

    /// `<psi| rho |psi>` for a normalized pure state.
    pub fn fidelity_with_pure(&self, psi: &Vector4c) -> f64 {
        let v = psi.unscale(psi.norm());
        (v.adjoint() * self.matrix * v)[(0, 0)].re
    }

    /// Trace distance `1/2 ||rho - sigma||_1`.
    pub fn trace_distance(&self, other: &TwoQubitState) -> f64 {
        let diff = self.matrix - other.matrix;
        0.5 * hermitian_eigenvalues_desc(&diff)
            .iter()
            .map(|v| v.abs())
            .sum::<f64>()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &TwoQubitState) -> f64 {
        (self.matrix - other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `rho_A (x) rho_B`.
    pub fn product_of_marginals(&self) -> TwoQubitState {
        let a = self.partial_trace(Subsystem::A);
        let b = self.partial_trace(Subsystem::B);
        let mut m = kron(&a.matrix, &b.matrix);
        hermitize(&mut m);
        TwoQubitState { matrix: m }
    }
}

impl VonNeumannEntropy for TwoQubitState {
    fn spectrum_values(&self) -> Vec<f64> {
        self.eigenvalues_sorted().to_vec()
    }
}

/// Validated single-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitState {
    matrix: Matrix2c,
}

impl SingleQubitState {
    pub fn new(matrix: Matrix2c) -> Result<Self, QStateError> {
        let dev = max_hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(QStateError::NonHermitian(dev));
        }
        let tr = trace_re(&matrix);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(QStateError::TraceNotUnity(tr));
        }
        let min = *hermitian_eigenvalues_desc(&matrix).last().unwrap();
        if min < -EIGEN_FLOOR {
            return Err(QStateError::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix2c {
        &self.matrix
    }

    pub fn eigenvalues_sorted(&self) -> [f64; 2] {
        let v = clip_and_renormalize(hermitian_eigenvalues_desc(&self.matrix))
            .expect("validated state");
        [v[0], v[1]]
    }
}

impl VonNeumannEntropy for SingleQubitState {
    fn spectrum_values(&self) -> Vec<f64> {
        self.eigenvalues_sorted().to_vec()
    }
}

/// Spectrum of a Bell-diagonal state: four non-increasing probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSpectrum {
    lambdas: [f64; 4],
}

impl BellSpectrum {
    const TOL: f64 = 1e-12;

    pub fn new(lambdas: [f64; 4]) -> Result<Self, QStateError> {
        for &l in &lambdas {
            if !l.is_finite() || !(-Self::TOL..=1.0 + Self::TOL).contains(&l) {
                return Err(QStateError::InvalidSpectrum(format!(
                    "eigenvalue {l} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > Self::TOL {
            return Err(QStateError::InvalidSpectrum(format!("sum is {sum}")));
        }
        if lambdas.windows(2).any(|w| w[0] + Self::TOL < w[1]) {
            return Err(QStateError::InvalidSpectrum(format!(
                "{lambdas:?} is not non-increasing"
            )));
        }
        Ok(Self {
            lambdas: lambdas.map(|l| l.clamp(0.0, 1.0)),
        })
    }

    /// Sort descending, then validate.
    pub fn from_unsorted(mut lambdas: [f64; 4]) -> Result<Self, QStateError> {
        lambdas.sort_by(|a, b| b.total_cmp(a));
        Self::new(lambdas)
    }

    pub fn of_state(state: &TwoQubitState) -> Result<Self, QStateError> {
        Self::new(state.eigenvalues_sorted())
    }

    pub fn lambdas(&self) -> [f64; 4] {
        self.lambdas
    }

    pub fn largest(&self) -> f64 {
        self.lambdas[0]
    }
}

impl VonNeumannEntropy for BellSpectrum {
    fn spectrum_values(&self) -> Vec<f64> {
        self.lambdas.to_vec()
    }
}

pub fn von_neumann_entropy<S: VonNeumannEntropy + ?Sized>(state: &S) -> f64 {
    state.von_neumann_entropy()
}

/// `S(rho || sigma) = -tr(rho log2 sigma) - S(rho)` in bits.
///
/// Returns `f64::INFINITY` when the support of `rho` is not contained in the
/// support of `sigma`.
pub fn relative_entropy(rho: &TwoQubitState, sigma: &TwoQubitState) -> f64 {
    let eig = SymmetricEigen::new(sigma.matrix);
    let mut cross = 0.0;
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        let weight = (v.adjoint() * rho.matrix * v)[(0, 0)].re;
        let mu = eig.eigenvalues[k];
        if mu < SUPPORT_TOL {
            if weight > SUPPORT_WEIGHT_TOL {
                return f64::INFINITY;
            }
            continue;
        }
        cross -= weight * mu.log2();
    }
    (cross - rho.von_neumann_entropy()).max(0.0)
}

/// Unit vector on the Bloch sphere defining a measurement basis `{n, -n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDirection([f64; 3]);

impl BlochDirection {
    pub const X: BlochDirection = BlochDirection([1.0, 0.0, 0.0]);
    pub const Y: BlochDirection = BlochDirection([0.0, 1.0, 0.0]);
    pub const Z: BlochDirection = BlochDirection([0.0, 0.0, 1.0]);

    pub fn new(v: [f64; 3]) -> Result<Self, QStateError> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (n - 1.0).abs() > 1e-9 {
            return Err(QStateError::NotUnitDirection(n));
        }
        Ok(Self(v.map(|x| x / n)))
    }

    /// Polar angle `theta` from +z, azimuth `phi` from +x.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self([st * cp, st * sp, ct])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// The two rank-1 projectors `(I +/- n.sigma) / 2`.
    pub fn projectors(&self) -> [Matrix2c; 2] {
        let [x, y, z] = self.0;
        let ns = Matrix2c::new(c(z, 0.0), c(x, -y), c(x, y), c(-z, 0.0));
        let id = Matrix2c::identity();
        [(id + ns).scale(0.5), (id - ns).scale(0.5)]
    }
}

/// Outcome probabilities `tr(rho Pa_i (x) Pb_j)` in the order
/// `(+,+), (+,-), (-,+), (-,-)`.
pub fn product_basis_probabilities(
    state: &TwoQubitState,
    basis_a: &BlochDirection,
    basis_b: &BlochDirection,
) -> [f64; 4] {
    let pa = basis_a.projectors();
    let pb = basis_b.projectors();
    let mut out = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            let p = kron(&pa[i], &pb[j]);
            out[2 * i + j] = (state.matrix * p).trace().re.max(0.0);
        }
    }
    out
}

/// Remove all coherences in the product eigenbasis of `basis_a (x) basis_b`.
pub fn dephase_in_product_basis(
    state: &TwoQubitState,
    basis_a: &BlochDirection,
    basis_b: &BlochDirection,
) -> TwoQubitState {
    let pa = basis_a.projectors();
    let pb = basis_b.projectors();
    let mut out = Matrix4c::zeros();
    for a in &pa {
        for b in &pb {
            let p = kron(a, b);
            out += p * state.matrix * p;
        }
    }
    hermitize(&mut out);
    TwoQubitState { matrix: out }
}

/// Kronecker product of two single-qubit operators.
pub fn kron(a: &Matrix2c, b: &Matrix2c) -> Matrix4c {
    Matrix4c::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// The Bell basis in the order `Phi+`, `Phi-`, `Psi+`, `Psi-`.
pub fn bell_states() -> [Vector4c; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        Vector4c::new(c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)),
        Vector4c::new(c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)),
        Vector4c::new(c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)),
        Vector4c::new(c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)),
    ]
}

/// Product ket `|a>|b>` from single-qubit kets.
pub fn product_ket(a: [Complex64; 2], b: [Complex64; 2]) -> Vector4c {
    Vector4c::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
}

/// Replace `m` by `(m + m^dagger) / 2` and drop round-off in the diagonal's
/// imaginary part.
pub(crate) fn hermitize<const N: usize>(m: &mut nalgebra::SMatrix<Complex64, N, N>) {
    let h = (*m + m.adjoint()).scale(0.5);
    *m = h;
    for i in 0..N {
        m[(i, i)].im = 0.0;
    }
}
