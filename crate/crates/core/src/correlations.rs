//! Closed-form correlation measures for Bell-diagonal states.
//!
//! For a Bell-diagonal state with spectrum `l1 >= l2 >= l3 >= l4` the closest
//! classical state has spectrum `{(l1+l2)/2, (l1+l2)/2, (l3+l4)/2, (l3+l4)/2}`
//! and both it and the state itself have `I/4` as closest product state. All
//! four measures therefore reduce to entropies of four-point distributions.

use num_complex::Complex64;
use thiserror::Error;

use crate::qstate::{BellSpectrum, QStateError, VonNeumannEntropy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrelationError {
    #[error("decoherence parameter {name} = {value} outside [0, 1]")]
    InvalidKappa { name: &'static str, value: f64 },
    #[error(transparent)]
    InvalidSpectrum(#[from] QStateError),
}

/// Total, classical and quantum correlation plus relative entropy of
/// entanglement, all in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSet {
    pub total_i: f64,
    pub classical_c: f64,
    pub quantum_q: f64,
    pub ree: f64,
}

impl CorrelationSet {
    pub fn from_spectrum(spec: &BellSpectrum) -> Self {
        Self {
            total_i: total_mutual_information_bell(spec),
            classical_c: classical_correlation_bell(spec),
            quantum_q: quantum_correlation_bell(spec),
            ree: ree_bell(spec),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.total_i, self.classical_c, self.quantum_q, self.ree]
    }

    pub fn max_abs_diff(&self, other: &CorrelationSet) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Moduli of the two decoherence parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaPair {
    kappa_a: f64,
    kappa_b: f64,
}

impl KappaPair {
    /// Values within `1e-9` of the unit interval are clamped onto it.
    const TOL: f64 = 1e-9;

    pub fn new(kappa_a: f64, kappa_b: f64) -> Result<Self, CorrelationError> {
        Ok(Self {
            kappa_a: Self::check("kappa_a", kappa_a)?,
            kappa_b: Self::check("kappa_b", kappa_b)?,
        })
    }

    /// Pair built from the moduli of complex decoherence parameters.
    pub fn from_complex(kappa_a: Complex64, kappa_b: Complex64) -> Result<Self, CorrelationError> {
        Self::new(kappa_a.norm(), kappa_b.norm())
    }

    fn check(name: &'static str, value: f64) -> Result<f64, CorrelationError> {
        if !value.is_finite() || !(-Self::TOL..=1.0 + Self::TOL).contains(&value) {
            return Err(CorrelationError::InvalidKappa { name, value });
        }
        Ok(value.clamp(0.0, 1.0))
    }

    pub fn kappa_a(&self) -> f64 {
        self.kappa_a
    }

    pub fn kappa_b(&self) -> f64 {
        self.kappa_b
    }
}

/// Spectrum of the closest classical state: pairwise averages.
pub fn closest_classical_bell(spec: &BellSpectrum) -> BellSpectrum {
    let [l1, l2, l3, l4] = spec.lambdas();
    let hi = 0.5 * (l1 + l2);
    let lo = 0.5 * (l3 + l4);
    BellSpectrum::new([hi, hi, lo, lo]).expect("averaging preserves a valid spectrum")
}

pub fn quantum_correlation_bell(spec: &BellSpectrum) -> f64 {
    let chi = closest_classical_bell(spec);
    (chi.von_neumann_entropy() - spec.von_neumann_entropy()).max(0.0)
}

pub fn classical_correlation_bell(spec: &BellSpectrum) -> f64 {
    (2.0 - closest_classical_bell(spec).von_neumann_entropy()).max(0.0)
}

pub fn total_mutual_information_bell(spec: &BellSpectrum) -> f64 {
    (2.0 - spec.von_neumann_entropy()).max(0.0)
}

/// Relative entropy of entanglement; zero once the largest weight drops to 1/2.
pub fn ree_bell(spec: &BellSpectrum) -> f64 {
    let l1 = spec.largest();
    if l1 <= 0.5 {
        return 0.0;
    }
    (1.0 - binary_entropy(l1)).max(0.0)
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// `H2(p) = -p log2 p - (1-p) log2 (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    -(xlog2x(p) + xlog2x(1.0 - p))
}

/// `1/2 (1+k) log2 (1+k) + 1/2 (1-k) log2 (1-k)`, the correlation carried by a
/// single decoherence parameter.
pub fn kappa_information(kappa: f64) -> f64 {
    (0.5 * xlog2x(1.0 + kappa) + 0.5 * xlog2x(1.0 - kappa)).max(0.0)
}

/// The four weights `1/4 (1 +/- ka)(1 +/- kb)` in non-increasing order.
pub fn bell_eigenvalues_from_kappas(k: &KappaPair) -> BellSpectrum {
    let (a, b) = (k.kappa_a, k.kappa_b);
    let top = 0.25 * (1.0 + a) * (1.0 + b);
    let bottom = 0.25 * (1.0 - a) * (1.0 - b);
    let a_dephased = 0.25 * (1.0 - a) * (1.0 + b);
    let b_dephased = 0.25 * (1.0 + a) * (1.0 - b);
    let (second, third) = if a <= b {
        (a_dephased, b_dephased)
    } else {
        (b_dephased, a_dephased)
    };
    BellSpectrum::new([top, second, third, bottom]).expect("kappa weights form a valid spectrum")
}

/// Piecewise closed form: `Q` follows the smaller parameter, `C` the larger.
pub fn correlations_from_kappas(k: &KappaPair) -> CorrelationSet {
    let lo = k.kappa_a.min(k.kappa_b);
    let hi = k.kappa_a.max(k.kappa_b);
    let quantum_q = kappa_information(lo);
    let classical_c = kappa_information(hi);
    CorrelationSet {
        total_i: quantum_q + classical_c,
        classical_c,
        quantum_q,
        ree: ree_bell(&bell_eigenvalues_from_kappas(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn spec(l: [f64; 4]) -> BellSpectrum {
        BellSpectrum::new(l).unwrap()
    }

    #[test]
    fn closest_classical_examples() {
        assert_eq!(closest_classical_bell(&spec([0.25; 4])).lambdas(), [0.25; 4]);
        assert_eq!(
            closest_classical_bell(&spec([1.0, 0.0, 0.0, 0.0])).lambdas(),
            [0.5, 0.5, 0.0, 0.0]
        );
        let got = closest_classical_bell(&BellSpectrum::from_unsorted([0.5564, 0.2471, 0.1361, 0.0604]).unwrap());
        for (g, w) in got.lambdas().iter().zip([0.40175, 0.40175, 0.09825, 0.09825]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn measures_on_reference_spectra() {
        let mixed = spec([0.25; 4]);
        let set = CorrelationSet::from_spectrum(&mixed);
        assert_abs_diff_eq!(set.total_i, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(set.classical_c, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(set.quantum_q, 0.0, epsilon = 1e-15);
        assert_eq!(set.ree, 0.0);

        let bell = spec([1.0, 0.0, 0.0, 0.0]);
        let set = CorrelationSet::from_spectrum(&bell);
        assert_abs_diff_eq!(set.total_i, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(set.classical_c, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(set.quantum_q, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(set.ree, 1.0, epsilon = 1e-15);

        assert_eq!(ree_bell(&spec([0.5, 0.5, 0.0, 0.0])), 0.0);

        let initial = spec([0.8035, 0.1965, 0.0, 0.0]);
        let set = CorrelationSet::from_spectrum(&initial);
        assert_abs_diff_eq!(set.quantum_q, 0.285, epsilon = 1e-3);
        assert_abs_diff_eq!(set.classical_c, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(set.total_i, 1.285, epsilon = 1e-3);
        assert_abs_diff_eq!(set.ree, 0.285, epsilon = 1e-3);
        let direct = 1.0 + 0.8035 * 0.8035_f64.log2() + 0.1965 * 0.1965_f64.log2();
        assert_abs_diff_eq!(set.ree, direct, epsilon = 1e-14);
    }

    #[test]
    fn kappa_spectrum_examples() {
        let k = KappaPair::new(1.0, 1.0).unwrap();
        assert_eq!(bell_eigenvalues_from_kappas(&k).lambdas(), [1.0, 0.0, 0.0, 0.0]);
        let k = KappaPair::new(0.0, 0.0).unwrap();
        assert_eq!(bell_eigenvalues_from_kappas(&k).lambdas(), [0.25; 4]);
        let k = KappaPair::new(0.607, 0.385).unwrap();
        let got = bell_eigenvalues_from_kappas(&k).lambdas();
        for (g, w) in got.iter().zip([0.5564, 0.2471, 0.1361, 0.0604]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-4);
        }
    }

    #[test]
    fn kappa_validation() {
        assert!(KappaPair::new(1.2, 0.5).is_err());
        assert!(KappaPair::new(0.5, -0.1).is_err());
        assert!(KappaPair::new(f64::NAN, 0.5).is_err());
        assert_eq!(KappaPair::new(1.0 + 1e-12, 0.5).unwrap().kappa_a(), 1.0);
    }

    #[test]
    fn piecewise_examples() {
        let set = correlations_from_kappas(&KappaPair::new(0.607, 1.0).unwrap());
        assert_abs_diff_eq!(set.classical_c, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(set.quantum_q, 0.285, epsilon = 1e-3);
        assert_abs_diff_eq!(set.total_i, 1.285, epsilon = 1e-3);
        assert_abs_diff_eq!(set.ree, 0.285, epsilon = 1e-3);

        let set = correlations_from_kappas(&KappaPair::new(0.607, 0.607).unwrap());
        assert_abs_diff_eq!(set.quantum_q, set.classical_c, epsilon = 1e-15);
        assert_abs_diff_eq!(set.quantum_q, 0.285, epsilon = 1e-3);

        let set = correlations_from_kappas(&KappaPair::new(0.607, 0.385).unwrap());
        assert_abs_diff_eq!(set.quantum_q, 0.110, epsilon = 1e-3);
        assert_abs_diff_eq!(set.classical_c, 0.285, epsilon = 1e-3);
    }

    #[test]
    fn q_and_c_plateaus() {
        let ka = 0.607;
        let q0 = correlations_from_kappas(&KappaPair::new(ka, ka).unwrap()).quantum_q;
        let c0 = correlations_from_kappas(&KappaPair::new(ka, ka).unwrap()).classical_c;
        for i in 0..=50 {
            let hi = ka + (1.0 - ka) * i as f64 / 50.0;
            let lo = ka * i as f64 / 50.0;
            let above = correlations_from_kappas(&KappaPair::new(ka, hi).unwrap());
            let below = correlations_from_kappas(&KappaPair::new(ka, lo).unwrap());
            assert_abs_diff_eq!(above.quantum_q, q0, epsilon = 1e-15);
            assert_abs_diff_eq!(below.classical_c, c0, epsilon = 1e-15);
        }
    }

    #[test]
    fn continuity_at_equal_kappas() {
        for ka in [0.1, 0.385, 0.607, 0.9] {
            let left = correlations_from_kappas(&KappaPair::new(ka, ka - 1e-12).unwrap());
            let right = correlations_from_kappas(&KappaPair::new(ka, ka + 1e-12).unwrap());
            assert!(left.max_abs_diff(&right) < 1e-9);
        }
    }

    #[test]
    fn ree_monotone_above_half() {
        let mut prev = 0.0;
        for i in 0..=100 {
            let l1 = 0.5 + 0.5 * i as f64 / 100.0;
            let rest = (1.0 - l1) / 3.0;
            let s = BellSpectrum::from_unsorted([l1, rest, rest, 1.0 - l1 - 2.0 * rest]).unwrap();
            let r = ree_bell(&s);
            assert!(r >= prev);
            prev = r;
        }
        assert_abs_diff_eq!(prev, 1.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn piecewise_matches_spectrum_route(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
            let k = KappaPair::new(a, b).unwrap();
            let piecewise = correlations_from_kappas(&k);
            let via_spectrum = CorrelationSet::from_spectrum(&bell_eigenvalues_from_kappas(&k));
            prop_assert!(piecewise.max_abs_diff(&via_spectrum) < 1e-9);
        }

        #[test]
        fn total_is_sum_for_bell_diagonal(w in proptest::array::uniform4(0.0..1.0f64)) {
            let total: f64 = w.iter().sum();
            prop_assume!(total > 1e-6);
            let s = BellSpectrum::from_unsorted(w.map(|x| x / total)).unwrap();
            let set = CorrelationSet::from_spectrum(&s);
            prop_assert!((set.total_i - set.quantum_q - set.classical_c).abs() < 1e-9);
            prop_assert!(set.as_array().iter().all(|&v| v >= 0.0));
            prop_assert!(set.total_i <= 2.0 + 1e-12);
            prop_assert!(set.ree <= 1.0 + 1e-12);
        }

        #[test]
        fn ree_zero_below_half(l1 in 0.25..=0.5f64) {
            let rest = (1.0 - l1) / 3.0;
            let s = BellSpectrum::from_unsorted([l1, rest, rest, rest]).unwrap();
            prop_assert_eq!(ree_bell(&s), 0.0);
        }
    }
}
