//! Acceptance criteria, one report line each.
//!
//! Run: cargo test -p corrdyn-cli --test acceptance
//!
//! Criteria listed in `KNOWN_SHORTFALLS` are evaluated at their stated
//! tolerance and reported as FAIL; they do not abort the run. Any other
//! failure, or a known shortfall that starts passing, exits non-zero.

use std::process::ExitCode;
use std::time::Instant;

use corrdyn::correlations::{
    classical_correlation_bell, correlations_from_kappas, quantum_correlation_bell, ree_bell,
    KappaPair,
};
use corrdyn::dephasing::{
    evolve_state, DephasingPoint, GaussianComponent, SampledSpectrum, SpectralModel, DEFAULT_LAMBDA0,
};
use corrdyn::oracle::{
    oracle_classical_correlation, oracle_quantum_correlation, oracle_ree_bell, GridSpec, SimplexGridSpec,
};
use corrdyn::qstate::{BellSpectrum, Matrix4c, TwoQubitState, Vector4c};
use corrdyn::tomography::{error_bars, expected_counts, reconstruct, simulate_counts, standard_basis_set, Reconstructor};
use corrdyn::SweepPoint;
use corrdyn_cli::config::preset;
use corrdyn_cli::{landmarks, series, sweep_rows, Row};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot be met under the fixed model conventions.
const KNOWN_SHORTFALLS: [u32; 2] = [5, 9];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn within(v: f64, target: f64, tol: f64) -> bool {
    (v - target).abs() <= tol
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISS"
    }
}

fn fig(name: &str) -> (Vec<SweepPoint>, Vec<Row>) {
    sweep_rows(&preset(name).expect("preset")).expect("sweep")
}

fn max_in(rows: &[Row], lo: f64, hi: f64, f: impl Fn(&Row) -> f64) -> f64 {
    rows.iter()
        .filter(|r| (lo..=hi).contains(&r.x))
        .map(f)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn c1_kappa_a() -> Outcome {
    let l0 = DEFAULT_LAMBDA0;
    let k = SpectralModel::filter(3e-9, l0).unwrap().kappa_signed(117.0 * l0).unwrap().norm();
    Outcome {
        id: 1,
        title: "kappa_a calibration",
        pass: within(k, 0.607, 0.010),
        detail: format!("|kappa_a(117)| = {k:.6} (0.607 +- 0.010)"),
    }
}

fn c2_initial() -> Outcome {
    let c = correlations_from_kappas(&KappaPair::new(0.607, 1.0).unwrap());
    let ok = [
        within(c.classical_c, 1.0, 1e-9),
        within(c.quantum_q, 0.285, 0.005),
        within(c.ree, 0.285, 0.005),
    ];
    Outcome {
        id: 2,
        title: "initial correlations",
        pass: ok.iter().all(|&b| b),
        detail: format!(
            "C = {:.12} [{}], Q = {:.6} [{}], REE = {:.6} [{}]",
            c.classical_c,
            mark(ok[0]),
            c.quantum_q,
            mark(ok[1]),
            c.ree,
            mark(ok[2])
        ),
    }
}

fn c3_transition(points: &[SweepPoint], rows: &[Row], elapsed: f64) -> Outcome {
    let lm = landmarks::compute(rows);
    let t = lm.transition_x.unwrap_or(f64::NAN);
    let q0 = points[0].correlations.quantum_q;
    let c_inf = points.last().unwrap().correlations.classical_c;
    let x_of = |p: &SweepPoint| p.x_b / DEFAULT_LAMBDA0;
    // Q frozen before the crossing, C frozen after it.
    let q_frozen = points.iter().filter(|p| x_of(p) < t).all(|p| within(p.correlations.quantum_q, q0, 1e-9));
    let c_frozen = points.iter().filter(|p| x_of(p) > t).all(|p| within(p.correlations.classical_c, c_inf, 1e-9));
    let in_range = (110.0..=130.0).contains(&t);
    let fast = elapsed < 1.0;
    Outcome {
        id: 3,
        title: "sudden transition",
        pass: in_range && q_frozen && c_frozen && fast,
        detail: format!(
            "crossing at {t:.3} [{}]; Q constant before [{}], C constant after [{}]; sweep {:.3} s [{}]",
            mark(in_range),
            mark(q_frozen),
            mark(c_frozen),
            elapsed,
            mark(fast)
        ),
    }
}

fn c4_ree_death(rows: &[Row]) -> Outcome {
    let d = landmarks::compute(rows).ree_death_x.unwrap_or(f64::NAN);
    let ree_zero_after = rows.iter().filter(|r| r.x > d && r.x < 300.0).all(|r| r.ree == 0.0);
    let ok = within(d, 189.0, 15.0);
    Outcome {
        id: 4,
        title: "REE sudden death",
        pass: ok && ree_zero_after,
        detail: format!("death at {d:.3} (189 +- 15) [{}]; REE = 0 up to 300 [{}]", mark(ok), mark(ree_zero_after)),
    }
}

fn c5_revival(rows: &[Row]) -> Outcome {
    let lm = landmarks::compute(rows);
    let kb = max_in(rows, 400.0, 700.0, |r| r.kappa_b);
    let q = max_in(rows, 400.0, 700.0, |r| r.q);
    let rise = lm.q_revival_start_x.unwrap_or(f64::NAN);
    let plateau: Vec<f64> = rows.iter().filter(|r| (130.0..=800.0).contains(&r.x)).map(|r| r.c).collect();
    let (lo, hi) = plateau.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
    let ok = [
        within(kb, 0.385, 0.02),
        within(q, 0.110, 0.01),
        (400.0..=470.0).contains(&rise),
        hi - lo <= 1e-6,
        within(lo, 0.285, 0.005),
    ];
    Outcome {
        id: 5,
        title: "revival",
        pass: ok.iter().all(|&b| b),
        detail: format!(
            "max |kappa_b| = {kb:.5} [{}]; max Q = {q:.5} [{}]; Q > 0.005 from {rise:.2} (400..470) [{}]; \
             C spread on 130..800 = {:.1e} [{}], level {lo:.7} (0.285 +- 0.005) [{}]",
            mark(ok[0]),
            mark(ok[1]),
            mark(ok[2]),
            hi - lo,
            mark(ok[3]),
            mark(ok[4])
        ),
    }
}

fn c6_narrow_filter() -> Outcome {
    let (_, rows) = fig("fig2b");
    let lm = landmarks::compute(&rows);
    let kb = max_in(&rows, 400.0, 700.0, |r| r.kappa_b);
    let t = lm.transition_x.unwrap_or(f64::NAN);
    let recross = lm.kappa_crossings_x.iter().copied().find(|&x| x > t).unwrap_or(f64::NAN);
    let ok = [within(kb, 0.944, 0.01), within(recross, 477.0, 15.0)];
    Outcome {
        id: 6,
        title: "narrow filter revival",
        pass: ok[0] && ok[1],
        detail: format!(
            "max |kappa_b| = {kb:.5} (0.944 +- 0.01) [{}]; re-crossing at {recross:.3} (477 +- 15) [{}]",
            mark(ok[0]),
            mark(ok[1])
        ),
    }
}

fn echo_errors(points: &[SweepPoint], flip: f64) -> (f64, f64) {
    let at = |x: f64| {
        points
            .iter()
            .find(|p| (p.x_b / DEFAULT_LAMBDA0 - x).abs() < 1e-6)
            .unwrap_or_else(|| panic!("no sample at {x}"))
            .correlations
    };
    let back = at(2.0 * flip).max_abs_diff(&at(0.0));
    let steps = (flip / 2.0).round() as usize;
    let sym = (0..=steps)
        .map(|k| {
            let d = 2.0 * k as f64;
            at(flip + d).max_abs_diff(&at(flip - d))
        })
        .fold(0.0, f64::max);
    (back, sym)
}

fn c7_echo() -> Outcome {
    let (pa, _) = fig("fig3a");
    let (pb, _) = fig("fig3b");
    let (ra, sa) = echo_errors(&pa, 200.0);
    let (rb, sb) = echo_errors(&pb, 400.0);
    let pass = [ra, sa, rb, sb].iter().all(|&e| e <= 1e-9);
    Outcome {
        id: 7,
        title: "echo exactness",
        pass,
        detail: format!(
            "flip 200: return at 400 {ra:.1e}, symmetry {sa:.1e}; flip 400: return at 800 {rb:.1e}, symmetry {sb:.1e} (<= 1e-9)"
        ),
    }
}

fn random_bell_spectrum(rng: &mut ChaCha8Rng) -> BellSpectrum {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let s: f64 = w.iter().sum();
    BellSpectrum::from_unsorted(w.map(|x| x / s)).unwrap()
}

fn c8_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = GridSpec::default();
    let simplex = SimplexGridSpec::default();
    let start = Instant::now();
    let (mut worst, mut undercut) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let spec = random_bell_spectrum(&mut rng);
        let rho = TwoQubitState::bell_diagonal(&spec);
        let q = oracle_quantum_correlation(&rho, &grid).unwrap();
        let c = oracle_classical_correlation(&rho, &grid).unwrap();
        let r = oracle_ree_bell(&spec, &simplex).unwrap();
        let pairs = [
            (q, quantum_correlation_bell(&spec)),
            (c, classical_correlation_bell(&spec)),
            (r, ree_bell(&spec)),
        ];
        for (oracle, analytic) in pairs {
            worst = worst.max((oracle - analytic).abs());
            undercut = undercut.max(analytic - oracle);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = [worst <= 1e-3, undercut <= 1e-6, elapsed < 60.0];
    Outcome {
        id: 8,
        title: "oracle agreement",
        pass: ok.iter().all(|&b| b),
        detail: format!(
            "100 states: max |oracle - analytic| = {worst:.2e} [{}], max undercut = {undercut:.2e} [{}], {elapsed:.1} s [{}]",
            mark(ok[0]),
            mark(ok[1]),
            mark(ok[2])
        ),
    }
}

fn eq7(ka: f64, kb: f64) -> TwoQubitState {
    evolve_state(&DephasingPoint::from_kappas(Complex64::new(ka, 0.0), Complex64::new(kb, 0.0)).unwrap()).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> TwoQubitState {
    let mut g = || Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let a = Matrix4c::from_fn(|_, _| g());
    let mut m = a * a.adjoint();
    m = (m + m.adjoint()).scale(0.5);
    let tr: f64 = (0..4).map(|i| m[(i, i)].re).sum();
    for i in 0..4 {
        m[(i, i)].im = 0.0;
    }
    TwoQubitState::new(m.unscale(tr)).unwrap()
}

fn mean_lambda_errors(rho: &TwoQubitState, n: u64) -> [f64; 4] {
    let records = 8;
    let mut acc = [0.0; 4];
    for r in 0..records {
        let e = error_bars(&simulate_counts(rho, n, 100 + r).unwrap(), 200, r).unwrap();
        for (a, l) in acc.iter_mut().zip(e.lambdas) {
            *a += l / records as f64;
        }
    }
    acc
}

fn ratios(rho: &TwoQubitState) -> [f64; 4] {
    let lo = mean_lambda_errors(rho, 1_000);
    let hi = mean_lambda_errors(rho, 100_000);
    std::array::from_fn(|i| lo[i] / hi[i])
}

fn c9_tomography() -> Outcome {
    let set = standard_basis_set();
    let recon = Reconstructor::new(&set).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut states: Vec<TwoQubitState> = (0..50).map(|_| random_state(&mut rng)).collect();
    states.push(eq7(0.607, 0.385));
    let noiseless = states
        .iter()
        .map(|s| recon.reconstruct_rates(&expected_counts(s, &set, 10_000)).unwrap().max_abs_diff(s))
        .fold(0.0, f64::max);

    let h = Complex64::new(0.5, 0.0);
    let psi = Vector4c::new(h, h, h, -h);
    let target = TwoQubitState::pure(&psi).unwrap();
    let fidelity = (0..100)
        .map(|seed| reconstruct(&simulate_counts(&target, 10_000, seed).unwrap()).unwrap().fidelity_with_pure(&psi))
        .sum::<f64>()
        / 100.0;

    // Full-rank state with well separated eigenvalues (late-time plateau).
    let plateau = ratios(&eq7(0.607, 0.0));
    let peak = ratios(&eq7(0.607, 0.385));
    let scaled = plateau.iter().all(|r| (8.0..=12.5).contains(r));
    let ok = [noiseless <= 1e-9, fidelity >= 0.99, scaled];
    let fmt = |r: [f64; 4]| r.map(|v| format!("{v:.2}")).join(", ");
    Outcome {
        id: 9,
        title: "tomography round trip",
        pass: ok.iter().all(|&b| b),
        detail: format!(
            "noiseless max dev {noiseless:.1e} [{}]; mean fidelity at 1e4 = {fidelity:.4} (>= 0.99) [{}]; \
             error ratio 1e3/1e5 (8..12.5) kappa_b=0: [{}] [{}], kappa_b=0.385 (info): [{}]",
            mark(ok[0]),
            mark(ok[1]),
            fmt(plateau),
            mark(ok[2]),
            fmt(peak)
        ),
    }
}

fn fp_components(fwhm_nm: f64) -> Vec<GaussianComponent> {
    [(0.37, 778.853), (0.44, 780.160), (0.19, 781.459)]
        .iter()
        .map(|&(a, c)| GaussianComponent::from_wavelength(a, c * 1e-9, fwhm_nm * 1e-9, DEFAULT_LAMBDA0).unwrap())
        .collect()
}

fn c10_structure(sweeps: &[(&str, Vec<SweepPoint>)]) -> Outcome {
    let mut additivity = 0.0f64;
    let mut min_value = f64::INFINITY;
    for (_, points) in sweeps {
        for p in points {
            let c = p.correlations;
            additivity = additivity.max((c.total_i - c.quantum_q - c.classical_c).abs());
            min_value = min_value.min(c.as_array().into_iter().fold(f64::INFINITY, f64::min));
        }
    }

    let l0 = DEFAULT_LAMBDA0;
    let models = [
        SpectralModel::filter(3e-9, l0).unwrap(),
        SpectralModel::multi_gaussian(fp_components(0.85)).unwrap(),
        SpectralModel::multi_gaussian(fp_components(0.2)).unwrap(),
        SpectralModel::Sampled(SampledSpectrum::from_components(&fp_components(0.85), 4001, 6.0).unwrap()),
    ];
    let mut kappa0_dev = 0.0f64;
    let mut kappa_max = 0.0f64;
    for m in &models {
        kappa0_dev = kappa0_dev.max((m.kappa_signed(0.0).unwrap() - Complex64::new(1.0, 0.0)).norm());
        for i in -2000..=2000 {
            kappa_max = kappa_max.max(m.kappa_signed(i as f64 * 0.5 * l0).unwrap().norm());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut phase_dev = 0.0f64;
    for _ in 0..200 {
        let (ma, mb) = (rng.random::<f64>(), rng.random::<f64>());
        let (pa, pb) = (rng.random::<f64>() * 6.3, rng.random::<f64>() * 6.3);
        let real = eq7(ma, mb).eigenvalues_sorted();
        let point = DephasingPoint::from_kappas(Complex64::from_polar(ma, pa), Complex64::from_polar(mb, pb)).unwrap();
        let phased = evolve_state(&point).unwrap().eigenvalues_sorted();
        for (x, y) in real.iter().zip(phased) {
            phase_dev = phase_dev.max((x - y).abs());
        }
    }

    let ok = [
        additivity <= 1e-9,
        min_value >= 0.0,
        kappa_max <= 1.0 + 1e-12,
        kappa0_dev <= 1e-9,
        phase_dev <= 1e-10,
    ];
    Outcome {
        id: 10,
        title: "structural properties",
        pass: ok.iter().all(|&b| b),
        detail: format!(
            "|I - Q - C| <= {additivity:.1e} [{}]; min correlation {min_value:.1e} [{}]; \
             max |kappa| {kappa_max:.12} [{}]; |kappa(0) - 1| {kappa0_dev:.1e} [{}]; phase invariance {phase_dev:.1e} [{}]",
            mark(ok[0]),
            mark(ok[1]),
            mark(ok[2]),
            mark(ok[3]),
            mark(ok[4])
        ),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let (fig2a_points, fig2a_rows) = fig("fig2a");
    let sweep_time = start.elapsed().as_secs_f64();
    // Landmarks are taken from the CSV form, as the CLI reports them.
    let csv_rows = series::from_csv(&series::to_csv(&fig2a_rows)).unwrap();

    let sweeps: Vec<(&str, Vec<SweepPoint>)> =
        ["fig2b", "fig3a", "fig3b"].iter().map(|&n| (n, fig(n).0)).collect();

    let outcomes = vec![
        c1_kappa_a(),
        c2_initial(),
        c3_transition(&fig2a_points, &csv_rows, sweep_time),
        c4_ree_death(&csv_rows),
        c5_revival(&csv_rows),
        c6_narrow_filter(),
        c7_echo(),
        c8_oracle(),
        c9_tomography(),
        c10_structure(&[&[("fig2a", fig2a_points.clone())][..], &sweeps[..]].concat()),
    ];

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_SHORTFALLS.contains(&o.id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known shortfall)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as shortfall)",
        };
        println!("{tag} criterion {:>2} {}: {}", o.id, o.title, o.detail);
        if o.pass == known {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
