mod common;

use bosonlab::fock::{self, FockCutoff, ModeOperator};
use bosonlab::Error;
use common::{c, coherent_vector, projector, thermal_diag, trace_norm, C0};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cut(d: usize) -> FockCutoff {
    FockCutoff::single(d).unwrap()
}

#[test]
fn coherent_examples() {
    let vac = fock::coherent_state(C0, &cut(7)).unwrap();
    let mut expect = DMatrix::from_element(7, 7, C0);
    expect[(0, 0)] = c(1.0);
    assert_eq!(vac.data(), &expect);
    assert_eq!(vac.leakage(), 0.0);

    let rho = fock::coherent_state(c(1.0), &cut(20)).unwrap();
    // Σ n |c_n|² over the truncation with independently generated amplitudes
    let amps = coherent_vector(c(1.0), 20);
    let mean: f64 = amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
    assert!((mean - 1.0).abs() < 1e-9);
    assert!((fock::mean_photon_number(&rho, 0).unwrap() - 1.0).abs() < 1e-9);
    assert!((rho.data() - projector(&amps)).camax() < 1e-15);

    assert!(matches!(fock::coherent_state(c(3.0), &cut(4)), Err(Error::CutoffTooSmall(_))));
}

#[test]
fn complex_coherent_matches_recurrence() {
    let alpha = Complex64::new(0.8, -0.4);
    let rho = fock::coherent_state(alpha, &cut(30)).unwrap();
    assert!((rho.data() - projector(&coherent_vector(alpha, 30))).camax() < 1e-14);
}

#[test]
fn number_state_examples() {
    let rho = fock::number_state(1, &cut(10)).unwrap();
    for i in 0..10 {
        for j in 0..10 {
            let want = if i == 1 && j == 1 { 1.0 } else { 0.0 };
            assert_eq!(rho.data()[(i, j)], c(want));
        }
    }
    assert_eq!(fock::mean_photon_number(&rho, 0).unwrap(), 1.0);
    assert_eq!(fock::number_state(0, &cut(5)).unwrap().data(), fock::vacuum(&cut(5)).data());
    assert!(matches!(fock::number_state(12, &cut(10)), Err(Error::CutoffTooSmall(_))));
    assert_eq!(fock::mean_photon_number(&fock::number_state(3, &cut(6)).unwrap(), 0).unwrap(), 3.0);
}

#[test]
fn squeezed_vacuum_moments() {
    assert!((fock::squeezed_vacuum(0.0, &cut(12)).unwrap().data() - fock::vacuum(&cut(12)).data()).camax() < 1e-15);

    let d = 40;
    let rho = fock::squeezed_vacuum(0.5, &cut(d)).unwrap();
    // x = (a + a†)/√2 built by hand
    let x = DMatrix::from_fn(d, d, |i, j| {
        if i + 1 == j {
            c((j as f64).sqrt() / 2f64.sqrt())
        } else if j + 1 == i {
            c((i as f64).sqrt() / 2f64.sqrt())
        } else {
            C0
        }
    });
    let mean_x = (rho.data() * &x).trace().re;
    let var_x = (rho.data() * &x * &x).trace().re - mean_x * mean_x;
    assert!((var_x - (-1.0f64).exp() / 2.0).abs() < 1e-8, "{var_x}");
    let n = fock::mean_photon_number(&rho, 0).unwrap();
    assert!((n - 0.5f64.sinh().powi(2)).abs() < 1e-8);
}

#[test]
fn qidc_examples() {
    let d = 30;
    let cutoff = FockCutoff::uniform(2, d).unwrap();
    let vac = fock::qidc_state(0.0, &cutoff).unwrap();
    assert!((vac.data() - fock::vacuum(&cutoff).data()).camax() < 1e-15);

    let rho = fock::qidc_state(1.0, &cutoff).unwrap();
    let signal = fock::partial_trace(&rho, &[0]).unwrap();
    let diag = thermal_diag(1.0, d);
    for (n, p) in diag.iter().enumerate() {
        assert!((signal.data()[(n, n)].re - p).abs() < 1e-8);
    }
    // the truncated geometric mean: Σ_{n<30} n/2^{n+1}
    let mean: f64 = diag.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    assert!((fock::mean_photon_number(&signal, 0).unwrap() - mean).abs() < 1e-12);
    assert!((mean - 1.0).abs() < 3e-8);

    let half = fock::qidc_state(0.5, &FockCutoff::uniform(2, 40).unwrap()).unwrap();
    let i11 = 40 + 1;
    let amp = half.data()[(i11, i11)].re.sqrt();
    let expect = (1.0 - 1.0 / 3.0f64).sqrt() / 3f64.sqrt();
    assert!((amp - expect).abs() < 1e-12);
}

#[test]
fn tensor_and_partial_trace() {
    let c3 = cut(3);
    let vv = fock::tensor(&fock::vacuum(&c3), &fock::vacuum(&c3)).unwrap();
    assert_eq!(vv.data(), fock::vacuum(&FockCutoff::uniform(2, 3).unwrap()).data());

    let one_zero = fock::tensor(&fock::number_state(1, &c3).unwrap(), &fock::vacuum(&c3)).unwrap();
    let idx = 3;
    assert_eq!(one_zero.data()[(idx, idx)], c(1.0));
    assert!((one_zero.data().map(|z| z.norm()).sum() - 1.0).abs() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let a = fock::random_state(&cut(4), 2, &mut rng);
        let b = fock::random_state(&cut(3), 3, &mut rng);
        let ab = fock::tensor(&a, &b).unwrap();
        assert!((ab.trace() - a.trace() * b.trace()).abs() < 1e-12);
        // kron by hand
        let manual = DMatrix::from_fn(12, 12, |i, j| a.data()[(i / 3, j / 3)] * b.data()[(i % 3, j % 3)]);
        assert!((ab.data() - manual).camax() < 1e-15);
        assert!(trace_norm(&(fock::partial_trace(&ab, &[0]).unwrap().data() - a.data())) < 1e-12);
        assert!(trace_norm(&(fock::partial_trace(&ab, &[1]).unwrap().data() - b.data())) < 1e-12);
    }
}

#[test]
fn mean_photon_number_examples() {
    assert_eq!(fock::mean_photon_number(&fock::vacuum(&cut(5)), 0).unwrap(), 0.0);
    let rho = fock::coherent_state(c(2.0), &cut(40)).unwrap();
    assert!((fock::mean_photon_number(&rho, 0).unwrap() - 4.0).abs() < 1e-8);
    assert!(matches!(fock::mean_photon_number(&rho, 1), Err(Error::InvalidModeIndex { .. })));
}

#[test]
fn ladder_operators() {
    let a = ModeOperator::annihilation(6);
    let ad = ModeOperator::creation(6);
    let n = ModeOperator::number(6);
    let prod = &ad.data * &a.data;
    assert!((prod - &n.data).camax() < 1e-14);
    for k in 1..6 {
        assert!((a.data[(k - 1, k)].re - (k as f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn displacement_acts_on_vacuum_as_coherent() {
    let alpha = Complex64::new(-0.3, 0.9);
    let d = fock::displacement_matrix(alpha, 30, 30);
    let col: Vec<Complex64> = d.column(0).iter().copied().collect();
    let want = coherent_vector(alpha, 30);
    for (a, b) in col.iter().zip(&want) {
        assert!((a - b).norm() < 1e-14);
    }
    // D(α)D(−α) = I on levels well inside the truncation
    let prod = &d * fock::displacement_matrix(-alpha, 30, 30);
    for i in 0..10 {
        for j in 0..10 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((prod[(i, j)] - c(want)).norm() < 1e-10);
        }
    }
}

#[test]
fn cutoff_limits() {
    assert!(matches!(
        FockCutoff::with_max_total(vec![100, 100], 4096),
        Err(Error::DimensionOverflow { total: 10000, max: 4096 })
    ));
    assert!(FockCutoff::single(0).is_err());
}
