use std::ffi::CStr;
use std::ptr;

use bosonlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn coherent_state_round_trip() {
    unsafe {
        let mut s: *mut BlState = ptr::null_mut();
        assert_eq!(bl_state_coherent(1.0, 0.0, 40, &mut s), BlStatus::Ok);
        let (mut dim, mut modes, mut tr, mut n) = (0usize, 0usize, 0.0, 0.0);
        assert_eq!(bl_state_dim(s, &mut dim), BlStatus::Ok);
        assert_eq!(bl_state_modes(s, &mut modes), BlStatus::Ok);
        assert_eq!(bl_state_trace(s, &mut tr), BlStatus::Ok);
        assert_eq!(bl_state_mean_photon_number(s, 0, &mut n), BlStatus::Ok);
        assert_eq!((dim, modes), (40, 1));
        assert!((tr - 1.0).abs() < 1e-12 && (n - 1.0).abs() < 1e-10);

        let mut buf = vec![0.0; 2 * dim * dim];
        assert_eq!(bl_state_copy_matrix(s, buf.as_mut_ptr(), buf.len()), BlStatus::Ok);
        // ρ₀₀ = e^{-1}, ρ₁₀ = e^{-1}
        assert!((buf[0] - (-1.0f64).exp()).abs() < 1e-14 && buf[1] == 0.0);
        assert!((buf[2] - (-1.0f64).exp()).abs() < 1e-14);
        assert_eq!(bl_state_copy_matrix(s, buf.as_mut_ptr(), 3), BlStatus::InvalidParameter);
        bl_state_free(s);
    }
}

#[test]
fn noisy_distance_matches_closed_form() {
    unsafe {
        let mut s = ptr::null_mut();
        let mut noisy = ptr::null_mut();
        assert_eq!(bl_state_coherent(1.0, 0.0, 60, &mut s), BlStatus::Ok);
        let noise = [1.0];
        assert_eq!(bl_apply_agn(s, noise.as_ptr(), 1, &mut noisy), BlStatus::Ok);
        let (mut d, mut b) = (0.0, 0.0);
        assert_eq!(bl_trace_distance(s, noisy, &mut d), BlStatus::Ok);
        assert_eq!(bl_bound_theorem2(1.0, &mut b), BlStatus::Ok);
        // 2N/(N+1) at N = 1
        assert!((d - 1.0).abs() < 1e-6, "{d}");
        assert!((b - 2f64.sqrt()).abs() < 1e-15);
        bl_state_free(noisy);
        bl_state_free(s);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(bl_state_number(5, 3, &mut s), BlStatus::CutoffTooSmall);
        assert!(!last_error().is_empty());
        assert!(s.is_null());

        assert_eq!(bl_state_number(0, 8, &mut s), BlStatus::Ok);
        assert!(last_error().is_empty());
        let mut out = ptr::null_mut();
        let noise = [4.0];
        assert_eq!(bl_apply_agn(s, noise.as_ptr(), 1, &mut out), BlStatus::CutoffHeadroomInsufficient);
        let kappa = [1.5];
        assert_eq!(bl_apply_loss(s, kappa.as_ptr(), 1, &mut out), BlStatus::InvalidParameter);
        assert_eq!(bl_apply_loss(s, ptr::null(), 1, &mut out), BlStatus::NullPointer);
        assert_eq!(bl_trace_distance(ptr::null(), s, &mut 0.0), BlStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(bl_bound_theorem3(1.0, 1e-9, &mut v), BlStatus::DegenerateDenominator);
        bl_state_free(s);
        bl_state_free(ptr::null_mut());
    }
}

#[test]
fn bounds_and_power() {
    unsafe {
        let (mut v, mut vac) = (0.0, 0);
        let noise = vec![20.0; 100_000];
        assert_eq!(bl_bound_theorem5(noise.as_ptr(), noise.len(), &mut v, &mut vac), BlStatus::Ok);
        assert!(v > 2.0 && vac == 1);
        let (na, nb) = ([0.6, 0.4], [0.5, 0.3]);
        assert_eq!(bl_bound_theorem4(na.as_ptr(), nb.as_ptr(), BlReading::PerMode, &mut v), BlStatus::Ok);
        // 2[u + v + 2uv] with u = 0.2, v = 1/3
        assert!((v - 2.0 * (0.2 + 1.0 / 3.0 + 2.0 * 0.2 / 3.0)).abs() < 1e-14);

        let mut p = BlPowerResult::default();
        assert_eq!(bl_power_calc(1.0, 1e-6, 1e12, f64::NAN, f64::NAN, &mut p), BlStatus::Ok);
        assert!((p.power_dbm + 37.02).abs() < 0.01 && p.constraint_met == -1);
        assert_eq!(bl_power_calc(1.0, 1e-6, 1e12, 0.5, f64::NAN, &mut p), BlStatus::Ok);
        assert_eq!(p.constraint_met, 0);
        assert_eq!(bl_power_calc(-1.0, 1e-6, 1e12, f64::NAN, f64::NAN, &mut p), BlStatus::InvalidParameter);
    }
}

#[test]
fn gaussian_threshold() {
    unsafe {
        let mut g = ptr::null_mut();
        let mut noisy = ptr::null_mut();
        assert_eq!(bl_gaussian_qidc(0.5, &mut g), BlStatus::Ok);
        let n = [1.0, 0.0];
        assert_eq!(bl_gaussian_apply_agn(g, n.as_ptr(), 2, &mut noisy), BlStatus::Ok);
        let (mut classical, mut min_eig) = (0, 0.0);
        assert_eq!(bl_gaussian_certificate(noisy, &mut classical, &mut min_eig), BlStatus::Ok);
        assert!(classical == 1 && min_eig.abs() < 1e-10);
        let mut t = 0.0;
        let dir = [1.0, 0.0];
        assert_eq!(bl_classicality_threshold(g, dir.as_ptr(), 2, 1e-9, &mut t), BlStatus::Ok);
        assert!((t - 1.0).abs() < 1e-8);
        bl_gaussian_free(noisy);
        bl_gaussian_free(g);
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/bosonlab.h");
    for name in [
        "bl_last_error",
        "bl_version",
        "bl_state_coherent",
        "bl_state_free",
        "bl_apply_agn",
        "bl_trace_distance",
        "bl_bound_theorem5",
        "bl_gaussian_certificate",
        "bl_power_calc",
        "BL_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
