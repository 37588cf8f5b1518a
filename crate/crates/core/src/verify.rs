//! End-to-end verification suite behind `bosonlab verify`.
//!
//! Each check runs one family of identities or dominance relations at fixed
//! parameters and records the measured quantities next to its verdict.

use std::time::Instant;

use indexmap::IndexMap;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{self, ClassicalState, Sweep};
use crate::channels;
use crate::error::Result;
use crate::fock::{self, FockCutoff};
use crate::gaussian::{self, GaussianState};
use crate::linalg;
use crate::phase_space::{self, GridSpec};
use crate::power::{self, Carrier};

/// Wall-clock budget for the whole suite, seconds.
pub const RUNTIME_BUDGET: f64 = 600.0;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub measured: IndexMap<String, f64>,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub checks: Vec<CheckResult>,
    pub total_seconds: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Single-mode noise bound used by the dominance check; replaceable so a
    /// deliberately broken formula can be shown to fail the suite.
    pub theorem2_bound: fn(f64) -> Result<f64>,
    pub seed: u64,
    /// Randomized trials per inequality.
    pub trials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { theorem2_bound: bounds::bound_theorem2, seed: 2024, trials: 200 }
    }
}

/// `−2[N/(N+1)]^{1/2}`: the noise bound with its sign flipped.
pub fn sign_flipped_theorem2(noise: f64) -> Result<f64> {
    Ok(-bounds::bound_theorem2(noise)?)
}

struct Check {
    passed: bool,
    measured: IndexMap<String, f64>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { passed: true, measured: IndexMap::new(), notes: Vec::new() }
    }

    fn record(&mut self, key: impl Into<String>, value: f64) {
        self.measured.insert(key.into(), value);
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            self.notes.push(what.into());
        }
    }
}

fn cut(d: usize) -> Result<FockCutoff> {
    FockCutoff::single(d)
}

fn run(id: usize, name: &str, f: impl FnOnce(&mut Check) -> Result<()>) -> CheckResult {
    let start = Instant::now();
    let mut c = Check::new();
    if let Err(e) = f(&mut c) {
        c.passed = false;
        c.notes.push(format!("error: {e}"));
    }
    CheckResult {
        id,
        name: name.to_string(),
        passed: c.passed,
        measured: c.measured,
        detail: c.notes.join("; "),
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn classicalization(c: &mut Check) -> Result<()> {
    let cutoff = cut(40)?;
    let inputs = [
        ("fock1", fock::number_state(1, &cutoff)?),
        ("sq0.5", fock::squeezed_vacuum(0.5, &cutoff)?),
    ];
    for (label, rho) in &inputs {
        for kappa in [0.25, 0.5] {
            let target = channels::apply_agn(&channels::apply_loss(rho, &[kappa])?, &[kappa])?;
            let build = |s: &GridSpec| {
                phase_space::state_from_p(&phase_space::theorem1_p_output(rho, &[kappa], s)?, &cutoff)
            };
            let spec = GridSpec::for_state(rho)?;
            let d = bounds::trace_distance(&build(&spec)?, &target)?;
            let conv = phase_space::refine_spacing(&spec, &target, build, 1, 0.0)?;
            c.record(format!("{label}_k{kappa}_default"), d);
            c.record(format!("{label}_k{kappa}_refined"), conv.distance);
            c.require(d < 5e-3, format!("{label} kappa={kappa}: default-grid distance {d:e}"));
            c.require(conv.distance < 1e-3, format!("{label} kappa={kappa}: refined {:e}", conv.distance));
        }
    }
    Ok(())
}

fn commutation(c: &mut Check) -> Result<()> {
    let rho = fock::number_state(1, &cut(60)?)?;
    let mut worst = 0.0f64;
    for kappa in [0.1, 0.5, 0.9] {
        for n in [0.1, 1.0, 2.0] {
            let d = channels::commutation_defect(&rho, kappa, n)?;
            worst = worst.max(d);
            c.require(d < 1e-6, format!("kappa={kappa} N={n}: defect {d:e}"));
        }
    }
    c.record("max_defect", worst);
    Ok(())
}

fn bookkeeping(c: &mut Check) -> Result<()> {
    let cutoff = cut(40)?;
    let inputs = [
        ("coherent1", fock::coherent_state(Complex64::new(1.0, 0.0), &cutoff)?),
        ("fock1", fock::number_state(1, &cutoff)?),
    ];
    for (label, rho) in &inputs {
        let out = phase_space::classical_counterpart(rho)?;
        let gain = fock::mean_photon_number(&out, 0)? - fock::mean_photon_number(rho, 0)?;
        c.record(format!("{label}_gain"), gain);
        c.require((gain - 1.0).abs() < 1e-6, format!("{label}: photon gain {gain}"));
    }
    Ok(())
}

fn theorem2(c: &mut Check, bound_fn: fn(f64) -> Result<f64>) -> Result<()> {
    let rho = fock::coherent_state(Complex64::new(1.0, 0.0), &cut(60)?)?;
    for n in [0.05, 0.1, 0.2, 0.5, 1.0] {
        let measured = bounds::trace_distance(&rho, &channels::apply_agn(&rho, &[n])?)?;
        let bound = bound_fn(n)?;
        let closed = 2.0 * n / (n + 1.0);
        c.record(format!("N{n}_measured"), measured);
        c.record(format!("N{n}_bound"), bound);
        c.require((measured - closed).abs() < 1e-6, format!("N={n}: measured {measured} vs {closed}"));
        c.require(measured <= bound + bounds::DOMINANCE_SLACK, format!("N={n}: {measured} > bound {bound}"));
    }
    Ok(())
}

fn theorem3(c: &mut Check) -> Result<()> {
    let cutoff = cut(50)?;
    let fixtures = [
        ("thermal0.5", ClassicalState::thermal(&[0.5], &cutoff)?),
        ("coherent1", ClassicalState::coherent(&[Complex64::new(1.0, 0.0)], &cutoff)?),
    ];
    let mut pairs = Vec::new();
    for n2 in [0.5, 1.0] {
        for diff in [0.05, 0.2] {
            pairs.push((n2 + diff, n2));
        }
    }
    let mut worst = f64::INFINITY;
    for (label, state) in &fixtures {
        for r in bounds::dominance_sweep(state, &Sweep::Theorem3 { pairs: pairs.clone() })? {
            let m = r.measured_value.unwrap_or(f64::NAN);
            worst = worst.min(r.bound_value - m);
            c.require(m <= r.bound_value + 1e-6, format!("{label} {:?}: {m} > {}", r.params, r.bound_value));
        }
    }
    c.record("min_margin", worst);
    let (kappa, n) = (0.01, 1.0);
    let bound = bounds::bound_theorem3(n + kappa, n)?;
    let coherent = fixtures[1].1.rho();
    let measured = bounds::trace_distance(
        &channels::apply_agn(coherent, &[n + kappa])?,
        &channels::apply_agn(coherent, &[n])?,
    )?;
    c.record("corollary_bound", bound);
    c.record("corollary_measured", measured);
    c.require((bound - 0.02).abs() < 1e-12, format!("corollary bound {bound}"));
    c.require(measured < bound, format!("corollary measured {measured} >= {bound}"));
    Ok(())
}

fn theorem5(c: &mut Check) -> Result<()> {
    let mut worst = 0.0f64;
    for n in [0.05, 0.3, 1.0, 7.0] {
        let t5 = bounds::bound_theorem5(&[n])?.value;
        worst = worst.max((t5 - bounds::bound_theorem2(n)?).abs());
    }
    c.record("max_single_mode_difference", worst);
    c.require(worst < 1e-12, format!("single-mode reduction off by {worst:e}"));
    let big = bounds::bound_theorem5(&vec![20.0; 100_000])?;
    c.record("m1e5_value", big.value);
    c.require(big.vacuous, "m = 1e5, N = 20 not flagged vacuous");
    Ok(())
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(linalg::standard_normal(rng), linalg::standard_normal(rng))
    });
    g.qr().q()
}

fn lemmas34(c: &mut Check, seed: u64, trials: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut v3, mut v4, mut v4_operator) = (0usize, 0usize, 0usize);
    let cutoff = cut(6)?;
    for _ in 0..trials {
        let rank1 = rng.gen_range(1..=6);
        let rank2 = rng.gen_range(1..=6);
        let r1 = fock::random_state(&cutoff, rank1, &mut rng);
        let r2 = fock::random_state(&cutoff, rank2, &mut rng);
        let u = random_unitary(&mut rng, 6);
        let mut x = DMatrix::from_element(6, 6, Complex64::new(0.0, 0.0));
        for i in 0..6 {
            x[(i, i)] = Complex64::new(rng.gen::<f64>(), 0.0);
        }
        let povm = linalg::hermitize(&(&u * x * u.adjoint()));
        if !bounds::lemma3_probability_gap(&r1, &r2, &povm)?.satisfied {
            v3 += 1;
        }
    }
    let small = cut(3)?;
    for _ in 0..trials {
        let draw = |rng: &mut ChaCha8Rng| {
            let rank = rng.gen_range(1..=3);
            fock::random_state(&small, rank, rng)
        };
        let (a, b, cc, d) = (draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng));
        if !bounds::lemma4_tensor_bound(&a, &b, &cc, &d)?.satisfied {
            v4 += 1;
        }
        if !bounds::lemma4_operator_norm_bound(&a, &b, &cc, &d)?.satisfied {
            v4_operator += 1;
        }
    }
    c.record("trials", trials as f64);
    c.record("lemma3_violations", v3 as f64);
    c.record("lemma4_violations", v4 as f64);
    c.record("lemma4_operator_norm_violations", v4_operator as f64);
    c.require(v3 == 0, format!("{v3} probability-gap violations"));
    c.require(v4 == 0, format!("{v4} tensor-bound violations"));
    Ok(())
}

fn qidc(c: &mut Check) -> Result<()> {
    let mut worst = 0.0f64;
    let mut worst_threshold = 0.0f64;
    for ns in [0.1, 0.5, 1.0, 10.0] {
        let g = gaussian::gaussian_qidc(ns)?;
        let cert = gaussian::classicality_certificate(&gaussian::gaussian_apply_agn(&g, &[1.0, 0.0])?);
        worst = worst.max(cert.min_eigenvalue.abs());
        c.require(cert.is_classical, format!("Ns={ns}: not classical"));
        c.require(cert.min_eigenvalue.abs() < 1e-10, format!("Ns={ns}: min eigenvalue {:e}", cert.min_eigenvalue));
        let t = gaussian::classicality_threshold(&g, &[1.0, 0.0], 1e-10)?;
        worst_threshold = worst_threshold.max((t - 1.0).abs());
        c.require((t - 1.0).abs() < 1e-8, format!("Ns={ns}: threshold {t}"));
    }
    c.record("max_abs_min_eigenvalue", worst);
    c.record("max_threshold_offset", worst_threshold);
    Ok(())
}

fn lemma12(c: &mut Check) -> Result<()> {
    let cutoff = cut(40)?;
    let rho = fock::number_state(1, &cutoff)?;
    let spec = GridSpec::for_state(&rho)?;
    let refined = spec.with_spacing(spec.spacing / 2.0)?;
    let rebuilt = phase_space::state_from_p(
        &relabel_as_p(phase_space::q_function(&rho, &refined)?),
        &cutoff,
    )?;
    let d = bounds::trace_distance(&rebuilt, &channels::apply_agn(&rho, &[1.0])?)?;
    c.record("fock1_reconstruction_distance", d);
    c.require(d < 1e-4, format!("|1> reconstruction distance {d:e}"));
    let cert = gaussian::gaussian_lemma2_check(&GaussianState::squeezed_vacuum(0.5)?);
    let expect = (-1.0f64).exp() / 2.0;
    c.record("squeezed_margin", cert.margin);
    c.require(cert.is_classical, "squeezed vacuum plus N = 1/2 not classical");
    c.require((cert.margin - expect).abs() < 1e-10, format!("margin {} vs {expect}", cert.margin));
    Ok(())
}

/// Reinterprets a nonnegative grid (Q or W) as the P-function it equals after noise.
fn relabel_as_p(mut grid: phase_space::PhaseSpaceGrid) -> phase_space::PhaseSpaceGrid {
    grid.kind = phase_space::GridKind::P;
    grid
}

fn cross_representation(c: &mut Check) -> Result<()> {
    let cutoff = cut(60)?;
    let fixtures = [
        ("coherent", fock::coherent_state(Complex64::new(0.8, -0.4), &cutoff)?, GaussianState::coherent(&[Complex64::new(0.8, -0.4)])),
        ("squeezed", fock::squeezed_vacuum(0.5, &cutoff)?, GaussianState::squeezed_vacuum(0.5)?),
        ("thermal", fock::thermal_state(0.5, &cutoff)?, GaussianState::thermal(&[0.5])?),
    ];
    let mut worst = 0.0f64;
    for (label, rho, g) in &fixtures {
        for kappa in [0.3, 0.7] {
            for n in [0.5, 1.0] {
                let fock_out = gaussian::moments_from_fock(&channels::apply_agn(
                    &channels::apply_loss(rho, &[kappa])?,
                    &[n],
                )?)?;
                let gauss_out = gaussian::gaussian_apply_agn(&gaussian::gaussian_apply_loss(g, &[kappa])?, &[n])?;
                let err = (fock_out.mean() - gauss_out.mean())
                    .amax()
                    .max((fock_out.cov() - gauss_out.cov()).amax());
                worst = worst.max(err);
                c.require(err < 1e-5, format!("{label} kappa={kappa} N={n}: {err:e}"));
            }
        }
    }
    c.record("max_moment_error", worst);
    Ok(())
}

fn power_instances(c: &mut Check) -> Result<()> {
    let micron = Carrier::Wavelength(1e-6);
    let full = power::power_calc(1.0, micron, 1e15, None, None)?;
    let pulsed = power::power_calc(1.0, micron, 1e12, None, None)?;
    let flux = power::photons_per_second(1.0, micron)?;
    c.record("full_bandwidth_dbm", full.power_dbm);
    c.record("picosecond_dbm", pulsed.power_dbm);
    c.record("photons_per_watt_second", flux);
    c.require((full.power_dbm + 10.0).abs() <= 5.0, format!("{} dBm vs -10 dBm", full.power_dbm));
    c.require((pulsed.power_dbm + 40.0).abs() <= 5.0, format!("{} dBm vs -40 dBm", pulsed.power_dbm));
    c.require((flux / 1e19).log2().abs() <= 1.0, format!("{flux:e} photons/s vs 1e19"));
    Ok(())
}

pub fn verify_all(opts: &VerifyOptions) -> VerifySummary {
    let start = Instant::now();
    let mut checks = vec![
        run(1, "classicalization", classicalization),
        run(2, "commutation", commutation),
        run(3, "one_photon_bookkeeping", bookkeeping),
        run(4, "theorem2_dominance", |c| theorem2(c, opts.theorem2_bound)),
        run(5, "theorem3_dominance", theorem3),
        run(6, "theorem5", theorem5),
        run(7, "lemma3_lemma4_random", |c| lemmas34(c, opts.seed, opts.trials)),
        run(8, "qidc_marginal_classicality", qidc),
        run(9, "lemma1_lemma2_thresholds", lemma12),
        run(10, "cross_representation", cross_representation),
        run(11, "power_formula", power_instances),
    ];
    let elapsed = start.elapsed().as_secs_f64();
    checks.push(run(12, "runtime_budget", |c| {
        c.record("seconds", elapsed);
        c.require(elapsed < RUNTIME_BUDGET, format!("{elapsed:.1} s exceeds {RUNTIME_BUDGET} s"));
        Ok(())
    }));
    let passed = checks.iter().all(|c| c.passed);
    VerifySummary { checks, total_seconds: start.elapsed().as_secs_f64(), passed }
}
