//! C ABI over `bosonlab`.
//!
//! States are opaque heap handles released with the matching `*_free`
//! function. Every fallible call returns a [`BlStatus`]; on failure the
//! message is kept per thread and read back with [`bl_last_error`]. Panics
//! are caught at the boundary and reported as [`BlStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use bosonlab::bounds::{self, Theorem4Reading};
use bosonlab::fock::{self, DensityMatrix, FockCutoff};
use bosonlab::gaussian::{self, GaussianState};
use bosonlab::power::{self, Carrier};
use bosonlab::{channels, Error};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    CutoffTooSmall = 3,
    DimensionOverflow = 4,
    CutoffHeadroomInsufficient = 5,
    CutoffMismatch = 6,
    InvalidState = 7,
    DegenerateDenominator = 8,
    OutOfRange = 9,
    Panic = 99,
}

/// Opaque density matrix on a truncated Fock space.
pub struct BlState(DensityMatrix);

/// Opaque Gaussian state (mean vector and covariance).
pub struct BlGaussian(GaussianState);

/// Index reading of the two-mode bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlReading {
    PerMode = 0,
    Printed = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BlPowerResult {
    pub ns: f64,
    pub bandwidth: f64,
    pub omega0: f64,
    pub power_watts: f64,
    pub power_dbm: f64,
    pub photons_per_second: f64,
    /// 1 met, 0 violated, -1 when no threshold was given.
    pub constraint_met: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BlStatus {
    match e {
        Error::CutoffTooSmall(_) => BlStatus::CutoffTooSmall,
        Error::DimensionOverflow { .. } => BlStatus::DimensionOverflow,
        Error::CutoffHeadroomInsufficient { .. } => BlStatus::CutoffHeadroomInsufficient,
        Error::CutoffMismatch(..) => BlStatus::CutoffMismatch,
        Error::InvalidState(_) => BlStatus::InvalidState,
        Error::DegenerateDenominator(_) => BlStatus::DegenerateDenominator,
        Error::ArgumentOutOfReliableRange { .. } | Error::GridTooSmall(_) => BlStatus::OutOfRange,
        _ => BlStatus::InvalidParameter,
    }
}

struct Fail(BlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(BlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard<F>(f: F) -> BlStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            BlStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            BlStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn state<'a>(s: *const BlState) -> Result<&'a DensityMatrix, Fail> {
    s.as_ref().map(|s| &s.0).ok_or_else(|| null("state"))
}

unsafe fn gauss<'a>(g: *const BlGaussian) -> Result<&'a GaussianState, Fail> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("gaussian state"))
}

unsafe fn reals<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn emit_state(out: *mut *mut BlState, rho: DensityMatrix) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(BlState(rho)));
    Ok(())
}

unsafe fn emit_gauss(out: *mut *mut BlGaussian, g: GaussianState) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(BlGaussian(g)));
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- Fock states ----

/// Coherent state `|re + i·im⟩` truncated to `dim` levels.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn bl_state_coherent(re: f64, im: f64, dim: usize, out: *mut *mut BlState) -> BlStatus {
    guard(|| {
        let rho = fock::coherent_state(Complex64::new(re, im), &FockCutoff::single(dim)?)?;
        emit_state(out, rho)
    })
}

/// Number state `|n⟩⟨n|`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn bl_state_number(n: usize, dim: usize, out: *mut *mut BlState) -> BlStatus {
    guard(|| emit_state(out, fock::number_state(n, &FockCutoff::single(dim)?)?))
}

/// Thermal state with mean photon number `mean`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn bl_state_thermal(mean: f64, dim: usize, out: *mut *mut BlState) -> BlStatus {
    guard(|| emit_state(out, fock::thermal_state(mean, &FockCutoff::single(dim)?)?))
}

/// Squeezed vacuum with squeezing parameter `r`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn bl_state_squeezed(r: f64, dim: usize, out: *mut *mut BlState) -> BlStatus {
    guard(|| emit_state(out, fock::squeezed_vacuum(r, &FockCutoff::single(dim)?)?))
}

/// Two-mode squeezed vacuum with `ns` mean signal photons, `dim` levels per mode.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn bl_state_qidc(ns: f64, dim: usize, out: *mut *mut BlState) -> BlStatus {
    guard(|| emit_state(out, fock::qidc_state(ns, &FockCutoff::uniform(2, dim)?)?))
}

/// `a ⊗ b`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_state_tensor(
    a: *const BlState,
    b: *const BlState,
    out: *mut *mut BlState,
) -> BlStatus {
    guard(|| emit_state(out, fock::tensor(state(a)?, state(b)?)?))
}

/// Releases a state handle; null is ignored.
///
/// # Safety
/// `s` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_state_free(s: *mut BlState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of modes.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_state_modes(s: *const BlState, out: *mut usize) -> BlStatus {
    guard(|| write(out, state(s)?.modes(), "out"))
}

/// Total Hilbert-space dimension.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_state_dim(s: *const BlState, out: *mut usize) -> BlStatus {
    guard(|| write(out, state(s)?.dim(), "out"))
}

/// Real part of the trace.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_state_trace(s: *const BlState, out: *mut f64) -> BlStatus {
    guard(|| write(out, state(s)?.trace(), "out"))
}

/// `⟨a†a⟩` on `mode`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_state_mean_photon_number(s: *const BlState, mode: usize, out: *mut f64) -> BlStatus {
    guard(|| write(out, fock::mean_photon_number(state(s)?, mode)?, "out"))
}

/// Copies the density matrix, column-major, as interleaved `(re, im)`
/// pairs into `buf`, which must hold `2·dim²` doubles.
///
/// # Safety
/// `s` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bl_state_copy_matrix(s: *const BlState, buf: *mut f64, len: usize) -> BlStatus {
    guard(|| {
        let rho = state(s)?;
        let need = 2 * rho.dim() * rho.dim();
        if len < need {
            return Err(Fail(BlStatus::InvalidParameter, format!("buffer holds {len} doubles, need {need}")));
        }
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let dst = slice::from_raw_parts_mut(buf, need);
        for (pair, z) in dst.chunks_exact_mut(2).zip(rho.data().iter()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

// ---- channels and distances ----

/// Loss with one transmittance per mode.
///
/// # Safety
/// `s` must be a live handle, `kappa` must point to `n` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_apply_loss(
    s: *const BlState,
    kappa: *const f64,
    n: usize,
    out: *mut *mut BlState,
) -> BlStatus {
    guard(|| emit_state(out, channels::apply_loss(state(s)?, reals(kappa, n, "kappa")?)?))
}

/// Additive Gaussian noise with one variance per mode.
///
/// # Safety
/// `s` must be a live handle, `noise` must point to `n` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_apply_agn(
    s: *const BlState,
    noise: *const f64,
    n: usize,
    out: *mut *mut BlState,
) -> BlStatus {
    guard(|| emit_state(out, channels::apply_agn(state(s)?, reals(noise, n, "noise")?)?))
}

/// `‖a − b‖₁` (range `[0, 2]`).
///
/// # Safety
/// `a`, `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_trace_distance(a: *const BlState, b: *const BlState, out: *mut f64) -> BlStatus {
    guard(|| write(out, bounds::trace_distance(state(a)?, state(b)?)?, "out"))
}

/// `‖L_κ G_N ρ − G_{κN} L_κ ρ‖₁`.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_commutation_defect(
    s: *const BlState,
    kappa: f64,
    noise: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| write(out, channels::commutation_defect(state(s)?, kappa, noise)?, "out"))
}

// ---- bounds ----

/// `2√(N/(N+1))`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_bound_theorem2(noise: f64, out: *mut f64) -> BlStatus {
    guard(|| write(out, bounds::bound_theorem2(noise)?, "out"))
}

/// `2(N₁ − N₂)/N₂` for `N₁ ≥ N₂`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_bound_theorem3(n1: f64, n2: f64, out: *mut f64) -> BlStatus {
    guard(|| write(out, bounds::bound_theorem3(n1, n2)?, "out"))
}

/// Two-mode bound; `na` and `nb` point to two doubles each.
///
/// # Safety
/// `na`, `nb` must point to two doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_bound_theorem4(
    na: *const f64,
    nb: *const f64,
    reading: BlReading,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let a = reals(na, 2, "na")?;
        let b = reals(nb, 2, "nb")?;
        let reading = match reading {
            BlReading::PerMode => Theorem4Reading::PerMode,
            BlReading::Printed => Theorem4Reading::Printed,
        };
        write(out, bounds::bound_theorem4([a[0], a[1]], [b[0], b[1]], reading)?, "out")
    })
}

/// Multimode bound; `vacuous` is set to 1 when the value exceeds 2.
///
/// # Safety
/// `noise` must point to `n` doubles; `value` and `vacuous` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_bound_theorem5(
    noise: *const f64,
    n: usize,
    value: *mut f64,
    vacuous: *mut i32,
) -> BlStatus {
    guard(|| {
        let b = bounds::bound_theorem5(reals(noise, n, "noise")?)?;
        write(value, b.value, "value")?;
        write(vacuous, i32::from(b.vacuous), "vacuous")
    })
}

// ---- Gaussian states ----

/// Two-mode squeezed vacuum covariance with `ns` mean signal photons.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_gaussian_qidc(ns: f64, out: *mut *mut BlGaussian) -> BlStatus {
    guard(|| emit_gauss(out, gaussian::gaussian_qidc(ns)?))
}

/// Single-mode squeezed vacuum.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_gaussian_squeezed(r: f64, out: *mut *mut BlGaussian) -> BlStatus {
    guard(|| emit_gauss(out, GaussianState::squeezed_vacuum(r)?))
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_gaussian_free(g: *mut BlGaussian) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle, `kappa` must point to `n` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_gaussian_apply_loss(
    g: *const BlGaussian,
    kappa: *const f64,
    n: usize,
    out: *mut *mut BlGaussian,
) -> BlStatus {
    guard(|| emit_gauss(out, gaussian::gaussian_apply_loss(gauss(g)?, reals(kappa, n, "kappa")?)?))
}

/// # Safety
/// `g` must be a live handle, `noise` must point to `n` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_gaussian_apply_agn(
    g: *const BlGaussian,
    noise: *const f64,
    n: usize,
    out: *mut *mut BlGaussian,
) -> BlStatus {
    guard(|| emit_gauss(out, gaussian::gaussian_apply_agn(gauss(g)?, reals(noise, n, "noise")?)?))
}

/// Classicality certificate: `is_classical` is 0 or 1, `min_eigenvalue` is
/// the smallest eigenvalue of `cov − I/2`.
///
/// # Safety
/// `g` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_gaussian_certificate(
    g: *const BlGaussian,
    is_classical: *mut i32,
    min_eigenvalue: *mut f64,
) -> BlStatus {
    guard(|| {
        let c = gaussian::classicality_certificate(gauss(g)?);
        write(is_classical, i32::from(c.is_classical), "is_classical")?;
        write(min_eigenvalue, c.min_eigenvalue, "min_eigenvalue")
    })
}

/// Smallest noise scale along `direction` that makes `g` classical.
///
/// # Safety
/// `g` must be a live handle, `direction` must point to `n` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_classicality_threshold(
    g: *const BlGaussian,
    direction: *const f64,
    n: usize,
    tol: f64,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        let t = gaussian::classicality_threshold(gauss(g)?, reals(direction, n, "direction")?, tol)?;
        write(out, t, "out")
    })
}

// ---- power ----

/// `P = ħω₀ N_S W` at vacuum wavelength `wavelength` (m). Pass NaN for an
/// absent `nmax` or `pmax`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_power_calc(
    ns: f64,
    wavelength: f64,
    bandwidth: f64,
    nmax: f64,
    pmax: f64,
    out: *mut BlPowerResult,
) -> BlStatus {
    guard(|| {
        let opt = |v: f64| (!v.is_nan()).then_some(v);
        let r = power::power_calc(ns, Carrier::Wavelength(wavelength), bandwidth, opt(nmax), opt(pmax))?;
        let res = BlPowerResult {
            ns: r.ns,
            bandwidth: r.bandwidth,
            omega0: r.omega0,
            power_watts: r.power_watts,
            power_dbm: r.power_dbm,
            photons_per_second: r.photons_per_second,
            constraint_met: r.constraint_met.map_or(-1, i32::from),
        };
        write(out, res, "out")
    })
}
