//! C ABI for the eit-qnlse pipeline. Handles are opaque pointers owned by
//! this library; every fallible call returns an [`EitqStatus`] and writes
//! results through out-pointers. The most recent error message per thread is
//! retrievable with [`eitq_last_error_message`]. All functions catch panics.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use eit_qnlse::reduction::{self, CalibrationTargets, NlseCoefficients};
use eit_qnlse::soliton::SolitonParams;
use eit_qnlse::twophoton;
use eit_qnlse::{dispersion, Error, ErrorKind, MediumParams};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EitqStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Invalid input: bad parameter values, malformed config, unmet precondition.
    ParameterError = 2,
    /// Numeric failure: pole, singular system, regime violation, non-convergence.
    NumericError = 3,
    /// Filesystem failure.
    IoError = 4,
    /// A string argument was not valid UTF-8.
    Utf8Error = 5,
    /// Internal panic (a bug; details in the last error message).
    InternalPanic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|c| *c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn status_of(err: &Error) -> EitqStatus {
    match err.kind() {
        ErrorKind::Parameter => EitqStatus::ParameterError,
        ErrorKind::Numeric => EitqStatus::NumericError,
        ErrorKind::Io => EitqStatus::IoError,
    }
}

fn guard(f: impl FnOnce() -> EitqStatus) -> EitqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            EitqStatus::InternalPanic
        }
    }
}

/// Opaque handle around a validated parameter set.
pub struct EitqParams {
    inner: MediumParams,
}

/// Envelope-equation coefficient set (plain data, returned by value).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EitqNlseCoefficients {
    pub k0_re: f64,
    pub k0_im: f64,
    /// Group velocity, cm/s.
    pub vg: f64,
    /// Re K2, cm^-1 s^2.
    pub k2: f64,
    /// Re W, cm^-1.
    pub w: f64,
    /// 1/(2 k_p), cm.
    pub diffraction: f64,
}

/// Derived soliton quantities.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EitqSolitonDerived {
    pub b0: f64,
    /// Width unit, cm.
    pub l0: f64,
    /// Soliton velocity, cm/s.
    pub vs: f64,
    /// Group velocity, cm/s.
    pub vg: f64,
}

/// Two-photon bound-state summary.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EitqBoundState {
    pub m0: f64,
    pub a0: f64,
    pub zeta0: f64,
    pub e_com: f64,
    pub e_binding: f64,
    pub e_total: f64,
}

/// Version string of the underlying library (static, do not free).
#[no_mangle]
pub extern "C" fn eitq_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Copy the last error message on this thread into `buf` (truncated to
/// `len` − 1 bytes, always NUL-terminated). Returns the full message length.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn eitq_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Fresh handle with the Rb-87 preset (couplings unset until calibrated).
/// Free with [`eitq_params_free`].
#[no_mangle]
pub extern "C" fn eitq_params_rb87() -> *mut EitqParams {
    Box::into_raw(Box::new(EitqParams {
        inner: MediumParams::rb87_preset(),
    }))
}

/// Load a config file into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eitq_params_load(
    path: *const c_char,
    out: *mut *mut EitqParams,
) -> EitqStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            set_error("null argument");
            return EitqStatus::NullArgument;
        }
        let path_str = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("path is not valid UTF-8");
                return EitqStatus::Utf8Error;
            }
        };
        match MediumParams::load_config(Path::new(path_str)) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(EitqParams { inner: p }));
                EitqStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Save the handle's parameters to a config file.
///
/// # Safety
/// `params` must be a live handle from this library; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn eitq_params_save(
    params: *const EitqParams,
    path: *const c_char,
) -> EitqStatus {
    guard(|| {
        if params.is_null() || path.is_null() {
            set_error("null argument");
            return EitqStatus::NullArgument;
        }
        let path_str = match CStr::from_ptr(path).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("path is not valid UTF-8");
                return EitqStatus::Utf8Error;
            }
        };
        match (*params).inner.save_config(Path::new(path_str)) {
            Ok(()) => EitqStatus::Ok,
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Destroy a handle. Null is a no-op.
///
/// # Safety
/// `params` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn eitq_params_free(params: *mut EitqParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Calibrate the handle in place against reference (K2, W) values.
///
/// # Safety
/// `params` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn eitq_calibrate(
    params: *mut EitqParams,
    k2_target: f64,
    w_target: f64,
) -> EitqStatus {
    guard(|| {
        if params.is_null() {
            set_error("null argument");
            return EitqStatus::NullArgument;
        }
        match reduction::calibrate(
            &(*params).inner,
            CalibrationTargets {
                k2: k2_target,
                w: w_target,
            },
        ) {
            Ok((cal, _report)) => {
                (*params).inner = cal;
                EitqStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Evaluate K(omega); writes real and imaginary parts in cm^-1.
///
/// # Safety
/// `params` must be a live handle; `k_re`, `k_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn eitq_dispersion_at(
    params: *const EitqParams,
    omega: f64,
    k_re: *mut f64,
    k_im: *mut f64,
) -> EitqStatus {
    guard(|| {
        if params.is_null() || k_re.is_null() || k_im.is_null() {
            set_error("null argument");
            return EitqStatus::NullArgument;
        }
        match dispersion::linear_dispersion(&(*params).inner, omega) {
            Ok(k) => {
                *k_re = k.re;
                *k_im = k.im;
                EitqStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

fn coefficients_of(p: &MediumParams) -> Result<NlseCoefficients, Error> {
    NlseCoefficients::assemble(p)
}

/// Full envelope-equation coefficient set (requires a calibrated handle).
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eitq_nlse_coefficients(
    params: *const EitqParams,
    out: *mut EitqNlseCoefficients,
) -> EitqStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            set_error("null argument");
            return EitqStatus::NullArgument;
        }
        match coefficients_of(&(*params).inner) {
            Ok(c) => {
                *out = EitqNlseCoefficients {
                    k0_re: c.k0.re,
                    k0_im: c.k0.im,
                    vg: c.vg,
                    k2: c.k2.re,
                    w: c.w.re,
                    diffraction: c.diffraction,
                };
                EitqStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Derived bright-soliton quantities for (eta0, xi0, t0).
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eitq_soliton_derived(
    params: *const EitqParams,
    eta0: f64,
    xi0: f64,
    t0: f64,
    out: *mut EitqSolitonDerived,
) -> EitqStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            set_error("null argument");
            return EitqStatus::NullArgument;
        }
        let coeffs = match coefficients_of(&(*params).inner) {
            Ok(c) => c,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match SolitonParams::new(&coeffs, eta0, xi0, t0, 0.0, 0.0) {
            Ok(sp) => {
                *out = EitqSolitonDerived {
                    b0: sp.b0,
                    l0: sp.l0,
                    vs: sp.vs,
                    vg: sp.vg,
                };
                EitqStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Two-photon bound-state summary for COM momentum `p0` with the handle's
/// cell length.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eitq_bound_state(
    params: *const EitqParams,
    p0: f64,
    out: *mut EitqBoundState,
) -> EitqStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            set_error("null argument");
            return EitqStatus::NullArgument;
        }
        let p = &(*params).inner;
        let coeffs = match coefficients_of(p) {
            Ok(c) => c,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let em = match reduction::effective_masses(&coeffs, p.cell_length) {
            Ok(em) => em,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        match twophoton::total_energy(em.m0, em.a0, p0) {
            Ok(energy) => {
                *out = EitqBoundState {
                    m0: em.m0,
                    a0: em.a0,
                    zeta0: em.zeta0,
                    e_com: energy.com,
                    e_binding: energy.binding,
                    e_total: energy.total,
                };
                EitqStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}
