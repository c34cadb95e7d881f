//! C ABI for the Floquet-simulation library.
//!
//! Conventions:
//! * Hamiltonians are opaque handles created by `fqs_hamiltonian_*` and
//!   released with `fqs_hamiltonian_free`.
//! * Complex vectors and matrices cross the boundary as row-major
//!   interleaved (re, im) double arrays; a d-dimensional state is 2d
//!   doubles, a d x d matrix is 2 d^2 doubles.
//! * Every fallible call returns an `FqsStatus`; on failure a thread-local
//!   message is readable through `fqs_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ndarray::Array1;
use num_complex::Complex64;

use fqs::amplification::{run_adiabatic, run_longtime};
use fqs::bounds;
use fqs::error::FqsError;
use fqs::hamiltonian::{energy_scales, DecayProfile, FourierHamiltonian};
use fqs::linalg::{CMat, CVec};
use fqs::presets::{self, HubbardParams};
use fqs::propagator::exact_evolve;
use fqs::sambe::choose_l_max;

/// Status codes mirrored on the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqsStatus {
    Ok = 0,
    ErrValidation = 2,
    ErrNumerical = 3,
    ErrNullArgument = 4,
    ErrPanic = 5,
}

/// Opaque driven-Hamiltonian handle.
pub struct FqsHamiltonian {
    inner: FourierHamiltonian,
}

/// Diagnostics of a pipeline run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FqsRunDiagnostics {
    pub l_max: u32,
    pub success_probability: f64,
    /// Joint-space deviation from the oracle-evolved target state.
    pub deviation: f64,
    /// Overlap |<psi_oracle|psi_out>| after projection.
    pub fidelity: f64,
    pub wall_time_s: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &FqsError) -> FqsStatus {
    match err.exit_code() {
        3 => FqsStatus::ErrNumerical,
        _ => FqsStatus::ErrValidation,
    }
}

fn guarded<F: FnOnce() -> FqsStatus>(f: F) -> FqsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            FqsStatus::ErrPanic
        }
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fqs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn decode_state(data: *const f64, dim: usize) -> CVec {
    let slice = std::slice::from_raw_parts(data, 2 * dim);
    Array1::from(
        (0..dim)
            .map(|i| Complex64::new(slice[2 * i], slice[2 * i + 1]))
            .collect::<Vec<_>>(),
    )
}

unsafe fn encode_state(v: &CVec, out: *mut f64) {
    let slice = std::slice::from_raw_parts_mut(out, 2 * v.len());
    for (i, z) in v.iter().enumerate() {
        slice[2 * i] = z.re;
        slice[2 * i + 1] = z.im;
    }
}

unsafe fn encode_mat(m: &CMat, out: *mut f64) {
    let slice = std::slice::from_raw_parts_mut(out, 2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let k = 2 * (i * m.ncols() + j);
            slice[k] = m[[i, j]].re;
            slice[k + 1] = m[[i, j]].im;
        }
    }
}

fn boxed(h: FourierHamiltonian) -> *mut FqsHamiltonian {
    Box::into_raw(Box::new(FqsHamiltonian { inner: h }))
}

/// Driven qubit `H(t) = (delta/2) Z + v cos(omega t) X`. Returns null on
/// invalid parameters.
#[no_mangle]
pub extern "C" fn fqs_hamiltonian_driven_qubit(
    delta: f64,
    v: f64,
    omega: f64,
) -> *mut FqsHamiltonian {
    match presets::driven_qubit(delta, v, omega) {
        Ok(model) => boxed(model.hamiltonian),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Two-site Fermi-Hubbard chain under monochromatic light (16-dimensional).
#[no_mangle]
pub extern "C" fn fqs_hamiltonian_hubbard2(
    eps_k0: f64,
    eps_k1: f64,
    u: f64,
    v_x0: f64,
    v_x1: f64,
    big_omega: f64,
) -> *mut FqsHamiltonian {
    let params = HubbardParams {
        eps_k: [eps_k0, eps_k1],
        u,
        v_x: [v_x0, v_x1],
        big_omega,
    };
    match presets::hubbard2(&params) {
        Ok(model) => boxed(model.hamiltonian),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Build a Hamiltonian from `n_modes` Fourier components with a finite
/// profile. `modes` holds the mode indices; `components` holds the matching
/// d x d matrices, row-major interleaved, concatenated. Missing Hermitian
/// partners are completed automatically.
///
/// # Safety
/// `modes` must point to `n_modes` ints and `components` to
/// `n_modes * 2 * dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn fqs_hamiltonian_from_components(
    dim: usize,
    omega: f64,
    modes: *const i32,
    components: *const f64,
    n_modes: usize,
    m_max: u32,
) -> *mut FqsHamiltonian {
    if modes.is_null() || components.is_null() || dim == 0 || n_modes == 0 {
        set_error("null or empty input");
        return ptr::null_mut();
    }
    let mode_slice = std::slice::from_raw_parts(modes, n_modes);
    let data = std::slice::from_raw_parts(components, n_modes * 2 * dim * dim);
    let mut comps = std::collections::BTreeMap::new();
    for (k, &m) in mode_slice.iter().enumerate() {
        let mut mat = CMat::zeros((dim, dim));
        let base = k * 2 * dim * dim;
        for i in 0..dim {
            for j in 0..dim {
                let idx = base + 2 * (i * dim + j);
                mat[[i, j]] = Complex64::new(data[idx], data[idx + 1]);
            }
        }
        comps.insert(m, mat);
    }
    match FourierHamiltonian::from_components(
        omega,
        comps,
        DecayProfile::Finite {
            m_max: m_max as usize,
        },
    ) {
        Ok(h) => boxed(h),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Release a Hamiltonian handle (null is a no-op).
///
/// # Safety
/// `h` must have come from an `fqs_hamiltonian_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn fqs_hamiltonian_free(h: *mut FqsHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// System dimension d of a handle (0 for null).
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fqs_hamiltonian_dim(h: *const FqsHamiltonian) -> usize {
    if h.is_null() {
        return 0;
    }
    (*h).inner.dim()
}

/// Drive period `T = 2 pi / omega` (0 for null).
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn fqs_hamiltonian_period(h: *const FqsHamiltonian) -> f64 {
    if h.is_null() {
        return 0.0;
    }
    (*h).inner.period()
}

/// Evaluate `H(t)` into a caller buffer of 2 d^2 doubles.
///
/// # Safety
/// `out` must hold `2 dim^2` doubles.
#[no_mangle]
pub unsafe extern "C" fn fqs_evaluate_at(
    h: *const FqsHamiltonian,
    t: f64,
    out: *mut f64,
) -> FqsStatus {
    if h.is_null() || out.is_null() {
        set_error("null argument");
        return FqsStatus::ErrNullArgument;
    }
    guarded(|| {
        let m = (*h).inner.evaluate_at(t);
        encode_mat(&m, out);
        FqsStatus::Ok
    })
}

/// Energy scales: `alpha = sum ||H_m||`, the grid estimate of
/// `sup_t ||H(t) - H_0||`, and the certified upper bound `sum_{m!=0} ||H_m||`.
///
/// # Safety
/// Output pointers must be valid; `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fqs_energy_scales(
    h: *const FqsHamiltonian,
    n_grid: u32,
    alpha_out: *mut f64,
    gamma_out: *mut f64,
    gamma_upper_out: *mut f64,
) -> FqsStatus {
    if h.is_null() || alpha_out.is_null() || gamma_out.is_null() || gamma_upper_out.is_null() {
        set_error("null argument");
        return FqsStatus::ErrNullArgument;
    }
    guarded(|| match energy_scales(&(*h).inner, None, n_grid as usize) {
        Ok(es) => {
            *alpha_out = es.alpha;
            *gamma_out = es.gamma;
            *gamma_upper_out = es.gamma_upper;
            FqsStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    })
}

/// Truncation order for a finite profile (the selection formula of the
/// adiabatic pipeline).
///
/// # Safety
/// `l_max_out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fqs_choose_l_max(
    gamma: f64,
    t: f64,
    m_max: u32,
    epsilon: f64,
    l_max_out: *mut u32,
) -> FqsStatus {
    if l_max_out.is_null() {
        set_error("null argument");
        return FqsStatus::ErrNullArgument;
    }
    match choose_l_max(gamma, t, m_max as usize, epsilon) {
        Ok(order) => {
            *l_max_out = order.l_max as u32;
            FqsStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Truncation bound `20 m (gt)^ceil(l/m) / ceil(l/m)!`; the premise flag
/// (`l_max >= 2 m gamma t`) is written when the pointer is non-null.
///
/// # Safety
/// `premise_ok_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn fqs_truncation_bound(
    l_max: u32,
    gamma: f64,
    t: f64,
    m_max: u32,
    premise_ok_out: *mut bool,
) -> f64 {
    let b = bounds::truncation_bound(l_max as usize, gamma, t, m_max as usize);
    if !premise_ok_out.is_null() {
        *premise_ok_out = b.premise_ok;
    }
    b.value
}

/// Transition-amplitude bound for finitely many modes.
///
/// # Safety
/// `premise_ok_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn fqs_lr_bound(
    dl: u64,
    gamma: f64,
    t: f64,
    m_max: u32,
    premise_ok_out: *mut bool,
) -> f64 {
    let b = bounds::lr_bound(dl, gamma, t, m_max as usize);
    if !premise_ok_out.is_null() {
        *premise_ok_out = b.premise_ok;
    }
    b.value
}

/// Smallest polynomial degree whose Jacobi-Anger truncation error is below
/// epsilon, with the certified tail value.
///
/// # Safety
/// `q_out` must be valid; `tail_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn fqs_query_degree(
    tau: f64,
    epsilon: f64,
    q_out: *mut u32,
    tail_out: *mut f64,
) -> FqsStatus {
    if q_out.is_null() {
        set_error("null argument");
        return FqsStatus::ErrNullArgument;
    }
    match fqs::blockenc::query_degree(tau, epsilon) {
        Ok(qd) => {
            *q_out = qd.q as u32;
            if !tail_out.is_null() {
                *tail_out = qd.tail;
            }
            FqsStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Reference time-ordered evolution `psi(t)` by adaptive integration.
///
/// # Safety
/// `psi0` and `psi_out` must hold `2 dim` doubles each.
#[no_mangle]
pub unsafe extern "C" fn fqs_exact_evolve(
    h: *const FqsHamiltonian,
    psi0: *const f64,
    t: f64,
    tol: f64,
    psi_out: *mut f64,
) -> FqsStatus {
    if h.is_null() || psi0.is_null() || psi_out.is_null() {
        set_error("null argument");
        return FqsStatus::ErrNullArgument;
    }
    guarded(|| {
        let dim = (*h).inner.dim();
        let state = decode_state(psi0, dim);
        match exact_evolve(&(*h).inner, &state, t, tol) {
            Ok(out) => {
                encode_state(&out.vector, psi_out);
                FqsStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

unsafe fn run_pipeline(
    h: *const FqsHamiltonian,
    psi0: *const f64,
    t: f64,
    epsilon: f64,
    psi_out: *mut f64,
    diag_out: *mut FqsRunDiagnostics,
    longtime: bool,
) -> FqsStatus {
    if h.is_null() || psi0.is_null() || psi_out.is_null() {
        set_error("null argument");
        return FqsStatus::ErrNullArgument;
    }
    guarded(|| {
        let dim = (*h).inner.dim();
        let state = decode_state(psi0, dim);
        let result = if longtime {
            run_longtime(&(*h).inner, &state, t, epsilon)
        } else {
            run_adiabatic(&(*h).inner, &state, t, epsilon)
        };
        match result {
            Ok((out, diag)) => {
                encode_state(&out.vector, psi_out);
                if !diag_out.is_null() {
                    *diag_out = FqsRunDiagnostics {
                        l_max: diag.l_max as u32,
                        success_probability: diag.success_probability,
                        deviation: diag.deviation,
                        fidelity: diag.fidelity,
                        wall_time_s: diag.wall_time_s,
                    };
                }
                FqsStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Adiabatic-like pipeline (two-stage amplification with the refined
/// effective Hamiltonian); writes the projected state and diagnostics.
///
/// # Safety
/// `psi0`/`psi_out` must hold `2 dim` doubles; `diag_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn fqs_run_adiabatic(
    h: *const FqsHamiltonian,
    psi0: *const f64,
    t: f64,
    epsilon: f64,
    psi_out: *mut f64,
    diag_out: *mut FqsRunDiagnostics,
) -> FqsStatus {
    run_pipeline(h, psi0, t, epsilon, psi_out, diag_out, false)
}

/// Long-time pipeline (`t = (n + delta) T` splitting).
///
/// # Safety
/// `psi0`/`psi_out` must hold `2 dim` doubles; `diag_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn fqs_run_longtime(
    h: *const FqsHamiltonian,
    psi0: *const f64,
    t: f64,
    epsilon: f64,
    psi_out: *mut f64,
    diag_out: *mut FqsRunDiagnostics,
) -> FqsStatus {
    run_pipeline(h, psi0, t, epsilon, psi_out, diag_out, true)
}
