//! C ABI for the bound-state counting laboratory: opaque handles for
//! grids and potentials, status codes, and a thread-local last-error
//! message. The header `include/fracbound.h` is generated at build time.
//!
//! Every constructor has a matching `_free`; out-parameters are written
//! only on `FB_STATUS_OK`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::sync::Arc;

use fracbound::birman_schwinger as bs;
use fracbound::direct_solver;
use fracbound::norms;
use fracbound::numgrid::SpaceGrid;
use fracbound::potentials::{Potential, Shape};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ComputeError = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: FbStatus, msg: impl Into<String>) -> FbStatus {
    set_error(msg.into());
    status
}

/// Message of the most recent error on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Opaque uniform grid over `[-L, L)^d`.
pub struct FbGrid {
    inner: Arc<SpaceGrid>,
}

/// Opaque nonnegative potential sampled on a grid.
pub struct FbPotential {
    inner: Potential,
}

/// Create a grid; `d` is 1 or 2, `n` the (even) number of points per axis.
///
/// # Safety
/// `out` must be a valid pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fb_grid_new(d: u32, l: f64, n: u32, out: *mut *mut FbGrid) -> FbStatus {
    if out.is_null() {
        return fail(FbStatus::NullPointer, "out pointer is null");
    }
    match SpaceGrid::new(d as usize, l, n as usize) {
        Ok(g) => {
            unsafe { *out = Box::into_raw(Box::new(FbGrid { inner: Arc::new(g) })) };
            FbStatus::Ok
        }
        Err(e) => fail(FbStatus::InvalidArgument, e.to_string()),
    }
}

/// # Safety
/// `grid` must be a pointer returned by `fb_grid_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fb_grid_free(grid: *mut FbGrid) {
    if !grid.is_null() {
        drop(unsafe { Box::from_raw(grid) });
    }
}

unsafe fn build_potential(
    grid: *const FbGrid,
    shape: Shape,
    out: *mut *mut FbPotential,
) -> FbStatus {
    if grid.is_null() || out.is_null() {
        return fail(FbStatus::NullPointer, "grid or out pointer is null");
    }
    let g = unsafe { &*grid };
    match Potential::build(shape, g.inner.clone()) {
        Ok(p) => {
            unsafe { *out = Box::into_raw(Box::new(FbPotential { inner: p })) };
            FbStatus::Ok
        }
        Err(e) => fail(FbStatus::InvalidArgument, e.to_string()),
    }
}

/// Square well `v0 * 1_{|x| <= a}`.
///
/// # Safety
/// `grid` must be a live grid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_potential_well(
    grid: *const FbGrid,
    v0: f64,
    a: f64,
    out: *mut *mut FbPotential,
) -> FbStatus {
    unsafe { build_potential(grid, Shape::Well { v0, a }, out) }
}

/// Gaussian `v0 * exp(-|x|^2 / w^2)`.
///
/// # Safety
/// `grid` must be a live grid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_potential_gaussian(
    grid: *const FbGrid,
    v0: f64,
    w: f64,
    out: *mut *mut FbPotential,
) -> FbStatus {
    unsafe { build_potential(grid, Shape::Gaussian { v0, w }, out) }
}

/// Smooth compactly supported bump of amplitude `v0` and radius `a`.
///
/// # Safety
/// `grid` must be a live grid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_potential_bump(
    grid: *const FbGrid,
    v0: f64,
    a: f64,
    out: *mut *mut FbPotential,
) -> FbStatus {
    unsafe { build_potential(grid, Shape::Bump { v0, a }, out) }
}

/// Power tail `v0 * (core^2 + |x|^2)^{-beta/2}`.
///
/// # Safety
/// `grid` must be a live grid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_potential_power(
    grid: *const FbGrid,
    v0: f64,
    beta: f64,
    core: f64,
    out: *mut *mut FbPotential,
) -> FbStatus {
    unsafe { build_potential(grid, Shape::Power { v0, beta, core }, out) }
}

/// Load samples written in the plain-text format (`# d L N` header, one
/// value per line).
///
/// # Safety
/// `grid` must be a live handle, `path` a NUL-terminated string, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn fb_potential_load(
    grid: *const FbGrid,
    path: *const c_char,
    out: *mut *mut FbPotential,
) -> FbStatus {
    if grid.is_null() || path.is_null() || out.is_null() {
        return fail(FbStatus::NullPointer, "null argument");
    }
    let g = unsafe { &*grid };
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => s,
        Err(_) => return fail(FbStatus::InvalidArgument, "path is not valid UTF-8"),
    };
    match Potential::load_samples(std::path::Path::new(path), g.inner.clone()) {
        Ok(p) => {
            unsafe { *out = Box::into_raw(Box::new(FbPotential { inner: p })) };
            FbStatus::Ok
        }
        Err(e) => fail(FbStatus::InvalidArgument, e.to_string()),
    }
}

/// Multiply a potential by `lambda >= 0`, producing a new handle.
///
/// # Safety
/// `pot` must be a live potential handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_potential_scale(
    pot: *const FbPotential,
    lambda: f64,
    out: *mut *mut FbPotential,
) -> FbStatus {
    if pot.is_null() || out.is_null() {
        return fail(FbStatus::NullPointer, "null argument");
    }
    let p = unsafe { &*pot };
    match p.inner.scale_coupling(lambda) {
        Ok(q) => {
            unsafe { *out = Box::into_raw(Box::new(FbPotential { inner: q })) };
            FbStatus::Ok
        }
        Err(e) => fail(FbStatus::InvalidArgument, e.to_string()),
    }
}

/// # Safety
/// `pot` must be a pointer returned by a potential constructor.
#[no_mangle]
pub unsafe extern "C" fn fb_potential_free(pot: *mut FbPotential) {
    if !pot.is_null() {
        drop(unsafe { Box::from_raw(pot) });
    }
}

/// Count eigenvalues of `(-Delta)^s - V` below `-tau` by the direct
/// Galerkin solve; `tau <= 0` selects the default threshold.
///
/// # Safety
/// `pot` must be a live handle; `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_count_negative(
    pot: *const FbPotential,
    s: f64,
    tau: f64,
    out_count: *mut u64,
) -> FbStatus {
    if pot.is_null() || out_count.is_null() {
        return fail(FbStatus::NullPointer, "null argument");
    }
    let p = unsafe { &*pot };
    let h = match direct_solver::assemble_direct(p.inner.grid(), &p.inner, s) {
        Ok(h) => h,
        Err(e) => return fail(FbStatus::InvalidArgument, e.to_string()),
    };
    let tau = if tau > 0.0 { tau } else { h.default_threshold() };
    let nc = direct_solver::count_negative(&h, tau);
    unsafe { *out_count = nc.count as u64 };
    FbStatus::Ok
}

/// Birman-Schwinger plateau count along the default energy sweep.
/// `out_converged` reports whether the sweep tail stabilized.
///
/// # Safety
/// `pot` must be a live handle; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn fb_bs_plateau(
    pot: *const FbPotential,
    s: f64,
    out_count: *mut u64,
    out_converged: *mut bool,
) -> FbStatus {
    if pot.is_null() || out_count.is_null() || out_converged.is_null() {
        return fail(FbStatus::NullPointer, "null argument");
    }
    let p = unsafe { &*pot };
    if p.inner.is_zero() {
        unsafe {
            *out_count = 0;
            *out_converged = true;
        }
        return FbStatus::Ok;
    }
    let energies = bs::default_energy_sweep();
    match bs::count_ge_one_sweep(&p.inner, s, &energies, &bs::BsOptions::default()) {
        Ok(sweep) => {
            unsafe {
                *out_count = sweep.plateau.unwrap_or(*sweep.counts.last().unwrap()) as u64;
                *out_converged = sweep.plateau.is_some();
            }
            FbStatus::Ok
        }
        Err(e) => fail(FbStatus::ComputeError, e.to_string()),
    }
}

/// Projected low-frequency trace at energy `e <= 0`.
///
/// # Safety
/// `pot` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_trace_low_projected(
    pot: *const FbPotential,
    s: f64,
    e: f64,
    out: *mut f64,
) -> FbStatus {
    if pot.is_null() || out.is_null() {
        return fail(FbStatus::NullPointer, "null argument");
    }
    if e > 0.0 {
        return fail(FbStatus::InvalidArgument, "energy must be <= 0");
    }
    let p = unsafe { &*pot };
    match bs::trace_low_projected(&p.inner, s, e, &bs::BsOptions::default()) {
        Ok(rep) => {
            unsafe { *out = rep.quadrature };
            FbStatus::Ok
        }
        Err(err) => fail(FbStatus::ComputeError, err.to_string()),
    }
}

/// Weak `L^{1,infty}` quasinorm of the high-frequency Birman-Schwinger
/// part at energy `e <= 0`. At `s = d/2` the value is Nyquist-truncated
/// and `ximax_acknowledged` must be set.
///
/// # Safety
/// `pot` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_weak_norm_high(
    pot: *const FbPotential,
    s: f64,
    e: f64,
    ximax_acknowledged: bool,
    out: *mut f64,
) -> FbStatus {
    if pot.is_null() || out.is_null() {
        return fail(FbStatus::NullPointer, "null argument");
    }
    if e > 0.0 {
        return fail(FbStatus::InvalidArgument, "energy must be <= 0");
    }
    let p = unsafe { &*pot };
    let opts = bs::BsOptions { ximax_acknowledged, ..bs::BsOptions::default() };
    match bs::weak_norm_high(&p.inner, s, e, &opts) {
        Ok(rep) => {
            unsafe { *out = rep.value };
            FbStatus::Ok
        }
        Err(err) => fail(FbStatus::ComputeError, err.to_string()),
    }
}

/// The critical-case oscillator-log norm of `v` at truncation order `m`.
///
/// # Safety
/// `pot` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fb_hermite_log_norm(
    pot: *const FbPotential,
    eps: f64,
    m: u32,
    out: *mut f64,
) -> FbStatus {
    if pot.is_null() || out.is_null() {
        return fail(FbStatus::NullPointer, "null argument");
    }
    if !(eps > 0.0) || m < 1 {
        return fail(FbStatus::InvalidArgument, "need eps > 0 and m >= 1");
    }
    let p = unsafe { &*pot };
    match norms::hermite_log_norm(&p.inner, eps, m as usize) {
        Ok(v) => {
            unsafe { *out = v };
            FbStatus::Ok
        }
        Err(err) => fail(FbStatus::ComputeError, err.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_count_through_the_abi() {
        unsafe {
            let mut grid: *mut FbGrid = std::ptr::null_mut();
            assert_eq!(fb_grid_new(1, 40.0, 512, &mut grid), FbStatus::Ok);
            let mut pot: *mut FbPotential = std::ptr::null_mut();
            assert_eq!(fb_potential_well(grid, 10.0, 1.0, &mut pot), FbStatus::Ok);

            let mut count = 0u64;
            assert_eq!(fb_count_negative(pot, 1.0, -1.0, &mut count), FbStatus::Ok);
            assert_eq!(count, 3);

            let mut plateau = 0u64;
            let mut conv = false;
            assert_eq!(fb_bs_plateau(pot, 1.0, &mut plateau, &mut conv), FbStatus::Ok);
            assert_eq!(plateau, 3);
            assert!(conv);

            let mut scaled: *mut FbPotential = std::ptr::null_mut();
            assert_eq!(fb_potential_scale(pot, 2.0, &mut scaled), FbStatus::Ok);
            let mut c2 = 0u64;
            assert_eq!(fb_count_negative(scaled, 1.0, -1.0, &mut c2), FbStatus::Ok);
            assert!(c2 >= count);

            fb_potential_free(scaled);
            fb_potential_free(pot);
            fb_grid_free(grid);
        }
    }

    #[test]
    fn errors_set_message_and_status() {
        unsafe {
            let mut grid: *mut FbGrid = std::ptr::null_mut();
            assert_eq!(fb_grid_new(3, 10.0, 64, &mut grid), FbStatus::InvalidArgument);
            let msg = fb_last_error_message();
            assert!(!msg.is_null());
            let text = CStr::from_ptr(msg).to_str().unwrap();
            assert!(text.contains("dimension"));

            assert_eq!(fb_grid_new(1, 10.0, 64, &mut grid), FbStatus::Ok);
            let mut pot: *mut FbPotential = std::ptr::null_mut();
            assert_eq!(
                fb_potential_well(grid, -1.0, 1.0, &mut pot),
                FbStatus::InvalidArgument
            );
            assert_eq!(
                fb_potential_well(std::ptr::null(), 1.0, 1.0, &mut pot),
                FbStatus::NullPointer
            );
            fb_grid_free(grid);
        }
    }

    #[test]
    fn analytic_norms_through_the_abi() {
        unsafe {
            let mut grid: *mut FbGrid = std::ptr::null_mut();
            assert_eq!(fb_grid_new(1, 20.0, 256, &mut grid), FbStatus::Ok);
            let mut pot: *mut FbPotential = std::ptr::null_mut();
            let amp = 1.0 / std::f64::consts::PI.sqrt();
            assert_eq!(fb_potential_gaussian(grid, amp, 1.0, &mut pot), FbStatus::Ok);

            let mut v = 0.0f64;
            assert_eq!(fb_hermite_log_norm(pot, 0.01, 60, &mut v), FbStatus::Ok);
            assert!((v * v - std::f64::consts::E).abs() < 1e-8);

            let mut t = 0.0f64;
            assert_eq!(fb_trace_low_projected(pot, 1.0, -0.5, &mut t), FbStatus::Ok);
            assert!(t > 0.0);

            let mut wn = 0.0f64;
            assert_eq!(fb_weak_norm_high(pot, 1.0, 0.0, false, &mut wn), FbStatus::Ok);
            assert!(wn > 0.0);
            // critical s without the acknowledgment flag
            assert_eq!(
                fb_weak_norm_high(pot, 0.5, 0.0, false, &mut wn),
                FbStatus::ComputeError
            );
            assert_eq!(fb_weak_norm_high(pot, 0.5, 0.0, true, &mut wn), FbStatus::Ok);

            fb_potential_free(pot);
            fb_grid_free(grid);
        }
    }
}
