//! C ABI for the rearrange laboratory.
//!
//! Grid functions and radial profiles are exposed as opaque handles; every
//! entry point returns an [`RrStatus`] code and writes results through out
//! pointers. The most recent error message is kept per thread and can be
//! copied out with [`rr_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use rearrange::energy::{
    gagliardo, local_seminorm, regularized_energy, thin_film_energy, KernelSpec,
};
use rearrange::grid::GridFunction;
use rearrange::height::{convexity_curve, height_function, t_grid, CurveFunctional, CurveParams};
use rearrange::radial::RadialProfile;
use rearrange::symmetrize::{
    lipschitz_report, steiner_continuous, steiner_full, steiner_truncated, SteinerParams, SymAxis,
    TruncationSpec,
};
use rearrange::thinfilm::{barenblatt_exponents, explicit_solution, kappa, stationary_residual};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    IoError = 3,
    CheckFailed = 4,
    Panic = 5,
}

/// Opaque grid-function handle.
pub struct RrGrid {
    inner: GridFunction,
}

/// Opaque radial-profile handle.
pub struct RrProfile {
    inner: RadialProfile,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn guard<F: FnOnce() -> RrStatus>(f: F) -> RrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic inside rearrange");
            RrStatus::Panic
        }
    }
}

unsafe fn path_from(ptr: *const c_char) -> Option<PathBuf> {
    if ptr.is_null() {
        return None;
    }
    let s = CStr::from_ptr(ptr).to_str().ok()?;
    Some(PathBuf::from(s))
}

/// Version string of the library (static storage, do not free).
#[no_mangle]
pub extern "C" fn rr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copies the last error message of this thread into `buf` (truncated to
/// `len` bytes including the terminator). Returns the full message length.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn rr_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // Always terminate.
            *buf.add(n - 1) = 0;
        }
        bytes.len() - 1
    })
}

/// Reads a grid function from a `.gfn` file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rr_grid_read(path: *const c_char, out: *mut *mut RrGrid) -> RrStatus {
    guard(|| {
        if out.is_null() {
            return RrStatus::NullArgument;
        }
        let Some(path) = path_from(path) else {
            set_error("path is null or not UTF-8");
            return RrStatus::NullArgument;
        };
        match GridFunction::read_from(&path) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(RrGrid { inner: g }));
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::IoError
            }
        }
    })
}

/// Builds a 1D grid function from raw samples on [min, max].
///
/// # Safety
/// `samples` must point to `count` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rr_grid_from_samples_1d(
    min: f64,
    max: f64,
    count: usize,
    samples: *const f64,
    out: *mut *mut RrGrid,
) -> RrStatus {
    guard(|| {
        if out.is_null() || samples.is_null() {
            return RrStatus::NullArgument;
        }
        let data = std::slice::from_raw_parts(samples, count).to_vec();
        match GridFunction::new(vec![rearrange::grid::Axis::new(min, max, count)], data) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(RrGrid { inner: g }));
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::InvalidArgument
            }
        }
    })
}

/// Writes a grid function to a `.gfn` file.
///
/// # Safety
/// `grid` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rr_grid_write(grid: *const RrGrid, path: *const c_char) -> RrStatus {
    guard(|| {
        let Some(g) = grid.as_ref() else {
            return RrStatus::NullArgument;
        };
        let Some(path) = path_from(path) else {
            return RrStatus::NullArgument;
        };
        match g.inner.write_to(&path) {
            Ok(()) => RrStatus::Ok,
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::IoError
            }
        }
    })
}

/// Releases a grid handle.
///
/// # Safety
/// `grid` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn rr_grid_free(grid: *mut RrGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of samples of a grid handle (0 on null).
///
/// # Safety
/// `grid` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn rr_grid_len(grid: *const RrGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.samples().len())
}

/// Copies the samples into `buf` (up to `len` doubles); returns the count.
///
/// # Safety
/// `buf` must point to `len` writable doubles, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn rr_grid_samples(grid: *const RrGrid, buf: *mut f64, len: usize) -> usize {
    let Some(g) = grid.as_ref() else { return 0 };
    let s = g.inner.samples();
    if !buf.is_null() {
        let n = s.len().min(len);
        std::ptr::copy_nonoverlapping(s.as_ptr(), buf, n);
    }
    s.len()
}

/// ∫ f over the grid.
///
/// # Safety
/// `grid` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_grid_integral(grid: *const RrGrid, out: *mut f64) -> RrStatus {
    guard(|| {
        let (Some(g), false) = (grid.as_ref(), out.is_null()) else {
            return RrStatus::NullArgument;
        };
        *out = g.inner.integral();
        RrStatus::Ok
    })
}

/// Continuous Steiner symmetrization at time tau along the last axis.
///
/// # Safety
/// `grid` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_steiner_continuous(
    grid: *const RrGrid,
    tau: f64,
    heights: usize,
    out: *mut *mut RrGrid,
) -> RrStatus {
    guard(|| {
        let (Some(g), false) = (grid.as_ref(), out.is_null()) else {
            return RrStatus::NullArgument;
        };
        if !(tau >= 0.0) {
            set_error("tau must be nonnegative");
            return RrStatus::InvalidArgument;
        }
        match steiner_continuous(&g.inner, tau, SymAxis::Last, &SteinerParams::new(heights.max(2)))
        {
            Ok(r) => {
                *out = Box::into_raw(Box::new(RrGrid { inner: r }));
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::InvalidArgument
            }
        }
    })
}

/// Full Steiner symmetrization along the last axis.
///
/// # Safety
/// `grid` must be a live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_steiner_full(
    grid: *const RrGrid,
    heights: usize,
    out: *mut *mut RrGrid,
) -> RrStatus {
    guard(|| {
        let (Some(g), false) = (grid.as_ref(), out.is_null()) else {
            return RrStatus::NullArgument;
        };
        match steiner_full(&g.inner, SymAxis::Last, &SteinerParams::new(heights.max(2))) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(RrGrid { inner: r }));
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::InvalidArgument
            }
        }
    })
}

/// Truncated symmetrization; writes the clip diagnostic to `clipped`.
/// Fails with `CheckFailed` when tau ≥ h0 / c0.
///
/// # Safety
/// `grid` must be a live handle; `out` valid; `clipped` may be null.
#[no_mangle]
pub unsafe extern "C" fn rr_steiner_truncated(
    grid: *const RrGrid,
    tau: f64,
    h0: f64,
    heights: usize,
    out: *mut *mut RrGrid,
    clipped: *mut usize,
) -> RrStatus {
    guard(|| {
        let (Some(g), false) = (grid.as_ref(), out.is_null()) else {
            return RrStatus::NullArgument;
        };
        if !(h0 > 0.0) || !(tau >= 0.0) {
            set_error("need h0 > 0 and tau >= 0");
            return RrStatus::InvalidArgument;
        }
        match steiner_truncated(
            &g.inner,
            tau,
            &TruncationSpec::new(h0),
            SymAxis::Last,
            &SteinerParams::new(heights.max(2)),
        ) {
            Ok(r) => {
                if !clipped.is_null() {
                    *clipped = r.clipped_spans;
                }
                *out = Box::into_raw(Box::new(RrGrid { inner: r.grid }));
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::CheckFailed
            }
        }
    })
}

/// Gagliardo seminorm [f]^p with ε = 0.
///
/// # Safety
/// `grid` must be a live handle; `value`/`error` valid or null.
#[no_mangle]
pub unsafe extern "C" fn rr_gagliardo(
    grid: *const RrGrid,
    s: f64,
    p: f64,
    value: *mut f64,
    error: *mut f64,
) -> RrStatus {
    guard(|| {
        let Some(g) = grid.as_ref() else {
            return RrStatus::NullArgument;
        };
        let spec = KernelSpec::new(s, p, 0.0, g.inner.dim());
        match gagliardo(&g.inner, &spec) {
            Ok(r) => {
                if !value.is_null() {
                    *value = r.value;
                }
                if !error.is_null() {
                    *error = r.error_estimate;
                }
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::InvalidArgument
            }
        }
    })
}

/// Regularized energy F_ε^p with its split into C_ε and I_ε^p.
///
/// # Safety
/// `grid` must be a live handle; out pointers valid or null.
#[no_mangle]
pub unsafe extern "C" fn rr_regularized_energy(
    grid: *const RrGrid,
    s: f64,
    p: f64,
    eps: f64,
    value: *mut f64,
    c_eps: *mut f64,
    i_eps: *mut f64,
) -> RrStatus {
    guard(|| {
        let Some(g) = grid.as_ref() else {
            return RrStatus::NullArgument;
        };
        let spec = KernelSpec::new(s, p, eps, g.inner.dim());
        match regularized_energy(&g.inner, &spec) {
            Ok(r) => {
                if !value.is_null() {
                    *value = r.value;
                }
                if !c_eps.is_null() {
                    *c_eps = r.c_eps.unwrap_or(f64::NAN);
                }
                if !i_eps.is_null() {
                    *i_eps = r.i_eps.unwrap_or(f64::NAN);
                }
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::InvalidArgument
            }
        }
    })
}

/// Σ |∇f|^p Δx.
///
/// # Safety
/// `grid` must be a live handle; `value` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_local_seminorm(
    grid: *const RrGrid,
    p: f64,
    value: *mut f64,
) -> RrStatus {
    guard(|| {
        let (Some(g), false) = (grid.as_ref(), value.is_null()) else {
            return RrStatus::NullArgument;
        };
        if !(p >= 1.0) {
            set_error("p must be at least 1");
            return RrStatus::InvalidArgument;
        }
        *value = local_seminorm(&g.inner, p);
        RrStatus::Ok
    })
}

/// Thin-film energy c_{n,s}[v]² + (β/2)∫|y|²v.
///
/// # Safety
/// `grid` must be a live handle; `value` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_thin_film_energy(
    grid: *const RrGrid,
    s: f64,
    beta: f64,
    value: *mut f64,
) -> RrStatus {
    guard(|| {
        let (Some(g), false) = (grid.as_ref(), value.is_null()) else {
            return RrStatus::NullArgument;
        };
        let spec = KernelSpec::new(s, 2.0, 0.0, g.inner.dim());
        match thin_film_energy(&g.inner, &spec, beta) {
            Ok(v) => {
                *value = v;
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::InvalidArgument
            }
        }
    })
}

/// Discrete Lipschitz constant.
///
/// # Safety
/// `grid` must be a live handle; `c0` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_lipschitz_constant(grid: *const RrGrid, c0: *mut f64) -> RrStatus {
    guard(|| {
        let (Some(g), false) = (grid.as_ref(), c0.is_null()) else {
            return RrStatus::NullArgument;
        };
        *c0 = lipschitz_report(&g.inner).c0;
        RrStatus::Ok
    })
}

/// κ(s, n) = 4^s Γ(s+2) Γ(s+n/2)/Γ(n/2); NaN on bad arguments.
#[no_mangle]
pub extern "C" fn rr_kappa(s: f64, dim: u32) -> f64 {
    if !(s > 0.0 && s < 1.0) || !(dim == 1 || dim == 2) {
        return f64::NAN;
    }
    kappa(s, dim as usize)
}

/// Self-similar rescaling exponents α = n/(n+2(1+s)), β = 1/(n+2(1+s)).
///
/// # Safety
/// `alpha` and `beta` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn rr_barenblatt_exponents(
    dim: u32,
    s: f64,
    alpha: *mut f64,
    beta: *mut f64,
) -> RrStatus {
    guard(|| {
        if !(dim == 1 || dim == 2) || !(s > 0.0 && s < 1.0) {
            set_error("need dim in {1,2} and s in (0,1)");
            return RrStatus::InvalidArgument;
        }
        let e = barenblatt_exponents(dim as usize, s);
        if !alpha.is_null() {
            *alpha = e.alpha;
        }
        if !beta.is_null() {
            *beta = e.beta;
        }
        RrStatus::Ok
    })
}

/// Quadratic-fit residual of (−Δ)^s of the explicit stationary profile.
/// Returns `CheckFailed` when the residual exceeds 1e−2.
///
/// # Safety
/// Out pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn rr_verify_stationary(
    s: f64,
    lambda: f64,
    samples: usize,
    residual: *mut f64,
    multiplier: *mut f64,
    curvature: *mut f64,
) -> RrStatus {
    guard(|| {
        if !(s > 0.0 && s < 1.0 && lambda > 0.0) {
            set_error("need s in (0,1) and lambda > 0");
            return RrStatus::InvalidArgument;
        }
        let sp = explicit_solution(lambda, s, 1, samples.max(1025));
        match stationary_residual(&sp) {
            Ok(fit) => {
                if !residual.is_null() {
                    *residual = fit.relative_residual;
                }
                if !multiplier.is_null() {
                    *multiplier = fit.multiplier;
                }
                if !curvature.is_null() {
                    *curvature = fit.curvature;
                }
                if fit.relative_residual <= 1e-2 {
                    RrStatus::Ok
                } else {
                    set_error("stationary fit residual exceeds 1e-2");
                    RrStatus::CheckFailed
                }
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::InvalidArgument
            }
        }
    })
}

/// Reads a radial profile from a `.rad` file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_profile_read(
    path: *const c_char,
    out: *mut *mut RrProfile,
) -> RrStatus {
    guard(|| {
        if out.is_null() {
            return RrStatus::NullArgument;
        }
        let Some(path) = path_from(path) else {
            return RrStatus::NullArgument;
        };
        match RadialProfile::read_from(&path) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(RrProfile { inner: p }));
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                RrStatus::IoError
            }
        }
    })
}

/// Releases a profile handle.
///
/// # Safety
/// `p` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn rr_profile_free(p: *mut RrProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Functional selector for [`rr_interpolation_min_second_diff`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RrCurveFunctional {
    Hs = 0,
    Lp = 1,
    W1p = 2,
    PotentialQuadratic = 3,
}

/// Minimum second difference of a functional along the height interpolation
/// between two unit-mass radial decreasing profiles.
///
/// # Safety
/// Handles must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn rr_interpolation_min_second_diff(
    f0: *const RrProfile,
    f1: *const RrProfile,
    functional: RrCurveFunctional,
    order: f64,
    t_steps: usize,
    out: *mut f64,
) -> RrStatus {
    guard(|| {
        let (Some(a), Some(b), false) = (f0.as_ref(), f1.as_ref(), out.is_null()) else {
            return RrStatus::NullArgument;
        };
        let func = match functional {
            RrCurveFunctional::Hs => CurveFunctional::Hs { s: order },
            RrCurveFunctional::Lp => CurveFunctional::Lp { p: order },
            RrCurveFunctional::W1p => CurveFunctional::W1p { p: order },
            RrCurveFunctional::PotentialQuadratic => CurveFunctional::PotentialQuadratic,
        };
        let build = || -> Result<f64, String> {
            let h0 = height_function(&a.inner, 1024).map_err(|e| e.to_string())?;
            let h1 = height_function(&b.inner, 1024).map_err(|e| e.to_string())?;
            let curve = convexity_curve(
                &h0,
                &h1,
                func,
                &t_grid(t_steps.max(3)),
                &CurveParams::default(),
            )
            .map_err(|e| e.to_string())?;
            Ok(curve.min_second_diff)
        };
        match build() {
            Ok(v) => {
                *out = v;
                RrStatus::Ok
            }
            Err(e) => {
                set_error(&e);
                RrStatus::InvalidArgument
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_and_exponents_through_the_abi() {
        assert!((rr_kappa(0.5, 1) - 1.5).abs() < 1e-12);
        assert!(rr_kappa(1.5, 1).is_nan());
        let mut a = 0.0;
        let mut b = 0.0;
        let st = unsafe { rr_barenblatt_exponents(1, 0.5, &mut a, &mut b) };
        assert_eq!(st, RrStatus::Ok);
        assert!((a - 0.25).abs() < 1e-15 && (b - 0.25).abs() < 1e-15);
    }

    #[test]
    fn grid_round_trip_and_energy_through_the_abi() {
        let dir = std::env::temp_dir().join("rr_ffi_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tri.gfn");
        // Triangle samples via raw buffer.
        let count = 513usize;
        let samples: Vec<f64> = (0..count)
            .map(|i| {
                let x = -3.0 + 6.0 * i as f64 / (count - 1) as f64;
                (1.0 - x.abs()).max(0.0)
            })
            .collect();
        let mut grid: *mut RrGrid = std::ptr::null_mut();
        let st = unsafe { rr_grid_from_samples_1d(-3.0, 3.0, count, samples.as_ptr(), &mut grid) };
        assert_eq!(st, RrStatus::Ok);
        let cpath = CString::new(path.to_str().unwrap()).unwrap();
        assert_eq!(unsafe { rr_grid_write(grid, cpath.as_ptr()) }, RrStatus::Ok);

        let mut reread: *mut RrGrid = std::ptr::null_mut();
        assert_eq!(unsafe { rr_grid_read(cpath.as_ptr(), &mut reread) }, RrStatus::Ok);
        assert_eq!(unsafe { rr_grid_len(reread) }, count);

        let mut value = 0.0;
        let mut err = 0.0;
        let st = unsafe { rr_gagliardo(reread, 0.3, 2.0, &mut value, &mut err) };
        assert_eq!(st, RrStatus::Ok);
        assert!(value > 0.0);

        let mut out: *mut RrGrid = std::ptr::null_mut();
        let st = unsafe { rr_steiner_continuous(reread, 0.5, 256, &mut out) };
        assert_eq!(st, RrStatus::Ok);
        let mut before = 0.0;
        let mut after = 0.0;
        unsafe {
            rr_grid_integral(reread, &mut before);
            rr_grid_integral(out, &mut after);
        }
        assert!((before - after).abs() <= 1e-3 * before);

        unsafe {
            rr_grid_free(grid);
            rr_grid_free(reread);
            rr_grid_free(out);
        }
    }

    #[test]
    fn error_reporting_through_the_abi() {
        let mut out: *mut RrGrid = std::ptr::null_mut();
        let bad = CString::new("/definitely/not/a/file.gfn").unwrap();
        let st = unsafe { rr_grid_read(bad.as_ptr(), &mut out) };
        assert_eq!(st, RrStatus::IoError);
        let mut buf = vec![0i8; 128];
        let n = unsafe { rr_last_error(buf.as_mut_ptr(), buf.len()) };
        assert!(n > 0);
    }

    #[test]
    fn truncated_inadmissibility_is_a_check_failure() {
        let count = 257usize;
        let samples: Vec<f64> = (0..count)
            .map(|i| {
                let x = -3.0 + 6.0 * i as f64 / (count - 1) as f64;
                (1.0 - x.abs()).max(0.0)
            })
            .collect();
        let mut grid: *mut RrGrid = std::ptr::null_mut();
        unsafe {
            rr_grid_from_samples_1d(-3.0, 3.0, count, samples.as_ptr(), &mut grid);
        }
        let mut out: *mut RrGrid = std::ptr::null_mut();
        let mut clipped = 0usize;
        let st = unsafe { rr_steiner_truncated(grid, 0.5, 0.2, 128, &mut out, &mut clipped) };
        assert_eq!(st, RrStatus::CheckFailed);
        unsafe { rr_grid_free(grid) };
    }
}
