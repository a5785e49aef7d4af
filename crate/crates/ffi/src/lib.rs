//! C ABI over the radiant library.
//!
//! All functions return a `RadiantStatus` code; `RADIANT_STATUS_OK` (0) means
//! success. On any failure a thread-local message is set and can be read with
//! [`radiant_last_error`]. Objects are exposed as opaque handles that must be
//! released with the matching `_free` function; every `_free` accepts null.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use radiant::classify::{classify, Classification, Nonlinearity};
use radiant::config::{parse_psi_spec, parse_weight_spec};
use radiant::geometry::Space;
use radiant::numerics::Tolerance;
use radiant::solver::{solve_ball, Solution};

/// Status codes returned by every API function.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiantStatus {
    /// Success.
    Ok = 0,
    /// A pointer argument was null or a scalar argument was out of domain.
    InvalidArgument = 1,
    /// The computation ran but did not produce a usable result.
    NumericalFailure = 2,
    /// The computation finished without reaching a verdict.
    Inconclusive = 3,
}

/// A geometry handle: Euclidean `R^d` or a Damek-Ricci space.
pub struct RadiantSpace(Space);

/// A nonlinearity handle: separable `phi(r, t) = p(r) psi(t)`.
pub struct RadiantNonlinearity(Nonlinearity);

/// A solved radial profile.
pub struct RadiantSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = owned);
}

fn fail(msg: &str, status: RadiantStatus) -> RadiantStatus {
    set_error(msg);
    status
}

/// Returns the message for the most recent failure on the calling thread.
///
/// The pointer stays valid until the next failing call on the same thread.
/// Never returns null; the message is empty if no failure has occurred.
#[no_mangle]
pub extern "C" fn radiant_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a Euclidean space handle of dimension `d >= 3`.
///
/// # Safety
/// `out` must be a valid pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn radiant_space_euclidean(d: u32, out: *mut *mut RadiantSpace) -> RadiantStatus {
    if out.is_null() {
        return fail("out is null", RadiantStatus::InvalidArgument);
    }
    match Space::euclidean(d) {
        Ok(space) => {
            *out = Box::into_raw(Box::new(RadiantSpace(space)));
            RadiantStatus::Ok
        }
        Err(e) => fail(&e.to_string(), RadiantStatus::InvalidArgument),
    }
}

/// Creates a Damek-Ricci space handle with Heisenberg parameters `(p, q)`.
///
/// # Safety
/// `out` must be a valid pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn radiant_space_damek_ricci(
    p: u32,
    q: u32,
    out: *mut *mut RadiantSpace,
) -> RadiantStatus {
    if out.is_null() {
        return fail("out is null", RadiantStatus::InvalidArgument);
    }
    match Space::damek_ricci(p, q) {
        Ok(space) => {
            *out = Box::into_raw(Box::new(RadiantSpace(space)));
            RadiantStatus::Ok
        }
        Err(e) => fail(&e.to_string(), RadiantStatus::InvalidArgument),
    }
}

/// Releases a space handle. Accepts null.
///
/// # Safety
/// `space` must be null or a pointer previously returned by a
/// `radiant_space_*` constructor that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn radiant_space_free(space: *mut RadiantSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Creates a separable nonlinearity `phi(r, t) = p(r) psi(t)` from spec
/// strings: `weight` is `constant[:v]`, `exp:rate[,v]`, or
/// `power:exponent[,v]`; `psi` is `linear`, `linear_plus_one`, `sqrt`, or
/// `power:gamma` with `0 < gamma <= 1`.
///
/// # Safety
/// `weight` and `psi` must be valid nul-terminated strings; `out` must be a
/// valid pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn radiant_nonlinearity_separable(
    weight: *const c_char,
    psi: *const c_char,
    out: *mut *mut RadiantNonlinearity,
) -> RadiantStatus {
    if weight.is_null() || psi.is_null() || out.is_null() {
        return fail("weight, psi, and out must be non-null", RadiantStatus::InvalidArgument);
    }
    let parse = |p: *const c_char| CStr::from_ptr(p).to_str().map(str::to_owned);
    let (weight, psi) = match (parse(weight), parse(psi)) {
        (Ok(w), Ok(p)) => (w, p),
        _ => return fail("spec strings must be UTF-8", RadiantStatus::InvalidArgument),
    };
    let built = parse_weight_spec(&weight)
        .map_err(|e| e.to_string())
        .and_then(|w| parse_psi_spec(&psi).map_err(|e| e.to_string()).map(|p| (w, p)))
        .and_then(|(w, p)| Nonlinearity::separable(w, p).map_err(|e| e.to_string()));
    match built {
        Ok(nl) => {
            *out = Box::into_raw(Box::new(RadiantNonlinearity(nl)));
            RadiantStatus::Ok
        }
        Err(e) => fail(&e, RadiantStatus::InvalidArgument),
    }
}

/// Releases a nonlinearity handle. Accepts null.
///
/// # Safety
/// `nl` must be null or a pointer previously returned by
/// `radiant_nonlinearity_separable` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn radiant_nonlinearity_free(nl: *mut RadiantNonlinearity) {
    if !nl.is_null() {
        drop(Box::from_raw(nl));
    }
}

/// Existence verdicts reported by [`radiant_classify`].
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiantVerdict {
    /// A nontrivial bounded entire solution exists; no large solution does.
    Bounded = 0,
    /// A large (boundary blow-up) entire solution exists; no bounded one does.
    Large = 1,
}

fn tolerance(tol: f64) -> Tolerance {
    Tolerance { abs: tol, rel: 0.0, max_subdivisions: 2000, max_iterations: 40_000 }
}

/// Classifies `Lu = phi(r, u)` on the space: bounded versus large entire
/// solutions, decided by the convergence of the defining radial integral.
///
/// # Safety
/// `space` and `nl` must be live handles from this library; `out` must be a
/// valid pointer to writable memory for one `RadiantVerdict`.
#[no_mangle]
pub unsafe extern "C" fn radiant_classify(
    space: *const RadiantSpace,
    nl: *const RadiantNonlinearity,
    tol: f64,
    out: *mut RadiantVerdict,
) -> RadiantStatus {
    if space.is_null() || nl.is_null() || out.is_null() {
        return fail("space, nl, and out must be non-null", RadiantStatus::InvalidArgument);
    }
    if !(tol > 0.0) {
        return fail("tol must be positive", RadiantStatus::InvalidArgument);
    }
    let t = Tolerance { rel: tol, ..tolerance(tol) };
    match classify((*space).0, &(*nl).0, &t) {
        Ok(Classification::Bounded { .. }) => {
            *out = RadiantVerdict::Bounded;
            RadiantStatus::Ok
        }
        Ok(Classification::Large { .. }) => {
            *out = RadiantVerdict::Large;
            RadiantStatus::Ok
        }
        Ok(Classification::Inconclusive { reason }) => fail(&reason, RadiantStatus::Inconclusive),
        Err(e) => fail(&e.to_string(), RadiantStatus::NumericalFailure),
    }
}

/// Solves the Dirichlet problem `Lu = phi(r, u)` on the ball of radius
/// `ball_r` with constant boundary data `c >= 0`.
///
/// # Safety
/// `space` and `nl` must be live handles from this library; `out` must be a
/// valid pointer to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn radiant_solve_ball(
    space: *const RadiantSpace,
    nl: *const RadiantNonlinearity,
    ball_r: f64,
    c: f64,
    tol: f64,
    out: *mut *mut RadiantSolution,
) -> RadiantStatus {
    if space.is_null() || nl.is_null() || out.is_null() {
        return fail("space, nl, and out must be non-null", RadiantStatus::InvalidArgument);
    }
    if !(tol > 0.0) {
        return fail("tol must be positive", RadiantStatus::InvalidArgument);
    }
    match solve_ball((*space).0, &(*nl).0, ball_r, c, &tolerance(tol)) {
        Ok(sol) => {
            *out = Box::into_raw(Box::new(RadiantSolution(sol)));
            RadiantStatus::Ok
        }
        Err(e) => fail(&e.to_string(), RadiantStatus::NumericalFailure),
    }
}

/// Number of grid nodes in the solution profile.
///
/// # Safety
/// `sol` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn radiant_solution_len(sol: *const RadiantSolution) -> usize {
    if sol.is_null() {
        return 0;
    }
    (*sol).0.profile.grid().len()
}

/// Reads node `index` of the profile into `(*r, *u)`.
///
/// # Safety
/// `sol` must be a live handle from this library; `r` and `u` must be valid
/// pointers to writable memory for one `double` each.
#[no_mangle]
pub unsafe extern "C" fn radiant_solution_node(
    sol: *const RadiantSolution,
    index: usize,
    r: *mut f64,
    u: *mut f64,
) -> RadiantStatus {
    if sol.is_null() || r.is_null() || u.is_null() {
        return fail("sol, r, and u must be non-null", RadiantStatus::InvalidArgument);
    }
    let profile = &(*sol).0.profile;
    if index >= profile.grid().len() {
        return fail("index out of range", RadiantStatus::InvalidArgument);
    }
    *r = profile.grid().points()[index];
    *u = profile.values()[index];
    RadiantStatus::Ok
}

/// Evaluates the profile at radius `r` (clamped to the covered interval).
///
/// # Safety
/// `sol` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn radiant_solution_eval(sol: *const RadiantSolution, r: f64) -> f64 {
    if sol.is_null() {
        return f64::NAN;
    }
    (*sol).0.profile.eval(r)
}

/// The center value `u(0)`.
///
/// # Safety
/// `sol` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn radiant_solution_center(sol: *const RadiantSolution) -> f64 {
    if sol.is_null() {
        return f64::NAN;
    }
    (*sol).0.center_value
}

/// The fixed-point residual of the solve.
///
/// # Safety
/// `sol` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn radiant_solution_residual(sol: *const RadiantSolution) -> f64 {
    if sol.is_null() {
        return f64::NAN;
    }
    (*sol).0.residual
}

/// Releases a solution handle. Accepts null.
///
/// # Safety
/// `sol` must be null or a pointer previously returned by
/// `radiant_solve_ball` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn radiant_solution_free(sol: *mut RadiantSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    unsafe fn make_space() -> *mut RadiantSpace {
        let mut space = ptr::null_mut();
        assert_eq!(radiant_space_euclidean(3, &mut space), RadiantStatus::Ok);
        space
    }

    unsafe fn make_nl(weight: &str, psi: &str) -> *mut RadiantNonlinearity {
        let weight = CString::new(weight).unwrap();
        let psi = CString::new(psi).unwrap();
        let mut nl = ptr::null_mut();
        assert_eq!(
            radiant_nonlinearity_separable(weight.as_ptr(), psi.as_ptr(), &mut nl),
            RadiantStatus::Ok
        );
        nl
    }

    #[test]
    fn linear_ball_round_trip() {
        unsafe {
            let space = make_space();
            let nl = make_nl("constant", "linear");
            let mut sol = ptr::null_mut();
            assert_eq!(radiant_solve_ball(space, nl, 1.0, 1.0, 1e-9, &mut sol), RadiantStatus::Ok);
            let n = radiant_solution_len(sol);
            assert!(n > 2);
            let (mut r, mut u) = (0.0, 0.0);
            assert_eq!(radiant_solution_node(sol, n - 1, &mut r, &mut u), RadiantStatus::Ok);
            assert!((r - 1.0).abs() < 1e-12 && (u - 1.0).abs() < 1e-9);
            // Exact solution u(r) = sinh(r) / (r sinh(1)).
            let center = radiant_solution_center(sol);
            assert!((center - 1.0 / 1.0f64.sinh()).abs() < 1e-6, "center {center}");
            let mid = radiant_solution_eval(sol, 0.5);
            assert!((mid - 0.5f64.sinh() / (0.5 * 1.0f64.sinh())).abs() < 1e-6);
            assert!(radiant_solution_residual(sol) <= 1e-8);
            assert_eq!(radiant_solution_node(sol, n, &mut r, &mut u), RadiantStatus::InvalidArgument);
            radiant_solution_free(sol);
            radiant_nonlinearity_free(nl);
            radiant_space_free(space);
        }
    }

    #[test]
    fn classify_verdicts() {
        unsafe {
            let space = make_space();
            let bounded_nl = make_nl("power:-3", "sqrt");
            let large_nl = make_nl("constant", "sqrt");
            let mut verdict = RadiantVerdict::Large;
            assert_eq!(radiant_classify(space, bounded_nl, 1e-8, &mut verdict), RadiantStatus::Ok);
            assert_eq!(verdict, RadiantVerdict::Bounded);
            assert_eq!(radiant_classify(space, large_nl, 1e-8, &mut verdict), RadiantStatus::Ok);
            assert_eq!(verdict, RadiantVerdict::Large);
            radiant_nonlinearity_free(bounded_nl);
            radiant_nonlinearity_free(large_nl);
            radiant_space_free(space);
        }
    }

    #[test]
    fn errors_set_message_and_accept_null_frees() {
        unsafe {
            let mut space = ptr::null_mut();
            assert_eq!(radiant_space_euclidean(2, &mut space), RadiantStatus::InvalidArgument);
            let msg = CStr::from_ptr(radiant_last_error());
            assert!(!msg.to_bytes().is_empty());
            assert_eq!(radiant_space_euclidean(3, ptr::null_mut()), RadiantStatus::InvalidArgument);
            radiant_space_free(ptr::null_mut());
            radiant_nonlinearity_free(ptr::null_mut());
            radiant_solution_free(ptr::null_mut());
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        unsafe {
            let weight = CString::new("bogus").unwrap();
            let psi = CString::new("sqrt").unwrap();
            let mut nl = ptr::null_mut();
            assert_eq!(
                radiant_nonlinearity_separable(weight.as_ptr(), psi.as_ptr(), &mut nl),
                RadiantStatus::InvalidArgument
            );
            let psi_bad = CString::new("power:2").unwrap();
            let weight_ok = CString::new("constant").unwrap();
            assert_eq!(
                radiant_nonlinearity_separable(weight_ok.as_ptr(), psi_bad.as_ptr(), &mut nl),
                RadiantStatus::InvalidArgument
            );
        }
    }

    #[test]
    fn header_is_generated() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/radiant.h");
        let text = std::fs::read_to_string(header).expect("header generated by build script");
        for symbol in [
            "radiant_space_euclidean",
            "radiant_nonlinearity_separable",
            "radiant_solve_ball",
            "radiant_solution_node",
            "radiant_last_error",
            "RADIANT_H",
        ] {
            assert!(text.contains(symbol), "missing {symbol}");
        }
    }
}
