//! C ABI over the altpaths solvers.
//!
//! Objects are opaque handles created and destroyed through this API. Every
//! fallible call returns an [`AltpathsStatus`]; on failure a message for the
//! calling thread is available from [`altpaths_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::time::Duration;

use altpaths::apcp::Status;
use altpaths::io::{load_instance, parse_instance, to_json, SolutionFile};
use altpaths::kpi::kpis;
use altpaths::network::{Instance, PathSet};
use altpaths::rapcp::FilterMode;
use altpaths::solve::{solve, Method, SolveError, SolveOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltpathsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    IoError = 4,
    InvalidArgument = 5,
    /// The exhaustive oracle declined an instance with too many paths.
    Refused = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltpathsMethod {
    Benders = 0,
    Rapcp = 1,
    Rapcpa2 = 2,
    Oracle = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AltpathsSolveStatus {
    Optimal = 0,
    /// A time or node limit stopped the search; the best path set is kept.
    LimitReached = 1,
    Infeasible = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltpathsSolveOptions {
    pub time_limit_s: f64,
    /// 0 means no node limit.
    pub node_limit: u64,
    pub oracle_cap: usize,
    /// Filter relaxation rounds by `obj_a * obj_b` instead of `obj_b`.
    pub product_filter: bool,
    pub warm_start: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AltpathsKpis {
    pub cost: i64,
    pub min_surviving_paths: usize,
    pub min_max_flow: i64,
    pub path_disjointness: usize,
}

/// A validated instance.
pub struct AltpathsInstance {
    inner: Instance,
}

/// Result of one solve, with paths stored as arc ids.
pub struct AltpathsSolution {
    file: SolutionFile,
    pathset: PathSet,
    instance: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: AltpathsStatus, msg: impl Into<String>) -> AltpathsStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`AltpathsStatus::Panic`].
fn guard(f: impl FnOnce() -> AltpathsStatus) -> AltpathsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(AltpathsStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, AltpathsStatus> {
    if s.is_null() {
        return Err(fail(AltpathsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(AltpathsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn altpaths_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses an instance from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn altpaths_instance_from_json(
    json: *const c_char,
    out: *mut *mut AltpathsInstance,
) -> AltpathsStatus {
    guard(|| {
        if out.is_null() {
            return fail(AltpathsStatus::NullPointer, "out is null");
        }
        let text = match read_str(json, "json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_instance(text, "<json>") {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AltpathsInstance { inner }));
                AltpathsStatus::Ok
            }
            Err(e) => fail(AltpathsStatus::ParseError, e.to_string()),
        }
    })
}

/// Loads an instance file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn altpaths_instance_load(
    path: *const c_char,
    out: *mut *mut AltpathsInstance,
) -> AltpathsStatus {
    guard(|| {
        if out.is_null() {
            return fail(AltpathsStatus::NullPointer, "out is null");
        }
        let path = match read_str(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match load_instance(Path::new(path)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AltpathsInstance { inner }));
                AltpathsStatus::Ok
            }
            Err(e @ altpaths::io::IoError::Io { .. }) => fail(AltpathsStatus::IoError, e.to_string()),
            Err(e) => fail(AltpathsStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `instance` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn altpaths_instance_free(instance: *mut AltpathsInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Replaces the path budget.
///
/// # Safety
/// `instance` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn altpaths_instance_set_k(instance: *mut AltpathsInstance, k: usize) -> AltpathsStatus {
    guard(|| {
        let Some(inst) = instance.as_mut() else {
            return fail(AltpathsStatus::NullPointer, "instance is null");
        };
        match inst.inner.with_k(k) {
            Ok(i) => {
                inst.inner = i;
                AltpathsStatus::Ok
            }
            Err(e) => fail(AltpathsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `instance` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn altpaths_instance_k(instance: *const AltpathsInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.k)
}

#[no_mangle]
pub extern "C" fn altpaths_solve_options_default() -> AltpathsSolveOptions {
    let d = SolveOptions::default();
    AltpathsSolveOptions {
        time_limit_s: d.time_limit.as_secs_f64(),
        node_limit: d.node_limit.unwrap_or(0),
        oracle_cap: d.oracle_cap,
        product_filter: d.filter == FilterMode::Product,
        warm_start: d.warm_start,
    }
}

/// Solves `instance` with `method`. `options` may be null for defaults.
///
/// # Safety
/// `instance` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solve(
    instance: *const AltpathsInstance,
    method: AltpathsMethod,
    options: *const AltpathsSolveOptions,
    out: *mut *mut AltpathsSolution,
) -> AltpathsStatus {
    guard(|| {
        let Some(inst) = instance.as_ref() else {
            return fail(AltpathsStatus::NullPointer, "instance is null");
        };
        if out.is_null() {
            return fail(AltpathsStatus::NullPointer, "out is null");
        }
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| altpaths_solve_options_default());
        if !(opts.time_limit_s.is_finite() && opts.time_limit_s > 0.0) {
            return fail(AltpathsStatus::InvalidArgument, "time_limit_s must be positive");
        }
        let options = SolveOptions {
            time_limit: Duration::from_secs_f64(opts.time_limit_s),
            node_limit: (opts.node_limit > 0).then_some(opts.node_limit),
            warm_start: opts.warm_start,
            oracle_cap: opts.oracle_cap,
            filter: if opts.product_filter {
                FilterMode::Product
            } else {
                FilterMode::Bottleneck
            },
        };
        let method = match method {
            AltpathsMethod::Benders => Method::Benders,
            AltpathsMethod::Rapcp => Method::Rapcp,
            AltpathsMethod::Rapcpa2 => Method::Rapcpa2,
            AltpathsMethod::Oracle => Method::Oracle,
        };
        match solve(&inst.inner, method, &options) {
            Ok(outcome) => {
                *out = Box::into_raw(Box::new(AltpathsSolution {
                    file: outcome.to_file(&inst.inner),
                    pathset: outcome.pathset,
                    instance: inst.inner.clone(),
                }));
                AltpathsStatus::Ok
            }
            Err(SolveError::Refused(e)) => fail(AltpathsStatus::Refused, e.to_string()),
        }
    })
}

/// # Safety
/// `solution` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solution_free(solution: *mut AltpathsSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solution_status(solution: *const AltpathsSolution) -> AltpathsSolveStatus {
    match solution.as_ref().map(|s| s.file.status) {
        Some(Status::Optimal) => AltpathsSolveStatus::Optimal,
        Some(Status::TimeLimitIncumbent) => AltpathsSolveStatus::LimitReached,
        Some(Status::Infeasible) | None => AltpathsSolveStatus::Infeasible,
    }
}

/// Worst-case flow and total cost. Fails with `InvalidArgument` for an
/// infeasible result.
///
/// # Safety
/// `solution` must be a live handle; `z` and `cost` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solution_objective(
    solution: *const AltpathsSolution,
    z: *mut i64,
    cost: *mut i64,
) -> AltpathsStatus {
    guard(|| {
        let Some(sol) = solution.as_ref() else {
            return fail(AltpathsStatus::NullPointer, "solution is null");
        };
        if z.is_null() || cost.is_null() {
            return fail(AltpathsStatus::NullPointer, "output pointer is null");
        }
        match (sol.file.z, sol.file.cost) {
            (Some(zv), Some(cv)) => {
                *z = zv;
                *cost = cv;
                AltpathsStatus::Ok
            }
            _ => fail(AltpathsStatus::InvalidArgument, "the instance is infeasible"),
        }
    })
}

/// Number of paths (0 when infeasible).
///
/// # Safety
/// `solution` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solution_path_count(solution: *const AltpathsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.file.paths.len())
}

/// Borrows path `index` as an array of arc ids owned by the solution.
///
/// # Safety
/// `solution` must be a live handle; `arcs` and `len` valid pointers. The
/// array is valid until the solution is freed.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solution_path(
    solution: *const AltpathsSolution,
    index: usize,
    arcs: *mut *const u32,
    len: *mut usize,
) -> AltpathsStatus {
    guard(|| {
        let Some(sol) = solution.as_ref() else {
            return fail(AltpathsStatus::NullPointer, "solution is null");
        };
        if arcs.is_null() || len.is_null() {
            return fail(AltpathsStatus::NullPointer, "output pointer is null");
        }
        let Some(path) = sol.file.paths.get(index) else {
            return fail(
                AltpathsStatus::InvalidArgument,
                format!("path index {index} out of range (have {})", sol.file.paths.len()),
            );
        };
        *arcs = path.as_ptr();
        *len = path.len();
        AltpathsStatus::Ok
    })
}

/// Quality indicators of the returned paths.
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solution_kpis(
    solution: *const AltpathsSolution,
    out: *mut AltpathsKpis,
) -> AltpathsStatus {
    guard(|| {
        let Some(sol) = solution.as_ref() else {
            return fail(AltpathsStatus::NullPointer, "solution is null");
        };
        if out.is_null() {
            return fail(AltpathsStatus::NullPointer, "out is null");
        }
        match kpis(&sol.instance, &sol.pathset, sol.file.stats.time_s, sol.file.status) {
            Ok(r) => {
                *out = AltpathsKpis {
                    cost: r.cost,
                    min_surviving_paths: r.min_surviving_paths,
                    min_max_flow: r.min_max_flow,
                    path_disjointness: r.path_disjointness,
                };
                AltpathsStatus::Ok
            }
            Err(e) => fail(AltpathsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// The solution as JSON. Release the string with [`altpaths_string_free`].
///
/// # Safety
/// `solution` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn altpaths_solution_to_json(
    solution: *const AltpathsSolution,
    out: *mut *mut c_char,
) -> AltpathsStatus {
    guard(|| {
        let Some(sol) = solution.as_ref() else {
            return fail(AltpathsStatus::NullPointer, "solution is null");
        };
        if out.is_null() {
            return fail(AltpathsStatus::NullPointer, "out is null");
        }
        let text = CString::new(to_json(&sol.file)).expect("JSON has no NUL bytes");
        *out = text.into_raw();
        AltpathsStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn altpaths_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
