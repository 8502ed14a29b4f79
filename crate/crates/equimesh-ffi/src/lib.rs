//! C ABI over the equimesh library.
//!
//! Conventions: every fallible call returns an [`EqmStatus`] and writes its
//! result through an out pointer; handles are opaque and freed with the
//! matching `*_free` function; [`eqm_last_error_message`] returns a
//! thread-local message for the most recent failure. Panics are caught at
//! the boundary and reported as `EQM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use equimesh::adapt::{self, AdaptOptions, AdaptiveResult, ConvergedBy};
use equimesh::error::Error;
use equimesh::fem::{self, FemSolution, Problem};
use equimesh::mesh::{self, CellField, Mesh};
use equimesh::problems::{make_problem, BenchmarkSpec};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidAdaptationFunction = 3,
    NumericError = 4,
    IllPosedProblem = 5,
    SingularSystem = 6,
    OutOfDomain = 7,
    Unsupported = 8,
    IoError = 9,
    Panic = 10,
}

/// Which stopping criterion ended an adaptive run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqmConvergedBy {
    Quality = 0,
    MeshDiff = 1,
    MaxIter = 2,
}

/// Iteration controls of an adaptive run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EqmAdaptOptions {
    pub kappa: f64,
    pub tol_mesh: f64,
    pub max_iter: usize,
}

/// Opaque problem handle.
pub struct EqmProblem {
    inner: Problem,
}

/// Opaque mesh handle.
pub struct EqmMesh {
    inner: Mesh,
}

/// Opaque solution handle.
pub struct EqmSolution {
    inner: FemSolution,
}

/// Opaque adaptive-result handle.
pub struct EqmResult {
    inner: AdaptiveResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn status_of(err: &Error) -> EqmStatus {
    match err {
        Error::InvalidArgument(_) => EqmStatus::InvalidArgument,
        Error::InvalidAdaptationFunction(_) => EqmStatus::InvalidAdaptationFunction,
        Error::Numeric(_) => EqmStatus::NumericError,
        Error::IllPosed(_) => EqmStatus::IllPosedProblem,
        Error::SingularSystem(_) => EqmStatus::SingularSystem,
        Error::OutOfDomain(_) => EqmStatus::OutOfDomain,
        Error::Unsupported(_) => EqmStatus::Unsupported,
        Error::Io(_) => EqmStatus::IoError,
    }
}

fn guard(body: impl FnOnce() -> EqmStatus) -> EqmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("panic crossed the FFI boundary");
            EqmStatus::Panic
        }
    }
}

fn fail(err: Error) -> EqmStatus {
    set_error(&err.to_string());
    status_of(&err)
}

/// Message for the most recent error on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn eqm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> EqmStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return EqmStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(value));
    EqmStatus::Ok
}

// --- problems ---------------------------------------------------------

unsafe fn make_problem_out(spec: BenchmarkSpec, out: *mut *mut EqmProblem) -> EqmStatus {
    match make_problem(&spec) {
        Ok(problem) => write_out(out, EqmProblem { inner: problem }),
        Err(e) => fail(e),
    }
}

/// Reaction-diffusion benchmark with boundary layers at both ends.
///
/// # Safety
/// `out` must be a valid pointer to an uninitialized handle slot.
#[no_mangle]
pub unsafe extern "C" fn eqm_problem_reaction_diffusion(
    epsilon: f64,
    out: *mut *mut EqmProblem,
) -> EqmStatus {
    guard(|| make_problem_out(BenchmarkSpec::ReactionDiffusion { epsilon }, out))
}

/// Convection-dominated benchmark with a boundary layer at x = 1.
///
/// # Safety
/// `out` must be a valid pointer to an uninitialized handle slot.
#[no_mangle]
pub unsafe extern "C" fn eqm_problem_convection_dominated(
    epsilon: f64,
    out: *mut *mut EqmProblem,
) -> EqmStatus {
    guard(|| make_problem_out(BenchmarkSpec::ConvectionDominated { epsilon }, out))
}

/// Singular-coefficient benchmark with manufactured solution.
///
/// # Safety
/// `out` must be a valid pointer to an uninitialized handle slot.
#[no_mangle]
pub unsafe extern "C" fn eqm_problem_babuska_rheinboldt(
    p: f64,
    q: f64,
    r: f64,
    alpha: f64,
    out: *mut *mut EqmProblem,
) -> EqmStatus {
    guard(|| make_problem_out(BenchmarkSpec::BabuskaRheinboldt { p, q, r, alpha }, out))
}

/// # Safety
/// `problem` must come from an `eqm_problem_*` constructor; passing it
/// again afterwards is undefined.
#[no_mangle]
pub unsafe extern "C" fn eqm_problem_free(problem: *mut EqmProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

// --- meshes -----------------------------------------------------------

/// Uniform mesh with `n` cells.
///
/// # Safety
/// `out` must be a valid pointer to an uninitialized handle slot.
#[no_mangle]
pub unsafe extern "C" fn eqm_mesh_uniform(n: usize, out: *mut *mut EqmMesh) -> EqmStatus {
    guard(|| match Mesh::uniform(n) {
        Ok(m) => write_out(out, EqmMesh { inner: m }),
        Err(e) => fail(e),
    })
}

/// Mesh from an explicit node vector (must start at 0, end at 1, increase).
///
/// # Safety
/// `nodes` must point to `len` readable doubles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn eqm_mesh_from_nodes(
    nodes: *const f64,
    len: usize,
    out: *mut *mut EqmMesh,
) -> EqmStatus {
    guard(|| {
        if nodes.is_null() {
            set_error("nodes pointer is null");
            return EqmStatus::NullPointer;
        }
        let slice = std::slice::from_raw_parts(nodes, len);
        match Mesh::new(slice.to_vec()) {
            Ok(m) => write_out(out, EqmMesh { inner: m }),
            Err(e) => fail(e),
        }
    })
}

/// Number of nodes (cells + 1); 0 for a null handle.
///
/// # Safety
/// `mesh` must be a live mesh handle or null.
#[no_mangle]
pub unsafe extern "C" fn eqm_mesh_node_count(mesh: *const EqmMesh) -> usize {
    if mesh.is_null() {
        return 0;
    }
    (*mesh).inner.nodes().len()
}

/// Copy the node coordinates into `buf` (length `len` >= node count).
///
/// # Safety
/// `mesh` must be live; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn eqm_mesh_copy_nodes(
    mesh: *const EqmMesh,
    buf: *mut f64,
    len: usize,
) -> EqmStatus {
    guard(|| {
        if mesh.is_null() || buf.is_null() {
            set_error("null handle or buffer");
            return EqmStatus::NullPointer;
        }
        let nodes = (*mesh).inner.nodes();
        if len < nodes.len() {
            set_error("buffer too small");
            return EqmStatus::InvalidArgument;
        }
        ptr::copy_nonoverlapping(nodes.as_ptr(), buf, nodes.len());
        EqmStatus::Ok
    })
}

/// # Safety
/// `mesh` must come from this library; passing it again afterwards is
/// undefined.
#[no_mangle]
pub unsafe extern "C" fn eqm_mesh_free(mesh: *mut EqmMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Equidistribute a per-cell density over `mesh` (one value per cell).
///
/// # Safety
/// `mesh` must be live; `rho` must point to `len` readable doubles; `out`
/// as above.
#[no_mangle]
pub unsafe extern "C" fn eqm_equidistribute(
    mesh: *const EqmMesh,
    rho: *const f64,
    len: usize,
    out: *mut *mut EqmMesh,
) -> EqmStatus {
    guard(|| {
        if mesh.is_null() || rho.is_null() {
            set_error("null handle or density");
            return EqmStatus::NullPointer;
        }
        let density = CellField::new(std::slice::from_raw_parts(rho, len).to_vec());
        match mesh::equidistribute(&(*mesh).inner, &density) {
            Ok(m) => write_out(out, EqmMesh { inner: m }),
            Err(e) => fail(e),
        }
    })
}

/// Equidistribution quality per cell, written to `q_out` (length `len`).
///
/// # Safety
/// `mesh` must be live; `rho` and `q_out` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn eqm_quality_measure(
    mesh: *const EqmMesh,
    rho: *const f64,
    len: usize,
    q_out: *mut f64,
) -> EqmStatus {
    guard(|| {
        if mesh.is_null() || rho.is_null() || q_out.is_null() {
            set_error("null handle or buffer");
            return EqmStatus::NullPointer;
        }
        let density = CellField::new(std::slice::from_raw_parts(rho, len).to_vec());
        match mesh::quality_measure(&(*mesh).inner, &density) {
            Ok(q) => {
                ptr::copy_nonoverlapping(q.values().as_ptr(), q_out, q.len());
                EqmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

// --- direct solves ----------------------------------------------------

/// Solve the problem on a fixed mesh.
///
/// # Safety
/// `problem` and `mesh` must be live handles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn eqm_solve(
    problem: *const EqmProblem,
    mesh: *const EqmMesh,
    out: *mut *mut EqmSolution,
) -> EqmStatus {
    guard(|| {
        if problem.is_null() || mesh.is_null() {
            set_error("null problem or mesh handle");
            return EqmStatus::NullPointer;
        }
        match fem::solve(&(*problem).inner, &(*mesh).inner) {
            Ok(sol) => write_out(out, EqmSolution { inner: sol }),
            Err(e) => fail(e),
        }
    })
}

/// Evaluate value and derivative of a solution at `x` in [0, 1].
///
/// # Safety
/// `solution` must be live; `value` and `derivative` must be writable or
/// null (null skips that output).
#[no_mangle]
pub unsafe extern "C" fn eqm_solution_evaluate(
    solution: *const EqmSolution,
    x: f64,
    value: *mut f64,
    derivative: *mut f64,
) -> EqmStatus {
    guard(|| {
        if solution.is_null() {
            set_error("null solution handle");
            return EqmStatus::NullPointer;
        }
        match (*solution).inner.evaluate(x) {
            Ok((v, d)) => {
                if !value.is_null() {
                    *value = v;
                }
                if !derivative.is_null() {
                    *derivative = d;
                }
                EqmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of nodal values; 0 for a null handle.
///
/// # Safety
/// `solution` must be a live solution handle or null.
#[no_mangle]
pub unsafe extern "C" fn eqm_solution_node_count(solution: *const EqmSolution) -> usize {
    if solution.is_null() {
        return 0;
    }
    (*solution).inner.nodal().len()
}

/// Copy nodal values into `buf` (length `len` >= node count).
///
/// # Safety
/// `solution` must be live; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn eqm_solution_copy_values(
    solution: *const EqmSolution,
    buf: *mut f64,
    len: usize,
) -> EqmStatus {
    guard(|| {
        if solution.is_null() || buf.is_null() {
            set_error("null handle or buffer");
            return EqmStatus::NullPointer;
        }
        let nodal = (*solution).inner.nodal();
        if len < nodal.len() {
            set_error("buffer too small");
            return EqmStatus::InvalidArgument;
        }
        ptr::copy_nonoverlapping(nodal.as_ptr(), buf, nodal.len());
        EqmStatus::Ok
    })
}

/// # Safety
/// `solution` must come from this library; passing it again afterwards is
/// undefined.
#[no_mangle]
pub unsafe extern "C" fn eqm_solution_free(solution: *mut EqmSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

// --- adaptive solves --------------------------------------------------

/// Default iteration controls (kappa 1.01, tol 1e-8, cap 1000).
#[no_mangle]
pub extern "C" fn eqm_adapt_options_default() -> EqmAdaptOptions {
    let d = AdaptOptions::default();
    EqmAdaptOptions {
        kappa: d.kappa,
        tol_mesh: d.tol_mesh,
        max_iter: d.max_iter,
    }
}

/// Run the adaptive iteration from a uniform mesh with `n` cells.
/// A null `options` uses the defaults.
///
/// # Safety
/// `problem` must be live; `options` must be null or point to valid
/// options; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn eqm_solve_adaptive(
    problem: *const EqmProblem,
    n: usize,
    options: *const EqmAdaptOptions,
    out: *mut *mut EqmResult,
) -> EqmStatus {
    guard(|| {
        if problem.is_null() {
            set_error("null problem handle");
            return EqmStatus::NullPointer;
        }
        let defaults = AdaptOptions::default();
        let opts = if options.is_null() {
            defaults
        } else {
            AdaptOptions {
                kappa: (*options).kappa,
                tol_mesh: (*options).tol_mesh,
                max_iter: (*options).max_iter,
                record_trace: false,
            }
        };
        match adapt::solve_adaptive(&(*problem).inner, n, &opts) {
            Ok(result) => write_out(out, EqmResult { inner: result }),
            Err(e) => fail(e),
        }
    })
}

/// Number of mesh updates applied before acceptance.
///
/// # Safety
/// `result` must be a live result handle or null.
#[no_mangle]
pub unsafe extern "C" fn eqm_result_iterations(result: *const EqmResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).inner.iterations
}

/// Which stopping criterion fired.
///
/// # Safety
/// `result` must be a live result handle (null reports MaxIter).
#[no_mangle]
pub unsafe extern "C" fn eqm_result_converged_by(result: *const EqmResult) -> EqmConvergedBy {
    if result.is_null() {
        return EqmConvergedBy::MaxIter;
    }
    match (*result).inner.converged_by {
        ConvergedBy::Quality => EqmConvergedBy::Quality,
        ConvergedBy::MeshDiff => EqmConvergedBy::MeshDiff,
        ConvergedBy::MaxIter => EqmConvergedBy::MaxIter,
    }
}

/// Copy of the final mesh.
///
/// # Safety
/// `result` must be live; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn eqm_result_mesh(
    result: *const EqmResult,
    out: *mut *mut EqmMesh,
) -> EqmStatus {
    guard(|| {
        if result.is_null() {
            set_error("null result handle");
            return EqmStatus::NullPointer;
        }
        write_out(
            out,
            EqmMesh {
                inner: (*result).inner.final_mesh.clone(),
            },
        )
    })
}

/// Copy of the final solution.
///
/// # Safety
/// `result` must be live; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn eqm_result_solution(
    result: *const EqmResult,
    out: *mut *mut EqmSolution,
) -> EqmStatus {
    guard(|| {
        if result.is_null() {
            set_error("null result handle");
            return EqmStatus::NullPointer;
        }
        write_out(
            out,
            EqmSolution {
                inner: (*result).inner.final_solution.clone(),
            },
        )
    })
}

/// Largest equidistribution quality value on the final mesh.
///
/// # Safety
/// `result` must be a live result handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn eqm_result_max_quality(result: *const EqmResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    (*result).inner.final_state.max_quality()
}

/// Normalization sigma_h of the final adaptation function.
///
/// # Safety
/// `result` must be a live result handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn eqm_result_sigma(result: *const EqmResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    (*result).inner.final_state.sigma
}

/// Intensity alpha_h of the final iterate.
///
/// # Safety
/// `result` must be a live result handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn eqm_result_alpha(result: *const EqmResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    (*result).inner.final_state.alpha
}

unsafe fn report_field(
    result: *const EqmResult,
    out: *mut f64,
    pick: impl Fn(&equimesh::ErrorReport) -> f64,
) -> EqmStatus {
    if result.is_null() || out.is_null() {
        set_error("null result handle or out pointer");
        return EqmStatus::NullPointer;
    }
    match &(*result).inner.final_report {
        Some(report) => {
            *out = pick(report);
            EqmStatus::Ok
        }
        None => {
            set_error("problem has no exact solution");
            EqmStatus::Unsupported
        }
    }
}

/// H1 seminorm error against the exact solution (EQM_STATUS_UNSUPPORTED
/// when the problem has none).
///
/// # Safety
/// `result` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_result_h1_error(result: *const EqmResult, out: *mut f64) -> EqmStatus {
    guard(|| report_field(result, out, |r| r.h1_semi))
}

/// Regularized estimator eta~ of the final iterate.
///
/// # Safety
/// `result` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eqm_result_eta_tilde(
    result: *const EqmResult,
    out: *mut f64,
) -> EqmStatus {
    guard(|| report_field(result, out, |r| r.eta_tilde))
}

/// # Safety
/// `result` must come from this library; passing it again afterwards is
/// undefined.
#[no_mangle]
pub unsafe extern "C" fn eqm_result_free(result: *mut EqmResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
