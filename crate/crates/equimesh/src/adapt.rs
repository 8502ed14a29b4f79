//! Fixed-point iteration coupling the solver and the mesh update.
//!
//! One step solves on the current mesh, builds the adaptation state from
//! the residual, and equidistributes the resulting density. The loop stops
//! when the quality measure drops to the threshold kappa, when consecutive
//! meshes agree to tol_mesh, or at the iteration cap. Divergence at small
//! N is expected and surfaces as a max-iter exit, not an error.

use crate::error::{Error, Result};
use crate::estimator::{self, AdaptationState, ErrorReport};
use crate::fem::{self, FemSolution, Problem};
use crate::mesh::{self, Mesh, SnParams, DEFAULT_RHO0};

/// Iteration controls. Defaults match the benchmark setup: kappa = 1.01,
/// mesh tolerance 1e-8, cap 1000.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptOptions {
    /// Quality threshold, close to and greater than one.
    pub kappa: f64,
    /// Tolerance on the max interior-node displacement between iterates.
    pub tol_mesh: f64,
    pub max_iter: usize,
    pub record_trace: bool,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        Self {
            kappa: 1.01,
            tol_mesh: 1e-8,
            max_iter: 1000,
            record_trace: false,
        }
    }
}

impl AdaptOptions {
    fn validate(&self) -> Result<()> {
        if self.kappa.is_nan() || self.kappa <= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "kappa must be greater than 1, got {}",
                self.kappa
            )));
        }
        if self.tol_mesh.is_nan() || self.tol_mesh < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tol_mesh must be nonnegative, got {}",
                self.tol_mesh
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which stopping criterion ended the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergedBy {
    Quality,
    MeshDiff,
    MaxIter,
}

impl std::fmt::Display for ConvergedBy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConvergedBy::Quality => "quality",
            ConvergedBy::MeshDiff => "mesh_diff",
            ConvergedBy::MaxIter => "max_iter",
        })
    }
}

/// One row of the iteration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub k: usize,
    /// Displacement to the next mesh generated from this iterate.
    pub mesh_diff: f64,
    pub max_quality: f64,
    /// H1 seminorm error of this iterate, when an exact solution exists.
    pub h1_error: Option<f64>,
    /// S_N bound violations of this iterate's mesh (diagnostic, rho0 = 10).
    pub sn_violations: usize,
}

/// Outcome of [`solve_adaptive`].
#[derive(Debug)]
pub struct AdaptiveResult {
    pub final_mesh: Mesh,
    pub final_solution: FemSolution,
    pub final_state: AdaptationState,
    /// Present when the problem carries an exact solution.
    pub final_report: Option<ErrorReport>,
    /// Number of mesh updates applied before acceptance.
    pub iterations: usize,
    pub converged_by: ConvergedBy,
    pub trace: Option<Vec<TraceEntry>>,
}

/// One application of the solve-then-equidistribute map: returns the
/// solution on `mesh`, the adaptation state derived from it, and the new
/// mesh. The new mesh has the same cell count.
pub fn adapt_step(problem: &Problem, mesh: &Mesh) -> Result<(FemSolution, AdaptationState, Mesh)> {
    let sol = fem::solve(problem, mesh)?;
    let state = AdaptationState::compute(problem, &sol)?;
    let next = mesh::equidistribute(mesh, &state.rho)?;
    Ok((sol, state, next))
}

fn report_if_exact(problem: &Problem, sol: &FemSolution) -> Result<Option<ErrorReport>> {
    match estimator::error_norms(problem, sol) {
        Ok(report) => Ok(Some(report)),
        Err(Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Run the adaptive iteration from the uniform mesh with `n` cells.
pub fn solve_adaptive(problem: &Problem, n: usize, opts: &AdaptOptions) -> Result<AdaptiveResult> {
    solve_adaptive_from(problem, Mesh::uniform(n)?, opts)
}

/// Run the adaptive iteration from a caller-supplied initial mesh.
pub fn solve_adaptive_from(
    problem: &Problem,
    initial: Mesh,
    opts: &AdaptOptions,
) -> Result<AdaptiveResult> {
    opts.validate()?;
    let sn_params = SnParams::new(DEFAULT_RHO0, initial.n_elements())?;
    let mut trace: Option<Vec<TraceEntry>> = opts.record_trace.then(Vec::new);

    let mut mesh = initial;
    let mut k = 0usize;
    let converged_by;
    loop {
        let (sol, state, next) = adapt_step(problem, &mesh)?;
        let diff = mesh::mesh_distance(&mesh, &next)?;
        let max_quality = state.max_quality();
        if let Some(entries) = trace.as_mut() {
            entries.push(TraceEntry {
                k,
                mesh_diff: diff,
                max_quality,
                h1_error: match estimator::h1_seminorm_error(problem, &sol) {
                    Ok(e) => Some(e),
                    Err(Error::Unsupported(_)) => None,
                    Err(e) => return Err(e),
                },
                sn_violations: mesh::validate_in_sn(&mesh, &sn_params).violation_count(),
            });
        }

        if max_quality <= opts.kappa {
            converged_by = ConvergedBy::Quality;
            break;
        }
        // cap check precedes the displacement check so iterations never
        // exceeds max_iter
        if k == opts.max_iter {
            converged_by = ConvergedBy::MaxIter;
            break;
        }
        if diff <= opts.tol_mesh {
            mesh = next;
            k += 1;
            converged_by = ConvergedBy::MeshDiff;
            break;
        }
        mesh = next;
        k += 1;
    }

    // re-solve so the reported (mesh, solution, state) triple is consistent
    let final_solution = fem::solve(problem, &mesh)?;
    let final_state = AdaptationState::compute(problem, &final_solution)?;
    let final_report = report_if_exact(problem, &final_solution)?;
    Ok(AdaptiveResult {
        final_mesh: mesh,
        final_solution,
        final_state,
        final_report,
        iterations: k,
        converged_by,
        trace,
    })
}

/// Pairwise convergence slopes `log(v_k / v_{k+1}) / log(n_{k+1} / n_k)`
/// for a sequence of (element count, positive value) pairs.
pub fn convergence_order(results: &[(usize, f64)]) -> Result<Vec<f64>> {
    if results.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 entries, got {}",
            results.len()
        )));
    }
    for w in results.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::InvalidArgument(format!(
                "element counts must increase, got {} then {}",
                w[0].0, w[1].0
            )));
        }
    }
    for &(n, v) in results {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "value {v} at n = {n} must be positive"
            )));
        }
    }
    Ok(results
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[1].0 as f64 / w[0].0 as f64).ln())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Problem {
        Problem::new("poisson", |_| 1.0, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0, f)
    }

    #[test]
    fn zero_data_is_immediate_fixed_point() {
        let p = poisson(|_| 0.0).with_exact(|_| 0.0, |_| 0.0);
        let result = solve_adaptive(
            &p,
            8,
            &AdaptOptions {
                record_trace: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(result.iterations, 0);
        assert_eq!(result.converged_by, ConvergedBy::Quality);
        for &v in result.final_solution.nodal() {
            assert_eq!(v, 0.0);
        }
        let trace = result.trace.unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].mesh_diff, 0.0);
        for &r in result.final_state.rho.values() {
            assert_eq!(r, 1.0);
        }
    }

    #[test]
    fn constant_residual_keeps_uniform_mesh() {
        // -u'' = 1: r_h = 1 everywhere, rho = 2^(1/3), uniform is a fixed point
        let p = poisson(|_| 1.0);
        let mesh = Mesh::uniform(6).unwrap();
        let (_, state, next) = adapt_step(&p, &mesh).unwrap();
        for &r in state.rho.values() {
            assert!((r - 2.0f64.cbrt()).abs() < 1e-12);
        }
        assert!(mesh::mesh_distance(&mesh, &next).unwrap() < 1e-13);
    }

    #[test]
    fn adapt_step_preserves_cell_count() {
        let p = poisson(|x| if x < 0.3 { 50.0 } else { 1.0 });
        let mesh = Mesh::uniform(9).unwrap();
        let (_, _, next) = adapt_step(&p, &mesh).unwrap();
        assert_eq!(next.n_elements(), 9);
    }

    #[test]
    fn options_validation() {
        let p = poisson(|_| 1.0);
        let bad = AdaptOptions {
            kappa: 1.0,
            ..Default::default()
        };
        assert!(solve_adaptive(&p, 4, &bad).is_err());
        let bad = AdaptOptions {
            max_iter: 0,
            ..Default::default()
        };
        assert!(solve_adaptive(&p, 4, &bad).is_err());
        let bad = AdaptOptions {
            tol_mesh: -1.0,
            ..Default::default()
        };
        assert!(solve_adaptive(&p, 4, &bad).is_err());
    }

    #[test]
    fn iterations_never_exceed_the_cap() {
        // steep data so a tiny cap is exhausted before quality converges
        let p = poisson(|x| 1.0 + 1e4 * (-(x * 300.0)).exp());
        for cap in [1usize, 2, 3] {
            let opts = AdaptOptions {
                max_iter: cap,
                ..Default::default()
            };
            let result = solve_adaptive(&p, 24, &opts).unwrap();
            assert_eq!(result.converged_by, ConvergedBy::MaxIter);
            assert_eq!(result.iterations, cap);
        }
    }

    #[test]
    fn quality_holds_at_quality_exit() {
        let p = poisson(|x| 1.0 + 40.0 * (-(x * 20.0)).exp());
        let opts = AdaptOptions::default();
        let result = solve_adaptive(&p, 32, &opts).unwrap();
        assert_eq!(result.converged_by, ConvergedBy::Quality);
        assert!(result.final_state.max_quality() <= opts.kappa + 1e-12);
        assert!(result.iterations <= opts.max_iter);
    }

    #[test]
    fn iterate_meshes_stay_valid() {
        let p = poisson(|x| 1.0 + 100.0 * (-(x * 30.0)).exp());
        let result = solve_adaptive(
            &p,
            16,
            &AdaptOptions {
                record_trace: true,
                ..Default::default()
            },
        )
        .unwrap();
        let nodes = result.final_mesh.nodes();
        assert_eq!(nodes[0], 0.0);
        assert_eq!(*nodes.last().unwrap(), 1.0);
        for w in nodes.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn convergence_order_exact_rates() {
        let first: Vec<(usize, f64)> = [16, 32, 64].iter().map(|&n| (n, 3.0 / n as f64)).collect();
        for s in convergence_order(&first).unwrap() {
            assert!((s - 1.0).abs() < 1e-12);
        }
        let second: Vec<(usize, f64)> = [16, 32, 64]
            .iter()
            .map(|&n| (n, 3.0 / (n * n) as f64))
            .collect();
        for s in convergence_order(&second).unwrap() {
            assert!((s - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn convergence_order_published_errors() {
        let slopes = convergence_order(&[(161, 3.39e-1), (321, 1.69e-1), (641, 8.46e-2)]).unwrap();
        for s in slopes {
            assert!((s - 1.0).abs() < 0.02, "slope {s}");
        }
    }

    #[test]
    fn convergence_order_rejects_bad_input() {
        assert!(convergence_order(&[(16, 1.0)]).is_err());
        assert!(convergence_order(&[(16, 1.0), (8, 0.5)]).is_err());
        assert!(convergence_order(&[(16, 1.0), (32, 0.0)]).is_err());
        assert!(convergence_order(&[(16, 1.0), (32, -2.0)]).is_err());
    }
}
