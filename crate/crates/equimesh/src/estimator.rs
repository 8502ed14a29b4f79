//! Residual-based a posteriori estimation and true error norms.
//!
//! From a computed solution this module derives, per cell, the L2 average
//! of the strong residual r_h = f + a'u_h' - bu_h' - cu_h, then the
//! intensity alpha_h, the adaptation function rho, its normalization
//! sigma_h, and the estimators eta and eta~ that bound the H1 error.

use crate::error::{Error, Result};
use crate::fem::{FemSolution, Problem};
use crate::mesh::{self, CellField, Mesh};
use crate::quadrature::integrate;

/// Guard against division by zero when the residual vanishes identically;
/// rho then collapses to 1 and the mesh stays uniform.
const ALPHA_FLOOR: f64 = 1e-30;

/// Panels of the fixed grid used for the mesh-independent L^{2/3}
/// quasi-norm of the exact residual. Fine enough to resolve the boundary
/// layers of the benchmark problems at their default parameters.
const QUASI_NORM_PANELS: usize = 4096;

/// Per-cell L2 averages of the residual of `sol`,
/// `<r_h>_i = (h_i^-1 \int |r_h|^2)^(1/2)`.
pub fn residual_averages(problem: &Problem, sol: &FemSolution) -> Result<CellField> {
    let mesh = sol.mesh();
    let nodal = sol.nodal();
    let mut values = Vec::with_capacity(mesh.n_elements());
    for (i, &u_left) in nodal[..mesh.n_elements()].iter().enumerate() {
        let (xl, xr) = mesh.cell(i);
        let h = xr - xl;
        let slope = sol.cell_slope(i);
        let mass = integrate(
            |x| {
                let uh = u_left + slope * (x - xl);
                let r = (problem.f)(x) + (problem.a_prime)(x) * slope
                    - (problem.b)(x) * slope
                    - (problem.c)(x) * uh;
                r * r
            },
            xl,
            xr,
        );
        if !mass.is_finite() {
            return Err(Error::Numeric(format!(
                "residual integral {mass} in cell {i}"
            )));
        }
        values.push((mass / h).sqrt());
    }
    Ok(CellField::new(values))
}

/// Intensity parameter `alpha_h = [sum_i h_i <r_h>_i^(2/3)]^3`.
pub fn intensity(mesh: &Mesh, averages: &CellField) -> Result<f64> {
    if averages.len() != mesh.n_elements() {
        return Err(Error::InvalidArgument(format!(
            "{} averages for {} cells",
            averages.len(),
            mesh.n_elements()
        )));
    }
    let mut s = 0.0;
    for (i, &r) in averages.values().iter().enumerate() {
        if r.is_nan() || r < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "residual average {r} in cell {i} must be nonnegative"
            )));
        }
        s += mesh.h(i) * r.cbrt().powi(2);
    }
    Ok(s.powi(3))
}

/// Adaptation function `rho_i = (1 + <r_h>_i^2 / alpha_h)^(1/3)`.
///
/// Always at least 1; `alpha` is floored at 1e-30 so a vanishing residual
/// yields rho = 1 rather than a division by zero.
pub fn adaptation_function(averages: &CellField, alpha: f64) -> CellField {
    let denom = alpha.max(ALPHA_FLOOR);
    CellField::new(
        averages
            .values()
            .iter()
            .map(|&r| (1.0 + r * r / denom).cbrt())
            .collect(),
    )
}

/// The estimator pair (eta, eta~):
/// `eta^2 = sum_i h_i^3 <r_h>_i^2` and `eta~^2 = alpha_h sum_i (h_i rho_i)^3`.
pub fn estimators(
    mesh: &Mesh,
    averages: &CellField,
    alpha: f64,
    rho: &CellField,
) -> Result<(f64, f64)> {
    let n = mesh.n_elements();
    if averages.len() != n || rho.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} averages and {} densities for {} cells",
            averages.len(),
            rho.len(),
            n
        )));
    }
    let mut eta2 = 0.0;
    let mut eta_tilde2 = 0.0;
    for i in 0..n {
        let h = mesh.h(i);
        eta2 += h.powi(3) * averages[i] * averages[i];
        eta_tilde2 += (h * rho[i]).powi(3);
    }
    Ok((eta2.sqrt(), (alpha * eta_tilde2).sqrt()))
}

/// Everything the mesh update consumes, computed from one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationState {
    /// <r_h>_i per cell.
    pub averages: CellField,
    /// alpha_h.
    pub alpha: f64,
    /// rho_i per cell, all >= 1.
    pub rho: CellField,
    /// sigma_h = sum_i rho_i h_i.
    pub sigma: f64,
    /// Q_eq,i per cell.
    pub quality: CellField,
}

impl AdaptationState {
    pub fn compute(problem: &Problem, sol: &FemSolution) -> Result<Self> {
        let mesh = sol.mesh();
        let averages = residual_averages(problem, sol)?;
        let alpha = intensity(mesh, &averages)?;
        let rho = adaptation_function(&averages, alpha);
        let sigma = (0..mesh.n_elements()).map(|i| rho[i] * mesh.h(i)).sum();
        let quality = mesh::quality_measure(mesh, &rho)?;
        Ok(Self {
            averages,
            alpha,
            rho,
            sigma,
            quality,
        })
    }

    pub fn max_quality(&self) -> f64 {
        self.quality.max()
    }
}

/// Error norms and estimator values for a solution with known exact u.
///
/// The estimator fields hold the computable error bound: the raw residual
/// quantities of [`estimators`] divided by `2 min a(x)`, which makes them
/// directly comparable to `h1_semi`. The raw values are available from
/// [`estimators`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// ||(u - u_h)'|| over [0, 1].
    pub h1_semi: f64,
    pub l2: f64,
    pub linf: f64,
    pub eta: f64,
    pub eta_tilde: f64,
    pub alpha_sqrt: f64,
    /// ||r||_{L^{2/3}} of the exact residual, when the problem provides it.
    pub r_quasi_norm: Option<f64>,
}

/// Smallest value of the diffusion coefficient on a fixed sample grid.
fn min_diffusion(problem: &Problem) -> Result<f64> {
    const SAMPLES: usize = 1024;
    let mut min = f64::INFINITY;
    for i in 0..=SAMPLES {
        let a = (problem.a)(i as f64 / SAMPLES as f64);
        if !a.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite diffusion coefficient {a}"
            )));
        }
        min = min.min(a);
    }
    if min <= 0.0 {
        return Err(Error::IllPosed(format!(
            "diffusion coefficient reaches {min}"
        )));
    }
    Ok(min)
}

/// ||(u - u_h)'|| via the shared quadrature, cell by cell.
pub fn h1_seminorm_error(problem: &Problem, sol: &FemSolution) -> Result<f64> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::Unsupported("problem has no exact solution".into()))?;
    let mesh = sol.mesh();
    let mut sum = 0.0;
    for i in 0..mesh.n_elements() {
        let (xl, xr) = mesh.cell(i);
        let slope = sol.cell_slope(i);
        sum += integrate(|x| ((exact.u_prime)(x) - slope).powi(2), xl, xr);
    }
    Ok(sum.sqrt())
}

/// `(\int |r|^{2/3})^{3/2}` of the exact residual on a fixed 4096-panel
/// grid, independent of the adaptive mesh.
pub fn residual_quasi_norm(problem: &Problem) -> Option<f64> {
    let r = problem.exact_residual.as_ref()?;
    let mut sum = 0.0;
    let w = 1.0 / QUASI_NORM_PANELS as f64;
    for p in 0..QUASI_NORM_PANELS {
        let a = p as f64 * w;
        sum += integrate(|x| r(x).abs().cbrt().powi(2), a, a + w);
    }
    Some(sum.sqrt().powi(3))
}

const LINF_SAMPLES_PER_CELL: usize = 17;

/// Full error report: true norms against the exact solution plus the
/// estimator values of the computed solution.
pub fn error_norms(problem: &Problem, sol: &FemSolution) -> Result<ErrorReport> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::Unsupported("problem has no exact solution".into()))?;
    let mesh = sol.mesh();
    let nodal = sol.nodal();

    let mut h1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for (i, &u_left) in nodal[..mesh.n_elements()].iter().enumerate() {
        let (xl, xr) = mesh.cell(i);
        let h = xr - xl;
        let slope = sol.cell_slope(i);
        h1 += integrate(|x| ((exact.u_prime)(x) - slope).powi(2), xl, xr);
        l2 += integrate(
            |x| ((exact.u)(x) - (u_left + slope * (x - xl))).powi(2),
            xl,
            xr,
        );
        for s in 0..LINF_SAMPLES_PER_CELL {
            let x = xl + h * (s as f64) / (LINF_SAMPLES_PER_CELL - 1) as f64;
            linf = linf.max(((exact.u)(x) - (u_left + slope * (x - xl))).abs());
        }
    }

    let averages = residual_averages(problem, sol)?;
    let alpha = intensity(mesh, &averages)?;
    let rho = adaptation_function(&averages, alpha);
    let (eta, eta_tilde) = estimators(mesh, &averages, alpha, &rho)?;
    let bound_scale = 1.0 / (2.0 * min_diffusion(problem)?);

    Ok(ErrorReport {
        h1_semi: h1.sqrt(),
        l2: l2.sqrt(),
        linf,
        eta: bound_scale * eta,
        eta_tilde: bound_scale * eta_tilde,
        alpha_sqrt: alpha.sqrt(),
        r_quasi_norm: residual_quasi_norm(problem),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;

    fn poisson(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Problem {
        Problem::new("poisson", |_| 1.0, |_| 0.0, |_| 0.0, |_| 0.0, |_| 0.0, f)
    }

    #[test]
    fn averages_reduce_to_f_for_laplacian() {
        // a=1, b=c=0: r_h = f regardless of u_h
        let mesh = Mesh::new(vec![0.0, 0.4, 1.0]).unwrap();
        let sol = FemSolution::new(mesh, vec![0.0, 0.7, 0.0]).unwrap();
        let avg = residual_averages(&poisson(|_| 3.0), &sol).unwrap();
        for &v in avg.values() {
            assert!((v - 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn averages_hand_integration() {
        // c=1, a=1, b=0, f=0, hat solution: r_h = -u_h,
        // <r>_1 = (2 \int_0^0.5 (2x)^2)^(1/2) = sqrt(1/3)
        let mesh = Mesh::new(vec![0.0, 0.5, 1.0]).unwrap();
        let sol = FemSolution::new(mesh, vec![0.0, 1.0, 0.0]).unwrap();
        let p = Problem::new(
            "reaction",
            |_| 1.0,
            |_| 0.0,
            |_| 0.0,
            |_| 0.0,
            |_| 1.0,
            |_| 0.0,
        );
        let avg = residual_averages(&p, &sol).unwrap();
        let expected = (1.0f64 / 3.0).sqrt();
        assert!((avg[0] - expected).abs() < 1e-14);
        assert!((avg[1] - expected).abs() < 1e-14);
    }

    #[test]
    fn averages_reject_nonfinite() {
        let mesh = Mesh::uniform(2).unwrap();
        let sol = FemSolution::new(mesh, vec![0.0, 0.5, 0.0]).unwrap();
        let p = poisson(|x| 1.0 / (x - 0.25));
        assert!(matches!(
            residual_averages(&p, &sol),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn intensity_constants() {
        let mesh = Mesh::uniform(5).unwrap();
        let a1 = intensity(&mesh, &CellField::constant(1.0, 5)).unwrap();
        assert!((a1 - 1.0).abs() < 1e-13);
        let a8 = intensity(&mesh, &CellField::constant(8.0, 5)).unwrap();
        assert!((a8 - 64.0).abs() < 64.0 * 1e-13);
    }

    #[test]
    fn intensity_hand_case() {
        let mesh = Mesh::new(vec![0.0, 0.5, 1.0]).unwrap();
        let a = intensity(&mesh, &CellField::new(vec![1.0, 8.0])).unwrap();
        assert!((a - 15.625).abs() < 1e-12);
    }

    #[test]
    fn intensity_rejects_negative() {
        let mesh = Mesh::uniform(2).unwrap();
        assert!(intensity(&mesh, &CellField::new(vec![1.0, -1.0])).is_err());
        assert!(intensity(&mesh, &CellField::new(vec![1.0])).is_err());
    }

    #[test]
    fn adaptation_function_cases() {
        let rho = adaptation_function(&CellField::new(vec![0.0]), 0.0);
        assert_eq!(rho[0], 1.0);

        let rho = adaptation_function(&CellField::new(vec![7.0f64.sqrt()]), 1.0);
        assert!((rho[0] - 2.0).abs() < 1e-14);

        // constant averages with sum h = 1: alpha = <r>^2, rho = 2^(1/3)
        let mesh = Mesh::uniform(4).unwrap();
        let avg = CellField::constant(5.0, 4);
        let alpha = intensity(&mesh, &avg).unwrap();
        assert!((alpha - 25.0).abs() < 25.0 * 1e-13);
        let rho = adaptation_function(&avg, alpha);
        let sigma: f64 = (0..4).map(|i| rho[i] * mesh.h(i)).sum();
        for &v in rho.values() {
            assert!((v - 2.0f64.cbrt()).abs() < 1e-12);
        }
        assert!((sigma - 2.0f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn estimator_values_uniform_constant() {
        // uniform N cells, <r> = 1: eta^2 = 1/N^2, eta~^2 = 2/N^2
        let n = 10usize;
        let mesh = Mesh::uniform(n).unwrap();
        let avg = CellField::constant(1.0, n);
        let alpha = intensity(&mesh, &avg).unwrap();
        let rho = adaptation_function(&avg, alpha);
        let (eta, eta_tilde) = estimators(&mesh, &avg, alpha, &rho).unwrap();
        let nf = n as f64;
        assert!((eta - 1.0 / nf).abs() < 1e-13);
        assert!((eta_tilde - 2.0f64.sqrt() / nf).abs() < 1e-13);
        assert!(eta_tilde >= eta);
    }

    #[test]
    fn estimator_zero_residual() {
        let mesh = Mesh::uniform(4).unwrap();
        let avg = CellField::constant(0.0, 4);
        let alpha = intensity(&mesh, &avg).unwrap();
        assert_eq!(alpha, 0.0);
        let rho = adaptation_function(&avg, alpha);
        let (eta, eta_tilde) = estimators(&mesh, &avg, alpha, &rho).unwrap();
        assert_eq!(eta, 0.0);
        assert_eq!(eta_tilde, 0.0);
    }

    #[test]
    fn scaling_leaves_rho_invariant() {
        let mesh = Mesh::new(vec![0.0, 0.2, 0.7, 1.0]).unwrap();
        let base = CellField::new(vec![0.3, 2.0, 11.0]);
        let alpha0 = intensity(&mesh, &base).unwrap();
        let rho0 = adaptation_function(&base, alpha0);
        for lambda in [1e-6, 1.0, 1e6] {
            let scaled = CellField::new(base.values().iter().map(|v| lambda * v).collect());
            let alpha = intensity(&mesh, &scaled).unwrap();
            assert!(
                (alpha - lambda * lambda * alpha0).abs() <= 1e-12 * lambda * lambda * alpha0,
                "alpha scaling broken for lambda = {lambda}"
            );
            let rho = adaptation_function(&scaled, alpha);
            for (a, b) in rho.values().iter().zip(rho0.values()) {
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn interpolant_h1_identity() {
        // u = x(1-x) interpolated on a uniform mesh: ||(u - Pi u)'|| = h/sqrt(3)
        for n in [4usize, 16, 64] {
            let mesh = Mesh::uniform(n).unwrap();
            let nodal: Vec<f64> = mesh.nodes().iter().map(|x| x * (1.0 - x)).collect();
            let sol = FemSolution::new(mesh, nodal).unwrap();
            let p = poisson(|_| 2.0).with_exact(|x| x * (1.0 - x), |x| 1.0 - 2.0 * x);
            let err = h1_seminorm_error(&p, &sol).unwrap();
            let h = 1.0 / n as f64;
            assert!((err - h / 3.0f64.sqrt()).abs() < 1e-8);
        }
    }

    #[test]
    fn exact_piecewise_linear_reproduction() {
        // exact u is itself piecewise linear on the mesh: all norms vanish
        let mesh = Mesh::new(vec![0.0, 0.5, 1.0]).unwrap();
        let sol = FemSolution::new(mesh, vec![0.0, 0.5, 0.0]).unwrap();
        let p = poisson(|_| 0.0).with_exact(
            |x| if x <= 0.5 { x } else { 1.0 - x },
            |x| if x <= 0.5 { 1.0 } else { -1.0 },
        );
        let report = error_norms(&p, &sol).unwrap();
        assert!(report.h1_semi < 1e-12);
        assert!(report.l2 < 1e-12);
        assert!(report.linf < 1e-12);
    }

    #[test]
    fn error_norms_requires_exact() {
        let mesh = Mesh::uniform(2).unwrap();
        let sol = FemSolution::new(mesh, vec![0.0, 0.1, 0.0]).unwrap();
        assert!(matches!(
            error_norms(&poisson(|_| 1.0), &sol),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn eta_matches_fine_composite_oracle() {
        // eta from the 5-point rule vs a 4096-panel midpoint evaluation of
        // ||r_h||^2 per cell, on a smooth residual
        let mesh = Mesh::new(vec![0.0, 0.3, 0.55, 1.0]).unwrap();
        let sol = FemSolution::new(mesh.clone(), vec![0.0, 0.4, -0.2, 0.0]).unwrap();
        let p = Problem::new(
            "smooth",
            |x| 1.0 + 0.5 * (2.0 * x).sin(),
            |x| (2.0 * x).cos(),
            |x| 0.3 * x,
            |_| 0.3,
            |x| 1.0 + x,
            |x| (3.0 * x).cos(),
        );
        let avg = residual_averages(&p, &sol).unwrap();
        let alpha = intensity(&mesh, &avg).unwrap();
        let rho = adaptation_function(&avg, alpha);
        let (eta, _) = estimators(&mesh, &avg, alpha, &rho).unwrap();

        let mut eta2_oracle = 0.0;
        for i in 0..mesh.n_elements() {
            let (xl, xr) = mesh.cell(i);
            let h = xr - xl;
            let slope = sol.cell_slope(i);
            let u_left = sol.nodal()[i];
            let panels = 4096;
            let dx = h / panels as f64;
            let mut mass = 0.0;
            for k in 0..panels {
                let x = xl + (k as f64 + 0.5) * dx;
                let uh = u_left + slope * (x - xl);
                let r = (p.f)(x) + (p.a_prime)(x) * slope - (p.b)(x) * slope - (p.c)(x) * uh;
                mass += r * r * dx;
            }
            eta2_oracle += h * h * mass;
        }
        let eta_oracle = eta2_oracle.sqrt();
        assert!((eta - eta_oracle).abs() <= 1e-6 * eta_oracle);
    }
}
