//! Linear finite elements for -(a u')' + b u' + c u = f on [0, 1] with
//! homogeneous Dirichlet conditions.
//!
//! Assembly integrates the bilinear form with the shared 5-point rule on
//! every cell; the interior system is tridiagonal because hat functions
//! overlap only with their neighbours.

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quadrature::{GAUSS5_POINTS, GAUSS5_WEIGHTS};

/// Pointwise coefficient or data function on [0, 1].
pub type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Exact solution of a problem, when known.
pub struct ExactSolution {
    pub u: ScalarFn,
    pub u_prime: ScalarFn,
}

/// Coefficients and data of the boundary value problem.
///
/// `a_prime` and `b_prime` are supplied analytically rather than
/// differenced numerically: the residual needs `a'` pointwise and the
/// coercivity check needs `b'`.
pub struct Problem {
    pub label: String,
    pub a: ScalarFn,
    pub a_prime: ScalarFn,
    pub b: ScalarFn,
    pub b_prime: ScalarFn,
    pub c: ScalarFn,
    pub f: ScalarFn,
    pub exact: Option<ExactSolution>,
    /// Residual of the exact solution, r = f + a'u' - bu' - cu.
    pub exact_residual: Option<ScalarFn>,
}

impl Problem {
    #[allow(clippy::too_many_arguments)]
    pub fn new<A, Ap, B, Bp, C, F>(
        label: impl Into<String>,
        a: A,
        a_prime: Ap,
        b: B,
        b_prime: Bp,
        c: C,
        f: F,
    ) -> Self
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        Ap: Fn(f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64) -> f64 + Send + Sync + 'static,
        Bp: Fn(f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            a: Box::new(a),
            a_prime: Box::new(a_prime),
            b: Box::new(b),
            b_prime: Box::new(b_prime),
            c: Box::new(c),
            f: Box::new(f),
            exact: None,
            exact_residual: None,
        }
    }

    pub fn with_exact<U, Up>(mut self, u: U, u_prime: Up) -> Self
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
        Up: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.exact = Some(ExactSolution {
            u: Box::new(u),
            u_prime: Box::new(u_prime),
        });
        self
    }

    pub fn with_exact_residual<R>(mut self, residual: R) -> Self
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.exact_residual = Some(Box::new(residual));
        self
    }
}

/// Interior system A U = F in banded storage.
///
/// `diag` has one entry per interior node; `sub` and `sup` are one shorter.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    fn check(&self) -> Result<()> {
        let m = self.diag.len();
        if m == 0 {
            return Err(Error::InvalidArgument("empty tridiagonal system".into()));
        }
        if self.sub.len() != m - 1 || self.sup.len() != m - 1 || self.rhs.len() != m {
            return Err(Error::InvalidArgument(format!(
                "inconsistent tridiagonal sizes: sub {}, diag {}, sup {}, rhs {}",
                self.sub.len(),
                m,
                self.sup.len(),
                self.rhs.len()
            )));
        }
        Ok(())
    }

    /// Residual A u - rhs, for diagnostics and tests.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let m = self.diag.len();
        (0..m)
            .map(|i| {
                let mut v = self.diag[i] * u[i] - self.rhs[i];
                if i > 0 {
                    v += self.sub[i - 1] * u[i - 1];
                }
                if i + 1 < m {
                    v += self.sup[i] * u[i + 1];
                }
                v
            })
            .collect()
    }
}

const COERCIVITY_TOL: f64 = 1e-12;

/// Assemble the interior stiffness matrix and load vector.
///
/// Checks `a > 0` and `c - b'/2 >= -1e-12` at every quadrature point;
/// non-finite coefficient values are rejected.
pub fn assemble(problem: &Problem, mesh: &Mesh) -> Result<TridiagonalSystem> {
    let n = mesh.n_elements();
    let m = n - 1;
    let mut sub = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m - 1];
    let mut rhs = vec![0.0; m];

    for k in 0..n {
        let (xl, xr) = mesh.cell(k);
        let h = xr - xl;
        let mid = 0.5 * (xl + xr);
        let half = 0.5 * h;

        let mut local = [[0.0; 2]; 2];
        let mut load = [0.0; 2];
        for (xi, w) in GAUSS5_POINTS.iter().zip(GAUSS5_WEIGHTS.iter()) {
            let x = mid + half * xi;
            let wx = half * w;
            let a = (problem.a)(x);
            let b = (problem.b)(x);
            let bp = (problem.b_prime)(x);
            let c = (problem.c)(x);
            let f = (problem.f)(x);
            if !(a.is_finite() && b.is_finite() && bp.is_finite() && c.is_finite() && f.is_finite())
            {
                return Err(Error::Numeric(format!("non-finite coefficient at x = {x}")));
            }
            if a <= 0.0 {
                return Err(Error::IllPosed(format!("a({x}) = {a} is not positive")));
            }
            if c - 0.5 * bp < -COERCIVITY_TOL {
                return Err(Error::IllPosed(format!(
                    "coercivity violated at x = {x}: c - b'/2 = {}",
                    c - 0.5 * bp
                )));
            }
            let phi = [(xr - x) / h, (x - xl) / h];
            let dphi = [-1.0 / h, 1.0 / h];
            for p in 0..2 {
                for q in 0..2 {
                    local[p][q] +=
                        wx * (a * dphi[q] * dphi[p] + b * dphi[q] * phi[p] + c * phi[q] * phi[p]);
                }
                load[p] += wx * f * phi[p];
            }
        }

        for p in 0..2 {
            let gp = k + p;
            if gp == 0 || gp == n {
                continue;
            }
            let row = gp - 1;
            rhs[row] += load[p];
            for (q, loc) in local[p].iter().enumerate() {
                let gq = k + q;
                if gq == 0 || gq == n {
                    continue;
                }
                let col = gq - 1;
                if col == row {
                    diag[row] += loc;
                } else if col + 1 == row {
                    sub[col] += loc;
                } else {
                    sup[row] += loc;
                }
            }
        }
    }

    Ok(TridiagonalSystem {
        sub,
        diag,
        sup,
        rhs,
    })
}

const PIVOT_FLOOR: f64 = 1e-300;

/// Thomas algorithm: forward elimination, back substitution.
pub fn solve_tridiagonal(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    sys.check()?;
    let m = sys.diag.len();
    let mut c_prime = vec![0.0; m];
    let mut u = vec![0.0; m];

    let mut den = sys.diag[0];
    if den.abs() < PIVOT_FLOOR {
        return Err(Error::SingularSystem(format!("pivot {den} at row 0")));
    }
    if m > 1 {
        c_prime[0] = sys.sup[0] / den;
    }
    u[0] = sys.rhs[0] / den;
    for i in 1..m {
        den = sys.diag[i] - sys.sub[i - 1] * c_prime[i - 1];
        if den.abs() < PIVOT_FLOOR {
            return Err(Error::SingularSystem(format!("pivot {den} at row {i}")));
        }
        if i + 1 < m {
            c_prime[i] = sys.sup[i] / den;
        }
        u[i] = (sys.rhs[i] - sys.sub[i - 1] * u[i - 1]) / den;
    }
    for i in (0..m - 1).rev() {
        u[i] -= c_prime[i] * u[i + 1];
    }
    Ok(u)
}

/// Piecewise-linear Galerkin solution tied to its mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FemSolution {
    mesh: Mesh,
    nodal: Vec<f64>,
}

impl FemSolution {
    /// Wrap nodal values; boundary entries must be exactly zero.
    pub fn new(mesh: Mesh, nodal: Vec<f64>) -> Result<Self> {
        if nodal.len() != mesh.nodes().len() {
            return Err(Error::InvalidArgument(format!(
                "{} nodal values for {} nodes",
                nodal.len(),
                mesh.nodes().len()
            )));
        }
        if nodal[0] != 0.0 || *nodal.last().unwrap() != 0.0 {
            return Err(Error::InvalidArgument(
                "boundary values must be exactly zero".into(),
            ));
        }
        if nodal.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite nodal value".into()));
        }
        Ok(Self { mesh, nodal })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn nodal(&self) -> &[f64] {
        &self.nodal
    }

    /// Constant derivative on cell `i`.
    pub fn cell_slope(&self, i: usize) -> f64 {
        (self.nodal[i + 1] - self.nodal[i]) / self.mesh.h(i)
    }

    /// Value and derivative at `x`; interior nodes report the left-cell slope.
    pub fn evaluate(&self, x: f64) -> Result<(f64, f64)> {
        let k = self.mesh.cell_containing(x)?;
        let (xl, _) = self.mesh.cell(k);
        let slope = self.cell_slope(k);
        Ok((self.nodal[k] + slope * (x - xl), slope))
    }

    /// ||u_h'|| over [0, 1]; exact since the derivative is cellwise constant.
    pub fn h1_seminorm(&self) -> f64 {
        (0..self.mesh.n_elements())
            .map(|i| {
                let s = self.cell_slope(i);
                self.mesh.h(i) * s * s
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Assemble and solve on the given mesh.
pub fn solve(problem: &Problem, mesh: &Mesh) -> Result<FemSolution> {
    let sys = assemble(problem, mesh)?;
    let interior = solve_tridiagonal(&sys)?;
    let mut nodal = Vec::with_capacity(mesh.nodes().len());
    nodal.push(0.0);
    nodal.extend_from_slice(&interior);
    nodal.push(0.0);
    FemSolution::new(mesh.clone(), nodal)
}
