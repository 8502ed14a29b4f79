//! The three benchmark problems, with exact solutions and exact residuals.

use crate::error::{Error, Result};
use crate::fem::Problem;

/// Benchmark selector with problem parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchmarkSpec {
    /// -eps u'' + u = -2 eps - x(1-x) - 1, boundary layers at both ends.
    ReactionDiffusion { epsilon: f64 },
    /// -eps u'' + (1 - eps/2) u' + (1/4)(1 - eps/4) u = exp(-x/4),
    /// boundary layer at x = 1.
    ConvectionDominated { epsilon: f64 },
    /// -((x+alpha)^p u')' + (x+alpha)^q u = f with a manufactured solution
    /// u = (x+alpha)^r - (alpha^r (1-x) + (1+alpha)^r x).
    BabuskaRheinboldt { p: f64, q: f64, r: f64, alpha: f64 },
}

impl BenchmarkSpec {
    /// Reaction-diffusion benchmark at its published parameter eps = 1e-5.
    pub fn reaction_diffusion() -> Self {
        Self::ReactionDiffusion { epsilon: 1e-5 }
    }

    /// Convection-dominated benchmark at eps = 2e-3.
    pub fn convection_dominated() -> Self {
        Self::ConvectionDominated { epsilon: 2e-3 }
    }

    /// Singular-coefficient benchmark at p = 2, q = 1, r = -1, alpha = 1/100.
    pub fn babuska_rheinboldt() -> Self {
        Self::BabuskaRheinboldt {
            p: 2.0,
            q: 1.0,
            r: -1.0,
            alpha: 0.01,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::ReactionDiffusion { .. } => "reaction_diffusion",
            Self::ConvectionDominated { .. } => "convection_dominated",
            Self::BabuskaRheinboldt { .. } => "babuska_rheinboldt",
        }
    }
}

/// Build the [`Problem`] for a benchmark, wiring coefficients, data, exact
/// solution, and the exact residual r = f + a'u' - bu' - cu.
pub fn make_problem(spec: &BenchmarkSpec) -> Result<Problem> {
    match *spec {
        BenchmarkSpec::ReactionDiffusion { epsilon } => reaction_diffusion(epsilon),
        BenchmarkSpec::ConvectionDominated { epsilon } => convection_dominated(epsilon),
        BenchmarkSpec::BabuskaRheinboldt { p, q, r, alpha } => babuska_rheinboldt(p, q, r, alpha),
    }
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_nan() || value <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {value}"
        )));
    }
    Ok(())
}

fn reaction_diffusion(epsilon: f64) -> Result<Problem> {
    require_positive("epsilon", epsilon)?;
    let se = epsilon.sqrt();
    // e^{-2/sqrt(eps)} underflows harmlessly to 0 for small eps
    let scale = 1.0 / (1.0 - (-2.0 / se).exp());

    let layers = move |x: f64| {
        (-(1.0 - x) / se).exp() - (-(1.0 + x) / se).exp() + (-x / se).exp()
            - (-(2.0 - x) / se).exp()
    };
    let layers_prime = move |x: f64| {
        ((-(1.0 - x) / se).exp() + (-(1.0 + x) / se).exp() - (-x / se).exp()
            + (-(2.0 - x) / se).exp())
            / se
    };
    let u = move |x: f64| scale * layers(x) - x * (1.0 - x) - 1.0;
    let u_prime = move |x: f64| scale * layers_prime(x) - (1.0 - 2.0 * x);
    let f = move |x: f64| -2.0 * epsilon - x * (1.0 - x) - 1.0;
    // a' = b = 0, c = 1 collapse the residual to f - u
    let residual = move |x: f64| -2.0 * epsilon - scale * layers(x);

    Ok(Problem::new(
        "reaction_diffusion",
        move |_| epsilon,
        |_| 0.0,
        |_| 0.0,
        |_| 0.0,
        |_| 1.0,
        f,
    )
    .with_exact(u, u_prime)
    .with_exact_residual(residual))
}

fn convection_dominated(epsilon: f64) -> Result<Problem> {
    require_positive("epsilon", epsilon)?;
    let b = 1.0 - 0.5 * epsilon;
    let c = 0.25 * (1.0 - 0.25 * epsilon);
    let e1 = (-1.0 / epsilon).exp();
    let k = 1.0 / (1.0 - e1);

    let g = move |x: f64| x - k * ((-(1.0 - x) / epsilon).exp() - e1);
    let g_prime = move |x: f64| 1.0 - k * (-(1.0 - x) / epsilon).exp() / epsilon;
    let u = move |x: f64| (-x / 4.0).exp() * g(x);
    let u_prime = move |x: f64| (-x / 4.0).exp() * (g_prime(x) - 0.25 * g(x));
    let f = |x: f64| (-x / 4.0).exp();
    let residual = move |x: f64| f(x) - b * u_prime(x) - c * u(x);

    Ok(Problem::new(
        "convection_dominated",
        move |_| epsilon,
        |_| 0.0,
        move |_| b,
        |_| 0.0,
        move |_| c,
        f,
    )
    .with_exact(u, u_prime)
    .with_exact_residual(residual))
}

fn babuska_rheinboldt(p: f64, q: f64, r: f64, alpha: f64) -> Result<Problem> {
    require_positive("alpha", alpha)?;
    if !(p.is_finite() && q.is_finite() && r.is_finite()) {
        return Err(Error::InvalidArgument("p, q, r must be finite".into()));
    }
    // slope of the linear part subtracted to meet the boundary conditions
    let s = (1.0 + alpha).powf(r) - alpha.powf(r);

    let u =
        move |x: f64| (x + alpha).powf(r) - (alpha.powf(r) * (1.0 - x) + (1.0 + alpha).powf(r) * x);
    let u_prime = move |x: f64| r * (x + alpha).powf(r - 1.0) - s;
    // f = -r(p+r-1)(x+alpha)^{p+r-2} + p s (x+alpha)^{p-1} + (x+alpha)^q u
    let f = move |x: f64| {
        -r * (p + r - 1.0) * (x + alpha).powf(p + r - 2.0)
            + p * s * (x + alpha).powf(p - 1.0)
            + (x + alpha).powf(q) * u(x)
    };
    // r = f + a'u' - cu simplifies to -a u'' = -r(r-1)(x+alpha)^{p+r-2}
    let residual = move |x: f64| -r * (r - 1.0) * (x + alpha).powf(p + r - 2.0);

    Ok(Problem::new(
        "babuska_rheinboldt",
        move |x| (x + alpha).powf(p),
        move |x| p * (x + alpha).powf(p - 1.0),
        |_| 0.0,
        |_| 0.0,
        move |x| (x + alpha).powf(q),
        f,
    )
    .with_exact(u, u_prime)
    .with_exact_residual(residual))
}
