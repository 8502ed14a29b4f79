//! Fixed-order Gauss-Legendre quadrature on intervals.
//!
//! All element integrals in this crate (stiffness, load, residual norms,
//! error norms) use the same 5-point rule, exact for polynomials up to
//! degree 9.

/// 5-point Gauss-Legendre nodes on [-1, 1].
pub const GAUSS5_POINTS: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];

/// Weights matching [`GAUSS5_POINTS`]; they sum to 2.
pub const GAUSS5_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

/// Integrate `f` over [a, b] with the 5-point rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (xi, w) in GAUSS5_POINTS.iter().zip(GAUSS5_WEIGHTS.iter()) {
        sum += w * f(mid + half * xi);
    }
    half * sum
}
