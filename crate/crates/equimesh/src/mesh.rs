//! 1D meshes of [0, 1], the equidistribution step, and mesh diagnostics.
//!
//! A mesh is a strictly increasing node vector `x_0 = 0 < x_1 < ... < x_N = 1`.
//! The central operation is [`equidistribute`], which moves the interior
//! nodes so every cell carries the same share of a piecewise-constant
//! density; [`quality_measure`] reports how close a mesh is to that state.

use crate::error::{Error, Result};

/// Default upper bound on the adaptation function used by S_N diagnostics.
///
/// The analysis only guarantees that such a bound exists; it gives no
/// computable value, so this is a reporting default, not an enforced limit.
pub const DEFAULT_RHO0: f64 = 10.0;

/// Partition of [0, 1] with pinned endpoints and strictly increasing nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
}

impl Mesh {
    /// Build a mesh from a node vector.
    ///
    /// Requires `nodes[0] == 0`, `nodes[last] == 1`, strict monotonicity,
    /// and at least two cells.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "mesh needs at least 2 elements, got {} nodes",
                nodes.len()
            )));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidArgument(
                "mesh endpoints must be exactly 0 and 1".into(),
            ));
        }
        for w in nodes.windows(2) {
            if !w[0].is_finite() || !w[1].is_finite() {
                return Err(Error::InvalidArgument("mesh nodes must be finite".into()));
            }
            if w[1] <= w[0] {
                return Err(Error::InvalidArgument(format!(
                    "mesh nodes must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { nodes })
    }

    /// Uniform mesh with `n` cells: `x_i = i/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "element count must be at least 2, got {n}"
            )));
        }
        let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        // i/n already gives exact endpoints, but pin them anyway
        nodes[0] = 0.0;
        nodes[n] = 1.0;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of cells N.
    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Width of cell `i` (0-based).
    pub fn h(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn h_max(&self) -> f64 {
        (0..self.n_elements())
            .map(|i| self.h(i))
            .fold(0.0, f64::max)
    }

    /// Endpoints of cell `i`.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.nodes[i + 1])
    }

    /// Index of the cell containing `x`; interior nodes belong to their
    /// left cell.
    pub fn cell_containing(&self, x: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain(format!("x = {x} outside [0, 1]")));
        }
        // count of interior/right nodes strictly below x
        let k = self.nodes[1..].partition_point(|&v| v < x);
        Ok(k.min(self.n_elements() - 1))
    }
}

/// Piecewise-constant function on a mesh, one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    values: Vec<f64>,
}

impl CellField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(value: f64, n: usize) -> Self {
        Self {
            values: vec![value; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Largest value (NaN-propagating inputs are rejected upstream).
    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl From<Vec<f64>> for CellField {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

impl std::ops::Index<usize> for CellField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Parameters of the mesh set S_N: cell widths within [1/(rho0 N), 2/N].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnParams {
    pub rho0: f64,
    pub n: usize,
}

impl SnParams {
    pub fn new(rho0: f64, n: usize) -> Result<Self> {
        if rho0.is_nan() || rho0 < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "rho0 must be >= 1, got {rho0}"
            )));
        }
        Ok(Self { rho0, n })
    }
}

/// Per-cell S_N membership report. Diagnostic only; nothing is clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct SnReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Cells with h_i below 1/(rho0 N).
    pub lower_violations: Vec<usize>,
    /// Cells with h_i above 2/N.
    pub upper_violations: Vec<usize>,
}

impl SnReport {
    pub fn passes(&self) -> bool {
        self.lower_violations.is_empty() && self.upper_violations.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.lower_violations.len() + self.upper_violations.len()
    }
}

fn check_density(rho: &CellField, n: usize) -> Result<()> {
    if rho.len() != n {
        return Err(Error::InvalidArgument(format!(
            "density has {} values for a mesh of {} cells",
            rho.len(),
            n
        )));
    }
    for (i, &r) in rho.values().iter().enumerate() {
        if !r.is_finite() {
            return Err(Error::Numeric(format!("density value {r} in cell {i}")));
        }
        if r <= 0.0 {
            return Err(Error::InvalidAdaptationFunction(format!(
                "density must be strictly positive, got {r} in cell {i}"
            )));
        }
    }
    Ok(())
}

/// Move the interior nodes so every cell of the result carries the mass
/// `sigma/N`, where `sigma` is the total integral of `rho` over [0, 1].
///
/// `rho` is piecewise constant on the input mesh, so its cumulative
/// integral is piecewise linear and is inverted in closed form: the new
/// node `y_i` lands in the old cell `j` bracketing the target mass
/// `i*sigma/N`, at
///
/// ```text
/// y_i = x_{j-1} + (i*sigma/N - sum_{l<j} h_l rho_l) / rho_j
/// ```
///
/// A target falling exactly on a cumulative-mass boundary resolves to the
/// left cell, which reproduces the old node exactly.
pub fn equidistribute(mesh: &Mesh, rho: &CellField) -> Result<Mesh> {
    let n = mesh.n_elements();
    check_density(rho, n)?;

    let mut cum = vec![0.0; n + 1];
    for i in 0..n {
        cum[i + 1] = cum[i] + rho[i] * mesh.h(i);
    }
    let sigma = cum[n];
    if !sigma.is_finite() {
        return Err(Error::Numeric(format!("total density mass {sigma}")));
    }

    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(0.0);
    let mut j = 1usize;
    for i in 1..n {
        let target = sigma * (i as f64 / n as f64);
        while j < n && cum[j] < target {
            j += 1;
        }
        nodes.push(mesh.nodes()[j - 1] + (target - cum[j - 1]) / rho[j - 1]);
    }
    nodes.push(1.0);
    Mesh::new(nodes)
}

/// Equidistribution quality `Q_i = N rho_i h_i / sigma`.
///
/// The values average to 1 and their maximum is at least 1; the maximum
/// equals 1 exactly when the mesh equidistributes `rho`.
pub fn quality_measure(mesh: &Mesh, rho: &CellField) -> Result<CellField> {
    let n = mesh.n_elements();
    check_density(rho, n)?;
    let sigma: f64 = (0..n).map(|i| rho[i] * mesh.h(i)).sum();
    let nf = n as f64;
    Ok(CellField::new(
        (0..n).map(|i| nf * rho[i] * mesh.h(i) / sigma).collect(),
    ))
}

/// Maximum interior-node displacement between two meshes of the same size.
pub fn mesh_distance(a: &Mesh, b: &Mesh) -> Result<f64> {
    if a.n_elements() != b.n_elements() {
        return Err(Error::InvalidArgument(format!(
            "meshes have {} and {} cells",
            a.n_elements(),
            b.n_elements()
        )));
    }
    Ok(a.nodes()
        .iter()
        .zip(b.nodes())
        .skip(1)
        .take(a.n_elements() - 1)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Check every cell width against the S_N bounds `1/(rho0 N) <= h_i <= 2/N`.
pub fn validate_in_sn(mesh: &Mesh, params: &SnParams) -> SnReport {
    let nf = params.n as f64;
    let lower = 1.0 / (params.rho0 * nf);
    let upper = 2.0 / nf;
    let mut report = SnReport {
        lower_bound: lower,
        upper_bound: upper,
        lower_violations: Vec::new(),
        upper_violations: Vec::new(),
    };
    for i in 0..mesh.n_elements() {
        let h = mesh.h(i);
        if h < lower {
            report.lower_violations.push(i);
        }
        if h > upper {
            report.upper_violations.push(i);
        }
    }
    report
}
