//! Spatial mesh, reference-element Gauss–Legendre quadrature, Lagrange
//! tables, and the uniform velocity grid.

use crate::error::{Error, Result};

/// Largest polynomial degree the CLI accepts.
pub const MAX_CLI_DEGREE: usize = 2;

/// Nodal DG tables on the reference element `[-1/2, 1/2]`.
#[derive(Clone, Debug)]
pub struct DGDiscretization {
    pub a: f64,
    pub b: f64,
    pub nx: usize,
    pub hx: f64,
    pub degree: usize,
    /// Gauss–Legendre nodes on the reference element.
    pub nodes: Vec<f64>,
    /// Quadrature weights on the reference element (sum to 1).
    pub weights: Vec<f64>,
    /// `L_q(-1/2)`.
    pub l_left: Vec<f64>,
    /// `L_q(+1/2)`.
    pub l_right: Vec<f64>,
    /// `diff[p][q] = dL_p/dξ(ξ_q)`.
    pub diff: Vec<Vec<f64>>,
}

impl DGDiscretization {
    pub fn new(a: f64, b: f64, nx: usize, degree: usize) -> Result<Self> {
        if nx == 0 {
            return Err(Error::Config("Nx must be at least 1".into()));
        }
        if !(b > a) {
            return Err(Error::Config(format!("empty domain [{a}, {b}]")));
        }
        if degree > 16 {
            return Err(Error::Config(format!("polynomial degree {degree} not supported")));
        }
        let (nodes, weights) = gauss_legendre(degree + 1);
        let np = degree + 1;
        let l_left = lagrange_values(&nodes, -0.5);
        let l_right = lagrange_values(&nodes, 0.5);
        let diff = (0..np)
            .map(|p| (0..np).map(|q| lagrange_derivative(&nodes, p, nodes[q])).collect())
            .collect();
        Ok(Self {
            a,
            b,
            nx,
            hx: (b - a) / nx as f64,
            degree,
            nodes,
            weights,
            l_left,
            l_right,
            diff,
        })
    }

    /// Nodes per element, `k + 1`.
    pub fn nodes_per_element(&self) -> usize {
        self.degree + 1
    }

    pub fn num_nodes(&self) -> usize {
        self.nx * self.nodes_per_element()
    }

    pub fn element_center(&self, i: usize) -> f64 {
        self.a + (i as f64 + 0.5) * self.hx
    }

    /// Physical coordinate of node `p` in element `i`.
    pub fn node_x(&self, i: usize, p: usize) -> f64 {
        self.element_center(i) + self.hx * self.nodes[p]
    }

    /// Mass matrix diagonal entry `h_x w_p`.
    pub fn mass(&self, p: usize) -> f64 {
        self.hx * self.weights[p]
    }

    /// All `L_q(ξ)` at a reference coordinate.
    pub fn lagrange(&self, xi: f64) -> Vec<f64> {
        lagrange_values(&self.nodes, xi)
    }

    /// Value at `ξ` of the polynomial with the given nodal values.
    pub fn interpolate(&self, values: &[f64], xi: f64) -> f64 {
        self.lagrange(xi).iter().zip(values).map(|(l, v)| l * v).sum()
    }

    /// Gauss-quadrature cell average of nodal values.
    pub fn cell_average(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Stencil weights of the `v_x ≥ 0` flux operator for test node `p`,
    /// already divided by `-h_x w_p`: `(on element i-1, on element i)`.
    pub fn upwind_plus_coefficients(&self, p: usize) -> (Vec<f64>, Vec<f64>) {
        let np = self.nodes_per_element();
        let s = -1.0 / self.mass(p);
        let prev = (0..np).map(|q| -s * self.l_right[q] * self.l_left[p]).collect();
        let this = (0..np)
            .map(|q| s * (self.l_right[q] * self.l_right[p] - self.weights[q] * self.diff[p][q]))
            .collect();
        (prev, this)
    }

    /// Stencil weights of the `v_x < 0` flux operator for test node `p`:
    /// `(on element i, on element i+1)`.
    pub fn upwind_minus_coefficients(&self, p: usize) -> (Vec<f64>, Vec<f64>) {
        let np = self.nodes_per_element();
        let s = -1.0 / self.mass(p);
        let this = (0..np)
            .map(|q| -s * (self.l_left[q] * self.l_left[p] + self.weights[q] * self.diff[p][q]))
            .collect();
        let next = (0..np).map(|q| s * self.l_left[q] * self.l_right[p]).collect();
        (this, next)
    }
}

/// Gauss–Legendre nodes and weights on `[-1/2, 1/2]` by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = 0.5 * x;
        // Reference weight on [-1, 1] is 2 / ((1 - x²) P'_n(x)²); halved for [-1/2, 1/2].
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    // Symmetrize so the rule is exactly odd/even symmetric.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn lagrange_values(nodes: &[f64], xi: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|q| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(s, _)| s != q)
                .map(|(_, &xs)| (xi - xs) / (nodes[q] - xs))
                .product()
        })
        .collect()
}

fn lagrange_derivative(nodes: &[f64], p: usize, xi: f64) -> f64 {
    let n = nodes.len();
    let mut total = 0.0;
    for j in (0..n).filter(|&j| j != p) {
        let mut term = 1.0 / (nodes[p] - nodes[j]);
        for s in (0..n).filter(|&s| s != p && s != j) {
            term *= (xi - nodes[s]) / (nodes[p] - nodes[s]);
        }
        total += term;
    }
    total
}

/// Uniform cell-centred velocity grid on `[-V_max, V_max]`, shared by both
/// velocity dimensions.
#[derive(Clone, Debug)]
pub struct VelocityGrid {
    pub vmax: f64,
    pub nv: usize,
    pub hv: f64,
    pub nodes: Vec<f64>,
    /// Riemann weights `h_v · 1`.
    pub weights: Vec<f64>,
    /// `max(v, 0)` and `min(v, 0)` at the nodes.
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub(crate) w_v: Vec<f64>,
    pub(crate) w_v2: Vec<f64>,
    pub(crate) w_plus: [Vec<f64>; 3],
    pub(crate) w_minus: [Vec<f64>; 3],
}

impl VelocityGrid {
    pub fn new(vmax: f64, nv: usize) -> Result<Self> {
        if nv < 2 {
            return Err(Error::Config(format!("Nv must be at least 2, got {nv}")));
        }
        if !(vmax > 0.0) {
            return Err(Error::Config(format!("Vmax must be positive, got {vmax}")));
        }
        let hv = 2.0 * vmax / nv as f64;
        let nodes = (0..nv).map(|j| -vmax + (j as f64 + 0.5) * hv).collect();
        Ok(Self::build(vmax, nodes, hv))
    }

    /// Grid with arbitrary sorted nodes and Riemann weight `hv`, e.g. a
    /// shifted grid for one-sided transport tests.
    pub fn from_nodes(nodes: Vec<f64>, hv: f64) -> Result<Self> {
        if nodes.len() < 2 || !(hv > 0.0) {
            return Err(Error::Config("velocity grid needs >= 2 nodes and hv > 0".into()));
        }
        let vmax = nodes.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 0.5 * hv;
        Ok(Self::build(vmax, nodes, hv))
    }

    fn build(vmax: f64, nodes: Vec<f64>, hv: f64) -> Self {
        let weighted = |f: &dyn Fn(f64) -> f64| -> Vec<f64> { nodes.iter().map(|&v| hv * f(v)).collect() };
        let w_v = weighted(&|v| v);
        let w_v2 = weighted(&|v| v * v);
        let w_plus = [1, 2, 3].map(|e| weighted(&|v: f64| v.max(0.0).powi(e)));
        let w_minus = [1, 2, 3].map(|e| weighted(&|v: f64| v.min(0.0).powi(e)));
        Self {
            vmax,
            nv: nodes.len(),
            hv,
            weights: vec![hv; nodes.len()],
            v_plus: nodes.iter().map(|v| v.max(0.0)).collect(),
            v_minus: nodes.iter().map(|v| v.min(0.0)).collect(),
            w_v,
            w_v2,
            w_plus,
            w_minus,
            nodes,
        }
    }
}
