//! Quadrature-corrected moments: discrete rank-1 Maxwellians whose discrete
//! moments reproduce prescribed conserved quantities exactly.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};

use crate::discretization::VelocityGrid;
use crate::error::QcmError;
use crate::lowrank::LowRankMatrix;
use crate::moments::MomentVector;

/// Maxwellian parameters `(n_M, u_{x,M}, u_{y,M}, T_M)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QcmParams {
    pub density: f64,
    pub ux: f64,
    pub uy: f64,
    pub temperature: f64,
}

impl QcmParams {
    pub fn new(density: f64, ux: f64, uy: f64, temperature: f64) -> Self {
        Self {
            density,
            ux,
            uy,
            temperature,
        }
    }

    /// Naive parameters read directly off the conserved moments.
    pub fn from_moments(u: &MomentVector) -> Self {
        let (ux, uy) = u.velocity();
        Self::new(u.density, ux, uy, u.temperature())
    }

    fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.density, self.ux, self.uy, self.temperature)
    }

    fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    fn is_admissible(&self) -> bool {
        self.density > 0.0 && self.temperature > 0.0 && self.ux.is_finite() && self.uy.is_finite()
    }
}

fn gaussian(nodes: &[f64], u: f64, t: f64) -> Vec<f64> {
    nodes.iter().map(|v| (-(v - u).powi(2) / (2.0 * t)).exp()).collect()
}

/// Rank-1 matrix with entries `n/(2πT) · exp(-((v_x-u_x)² + (v_y-u_y)²)/(2T))`.
pub fn discrete_maxwellian(
    params: &QcmParams,
    grid: &VelocityGrid,
) -> Result<LowRankMatrix, QcmError> {
    if !(params.temperature > 0.0) {
        return Err(QcmError::NonPositiveTemperature(params.temperature));
    }
    let gx = gaussian(&grid.nodes, params.ux, params.temperature);
    let gy = gaussian(&grid.nodes, params.uy, params.temperature);
    Ok(LowRankMatrix::rank1(
        &gx,
        params.density / (2.0 * PI * params.temperature),
        &gy,
    ))
}

/// One-dimensional weighted sums `Σ h_v v^j g(v)` for `j = 0, 1, 2` of a
/// Gaussian factor and of its derivatives with respect to `u` and `T`.
struct FactorSums {
    value: [f64; 3],
    d_u: [f64; 3],
    d_t: [f64; 3],
}

impl FactorSums {
    fn new(grid: &VelocityGrid, u: f64, t: f64) -> Self {
        let mut s = Self {
            value: [0.0; 3],
            d_u: [0.0; 3],
            d_t: [0.0; 3],
        };
        for (&v, &w) in grid.nodes.iter().zip(&grid.weights) {
            let c = v - u;
            let g = w * (-c * c / (2.0 * t)).exp();
            let du = c / t;
            let dt = c * c / (2.0 * t * t);
            let mut vj = 1.0;
            for j in 0..3 {
                s.value[j] += vj * g;
                s.d_u[j] += vj * g * du;
                s.d_t[j] += vj * g * dt;
                vj *= v;
            }
        }
        s
    }
}

/// Moments `(n, n u_x, n u_y, E)` of the separable product `a(v_x) b(v_y)`
/// given the power sums of each factor.
fn product_moments(a: &[f64; 3], b: &[f64; 3]) -> Vector4<f64> {
    Vector4::new(
        a[0] * b[0],
        a[1] * b[0],
        a[0] * b[1],
        0.5 * (a[2] * b[0] + a[0] * b[2]),
    )
}

fn maxwellian_moments(params: &QcmParams, grid: &VelocityGrid) -> Vector4<f64> {
    let t = params.temperature;
    let fx = FactorSums::new(grid, params.ux, t);
    let fy = FactorSums::new(grid, params.uy, t);
    product_moments(&fx.value, &fy.value) * (params.density / (2.0 * PI * t))
}

/// `R = target − moments(discrete_maxwellian(params))`.
pub fn qcm_residual(params: &QcmParams, target: &MomentVector, grid: &VelocityGrid) -> [f64; 4] {
    let r = Vector4::from(target.to_array()) - maxwellian_moments(params, grid);
    [r[0], r[1], r[2], r[3]]
}

/// Analytic Jacobian `∂R/∂(n_M, u_{x,M}, u_{y,M}, T_M)`, row-major.
pub fn qcm_jacobian(params: &QcmParams, grid: &VelocityGrid) -> [[f64; 4]; 4] {
    let j = jacobian_matrix(params, grid);
    std::array::from_fn(|r| std::array::from_fn(|c| j[(r, c)]))
}

fn jacobian_matrix(params: &QcmParams, grid: &VelocityGrid) -> Matrix4<f64> {
    let (n, t) = (params.density, params.temperature);
    let fx = FactorSums::new(grid, params.ux, t);
    let fy = FactorSums::new(grid, params.uy, t);
    let scale = n / (2.0 * PI * t);
    let base = product_moments(&fx.value, &fy.value);
    let d_n = base / (2.0 * PI * t);
    let d_ux = product_moments(&fx.d_u, &fy.value) * scale;
    let d_uy = product_moments(&fx.value, &fy.d_u) * scale;
    let d_t = (product_moments(&fx.d_t, &fy.value) + product_moments(&fx.value, &fy.d_t)) * scale
        - base * (scale / t);
    -Matrix4::from_columns(&[d_n, d_ux, d_uy, d_t])
}

/// Stopping and safeguarding parameters of the Newton iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QcmOptions {
    /// Converged once `‖R‖ ≤ rel_tol · ‖R⁰‖`.
    pub rel_tol: f64,
    pub max_iters: usize,
    /// Maximum number of step halvings used to keep `n_M, T_M > 0`.
    pub max_halvings: usize,
}

impl Default for QcmOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            max_iters: 50,
            max_halvings: 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QcmSolution {
    pub params: QcmParams,
    pub iterations: usize,
    pub residual: f64,
}

/// Newton solve of `R(params) = 0` starting from the naive moments of
/// `target`.
pub fn qcm_solve(
    target: &MomentVector,
    grid: &VelocityGrid,
    options: &QcmOptions,
) -> Result<QcmSolution, QcmError> {
    qcm_solve_from(target, grid, QcmParams::from_moments(target), options)
}

/// Newton solve of `R(params) = 0` from an explicit initial guess.
pub fn qcm_solve_from(
    target: &MomentVector,
    grid: &VelocityGrid,
    init: QcmParams,
    options: &QcmOptions,
) -> Result<QcmSolution, QcmError> {
    let temperature = target.temperature();
    if !(target.density > 0.0 && temperature > 0.0) {
        return Err(QcmError::UnphysicalTarget {
            density: target.density,
            temperature,
        });
    }
    if !init.is_admissible() {
        return Err(QcmError::NonPositiveTemperature(init.temperature));
    }
    let goal = Vector4::from(target.to_array());
    // Below this level the residual is dominated by rounding in the moment sums.
    let floor = 16.0 * f64::EPSILON * goal.norm();
    let residual_of = |p: &QcmParams| goal - maxwellian_moments(p, grid);

    let mut params = init;
    let mut r = residual_of(&params);
    let tol = (options.rel_tol * r.norm()).max(floor);
    let mut iterations = 0;
    while r.norm() > tol {
        if iterations == options.max_iters {
            return Err(QcmError::NotConverged {
                iterations,
                residual: r.norm(),
            });
        }
        iterations += 1;
        let step = jacobian_matrix(&params, grid)
            .lu()
            .solve(&(-r))
            .filter(|s| s.iter().all(|x| x.is_finite()))
            .ok_or(QcmError::SingularJacobian)?;
        let base = params.to_vector();
        let mut alpha = 1.0;
        let mut halvings = 0;
        let mut trial = QcmParams::from_vector(&(base + step));
        while !trial.is_admissible() {
            if halvings == options.max_halvings {
                return Err(QcmError::DampingFailed);
            }
            halvings += 1;
            alpha *= 0.5;
            trial = QcmParams::from_vector(&(base + step * alpha));
        }
        params = trial;
        r = residual_of(&params);
    }
    Ok(QcmSolution {
        params,
        iterations,
        residual: r.norm(),
    })
}

/// Discrete Maxwellian whose discrete moments equal `target`.
pub fn corrected_maxwellian(
    target: &MomentVector,
    grid: &VelocityGrid,
    options: &QcmOptions,
) -> Result<LowRankMatrix, QcmError> {
    let sol = qcm_solve(target, grid, options)?;
    discrete_maxwellian(&sol.params, grid)
}
