//! Discrete macroscopic moments of the low-rank solution and the
//! explicit moment-system right-hand side.

use std::ops::{Add, AddAssign, Mul, Sub};

use crate::discretization::{DGDiscretization, VelocityGrid};
use crate::error::Result;
use crate::lowrank::LowRankMatrix;
use crate::transport::BoundaryCondition;

/// Conserved moments `(n, n u_x, n u_y, E)` at one spatial node.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MomentVector {
    pub density: f64,
    pub momentum_x: f64,
    pub momentum_y: f64,
    pub energy: f64,
}

impl MomentVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(density: f64, momentum_x: f64, momentum_y: f64, energy: f64) -> Self {
        Self {
            density,
            momentum_x,
            momentum_y,
            energy,
        }
    }

    /// Conserved variables of a state with density, bulk velocity and
    /// temperature (two velocity dimensions).
    pub fn from_primitive(density: f64, ux: f64, uy: f64, temperature: f64) -> Self {
        Self::new(
            density,
            density * ux,
            density * uy,
            0.5 * (density * (ux * ux + uy * uy) + 2.0 * density * temperature),
        )
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.momentum_x / self.density, self.momentum_y / self.density)
    }

    /// `T = (2E/n - |u|²) / 2`.
    pub fn temperature(&self) -> f64 {
        let (ux, uy) = self.velocity();
        0.5 * (2.0 * self.energy / self.density - ux * ux - uy * uy)
    }

    pub fn is_physical(&self) -> bool {
        self.density > 0.0 && self.temperature() > 0.0
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.density, self.momentum_x, self.momentum_y, self.energy]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Add for MomentVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.density + o.density,
            self.momentum_x + o.momentum_x,
            self.momentum_y + o.momentum_y,
            self.energy + o.energy,
        )
    }
}

impl Sub for MomentVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o * -1.0
    }
}

impl Mul<f64> for MomentVector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(
            self.density * s,
            self.momentum_x * s,
            self.momentum_y * s,
            self.energy * s,
        )
    }
}

impl AddAssign for MomentVector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Nodal moments over all elements, stored element-major (`i * (k+1) + p`).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentField {
    pub nodes_per_element: usize,
    pub values: Vec<MomentVector>,
}

impl MomentField {
    pub fn new(nodes_per_element: usize, values: Vec<MomentVector>) -> Self {
        Self {
            nodes_per_element,
            values,
        }
    }

    pub fn num_elements(&self) -> usize {
        self.values.len() / self.nodes_per_element
    }

    pub fn element(&self, i: usize) -> &[MomentVector] {
        let np = self.nodes_per_element;
        &self.values[i * np..(i + 1) * np]
    }

    pub fn get(&self, i: usize, p: usize) -> MomentVector {
        self.values[i * self.nodes_per_element + p]
    }

    /// Quadrature totals `Σ_{i,p} h_x w_p U[i][p]`.
    pub fn totals(&self, disc: &DGDiscretization) -> MomentVector {
        let np = self.nodes_per_element;
        self.values
            .iter()
            .enumerate()
            .fold(MomentVector::ZERO, |acc, (idx, u)| acc + *u * disc.mass(idx % np))
    }

    /// `self + Σ cⱼ Fⱼ`, node by node.
    pub fn axpy(&self, terms: &[(f64, &MomentField)]) -> MomentField {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &u)| {
                terms
                    .iter()
                    .fold(u, |acc, (c, f)| acc + f.values[idx] * *c)
            })
            .collect();
        MomentField::new(self.nodes_per_element, values)
    }
}

/// Discrete moments of one nodal coefficient matrix.
pub fn compute_moments(c: &LowRankMatrix, grid: &VelocityGrid) -> MomentVector {
    if c.rank() == 0 {
        return MomentVector::ZERO;
    }
    let w = &grid.weights;
    let a0 = c.left_projection(w);
    let a1 = c.left_projection(&grid.w_v);
    let a2 = c.left_projection(&grid.w_v2);
    let b0 = c.right_projection(w);
    let b1 = c.right_projection(&grid.w_v);
    let b2 = c.right_projection(&grid.w_v2);
    let s = c.core();
    let dot3 = |x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>| -> f64 {
        s.iter().zip(x.iter().zip(y.iter())).map(|(s, (a, b))| s * a * b).sum()
    };
    MomentVector::new(
        dot3(&a0, &b0),
        dot3(&a1, &b0),
        dot3(&a0, &b1),
        0.5 * (dot3(&a2, &b0) + dot3(&a0, &b2)),
    )
}

/// Upwind direction of a half-range moment flux.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FluxSign {
    Plus,
    Minus,
}

/// Half-range kinetic fluxes `F^±` of the conserved moments:
/// weightings `v±`, `(v±)²`, `v± v_y`, `((v±)³ + v± v_y²)/2`.
pub fn moment_flux_pm(c: &LowRankMatrix, grid: &VelocityGrid, sign: FluxSign) -> MomentVector {
    if c.rank() == 0 {
        return MomentVector::ZERO;
    }
    let wx = match sign {
        FluxSign::Plus => &grid.w_plus,
        FluxSign::Minus => &grid.w_minus,
    };
    let a1 = c.left_projection(&wx[0]);
    let a2 = c.left_projection(&wx[1]);
    let a3 = c.left_projection(&wx[2]);
    let b0 = c.right_projection(&grid.weights);
    let b1 = c.right_projection(&grid.w_v);
    let b2 = c.right_projection(&grid.w_v2);
    let s = c.core();
    let dot3 = |x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>| -> f64 {
        s.iter().zip(x.iter().zip(y.iter())).map(|(s, (a, b))| s * a * b).sum()
    };
    MomentVector::new(
        dot3(&a1, &b0),
        dot3(&a2, &b0),
        dot3(&a1, &b1),
        0.5 * (dot3(&a3, &b0) + dot3(&a1, &b2)),
    )
}

/// Both half-range fluxes at one node.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FluxPair {
    pub plus: MomentVector,
    pub minus: MomentVector,
}

impl FluxPair {
    pub fn of(c: &LowRankMatrix, grid: &VelocityGrid) -> Self {
        Self {
            plus: moment_flux_pm(c, grid, FluxSign::Plus),
            minus: moment_flux_pm(c, grid, FluxSign::Minus),
        }
    }
}

/// Right-hand side `P⁺ + P⁻` of the moment equations, assembled with the
/// same upwind stencil as the kinetic transport operator.
pub fn moment_rhs(
    fluxes: &[FluxPair],
    bc: &BoundaryCondition,
    disc: &DGDiscretization,
) -> Result<MomentField> {
    let np = disc.nodes_per_element();
    let halo = bc.halo(fluxes, np, |g| g.fluxes)?;
    let plus_coeffs: Vec<_> = (0..np).map(|p| disc.upwind_plus_coefficients(p)).collect();
    let minus_coeffs: Vec<_> = (0..np).map(|p| disc.upwind_minus_coefficients(p)).collect();
    let mut values = Vec::with_capacity(fluxes.len());
    for i in 0..disc.nx {
        let st = halo.stencil(fluxes, i);
        for p in 0..np {
            let (cp_prev, cp_this) = &plus_coeffs[p];
            let (cm_this, cm_next) = &minus_coeffs[p];
            let mut acc = MomentVector::ZERO;
            for q in 0..np {
                acc += st.prev[q].plus * cp_prev[q] + st.this[q].plus * cp_this[q];
                acc += st.this[q].minus * cm_this[q] + st.next[q].minus * cm_next[q];
            }
            values.push(acc);
        }
    }
    Ok(MomentField::new(np, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maxwellian(grid: &VelocityGrid, n: f64, ux: f64, uy: f64, t: f64) -> LowRankMatrix {
        let gx: Vec<f64> = grid.nodes.iter().map(|v| (-(v - ux).powi(2) / (2.0 * t)).exp()).collect();
        let gy: Vec<f64> = grid.nodes.iter().map(|v| (-(v - uy).powi(2) / (2.0 * t)).exp()).collect();
        LowRankMatrix::rank1(&gx, n / (2.0 * std::f64::consts::PI * t), &gy)
    }

    #[test]
    fn zero_matrix_has_zero_moments() {
        let g = VelocityGrid::new(5.0, 8).unwrap();
        let z = LowRankMatrix::zeros(8, 8);
        assert_eq!(compute_moments(&z, &g), MomentVector::ZERO);
        assert_eq!(moment_flux_pm(&z, &g, FluxSign::Plus), MomentVector::ZERO);
    }

    #[test]
    fn standard_maxwellian_moments() {
        let g = VelocityGrid::new(12.0, 100).unwrap();
        let m = compute_moments(&maxwellian(&g, 1.0, 0.0, 0.0, 1.0), &g);
        for (got, want) in m.to_array().iter().zip([1.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{m:?}");
        }
        let m = compute_moments(&maxwellian(&g, 2.0, 1.0, 0.0, 0.5), &g);
        for (got, want) in m.to_array().iter().zip([2.0, 2.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-10, "{m:?}");
        }
        assert!((m.temperature() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn odd_moment_of_symmetric_state_cancels() {
        let g = VelocityGrid::new(12.0, 64).unwrap();
        let f = FluxPair::of(&maxwellian(&g, 1.3, 0.0, 0.0, 0.9), &g);
        assert!((f.plus.density + f.minus.density).abs() < 1e-14);
        assert!(f.plus.density > 0.0);
        // Momentum flux is even: both halves contribute the same pressure.
        assert!((f.plus.momentum_x - f.minus.momentum_x).abs() < 1e-13);
    }

    #[test]
    fn primitive_roundtrip() {
        let u = MomentVector::from_primitive(0.7, 0.3, -1.2, 0.4);
        assert!((u.temperature() - 0.4).abs() < 1e-15);
        let (ux, uy) = u.velocity();
        assert!((ux - 0.3).abs() < 1e-15 && (uy + 1.2).abs() < 1e-15);
        assert!(u.is_physical());
        assert!(!MomentVector::new(1.0, 0.0, 0.0, -1.0).is_physical());
    }
}
