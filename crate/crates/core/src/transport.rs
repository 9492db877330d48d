//! Upwind DG transport operators acting on low-rank nodal coefficients.

use rayon::prelude::*;

use crate::discretization::{DGDiscretization, VelocityGrid};
use crate::error::{Error, Result};
use crate::lowrank::LowRankMatrix;
use crate::moments::{compute_moments, FluxPair, MomentVector};

/// Nodal coefficient matrices `C[i][p]`, element-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionState {
    pub nodes_per_element: usize,
    pub matrices: Vec<LowRankMatrix>,
    pub time: f64,
}

impl SolutionState {
    pub fn new(nodes_per_element: usize, matrices: Vec<LowRankMatrix>, time: f64) -> Self {
        Self {
            nodes_per_element,
            matrices,
            time,
        }
    }

    pub fn num_elements(&self) -> usize {
        self.matrices.len() / self.nodes_per_element
    }

    pub fn element(&self, i: usize) -> &[LowRankMatrix] {
        let np = self.nodes_per_element;
        &self.matrices[i * np..(i + 1) * np]
    }

    pub fn get(&self, i: usize, p: usize) -> &LowRankMatrix {
        &self.matrices[i * self.nodes_per_element + p]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.matrices.iter().map(LowRankMatrix::rank).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.matrices.iter().map(LowRankMatrix::rank).max().unwrap_or(0)
    }
}

/// Fixed exterior state used on one side of the domain.
#[derive(Clone, Debug)]
pub struct GhostState {
    pub kinetic: LowRankMatrix,
    pub moments: MomentVector,
    pub fluxes: FluxPair,
}

impl GhostState {
    pub fn new(kinetic: LowRankMatrix, grid: &VelocityGrid) -> Self {
        Self {
            moments: compute_moments(&kinetic, grid),
            fluxes: FluxPair::of(&kinetic, grid),
            kinetic,
        }
    }
}

#[derive(Clone, Debug)]
pub enum BoundaryCondition {
    Periodic,
    /// Every ghost node equals the fixed exterior state on that side.
    FixedGhost { left: Box<GhostState>, right: Box<GhostState> },
    /// Ghost nodes copy the nearest interior node.
    ZeroGradient,
}

impl BoundaryCondition {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Periodic => "periodic",
            Self::FixedGhost { .. } => "fixed_ghost",
            Self::ZeroGradient => "zero_gradient",
        }
    }

    /// Ghost elements for a nodal field, `fixed` extracting the matching
    /// quantity from a [`GhostState`].
    pub fn halo<T: Clone>(
        &self,
        field: &[T],
        nodes_per_element: usize,
        fixed: impl Fn(&GhostState) -> T,
    ) -> Result<Halo<T>> {
        let np = nodes_per_element;
        if np == 0 || field.is_empty() || field.len() % np != 0 {
            return Err(Error::Config(format!(
                "cannot resolve boundary for a field of {} nodes with {} nodes per element",
                field.len(),
                np
            )));
        }
        let (left, right) = match self {
            Self::Periodic => (Vec::new(), Vec::new()),
            Self::ZeroGradient => (
                vec![field[0].clone(); np],
                vec![field[field.len() - 1].clone(); np],
            ),
            Self::FixedGhost { left, right } => (vec![fixed(left); np], vec![fixed(right); np]),
        };
        Ok(Halo {
            np,
            nx: field.len() / np,
            left,
            right,
        })
    }
}

/// Ghost elements resolved for one field.
pub struct Halo<T> {
    np: usize,
    nx: usize,
    left: Vec<T>,
    right: Vec<T>,
}

/// Node slices of elements `i-1`, `i`, `i+1`.
pub struct Stencil<'a, T> {
    pub prev: &'a [T],
    pub this: &'a [T],
    pub next: &'a [T],
}

impl<T> Halo<T> {
    pub fn stencil<'a>(&'a self, field: &'a [T], i: usize) -> Stencil<'a, T> {
        let np = self.np;
        let elem = |j: usize| &field[j * np..(j + 1) * np];
        let periodic = self.left.is_empty();
        let prev = match (i, periodic) {
            (0, true) => elem(self.nx - 1),
            (0, false) => &self.left[..],
            _ => elem(i - 1),
        };
        let next = match (i + 1 == self.nx, periodic) {
            (true, true) => elem(0),
            (true, false) => &self.right[..],
            _ => elem(i + 1),
        };
        Stencil {
            prev,
            this: elem(i),
            next,
        }
    }
}

fn weighted_sum(
    groups: [(&[f64], &[LowRankMatrix]); 2],
    rows: &[f64],
    tol: f64,
) -> Result<LowRankMatrix> {
    let terms: Vec<(f64, &LowRankMatrix)> = groups
        .iter()
        .flat_map(|(c, m)| c.iter().copied().zip(m.iter()))
        .filter(|(c, _)| *c != 0.0)
        .collect();
    if terms.is_empty() {
        let m = &groups[1].1[0];
        return Ok(LowRankMatrix::zeros(m.nrows(), m.ncols()));
    }
    let sum = LowRankMatrix::hierarchical_sum_scaled(&terms, tol)?;
    Ok(sum.scale_rows(rows)?)
}

/// `𝓕⁺_p(C^{i-1}, C^i)`: upwind contribution of particles with `v_x ≥ 0`.
pub fn flux_plus(
    p: usize,
    prev: &[LowRankMatrix],
    this: &[LowRankMatrix],
    disc: &DGDiscretization,
    grid: &VelocityGrid,
    tol: f64,
) -> Result<LowRankMatrix> {
    let (c_prev, c_this) = disc.upwind_plus_coefficients(p);
    weighted_sum([(&c_prev, prev), (&c_this, this)], &grid.v_plus, tol)
}

/// `𝓕⁻_p(C^i, C^{i+1})`: upwind contribution of particles with `v_x < 0`.
pub fn flux_minus(
    p: usize,
    this: &[LowRankMatrix],
    next: &[LowRankMatrix],
    disc: &DGDiscretization,
    grid: &VelocityGrid,
    tol: f64,
) -> Result<LowRankMatrix> {
    let (c_this, c_next) = disc.upwind_minus_coefficients(p);
    weighted_sum([(&c_this, this), (&c_next, next)], &grid.v_minus, tol)
}

/// Runs `f` on every node index, optionally on the rayon pool.
pub(crate) fn map_nodes<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Kinetic transport right-hand side `𝓕⁺ + 𝓕⁻` at every node.
pub fn transport_rhs(
    state: &SolutionState,
    bc: &BoundaryCondition,
    disc: &DGDiscretization,
    grid: &VelocityGrid,
    tol: f64,
    parallel: bool,
) -> Result<Vec<LowRankMatrix>> {
    let np = disc.nodes_per_element();
    if state.nodes_per_element != np || state.matrices.len() != disc.num_nodes() {
        return Err(Error::Config("state does not match the discretization".into()));
    }
    let halo = bc.halo(&state.matrices, np, |g| g.kinetic.clone())?;
    map_nodes(state.matrices.len(), parallel, |idx| {
        let (i, p) = (idx / np, idx % np);
        let st = halo.stencil(&state.matrices, i);
        let fp = flux_plus(p, st.prev, st.this, disc, grid, tol)?;
        let fm = flux_minus(p, st.this, st.next, disc, grid, tol)?;
        Ok(fp.truncated_sum(&fm, tol)?)
    })
    .into_iter()
    .collect()
}
