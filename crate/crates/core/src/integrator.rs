//! Second-order stiffly accurate IMEX Runge–Kutta advance of the coupled
//! moment / kinetic system.

use std::time::Instant;

use crate::discretization::{DGDiscretization, VelocityGrid};
use crate::error::{Error, Result};
use crate::limiter::{apply_limiter, LimiterKind};
use crate::lowrank::LowRankMatrix;
use crate::moments::{compute_moments, moment_rhs, FluxPair, MomentField, MomentVector};
use crate::qcm::{discrete_maxwellian, qcm_solve, QcmOptions};
use crate::transport::{map_nodes, transport_rhs, BoundaryCondition, SolutionState};

/// Two-stage tableau with `γ = 1 − √2/2`, `δ = 1 − 1/(2γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImexTableau {
    pub gamma: f64,
    pub delta: f64,
}

impl Default for ImexTableau {
    fn default() -> Self {
        let gamma = 1.0 - std::f64::consts::SQRT_2 / 2.0;
        Self {
            gamma,
            delta: 1.0 - 1.0 / (2.0 * gamma),
        }
    }
}

impl ImexTableau {
    /// Stage times, shared by the explicit and implicit parts.
    pub fn stage_times(&self, t: f64, dt: f64) -> [f64; 3] {
        [t, t + self.gamma * dt, t + dt]
    }
}

/// Parameters of one time step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    /// Knudsen number.
    pub eps: f64,
    pub dt: f64,
    /// Singular-value truncation threshold.
    pub tol: f64,
    pub limiter: LimiterKind,
    pub qcm: QcmOptions,
    /// Evaluate per-node work on the rayon pool.
    pub parallel: bool,
}

/// `Δt = h_x / ((2k+3) V_max)`.
pub fn cfl_dt(disc: &DGDiscretization, grid: &VelocityGrid) -> f64 {
    disc.hx / ((2 * disc.degree + 3) as f64 * grid.vmax)
}

/// Spatial and velocity discretisation together with boundary treatment.
#[derive(Clone, Debug)]
pub struct Solver {
    pub disc: DGDiscretization,
    pub grid: VelocityGrid,
    pub bc: BoundaryCondition,
}

/// Result of one IMEX step.
#[derive(Clone, Debug)]
pub struct StepOutput {
    pub state: SolutionState,
    /// Limited moments of the final stage.
    pub moments: MomentField,
    /// Number of troubled elements in each stage.
    pub troubled: [usize; 2],
}

/// Per-step record of conserved totals, ranks and timing.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    /// `Σ h_x w_p ∫ C` over the kinetic solution.
    pub kinetic_totals: MomentVector,
    /// `Σ h_x w_p U` over the evolved moment field.
    pub moment_totals: MomentVector,
    pub max_rank: usize,
    /// Largest `|u_y|` of the kinetic moments.
    pub max_abs_uy: f64,
    pub troubled: usize,
    pub wall_seconds: f64,
}

/// Final state of a run and its per-step diagnostics (the first record
/// describes the initial state).
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: SolutionState,
    pub moments: MomentField,
    pub diagnostics: Vec<DiagnosticsRecord>,
}

impl Solver {
    pub fn new(disc: DGDiscretization, grid: VelocityGrid, bc: BoundaryCondition) -> Self {
        Self { disc, grid, bc }
    }

    /// Discrete moments at every node of a kinetic state.
    pub fn moments_of(&self, state: &SolutionState, parallel: bool) -> MomentField {
        let values = map_nodes(state.matrices.len(), parallel, |n| {
            compute_moments(&state.matrices[n], &self.grid)
        });
        MomentField::new(state.nodes_per_element, values)
    }

    fn moment_transport(&self, state: &SolutionState, parallel: bool) -> Result<MomentField> {
        let fluxes = map_nodes(state.matrices.len(), parallel, |n| {
            FluxPair::of(&state.matrices[n], &self.grid)
        });
        moment_rhs(&fluxes, &self.bc, &self.disc)
    }

    /// Limiter followed by a QCM solve at every node.
    fn correct(&self, u: &MomentField, cfg: &StepConfig) -> Result<(MomentField, usize, Vec<LowRankMatrix>)> {
        let (limited, mask) = apply_limiter(cfg.limiter, u, &self.disc, &self.bc)?;
        let np = self.disc.nodes_per_element();
        if let Some((n, v)) = limited.values.iter().enumerate().find(|(_, v)| !v.is_physical()) {
            return Err(Error::Unphysical {
                element: n / np,
                node: n % np,
                density: v.density,
                temperature: v.temperature(),
            });
        }
        let maxwellians = map_nodes(limited.values.len(), cfg.parallel, |n| {
            qcm_solve(&limited.values[n], &self.grid, &cfg.qcm)
                .and_then(|s| discrete_maxwellian(&s.params, &self.grid))
                .map_err(|source| Error::Qcm {
                    element: n / np,
                    node: n % np,
                    source,
                })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok((limited, mask.count(), maxwellians))
    }

    /// One IMEX step from `state` and the evolved moment field `u0`
    /// (initially `moments_of(state)`).
    pub fn imex_step(
        &self,
        state: &SolutionState,
        u0: &MomentField,
        cfg: &StepConfig,
    ) -> Result<StepOutput> {
        if !(cfg.eps > 0.0 && cfg.dt > 0.0) {
            return Err(Error::Config(format!(
                "eps and dt must be positive (eps = {}, dt = {})",
                cfg.eps, cfg.dt
            )));
        }
        let tab = ImexTableau::default();
        let (g, d, dt, eps) = (tab.gamma, tab.delta, cfg.dt, cfg.eps);
        let a = g * dt / eps;
        let inv = 1.0 / (1.0 + a);
        let np = state.nodes_per_element;
        let n_nodes = state.matrices.len();

        // Stage 1.
        let f0 = transport_rhs(state, &self.bc, &self.disc, &self.grid, cfg.tol, cfg.parallel)?;
        let p0 = self.moment_transport(state, cfg.parallel)?;
        let u1_star = u0.axpy(&[(g * dt, &p0)]);
        let (_, troubled1, m1) = self.correct(&u1_star, cfg)?;
        let c1 = map_nodes(n_nodes, cfg.parallel, |n| {
            LowRankMatrix::hierarchical_sum_scaled(
                &[
                    (inv, &state.matrices[n]),
                    (g * dt * inv, &f0[n]),
                    (a * inv, &m1[n]),
                ],
                cfg.tol,
            )
        })
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;
        let stage1 = SolutionState::new(np, c1, state.time + g * dt);

        // Stage 2.
        let f1 = transport_rhs(&stage1, &self.bc, &self.disc, &self.grid, cfg.tol, cfg.parallel)?;
        let p1 = self.moment_transport(&stage1, cfg.parallel)?;
        let u2_star = u0.axpy(&[(d * dt, &p0), ((1.0 - d) * dt, &p1)]);
        let (u2, troubled2, m2) = self.correct(&u2_star, cfg)?;
        let b = (1.0 - g) * dt / eps * inv;
        let c2 = map_nodes(n_nodes, cfg.parallel, |n| {
            // M̃⁽¹⁾ and −C⁽¹⁾ are adjacent so they meet in the same pairwise sum.
            LowRankMatrix::hierarchical_sum_scaled(
                &[
                    (inv, &state.matrices[n]),
                    (d * dt * inv, &f0[n]),
                    ((1.0 - d) * dt * inv, &f1[n]),
                    (a * inv, &m2[n]),
                    (b, &m1[n]),
                    (-b, &stage1.matrices[n]),
                ],
                cfg.tol,
            )
        })
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;

        Ok(StepOutput {
            state: SolutionState::new(np, c2, state.time + dt),
            moments: u2,
            troubled: [troubled1, troubled2],
        })
    }

    /// Advances `initial` to `t_final` with steps of `cfg.dt`, shortening
    /// the last step to land exactly on `t_final`. `observer` sees every
    /// diagnostics record as it is produced.
    pub fn run(
        &self,
        initial: SolutionState,
        cfg: &StepConfig,
        t_final: f64,
        mut observer: impl FnMut(&DiagnosticsRecord),
    ) -> Result<RunOutput> {
        if !(t_final >= initial.time) {
            return Err(Error::Config(format!(
                "final time {t_final} precedes the initial time {}",
                initial.time
            )));
        }
        let start = Instant::now();
        let mut state = initial;
        let mut moments = self.moments_of(&state, cfg.parallel);
        let mut diagnostics = Vec::new();
        let record = |step, dt, state: &SolutionState, u: &MomentField, kinetic: &MomentField, troubled| {
            DiagnosticsRecord {
                step,
                time: state.time,
                dt,
                kinetic_totals: kinetic.totals(&self.disc),
                moment_totals: u.totals(&self.disc),
                max_rank: state.max_rank(),
                max_abs_uy: kinetic
                    .values
                    .iter()
                    .map(|v| v.velocity().1.abs())
                    .fold(0.0, f64::max),
                troubled,
                wall_seconds: start.elapsed().as_secs_f64(),
            }
        };
        let first = record(0, 0.0, &state, &moments, &moments, 0);
        observer(&first);
        diagnostics.push(first);

        let mut step = 0;
        let landing = 1e-12 * cfg.dt.max(t_final.abs());
        while t_final - state.time > landing {
            let remaining = t_final - state.time;
            let last = remaining <= cfg.dt + landing;
            let dt = if last { remaining } else { cfg.dt };
            // The moment system is carried forward on its own; it is only
            // initialised from the kinetic solution.
            let out = self.imex_step(&state, &moments, &StepConfig { dt, ..*cfg })?;
            step += 1;
            state = out.state;
            if last {
                state.time = t_final;
            }
            moments = out.moments;
            let kinetic = self.moments_of(&state, cfg.parallel);
            let rec = record(step, dt, &state, &moments, &kinetic, out.troubled[1]);
            observer(&rec);
            diagnostics.push(rec);
        }
        Ok(RunOutput {
            state,
            moments,
            diagnostics,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_constants() {
        let t = ImexTableau::default();
        assert!((t.delta + std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        assert_eq!(t.stage_times(1.0, 0.5)[2], 1.5);
        assert!(t.gamma > 0.0 && t.gamma < 1.0);
    }

    #[test]
    fn cfl_formula() {
        let grid = VelocityGrid::new(12.0, 10).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let disc = DGDiscretization::new(0.0, two_pi, 16, 0).unwrap();
        assert!((cfl_dt(&disc, &grid) - two_pi / (16.0 * 3.0 * 12.0)).abs() < 1e-15);
        let disc2 = DGDiscretization::new(0.0, two_pi, 16, 2).unwrap();
        assert!(cfl_dt(&disc2, &grid) < cfl_dt(&disc, &grid));
    }
}
