//! Initial and boundary data of the benchmark problems.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::discretization::{DGDiscretization, VelocityGrid};
use crate::error::{Error, Result};
use crate::integrator::Solver;
use crate::moments::MomentVector;
use crate::qcm::{corrected_maxwellian, QcmOptions};
use crate::transport::{map_nodes, BoundaryCondition, GhostState, SolutionState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Smooth,
    StandingShock,
    Sod,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "smooth" => Ok(Self::Smooth),
            "standing_shock" | "shock" => Ok(Self::StandingShock),
            "sod" => Ok(Self::Sod),
            other => Err(Error::Config(format!(
                "unknown problem `{other}` (expected smooth, standing_shock or sod)"
            ))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Smooth => "smooth",
            Self::StandingShock => "standing_shock",
            Self::Sod => "sod",
        })
    }
}

/// Density, bulk velocity and temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    pub density: f64,
    pub ux: f64,
    pub uy: f64,
    pub temperature: f64,
}

impl Primitive {
    pub const fn new(density: f64, ux: f64, uy: f64, temperature: f64) -> Self {
        Self {
            density,
            ux,
            uy,
            temperature,
        }
    }

    pub fn conserved(&self) -> MomentVector {
        MomentVector::from_primitive(self.density, self.ux, self.uy, self.temperature)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    FixedGhost,
    ZeroGradient,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Profile {
    Smooth,
    /// `a tanh(ξ (x − x₀)) + b` blend between two states.
    Tanh {
        left: Primitive,
        right: Primitive,
        sharpness: f64,
        center: f64,
    },
    Step {
        left: Primitive,
        right: Primitive,
        center: f64,
    },
}

/// A benchmark problem: domain, velocity bound, boundary treatment and the
/// initial macroscopic profile (the initial distribution is Maxwellian).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub a: f64,
    pub b: f64,
    pub vmax: f64,
    pub bc: BoundaryKind,
    /// Knudsen number the problem is usually run with.
    pub default_eps: f64,
    profile: Profile,
}

/// Upstream state of the standing shock.
pub const SHOCK_UPSTREAM: Primitive = Primitive::new(0.62963, 1.63712, 0.0, 0.595588);
/// Downstream state of the standing shock.
pub const SHOCK_DOWNSTREAM: Primitive = Primitive::new(1.0, 1.03078, 0.0, 1.0);
/// Sod left state.
pub const SOD_LEFT: Primitive = Primitive::new(1.0, 0.0, 0.0, 1.0);
/// Sod right state: `n = 1/8`, `p = 0.1`, hence `T = p/n = 0.8`.
pub const SOD_RIGHT: Primitive = Primitive::new(0.125, 0.0, 0.0, 0.8);

/// `n = 1 + ½ sin x`, `u = 0`, `T = 1` on a periodic `[0, 2π]`.
pub fn smooth_ic() -> ProblemSpec {
    ProblemSpec {
        kind: ProblemKind::Smooth,
        a: 0.0,
        b: 2.0 * PI,
        vmax: 12.0,
        bc: BoundaryKind::Periodic,
        default_eps: 1.0,
        profile: Profile::Smooth,
    }
}

/// Stationary shock smoothed over one element width `hx`.
pub fn standing_shock_ic(hx: f64) -> ProblemSpec {
    ProblemSpec {
        kind: ProblemKind::StandingShock,
        a: 0.0,
        b: 2.0 * PI,
        vmax: 12.0,
        bc: BoundaryKind::FixedGhost,
        default_eps: 1e-13,
        profile: Profile::Tanh {
            left: SHOCK_UPSTREAM,
            right: SHOCK_DOWNSTREAM,
            sharpness: 1.0 / hx,
            center: PI,
        },
    }
}

/// Sod shock tube on `[0, 1]` with velocities in `[-5, 5]²`.
pub fn sod_ic() -> ProblemSpec {
    ProblemSpec {
        kind: ProblemKind::Sod,
        a: 0.0,
        b: 1.0,
        vmax: 5.0,
        bc: BoundaryKind::ZeroGradient,
        default_eps: 1e-13,
        profile: Profile::Step {
            left: SOD_LEFT,
            right: SOD_RIGHT,
            center: 0.5,
        },
    }
}

impl ProblemSpec {
    /// Problem `kind` on a mesh of `nx` elements.
    pub fn for_kind(kind: ProblemKind, nx: usize) -> Self {
        match kind {
            ProblemKind::Smooth => smooth_ic(),
            ProblemKind::StandingShock => standing_shock_ic(2.0 * PI / nx as f64),
            ProblemKind::Sod => sod_ic(),
        }
    }

    pub fn primitive(&self, x: f64) -> Primitive {
        match self.profile {
            Profile::Smooth => Primitive::new(1.0 + 0.5 * x.sin(), 0.0, 0.0, 1.0),
            Profile::Tanh {
                left,
                right,
                sharpness,
                center,
            } => {
                let t = (sharpness * (x - center)).tanh();
                let blend = |l: f64, r: f64| 0.5 * (r - l) * t + 0.5 * (r + l);
                Primitive::new(
                    blend(left.density, right.density),
                    blend(left.ux, right.ux),
                    blend(left.uy, right.uy),
                    blend(left.temperature, right.temperature),
                )
            }
            Profile::Step {
                left,
                right,
                center,
            } => {
                if x <= center {
                    left
                } else {
                    right
                }
            }
        }
    }

    /// Unsmoothed exterior states `(left, right)`, where defined.
    pub fn far_field(&self) -> Option<(Primitive, Primitive)> {
        match self.profile {
            Profile::Smooth => None,
            Profile::Tanh { left, right, .. } | Profile::Step { left, right, .. } => {
                Some((left, right))
            }
        }
    }

    pub fn discretization(&self, nx: usize, degree: usize) -> Result<DGDiscretization> {
        DGDiscretization::new(self.a, self.b, nx, degree)
    }

    pub fn boundary(&self, grid: &VelocityGrid, qcm: &QcmOptions) -> Result<BoundaryCondition> {
        match self.bc {
            BoundaryKind::Periodic => Ok(BoundaryCondition::Periodic),
            BoundaryKind::ZeroGradient => Ok(BoundaryCondition::ZeroGradient),
            BoundaryKind::FixedGhost => {
                let (l, r) = self
                    .far_field()
                    .ok_or_else(|| Error::Config("fixed ghost states need far-field data".into()))?;
                let ghost = |p: Primitive, side: &str| -> Result<Box<GhostState>> {
                    let m = corrected_maxwellian(&p.conserved(), grid, qcm).map_err(|e| {
                        Error::Config(format!("{side} ghost state: {e}"))
                    })?;
                    Ok(Box::new(GhostState::new(m, grid)))
                };
                Ok(BoundaryCondition::FixedGhost {
                    left: ghost(l, "left")?,
                    right: ghost(r, "right")?,
                })
            }
        }
    }

    /// QCM-corrected Maxwellian of the profile at every node.
    pub fn initial_state(
        &self,
        disc: &DGDiscretization,
        grid: &VelocityGrid,
        qcm: &QcmOptions,
        parallel: bool,
    ) -> Result<SolutionState> {
        let np = disc.nodes_per_element();
        let matrices = map_nodes(disc.num_nodes(), parallel, |n| {
            let target = self.primitive(disc.node_x(n / np, n % np)).conserved();
            corrected_maxwellian(&target, grid, qcm).map_err(|source| Error::Qcm {
                element: n / np,
                node: n % np,
                source,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(SolutionState::new(np, matrices, 0.0))
    }

    /// Solver and initial state on an `nx × (k+1)` mesh and `nv²` velocity grid.
    pub fn setup(
        &self,
        nx: usize,
        degree: usize,
        nv: usize,
        qcm: &QcmOptions,
        parallel: bool,
    ) -> Result<(Solver, SolutionState)> {
        let disc = self.discretization(nx, degree)?;
        let grid = VelocityGrid::new(self.vmax, nv)?;
        let bc = self.boundary(&grid, qcm)?;
        let state = self.initial_state(&disc, &grid, qcm, parallel)?;
        Ok((Solver::new(disc, grid, bc), state))
    }
}
