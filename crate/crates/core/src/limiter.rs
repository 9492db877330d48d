//! Troubled-cell detection and post-processing slope limiting of the nodal
//! moment field.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::discretization::DGDiscretization;
use crate::error::{Error, Result};
use crate::moments::{MomentField, MomentVector};
use crate::transport::BoundaryCondition;

/// `s · min |aₗ|` when all arguments share the sign `s`, zero otherwise.
pub fn minmod(args: &[f64]) -> f64 {
    let Some(&first) = args.first() else {
        return 0.0;
    };
    let s = first.signum();
    if first == 0.0 || args.iter().any(|a| a.signum() != s || *a == 0.0) {
        return 0.0;
    }
    s * args.iter().fold(f64::INFINITY, |m, a| m.min(a.abs()))
}

/// Per-element troubled flags (logical OR over the four conserved variables).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TroubledMask {
    pub flags: Vec<bool>,
}

impl TroubledMask {
    pub fn count(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }

    pub fn any(&self) -> bool {
        self.flags.iter().any(|f| *f)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LimiterKind {
    #[default]
    None,
    Minmod,
    Weno,
}

impl FromStr for LimiterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "minmod" => Ok(Self::Minmod),
            "weno" => Ok(Self::Weno),
            other => Err(Error::Config(format!(
                "unknown limiter `{other}` (expected none, minmod or weno)"
            ))),
        }
    }
}

impl fmt::Display for LimiterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Minmod => "minmod",
            Self::Weno => "weno",
        })
    }
}

/// Scalar per-element data for one conserved variable.
struct CellData {
    average: f64,
    /// Interior trace at the right interface, `U⁻_{j+½}`.
    right: f64,
    /// Interior trace at the left interface, `U⁺_{j−½}`.
    left: f64,
}

fn cell_data(values: &[f64], disc: &DGDiscretization) -> CellData {
    let dot = |a: &[f64]| a.iter().zip(values).map(|(a, v)| a * v).sum::<f64>();
    CellData {
        average: dot(&disc.weights),
        right: dot(&disc.l_right),
        left: dot(&disc.l_left),
    }
}

fn component(nodes: &[MomentVector], var: usize) -> Vec<f64> {
    nodes.iter().map(|u| u.to_array()[var]).collect()
}

/// Neighbour cell averages and the minmod-limited interface deviations of
/// one variable in element `i`.
struct Slopes {
    average: f64,
    tilde: f64,
    tilde_bar: f64,
    limited_tilde: f64,
    limited_tilde_bar: f64,
}

fn slopes(prev: &[f64], this: &[f64], next: &[f64], disc: &DGDiscretization) -> Slopes {
    let c = cell_data(this, disc);
    let avg_prev = cell_data(prev, disc).average;
    let avg_next = cell_data(next, disc).average;
    let dp = avg_next - c.average;
    let dm = c.average - avg_prev;
    let tilde = c.right - c.average;
    let tilde_bar = c.average - c.left;
    Slopes {
        average: c.average,
        tilde,
        tilde_bar,
        limited_tilde: minmod(&[tilde, dp, dm]),
        limited_tilde_bar: minmod(&[tilde_bar, dp, dm]),
    }
}

/// Flags element `i` if the minmod function modifies either interface
/// deviation of any conserved variable.
pub fn detect_troubled(
    u: &MomentField,
    disc: &DGDiscretization,
    bc: &BoundaryCondition,
) -> Result<TroubledMask> {
    let np = disc.nodes_per_element();
    let halo = bc.halo(&u.values, np, |g| g.moments)?;
    let flags = (0..u.num_elements())
        .map(|i| {
            let st = halo.stencil(&u.values, i);
            (0..4).any(|var| {
                let s = slopes(
                    &component(st.prev, var),
                    &component(st.this, var),
                    &component(st.next, var),
                    disc,
                );
                s.limited_tilde != s.tilde || s.limited_tilde_bar != s.tilde_bar
            })
        })
        .collect();
    Ok(TroubledMask { flags })
}

/// Nodal values of the linear function with cell average `average` and
/// interface values differing by `jump` (right minus left).
fn linear_nodes(average: f64, jump: f64, disc: &DGDiscretization) -> Vec<f64> {
    disc.nodes.iter().map(|xi| average + jump * xi).collect()
}

fn set_component(nodes: &mut [MomentVector], var: usize, values: &[f64]) {
    for (u, v) in nodes.iter_mut().zip(values) {
        let mut a = u.to_array();
        a[var] = *v;
        *u = MomentVector::from_array(a);
    }
}

fn limit_with(
    u: &MomentField,
    mask: &TroubledMask,
    disc: &DGDiscretization,
    bc: &BoundaryCondition,
    mut reconstruct: impl FnMut(&[f64], &[f64], &[f64]) -> Vec<f64>,
) -> Result<MomentField> {
    let np = disc.nodes_per_element();
    if mask.flags.len() != u.num_elements() {
        return Err(Error::Config("troubled mask does not match the moment field".into()));
    }
    if !mask.any() {
        return Ok(u.clone());
    }
    let halo = bc.halo(&u.values, np, |g| g.moments)?;
    let mut out = u.clone();
    for (i, _) in mask.flags.iter().enumerate().filter(|(_, f)| **f) {
        let st = halo.stencil(&u.values, i);
        let target = &mut out.values[i * np..(i + 1) * np];
        for var in 0..4 {
            let values = reconstruct(
                &component(st.prev, var),
                &component(st.this, var),
                &component(st.next, var),
            );
            set_component(target, var, &values);
        }
    }
    Ok(out)
}

/// Replaces every flagged element by the linear function through the
/// minmod-limited interface values `V⁺_{j−½}`, `V⁻_{j+½}`, keeping the cell
/// average fixed.
pub fn apply_minmod_limiter(
    u: &MomentField,
    mask: &TroubledMask,
    disc: &DGDiscretization,
    bc: &BoundaryCondition,
) -> Result<MomentField> {
    limit_with(u, mask, disc, bc, |prev, this, next| {
        let s = slopes(prev, this, next, disc);
        let v_right = s.average + s.limited_tilde;
        let v_left = s.average - s.limited_tilde_bar;
        linear_nodes(s.average, v_right - v_left, disc)
    })
}

/// Linear weights of the left, central and right stencils.
const WENO_LINEAR_WEIGHTS: [f64; 3] = [0.001, 0.998, 0.001];
const WENO_EPSILON: f64 = 1e-6;

/// Compact WENO reconstruction using the polynomials of the two immediate
/// neighbours, mean-shifted to the cell average of the troubled element.
struct Weno {
    /// Nodal values → monomial coefficients in `ξ`.
    to_monomial: DMatrix<f64>,
    /// Lagrange basis of the left / right neighbour evaluated at this
    /// element's nodes (`ξ + 1`, `ξ − 1` in the neighbour's frame).
    from_prev: DMatrix<f64>,
    from_next: DMatrix<f64>,
}

impl Weno {
    fn new(disc: &DGDiscretization) -> Result<Self> {
        let np = disc.nodes_per_element();
        let vandermonde = DMatrix::from_fn(np, np, |p, j| disc.nodes[p].powi(j as i32));
        let to_monomial = vandermonde
            .try_inverse()
            .ok_or_else(|| Error::Config("singular nodal Vandermonde matrix".into()))?;
        let shifted = |shift: f64| {
            DMatrix::from_fn(np, np, |p, q| disc.lagrange(disc.nodes[p] + shift)[q])
        };
        Ok(Self {
            to_monomial,
            from_prev: shifted(1.0),
            from_next: shifted(-1.0),
        })
    }

    /// `Σ_{l≥1} ∫_I (dˡp/dξˡ)² dξ` for the polynomial with the given nodal values.
    fn smoothness(&self, values: &DVector<f64>, disc: &DGDiscretization) -> f64 {
        let mut coeffs: Vec<f64> = (&self.to_monomial * values).iter().copied().collect();
        let mut beta = 0.0;
        for _ in 1..coeffs.len() {
            coeffs = coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| j as f64 * c)
                .collect();
            beta += disc
                .nodes
                .iter()
                .zip(&disc.weights)
                .map(|(xi, w)| {
                    let d: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * xi + c);
                    w * d * d
                })
                .sum::<f64>();
        }
        beta
    }

    fn reconstruct(&self, prev: &[f64], this: &[f64], next: &[f64], disc: &DGDiscretization) -> Vec<f64> {
        let this = DVector::from_column_slice(this);
        let average = disc.cell_average(this.as_slice());
        let shift_mean = |v: DVector<f64>| {
            let a = disc.cell_average(v.as_slice());
            v.add_scalar(average - a)
        };
        let candidates = [
            shift_mean(&self.from_prev * DVector::from_column_slice(prev)),
            this.clone(),
            shift_mean(&self.from_next * DVector::from_column_slice(next)),
        ];
        let raw: Vec<f64> = candidates
            .iter()
            .zip(WENO_LINEAR_WEIGHTS)
            .map(|(c, g)| g / (WENO_EPSILON + self.smoothness(c, disc)).powi(2))
            .collect();
        let total: f64 = raw.iter().sum();
        let blended = candidates
            .iter()
            .zip(&raw)
            .fold(DVector::zeros(this.len()), |acc, (c, w)| acc + c * (w / total));
        let v_right = disc.interpolate(blended.as_slice(), 0.5);
        let v_left = disc.interpolate(blended.as_slice(), -0.5);
        linear_nodes(average, v_right - v_left, disc)
    }
}

/// WENO-type limiter for flagged elements: a nonlinear blend of the
/// element polynomial with its mean-shifted neighbour polynomials, then
/// re-populated as the linear function through the blended interface values.
pub fn apply_weno_limiter(
    u: &MomentField,
    mask: &TroubledMask,
    disc: &DGDiscretization,
    bc: &BoundaryCondition,
) -> Result<MomentField> {
    let weno = Weno::new(disc)?;
    limit_with(u, mask, disc, bc, |prev, this, next| {
        weno.reconstruct(prev, this, next, disc)
    })
}

/// Detects troubled elements and applies the chosen limiter.
pub fn apply_limiter(
    kind: LimiterKind,
    u: &MomentField,
    disc: &DGDiscretization,
    bc: &BoundaryCondition,
) -> Result<(MomentField, TroubledMask)> {
    if kind == LimiterKind::None {
        let mask = TroubledMask {
            flags: vec![false; u.num_elements()],
        };
        return Ok((u.clone(), mask));
    }
    let mask = detect_troubled(u, disc, bc)?;
    let limited = match kind {
        LimiterKind::Minmod => apply_minmod_limiter(u, &mask, disc, bc)?,
        _ => apply_weno_limiter(u, &mask, disc, bc)?,
    };
    Ok((limited, mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_from(disc: &DGDiscretization, f: impl Fn(f64) -> f64) -> MomentField {
        let values = (0..disc.nx)
            .flat_map(|i| (0..disc.nodes_per_element()).map(move |p| (i, p)))
            .map(|(i, p)| {
                let v = f(disc.node_x(i, p));
                MomentVector::new(v, 0.1 * v, 0.0, 2.0 * v)
            })
            .collect();
        MomentField::new(disc.nodes_per_element(), values)
    }

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(minmod(&[1.0, -2.0, 3.0]), 0.0);
        assert_eq!(minmod(&[-0.5, -2.0, -3.0]), -0.5);
        assert_eq!(minmod(&[0.0, 1.0]), 0.0);
    }

    #[test]
    fn linear_data_is_not_troubled() {
        let disc = DGDiscretization::new(0.0, 1.0, 8, 1).unwrap();
        let u = field_from(&disc, |x| 1.0 + x);
        let mask = detect_troubled(&u, &disc, &BoundaryCondition::ZeroGradient).unwrap();
        assert!(!mask.flags[1..7].iter().any(|f| *f), "{mask:?}");
    }

    #[test]
    fn piecewise_constants_never_flag() {
        let disc = DGDiscretization::new(0.0, 1.0, 8, 0).unwrap();
        let u = field_from(&disc, |x| if x < 0.5 { 1.0 } else { 0.1 });
        assert!(!detect_troubled(&u, &disc, &BoundaryCondition::Periodic).unwrap().any());
    }

    #[test]
    fn limiters_are_identity_without_flags() {
        let disc = DGDiscretization::new(0.0, 1.0, 4, 2).unwrap();
        let u = field_from(&disc, |x| x.sin());
        let mask = TroubledMask {
            flags: vec![false; 4],
        };
        let bc = BoundaryCondition::Periodic;
        assert_eq!(apply_minmod_limiter(&u, &mask, &disc, &bc).unwrap(), u);
        assert_eq!(apply_weno_limiter(&u, &mask, &disc, &bc).unwrap(), u);
    }

    #[test]
    fn limiting_preserves_averages_at_a_step() {
        let disc = DGDiscretization::new(0.0, 1.0, 10, 2).unwrap();
        let u = field_from(&disc, |x| if x < 0.47 { 1.0 + 0.3 * x * x } else { 0.2 });
        let bc = BoundaryCondition::ZeroGradient;
        let mask = detect_troubled(&u, &disc, &bc).unwrap();
        assert!(mask.flags[4]);
        for limited in [
            apply_minmod_limiter(&u, &mask, &disc, &bc).unwrap(),
            apply_weno_limiter(&u, &mask, &disc, &bc).unwrap(),
        ] {
            for i in 0..disc.nx {
                let before = disc.cell_average(&component(u.element(i), 0));
                let after = disc.cell_average(&component(limited.element(i), 0));
                assert!((before - after).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn parses_kind() {
        assert_eq!("MinMod".parse::<LimiterKind>().unwrap(), LimiterKind::Minmod);
        assert!("tvb".parse::<LimiterKind>().is_err());
        assert_eq!(LimiterKind::Weno.to_string(), "weno");
    }
}
