//! Independent dense full-rank reference implementations used as test
//! oracles. Nothing here calls the library's transport, moment, QCM or
//! integrator code; quadrature tables are hard-coded closed forms.

#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix4, Vector4};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use bgk_lowrank::LowRankMatrix;

/// Closed-form Gauss–Legendre nodes and weights on `[-1/2, 1/2]`.
pub fn gauss_table(k: usize) -> (Vec<f64>, Vec<f64>) {
    match k {
        0 => (vec![0.0], vec![1.0]),
        1 => {
            let x = 0.5 / 3f64.sqrt();
            (vec![-x, x], vec![0.5, 0.5])
        }
        2 => {
            let x = 0.5 * 0.6f64.sqrt();
            (vec![-x, 0.0, x], vec![5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0])
        }
        _ => panic!("no closed-form table for k = {k}"),
    }
}

/// Lagrange basis polynomial `q` through `nodes`, evaluated at `x`.
pub fn lagrange(nodes: &[f64], q: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|(s, _)| *s != q)
        .map(|(_, xs)| (x - xs) / (nodes[q] - xs))
        .product()
}

/// Derivative of basis polynomial `p` at `x` by the product rule.
pub fn lagrange_prime(nodes: &[f64], p: usize, x: f64) -> f64 {
    let mut total = 0.0;
    for m in 0..nodes.len() {
        if m == p {
            continue;
        }
        let mut term = 1.0 / (nodes[p] - nodes[m]);
        for (s, xs) in nodes.iter().enumerate() {
            if s != p && s != m {
                term *= (x - xs) / (nodes[p] - xs);
            }
        }
        total += term;
    }
    total
}

/// Dense DG setting: periodic mesh of `nx` elements on `[a, b]`.
#[derive(Clone, Debug)]
pub struct DenseDg {
    pub nx: usize,
    pub k: usize,
    pub hx: f64,
    pub xi: Vec<f64>,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
    pub hv: f64,
}

impl DenseDg {
    pub fn new(a: f64, b: f64, nx: usize, k: usize, vmax: f64, nv: usize) -> Self {
        let (xi, w) = gauss_table(k);
        let hv = 2.0 * vmax / nv as f64;
        let v = (0..nv).map(|j| -vmax + hv * (j as f64 + 0.5)).collect();
        Self {
            nx,
            k,
            hx: (b - a) / nx as f64,
            xi,
            w,
            v,
            hv,
        }
    }

    pub fn np(&self) -> usize {
        self.k + 1
    }

    fn trace(&self, elem: &[DMatrix<f64>], at: f64) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(elem[0].nrows(), elem[0].ncols());
        for (q, f) in elem.iter().enumerate() {
            out += f * lagrange(&self.xi, q, at);
        }
        out
    }

    /// Semi-discrete upwind DG right-hand side of `f_t + v_x f_x = 0`
    /// (periodic), from the weak form
    /// `h w_p f_p' = -[v f̂ L_p] + Σ_q w_q v f_q L_p'(ξ_q)`.
    pub fn transport(&self, f: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        let np = self.np();
        let nv = self.v.len();
        let elem = |i: usize| &f[i * np..(i + 1) * np];
        // Upwind numerical flux v f̂ at the right interface of every element.
        let flux: Vec<DMatrix<f64>> = (0..self.nx)
            .map(|i| {
                let inner = self.trace(elem(i), 0.5);
                let outer = self.trace(elem((i + 1) % self.nx), -0.5);
                DMatrix::from_fn(nv, nv, |m, n| {
                    let vx = self.v[m];
                    if vx > 0.0 {
                        vx * inner[(m, n)]
                    } else {
                        vx * outer[(m, n)]
                    }
                })
            })
            .collect();
        let mut out = Vec::with_capacity(f.len());
        for i in 0..self.nx {
            let left_flux = &flux[(i + self.nx - 1) % self.nx];
            for p in 0..np {
                let mut acc = &flux[i] * (-lagrange(&self.xi, p, 0.5))
                    + left_flux * lagrange(&self.xi, p, -0.5);
                for q in 0..np {
                    let c = self.w[q] * lagrange_prime(&self.xi, p, self.xi[q]);
                    let fq = &elem(i)[q];
                    acc += DMatrix::from_fn(nv, nv, |m, n| c * self.v[m] * fq[(m, n)]);
                }
                out.push(acc / (self.hx * self.w[p]));
            }
        }
        out
    }

    pub fn moments(&self, f: &DMatrix<f64>) -> Vector4<f64> {
        dense_moments(f, &self.v, self.hv)
    }

    pub fn maxwellian(&self, p: &Vector4<f64>) -> DMatrix<f64> {
        dense_maxwellian(p, &self.v)
    }
}

/// `(n, n u_x, n u_y, E)` by direct double Riemann sums.
pub fn dense_moments(f: &DMatrix<f64>, v: &[f64], hv: f64) -> Vector4<f64> {
    let mut m = Vector4::zeros();
    for (a, &vx) in v.iter().enumerate() {
        for (b, &vy) in v.iter().enumerate() {
            let x = f[(a, b)] * hv * hv;
            m += Vector4::new(x, vx * x, vy * x, 0.5 * (vx * vx + vy * vy) * x);
        }
    }
    m
}

/// Pointwise Maxwellian with parameters `(n, u_x, u_y, T)`.
pub fn dense_maxwellian(p: &Vector4<f64>, v: &[f64]) -> DMatrix<f64> {
    let (n, ux, uy, t) = (p[0], p[1], p[2], p[3]);
    DMatrix::from_fn(v.len(), v.len(), |a, b| {
        n / (2.0 * std::f64::consts::PI * t)
            * (-((v[a] - ux).powi(2) + (v[b] - uy).powi(2)) / (2.0 * t)).exp()
    })
}

/// Quadrature-corrected parameters by Newton's method with a central
/// finite-difference Jacobian on the dense moment map.
pub fn dense_qcm(target: &Vector4<f64>, v: &[f64], hv: f64) -> Vector4<f64> {
    let moments = |p: &Vector4<f64>| dense_moments(&dense_maxwellian(p, v), v, hv);
    let n = target[0];
    let (ux, uy) = (target[1] / n, target[2] / n);
    let t = (2.0 * target[3] / n - ux * ux - uy * uy) / 2.0;
    let mut p = Vector4::new(n, ux, uy, t);
    for _ in 0..40 {
        let r = target - moments(&p);
        if r.norm() <= 1e-15 * target.norm() {
            break;
        }
        let mut j = Matrix4::zeros();
        for c in 0..4 {
            let h = 1e-6 * p[c].abs().max(1.0);
            let mut e = Vector4::zeros();
            e[c] = h;
            j.set_column(c, &((moments(&(p + e)) - moments(&(p - e))) / (2.0 * h)));
        }
        p += j.lu().solve(&r).expect("nonsingular oracle Jacobian");
    }
    p
}

/// Dense relaxation of nodal moments `u` to corrected Maxwellians.
pub fn dense_corrected(dg: &DenseDg, u: &[Vector4<f64>]) -> Vec<DMatrix<f64>> {
    u.iter()
        .map(|t| dg.maxwellian(&dense_qcm(t, &dg.v, dg.hv)))
        .collect()
}

/// Independent dense version of one IMEX step (no limiter), in the
/// unrearranged stage form
/// `C¹ = C⁰ + γΔt F⁰ + γΔt/ε (M¹ − C¹)`,
/// `C² = C⁰ + δΔt F⁰ + (1−δ)Δt F¹ + (1−γ)Δt/ε (M¹ − C¹) + γΔt/ε (M² − C²)`,
/// with moments advanced explicitly from the kinetic transport.
pub fn dense_imex_step(dg: &DenseDg, c0: &[DMatrix<f64>], dt: f64, eps: f64) -> Vec<DMatrix<f64>> {
    let g = 1.0 - std::f64::consts::SQRT_2 / 2.0;
    let d = 1.0 - 1.0 / (2.0 * g);
    let u0: Vec<_> = c0.iter().map(|c| dg.moments(c)).collect();
    let f0 = dg.transport(c0);
    let p0: Vec<_> = f0.iter().map(|f| dg.moments(f)).collect();
    let u1: Vec<_> = (0..c0.len()).map(|n| u0[n] + p0[n] * (g * dt)).collect();
    let m1 = dense_corrected(dg, &u1);
    let lam = g * dt / eps;
    let c1: Vec<_> = (0..c0.len())
        .map(|n| (&c0[n] + &f0[n] * (g * dt) + &m1[n] * lam) / (1.0 + lam))
        .collect();
    let f1 = dg.transport(&c1);
    let p1: Vec<_> = f1.iter().map(|f| dg.moments(f)).collect();
    let u2: Vec<_> = (0..c0.len())
        .map(|n| u0[n] + p0[n] * (d * dt) + p1[n] * ((1.0 - d) * dt))
        .collect();
    let m2 = dense_corrected(dg, &u2);
    let mu = (1.0 - g) * dt / eps;
    (0..c0.len())
        .map(|n| {
            (&c0[n] + &f0[n] * (d * dt) + &f1[n] * ((1.0 - d) * dt) + (&m1[n] - &c1[n]) * mu
                + &m2[n] * lam)
                / (1.0 + lam)
        })
        .collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random `m × n` matrix of exact rank `r` (generic entries).
pub fn random_dense(rng: &mut StdRng, m: usize, n: usize, r: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, r, |_, _| rng.gen_range(-1.0..1.0));
    let b = DMatrix::from_fn(r, n, |_, _| rng.gen_range(-1.0..1.0));
    a * b
}

pub fn random_lowrank(rng: &mut StdRng, m: usize, n: usize, r: usize) -> LowRankMatrix {
    LowRankMatrix::from_dense(&random_dense(rng, m, n, r), 1e-10).expect("factorisation")
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
