//! Run configuration, experiment drivers and CSV/JSON output.
//!
//! Configuration files are plain text with one `key = value` pair per line;
//! `#` starts a comment. Recognised keys (defaults in brackets):
//!
//! | key        | meaning                                           |
//! |------------|---------------------------------------------------|
//! | `problem`  | `smooth`, `standing_shock` or `sod` [`smooth`]    |
//! | `nx`       | number of elements [16]                           |
//! | `nv`       | velocity points per dimension [100]               |
//! | `k`        | polynomial degree 0–2, NDG order k+1 [1]          |
//! | `eps`      | Knudsen number [problem default]                  |
//! | `tol`      | singular-value truncation threshold [1e-6]        |
//! | `limiter`  | `none`, `minmod` or `weno` [`none`]               |
//! | `t_final`  | final time [0.001]                                |
//! | `cfl`      | CFL number overriding 1/(2k+3) [unset]            |
//! | `vmax`     | velocity bound overriding the problem's [unset]   |
//! | `out_dir`  | output directory [`out`]                          |
//! | `seed`     | RNG seed recorded in the summary [0]              |
//! | `parallel` | per-node parallelism on the rayon pool [false]    |
//!
//! Velocity nodes are cell-centred: `v_j = −V_max + (j − ½) h_v`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::discretization::{DGDiscretization, VelocityGrid, MAX_CLI_DEGREE};
use crate::error::{Error, Result};
use crate::integrator::{cfl_dt, DiagnosticsRecord, RunOutput, Solver, StepConfig};
use crate::limiter::LimiterKind;
use crate::moments::MomentVector;
use crate::problems::{ProblemKind, ProblemSpec};
use crate::qcm::QcmOptions;
use crate::transport::SolutionState;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub nx: usize,
    pub nv: usize,
    pub degree: usize,
    /// `None` selects the problem's default Knudsen number.
    pub eps: Option<f64>,
    pub tol: f64,
    pub limiter: LimiterKind,
    pub t_final: f64,
    pub cfl: Option<f64>,
    pub vmax: Option<f64>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Smooth,
            nx: 16,
            nv: 100,
            degree: 1,
            eps: None,
            tol: 1e-6,
            limiter: LimiterKind::None,
            t_final: 0.001,
            cfl: None,
            vmax: None,
            out_dir: PathBuf::from("out"),
            seed: 0,
            parallel: false,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Parses `key = value` lines on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problem" => self.problem = value.parse()?,
            "nx" => self.nx = parse_value(key, value)?,
            "nv" => self.nv = parse_value(key, value)?,
            "k" | "degree" => self.degree = parse_value(key, value)?,
            "eps" => self.eps = Some(parse_value(key, value)?),
            "tol" => self.tol = parse_value(key, value)?,
            "limiter" => self.limiter = value.parse()?,
            "t_final" => self.t_final = parse_value(key, value)?,
            "cfl" => self.cfl = Some(parse_value(key, value)?),
            "vmax" => self.vmax = Some(parse_value(key, value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = parse_value(key, value)?,
            "parallel" => self.parallel = parse_value(key, value)?,
            other => return Err(Error::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Checks ranges; returns advisory warnings for valid but unusual values.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.nx == 0 {
            return bad("nx must be at least 1".into());
        }
        if self.nv < 2 {
            return bad(format!("nv must be at least 2, got {}", self.nv));
        }
        if self.degree > MAX_CLI_DEGREE {
            return bad(format!("k must be in 0..={MAX_CLI_DEGREE}, got {}", self.degree));
        }
        if !(self.eps() > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps()));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.t_final >= 0.0) {
            return bad(format!("t_final must be nonnegative, got {}", self.t_final));
        }
        if let Some(c) = self.cfl {
            if !(c > 0.0) {
                return bad(format!("cfl must be positive, got {c}"));
            }
        }
        if let Some(v) = self.vmax {
            if !(v > 0.0) {
                return bad(format!("vmax must be positive, got {v}"));
            }
        }
        let mut warnings = Vec::new();
        if !(1e-8..=1e-4).contains(&self.tol) {
            warnings.push(format!(
                "tol = {:e} is outside the usual range [1e-8, 1e-4]",
                self.tol
            ));
        }
        Ok(warnings)
    }

    pub fn spec(&self) -> ProblemSpec {
        let mut spec = ProblemSpec::for_kind(self.problem, self.nx);
        if let Some(v) = self.vmax {
            spec.vmax = v;
        }
        spec
    }

    pub fn eps(&self) -> f64 {
        self.eps.unwrap_or_else(|| self.spec().default_eps)
    }
}

/// A configured problem ready to be advanced.
pub struct Prepared {
    pub spec: ProblemSpec,
    pub solver: Solver,
    pub initial: SolutionState,
    pub step: StepConfig,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate()?;
    let spec = cfg.spec();
    let qcm = QcmOptions::default();
    let (solver, initial) = spec.setup(cfg.nx, cfg.degree, cfg.nv, &qcm, cfg.parallel)?;
    let dt = match cfg.cfl {
        Some(c) => c * solver.disc.hx / solver.grid.vmax,
        None => cfl_dt(&solver.disc, &solver.grid),
    };
    let step = StepConfig {
        eps: cfg.eps(),
        dt,
        tol: cfg.tol,
        limiter: cfg.limiter,
        qcm,
        parallel: cfg.parallel,
    };
    Ok(Prepared {
        spec,
        solver,
        initial,
        step,
    })
}

/// Runs `cfg` in memory.
pub fn simulate(cfg: &RunConfig) -> Result<(Prepared, RunOutput)> {
    let p = prepare(cfg)?;
    let out = p.solver.run(p.initial.clone(), &p.step, cfg.t_final, |_| {})?;
    Ok((p, out))
}

/// Largest componentwise deviation of the kinetic totals from their
/// initial values over a run.
pub fn max_drift(diagnostics: &[DiagnosticsRecord]) -> f64 {
    let Some(first) = diagnostics.first() else {
        return 0.0;
    };
    diagnostics
        .iter()
        .map(|d| (d.kinetic_totals - first.kinetic_totals).max_abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct Totals {
    pub mass: f64,
    pub momentum_x: f64,
    pub momentum_y: f64,
    pub energy: f64,
}

impl From<MomentVector> for Totals {
    fn from(u: MomentVector) -> Self {
        Self {
            mass: u.density,
            momentum_x: u.momentum_x,
            momentum_y: u.momentum_y,
            energy: u.energy,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub problem: String,
    pub nx: usize,
    pub nv: usize,
    pub degree: usize,
    pub eps: f64,
    pub tol: f64,
    pub limiter: String,
    pub t_final: f64,
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    pub wall_seconds: f64,
    pub max_rank: usize,
    /// Largest `|u_y|` over every step of the run.
    pub max_abs_uy: f64,
    pub max_drift: f64,
    pub initial_totals: Totals,
    pub final_totals: Totals,
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `cfg` and writes `moments.csv`, `conservation.csv`, `ranks.csv` and
/// `summary.json` under `cfg.out_dir`.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunSummary> {
    let (p, out) = simulate(cfg)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let disc = &p.solver.disc;
    let np = disc.nodes_per_element();
    let x_of = |n: usize| disc.node_x(n / np, n % np);
    let kinetic = p.solver.moments_of(&out.state, false);

    write_csv(
        &cfg.out_dir.join("moments.csv"),
        "x,n,u_x,u_y,T",
        kinetic.values.iter().enumerate().map(|(n, u)| {
            let (ux, uy) = u.velocity();
            vec![fmt_f(x_of(n)), fmt_f(u.density), fmt_f(ux), fmt_f(uy), fmt_f(u.temperature())]
        }),
    )?;
    write_csv(
        &cfg.out_dir.join("conservation.csv"),
        "step,time,dt,mass,momentum_x,momentum_y,energy,\
         moment_mass,moment_momentum_x,moment_momentum_y,moment_energy,\
         max_rank,max_abs_uy,troubled,wall_seconds",
        out.diagnostics.iter().map(|d| {
            let mut row = vec![d.step.to_string(), fmt_f(d.time), fmt_f(d.dt)];
            row.extend(d.kinetic_totals.to_array().map(fmt_f));
            row.extend(d.moment_totals.to_array().map(fmt_f));
            row.extend([
                d.max_rank.to_string(),
                fmt_f(d.max_abs_uy),
                d.troubled.to_string(),
                fmt_f(d.wall_seconds),
            ]);
            row
        }),
    )?;
    write_csv(
        &cfg.out_dir.join("ranks.csv"),
        "x,rank",
        out.state
            .matrices
            .iter()
            .enumerate()
            .map(|(n, c)| vec![fmt_f(x_of(n)), c.rank().to_string()]),
    )?;

    let first = out.diagnostics.first().expect("initial record");
    let last = out.diagnostics.last().expect("initial record");
    let summary = RunSummary {
        problem: cfg.problem.to_string(),
        nx: cfg.nx,
        nv: cfg.nv,
        degree: cfg.degree,
        eps: p.step.eps,
        tol: cfg.tol,
        limiter: cfg.limiter.to_string(),
        t_final: cfg.t_final,
        dt: p.step.dt,
        steps: last.step,
        seed: cfg.seed,
        wall_seconds: last.wall_seconds,
        max_rank: out.state.max_rank(),
        max_abs_uy: out.diagnostics.iter().map(|d| d.max_abs_uy).fold(0.0, f64::max),
        max_drift: max_drift(&out.diagnostics),
        initial_totals: first.kinetic_totals.into(),
        final_totals: last.kinetic_totals.into(),
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("cannot serialise summary: {e}")))?;
    fs::write(cfg.out_dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

/// Dense nodal values of a kinetic state.
fn densify_all(state: &SolutionState) -> Vec<DMatrix<f64>> {
    state
        .matrices
        .iter()
        .map(|c| {
            let (l, r) = (c.left(), c.right());
            let mut scaled = l.clone();
            for (j, s) in c.core().iter().enumerate() {
                scaled.column_mut(j).scale_mut(*s);
            }
            scaled * r.transpose()
        })
        .collect()
}

/// Self-convergence L1 distance between a run on `coarse` and one on the
/// twice-refined mesh `fine`:
/// `h_v²/(2π) Σ |f[h_x] − f[h_x/2]|`, with the coarse nodal polynomial
/// evaluated at the fine quadrature nodes and integrated with the fine
/// Gauss weights.
pub fn l1_self_distance(
    coarse: &SolutionState,
    coarse_disc: &DGDiscretization,
    fine: &SolutionState,
    fine_disc: &DGDiscretization,
    grid: &VelocityGrid,
) -> Result<f64> {
    if fine_disc.nx != 2 * coarse_disc.nx || fine_disc.degree != coarse_disc.degree {
        return Err(Error::Config("fine mesh must halve the coarse mesh at equal degree".into()));
    }
    let np = coarse_disc.nodes_per_element();
    let dc = densify_all(coarse);
    let df = densify_all(fine);
    let mut total = 0.0;
    for i in 0..coarse_disc.nx {
        for half in 0..2 {
            let j = 2 * i + half;
            for p in 0..np {
                let x = fine_disc.node_x(j, p);
                let xi = (x - coarse_disc.element_center(i)) / coarse_disc.hx;
                let l = coarse_disc.lagrange(xi);
                let mut diff = -&df[j * np + p];
                for (q, lq) in l.iter().enumerate() {
                    diff += &dc[i * np + q] * *lq;
                }
                total += fine_disc.mass(p) * diff.iter().map(|v| v.abs()).sum::<f64>();
            }
        }
    }
    Ok(total * grid.hv * grid.hv / (2.0 * std::f64::consts::PI))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub nx: usize,
    /// Distance between the `nx` and `2 nx` solutions.
    pub error: f64,
    /// `log₂(e(nx/2) / e(nx))`.
    pub order: Option<f64>,
}

/// Self-convergence table over a doubling sequence of element counts.
/// The last entry only serves as the reference for its predecessor.
pub fn convergence_study(base: &RunConfig, refinements: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if refinements.len() < 2 || refinements.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Config(
            "refinements must be a doubling sequence of at least two meshes".into(),
        ));
    }
    let runs = refinements
        .iter()
        .map(|&nx| {
            let cfg = RunConfig { nx, ..base.clone() };
            simulate(&cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for w in runs.windows(2) {
        let (pc, oc) = &w[0];
        let (pf, of) = &w[1];
        let error = l1_self_distance(
            &oc.state,
            &pc.solver.disc,
            &of.state,
            &pf.solver.disc,
            &pc.solver.grid,
        )?;
        let order = rows.last().map(|prev| (prev.error / error).log2());
        rows.push(ConvergenceRow {
            nx: pc.solver.disc.nx,
            error,
            order,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub nv: usize,
    /// Median wall time over the repeats.
    pub seconds: f64,
    pub samples: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchTable {
    pub degree: usize,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `log(seconds)` against `log(nv)`.
    pub slope: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Wall-time scaling with the velocity resolution. One untimed warm-up run
/// precedes the measurements; each entry is the median of `repeats` runs.
pub fn complexity_bench(base: &RunConfig, nvs: &[usize], repeats: usize) -> Result<BenchTable> {
    if nvs.len() < 2 || repeats == 0 {
        return Err(Error::Config("need at least two Nv values and one repeat".into()));
    }
    let time_one = |nv: usize| -> Result<f64> {
        let p = prepare(&RunConfig { nv, ..base.clone() })?;
        let start = Instant::now();
        p.solver.run(p.initial, &p.step, base.t_final, |_| {})?;
        Ok(start.elapsed().as_secs_f64())
    };
    time_one(nvs[0])?;
    let rows = nvs
        .iter()
        .map(|&nv| {
            let samples = (0..repeats).map(|_| time_one(nv)).collect::<Result<Vec<_>>>()?;
            Ok(BenchRow {
                nv,
                seconds: median(samples.clone()),
                samples,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| (r.nv as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.seconds.ln()).collect();
    Ok(BenchTable {
        degree: base.degree,
        slope: fit_slope(&xs, &ys),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationRow {
    pub eps: f64,
    pub tol: f64,
    pub max_drift: f64,
    pub max_rank: usize,
}

/// Maximum drift of the kinetic totals for every `(eps, tol)` pair.
pub fn conservation_study(
    base: &RunConfig,
    eps_values: &[f64],
    tols: &[f64],
) -> Result<Vec<ConservationRow>> {
    let mut rows = Vec::new();
    for &tol in tols {
        for &eps in eps_values {
            let (_, out) = simulate(&RunConfig {
                eps: Some(eps),
                tol,
                ..base.clone()
            })?;
            rows.push(ConservationRow {
                eps,
                tol,
                max_drift: max_drift(&out.diagnostics),
                max_rank: out.diagnostics.iter().map(|d| d.max_rank).max().unwrap_or(0),
            });
        }
    }
    Ok(rows)
}

/// Serialises rows as CSV with the given header and field extractor.
pub fn write_table<T>(
    path: &Path,
    header: &str,
    rows: &[T],
    fields: impl Fn(&T) -> Vec<String>,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    write_csv(path, header, rows.iter().map(fields))
}

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    fmt_f(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_text() {
        let cfg = RunConfig::parse(
            "# comment\nproblem = sod\nnx=8\nk = 2 # NDG3\nlimiter = minmod\neps = 1e-13\n",
        )
        .unwrap();
        assert_eq!(cfg.problem, ProblemKind::Sod);
        assert_eq!((cfg.nx, cfg.degree), (8, 2));
        assert_eq!(cfg.limiter, LimiterKind::Minmod);
        assert_eq!(cfg.eps(), 1e-13);
        assert!(RunConfig::parse("nx 8").is_err());
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("nx = many").is_err());
    }

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        assert!(ok.validate().unwrap().is_empty());
        let warn = RunConfig { tol: 1e-15, ..ok.clone() };
        assert_eq!(warn.validate().unwrap().len(), 1);
        assert!(RunConfig { degree: 3, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { eps: Some(0.0), ..ok.clone() }.validate().is_err());
        assert!(RunConfig { nv: 1, ..ok }.validate().is_err());
    }

    #[test]
    fn slope_and_median() {
        let xs = [1.0f64, 2.0, 3.0];
        assert!((fit_slope(&xs, &xs.map(|x| 2.0 * x + 1.0)) - 2.0).abs() < 1e-14);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn rejects_non_doubling_refinements() {
        assert!(convergence_study(&RunConfig::default(), &[8, 12]).is_err());
    }

    #[test]
    fn float_format_round_trips() {
        let x = 0.1 + 0.2;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }
}
