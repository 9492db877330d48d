// Standing shock in the fluid limit with and without the minmod limiter;
// the limiter removes the Gibbs oscillations in the density.
//
// ```text
// cargo run --release --example standing_shock
// ```

use bgk_lowrank::driver::{simulate, RunConfig};
use bgk_lowrank::problems::ProblemKind;
use bgk_lowrank::LimiterKind;

fn density_averages(cfg: &RunConfig) -> Result<Vec<f64>, Box<dyn std::error::Error>> {
    let (p, out) = simulate(cfg)?;
    let u = p.solver.moments_of(&out.state, false);
    Ok((0..u.num_elements())
        .map(|i| p.solver.disc.cell_average(&u.element(i).iter().map(|m| m.density).collect::<Vec<_>>()))
        .collect())
}

fn total_variation(a: &[f64]) -> f64 {
    a.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let base = RunConfig {
        problem: ProblemKind::StandingShock,
        degree: 1,
        nx: 32,
        nv: 48,
        eps: Some(1e-13),
        t_final: 0.05,
        ..RunConfig::default()
    };
    let plain = density_averages(&base)?;
    let limited = density_averages(&RunConfig { limiter: LimiterKind::Minmod, ..base })?;
    let (tv_plain, tv_limited) = (total_variation(&plain), total_variation(&limited));
    println!("density TV without limiter: {tv_plain:.6}");
    println!("density TV with minmod:     {tv_limited:.6}");
    if tv_limited >= tv_plain {
        return Err("the limiter did not reduce the total variation".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
