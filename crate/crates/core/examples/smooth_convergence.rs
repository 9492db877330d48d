// Self-convergence of the smooth periodic problem for NDG1–3.
//
// ```text
// cargo run --release --example smooth_convergence
// ```

use bgk_lowrank::driver::{convergence_study, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for degree in 0..=2 {
        let base = RunConfig {
            degree,
            nv: 48,
            eps: Some(1e-2),
            t_final: 0.001,
            ..RunConfig::default()
        };
        let rows = convergence_study(&base, &[8, 16, 32, 64])?;
        println!("NDG{}:", degree + 1);
        for r in &rows {
            let order = r.order.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
            println!("  Nx = {:>3}  L1 = {:.3e}  order {order}", r.nx, r.error);
        }
        let last = rows.last().and_then(|r| r.order).unwrap_or(0.0);
        if (last - (degree + 1) as f64).abs() > 0.3 {
            return Err(format!("NDG{} order {last:.2}", degree + 1).into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
