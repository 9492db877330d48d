// Sod shock tube in the fluid limit: the kinetic solution stays rank one
// at every node, and the run is written to CSV.
//
// ```text
// cargo run --release --example sod_shock_tube
// ```

use bgk_lowrank::driver::{run_simulation, RunConfig};
use bgk_lowrank::problems::ProblemKind;
use bgk_lowrank::LimiterKind;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::temp_dir().join("bgk_sod_example");
    let cfg = RunConfig {
        problem: ProblemKind::Sod,
        degree: 1,
        nx: 30,
        nv: 40,
        eps: Some(1e-13),
        limiter: LimiterKind::Minmod,
        t_final: 0.02,
        out_dir: out_dir.clone(),
        ..RunConfig::default()
    };
    let summary = run_simulation(&cfg)?;
    println!(
        "{} steps, max rank {}, mass drift {:.3e}; CSV in {}",
        summary.steps,
        summary.max_rank,
        summary.final_totals.mass - summary.initial_totals.mass,
        out_dir.display()
    );
    if summary.max_rank != 1 {
        return Err(format!("expected rank one in the fluid limit, got {}", summary.max_rank).into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
