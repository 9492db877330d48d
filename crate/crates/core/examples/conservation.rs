// Drift of mass, momentum and energy on the periodic problem, for a tight
// and a loose truncation threshold.
//
// ```text
// cargo run --release --example conservation
// ```

use bgk_lowrank::driver::{conservation_study, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let base = RunConfig {
        degree: 2,
        nx: 16,
        nv: 48,
        t_final: 0.02,
        ..RunConfig::default()
    };
    let rows = conservation_study(&base, &[1.0, 1e-6], &[1e-15, 1e-6])?;
    println!("{:>8} {:>8} {:>12} {:>9}", "eps", "tol", "max drift", "max rank");
    for r in &rows {
        println!("{:>8.0e} {:>8.0e} {:>12.3e} {:>9}", r.eps, r.tol, r.max_drift, r.max_rank);
    }
    if rows.iter().any(|r| r.tol == 1e-15 && r.max_drift > 1e-11) {
        return Err("conserved totals drift with a tight threshold".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
