// Wall time against the velocity resolution: the cost of the low-rank
// solver grows roughly linearly in Nv rather than quadratically.
//
// ```text
// cargo run --release --example complexity_bench
// ```

use bgk_lowrank::driver::{complexity_bench, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let base = RunConfig {
        degree: 1,
        nx: 8,
        t_final: 0.01,
        ..RunConfig::default()
    };
    let table = complexity_bench(&base, &[64, 128, 256], 1)?;
    for r in &table.rows {
        println!("Nv = {:>4}: {:.4} s", r.nv, r.seconds);
    }
    println!("log-log slope: {:.2}", table.slope);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
