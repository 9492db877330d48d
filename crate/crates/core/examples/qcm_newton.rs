// Quadrature-corrected Maxwellians: on a coarse, truncated velocity grid
// the naive Maxwellian misses its own moments; the Newton-corrected one
// reproduces them to rounding.
//
// ```text
// cargo run --release --example qcm_newton
// ```

use bgk_lowrank::qcm::{discrete_maxwellian, qcm_solve};
use bgk_lowrank::{compute_moments, MomentVector, QcmOptions, QcmParams, VelocityGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let target = MomentVector::from_primitive(1.0, 0.5, -0.25, 1.2);
    println!("{:>6} {:>6} {:>12} {:>12} {:>5}", "Vmax", "Nv", "naive err", "QCM err", "iters");
    for (vmax, nv) in [(4.0, 16), (4.0, 32), (6.0, 32), (12.0, 100)] {
        let grid = VelocityGrid::new(vmax, nv)?;
        let naive = discrete_maxwellian(&QcmParams::from_moments(&target), &grid)?;
        let naive_err = (compute_moments(&naive, &grid) - target).max_abs();

        let sol = qcm_solve(&target, &grid, &QcmOptions::default())?;
        let corrected = discrete_maxwellian(&sol.params, &grid)?;
        let qcm_err = (compute_moments(&corrected, &grid) - target).max_abs();
        println!("{vmax:>6} {nv:>6} {naive_err:>12.3e} {qcm_err:>12.3e} {:>5}", sol.iterations);
        if qcm_err > 1e-13 {
            return Err(format!("QCM residual {qcm_err:e} on Vmax={vmax}, Nv={nv}").into());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
