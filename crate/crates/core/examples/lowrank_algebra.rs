// Factored matrices: building Maxwellian data, truncated sums, row
// scaling and weighted double integrals computed on the factors.
//
// ```text
// cargo run --release --example lowrank_algebra
// ```

use bgk_lowrank::{LowRankMatrix, VelocityGrid};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = VelocityGrid::new(10.0, 80)?;
    let gaussian = |u: f64, t: f64| -> Vec<f64> {
        grid.nodes.iter().map(|v| (-(v - u).powi(2) / (2.0 * t)).exp()).collect()
    };
    let two_pi = 2.0 * std::f64::consts::PI;

    // Two Maxwellians are rank one each; beams crossing along the diagonal
    // sum to rank two.
    let m1 = LowRankMatrix::rank1(&gaussian(-1.0, 1.0), 0.5 / two_pi, &gaussian(-1.0, 1.0));
    let m2 = LowRankMatrix::rank1(&gaussian(1.0, 1.0), 0.5 / two_pi, &gaussian(1.0, 1.0));
    let mix = m1.truncated_sum(&m2, 1e-12)?;
    println!("rank of the two-beam mixture: {}", mix.rank());
    println!("singular values: {:?}", mix.core().as_slice());

    // Density and x-momentum by contracting weights against the factors.
    let density = mix.lrdi(&grid.weights, &grid.weights);
    let v_weighted: Vec<f64> = grid.nodes.iter().zip(&grid.weights).map(|(v, w)| v * w).collect();
    let momentum = mix.lrdi(&v_weighted, &grid.weights);
    println!("density = {density:.15}, momentum_x = {momentum:.3e}");
    if (density - 1.0).abs() > 1e-12 || momentum.abs() > 1e-12 {
        return Err("moments of the symmetric mixture are off".into());
    }

    // Multiplying rows by v_x keeps the rank; a loose threshold in a long
    // sum drops small contributions.
    let flux = mix.scale_rows(&grid.nodes)?;
    println!("rank of v_x f: {}", flux.rank());
    let small = LowRankMatrix::rank1(&gaussian(0.0, 0.5), 1e-9, &gaussian(0.5, 0.5));
    let terms = [mix.clone(), flux.scaled(0.1), small];
    let tight = LowRankMatrix::hierarchical_sum(&terms, 1e-14)?;
    let loose = LowRankMatrix::hierarchical_sum(&terms, 1e-6)?;
    println!("hierarchical sum rank: {} (tol 1e-14) vs {} (tol 1e-6)", tight.rank(), loose.rank());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
