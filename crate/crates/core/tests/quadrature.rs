//! Gauss–Legendre and midpoint velocity quadrature.

mod common;

use bgk_lowrank::{gauss_legendre, DGDiscretization, VelocityGrid};
use common::{gauss_table, lagrange};

/// `∫_{-1/2}^{1/2} ξ^m dξ`.
fn monomial_integral(m: i32) -> f64 {
    if m % 2 == 1 {
        0.0
    } else {
        2.0 * 0.5f64.powi(m + 1) / (m + 1) as f64
    }
}

#[test]
fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
    for n in 1..=8 {
        let (x, w) = gauss_legendre(n);
        assert_eq!(x.len(), n);
        for m in 0..(2 * n) as i32 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(m)).sum();
            assert!((q - monomial_integral(m)).abs() < 1e-13, "n = {n}, degree {m}");
        }
        // One degree higher is no longer integrated exactly.
        let m = 2 * n as i32;
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(m)).sum();
        assert!((q - monomial_integral(m)).abs() > 1e-10);
    }
}

#[test]
fn nodes_match_closed_forms() {
    for k in 0..=2 {
        let (x, w) = gauss_legendre(k + 1);
        let (xe, we) = gauss_table(k);
        for i in 0..=k {
            assert!((x[i] - xe[i]).abs() < 1e-15);
            assert!((w[i] - we[i]).abs() < 1e-15);
        }
    }
}

#[test]
fn discretization_tables_are_consistent() {
    for k in 0..=2 {
        let disc = DGDiscretization::new(-1.0, 3.0, 8, k).unwrap();
        let (xe, _) = gauss_table(k);
        for q in 0..=k {
            assert!((disc.l_left[q] - lagrange(&xe, q, -0.5)).abs() < 1e-13);
            assert!((disc.l_right[q] - lagrange(&xe, q, 0.5)).abs() < 1e-13);
        }
        let avg = disc.cell_average(&vec![3.0; k + 1]);
        assert!((avg - 3.0).abs() < 1e-15);
        assert!((disc.node_x(7, k) - (3.0 - 0.5 * 0.5 + 0.5 * disc.nodes[k])).abs() < 1e-14);
    }
}

#[test]
fn midpoint_rule_integrates_the_standard_gaussian() {
    let grid = VelocityGrid::new(12.0, 100).unwrap();
    assert!((grid.hv - 0.24).abs() < 1e-15);
    assert!((grid.nodes[0] + 12.0 - 0.12).abs() < 1e-14);
    let integral: f64 = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(v, w)| w * (-v * v / 2.0).exp())
        .sum();
    let exact = (2.0 * std::f64::consts::PI).sqrt();
    assert!((integral - exact).abs() < 1e-12, "{:e}", integral - exact);
}

#[test]
fn velocity_grid_is_symmetric() {
    let grid = VelocityGrid::new(6.0, 24).unwrap();
    for (a, b) in grid.nodes.iter().zip(grid.nodes.iter().rev()) {
        assert_eq!(*a, -*b);
    }
    assert!(grid.nodes.iter().all(|v| *v != 0.0));
    assert!(VelocityGrid::new(6.0, 1).is_err());
    assert!(VelocityGrid::new(-1.0, 8).is_err());
}
