use biharm::biharmonic::{
    compatibility_residual, flux_mismatch, solve_neumann, weak_form_residual, CascadeOptions, NeumannProblem,
};
use biharm::fem::FeSpace;
use biharm::manufactured::{case_bubble, case_sine, l2_error, squared_bubble};
use biharm::mesh::{unit_disk_mesh, unit_square_mesh};
use biharm::symbolic::harmonic_basis;

fn square(n: usize, degree: usize) -> FeSpace {
    FeSpace::new(unit_square_mesh(n).unwrap(), degree).unwrap()
}

#[test]
fn bubble_converges_at_second_order() {
    let case = case_bubble();
    let mut es = Vec::new();
    let mut eu = Vec::new();
    for n in [8, 16, 32] {
        let space = square(n, 1);
        let sol = solve_neumann(&space, &case.problem(), &CascadeOptions::default()).unwrap();
        es.push(l2_error(&sol.sigma_h, |x, y| (case.sigma)(x, y)));
        eu.push(l2_error(&sol.s_h, |x, y| (case.u)(x, y)));
    }
    assert!((es[1] / es[2]).log2() > 1.9, "{es:?}");
    assert!((eu[1] / eu[2]).log2() > 1.9, "{eu:?}");
}

#[test]
fn p2_cascade_on_sine() {
    let case = case_sine();
    let errors: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| {
            let space = square(n, 2);
            let sol = solve_neumann(&space, &case.problem(), &CascadeOptions::default()).unwrap();
            l2_error(&sol.s_h, |x, y| (case.u)(x, y))
        })
        .collect();
    let rate = (errors[1] / errors[2]).log2();
    assert!(rate > 2.7, "{errors:?}");
}

#[test]
fn shifted_flux_residuals_are_minus_boundary_moments() {
    // r(η) changes by -∮η: -4 for η = 1, -2 for η = x and η = y
    let space = square(16, 1);
    let problem = case_sine().problem();
    let basis = harmonic_basis(1);
    let base = compatibility_residual(&space, &problem, &basis).unwrap();
    let shifted = compatibility_residual(&space, &problem.with_h_offset(1.0), &basis).unwrap();
    for (k, want) in [-4.0, -2.0, -2.0].into_iter().enumerate() {
        assert!((shifted[k] - base[k] - want).abs() < 1e-12, "{k}: {}", shifted[k] - base[k]);
        assert!(base[k].abs() < 1e-6);
    }
}

#[test]
fn solution_ignores_h() {
    let space = square(10, 2);
    let problem = case_bubble().problem();
    let other = NeumannProblem { h: std::sync::Arc::new(|x, y, n| x * y + n[0]), ..problem.clone() };
    let a = solve_neumann(&space, &problem, &CascadeOptions::default()).unwrap();
    let b = solve_neumann(&space, &other, &CascadeOptions::default()).unwrap();
    assert_eq!(a.sigma_h.coefficients(), b.sigma_h.coefficients());
    assert_eq!(a.s_h.coefficients(), b.s_h.coefficients());
    assert_ne!(a.diagnostics.flux_mismatch, b.diagnostics.flux_mismatch);
    assert_eq!(flux_mismatch(&space, &a, &problem).unwrap(), a.diagnostics.flux_mismatch);
}

#[test]
fn weak_residual_decreases_for_bubble() {
    let case = case_bubble();
    let r = squared_bubble();
    let res: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let space = square(n, 1);
            let sol = solve_neumann(&space, &case.problem(), &CascadeOptions::default()).unwrap();
            weak_form_residual(&space, &sol, &case.problem(), &r).unwrap()
        })
        .collect();
    assert!(res[0] > res[1] && res[1] > res[2], "{res:?}");
}

#[test]
fn constant_laplacian_on_disk() {
    // f = 0, g = 1, h = 0 is compatible on any domain: σ = 1 and Δs = 1
    let space = FeSpace::new(unit_disk_mesh(8).unwrap(), 2).unwrap();
    let problem = NeumannProblem::new(|_, _| 0.0, |_, _| 1.0, |_, _, _| 0.0);
    let sol = solve_neumann(&space, &problem, &CascadeOptions::default()).unwrap();
    assert!(sol.sigma_h.coefficients().iter().all(|c| (c - 1.0).abs() < 1e-9));
    assert!(sol.diagnostics.compat_max() < 1e-12);
    assert!(sol.diagnostics.flux_mismatch < 1e-8, "{}", sol.diagnostics.flux_mismatch);
    // (r² - 1)/4 on the circle; the inscribed polygon shifts the centre value slightly
    let centre = sol.s_h.evaluate([0.0, 0.0]).unwrap();
    assert!((centre + 0.25).abs() < 5e-3, "{centre}");
}

#[test]
fn bubble_compatibility_and_side_data() {
    let case = case_bubble();
    for x in [0.1f64, 0.5, 0.8] {
        let want = 2.0 * x * x * (1.0 - x).powi(2);
        assert!(((case.g)(x, 0.0) - want).abs() < 1e-15);
    }
    let space = square(16, 1);
    let r = compatibility_residual(&space, &case.problem(), &harmonic_basis(3)).unwrap();
    assert!(r.iter().all(|v| v.abs() < 1e-10), "{r:?}");
}
