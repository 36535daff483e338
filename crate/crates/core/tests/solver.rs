use spacelike::discretization::{Domain, StarDomain2D};
use spacelike::solver::{
    boundary_angle_stats, solution_bundle, solve_dirichlet, solve_radial, Damping, ResidualForm, SolverConfig,
    SolverError,
};
use spacelike::verifier::{check_below_boundary, check_k_convexity, check_p_function, Tolerances};

fn disk(radius: f64) -> Domain {
    Domain::Star(StarDomain2D::disk([0.0, 0.0], radius).unwrap())
}

fn ellipse(b: f64) -> Domain {
    Domain::Star(StarDomain2D::ellipse([0.0, 0.0], 1.0, b, 32).unwrap())
}

#[test]
fn disks_reproduce_the_hyperboloid() {
    for radius in [0.5, 1.0, 2.0] {
        for k in [1, 2] {
            let cfg = SolverConfig::new(disk(radius), k, 1.0, 0.3).with_grid(32, 64);
            let r = solve_dirichlet(&cfg).unwrap();
            let theta0 = -(1.0 + radius * radius).sqrt();
            let centre = 0.3 + theta0 + 1.0;
            let h2 = (radius / 32.0f64).powi(2);
            assert!(
                (r.solution.center_value() - centre).abs() < 20.0 * h2,
                "R = {radius}, k = {k}"
            );
            assert!((r.angle.mean - theta0).abs() < 20.0 * h2, "R = {radius}, k = {k}");
            assert!(r.angle.spread <= 1e-3);
            assert!(r.residual <= cfg.tolerance);
        }
    }
}

#[test]
fn grid_solution_matches_the_radial_profile() {
    let profile = solve_radial(2, 1, 1.0, 1.0, 0.0).unwrap();
    let mut previous = f64::INFINITY;
    for n in [16, 32, 64] {
        let r = solve_dirichlet(&SolverConfig::new(disk(1.0), 1, 1.0, 0.0).with_grid(n, 2 * n)).unwrap();
        let grid = r.solution.grid().clone();
        let err = grid
            .nodes()
            .iter()
            .zip(r.solution.values())
            .map(|(x, u)| (u - profile.eval(x.norm())).abs())
            .fold(0.0, f64::max);
        assert!(err < 10.0 / (n * n) as f64, "{n}: {err:e}");
        assert!(err < previous / 3.0);
        previous = err;
    }
}

#[test]
fn residual_forms_give_the_same_solution() {
    let mut cfg = SolverConfig::new(ellipse(0.8), 2, 1.0, 0.0).with_grid(16, 32);
    let assembled = solve_dirichlet(&cfg).unwrap();
    cfg.residual_form = ResidualForm::Generic;
    let generic = solve_dirichlet(&cfg).unwrap();
    let diff = assembled
        .solution
        .values()
        .iter()
        .zip(generic.solution.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(diff < 1e-9, "{diff:e}");
}

#[test]
fn non_circular_domains_break_the_constant_angle() {
    let perturbed = Domain::Star(StarDomain2D::perturbed_disk([0.0, 0.0], 1.0, 0.1, 3).unwrap());
    for domain in [perturbed, ellipse(0.7)] {
        let r = solve_dirichlet(&SolverConfig::new(domain, 1, 1.0, 0.0).with_grid(32, 64)).unwrap();
        let stats = boundary_angle_stats(&r);
        assert!(stats.spread >= 1e-2, "{stats:?}");
        assert!(stats.min < stats.mean && stats.mean < stats.max);
    }
}

#[test]
fn off_centre_disk_is_still_a_cap() {
    let domain = Domain::Star(StarDomain2D::disk([0.4, -0.2], 1.0).unwrap());
    let r = solve_dirichlet(&SolverConfig::new(domain, 1, 1.0, 0.0).with_grid(32, 64)).unwrap();
    assert!(r.angle.spread <= 1e-3, "{:?}", r.angle);
    assert!((r.angle.mean + 2f64.sqrt()).abs() < 1e-2);
}

#[test]
fn maximum_principle_holds_on_solutions() {
    let tol = Tolerances::default();
    for (domain, k) in [(disk(1.0), 1), (ellipse(0.75), 1), (ellipse(0.75), 2)] {
        let r = solve_dirichlet(&SolverConfig::new(domain, k, 1.0, 0.5).with_grid(32, 64)).unwrap();
        assert!(r.solution.values().iter().all(|u| *u < 0.5));
        assert!(r.cone_margin > 0.0);
        let bundle = solution_bundle(&r).unwrap();
        assert!(check_below_boundary(&bundle, 0.5).pass);
        assert!(check_k_convexity(&bundle).pass);
        let p = check_p_function(&bundle, &tol);
        let sign = p.iter().find(|x| x.check == "p_subsolution_sign").unwrap();
        assert!(sign.pass, "{sign:?}");
    }
}

#[test]
fn target_curvature_sets_the_cap_radius() {
    for hk in [0.5, 2.0] {
        let r = solve_dirichlet(&SolverConfig::new(disk(1.0), 1, hk, 0.0).with_grid(32, 64)).unwrap();
        let expected = 1.0 / hk - (1.0 / (hk * hk) + 1.0).sqrt();
        assert!((r.solution.center_value() - expected).abs() < 1e-3, "H = {hk}");
    }
}

#[test]
fn iteration_limit_reports_history() {
    let mut cfg = SolverConfig::new(ellipse(0.7), 1, 1.0, 0.0).with_grid(16, 32);
    cfg.max_iterations = 1;
    match solve_dirichlet(&cfg) {
        Err(SolverError::NonConvergence {
            iterations, history, ..
        }) => {
            assert_eq!(iterations, 1);
            assert_eq!(history.len(), 2);
            assert!(history[1] < history[0]);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn undamped_newton_converges_from_the_cap_guess_on_a_disk() {
    let mut cfg = SolverConfig::new(disk(1.0), 1, 1.0, 0.0).with_grid(16, 32);
    cfg.damping = Damping::None;
    let r = solve_dirichlet(&cfg).unwrap();
    assert!(r.iterations <= 5);
}
