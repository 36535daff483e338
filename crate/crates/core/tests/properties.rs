use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;

use spacelike::discretization::io::{field_from_str, field_to_string};
use spacelike::discretization::{build_grid, differentiate, integrate_values, Domain, ScalarField, StarDomain2D};
use spacelike::symfunc::{check_newton_maclaurin, in_gamma_k, newton_tensor, sigmas, Spectrum, SquareMatrix};
use spacelike::HyperboloidCap;

fn matrix(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |v| DMatrix::from_row_slice(n, n, &v))
}

fn band_limited_domain() -> impl Strategy<Value = StarDomain2D> {
    prop_oneof![
        (0.3..2.0f64).prop_map(|r| StarDomain2D::disk([0.1, -0.2], r).unwrap()),
        (0.0..0.15f64, 2..5usize).prop_map(|(e, m)| StarDomain2D::perturbed_disk([0.0, 0.0], 1.0, e, m).unwrap()),
    ]
}

fn star_domain() -> impl Strategy<Value = StarDomain2D> {
    prop_oneof![
        (0.3..2.0f64).prop_map(|r| StarDomain2D::disk([0.1, -0.2], r).unwrap()),
        (0.5..1.0f64).prop_map(|b| StarDomain2D::ellipse([0.0, 0.0], 1.0, b, 24).unwrap()),
        (0.0..0.15f64, 2..5usize).prop_map(|(e, m)| StarDomain2D::perturbed_disk([0.0, 0.0], 1.0, e, m).unwrap()),
    ]
}

/// Elementary symmetric polynomials by expanding `Π (1 + λ_i t)`.
fn elementary(lambda: &[f64]) -> Vec<f64> {
    let mut e = vec![1.0];
    for &l in lambda {
        e.push(0.0);
        for k in (1..e.len()).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigmas_are_similarity_invariant(a in matrix(4), p in matrix(4)) {
        let p = p + DMatrix::identity(4, 4) * 5.0;
        let b = &p * &a * p.clone().try_inverse().unwrap();
        let sa = sigmas(&SquareMatrix::new(a).unwrap());
        let sb = sigmas(&SquareMatrix::new(b).unwrap());
        for (x, y) in sa.iter().zip(&sb) {
            prop_assert!((x - y).abs() <= 1e-8 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn diagonal_sigmas_are_elementary_polynomials(lambda in prop::collection::vec(-3.0..3.0f64, 1..6)) {
        let n = lambda.len();
        let a = SquareMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda.clone()))).unwrap();
        let s = sigmas(&a);
        let e = elementary(&lambda);
        for k in 0..=n {
            prop_assert!((s[k] - e[k]).abs() <= 1e-10 * (1.0 + e[k].abs()));
        }
    }

    #[test]
    fn newton_tensor_is_the_sigma_gradient(a in matrix(3), k in 1..=3usize) {
        // d/dt σ_k(A + tE_ij) = (T_{k−1})_ji
        let sq = SquareMatrix::new(a.clone()).unwrap();
        let t = newton_tensor(k, &sq).unwrap();
        let step = 1e-5;
        for i in 0..3 {
            for j in 0..3 {
                let mut plus = a.clone();
                let mut minus = a.clone();
                plus[(i, j)] += step;
                minus[(i, j)] -= step;
                let fd = (sigmas(&SquareMatrix::new(plus).unwrap())[k]
                    - sigmas(&SquareMatrix::new(minus).unwrap())[k]) / (2.0 * step);
                prop_assert!((fd - t.as_matrix()[(j, i)]).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn positive_spectra_satisfy_newton_maclaurin(lambda in prop::collection::vec(0.01..5.0f64, 2..6)) {
        let n = lambda.len();
        let spectrum = Spectrum::new(lambda).unwrap();
        for k in 1..n {
            let report = check_newton_maclaurin(&spectrum, k).unwrap();
            prop_assert_eq!(report.violations, 0);
        }
    }

    #[test]
    fn cones_are_nested(lambda in prop::collection::vec(-2.0..2.0f64, 2..6)) {
        let n = lambda.len();
        for k in 2..=n {
            if in_gamma_k(&lambda, k).inside {
                prop_assert!(in_gamma_k(&lambda, k - 1).inside);
            }
        }
    }

    #[test]
    fn quadrature_integrates_linear_functions(domain in star_domain(), a in -1.0..1.0f64, b in -1.0..1.0f64) {
        let grid = Arc::new(build_grid(&Domain::Star(domain.clone()), 24, 48).unwrap());
        let [cx, cy] = domain.center();
        let f = ScalarField::from_fn(grid.clone(), |x| 1.0 + a * (x[0] - cx) + b * (x[1] - cy)).unwrap();
        let ones = vec![1.0; grid.len()];
        prop_assert!((integrate_values(&grid, &ones) - domain.area()).abs() <= 1e-12 * domain.area());
        // linear terms integrate to the first moments, which are zero only for symmetric domains
        let fine = Arc::new(build_grid(&Domain::Star(domain.clone()), 48, 96).unwrap());
        let g = ScalarField::from_fn(fine.clone(), |x| 1.0 + a * (x[0] - cx) + b * (x[1] - cy)).unwrap();
        let coarse = integrate_values(&grid, f.values());
        let refined = integrate_values(&fine, g.values());
        prop_assert!((coarse - refined).abs() <= 1e-2 * domain.area());
    }

    #[test]
    fn quadratics_are_differentiated_exactly(domain in band_limited_domain(), c in prop::collection::vec(-1.0..1.0f64, 6)) {
        let grid = Arc::new(build_grid(&Domain::Star(domain), 12, 32).unwrap());
        let f = ScalarField::from_fn(grid.clone(), |x| {
            c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[0] * x[0] + c[4] * x[0] * x[1] + c[5] * x[1] * x[1]
        }).unwrap();
        let d = differentiate(&f);
        for (x, (g, h)) in grid.nodes().iter().zip(d.gradient.iter().zip(&d.hessian)) {
            let gx = c[1] + 2.0 * c[3] * x[0] + c[4] * x[1];
            let gy = c[2] + c[4] * x[0] + 2.0 * c[5] * x[1];
            prop_assert!((g[0] - gx).abs() <= 1e-9 && (g[1] - gy).abs() <= 1e-9);
            prop_assert!((h[(0, 0)] - 2.0 * c[3]).abs() <= 1e-8);
            prop_assert!((h[(0, 1)] - c[4]).abs() <= 1e-8);
            prop_assert!((h[(1, 1)] - 2.0 * c[5]).abs() <= 1e-8);
        }
    }

    #[test]
    fn field_files_round_trip(domain in star_domain(), seed in any::<u64>()) {
        let grid = Arc::new(build_grid(&Domain::Star(domain), 6, 10).unwrap());
        let field = ScalarField::from_fn(grid, |x| (seed as f64 * 1e-3 + x[0]).sin() * x[1].exp()).unwrap();
        let back = field_from_str(&field_to_string(&field)).unwrap();
        prop_assert_eq!(back.values(), field.values());
        prop_assert_eq!(back.grid().descriptor(), field.grid().descriptor());
    }

    #[test]
    fn caps_have_the_closed_form_p_value(theta0 in -4.0..-1.01f64, c in -2.0..2.0f64) {
        let cap = HyperboloidCap::from_angle(2, c, theta0, &[0.0, 0.0]).unwrap();
        prop_assert!((cap.p_value() + c + theta0).abs() <= 1e-12);
    }
}
