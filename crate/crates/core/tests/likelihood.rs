mod common;

use common::{barycentric_points, dense_projection, dense_sigma, signal, spread_nodes, tetrahedron, unit_square};
use manifold_splines::fem::{assemble, AnisotropyParams};
use manifold_splines::likelihood::{
    concentrated_loglik, evaluate, fit, fit_bound, full_loglik, nelder_mead, observation_covariance, AnisotropyMode,
    FitError, FitOptions, NelderMeadOptions,
};
use manifold_splines::mesh::{
    bind_observations, generate_cylinder_mesh, BoundObservations, Chart, ObservationSet, TriangleMesh,
};
use manifold_splines::solver::PinvBackend;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn cylinder() -> TriangleMesh<f64> {
    generate_cylinder_mesh::<f64>(20.0, 0.5, 1.0, 4.0).unwrap()
}

fn point_data(mesh: &TriangleMesh<f64>, n: usize, tau: f64) -> (BoundObservations<f64>, Vec<f64>) {
    let pts = barycentric_points(mesh, n, 5);
    let y: Vec<f64> = pts.iter().map(|&p| 3.0 + signal(p)).collect();
    (bind_observations(mesh, &ObservationSet::at_points(pts, y.clone(), tau).unwrap()).unwrap(), y)
}

#[test]
fn covariance_matches_dense_sigma() {
    let mesh = cylinder();
    let ops = assemble(&mesh, None).unwrap();
    let pinv = ops.pinv(PinvBackend::default()).unwrap();
    let (bound, _) = point_data(&mesh, 14, 0.3);
    let k = observation_covariance(&ops, &pinv, &bound, 0.3).unwrap();
    let p = dense_projection(&bound);
    let want = &p * dense_sigma(&ops) * p.transpose() + DMatrix::identity(14, 14) * 0.09;
    assert!((&k - &want).amax() < 1e-9 * want.amax());
}

#[test]
fn concentrated_likelihood_matches_dense_profile() {
    let mesh = cylinder();
    let ops = assemble(&mesh, None).unwrap();
    let pinv = ops.pinv(PinvBackend::default()).unwrap();
    let (bound, y) = point_data(&mesh, 12, 0.25);
    let v = concentrated_loglik(&ops, &pinv, &bound, &y, 0.25).unwrap();

    let pm = dense_projection(&bound);
    let k = &pm * dense_sigma(&ops) * pm.transpose() + DMatrix::identity(12, 12) * 0.0625;
    let kinv = k.clone().try_inverse().unwrap();
    let p = &pm * DVector::from_column_slice(ops.phi0());
    let yv = DVector::from_column_slice(&y);
    let a = p.dot(&(&kinv * &yv)) / p.dot(&(&kinv * &p));
    let r = &yv - &p * a;
    let s = (r.dot(&(&kinv * &r)) / 12.0).sqrt();
    let log_det = k.determinant().ln();
    assert!((v.a_star - a).abs() < 1e-8 * a.abs());
    assert!((v.sigma_star - s).abs() < 1e-8 * s);
    assert!((v.log_det - log_det).abs() < 1e-8 * log_det.abs().max(1.0));
    assert!((v.value - (-12.0 * s.ln() - 0.5 * log_det)).abs() < 1e-7);

    // The profile is the full likelihood at its maximizer, up to constants.
    let full = full_loglik(&k, p.as_slice(), &y, v.a_star, v.sigma_star).unwrap();
    let shift = -6.0 * (1.0 + (2.0 * std::f64::consts::PI).ln());
    assert!((full - (v.value + shift)).abs() < 1e-8);
    for (da, ds) in [(0.05, 1.0), (-0.05, 1.0), (0.0, 1.02), (0.0, 0.98)] {
        assert!(full_loglik(&k, p.as_slice(), &y, v.a_star + da, v.sigma_star * ds).unwrap() < full);
    }
}

#[test]
fn interpolation_likelihood_needs_distinct_nodes() {
    let mesh = cylinder();
    let nodes = spread_nodes(mesh.num_vertices(), 8, 1);
    let y: Vec<f64> = nodes.iter().map(|&j| signal(mesh.vertices()[j])).collect();
    let bound = bind_observations(&mesh, &ObservationSet::at_nodes(nodes, y.clone(), 0.0).unwrap()).unwrap();
    let v = evaluate(&mesh, &bound, &y, None, 0.0, PinvBackend::default()).unwrap();
    assert!(v.value.is_finite() && v.sigma_star > 0.0);
    // Two rows bound to the same location make K singular.
    let p = [1.0, 0.0, 0.0];
    let on_mesh = mesh.vertices().iter().copied().find(|v| (v[0] - p[0]).abs() < 1e-12 && v[2] == 0.0).unwrap();
    let dup = ObservationSet::at_points(vec![on_mesh, on_mesh, mesh.vertices()[40]], vec![1.0, 2.0, 0.0], 1e-9).unwrap();
    let bound = bind_observations(&mesh, &dup).unwrap();
    assert_eq!(
        evaluate(&mesh, &bound, &[1.0, 2.0, 0.0], None, 1e-9, PinvBackend::default()).unwrap_err(),
        FitError::SingularCovariance
    );
}

#[test]
fn fit_modes() {
    let mesh = cylinder();
    let (bound, y) = point_data(&mesh, 15, 0.2);
    let iso = fit_bound(&mesh, &bound, &y, &FitOptions { anisotropy: AnisotropyMode::None, ..Default::default() }).unwrap();
    assert_eq!(iso.trace.len(), 1);
    assert!(iso.beta_hat.is_isotropic());
    let direct = evaluate(&mesh, &bound, &y, None, 0.2, PinvBackend::default()).unwrap();
    assert!((iso.loglik - direct.value).abs() < 1e-12);

    let fixed = AnisotropyParams { angle: 0.3, log_ratio: 0.7 };
    let f = fit_bound(&mesh, &bound, &y, &FitOptions { anisotropy: AnisotropyMode::Fixed(fixed), ..Default::default() })
        .unwrap();
    assert_eq!(f.beta_hat, fixed);

    let full = fit_bound(&mesh, &bound, &y, &FitOptions::default()).unwrap();
    assert!(full.loglik >= iso.loglik - 1e-9);
    assert!(full.beta_hat.log_ratio >= 0.0);
    assert!(full.beta_hat.angle.abs() <= std::f64::consts::FRAC_PI_2 + 1e-12);
    assert_eq!(full.starts.len(), 5);
    assert!(full.trace.windows(2).all(|w| w[0].start != w[1].start || w[1].best_so_far >= w[0].best_so_far));
    let re = evaluate(&mesh, &bound, &y, Some(&full.beta_hat), 0.2, PinvBackend::default()).unwrap();
    assert!((re.value - full.loglik).abs() < 1e-9);

    let tau = fit_bound(
        &mesh,
        &bound,
        &y,
        &FitOptions { anisotropy: AnisotropyMode::None, estimate_tau: true, ..Default::default() },
    )
    .unwrap();
    assert!(tau.tau_hat > 0.0);
    assert!(tau.loglik >= iso.loglik - 1e-9);
}

#[test]
fn fit_rejects_bad_input() {
    let mesh = cylinder();
    let (bound, y) = point_data(&mesh, 2, 0.2);
    assert!(matches!(fit_bound(&mesh, &bound, &y, &FitOptions::default()), Err(FitError::InvalidInput(_))));
    let tet = tetrahedron();
    let obs = ObservationSet::at_nodes(vec![0, 1, 2], vec![1.0, 2.0, 0.5], 0.0).unwrap();
    assert!(matches!(fit(&tet, &obs, &FitOptions::default()), Err(FitError::Fem(_))));
    let (bound, y) = point_data(&mesh, 6, 1e-3);
    let zero_tau = FitOptions { anisotropy: AnisotropyMode::None, estimate_tau: true, ..Default::default() };
    let nodes = ObservationSet::at_nodes(vec![0, 5, 9], vec![1.0, 2.0, 0.5], 0.0).unwrap();
    assert!(fit(&mesh, &nodes, &zero_tau).is_err());
    assert!(fit_bound(&mesh, &bound, &y, &zero_tau).is_ok());
}

/// Turning the chart axes by `δ` shifts the likelihood surface by `−δ` in the
/// angle and leaves its values unchanged.
#[test]
fn chart_axes_rotation_shifts_the_likelihood() {
    let mesh = unit_square(6);
    let delta: f64 = 0.5;
    let (s, c) = delta.sin_cos();
    let chart = mesh.chart().unwrap();
    let turned = Chart {
        coords: chart.coords.iter().map(|p| [c * p[0] + s * p[1], -s * p[0] + c * p[1]]).collect(),
        bounds: [[-2.0, 2.0], [-2.0, 2.0]],
        periodic: [false, false],
    };
    let tmesh = TriangleMesh::new(mesh.vertices().to_vec(), mesh.triangles().to_vec()).unwrap().with_chart(turned).unwrap();
    let (bound, y) = point_data(&mesh, 10, 0.2);
    for angle in [-1.2, -0.4, 0.0, 0.7, 1.5] {
        let b = AnisotropyParams { angle, log_ratio: 0.9 };
        let shifted = AnisotropyParams { angle: angle - delta, log_ratio: 0.9 };
        let x = evaluate(&mesh, &bound, &y, Some(&b), 0.2, PinvBackend::default()).unwrap();
        let z = evaluate(&tmesh, &bound, &y, Some(&shifted), 0.2, PinvBackend::default()).unwrap();
        assert!((x.value - z.value).abs() < 1e-6, "angle {angle}");
    }
}

#[test]
fn nelder_mead_on_rosenbrock() {
    let r = nelder_mead(
        |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
        &[-1.2, 1.0],
        &[0.5, 0.5],
        &NelderMeadOptions { f_tol: 1e-14, max_evals: 5000 },
    );
    assert!(r.converged);
    assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 2e-3, "{:?}", r.x);
    assert_eq!(r.history.len(), r.evals);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn likelihood_is_invariant_under_equivalent_anisotropy(angle in -3.0f64..3.0, r in -1.5f64..1.5) {
        let mesh = generate_cylinder_mesh::<f64>(30.0, 1.0, 1.0, 4.0).unwrap();
        let (bound, y) = point_data(&mesh, 8, 0.3);
        let b = AnisotropyParams { angle, log_ratio: r };
        let x = evaluate(&mesh, &bound, &y, Some(&b), 0.3, PinvBackend::default()).unwrap();
        let z = evaluate(&mesh, &bound, &y, Some(&b.canonical()), 0.3, PinvBackend::default()).unwrap();
        prop_assert!((x.value - z.value).abs() < 1e-7 * (1.0 + x.value.abs()));
    }

    #[test]
    fn scaling_the_data_shifts_the_likelihood(c in 0.1f64..10.0) {
        let mesh = generate_cylinder_mesh::<f64>(30.0, 1.0, 1.0, 4.0).unwrap();
        let (bound, y) = point_data(&mesh, 8, 0.3);
        let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
        let a = evaluate(&mesh, &bound, &y, None, 0.3, PinvBackend::default()).unwrap();
        let b = evaluate(&mesh, &bound, &ys, None, 0.3, PinvBackend::default()).unwrap();
        prop_assert!((b.sigma_star - c * a.sigma_star).abs() < 1e-9 * b.sigma_star);
        prop_assert!((b.a_star - c * a.a_star).abs() < 1e-9 * b.a_star.abs());
        prop_assert!((b.value - (a.value - 8.0 * c.ln())).abs() < 1e-8);
    }
}
