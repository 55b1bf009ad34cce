use bozd::exact::{perturb, revalidate, ExactSolver, SolverConfig};
use bozd::matsuno::{u_matsuno, MatsunoSpec};
use bozd::zd::u_zd;
use bozd::{C64, LaxOleinikPoint, RationalInitialData};

fn point(t: f64, x: f64) -> LaxOleinikPoint {
    LaxOleinikPoint::new(t, x).unwrap()
}

#[test]
fn lorentzian_matches_soliton_formula() {
    let solver = ExactSolver::new(RationalInitialData::lorentzian(), SolverConfig::default()).unwrap();
    for &(t, x, n) in &[(0.5, 1.0, 4usize), (1.0, 0.3, 4), (2.0, 2.5, 8)] {
        let spec = MatsunoSpec::new(n).unwrap();
        let u = solver.u_exact(point(t, x), spec.epsilon).unwrap();
        let m = u_matsuno(&spec, t, x).unwrap();
        assert!((u - m).abs() < 1e-6, "t = {t}, x = {x}, N = {n}: exact {u}, soliton {m}");
    }
}

#[test]
fn shared_contours_give_the_same_values_as_fresh_ones() {
    let solver = ExactSolver::new(RationalInitialData::two_pole_fixture(), SolverConfig::default()).unwrap();
    let pt = point(4.5, 4.3);
    let eps = [1.0 / 32.0, 1.0 / 64.0];
    let (multi, set) = solver.u_exact_multi(pt, &eps, None).unwrap();
    assert!(set.all_valid());
    for (k, &e) in eps.iter().enumerate() {
        let single = solver.u_exact(pt, e).unwrap();
        assert!((multi[k] - single).abs() < 1e-8, "eps = {e}: {} vs {single}", multi[k]);
    }
}

#[test]
fn warm_start_from_a_neighbour_agrees_with_cold_start() {
    let solver = ExactSolver::new(RationalInitialData::two_pole_fixture(), SolverConfig::default()).unwrap();
    let eps = 1.0 / 32.0;
    let set = solver.build_contours(point(4.5, 4.0), eps, None).unwrap();
    let pt = point(4.5, 4.05);
    let warm = solver.build_contours(pt, eps, Some(&set)).unwrap();
    let cold = solver.build_contours(pt, eps, None).unwrap();
    let a = solver.evaluate(&warm, eps).unwrap().u;
    let b = solver.evaluate(&cold, eps).unwrap().u;
    assert!((a - b).abs() < 1e-8, "warm {a}, cold {b}");
}

#[test]
fn node_perturbation_leaves_the_value_unchanged() {
    let cfg = SolverConfig::default();
    let data = RationalInitialData::two_pole_fixture();
    let solver = ExactSolver::new(data.clone(), cfg.clone()).unwrap();
    let eps = 1.0 / 32.0;
    let set = solver.build_contours(point(2.0, 3.0), eps, None).unwrap();
    let offsets: Vec<Vec<C64>> = set
        .paths
        .iter()
        .map(|p| {
            (0..p.nodes.len())
                .map(|i| C64::from_polar(1e-3, 0.7 * i as f64 + 0.3))
                .collect()
        })
        .collect();
    let moved = perturb(&data, &set, &offsets).unwrap();
    assert!(revalidate(&data, &moved, &cfg).unwrap().iter().all(|r| r.ok));
    let a = solver.evaluate(&set, eps).unwrap().u;
    let b = solver.evaluate(&moved, eps).unwrap().u;
    assert!((a - b).abs() <= 10.0 * cfg.quad_tol, "{a} vs {b}");
}

#[test]
fn outside_the_oscillation_zone_the_error_decreases_with_epsilon() {
    let data = RationalInitialData::lorentzian();
    let solver = ExactSolver::new(data.clone(), SolverConfig::default()).unwrap();
    let pt = point(1.0, -0.5);
    let errs: Vec<f64> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&e| (solver.u_exact(pt, e).unwrap() - u_zd(&data, pt, e).unwrap()).abs())
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn small_time_solution_is_close_to_the_initial_data() {
    let data = RationalInitialData::lorentzian();
    let solver = ExactSolver::new(data.clone(), SolverConfig::default()).unwrap();
    for &x in &[-2.0, -0.4, 0.0, 0.7, 3.0] {
        let u = solver.u_exact(point(1e-3, x), 0.25).unwrap();
        assert!((u - data.eval_u0(x)).abs() < 1e-2, "x = {x}: {u} vs {}", data.eval_u0(x));
    }
}

#[test]
fn invalid_epsilon_and_time_are_rejected() {
    let solver = ExactSolver::new(RationalInitialData::lorentzian(), SolverConfig::default()).unwrap();
    assert!(solver.u_exact(point(1.0, 0.0), 0.0).is_err());
    assert!(LaxOleinikPoint::new(0.0, 1.0).is_err());
    assert!(LaxOleinikPoint::new(-1.0, 1.0).is_err());
}
