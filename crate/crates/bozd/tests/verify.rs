use bozd::branches::caustic_points;
use bozd::verify::suites::{caustic_window, matsuno_cross_points, contour_grid};
use bozd::verify::{check_no_caustics, l2_profile_check, loglog_slope_pairs, supnorm_error, sweep, L2Options, Reference, SweepSpec};
use bozd::{Error, RationalInitialData};

#[test]
fn slope_of_exact_power_laws() {
    let eps = [0.5, 0.25, 0.125, 0.0625];
    for p in [0.5, 1.0, 2.0] {
        let errs: Vec<f64> = eps.iter().map(|e: &f64| 3.0 * e.powf(p)).collect();
        assert!((loglog_slope_pairs(&eps, &errs).unwrap() - p).abs() < 1e-12);
    }
    // Only the three smallest epsilons enter the fit.
    let errs = [100.0, 0.25, 0.125, 0.0625];
    assert!((loglog_slope_pairs(&eps, &errs).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn slope_needs_three_usable_pairs() {
    assert!(matches!(loglog_slope_pairs(&[0.1, 0.05], &[1.0, 0.5]), Err(Error::InsufficientData(_))));
    assert!(matches!(loglog_slope_pairs(&[0.1, 0.05, 0.025], &[1.0, 0.0, 0.2]), Err(Error::InsufficientData(_))));
    assert!(matches!(loglog_slope_pairs(&[0.1, 0.05], &[1.0]), Err(Error::InsufficientData(_))));
}

#[test]
fn sweep_rejects_bad_specs() {
    let data = RationalInitialData::lorentzian();
    let base = SweepSpec {
        t: 1.0,
        interval: (-1.0, 0.0),
        epsilons: vec![0.25, 0.125],
        m: vec![100, 100],
        reference: Reference::Matsuno,
        workers: Some(1),
    };
    let mut s = base.clone();
    s.m = vec![50, 100];
    assert!(sweep(&data, &s).is_err());
    let mut s = base.clone();
    s.epsilons = vec![0.125, 0.25];
    assert!(sweep(&data, &s).is_err());
    let mut s = base.clone();
    s.m = vec![100];
    assert!(sweep(&data, &s).is_err());
    // The soliton reference needs epsilon = 1/N.
    let mut s = base;
    s.epsilons = vec![0.3, 0.2];
    assert!(sweep(&data, &s).is_err());
}

#[test]
fn matsuno_sweep_on_a_caustic_free_interval() {
    let data = RationalInitialData::lorentzian();
    let spec = SweepSpec {
        t: 1.0,
        interval: (-1.0, 0.0),
        epsilons: vec![0.25, 0.125],
        m: vec![100, 200],
        reference: Reference::Matsuno,
        workers: Some(2),
    };
    let r = sweep(&data, &spec).unwrap();
    assert_eq!(r.max_errors.len(), 2);
    assert!(r.max_errors[1] < r.max_errors[0], "{:?}", r.max_errors);
    assert!(r.fitted_slope.is_none());
    for &x in &r.argmax {
        assert!((-1.0..=0.0).contains(&x));
    }
    // The same maximum on the coarse grid alone.
    let single = SweepSpec { epsilons: vec![0.25], m: vec![100], ..spec };
    assert_eq!(sweep(&data, &single).unwrap().max_errors[0], r.max_errors[0]);
}

#[test]
fn exact_reference_sweep_is_small() {
    let data = RationalInitialData::two_pole_fixture();
    let e = supnorm_error(&data, 4.5, 1.0, 2.0, 100, 1.0 / 32.0).unwrap();
    assert!(e > 0.0 && e < 0.1, "{e}");
}

#[test]
fn intervals_through_caustics_are_refused() {
    let data = RationalInitialData::lorentzian();
    let xs = caustic_points(&data, 1.0).unwrap();
    assert!(!xs.is_empty());
    let c = xs[0];
    assert!(matches!(check_no_caustics(&data, 1.0, c - 0.1, c + 0.1, 1000), Err(Error::NearCaustic { .. })));
    assert!(check_no_caustics(&data, 1.0, -1.0, 0.0, 1000).is_ok());
}

#[test]
fn l2_norm_is_conserved_before_breaking() {
    // Before the first caustic J = 0 everywhere and the profile is the
    // Burgers solution, whose L2 norm is conserved exactly.
    let data = RationalInitialData::lorentzian();
    let t = 0.2;
    assert!(caustic_points(&data, t).unwrap().is_empty());
    let r = l2_profile_check(&data, t, 1.0 / 32.0, (-10.0, 10.0), 1e-10, &L2Options::default()).unwrap();
    assert!(r.rel_gap < 1e-8, "{r:?}");
    assert!((r.norm_u0_sq - 2.0 * std::f64::consts::PI).abs() < 1e-8, "{}", r.norm_u0_sq);
}

#[test]
fn l2_check_requires_caustics_inside_the_window() {
    let data = RationalInitialData::lorentzian();
    let xs = caustic_points(&data, 1.0).unwrap();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(l2_profile_check(&data, 1.0, 1.0 / 32.0, (lo + 0.01, 30.0), 1e-8, &L2Options::default()).is_err());
}

#[test]
fn fixed_point_sets_are_well_formed() {
    assert_eq!(matsuno_cross_points().len(), 20);
    assert_eq!(contour_grid(true).len(), 100);
    assert_eq!(contour_grid(false).len(), 100);
    let data = RationalInitialData::two_pole_fixture();
    let l = caustic_window(&data, 4.5);
    for x in caustic_points(&data, 4.5).unwrap() {
        assert!(x.abs() < l);
    }
}
