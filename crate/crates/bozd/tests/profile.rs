use bozd::exact::TraceOptions;
use bozd::profile::{heatmap, profile_grid, stokes_graph, ProfileKind};
use bozd::zd::u_zd;
use bozd::{LaxOleinikPoint, RationalInitialData, SolverConfig};

#[test]
fn weak_limit_grid_is_ordered_and_complete() {
    let data = RationalInitialData::lorentzian();
    let ts = [0.3, 1.0, 2.0];
    let xs: Vec<f64> = (0..21).map(|k| -2.0 + 0.4 * k as f64).collect();
    let rows = profile_grid(&data, &ts, &xs, &ProfileKind::WeakLimit).unwrap();
    assert_eq!(rows.len(), ts.len() * xs.len());
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.t, ts[i / xs.len()]);
        assert_eq!(r.x, xs[i % xs.len()]);
        assert!(r.epsilon.is_nan() && r.u_zd.is_nan() && r.u_exact.is_none());
        if r.status.is_empty() {
            assert!(r.j <= data.n());
            assert!(r.ubar > 0.0 && r.ubar <= 2.0 + 1e-12, "{r:?}");
        }
    }
    // Before breaking (t ≈ 0.385) the weak limit is the (single-valued) Burgers solution.
    assert!(rows.iter().filter(|r| r.t == 0.3).all(|r| r.j == 0));
}

#[test]
fn full_profile_matches_pointwise_evaluation() {
    let data = RationalInitialData::two_pole_fixture();
    let eps = vec![1.0 / 16.0, 1.0 / 32.0];
    let xs = [4.0, 4.25, 4.5];
    let kind = ProfileKind::Full { epsilons: eps.clone(), exact: Some(SolverConfig::default()) };
    let rows = profile_grid(&data, &[4.5], &xs, &kind).unwrap();
    assert_eq!(rows.len(), xs.len() * eps.len());
    for r in &rows {
        assert!(r.status.is_empty(), "{}", r.status);
        let pt = LaxOleinikPoint::new(r.t, r.x).unwrap();
        assert_eq!(r.u_zd, u_zd(&data, pt, r.epsilon).unwrap());
        let ue = r.u_exact.unwrap();
        assert!((ue - r.u_zd).abs() < 0.2, "{r:?}");
    }
}

#[test]
fn heatmap_covers_the_box() {
    let data = RationalInitialData::lorentzian();
    let pt = LaxOleinikPoint::new(1.0, 0.0).unwrap();
    let cells = heatmap(&data, pt, (-2.0, 2.0), (0.0, 2.0), (9, 5));
    assert_eq!(cells.len(), 45);
    assert_eq!((cells[0].0, cells[0].1), (-2.0, 0.0));
    assert_eq!((cells[44].0, cells[44].1), (2.0, 2.0));
    // z = i is the pole.
    let pole = cells.iter().find(|c| c.0 == 0.0 && c.1 == 1.0).unwrap();
    assert!(pole.2.is_nan());
    assert!(cells.iter().filter(|c| !c.2.is_finite()).count() == 1);
}

#[test]
fn stokes_graph_has_four_arcs_per_critical_point() {
    let data = RationalInitialData::two_pole_fixture();
    let pt = LaxOleinikPoint::new(4.5, 4.2).unwrap();
    let (arcs, messages) = stokes_graph(&data, pt, &TraceOptions::default()).unwrap();
    assert!(messages.is_empty(), "{messages:?}");
    let n_crit = arcs.iter().map(|a| a.critical).max().unwrap() + 1;
    assert_eq!(arcs.len(), 4 * n_crit);
    // Three real roots (J = 1) and one root in the upper half-plane.
    assert_eq!(n_crit, 4);
}
