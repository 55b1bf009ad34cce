use bozd::branches::characteristic_roots;
use bozd::exact::{escape_radius, trace_level_curve, trace_steepest_descent, Trace, TraceOptions, TraceStop};
use bozd::exact::nonspecial_check;
use bozd::{C64, LaxOleinikPoint, RationalInitialData};

fn saddles(data: &RationalInitialData, pt: LaxOleinikPoint) -> Vec<C64> {
    characteristic_roots(data, pt, None).unwrap().into_iter().filter(|z| z.im >= -1e-12).collect()
}

fn all_critical(data: &RationalInitialData, pt: LaxOleinikPoint) -> Vec<C64> {
    characteristic_roots(data, pt, None).unwrap()
}

#[test]
fn descent_arcs_keep_re_h_and_lower_im_h() {
    let data = RationalInitialData::two_pole_fixture();
    let pt = LaxOleinikPoint::new(4.5, 4.2).unwrap();
    let opts = TraceOptions::default();
    for s in saddles(&data, pt) {
        for branch in 0..4u8 {
            let tr = trace_steepest_descent(&data, pt, s, branch, &opts).unwrap();
            let h0 = tr.h_values[0];
            for h in &tr.h_values {
                assert!((h.re - h0.re).abs() < 1e-6 * (1.0 + h0.re.abs()), "Re h drifted: {} vs {}", h.re, h0.re);
            }
            let sign = if branch < 2 { 1.0 } else { -1.0 };
            for w in tr.h_values.windows(2) {
                assert!(sign * (w[1].im - w[0].im) <= 1e-9, "branch {branch} not monotone");
            }
        }
    }
}

#[test]
fn level_curves_keep_im_h() {
    let data = RationalInitialData::lorentzian();
    let pt = LaxOleinikPoint::new(1.0, 0.5).unwrap();
    let opts = TraceOptions::default();
    let start = C64::new(0.3, 2.0);
    for dir in [1i8, -1] {
        let tr = trace_level_curve(&data, pt, start, dir, &opts).unwrap();
        let level = data.h_principal(pt, start).im;
        for h in &tr.h_values {
            assert!((h.im - level).abs() < 1e-6, "{} vs {level}", h.im);
        }
        // The stored values are continued along the curve, so they agree
        // with the principal branch up to multiples of the log periods.
        assert!(tr.nodes.len() > 2);
    }
    assert!(trace_level_curve(&data, pt, start, 0, &opts).is_err());
}

#[test]
fn descent_arcs_end_at_poles_or_escape() {
    let data = RationalInitialData::lorentzian();
    let pt = LaxOleinikPoint::new(1.0, 0.5).unwrap();
    let opts = TraceOptions::default();
    let r = escape_radius(&data, pt);
    for s in saddles(&data, pt) {
        for branch in 0..2u8 {
            let tr = trace_steepest_descent(&data, pt, s, branch, &opts).unwrap();
            match tr.stop {
                TraceStop::Escape => assert!(tr.nodes.last().unwrap().norm() >= 0.99 * r),
                TraceStop::Equilibrium(p) => {
                    let near = 2.0 * opts.equilibrium_radius * data.scale();
                    let d = data.pole_distance(p).min(all_critical(&data, pt).iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min));
                    assert!(d < near, "stopped at {p}, {d:e} from the nearest pole or saddle");
                }
                TraceStop::LevelDrop => panic!("no level drop was requested"),
            }
        }
    }
}

#[test]
fn winding_counts_turns() {
    let p = C64::new(1.0, 1.0);
    let nodes: Vec<C64> = (0..=400).map(|k| p + C64::from_polar(0.5, 4.0 * std::f64::consts::PI * k as f64 / 400.0)).collect();
    let tr = Trace { h_values: vec![C64::new(0.0, 0.0); nodes.len()], nodes, stop: TraceStop::Escape };
    assert!((tr.winding_about(p) - 2.0).abs() < 1e-12);
    assert!(tr.winding_about(C64::new(5.0, 5.0)).abs() < 1e-12);
}

#[test]
fn nonspecial_classification_of_the_fixtures() {
    let data = RationalInitialData::two_pole_fixture();
    let r = nonspecial_check(&data, LaxOleinikPoint::new(4.5, 4.2).unwrap()).unwrap();
    assert!(r.is_nonspecial(), "{r:?}");
    // The Lorentzian has the purely imaginary residue -i: special, but only
    // through the residue conditions.
    let data = RationalInitialData::lorentzian();
    let r = nonspecial_check(&data, LaxOleinikPoint::new(1.0, 0.5).unwrap()).unwrap();
    assert!(!r.residues_ok && !r.re_c_sums_ok && r.discriminant_ok && !r.is_nonspecial());
}
