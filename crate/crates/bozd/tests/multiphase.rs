use bozd::dk::{jphase_u, periodic_wave, JPhaseSpec};

#[test]
fn galilean_shift_of_all_parameters_shifts_the_solution() {
    // u(t, x) solves the equation iff a + u(t, x − 2at) does.
    let a = 0.35;
    let t = 0.6;
    for r in [vec![-0.5, 0.3, 1.1], vec![-1.0, -0.2, 0.4, 0.9, 1.7]] {
        let phases: Vec<f64> = (0..(r.len() - 1) / 2).map(|j| 0.3 + 0.5 * j as f64).collect();
        let base = JPhaseSpec::from_phases(r.clone(), &phases, 0.1).unwrap();
        let shifted = JPhaseSpec::from_phases(r.iter().map(|v| v + a).collect(), &phases, 0.1).unwrap();
        for k in 0..40 {
            let x = -2.0 + 0.1 * k as f64;
            let u = jphase_u(&shifted, t, x).unwrap();
            let v = a + jphase_u(&base, t, x - 2.0 * a * t).unwrap();
            assert!((u - v).abs() < 1e-9, "J = {}, x = {x}: {u} vs {v}", base.j());
        }
    }
}

#[test]
fn one_phase_with_offset_travels_at_the_shifted_speed() {
    // With R0 = a the one-phase solution is the periodic wave of amplitude
    // R2 − R1 and offset a, moving at c_r + 2a.
    let (a, eps, t) = (0.25, 0.1, 0.8);
    let r = [a, a + 0.8, a + 2.0];
    let spec = JPhaseSpec::from_phases(r.to_vec(), &[0.4], eps).unwrap();
    let rr = ((r[1] - r[0]) / (r[2] - r[0])).sqrt();
    for k in 0..30 {
        let x = -1.0 + 0.17 * k as f64;
        let u = jphase_u(&spec, t, x).unwrap();
        let w = periodic_wave(r[2] - r[1], rr, a, -0.4, eps, t, x - 2.0 * a * t).unwrap();
        assert!((u - w).abs() < 1e-9, "x = {x}: {u} vs {w}");
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(JPhaseSpec::from_phases(vec![0.0, 1.0], &[0.0], 0.1).is_err());
    assert!(JPhaseSpec::from_phases(vec![0.0, 2.0, 1.0], &[0.0], 0.1).is_err());
    assert!(JPhaseSpec::from_phases(vec![0.0, 1.0, 2.0], &[0.0], 0.0).is_err());
    assert!(periodic_wave(1.0, 1.0, 0.0, 0.0, 0.1, 0.0, 0.0).is_err());
}
