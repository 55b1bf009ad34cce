//! Algebraic identities on random configurations (`N ≤ 4`).

use bozd::branches::{caustic_points, solve_branches, weak_limit_ubar};
use bozd::verify::suites::{
    identity_residuals, random_identity_case, FACTORED_FORM_TOL, FOURIER_TOL, GLOBAL_IDENTITY_TOL,
    ONE_PHASE_FORMS_TOL, PERIOD_AVERAGE_TOL, PHI_DUAL_TOL,
};
use bozd::zd::{profile_params, u_zd_at_phases, u_zd_from_branches};
use bozd::{LaxOleinikPoint, RationalInitialData};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_hold_on_random_cases(seed in any::<u64>()) {
        let case = random_identity_case(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(case.data.n() >= 1 && case.data.n() <= 4);
        let r = identity_residuals(&case).unwrap();
        prop_assert!(r.global_identity < GLOBAL_IDENTITY_TOL, "global {:e}", r.global_identity);
        prop_assert!(r.factored_form < FACTORED_FORM_TOL, "factored {:e}", r.factored_form);
        prop_assert!(r.phi_dual < PHI_DUAL_TOL, "phi dual {:e}", r.phi_dual);
        prop_assert!(r.fourier < FOURIER_TOL, "fourier {:e}", r.fourier);
        if let Some(v) = r.one_phase_forms {
            prop_assert!(v < ONE_PHASE_FORMS_TOL, "one-phase forms {:e}", v);
        }
        if let Some(v) = r.period_average {
            prop_assert!(v < PERIOD_AVERAGE_TOL, "period average {:e}", v);
        }
        prop_assert_eq!(r.one_phase_forms.is_some(), r.j == 1);
    }

    #[test]
    fn at_most_four_n_caustic_points(seed in any::<u64>(), t in 0.1f64..6.0) {
        let case = random_identity_case(&mut ChaCha8Rng::seed_from_u64(seed));
        let xs = caustic_points(&case.data, t).unwrap();
        prop_assert!(xs.len() <= 4 * case.data.n());
    }

    #[test]
    fn weak_limit_is_branch_value_without_phases(seed in any::<u64>()) {
        let case = random_identity_case(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = solve_branches(&case.data, case.pt).unwrap();
        prop_assert_eq!(b.real_roots.len(), 2 * b.j + 1);
        prop_assert_eq!(b.real_roots.len() + 2 * b.complex_roots.len(), 2 * case.data.n() + 1);
        if b.j == 0 {
            prop_assert_eq!(weak_limit_ubar(&b), b.branch_values[0]);
        }
    }
}

#[test]
fn phase_form_reproduces_profile_and_averages_to_weak_limit() {
    let data = RationalInitialData::two_pole_fixture();
    let pt = LaxOleinikPoint::new(4.5, 4.2).unwrap();
    let b = solve_branches(&data, pt).unwrap();
    assert_eq!(b.j, 1);
    let params = profile_params(&data, pt, &b).unwrap();
    for &eps in &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 128.0] {
        let psi = params.theta[0] / eps + params.phi[0];
        let a = u_zd_at_phases(&params, &[psi]).unwrap();
        let z = u_zd_from_branches(&data, pt, &b, eps).unwrap();
        assert!((a - z).abs() < 1e-8 * (1.0 + z.abs()), "eps = {eps}: {a} vs {z}");
    }
    let n = 4096;
    let mean = (0..n)
        .map(|k| u_zd_at_phases(&params, &[2.0 * std::f64::consts::PI * k as f64 / n as f64]).unwrap())
        .sum::<f64>()
        / n as f64;
    assert!((mean - weak_limit_ubar(&b)).abs() < 1e-6, "mean {mean} vs {}", weak_limit_ubar(&b));
}
