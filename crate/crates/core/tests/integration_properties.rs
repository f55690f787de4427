use std::f64::consts::PI;

use triple_compton::algebra::on_shell_dot;
use triple_compton::constants::{classical_radius_sq_barn, ELECTRON_MASS};
use triple_compton::integration::{
    detector_average, energy_integrated_sigma5, stratified, total_cross_section, Process,
};
use triple_compton::kinematics::{CollisionSetup, Direction};

fn mgbr_directions() -> [Direction; 3] {
    let h = PI / 2.0;
    [
        Direction::new(h, 2.0 * PI / 3.0),
        Direction::new(h, 4.0 * PI / 3.0),
        Direction::new(h, 0.0),
    ]
}

/// Total Klein–Nishina cross section for photon energy `w` on an electron
/// at rest, barn.
fn klein_nishina_total(w: f64) -> f64 {
    let x = w / ELECTRON_MASS;
    let l = (1.0 + 2.0 * x).ln();
    2.0 * PI
        * classical_radius_sq_barn()
        * ((1.0 + x) / x.powi(3) * (2.0 * x * (1.0 + x) / (1.0 + 2.0 * x) - l) + l / (2.0 * x)
            - (1.0 + 3.0 * x) / (1.0 + 2.0 * x).powi(2))
}

#[test]
fn same_seed_same_result_and_seed_matters() {
    let setup = CollisionSetup::rest_frame(0.662).unwrap();
    let run =
        |seed| detector_average(&setup, &mgbr_directions(), 0.378, 0.013, 4000, seed).unwrap();
    assert_eq!(run(1), run(1));
    assert_ne!(run(1).value, run(2).value);
}

#[test]
fn logarithmic_integrand_is_unbiased() {
    // ∫_ε^W dω/ω with ω sampled uniformly: a high-variance weight.
    let (lo, hi): (f64, f64) = (0.013, 0.662);
    let exact = (hi / lo).ln();
    for seed in 0..4 {
        let r = stratified(2, 20_000, seed, |x| {
            let w = lo + (hi - lo) * x[0];
            Ok((hi - lo) / w)
        })
        .unwrap();
        assert!(
            (r.value - exact).abs() <= 3.0 * r.statistical_error,
            "{} ± {} vs {exact}",
            r.value,
            r.statistical_error
        );
        assert!(r.statistical_error > 0.0);
    }
}

#[test]
fn lab_single_compton_matches_rest_frame_closed_form() {
    let setup = CollisionSetup::new(5000.0, 1e-3).unwrap();
    let rest_energy = on_shell_dot(&setup.p_i, setup.mass, &setup.k_0, 0.0) / setup.mass;
    let expected = klein_nishina_total(rest_energy);
    let r = total_cross_section(&setup, 0.0, Process::Single, 200_000, 4).unwrap();
    let allowed = 3.0 * r.statistical_error + 1e-3 * expected;
    assert!(
        (r.value - expected).abs() <= allowed,
        "{} ± {} vs {expected}",
        r.value,
        r.statistical_error
    );
}

#[test]
fn statistical_error_halves_with_four_times_the_budget() {
    let setup = CollisionSetup::rest_frame(0.662).unwrap();
    let small = detector_average(&setup, &mgbr_directions(), 0.378, 0.013, 40_000, 9).unwrap();
    let large = detector_average(&setup, &mgbr_directions(), 0.378, 0.013, 160_000, 9).unwrap();
    let ratio = large.statistical_error / small.statistical_error;
    assert!((ratio - 0.5).abs() <= 0.1, "ratio {ratio}");
}

#[test]
fn small_detectors_reduce_to_fixed_directions() {
    let setup = CollisionSetup::rest_frame(0.662).unwrap();
    let dirs = mgbr_directions();
    let point = energy_integrated_sigma5(&setup, &dirs, 0.013, 100_000, 5).unwrap();
    let window = detector_average(&setup, &dirs, 1e-6, 0.013, 100_000, 5).unwrap();
    let allowed =
        3.0 * point.statistical_error.hypot(window.statistical_error) + 1e-2 * point.value;
    assert!(
        (window.value - point.value).abs() <= allowed,
        "{} vs {}",
        window.value,
        point.value
    );
}

#[test]
fn triple_total_falls_with_the_threshold() {
    let setup = CollisionSetup::new(5000.0, 1e-3).unwrap();
    let values: Vec<_> = [25.0, 50.0, 100.0]
        .iter()
        .map(|&eps| total_cross_section(&setup, eps, Process::Triple, 40_000, 6).unwrap())
        .collect();
    for pair in values.windows(2) {
        let gap = pair[0].value - pair[1].value;
        assert!(
            gap > 3.0 * pair[0].statistical_error.hypot(pair[1].statistical_error),
            "{values:?}"
        );
    }
}

#[test]
fn invalid_budgets_and_windows_are_rejected() {
    let setup = CollisionSetup::rest_frame(0.662).unwrap();
    assert!(detector_average(&setup, &mgbr_directions(), 0.378, 0.013, 0, 1).is_err());
    assert!(detector_average(&setup, &mgbr_directions(), 0.0, 0.013, 1000, 1).is_err());
    assert!(detector_average(&setup, &mgbr_directions(), 0.378, 1.0, 1000, 1).is_err());
    assert!(total_cross_section(&setup, 0.0, Process::Double, 1000, 1).is_err());
}
