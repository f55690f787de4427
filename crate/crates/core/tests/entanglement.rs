use std::f64::consts::PI;

use nalgebra::SMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triple_compton::algebra::Pol;
use triple_compton::amplitude::BeamPolarization;
use triple_compton::entanglement::{
    density_from_amplitudes, gme_tau, gme_tau_with, DensityMatrix, Matrix8, SolverKind,
    SolverSettings,
};
use triple_compton::kinematics::{close_final_state, CollisionSetup, Direction, FinalStateConfig};

const TOLERANCE: f64 = 1e-7;

fn xfel_directions() -> [Direction; 3] {
    let theta = PI - 1.5e-3;
    [
        Direction::new(theta, 2.0 * PI / 3.0),
        Direction::new(theta, 4.0 * PI / 3.0),
        Direction::new(theta, 2.0 * PI),
    ]
}

/// Random SU(2) element from three angles.
fn random_unitary(rng: &mut ChaCha8Rng) -> SMatrix<Complex64, 2, 2> {
    let (a, b, c): (f64, f64, f64) = (
        rng.random::<f64>() * PI,
        rng.random::<f64>() * 2.0 * PI,
        rng.random::<f64>() * 2.0 * PI,
    );
    let u = Complex64::from_polar(a.cos(), b);
    let v = Complex64::from_polar(a.sin(), c);
    SMatrix::<Complex64, 2, 2>::new(u, -v.conj(), v, u.conj())
}

fn local_unitary(rng: &mut ChaCha8Rng) -> Matrix8 {
    let (a, b, c) = (
        random_unitary(rng),
        random_unitary(rng),
        random_unitary(rng),
    );
    a.kronecker(&b).kronecker(&c)
}

/// Density matrices at random physical XFEL grid points.
fn physical_states(n: usize, seed: u64) -> Vec<DensityMatrix> {
    let setup = CollisionSetup::new(5000.0, 1e-3).unwrap();
    let dirs = xfel_directions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let (w1, w2) = (
            50.0 + 1250.0 * rng.random::<f64>(),
            50.0 + 1250.0 * rng.random::<f64>(),
        );
        let closed = close_final_state(&setup, &FinalStateConfig::new(dirs, w1, w2)).unwrap();
        if !closed.physical || closed.photons[2].t < 50.0 {
            continue;
        }
        out.push(
            density_from_amplitudes(&setup, &dirs, w1, w2, BeamPolarization::Basis(Pol::First))
                .unwrap(),
        );
    }
    out
}

#[test]
fn tau_is_invariant_under_local_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut states = physical_states(3, 5);
    states.push(DensityMatrix::w_state());
    for rho in states {
        let tau = gme_tau(&rho, TOLERANCE).unwrap().tau;
        for _ in 0..2 {
            let rotated = rho.transform(&local_unitary(&mut rng)).unwrap();
            let t = gme_tau(&rotated, TOLERANCE).unwrap().tau;
            assert!((t - tau).abs() <= 1e-4, "{t} vs {tau}");
        }
    }
}

#[test]
fn white_noise_mixing_is_monotone_and_bounded_by_convexity() {
    let ghz = DensityMatrix::ghz();
    let noise = DensityMatrix::maximally_mixed();
    let mut previous = f64::INFINITY;
    for i in (0..=10).rev() {
        let p = i as f64 / 10.0;
        let tau = gme_tau(&DensityMatrix::mix(p, &ghz, &noise).unwrap(), TOLERANCE)
            .unwrap()
            .tau;
        // τ is a maximum of linear functionals, hence convex: τ ≤ p·τ(GHZ).
        assert!(tau <= p * 0.5 + 1e-6, "p = {p}: {tau}");
        assert!(tau <= previous + 1e-6, "p = {p}: {tau} after {previous}");
        previous = tau;
    }
    assert!(previous <= 1e-6, "maximally mixed state gives {previous}");
}

#[test]
fn splitting_solver_agrees_with_interior_point() {
    let splitting = SolverSettings {
        kind: SolverKind::Splitting,
        tolerance: 1e-7,
        ..SolverSettings::default()
    };
    for (rho, expected) in [
        (DensityMatrix::ghz(), 0.5),
        (DensityMatrix::w_state(), 0.4428090416),
    ] {
        let a = gme_tau(&rho, TOLERANCE).unwrap();
        let b = gme_tau_with(&rho, &splitting).unwrap();
        assert_eq!(b.solver, SolverKind::Splitting);
        assert!((a.tau - expected).abs() <= 1e-4, "{}", a.tau);
        assert!((b.tau - a.tau).abs() <= 1e-4, "{} vs {}", b.tau, a.tau);
    }
}

#[test]
fn physical_states_have_rank_at_most_four_and_bounded_tau() {
    for rho in physical_states(8, 21) {
        let e = rho.eigenvalues();
        let top = e[7];
        // Two initial and two final electron spins: at most four pure terms.
        let rank = e.iter().filter(|&&v| v > 1e-10 * top).count();
        assert!(rank <= 4, "rank {rank}: {e:?}");
        assert!(e[0] >= -1e-12);
        let r = gme_tau(&rho, TOLERANCE).unwrap();
        assert!(r.tau >= 0.0 && r.tau <= 0.5, "{}", r.tau);
        assert!(r.decomposition_residual <= 10.0 * TOLERANCE);
        assert!(r.bound_violation <= TOLERANCE);
    }
}

#[test]
fn product_states_carry_no_entanglement() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = DensityMatrix::basis_state([Pol::First, Pol::Second, Pol::First]);
    let rotated = rho.transform(&local_unitary(&mut rng)).unwrap();
    assert!(gme_tau(&rotated, TOLERANCE).unwrap().tau <= 1e-6);
}

#[test]
fn density_text_round_trip_is_exact() {
    let rho = &physical_states(1, 3)[0];
    let back = DensityMatrix::from_text(&rho.to_text()).unwrap();
    assert_eq!(&back, rho);
    let (re, im) = rho.to_parts();
    assert_eq!(&DensityMatrix::from_parts(&re, &im).unwrap(), rho);
}
