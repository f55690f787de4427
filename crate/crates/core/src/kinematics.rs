//! Lab-frame momenta, closure of the final state by energy-momentum
//! conservation, and the Jacobian of the final energy integration.

use crate::algebra::{on_shell_dot, LorentzVector};
use crate::constants::ELECTRON_MASS;
use crate::error::{Error, Result};

/// Relative size (in units of `E_i + ω₀`) below which the energy closure
/// denominator is treated as degenerate.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-12;

/// Incoming electron and photon. The photon always travels along +z; a
/// moving electron travels along -z (head-on).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionSetup {
    pub electron_energy: f64,
    pub omega0: f64,
    pub p_i: LorentzVector,
    pub k_0: LorentzVector,
    pub mass: f64,
}

impl CollisionSetup {
    pub fn new(electron_energy: f64, omega0: f64) -> Result<Self> {
        Self::with_mass(electron_energy, omega0, ELECTRON_MASS)
    }

    pub fn with_mass(electron_energy: f64, omega0: f64, mass: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "photon energy must be positive, got {omega0}"
            )));
        }
        if !(electron_energy >= mass * (1.0 - 1e-12)) || !electron_energy.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "electron energy {electron_energy} MeV is below the electron mass"
            )));
        }
        let e = electron_energy.max(mass);
        let pz = (e * e - mass * mass).sqrt();
        Ok(CollisionSetup {
            electron_energy: e,
            omega0,
            p_i: LorentzVector::new(e, 0.0, 0.0, -pz),
            k_0: LorentzVector::new(omega0, 0.0, 0.0, omega0),
            mass,
        })
    }

    pub fn rest_frame(omega0: f64) -> Result<Self> {
        Self::new(ELECTRON_MASS, omega0)
    }

    pub fn is_rest_frame(&self) -> bool {
        self.p_i.z == 0.0
    }

    /// Total incoming four-momentum `p_i + k₀`.
    pub fn total(&self) -> LorentzVector {
        self.p_i + self.k_0
    }

    /// Upper bound on any single outgoing photon energy.
    pub fn max_photon_energy(&self) -> f64 {
        self.electron_energy + self.omega0 - self.mass
    }

    /// Invariant `s = (p_i + k₀)²`.
    pub fn mandelstam_s(&self) -> f64 {
        self.total().norm_sq()
    }
}

/// Photon emission direction in lab-frame spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        Direction { theta, phi }
    }

    /// `n = (1, n̂)`.
    pub fn null_vector(&self) -> LorentzVector {
        LorentzVector::null_direction(self.theta, self.phi)
    }
}

/// One point of the triple Compton phase space: three directions and the
/// energies of photons one and two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalStateConfig {
    pub directions: [Direction; 3],
    pub omega1: f64,
    pub omega2: f64,
}

impl FinalStateConfig {
    pub fn new(directions: [Direction; 3], omega1: f64, omega2: f64) -> Self {
        FinalStateConfig {
            directions,
            omega1,
            omega2,
        }
    }

    /// Same directions for the three photons given as `(θ, φ)` arrays.
    pub fn from_angles(theta: [f64; 3], phi: [f64; 3], omega1: f64, omega2: f64) -> Self {
        let d = |j: usize| Direction::new(theta[j], phi[j]);
        Self::new([d(0), d(1), d(2)], omega1, omega2)
    }
}

/// Final-state momenta with `n` emitted photons after closure.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedState<const N: usize> {
    pub photons: [LorentzVector; N],
    pub p_f: LorentzVector,
    /// `d(E_f + ω_last)/dω_last` at fixed directions.
    pub jacobian: f64,
    pub physical: bool,
}

pub type ClosedFinalState = ClosedState<3>;

impl<const N: usize> ClosedState<N> {
    pub fn omegas(&self) -> [f64; N] {
        std::array::from_fn(|j| self.photons[j].t)
    }
}

/// Energy of the last photon along `direction` given the others, from
/// `(p_i + k₀ - Σk - ω n)² = m²`:
///
/// `ω = [p_i·k₀ - (p_i + k₀)·Σk + Σ_{a<b} k_a·k_b] / n·(p_i + k₀ - Σk)`.
pub fn last_photon_energy(
    setup: &CollisionSetup,
    emitted: &[LorentzVector],
    direction: &LorentzVector,
) -> Result<f64> {
    let (numerator, denominator) = closure_terms(setup, emitted, direction);
    if denominator.abs() < DEGENERATE_DENOMINATOR * (setup.electron_energy + setup.omega0) {
        return Err(Error::DegenerateDirection { denominator });
    }
    Ok(numerator / denominator)
}

/// Numerator and denominator of the closure formula, each built from
/// products of on-shell momenta evaluated with [`on_shell_dot`].
fn closure_terms(
    setup: &CollisionSetup,
    emitted: &[LorentzVector],
    n: &LorentzVector,
) -> (f64, f64) {
    let m = setup.mass;
    let p = &setup.p_i;
    let k0 = &setup.k_0;
    let mut numerator = on_shell_dot(p, m, k0, 0.0);
    let mut denominator = on_shell_dot(n, 0.0, p, m) + on_shell_dot(n, 0.0, k0, 0.0);
    for (a, ka) in emitted.iter().enumerate() {
        numerator -= on_shell_dot(p, m, ka, 0.0) + on_shell_dot(k0, 0.0, ka, 0.0);
        for kb in &emitted[a + 1..] {
            numerator += on_shell_dot(ka, 0.0, kb, 0.0);
        }
        denominator -= on_shell_dot(n, 0.0, ka, 0.0);
    }
    (numerator, denominator)
}

/// `ω₃` for fixed `k₁, k₂` and direction `n₃`.
pub fn omega3(
    setup: &CollisionSetup,
    k_1: &LorentzVector,
    k_2: &LorentzVector,
    n_3: &LorentzVector,
) -> Result<f64> {
    last_photon_energy(setup, &[*k_1, *k_2], n_3)
}

/// Energy `ω₂` at which `ω₃ = threshold` for fixed `ω₁` and directions.
///
/// `ω₃ = N/D` with `N` bilinear and `D` linear in `(ω₁, ω₂)`, so
/// `N - ε D` is affine in `ω₂` and the boundary point is found from two
/// evaluations. Returns `None` when no positive `ω₂` with `D > 0` exists.
pub fn threshold_boundary(
    setup: &CollisionSetup,
    directions: &[Direction; 3],
    omega1: f64,
    threshold: f64,
) -> Option<f64> {
    let [d1, d2, d3] = directions;
    let n3 = d3.null_vector();
    let k1 = LorentzVector::photon(omega1, d1.theta, d1.phi);
    let residual = |w2: f64| {
        let k2 = LorentzVector::photon(w2, d2.theta, d2.phi);
        let (num, den) = closure_terms(setup, &[k1, k2], &n3);
        (num - threshold * den, den)
    };
    let scale = setup.max_photon_energy();
    let (g0, _) = residual(0.0);
    let (g1, _) = residual(scale);
    let slope = (g1 - g0) / scale;
    if slope == 0.0 {
        return None;
    }
    let w2 = -g0 / slope;
    let (_, den) = residual(w2);
    (w2 > 0.0 && den > 0.0).then_some(w2)
}

/// Closes an `N`-photon final state: the first `N-1` photons are given,
/// the last one is emitted along `last` with its energy fixed by
/// conservation.
pub fn close_state<const N: usize>(
    setup: &CollisionSetup,
    given: &[LorentzVector],
    last: &Direction,
) -> Result<ClosedState<N>> {
    assert_eq!(given.len() + 1, N, "photon count mismatch");
    let n = last.null_vector();
    let (numerator, denominator) = closure_terms(setup, given, &n);
    if denominator.abs() < DEGENERATE_DENOMINATOR * (setup.electron_energy + setup.omega0) {
        return Err(Error::DegenerateDirection { denominator });
    }
    let omega = numerator / denominator;
    let k_last = n * omega;

    let mut photons = [LorentzVector::ZERO; N];
    photons[..N - 1].copy_from_slice(given);
    photons[N - 1] = k_last;

    let mut p_f = setup.total();
    for k in &photons {
        p_f -= *k;
    }
    let e_f = p_f.t;
    // K = 1 + [n̂·(Σk_given - k₀ - p_i) + ω]/E_f, which simplifies to n·p_f/E_f,
    // and n·p_f is the closure denominator.
    let jacobian = denominator / e_f;
    let physical = omega > 0.0 && e_f >= setup.mass && given.iter().all(|k| k.t > 0.0);
    Ok(ClosedState {
        photons,
        p_f,
        jacobian,
        physical,
    })
}

/// Closes the triple Compton final state for `cfg`.
pub fn close_final_state(
    setup: &CollisionSetup,
    cfg: &FinalStateConfig,
) -> Result<ClosedFinalState> {
    let [d1, d2, d3] = cfg.directions;
    let k1 = LorentzVector::photon(cfg.omega1, d1.theta, d1.phi);
    let k2 = LorentzVector::photon(cfg.omega2, d2.theta, d2.phi);
    close_state::<3>(setup, &[k1, k2], &d3)
}
