//! Differential cross sections assembled from squared amplitudes.
//!
//! For `n` emitted photons with the last photon energy fixed by
//! conservation,
//!
//! `dσ = α^{n+1}/(2π)^{2(n-1)} · |M|²/m^{2n-2} · Πω_j / (p_i·k₀ · E_f·|K|)`
//!
//! per `dω₁…dω_{n-1} dΩ₁…dΩ_n`, where `M` carries the `m^{n}` factor of
//! the amplitude engine. For `n = 3` this is the five-fold σ5; for `n = 1`
//! it reduces to the Klein–Nishina formula. Results are in barn per
//! `MeV^{n-1}` per `sr^n`.

use crate::algebra::{on_shell_dot, polarization_basis, LorentzVector, Pol, Spin};
use crate::amplitude::{amplitude_table, AmplitudeTable, BeamPolarization, Leg};
use crate::constants::{ALPHA, HBARC_SQ_BARN_MEV2};
use crate::error::Result;
use crate::kinematics::{close_state, ClosedState, CollisionSetup, Direction, FinalStateConfig};

/// σ5 at one fully resolved phase-space point, barn·MeV⁻²·sr⁻³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigma5Point {
    pub value: f64,
    pub physical: bool,
    pub config: FinalStateConfig,
}

/// Final photon polarization labels `(λ₁, λ₂, λ₃)` in the panel order
/// 111, 211, 121, 112, 221, 212, 122, 222.
pub const PANEL_LABELS: [[Pol; 3]; 8] = {
    use Pol::{First as A, Second as B};
    [
        [A, A, A],
        [B, A, A],
        [A, B, A],
        [A, A, B],
        [B, B, A],
        [B, A, B],
        [A, B, B],
        [B, B, B],
    ]
};

/// Amplitudes at a closed phase-space point. Leg 0 of the table is the
/// incoming photon with the supplied beam vectors; every emitted photon
/// carries both basis polarizations.
#[derive(Debug, Clone)]
pub struct ResolvedPoint<const N: usize> {
    pub closed: ClosedState<N>,
    pub table: AmplitudeTable,
    /// Converts `|M|²` into the differential cross section in barn units.
    pub prefactor: f64,
}

/// Closes the state and evaluates the amplitude table. Returns `None`
/// outside the physical region or when any photon is below `threshold`.
pub fn resolve<const N: usize>(
    setup: &CollisionSetup,
    directions: &[Direction; N],
    energies: &[f64],
    beam: &[LorentzVector],
    threshold: f64,
) -> Result<Option<ResolvedPoint<N>>> {
    assert_eq!(
        energies.len() + 1,
        N,
        "need energies for all but the last photon"
    );
    if energies.iter().any(|&w| !(w > 0.0) || w < threshold) {
        return Ok(None);
    }
    let given: Vec<LorentzVector> = energies
        .iter()
        .zip(directions)
        .map(|(&w, d)| LorentzVector::photon(w, d.theta, d.phi))
        .collect();
    let closed: ClosedState<N> = close_state(setup, &given, &directions[N - 1])?;
    if !closed.physical || closed.photons[N - 1].t < threshold {
        return Ok(None);
    }
    let mut legs = Vec::with_capacity(N + 1);
    legs.push(Leg::incoming(setup.k_0, beam.to_vec()).in_rest_frame_gauge());
    for (k, d) in closed.photons.iter().zip(directions) {
        let b = polarization_basis(d.theta, d.phi);
        legs.push(Leg::outgoing(*k, vec![b.first, b.second]).in_rest_frame_gauge());
    }
    let table = amplitude_table(&setup.p_i, &closed.p_f, &legs, setup.mass)?;
    let prefactor = prefactor(setup, &closed);
    Ok(Some(ResolvedPoint {
        closed,
        table,
        prefactor,
    }))
}

/// `α^{n+1}/(2π)^{2(n-1)} · m^{2-2n} · Πω / (p_i·k₀ · E_f|K|)` times (ħc)².
fn prefactor<const N: usize>(setup: &CollisionSetup, closed: &ClosedState<N>) -> f64 {
    let n = N as i32;
    let m = setup.mass;
    let flux = on_shell_dot(&setup.p_i, m, &setup.k_0, 0.0);
    let omegas: f64 = closed.photons.iter().map(|k| k.t).product();
    let recoil = closed.p_f.t * closed.jacobian.abs();
    ALPHA.powi(n + 1) / (2.0 * std::f64::consts::PI).powi(2 * (n - 1)) / m.powi(2 * n - 2) * omegas
        / (flux * recoil)
        * HBARC_SQ_BARN_MEV2
}

fn beam_basis(setup: &CollisionSetup) -> Result<[LorentzVector; 2]> {
    Ok([
        BeamPolarization::Basis(Pol::First).vector(setup)?,
        BeamPolarization::Basis(Pol::Second).vector(setup)?,
    ])
}

/// Unpolarized cross section with an explicit beam polarization basis:
/// average over the initial spin and beam polarization, sum over all final
/// labels.
fn unpolarized<const N: usize>(
    setup: &CollisionSetup,
    directions: &[Direction; N],
    energies: &[f64],
    beam: [LorentzVector; 2],
    threshold: f64,
) -> Result<f64> {
    Ok(
        match resolve(setup, directions, energies, &beam, threshold)? {
            Some(p) => 0.25 * p.prefactor * p.table.sum_sq(),
            None => 0.0,
        },
    )
}

/// Fully resolved σ5 for one spin and polarization configuration.
pub fn sigma5(
    setup: &CollisionSetup,
    cfg: &FinalStateConfig,
    beam: BeamPolarization,
    labels: [Pol; 3],
    spins: (Spin, Spin),
    threshold: f64,
) -> Result<Sigma5Point> {
    let point = resolve(
        setup,
        &cfg.directions,
        &[cfg.omega1, cfg.omega2],
        &[beam.vector(setup)?],
        threshold,
    )?;
    let (value, physical) = match point {
        Some(p) => {
            let pols = [0, labels[0].index(), labels[1].index(), labels[2].index()];
            (
                p.prefactor * p.table.get(spins.0, spins.1, &pols).norm_sqr(),
                true,
            )
        }
        None => (0.0, false),
    };
    Ok(Sigma5Point {
        value,
        physical,
        config: *cfg,
    })
}

/// `½ Σ_{r_i, r_f} σ5` for fixed beam and final polarizations.
pub fn spin_summed_sigma5(
    setup: &CollisionSetup,
    cfg: &FinalStateConfig,
    beam: BeamPolarization,
    labels: [Pol; 3],
    threshold: f64,
) -> Result<f64> {
    let panels = polarization_panels(setup, cfg, beam, threshold)?;
    let idx = PANEL_LABELS
        .iter()
        .position(|l| *l == labels)
        .expect("labels enumerate all triples");
    Ok(panels[idx])
}

/// Spin-summed σ5 for all eight final polarization triples, in
/// [`PANEL_LABELS`] order, from a single amplitude evaluation.
pub fn polarization_panels(
    setup: &CollisionSetup,
    cfg: &FinalStateConfig,
    beam: BeamPolarization,
    threshold: f64,
) -> Result<[f64; 8]> {
    Ok(physical_panels(setup, cfg, beam, threshold)?.unwrap_or([0.0; 8]))
}

/// [`polarization_panels`], or `None` when the point is unphysical or a
/// photon falls below `threshold` (a masked cell rather than a zero).
pub fn physical_panels(
    setup: &CollisionSetup,
    cfg: &FinalStateConfig,
    beam: BeamPolarization,
    threshold: f64,
) -> Result<Option<[f64; 8]>> {
    let point = resolve(
        setup,
        &cfg.directions,
        &[cfg.omega1, cfg.omega2],
        &[beam.vector(setup)?],
        threshold,
    )?;
    let Some(p) = point else {
        return Ok(None);
    };
    Ok(Some(PANEL_LABELS.map(|l| {
        let pols = [0, l[0].index(), l[1].index(), l[2].index()];
        let sum: f64 = Spin::ALL
            .iter()
            .flat_map(|&a| Spin::ALL.map(move |b| (a, b)))
            .map(|(a, b)| p.table.get(a, b, &pols).norm_sqr())
            .sum();
        0.5 * p.prefactor * sum
    })))
}

/// `¼ Σ_{spin, pol}` σ5: averaged over initial electron spin and beam
/// polarization, summed over final spin and photon polarizations.
pub fn unpolarized_sigma5(
    setup: &CollisionSetup,
    cfg: &FinalStateConfig,
    threshold: f64,
) -> Result<f64> {
    unpolarized(
        setup,
        &cfg.directions,
        &[cfg.omega1, cfg.omega2],
        beam_basis(setup)?,
        threshold,
    )
}

/// [`unpolarized_sigma5`] averaged over a caller-chosen orthonormal pair of
/// transverse beam polarizations.
pub fn unpolarized_sigma5_with_beam_basis(
    setup: &CollisionSetup,
    cfg: &FinalStateConfig,
    basis: [BeamPolarization; 2],
    threshold: f64,
) -> Result<f64> {
    let beam = [basis[0].vector(setup)?, basis[1].vector(setup)?];
    unpolarized(
        setup,
        &cfg.directions,
        &[cfg.omega1, cfg.omega2],
        beam,
        threshold,
    )
}

/// Unpolarized single Compton `dσ/dΩ`, barn/sr. Photons below `threshold`
/// contribute zero.
pub fn single_compton_dsigma(
    setup: &CollisionSetup,
    direction: &Direction,
    threshold: f64,
) -> Result<f64> {
    unpolarized(setup, &[*direction], &[], beam_basis(setup)?, threshold)
}

/// Unpolarized double Compton `dσ/dω₁dΩ₁dΩ₂`, barn·MeV⁻¹·sr⁻².
pub fn double_compton_dsigma(
    setup: &CollisionSetup,
    directions: &[Direction; 2],
    omega1: f64,
    threshold: f64,
) -> Result<f64> {
    unpolarized(setup, directions, &[omega1], beam_basis(setup)?, threshold)
}
