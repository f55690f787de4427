//! Tree-level amplitudes for an electron line with any number of photon
//! insertions, summed coherently over all insertion orders.
//!
//! Leg 0 is conventionally the incoming photon; the remaining legs are
//! emitted. For a given insertion order `ξ` the electron line reads
//! `ū(p_f) ε̂_{ξ(N-1)} S(q_{N-1}) ... ε̂_{ξ(1)} S(q_1) ε̂_{ξ(0)} u(p_i)`
//! with `q_n = p_i + Σ_{j<n} ±k_{ξ(j)}` (+ for incoming, - for emitted).

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::algebra::{
    dirac_spinor, on_shell_dot, polarization_basis, propagator_with_denominator, slash, Bispinor,
    DiracMatrix, LorentzVector, Pol, Spin, Spinor4, ZBoost,
};
use crate::error::{Error, Result};
use crate::kinematics::{ClosedFinalState, CollisionSetup, Direction};

/// Maximum number of photon legs supported by the engine.
pub const MAX_LEGS: usize = 4;

/// An insertion order of the photon legs, a permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Permutation(order))
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> &'static [Permutation] {
        static CACHE: [OnceLock<Vec<Permutation>>; MAX_LEGS + 1] =
            [const { OnceLock::new() }; MAX_LEGS + 1];
        assert!(n <= MAX_LEGS, "at most {MAX_LEGS} legs supported");
        CACHE[n].get_or_init(|| {
            let mut out = Vec::new();
            let mut current: Vec<usize> = (0..n).collect();
            loop {
                out.push(Permutation(current.clone()));
                // next lexicographic permutation
                let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                    break;
                };
                let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
                current.swap(i - 1, j);
                current[i..].reverse();
            }
            out
        })
    }
}

/// An external photon line attached to the electron.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub momentum: LorentzVector,
    pub incoming: bool,
    /// Polarization four-vectors to resolve for this leg.
    pub polarizations: Vec<LorentzVector>,
    /// Shift each polarization by a multiple of the momentum so that it has
    /// no time component in the incoming electron rest frame. The amplitude
    /// is unchanged for physical polarizations, but boosted lab vectors can
    /// carry time components far above unit size, which inflates the
    /// individual diagrams against their sum and costs digits.
    pub rest_frame_gauge: bool,
}

impl Leg {
    pub fn incoming(momentum: LorentzVector, polarizations: Vec<LorentzVector>) -> Self {
        Leg {
            momentum,
            incoming: true,
            polarizations,
            rest_frame_gauge: false,
        }
    }

    pub fn outgoing(momentum: LorentzVector, polarizations: Vec<LorentzVector>) -> Self {
        Leg {
            momentum,
            incoming: false,
            polarizations,
            rest_frame_gauge: false,
        }
    }

    /// Marks the polarizations as physical so evaluation may re-gauge them
    /// (see [`Leg::rest_frame_gauge`]). Not for pure-gauge vectors `ε ∝ k`,
    /// which the shift maps to zero.
    pub fn in_rest_frame_gauge(mut self) -> Self {
        self.rest_frame_gauge = true;
        self
    }

    /// The leg with momentum and polarizations mapped to the evaluation
    /// frame, applying the rest-frame gauge shift if requested.
    fn regauged(&self, to_frame: impl Fn(&LorentzVector) -> LorentzVector) -> Leg {
        let momentum = to_frame(&self.momentum);
        let polarizations = self
            .polarizations
            .iter()
            .map(|e| {
                let e = to_frame(e);
                if self.rest_frame_gauge {
                    e - momentum * (e.t / momentum.t)
                } else {
                    e
                }
            })
            .collect();
        Leg {
            momentum,
            incoming: self.incoming,
            polarizations,
            rest_frame_gauge: false,
        }
    }

    fn signed_momentum(&self) -> LorentzVector {
        if self.incoming {
            self.momentum
        } else {
            -self.momentum
        }
    }
}

/// Amplitudes for every combination of electron spins and leg
/// polarizations. Layout is row-major over
/// `[spin_f][spin_i][pol of leg 0]...[pol of leg N-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    values: Vec<Complex64>,
    pol_counts: Vec<usize>,
    strides: Vec<usize>,
    spin_i_stride: usize,
    spin_f_stride: usize,
}

impl AmplitudeTable {
    fn zeros(pol_counts: Vec<usize>) -> Self {
        let mut strides = vec![0; pol_counts.len()];
        let mut stride = 1;
        for (s, &c) in strides.iter_mut().zip(&pol_counts).rev() {
            *s = stride;
            stride *= c;
        }
        let spin_i_stride = stride;
        let spin_f_stride = 2 * stride;
        AmplitudeTable {
            values: vec![Complex64::new(0.0, 0.0); 4 * stride],
            pol_counts,
            strides,
            spin_i_stride,
            spin_f_stride,
        }
    }

    fn index(&self, spin_i: Spin, spin_f: Spin, pols: &[usize]) -> usize {
        assert_eq!(pols.len(), self.pol_counts.len());
        let mut idx = spin_i.index() * self.spin_i_stride + spin_f.index() * self.spin_f_stride;
        for ((&p, &s), &c) in pols.iter().zip(&self.strides).zip(&self.pol_counts) {
            assert!(p < c, "polarization index out of range");
            idx += p * s;
        }
        idx
    }

    pub fn get(&self, spin_i: Spin, spin_f: Spin, pols: &[usize]) -> Complex64 {
        self.values[self.index(spin_i, spin_f, pols)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn pol_counts(&self) -> &[usize] {
        &self.pol_counts
    }

    /// `Σ |M|²` over every entry.
    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, c| a.max(c.norm()))
    }
}

/// Intermediate electron momenta `q_1 .. q_{N-1}` for the insertion order `xi`.
pub fn propagator_momenta(
    xi: &Permutation,
    p_i: &LorentzVector,
    legs: &[Leg],
) -> Vec<LorentzVector> {
    let mut q = *p_i;
    let mut out = Vec::with_capacity(legs.len().saturating_sub(1));
    for &j in &xi.order()[..legs.len() - 1] {
        q += legs[j].signed_momentum();
        out.push(q);
    }
    out
}

/// Inputs re-expressed in the rest frame of the incoming electron when it
/// moves along z. The amplitude is Lorentz invariant; evaluating it where
/// all momenta are of order the invariant energy keeps the spinor algebra
/// free of the large cancellations that otherwise appear at high boosts.
/// The final spinor is the lab spinor transformed with `S(Λ)`, so spin
/// labels keep their lab-frame meaning.
struct EvaluationFrame {
    p_i: LorentzVector,
    legs: Vec<Leg>,
    u_i: [Spinor4; 2],
    u_f: [Spinor4; 2],
}

impl EvaluationFrame {
    fn new(p_i: &LorentzVector, p_f: &LorentzVector, legs: &[Leg], mass: f64) -> Result<Self> {
        let lab_i = spinors(p_i, mass)?;
        let lab_f = spinors(p_f, mass)?;
        let Some(boost) = ZBoost::to_rest_frame_of(p_i, mass) else {
            return Ok(EvaluationFrame {
                p_i: *p_i,
                legs: legs.iter().map(|l| l.regauged(|v| *v)).collect(),
                u_i: lab_i.map(|u| u.components),
                u_f: lab_f.map(|u| u.components),
            });
        };
        let rest = LorentzVector::new(mass, 0.0, 0.0, 0.0);
        let boosted: Vec<Leg> = legs
            .iter()
            .map(|l| l.regauged(|v| boost.apply(v)))
            .collect();
        let s = boost.spinor_matrix();
        Ok(EvaluationFrame {
            p_i: rest,
            legs: boosted,
            u_i: spinors(&rest, mass)?.map(|u| u.components),
            u_f: lab_f.map(|u| s.apply(&u.components)),
        })
    }
}

fn bar_dot(u: &Spinor4, v: &Spinor4) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1] - u[2].conj() * v[2] - u[3].conj() * v[3]
}

/// Fast evaluation: cached slashed polarizations and propagators (keyed by
/// the set of already attached legs), spinors chained right to left.
pub fn amplitude_table(
    p_i: &LorentzVector,
    p_f: &LorentzVector,
    legs: &[Leg],
    mass: f64,
) -> Result<AmplitudeTable> {
    let n = legs.len();
    assert!((1..=MAX_LEGS).contains(&n), "unsupported leg count {n}");
    let frame = EvaluationFrame::new(p_i, p_f, legs, mass)?;
    let (p_i, legs, u_i, u_f) = (&frame.p_i, &frame.legs[..], &frame.u_i, &frame.u_f);

    let slashed: Vec<Vec<DiracMatrix>> = legs
        .iter()
        .map(|l| l.polarizations.iter().map(slash).collect())
        .collect();

    // Propagators keyed by bitmask of attached legs. The empty and full
    // sets are never needed.
    let full = (1usize << n) - 1;
    let mut props: Vec<Option<DiracMatrix>> = vec![None; 1 << n];
    for mask in 1..full {
        let attached: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let mut q = *p_i;
        for &j in &attached {
            q += legs[j].signed_momentum();
        }
        let denom = off_shellness(p_i, legs, &attached, mass);
        props[mask] = Some(propagator_with_denominator(&q, denom, mass)?);
    }

    let mut table = AmplitudeTable::zeros(legs.iter().map(|l| l.polarizations.len()).collect());
    let mut current: Vec<(usize, Spinor4)> = Vec::with_capacity(table.values.len());
    let mut next: Vec<(usize, Spinor4)> = Vec::with_capacity(table.values.len());

    for xi in Permutation::all(n) {
        current.clear();
        for s in Spin::ALL {
            current.push((s.index() * table.spin_i_stride, u_i[s.index()]));
        }
        let mut mask = 0usize;
        for (pos, &leg) in xi.order().iter().enumerate() {
            next.clear();
            for (idx, v) in &current {
                for (p, m) in slashed[leg].iter().enumerate() {
                    next.push((idx + p * table.strides[leg], m.apply(v)));
                }
            }
            mask |= 1 << leg;
            if pos + 1 < n {
                let s = props[mask].as_ref().expect("propagator cached");
                for (_, v) in next.iter_mut() {
                    *v = s.apply(v);
                }
            }
            std::mem::swap(&mut current, &mut next);
        }
        for (idx, v) in &current {
            for s in Spin::ALL {
                table.values[idx + s.index() * table.spin_f_stride] += bar_dot(&u_f[s.index()], v);
            }
        }
    }

    let norm = Complex64::new(mass.powi(n as i32 - 1), 0.0);
    for v in table.values.iter_mut() {
        *v *= norm;
    }
    Ok(table)
}

/// `q² - m²` for `q = p_i + Σ_{j∈attached} ±k_j`, expanded as
/// `2 p_i·K + Σ_{a≠b} (±k_a)·(±k_b)` with every product taken between on-shell
/// momenta, so that nearly collinear ultra-relativistic kinematics keep
/// full relative precision.
fn off_shellness(p_i: &LorentzVector, legs: &[Leg], attached: &[usize], mass: f64) -> f64 {
    let sign = |j: usize| if legs[j].incoming { 1.0 } else { -1.0 };
    let mut total = 0.0;
    for (a, &ja) in attached.iter().enumerate() {
        total += 2.0 * sign(ja) * on_shell_dot(p_i, mass, &legs[ja].momentum, 0.0);
        for &jb in &attached[a + 1..] {
            total += 2.0
                * sign(ja)
                * sign(jb)
                * on_shell_dot(&legs[ja].momentum, 0.0, &legs[jb].momentum, 0.0);
        }
    }
    total
}

fn spinors(p: &LorentzVector, mass: f64) -> Result<[Bispinor; 2]> {
    Ok([
        dirac_spinor(*p, Spin::Up, mass)?,
        dirac_spinor(*p, Spin::Down, mass)?,
    ])
}

/// Slow reference evaluation of one amplitude: each insertion order is
/// expanded into an explicit 4×4 matrix product with no shared work.
pub fn reference_amplitude(
    p_i: &LorentzVector,
    p_f: &LorentzVector,
    legs: &[Leg],
    pols: &[usize],
    spin_i: Spin,
    spin_f: Spin,
    mass: f64,
) -> Result<Complex64> {
    let n = legs.len();
    let frame = EvaluationFrame::new(p_i, p_f, legs, mass)?;
    let (p_i, legs) = (&frame.p_i, &frame.legs[..]);
    let mut total = DiracMatrix::ZERO;
    for xi in Permutation::all(n) {
        let qs = propagator_momenta(xi, p_i, legs);
        let order = xi.order();
        let first = order[0];
        let mut chain = slash(&legs[first].polarizations[pols[first]]);
        for (step, &leg) in order.iter().enumerate().skip(1) {
            let denom = off_shellness(p_i, legs, &order[..step], mass);
            chain = propagator_with_denominator(&qs[step - 1], denom, mass)? * chain;
            chain = slash(&legs[leg].polarizations[pols[leg]]) * chain;
        }
        total = total + chain;
    }
    let v = total.apply(&frame.u_i[spin_i.index()]);
    Ok(bar_dot(&frame.u_f[spin_f.index()], &v) * mass.powi(n as i32 - 1))
}

/// Polarization of the incoming photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamPolarization {
    /// A basis vector of the beam direction (ε¹ = x̂, ε² = ŷ for a beam along +z).
    Basis(Pol),
    /// Arbitrary real transverse vector; normalized on use.
    Vector([f64; 3]),
}

impl BeamPolarization {
    pub fn vector(&self, setup: &CollisionSetup) -> Result<LorentzVector> {
        let _ = setup;
        match *self {
            BeamPolarization::Basis(p) => Ok(polarization_basis(0.0, 0.0).get(p)),
            BeamPolarization::Vector(v) => {
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if !(norm > 0.0) || v[2].abs() > 1e-12 * norm {
                    return Err(Error::InvalidArgument(format!(
                        "beam polarization {v:?} must be a nonzero vector transverse to the beam (z) axis"
                    )));
                }
                Ok(LorentzVector::spatial([v[0] / norm, v[1] / norm, 0.0]))
            }
        }
    }
}

/// Fully resolved inputs for one triple Compton amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeInputs {
    pub setup: CollisionSetup,
    pub closed: ClosedFinalState,
    pub beam: LorentzVector,
    pub polarizations: [LorentzVector; 3],
    pub spin_i: Spin,
    pub spin_f: Spin,
}

impl AmplitudeInputs {
    /// Builds the inputs with basis polarizations `λ_j` for the three photons.
    pub fn with_labels(
        setup: &CollisionSetup,
        closed: ClosedFinalState,
        directions: &[Direction; 3],
        beam: LorentzVector,
        labels: [Pol; 3],
        spin_i: Spin,
        spin_f: Spin,
    ) -> Self {
        let polarizations = std::array::from_fn(|j| {
            polarization_basis(directions[j].theta, directions[j].phi).get(labels[j])
        });
        AmplitudeInputs {
            setup: *setup,
            closed,
            beam,
            polarizations,
            spin_i,
            spin_f,
        }
    }

    pub fn legs(&self) -> Vec<Leg> {
        let mut legs = vec![Leg::incoming(self.setup.k_0, vec![self.beam]).in_rest_frame_gauge()];
        for j in 0..3 {
            legs.push(
                Leg::outgoing(self.closed.photons[j], vec![self.polarizations[j]])
                    .in_rest_frame_gauge(),
            );
        }
        legs
    }
}

/// Triple Compton amplitude `M` for one spin/polarization configuration.
pub fn total_amplitude(inputs: &AmplitudeInputs) -> Result<Complex64> {
    let t = amplitude_table(
        &inputs.setup.p_i,
        &inputs.closed.p_f,
        &inputs.legs(),
        inputs.setup.mass,
    )?;
    Ok(t.get(inputs.spin_i, inputs.spin_f, &[0, 0, 0, 0]))
}

/// Single Compton amplitude for emission of `k_out`; `polarizations` are
/// `(ε₀, ε₁)`. The final electron momentum is fixed by conservation.
pub fn single_compton_amplitude(
    setup: &CollisionSetup,
    k_out: &LorentzVector,
    polarizations: [LorentzVector; 2],
    spins: (Spin, Spin),
) -> Result<Complex64> {
    let p_f = setup.total() - *k_out;
    let legs = [
        Leg::incoming(setup.k_0, vec![polarizations[0]]).in_rest_frame_gauge(),
        Leg::outgoing(*k_out, vec![polarizations[1]]).in_rest_frame_gauge(),
    ];
    Ok(amplitude_table(&setup.p_i, &p_f, &legs, setup.mass)?.get(spins.0, spins.1, &[0, 0]))
}

/// Double Compton amplitude; `polarizations` are `(ε₀, ε₁, ε₂)`.
pub fn double_compton_amplitude(
    setup: &CollisionSetup,
    k_1: &LorentzVector,
    k_2: &LorentzVector,
    polarizations: [LorentzVector; 3],
    spins: (Spin, Spin),
) -> Result<Complex64> {
    let p_f = setup.total() - *k_1 - *k_2;
    let legs = [
        Leg::incoming(setup.k_0, vec![polarizations[0]]).in_rest_frame_gauge(),
        Leg::outgoing(*k_1, vec![polarizations[1]]).in_rest_frame_gauge(),
        Leg::outgoing(*k_2, vec![polarizations[2]]).in_rest_frame_gauge(),
    ];
    Ok(amplitude_table(&setup.p_i, &p_f, &legs, setup.mass)?.get(spins.0, spins.1, &[0, 0, 0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::on_shell_dot;
    use crate::kinematics::{close_final_state, FinalStateConfig};
    use std::f64::consts::PI;

    #[test]
    fn permutations_enumerated() {
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(3).len(), 6);
        let mut seen = std::collections::HashSet::new();
        for p in Permutation::all(4) {
            assert!(Permutation::new(p.order().to_vec()).is_some());
            assert!(seen.insert(p.clone()));
        }
        assert!(Permutation::new(vec![0, 0, 1, 2]).is_none());
        assert!(Permutation::new(vec![0, 1, 4, 2]).is_none());
    }

    fn fig3_state() -> (CollisionSetup, FinalStateConfig, ClosedFinalState) {
        let setup = CollisionSetup::new(5000.0, 1e-3).unwrap();
        let th = PI - 1.5e-3;
        let phi = [2.0 * PI / 3.0, 4.0 * PI / 3.0, 2.0 * PI];
        let cfg = FinalStateConfig::from_angles([th; 3], phi, 500.0, 500.0);
        let closed = close_final_state(&setup, &cfg).unwrap();
        (setup, cfg, closed)
    }

    fn legs_for(
        setup: &CollisionSetup,
        cfg: &FinalStateConfig,
        closed: &ClosedFinalState,
    ) -> Vec<Leg> {
        let b = polarization_basis(0.0, 0.0);
        let mut legs = vec![Leg::incoming(setup.k_0, vec![b.first, b.second])];
        for j in 0..3 {
            let d = cfg.directions[j];
            let pb = polarization_basis(d.theta, d.phi);
            legs.push(Leg::outgoing(closed.photons[j], vec![pb.first, pb.second]));
        }
        legs
    }

    #[test]
    fn propagator_momenta_sign_rule() {
        let (setup, cfg, closed) = fig3_state();
        let legs = legs_for(&setup, &cfg, &closed);
        let [k1, k2, _] = closed.photons;
        let id = Permutation::new(vec![0, 1, 2, 3]).unwrap();
        let q = propagator_momenta(&id, &setup.p_i, &legs);
        assert_eq!(q[0], setup.p_i + setup.k_0);
        assert_eq!(q[1], setup.p_i + setup.k_0 - k1);
        assert_eq!(q[2], setup.p_i + setup.k_0 - k1 - k2);
        let swapped = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        assert_eq!(
            propagator_momenta(&swapped, &setup.p_i, &legs)[0],
            setup.p_i - k1
        );

        for xi in Permutation::all(4) {
            let q = propagator_momenta(xi, &setup.p_i, &legs);
            let last = &legs[xi.order()[3]];
            let q4 = q[2] + last.signed_momentum();
            assert!((q4 - closed.p_f).max_abs() <= 1e-9 * setup.electron_energy);
        }
    }

    #[test]
    fn fast_matches_reference_at_fig3_point() {
        let (setup, cfg, closed) = fig3_state();
        assert!(closed.physical);
        let legs = legs_for(&setup, &cfg, &closed);
        let table = amplitude_table(&setup.p_i, &closed.p_f, &legs, setup.mass).unwrap();
        let scale = table.max_abs();
        for si in Spin::ALL {
            for sf in Spin::ALL {
                for code in 0..16 {
                    let pols = [code >> 3 & 1, code >> 2 & 1, code >> 1 & 1, code & 1];
                    let fast = table.get(si, sf, &pols);
                    let slow = reference_amplitude(
                        &setup.p_i,
                        &closed.p_f,
                        &legs,
                        &pols,
                        si,
                        sf,
                        setup.mass,
                    )
                    .unwrap();
                    assert!((fast - slow).norm() <= 1e-12 * scale, "{fast} vs {slow}");
                }
            }
        }
        // |M|² for λ = (1,1,1), x-polarized beam, summed over spins.
        let m2: f64 = Spin::ALL
            .iter()
            .flat_map(|&a| Spin::ALL.map(move |b| (a, b)))
            .map(|(a, b)| table.get(a, b, &[0, 0, 0, 0]).norm_sqr())
            .sum();
        assert!(m2.is_finite() && m2 > 0.0);
    }

    #[test]
    fn rest_frame_gauge_leaves_amplitudes_unchanged() {
        let (setup, cfg, closed) = fig3_state();
        let raw = legs_for(&setup, &cfg, &closed);
        let shifted: Vec<Leg> = raw.iter().cloned().map(Leg::in_rest_frame_gauge).collect();
        let a = amplitude_table(&setup.p_i, &closed.p_f, &raw, setup.mass).unwrap();
        let b = amplitude_table(&setup.p_i, &closed.p_f, &shifted, setup.mass).unwrap();
        let scale = a.max_abs();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-9 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn ward_identity_at_rest_frame_point() {
        let setup = CollisionSetup::rest_frame(0.662).unwrap();
        let cfg = FinalStateConfig::from_angles([1.2, 2.0, 1.6], [0.5, 2.5, 4.0], 0.1, 0.12);
        let closed = close_final_state(&setup, &cfg).unwrap();
        assert!(closed.physical);
        let legs = legs_for(&setup, &cfg, &closed);
        let basis = amplitude_table(&setup.p_i, &closed.p_f, &legs, setup.mass).unwrap();
        for j in 0..4 {
            let mut gauge = legs.clone();
            gauge[j].polarizations = vec![legs[j].momentum];
            let t = amplitude_table(&setup.p_i, &closed.p_f, &gauge, setup.mass).unwrap();
            assert!(
                t.max_abs() <= 1e-9 * basis.max_abs(),
                "leg {j}: {}",
                t.max_abs() / basis.max_abs()
            );
        }
    }

    #[test]
    fn ward_identity_at_xfel_point() {
        let (setup, cfg, closed) = fig3_state();
        let legs = legs_for(&setup, &cfg, &closed);
        let basis = amplitude_table(&setup.p_i, &closed.p_f, &legs, setup.mass).unwrap();
        for j in 0..4 {
            let mut gauge = legs.clone();
            // Unit energy in the incoming electron rest frame, where the
            // basis polarizations also have unit norm.
            let k = legs[j].momentum;
            let rest_energy = on_shell_dot(&setup.p_i, setup.mass, &k, 0.0) / setup.mass;
            gauge[j].polarizations = vec![k * (1.0 / rest_energy)];
            let t = amplitude_table(&setup.p_i, &closed.p_f, &gauge, setup.mass).unwrap();
            assert!(
                t.max_abs() <= 1e-9 * basis.max_abs(),
                "leg {j}: {}",
                t.max_abs() / basis.max_abs()
            );
        }
    }
}
