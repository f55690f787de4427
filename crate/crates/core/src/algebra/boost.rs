//! Boost along z into the rest frame of a massive particle moving along z.

use num_complex::Complex64;

use super::{slash, DiracMatrix, LorentzVector};

/// Lorentz boost that brings a particle moving along the z axis to rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZBoost {
    /// Velocity of the particle along z.
    beta: f64,
    gamma: f64,
    /// `1 - |β|`, kept separately to avoid cancellation.
    one_minus_speed: f64,
    energy: f64,
    momentum_z: f64,
    mass: f64,
}

impl ZBoost {
    /// Boost to the rest frame of `p`, or `None` if `p` is at rest or not
    /// moving along z.
    pub fn to_rest_frame_of(p: &LorentzVector, mass: f64) -> Option<ZBoost> {
        if p.x != 0.0 || p.y != 0.0 || p.z == 0.0 || !(mass > 0.0) {
            return None;
        }
        let e = p.t;
        let pz = p.z;
        Some(ZBoost {
            beta: pz / e,
            gamma: e / mass,
            one_minus_speed: mass * mass / (e * (e + pz.abs())),
            energy: e,
            momentum_z: pz,
            mass,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `t' = γ(t - β z)`, `z' = γ(z - β t)`. Null vectors take a separate path
    /// that avoids the cancellation in `t ∓ z` for momenta close to the
    /// boost axis.
    pub fn apply(&self, v: &LorentzVector) -> LorentzVector {
        let rho2 = v.x * v.x + v.y * v.y;
        let spatial2 = rho2 + v.z * v.z;
        let is_null = v.t > 0.0 && (v.t * v.t - spatial2).abs() <= 1e-12 * v.t * v.t;
        if !is_null {
            return LorentzVector::new(
                self.gamma * (v.t - self.beta * v.z),
                v.x,
                v.y,
                self.gamma * (v.z - self.beta * v.t),
            );
        }
        let s = self.beta.signum();
        let w = v.t;
        let along = s * v.z;
        // w - along, exact for null vectors when `along` is close to w.
        let gap = if along > 0.0 {
            rho2 / (w + along)
        } else {
            w - along
        };
        let speed = 1.0 - self.one_minus_speed;
        let t = self.gamma * (w * self.one_minus_speed + speed * gap);
        let z = self.gamma * s * (w * self.one_minus_speed - gap);
        LorentzVector::new(t, v.x, v.y, z)
    }

    /// Spinor representation `S(Λ)` of the boost, so that `S u(p)` is the
    /// boosted spinor and `S γ^μ S⁻¹ Λ_μ^ν = γ^ν`.
    pub fn spinor_matrix(&self) -> DiracMatrix {
        // Boost with the opposite velocity: (m + p̂' γ⁰)/√(2m(E+m)), p' = (E, 0, 0, -p_z).
        let reversed = LorentzVector::new(self.energy, 0.0, 0.0, -self.momentum_z);
        let mut s = slash(&reversed) * DiracMatrix::gamma(0);
        for i in 0..4 {
            s.0[i][i] += self.mass;
        }
        s.scale(Complex64::new(
            1.0 / (2.0 * self.mass * (self.energy + self.mass)).sqrt(),
            0.0,
        ))
    }
}
