use super::LorentzVector;

/// Linear polarization label `λ ∈ {1, 2}` selecting one of the two basis
/// vectors of [`PolarizationPair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pol {
    First,
    Second,
}

impl Pol {
    pub const ALL: [Pol; 2] = [Pol::First, Pol::Second];

    pub fn index(self) -> usize {
        match self {
            Pol::First => 0,
            Pol::Second => 1,
        }
    }

    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_label(l: u8) -> Option<Pol> {
        match l {
            1 => Some(Pol::First),
            2 => Some(Pol::Second),
            _ => None,
        }
    }
}

/// Transverse basis for a photon travelling along `(θ, φ)`:
/// ε¹ = (cosθ cosφ, cosθ sinφ, -sinθ), ε² = (-sinφ, cosφ, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationPair {
    pub first: LorentzVector,
    pub second: LorentzVector,
}

impl PolarizationPair {
    pub fn get(&self, pol: Pol) -> LorentzVector {
        match pol {
            Pol::First => self.first,
            Pol::Second => self.second,
        }
    }
}

pub fn polarization_basis(theta: f64, phi: f64) -> PolarizationPair {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    PolarizationPair {
        first: LorentzVector::spatial([ct * cp, ct * sp, -st]),
        second: LorentzVector::spatial([-sp, cp, 0.0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[test]
    fn forward_and_sideways() {
        let b = polarization_basis(0.0, 0.0);
        assert_eq!(b.first.three(), [1.0, 0.0, 0.0]);
        assert_eq!(b.second.three(), [0.0, 1.0, 0.0]);

        let b = polarization_basis(std::f64::consts::FRAC_PI_2, 0.0);
        let e1 = b.first.three();
        assert!(e1[0].abs() < 1e-16 && e1[1] == 0.0 && e1[2] == -1.0);
        assert_eq!(b.second.three(), [0.0, 1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn orthonormal_triad(theta in 0.0..std::f64::consts::PI, phi in -7.0..7.0f64, omega in 1e-3..1e4f64) {
            let b = polarization_basis(theta, phi);
            let k = LorentzVector::photon(omega, theta, phi);
            let n = LorentzVector::null_direction(theta, phi);
            for e in [b.first, b.second] {
                prop_assert!(e.dot(&k).abs() <= 1e-12 * omega);
                prop_assert!((e.dot(&e) + 1.0).abs() < 1e-14);
                prop_assert!(e.three_dot(&n).abs() < 1e-14);
            }
            prop_assert!(b.first.dot(&b.second).abs() < 1e-14);
            let c = cross(b.first.three(), b.second.three());
            let nn = n.three();
            let d: f64 = (0..3).map(|i| c[i] * nn[i]).sum();
            prop_assert!((d.abs() - 1.0).abs() < 1e-13);
        }
    }
}
