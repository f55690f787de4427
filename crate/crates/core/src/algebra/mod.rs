//! Four-vectors, Dirac matrices, spinors and photon polarization vectors.

mod boost;
mod dirac;
mod lorentz;
mod polarization;
mod spinor;

pub use boost::ZBoost;
pub use dirac::{propagator, propagator_with_denominator, slash, DiracMatrix, Spinor4, POLE_GUARD};
pub use lorentz::{minkowski_dot, on_shell_dot, LorentzVector};
pub use polarization::{polarization_basis, Pol, PolarizationPair};
pub use spinor::{dirac_spinor, Bispinor, Spin, MASS_SHELL_TOLERANCE};

#[cfg(test)]
mod properties {
    use super::*;
    use crate::constants::ELECTRON_MASS as M;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn vec4() -> impl Strategy<Value = LorentzVector> {
        (
            -10.0..10.0f64,
            -10.0..10.0f64,
            -10.0..10.0f64,
            -10.0..10.0f64,
        )
            .prop_map(|(t, x, y, z)| LorentzVector::new(t, x, y, z))
    }

    proptest! {
        #[test]
        fn slash_anticommutator(a in vec4(), b in vec4()) {
            let lhs = slash(&a) * slash(&b) + slash(&b) * slash(&a);
            let rhs = DiracMatrix::scalar(Complex64::new(2.0 * a.dot(&b), 0.0));
            prop_assert!((lhs - rhs).max_abs() < 1e-12 * (1.0 + a.max_abs() * b.max_abs()));
        }

        #[test]
        fn spinor_completeness(px in -1e4..1e4f64, py in -1e4..1e4f64, pz in -1e4..1e4f64) {
            // Σ_r u_r ū_r = (p̂ + m)/(2m)
            let p = LorentzVector::on_shell(M, [px, py, pz]);
            let mut sum = DiracMatrix::ZERO;
            for s in Spin::ALL {
                let u = dirac_spinor(p, s, M).unwrap().components;
                let ubar = [u[0].conj(), u[1].conj(), -u[2].conj(), -u[3].conj()];
                for i in 0..4 {
                    for j in 0..4 {
                        sum.0[i][j] += u[i] * ubar[j];
                    }
                }
            }
            let mut expect = slash(&p);
            for i in 0..4 {
                expect.0[i][i] += M;
            }
            let expect = expect.scale(Complex64::new(1.0 / (2.0 * M), 0.0));
            prop_assert!((sum - expect).max_abs() <= 1e-10 * expect.max_abs());
        }
    }
}
