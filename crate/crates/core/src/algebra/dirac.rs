//! 4×4 complex matrices on Dirac spinor space, in the Dirac representation
//! (γ⁰ diagonal).

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::LorentzVector;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub type Spinor4 = [Complex64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracMatrix(pub [[Complex64; 4]; 4]);

impl DiracMatrix {
    pub const ZERO: DiracMatrix = DiracMatrix([[ZERO; 4]; 4]);

    pub fn identity() -> Self {
        Self::scalar(ONE)
    }

    pub fn scalar(s: Complex64) -> Self {
        let mut m = Self::ZERO;
        for i in 0..4 {
            m.0[i][i] = s;
        }
        m
    }

    /// γ^μ for μ = 0..3.
    pub fn gamma(mu: usize) -> Self {
        let mut m = Self::ZERO;
        match mu {
            0 => {
                m.0[0][0] = ONE;
                m.0[1][1] = ONE;
                m.0[2][2] = -ONE;
                m.0[3][3] = -ONE;
            }
            1..=3 => {
                // γ^k = [[0, σ_k], [-σ_k, 0]]
                let sigma = pauli(mu);
                for r in 0..2 {
                    for c in 0..2 {
                        m.0[r][c + 2] = sigma[r][c];
                        m.0[r + 2][c] = -sigma[r][c];
                    }
                }
            }
            _ => panic!("gamma index {mu} out of range"),
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn apply(&self, v: &Spinor4) -> Spinor4 {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2] + a[0][3] * v[3],
            a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2] + a[1][3] * v[3],
            a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2] + a[2][3] * v[3],
            a[3][0] * v[0] + a[3][1] * v[1] + a[3][2] * v[2] + a[3][3] * v[3],
        ]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |acc, v| acc.max(v.norm()))
    }
}

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    match k {
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => unreachable!(),
    }
}

impl Mul for DiracMatrix {
    type Output = DiracMatrix;
    fn mul(self, rhs: DiracMatrix) -> DiracMatrix {
        let mut out = DiracMatrix::ZERO;
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = acc;
            }
        }
        out
    }
}

impl Add for DiracMatrix {
    type Output = DiracMatrix;
    fn add(self, rhs: DiracMatrix) -> DiracMatrix {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for DiracMatrix {
    type Output = DiracMatrix;
    fn sub(self, rhs: DiracMatrix) -> DiracMatrix {
        self + rhs.scale(-ONE)
    }
}

/// `â = a⁰γ⁰ - aˣγ¹ - aʸγ² - aᶻγ³`, written out for the Dirac representation.
pub fn slash(a: &LorentzVector) -> DiracMatrix {
    let t = Complex64::new(a.t, 0.0);
    let z = Complex64::new(a.z, 0.0);
    // -a·σ off-diagonal blocks: upper right is -(σ·a), lower left is +(σ·a)
    let xm = Complex64::new(a.x, -a.y); // a_x - i a_y
    let xp = Complex64::new(a.x, a.y); // a_x + i a_y
    DiracMatrix([
        [t, ZERO, -z, -xm],
        [ZERO, t, -xp, z],
        [z, xm, -t, ZERO],
        [xp, -z, ZERO, -t],
    ])
}

/// Relative distance from the pole below which a propagator is refused.
pub const POLE_GUARD: f64 = 1e-12;

/// Fermion propagator numerator over denominator, `(q̂ + m)/(q² - m²)`.
pub fn propagator(q: &LorentzVector, mass: f64) -> Result<DiracMatrix> {
    propagator_with_denominator(q, q.norm_sq() - mass * mass, mass)
}

/// Same as [`propagator`] with `q² - m²` supplied by the caller, for when it
/// is known more accurately than the component-wise square.
pub fn propagator_with_denominator(
    q: &LorentzVector,
    denom: f64,
    mass: f64,
) -> Result<DiracMatrix> {
    if denom.abs() < POLE_GUARD * mass * mass {
        return Err(Error::PropagatorPole { q2_minus_m2: denom });
    }
    let inv = 1.0 / denom;
    let mut s = slash(q);
    for i in 0..4 {
        s.0[i][i] += mass;
    }
    Ok(s.scale(Complex64::new(inv, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::minkowski_dot;
    use crate::constants::ELECTRON_MASS as M;

    fn close(a: &DiracMatrix, b: &DiracMatrix, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn clifford_relation() {
        let metric = [1.0, -1.0, -1.0, -1.0];
        for mu in 0..4 {
            for nu in 0..4 {
                let g = DiracMatrix::gamma(mu) * DiracMatrix::gamma(nu)
                    + DiracMatrix::gamma(nu) * DiracMatrix::gamma(mu);
                let expect = if mu == nu {
                    DiracMatrix::scalar(Complex64::new(2.0 * metric[mu], 0.0))
                } else {
                    DiracMatrix::ZERO
                };
                assert!(close(&g, &expect, 1e-12), "mu={mu} nu={nu}");
            }
        }
    }

    #[test]
    fn slash_matches_gamma_contraction() {
        let a = LorentzVector::new(0.7, -1.3, 2.1, 0.4);
        let mut expect = DiracMatrix::gamma(0).scale(Complex64::new(a.t, 0.0));
        for (k, c) in [(1, a.x), (2, a.y), (3, a.z)] {
            expect = expect - DiracMatrix::gamma(k).scale(Complex64::new(c, 0.0));
        }
        assert!(close(&slash(&a), &expect, 1e-15));
    }

    #[test]
    fn slash_squares() {
        let a = LorentzVector::new(2.0, 1.0, 0.0, 0.0);
        let sq = slash(&a) * slash(&a);
        assert!(close(
            &sq,
            &DiracMatrix::scalar(Complex64::new(3.0, 0.0)),
            1e-14
        ));

        let n = LorentzVector::new(1.0, 0.0, 0.0, 1.0);
        assert!((slash(&n) * slash(&n)).max_abs() < 1e-15);
    }

    #[test]
    fn propagator_direct_substitution() {
        let q = LorentzVector::new(2.0 * M, 0.0, 0.0, 0.0);
        let s = propagator(&q, M).unwrap();
        let mut expect = slash(&q) + DiracMatrix::scalar(Complex64::new(M, 0.0));
        expect = expect.scale(Complex64::new(1.0 / (3.0 * M * M), 0.0));
        assert!(close(&s, &expect, 1e-12));
    }

    #[test]
    fn propagator_pole_guard() {
        let q = LorentzVector::new(M, 0.0, 0.0, 0.0);
        match propagator(&q, M) {
            Err(Error::PropagatorPole { q2_minus_m2 }) => assert!(q2_minus_m2.abs() < 1e-15),
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn numerator_factorizes() {
        let q = LorentzVector::new(3.0, 1.0, 1.0, 1.0);
        let m = DiracMatrix::scalar(Complex64::new(M, 0.0));
        let lhs = (slash(&q) + m) * (slash(&q) - m);
        let rhs = DiracMatrix::scalar(Complex64::new(minkowski_dot(&q, &q) - M * M, 0.0));
        assert!(close(&lhs, &rhs, 1e-12));
    }
}
