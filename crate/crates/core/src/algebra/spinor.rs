use num_complex::Complex64;

use super::dirac::Spinor4;
use super::LorentzVector;
use crate::error::{Error, Result};

/// Electron spin label `r ∈ {1, 2}`, spin up/down along z in the rest frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_label(r: u8) -> Option<Spin> {
        match r {
            1 => Some(Spin::Up),
            2 => Some(Spin::Down),
            _ => None,
        }
    }
}

/// Largest tolerated `|p² - m²|/m²` when building a spinor.
pub const MASS_SHELL_TOLERANCE: f64 = 1e-6;

/// Positive-energy Dirac spinor normalized to `ū u = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bispinor {
    pub components: Spinor4,
    pub spin: Spin,
    pub momentum: LorentzVector,
}

impl Bispinor {
    /// `u_r(p) = √((E+m)/2m) (χ_r, σ·p/(E+m) χ_r)`.
    pub fn new(p: LorentzVector, spin: Spin, mass: f64) -> Result<Self> {
        let deviation = (p.norm_sq() - mass * mass).abs() / (mass * mass);
        if !(deviation <= MASS_SHELL_TOLERANCE) || p.t < 0.0 {
            return Err(Error::OffShell { deviation });
        }
        let e = p.t;
        let norm = ((e + mass) / (2.0 * mass)).sqrt();
        let chi = match spin {
            Spin::Up => [1.0, 0.0],
            Spin::Down => [0.0, 1.0],
        };
        let c = |re: f64| Complex64::new(re, 0.0);
        let inv = 1.0 / (e + mass);
        let pp = Complex64::new(p.x, p.y) * inv;
        let pm = Complex64::new(p.x, -p.y) * inv;
        let pz = p.z * inv;
        // σ·p χ
        let lower0 = c(pz * chi[0]) + pm * chi[1];
        let lower1 = pp * chi[0] - c(pz * chi[1]);
        Ok(Bispinor {
            components: [
                c(norm * chi[0]),
                c(norm * chi[1]),
                lower0 * norm,
                lower1 * norm,
            ],
            spin,
            momentum: p,
        })
    }

    /// Dirac adjoint contracted with a column spinor: `ū v = u†γ⁰ v`.
    pub fn bar_dot(&self, v: &Spinor4) -> Complex64 {
        let u = &self.components;
        u[0].conj() * v[0] + u[1].conj() * v[1] - u[2].conj() * v[2] - u[3].conj() * v[3]
    }

    /// `u† u`.
    pub fn density(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Shorthand for [`Bispinor::new`].
pub fn dirac_spinor(p: LorentzVector, spin: Spin, mass: f64) -> Result<Bispinor> {
    Bispinor::new(p, spin, mass)
}
