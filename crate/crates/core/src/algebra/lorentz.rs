use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Contravariant four-vector `(t, x, y, z)` with metric signature (+,-,-,-).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LorentzVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl LorentzVector {
    pub const ZERO: LorentzVector = LorentzVector::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        LorentzVector { t, x, y, z }
    }

    /// Purely spatial vector, used for polarization vectors.
    pub const fn spatial(v: [f64; 3]) -> Self {
        LorentzVector::new(0.0, v[0], v[1], v[2])
    }

    /// Unit direction `(1, n̂)` for polar angle `theta` and azimuth `phi`.
    pub fn null_direction(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        LorentzVector::new(1.0, st * cp, st * sp, ct)
    }

    /// Photon four-momentum `ω (1, n̂)`.
    pub fn photon(omega: f64, theta: f64, phi: f64) -> Self {
        Self::null_direction(theta, phi) * omega
    }

    /// On-shell four-momentum with the given mass and three-momentum.
    pub fn on_shell(mass: f64, p: [f64; 3]) -> Self {
        let e = (mass * mass + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        LorentzVector::new(e, p[0], p[1], p[2])
    }

    pub fn three(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &LorentzVector) -> f64 {
        minkowski_dot(self, other)
    }

    /// Minkowski square `v·v`.
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn three_dot(&self, other: &LorentzVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn three_norm(&self) -> f64 {
        self.three_dot(self).sqrt()
    }

    /// Largest absolute component, a convenient scale for residual checks.
    pub fn max_abs(&self) -> f64 {
        self.t
            .abs()
            .max(self.x.abs())
            .max(self.y.abs())
            .max(self.z.abs())
    }
}

/// `a⁰b⁰ - a·b`.
pub fn minkowski_dot(a: &LorentzVector, b: &LorentzVector) -> f64 {
    a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z
}

/// `a·b` for two future-pointing vectors with known invariant masses,
/// written so that nearly collinear ultra-relativistic momenta do not lose
/// precision:
///
/// `a·b = (m_a² b⁰² + m_b² |a|²)/(a⁰b⁰ + |a||b|) + |a||b| |â - b̂|²/2`.
pub fn on_shell_dot(a: &LorentzVector, a_mass: f64, b: &LorentzVector, b_mass: f64) -> f64 {
    let na = a.three_norm();
    let nb = b.three_norm();
    let ma2 = a_mass * a_mass;
    let mb2 = b_mass * b_mass;
    let denom = a.t * b.t + na * nb;
    let mass_part = if denom > 0.0 {
        (ma2 * b.t * b.t + mb2 * na * na) / denom
    } else {
        0.0
    };
    if na == 0.0 || nb == 0.0 {
        return a.t * b.t - a.three_dot(b);
    }
    let d = [
        a.x / na - b.x / nb,
        a.y / na - b.y / nb,
        a.z / na - b.z / nb,
    ];
    mass_part + 0.5 * na * nb * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

impl Add for LorentzVector {
    type Output = LorentzVector;
    fn add(self, o: LorentzVector) -> LorentzVector {
        LorentzVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for LorentzVector {
    type Output = LorentzVector;
    fn sub(self, o: LorentzVector) -> LorentzVector {
        LorentzVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl AddAssign for LorentzVector {
    fn add_assign(&mut self, o: LorentzVector) {
        *self = *self + o;
    }
}

impl SubAssign for LorentzVector {
    fn sub_assign(&mut self, o: LorentzVector) {
        *self = *self - o;
    }
}

impl Neg for LorentzVector {
    type Output = LorentzVector;
    fn neg(self) -> LorentzVector {
        LorentzVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for LorentzVector {
    type Output = LorentzVector;
    fn mul(self, s: f64) -> LorentzVector {
        LorentzVector::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<LorentzVector> for f64 {
    type Output = LorentzVector;
    fn mul(self, v: LorentzVector) -> LorentzVector {
        v * self
    }
}
