//! Polarization density matrix of the emitted photon triplet and the
//! genuine tripartite negativity `τ`.
//!
//! `τ(ρ) = max(0, -min tr(Wρ))` over witnesses `W` that, for every
//! bipartition `s`, decompose as `W = P_s + Q_s^{T_s}` with
//! `0 ≼ P_s, Q_s ≼ I`. The semidefinite program is solved by default with a
//! log-barrier interior-point method over `(W, P_s)` with
//! `Q_s = T_s(W - P_s)`; a relaxed ADMM over the six box-constrained blocks
//! is available as an independent cross-check. Either way the returned
//! witness is re-verified by eigendecomposition.
//!
//! Basis ordering is `|λ₁λ₂λ₃⟩` with `λ₃` fastest: index
//! `4(λ₁-1) + 2(λ₂-1) + (λ₃-1)`.

use nalgebra::{SMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

mod interior;
mod splitting;

use crate::algebra::{Pol, Spin};
use crate::amplitude::BeamPolarization;
use crate::cross_section::{resolve, PANEL_LABELS};
use crate::error::{Error, Result};
use crate::kinematics::{CollisionSetup, Direction};

pub type Matrix8 = SMatrix<Complex64, 8, 8>;

/// Tolerances used when validating a density matrix.
const HERMITIAN_TOLERANCE: f64 = 1e-10;
const TRACE_TOLERANCE: f64 = 1e-10;
const NEGATIVE_EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// Default stopping tolerance for the witness optimization.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;
/// Default iteration budget (Newton steps or splitting iterations).
pub const DEFAULT_MAX_ITERATIONS: usize = 200_000;

/// One photon against the other two: `s = 1|23, 2|13, 3|12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bipartition {
    First,
    Second,
    Third,
}

impl Bipartition {
    pub const ALL: [Bipartition; 3] = [Bipartition::First, Bipartition::Second, Bipartition::Third];

    /// Bit of the basis index belonging to the singled-out photon.
    fn bit(&self) -> usize {
        match self {
            Bipartition::First => 4,
            Bipartition::Second => 2,
            Bipartition::Third => 1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Bipartition::First => "1|23",
            Bipartition::Second => "2|13",
            Bipartition::Third => "3|12",
        }
    }
}

/// Transposition of the indices of the singled-out photon of `s`.
pub fn partial_transpose(m: &Matrix8, s: Bipartition) -> Matrix8 {
    let b = s.bit();
    Matrix8::from_fn(|i, j| {
        let (bi, bj) = (i & b, j & b);
        m[((i & !b) | bj, (j & !b) | bi)]
    })
}

pub(crate) fn hermitize(m: &Matrix8) -> Matrix8 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub(crate) fn trace_product(a: &Matrix8, b: &Matrix8) -> f64 {
    // tr(AB) for Hermitian A, B is real.
    let mut s = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix8) -> [f64; 8] {
    let e = SymmetricEigen::new(hermitize(m));
    let mut v: [f64; 8] = std::array::from_fn(|i| e.eigenvalues[i]);
    v.sort_by(f64::total_cmp);
    v
}

/// Projection onto `{X : 0 ≼ X ≼ I}` by clipping eigenvalues.
pub(crate) fn project_box(m: &Matrix8) -> Matrix8 {
    let e = SymmetricEigen::new(*m);
    let mut out = Matrix8::zeros();
    for k in 0..8 {
        let lambda = e.eigenvalues[k].clamp(0.0, 1.0);
        if lambda == 0.0 {
            continue;
        }
        let v = e.eigenvectors.column(k);
        out += (v * v.adjoint()) * Complex64::new(lambda, 0.0);
    }
    out
}

/// Validated 8×8 polarization density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix8);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, then hermitizes.
    pub fn new(m: Matrix8) -> Result<Self> {
        let asym = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (asymmetry {asym:e})"
            )));
        }
        let h = hermitize(&m);
        let tr = h.trace().re;
        if (tr - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&h)[0];
        if min < -NEGATIVE_EIGENVALUE_TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(DensityMatrix(h))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: &[Complex64; 8]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let m = Matrix8::from_fn(|i, j| psi[i] * psi[j].conj() / norm);
        Self::new(m)
    }

    /// `(|111⟩ + |222⟩)/√2`.
    pub fn ghz() -> Self {
        let mut psi = [Complex64::new(0.0, 0.0); 8];
        psi[0] = Complex64::new(1.0, 0.0);
        psi[7] = Complex64::new(1.0, 0.0);
        Self::pure(&psi).expect("valid state")
    }

    /// `(|112⟩ + |121⟩ + |211⟩)/√3`.
    pub fn w_state() -> Self {
        let mut psi = [Complex64::new(0.0, 0.0); 8];
        for i in [1, 2, 4] {
            psi[i] = Complex64::new(1.0, 0.0);
        }
        Self::pure(&psi).expect("valid state")
    }

    /// Computational basis state `|λ₁λ₂λ₃⟩⟨λ₁λ₂λ₃|`.
    pub fn basis_state(labels: [Pol; 3]) -> Self {
        let mut psi = [Complex64::new(0.0, 0.0); 8];
        psi[basis_index(labels)] = Complex64::new(1.0, 0.0);
        Self::pure(&psi).expect("valid state")
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix8::identity() * Complex64::new(0.125, 0.0))
    }

    /// `p·a + (1-p)·b`.
    pub fn mix(p: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {p} outside [0, 1]"
            )));
        }
        Self::new(a.0 * Complex64::new(p, 0.0) + b.0 * Complex64::new(1.0 - p, 0.0))
    }

    /// `U ρ U†`.
    pub fn transform(&self, u: &Matrix8) -> Result<Self> {
        Self::new(u * self.0 * u.adjoint())
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 8] {
        hermitian_eigenvalues(&self.0)
    }

    pub fn partial_transpose(&self, s: Bipartition) -> Matrix8 {
        partial_transpose(&self.0, s)
    }

    /// Plain-text form: eight rows of eight `re im` pairs, row-major.
    pub fn to_text(&self) -> String {
        matrix_to_text(&self.0)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::new(matrix_from_text(text)?)
    }

    /// Builds and validates from row-major real and imaginary parts.
    pub fn from_parts(re: &[f64; 64], im: &[f64; 64]) -> Result<Self> {
        Self::new(Matrix8::from_fn(|i, j| {
            Complex64::new(re[8 * i + j], im[8 * i + j])
        }))
    }

    /// Row-major real and imaginary parts.
    pub fn to_parts(&self) -> ([f64; 64], [f64; 64]) {
        let re = std::array::from_fn(|k| self.0[(k / 8, k % 8)].re);
        let im = std::array::from_fn(|k| self.0[(k / 8, k % 8)].im);
        (re, im)
    }
}

/// Basis index of `|λ₁λ₂λ₃⟩`.
pub fn basis_index(labels: [Pol; 3]) -> usize {
    4 * labels[0].index() + 2 * labels[1].index() + labels[2].index()
}

/// Writes eight lines of eight tab-separated `re im` pairs.
pub fn matrix_to_text(m: &Matrix8) -> String {
    let mut out = String::new();
    for i in 0..8 {
        let row: Vec<String> = (0..8)
            .map(|j| format!("{:e} {:e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn matrix_from_text(text: &str) -> Result<Matrix8> {
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if rows.len() != 8 {
        return Err(Error::Parse {
            line: rows.len(),
            message: format!("expected 8 rows, found {}", rows.len()),
        });
    }
    let mut m = Matrix8::zeros();
    for (i, row) in rows.iter().enumerate() {
        let nums: Vec<f64> = row
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        if nums.len() != 16 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 8 're im' pairs, found {} numbers", nums.len()),
            });
        }
        for j in 0..8 {
            m[(i, j)] = Complex64::new(nums[2 * j], nums[2 * j + 1]);
        }
    }
    Ok(m)
}

/// Density matrix `ρ_{λλ'} ∝ Σ_{r_i, r_f} M(λ) M*(λ')` of the three emitted
/// photons at one phase-space point.
pub fn density_from_amplitudes(
    setup: &CollisionSetup,
    directions: &[Direction; 3],
    omega1: f64,
    omega2: f64,
    beam: BeamPolarization,
) -> Result<DensityMatrix> {
    let point = resolve(
        setup,
        directions,
        &[omega1, omega2],
        &[beam.vector(setup)?],
        0.0,
    )?
    .ok_or(Error::Unphysical)?;
    let mut m = Matrix8::zeros();
    for si in Spin::ALL {
        for sf in Spin::ALL {
            let amps: [Complex64; 8] = std::array::from_fn(|idx| {
                let labels = PANEL_LABELS
                    .iter()
                    .find(|l| basis_index(**l) == idx)
                    .expect("every index has labels");
                point.table.get(
                    si,
                    sf,
                    &[0, labels[0].index(), labels[1].index(), labels[2].index()],
                )
            });
            for i in 0..8 {
                for j in 0..8 {
                    m[(i, j)] += amps[i] * amps[j].conj();
                }
            }
        }
    }
    let tr = m.trace().re;
    if !(tr > 0.0) || !tr.is_finite() {
        return Err(Error::VanishingAmplitudes);
    }
    DensityMatrix::new(m / Complex64::new(tr, 0.0))
}

/// Witness `W` with its decompositions `W = P_s + Q_s^{T_s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub w: Matrix8,
    pub p: [Matrix8; 3],
    pub q: [Matrix8; 3],
}

impl Witness {
    /// Largest Frobenius norm of `W - P_s - Q_s^{T_s}` over bipartitions.
    pub fn decomposition_residual(&self) -> f64 {
        Bipartition::ALL
            .iter()
            .enumerate()
            .map(|(k, &s)| (self.w - self.p[k] - partial_transpose(&self.q[k], s)).norm())
            .fold(0.0, f64::max)
    }

    /// Magnitude of the most negative eigenvalue among
    /// `P_s, Q_s, I-P_s, I-Q_s`; 0 when all bounds hold.
    pub fn bound_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in self.p.iter().chain(&self.q) {
            let e = hermitian_eigenvalues(m);
            worst = worst.min(e[0]).min(1.0 - e[7]);
        }
        (-worst).max(0.0)
    }
}

/// Outcome of the witness optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct TauResult {
    pub tau: f64,
    /// `tr(Wρ)` of the returned witness.
    pub objective: f64,
    pub witness: Witness,
    pub solver: SolverKind,
    pub iterations: usize,
    /// Splitting: `‖X - Z‖`. Interior point: affine residual of the iterate.
    pub primal_residual: f64,
    /// Splitting: `σ‖Z - Z_prev‖`. Interior point: duality-gap bound `m/t`.
    pub dual_residual: f64,
    /// Post-hoc `max_s ‖W - P_s - Q_s^{T_s}‖`.
    pub decomposition_residual: f64,
    /// Post-hoc largest eigenvalue-bound violation.
    pub bound_violation: f64,
}

/// Algorithm used for the witness optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    /// Log-barrier Newton path following; iterates stay strictly feasible.
    InteriorPoint,
    /// Relaxed ADMM over the box-constrained blocks with an exact affine
    /// projection.
    Splitting,
}

/// Solver settings for [`gme_tau_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub kind: SolverKind,
    /// Stopping tolerance: duality-gap bound (interior point) or
    /// primal/dual residuals (splitting).
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Splitting only: over-relaxation parameter in (0, 2).
    pub relaxation: f64,
    /// Splitting only: initial penalty parameter.
    pub initial_penalty: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            kind: SolverKind::InteriorPoint,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            relaxation: 1.6,
            initial_penalty: 1.0,
        }
    }
}

/// Raw solver output before verification.
struct SolverOutput {
    witness: Witness,
    iterations: usize,
    primal_residual: f64,
    dual_residual: f64,
}

/// τ with the default solver settings and the given tolerance.
pub fn gme_tau(rho: &DensityMatrix, tolerance: f64) -> Result<TauResult> {
    gme_tau_with(
        rho,
        &SolverSettings {
            tolerance,
            ..SolverSettings::default()
        },
    )
}

/// Minimizes `tr(Wρ)` over fully decomposable witnesses and re-verifies
/// the returned witness by eigendecomposition.
pub fn gme_tau_with(rho: &DensityMatrix, settings: &SolverSettings) -> Result<TauResult> {
    if !(settings.tolerance > 0.0) || !(settings.relaxation > 0.0 && settings.relaxation < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid solver settings {settings:?}"
        )));
    }
    let rho = hermitize(rho.matrix());
    let out = match settings.kind {
        SolverKind::InteriorPoint => interior::solve(&rho, settings)?,
        SolverKind::Splitting => splitting::solve(&rho, settings)?,
    };
    let objective = trace_product(&out.witness.w, &rho);
    let decomposition_residual = out.witness.decomposition_residual();
    let bound_violation = out.witness.bound_violation();
    if decomposition_residual > 10.0 * settings.tolerance || bound_violation > settings.tolerance {
        return Err(Error::NonConvergence {
            iterations: out.iterations,
            primal: decomposition_residual,
            dual: bound_violation,
        });
    }
    Ok(TauResult {
        tau: (-objective).max(0.0),
        objective,
        witness: out.witness,
        solver: settings.kind,
        iterations: out.iterations,
        primal_residual: out.primal_residual,
        dual_residual: out.dual_residual,
        decomposition_residual,
        bound_violation,
    })
}

/// τ over an `(ω₁, ω₂)` grid at fixed directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauCell {
    pub omega1: f64,
    pub omega2: f64,
    pub tau: f64,
    /// True where the point is unphysical or a photon is below threshold;
    /// `tau` is then 0.
    pub masked: bool,
}

/// Evaluates τ on the Cartesian product of `omega1` × `omega2`
/// (row-major, `omega2` fastest). Cells with `σ5 = 0` are masked.
pub fn tau_grid(
    setup: &CollisionSetup,
    directions: &[Direction; 3],
    omega1: &[f64],
    omega2: &[f64],
    beam: BeamPolarization,
    threshold: f64,
    settings: &SolverSettings,
) -> Result<Vec<TauCell>> {
    let beam_vec = [beam.vector(setup)?];
    let cells: Vec<(f64, f64)> = omega1
        .iter()
        .flat_map(|&a| omega2.iter().map(move |&b| (a, b)))
        .collect();
    cells
        .par_iter()
        .map(|&(w1, w2)| {
            let live = resolve(setup, directions, &[w1, w2], &beam_vec, threshold)?.is_some();
            if !live {
                return Ok(TauCell {
                    omega1: w1,
                    omega2: w2,
                    tau: 0.0,
                    masked: true,
                });
            }
            let rho = density_from_amplitudes(setup, directions, w1, w2, beam)?;
            let tau = gme_tau_with(&rho, settings)?.tau;
            Ok(TauCell {
                omega1: w1,
                omega2: w2,
                tau,
                masked: false,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn partial_transpose_of_identity_and_involution() {
        let id = DensityMatrix::maximally_mixed();
        let rho = DensityMatrix::w_state();
        for s in Bipartition::ALL {
            assert_eq!(id.partial_transpose(s), *id.matrix());
            let twice = partial_transpose(&rho.partial_transpose(s), s);
            assert_eq!(twice, *rho.matrix());
        }
    }

    #[test]
    fn ghz_partial_transpose_spectrum() {
        let ghz = DensityMatrix::ghz();
        for s in Bipartition::ALL {
            let e = hermitian_eigenvalues(&ghz.partial_transpose(s));
            assert!((e[0] + 0.5).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn partial_transpose_moves_the_right_index() {
        // |1⟩⟨2| on photon one with identity elsewhere: element (4, 0) ↔ (0, 4).
        let mut m = Matrix8::zeros();
        m[(4, 0)] = c(1.0);
        let t = partial_transpose(&m, Bipartition::First);
        assert_eq!(t[(0, 4)], c(1.0));
        assert_eq!(partial_transpose(&m, Bipartition::Third), m);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let mut m = *DensityMatrix::ghz().matrix();
        m[(0, 7)] += c(0.1);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(Matrix8::identity()).is_err());
        let mut neg = Matrix8::zeros();
        neg[(0, 0)] = c(1.5);
        neg[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(neg).is_err());
    }

    #[test]
    fn text_round_trip() {
        let rho =
            DensityMatrix::mix(0.3, &DensityMatrix::w_state(), &DensityMatrix::ghz()).unwrap();
        let text = rho.to_text();
        let back = DensityMatrix::from_text(&text).unwrap();
        assert_eq!(back, rho);
        assert_eq!(back.to_text(), text);
        assert!(DensityMatrix::from_text("1 0\n").is_err());
    }

    #[test]
    fn ghz_tau_is_one_half() {
        let r = gme_tau(&DensityMatrix::ghz(), DEFAULT_TOLERANCE).unwrap();
        assert!((r.tau - 0.5).abs() < 1e-4, "{}", r.tau);
        assert!(r.decomposition_residual <= 1e-6 && r.bound_violation <= 1e-6);
    }

    #[test]
    fn product_state_has_no_tau() {
        let r = gme_tau(
            &DensityMatrix::basis_state([Pol::First; 3]),
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert!(r.tau <= 1e-6, "{}", r.tau);
    }
}
