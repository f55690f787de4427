//! Log-barrier path following for the witness program.
//!
//! The unknowns are `W` and `P_s` (s = 1..3), each a Hermitian 8×8 matrix
//! written in an orthonormal real basis (64 coordinates), and
//! `Q_s = (W - P_s)^{T_s}` so that every decomposition holds exactly. The
//! twelve constraints `P_s, I - P_s, Q_s, I - Q_s ≻ 0` enter through
//! `-log det`, and Newton steps are taken on `t·tr(Wρ) - Σ log det F` for
//! an increasing sequence of `t`. Iterates stay strictly feasible, and the
//! final duality gap is bounded by `m/t` with `m = 96`.

use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use super::{partial_transpose, Bipartition, Matrix8, SolverOutput, SolverSettings, Witness};
use crate::error::{Error, Result};

/// Real dimension of the Hermitian 8×8 matrices.
const DIM: usize = 64;
/// `W` plus three `P_s`.
const VARS: usize = 4 * DIM;
/// Barrier parameter: twelve 8×8 blocks.
const BARRIER_DEGREE: f64 = 96.0;
/// Growth factor of `t` between centering phases.
const T_GROWTH: f64 = 16.0;
/// Centering stops when the squared Newton decrement falls below this.
const CENTERING_DECREMENT: f64 = 1e-10;
/// Armijo sufficient-decrease parameter and backtracking factor.
const ARMIJO: f64 = 0.25;
const BACKTRACK: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;

/// Sparse entries `(row, col, coefficient)` of one basis matrix.
type BasisMatrix = Vec<(usize, usize, Complex64)>;

/// Orthonormal basis under `⟨A, B⟩ = tr(AB)`: `E_jj`, then for `j < k`
/// `(E_jk + E_kj)/√2` and `i(E_jk - E_kj)/√2`.
fn basis() -> &'static [BasisMatrix] {
    static BASIS: OnceLock<Vec<BasisMatrix>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut out: Vec<BasisMatrix> = (0..8)
            .map(|j| vec![(j, j, Complex64::new(1.0, 0.0))])
            .collect();
        for j in 0..8 {
            for k in j + 1..8 {
                out.push(vec![
                    (j, k, Complex64::new(h, 0.0)),
                    (k, j, Complex64::new(h, 0.0)),
                ]);
                out.push(vec![
                    (j, k, Complex64::new(0.0, h)),
                    (k, j, Complex64::new(0.0, -h)),
                ]);
            }
        }
        out
    })
}

fn coords(m: &Matrix8) -> [f64; DIM] {
    let s = std::f64::consts::SQRT_2;
    let mut out = [0.0; DIM];
    for j in 0..8 {
        out[j] = m[(j, j)].re;
    }
    let mut a = 8;
    for j in 0..8 {
        for k in j + 1..8 {
            out[a] = s * m[(j, k)].re;
            out[a + 1] = s * m[(j, k)].im;
            a += 2;
        }
    }
    out
}

fn from_coords(x: &[f64]) -> Matrix8 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Matrix8::zeros();
    for j in 0..8 {
        m[(j, j)] = Complex64::new(x[j], 0.0);
    }
    let mut a = 8;
    for j in 0..8 {
        for k in j + 1..8 {
            let z = Complex64::new(h * x[a], h * x[a + 1]);
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
            a += 2;
        }
    }
    m
}

/// Position of entry `(i, j)` after transposing the photon of `s`.
fn transposed_position(i: usize, j: usize, s: Bipartition) -> (usize, usize) {
    let t = partial_transpose_bit(s);
    ((i & !t) | (j & t), (j & !t) | (i & t))
}

fn partial_transpose_bit(s: Bipartition) -> usize {
    match s {
        Bipartition::First => 4,
        Bipartition::Second => 2,
        Bipartition::Third => 1,
    }
}

/// `K_ab = tr(A_a G A_b G)` where `A_a` is basis matrix `a`, optionally
/// partially transposed on `s`.
fn hessian_block(g: &Matrix8, transpose: Option<Bipartition>) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(DIM, DIM);
    for (b, entries) in basis().iter().enumerate() {
        let mut z = Matrix8::zeros();
        for &(p, q, c) in entries {
            let (p, q) = match transpose {
                Some(s) => transposed_position(p, q, s),
                None => (p, q),
            };
            for i in 0..8 {
                let left = g[(i, p)] * c;
                for j in 0..8 {
                    z[(i, j)] += left * g[(q, j)];
                }
            }
        }
        let col = match transpose {
            Some(s) => coords(&partial_transpose(&z, s)),
            None => coords(&z),
        };
        for a in 0..DIM {
            k[(a, b)] = col[a];
        }
    }
    k
}

/// Current iterate decoded into matrices.
struct Iterate {
    w: Matrix8,
    p: [Matrix8; 3],
}

impl Iterate {
    fn new(x: &DVector<f64>) -> Self {
        Iterate {
            w: from_coords(&x.as_slice()[..DIM]),
            p: std::array::from_fn(|s| from_coords(&x.as_slice()[DIM * (s + 1)..DIM * (s + 2)])),
        }
    }

    fn q(&self, s: usize) -> Matrix8 {
        partial_transpose(&(self.w - self.p[s]), Bipartition::ALL[s])
    }

    /// The twelve barrier blocks `[P, I-P, Q, I-Q]` per bipartition.
    fn blocks(&self) -> [[Matrix8; 4]; 3] {
        let id = Matrix8::identity();
        std::array::from_fn(|s| {
            let q = self.q(s);
            [self.p[s], id - self.p[s], q, id - q]
        })
    }
}

/// `-log det F` by a pivot-checked Cholesky factorization, or `None` if
/// `F` is not positive definite. (The generic complex factorization takes
/// complex square roots and does not reject indefinite input.)
fn neg_log_det(f: &Matrix8) -> Option<f64> {
    let mut l = [[Complex64::new(0.0, 0.0); 8]; 8];
    let mut total = 0.0;
    for j in 0..8 {
        let mut d = f[(j, j)].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let ljj = d.sqrt();
        l[j][j] = Complex64::new(ljj, 0.0);
        total -= 2.0 * ljj.ln();
        for i in j + 1..8 {
            let mut v = f[(i, j)];
            for k in 0..j {
                v -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = v / ljj;
        }
    }
    Some(total)
}

/// `-Σ log det F` over all blocks, or `None` if any block is not positive
/// definite.
fn barrier(blocks: &[[Matrix8; 4]; 3]) -> Option<f64> {
    blocks.iter().flatten().map(neg_log_det).sum()
}

fn objective(rho_coords: &[f64; DIM], x: &DVector<f64>) -> f64 {
    rho_coords.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
}

fn inverse(f: &Matrix8) -> Matrix8 {
    Cholesky::new(*f)
        .expect("block checked positive definite")
        .inverse()
}

/// Gradient and Newton direction of `t·tr(Wρ) - Σ log det F` at `x`.
fn newton_step(
    x: &DVector<f64>,
    t: f64,
    rho_coords: &[f64; DIM],
) -> Result<(DVector<f64>, DVector<f64>)> {
    let it = Iterate::new(x);
    let blocks = it.blocks();
    let mut grad = DVector::zeros(VARS);
    for a in 0..DIM {
        grad[a] = t * rho_coords[a];
    }
    // Hessian in block-arrow form: with K_P, K_Q the barrier curvatures of the
    // P and Q blocks of bipartition s, the (W,W), (W,P_s) and (P_s,P_s)
    // blocks are Σ K_Q, -K_Q and K_P + K_Q.
    let mut curvatures = Vec::with_capacity(3);
    for (s, f) in blocks.iter().enumerate() {
        let bip = Bipartition::ALL[s];
        let g: [Matrix8; 4] = std::array::from_fn(|k| inverse(&f[k]));
        let off = DIM * (s + 1);
        // d(-log det F) = -tr(G dF).
        let gp = coords(&(g[1] - g[0]));
        let gq = coords(&partial_transpose(&(g[3] - g[2]), bip));
        for a in 0..DIM {
            grad[off + a] += gp[a] - gq[a];
            grad[a] += gq[a];
        }
        let kp = hessian_block(&g[0], None) + hessian_block(&g[1], None);
        let kq = hessian_block(&g[2], Some(bip)) + hessian_block(&g[3], Some(bip));
        curvatures.push((kp, kq));
    }

    // Eliminating P_s leaves the Schur complement Σ K_Q - K_Q (K_P+K_Q)⁻¹ K_Q,
    // assembled as the parallel sum K_Q (K_P+K_Q)⁻¹ K_P to avoid cancellation.
    let mut schur = DMatrix::zeros(DIM, DIM);
    let mut rhs_w = -grad.rows(0, DIM).clone_owned();
    let mut factors = Vec::with_capacity(3);
    for (s, (kp, kq)) in curvatures.iter().enumerate() {
        let d = SpdSolver::new(kp + kq).ok_or_else(|| singular(s))?;
        let dinv_kp = d.solve(kp);
        let dinv_kq = d.solve(kq);
        let dinv_r = d.solve(&(-grad.rows(DIM * (s + 1), DIM).clone_owned()));
        let parallel = kq * &dinv_kp;
        schur += (&parallel + parallel.transpose()) * 0.5;
        // The (W,P_s) block is -K_Q.
        rhs_w += kq * &dinv_r;
        factors.push((dinv_kq, dinv_r));
    }
    let dw = SpdSolver::new(schur)
        .ok_or_else(|| singular(3))?
        .solve(&rhs_w);
    let mut step = DVector::zeros(VARS);
    step.rows_mut(0, DIM).copy_from(&dw);
    for (s, (dinv_kq, dinv_r)) in factors.iter().enumerate() {
        // K_P+K_Q times dP_s = -g_P + K_Q dW.
        let dp = dinv_r + dinv_kq * &dw;
        step.rows_mut(DIM * (s + 1), DIM).copy_from(&dp);
    }
    Ok((grad, step))
}

/// Cholesky solve with a pivoted LU fallback: late in the path the
/// curvature matrices grow ill-conditioned (condition ~ t²) and the
/// factorization may lose definiteness to rounding.
enum SpdSolver {
    Cholesky(Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SpdSolver {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        match Cholesky::new(m.clone()) {
            Some(c) => Some(SpdSolver::Cholesky(c)),
            None => {
                let lu = m.lu();
                lu.is_invertible().then_some(SpdSolver::Lu(lu))
            }
        }
    }

    fn solve<C: nalgebra::Dim, S: nalgebra::storage::Storage<f64, nalgebra::Dyn, C>>(
        &self,
        b: &nalgebra::Matrix<f64, nalgebra::Dyn, C, S>,
    ) -> nalgebra::OMatrix<f64, nalgebra::Dyn, C>
    where
        nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<nalgebra::Dyn, C>,
    {
        match self {
            SpdSolver::Cholesky(c) => c.solve(b),
            SpdSolver::Lu(lu) => lu.solve(b).expect("checked invertible"),
        }
    }
}

fn singular(block: usize) -> Error {
    Error::NonConvergence {
        iterations: 0,
        primal: f64::NAN,
        dual: block as f64,
    }
}

pub(super) fn solve(rho: &Matrix8, settings: &SolverSettings) -> Result<SolverOutput> {
    let rho_coords = coords(rho);
    let merit = |x: &DVector<f64>, t: f64| -> Option<f64> {
        barrier(&Iterate::new(x).blocks()).map(|b| t * objective(&rho_coords, x) + b)
    };

    // Strictly feasible centre: W = I/2, P_s = I/4 (so Q_s = I/4).
    let mut x = DVector::zeros(VARS);
    for j in 0..8 {
        x[j] = 0.5;
        for s in 0..3 {
            x[DIM * (s + 1) + j] = 0.25;
        }
    }

    let mut t = 1.0;
    let mut iterations = 0;
    loop {
        // Centering by damped Newton.
        loop {
            if iterations >= settings.max_iterations {
                return Err(Error::NonConvergence {
                    iterations,
                    primal: 0.0,
                    dual: BARRIER_DEGREE / t,
                });
            }
            iterations += 1;
            let (grad, dx) = newton_step(&x, t, &rho_coords).map_err(|e| match e {
                Error::NonConvergence { primal, dual, .. } => Error::NonConvergence {
                    iterations,
                    primal,
                    dual,
                },
                other => other,
            })?;
            let slope = grad.dot(&dx);
            if -slope <= CENTERING_DECREMENT {
                break;
            }
            let current = merit(&x, t).expect("iterate is strictly feasible");
            let mut step = 1.0;
            let mut decreased = false;
            loop {
                let trial = &x + &dx * step;
                if let Some(v) = merit(&trial, t) {
                    if v <= current + ARMIJO * step * slope {
                        decreased = v < current;
                        x = trial;
                        break;
                    }
                }
                step *= BACKTRACK;
                if step < MIN_STEP {
                    break;
                }
            }
            if step < MIN_STEP || !decreased {
                // The merit no longer decreases in floating point: centred
                // as well as this t allows.
                break;
            }
        }
        if BARRIER_DEGREE / t <= settings.tolerance {
            break;
        }
        t *= T_GROWTH;
    }

    let it = Iterate::new(&x);
    let q = std::array::from_fn(|s| it.q(s));
    Ok(SolverOutput {
        witness: Witness {
            w: it.w,
            p: it.p,
            q,
        },
        iterations,
        primal_residual: 0.0,
        dual_residual: BARRIER_DEGREE / t,
    })
}
