//! Relaxed ADMM for the witness program. The six blocks `(P_s, Q_s)` are
//! projected onto `{0 ≼ X ≼ I}` by eigenvalue clipping; the coupling
//! `P_s + Q_s^{T_s} = W` is enforced by an exact affine projection.

use num_complex::Complex64;

use super::{
    hermitize, partial_transpose, project_box, Bipartition, Matrix8, SolverOutput, SolverSettings,
    Witness,
};
use crate::error::{Error, Result};

/// Penalty adaptation: interval in iterations, tolerated residual ratio,
/// and largest single rescaling step.
const ADAPT_INTERVAL: usize = 10;
const ADAPT_RATIO: f64 = 5.0;
const ADAPT_MAX_STEP: f64 = 10.0;

/// Projection onto `{P_s + Q_s^{T_s}` equal for all `s}`: the common value
/// is the mean, and each block pair absorbs half of its residual.
fn project_affine(blocks: &mut [Matrix8; 6]) {
    let sums: [Matrix8; 3] =
        std::array::from_fn(|k| blocks[k] + partial_transpose(&blocks[k + 3], Bipartition::ALL[k]));
    let w = (sums[0] + sums[1] + sums[2]) / Complex64::new(3.0, 0.0);
    for k in 0..3 {
        let half = (w - sums[k]) * Complex64::new(0.5, 0.0);
        blocks[k] += half;
        blocks[k + 3] += partial_transpose(&half, Bipartition::ALL[k]);
    }
}

fn witness_from_blocks(blocks: &[Matrix8; 6]) -> Witness {
    let sums: [Matrix8; 3] =
        std::array::from_fn(|k| blocks[k] + partial_transpose(&blocks[k + 3], Bipartition::ALL[k]));
    Witness {
        w: (sums[0] + sums[1] + sums[2]) / Complex64::new(3.0, 0.0),
        p: [blocks[0], blocks[1], blocks[2]],
        q: [blocks[3], blocks[4], blocks[5]],
    }
}

pub(super) fn solve(rho: &Matrix8, settings: &SolverSettings) -> Result<SolverOutput> {
    let third = Complex64::new(1.0 / 3.0, 0.0);
    // Objective gradient: tr(Wρ) = Σ_s [tr(P_s ρ) + tr(Q_s ρ^{T_s})]/3 on the affine set.
    let cost: [Matrix8; 6] = std::array::from_fn(|k| {
        if k < 3 {
            *rho * third
        } else {
            partial_transpose(rho, Bipartition::ALL[k - 3]) * third
        }
    });

    let tol = settings.tolerance;
    let alpha = settings.relaxation;
    let mut sigma = settings.initial_penalty;
    let mut x = [Matrix8::zeros(); 6];
    let mut z = [Matrix8::zeros(); 6];
    let mut u = [Matrix8::zeros(); 6];
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);

    for iter in 1..=settings.max_iterations {
        for k in 0..6 {
            x[k] = project_box(&hermitize(
                &(z[k] - u[k] - cost[k] / Complex64::new(sigma, 0.0)),
            ));
        }
        let relaxed: [Matrix8; 6] = std::array::from_fn(|k| {
            x[k] * Complex64::new(alpha, 0.0) + z[k] * Complex64::new(1.0 - alpha, 0.0)
        });
        let z_old = z;
        let mut v: [Matrix8; 6] = std::array::from_fn(|k| relaxed[k] + u[k]);
        project_affine(&mut v);
        z = v;
        let (mut p2, mut d2) = (0.0, 0.0);
        for k in 0..6 {
            u[k] += relaxed[k] - z[k];
            p2 += (x[k] - z[k]).norm_squared();
            d2 += (z[k] - z_old[k]).norm_squared();
        }
        primal = p2.sqrt();
        dual = sigma * d2.sqrt();

        if primal <= tol && dual <= tol {
            return Ok(SolverOutput {
                witness: witness_from_blocks(&x),
                iterations: iter,
                primal_residual: primal,
                dual_residual: dual,
            });
        }

        // Penalty adaptation: rescale σ towards balanced residuals.
        if iter % ADAPT_INTERVAL == 0 && primal > 0.0 && dual > 0.0 {
            let ratio = primal / dual;
            if !(1.0 / ADAPT_RATIO..=ADAPT_RATIO).contains(&ratio) {
                let scale = ratio.sqrt().clamp(1.0 / ADAPT_MAX_STEP, ADAPT_MAX_STEP);
                sigma *= scale;
                for m in &mut u {
                    *m /= Complex64::new(scale, 0.0);
                }
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: settings.max_iterations,
        primal,
        dual,
    })
}
