"""Independent SDP oracle for the genuine tripartite negativity of the W state.

Solves   min tr(W rho)
         s.t. W = P_s + T_s(Q_s),  0 <= P_s <= I,  0 <= Q_s <= I   for s = 1, 2, 3
with an interior-point conic solver (cvxpy + Clarabel). The printed value
of tau = -min is archived in tests/acceptance.rs.

Basis ordering |l1 l2 l3> with l3 fastest.
"""

import cvxpy as cp
import numpy as np


def partial_transpose(m, qubit):
    """Transpose the indices of one qubit (0, 1 or 2) of an 8x8 expression."""
    bit = 4 >> qubit
    rows = []
    for i in range(8):
        row = []
        for j in range(8):
            bi, bj = i & bit, j & bit
            row.append(m[(i & ~bit) | bj, (j & ~bit) | bi])
        rows.append(row)
    return cp.bmat([[cp.reshape(e, (1, 1), order="C") for e in r] for r in rows])


def tau(rho):
    eye = np.eye(8)
    w = cp.Variable((8, 8), hermitian=True)
    cons = []
    for s in range(3):
        p = cp.Variable((8, 8), hermitian=True)
        q = cp.Variable((8, 8), hermitian=True)
        cons += [p >> 0, eye - p >> 0, q >> 0, eye - q >> 0]
        cons += [w == p + partial_transpose(q, s)]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(w @ rho))), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-9, tol_gap_rel=1e-9, tol_feas=1e-9)
    return max(0.0, -prob.value)


def pure(indices):
    psi = np.zeros(8)
    psi[indices] = 1.0
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi)


if __name__ == "__main__":
    print(f"ghz {tau(pure([0, 7])):.10f}")
    print(f"w {tau(pure([1, 2, 4])):.10f}")
