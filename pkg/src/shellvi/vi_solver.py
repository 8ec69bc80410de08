"""Solvers for bound-constrained SPD quadratic programs (discrete obstacle
variational inequalities).

Two independent iterative methods are provided, plus an enumeration oracle
for desk-scale verification:

- :func:`solve_psor`: projected successive over-relaxation sweeps;
- :func:`solve_active_set`: primal-dual active-set iteration with
  conjugate-gradient inner solves;
- :func:`brute_force_oracle`: exact solution by enumerating all active-set
  candidates (strict convexity makes the feasible minimizer unique).
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretization import ObstacleQP
from .errors import CapabilityError, ParameterError

#: Values in (-TIE_THRESHOLD, 0] are treated as sitting on the bound, which
#: prevents active-set cycling on degenerate instances.
TIE_THRESHOLD = 1e-14

#: Enumeration bound of the brute-force oracle.
ORACLE_MAX_CONSTRAINED = 20

_CG_RTOL = 1e-12


@dataclasses.dataclass
class SolveReport:
    """Outcome of an obstacle-QP solve."""

    x: np.ndarray
    active_set: np.ndarray
    complementarity_residual: float
    energy: float
    iterations: int
    converged: bool
    method: str
    energy_history: list | None = None


def energy_of(qp: ObstacleQP, x: np.ndarray) -> float:
    return float(0.5 * x @ (qp.A @ x) - qp.b @ x)


def complementarity_residual(qp: ObstacleQP, x: np.ndarray) -> float:
    """Residual of the discrete complementarity system.

    Max over constrained DOFs of |min(x_i, (Ax - b)_i)| plus the infinity
    norm of the gradient on unconstrained DOFs; zero exactly at the solution.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != qp.ndof:
        raise ParameterError(f"dimension mismatch: len(x)={x.shape[0]}, ndof={qp.ndof}")
    r = qp.A @ x - qp.b
    mask = np.zeros(qp.ndof, dtype=bool)
    mask[qp.constrained] = True
    res = 0.0
    if mask.any():
        shifted = x[mask] - qp.lower_bounds[mask]
        res += float(np.max(np.abs(np.minimum(shifted, r[mask]))))
    if (~mask).any():
        res += float(np.max(np.abs(r[~mask])))
    return res


def _finalize(qp, x, iterations, converged, method, history=None) -> SolveReport:
    # Snap tie-threshold negatives onto the bound.
    lb = qp.lower_bounds
    snap = (x - lb > -TIE_THRESHOLD) & (x - lb < 0.0)
    x = np.where(snap, lb, x)
    # Active set: bound attained AND the obstacle actually carries load
    # (strictly positive multiplier), i.e. the discrete contact region.
    lam = qp.A @ x - qp.b
    scale = max(1.0, float(np.max(np.abs(qp.b))) if qp.ndof else 1.0)
    at_bound = np.abs(x[qp.constrained] - lb[qp.constrained]) <= 1e-12
    pressing = lam[qp.constrained] > 1e-12 * scale
    active = qp.constrained[at_bound & pressing]
    return SolveReport(
        x=x,
        active_set=active,
        complementarity_residual=complementarity_residual(qp, x),
        energy=energy_of(qp, x),
        iterations=iterations,
        converged=converged,
        method=method,
        energy_history=history,
    )


def _start_point(qp: ObstacleQP, x0) -> np.ndarray:
    if x0 is None:
        x = np.zeros(qp.ndof)
    else:
        x = np.asarray(x0, dtype=float).copy()
    return np.maximum(x, qp.lower_bounds)


def solve_psor(
    qp: ObstacleQP,
    relax: float = 1.5,
    tol: float = 1e-10,
    max_iter: int = 50000,
    x0=None,
) -> SolveReport:
    """Projected SOR sweeps with clamping at the lower bounds.

    Converged when both the successive-iterate infinity-norm change and the
    complementarity residual drop below ``tol`` scaled by max(1, |b|_inf).
    """
    if not 0.0 < relax < 2.0:
        raise ParameterError(f"relaxation factor must lie in (0, 2), got {relax}")
    a = qp.A.tocsr()
    diag = a.diagonal()
    if np.any(diag <= 0.0):
        raise ParameterError("projected SOR requires positive diagonal entries")
    scale = max(1.0, float(np.max(np.abs(qp.b))) if qp.ndof else 1.0)
    x = _start_point(qp, x0)
    if complementarity_residual(qp, x) <= tol * scale:
        return _finalize(qp, x, 0, True, "psor", [energy_of(qp, x)])

    indptr, indices, data = a.indptr, a.indices, a.data
    lb = qp.lower_bounds
    b = qp.b
    history = [energy_of(qp, x)]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        delta = 0.0
        for i in range(qp.ndof):
            row = slice(indptr[i], indptr[i + 1])
            xi_old = x[i]
            residual = b[i] - data[row] @ x[indices[row]]
            xi_new = xi_old + relax * residual / diag[i]
            if xi_new < lb[i]:
                xi_new = lb[i]
            x[i] = xi_new
            delta = max(delta, abs(xi_new - xi_old))
        history.append(energy_of(qp, x))
        if delta <= tol * scale and complementarity_residual(qp, x) <= tol * scale:
            converged = True
            break
    return _finalize(qp, x, sweeps, converged, "psor", history)


def _inner_solve(a_ff: sp.csr_matrix, b_f: np.ndarray) -> np.ndarray:
    """Diagonal-preconditioned CG; falls back to a direct solve if CG stalls."""
    n = b_f.shape[0]
    if n == 0:
        return np.zeros(0)
    diag = a_ff.diagonal()
    m = sp.diags(1.0 / diag)
    x, info = spla.cg(a_ff, b_f, rtol=_CG_RTOL, atol=0.0, maxiter=max(200, 20 * n), M=m)
    if info != 0:
        x = spla.spsolve(a_ff.tocsc(), b_f)
    return x


def solve_active_set(
    qp: ObstacleQP,
    tol: float = 1e-10,
    max_outer: int = 100,
    x0=None,
) -> SolveReport:
    """Primal-dual active-set iteration.

    Alternates an equality solve on the inactive DOFs with an active-set
    update driven by primal infeasibility (x_i below the bound) and dual
    infeasibility (multiplier (Ax - b)_i < 0); terminates when the active set
    repeats or the KKT residual falls below ``tol`` scaled by max(1, |b|_inf).
    """
    a = qp.A.tocsr()
    scale = max(1.0, float(np.max(np.abs(qp.b))) if qp.ndof else 1.0)
    constrained = qp.constrained
    lb = qp.lower_bounds
    if x0 is not None:
        x_seed = np.asarray(x0, dtype=float)
        active = set(int(i) for i in constrained if x_seed[i] - lb[i] <= TIE_THRESHOLD)
    else:
        active = set(int(i) for i in constrained if qp.b[i] <= 0.0)

    x = np.zeros(qp.ndof)
    converged = False
    outer = 0
    for outer in range(1, max_outer + 1):
        free_mask = np.ones(qp.ndof, dtype=bool)
        act = np.array(sorted(active), dtype=int)
        if act.size:
            free_mask[act] = False
        free = np.flatnonzero(free_mask)
        x = np.zeros(qp.ndof)
        if act.size:
            x[act] = lb[act]
        if free.size:
            a_ff = a[free][:, free].tocsr()
            rhs = qp.b[free]
            if act.size:
                rhs = rhs - a[free][:, act] @ lb[act]
            x[free] = _inner_solve(a_ff, rhs)
        lam = a @ x - qp.b
        residual = complementarity_residual(qp, x)
        if residual <= tol * scale:
            converged = True
            break
        drop = {int(i) for i in act if lam[i] < -TIE_THRESHOLD}
        add = {
            int(i)
            for i in constrained
            if free_mask[i] and x[i] - lb[i] < -TIE_THRESHOLD
        }
        new_active = (active - drop) | add
        if new_active == active:
            converged = residual <= tol * scale
            break
        active = new_active
    return _finalize(qp, x, outer, converged, "activeset")


def brute_force_oracle(qp: ObstacleQP) -> SolveReport:
    """Exact solution by enumerating every active-set candidate.

    Solves the equality-constrained system for each of the 2^c candidates,
    keeps those satisfying primal and dual feasibility and returns the one of
    minimal energy.  Limited to c <= 20 constrained DOFs.
    """
    c = len(qp.constrained)
    if c > ORACLE_MAX_CONSTRAINED:
        raise CapabilityError(
            f"oracle enumeration limited to {ORACLE_MAX_CONSTRAINED} constrained DOFs, got {c}"
        )
    a = qp.A.toarray()
    lb = qp.lower_bounds
    best = None
    best_energy = np.inf
    feas_tol = 1e-10
    for mask in range(1 << c):
        act = np.array([qp.constrained[k] for k in range(c) if mask >> k & 1], dtype=int)
        free_mask = np.ones(qp.ndof, dtype=bool)
        if act.size:
            free_mask[act] = False
        free = np.flatnonzero(free_mask)
        x = np.zeros(qp.ndof)
        if act.size:
            x[act] = lb[act]
        if free.size:
            rhs = qp.b[free]
            if act.size:
                rhs = rhs - a[np.ix_(free, act)] @ lb[act]
            try:
                x[free] = np.linalg.solve(a[np.ix_(free, free)], rhs)
            except np.linalg.LinAlgError:
                continue
        if np.any(x[qp.constrained] - lb[qp.constrained] < -feas_tol):
            continue
        lam = a @ x - qp.b
        if act.size and np.any(lam[act] < -feas_tol):
            continue
        e = energy_of(qp, x)
        if e < best_energy:
            best_energy = e
            best = x
    if best is None:
        raise ParameterError("no feasible KKT candidate found; matrix may be singular")
    return _finalize(qp, best, 1 << c, True, "oracle")
