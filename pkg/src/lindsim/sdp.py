"""A small dense primal-dual interior-point solver for Hermitian SDPs.

Solves block-diagonal semidefinite programs in standard form,

    (P)  minimize    sum_b <C_b, X_b>
         subject to  sum_b tr(A_{i,b} X_b) = v_i   (i = 1..m),   X_b >= 0

    (D)  maximize    v . y
         subject to  C_b - sum_i y_i A_{i,b} = S_b >= 0,

over complex Hermitian blocks, with <A, B> = tr(A B).  The implementation is
an infeasible-start path-following method with the HKM search direction and a
Mehrotra predictor-corrector step.  It is meant for the small dense problems
this package produces (block sides <= ~128, a few hundred constraints), not
as a general-purpose solver.

On success both the primal and dual objectives are reported; their distance
is the duality gap that certifies the returned value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = ["SdpConvergenceError", "SdpProblem", "SdpSolution", "solve_sdp"]


class SdpConvergenceError(RuntimeError):
    """Solver failed to converge; carries the final duality gap."""

    def __init__(self, message: str, gap: float):
        super().__init__(f"{message} (duality gap {gap:.3e})")
        self.gap = gap


@dataclass
class SdpProblem:
    """Problem data.

    ``constraints[b]`` has shape (m, n_b, n_b): the b-th block of every
    constraint matrix.  ``objective[b]`` is the (n_b, n_b) block of C and
    ``rhs`` the length-m vector v.  All constraint/objective blocks must be
    Hermitian and the rhs real.
    """

    block_sizes: list
    constraints: list
    objective: list
    rhs: np.ndarray


@dataclass
class SdpSolution:
    value: float
    primal_objective: float
    dual_objective: float
    gap: float
    iterations: int
    primal_blocks: list
    dual_y: np.ndarray
    primal_residual: float
    dual_residual: float


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with x + alpha*dx >= 0, for Hermitian PD x."""
    try:
        chol = np.linalg.cholesky(x)
        z = scipy.linalg.solve_triangular(chol, dx, lower=True)
        y = scipy.linalg.solve_triangular(chol, z.conj().T, lower=True).conj().T
        lam = float(np.min(np.linalg.eigvalsh(_sym(y))))
    except np.linalg.LinAlgError:
        lam = float(np.min(scipy.linalg.eigh(_sym(dx), _sym(x), eigvals_only=True)))
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _chol_solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Cholesky solve with a jitter ladder, falling back to least squares."""
    n = mat.shape[0]
    jitter = 0.0
    scale = max(1.0, float(np.max(np.abs(mat))))
    for _ in range(8):
        try:
            cf = scipy.linalg.cho_factor(mat + jitter * np.eye(n), lower=True)
            return scipy.linalg.cho_solve(cf, rhs)
        except np.linalg.LinAlgError:
            jitter = max(jitter * 100.0, 1e-14 * scale)
    return np.linalg.lstsq(mat, rhs, rcond=None)[0]


def solve_sdp(
    problem: SdpProblem,
    *,
    gap_tol: float = 1e-10,
    feas_tol: float = 1e-9,
    max_iters: int = 500,
    step_fraction: float = 0.98,
) -> SdpSolution:
    sizes = [int(n) for n in problem.block_sizes]
    nblocks = len(sizes)
    a_stacks = [np.asarray(problem.constraints[b], dtype=complex) for b in range(nblocks)]
    c_blocks = [np.asarray(problem.objective[b], dtype=complex) for b in range(nblocks)]
    v = np.asarray(problem.rhs, dtype=float)
    m = v.size
    a_flat = [a_stacks[b].reshape(m, -1) for b in range(nblocks)]
    n_total = sum(sizes)

    def apply_a(blocks):
        out = np.zeros(m)
        for b in range(nblocks):
            out += (a_flat[b].conj() @ blocks[b].reshape(-1)).real
        return out

    def apply_at(y):
        return [np.tensordot(y, a_stacks[b], axes=1) for b in range(nblocks)]

    # well-scaled infeasible start on the central ray
    xi_p = max(1.0, float(np.max(np.abs(v))) if m else 1.0)
    xi_d = max(1.0, max(float(np.max(np.abs(c))) if c.size else 0.0 for c in c_blocks))
    x = [xi_p * np.eye(n, dtype=complex) for n in sizes]
    s = [xi_d * np.eye(n, dtype=complex) for n in sizes]
    y = np.zeros(m)

    v_scale = 1.0 + float(np.linalg.norm(v))
    c_scale = 1.0 + float(np.sqrt(sum(np.linalg.norm(c) ** 2 for c in c_blocks)))

    pobj = dobj = 0.0
    gap = np.inf
    rp_norm = rd_norm = np.inf

    for iteration in range(1, max_iters + 1):
        rp = v - apply_a(x)
        at_y = apply_at(y)
        rd = [c_blocks[b] - s[b] - at_y[b] for b in range(nblocks)]
        mu = sum(np.vdot(x[b], s[b]).real for b in range(nblocks)) / n_total

        pobj = sum(np.vdot(c_blocks[b], x[b]).real for b in range(nblocks))
        dobj = float(v @ y)
        gap = abs(pobj - dobj)
        rp_norm = float(np.linalg.norm(rp)) / v_scale
        rd_norm = float(np.sqrt(sum(np.linalg.norm(r) ** 2 for r in rd))) / c_scale

        if gap <= gap_tol and mu * n_total <= gap_tol and rp_norm <= feas_tol and rd_norm <= feas_tol:
            return SdpSolution(
                value=0.5 * (pobj + dobj),
                primal_objective=pobj,
                dual_objective=dobj,
                gap=gap,
                iterations=iteration - 1,
                primal_blocks=x,
                dual_y=y,
                primal_residual=rp_norm,
                dual_residual=rd_norm,
            )

        s_inv = []
        for b in range(nblocks):
            try:
                chol = np.linalg.cholesky(s[b])
                inv_l = scipy.linalg.solve_triangular(chol, np.eye(sizes[b], dtype=complex), lower=True)
                s_inv.append(_sym(inv_l.conj().T @ inv_l))
            except np.linalg.LinAlgError:
                s_inv.append(_sym(np.linalg.pinv(s[b])))

        # Schur complement M_ij = Re tr(A_i X A_j S^{-1}), shared by both passes
        schur = np.zeros((m, m))
        for b in range(nblocks):
            t = np.matmul(np.matmul(x[b][None, :, :], a_stacks[b]), s_inv[b][None, :, :])
            schur += (a_flat[b].conj() @ t.reshape(m, -1).T).real
        schur = (schur + schur.T) / 2

        def newton(sigma_mu, corr):
            g = []
            for b in range(nblocks):
                gb = -x[b] - x[b] @ rd[b] @ s_inv[b]
                if sigma_mu > 0.0:
                    gb = gb + sigma_mu * s_inv[b]
                if corr is not None:
                    gb = gb - corr[b] @ s_inv[b]
                g.append(gb)
            rhs = rp - apply_a([_sym(gb) for gb in g])
            dy = _chol_solve(schur, rhs)
            at_dy = apply_at(dy)
            ds = [rd[b] - at_dy[b] for b in range(nblocks)]
            dx = [_sym(g[b] + x[b] @ at_dy[b] @ s_inv[b]) for b in range(nblocks)]
            return dx, dy, ds

        # predictor
        dx_aff, dy_aff, ds_aff = newton(0.0, None)
        ap_aff = min(1.0, min(_max_step(x[b], dx_aff[b]) for b in range(nblocks)))
        ad_aff = min(1.0, min(_max_step(s[b], ds_aff[b]) for b in range(nblocks)))
        mu_aff = sum(
            np.vdot(x[b] + ap_aff * dx_aff[b], s[b] + ad_aff * ds_aff[b]).real
            for b in range(nblocks)
        ) / n_total
        sigma = min(1.0, max(1e-12, (max(mu_aff, 0.0) / mu) ** 3))

        # corrector
        corr = [dx_aff[b] @ ds_aff[b] for b in range(nblocks)]
        dx, dy, ds = newton(sigma * mu, corr)

        alpha_p = min(1.0, step_fraction * min(_max_step(x[b], dx[b]) for b in range(nblocks)))
        alpha_d = min(1.0, step_fraction * min(_max_step(s[b], ds[b]) for b in range(nblocks)))
        if max(alpha_p, alpha_d) < 1e-12:
            raise SdpConvergenceError("interior-point step collapsed", gap)

        for b in range(nblocks):
            x[b] = _sym(x[b] + alpha_p * dx[b])
            s[b] = _sym(s[b] + alpha_d * ds[b])
        y = y + alpha_d * dy

    raise SdpConvergenceError(f"no convergence within {max_iters} iterations", gap)
