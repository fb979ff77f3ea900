"""Diamond norm of superoperators and the scalar statistics built from it.

The diamond norm of a Hermiticity-preserving map is computed through the
standard semidefinite program on its Choi matrix J:

    minimize    (||Tr_out Z0||_inf + ||Tr_out Z1||_inf) / 2
    subject to  [[Z0, -J], [-J^dag, Z1]] >= 0,   Z0, Z1 >= 0,

solved with the in-repo interior-point method (no external solver).  The
program is encoded in standard form with five PSD blocks: the 2d^2-sided
block matrix, two d-sided slack blocks for the infinity-norm epigraphs and
two 1x1 blocks for the epigraph scalars.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lindblad import GkslGenerator, choi, is_cptp, term_superop
from .linalg import dagger, devectorize, kron, trace_norm, vectorize
from .sdp import SdpConvergenceError, SdpProblem, SdpSolution, solve_sdp
from .tolerances import TOL

__all__ = [
    "GeneratorStats",
    "apply_to_doubled_space",
    "diamond_norm",
    "diamond_norm_solution",
    "generator_stats",
    "power_contraction_check",
    "sampled_diamond_lower_bound",
]


def _herm_basis(d: int) -> list:
    """Orthonormal (trace inner product) basis of d x d Hermitian matrices."""
    basis = []
    for a in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[a, a] = 1.0
        basis.append(e)
    for a in range(d):
        for b in range(a + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[a, b] = e[b, a] = 1.0 / np.sqrt(2)
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[a, b] = 1j / np.sqrt(2)
            e[b, a] = -1j / np.sqrt(2)
            basis.append(e)
    return basis


def _diamond_problem(j: np.ndarray, d: int) -> SdpProblem:
    n = d * d
    big = 2 * n
    basis = _herm_basis(d)
    m = 2 * n * n + 2 * d * d

    a_big = np.zeros((m, big, big), dtype=complex)
    a_h0 = np.zeros((m, d, d), dtype=complex)
    a_h1 = np.zeros((m, d, d), dtype=complex)
    a_m0 = np.zeros((m, 1, 1), dtype=complex)
    a_m1 = np.zeros((m, 1, 1), dtype=complex)
    rhs = np.zeros(m)

    # pin the off-diagonal block of the big matrix to -J
    i = 0
    for p in range(n):
        for q in range(n):
            a_big[i, p, n + q] = 0.5
            a_big[i, n + q, p] = 0.5
            rhs[i] = -j[p, q].real
            i += 1
            a_big[i, p, n + q] = 0.5j
            a_big[i, n + q, p] = -0.5j
            rhs[i] = -j[p, q].imag
            i += 1

    # slack definitions H_x = mu_x * I - Tr_out Z_x, projected on a basis
    eye_d = np.eye(d)
    for r, b_r in enumerate(basis):
        lifted = kron(b_r, eye_d)
        a_big[i, :n, :n] = lifted
        a_h0[i] = b_r
        a_m0[i, 0, 0] = -np.trace(b_r)
        i += 1
        a_big[i, n:, n:] = lifted
        a_h1[i] = b_r
        a_m1[i, 0, 0] = -np.trace(b_r)
        i += 1

    objective = [
        np.zeros((big, big), dtype=complex),
        np.zeros((d, d), dtype=complex),
        np.zeros((d, d), dtype=complex),
        np.array([[0.5]], dtype=complex),
        np.array([[0.5]], dtype=complex),
    ]
    return SdpProblem(
        block_sizes=[big, d, d, 1, 1],
        constraints=[a_big, a_h0, a_h1, a_m0, a_m1],
        objective=objective,
        rhs=rhs,
    )


def diamond_norm_solution(superop: np.ndarray) -> SdpSolution:
    """Solve the diamond-norm SDP and return the full certificate."""
    s = np.asarray(superop, dtype=complex)
    d = int(round(np.sqrt(s.shape[0])))
    if s.shape != (d * d, d * d):
        raise ValueError(f"superoperator shape {s.shape} is not a square of squares")
    j = choi(s, d)
    herm_dev = float(np.max(np.abs(j - dagger(j))))
    if herm_dev > TOL.herm_preserving_tol:
        raise ValueError(
            "superoperator is not Hermiticity-preserving "
            f"(Choi hermiticity deviation {herm_dev:.3e})"
        )

    # homogeneity: solve at unit scale, rescale value and gap afterwards;
    # the gap tolerance shrinks with the scale so the rescaled gap stays an
    # order of magnitude inside the acceptance threshold
    scale = max(1.0, float(np.linalg.norm(j)))
    gap_tol = min(1e-9, TOL.sdp_gap_tol / (10.0 * scale))
    problem = _diamond_problem(j / scale, d)
    sol = solve_sdp(problem, gap_tol=gap_tol, feas_tol=1e-9, max_iters=TOL.sdp_max_iters)
    sol.value *= scale
    sol.primal_objective *= scale
    sol.dual_objective *= scale
    sol.gap *= scale
    if sol.gap > TOL.sdp_gap_tol:
        raise SdpConvergenceError("diamond-norm solve left an oversized duality gap", sol.gap)
    return sol


def diamond_norm(superop: np.ndarray) -> float:
    """||.||_diamond of a Hermiticity-preserving superoperator (abs err <= 1e-6)."""
    return float(diamond_norm_solution(superop).value)


def apply_to_doubled_space(superop: np.ndarray, operator: np.ndarray) -> np.ndarray:
    """(Phi (x) id)(A) for A on the doubled space C^d (x) C^d."""
    s = np.asarray(superop, dtype=complex)
    d = int(round(np.sqrt(s.shape[0])))
    a = np.asarray(operator, dtype=complex).reshape(d, d, d, d)
    out = np.empty_like(a)
    for r in range(d):
        for c in range(d):
            out[:, r, :, c] = devectorize(s @ vectorize(a[:, r, :, c]))
    return out.reshape(d * d, d * d)


def sampled_diamond_lower_bound(
    superop: np.ndarray, n_samples: int = 50, seed: int = 0, pure: bool = True
) -> float:
    """Best primal-feasible value over random unit-trace-norm Hermitian inputs.

    Every sample is a lower bound on the diamond norm; used as an independent
    cross-check of the SDP value.
    """
    s = np.asarray(superop, dtype=complex)
    d = int(round(np.sqrt(s.shape[0])))
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(n_samples):
        if pure:
            psi = rng.normal(size=d * d) + 1j * rng.normal(size=d * d)
            psi /= np.linalg.norm(psi)
            a = np.outer(psi, psi.conj())
        else:
            g = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
            a = (g + dagger(g)) / 2
            a /= trace_norm(a)
        best = max(best, trace_norm(apply_to_doubled_space(s, a)))
    return best


@dataclass(frozen=True)
class GeneratorStats:
    """Scalars parameterizing every step/error bound.

    max_scaled_norm:   largest diamond norm among rate-scaled generator terms
    max_bare_norm:     same with the decay rates stripped
    total_rate:        sum of all decay rates (the Hamiltonian counts 1)
    term_count:        number of generator terms M
    """

    max_scaled_norm: float
    max_bare_norm: float
    total_rate: float
    term_count: int

    def __post_init__(self):
        if self.max_scaled_norm < 0 or self.max_bare_norm < 0:
            raise ValueError("norm statistics must be nonnegative")
        if self.term_count < 1:
            raise ValueError("term count must be positive")


def generator_stats(gen: GkslGenerator, gamma_includes_hamiltonian: bool = True) -> GeneratorStats:
    """Diamond-norm statistics of a generator's terms.

    ``gamma_includes_hamiltonian`` keeps the Hamiltonian's unit rate inside
    the total decay rate (the default); disable to count dissipators only.
    """
    scaled = 0.0
    bare = 0.0
    for k in range(1, gen.m_total + 1):
        scaled = max(scaled, diamond_norm(term_superop(gen, k, with_rate=True)))
        bare = max(bare, diamond_norm(term_superop(gen, k, with_rate=False)))
    rates = gen.rates
    total = float(np.sum(rates)) if gamma_includes_hamiltonian else float(np.sum(rates[1:]))
    return GeneratorStats(
        max_scaled_norm=scaled,
        max_bare_norm=bare,
        total_rate=total,
        term_count=gen.m_total,
    )


def power_contraction_check(t_chan: np.ndarray, v_chan: np.ndarray, n: int, slack: float = 1e-6) -> bool:
    """Check ||T^N - V^N|| <= N ||T - V|| in diamond norm for two channels."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    for name, chan in (("first", t_chan), ("second", v_chan)):
        if not is_cptp(chan):
            raise ValueError(f"{name} input is not CPTP at tolerance {TOL.cptp_tol}")
    lhs = diamond_norm(np.linalg.matrix_power(t_chan, n) - np.linalg.matrix_power(v_chan, n))
    rhs = diamond_norm(t_chan - v_chan)
    return lhs <= n * rhs + slack
