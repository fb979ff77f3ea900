"""Approximation channels, step/error-bound calculators and gate counters.

Product-order convention (pinned by the entrywise tests): in a forward sweep
the k = 1 constituent channel is applied to the state first, so as a matrix
the sweep is E_M @ ... @ E_1; a reversed sweep applies k = M first.  The
symmetric second-order block is a forward half-step sweep followed by a
reversed half-step sweep.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .lindblad import GkslGenerator, constituent_channel
from .norms import GeneratorStats
from .tolerances import TOL

__all__ = [
    "Direction",
    "Implementation",
    "Method",
    "StepBound",
    "GATE_COMPLEXITY",
    "error_bound",
    "gate_count",
    "qdrift_exact",
    "qdrift_probs",
    "s1_dir",
    "s1_ran_exact",
    "s2_det",
    "s2_ran_exact",
    "s2_sigma",
    "step_count",
]


class Method(str, enum.Enum):
    S1_DET = "s1_det"
    S2_DET = "s2_det"
    S1_RAN = "s1_ran"
    S2_RAN = "s2_ran"
    QDRIFT = "qdrift"


class Direction(str, enum.Enum):
    FORWARD = "forward"
    REVERSED = "reversed"


class Implementation(str, enum.Enum):
    CS = "cs"  # classical sampling
    QF = "qf"  # quantum forking


def _sweep(gen: GkslGenerator, dt: float, order) -> np.ndarray:
    """Compose constituent channels; earlier indices in ``order`` act first."""
    total = np.eye(gen.dim**2, dtype=complex)
    for k in order:
        total = constituent_channel(gen, k, dt) @ total
    return total


def s1_dir(gen: GkslGenerator, dt: float, direction: Direction) -> np.ndarray:
    """First-order product formula in one sweep direction."""
    if dt <= 0:
        raise ValueError("step length must be positive")
    ks = range(1, gen.m_total + 1)
    order = ks if direction == Direction.FORWARD else reversed(list(ks))
    return _sweep(gen, dt, order)


def s2_det(gen: GkslGenerator, dt: float) -> np.ndarray:
    """Symmetric second-order formula: half-step sweep up, half-step sweep down."""
    if dt <= 0:
        raise ValueError("step length must be positive")
    return s1_dir(gen, dt / 2, Direction.REVERSED) @ s1_dir(gen, dt / 2, Direction.FORWARD)


def s1_ran_exact(gen: GkslGenerator, dt: float) -> np.ndarray:
    """Equal mixture of the forward and reversed first-order formulas."""
    return 0.5 * (s1_dir(gen, dt, Direction.FORWARD) + s1_dir(gen, dt, Direction.REVERSED))


def s2_sigma(gen: GkslGenerator, dt: float, sigma) -> np.ndarray:
    """Second-order formula with term indices permuted by ``sigma``.

    ``sigma`` is a tuple containing 1..M exactly once; sigma[0] is applied
    first in the forward half sweep.
    """
    if dt <= 0:
        raise ValueError("step length must be positive")
    sigma = tuple(int(k) for k in sigma)
    if sorted(sigma) != list(range(1, gen.m_total + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{gen.m_total}")
    forward = _sweep(gen, dt / 2, sigma)
    backward = _sweep(gen, dt / 2, reversed(sigma))
    return backward @ forward


def s2_ran_exact(gen: GkslGenerator, dt: float) -> np.ndarray:
    """Uniform mixture of the permuted second-order formulas over all M! orders."""
    m = gen.m_total
    if m > TOL.s2_ran_max_terms:
        raise ValueError(
            f"exact mixture over {m}! permutations refused (cap M <= "
            f"{TOL.s2_ran_max_terms}); use mixture_estimate for a sampled surrogate"
        )
    total = np.zeros((gen.dim**2, gen.dim**2), dtype=complex)
    count = 0
    for sigma in itertools.permutations(range(1, m + 1)):
        total += s2_sigma(gen, dt, sigma)
        count += 1
    return total / count


def qdrift_probs(gen: GkslGenerator) -> np.ndarray:
    """Sampling weights proportional to the decay rates."""
    rates = gen.rates
    total = float(np.sum(rates))
    if total <= 0:
        raise ValueError("total decay rate is zero; nothing to simulate")
    return rates / total


def qdrift_exact(gen: GkslGenerator, omega: float) -> np.ndarray:
    """Rate-weighted mixture of single-term rate-free channels."""
    if omega <= 0:
        raise ValueError("step length must be positive")
    probs = qdrift_probs(gen)
    total = np.zeros((gen.dim**2, gen.dim**2), dtype=complex)
    for k in range(1, gen.m_total + 1):
        total += probs[k - 1] * constituent_channel(gen, k, omega, with_rate=False)
    return total


# ---------------------------------------------------------------------------
# Step counts and error bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepBound:
    """Step count N for a target precision, with the bound it guarantees."""

    n_steps: int
    epsilon_bound: float
    stats: GeneratorStats
    t: float

    @property
    def tau(self) -> float:
        return self.t / self.n_steps

    @property
    def omega(self) -> float:
        return self.t * self.stats.total_rate / self.n_steps


def _steps_lower_bound(method: Method, stats: GeneratorStats, t: float, epsilon: float,
                       conservative: bool) -> float:
    lam = stats.max_scaled_norm
    m = stats.term_count
    if method == Method.S1_DET:
        return (t * lam * m) ** 2 / epsilon
    if method in (Method.S2_DET, Method.S1_RAN):
        return (t * lam * m) ** 1.5 / math.sqrt(3 * epsilon)
    if method == Method.S2_RAN:
        factor = 2.0 if conservative else 1.0
        return (factor * lam * t) ** 1.5 * m / math.sqrt(epsilon)
    if method == Method.QDRIFT:
        return (t * stats.total_rate * stats.max_bare_norm) ** 2 / epsilon
    raise ValueError(f"unknown method {method!r}")


def step_count(method: Method, stats: GeneratorStats, t: float, epsilon: float,
               conservative: bool = False) -> StepBound:
    """Smallest step count guaranteeing precision ``epsilon`` (exact ceiling).

    ``conservative`` switches the second-order randomised formula to the
    larger constant (see README on bound variants).
    """
    if t <= 0:
        raise ValueError("simulation time must be positive")
    if epsilon <= 0:
        raise ValueError("target precision must be positive")
    n = max(1, math.ceil(_steps_lower_bound(method, stats, t, epsilon, conservative)))
    return StepBound(
        n_steps=n,
        epsilon_bound=error_bound(method, stats, t, n, conservative=conservative),
        stats=stats,
        t=t,
    )


def error_bound(method: Method, stats: GeneratorStats, t: float, n: int,
                conservative: bool = False, with_exp_factor: bool = False) -> float:
    """Diamond-norm error bound after n steps.

    The default is the large-N simplified form; ``with_exp_factor`` restores
    the exp(t * rate_scale / n) factor dropped in that simplification, which
    matters for honest reporting at small n.
    """
    if n < 1:
        raise ValueError("step count must be a positive integer")
    lam = stats.max_scaled_norm
    m = stats.term_count
    if method == Method.S1_DET:
        bound = (t * lam * m) ** 2 / n
        growth = m * t * lam / n
    elif method in (Method.S2_DET, Method.S1_RAN):
        bound = (m * t * lam) ** 3 / (3 * n**2)
        growth = m * t * lam / n
    elif method == Method.S2_RAN:
        factor = 2.0 if conservative else 1.0
        bound = (factor * lam * t) ** 3 * m**2 / n**2
        growth = m * t * lam / n
    elif method == Method.QDRIFT:
        scale = t * stats.total_rate * stats.max_bare_norm
        bound = scale**2 / n
        growth = scale / n
    else:
        raise ValueError(f"unknown method {method!r}")
    return bound * math.exp(growth) if with_exp_factor else bound


# ---------------------------------------------------------------------------
# Gate counting
# ---------------------------------------------------------------------------

_CS_COUNTS = {
    Method.S1_DET: lambda m, n: n * m,
    Method.S2_DET: lambda m, n: 2 * n * m,
    Method.S1_RAN: lambda m, n: n * m,
    Method.S2_RAN: lambda m, n: 2 * n * m,
    Method.QDRIFT: lambda m, n: n,
}

_QF_COUNTS = {
    Method.S1_RAN: lambda m, n: (2 * m + 2) * n,
    Method.QDRIFT: lambda m, n: (3 * m - 2) * n,
}


def gate_count(method: Method, m: int, n: int, impl: Implementation) -> int:
    """Number of simple channels used by a length-n schedule."""
    if m < 1 or n < 1:
        raise ValueError("term count and step count must be positive")
    if impl == Implementation.CS:
        return _CS_COUNTS[method](m, n)
    if method == Method.S2_RAN:
        raise ValueError(
            "quantum forking of the second-order randomised formula needs "
            "2*(M!) controlled-SWAP channels and is refused as infeasible"
        )
    if method not in _QF_COUNTS:
        raise ValueError(f"quantum forking is defined only for s1_ran and qdrift, not {method.value}")
    return _QF_COUNTS[method](m, n)


# Asymptotic gate-complexity summary (classical-sampling and forking routes).
GATE_COMPLEXITY = {
    (Method.S1_DET, Implementation.CS): "O((tΛ)²M³/ε)",
    (Method.S2_DET, Implementation.CS): "O((tΛ)^(3/2)M^(5/2)/√(3ε))",
    (Method.S1_RAN, Implementation.CS): "O((tΛ)^(3/2)M^(5/2)/√(3ε))",
    (Method.S2_RAN, Implementation.CS): "O((tΛ)^(3/2)M²/√ε)",
    (Method.QDRIFT, Implementation.CS): "O((tΓΩ)²/ε)",
    (Method.S1_RAN, Implementation.QF): "O((tΛ)^(3/2)M^(5/2)/√(3ε))",
    (Method.QDRIFT, Implementation.QF): "O((tΓΩ)²M/ε)",
}
