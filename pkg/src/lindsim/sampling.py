"""Seeded gate-set sampling and trajectory averaging.

Randomness is counter-based: every draw comes from a Philox stream whose
256-bit counter encodes (trajectory index, step index), so gate sets are
reproducible bit-for-bit, independent of evaluation order, and trajectories
can be generated in parallel without shared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formulas import Direction, Method, step_count
from .lindblad import GkslGenerator, constituent_channel
from .linalg import DensityMatrix, devectorize, vectorize
from .norms import GeneratorStats, generator_stats

__all__ = [
    "ChannelStep",
    "GateSet",
    "S1Block",
    "S2Block",
    "TermExp",
    "apply_gateset",
    "draw_gateset",
    "gateset_channel",
    "mixture_estimate",
    "sample_gateset",
]


@dataclass(frozen=True)
class S1Block:
    direction: Direction


@dataclass(frozen=True)
class S2Block:
    perm: tuple  # permutation of 1..M, first entry applied first


@dataclass(frozen=True)
class TermExp:
    k: int
    with_rate: bool = True


ChannelStep = (S1Block, S2Block, TermExp)


@dataclass(frozen=True)
class GateSet:
    """Ordered schedule of channel steps; steps[0] acts on the state first."""

    steps: tuple
    seed: int
    method: Method
    dt: float
    n_steps: int

    def __post_init__(self):
        if len(self.steps) != self.n_steps:
            raise ValueError(f"{len(self.steps)} steps but n_steps={self.n_steps}")
        if self.dt <= 0:
            raise ValueError("step length must be positive")


def _stream(seed: int, trajectory: int, step: int) -> np.random.Generator:
    """Philox stream for one (trajectory, step) draw; windows never overlap."""
    counter = (int(trajectory) << 128) | (int(step) << 64)
    return np.random.Generator(np.random.Philox(key=np.uint64(seed), counter=counter))


def _fisher_yates(rng: np.random.Generator, m: int) -> tuple:
    perm = list(range(1, m + 1))
    for i in range(m - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return tuple(perm)


def draw_gateset(method: Method, gen: GkslGenerator, t: float, n: int, seed: int,
                 trajectory: int = 0) -> GateSet:
    """Draw an n-step gate set for one of the sampled methods."""
    if n < 1:
        raise ValueError("step count must be a positive integer")
    if t <= 0:
        raise ValueError("simulation time must be positive")
    m = gen.m_total
    steps = []
    if method == Method.S1_RAN:
        dt = t / n
        for l in range(n):
            coin = int(_stream(seed, trajectory, l).integers(0, 2))
            steps.append(S1Block(Direction.FORWARD if coin == 0 else Direction.REVERSED))
    elif method == Method.S2_RAN:
        dt = t / n
        for l in range(n):
            steps.append(S2Block(_fisher_yates(_stream(seed, trajectory, l), m)))
    elif method == Method.QDRIFT:
        from .formulas import qdrift_probs

        probs = qdrift_probs(gen)
        cdf = np.cumsum(probs)
        dt = t * float(np.sum(gen.rates)) / n
        for l in range(n):
            u = float(_stream(seed, trajectory, l).random())
            k = 1 + int(np.searchsorted(cdf, u, side="right"))
            steps.append(TermExp(k=min(k, m), with_rate=False))
    else:
        raise ValueError(f"gate sets exist only for the sampled methods, not {method.value}")
    return GateSet(steps=tuple(steps), seed=seed, method=method, dt=dt, n_steps=n)


def sample_gateset(method: Method, gen: GkslGenerator, t: float, epsilon: float, seed: int,
                   stats: GeneratorStats | None = None, conservative: bool = False) -> GateSet:
    """Draw a gate set sized by the method's step-count bound for ``epsilon``."""
    if stats is None:
        stats = generator_stats(gen)
    bound = step_count(method, stats, t, epsilon, conservative=conservative)
    return draw_gateset(method, gen, t, bound.n_steps, seed)


def _step_channel(step, gen: GkslGenerator, dt: float) -> np.ndarray:
    from .formulas import s1_dir, s2_sigma

    if isinstance(step, S1Block):
        return s1_dir(gen, dt, step.direction)
    if isinstance(step, S2Block):
        return s2_sigma(gen, dt, step.perm)
    if isinstance(step, TermExp):
        return constituent_channel(gen, step.k, dt, with_rate=step.with_rate)
    raise TypeError(f"unknown channel step {step!r}")


def gateset_channel(gs: GateSet, gen: GkslGenerator, _memo: dict | None = None) -> np.ndarray:
    """Superoperator of the whole schedule (steps[0] applied first)."""
    memo = {} if _memo is None else _memo
    total = np.eye(gen.dim**2, dtype=complex)
    for step in gs.steps:
        mat = memo.get(step)
        if mat is None:
            mat = _step_channel(step, gen, gs.dt)
            memo[step] = mat
        total = mat @ total
    return total


def apply_gateset(gs: GateSet, gen: GkslGenerator, rho0: DensityMatrix) -> DensityMatrix:
    """Run the schedule on an initial state."""
    rho = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    if rho.shape != (gen.dim, gen.dim):
        raise ValueError(f"state shape {rho.shape} does not match dim {gen.dim}")
    out = devectorize(gateset_channel(gs, gen) @ vectorize(rho))
    return DensityMatrix(out)


def mixture_estimate(method: Method, gen: GkslGenerator, t: float, n: int,
                     r_samples: int, seed: int) -> np.ndarray:
    """Monte Carlo average of r sampled schedule channels.

    Unbiased estimator of the exact mixture channel power; trajectory r uses
    the derived stream (seed, r, step), so results are independent of
    evaluation order and r = 1 reproduces the single default gate set.
    """
    if r_samples < 1:
        raise ValueError("need at least one trajectory")
    memo: dict = {}
    total = np.zeros((gen.dim**2, gen.dim**2), dtype=complex)
    for r in range(r_samples):
        gs = draw_gateset(method, gen, t, n, seed, trajectory=r)
        total += gateset_channel(gs, gen, _memo=memo)
    return total / r_samples
