"""Density-matrix simulation of the controlled-SWAP forking circuits.

A fork circuit realizes a convex mixture of channels without classical
sampling: a control register is prepared in the mixing distribution,
controlled-SWAP channels route the system state to the register that
receives the wanted branch channel, the branch channels act slot-wise, the
routing is undone and the control and work registers are measured and
discarded (equivalently: partially traced out).

Registers are ordered [control, slot 1, slot 2, ...]; slot 1 carries the
system state.  Everything here works on composite density matrices of total
dimension at most the configured cap, with channels represented as
superoperators on the composite space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formulas import Direction, qdrift_probs, s1_dir
from .lindblad import GkslGenerator, constituent_channel
from .linalg import DensityMatrix, devectorize, kron, partial_trace, vectorize
from .tolerances import TOL

__all__ = [
    "ForkLayout",
    "cswap_channel",
    "fork_qdrift_run",
    "fork_qdrift_step",
    "fork_s1_run",
    "fork_s1_step",
]


@dataclass(frozen=True)
class ForkLayout:
    """Register layout of a fork circuit."""

    control_dim: int
    system_dim: int
    n_ancillas: int

    def __post_init__(self):
        if self.control_dim < 1 or self.system_dim < 1 or self.n_ancillas < 0:
            raise ValueError("register dimensions must be positive")
        if self.total_dim > TOL.fork_dim_cap:
            raise ValueError(
                f"composite dimension {self.total_dim} exceeds the cap "
                f"{TOL.fork_dim_cap}; use the classical-sampling route instead"
            )

    @property
    def dims(self) -> tuple:
        return (self.control_dim,) + (self.system_dim,) * (1 + self.n_ancillas)

    @property
    def total_dim(self) -> int:
        return self.control_dim * self.system_dim ** (1 + self.n_ancillas)


def _cswap_unitary(layout: ForkLayout, control_value: int, target_a: int, target_b: int) -> np.ndarray:
    dims = layout.dims
    if not 0 <= control_value < layout.control_dim:
        raise ValueError(f"control value {control_value} outside 0..{layout.control_dim - 1}")
    if min(target_a, target_b) < 1 or max(target_a, target_b) >= len(dims):
        raise ValueError("swap targets must index non-control registers")
    if dims[target_a] != dims[target_b]:
        raise ValueError(f"swap targets have unequal dimensions {dims[target_a]} != {dims[target_b]}")
    total = layout.total_dim
    u = np.zeros((total, total))
    for idx in range(total):
        digits = list(np.unravel_index(idx, dims))
        if digits[0] == control_value:
            digits[target_a], digits[target_b] = digits[target_b], digits[target_a]
        u[np.ravel_multi_index(tuple(digits), dims), idx] = 1.0
    return u


def cswap_channel(layout: ForkLayout, control_value: int, target_a: int, target_b: int) -> np.ndarray:
    """Superoperator of the controlled-SWAP unitary on the composite space."""
    u = _cswap_unitary(layout, control_value, target_a, target_b)
    return kron(u.conj(), u)


def _embed_generator(gen: GkslGenerator, layout: ForkLayout, register: int) -> GkslGenerator:
    """Lift a generator to act on one register of the composite space."""
    dims = layout.dims

    def embed(op):
        out = np.ones((1, 1), dtype=complex)
        for pos, d in enumerate(dims):
            out = kron(out, op if pos == register else np.eye(d))
        return out

    return GkslGenerator(
        dim=layout.total_dim,
        hamiltonian=embed(gen.hamiltonian),
        terms=tuple((embed(op), rate) for op, rate in gen.terms),
    )


def _sweep_on_register(gen, layout, register, dt, direction) -> np.ndarray:
    return s1_dir(_embed_generator(gen, layout, register), dt, direction)


def _fork_s1_block(gen: GkslGenerator, dt: float) -> tuple:
    """(layout, composite superoperator) of one first-order fork block."""
    layout = ForkLayout(control_dim=2, system_dim=gen.dim, n_ancillas=1)
    swap = cswap_channel(layout, control_value=1, target_a=1, target_b=2)
    forward = _sweep_on_register(gen, layout, 1, dt, Direction.FORWARD)
    backward = _sweep_on_register(gen, layout, 2, dt, Direction.REVERSED)
    return layout, swap @ backward @ forward @ swap


def _as_state(rho, dim, name) -> np.ndarray:
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if mat.shape != (dim, dim):
        raise ValueError(f"{name} has shape {mat.shape}, expected ({dim}, {dim})")
    return mat


def _run_block(block: np.ndarray, layout: ForkLayout, prep: np.ndarray, rho_sys: np.ndarray,
               rho_phi: np.ndarray) -> np.ndarray:
    total = prep
    for slot in range(1 + layout.n_ancillas):
        total = kron(total, rho_sys if slot == 0 else rho_phi)
    out = devectorize(block @ vectorize(total))
    return partial_trace(out, list(layout.dims), keep=[1])


def fork_s1_step(gen: GkslGenerator, dt: float, rho_sys, rho_phi) -> DensityMatrix:
    """One fork block of the first-order randomised formula.

    Control prepared in the fair coin mixture; the forward sweep acts on the
    register holding the system state in the control-0 branch, the reversed
    sweep on the other; the swap routing makes the traced output the exact
    two-term mixture applied to the system state.
    """
    sys_mat = _as_state(rho_sys, gen.dim, "system state")
    phi_mat = _as_state(rho_phi, gen.dim, "work state")
    layout, block = _fork_s1_block(gen, dt)
    prep = np.eye(2, dtype=complex) / 2
    return DensityMatrix(_run_block(block, layout, prep, sys_mat, phi_mat))


def fork_s1_run(gen: GkslGenerator, t: float, n: int, rho0, rho_phi) -> DensityMatrix:
    """n fork blocks with control/work re-preparation between blocks."""
    if n < 1:
        raise ValueError("step count must be a positive integer")
    sys_mat = _as_state(rho0, gen.dim, "initial state")
    phi_mat = _as_state(rho_phi, gen.dim, "work state")
    layout, block = _fork_s1_block(gen, t / n)
    prep = np.eye(2, dtype=complex) / 2
    for _ in range(n):
        sys_mat = _run_block(block, layout, prep, sys_mat, phi_mat)
    return DensityMatrix(sys_mat)


def _fork_qdrift_block(gen: GkslGenerator, omega: float) -> tuple:
    """(layout, prep, composite superoperator) of one QDRIFT fork block."""
    m = gen.m_total
    layout = ForkLayout(control_dim=m, system_dim=gen.dim, n_ancillas=m - 1)
    d2 = layout.total_dim**2

    route = np.eye(d2, dtype=complex)
    for k in range(2, m + 1):
        route = cswap_channel(layout, control_value=k - 1, target_a=1, target_b=k) @ route

    branch = np.eye(d2, dtype=complex)
    for k in range(1, m + 1):
        emb = _embed_generator(gen, layout, register=k)
        branch = constituent_channel(emb, k, omega, with_rate=False) @ branch

    prep = np.diag(qdrift_probs(gen)).astype(complex)
    return layout, prep, route @ branch @ route


def fork_qdrift_step(gen: GkslGenerator, omega: float, rho_sys, rho_phi) -> DensityMatrix:
    """One QDRIFT fork block: rate-weighted control, per-slot term channels."""
    sys_mat = _as_state(rho_sys, gen.dim, "system state")
    phi_mat = _as_state(rho_phi, gen.dim, "work state")
    layout, prep, block = _fork_qdrift_block(gen, omega)
    return DensityMatrix(_run_block(block, layout, prep, sys_mat, phi_mat))


def fork_qdrift_run(gen: GkslGenerator, t: float, n: int, rho0, rho_phi) -> DensityMatrix:
    """n QDRIFT fork blocks at step length t * total_rate / n."""
    if n < 1:
        raise ValueError("step count must be a positive integer")
    sys_mat = _as_state(rho0, gen.dim, "initial state")
    phi_mat = _as_state(rho_phi, gen.dim, "work state")
    omega = t * float(np.sum(gen.rates)) / n
    layout, prep, block = _fork_qdrift_block(gen, omega)
    for _ in range(n):
        sys_mat = _run_block(block, layout, prep, sys_mat, phi_mat)
    return DensityMatrix(sys_mat)
