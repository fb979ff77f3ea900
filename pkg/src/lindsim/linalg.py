"""Dense complex linear algebra primitives.

Conventions (fixed by the tests in tests/test_linalg.py):

* Vectorization stacks columns, so ``vectorize([[a, b], [c, d]]) = (a, c, b, d)``
  and ``vectorize(A @ X @ B) = kron(B.T, A) @ vectorize(X)``.
* ``partial_trace`` keeps the listed factors in their original order.

All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .tolerances import TOL

__all__ = [
    "DensityMatrix",
    "dagger",
    "devectorize",
    "is_hermitian",
    "kron",
    "mat_exp",
    "partial_trace",
    "trace_distance",
    "trace_norm",
    "vectorize",
]


def _as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def is_hermitian(a: np.ndarray, tol: float = TOL.herm_tol) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - dagger(a))) <= tol


def kron(a, b) -> np.ndarray:
    """Kronecker product; block (i, j) of the result is a[i, j] * b."""
    return np.kron(_as_matrix(a), _as_matrix(b))


def partial_trace(m, dims, keep) -> np.ndarray:
    """Reduce a square matrix on a tensor-product space to the kept factors.

    ``dims`` lists the factor dimensions, ``keep`` the indices (into ``dims``)
    of the factors to retain, in their original order.  The trace is
    preserved: ``tr(result) == tr(m)``.
    """
    m = _as_matrix(m)
    dims = [int(d) for d in dims]
    side = int(np.prod(dims))
    if m.shape != (side, side):
        raise ValueError(
            f"matrix side {m.shape[0]} inconsistent with register layout {dims}"
        )
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")

    n = len(dims)
    t = m.reshape(dims + dims)
    # contract row/column indices of every traced factor, highest index first
    # so earlier axis positions stay valid
    traced = [i for i in range(n) if i not in keep]
    for i in sorted(traced, reverse=True):
        t = np.trace(t, axis1=i, axis2=i + (t.ndim // 2))
    kept_side = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(kept_side, kept_side)


def mat_exp(a) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring (Pade core via scipy)."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix exponential needs a square input, got {a.shape}")
    return scipy.linalg.expm(a)


def vectorize(a) -> np.ndarray:
    """Column-stack a square matrix into a length-d^2 vector."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("vectorize expects a square matrix")
    return a.T.reshape(-1)


def devectorize(v) -> np.ndarray:
    """Inverse of :func:`vectorize`; exact round trip."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape(d, d).T


def trace_norm(a) -> float:
    """Sum of singular values; eigenvalue route for Hermitian inputs."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("trace norm defined here for square matrices only")
    if is_hermitian(a, tol=1e-13):
        return float(np.sum(np.abs(np.linalg.eigvalsh(a))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


@dataclass(frozen=True)
class DensityMatrix:
    """A d x d state: Hermitian, unit trace, positive semidefinite.

    The invariants are enforced at construction time with the shared
    tolerances; use ``DensityMatrix(matrix)`` only with data that is meant to
    be a physical state.
    """

    matrix: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self):
        m = _as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        if np.max(np.abs(m - dagger(m))) > TOL.herm_tol:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > TOL.trace_tol or abs(np.trace(m).imag) > TOL.trace_tol:
            raise ValueError(f"density matrix trace {np.trace(m)} is not 1")
        if np.min(np.linalg.eigvalsh((m + dagger(m)) / 2)) < TOL.psd_floor:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m.copy())
        object.__setattr__(self, "dim", m.shape[0])

    @staticmethod
    def pure(ket) -> "DensityMatrix":
        v = np.asarray(ket, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return DensityMatrix(np.outer(v, v.conj()))

    @staticmethod
    def ground(dim: int) -> "DensityMatrix":
        v = np.zeros(dim)
        v[0] = 1.0
        return DensityMatrix.pure(v)

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityMatrix":
        return DensityMatrix(np.eye(dim) / dim)


def trace_distance(p, q) -> float:
    """(1/2) ||p - q||_1 between two states (or raw state matrices)."""
    pm = p.matrix if isinstance(p, DensityMatrix) else _as_matrix(p)
    qm = q.matrix if isinstance(q, DensityMatrix) else _as_matrix(q)
    if pm.shape != qm.shape:
        raise ValueError(f"state dimensions differ: {pm.shape} vs {qm.shape}")
    return 0.5 * trace_norm(pm - qm)
