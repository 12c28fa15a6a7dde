"""Full matrix algebras at desk scale.

Matrix elements are plain complex ``numpy`` arrays.  This module supplies
the C*-algebraic plumbing used everywhere else: operator norms by SVD,
Jordan and Lie products, the normalized trace, diagonal embeddings of
functions on a finite metric space, and the trace-preserving conditional
expectation onto the diagonal (pinching).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import InputShapeError, NotInSubalgebraError, SelfAdjointnessError
from .metric_core import FiniteMetricSpace


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def _as_square(a: np.ndarray) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value (dims <= 64; exactness over speed)."""
    m = _as_square(a)
    if not np.any(m):
        return 0.0
    return float(np.linalg.norm(m, ord=2))


def operator_norms(stack: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a (..., n, n) stack."""
    s = np.asarray(stack, dtype=complex)
    if s.ndim < 2 or s.shape[-1] != s.shape[-2]:
        raise InputShapeError(f"expected a stack of square matrices, got {s.shape}")
    return np.linalg.svd(s, compute_uv=False)[..., 0]


def jordan_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(ab + ba) / 2; maps pairs of self-adjoint elements to self-adjoint ones."""
    x, y = _as_square(a), _as_square(b)
    if x.shape != y.shape:
        raise InputShapeError(f"dimension mismatch {x.shape} vs {y.shape}")
    return (x @ y + y @ x) / 2.0


def lie_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(ab - ba) / 2i; maps pairs of self-adjoint elements to self-adjoint ones."""
    x, y = _as_square(a), _as_square(b)
    if x.shape != y.shape:
        raise InputShapeError(f"dimension mismatch {x.shape} vs {y.shape}")
    return (x @ y - y @ x) / 2.0j


def trace_state(a: np.ndarray) -> complex:
    """The normalized trace, i.e. the unique tracial state of the algebra."""
    m = _as_square(a)
    return complex(np.trace(m)) / m.shape[0]


def is_self_adjoint(a: np.ndarray, tol: float = DEFAULT_TOLERANCES.algebraic) -> bool:
    m = _as_square(a)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def require_self_adjoint(
    a: np.ndarray, tol: float = DEFAULT_TOLERANCES.algebraic
) -> np.ndarray:
    m = _as_square(a)
    gap = float(np.max(np.abs(m - m.conj().T)))
    if gap > tol:
        raise SelfAdjointnessError(f"element is not self-adjoint (deviation {gap:.3e})")
    return m


def pinch(a: np.ndarray) -> np.ndarray:
    """Zero all off-diagonal entries.

    This is the unique trace-preserving conditional expectation onto the
    diagonal subalgebra: it is idempotent, unital, positive, contractive and
    a bimodule map over diagonal matrices.
    """
    m = _as_square(a)
    return np.diag(np.diag(m))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """A random self-adjoint matrix with independent Gaussian entries."""
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (g + g.conj().T) / 2.0


@dataclass(frozen=True)
class DiagonalEmbedding:
    """The unital *-isomorphism from functions on a space onto diagonal matrices.

    ``embed`` carries a (real or complex) function vector to the diagonal
    matrix with those entries; ``extract`` inverts it on the diagonal
    subalgebra and rejects matrices with off-diagonal mass.
    """

    space: FiniteMetricSpace

    @property
    def dim(self) -> int:
        return self.space.n_points

    def embed(self, values: np.ndarray) -> np.ndarray:
        f = np.asarray(values)
        if f.shape != (self.dim,):
            raise InputShapeError(
                f"function has shape {f.shape}, embedding expects ({self.dim},)"
            )
        return np.diag(f.astype(complex))

    def extract(
        self, a: np.ndarray, tol: float = DEFAULT_TOLERANCES.algebraic
    ) -> np.ndarray:
        m = _as_square(a)
        if m.shape[0] != self.dim:
            raise InputShapeError(
                f"matrix dim {m.shape[0]} does not match space size {self.dim}"
            )
        off = m - np.diag(np.diag(m))
        mass = float(np.max(np.abs(off))) if self.dim > 1 else 0.0
        if mass > tol:
            raise NotInSubalgebraError(
                f"matrix has off-diagonal mass {mass:.3e}, not in the diagonal algebra"
            )
        return np.diag(m)


def embed_diagonal(rho: DiagonalEmbedding, values: np.ndarray) -> np.ndarray:
    return rho.embed(values)


def extract_diagonal(
    rho: DiagonalEmbedding, a: np.ndarray, tol: float = DEFAULT_TOLERANCES.algebraic
) -> np.ndarray:
    return rho.extract(a, tol=tol)


# ---------------------------------------------------------------------------
# Wire format: row-major lists of (re, im) pairs.
# ---------------------------------------------------------------------------


def matrix_to_pairs(a: np.ndarray) -> list[list[list[float]]]:
    m = _as_square(a)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_pairs(rows: list) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise InputShapeError(f"expected (n, n, 2) re/im data, got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]
