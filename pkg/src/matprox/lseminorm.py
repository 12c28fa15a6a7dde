"""The metric seminorm on a full matrix algebra over a finite-space diagonal.

Given an n-point metric space Y embedded as the diagonal of the n x n
matrices, a tolerance beta > 0 and the pinching expectation E, the seminorm
evaluated here is

    L(a) = max( ||a - E(a)|| / beta,  Lip(diagonal part of a) )

where Lip is the Lipschitz seminorm of Y.  Its kernel is the scalar
multiples of the identity, its unit ball is norm-bounded after centering,
and it satisfies a Leibniz-type inequality for the Jordan and Lie products
with constant D = max(2, 1 + beta/delta), delta being the minimum
separation of Y.  This module certifies those properties numerically and
samples the unit ball exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .config import DEFAULT_TOLERANCES
from .errors import ConfigError, CorollaryModeViolation, InputShapeError
from .matrix_algebra import (
    DiagonalEmbedding,
    jordan_product,
    lie_product,
    operator_norm,
    operator_norms,
    require_self_adjoint,
    trace_state,
)
from .metric_core import (
    FiniteMetricSpace,
    diameter,
    lipschitz_seminorm,
    lipschitz_seminorms,
    min_separation,
)


@dataclass(frozen=True)
class ApproximationPair:
    """A matrix algebra tied to a finite metric space diagonal.

    Bundles the space Y, the diagonal embedding, the tolerance beta, the
    cached minimum separation delta and the Leibniz constant
    D = max(2, 1 + beta/delta).  When ``corollary_mode`` is set the
    construction insists on beta/delta <= 1, the regime in which D = 2;
    larger beta is still meaningful but must be requested explicitly by
    turning the flag off.
    """

    space: FiniteMetricSpace
    beta: float
    corollary_mode: bool = True
    rho: DiagonalEmbedding = field(init=False)
    delta: float = field(init=False)
    leibniz_constant: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.beta > 0.0:
            raise ConfigError("beta must be positive")
        delta = min_separation(self.space)
        if self.corollary_mode and self.beta > delta * (1.0 + 1e-12):
            raise CorollaryModeViolation(
                f"beta={self.beta:.6g} exceeds the minimum separation "
                f"{delta:.6g}; construct with corollary_mode=False to allow it"
            )
        object.__setattr__(self, "rho", DiagonalEmbedding(self.space))
        object.__setattr__(self, "delta", delta)
        object.__setattr__(
            self, "leibniz_constant", max(2.0, 1.0 + self.beta / delta)
        )

    @property
    def dim(self) -> int:
        return self.space.n_points


def _check_dim(pair: ApproximationPair, a: np.ndarray) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.shape != (pair.dim, pair.dim):
        raise InputShapeError(
            f"element has shape {m.shape}, pair expects ({pair.dim}, {pair.dim})"
        )
    return m


def l_seminorm(
    pair: ApproximationPair,
    a: np.ndarray,
    *,
    extend_complex: bool = False,
    tol: float = DEFAULT_TOLERANCES.algebraic,
) -> float:
    """Evaluate the seminorm max(||a - E(a)||/beta, Lip(diagonal part)).

    Only self-adjoint elements are in scope by default; non-self-adjoint
    input raises.  With ``extend_complex=True`` the same max formula is
    evaluated on arbitrary elements (the Lipschitz term then uses complex
    moduli); callers emitting such values are expected to flag them.
    """
    m = _check_dim(pair, a)
    if not extend_complex:
        m = require_self_adjoint(m, tol=tol)
    diag = np.diag(m)
    off = m - np.diag(diag)
    deviation = operator_norm(off) / pair.beta
    values = diag if extend_complex else diag.real
    lip = lipschitz_seminorm(pair.space, values)
    return max(deviation, lip)


def l_seminorms(pair: ApproximationPair, stack: np.ndarray) -> np.ndarray:
    """Vectorized :func:`l_seminorm` for a (count, n, n) stack of self-adjoint
    elements.  Skips the per-element self-adjointness validation; callers own
    the invariant."""
    s = np.asarray(stack, dtype=complex)
    if s.ndim != 3 or s.shape[1:] != (pair.dim, pair.dim):
        raise InputShapeError(
            f"stack has shape {s.shape}, expected (count, {pair.dim}, {pair.dim})"
        )
    diags = np.diagonal(s, axis1=1, axis2=2)
    off = s.copy()
    idx = np.arange(pair.dim)
    off[:, idx, idx] = 0.0
    deviations = operator_norms(off) / pair.beta
    lips = lipschitz_seminorms(pair.space, diags.real)
    return np.maximum(deviations, lips)


def quasi_leibniz_residual(
    pair: ApproximationPair, a: np.ndarray, b: np.ndarray
) -> tuple[float, float]:
    """Slack of the Leibniz-type inequality for the Jordan and Lie products.

    Returns D*(||a|| L(b) + ||b|| L(a)) - L(product) for each product; the
    inequality holds exactly when both residuals are nonnegative (small
    negative values are rounding noise).
    """
    x = require_self_adjoint(_check_dim(pair, a))
    y = require_self_adjoint(_check_dim(pair, b))
    bound = pair.leibniz_constant * (
        operator_norm(x) * l_seminorm(pair, y) + operator_norm(y) * l_seminorm(pair, x)
    )
    jres = bound - l_seminorm(pair, jordan_product(x, y))
    lres = bound - l_seminorm(pair, lie_product(x, y))
    return float(jres), float(lres)


def kernel_check(
    pair: ApproximationPair,
    a: np.ndarray,
    tol: float = DEFAULT_TOLERANCES.algebraic,
) -> bool:
    """Whether a self-adjoint element lies in the kernel of the seminorm.

    Elements with L(a) <= tol are additionally verified to be close to a
    scalar multiple of the identity (the kernel is exactly the scalars); a
    violation of that implication would be an internal defect and raises.
    """
    m = require_self_adjoint(_check_dim(pair, a))
    value = l_seminorm(pair, m)
    if value > tol:
        return False
    scalar_gap = operator_norm(m - trace_state(m) * np.eye(pair.dim))
    allowed = tol * (pair.beta + diameter(pair.space) + 1.0)
    if scalar_gap > allowed:
        raise RuntimeError(
            f"kernel defect: L(a)={value:.3e} but ||a - tau(a) 1||={scalar_gap:.3e}"
        )
    return True


def kernel_dimension(
    pair: ApproximationPair, tol: float = DEFAULT_TOLERANCES.spectral
) -> int:
    """Dimension of the kernel of the seminorm inside the self-adjoint space.

    L(a) = 0 is the linear system {off-diagonal part of a = 0} together with
    {f(x) = f(y) for every pair}, f being the diagonal.  The dimension is the
    nullity of the stacked constraint matrix over a real basis of the
    self-adjoint matrices, computed by SVD.  It equals 1 for every valid
    pair (the scalars).
    """
    n = pair.dim
    basis: list[np.ndarray] = []
    for i in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0j
            e[j, i] = -1.0j
            basis.append(e)
    columns = []
    for b in basis:
        off = b - np.diag(np.diag(b))
        rows = [off.real.ravel(), off.imag.ravel()]
        f = np.diag(b).real
        pair_diffs = [
            f[i] - f[j] for i in range(n) for j in range(i + 1, n)
        ]
        columns.append(np.concatenate([*rows, np.asarray(pair_diffs)]))
    constraint = np.stack(columns, axis=1)
    sv = np.linalg.svd(constraint, compute_uv=False)
    rank = int(np.sum(sv > tol * max(1.0, sv[0])))
    return len(basis) - rank


def _lip_ball_sup_norm(space: FiniteMetricSpace, weights: np.ndarray) -> float:
    """max ||f||_inf over {Lip(f) <= 1, sum_i w_i f_i = 0}, solved by LP."""
    n = space.n_points
    if n == 1:
        return 0.0
    rows = []
    rhs = []
    for i in range(n):
        for j in range(i + 1, n):
            row = np.zeros(n)
            row[i] = 1.0
            row[j] = -1.0
            d = space.dist[i, j]
            rows.append(row.copy())
            rhs.append(d)
            rows.append(-row)
            rhs.append(d)
    a_ub = np.asarray(rows)
    b_ub = np.asarray(rhs)
    a_eq = weights[None, :]
    best = 0.0
    for i in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sign
            res = linprog(
                c=c,
                A_ub=a_ub,
                b_ub=b_ub,
                A_eq=a_eq,
                b_eq=[0.0],
                bounds=[(None, None)] * n,
                method="highs",
            )
            if not res.success:
                raise RuntimeError(f"norm-bound LP failed: {res.message}")
            best = max(best, -float(res.fun))
    return best


def unit_ball_radius_bound(pair: ApproximationPair) -> float:
    """Norm bound beta + B for the centered unit ball of the seminorm.

    B is the largest sup norm of a function with Lipschitz seminorm at most
    one and zero mean against the trace state pulled back to the space
    (uniform weights on a full matrix algebra); it is computed exactly by
    LP.  Every self-adjoint a with L(a) <= 1 and tau(a) = 0 satisfies
    ||a|| <= beta + B.
    """
    weights = np.full(pair.dim, 1.0 / pair.dim)
    return pair.beta + _lip_ball_sup_norm(pair.space, weights)


def _sample_sort_key(a: np.ndarray) -> bytes:
    return np.round(a.view(float), 9).tobytes()


def sample_unit_ball(
    pair: ApproximationPair, count: int, seed: int
) -> list[np.ndarray]:
    """Deterministic self-adjoint samples with seminorm at most one.

    Each sample is diag(f) + c with Lip(f) <= 1 and c self-adjoint with zero
    diagonal and ||c|| <= beta, so membership is exact by construction
    rather than by rejection.  The expectation of such a sample is diag(f)
    and its deviation term is ||c||/beta.  Output order is canonical
    (sorted by a rounded byte key) so sharded generation reassembles
    identically.
    """
    if count < 1:
        raise ConfigError("sample count must be at least one")
    n = pair.dim
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(count):
        f = rng.uniform(-1.0, 1.0, size=n)
        lip = lipschitz_seminorm(pair.space, f)
        target_lip = rng.uniform(0.0, 1.0)
        if lip > 0.0:
            f = f * (target_lip / lip)
        f = f + rng.uniform(-1.0, 1.0)
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        c = (g + g.conj().T) / 2.0
        np.fill_diagonal(c, 0.0)
        norm_c = operator_norm(c)
        target_dev = rng.uniform(0.0, 1.0)
        if norm_c > 0.0:
            c = c * (target_dev * pair.beta / norm_c)
        samples.append(np.diag(f.astype(complex)) + c)
    samples.sort(key=_sample_sort_key)
    return samples
