"""Unit-pivot bridges and certified proximity bounds.

A bridge here is an ambient matrix algebra with two unital embeddings and
the identity as pivot, so its height is zero structurally and its length
equals its reach.  For the pair (matrix algebra over a diagonal copy of a
finite space), the reach is certified to be at most beta by the two witness
maps (a function embeds to its diagonal matrix; a matrix maps to its
diagonal part), which directly bounds the quantum-metric distance between
the two spaces from above.  Only such upper bounds are produced: the
distance itself is an infimum over all bridges and no algorithm for the
infimum is implemented.  Sampled lower estimates of the reach of a specific
bridge are emitted for context and always labeled as sampled, never
certified.

The pipeline functions assemble the end-to-end bound for a compact space:
Hausdorff(space, net) + beta, with the net and its Hausdorff value supplied
by the built-in generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT_TOLERANCES
from .errors import ConfigError, InputShapeError
from .lseminorm import ApproximationPair, sample_unit_ball
from .matrix_algebra import operator_norm, pinch
from .metric_core import (
    Generator,
    epsilon_net,
    min_separation,
)


@dataclass(frozen=True)
class UnitPivotBridge:
    """An ambient algebra, two unital embeddings, and the unit as pivot.

    With the unit pivot the height vanishes by construction; the bridge
    norm of a pair of elements is the ambient operator-norm gap of their
    embeddings.
    """

    ambient_dim: int
    embed_left: Callable[[np.ndarray], np.ndarray]
    embed_right: Callable[[np.ndarray], np.ndarray]
    label_left: str = "left"
    label_right: str = "right"

    @property
    def height(self) -> float:
        return 0.0

    def norm(self, a: np.ndarray, b: np.ndarray) -> float:
        left = np.asarray(self.embed_left(a), dtype=complex)
        right = np.asarray(self.embed_right(b), dtype=complex)
        if left.shape != (self.ambient_dim, self.ambient_dim):
            raise InputShapeError(
                f"left embedding produced shape {left.shape}, ambient dim {self.ambient_dim}"
            )
        if right.shape != left.shape:
            raise InputShapeError(
                f"right embedding produced shape {right.shape}, ambient dim {self.ambient_dim}"
            )
        return operator_norm(left - right)


def bridge_norm(bridge: UnitPivotBridge, a: np.ndarray, b: np.ndarray) -> float:
    return bridge.norm(a, b)


def bridge_for_pair(pair: ApproximationPair) -> UnitPivotBridge:
    """The bridge from the matrix algebra to the functions on its space:
    identity on matrices, diagonal embedding on functions."""
    return UnitPivotBridge(
        ambient_dim=pair.dim,
        embed_left=lambda a: np.asarray(a, dtype=complex),
        embed_right=pair.rho.embed,
        label_left=f"M_{pair.dim}",
        label_right=f"C(Y), #Y={pair.dim}",
    )


@dataclass(frozen=True)
class ReachCertificate:
    """An upper bound on the reach of a bridge plus the witnessing data.

    ``worst_forward`` is the largest bridge norm over the checked samples of
    the matrix side against its witness (the diagonal part);
    ``worst_backward`` covers the function side, whose witness embeds
    exactly and therefore scores zero.
    """

    upper_bound: float
    witness_forward: str
    witness_backward: str
    worst_forward: float
    worst_backward: float
    samples: int
    seed: int
    certified: bool = True


def certify_reach_upper(
    pair: ApproximationPair, samples: int = 256, seed: int = 0
) -> ReachCertificate:
    """Certificate that the reach of the pair's bridge is at most beta.

    The certificate is proof-backed: for a unit-ball matrix a the diagonal
    part diag(a) has Lipschitz seminorm at most L(a) <= 1 and
    ||a - diag(a)|| <= beta L(a) <= beta, while a unit-Lipschitz function
    embeds with bridge norm exactly zero.  The witnesses are re-evaluated on
    deterministic unit-ball samples and the worst observed values recorded;
    a witness violation would falsify the certificate and raises.
    """
    bridge = bridge_for_pair(pair)
    worst_forward = 0.0
    for a in sample_unit_ball(pair, samples, seed):
        f = pair.rho.extract(pinch(a)).real
        worst_forward = max(worst_forward, bridge.norm(a, f))
    slack = DEFAULT_TOLERANCES.algebraic * (1.0 + pair.beta)
    if worst_forward > pair.beta + slack:
        raise RuntimeError(
            f"witness violated its certificate: {worst_forward} > beta={pair.beta}"
        )
    return ReachCertificate(
        upper_bound=pair.beta,
        witness_forward="matrix a -> its diagonal part as a function",
        witness_backward="function f -> the diagonal matrix of f",
        worst_forward=worst_forward,
        worst_backward=0.0,
        samples=samples,
        seed=seed,
    )


def _coordinate_descent_inf(
    pair: ApproximationPair,
    a: np.ndarray,
    start: np.ndarray,
    steps: int = 200,
    tol: float = 1e-9,
) -> float:
    """Best found value of ||a - diag(f)|| over unit-Lipschitz f.

    Starts from the provably feasible witness and improves one coordinate
    at a time inside the interval allowed by the Lipschitz constraints; the
    one-dimensional sections are convex, so a bounded scalar minimizer is
    enough.  Descent only tightens the witness value.
    """
    n = pair.dim
    dist = pair.space.dist
    f = start.astype(float).copy()

    def objective(values: np.ndarray) -> float:
        return operator_norm(a - np.diag(values.astype(complex)))

    current = objective(f)
    used = 0
    while used < steps:
        sweep_start = current
        for i in range(n):
            if used >= steps:
                break
            others = np.delete(np.arange(n), i)
            lo = float(np.max(f[others] - dist[i, others]))
            hi = float(np.min(f[others] + dist[i, others]))
            if hi - lo <= 0.0:
                used += 1
                continue

            def section(t: float) -> float:
                g = f.copy()
                g[i] = t
                return objective(g)

            res = minimize_scalar(
                section, bounds=(lo, hi), method="bounded",
                options={"xatol": 1e-10},
            )
            used += 1
            if res.fun < current:
                f[i] = float(res.x)
                current = float(res.fun)
        if sweep_start - current < tol:
            break
    return current


def estimate_reach_lower(
    pair: ApproximationPair,
    iters: int = 32,
    seed: int = 0,
    descent_steps: int = 200,
    sampler: Callable[[ApproximationPair, int, int], Sequence[np.ndarray]] | None = None,
    inner_solver: Callable[[ApproximationPair, np.ndarray, np.ndarray], float] | None = None,
) -> float:
    """Sampled, not certified, lower estimate of this bridge's reach.

    For each unit-ball sample a, the inner infimum over unit-Lipschitz
    functions is itself upper-bounded by starting at the witness diag(a)
    and descending; the maximum over samples is therefore a lower bound of
    the sup-inf reach of this particular bridge (and says nothing about the
    distance itself).  Always at most the certified upper bound, up to
    rounding.
    """
    if iters < 1:
        raise ConfigError("need at least one sample")
    draw = sampler if sampler is not None else sample_unit_ball
    best = 0.0
    for a in draw(pair, iters, seed):
        start = pair.rho.extract(pinch(a)).real
        if inner_solver is not None:
            value = inner_solver(pair, a, start)
        else:
            value = _coordinate_descent_inf(pair, a, start, steps=descent_steps)
        best = max(best, value)
    return best


# ---------------------------------------------------------------------------
# Tolerance schedules and the approximation pipeline.
# ---------------------------------------------------------------------------


def beta_delta_over_n(delta: float, n: int) -> float:
    """The schedule beta = delta / n; shrinks the bound to zero along nets."""
    return delta / n


def beta_fixed(value: float) -> Callable[[float, int], float]:
    if not value > 0.0:
        raise ConfigError("fixed beta must be positive")

    def rule(delta: float, n: int) -> float:
        return value

    return rule


def beta_fraction_of_delta(fraction: float) -> Callable[[float, int], float]:
    if not 0.0 < fraction <= 1.0:
        raise ConfigError("fraction of delta must lie in (0, 1]")

    def rule(delta: float, n: int) -> float:
        return fraction * delta

    return rule


def approximate_compact_space(
    generator: Generator,
    n: int,
    beta_rule: Callable[[float, int], float],
    corollary_mode: bool = True,
) -> tuple[ApproximationPair, float]:
    """Build the matrix approximation of a compact space and its total bound.

    Returns the approximation pair over the n-point net together with the
    certified bound Hausdorff(space, net) + beta.  In corollary mode the
    rule must produce beta <= delta (Leibniz constant 2); violations raise
    ``CorollaryModeViolation``, and the pair remains constructible with
    ``corollary_mode=False`` at constant 1 + beta/delta.
    """
    net, haus = epsilon_net(generator, n)
    delta = min_separation(net)
    beta = float(beta_rule(delta, n))
    pair = ApproximationPair(net, beta, corollary_mode=corollary_mode)
    return pair, haus + beta


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    delta: float
    beta: float
    haus: float
    certified_bound: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Certified bounds along a sequence of nets, with monotonicity flags."""

    rows: tuple[ConvergenceRow, ...]
    strictly_decreasing: bool
    nonincreasing: bool

    CSV_HEADER = "n,delta,beta,haus,certified_bound"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.delta!r},{r.beta!r},{r.haus!r},{r.certified_bound!r}"
            )
        return "\n".join(lines) + "\n"


def convergence_experiment(
    generator: Generator,
    n_list: Sequence[int],
    beta_rule: Callable[[float, int], float],
    corollary_mode: bool = True,
) -> ConvergenceReport:
    """Run the approximation pipeline along an increasing list of net sizes."""
    sizes = [int(n) for n in n_list]
    if sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ConfigError("net sizes must be strictly increasing")
    rows = []
    for n in sizes:
        net, haus = epsilon_net(generator, n)
        delta = min_separation(net)
        beta = float(beta_rule(delta, n))
        ApproximationPair(net, beta, corollary_mode=corollary_mode)
        rows.append(
            ConvergenceRow(
                n=n, delta=delta, beta=beta, haus=haus, certified_bound=haus + beta
            )
        )
    bounds = [r.certified_bound for r in rows]
    strictly = all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    noninc = all(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:]))
    return ConvergenceReport(tuple(rows), strictly, noninc)
