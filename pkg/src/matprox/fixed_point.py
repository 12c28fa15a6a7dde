"""Fuzzy tori, dual actions of finite torus subgroups, and fixed-point data.

The fuzzy torus of order q is the full q x q matrix algebra generated by
the clock matrix U = diag(1, w, ..., w^(q-1)) and the cyclic shift V, with
w = exp(2 pi i p / q), gcd(p, q) = 1, and the commutation relation
VU = w UV.  The monomials U^m V^n form an orthonormal basis for the
normalized trace, and the finite torus group Z_q x Z_q acts dually by
scaling the (m, n) coefficient with exp(2 pi i (j m + k n) / q).

On top of that sit: the action Lipschitz seminorm (largest displacement of
an element under the nontrivial group elements, relative to a length
function), the subgroup lattice of Z_q x Z_q with its Hausdorff geometry,
Haar-averaging conditional expectations onto fixed-point subalgebras (exact
finite averages, implemented as coefficient masks), sampled expectation
gaps between two subgroups, bridge-style reach reports, and a fully
commutative cross-check where the same averaging story runs on functions
over a finite metric space acted on by isometric permutations.

Everything is a finite-group specialization: the acting group is the
q-torsion subgroup of the 2-torus, Haar integrals are uniform averages, and
the seminorm maximum runs over the q^2 - 1 nontrivial group elements (only
those act on the algebra, since a root of unity relation pins the acting
parameters).  Reported suprema over unit balls are sampled lower bounds
and are labeled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    ActionNotIsometricError,
    ConfigError,
    InputShapeError,
)
from .matrix_algebra import operator_norm, operator_norms, require_self_adjoint
from .metric_core import (
    FiniteMetricSpace,
    hausdorff_distance,
    lipschitz_seminorm,
)

GroupElement = tuple[int, int]

# Every report produced here is for the finite model: the clock-and-shift
# matrix algebra acted on by the q-torsion subgroup of the 2-torus, with
# uniform averages in place of Haar integrals.  Outputs carry this note.
SPECIALIZATION_NOTE = (
    "finite model: q-torsion torus subgroup acting on a clock-shift matrix algebra"
)


class FuzzyTorus:
    """Clock and shift matrices of order q with twist exp(2 pi i p / q)."""

    def __init__(self, q: int, p: int = 1) -> None:
        if q < 2:
            raise ConfigError("fuzzy torus order must be at least 2")
        if math.gcd(p % q, q) != 1:
            raise ConfigError(f"twist parameter p={p} must be coprime to q={q}")
        self.q = int(q)
        self.p = int(p % q)
        self.omega = complex(np.exp(2j * np.pi * self.p / self.q))
        # Powers of the twist root, indexed mod q; used for U and the basis.
        self._twist_powers = np.exp(2j * np.pi * self.p * np.arange(q) / q)
        # Characters of the acting group are p-independent roots of unity.
        self._roots = np.exp(2j * np.pi * np.arange(q) / q)
        self.clock = np.diag(self._twist_powers)
        shift = np.zeros((q, q), dtype=complex)
        shift[np.arange(q), (np.arange(q) + 1) % q] = 1.0
        self.shift = shift
        rows = np.arange(q)[:, None]
        offs = np.arange(q)[None, :]
        self._gather_rows = np.broadcast_to(rows, (q, q))
        self._gather_cols = (rows + offs) % q
        # W[r, m] = w^(m r); coefficient transform satisfies W^H W = q I.
        self._char = self._twist_powers[np.outer(rows.ravel(), rows.ravel()) % q]
        self._m_grid = np.broadcast_to(rows, (q, q))
        self._n_grid = np.broadcast_to(offs, (q, q))
        self._phase_cache: np.ndarray | None = None

    # -- basis and coefficients ------------------------------------------

    def monomial(self, m: int, n: int) -> np.ndarray:
        """The basis element U^m V^n (unit trace-norm, unitary)."""
        q = self.q
        mat = np.zeros((q, q), dtype=complex)
        r = np.arange(q)
        mat[r, (r + n) % q] = self._twist_powers[(m * r) % q]
        return mat

    def group_elements(self) -> list[GroupElement]:
        return [(j, k) for j in range(self.q) for k in range(self.q)]

    def to_coefficients(self, a: np.ndarray) -> np.ndarray:
        """Expand a matrix over the monomial basis; c[m, n] multiplies U^m V^n."""
        mat = np.asarray(a, dtype=complex)
        if mat.shape != (self.q, self.q):
            raise InputShapeError(
                f"element has shape {mat.shape}, torus dimension is {self.q}"
            )
        diag_offsets = mat[self._gather_rows, self._gather_cols]
        return (self._char.conj().T @ diag_offsets) / self.q

    def from_coefficients(self, c: np.ndarray) -> np.ndarray:
        coeff = np.asarray(c, dtype=complex)
        if coeff.shape != (self.q, self.q):
            raise InputShapeError(
                f"coefficients have shape {coeff.shape}, expected ({self.q}, {self.q})"
            )
        diag_offsets = self._char @ coeff
        mat = np.zeros((self.q, self.q), dtype=complex)
        mat[self._gather_rows, self._gather_cols] = diag_offsets
        return mat

    # -- the dual action --------------------------------------------------

    def character_phases(self, g: GroupElement) -> np.ndarray:
        """Phase grid exp(2 pi i (j m + k n) / q) of a group element."""
        j, k = g
        idx = (j * self._m_grid + k * self._n_grid) % self.q
        return self._roots[idx]

    def all_character_phases(self) -> np.ndarray:
        """Phase grids of every group element, row-major (j, k) order."""
        if self._phase_cache is None:
            q = self.q
            js = np.arange(q).repeat(q)
            ks = np.tile(np.arange(q), q)
            idx = (
                js[:, None, None] * self._m_grid[None, :, :]
                + ks[:, None, None] * self._n_grid[None, :, :]
            ) % q
            phases = self._roots[idx]
            phases.setflags(write=False)
            self._phase_cache = phases
        return self._phase_cache

    def dual_action(self, g: GroupElement, a: np.ndarray) -> np.ndarray:
        """Apply the automorphism of the group element (j, k)."""
        c = self.to_coefficients(a)
        return self.from_coefficients(self.character_phases(g) * c)

    def action_unitary(self, g: GroupElement) -> np.ndarray:
        """A unitary whose conjugation realizes the group element's action.

        Shift powers scale the clock index, clock powers scale the shift
        index; inverting the twist parameter mod q aligns the conjugation
        phases with the dual characters.
        """
        j, k = g
        p_inv = pow(self.p, -1, self.q)
        s = (p_inv * j) % self.q
        t = (-p_inv * k) % self.q
        return np.linalg.matrix_power(self.shift, s) @ np.linalg.matrix_power(
            self.clock, t
        )


def dual_action(torus: FuzzyTorus, g: GroupElement, a: np.ndarray) -> np.ndarray:
    return torus.dual_action(g, a)


# ---------------------------------------------------------------------------
# Length functions on the finite torus group.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LengthFunction:
    """A length function on Z_q x Z_q: zero only at the identity, symmetric
    under inversion, subadditive.  User-supplied value tables are validated
    against all three axioms at construction."""

    q: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        q = self.q
        if vals.shape != (q, q):
            raise ConfigError(f"length table has shape {vals.shape}, expected ({q}, {q})")
        tol = 1e-12
        if abs(vals[0, 0]) > tol:
            raise ConfigError("length of the identity must be zero")
        positive = vals.copy()
        positive[0, 0] = 1.0
        if np.min(positive) <= 0.0:
            raise ConfigError("length must be positive away from the identity")
        inv = vals[(-np.arange(q)) % q][:, (-np.arange(q)) % q]
        if np.max(np.abs(vals - inv)) > tol:
            raise ConfigError("length must be invariant under inversion")
        r = np.arange(q)
        j1 = r[:, None, None, None]
        k1 = r[None, :, None, None]
        j2 = r[None, None, :, None]
        k2 = r[None, None, None, :]
        lhs = vals[(j1 + j2) % q, (k1 + k2) % q]
        rhs = vals[j1, k1] + vals[j2, k2]
        worst = float(np.max(lhs - rhs))
        if worst > tol:
            raise ConfigError(f"length is not subadditive (excess {worst:.3e})")
        vals = vals.copy()
        vals[0, 0] = 0.0
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def max_arc(cls, q: int) -> "LengthFunction":
        """Largest coordinate angle, with angles wrapped to (-pi, pi]."""
        idx = np.arange(q)
        arc = 2.0 * np.pi * np.minimum(idx, q - idx) / q
        vals = np.maximum(arc[:, None], arc[None, :])
        return cls(q, vals)

    def __call__(self, g: GroupElement) -> float:
        return float(self.values[g[0] % self.q, g[1] % self.q])

    def flat_nontrivial(self) -> np.ndarray:
        """Lengths of all group elements except the identity, row-major order."""
        return self.values.ravel()[1:]


# ---------------------------------------------------------------------------
# Subgroups of Z_q x Z_q.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusSubgroup:
    """An explicit subgroup of Z_q x Z_q, validated at construction."""

    q: int
    elements: frozenset[GroupElement]
    generators: tuple[GroupElement, ...] = ()

    def __post_init__(self) -> None:
        q = self.q
        elems = frozenset((int(j) % q, int(k) % q) for j, k in self.elements)
        if (0, 0) not in elems:
            raise ConfigError("a subgroup must contain the identity")
        for a in elems:
            if ((-a[0]) % q, (-a[1]) % q) not in elems:
                raise ConfigError(f"subgroup lacks the inverse of {a}")
            for b in elems:
                if ((a[0] + b[0]) % q, (a[1] + b[1]) % q) not in elems:
                    raise ConfigError(f"subgroup is not closed: {a} + {b} escapes")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(
            self,
            "generators",
            tuple((int(j) % q, int(k) % q) for j, k in self.generators),
        )

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_array(self) -> np.ndarray:
        return np.asarray(sorted(self.elements), dtype=int)

    @classmethod
    def trivial(cls, q: int) -> "TorusSubgroup":
        return cls(q, frozenset({(0, 0)}), ((0, 0),))

    @classmethod
    def full(cls, q: int) -> "TorusSubgroup":
        return cls(
            q,
            frozenset((j, k) for j in range(q) for k in range(q)),
            ((1, 0), (0, 1)),
        )

    @classmethod
    def from_generators(cls, q: int, *gens: GroupElement) -> "TorusSubgroup":
        norm = tuple((int(j) % q, int(k) % q) for j, k in gens)
        elems = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            base = frontier.pop()
            for g in norm:
                nxt = ((base[0] + g[0]) % q, (base[1] + g[1]) % q)
                if nxt not in elems:
                    elems.add(nxt)
                    frontier.append(nxt)
        return cls(q, frozenset(elems), norm)

    @classmethod
    def cyclic_first_factor(cls, q: int, m: int) -> "TorusSubgroup":
        """The copy of Z_m inside the first factor (m must divide q)."""
        if m < 1 or q % m != 0:
            raise ConfigError(f"{m} does not divide {q}")
        return cls.from_generators(q, (q // m, 0))


def _divisors(x: int) -> list[int]:
    return [d for d in range(1, x + 1) if x % d == 0]


def enumerate_subgroups(q: int) -> list[TorusSubgroup]:
    """All subgroups of Z_q x Z_q as explicit element lists.

    Uses the standard triangular-basis parametrization of subgroups of a
    product of two cyclic groups: divisors a, b of q and a shear s ranging
    over multiples of a / gcd(a, q/b).  Results are deduplicated and sorted
    by (order, elements).  Desk scale only (q <= 24).
    """
    if q < 2:
        raise ConfigError("group order must be at least 2")
    if q > 24:
        raise ConfigError("subgroup enumeration is desk scale only (q <= 24)")
    seen: dict[frozenset[GroupElement], TorusSubgroup] = {}
    for a in _divisors(q):
        for b in _divisors(q):
            g = math.gcd(a, q // b)
            for t in range(g):
                s = t * a // g
                elems = frozenset(
                    ((i * a + j * s) % q, (j * b) % q)
                    for i in range(q // a)
                    for j in range(q // b)
                )
                if elems not in seen:
                    seen[elems] = TorusSubgroup(
                        q, elems, ((a % q, 0), (s % q, b % q))
                    )
    return sorted(
        seen.values(), key=lambda h: (h.order, sorted(h.elements))
    )


def subgroup_hausdorff(
    ell: LengthFunction, h: TorusSubgroup, k: TorusSubgroup
) -> float:
    """Hausdorff distance of two subgroups under the invariant metric
    d(g, g') = length(g' - g)."""
    if h.q != k.q or h.q != ell.q:
        raise InputShapeError("subgroups and length function must share one ambient group")
    a = h.element_array()
    b = k.element_array()
    diff = (b[None, :, :] - a[:, None, :]) % h.q
    gaps = ell.values[diff[..., 0], diff[..., 1]]
    return float(max(np.max(np.min(gaps, axis=1)), np.max(np.min(gaps, axis=0))))


# ---------------------------------------------------------------------------
# Averaging expectations and fixed-point subalgebras.
# ---------------------------------------------------------------------------


class AveragingExpectation:
    """Uniform average of the dual action over a subgroup.

    Averaging the character exp(2 pi i (j m + k n) / q) over a subgroup
    yields one when the character is trivial on it and zero otherwise, so
    the expectation acts by keeping exactly the basis coefficients whose
    character annihilates the subgroup.  The mask is computed in exact
    integer arithmetic; the brute-force average of conjugated copies serves
    as an independent oracle in the tests.
    """

    def __init__(self, torus: FuzzyTorus, subgroup: TorusSubgroup) -> None:
        if subgroup.q != torus.q:
            raise InputShapeError(
                f"subgroup lives in Z_{subgroup.q}^2, torus has order {torus.q}"
            )
        self.torus = torus
        self.subgroup = subgroup
        elems = subgroup.element_array()
        pairing = (
            elems[:, 0, None, None] * torus._m_grid[None, :, :]
            + elems[:, 1, None, None] * torus._n_grid[None, :, :]
        ) % torus.q
        mask = np.all(pairing == 0, axis=0)
        mask.setflags(write=False)
        self.mask = mask

    def __call__(self, a: np.ndarray) -> np.ndarray:
        c = self.torus.to_coefficients(a)
        return self.torus.from_coefficients(np.where(self.mask, c, 0.0))

    @property
    def fixed_dimension(self) -> int:
        return int(np.sum(self.mask))

    def fixed_basis(self) -> list[GroupElement]:
        ms, ns = np.nonzero(self.mask)
        return sorted(zip(ms.tolist(), ns.tolist()))


def averaging_expectation(
    torus: FuzzyTorus, subgroup: TorusSubgroup, a: np.ndarray
) -> np.ndarray:
    return AveragingExpectation(torus, subgroup)(a)


def fixed_subalgebra_basis(
    torus: FuzzyTorus, subgroup: TorusSubgroup
) -> list[GroupElement]:
    """Monomial exponents spanning the fixed-point subalgebra of a subgroup.

    Always contains (0, 0); the count times the subgroup order equals q^2
    (annihilator duality for the finite torus)."""
    return AveragingExpectation(torus, subgroup).fixed_basis()


# ---------------------------------------------------------------------------
# The action Lipschitz seminorm.
# ---------------------------------------------------------------------------


def _difference_stack(torus: FuzzyTorus, stack: np.ndarray) -> np.ndarray:
    """For a (count, q, q) stack, the array of a - alpha^g(a) over all
    nontrivial g, shaped (count, q^2 - 1, q, q)."""
    q = torus.q
    coeffs = np.einsum(
        "mr,ern->emn",
        torus._char.conj().T,
        stack[:, torus._gather_rows, torus._gather_cols],
    ) / q
    phases = torus.all_character_phases()[1:]
    scaled = (1.0 - phases)[None, :, :, :] * coeffs[:, None, :, :]
    diag_offsets = np.einsum("rm,egmn->egrn", torus._char, scaled)
    out = np.zeros((stack.shape[0], q * q - 1, q, q), dtype=complex)
    out[:, :, torus._gather_rows, torus._gather_cols] = diag_offsets
    return out


def action_lip_seminorms(
    torus: FuzzyTorus, ell: LengthFunction, stack: np.ndarray
) -> np.ndarray:
    """Vectorized action seminorm over a (count, q, q) stack of elements."""
    s = np.asarray(stack, dtype=complex)
    if s.ndim != 3 or s.shape[1:] != (torus.q, torus.q):
        raise InputShapeError(
            f"stack has shape {s.shape}, expected (count, {torus.q}, {torus.q})"
        )
    if ell.q != torus.q:
        raise InputShapeError("length function and torus orders differ")
    diffs = _difference_stack(torus, s)
    norms = operator_norms(diffs)
    return np.max(norms / ell.flat_nontrivial()[None, :], axis=1)


def action_lip_seminorm(
    torus: FuzzyTorus,
    ell: LengthFunction,
    a: np.ndarray,
    *,
    validate: bool = True,
) -> float:
    """Largest displacement ||a - alpha^g(a)|| / length(g) over nontrivial g.

    The maximum runs over the q^2 - 1 nontrivial elements of the acting
    finite torus group.  Vanishes exactly on the scalars; invariant under
    the action itself.
    """
    mat = np.asarray(a, dtype=complex)
    if validate:
        mat = require_self_adjoint(mat)
    return float(action_lip_seminorms(torus, ell, mat[None])[0])


def action_kernel_dimension(
    torus: FuzzyTorus, tol: float = 1e-8
) -> int:
    """Dimension of the joint fixed space of all nontrivial automorphisms.

    Realizes each automorphism as conjugation by a unitary, stacks the
    superoperators (identity minus conjugation) into a Gram matrix and
    counts its numerically zero eigenvalues.  Equals one exactly when the
    twist is invertible: only the identity coefficient survives every
    character.
    """
    q = torus.q
    dim = q * q
    gram = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for g in torus.group_elements()[1:]:
        w = torus.action_unitary(g)
        super_op = eye - np.kron(w, w.conj())
        gram += super_op.conj().T @ super_op
    eigs = np.linalg.eigvalsh(gram)
    return int(np.sum(eigs <= tol * max(1.0, float(eigs[-1]))))


# ---------------------------------------------------------------------------
# Expectation gaps and bridge-style reports.
# ---------------------------------------------------------------------------


def _structured_lines(
    torus: FuzzyTorus, support: Iterable[GroupElement]
) -> list[np.ndarray]:
    """Self-adjoint single-coefficient elements covering a coefficient set.

    The gap between two averaging expectations is attained on coefficient
    lines, so these are always sampled alongside random draws."""
    q = torus.q
    seen: set[GroupElement] = set()
    out: list[np.ndarray] = []
    for m, n in support:
        partner = ((-m) % q, (-n) % q)
        key = min((m, n), partner)
        if key in seen:
            continue
        seen.add(key)
        mono = torus.monomial(*key)
        for candidate in (mono + mono.conj().T, 1j * (mono - mono.conj().T)):
            if float(np.max(np.abs(candidate))) > 1e-12:
                out.append(candidate)
    return out


def _centered(torus: FuzzyTorus, a: np.ndarray) -> np.ndarray:
    return a - (np.trace(a) / torus.q) * np.eye(torus.q)


def _default_gap_sampler(
    torus: FuzzyTorus, count: int, seed: int
) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    q = torus.q
    out = []
    for _ in range(count):
        g = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
        out.append((g + g.conj().T) / 2.0)
    return out


def _normalized_unit_ball(
    torus: FuzzyTorus, ell: LengthFunction, candidates: Sequence[np.ndarray]
) -> list[np.ndarray]:
    """Center candidates, rescale each to action seminorm exactly one."""
    kept: list[np.ndarray] = []
    centered = [_centered(torus, a) for a in candidates]
    if not centered:
        return kept
    values = action_lip_seminorms(torus, ell, np.stack(centered))
    for a, val in zip(centered, values):
        if val > 1e-12:
            kept.append(a / val)
    return kept


def expectation_gap(
    torus: FuzzyTorus,
    ell: LengthFunction,
    h: TorusSubgroup,
    k: TorusSubgroup,
    count: int = 64,
    seed: int = 0,
    sampler: Callable[[FuzzyTorus, int, int], Sequence[np.ndarray]] | None = None,
) -> float:
    """Sampled sup of ||E_h(a) - E_k(a)|| over the traceless unit ball.

    Samples are structured coefficient lines on the symmetric difference of
    the two fixed-coefficient sets plus random self-adjoint draws (the
    random part depends only on the seed, so tables over varying subgroups
    share their random samples).  This is a lower bound on the true
    supremum of a convex maximization; it is exactly zero when the
    subgroups agree.
    """
    if count < 1:
        raise ConfigError("need at least one sample")
    e_h = AveragingExpectation(torus, h)
    e_k = AveragingExpectation(torus, k)
    signed_mask = e_h.mask.astype(float) - e_k.mask.astype(float)
    support = np.argwhere(e_h.mask ^ e_k.mask)
    draw = sampler if sampler is not None else _default_gap_sampler
    candidates = _structured_lines(torus, map(tuple, support.tolist()))
    candidates.extend(draw(torus, count, seed))
    best = 0.0
    for a in _normalized_unit_ball(torus, ell, candidates):
        gap_elem = torus.from_coefficients(signed_mask * torus.to_coefficients(a))
        best = max(best, operator_norm(gap_elem))
    return best


@dataclass(frozen=True)
class FixedPointBridgeReport:
    """Sampled reach data for the bridge between two fixed-point subalgebras.

    The bridge is the ambient algebra with the two canonical injections and
    the unit pivot (height zero).  Each direction's value is the worst
    sampled bridge norm of a unit-ball element of one fixed algebra against
    its witness, the other expectation applied to it (feasible because the
    expectations do not increase the seminorm).  Sampled, not certified.
    """

    q: int
    p: int
    left_generators: tuple[GroupElement, ...]
    right_generators: tuple[GroupElement, ...]
    haus_ell: float
    worst_left_to_right: float
    worst_right_to_left: float
    reach_sampled: float
    dim_fixed_left: int
    dim_fixed_right: int
    count: int
    seed: int
    certified: bool = False
    model: str = SPECIALIZATION_NOTE


def _directed_bridge_value(
    torus: FuzzyTorus,
    ell: LengthFunction,
    source: AveragingExpectation,
    target: AveragingExpectation,
    count: int,
    seed: int,
) -> float:
    # Elements fixed by the source whose coefficients the target kills.
    if bool(np.all(target.mask | ~source.mask)):
        # The source algebra embeds in the target one; the identity witness
        # gives bridge norm zero.
        return 0.0
    informative = np.argwhere(source.mask & ~target.mask)
    candidates = _structured_lines(torus, map(tuple, informative.tolist()))
    for raw in _default_gap_sampler(torus, count, seed):
        candidates.append(source(raw))
    best = 0.0
    for a in _normalized_unit_ball(torus, ell, candidates):
        best = max(best, operator_norm(a - target(a)))
    return best


def fixed_point_bridge(
    torus: FuzzyTorus,
    ell: LengthFunction,
    h: TorusSubgroup,
    k: TorusSubgroup,
    count: int = 64,
    seed: int = 0,
) -> FixedPointBridgeReport:
    """Reach report for the unit-pivot bridge between two fixed algebras."""
    e_h = AveragingExpectation(torus, h)
    e_k = AveragingExpectation(torus, k)
    forward = _directed_bridge_value(torus, ell, e_h, e_k, count, seed)
    backward = _directed_bridge_value(torus, ell, e_k, e_h, count, seed)
    return FixedPointBridgeReport(
        q=torus.q,
        p=torus.p,
        left_generators=h.generators,
        right_generators=k.generators,
        haus_ell=subgroup_hausdorff(ell, h, k),
        worst_left_to_right=forward,
        worst_right_to_left=backward,
        reach_sampled=max(forward, backward),
        dim_fixed_left=e_h.fixed_dimension,
        dim_fixed_right=e_k.fixed_dimension,
        count=count,
        seed=seed,
    )


def fixed_point_sweep(
    q_list: Sequence[int], count: int = 48, seed: int = 0
) -> list[dict]:
    """Gap versus subgroup-Hausdorff rows across torus orders.

    For each order q, runs the divisor chain of first-factor cyclic
    subgroups against the full first factor, exhibiting the gap shrinking
    with the Hausdorff distance across scales.
    """
    rows = []
    for q in q_list:
        torus = FuzzyTorus(q, 1)
        ell = LengthFunction.max_arc(q)
        limit = TorusSubgroup.cyclic_first_factor(q, q)
        for m in _divisors(q):
            sub = TorusSubgroup.cyclic_first_factor(q, m)
            rows.append(
                {
                    "q": q,
                    "m": m,
                    "haus_ell": subgroup_hausdorff(ell, sub, limit),
                    "gap_sampled": expectation_gap(
                        torus, ell, sub, limit, count=count, seed=seed
                    ),
                    "dim_fixed": AveragingExpectation(torus, sub).fixed_dimension,
                }
            )
    return rows


# ---------------------------------------------------------------------------
# Commutative cross-check: permutation actions on functions over a space.
# ---------------------------------------------------------------------------


def cyclic_rotation_group(n: int) -> list[tuple[int, ...]]:
    """The rotations of an n-point cycle as permutation tuples."""
    return [tuple((i + k) % n for i in range(n)) for k in range(n)]


def _check_permutation_group(
    space: FiniteMetricSpace, perms: Sequence[Sequence[int]]
) -> list[tuple[int, ...]]:
    n = space.n_points
    normalized = []
    for sigma in perms:
        tup = tuple(int(x) for x in sigma)
        if sorted(tup) != list(range(n)):
            raise ConfigError(f"{tup} is not a permutation of {n} points")
        permuted = space.dist[np.ix_(tup, tup)]
        if not np.array_equal(permuted, space.dist):
            raise ActionNotIsometricError(
                f"permutation {tup} does not preserve the distance matrix"
            )
        normalized.append(tup)
    group = set(normalized)
    if tuple(range(n)) not in group:
        raise ConfigError("a permutation group must contain the identity")
    for s in group:
        for t in group:
            if tuple(s[t[i]] for i in range(n)) not in group:
                raise ConfigError("permutation set is not closed under composition")
    return normalized


def _orbits(perms: Sequence[tuple[int, ...]], n: int) -> list[tuple[int, ...]]:
    seen = [False] * n
    orbits = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for sigma in perms:
                y = sigma[x]
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        for x in orbit:
            seen[x] = True
        orbits.append(tuple(sorted(orbit)))
    return orbits


def orbit_average(
    orbits: Sequence[Sequence[int]], values: np.ndarray
) -> np.ndarray:
    """Replace a function by its mean on each orbit."""
    out = np.array(values, dtype=float)
    for orbit in orbits:
        idx = list(orbit)
        out[idx] = float(np.mean(out[idx]))
    return out


def _quotient_space(
    space: FiniteMetricSpace, orbits: Sequence[tuple[int, ...]]
) -> FiniteMetricSpace:
    k = len(orbits)
    d0 = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            block = space.dist[np.ix_(orbits[i], orbits[j])]
            d0[i, j] = d0[j, i] = float(np.min(block))
    # Min-pairwise distances need not satisfy the triangle inequality;
    # the shortest-path closure is the actual quotient metric.
    closed = d0.copy()
    for via in range(k):
        closed = np.minimum(closed, closed[:, via, None] + closed[None, via, :])
    labels = tuple("O" + "_".join(str(x) for x in orbit) for orbit in orbits)
    return FiniteMetricSpace(labels, closed)


@dataclass(frozen=True)
class CommutativeFixedPointReport:
    orbits: tuple[tuple[int, ...], ...]
    fixed_dimension: int
    quotient: FiniteMetricSpace
    lip_contraction_violation: float
    sampled_reach: float
    orbit_diameter_bound: float
    haus_to_representatives: float
    reach_within_geometry: bool
    count: int
    seed: int


def commutative_fixed_point_check(
    space: FiniteMetricSpace,
    group: Sequence[Sequence[int]],
    subgroup: Sequence[Sequence[int]],
    count: int = 256,
    seed: int = 0,
) -> CommutativeFixedPointReport:
    """Orbit-averaging expectation on functions, with geometry comparison.

    The fixed algebra of a subgroup of isometric permutations is the
    functions constant on its orbits, i.e. the functions on the quotient
    space (min-pairwise orbit distances closed under shortest paths).  The
    check verifies the Lipschitz contraction of the averaging expectation
    on sampled functions and compares the sampled bridge reach (worst sup
    gap between a unit-Lipschitz function and its average) against the
    geometric displacement bound, the largest orbit diameter.
    """
    group_norm = _check_permutation_group(space, group)
    sub_norm = _check_permutation_group(space, subgroup)
    members = set(group_norm)
    for sigma in sub_norm:
        if sigma not in members:
            raise ConfigError("subgroup contains a permutation outside the group")
    orbits = tuple(_orbits(sub_norm, space.n_points))
    quotient = _quotient_space(space, orbits)

    rng = np.random.default_rng(seed)
    n = space.n_points
    samples = []
    for i in range(n):
        samples.append(np.array(space.dist[i], dtype=float))
    for _ in range(count):
        f = rng.uniform(-1.0, 1.0, size=n)
        lip = lipschitz_seminorm(space, f)
        if lip > 0.0:
            f = f * (rng.uniform(0.0, 1.0) / lip)
        samples.append(f)

    worst_violation = -np.inf
    reach = 0.0
    for f in samples:
        averaged = orbit_average(orbits, f)
        worst_violation = max(
            worst_violation,
            lipschitz_seminorm(space, averaged) - lipschitz_seminorm(space, f),
        )
        lip = lipschitz_seminorm(space, f)
        if lip <= 1.0 + 1e-12:
            reach = max(reach, float(np.max(np.abs(f - averaged))))

    orbit_diam = 0.0
    for orbit in orbits:
        block = space.dist[np.ix_(orbit, orbit)]
        orbit_diam = max(orbit_diam, float(np.max(block)))
    reps = [orbit[0] for orbit in orbits]
    haus_reps = hausdorff_distance(space, range(n), reps)
    return CommutativeFixedPointReport(
        orbits=orbits,
        fixed_dimension=len(orbits),
        quotient=quotient,
        lip_contraction_violation=float(worst_violation),
        sampled_reach=reach,
        orbit_diameter_bound=orbit_diam,
        haus_to_representatives=haus_reps,
        reach_within_geometry=reach <= orbit_diam + DEFAULT_TOLERANCES.algebraic,
        count=count,
        seed=seed,
    )
