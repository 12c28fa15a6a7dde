"""Independent oracles used to cross-check the main computation paths.

Each oracle recomputes a quantity by a different method than the library
uses: the transport distance by enumerating vertices of the unit-Lipschitz
polytope instead of solving an LP, operator norms by power iteration
instead of SVD, group averaging by explicit conjugation sums instead of
coefficient masks, and subgroup lattices by brute-force closure instead of
the divisor parametrization.  They are deliberately slow and simple.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np

from .fixed_point import FuzzyTorus, GroupElement, TorusSubgroup
from .metric_core import FiniteMetricSpace, check_probability


def enumerate_lipschitz_vertices(space: FiniteMetricSpace) -> np.ndarray:
    """All vertices of {f : f_0 = 0, |f_i - f_j| <= d(i, j)}.

    A vertex is pinned by a spanning tree of tight constraints with signs,
    so the enumeration walks every (n-1)-edge spanning tree of the complete
    graph, every sign pattern, solves the tree for f by propagation from
    the root, and keeps the feasible results.  Exponential and meant for
    n <= 6 only.
    """
    n = space.n_points
    if n == 1:
        return np.zeros((1, 1))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    vertices = []
    for tree in combinations(edges, n - 1):
        # Spanning check by union-find.
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for i, j in tree:
            ri, rj = find(i), find(j)
            if ri == rj:
                acyclic = False
                break
            parent[ri] = rj
        if not acyclic:
            continue
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e, (i, j) in enumerate(tree):
            adjacency[i].append((j, e))
            adjacency[j].append((i, e))
        for signs in product((1.0, -1.0), repeat=n - 1):
            f = np.full(n, np.nan)
            f[0] = 0.0
            stack = [0]
            while stack:
                x = stack.pop()
                for y, e in adjacency[x]:
                    if np.isnan(f[y]):
                        i, j = tree[e]
                        step = signs[e] * space.dist[i, j]
                        # Tight constraint f_i - f_j = sign * d(i, j).
                        f[y] = f[x] + step if y == i else f[x] - step
                        stack.append(y)
            gaps = np.abs(f[:, None] - f[None, :]) - space.dist
            if np.max(gaps) <= 1e-9:
                vertices.append(f)
    return np.unique(np.round(np.asarray(vertices), 12), axis=0)


def mk_by_enumeration(
    space: FiniteMetricSpace,
    p: np.ndarray,
    q: np.ndarray,
    vertices: np.ndarray | None = None,
) -> float:
    """Transport distance as a maximum over unit-Lipschitz polytope vertices."""
    pw = check_probability(space, p)
    qw = check_probability(space, q)
    if vertices is None:
        vertices = enumerate_lipschitz_vertices(space)
    objective = vertices @ (pw - qw)
    return float(max(np.max(objective), 0.0))


def power_iteration_norm(a: np.ndarray, iters: int = 500, seed: int = 7) -> float:
    """Operator norm via power iteration on a* a."""
    m = np.asarray(a, dtype=complex)
    n = m.shape[0]
    gram = m.conj().T @ m
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = gram @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return float(np.sqrt(np.real(np.vdot(v, gram @ v))))


def average_by_conjugation(
    torus: FuzzyTorus, subgroup: TorusSubgroup, a: np.ndarray
) -> np.ndarray:
    """Group averaging as an explicit sum of conjugated copies."""
    total = np.zeros_like(np.asarray(a, dtype=complex))
    for g in sorted(subgroup.elements):
        w = torus.action_unitary(g)
        total += w @ a @ w.conj().T
    return total / subgroup.order


def brute_force_subgroups(q: int) -> list[frozenset[GroupElement]]:
    """All subgroups of Z_q x Z_q by closing every pair of generators.

    Subgroups of a rank-two abelian group need at most two generators, so
    closing all pairs and deduplicating enumerates the lattice.  Tiny q
    only.
    """
    elements = [(j, k) for j in range(q) for k in range(q)]
    found: set[frozenset[GroupElement]] = set()
    for g1 in elements:
        for g2 in elements:
            closure = {(0, 0)}
            frontier = [(0, 0)]
            while frontier:
                base = frontier.pop()
                for g in (g1, g2):
                    nxt = ((base[0] + g[0]) % q, (base[1] + g[1]) % q)
                    if nxt not in closure:
                        closure.add(nxt)
                        frontier.append(nxt)
            found.add(frozenset(closure))
    return sorted(found, key=lambda s: (len(s), sorted(s)))
