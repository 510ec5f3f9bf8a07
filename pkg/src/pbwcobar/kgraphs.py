"""Admissible graphs with two ground vertices and their operators (no weights).

Vertices are numbered ground first: 0 .. g-1 are ground, g .. g+m-1 aerial.

* ``out2``: every aerial vertex has an ordered pair of outgoing edges to two
  distinct vertices other than itself.
* ``in2``: every aerial vertex has an ordered pair of incoming edges from two
  distinct vertices other than itself.  Reversing all edges turns an in2
  graph into an out2 graph with the same data, so both are stored as one
  ordered pair per aerial vertex.

Graphs are identified up to relabeling the aerial vertices; the canonical key
is the lexicographically smallest pair list over all relabelings.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Sequence

from pbwcobar.errors import ContextError, ResourceError, ShapeError
from pbwcobar.polyvec import V_DUAL, V_SHIFT, Polyvector

OUT2 = "out2"
IN2 = "in2"
MODES = (OUT2, IN2)
DEFAULT_MAX_AERIAL = 3


def _relabel(pairs: Sequence[tuple[int, int]], perm: Sequence[int], g: int) -> tuple:
    """Aerial vertex a becomes perm[a]; returns the pair list in the new order."""
    def v(x):
        return x if x < g else g + perm[x - g]

    out = [None] * len(pairs)
    for a, (s, t) in enumerate(pairs):
        out[perm[a]] = (v(s), v(t))
    return tuple(out)


def canonical_key(pairs: Sequence[tuple[int, int]], ground: int = 2) -> tuple:
    m = len(pairs)
    return min(_relabel(pairs, p, ground) for p in itertools.permutations(range(m)))


@dataclass(frozen=True)
class AdmissibleGraph:
    m: int
    mode: str
    pairs: tuple  # ((u, v), ...) one ordered pair per aerial vertex
    ground: int = 2

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(self.pairs) != self.m:
            raise ShapeError("one edge pair per aerial vertex is required")
        for a, (s, t) in enumerate(self.pairs):
            me = self.ground + a
            total = self.ground + self.m
            if s == t or me in (s, t) or not (0 <= s < total and 0 <= t < total):
                raise ShapeError(f"aerial vertex {me} has an invalid edge pair {(s, t)}")

    @property
    def vertices(self) -> int:
        return self.ground + self.m

    def edges(self) -> list[tuple[int, int]]:
        """Directed edges (source, target) in slot order."""
        out = []
        for a, (s, t) in enumerate(self.pairs):
            me = self.ground + a
            if self.mode == OUT2:
                out += [(me, s), (me, t)]
            else:
                out += [(s, me), (t, me)]
        return out

    def reverse(self) -> AdmissibleGraph:
        return AdmissibleGraph(self.m, IN2 if self.mode == OUT2 else OUT2, self.pairs, self.ground)

    def key(self) -> tuple:
        return canonical_key(self.pairs, self.ground)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "ground": list(range(self.ground)),
            "aerial": list(range(self.ground, self.vertices)),
            "edges": [list(e) for e in self.edges()],
            "key": [list(p) for p in self.key()],
        }


def _all_pairs(m: int, ground: int):
    total = ground + m
    choices = []
    for a in range(m):
        me = ground + a
        others = [x for x in range(total) if x != me]
        choices.append(list(itertools.permutations(others, 2)))
    return itertools.product(*choices)


def enumerate_graphs(m: int, mode: str = OUT2, ground: int = 2, max_aerial: int = DEFAULT_MAX_AERIAL) -> list[AdmissibleGraph]:
    if m > max_aerial:
        raise ResourceError(f"{m} aerial vertices exceeds the cap {max_aerial}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    seen = {}
    for pairs in _all_pairs(m, ground):
        k = canonical_key(pairs, ground)
        if k not in seen:
            seen[k] = AdmissibleGraph(m, mode, k, ground)
    return [seen[k] for k in sorted(seen)]


def count_by_burnside(m: int, ground: int = 2) -> int:
    """Orbit count of raw pair assignments under aerial relabeling, by
    averaging fixed-point counts (independent of canonical keys)."""
    raw = list(_all_pairs(m, ground))
    total = 0
    for p in itertools.permutations(range(m)):
        total += sum(1 for pairs in raw if _relabel(pairs, p, ground) == tuple(pairs))
    return total // math.factorial(m)


# ----------------------------------------------------------------------------
# operators


def _coefficient(p: Polyvector, moms: Sequence[int]) -> Polyvector:
    for i in moms:
        p = p.d_momentum(i, "left")
    return p


def graph_operator(graph: AdmissibleGraph, aerial: Sequence[Polyvector] | Polyvector, ground: Sequence[Polyvector]) -> Polyvector:
    """Contract an out2 graph: edge (u -> v) carrying index i applies
    d/dmom_i to u (in slot order) and d/dcoord_i to v.  The result is the
    product of all vertex factors, aerial vertices first.

    Works in either polyvector context.  In2 graphs act through
    :func:`in2_cooperator`.
    """
    if graph.mode != OUT2:
        raise ContextError("graph_operator contracts out2 graphs; use in2_cooperator for in2")
    if isinstance(aerial, Polyvector):
        aerial = [aerial] * graph.m
    if len(aerial) != graph.m or len(ground) != graph.ground:
        raise ShapeError("one input per vertex is required")
    inputs = list(ground) + list(aerial)
    n, ctx = inputs[0].n if inputs else 0, inputs[0].context if inputs else V_DUAL
    for a, p in enumerate(aerial):
        if p.arities() - {2} and not p.is_zero():
            raise ShapeError(f"aerial vertex {graph.ground + a} needs a 2-vector, got arities {sorted(p.arities())}")
    for p in ground:
        if p.arities() - {0}:
            raise ShapeError("ground vertices take functions")
    edges = graph.edges()
    out = Polyvector.zero(n, ctx)
    order = list(range(graph.ground, graph.vertices)) + list(range(graph.ground))
    for idx in itertools.product(range(1, n + 1), repeat=len(edges)):
        prod = None
        for v in order:
            f = inputs[v]
            f = _coefficient(f, [i for (s, _), i in zip(edges, idx) if s == v])
            for (s, t), i in zip(edges, idx):
                if t == v:
                    f = f.d_coordinate(i, "left")
            if f.is_zero():
                prod = None
                break
            prod = f if prod is None else prod * f
        if prod is not None:
            out = out + prod
    return out


def in2_cooperator(graph: AdmissibleGraph, gamma: Polyvector, max_degree: int = 2) -> dict:
    """The in2 graph acting on a polyvector on V[1] as a co-operation
    Lambda(V)* -> (Lambda(V)*)^(x)2: the transpose of the reversed (out2)
    contraction evaluated on xi-monomials of degree <= max_degree.

    Returns {I: {(J, K): c}} with I, J, K sorted index tuples, e_I being the
    dual basis vector of xi_I.
    """
    if graph.mode != IN2:
        raise ContextError("in2_cooperator takes an in2 graph")
    if gamma.context != V_SHIFT:
        raise ContextError("in2 graphs act on polyvectors on V[1]")
    n = gamma.n
    zero = (0,) * n
    monos = [c for d in range(max_degree + 1) for c in itertools.combinations(range(1, n + 1), d)]
    rev = graph.reverse()
    out: dict = {}
    for J in monos:
        for K in monos:
            f = Polyvector(n, {(zero, J): 1}, V_SHIFT)
            g = Polyvector(n, {(zero, K): 1}, V_SHIFT)
            val = graph_operator(rev, gamma, [f, g])
            for (e, I), c in val.terms.items():
                if any(e):
                    continue
                row = out.setdefault(I, {})
                row[(J, K)] = row.get((J, K), 0) + c
    return {I: {k: v for k, v in row.items() if v} for I, row in sorted(out.items())}


def export_json(graphs: Sequence[AdmissibleGraph]) -> str:
    return json.dumps({"count": len(graphs), "graphs": [g.to_json() for g in graphs]}, indent=2)


def wedge_graph(mode: str = OUT2) -> AdmissibleGraph:
    """m = 1 with both edges between the aerial vertex and the two ground vertices."""
    return AdmissibleGraph(1, mode, ((0, 1),))


def empty_graph(mode: str = OUT2) -> AdmissibleGraph:
    return AdmissibleGraph(0, mode, ())
