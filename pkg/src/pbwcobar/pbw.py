"""hbar-adic rewriting for algebras T(V)[hbar] / (x_i x_j - x_j x_i - R_ij).

Words are rewritten toward sorted order: a descent x_j x_i (j > i) becomes
x_i x_j - R_ij.  Every R_ij lies in hbar T(V), so each step either removes an
inversion at the same hbar order or raises the hbar order; with hbar^(M+1) = 0
this terminates.  The overlaps x_k x_j x_i (k > j > i) are the only
ambiguities, so by the diamond lemma the relations are PBW mod hbar^(M+1)
exactly when every overlap resolves.  The report cross-checks this against
graded dimensions computed by exact rank.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from pbwcobar import linalg
from pbwcobar.coalg import EXTERIOR, CoalgebraSpec
from pbwcobar.complexes import KOSZUL, CobarComplex, Derivation, lift_cycle
from pbwcobar.errors import ContextError, GradingError, PreconditionError
from pbwcobar.polyvec import PoissonBivector
from pbwcobar.tensor import (
    DEFAULT_ORDER,
    Element,
    Scalar,
    as_fraction,
    coordinates,
    permutation_sign,
    sym,
)

# ----------------------------------------------------------------------------
# Lie algebras (Jacobi optional)


@dataclass
class LieAlgebra:
    """Structure constants [x_i, x_j] = sum_k c_ij^k x_k, 1-based, stored for i < j."""

    n: int
    constants: dict  # {(i, j): {k: Fraction}}
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        clean: dict = {}
        for (i, j), row in self.constants.items():
            if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"bad index pair {(i, j)} for dimension {self.n}")
            s = 1
            if i > j:
                i, j, s = j, i, -1
            tgt = clean.setdefault((i, j), {})
            for k, v in row.items():
                if not 1 <= k <= self.n:
                    raise ValueError(f"bad output index {k}")
                tgt[k] = tgt.get(k, 0) + s * as_fraction(v)
        self.constants = {
            key: {k: v for k, v in sorted(row.items()) if v} for key, row in sorted(clean.items()) if any(row.values())
        }
        if self.names is None:
            self.names = tuple(f"x{i}" for i in range(1, self.n + 1))

    def bracket_basis(self, i: int, j: int) -> dict:
        if i < j:
            return dict(self.constants.get((i, j), {}))
        if i > j:
            return {k: -v for k, v in self.constants.get((j, i), {}).items()}
        return {}

    def bracket(self, a: Mapping, b: Mapping) -> dict:
        out: dict = {}
        for i, x in a.items():
            for j, y in b.items():
                for k, v in self.bracket_basis(i, j).items():
                    out[k] = out.get(k, 0) + x * y * v
        return {k: v for k, v in out.items() if v}

    def jacobiator(self) -> dict:
        """{(i, j, k): sum_cyc [[x_i, x_j], x_k]} over i < j < k, nonzero only."""
        out = {}
        for i, j, k in itertools.combinations(range(1, self.n + 1), 3):
            acc: dict = {}
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                for t, v in self.bracket(self.bracket({a: 1}, {b: 1}), {c: 1}).items():
                    acc[t] = acc.get(t, 0) + v
            acc = {t: v for t, v in acc.items() if v}
            if acc:
                out[(i, j, k)] = acc
        return out

    @property
    def jacobi_verified(self) -> bool:
        return not self.jacobiator()

    def poisson(self) -> PoissonBivector:
        return PoissonBivector.from_lie(self.n, self.constants)


BUILTIN_LIE = {
    "abelian": LieAlgebra(3, {}, ("x", "y", "z")),
    "h3": LieAlgebra(3, {(1, 2): {3: 1}}, ("x", "y", "z")),
    "sl2": LieAlgebra(3, {(1, 2): {3: 1}, (3, 1): {1: 2}, (3, 2): {2: -2}}, ("e", "f", "h")),
    "so3": LieAlgebra(3, {(1, 2): {3: 1}, (2, 3): {1: 1}, (3, 1): {2: 1}}),
    "nonjacobi": LieAlgebra(3, {(1, 2): {1: 1}, (2, 3): {2: 1}, (3, 1): {3: 1}}),
}


# ----------------------------------------------------------------------------
# relation sets


class RelationSet:
    """x_i x_j - x_j x_i = R_ij for i < j, with R_ij in hbar T(V) mod hbar^(M+1)."""

    def __init__(self, n: int, relations: Mapping[tuple[int, int], Element], order: int = DEFAULT_ORDER):
        self.n = n
        self.order = order
        self.generators = coordinates(n)
        rels = {}
        for (i, j), e in relations.items():
            if not (1 <= i < j <= n):
                raise ValueError(f"relations are indexed by pairs i < j, got {(i, j)}")
            if e.order != order:
                raise ContextError(f"relation {(i, j)} has truncation order {e.order}, expected {order}")
            for w, c in e.terms.items():
                if c[0]:
                    raise GradingError(f"R_{i}{j} has an hbar^0 term on {w}")
                for g in w:
                    if g not in self.generators:
                        raise ContextError(f"unknown generator {g} in R_{i}{j}")
            if not e.is_zero():
                rels[(i, j)] = e
        self.relations = dict(sorted(rels.items()))
        self._terms = {
            key: [(a, tuple(g.index[0] for g in w), c[a]) for w, c in e.terms.items() for a in range(1, order + 1) if c[a]]
            for key, e in self.relations.items()
        }
        self._nf_cache: dict = {}

    def relation(self, i: int, j: int) -> Element:
        return self.relations.get((i, j), Element.zero(self.order))

    def layer(self, m: int) -> dict:
        """The hbar^m coefficients {(i, j): {word: Fraction}}."""
        out = {}
        for key, e in self.relations.items():
            part = e.hbar_part(m)
            if part:
                out[key] = part
        return out

    @property
    def order1(self) -> dict:
        return self.layer(1)

    def with_order(self, order: int) -> RelationSet:
        return RelationSet(self.n, {k: e.truncate(order) for k, e in self.relations.items()}, order)

    def with_layer(self, m: int, layer: Mapping[tuple[int, int], Mapping]) -> RelationSet:
        """Replace the hbar^m layer, leaving all other orders untouched."""
        rels = {}
        keys = set(self.relations) | set(layer)
        for key in sorted(keys):
            e = self.relation(*key)
            kept = {w: Scalar([x if a != m else 0 for a, x in enumerate(c.coeffs)], self.order) for w, c in e.terms.items()}
            new = {w: Scalar.hbar_power(m, v, self.order) for w, v in layer.get(key, {}).items()}
            rels[key] = Element(list(kept.items()) + list(new.items()), self.order)
        return RelationSet(self.n, rels, self.order)

    def max_word_degree(self) -> int:
        return max((len(w) for e in self.relations.values() for w in e.terms), default=0)

    def hbar_weight(self) -> Fraction | None:
        """The w with a*w + len = 2 for every term hbar^a * word of every R_ij,
        or None if no such grading exists."""
        w = None
        for terms in self._terms.values():
            for a, word, _ in terms:
                v = Fraction(2 - len(word), a)
                if w is None:
                    w = v
                elif v != w:
                    return None
        return Fraction(0) if w is None else w

    def __eq__(self, other) -> bool:
        return isinstance(other, RelationSet) and (self.n, self.order, self.relations) == (
            other.n,
            other.order,
            other.relations,
        )

    def __repr__(self) -> str:
        return "RelationSet(" + ", ".join(f"R_{i}{j} = {e}" for (i, j), e in self.relations.items()) + ")"

    # ------------------------------------------------------------------
    # rewriting on integer words; results are {(hbar power, sorted word): Fraction}

    def _nf(self, word: tuple[int, ...], budget: int) -> dict:
        key = (word, budget)
        hit = self._nf_cache.get(key)
        if hit is not None:
            return hit
        p = next((t for t in range(len(word) - 1) if word[t] > word[t + 1]), None)
        if p is None:
            res = {(0, word): Fraction(1)}
        else:
            j, i = word[p], word[p + 1]
            u, v = word[:p], word[p + 2:]
            res = dict(self._nf(u + (i, j) + v, budget))
            for a, t, c in self._terms.get((i, j), ()):
                if a > budget:
                    continue
                for (a2, s), x in self._nf(u + t + v, budget - a).items():
                    k = (a + a2, s)
                    y = res.get(k, 0) - c * x
                    if y:
                        res[k] = y
                    else:
                        res.pop(k, None)
        self._nf_cache[key] = res
        return res

    def _nf_combination(self, terms: Sequence[tuple[int, tuple[int, ...], Fraction]]) -> dict:
        """NF of sum c * hbar^a * word."""
        out: dict = {}
        for a, w, c in terms:
            if a > self.order:
                continue
            for (a2, s), x in self._nf(w, self.order - a).items():
                k = (a + a2, s)
                y = out.get(k, 0) + c * x
                if y:
                    out[k] = y
                else:
                    out.pop(k, None)
        return out

    def _to_element(self, vec: Mapping) -> Element:
        acc: dict = {}
        for (a, w), c in vec.items():
            acc.setdefault(w, [0] * (self.order + 1))[a] += c
        return Element(
            {tuple(self.generators[i - 1] for i in w): Scalar(cs, self.order) for w, cs in acc.items()}, self.order
        )

    def _from_element(self, e: Element) -> list:
        return [(a, tuple(g.index[0] for g in w), c[a]) for w, c in e.terms.items() for a in range(self.order + 1) if c[a]]


def _word_indices(word, n: int) -> tuple[int, ...]:
    out = []
    for g in word:
        i = g if isinstance(g, int) else g.index[0] if g.index else None
        if i is None or not 1 <= i <= n or (not isinstance(g, int) and g.degree != 0):
            raise ContextError(f"{g} is not a coordinate generator of T(V), dim {n}")
        out.append(i)
    return tuple(out)


def relations_from_lie(g: LieAlgebra, order: int = DEFAULT_ORDER) -> RelationSet:
    """R_ij = hbar * sum_k c_ij^k x_k."""
    xs = coordinates(g.n)
    rels = {}
    for (i, j), row in g.constants.items():
        rels[(i, j)] = Element({(xs[k - 1],): Scalar.hbar_power(1, v, order) for k, v in row.items()}, order)
    return RelationSet(g.n, rels, order)


def relations_order1(alpha: PoissonBivector, order: int = DEFAULT_ORDER) -> RelationSet:
    """R_ij = hbar * Sym(alpha_ij) with the 1/k! symmetrization."""
    xs = coordinates(alpha.n)
    rels = {}
    for (i, j), poly in alpha.entries.items():
        e = Element.zero(order)
        for exps, c in poly.items():
            mono = tuple(xs[t] for t, k in enumerate(exps) for _ in range(k))
            e = e + sym(mono, order).scale(Scalar.hbar_power(1, c, order))
        rels[(i, j)] = e
    return RelationSet(alpha.n, rels, order)


def normal_form(word, R: RelationSet, M: int | None = None) -> Element:
    """Sorted normal form of a word (or an Element) mod hbar^(M+1)."""
    if M is not None and M != R.order:
        R = R.with_order(M)
    if isinstance(word, Element):
        if word.order != R.order:
            word = word.truncate(R.order)
        vec = R._nf_combination(R._from_element(word))
    else:
        vec = R._nf(_word_indices(word, R.n), R.order)
    return R._to_element(vec)


# ----------------------------------------------------------------------------
# overlaps and dimensions


def _overlap_defect(R: RelationSet, k: int, j: int, i: int) -> dict:
    """NF of (first rewrite at x_k x_j) minus NF of (first rewrite at x_j x_i)."""
    a = [(0, (j, k, i), Fraction(1))] + [(s, t + (i,), -c) for s, t, c in R._terms.get((j, k), ())]
    b = [(0, (k, i, j), Fraction(1))] + [(s, (k,) + t, -c) for s, t, c in R._terms.get((i, j), ())]
    return R._nf_combination(a + [(s, w, -c) for s, w, c in b])


@dataclass
class Overlap:
    triple: tuple[int, int, int]
    defect: Element
    first_order: int


@dataclass
class PBWReport:
    N: int
    M: int
    n: int
    dims: list[int | None]
    expected: list[int]
    level_dims: dict  # {(level k, degree d): dim}
    overlaps: list[Overlap]
    hbar_weight: Fraction | None
    verdict: bool
    notes: list[str] = field(default_factory=list)

    @property
    def confluent(self) -> bool:
        return not self.overlaps

    @property
    def dims_match(self) -> bool:
        return all(d == e for d, e in zip(self.dims, self.expected))

    def first_defect(self) -> Overlap | None:
        if not self.overlaps:
            return None
        return min(self.overlaps, key=lambda o: (o.first_order, tuple(-t for t in o.triple)))


def overlap_defects(R: RelationSet) -> list[Overlap]:
    out = []
    for k, j, i in itertools.combinations(range(R.n, 0, -1), 3):
        vec = _overlap_defect(R, k, j, i)
        if vec:
            out.append(Overlap((k, j, i), R._to_element(vec), min(a for a, _ in vec)))
    return out


def _sorted_words(n: int, length: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(1, n + 1), length))


def graded_dimensions(R: RelationSet, N: int) -> dict:
    """dim of (hbar^k A / hbar^(k+1) A) in word degree d, for k <= M, d <= N.

    Needs the homogenizing hbar-weight w (a*w + len = 2 on every relation
    term).  In weight W the algebra is Sorted_W / NF(I_W), where I_W is
    spanned by hbar^b u (x_i x_j - x_j x_i - R_ij) v; the level-k piece has
    dimension #sorted words at level k minus the rank jump of NF(I_W) when
    the coordinates at level k are included.
    """
    w = R.hbar_weight()
    if w is None:
        raise GradingError("relations are not homogeneous for any hbar-weight")
    M, n = R.order, R.n
    weights = sorted({d + k * w for d in range(N + 1) for k in range(M + 1)})
    out = {}
    for W in weights:
        gens = []
        for b in range(M + 1):
            L = W - b * w - 2  # total length of u and v
            if L < 0 or L.denominator != 1:
                continue
            L = int(L)
            linalg.check_size(n ** L * (L + 1) * max(1, len(R.relations)), f"ideal generators in weight {W}")
            for i, j in itertools.combinations(range(1, n + 1), 2):
                rel = [(0, (i, j), Fraction(1)), (0, (j, i), Fraction(-1))]
                rel += [(a, t, -c) for a, t, c in R._terms.get((i, j), ())]
                for split in range(L + 1):
                    for u in itertools.product(range(1, n + 1), repeat=split):
                        for v in itertools.product(range(1, n + 1), repeat=L - split):
                            vec = R._nf_combination([(a + b, u + t + v, c) for a, t, c in rel])
                            if vec:
                                gens.append(vec)
        levels = [k for k in range(M + 1) if (W - k * w) >= 0 and (W - k * w).denominator == 1]
        # rank of NF(I_W) restricted to levels < k
        rank_below = {}
        for k in range(M + 2):
            rank_below[k] = linalg.rank({key: c for key, c in g.items() if key[0] < k} for g in gens)
        for k in levels:
            d = int(W - k * w)
            if d > N:
                continue
            count = math.comb(d + n - 1, n - 1)
            out[(k, d)] = count - (rank_below[k + 1] - rank_below[k])
    return out


def pbw_check(R: RelationSet, N: int, M: int | None = None) -> PBWReport:
    if M is not None and M != R.order:
        R = R.with_order(M)
    M = R.order
    n = R.n
    expected = [math.comb(d + n - 1, n - 1) for d in range(N + 1)]
    overlaps = overlap_defects(R)
    notes = []
    w = R.hbar_weight()
    level_dims: dict = {}
    if w is None:
        dims: list = [None] * (N + 1)
        notes.append("relations are not hbar-homogeneous; graded dimensions not computed, verdict from overlaps only")
        dims_ok = True
    else:
        level_dims = graded_dimensions(R, N)
        dims = [min(v for (k, d), v in level_dims.items() if d == dd) for dd in range(N + 1)]
        dims_ok = all(v == math.comb(d + n - 1, n - 1) for (k, d), v in level_dims.items())
    if N < 3:
        notes.append("N < 3: overlap obstructions live in degree 3 and are not reflected in the dimensions")
    return PBWReport(N, M, n, dims, expected, level_dims, overlaps, w, not overlaps and dims_ok, notes)


def obstruction(R: RelationSet, m: int, N: int = 3) -> dict:
    """The hbar^m coefficient of every overlap defect, keyed by (k, j, i).

    Requires all defects to vanish below order m.
    """
    if m > R.order:
        raise PreconditionError(f"order {m} exceeds the truncation order {R.order}")
    out = {}
    for ov in overlap_defects(R):
        if ov.first_order < m:
            raise PreconditionError(
                f"overlap {ov.triple} is already unresolved at order {ov.first_order} < {m}",
                witness=ov,
            )
        part = ov.defect.hbar_part(m)
        if part:
            out[ov.triple] = Element(part, R.order)
    return out


# ----------------------------------------------------------------------------
# correction solver


@dataclass
class CorrectionResult:
    feasible: bool
    relations: RelationSet | None
    omega: dict  # {(i, j): {word: Fraction}}
    residual: dict  # {(k, j, i): Element} when infeasible
    order: int
    max_degree: int
    note: str = ""


def solve_corrections(R: RelationSet, m: int, D: int | None = None, alpha_degree: int | None = None) -> CorrectionResult:
    """Choose the hbar^m layer omega_m (words of degree <= D) so that every
    overlap resolves through order m + 1.

    omega_m cannot change the order-m defects (its contributions abelianize
    to the same sum along both rewriting paths), so a nonzero order-m defect
    is reported as the infeasibility certificate.  Otherwise the order-(m+1)
    defects are affine in omega_m and the system is solved exactly; free
    unknowns are set to zero.
    """
    if m < 2:
        raise PreconditionError("corrections start at order 2; order 1 is the bivector itself")
    if D is None:
        deg = alpha_degree if alpha_degree is not None else R.max_word_degree()
        D = deg + m - 1
    base = R.with_order(max(R.order, m + 1)).with_layer(m, {})
    base = base.with_order(m + 1)
    for ov in overlap_defects(base):
        if ov.first_order <= m:
            residual = {o.triple: Element(o.defect.hbar_part(o.first_order), base.order) for o in overlap_defects(base) if o.first_order <= m}
            return CorrectionResult(False, None, {}, residual, m, D, note=f"overlap defect at order {ov.first_order} cannot be changed by omega_{m}")

    def defects(layer) -> dict:
        Rt = base.with_layer(m, layer)
        out = {}
        for k, j, i in itertools.combinations(range(Rt.n, 0, -1), 3):
            for (a, w), c in _overlap_defect(Rt, k, j, i).items():
                if a == m + 1:
                    out[((k, j, i), w)] = c
        return out

    const = defects({})
    unknowns = [
        ((i, j), w)
        for i, j in itertools.combinations(range(1, R.n + 1), 2)
        for L in range(D + 1)
        for w in itertools.product(range(1, R.n + 1), repeat=L)
    ]
    linalg.check_size(len(unknowns), "correction unknowns")
    cols = []
    for u in unknowns:
        (pair, w) = u
        col = defects({pair: {_as_element_word(base, w): Fraction(1)}})
        linalg.add_scaled(col, const, Fraction(-1))
        cols.append((u, col))
    rhs = {k: -v for k, v in const.items()}
    sol, residual = linalg.solve(cols, rhs)
    if sol is None:
        res = {}
        for (triple, w), c in residual.items():
            res.setdefault(triple, {})[w] = c
        res = {t: base._to_element({(m + 1, w): c for w, c in part.items()}) for t, part in res.items()}
        return CorrectionResult(False, None, {}, res, m, D, note=f"no omega_{m} of degree <= {D}; inconclusive, raise the degree bound")
    omega: dict = {}
    for (pair, w), c in sorted(sol.items()):
        omega.setdefault(pair, {})[_as_element_word(base, w)] = c
    updated = R.with_order(max(R.order, m)).with_layer(m, omega)
    return CorrectionResult(True, updated, omega, {}, m, D)


def _as_element_word(R: RelationSet, w: tuple[int, ...]) -> tuple:
    return tuple(R.generators[i - 1] for i in w)


# ----------------------------------------------------------------------------
# the deformed cobar complex of Lambda(g) and its H^0


def _ce_value(g: LieAlgebra, c: CobarComplex, order: int):
    """hbar * (Chevalley-Eilenberg chain differential) on the letter xi_I:
    d(g_1 ^ .. ^ g_k) = -sum_{s<t} (-1)^(s+t) [g_s, g_t] ^ rest, so that
    d(a ^ b) = [a, b]."""

    def value(gen):
        I = gen.index
        out: dict = {}
        for s, t in itertools.combinations(range(len(I)), 2):
            rest = I[:s] + I[s + 1:t] + I[t + 1:]
            sign = 1 if (s + t) % 2 else -1
            for k, v in g.bracket_basis(I[s], I[t]).items():
                if k in rest:
                    continue
                J = (k,) + rest
                key = tuple(sorted(J))
                out[key] = out.get(key, 0) + sign * v * permutation_sign(J)
        return Element({(c.letter(b),): Scalar.hbar_power(1, v, order) for b, v in out.items() if v}, order)

    return value


def deformed_cobar(g: LieAlgebra, order: int = DEFAULT_ORDER) -> CobarComplex:
    """CoBar(Lambda(g)) (x) C[hbar] with d = d0 + hbar * d_CE (koszul signs)."""
    spec = CoalgebraSpec(EXTERIOR, g.n, reduced=True)
    plain = CobarComplex(spec, KOSZUL, order=order)
    D = Derivation(_ce_value(g, plain, order), 1, KOSZUL, order, degree=1)
    return CobarComplex(spec, KOSZUL, D, order)


@dataclass
class SquareZeroCheck:
    ok: bool
    generator: object = None
    value: Element | None = None


def check_square_zero(c: CobarComplex, max_weight: int = 3) -> SquareZeroCheck:
    wit = c.square_zero_witness(max_weight)
    if wit is None:
        return SquareZeroCheck(True)
    return SquareZeroCheck(False, wit[0], wit[1])


def h0_presentation(c: CobarComplex, N: int, M: int | None = None, check_weight: int = 3) -> tuple[RelationSet, PBWReport]:
    """Read the relations of H^0 off d(xi_ij) and run the PBW check.

    In degree 0 every word in the x's is a cycle and the boundaries are the
    images of the xi_ij letters (times x-words on both sides), so H^0 is
    T(V)[hbar] modulo d(xi_ij) = (x_j x_i - x_i x_j) + R_ij.
    """
    if c.coalgebra.kind != EXTERIOR:
        raise ContextError("h0_presentation reads a cobar complex of an exterior coalgebra")
    sq = check_square_zero(c, check_weight)
    if not sq.ok:
        raise PreconditionError(f"(d0 + d1)^2 != 0 on {sq.generator}", witness=sq.value)
    n = c.coalgebra.dim
    order = c.order
    xs = coordinates(n)
    rels = {}
    for i, j in itertools.combinations(range(1, n + 1), 2):
        dx = c.d(Element.letter(c.letter((i, j)), order))
        comm = Element({(xs[i - 1], xs[j - 1]): 1, (xs[j - 1], xs[i - 1]): -1}, order)
        sign = 1 if c.convention == KOSZUL else -1
        R = comm + dx.scale(sign)
        if any(cf[0] for cf in R.terms.values()):
            raise ContextError(f"d(xi_{i}{j}) is not a deformed commutator: {dx}")
        rels[(i, j)] = R
    R = RelationSet(n, rels, order)
    return R, pbw_check(R, N, M)


__all__ = [
    "BUILTIN_LIE",
    "CorrectionResult",
    "LieAlgebra",
    "Overlap",
    "PBWReport",
    "RelationSet",
    "check_square_zero",
    "deformed_cobar",
    "graded_dimensions",
    "h0_presentation",
    "lift_cycle",
    "normal_form",
    "obstruction",
    "overlap_defects",
    "pbw_check",
    "relations_from_lie",
    "relations_order1",
    "solve_corrections",
]
