"""Polyvector fields as superpolynomials, the Schouten bracket, Poisson
checks and the Koszul-dual map K.

A polyvector is stored as ``{(even_exponents, odd_indices): Fraction}`` with
``odd_indices`` strictly increasing (1-based).  Which variables are even
depends on the context:

``V*`` (context ``"V*"``)
    even = coordinates x_i, odd = directions psi_i = d/dx_i.
``V[1]`` (context ``"V[1]"``)
    odd = coordinates xi_i, even = directions theta_i = d/dxi_i.

The map K keeps the data and swaps the context: x_i becomes theta_i and
psi_i becomes xi_i.  For a bivector term c * x^I * psi_i psi_j this is
c * (xi_i xi_j) * d_{xi_I}, which is the quadratic-coefficient polyvector.

Bracket (both contexts)::

    [P, Q] = sum_i dP/dmom_i * dQ/dcoord_i - dP/dcoord_i * dQ/dmom_i

with right derivatives on P and left derivatives on Q.  On vector fields it
is the commutator; on a bivector [alpha, alpha] = -2 J psi_i psi_j psi_k
where J = sum_cyc {{x_i, x_j}, x_k}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from pbwcobar.errors import ContextError, GradingError
from pbwcobar.tensor import as_fraction

V_DUAL = "V*"
V_SHIFT = "V[1]"
CONTEXTS = (V_DUAL, V_SHIFT)

Key = tuple  # (even exponents, odd indices)


def _merge_odd(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted result of concatenating two sorted odd monomials."""
    if set(a) & set(b):
        return None
    sign = 1
    # inversions between a and b: pairs (x in a, y in b) with x > y
    for x in a:
        for y in b:
            if x > y:
                sign = -sign
    return sign, tuple(sorted(a + b))


class Polyvector:
    __slots__ = ("n", "context", "terms")

    def __init__(self, n: int, terms: Mapping | Iterable = (), context: str = V_DUAL):
        if context not in CONTEXTS:
            raise ValueError(f"unknown context {context!r}")
        self.n = n
        self.context = context
        acc: dict[Key, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (e, o), c in items:
            e, o = tuple(e), tuple(o)
            if len(e) != n or any(not (1 <= i <= n) for i in o):
                raise ValueError(f"bad polyvector key {(e, o)} for dimension {n}")
            sign = _sort_sign(o)
            if sign == 0:
                continue
            key = (e, tuple(sorted(o)))
            acc[key] = acc.get(key, 0) + sign * as_fraction(c)
        self.terms = {k: acc[k] for k in sorted(acc, key=_term_order) if acc[k]}

    # construction helpers
    @classmethod
    def monomial(cls, n: int, exps, odd, coeff=1, context: str = V_DUAL) -> Polyvector:
        return cls(n, {(tuple(exps), tuple(odd)): coeff}, context)

    @classmethod
    def zero(cls, n: int, context: str = V_DUAL) -> Polyvector:
        return cls(n, {}, context)

    def _check(self, other: Polyvector) -> None:
        if not isinstance(other, Polyvector):
            raise TypeError("expected a Polyvector")
        if other.n != self.n or other.context != self.context:
            raise ContextError(
                f"polyvectors live in different contexts: ({self.n}, {self.context}) vs ({other.n}, {other.context})"
            )

    def __add__(self, other: Polyvector) -> Polyvector:
        self._check(other)
        return Polyvector(self.n, itertools.chain(self.terms.items(), other.terms.items()), self.context)

    def __neg__(self) -> Polyvector:
        return self.scale(-1)

    def __sub__(self, other: Polyvector) -> Polyvector:
        return self + (-other)

    def scale(self, c) -> Polyvector:
        c = as_fraction(c)
        return Polyvector(self.n, {k: v * c for k, v in self.terms.items()}, self.context)

    def __mul__(self, other: Polyvector) -> Polyvector:
        """Supercommutative product."""
        self._check(other)
        acc: dict[Key, Fraction] = {}
        for (e1, o1), c1 in self.terms.items():
            for (e2, o2), c2 in other.terms.items():
                m = _merge_odd(o1, o2)
                if m is None:
                    continue
                s, o = m
                k = (tuple(a + b for a, b in zip(e1, e2)), o)
                acc[k] = acc.get(k, 0) + s * c1 * c2
        return Polyvector(self.n, acc, self.context)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyvector):
            return NotImplemented
        return (self.n, self.context, self.terms) == (other.n, other.context, other.terms)

    def __hash__(self):
        return hash((self.n, self.context, tuple(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # gradings
    def degrees(self) -> set[int]:
        """Shifted degrees (#odd - 1) of the terms; -1 for functions on V*."""
        return {len(o) - 1 for _, o in self.terms}

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise GradingError(f"polyvector is not homogeneous: degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def arities(self) -> set[int]:
        """Number of directions per term (psi's on V*, theta's on V[1])."""
        if self.context == V_DUAL:
            return {len(o) for _, o in self.terms}
        return {sum(e) for e, _ in self.terms}

    # derivatives
    def d_even(self, i: int) -> Polyvector:
        acc = {}
        for (e, o), c in self.terms.items():
            k = e[i - 1]
            if k:
                f = list(e)
                f[i - 1] -= 1
                acc[(tuple(f), o)] = c * k
        return Polyvector(self.n, acc, self.context)

    def d_odd(self, i: int, side: str = "left") -> Polyvector:
        acc = {}
        for (e, o), c in self.terms.items():
            if i not in o:
                continue
            p = o.index(i)
            before = p if side == "left" else len(o) - 1 - p
            acc[(e, o[:p] + o[p + 1:])] = c if before % 2 == 0 else -c
        return Polyvector(self.n, acc, self.context)

    def d_coordinate(self, i: int, side: str = "left") -> Polyvector:
        return self.d_even(i) if self.context == V_DUAL else self.d_odd(i, side)

    def d_momentum(self, i: int, side: str = "left") -> Polyvector:
        return self.d_odd(i, side) if self.context == V_DUAL else self.d_even(i)

    def __repr__(self) -> str:
        return self.to_string()

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        xs, ms = ("x", "d") if self.context == V_DUAL else ("xi", "d_xi")
        parts = []
        for (e, o), c in self.terms.items():
            if self.context == V_DUAL:
                coord = "*".join(f"{xs}{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
                mom = "^".join(f"{ms}{i}" for i in o)
            else:
                coord = "*".join(f"{xs}{i}" for i in o)
                mom = "^".join(f"{ms}{i + 1}" for i, k in enumerate(e) for _ in range(k))
            body = "*".join(s for s in (coord, mom) if s) or "1"
            parts.append(f"({c})*{body}")
        return " + ".join(parts)


def _sort_sign(o: tuple[int, ...]) -> int:
    if len(set(o)) != len(o):
        return 0
    s = 1
    for a in range(len(o)):
        for b in range(a + 1, len(o)):
            if o[a] > o[b]:
                s = -s
    return s


def _term_order(key: Key):
    e, o = key
    return (len(o), o, sum(e), tuple(-x for x in e))


# ----------------------------------------------------------------------------
# Schouten bracket


def schouten_bracket(a: Polyvector, b: Polyvector) -> Polyvector:
    a._check(b)
    out = Polyvector.zero(a.n, a.context)
    for i in range(1, a.n + 1):
        t1 = a.d_momentum(i, "right") * b.d_coordinate(i, "left")
        t2 = a.d_coordinate(i, "right") * b.d_momentum(i, "left")
        out = out + t1 - t2
    return out


# ----------------------------------------------------------------------------
# Poisson bivectors


def _monomial_exps(n: int, mono) -> tuple[int, ...]:
    if isinstance(mono, Mapping):
        e = [0] * n
        for i, k in mono.items():
            e[i - 1] += k
        return tuple(e)
    return tuple(mono)


@dataclass
class PoissonBivector:
    """alpha = sum_{i<j} alpha_ij d_i ^ d_j, coefficients as {exponents: value}."""

    n: int
    entries: dict  # {(i, j): {exponent tuple: Fraction}}, i < j

    def __post_init__(self):
        clean = {}
        for (i, j), poly in self.entries.items():
            if not (1 <= i <= self.n and 1 <= j <= self.n) or i == j:
                raise ValueError(f"bad bivector index pair {(i, j)} for dimension {self.n}")
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            tgt = clean.setdefault((i, j), {})
            for e, c in poly.items():
                e = _monomial_exps(self.n, e)
                if len(e) != self.n:
                    raise ValueError(f"monomial {e} has the wrong length for dimension {self.n}")
                tgt[e] = tgt.get(e, 0) + sign * as_fraction(c)
        self.entries = {
            k: {e: c for e, c in v.items() if c} for k, v in sorted(clean.items()) if any(v.values())
        }

    @classmethod
    def from_lie(cls, n: int, constants: Mapping) -> PoissonBivector:
        """Linear bivector with alpha_ij = sum_k c_ij^k x_k."""
        entries: dict = {}
        for (i, j), row in constants.items():
            poly = entries.setdefault((i, j), {})
            for k, v in row.items():
                e = [0] * n
                e[k - 1] = 1
                poly[tuple(e)] = poly.get(tuple(e), 0) + as_fraction(v)
        return cls(n, entries)

    def coefficient(self, i: int, j: int) -> dict:
        if i < j:
            return dict(self.entries.get((i, j), {}))
        if i > j:
            return {e: -c for e, c in self.entries.get((j, i), {}).items()}
        return {}

    def max_degree(self) -> int:
        return max((sum(e) for poly in self.entries.values() for e in poly), default=0)

    def as_polyvector(self) -> Polyvector:
        terms = {}
        for (i, j), poly in self.entries.items():
            for e, c in poly.items():
                terms[(e, (i, j))] = c
        return Polyvector(self.n, terms, V_DUAL)


def poisson_bracket(alpha: PoissonBivector, f: Mapping, g: Mapping) -> dict:
    """{f, g} = sum_ij alpha_ij d_i f d_j g on polynomials given as {exps: c}."""
    n = alpha.n
    pf = Polyvector(n, {(e, ()): c for e, c in f.items()})
    pg = Polyvector(n, {(e, ()): c for e, c in g.items()})
    out = Polyvector.zero(n)
    for (i, j), poly in alpha.entries.items():
        a = Polyvector(n, {(e, ()): c for e, c in poly.items()})
        out = out + a * (pf.d_even(i) * pg.d_even(j) - pf.d_even(j) * pg.d_even(i))
    return {e: c for (e, _), c in out.terms.items()}


def jacobiator(alpha: PoissonBivector) -> dict:
    """{(i, j, k): sum_cyc {{x_i, x_j}, x_k}} for i < j < k, nonzero entries only."""
    n = alpha.n

    def x(i):
        e = [0] * n
        e[i - 1] = 1
        return {tuple(e): Fraction(1)}

    out = {}
    for i, j, k in itertools.combinations(range(1, n + 1), 3):
        acc: dict = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            inner = alpha.coefficient(a, b)
            for e, v in poisson_bracket(alpha, inner, x(c)).items():
                acc[e] = acc.get(e, 0) + v
        acc = {e: v for e, v in acc.items() if v}
        if acc:
            out[(i, j, k)] = acc
    return out


@dataclass
class PoissonCheck:
    is_poisson: bool
    square: Polyvector
    jacobiator: dict


def is_poisson(alpha: PoissonBivector) -> PoissonCheck:
    """[alpha, alpha] = 0?  The witness is the trivector [alpha, alpha]."""
    p = alpha.as_polyvector()
    sq = schouten_bracket(p, p)
    return PoissonCheck(sq.is_zero(), sq, jacobiator(alpha))


# ----------------------------------------------------------------------------
# Koszul duality


def koszul_dual(alpha: Polyvector | PoissonBivector) -> Polyvector:
    """K: polyvectors on V* -> polyvectors on V[1].

    c * x^I * d_i ^ d_j  |->  c * (xi_i xi_j) * d_{xi_I}.
    """
    if isinstance(alpha, PoissonBivector):
        alpha = alpha.as_polyvector()
    if alpha.context != V_DUAL:
        raise ContextError("K takes a polyvector on V*")
    return Polyvector(alpha.n, alpha.terms, V_SHIFT)


def koszul_dual_inverse(gamma: Polyvector) -> Polyvector:
    if gamma.context != V_SHIFT:
        raise ContextError("the inverse of K takes a polyvector on V[1]")
    return Polyvector(gamma.n, gamma.terms, V_DUAL)


# [K a, K b] = K_BRACKET_SIGN * K [a, b]; verified in the test-suite
K_BRACKET_SIGN = -1


@dataclass
class MaurerCartanCheck:
    satisfied: bool
    square: Polyvector


def maurer_cartan_check(gamma: Polyvector) -> MaurerCartanCheck:
    if gamma.context != V_SHIFT:
        raise ContextError("Maurer-Cartan is checked on V[1]")
    if not gamma.is_zero() and gamma.degrees() != {1}:
        raise GradingError(f"Maurer-Cartan elements have total degree 1, got {sorted(gamma.degrees())}")
    sq = schouten_bracket(gamma, gamma)
    return MaurerCartanCheck(sq.is_zero(), sq)


# ----------------------------------------------------------------------------
# named examples

SO3 = PoissonBivector.from_lie(3, {(1, 2): {3: 1}, (2, 3): {1: 1}, (3, 1): {2: 1}})
NON_JACOBI = PoissonBivector.from_lie(3, {(1, 2): {1: 1}, (2, 3): {2: 1}, (3, 1): {3: 1}})
QUADRATIC_2D = PoissonBivector(2, {(1, 2): {(1, 1): 1}})
