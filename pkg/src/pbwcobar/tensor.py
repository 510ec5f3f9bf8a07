"""Free graded tensor algebras over truncated hbar-series.

Coefficients are exact: a :class:`Scalar` is a polynomial in hbar with
rational coefficients, reduced mod hbar^(M+1).  An :class:`Element` is a finite
linear combination of words (tuples of :class:`Generator`) with Scalar
coefficients; its product is concatenation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from pbwcobar.errors import ContextError, GradingError

DEFAULT_ORDER = 4


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    return Fraction(value)


class Scalar:
    """c_0 + c_1 hbar + ... + c_M hbar^M with exact rational c_i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = (), order: int = DEFAULT_ORDER):
        cs = [as_fraction(c) for c in coeffs][: order + 1]
        cs.extend([Fraction(0)] * (order + 1 - len(cs)))
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER) -> Scalar:
        return cls((value,), order)

    @classmethod
    def hbar_power(cls, k: int, value=1, order: int = DEFAULT_ORDER) -> Scalar:
        if k > order:
            return cls((), order)
        return cls([0] * k + [value], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int | None:
        """Lowest hbar power with a nonzero coefficient."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def _coerce(self, other) -> Scalar:
        if isinstance(other, Scalar):
            if other.order != self.order:
                raise ContextError(
                    f"truncation orders differ: {self.order} vs {other.order}"
                )
            return other
        return Scalar.constant(other, self.order)

    def __add__(self, other) -> Scalar:
        o = self._coerce(other)
        return Scalar((a + b for a, b in zip(self.coeffs, o.coeffs)), self.order)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar((-a for a in self.coeffs), self.order)

    def __sub__(self, other) -> Scalar:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Scalar:
        return self._coerce(other) - self

    def __mul__(self, other) -> Scalar:
        if not isinstance(other, Scalar):
            c = as_fraction(other)
            return Scalar((a * c for a in self.coeffs), self.order)
        o = self._coerce(other)
        m = self.order
        out = [Fraction(0)] * (m + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(m + 1 - i):
                b = o.coeffs[j]
                if b:
                    out[i + j] += a * b
        return Scalar(out, m)

    __rmul__ = __mul__

    def shift(self, k: int) -> Scalar:
        """Multiply by hbar^k."""
        return Scalar([0] * k + list(self.coeffs), self.order)

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.coeffs == other.coeffs
        try:
            return self == Scalar.constant(other, self.order)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            parts.append(f"{c}" if k == 0 else f"{c}*h^{k}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True, order=False)
class Generator:
    """A graded letter.  ``index`` carries the coordinate index (x_i) or the
    sorted index set of an exterior/symmetric basis element (xi_I)."""

    symbol: str
    degree: int = 0
    index: tuple[int, ...] = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.symbol, self.degree, self.index)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def key(self) -> tuple:
        return (len(self.index), self.index, self.symbol)

    def __lt__(self, other: Generator) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.symbol


Word = tuple  # tuple[Generator, ...]; the empty tuple is the unit


def word_degree(word: Sequence[Generator]) -> int:
    return sum(g.degree for g in word)


def word_key(word: Sequence[Generator]) -> tuple:
    return (len(word), tuple(g.key for g in word))


def coordinates(n: int, prefix: str = "x") -> tuple[Generator, ...]:
    """Degree-0 generators x1..xn."""
    return tuple(Generator(f"{prefix}{i}", 0, (i,)) for i in range(1, n + 1))


class Element:
    """Finite combination of words with Scalar coefficients.

    Zero coefficients are never stored and terms are kept in canonical
    (length, lexicographic) order, so equality is syntactic.
    """

    __slots__ = ("terms", "order")

    def __init__(self, terms: Mapping | Iterable = (), order: int = DEFAULT_ORDER):
        self.order = order
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, Scalar] = {}
        for w, c in items:
            w = tuple(w)
            c = c if isinstance(c, Scalar) else Scalar.constant(c, order)
            if c.order != order:
                raise ContextError(f"coefficient order {c.order} != element order {order}")
            acc[w] = acc[w] + c if w in acc else c
        self.terms: dict[tuple, Scalar] = {
            w: acc[w] for w in sorted(acc, key=word_key) if not acc[w].is_zero()
        }

    # constructors
    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> Element:
        return cls((), order)

    @classmethod
    def unit(cls, order: int = DEFAULT_ORDER) -> Element:
        return cls({(): 1}, order)

    @classmethod
    def word(cls, word: Sequence[Generator], coeff=1, order: int = DEFAULT_ORDER) -> Element:
        return cls({tuple(word): coeff}, order)

    @classmethod
    def letter(cls, g: Generator, order: int = DEFAULT_ORDER) -> Element:
        return cls({(g,): 1}, order)

    # arithmetic
    def _check(self, other: Element) -> None:
        if not isinstance(other, Element):
            raise TypeError(f"expected Element, got {type(other).__name__}")
        if other.order != self.order:
            raise ContextError(
                f"truncation orders differ: {self.order} vs {other.order}"
            )

    def __add__(self, other: Element) -> Element:
        self._check(other)
        return Element(itertools.chain(self.terms.items(), other.terms.items()), self.order)

    def __neg__(self) -> Element:
        return Element({w: -c for w, c in self.terms.items()}, self.order)

    def __sub__(self, other: Element) -> Element:
        return self + (-other)

    def scale(self, c) -> Element:
        if isinstance(c, Scalar) and c.order != self.order:
            raise ContextError("scalar order mismatch")
        return Element(((w, v * c) for w, v in self.terms.items()), self.order)

    def __rmul__(self, c) -> Element:
        return self.scale(c)

    def __mul__(self, other) -> Element:
        if isinstance(other, Element):
            return mul(self, other)
        return self.scale(other)

    def hbar_shift(self, k: int) -> Element:
        return Element(((w, c.shift(k)) for w, c in self.terms.items()), self.order)

    def truncate(self, order: int) -> Element:
        """Re-express with a different truncation order (dropping hbar^>order)."""
        return Element(((w, Scalar(c.coeffs, order)) for w, c in self.terms.items()), order)

    def coefficient(self, word: Sequence[Generator]) -> Scalar:
        return self.terms.get(tuple(word), Scalar((), self.order))

    def hbar_part(self, k: int) -> dict[tuple, Fraction]:
        """Rational coefficients of hbar^k."""
        return {w: c[k] for w, c in self.terms.items() if c[k]}

    def valuation(self) -> int | None:
        vals = [c.valuation() for c in self.terms.values()]
        return min(vals) if vals else None

    def is_zero(self) -> bool:
        return not self.terms

    def generators(self) -> set[Generator]:
        return {g for w in self.terms for g in w}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.order == other.order and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.order, tuple(self.terms.items())))

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms.items():
            ws = "*".join(str(g) for g in w) or "1"
            parts.append(f"({c})*{ws}")
        return " + ".join(parts)


def _check_generators(a: Element, b: Element) -> None:
    seen: dict[str, Generator] = {}
    for g in itertools.chain(a.generators(), b.generators()):
        other = seen.setdefault(g.symbol, g)
        if other != g:
            raise ContextError(f"generator {g.symbol!r} defined twice with different data")


def mul(a: Element, b: Element) -> Element:
    """Concatenation product, bilinear, truncated mod hbar^(M+1)."""
    a._check(b)
    _check_generators(a, b)
    out: dict[tuple, Scalar] = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            w = wa + wb
            c = ca * cb
            out[w] = out[w] + c if w in out else c
    return Element(out, a.order)


def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of reordering items with the given degrees.

    ``permutation[t]`` is the old position of the item placed at new position
    t.  Every pair of items whose relative order flips contributes
    (-1)^(p*q).
    """
    n = len(degrees)
    if sorted(permutation) != list(range(n)):
        raise ValueError(f"not a permutation of range({n}): {permutation}")
    sign = 1
    for a in range(n):
        for b in range(a + 1, n):
            if permutation[a] > permutation[b]:
                if degrees[permutation[a]] % 2 and degrees[permutation[b]] % 2:
                    sign = -sign
    return sign


def permutation_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (distinct items)."""
    sign = 1
    s = list(seq)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def sym(monomial: Sequence[Generator], order: int = DEFAULT_ORDER) -> Element:
    """Full symmetrization (1/k!) * sum over all orderings of the letters."""
    for g in monomial:
        if g.degree != 0:
            raise GradingError(f"sym needs degree-0 generators, got {g.symbol}")
    k = len(monomial)
    if k == 0:
        return Element.unit(order)
    weight = Fraction(1, math.factorial(k))
    acc: dict[tuple, Fraction] = {}
    for perm in itertools.permutations(monomial):
        acc[perm] = acc.get(perm, 0) + weight
    return Element(acc, order)


def sym_polynomial(poly: Mapping[tuple, object], order: int = DEFAULT_ORDER) -> Element:
    """Linear extension of :func:`sym` to {sorted generator tuple: coeff}."""
    out = Element.zero(order)
    for mono, c in poly.items():
        out = out + sym(mono, order).scale(c if isinstance(c, Scalar) else as_fraction(c))
    return out


def abelianize(e: Element) -> dict[tuple, Scalar]:
    """Project T(V) -> S(V): words become sorted generator tuples."""
    out: dict[tuple, Scalar] = {}
    for w, c in e.terms.items():
        for g in w:
            if g.degree != 0:
                raise GradingError(f"cannot abelianize letter {g.symbol} of degree {g.degree}")
        m = tuple(sorted(w))
        out[m] = out[m] + c if m in out else c
    return {m: c for m, c in out.items() if not c.is_zero()}
