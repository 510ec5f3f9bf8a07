"""Finite-dimensional (truncated) associative algebras given by a basis and a
product table.

Two truncation modes for polynomial algebras:

* ``strict=True``: products leaving the degree bound raise
  :class:`DegreeOverflowError` naming the offending pair.  Identities are then
  only asserted on tuples whose products stay in range.
* ``strict=False``: the honest quotient S(V)/(monomials of degree > D), a
  genuine unital associative algebra in which such products are zero.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

from pbwcobar.errors import DegreeOverflowError

Vec = dict  # {basis_key: Fraction}


def monomials(n: int, max_degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of total degree <= max_degree, graded-lex."""
    out = []
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    # combinations_with_replacement yields x1-heavy first; sort within degree
    return sorted(out, key=lambda e: (sum(e), tuple(-x for x in e)))


def monomial_str(e: tuple[int, ...], names: Iterable[str] | None = None) -> str:
    names = list(names) if names else [f"x{i + 1}" for i in range(len(e))]
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts) or "1"


class TruncatedAlgebra:
    """Associative algebra on a finite basis.

    ``table(a, b)`` returns the product of two basis keys as a vector.  It
    may raise :class:`DegreeOverflowError`.
    """

    def __init__(
        self,
        basis: Iterable[Hashable],
        table: Callable[[Hashable, Hashable], Mapping],
        unit: Hashable | None = None,
        degree: Callable[[Hashable], int] | None = None,
        name: str = "A",
    ):
        self.basis = list(basis)
        self._index = {b: i for i, b in enumerate(self.basis)}
        self._table = table
        self.unit = unit
        self.degree = degree or (lambda b: 0)
        self.name = name
        self._cache: dict[tuple, Vec] = {}

    def __contains__(self, key) -> bool:
        return key in self._index

    def mul_basis(self, a, b) -> Vec:
        k = (a, b)
        if k not in self._cache:
            self._cache[k] = {x: Fraction(c) for x, c in self._table(a, b).items() if c}
        return self._cache[k]

    def mul(self, u: Mapping, v: Mapping) -> Vec:
        out: Vec = {}
        for a, ca in u.items():
            for b, cb in v.items():
                for x, c in self.mul_basis(a, b).items():
                    y = out.get(x, 0) + ca * cb * c
                    if y:
                        out[x] = y
                    else:
                        out.pop(x, None)
        return out

    @property
    def is_unital(self) -> bool:
        return self.unit is not None

    def associator(self, a, b, c) -> Vec:
        left = self.mul(self.mul({a: 1}, {b: 1}), {c: 1})
        right = self.mul({a: 1}, self.mul({b: 1}, {c: 1}))
        out = dict(left)
        for k, v in right.items():
            y = out.get(k, 0) - v
            if y:
                out[k] = y
            else:
                out.pop(k, None)
        return out

    def find_nonassociative(self) -> tuple | None:
        for a, b, c in itertools.product(self.basis, repeat=3):
            try:
                if self.associator(a, b, c):
                    return (a, b, c)
            except DegreeOverflowError:
                continue
        return None

    def with_table_entry(self, a, b, value: Mapping, name: str | None = None) -> TruncatedAlgebra:
        """Copy with one product overridden (used to build corrupted controls)."""
        base = self._table

        def table(x, y):
            if (x, y) == (a, b):
                return value
            return base(x, y)

        return TruncatedAlgebra(self.basis, table, self.unit, self.degree, name or self.name + "'")


class PolynomialAlgebra(TruncatedAlgebra):
    """C[x1..xn] truncated at total degree ``max_degree``; keys are exponent tuples."""

    def __init__(self, n: int, max_degree: int, strict: bool = True):
        self.n = n
        self.max_degree = max_degree
        self.strict = strict

        def table(a, b):
            e = tuple(x + y for x, y in zip(a, b))
            if sum(e) > max_degree:
                if strict:
                    raise DegreeOverflowError(
                        f"{monomial_str(a)} * {monomial_str(b)} exceeds degree {max_degree}",
                        offending=(a, b),
                    )
                return {}
            return {e: 1}

        super().__init__(
            monomials(n, max_degree),
            table,
            unit=(0,) * n,
            degree=sum,
            name=f"S_{n}(<= {max_degree})",
        )

    def variable(self, i: int) -> tuple[int, ...]:
        """Exponent tuple of x_i (1-based)."""
        e = [0] * self.n
        e[i - 1] = 1
        return tuple(e)

    def derivative(self, vec: Mapping, i: int) -> Vec:
        """d/dx_i (1-based) of a polynomial vector."""
        out: Vec = {}
        for e, c in vec.items():
            k = e[i - 1]
            if k:
                f = list(e)
                f[i - 1] -= 1
                out[tuple(f)] = out.get(tuple(f), 0) + c * k
        return {k: v for k, v in out.items() if v}
