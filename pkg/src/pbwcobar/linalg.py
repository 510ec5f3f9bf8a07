"""Exact sparse linear algebra over the rationals.

Vectors are dicts ``{column_key: Fraction}``.  :class:`Echelon` keeps a fully
reduced row-echelon basis that grows one vector at a time; rank, span
membership, kernels and linear solves are built on it.  Column keys only need
to be hashable and mutually comparable (pivot choice is the smallest key, so
results are deterministic).
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from pbwcobar.errors import ResourceError

Vector = dict

MAX_BASIS_ENV = "PBWCOBAR_MAX_BASIS"
DEFAULT_MAX_BASIS = 60000


def max_basis() -> int:
    return int(os.environ.get(MAX_BASIS_ENV, DEFAULT_MAX_BASIS))


def check_size(n: int, what: str) -> None:
    cap = max_basis()
    if n > cap:
        raise ResourceError(f"{what} has {n} basis elements, cap is {cap} (set {MAX_BASIS_ENV})")


def clean(v: Mapping) -> Vector:
    return {k: Fraction(c) for k, c in v.items() if c}


def add_scaled(target: Vector, v: Mapping, c: Fraction) -> None:
    for k, x in v.items():
        y = target.get(k, 0) + c * x
        if y:
            target[k] = y
        else:
            target.pop(k, None)


class Echelon:
    """Incremental reduced row echelon form.

    Each stored row may carry a ``tag`` vector recording which input
    combination produced it, which is how kernels and solutions are read off.
    """

    def __init__(self):
        self.rows: dict[Hashable, Vector] = {}
        self.tags: dict[Hashable, Vector] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: Mapping, tag: Mapping | None = None) -> tuple[Vector, Vector | None]:
        v = dict(v)
        t = dict(tag) if tag is not None else None
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if not c:
                continue
            add_scaled(v, self.rows[p], -c)
            if t is not None:
                add_scaled(t, self.tags[p], -c)
        return v, t

    def add(self, v: Mapping, tag: Mapping | None = None) -> Vector | None:
        """Insert ``v``.  Returns None if it was new, else the tag combination
        that reduces it to zero (a linear dependency)."""
        r, t = self.reduce(v, tag)
        if not r:
            return t if t is not None else {}
        p = min(r)
        c = r[p]
        r = {k: x / c for k, x in r.items()}
        if t is not None:
            t = {k: x / c for k, x in t.items()}
        for q, row in self.rows.items():
            d = row.get(p)
            if d:
                add_scaled(row, r, -d)
                if t is not None:
                    add_scaled(self.tags[q], t, -d)
        self.rows[p] = r
        if t is not None:
            self.tags[p] = t
        return None

    def contains(self, v: Mapping) -> bool:
        return not self.reduce(v)[0]

    def basis(self) -> list[Vector]:
        return [self.rows[p] for p in sorted(self.rows)]


def rank(vectors: Iterable[Mapping]) -> int:
    e = Echelon()
    for v in vectors:
        e.add(v)
    return e.rank


def kernel(images: Sequence[tuple[Hashable, Mapping]]) -> list[Vector]:
    """Kernel of the linear map sending basis vector ``key`` to ``image``.

    ``images`` is a sequence of (domain_key, image_vector).  Returns a basis of
    the kernel as vectors over domain keys, in reduced echelon form.
    """
    e = Echelon()
    found = Echelon()
    for key, img in images:
        dep = e.add(img, {key: Fraction(1)})
        if dep is not None:
            found.add(dep)
    return found.basis()


def solve(columns: Sequence[tuple[Hashable, Mapping]], rhs: Mapping) -> tuple[Vector | None, Vector]:
    """Solve sum_k x_k * columns[k] = rhs.

    Returns (solution, residual).  The solution sets every free unknown to
    zero; when the system is inconsistent the solution is None and the
    residual is rhs reduced modulo the column span (nonzero).
    """
    e = Echelon()
    for key, col in columns:
        e.add(col, {key: Fraction(1)})
    r, t = e.reduce(rhs, {})
    if r:
        return None, r
    return {k: -c for k, c in t.items() if c}, {}


def quotient_basis(kernel_vectors: Sequence[Mapping], image_vectors: Iterable[Mapping]) -> list[Vector]:
    """Canonical representatives of span(kernel) / span(image)."""
    im = Echelon()
    for v in image_vectors:
        im.add(v)
    reps = Echelon()
    for v in kernel_vectors:
        r, _ = im.reduce(v)
        if r:
            reps.add(r)
    return [im.reduce(v)[0] for v in reps.basis()]
