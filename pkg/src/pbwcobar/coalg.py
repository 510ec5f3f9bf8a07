"""Symmetric and exterior coalgebras S(W), S(W)+, Lambda(V), Lambda^-(V).

Basis elements are tuples of 1-based indices: a multiset (nondecreasing
tuple) for the symmetric kind, a strictly increasing tuple for the exterior
kind.  The empty tuple is the unit/counit line and only exists in the full
(counital) coalgebra.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from pbwcobar.tensor import permutation_sign

SYMMETRIC = "symmetric"
EXTERIOR = "exterior"

Basis = tuple  # tuple[int, ...]
Tensor = dict  # {tuple[Basis, ...]: Fraction}


def shuffle_sign(J: tuple[int, ...], K: tuple[int, ...]) -> int:
    """Sign of the permutation taking the sorted union of J, K to J followed by K."""
    return permutation_sign(J + K)


@dataclass(frozen=True)
class CoalgebraSpec:
    kind: str
    dim: int
    reduced: bool = True
    sign_rule: Callable[[tuple, tuple], int] = shuffle_sign

    def __post_init__(self):
        if self.kind not in (SYMMETRIC, EXTERIOR):
            raise ValueError(f"unknown coalgebra kind {self.kind!r}")
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")

    @property
    def name(self) -> str:
        if self.kind == SYMMETRIC:
            return "S+(W)" if self.reduced else "S(W)"
        return "Lambda^-(V)" if self.reduced else "Lambda(V)"

    def is_basis(self, b: Basis) -> bool:
        if any(not (1 <= i <= self.dim) for i in b):
            return False
        if self.reduced and not b:
            return False
        if self.kind == EXTERIOR:
            return all(b[t] < b[t + 1] for t in range(len(b) - 1))
        return all(b[t] <= b[t + 1] for t in range(len(b) - 1))

    def basis(self, weight: int) -> list[Basis]:
        if weight == 0:
            return [] if self.reduced else [()]
        rng = range(1, self.dim + 1)
        if self.kind == EXTERIOR:
            return list(itertools.combinations(rng, weight))
        return list(itertools.combinations_with_replacement(rng, weight))

    def basis_upto(self, weight: int) -> list[Basis]:
        return [b for w in range(weight + 1) for b in self.basis(w)]

    # sign of a letter in the coalgebra's own grading (exterior elements are odd)
    def parity(self, b: Basis) -> int:
        return len(b) % 2 if self.kind == EXTERIOR else 0

    def internal_degree(self, b: Basis) -> int:
        """Degree inside the coalgebra: Lambda^k sits in degree -k, S(W) in 0."""
        return -len(b) if self.kind == EXTERIOR else 0


def _splits(b: Basis, spec: CoalgebraSpec) -> Iterator[tuple[Basis, Basis, int]]:
    k = len(b)
    lo, hi = (1, k - 1) if spec.reduced else (0, k)
    for r in range(lo, hi + 1):
        for pos in itertools.combinations(range(k), r):
            J = tuple(b[p] for p in pos)
            K = tuple(b[p] for p in range(k) if p not in pos)
            if spec.kind == EXTERIOR:
                yield J, K, spec.sign_rule(J, K)
            else:
                yield J, K, 1


def coproduct(spec: CoalgebraSpec, b: Basis) -> Tensor:
    """Delta(b) as {(left, right): coefficient}.

    The symmetric formula sums over subsets of letter positions, so repeated
    variables produce binomial multiplicities; the reduced version drops the
    two terms containing the unit.
    """
    if not spec.is_basis(b):
        raise ValueError(f"{b} is not a basis element of {spec.name}")
    out: dict[tuple[Basis, Basis], Fraction] = {}
    for J, K, s in _splits(b, spec):
        key = (J, K)
        out[key] = out.get(key, 0) + s
    return {k: Fraction(v) for k, v in out.items() if v}


def apply_in_slot(spec: CoalgebraSpec, t: Tensor, slot: int) -> Tensor:
    """Apply Delta in tensor factor ``slot`` (no extra signs)."""
    out: dict[tuple, Fraction] = {}
    for key, c in t.items():
        for (J, K), s in coproduct(spec, key[slot]).items():
            nk = key[:slot] + (J, K) + key[slot + 1:]
            out[nk] = out.get(nk, 0) + c * s
    return {k: v for k, v in out.items() if v}


def check_coassociativity(spec: CoalgebraSpec, max_weight: int) -> tuple[bool, Basis | None]:
    """Check (Delta x id) Delta = (id x Delta) Delta on every basis element of
    weight <= max_weight.  Returns (ok, first counterexample)."""
    if max_weight < 1:
        raise ValueError("max_weight must be >= 1")
    for w in range(max_weight + 1):
        for b in spec.basis(w):
            first = {(k,): v for k, v in coproduct(spec, b).items()}
            d = {k[0]: v for k, v in first.items()}
            left = apply_in_slot(spec, d, 0)
            right = apply_in_slot(spec, d, 1)
            if left != right:
                return False, b
    return True, None


def iterated_reduced_coproduct(spec: CoalgebraSpec, b: Basis, n: int) -> Tensor:
    """The n-fold iterate of the reduced coproduct, landing in the (n+1)-fold
    tensor power.  n = 0 returns b itself."""
    if not spec.reduced:
        raise ValueError("the reduced coproduct needs a reduced (coaugmented) coalgebra")
    t: Tensor = {(b,): Fraction(1)}
    for _ in range(n):
        t = apply_in_slot(spec, t, len(next(iter(t))) - 1) if t else {}
    return t


def cocompleteness_filtration(spec: CoalgebraSpec, b: Basis, n_max: int) -> int | None:
    """Smallest n >= 1 with (reduced Delta)^n (b) = 0, or None past ``n_max``."""
    if not spec.reduced:
        raise ValueError("cocompleteness is defined for the reduced coproduct only")
    t: Tensor = {(b,): Fraction(1)}
    for n in range(1, n_max + 1):
        t = apply_in_slot(spec, t, len(next(iter(t))) - 1)
        if not t:
            return n
    return None


def project(t: Tensor) -> Tensor:
    """p^{(x)k}: kill every tensor with a unit factor."""
    return {k: v for k, v in t.items() if all(k)}


def symmetric_multiplicity(b: Basis) -> int:
    """Number of distinct orderings represented by a multiset."""
    c = Counter(b)
    out = math.factorial(len(b))
    for m in c.values():
        out //= math.factorial(m)
    return out
