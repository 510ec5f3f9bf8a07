"""JSON formats.  Indices are 1-based and rationals are integers or
[numerator, denominator] pairs; floats are rejected.

lie::

    {"kind": "lie", "dimension": 3, "variables": ["x", "y", "z"],
     "entries": [{"i": 1, "j": 2, "k": 3, "value": 1}]}

poisson::

    {"kind": "poisson", "dimension": 2,
     "entries": [{"i": 1, "j": 2,
                  "coefficient": [{"monomial": [1, 1], "value": [1, 1]}]}]}

corrections (one hbar layer or several)::

    {"kind": "corrections", "dimension": 2, "hbar_order": 2,
     "relations": [{"i": 1, "j": 2,
                    "terms": [{"hbar": 2, "word": [1, 2], "value": [1, 2]}]}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from pbwcobar.pbw import LieAlgebra, RelationSet
from pbwcobar.polyvec import PoissonBivector
from pbwcobar.tensor import Element, Scalar, coordinates


class InputError(ValueError):
    """Malformed input; the message names the offending field."""


def encode_rational(x: Fraction) -> Any:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else [x.numerator, x.denominator]


def _rational(v, where: str) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise InputError(f"{where}: expected an integer or [p, q], got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, int) and not isinstance(t, bool) for t in v):
        if v[1] == 0:
            raise InputError(f"{where}: zero denominator")
        return Fraction(v[0], v[1])
    raise InputError(f"{where}: expected an integer or [p, q], got {v!r}")


def _int(obj: dict, key: str, where: str, lo: int | None = None, hi: int | None = None) -> int:
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    v = obj[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise InputError(f"{where}.{key}: expected an integer, got {v!r}")
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise InputError(f"{where}.{key}: {v} is out of range [{lo}, {hi}]")
    return v


def _list(obj: dict, key: str, where: str) -> list:
    v = obj.get(key)
    if not isinstance(v, list):
        raise InputError(f"{where}: field {key!r} must be a list")
    return v


@dataclass
class InputSpec:
    kind: str
    dimension: int
    variables: list[str]
    lie: LieAlgebra | None = None
    poisson: PoissonBivector | None = None

    def bivector(self) -> PoissonBivector:
        return self.poisson if self.poisson is not None else self.lie.poisson()


def parse_input(data: Any) -> InputSpec:
    if not isinstance(data, dict):
        raise InputError("top level: expected a JSON object")
    kind = data.get("kind")
    if kind not in ("lie", "poisson"):
        raise InputError(f"kind: expected 'lie' or 'poisson', got {kind!r}")
    n = _int(data, "dimension", "top level", 1)
    variables = data.get("variables") or [f"x{i}" for i in range(1, n + 1)]
    if not (isinstance(variables, list) and len(variables) == n and all(isinstance(s, str) for s in variables)):
        raise InputError(f"variables: expected {n} names")
    entries = _list(data, "entries", "top level")
    if kind == "lie":
        consts: dict = {}
        for t, e in enumerate(entries):
            where = f"entries[{t}]"
            if not isinstance(e, dict):
                raise InputError(f"{where}: expected an object")
            i, j, k = (_int(e, key, where, 1, n) for key in ("i", "j", "k"))
            if not i < j:
                raise InputError(f"{where}: need i < j, got i={i}, j={j}")
            v = _rational(e.get("value"), f"{where}.value")
            row = consts.setdefault((i, j), {})
            row[k] = row.get(k, 0) + v
        return InputSpec("lie", n, variables, lie=LieAlgebra(n, consts, tuple(variables)))
    ent: dict = {}
    for t, e in enumerate(entries):
        where = f"entries[{t}]"
        if not isinstance(e, dict):
            raise InputError(f"{where}: expected an object")
        i, j = _int(e, "i", where, 1, n), _int(e, "j", where, 1, n)
        if not i < j:
            raise InputError(f"{where}: need i < j, got i={i}, j={j}")
        poly = ent.setdefault((i, j), {})
        for s, m in enumerate(_list(e, "coefficient", where)):
            w2 = f"{where}.coefficient[{s}]"
            mono = m.get("monomial") if isinstance(m, dict) else None
            if not (isinstance(mono, list) and len(mono) == n and all(isinstance(x, int) and x >= 0 for x in mono)):
                raise InputError(f"{w2}.monomial: expected {n} nonnegative exponents")
            poly[tuple(mono)] = poly.get(tuple(mono), 0) + _rational(m.get("value"), f"{w2}.value")
    return InputSpec("poisson", n, variables, poisson=PoissonBivector(n, ent))


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def load_input(path: str | Path) -> InputSpec:
    return parse_input(load_json(path))


def input_to_json(spec: InputSpec) -> dict:
    out: dict = {"kind": spec.kind, "dimension": spec.dimension, "variables": list(spec.variables), "entries": []}
    if spec.kind == "lie":
        for (i, j), row in spec.lie.constants.items():
            for k, v in row.items():
                out["entries"].append({"i": i, "j": j, "k": k, "value": encode_rational(v)})
    else:
        for (i, j), poly in spec.poisson.entries.items():
            out["entries"].append(
                {
                    "i": i,
                    "j": j,
                    "coefficient": [{"monomial": list(e), "value": encode_rational(c)} for e, c in poly.items()],
                }
            )
    return out


# ----------------------------------------------------------------------------
# relation layers


def relations_to_json(R: RelationSet, orders: range | None = None, kind: str = "corrections") -> dict:
    """Serialize the hbar layers in ``orders`` (default: all) of a relation set."""
    orders = orders if orders is not None else range(1, R.order + 1)
    rels = []
    for (i, j), e in R.relations.items():
        terms = []
        for w, c in e.terms.items():
            for a in orders:
                if c[a]:
                    terms.append({"hbar": a, "word": [g.index[0] for g in w], "value": encode_rational(c[a])})
        if terms:
            rels.append({"i": i, "j": j, "terms": terms})
    return {"kind": kind, "dimension": R.n, "hbar_order": R.order, "relations": rels}


def parse_corrections(data: Any) -> tuple[int, int, dict]:
    """Returns (dimension, hbar_order, {(i, j): {(a, word): Fraction}})."""
    if not isinstance(data, dict) or data.get("kind") not in ("corrections", "relations"):
        raise InputError("corrections file: expected an object with kind 'corrections'")
    n = _int(data, "dimension", "top level", 1)
    M = _int(data, "hbar_order", "top level", 1)
    out: dict = {}
    for t, r in enumerate(_list(data, "relations", "top level")):
        where = f"relations[{t}]"
        if not isinstance(r, dict):
            raise InputError(f"{where}: expected an object")
        i, j = _int(r, "i", where, 1, n), _int(r, "j", where, 1, n)
        if not i < j:
            raise InputError(f"{where}: need i < j")
        layer = out.setdefault((i, j), {})
        for s, term in enumerate(_list(r, "terms", where)):
            w2 = f"{where}.terms[{s}]"
            if not isinstance(term, dict):
                raise InputError(f"{w2}: expected an object")
            a = _int(term, "hbar", w2, 1, M)
            word = term.get("word")
            if not (isinstance(word, list) and all(isinstance(x, int) and 1 <= x <= n for x in word)):
                raise InputError(f"{w2}.word: expected indices in 1..{n}")
            key = (a, tuple(word))
            layer[key] = layer.get(key, 0) + _rational(term.get("value"), f"{w2}.value")
    return n, M, out


def corrections_to_relations(n: int, M: int, layers: dict) -> RelationSet:
    xs = coordinates(n)
    rels = {}
    for pair, terms in layers.items():
        rels[pair] = Element(
            [(tuple(xs[i - 1] for i in w), Scalar.hbar_power(a, c, M)) for (a, w), c in terms.items()], M
        )
    return RelationSet(n, rels, M)


def apply_corrections(R: RelationSet, n: int, M: int, layers: dict) -> RelationSet:
    """Overwrite every hbar layer that the corrections file mentions."""
    if n != R.n:
        raise InputError(f"corrections are for dimension {n}, relations have {R.n}")
    order = max(R.order, M)
    R = R.with_order(order)
    xs = coordinates(n)
    touched = sorted({a for terms in layers.values() for a, _ in terms})
    for a in touched:
        layer = {
            pair: {tuple(xs[i - 1] for i in w): c for (b, w), c in terms.items() if b == a} for pair, terms in layers.items()
        }
        R = R.with_layer(a, layer)
    return R
