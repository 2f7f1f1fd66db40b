"""1-skeleton presentation of a k-graph: vertices, colored edges, commuting squares.

A square ``left=[f, g]``, ``right=[g', f']`` with ``color(f) < color(g)`` records
the factorisation ``fg = g'f'``. Composition ``xy`` is defined when
``range(x) == source(y)``.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path as FilePath
from typing import Any, Iterable, Mapping

import jsonschema

SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["k", "vertices", "edges"],
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "vertices": {"type": "array", "items": {"type": "string", "minLength": 1}},
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "color", "source", "range"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "color": {"type": "integer", "minimum": 1},
                    "source": {"type": "string"},
                    "range": {"type": "string"},
                },
            },
        },
        "squares": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["left", "right"],
                "properties": {
                    "left": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                    "right": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                },
            },
        },
    },
}


class SkeletonError(ValueError):
    """Base class for every load-time rejection."""


class SkeletonParseError(SkeletonError):
    pass


class DuplicateIdError(SkeletonError):
    pass


class DanglingReferenceError(SkeletonError):
    pass


class SquareEndpointError(SkeletonError):
    pass


class BijectivityError(SkeletonError):
    pass


class AssociativityError(SkeletonError):
    def __init__(self, violations: list["AssociativityViolation"]):
        self.violations = violations
        first = violations[0]
        super().__init__(
            f"{len(violations)} associativity violation(s); first at triple "
            f"{'.'.join(first.triple)}: {'.'.join(first.route_a)} != {'.'.join(first.route_b)}"
        )


@dataclass(frozen=True)
class Edge:
    id: str
    color: int
    source: str
    range: str


@dataclass(frozen=True)
class Square:
    left: tuple[str, str]
    right: tuple[str, str]


@dataclass(frozen=True)
class AssociativityViolation:
    triple: tuple[str, str, str]
    route_a: tuple[str, ...]
    route_b: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"triple": list(self.triple), "routeA": list(self.route_a), "routeB": list(self.route_b)}


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("KGRAPH_THREADS", "1")))
    except ValueError:
        return 1


class Skeleton:
    """Validated, immutable 1-skeleton. Build with :func:`load_skeleton` or :meth:`build`."""

    def __init__(self, k: int, vertices: Iterable[str], edges: Iterable[Edge], squares: Iterable[Square]):
        self.k = k
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.edges: dict[str, Edge] = {e.id: e for e in edges}
        self.squares: tuple[Square, ...] = tuple(squares)
        self._swap: dict[tuple[str, str], tuple[str, str]] = {}
        self._unswap: dict[tuple[str, str], tuple[str, str]] = {}
        for sq in self.squares:
            self._swap[sq.left] = sq.right
            self._unswap[sq.right] = sq.left
        self._out: dict[tuple[str, int], list[str]] = {}
        for e in self.edges.values():
            self._out.setdefault((e.source, e.color), []).append(e.id)
        # per-skeleton memo tables used by the paths and alignment layers
        self.cache: dict[str, dict] = {"segment": {}, "mce": {}, "refactor": {}}

    @classmethod
    def build(cls, k: int, vertices, edges, squares=(), check_assoc: bool = True) -> "Skeleton":
        edges = [e if isinstance(e, Edge) else Edge(**e) for e in edges]
        squares = [
            s if isinstance(s, Square) else Square(tuple(s["left"]), tuple(s["right"])) for s in squares
        ]
        _check_ids(k, list(vertices), edges)
        _check_squares(edges, squares)
        sk = cls(k, vertices, edges, squares)
        _check_bijectivity(sk)
        if check_assoc:
            violations = check_associativity(sk)
            if violations:
                raise AssociativityError(violations)
        return sk

    def out_edges(self, vertex: str, color: int) -> list[str]:
        return self._out.get((vertex, color), [])

    def color(self, edge_id: str) -> int:
        return self.edges[edge_id].color

    def swap(self, first: str, second: str) -> tuple[str, str]:
        """Rewrite a composable two-edge word of distinct colors into the opposite color order."""
        if self.color(first) < self.color(second):
            return self._swap[(first, second)]
        return self._unswap[(first, second)]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "vertices": list(self.vertices),
            "edges": [
                {"id": e.id, "color": e.color, "source": e.source, "range": e.range} for e in self.edges.values()
            ],
            "squares": [{"left": list(s.left), "right": list(s.right)} for s in self.squares],
        }

    def _canonical(self):
        d = self.to_dict()
        return (
            d["k"],
            sorted(d["vertices"]),
            sorted(tuple(sorted(e.items())) for e in d["edges"]),
            sorted((tuple(s["left"]), tuple(s["right"])) for s in d["squares"]),
        )

    def __eq__(self, other):
        if not isinstance(other, Skeleton):
            return NotImplemented
        return self._canonical() == other._canonical()

    __hash__ = object.__hash__

    def __repr__(self):
        return f"Skeleton(k={self.k}, |V|={len(self.vertices)}, |E|={len(self.edges)}, squares={len(self.squares)})"


def _check_ids(k: int, vertices: list[str], edges: list[Edge]) -> None:
    seen: set[str] = set()
    for v in vertices:
        if v in seen:
            raise DuplicateIdError(f"duplicate vertex id {v!r}")
        seen.add(v)
    vset = set(vertices)
    for e in edges:
        if e.id in seen:
            raise DuplicateIdError(f"duplicate id {e.id!r}")
        if "." in e.id:
            raise SkeletonParseError(f"edge id {e.id!r} may not contain '.'")
        seen.add(e.id)
        if not 1 <= e.color <= k:
            raise SkeletonParseError(f"edge {e.id!r} has color {e.color} outside 1..{k}")
        for end in (e.source, e.range):
            if end not in vset:
                raise DanglingReferenceError(f"edge {e.id!r} refers to unknown vertex {end!r}")


def _check_squares(edges: list[Edge], squares: list[Square]) -> None:
    emap = {e.id: e for e in edges}
    for sq in squares:
        for eid in sq.left + sq.right:
            if eid not in emap:
                raise DanglingReferenceError(f"square {sq.left}->{sq.right} refers to unknown edge {eid!r}")
        f, g = (emap[x] for x in sq.left)
        g2, f2 = (emap[x] for x in sq.right)
        if not (f.color == f2.color and g.color == g2.color and f.color < g.color):
            raise SquareEndpointError(f"square {sq.left}->{sq.right} has inconsistent colors")
        if f.range != g.source or g2.range != f2.source:
            raise SquareEndpointError(f"square {sq.left}->{sq.right} has a non-composable side")
        if g2.source != f.source or f2.range != g.range:
            raise SquareEndpointError(f"square {sq.left}->{sq.right} sides have different endpoints")


def _check_bijectivity(sk: Skeleton) -> None:
    lefts: dict[tuple[str, str], int] = {}
    rights: dict[tuple[str, str], int] = {}
    for sq in sk.squares:
        lefts[sq.left] = lefts.get(sq.left, 0) + 1
        rights[sq.right] = rights.get(sq.right, 0) + 1
    for pair, n in list(lefts.items()) + list(rights.items()):
        if n > 1:
            raise BijectivityError(f"pair {'.'.join(pair)} appears in {n} squares")
    for i, j in combinations(range(1, sk.k + 1), 2):
        for f in sk.edges.values():
            if f.color == i:
                for g in sk.out_edges(f.range, j):
                    if (f.id, g) not in lefts:
                        raise BijectivityError(f"composable pair {f.id}.{g} is not the left side of any square")
            elif f.color == j:
                for g in sk.out_edges(f.range, i):
                    if (f.id, g) not in rights:
                        raise BijectivityError(f"composable pair {f.id}.{g} is not the right side of any square")


def _triple_violations(sk: Skeleton, i: int, j: int, l: int, first: bool = False) -> list[AssociativityViolation]:
    out = []
    fwd = sk._swap
    for f in sk.edges.values():
        if f.color != i:
            continue
        for g in sk.out_edges(f.range, j):
            for h in sk.out_edges(sk.edges[g].range, l):
                try:
                    g1, f1 = fwd[(f.id, g)]
                    h1, f2 = fwd[(f1, h)]
                    h2, g2 = fwd[(g1, h1)]
                    route_a = (h2, g2, f2)
                except KeyError:
                    route_a = ()
                try:
                    hb, gb = fwd[(g, h)]
                    hb2, fb = fwd[(f.id, hb)]
                    gb2, fb2 = fwd[(fb, gb)]
                    route_b = (hb2, gb2, fb2)
                except KeyError:
                    route_b = ()
                if not route_a or route_a != route_b:
                    out.append(AssociativityViolation((f.id, g, h), route_a, route_b))
                    if first:
                        return out
    return out


def check_associativity(sk: Skeleton, first: bool = False) -> list[AssociativityViolation]:
    """Compare the two swap chains (i,j,l) -> (l,j,i) on every composable triple.

    Both chains only ever move a higher color leftwards, so only the left->right
    square map is consulted. A missing square shows up as an empty route.
    With ``first`` the scan stops at the first violation found.
    """
    triples = list(combinations(range(1, sk.k + 1), 3))
    if not triples:
        return []
    if first:
        for t in triples:
            found = _triple_violations(sk, *t, first=True)
            if found:
                return found
        return []
    workers = min(worker_count(), len(triples))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda t: _triple_violations(sk, *t), triples))
    else:
        chunks = [_triple_violations(sk, *t) for t in triples]
    out = [v for chunk in chunks for v in chunk]
    out.sort(key=lambda v: v.triple)
    return out


_VALIDATOR = jsonschema.validators.validator_for(SCHEMA)(SCHEMA)


def load_skeleton(doc: str | bytes | Mapping[str, Any]) -> Skeleton:
    """Parse and fully validate a skeleton document (JSON text or an already-decoded mapping)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SkeletonParseError(f"invalid JSON: {exc}") from None
    try:
        _VALIDATOR.validate(doc)
    except jsonschema.ValidationError as exc:
        raise SkeletonParseError(f"schema violation: {exc.message}") from None
    return Skeleton.build(doc["k"], doc["vertices"], doc["edges"], doc.get("squares", []))


def load_skeleton_file(path: str | os.PathLike) -> Skeleton:
    return load_skeleton(FilePath(path).read_text())


def emit(sk: Skeleton) -> str:
    return json.dumps(sk.to_dict(), indent=2)
