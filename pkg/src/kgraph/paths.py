"""Paths in a k-graph, kept in color-sorted normal form.

Every path is stored as the unique edge word whose colors are non-decreasing;
the factorisation property makes this a canonical form, so path equality is
word equality. Vertices are the degree-0 paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import degree as deg
from .degree import Degree
from .skeleton import Skeleton


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    source: str
    edges: tuple[str, ...]
    skeleton: Skeleton = field(compare=False, hash=False, repr=False)
    degree: Degree = field(init=False, compare=False, hash=False, repr=False)
    range: str = field(init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        sk = self.skeleton
        counts = [0] * sk.k
        for e in self.edges:
            counts[sk.edges[e].color - 1] += 1
        object.__setattr__(self, "degree", tuple(counts))
        end = sk.edges[self.edges[-1]].range if self.edges else self.source
        object.__setattr__(self, "range", end)

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    @property
    def key(self):
        """Deterministic sort key: total length, degree, source, word."""
        return (sum(self.degree), self.degree, self.source, self.edges)

    @property
    def literal(self) -> str:
        return ".".join(self.edges) if self.edges else self.source

    def __str__(self):
        return self.literal


def vertex(sk: Skeleton, v: str) -> Path:
    if v not in sk.vertices:
        raise PathError(f"unknown vertex {v!r}")
    return Path(v, (), sk)


def _block(d: Degree) -> list[int]:
    word: list[int] = []
    for c, n in enumerate(d, start=1):
        word.extend([c] * n)
    return word


def _rewrite(sk: Skeleton, edges: Sequence[str], colorword: Sequence[int]) -> tuple[str, ...]:
    word = list(edges)
    for t, want in enumerate(colorword):
        s = t
        while sk.edges[word[s]].color != want:
            s += 1
        for u in range(s, t, -1):
            word[u - 1], word[u] = sk.swap(word[u - 1], word[u])
    return tuple(word)


def _normal_form(sk: Skeleton, edges: tuple[str, ...]) -> tuple[str, ...]:
    memo = sk.cache["refactor"]
    out = memo.get(edges)
    if out is None:
        out = _rewrite(sk, edges, sorted(sk.edges[e].color for e in edges))
        memo[edges] = out
    return out


def refactor(p: Path, colorword: Sequence[int]) -> tuple[str, ...]:
    """Edge word realizing ``p`` with the given color word (a permutation of its colors)."""
    if sorted(colorword) != _block(p.degree):
        raise PathError(f"color word {list(colorword)} is not a rearrangement of the colors of {p}")
    return _rewrite(p.skeleton, p.edges, colorword)


def from_edges(sk: Skeleton, edges: Sequence[str]) -> Path:
    """Path from any composable edge word; raises if the word is not composable."""
    edges = tuple(edges)
    if not edges:
        raise PathError("empty edge word; use vertex() for degree-0 paths")
    for e in edges:
        if e not in sk.edges:
            raise PathError(f"unknown edge {e!r}")
    for a, b in zip(edges, edges[1:]):
        if sk.edges[a].range != sk.edges[b].source:
            raise PathError(f"edges {a!r} and {b!r} are not composable")
    return Path(sk.edges[edges[0]].source, _normal_form(sk, edges), sk)


def parse_path(sk: Skeleton, literal: str) -> Path:
    literal = literal.strip()
    if literal in sk.vertices:
        return vertex(sk, literal)
    return from_edges(sk, literal.split("."))


def compose(a: Path, b: Path) -> Optional[Path]:
    """``ab``, or ``None`` when ``range(a) != source(b)``."""
    if a.range != b.source:
        return None
    if b.is_vertex:
        return a
    if a.is_vertex:
        return b
    return Path(a.source, _normal_form(a.skeleton, a.edges + b.edges), a.skeleton)


def segment(p: Path, a: Degree, b: Degree) -> Path:
    """The piece of ``p`` between degrees ``a`` and ``b``."""
    memo = p.skeleton.cache["segment"]
    hit = memo.get((p, a, b))
    if hit is not None:
        return hit
    if not (deg.leq(a, b) and deg.leq(b, p.degree)) or any(c < 0 for c in a):
        raise PathError(f"need 0 <= {a} <= {b} <= {p.degree}")
    sk = p.skeleton
    head = _block(a)
    mid = _block(deg.sub(b, a))
    word = _rewrite(sk, p.edges, head + mid + _block(deg.sub(p.degree, b)))
    piece = word[len(head): len(head) + len(mid)]
    if piece:
        out = Path(sk.edges[piece[0]].source, piece, sk)
    else:
        start = sk.edges[word[len(head) - 1]].range if head else p.source
        out = Path(start, (), sk)
    memo[(p, a, b)] = out
    return out


def prefix(p: Path, a: Degree) -> Path:
    return segment(p, deg.zero(len(a)), a)


def is_prefix(q: Path, p: Path) -> bool:
    """True when ``p = q x`` for some path ``x``."""
    return q.source == p.source and deg.leq(q.degree, p.degree) and prefix(p, q.degree) == q


def enumerate_paths(sk: Skeleton, n: Degree, src: Optional[str] = None) -> list[Path]:
    """All paths of degree exactly ``n`` (optionally from ``src``), each once, in normal form."""
    colors = _block(n)
    starts: Iterable[str] = [src] if src is not None else sk.vertices
    out: list[Path] = []
    for v in starts:
        if not colors:
            out.append(Path(v, (), sk))
            continue
        stack: list[tuple[str, tuple[str, ...]]] = [(v, ())]
        while stack:
            at, word = stack.pop()
            if len(word) == len(colors):
                out.append(Path(v, word, sk))
                continue
            for e in reversed(sk.out_edges(at, colors[len(word)])):
                stack.append((sk.edges[e].range, word + (e,)))
    return out


def enumerate_upto(sk: Skeleton, bound: Degree, src: Optional[str] = None) -> list[Path]:
    out: list[Path] = []
    for n in deg.below(bound):
        out.extend(enumerate_paths(sk, n, src))
    return out
