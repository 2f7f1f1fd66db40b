"""Multidegrees in N^k with the componentwise lattice order."""

from __future__ import annotations

from itertools import product
from operator import add as plus, le
from typing import Iterable, Iterator, Tuple

Degree = Tuple[int, ...]


def zero(k: int) -> Degree:
    return (0,) * k


def unit(k: int, i: int) -> Degree:
    """Generator e_i; colors are 1-based."""
    return tuple(1 if c == i - 1 else 0 for c in range(k))


def add(p: Degree, q: Degree) -> Degree:
    return tuple(map(plus, p, q))


def sub(p: Degree, q: Degree) -> Degree:
    out = tuple(a - b for a, b in zip(p, q))
    if any(c < 0 for c in out):
        raise ValueError(f"{q} is not below {p}")
    return out


def join(p: Degree, q: Degree) -> Degree:
    return tuple(map(max, p, q))


def meet(p: Degree, q: Degree) -> Degree:
    return tuple(map(min, p, q))


def join_all(degrees: Iterable[Degree], k: int) -> Degree:
    out = zero(k)
    for d in degrees:
        out = join(out, d)
    return out


def leq(p: Degree, q: Degree) -> bool:
    return all(map(le, p, q))


def size(p: Degree) -> int:
    return sum(p)


def below(n: Degree) -> Iterator[Degree]:
    """All degrees 0 <= p <= n, ordered by total size then lexicographically."""
    return iter(sorted(product(*(range(c + 1) for c in n)), key=lambda d: (sum(d), d)))


def parse(text: str) -> Degree:
    try:
        out = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"bad degree literal {text!r}") from None
    if not out or any(c < 0 for c in out):
        raise ValueError(f"bad degree literal {text!r}")
    return out


def fmt(p: Degree) -> str:
    return ",".join(str(c) for c in p)
