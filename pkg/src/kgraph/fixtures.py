"""Built-in skeletons: the truncated counterexample, loop graphs, and random families."""

from __future__ import annotations

import random
import string
from itertools import combinations, product
from typing import Callable, Optional

import numpy as np

from .degree import Degree
from .paths import Path, enumerate_upto, vertex
from .skeleton import Edge, Skeleton, Square


def ex43(m: int = 2) -> Skeleton:
    """Four vertices with ``beta alpha_i = lambda mu_i`` for ``i = 0..m``.

    Color 1: ``lambda: 00 -> 10`` and ``alpha_i: 01 -> 11``.
    Color 2: ``beta: 00 -> 01`` and ``mu_i: 10 -> 11``.
    The pair ``(lambda, beta)`` has exactly ``m + 1`` minimal common extensions.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    edges = [Edge("lambda", 1, "00", "10"), Edge("beta", 2, "00", "01")]
    squares = []
    for i in range(m + 1):
        edges.append(Edge(f"alpha_{i}", 1, "01", "11"))
        edges.append(Edge(f"mu_{i}", 2, "10", "11"))
        squares.append(Square(("lambda", f"mu_{i}"), ("beta", f"alpha_{i}")))
    return Skeleton.build(2, ["00", "01", "10", "11"], edges, squares)


def _loop_names(m: int) -> list[str]:
    if m <= 26:
        return list(string.ascii_lowercase[:m])
    return [f"a{i}" for i in range(m)]


def loops(m: int = 2) -> Skeleton:
    """One vertex ``v`` with ``m`` loops of a single color (``a``, ``b``, ... )."""
    return Skeleton.build(1, ["v"], [Edge(x, 1, "v", "v") for x in _loop_names(m)])


def free_product(k: int, m: int = 2) -> Skeleton:
    """One vertex, ``m`` loops per color, squares ``[x, y] -> [y, x]``."""
    names = {c: [f"{string.ascii_lowercase[c - 1]}_{i}" for i in range(m)] for c in range(1, k + 1)}
    edges = [Edge(x, c, "v", "v") for c in names for x in names[c]]
    squares = [
        Square((x, y), (y, x))
        for i, j in combinations(range(1, k + 1), 2)
        for x in names[i]
        for y in names[j]
    ]
    return Skeleton.build(k, ["v"], edges, squares)


def free2(m: int = 2) -> Skeleton:
    return free_product(2, m)


def _bijection_squares(rng: random.Random, lefts: dict, rights: dict) -> list[Square]:
    out = []
    for key in sorted(lefts):
        ls, rs = lefts[key], rights.get(key, [])
        if len(ls) != len(rs):
            raise ValueError(f"square count mismatch at {key}")
        rs = list(rs)
        rng.shuffle(rs)
        out.extend(Square(a, b) for a, b in zip(ls, rs))
    return out


def _coloured_edges(mats: list[np.ndarray], vertices: list[str]) -> list[Edge]:
    edges = []
    for c, M in enumerate(mats, start=1):
        for u, w in zip(*np.nonzero(M)):
            for t in range(M[u, w]):
                edges.append(Edge(f"e{c}_{u}_{w}_{t}", c, vertices[u], vertices[w]))
    return edges


def random_2graph(seed: int = 0, max_edges: int = 20, max_vertices: int = 4) -> Skeleton:
    """Random 2-graph with commuting adjacency matrices and random factorisation bijections.

    ``M2`` is a nonnegative polynomial in ``M1`` so the square counts match at
    every (source, range); with two colors there is no associativity condition,
    so any bijection gives a valid skeleton.
    """
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    while True:
        n = rng.randint(1, max_vertices)
        M1 = nrng.integers(0, 3, size=(n, n))
        a = [rng.randint(0, 2), rng.randint(0, 2), rng.randint(0, 1)]
        M2 = a[0] * np.eye(n, dtype=np.int64) + a[1] * M1 + a[2] * (M1 @ M1)
        if 0 < M1.sum() <= max_edges and 0 < M2.sum() <= max_edges:
            break
    vertices = [f"v{i}" for i in range(n)]
    edges = _coloured_edges([M1, M2], vertices)
    return Skeleton.build(2, vertices, edges, _random_squares(rng, 2, vertices, edges))


def _random_squares(rng: random.Random, k: int, vertices: list[str], edges: list[Edge]) -> list[Square]:
    out_by: dict[tuple[str, int], list[Edge]] = {}
    for e in edges:
        out_by.setdefault((e.source, e.color), []).append(e)
    squares = []
    for i, j in combinations(range(1, k + 1), 2):
        lefts: dict[tuple[str, str], list] = {}
        rights: dict[tuple[str, str], list] = {}
        for f in edges:
            if f.color == i:
                for g in out_by.get((f.range, j), []):
                    lefts.setdefault((f.source, g.range), []).append((f.id, g.id))
            elif f.color == j:
                for g in out_by.get((f.range, i), []):
                    rights.setdefault((f.source, g.range), []).append((f.id, g.id))
        if set(lefts) != set(rights):
            raise ValueError("adjacency matrices do not commute")
        squares.extend(_bijection_squares(rng, lefts, rights))
    return squares


def random_1graph(rng: random.Random, max_vertices: int = 3) -> tuple[int, list[tuple[int, int]]]:
    """A strongly connected 1-graph on ``n`` vertices with doubled cycle edges.

    Every vertex gets a non-loop edge in and out and every cycle edge has a
    parallel twin, which is what makes square perturbations of products visible.
    """
    n = rng.randint(2, max_vertices)
    arcs = []
    for u in range(n):
        w = (u + 1) % n
        arcs.extend([(u, w)] * rng.randint(2, 3))
    if rng.random() < 0.5:
        u = rng.randrange(n)
        arcs.append((u, u))
    return n, arcs


def product_3graph(seed: int = 0, max_vertices: int = 2) -> Skeleton:
    """Cartesian product of three random 1-graphs; squares are the product squares."""
    rng = random.Random(seed)
    factors = [random_1graph(rng, max_vertices) for _ in range(3)]
    coords = list(product(*(range(n) for n, _ in factors)))
    name = lambda x: "v" + "_".join(map(str, x))  # noqa: E731
    edges = []
    by_arc: dict[tuple[int, tuple, int], str] = {}
    for c, (n, arcs) in enumerate(factors, start=1):
        for t, (u, w) in enumerate(arcs):
            for x in coords:
                if x[c - 1] != u:
                    continue
                y = list(x)
                y[c - 1] = w
                eid = f"e{c}_{t}_{name(x)}"
                edges.append(Edge(eid, c, name(x), name(tuple(y))))
                by_arc[(c, x, t)] = eid
    squares = []
    for i, j in combinations(range(1, 4), 2):
        for x in coords:
            for ti, (ui, wi) in enumerate(factors[i - 1][1]):
                if x[i - 1] != ui:
                    continue
                for tj, (uj, wj) in enumerate(factors[j - 1][1]):
                    if x[j - 1] != uj:
                        continue
                    xi = list(x)
                    xi[i - 1] = wi
                    xj = list(x)
                    xj[j - 1] = wj
                    f = by_arc[(i, x, ti)]
                    g = by_arc[(j, tuple(xi), tj)]
                    g2 = by_arc[(j, x, tj)]
                    f2 = by_arc[(i, tuple(xj), ti)]
                    squares.append(Square((f, g), (g2, f2)))
    return Skeleton.build(3, [name(x) for x in coords], edges, squares)


def square_transpositions(sk: Skeleton) -> list[tuple[int, int]]:
    """Index pairs of squares sharing colors and endpoints; swapping their right sides keeps bijectivity."""
    groups: dict[tuple, list[int]] = {}
    for idx, sq in enumerate(sk.squares):
        f, g = (sk.edges[x] for x in sq.left)
        groups.setdefault((f.color, g.color, f.source, g.range), []).append(idx)
    return [pair for idxs in groups.values() for pair in combinations(idxs, 2)]


def perturb(sk: Skeleton, a: int, b: int) -> Skeleton:
    """Copy of ``sk`` with the right sides of squares ``a`` and ``b`` exchanged (unvalidated)."""
    squares = list(sk.squares)
    sa, sb = squares[a], squares[b]
    squares[a] = Square(sa.left, sb.right)
    squares[b] = Square(sb.left, sa.right)
    return Skeleton(sk.k, sk.vertices, sk.edges.values(), squares)


def sample_admissible(sk: Skeleton, bound: Degree, rng: random.Random, max_size: int = 4) -> list[Path]:
    """Random finite F closed under taking sources.

    One or two source vertices, plus nonvertex paths of degree <= ``bound``
    from them, at most ``max_size`` elements in total.
    """
    srcs = rng.sample(list(sk.vertices), min(len(sk.vertices), rng.randint(1, 2)))
    F = [vertex(sk, v) for v in srcs]
    pool = [p for v in srcs for p in enumerate_upto(sk, bound, v) if not p.is_vertex]
    room = max(0, max_size - len(F))
    if pool and room:
        F.extend(rng.sample(pool, min(len(pool), rng.randint(1, room))))
    return F


FIXTURES: dict[str, Callable[..., Skeleton]] = {
    "ex43": lambda m=None, seed=0: ex43(2 if m is None else m),
    "loops": lambda m=None, seed=0: loops(2 if m is None else m),
    "free2": lambda m=None, seed=0: free2(2 if m is None else m),
    "random": lambda m=None, seed=0: random_2graph(seed),
    "product3": lambda m=None, seed=0: product_3graph(seed),
}


def build_fixture(name: str, m: Optional[int] = None, seed: int = 0) -> Skeleton:
    try:
        factory = FIXTURES[name]
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(sorted(FIXTURES))}") from None
    return factory(m=m, seed=seed)
