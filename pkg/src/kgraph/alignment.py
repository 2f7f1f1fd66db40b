"""Minimal common extensions, the vee-closure of finite path sets, and alignment statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional

from . import degree as deg
from .paths import Path, _block, compose, enumerate_upto, from_edges, prefix, segment, vertex
from .skeleton import Skeleton


@dataclass(frozen=True)
class MceSet:
    pair: tuple[Path, Path]
    extensions: frozenset[Path]

    def __iter__(self):
        return iter(sorted(self.extensions, key=lambda p: p.key))

    def __len__(self):
        return len(self.extensions)

    def __contains__(self, p):
        return p in self.extensions

    def to_dict(self) -> dict:
        return {"pair": [p.literal for p in self.pair], "mce": [p.literal for p in self]}


@dataclass(frozen=True)
class VeeClosure:
    base: frozenset[Path]
    closure: frozenset[Path]

    def __iter__(self):
        return iter(sorted(self.closure, key=lambda p: p.key))

    def __len__(self):
        return len(self.closure)

    def __contains__(self, p):
        return p in self.closure

    def to_dict(self) -> dict:
        return {
            "F": [p.literal for p in sorted(self.base, key=lambda p: p.key)],
            "veeF": [p.literal for p in self],
        }


def _mce_dfs(mu: Path, nu: Path) -> frozenset[Path]:
    sk = mu.skeleton
    if mu.source != nu.source:
        return frozenset()
    target = deg.join(mu.degree, nu.degree)
    colors = _block(target)
    found: set[Path] = set()

    def consistent(partial: Path, color: int) -> bool:
        # the meet with `other` only grows while the new edge's color is still
        # below other's degree; otherwise the check was already done
        for other in (mu, nu):
            if partial.degree[color - 1] > other.degree[color - 1]:
                continue
            m = deg.meet(partial.degree, other.degree)
            if prefix(partial, m) != prefix(other, m):
                return False
        return True

    stack = [Path(mu.source, (), sk)]
    while stack:
        partial = stack.pop()
        depth = len(partial.edges)
        if depth == len(colors):
            found.add(partial)
            continue
        for e in sk.out_edges(partial.range, colors[depth]):
            nxt = Path(mu.source, partial.edges + (e,), sk)
            if consistent(nxt, colors[depth]):
                stack.append(nxt)
    return frozenset(found)


def mce(mu: Path, nu: Path) -> MceSet:
    """Paths of degree ``d(mu) v d(nu)`` extending both ``mu`` and ``nu``."""
    memo = mu.skeleton.cache["mce"]
    ext = memo.get((mu, nu))
    if ext is None:
        ext = _mce_dfs(mu, nu)
        memo[(mu, nu)] = ext
        memo[(nu, mu)] = ext
    return MceSet((mu, nu), ext)


def mce_family(paths: Iterable[Path]) -> frozenset[Path]:
    """Common extensions of every path in ``paths`` with degree the join of their degrees."""
    group = sorted(set(paths), key=lambda p: p.key)
    if not group:
        raise ValueError("mce_family needs a nonempty set")
    current: set[Path] = {group[0]}
    for alpha in group[1:]:
        nxt: set[Path] = set()
        for sigma in current:
            nxt.update(mce(sigma, alpha).extensions)
        current = nxt
        if not current:
            break
    k = group[0].skeleton.k
    target = deg.join_all((p.degree for p in group), k)
    return frozenset(
        g for g in current if g.degree == target and all(prefix(g, a.degree) == a for a in group)
    )


def vee(paths: Iterable[Path]) -> VeeClosure:
    """Union of ``mce_family(G)`` over the nonempty subsets ``G`` of ``paths``."""
    base = sorted(set(paths), key=lambda p: p.key)
    if not base:
        raise ValueError("vee needs a nonempty set")
    families: dict[tuple[int, ...], frozenset[Path]] = {}
    closure: set[Path] = set()
    for r in range(1, len(base) + 1):
        for idx in combinations(range(len(base)), r):
            if r == 1:
                fam = frozenset([base[idx[0]]])
            else:
                parent = families[idx[:-1]]
                if not parent:
                    fam = frozenset()
                else:
                    last = base[idx[-1]]
                    acc: set[Path] = set()
                    for sigma in parent:
                        acc.update(mce(sigma, last).extensions)
                    fam = frozenset(acc)
            families[idx] = fam
            closure.update(fam)
    return VeeClosure(frozenset(base), frozenset(closure))


@dataclass
class AlignmentReport:
    finitely_aligned: bool
    max_generator_mce: int
    generator_argmax: Optional[tuple[Path, Path]]
    generator_counts: list[tuple[Path, Path, int]] = field(default_factory=list)
    bound: Optional[deg.Degree] = None
    max_bounded_mce: Optional[int] = None
    bounded_argmax: Optional[tuple[Path, Path]] = None

    def to_dict(self) -> dict:
        pair = lambda t: [t[0].literal, t[1].literal] if t else None  # noqa: E731
        out = {
            "finitelyAligned": self.finitely_aligned,
            "maxGeneratorMce": self.max_generator_mce,
            "argmax": pair(self.generator_argmax),
            "generatorPairs": [
                {"pair": [a.literal, b.literal], "mce": n} for a, b, n in self.generator_counts
            ],
        }
        if self.bound is not None:
            out["bound"] = list(self.bound)
            out["maxBoundedMce"] = self.max_bounded_mce
            out["boundedArgmax"] = pair(self.bounded_argmax)
        return out


def is_finitely_aligned(sk: Skeleton, bound: Optional[deg.Degree] = None) -> AlignmentReport:
    """MCE statistics over generator pairs (and all same-source pairs up to ``bound``).

    A finite skeleton is always finitely aligned; the interesting output is how
    the generator maximum grows across a family of truncations.
    """
    best, arg = 0, None
    counts = []
    for i, j in combinations(range(1, sk.k + 1), 2):
        for v in sk.vertices:
            for a in sk.out_edges(v, i):
                for b in sk.out_edges(v, j):
                    pa, pb = from_edges(sk, [a]), from_edges(sk, [b])
                    n = len(mce(pa, pb))
                    counts.append((pa, pb, n))
                    if n > best:
                        best, arg = n, (pa, pb)
    report = AlignmentReport(True, best, arg, counts)
    if bound is not None:
        report.bound = tuple(bound)
        bbest, barg = 0, None
        by_source: dict[str, list[Path]] = {}
        for p in enumerate_upto(sk, bound):
            by_source.setdefault(p.source, []).append(p)
        for group in by_source.values():
            for x in range(len(group)):
                for y in range(x, len(group)):
                    n = len(mce(group[x], group[y]))
                    if n > bbest:
                        bbest, barg = n, (group[x], group[y])
        report.max_bounded_mce = bbest
        report.bounded_argmax = barg
    return report


def compose_rank_one(mu1: Path, mu2: Path, nu1: Path, nu2: Path) -> list[tuple[Path, Path]]:
    """Pairs ``(mu1 sigma(p, p v q), nu2 sigma(q, p v q))`` over ``sigma`` in ``mce(mu2, nu1)``."""
    p, q = mu1.degree, nu1.degree
    if mu2.degree != p or nu2.degree != q:
        raise ValueError("mu1, mu2 must share a degree, as must nu1, nu2")
    top = deg.join(p, q)
    out = []
    for sigma in mce(mu2, nu1):
        left = compose(mu1, segment(sigma, p, top))
        right = compose(nu2, segment(sigma, q, top))
        if left is not None and right is not None:
            out.append((left, right))
    return out


def find_avoiding_path(sk: Skeleton, v: str, forbidden: Mapping[int, Iterable]) -> Optional[Path]:
    """Degree (1,...,1) path from ``v`` whose color-m initial edge avoids ``forbidden[m]``.

    Builds ``mu_1, mu_2 = mu_1 alpha, ...`` one color at a time, rejecting any
    extension lying in ``MCE(mu_m, lam)`` for a forbidden ``lam`` of the next
    color, and backtracks over the choices. ``None`` when no witness exists.
    """
    gens: dict[int, list[Path]] = {}
    for m in range(1, sk.k + 1):
        items = forbidden.get(m, ())
        gens[m] = [x if isinstance(x, Path) else from_edges(sk, [x]) for x in items]
        for lam in gens[m]:
            if lam.source != v or lam.degree != deg.unit(sk.k, m):
                raise ValueError(f"{lam} is not a color-{m} edge from {v}")

    def extend(mu: Path, m: int) -> Optional[Path]:
        if m > sk.k:
            return mu
        for e in sk.out_edges(mu.range, m):
            cand = compose(mu, from_edges(sk, [e]))
            if any(cand in mce(mu, lam) for lam in gens[m]):
                continue
            done = extend(cand, m + 1)
            if done is not None:
                return done
        return None

    return extend(vertex(sk, v), 1)
