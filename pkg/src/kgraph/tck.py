"""Exact symbolic arithmetic in span{s_lam s_mu^*}.

A :class:`FormalElement` is a finite map from terms ``(lam, mu)`` (with
``range(lam) == range(mu)``) to rational coefficients. Products are expanded
with the minimal-common-extension rule

    (s_lam s_mu^*)(s_sig s_tau^*) = sum_{mu a = sig b in MCE(mu, sig)} s_{lam a} s_{tau b}^*

so every identity checked here is an exact equality of coefficient maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Mapping, NamedTuple, Optional, Union

from . import paths as P
from .alignment import VeeClosure, mce, vee
from .paths import Path, compose, is_prefix, prefix, segment
from .skeleton import Skeleton

Scalar = Union[int, Fraction]


class Term(NamedTuple):
    left: Path
    right: Path


class FormalElement:
    __slots__ = ("terms", "skeleton")

    def __init__(self, terms: Mapping[Term, Scalar] | None = None, skeleton: Skeleton | None = None):
        clean: dict[Term, Fraction] = {}
        for t, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                t = Term(*t)
                if t.left.range != t.right.range:
                    raise ValueError(f"term s_{t.left} s_{t.right}^* has mismatched ranges")
                clean[t] = c
        self.terms = clean
        if skeleton is None and clean:
            skeleton = next(iter(clean)).left.skeleton
        self.skeleton = skeleton

    @property
    def denominator(self) -> int:
        """Least common multiple of the coefficient denominators (1 for zero)."""
        return math.lcm(1, *(c.denominator for c in self.terms.values()))

    def _combine(self, other: "FormalElement", sign: int) -> "FormalElement":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, Fraction(0)) + sign * c
        return FormalElement(out, self.skeleton or other.skeleton)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return FormalElement({t: -c for t, c in self.terms.items()}, self.skeleton)

    def __mul__(self, other):
        if isinstance(other, FormalElement):
            return multiply(self, other)
        if isinstance(other, Rational):
            return FormalElement({t: c * other for t, c in self.terms.items()}, self.skeleton)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Rational):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, FormalElement):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items(), key=lambda tc: (tc[0].left.key, tc[0].right.key))

    def is_diagonal(self) -> bool:
        return all(t.left == t.right for t in self.terms)

    def to_list(self) -> list[dict]:
        return [{"left": t.left.literal, "right": t.right.literal, "coeff": str(c)} for t, c in self.items()]

    @classmethod
    def from_list(cls, sk: Skeleton, items: Iterable[Mapping]) -> "FormalElement":
        out: dict[Term, Fraction] = {}
        for item in items:
            t = Term(P.parse_path(sk, item["left"]), P.parse_path(sk, item["right"]))
            out[t] = out.get(t, Fraction(0)) + Fraction(item["coeff"])
        return cls(out, sk)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for t, c in self.items():
            parts.append(f"{c}*s[{t.left}]s[{t.right}]*")
        return " + ".join(parts)


def zero(sk: Skeleton) -> FormalElement:
    return FormalElement({}, sk)


def gen(lam: Path, mu: Path) -> FormalElement:
    """``s_lam s_mu^*``."""
    if lam.range != mu.range:
        raise ValueError(f"range({lam}) != range({mu})")
    return FormalElement({Term(lam, mu): 1}, lam.skeleton)


def vertex(sk: Skeleton, v: str) -> FormalElement:
    p = P.vertex(sk, v)
    return gen(p, p)


def _term_product(a: Term, b: Term) -> list[Term]:
    sk = a.left.skeleton
    memo = sk.cache.setdefault("term_mul", {})
    hit = memo.get((a, b))
    if hit is not None:
        return hit
    lam, mu = a
    sig, tau = b
    out = []
    for g in mce(mu, sig):
        alpha = segment(g, mu.degree, g.degree)
        beta = segment(g, sig.degree, g.degree)
        out.append(Term(compose(lam, alpha), compose(tau, beta)))
    memo[(a, b)] = out
    return out


def multiply(a: FormalElement, b: FormalElement) -> FormalElement:
    out: dict[Term, Fraction] = {}
    for ta, ca in a.terms.items():
        for tb, cb in b.terms.items():
            c = ca * cb
            for t in _term_product(ta, tb):
                out[t] = out.get(t, Fraction(0)) + c
    return FormalElement(out, a.skeleton or b.skeleton)


def adjoint(a: FormalElement) -> FormalElement:
    return FormalElement({Term(t.right, t.left): c for t, c in a.terms.items()}, a.skeleton)


def diag(a: FormalElement) -> FormalElement:
    """Keep the ``s_lam s_lam^*`` terms, drop the rest."""
    return FormalElement({t: c for t, c in a.terms.items() if t.left == t.right}, a.skeleton)


def range_projection(p: Path) -> FormalElement:
    return gen(p, p)


def _closure(F) -> VeeClosure:
    return F if isinstance(F, VeeClosure) else vee(F)


def extensions_in(lam: Path, closure: VeeClosure) -> list[Path]:
    """Proper extensions ``lam alpha`` (``d(alpha) != 0``) of ``lam`` inside the closure."""
    return [g for g in closure if g != lam and is_prefix(lam, g)]


def q_projection(lam: Path, closure: VeeClosure) -> FormalElement:
    """``s_lam s_lam^* prod (s_{s(lam)} - s_{lam a} s_{lam a}^*)`` over proper extensions in the closure."""
    if lam not in closure:
        raise ValueError(f"{lam} is not in the closure")
    sk = lam.skeleton
    out = gen(lam, lam)
    unit = vertex(sk, lam.source)
    for g in extensions_in(lam, closure):
        out = multiply(out, unit - gen(g, g))
    return out


class AdmissibilityError(ValueError):
    pass


def _check_admissible(F: Iterable[Path]) -> list[Path]:
    F = sorted(set(F), key=lambda p: p.key)
    if not F:
        raise AdmissibilityError("F must be nonempty")
    members = set(F)
    for lam in F:
        if P.vertex(lam.skeleton, lam.source) not in members:
            raise AdmissibilityError(f"source vertex of {lam} is missing from F")
    return F


@dataclass
class PartitionReport:
    closure: VeeClosure
    residual: FormalElement
    range_residuals: dict[Path, FormalElement] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.residual and not any(self.range_residuals.values())

    def to_dict(self) -> dict:
        return {
            "F": [p.literal for p in sorted(self.closure.base, key=lambda p: p.key)],
            "veeF": [p.literal for p in self.closure],
            "status": "pass" if self.ok else "fail",
            "residual": self.residual.to_list(),
            "rangeIdentityFailures": [p.literal for p, r in self.range_residuals.items() if r],
        }


def partition_check(F: Iterable[Path]) -> PartitionReport:
    """Check that the Q-projections of the closure sum to the source-vertex projections.

    Also checks, for each ``lam`` in the closure, that ``s_lam s_lam^*`` is the
    sum of the Q-projections of its extensions in the closure.
    """
    F = _check_admissible(F)
    sk = F[0].skeleton
    closure = vee(F)
    qs = {lam: q_projection(lam, closure) for lam in closure}
    total = zero(sk)
    for q in qs.values():
        total = total + q
    for v in sorted({lam.source for lam in F}):
        total = total - vertex(sk, v)
    range_residuals = {}
    for lam in closure:
        acc = gen(lam, lam)
        for g in closure:
            if is_prefix(lam, g):
                acc = acc - qs[g]
        range_residuals[lam] = acc
    return PartitionReport(closure, total, range_residuals)


def max_subpath(gamma: Path, closure: VeeClosure) -> Path:
    """The longest initial segment of ``gamma`` lying in the closure."""
    cands = [m for m in closure if is_prefix(m, gamma)]
    if not cands:
        raise ValueError(f"no element of the closure is an initial segment of {gamma}")
    top = cands[0].degree
    for m in cands[1:]:
        top = tuple(max(a, b) for a, b in zip(top, m.degree))
    best = prefix(gamma, top)
    if best not in closure:
        raise ValueError(f"join of initial segments of {gamma} is not attained in the closure")
    return best


def refinement_tails(gamma: Path, closure: VeeClosure) -> list[Path]:
    """Nonvertex tails ``sigma`` over distinct prefix pairs of ``gamma`` in the closure.

    For prefixes ``lam != mu`` with ``gamma = lam lam' = mu mu'`` these are the
    pieces ``delta(d(lam'), d(delta))`` and ``delta(d(mu'), d(delta))`` for
    ``delta`` in ``MCE(lam', mu')``. Degree-0 pieces are dropped: they would
    contribute the factor ``s_gamma s_gamma^* - s_gamma s_gamma^* = 0``.
    """
    pres = [m for m in closure if is_prefix(m, gamma)]
    tails: set[Path] = set()
    for lam, mu in combinations(pres, 2):
        lt = segment(gamma, lam.degree, gamma.degree)
        mt = segment(gamma, mu.degree, gamma.degree)
        for d in mce(lt, mt):
            for cut in (lt.degree, mt.degree):
                sigma = segment(d, cut, d.degree)
                if not sigma.is_vertex:
                    tails.add(sigma)
    return sorted(tails, key=lambda p: p.key)


def refine_projection(gamma: Path, F) -> FormalElement:
    """Subprojection of ``Q_gamma`` that annihilates off-diagonal compressions along ``gamma``."""
    closure = _closure(F)
    if gamma not in closure:
        raise ValueError(f"{gamma} is not in the closure")
    out = q_projection(gamma, closure)
    top = gen(gamma, gamma)
    for sigma in refinement_tails(gamma, closure):
        ext = compose(gamma, sigma)
        out = multiply(out, top - gen(ext, ext))
    return out


@dataclass
class ExtensionCheck:
    removed: Path
    delta: Path
    max_subpath: Path
    residual: FormalElement

    @property
    def ok(self) -> bool:
        return not self.residual

    def to_dict(self) -> dict:
        return {
            "removed": self.removed.literal,
            "delta": self.delta.literal,
            "maxSubpath": self.max_subpath.literal,
            "status": "pass" if self.ok else "fail",
        }


def new_extension_check(F: Iterable[Path], lam: Optional[Path] = None) -> list[ExtensionCheck]:
    """For ``G = F - {lam}``, compare ``Q^F_delta`` with ``Q^G_{mu_delta} s_delta s_delta^*``.

    Runs over every ``delta`` in the F-closure but not in the G-closure, for the
    given nonvertex ``lam`` or for all nonvertex members of ``F``.
    """
    F = _check_admissible(F)
    cf = vee(F)
    removed = [lam] if lam is not None else [x for x in F if not x.is_vertex]
    out = []
    for x in removed:
        if x.is_vertex or x not in F:
            raise ValueError(f"{x} must be a nonvertex member of F")
        cg = vee([y for y in F if y != x])
        for delta in cf:
            if delta in cg:
                continue
            m = max_subpath(delta, cg)
            res = q_projection(delta, cf) - multiply(q_projection(m, cg), gen(delta, delta))
            out.append(ExtensionCheck(x, delta, m, res))
    return out
