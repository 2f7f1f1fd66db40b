"""Truncated Fock representation on l^2 of the paths of degree <= N.

``S_lam e_mu = e_{lam mu}`` when ``range(lam) == source(mu)`` and the result
fits under the bound, else 0. Every ``S_lam S_mu^*`` moves basis vectors to
basis vectors, so internally operators are index maps (``-1`` meaning 0) and
externally they are ``scipy.sparse`` CSR matrices.

Truncation only damages vectors near the bound. Each check compares the two
sides of an identity column by column on the interior ``{e_tau : d(tau) <= N - margin}``
where the margin is large enough that neither side touches the cut.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterable, Mapping, Optional

import numpy as np
import scipy.sparse as sps

from . import degree as deg
from .degree import Degree
from .paths import Path, compose, enumerate_paths, enumerate_upto, from_edges, prefix
from .paths import vertex as vertex_path
from .skeleton import Skeleton
from .alignment import mce
from .paths import segment
from .tck import FormalElement, multiply

FockOperator = sps.csr_matrix

DEFAULT_TOL = 1e-6
DIAGONAL_TOL = 1e-9
MAX_ITER = 10_000


class BoundError(ValueError):
    pass


class NormConvergenceWarning(RuntimeWarning):
    pass


class FockSpace:
    def __init__(self, sk: Skeleton, bound: Degree):
        bound = tuple(bound)
        if len(bound) != sk.k or any(c < 0 for c in bound):
            raise BoundError(f"bound {bound} must have {sk.k} nonnegative coordinates")
        self.skeleton = sk
        self.bound = bound
        self.basis: list[Path] = enumerate_upto(sk, bound)
        self.index: dict[Path, int] = {p: i for i, p in enumerate(self.basis)}
        self.dim = len(self.basis)
        self.degrees = np.array([p.degree for p in self.basis], dtype=np.int64).reshape(self.dim, sk.k)
        self.sources = np.array([p.source for p in self.basis], dtype=object)
        self._from: dict[str, list[int]] = {}
        for i, p in enumerate(self.basis):
            self._from.setdefault(p.source, []).append(i)
        self._shift: dict[Path, np.ndarray] = {}
        self._strip: dict[Path, np.ndarray] = {}

    def fits(self, p: Path) -> bool:
        return deg.leq(p.degree, self.bound)

    def _require(self, p: Path):
        if not self.fits(p):
            raise BoundError(f"degree of {p} exceeds the bound {self.bound}")

    def shift(self, lam: Path) -> np.ndarray:
        """Index map of ``S_lam``: column j goes to row ``shift[j]`` (``-1`` for 0)."""
        out = self._shift.get(lam)
        if out is None:
            self._require(lam)
            if lam.is_vertex:
                out = np.where(self.vertex_mask(lam.source), np.arange(self.dim), -1)
            elif len(lam.edges) == 1:
                out = np.full(self.dim, -1, dtype=np.int64)
                room = deg.sub(self.bound, lam.degree)
                for j in self._from.get(lam.range, ()):
                    mu = self.basis[j]
                    if deg.leq(mu.degree, room):
                        out[j] = self.index[compose(lam, mu)]
            else:
                # S_{e1 e2 ... en} = S_e1 S_e2 ... S_en as composed index maps
                out = np.arange(self.dim)
                for e in reversed(lam.edges):
                    step = self.shift(Path(self.skeleton.edges[e].source, (e,), self.skeleton))
                    out = np.where(out >= 0, step[np.maximum(out, 0)], -1)
            self._shift[lam] = out
        return out

    def strip(self, mu: Path) -> np.ndarray:
        """Index map of ``S_mu^*``."""
        out = self._strip.get(mu)
        if out is None:
            sh = self.shift(mu)
            out = np.full(self.dim, -1, dtype=np.int64)
            cols = np.nonzero(sh >= 0)[0]
            out[sh[cols]] = cols
            self._strip[mu] = out
        return out

    def monomial(self, lam: Path, mu: Path) -> tuple[np.ndarray, np.ndarray]:
        """(rows, cols) of the unit entries of ``S_lam S_mu^*``."""
        st = self.strip(mu)
        sh = self.shift(lam)
        cols = np.nonzero(st >= 0)[0]
        rows = sh[st[cols]]
        keep = rows >= 0
        return rows[keep], cols[keep]

    def interior(self, margin: Degree) -> np.ndarray:
        """Boolean mask of basis vectors with ``d(tau) <= N - margin``."""
        room = np.array(self.bound, dtype=np.int64) - np.array(margin, dtype=np.int64)
        if np.any(room < 0):
            return np.zeros(self.dim, dtype=bool)
        return np.all(self.degrees <= room, axis=1)

    def vertex_mask(self, v: str) -> np.ndarray:
        return self.sources == v

    def prefix_mask(self, lam: Path) -> np.ndarray:
        """Diagonal of ``S_lam S_lam^*``: basis paths with initial segment ``lam``."""
        return self.strip(lam) >= 0

    def to_operator(self, rows, cols, data=None) -> FockOperator:
        if data is None:
            data = np.ones(len(rows))
        m = sps.coo_matrix((data, (rows, cols)), shape=(self.dim, self.dim)).tocsr()
        m.eliminate_zeros()
        return m

    def diagonal_operator(self, values) -> FockOperator:
        m = sps.diags(np.asarray(values, dtype=float), format="csr")
        m.eliminate_zeros()
        return m

    def __repr__(self):
        return f"FockSpace(bound={self.bound}, dim={self.dim})"


def fock_generator(sp: FockSpace, lam: Path) -> FockOperator:
    sh = sp.shift(lam)
    cols = np.nonzero(sh >= 0)[0]
    return sp.to_operator(sh[cols], cols)


def evaluate(sp: FockSpace, a: FormalElement, scale: int = 1) -> FockOperator:
    """``scale * sum coeff * S_lam S_mu^*`` as a sparse operator.

    Entries are floats. With ``scale`` a multiple of ``a.denominator`` they
    are integers, so sums and products of such operators stay exact.
    """
    rows, cols, data = [], [], []
    for t, c in a.terms.items():
        r, cl = sp.monomial(t.left, t.right)
        rows.append(r)
        cols.append(cl)
        data.append(np.full(len(r), float(c * scale)))
    if not rows:
        return sp.to_operator([], [])
    return sp.to_operator(np.concatenate(rows), np.concatenate(cols), np.concatenate(data))


def support_degree(a: FormalElement) -> Degree:
    """Join of every degree occurring in ``a``; the interior margin for products."""
    k = a.skeleton.k if a.skeleton is not None else 0
    return deg.join_all((d for t in a.terms for d in (t.left.degree, t.right.degree)), k)


def left_support(a: FormalElement) -> Degree:
    k = a.skeleton.k if a.skeleton is not None else 0
    return deg.join_all((t.left.degree for t in a.terms), k)


def product_margin(a: FormalElement, b: FormalElement) -> Degree:
    """Interior margin on which ``evaluate(a) @ evaluate(b)`` is untouched by truncation.

    ``evaluate(b)`` raises degrees by at most the join of its left degrees and
    ``evaluate(a)`` by at most its own, so columns with
    ``d(tau) <= N - (L(a) + L(b))`` never leave the truncated space.
    """
    return deg.add(left_support(a), left_support(b))


def homomorphism_holds(sp: FockSpace, a: FormalElement, b: FormalElement) -> bool:
    """``evaluate(multiply(a, b)) == evaluate(a) @ evaluate(b)`` on the product interior, exactly.

    Both sides are scaled by ``a.denominator * b.denominator`` so that every
    entry is an integer and no rounding enters the comparison.
    """
    da, db = a.denominator, b.denominator
    lhs = evaluate(sp, multiply(a, b), da * db)
    rhs = evaluate(sp, a, da) @ evaluate(sp, b, db)
    return agree_on(lhs, rhs, sp.interior(product_margin(a, b)))


def diagonal_compression(A: FockOperator) -> FockOperator:
    """``sum_gamma P_gamma A P_gamma`` for the basis projections ``P_gamma``."""
    m = sps.diags(A.diagonal(), format="csr")
    m.eliminate_zeros()
    return m


def agree_on(A: FockOperator, B: FockOperator, mask: np.ndarray) -> bool:
    D = (A - B).tocsc()[:, np.nonzero(mask)[0]]
    D.eliminate_zeros()
    return D.nnz == 0


def is_diagonal(A: FockOperator) -> bool:
    off = A - sps.diags(A.diagonal())
    off = sps.csr_matrix(off)
    off.eliminate_zeros()
    return off.nnz == 0


def operator_norm(A: FockOperator, tol: Optional[float] = None, seed: int = 0) -> float:
    """Largest singular value; exact for diagonal input, power iteration on ``A^T A`` otherwise."""
    if tol is not None and tol <= 0:
        raise ValueError("tol must be positive")
    A = sps.csr_matrix(A)
    if A.shape[0] == 0 or A.nnz == 0:
        return 0.0
    if is_diagonal(A):
        return float(np.max(np.abs(A.diagonal())))
    tol = DEFAULT_TOL if tol is None else tol
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    At = A.T.tocsr()
    est = 0.0
    for _ in range(MAX_ITER):
        y = A @ x
        new = float(y @ y)
        z = At @ y
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0
        x = z / nz
        if abs(new - est) <= 1e-3 * tol * max(new, 1e-300):
            return float(np.sqrt(max(nz, new)))
        est = new
    warnings.warn(f"power iteration did not converge; best estimate {np.sqrt(est)}", NormConvergenceWarning)
    return float(np.sqrt(est))


@dataclass
class RelationResult:
    relation: str
    status: str
    margin: Optional[Degree] = None
    witness: Optional[str] = None
    residual_norm: float = 0.0
    instances: int = 0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "interior-pass")

    def to_dict(self) -> dict:
        out = {
            "relation": self.relation,
            "status": self.status,
            "margin": list(self.margin) if self.margin is not None else None,
            "witness": self.witness,
            "residualNorm": self.residual_norm,
        }
        if self.instances:
            out["instances"] = self.instances
        out.update(self.detail)
        return out


@dataclass
class RelationsReport:
    results: list[RelationResult]

    @property
    def toeplitz_ok(self) -> bool:
        """Relations (1)-(5) all hold."""
        return all(r.passed for r in self.results if r.relation in {"1", "2", "3", "4", "5"})

    def by_relation(self, rel: str) -> list[RelationResult]:
        return [r for r in self.results if r.relation == rel]

    def to_dict(self) -> dict:
        return {"toeplitzFamily": self.toeplitz_ok, "results": [r.to_dict() for r in self.results]}


def _sorted_keys(sp: FockSpace, rows, cols) -> np.ndarray:
    return np.sort(rows.astype(np.int64) * sp.dim + cols)


def _residual(sp: FockSpace, lhs_keys: np.ndarray, rhs_keys: np.ndarray) -> float:
    """Operator norm of the difference of two 0/1 (multi)sets of matrix entries."""
    rows, cols, data = [], [], []
    for keys, sign in ((lhs_keys, 1.0), (rhs_keys, -1.0)):
        rows.append(keys // sp.dim)
        cols.append(keys % sp.dim)
        data.append(np.full(len(keys), sign))
    D = sp.to_operator(np.concatenate(rows), np.concatenate(cols), np.concatenate(data))
    return operator_norm(D)


def _rel_vertices(sp: FockSpace) -> RelationResult:
    sk = sp.skeleton
    ops = {v: fock_generator(sp, vertex_path(sk, v)) for v in sk.vertices}
    n = 0
    for v, Sv in ops.items():
        n += 1
        if not agree_on(Sv @ Sv, Sv, np.ones(sp.dim, bool)) or not agree_on(Sv.T.tocsr(), Sv, np.ones(sp.dim, bool)):
            return RelationResult("1", "fail", witness=v, residual_norm=operator_norm(Sv @ Sv - Sv), instances=n)
    for v, w in ((a, b) for a in sk.vertices for b in sk.vertices if a != b):
        n += 1
        prod = ops[v] @ ops[w]
        prod.eliminate_zeros()
        if prod.nnz:
            return RelationResult("1", "fail", witness=f"{v},{w}", residual_norm=operator_norm(prod), instances=n)
    return RelationResult("1", "pass", margin=deg.zero(sk.k), instances=n)


def _rel_multiplicative(sp: FockSpace, paths: list[Path]) -> RelationResult:
    sk = sp.skeleton
    n = 0
    by_degree: dict[Degree, list[Path]] = {}
    for p in paths:
        by_degree.setdefault(p.degree, []).append(p)
    pairs = [
        (lam, mu)
        for p, lams in by_degree.items()
        for q, mus in by_degree.items()
        if deg.leq(deg.add(p, q), sp.bound)
        for lam in lams
        for mu in mus
    ]
    for lam, mu in pairs:
        n += 1
        sm = sp.shift(mu)
        both = np.where(sm >= 0, sp.shift(lam)[np.maximum(sm, 0)], -1)
        prod = compose(lam, mu)
        want = sp.shift(prod) if prod is not None else np.full(sp.dim, -1, dtype=np.int64)
        if not np.array_equal(both, want):
            cols = np.nonzero(both >= 0)[0]
            wcols = np.nonzero(want >= 0)[0]
            res = _residual(sp, _sorted_keys(sp, both[cols], cols), _sorted_keys(sp, want[wcols], wcols))
            return RelationResult("2", "fail", witness=f"{lam}|{mu}", residual_norm=res, instances=n)
    return RelationResult("2", "pass", margin=deg.zero(sk.k), instances=n)


def _rel_isometric(sp: FockSpace, paths: list[Path]) -> RelationResult:
    sk = sp.skeleton
    worst = deg.zero(sk.k)
    n = 0
    for lam in paths:
        n += 1
        mask = sp.interior(lam.degree)
        worst = deg.join(worst, lam.degree)
        sh = sp.shift(lam)
        st = sp.strip(lam)
        back = np.where(sh >= 0, st[np.maximum(sh, 0)], -1)
        want = np.where(sp.vertex_mask(lam.range), np.arange(sp.dim), -1)
        if not np.array_equal(back[mask], want[mask]):
            cols = np.nonzero(mask & (back >= 0))[0]
            wcols = np.nonzero(mask & (want >= 0))[0]
            res = _residual(sp, _sorted_keys(sp, back[cols], cols), _sorted_keys(sp, want[wcols], wcols))
            return RelationResult("3", "fail", margin=lam.degree, witness=lam.literal, residual_norm=res, instances=n)
    return RelationResult("3", "interior-pass", margin=worst, instances=n)


def _emitters(sp: FockSpace, v: str, p: Degree) -> list[Path]:
    return enumerate_paths(sp.skeleton, p, v)


def _nonzero_degrees(sp: FockSpace) -> list[Degree]:
    return [p for p in deg.below(sp.bound) if any(p)]


def _rel_domination(sp: FockSpace) -> RelationResult:
    sk = sp.skeleton
    n = 0
    for v in sk.vertices:
        sv = sp.vertex_mask(v).astype(np.int64)
        for p in _nonzero_degrees(sp):
            n += 1
            total = np.zeros(sp.dim, dtype=np.int64)
            for lam in _emitters(sp, v, p):
                total += sp.prefix_mask(lam)
            gap = sv - total
            if np.any(gap < 0):
                return RelationResult("4", "fail", witness=f"{v}@{deg.fmt(p)}", residual_norm=float(-gap.min()), instances=n)
    return RelationResult("4", "pass", margin=deg.zero(sk.k), instances=n)


def _pair_check(sp: FockSpace, mu: Path, nu: Path, cols: np.ndarray) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """Compare both sides of relation (5) for one pair on the given columns; None when equal."""
    sn = sp.shift(nu)[cols]
    lhs = np.where(sn >= 0, sp.strip(mu)[np.maximum(sn, 0)], -1)
    hit = lhs >= 0
    lhs_keys = np.sort(lhs[hit].astype(np.int64) * sp.dim + cols[hit])
    rk = []
    for g in mce(mu, nu):
        alpha = segment(g, mu.degree, g.degree)
        beta = segment(g, nu.degree, g.degree)
        sb = sp.strip(beta)[cols]
        r = np.where(sb >= 0, sp.shift(alpha)[np.maximum(sb, 0)], -1)
        keep = r >= 0
        rk.append(r[keep].astype(np.int64) * sp.dim + cols[keep])
    rhs_keys = np.sort(np.concatenate(rk)) if rk else np.zeros(0, dtype=np.int64)
    return None if np.array_equal(lhs_keys, rhs_keys) else (lhs_keys, rhs_keys)


def _rel_nica(sp: FockSpace, paths: list[Path]) -> RelationResult:
    """Relation (5) over all ordered pairs whose degrees join under the bound.

    A common extension of ``mu`` and ``nu`` agrees with both up to
    ``d(mu) ^ d(nu)``, so pairs whose prefixes there differ (in particular
    pairs with different sources) have an empty MCE and the relation says
    ``S_mu^* S_nu = 0``. That is confirmed in bulk: every interior vector
    ``S_nu e_tau`` is stripped by at most one degree-``d(mu)`` path, which
    must share ``nu``'s prefix. Pairs with a shared prefix are compared
    entry by entry against the MCE sum.
    """
    sk = sp.skeleton
    worst = deg.zero(sk.k)
    n = 0
    by_degree: dict[Degree, list[Path]] = {}
    for p in paths:
        by_degree.setdefault(p.degree, []).append(p)
    owners: dict[Degree, np.ndarray] = {}
    for p, group in by_degree.items():
        own = np.full(sp.dim, -1, dtype=np.int64)
        for i, mu in enumerate(group):
            hit = sp.prefix_mask(mu)
            clash = np.nonzero(hit & (own >= 0))[0]
            if len(clash):
                other = group[own[clash[0]]]
                return RelationResult("5", "fail", margin=p, witness=f"{other}|{mu}", residual_norm=1.0, instances=n)
            own[hit] = i
        owners[p] = own
    for p, mus in by_degree.items():
        for q, nus in by_degree.items():
            top = deg.join(p, q)
            if not deg.leq(top, sp.bound):
                continue
            n += len(mus) * len(nus)
            worst = deg.join(worst, top)
            cols = np.nonzero(sp.interior(top))[0]
            m = deg.meet(p, q)
            buckets: dict[Path, list[Path]] = {}
            for mu in mus:
                buckets.setdefault(prefix(mu, m), []).append(mu)
            own = owners[p]
            for nu in nus:
                key = prefix(nu, m)
                sn = sp.shift(nu)[cols]
                hit = own[sn[sn >= 0]]
                for i in np.unique(hit[hit >= 0]):
                    mu = mus[i]
                    if prefix(mu, m) != key:
                        return RelationResult("5", "fail", margin=top, witness=f"{mu}|{nu}", residual_norm=1.0, instances=n)
                for mu in buckets.get(key, ()):
                    bad = _pair_check(sp, mu, nu, cols)
                    if bad is not None:
                        return RelationResult(
                            "5", "fail", margin=top, witness=f"{mu}|{nu}",
                            residual_norm=_residual(sp, *bad), instances=n,
                        )
    return RelationResult("5", "interior-pass", margin=worst, instances=n)


def _rel_exhaustive(sp: FockSpace) -> list[RelationResult]:
    """Per (v, p): the defect ``S_v - sum_{lam in s_p^-1(v)} S_lam S_lam^*``.

    A nonempty emitter set always leaves ``e_v`` in the defect, so the Fock
    family is Toeplitz but never satisfies the exhaustive relation there. An
    empty emitter set is reported as ``6-sink``: read literally the relation
    then demands ``S_v = 0``, which the Fock family violates.
    """
    sk = sp.skeleton
    out = []
    for v in sk.vertices:
        vpath = vertex_path(sk, v)
        sv = sp.vertex_mask(v).astype(np.int64)
        ev = np.zeros(sp.dim, dtype=np.int64)
        ev[sp.index[vpath]] = 1
        for p in _nonzero_degrees(sp):
            lams = _emitters(sp, v, p)
            defect = sv.copy()
            for lam in lams:
                defect -= sp.prefix_mask(lam)
            column = np.where(np.arange(sp.dim) == sp.index[vpath], defect, 0)
            rel = "6" if lams else "6-sink"
            out.append(
                RelationResult(
                    rel,
                    "pass" if not defect.any() else "fail",
                    margin=p,
                    witness=v if defect.any() else None,
                    residual_norm=operator_norm(sp.diagonal_operator(defect)),
                    detail={"degree": list(p), "emitters": len(lams), "defectIsEv": bool(np.array_equal(column, ev) and np.array_equal(defect * ev, ev))},
                )
            )
    return out


def check_relations(sp: FockSpace, paths: Optional[Iterable[Path]] = None) -> RelationsReport:
    """Check relations (1)-(5) of a Toeplitz-Cuntz-Krieger family and report the exhaustive defects.

    ``paths`` defaults to the whole basis; relations (2) and (5) run over all
    pairs whose degrees fit under the bound.
    """
    paths = list(sp.basis if paths is None else paths)
    results = [
        _rel_vertices(sp),
        _rel_multiplicative(sp, paths),
        _rel_isometric(sp, paths),
        _rel_domination(sp),
        _rel_nica(sp, paths),
    ]
    results.extend(_rel_exhaustive(sp))
    return RelationsReport(results)


def degree_projection(sp: FockSpace, p: Degree) -> FockOperator:
    """``sum_{lam in E_p} S_lam S_lam^*`` built from the individual range projections."""
    total = np.zeros(sp.dim)
    for lam in enumerate_paths(sp.skeleton, p):
        total += sp.prefix_mask(lam)
    return sp.diagonal_operator(total)


def check_nica_products(sp: FockSpace, p: Degree, q: Degree) -> RelationResult:
    top = deg.join(p, q)
    if not deg.leq(top, sp.bound):
        raise BoundError(f"{p} v {q} exceeds the bound {sp.bound}")
    lhs = degree_projection(sp, p) @ degree_projection(sp, q)
    rhs = degree_projection(sp, top)
    ok = agree_on(lhs, rhs, np.ones(sp.dim, bool))
    return RelationResult(
        f"nica {deg.fmt(p)}|{deg.fmt(q)}",
        "pass" if ok else "fail",
        margin=deg.zero(sp.skeleton.k),
        residual_norm=0.0 if ok else operator_norm(lhs - rhs),
    )


@dataclass
class FaithfulnessReport:
    vertex: str
    sets: dict[Degree, list[Path]]
    diagonal: np.ndarray
    is_diagonal_projection: bool
    generator_sets: dict[int, list[Path]]
    generator_diagonal: np.ndarray
    reduction_dominated: bool
    space: FockSpace = field(repr=False)

    @property
    def nonzero(self) -> bool:
        return bool(np.any(self.diagonal))

    @property
    def witness(self) -> Optional[Path]:
        sp = self.space
        v = sp.index[vertex_path(sp.skeleton, self.vertex)]
        if self.diagonal[v]:
            return sp.basis[v]
        hits = np.nonzero(self.diagonal)[0]
        return sp.basis[hits[0]] if len(hits) else None

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "vertex": self.vertex,
            "sets": {deg.fmt(p): [x.literal for x in F] for p, F in self.sets.items()},
            "nonzero": self.nonzero,
            "diagonalProjection": self.is_diagonal_projection,
            "witness": w.literal if w is not None else None,
            "generatorSets": {str(m): [x.literal for x in G] for m, G in self.generator_sets.items()},
            "reductionDominated": self.reduction_dominated,
        }


def _hypothesis_product(sp: FockSpace, v: str, sets: Mapping[Degree, Iterable[Path]]) -> np.ndarray:
    sv = sp.vertex_mask(v).astype(np.int64)
    out = sv.copy()
    for p, F in sets.items():
        factor = sv.copy()
        for lam in F:
            factor -= sp.prefix_mask(lam)
        out = out * factor
    return out


def faithfulness_hypothesis(sp: FockSpace, v: str, sets: Optional[Mapping[Degree, Iterable[Path]]] = None) -> FaithfulnessReport:
    """Evaluate ``prod_p (S_v - sum_{lam in F_p} S_lam S_lam^*)`` and its generator-set reduction.

    ``sets`` maps nonzero degrees ``p`` to finite sets of degree-``p`` paths from
    ``v``. With no sets, every generator degree is used with an empty set. The
    reduction replaces each ``lam in F_p`` by its color-``i_p`` initial edge,
    where ``i_p`` is the first color with ``p_i > 0``; the reduced product is
    never larger.
    """
    sk = sp.skeleton
    if v not in sk.vertices:
        raise ValueError(f"unknown vertex {v!r}")
    if not sets:
        sets = {deg.unit(sk.k, m): [] for m in range(1, sk.k + 1)}
    clean: dict[Degree, list[Path]] = {}
    for p, F in sets.items():
        p = tuple(p)
        if len(p) != sk.k or not any(p):
            raise ValueError(f"degree {p} must be a nonzero element of N^{sk.k}")
        if not deg.leq(p, sp.bound):
            raise BoundError(f"degree {p} exceeds the bound {sp.bound}")
        F = list(F)
        for lam in F:
            if lam.source != v or lam.degree != p:
                raise ValueError(f"{lam} is not a degree-{p} path from {v}")
        clean[p] = F
    diagonal = _hypothesis_product(sp, v, clean)
    gens: dict[int, list[Path]] = {m: [] for m in range(1, sk.k + 1)}
    for p, F in clean.items():
        i = next(c for c in range(sk.k) if p[c] > 0) + 1
        for lam in F:
            g = prefix(lam, deg.unit(sk.k, i))
            if g not in gens[i]:
                gens[i].append(g)
    gdiag = _hypothesis_product(sp, v, {deg.unit(sk.k, m): G for m, G in gens.items()})
    return FaithfulnessReport(
        vertex=v,
        sets=clean,
        diagonal=diagonal,
        is_diagonal_projection=bool(np.all((diagonal == 0) | (diagonal == 1))),
        generator_sets=gens,
        generator_diagonal=gdiag,
        reduction_dominated=bool(np.all(gdiag <= diagonal)),
        space=sp,
    )


def tail_avoiding_product(sp: FockSpace, lam: Path, tails: Iterable[Path]) -> np.ndarray:
    """Diagonal of ``S_lam S_lam^* prod_{mu} (S_{s(lam)} - S_{lam mu} S_{lam mu}^*)``.

    ``tails`` must be nonvertex paths starting at ``range(lam)``.
    """
    out = sp.prefix_mask(lam).astype(np.int64)
    base = sp.vertex_mask(lam.source).astype(np.int64)
    for mu in tails:
        if mu.source != lam.range or mu.is_vertex:
            raise ValueError(f"{mu} must be a nonvertex path from {lam.range}")
        out = out * (base - sp.prefix_mask(compose(lam, mu)))
    return out


def avoiding_witness_holds(sp: FockSpace, mu: Path, forbidden: Mapping[int, Iterable[Path]]) -> bool:
    """``prod_m (S_v - sum_{G_m} S_lam S_lam^*) S_mu S_mu^* == S_mu S_mu^*`` exactly."""
    sk = sp.skeleton
    v = mu.source
    sets = {deg.unit(sk.k, m): [x if isinstance(x, Path) else from_edges(sk, [x]) for x in G] for m, G in forbidden.items()}
    prod = _hypothesis_product(sp, v, sets)
    rng = sp.prefix_mask(mu).astype(np.int64)
    return bool(np.array_equal(prod * rng, rng))


def all_degree_pairs(bound: Degree) -> list[tuple[Degree, Degree]]:
    ds = list(deg.below(bound))
    return list(cartesian(ds, ds))
