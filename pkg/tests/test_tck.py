import random
from fractions import Fraction

import numpy as np
import pytest

from kgraph import degree as deg
from kgraph import fixtures as fx
from kgraph.alignment import mce, vee
from kgraph.fock import FockSpace, evaluate, tail_avoiding_product
from kgraph.paths import enumerate_upto, is_prefix, parse_path, vertex as vpath
from kgraph.tck import (
    AdmissibilityError,
    FormalElement,
    Term,
    adjoint,
    diag,
    extensions_in,
    gen,
    max_subpath,
    multiply,
    new_extension_check,
    partition_check,
    q_projection,
    refine_projection,
    refinement_tails,
    vertex,
    zero,
)


def random_element(sk, rng, bound, nterms=4):
    ps = enumerate_upto(sk, bound)
    by_range = {}
    for p in ps:
        by_range.setdefault(p.range, []).append(p)
    terms = {}
    for _ in range(nterms):
        lam = rng.choice(ps)
        mu = rng.choice(by_range[lam.range])
        terms[Term(lam, mu)] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return FormalElement(terms, sk)


def test_gen_range_mismatch(ex43):
    with pytest.raises(ValueError):
        gen(parse_path(ex43, "lambda"), parse_path(ex43, "beta"))


def test_gen_vertex_is_vertex(ex43):
    v = vpath(ex43, "00")
    assert gen(v, v) == vertex(ex43, "00")


def test_range_projection_idempotent(free2):
    p = gen(parse_path(free2, "a_0.b_1"), parse_path(free2, "a_0.b_1"))
    assert multiply(p, p) == p


def test_loops_orthogonal_ranges(loops):
    a, b = parse_path(loops, "a"), parse_path(loops, "b")
    assert multiply(gen(a, a), gen(b, b)) == zero(loops)
    v = vpath(loops, "v")
    assert multiply(gen(v, a), gen(a, v)) == vertex(loops, "v")


def test_ex43_nica_expansion(ex43):
    lam, beta = parse_path(ex43, "lambda"), parse_path(ex43, "beta")
    lhs = multiply(gen(vpath(ex43, "10"), lam), gen(beta, vpath(ex43, "01")))
    want = zero(ex43)
    for i in range(3):
        want = want + gen(parse_path(ex43, f"mu_{i}"), parse_path(ex43, f"alpha_{i}"))
    assert lhs == want


def test_range_projection_product_is_mce_sum(ex43):
    lam, beta = parse_path(ex43, "lambda"), parse_path(ex43, "beta")
    want = zero(ex43)
    for g in mce(lam, beta):
        want = want + gen(g, g)
    assert multiply(gen(lam, lam), gen(beta, beta)) == want


def test_vertex_is_a_unit_on_its_source(ex43):
    lam = parse_path(ex43, "lambda.mu_0")
    x = gen(lam, parse_path(ex43, "beta.alpha_0"))
    assert multiply(vertex(ex43, "00"), x) == x
    assert multiply(vertex(ex43, "01"), x) == zero(ex43)


@pytest.mark.parametrize("seed", range(5))
def test_multiply_associative(seed):
    rng = random.Random(seed)
    sk = [fx.free2(2), fx.ex43(2), fx.random_2graph(seed)][seed % 3]
    a, b, c = (random_element(sk, rng, (1, 1), 3) for _ in range(3))
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@pytest.mark.parametrize("seed", range(5))
def test_adjoint_is_antimultiplicative(seed):
    rng = random.Random(seed)
    sk = fx.random_2graph(seed)
    a, b = random_element(sk, rng, (1, 1)), random_element(sk, rng, (1, 1))
    assert adjoint(adjoint(a)) == a
    assert adjoint(multiply(a, b)) == multiply(adjoint(b), adjoint(a))
    assert diag(adjoint(a)) == adjoint(diag(a))
    assert diag(diag(a)) == diag(a)


def test_diag_drops_off_diagonal(free2):
    a0, b0 = parse_path(free2, "a_0"), parse_path(free2, "a_1")
    assert not diag(gen(a0, b0))
    assert diag(gen(a0, a0)) == gen(a0, a0)


def test_arithmetic_and_serialisation(free2):
    a0 = parse_path(free2, "a_0")
    x = gen(a0, a0) * Fraction(1, 2) + 3 * vertex(free2, "v")
    assert (x - x) == zero(free2)
    assert -(-x) == x
    assert FormalElement.from_list(free2, x.to_list()) == x
    assert {t["coeff"] for t in x.to_list()} == {"1/2", "3"}


def test_q_projections_on_loops(loops):
    v, a, b = (parse_path(loops, x) for x in "vab")
    cl = vee([v, a, b])
    assert q_projection(v, cl) == vertex(loops, "v") - gen(a, a) - gen(b, b)
    assert q_projection(a, cl) == gen(a, a)
    assert q_projection(v, vee([v])) == vertex(loops, "v")


def test_q_projection_outside_closure(loops):
    with pytest.raises(ValueError):
        q_projection(parse_path(loops, "a"), vee([vpath(loops, "v")]))


@pytest.mark.parametrize("seed", range(6))
def test_q_projections_are_orthogonal_projections(seed):
    rng = random.Random(seed)
    sk = [fx.free2(2), fx.ex43(2), fx.random_2graph(seed)][seed % 3]
    F = fx.sample_admissible(sk, (1, 1), rng)
    cl = vee(F)
    qs = {g: q_projection(g, cl) for g in cl}
    for g, q in qs.items():
        assert q
        assert multiply(q, q) == q
        assert adjoint(q) == q
        for h, r in qs.items():
            if h != g:
                assert not multiply(q, r)


def test_partition_on_loops(loops):
    rep = partition_check([parse_path(loops, x) for x in "vab"])
    assert rep.ok and not rep.residual
    assert rep.to_dict()["status"] == "pass"


def test_partition_single_vertex(ex43):
    assert partition_check([vpath(ex43, "00")]).ok


def test_partition_requires_sources(loops):
    with pytest.raises(AdmissibilityError):
        partition_check([parse_path(loops, "a")])


@pytest.mark.parametrize("seed", range(6))
def test_partition_random(seed):
    rng = random.Random(seed)
    sk = fx.random_2graph(seed)
    rep = partition_check(fx.sample_admissible(sk, (2, 1), rng))
    assert rep.ok


@pytest.mark.parametrize("seed", range(6))
def test_max_subpath_join_is_attained(seed):
    rng = random.Random(seed)
    sk = [fx.free2(2), fx.random_2graph(seed)][seed % 2]
    cl = vee(fx.sample_admissible(sk, (1, 1), rng))
    for gamma in enumerate_upto(sk, (2, 2)):
        if vpath(sk, gamma.source) not in cl:
            continue
        m = max_subpath(gamma, cl)
        pres = [x for x in cl if is_prefix(x, gamma)]
        assert m in pres
        assert all(deg.leq(x.degree, m.degree) for x in pres)


def test_max_subpath_trivial_cases(free2):
    v = vpath(free2, "v")
    cl = vee([v])
    assert max_subpath(parse_path(free2, "a_0.b_1"), cl) == v
    g = parse_path(free2, "a_0")
    assert max_subpath(g, vee([v, g])) == g


@pytest.mark.parametrize("seed", range(6))
def test_new_extension_identity(seed):
    rng = random.Random(seed)
    sk = [fx.free2(2), fx.ex43(2), fx.random_2graph(seed)][seed % 3]
    F = fx.sample_admissible(sk, (1, 1), rng)
    for check in new_extension_check(F):
        assert check.ok
        # the removed path and the maximal subpath have delta as a common extension
        assert check.delta in mce(check.max_subpath, check.removed)


def test_refine_on_loops_follows_annihilation(loops):
    v, a = vpath(loops, "v"), parse_path(loops, "a")
    F = [v, a, parse_path(loops, "b")]
    aa = parse_path(loops, "a.a")
    assert [s.literal for s in refinement_tails(a, vee(F))] == ["a"]
    q = refine_projection(a, F)
    assert q == gen(a, a) - gen(aa, aa)
    assert not multiply(q, multiply(gen(v, a), q))


def _refine_checks(gamma, F):
    cl = vee(F)
    q = refine_projection(gamma, F)
    base = q_projection(gamma, cl)
    assert multiply(q, base) == q
    assert multiply(q, q) == q
    pres = [x for x in cl if is_prefix(x, gamma)]
    for lam in pres:
        for mu in pres:
            if lam != mu and lam.range == mu.range:
                assert not multiply(q, multiply(gen(lam, mu), q))
    return q


@pytest.mark.parametrize("seed", range(8))
def test_refine_projection_random(seed):
    rng = random.Random(seed)
    sk = [fx.free2(2), fx.ex43(2), fx.random_2graph(seed), fx.loops(2)][seed % 4]
    F = fx.sample_admissible(sk, (1,) * sk.k, rng)
    for gamma in vee(F):
        q = _refine_checks(gamma, F)
        # nonzero, witnessed by e_gamma in the Fock space
        tails = refinement_tails(gamma, vee(F))
        top = deg.join_all([gamma.degree] + [d for t in q.terms for d in (t.left.degree, t.right.degree)], sk.k)
        sp = FockSpace(sk, top)
        d = tail_avoiding_product(sp, gamma, tails)
        assert d[sp.index[gamma]] == 1
        assert evaluate(sp, q).diagonal()[sp.index[gamma]] == 1


def test_extensions_in(free2):
    v, a = vpath(free2, "v"), parse_path(free2, "a_0")
    cl = vee([v, a])
    assert extensions_in(v, cl) == [a]
    assert extensions_in(a, cl) == []


@pytest.mark.parametrize("seed", range(4))
def test_symbolic_and_fock_agree_on_products(seed):
    rng = random.Random(seed)
    sk = fx.random_2graph(seed, max_edges=6)
    a, b = random_element(sk, rng, (1, 1)), random_element(sk, rng, (1, 1))
    sp = FockSpace(sk, (3, 3))
    mask = sp.interior((2, 2))
    lhs = evaluate(sp, multiply(a, b)).toarray()[:, mask]
    rhs = (evaluate(sp, a) @ evaluate(sp, b)).toarray()[:, mask]
    assert np.array_equal(lhs, rhs)
