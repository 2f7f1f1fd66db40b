import random
from itertools import combinations

import pytest

from kgraph import degree as deg
from kgraph import fixtures as fx
from kgraph.alignment import (
    compose_rank_one,
    find_avoiding_path,
    is_finitely_aligned,
    mce,
    mce_family,
    vee,
)
from kgraph.paths import enumerate_paths, enumerate_upto, is_prefix, parse_path, prefix, vertex
from oracles import brute_mce, path_canon


def test_ex43_mce_of_generators(ex43):
    got = mce(parse_path(ex43, "lambda"), parse_path(ex43, "beta"))
    assert {p.literal for p in got} == {"lambda.mu_0", "lambda.mu_1", "lambda.mu_2"}
    assert got.to_dict()["pair"] == ["lambda", "beta"]


def test_mce_with_self_and_vertex(free2):
    p = parse_path(free2, "a_0.b_1")
    assert set(mce(p, p)) == {p}
    assert set(mce(vertex(free2, "v"), p)) == {p}


def test_mce_different_sources_empty(ex43):
    assert len(mce(parse_path(ex43, "lambda"), parse_path(ex43, "alpha_0"))) == 0


def test_mce_same_color_disagreeing(free2):
    assert len(mce(parse_path(free2, "a_0"), parse_path(free2, "a_1"))) == 0


def test_mce_is_symmetric(free2):
    a, b = parse_path(free2, "a_0"), parse_path(free2, "b_1.b_0")
    assert set(mce(a, b)) == set(mce(b, a))


@pytest.mark.parametrize("seed", range(5))
def test_mce_matches_brute_force(seed):
    sk = fx.random_2graph(seed)
    ps = enumerate_upto(sk, (2, 2))
    rng = random.Random(seed)
    for _ in range(40):
        a, b = rng.choice(ps), rng.choice(ps)
        assert {path_canon(g) for g in mce(a, b)} == brute_mce(sk, a, b)


def test_mce_family_singleton_and_mixed_sources(ex43):
    lam = parse_path(ex43, "lambda")
    assert mce_family([lam]) == {lam}
    assert mce_family([lam, parse_path(ex43, "alpha_0")]) == frozenset()


def _brute_family(G):
    sk = G[0].skeleton
    top = deg.join_all((p.degree for p in G), sk.k)
    return {g for g in enumerate_paths(sk, top, G[0].source) if all(is_prefix(a, g) for a in G)}


@pytest.mark.parametrize("seed", range(4))
def test_mce_family_matches_filter(seed):
    sk = fx.random_2graph(seed)
    rng = random.Random(seed)
    for v in sk.vertices:
        ps = enumerate_upto(sk, (1, 2), v)
        for _ in range(10):
            G = rng.sample(ps, min(len(ps), 3))
            assert set(mce_family(G)) == _brute_family(G)


def test_vee_loops(loops):
    F = [vertex(loops, "v"), parse_path(loops, "a"), parse_path(loops, "b")]
    assert {p.literal for p in vee(F)} == {"v", "a", "b"}


def test_vee_ex43_contains_common_extensions(ex43):
    F = [vertex(ex43, "00"), parse_path(ex43, "lambda"), parse_path(ex43, "beta")]
    cl = vee(F)
    assert len(cl) == 6
    assert parse_path(ex43, "lambda.mu_1") in cl


def test_vee_matches_subset_union(free2):
    rng = random.Random(1)
    ps = enumerate_upto(free2, (2, 2))
    for _ in range(10):
        F = rng.sample(ps, 4)
        want = set()
        for r in range(1, 5):
            for G in combinations(F, r):
                want |= _brute_family(list(G)) if len({g.source for g in G}) == 1 else set()
        assert set(vee(F)) == want


def test_alignment_growth():
    for m in range(1, 5):
        rep = is_finitely_aligned(fx.ex43(m))
        assert rep.max_generator_mce == m + 1
        assert [p.literal for p in rep.generator_argmax] == ["lambda", "beta"]


def test_alignment_bounded_statistics(ex43):
    rep = is_finitely_aligned(ex43, (1, 1))
    assert rep.max_bounded_mce == 3
    d = rep.to_dict()
    assert d["bound"] == [1, 1] and d["maxGeneratorMce"] == 3


def test_compose_rank_one_ex43(ex43):
    lam, beta = parse_path(ex43, "lambda"), parse_path(ex43, "beta")
    pairs = compose_rank_one(lam, lam, beta, beta)
    assert len(pairs) == 3
    for left, right in pairs:
        assert left == right
        assert left.degree == (1, 1)


def test_find_avoiding_path_free(free2):
    f3 = fx.free2(3)
    mu = find_avoiding_path(f3, "v", {1: ["a_0", "a_1"], 2: ["b_0"]})
    assert mu is not None and mu.degree == (1, 1)
    assert mu.literal.split(".")[0] == "a_2"
    assert "b_0" not in mu.literal


def test_find_avoiding_path_none_when_everything_forbidden(free2):
    assert find_avoiding_path(free2, "v", {1: ["a_0", "a_1"]}) is None


def test_find_avoiding_path_validates_input(free2):
    with pytest.raises(ValueError):
        find_avoiding_path(free2, "v", {1: ["b_0"]})


@pytest.mark.parametrize("seed", range(6))
def test_find_avoiding_path_is_exhaustive(seed):
    sk = fx.random_2graph(seed)
    rng = random.Random(seed)
    for v in sk.vertices:
        forbidden = {m: [e for e in sk.out_edges(v, m) if rng.random() < 0.5] for m in (1, 2)}
        mu = find_avoiding_path(sk, v, forbidden)
        ok = [
            p for p in enumerate_paths(sk, (1, 1), v)
            if _first_edge(p, 1) not in forbidden[1] and _first_edge(p, 2) not in forbidden[2]
        ]
        assert (mu is None) == (not ok)
        if mu is not None:
            assert mu in ok


def _first_edge(p, color):
    return prefix(p, deg.unit(2, color)).edges[0]
