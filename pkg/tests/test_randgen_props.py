import random

from sepmonoid.fixtures import fixture_graph
from sepmonoid.graph import check_adaptable, serialize_graph
from sepmonoid.isystem import serialize_isystem, validate_isystem
from sepmonoid.props import (conicality_suite, division_suite,
                             oracle_agreement_suite, primeness_suite,
                             refinement_suite, run_suites, separativity_suite,
                             split_random)
from sepmonoid.randgen import (DEFAULT_GROUPS, corpus_systems,
                               random_adaptable, random_element,
                               random_equal_pair, random_walk)
from sepmonoid.rewrite import FreeElement, eq_exact


def test_random_adaptable_always_is():
    rng = random.Random(0)
    for _ in range(1000):
        g = random_adaptable(rng, max_classes=4)
        assert check_adaptable(g).ok


def test_random_adaptable_deterministic():
    a = serialize_graph(random_adaptable(random.Random(12), max_classes=4))
    b = serialize_graph(random_adaptable(random.Random(12), max_classes=4))
    assert a == b


def test_random_adaptable_hits_both_kinds():
    rng = random.Random(5)
    kinds = set()
    for _ in range(60):
        rep = check_adaptable(random_adaptable(rng, max_classes=4))
        kinds |= set(rep.kinds.values())
    assert kinds == {"free", "regular"}


def test_random_element_respects_bounds():
    rng = random.Random(1)
    g = fixture_graph("g5")
    for _ in range(100):
        x = random_element(rng, g, max_total=6)
        assert 1 <= x.total() <= 6


def test_random_walk_stays_equal():
    rng = random.Random(2)
    g = fixture_graph("g3")
    x = random_element(rng, g, max_total=4)
    y = random_walk(rng, g, x, steps=5)
    assert eq_exact(g, x, y)


def test_random_equal_pair_is_equal():
    rng = random.Random(3)
    g = fixture_graph("g5")
    for _ in range(20):
        x, y = random_equal_pair(rng, g)
        assert eq_exact(g, x, y)


def test_split_random_parts_sum_back():
    rng = random.Random(4)
    x = FreeElement({"a": 3, "b": 2})
    a, b = split_random(rng, x)
    assert a + b == x


def test_corpus_systems_profile():
    systems = corpus_systems(31, count=12)
    seen = set()
    for s, witness in systems:
        text = serialize_isystem(s)
        assert text not in seen
        seen.add(text)
        assert len(s.poset) <= 4
        for p in s.primes():
            assert s.group[p].canonical_name() in DEFAULT_GROUPS
            assert s.group[p].free_rank <= 1
        assert validate_isystem(s).status == "Verified"
        assert check_adaptable(witness).ok


def test_corpus_systems_deterministic():
    a = [serialize_isystem(s) for s, _ in corpus_systems(8, count=6)]
    b = [serialize_isystem(s) for s, _ in corpus_systems(8, count=6)]
    assert a == b


def test_suites_pass_on_fixture():
    g = fixture_graph("g5")
    for res in run_suites(g, seed=13, samples=60, pairs=60, depth=10):
        assert res.ok, res.line()


def test_suites_pass_on_random_graph():
    g = random_adaptable(random.Random(21), max_classes=4)
    rng = random.Random(22)
    for suite in (refinement_suite, primeness_suite, conicality_suite,
                  separativity_suite, division_suite):
        res = suite(g, rng, 40)
        assert res.ok, res.line()
    res = oracle_agreement_suite(g, rng, pairs=60, depth=10, node_budget=1500)
    assert res.ok, res.line()


def test_suite_line_format():
    g = fixture_graph("g2")
    res = refinement_suite(g, random.Random(0), instances=10)
    line = res.line()
    assert line.startswith("refinement:")
    assert "samples=10" in line
