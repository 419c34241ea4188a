import pytest

from sepmonoid.fixtures import fixture_graph, fixture_text, graph_names
from sepmonoid.graph import (GraphError, GraphParseError, NotAdaptableError,
                             SepGraph, check_adaptable, condensation,
                             export_dot, parse_graph, remove_edge,
                             require_adaptable, restrict_lower,
                             serialize_graph, split_block)


def clause_set(g):
    rep = check_adaptable(g)
    assert not rep.ok
    return set(rep.violation_clauses())


def test_parse_roundtrip_fixtures():
    for name in graph_names():
        g = fixture_graph(name)
        assert parse_graph(serialize_graph(g)) == g


def test_parse_multiplicity_sugar():
    g = parse_graph("vertex w\nedge l w w * 3\nblock l\n")
    assert sorted(g.edges) == ["l.1", "l.2", "l.3"]
    assert g.blocks_of["w"] == (("l.1", "l.2", "l.3"),)


def test_parse_errors():
    with pytest.raises(GraphParseError):
        parse_graph("edge e a b\n")          # vertices never declared
    with pytest.raises(GraphParseError):
        parse_graph("vertex a\nblock nope\n")
    with pytest.raises(GraphError):
        SepGraph("aa", [])                   # duplicate vertex
    with pytest.raises(GraphError):
        SepGraph("ab", [("e", "a", "a"), ("f", "b", "b")], [("e", "f")])


def test_unlisted_edges_become_singleton_blocks():
    g = parse_graph("vertex a\nvertex b\nedge e a a\nedge c a b\n")
    assert g.blocks_of["a"] == (("c",), ("e",))


def test_condensation_classes():
    g = fixture_graph("g3")
    cond = condensation(g)
    assert cond.class_of["u"] == cond.class_of["w"]
    g5 = fixture_graph("g5")
    cond5 = condensation(g5)
    assert len({cond5.class_of[v] for v in g5.vertices}) == 3
    # poset orientation: lower classes lie below
    assert cond5.poset.lt(cond5.class_of["b"], cond5.class_of["a"])


def test_fixtures_adaptable_with_expected_kinds():
    expected = {
        "g1": {"a": "free", "b": "free"},
        "g2": {"w": "regular"},
        "g3": {"u": "regular"},
        "g4": {"b": "free", "w": "regular"},
        "g5": {"a": "free", "a'": "free", "b": "free"},
    }
    for name in graph_names():
        rep = check_adaptable(fixture_graph(name))
        assert rep.ok, name
        got = {cond_class: kind for cond_class, kind in rep.kinds.items()}
        assert got == expected[name], name


def test_require_adaptable_raises():
    g = remove_edge(fixture_graph("g1"), "l")
    with pytest.raises(NotAdaptableError):
        require_adaptable(g)


# one mutation per row: fixture, edit, exact clause set
def _g(name):
    return fixture_graph(name)


MUTATIONS = [
    ("g1 without its loop",
     lambda: remove_edge(_g("g1"), "l"),
     {"A-free-shape", "A-regular-degree"}),
    ("g1 without its connector",
     lambda: remove_edge(_g("g1"), "c"),
     {"A-free-shape", "A-free-minimal", "A-regular-degree"}),
    ("g2 cut down to one loop",
     lambda: remove_edge(remove_edge(_g("g2"), "l.1"), "l.2"),
     {"A-free-shape", "A-free-minimal", "A-regular-degree"}),
    ("g2 with its block split 1+2",
     lambda: split_block(_g("g2"), "w", 0),
     {"A-free-shape", "A-free-minimal", "A-regular-Cw"}),
    ("g3 with u's block split",
     lambda: split_block(_g("g3"), "u", 0),
     {"A-partition", "A-regular-Cw"}),
    ("g3 without u's loops",
     lambda: remove_edge(remove_edge(_g("g3"), "lu.1"), "lu.2"),
     {"A-regular-degree"}),
    ("g4 without w's loops",
     lambda: remove_edge(remove_edge(_g("g4"), "l.1"), "l.2"),
     {"A-free-shape", "A-regular-degree"}),
    ("g5 with a's block split",
     lambda: split_block(_g("g5"), "a", 0),
     {"A-free-shape", "A-regular-Cw", "A-regular-degree"}),
    ("g5 without a''s loop",
     lambda: remove_edge(_g("g5"), "lb"),
     {"A-free-shape", "A-regular-degree"}),
]


@pytest.mark.parametrize("label,build,expected",
                         MUTATIONS, ids=[m[0] for m in MUTATIONS])
def test_mutation_clauses(label, build, expected):
    assert clause_set(build()) == expected


def test_mutations_cover_every_clause():
    seen = set()
    for _, _, expected in MUTATIONS:
        seen |= expected
    assert seen == {"A-free-shape", "A-free-minimal", "A-regular-Cw",
                    "A-regular-degree", "A-partition"}


def test_violations_carry_details():
    rep = check_adaptable(remove_edge(fixture_graph("g1"), "l"))
    for v in rep.violations:
        assert v.clause
        assert v.detail


def test_restrict_lower():
    g = fixture_graph("g5")
    sub = restrict_lower(g, "b")
    assert sub.vertices == ("b",)
    sub2 = restrict_lower(g, "a")
    assert set(sub2.vertices) == {"a", "b"}


def test_export_dot_mentions_blocks():
    g = fixture_graph("g3")
    dot = export_dot(g)
    assert "digraph" in dot
    for e in g.edges:
        assert e in dot
