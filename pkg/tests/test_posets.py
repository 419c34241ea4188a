import pytest

from sepmonoid.posets import Poset, PosetError


def test_closure_and_le():
    p = Poset("abcd", [("a", "b"), ("b", "c")])
    assert p.le("a", "c")
    assert p.le("a", "a")
    assert not p.le("c", "a")
    assert not p.comparable("a", "d")


def test_cycle_rejected():
    with pytest.raises(PosetError):
        Poset("ab", [("a", "b"), ("b", "a")])


def test_unknown_element_rejected():
    with pytest.raises(PosetError):
        Poset("ab", [("a", "z")])


def test_covers_skip_transitive_pairs():
    p = Poset("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    assert p.covers() == [("a", "b"), ("b", "c")]
    assert p.lower_covers("c") == ["b"]
    assert p.upper_covers("a") == ["b"]


def test_up_down_sets():
    p = Poset(["bot", "x", "y", "top"],
              [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")])
    assert p.downset("top") == {"bot", "x", "y", "top"}
    assert p.strict_down("x") == {"bot"}
    assert p.upset("bot") == {"bot", "x", "y", "top"}
    assert p.maximals() == ["top"]
    assert p.minimals() == ["bot"]
    assert p.is_antichain(["x", "y"])
    assert not p.is_antichain(["bot", "x"])


def test_linear_extension_is_deterministic_and_valid():
    p = Poset(["q", "p", "r"], [("q", "p"), ("q", "r")])
    ext = p.linear_extension()
    assert ext == ["q", "p", "r"]
    seen = set()
    for x in ext:
        assert p.strict_down(x) <= seen
        seen.add(x)


def test_restrict():
    p = Poset("abc", [("a", "b"), ("b", "c")])
    q = p.restrict(["a", "c"])
    assert q.le("a", "c")
    with pytest.raises(PosetError):
        p.restrict(["a", "z"])


def test_isomorphisms_respect_colors():
    p = Poset("ab", [("a", "b")])
    q = Poset("xy", [("x", "y")])
    isos = list(p.isomorphisms(q))
    assert isos == [{"a": "x", "b": "y"}]
    # color mismatch kills the only candidate
    isos = list(p.isomorphisms(q, color=lambda v: "red",
                               other_color=lambda v: "blue"))
    assert isos == []


def test_isomorphisms_count_on_antichain():
    p = Poset("abc")
    q = Poset("xyz")
    assert len(list(p.isomorphisms(q))) == 6
