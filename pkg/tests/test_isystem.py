import pytest

from sepmonoid.abelian import FGAbelianGroup, GroupHom
from sepmonoid.fixtures import fixture_graph, fixture_system, graph_names
from sepmonoid.isystem import (COUNTEREXAMPLE, VERIFIED, ConnectingMap,
                               ISystem, ISystemError, ISystemParseError,
                               canonicalized, extract_isystem,
                               parse_group_name, parse_group_presentation,
                               parse_isystem, serialize_element_expr,
                               serialize_isystem, validate_isystem)
from sepmonoid.posets import Poset


def test_extract_groups_match_hand_calc():
    expected = {
        "g1": {"a": "0", "b": "0"},
        "g2": {"w": "Z/2"},
        "g3": {"u": "Z"},
        "g4": {"b": "0", "w": "Z"},
        "g5": {"a": "Z/2", "a'": "Z/3", "b": "0"},
    }
    for name in graph_names():
        sysm = extract_isystem(fixture_graph(name))
        got = {p: sysm.group[p].canonical_name() for p in sysm.primes()}
        assert got == expected[name], name


def test_extract_g4_unit_is_negative_generator():
    sysm = extract_isystem(fixture_graph("g4"))
    cm = sysm.map_for("w", "b")
    gw = sysm.group["w"]
    # b's counting unit lands on minus the generator of Z
    fr, _ = cm.unit.canonical()
    assert gw.canonical_name() == "Z"
    assert abs(fr[0]) == 1
    # and w itself maps to the other sign
    wv = gw.gen([i for i, lbl in enumerate(sysm.generator_labels["w"])
                 if lbl == "w"][0])
    assert abs(wv.canonical()[0][0]) == 1
    assert wv.canonical()[0][0] == -fr[0]


def test_extract_g5_units():
    sysm = extract_isystem(fixture_graph("g5"))
    cm_a = sysm.map_for("a", "b")
    assert not cm_a.unit.is_zero()         # order 2 in Z/2
    assert (cm_a.unit + cm_a.unit).is_zero()
    cm_a2 = sysm.map_for("a'", "b")
    assert not (cm_a2.unit + cm_a2.unit).is_zero()
    assert (3 * cm_a2.unit).is_zero()


def test_extracted_systems_validate():
    for name in graph_names():
        rep = validate_isystem(extract_isystem(fixture_graph(name)))
        assert rep.status == VERIFIED, (name, rep.failures)


def test_s1_fixture_validates():
    rep = validate_isystem(fixture_system("s1"))
    assert rep.status == VERIFIED


def test_serialize_parse_roundtrip():
    for name in graph_names():
        sysm = extract_isystem(fixture_graph(name))
        text = serialize_isystem(sysm)
        back = parse_isystem(text)
        assert serialize_isystem(back) == text


def test_parse_reg_and_colon_forms():
    txt = ("prime p reg\n"
           "group p : Z + Z/3\n")
    s = parse_isystem(txt)
    assert s.kind["p"] == "regular"
    assert s.group["p"].canonical_name() == "Z + Z/3"
    # long spelling allowed too
    s2 = parse_isystem("prime p regular\ngroup p : 0\n")
    assert s2.kind["p"] == "regular"


def test_parse_group_presentation_form():
    txt = ("prime p reg\n"
           "group p gens g1 g2 rels 2*g1 ; 3*g2\n")
    s = parse_isystem(txt)
    assert s.group["p"].canonical_name() == "Z/6"


def test_parse_group_name_forms():
    assert parse_group_name("0").is_trivial()
    assert parse_group_name("Z^2").free_rank == 2
    assert parse_group_name("Z/2 + Z/2").invariant_factors == (2, 2)
    with pytest.raises(ISystemError):
        parse_group_name("Z/1")
    with pytest.raises(ISystemError):
        parse_group_name("Z/2 + Z/3")    # not a divisor chain
    with pytest.raises(ISystemError):
        parse_group_name("Q")


def test_parse_group_presentation_requires_ordered_names():
    with pytest.raises(ISystemError):
        parse_group_presentation("g2 g1")
    g = parse_group_presentation("g1 g2 rels 2*g1 + g2")
    assert g.canonical_name() == "Z"


def test_parse_errors_carry_line_numbers():
    bad = "prime p free\ngroup p : Z/2\nmap p <- q : unit -> g1\n"
    with pytest.raises(ISystemParseError) as exc:
        parse_isystem(bad)
    assert "line 3" in str(exc.value)


def test_parse_requires_unit_exactly_for_free_sources():
    base = ("prime p free\nprime q free\ncover q < p\n"
            "group p : Z/2\ngroup q : 0\n")
    with pytest.raises(ISystemParseError):
        parse_isystem(base + "map p <- q : g1 -> 0\n")   # missing unit
    s = parse_isystem(base + "map p <- q : unit -> g1\n")
    assert s.map_for("p", "q").unit is not None


def test_trivial_regular_source_gets_zero_map():
    txt = ("prime p reg\nprime q reg\ncover q < p\n"
           "group p : Z/2\ngroup q : 0\n")
    s = parse_isystem(txt)
    cm = s.map_for("p", "q")
    assert cm.unit is None
    assert cm.hom(s.group["q"].zero()).is_zero()


def test_validate_flags_missing_map():
    poset = Poset(["p", "q"], [("q", "p")])
    z2 = FGAbelianGroup(1, [[2]])
    triv = FGAbelianGroup(0, [])
    s = ISystem(poset, {"p": "free", "q": "free"}, {"p": z2, "q": triv}, {})
    rep = validate_isystem(s)
    assert rep.status == COUNTEREXAMPLE
    assert any(f.axiom == "map-presence" for f in rep.failures)


def test_validate_flags_ill_defined_hom():
    poset = Poset(["p", "q"], [("q", "p")])
    z2 = FGAbelianGroup(1, [[2]])
    z3 = FGAbelianGroup(1, [[3]])
    bad = ConnectingMap(GroupHom(z3, z2, [[1]]), None)
    s = ISystem(poset, {"p": "regular", "q": "regular"},
                {"p": z2, "q": z3}, {("p", "q"): bad})
    rep = validate_isystem(s)
    assert rep.status == COUNTEREXAMPLE
    assert any(f.axiom == "map-hom" for f in rep.failures)


def test_validate_flags_functoriality_break():
    poset = Poset(["r", "m", "t"], [("r", "m"), ("m", "t")])
    z4 = FGAbelianGroup(1, [[4]])
    s = ISystem(
        poset,
        {"r": "regular", "m": "regular", "t": "regular"},
        {"r": z4, "m": z4, "t": z4},
        {("m", "r"): ConnectingMap(GroupHom(z4, z4, [[1]])),
         ("t", "m"): ConnectingMap(GroupHom(z4, z4, [[1]])),
         ("t", "r"): ConnectingMap(GroupHom(z4, z4, [[3]]))},
    )
    rep = validate_isystem(s)
    assert rep.status == COUNTEREXAMPLE
    assert any(f.axiom == "functoriality" for f in rep.failures)


def test_validate_flags_nontrivial_minimal_free():
    poset = Poset(["p"])
    s = ISystem(poset, {"p": "free"}, {"p": FGAbelianGroup(1, [[2]])}, {})
    rep = validate_isystem(s)
    assert rep.status == COUNTEREXAMPLE
    assert any(f.axiom == "cone-coverage" for f in rep.failures)


def test_validate_flags_unreachable_cone():
    # Z/2 target, but the only unit image is zero: g1 is not reachable
    txt = ("prime p free\nprime q free\ncover q < p\n"
           "group p : Z/2\ngroup q : 0\nmap p <- q : unit -> 0\n")
    rep = validate_isystem(parse_isystem(txt))
    assert rep.status == COUNTEREXAMPLE
    assert any(f.axiom == "cone-coverage" for f in rep.failures)


def test_canonicalized_uses_canonical_groups():
    sysm = extract_isystem(fixture_graph("g5"))
    canon = canonicalized(sysm)
    for p in canon.primes():
        grp = canon.group[p]
        assert grp.ngens == grp.free_rank + len(grp.invariant_factors)
    # maps still coherent
    assert validate_isystem(canon).status == VERIFIED


def test_serialized_form_is_canonical_names():
    sysm = extract_isystem(fixture_graph("g2"))
    text = serialize_isystem(sysm)
    assert "group w : Z/2" in text
    assert "prime w reg" in text


def test_hat_apply():
    s = fixture_system("s1")
    gp = s.group["p"]
    out = s.hat_apply("p", "q", 1, s.group["q"].zero())
    assert not out.is_zero()
    out2 = s.hat_apply("p", "q", 2, s.group["q"].zero())
    assert out2.is_zero()
