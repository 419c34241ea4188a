import pytest

from sepmonoid.cli import main
from sepmonoid.fixtures import fixture_text
from sepmonoid.graph import parse_graph
from sepmonoid.isystem import parse_isystem


@pytest.fixture
def g1(tmp_path):
    p = tmp_path / "g1.sg"
    p.write_text(fixture_text("g1.sg"))
    return str(p)


@pytest.fixture
def g2(tmp_path):
    p = tmp_path / "g2.sg"
    p.write_text(fixture_text("g2.sg"))
    return str(p)


@pytest.fixture
def g5(tmp_path):
    p = tmp_path / "g5.sg"
    p.write_text(fixture_text("g5.sg"))
    return str(p)


@pytest.fixture
def s1(tmp_path):
    p = tmp_path / "s1.is"
    p.write_text(fixture_text("s1.is"))
    return str(p)


def test_validate_ok(g1, capsys):
    assert main(["validate", g1]) == 0
    out = capsys.readouterr().out
    assert "adaptable" in out


def test_validate_violations_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.sg"
    p.write_text("vertex a\nvertex b\nedge c a b\nblock c\n")
    assert main(["validate", str(p)]) == 1
    out = capsys.readouterr().out
    assert "A-free-shape" in out


def test_validate_parse_error_exit_2(tmp_path, capsys):
    p = tmp_path / "broken.sg"
    p.write_text("vertex a\nedge e a nowhere\n")
    assert main(["validate", str(p)]) == 2
    assert "parse error" in capsys.readouterr().err


def test_missing_file_exit_2(capsys):
    assert main(["validate", "/no/such/file.sg"]) == 2


def test_eq_equal_exit_0(g1, capsys):
    assert main(["eq", g1, "a", "a + b"]) == 0
    assert "equal" in capsys.readouterr().out


def test_eq_unequal_exit_1(g1, capsys):
    assert main(["eq", g1, "b", "2*b"]) == 1
    assert "not equal" in capsys.readouterr().out


def test_eq_confluence_equal(g2, capsys):
    assert main(["eq", g2, "w", "3*w", "--method", "confluence"]) == 0
    out = capsys.readouterr().out
    assert "gamma=" in out


def test_eq_confluence_exhausts_on_unequal(g2, capsys):
    assert main(["eq", g2, "b := w", "2*w", "--method", "confluence",
                 "--depth", "4", "--budget", "500"]) == 2
    # bad element text is a parse error; retry with a clean one
    assert main(["eq", g2, "w", "2*w", "--method", "confluence",
                 "--depth", "4", "--budget", "500"]) == 3


def test_eq_unknown_vertex_exit_2(g1, capsys):
    assert main(["eq", g1, "zz", "a"]) == 2


def test_le_yes_no_unknown(g5, capsys):
    assert main(["le", g5, "b", "a + b"]) == 0
    assert "yes" in capsys.readouterr().out
    assert main(["le", g5, "a", "b", "--depth", "6"]) in (1, 3)


def test_nf_prints_antichain(g5, capsys):
    assert main(["nf", g5, "a + a' + 4*b"]) == 0
    out = capsys.readouterr().out
    assert "antisym" in out
    assert "nf a free" in out


def test_refine_prints_grid(g2, capsys):
    assert main(["refine", g2, "w", "2*w", "3*w", "0"]) == 0
    out = capsys.readouterr().out
    assert "a = " in out and "d = " in out


def test_extract_writes_system(g5, tmp_path, capsys):
    out_path = tmp_path / "g5.is"
    assert main(["extract", g5, "-o", str(out_path)]) == 0
    sysm = parse_isystem(out_path.read_text())
    assert sysm.group["a"].canonical_name() == "Z/2"


def test_extract_to_stdout(g2, capsys):
    assert main(["extract", g2]) == 0
    out = capsys.readouterr().out
    assert "prime w reg" in out
    assert "group w : Z/2" in out


def test_realize_roundtrip_exit_0(s1, tmp_path, capsys):
    out_path = tmp_path / "s1.sg"
    assert main(["realize", s1, "-o", str(out_path)]) == 0
    g = parse_graph(out_path.read_text())
    assert set(g.vertices) == {"p", "q"}
    assert "Verified" in capsys.readouterr().err


def test_realize_invalid_system_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.is"
    p.write_text("prime p free\nprime q free\ncover q < p\n"
                 "group p : Z/2\ngroup q : 0\nmap p <- q : unit -> 0\n")
    assert main(["realize", str(p)]) == 1
    assert "cone-coverage" in capsys.readouterr().err


def test_realize_infeasible_exit_1(tmp_path, capsys):
    p = tmp_path / "obstructed.is"
    p.write_text("prime p reg\nprime q1 free\nprime q2 free\n"
                 "cover q1 < p\ncover q2 < p\n"
                 "group p : Z/2\ngroup q1 : 0\ngroup q2 : 0\n"
                 "map p <- q1 : unit -> 0\nmap p <- q2 : unit -> 0\n")
    assert main(["realize", str(p)]) == 1
    assert "free rank" in capsys.readouterr().err


def test_props_small_run(g2, capsys):
    assert main(["props", g2, "--samples", "20", "--pairs", "20",
                 "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "refinement" in out


def test_props_lines_format(g2, capsys):
    assert main(["props", g2, "--samples", "10", "--pairs", "10",
                 "--seed", "1", "--format", "lines"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert all(line.startswith("props ") for line in out)


def test_export_dot(g2, capsys):
    assert main(["export-dot", g2]) == 0
    assert "digraph" in capsys.readouterr().out


def test_random_requires_seed(capsys):
    assert main(["random"]) == 2
    assert "--seed" in capsys.readouterr().err


def test_random_generates_adaptable(tmp_path, capsys):
    out_path = tmp_path / "r.sg"
    assert main(["random", "--seed", "5", "-o", str(out_path)]) == 0
    from sepmonoid.graph import check_adaptable
    assert check_adaptable(parse_graph(out_path.read_text())).ok
