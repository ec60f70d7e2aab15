import json
from math import prod
from pathlib import Path

import pytest

from surgery_cert.cli import main
from surgery_cert.homology import chain_link, hopf_link
from surgery_cert.linkfile import LinkFormatError, dump_link, parse_link, preset
from surgery_cert.lspace import load_tree

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def structured(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out)


# -- link descriptions ----------------------------------------------------------

def test_link_file_nested():
    assert parse_link((DATA / "two-comp.link").read_text()) == hopf_link(1)


def test_link_file_flat():
    L = parse_link((DATA / "flat.link").read_text())
    assert L.n == 3 and L[0, 2] == -2


def test_link_preset_document():
    assert parse_link("preset: chain:4\nsigns: [1, -1, 1, -1]") == chain_link(4, [1, -1, 1, -1])


@pytest.mark.parametrize("text", ["linking: [0, 1, 1, 0]", "n: 2\nlinking: [[0, 1], [2, 0]]",
                                  "- 1\n- 2", "preset: torus:3", "n: 3\nlinking: [[0, 1], [1, 0]]"])
def test_link_errors(text):
    with pytest.raises(LinkFormatError):
        parse_link(text)


def test_dump_round_trip():
    L = chain_link(6, [1, 1, -1, 1, -1, -1])
    assert parse_link(dump_link(L)) == L


def test_presets():
    assert preset("hopf") == hopf_link(1)
    assert preset("chain:5").n == 5


# -- homology ---------------------------------------------------------------------

def test_homology_chain_preset(capsys):
    M = 33
    code, doc = structured(capsys, "homology", "--preset", "chain:4",
                           "--slopes", "33/4,1089/4,35937/4,1185921/4")
    assert code == 0
    c = doc["certified"]
    assert c["odd"] and c["all_denominators_even"]
    assert int(c["ostrowski_bound"]) == prod(M ** (i + 1) - 8 for i in range(4))
    assert int(c["ostrowski_bound"]) <= int(c["h1_order"])


def test_homology_link_file(capsys):
    code, out, _ = run(capsys, "homology", "--link", str(DATA / "two-comp.link"), "--slopes", "5/4,3")
    assert code == 0
    assert "|H_1|             11" in out


def test_homology_missing_slopes(capsys):
    code, _, err = run(capsys, "homology", "--preset", "hopf")
    assert code == 2 and "--slopes" in err


def test_homology_wrong_count(capsys):
    code, _, _ = run(capsys, "homology", "--preset", "hopf", "--slopes", "1/2")
    assert code == 2


def test_homology_bad_slope_text():
    with pytest.raises(SystemExit) as exc:
        main(["homology", "--preset", "hopf", "--slopes", "1/2,inf"])
    assert exc.value.code == 2


def test_homology_missing_link_file(capsys):
    code, _, _ = run(capsys, "homology", "--link", str(DATA / "nope.link"), "--slopes", "1")
    assert code == 2


# -- lspace-cert ------------------------------------------------------------------

def test_lspace_hopf(capsys):
    code, out, _ = run(capsys, "lspace-cert", "--preset", "hopf", "--slopes", "5/4,3", "--C", "1")
    assert code == 0
    assert "2 + 9 = 11" in out
    assert "3 splits" in out


def test_lspace_below_threshold(capsys):
    code, _, err = run(capsys, "lspace-cert", "--preset", "hopf", "--slopes", "5/4,3", "--C", "2")
    assert code != 0 and "below C" in err


def test_lspace_emit_tree_round_trip(capsys, tmp_path):
    path = tmp_path / "tree.json"
    code, _, _ = run(capsys, "lspace-cert", "--preset", "hopf", "--slopes", "5/4,7/3", "--C", "1",
                     "--emit-tree", str(path))
    assert code == 0
    from surgery_cert.homology import SurgerySpec
    from surgery_cert.lspace import certificate_tree
    from fractions import Fraction
    L, C, tree = load_tree(path.read_text())
    assert tree == certificate_tree(L, SurgerySpec.of(Fraction(5, 4), Fraction(7, 3)), C).tree


def test_lspace_failure_exit_one(capsys):
    code, doc = structured(capsys, "lspace-cert", "--preset", "hopf", "--signs", "3",
                           "--slopes", "5/2,2", "--C", "1")
    assert code == 1 and doc["status"] == "fail" and "error" in doc


# -- verify-main ------------------------------------------------------------------

def test_verify_main_interval(capsys):
    code, doc = structured(capsys, "verify-main", "--n", "4", "--M", "49", "--mode", "interval", "--C", "13")
    assert code == 0 and doc["status"] == "pass"
    assert doc["certified"]["items"]["lspace"]["status"] == "conditional"
    assert {a["name"] for a in doc["assumed"]} == {"hyperbolicity", "fdtc", "lspace-constant"}


def test_verify_main_gate(capsys):
    code, _, err = run(capsys, "verify-main", "--n", "6", "--M", "47")
    assert code == 2 and "8n" in err


def test_verify_main_odd_n(capsys):
    code, _, _ = run(capsys, "verify-main", "--n", "5", "--M", "81", "--skip-lspace")
    assert code == 2


def test_verify_main_skip_lspace(capsys):
    code, out, _ = run(capsys, "verify-main", "--n", "4", "--M", "33", "--skip-lspace")
    assert code == 0
    assert "NOT CHECKED" in out and "k=0: [57, 4, 8, 4]" in out


def test_verify_main_needs_C(capsys):
    code, _, _ = run(capsys, "verify-main", "--n", "4", "--M", "33")
    assert code == 2


def test_structured_output_deterministic(capsys):
    argv = ("verify-main", "--n", "4", "--M", "193", "--C", "13", "--format", "structured")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert json.loads(first)["schema"] == "surgery-cert/report/1"


# -- small commands -----------------------------------------------------------------

def test_prongs_rotation(capsys):
    code, doc = structured(capsys, "prongs", "--n", "4", "--M", "33", "--rotation", "3")
    assert code == 0 and doc["certified"]["core_prongs"]["3"] == ["1185945", "4", "8", "4"]


def test_euler_cli(capsys):
    assert run(capsys, "euler", "--boundary", "4,1,2,1", "--genus", "1")[0] == 0
    assert run(capsys, "euler", "--boundary", "3,1,2,1", "--genus", "1")[0] == 1


def test_knot_cli(capsys):
    code, doc = structured(capsys, "knot", "--genus", "1", "--slopes", "5", "--degeneracy", "2/1")
    assert code == 0 and doc["certified"]["distance"] == 3
    assert run(capsys, "knot", "--genus", "1", "--slopes", "4", "--degeneracy", "2/1")[0] == 2


def test_birkhoff_cli(capsys):
    code, doc = structured(capsys, "birkhoff", "--n", "4", "--M", "33")
    assert code == 0 and len(doc["certified"]["rows"]) == 16
