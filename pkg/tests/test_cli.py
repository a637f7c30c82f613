import pathlib

import pytest

from incidence_jordan.cli import main, run
from incidence_jordan.config import build_map, loads_config
from incidence_jordan.errors import ConfigError

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"

NOT_JORDAN = """
[instance]
modulus = 6
elements = x0 x1
pairs = x0<x1

[map]
kind = matrix
rows = 1 0 0; 1 1 0; 0 0 1

[run]
suite = jordan near-sum
"""


def test_chain3_identity_passes(capsys):
    assert main(["verify", str(CONFIGS / "chain3_identity.ini")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1].startswith("RESULT PASS")
    assert "SKIP sum hypothesis=all_singleton" in out


def test_m2_twist_witness(capsys):
    assert main(["decompose", str(CONFIGS / "m2_jtwist.ini")]) == 0
    out = capsys.readouterr().out
    assert "WITNESS class=m0 f=3·1 g=4·1" in out
    assert "CLASSIFY hom FAIL" in out and "CLASSIFY antihom FAIL" in out


def test_two_class_sum(capsys):
    assert main(["verify", str(CONFIGS / "two_classes_sum.ini")]) == 0
    out = capsys.readouterr().out
    assert not [l for l in out.splitlines() if l.startswith("CHECK") and " FAIL " in l]
    assert "MODE sum sum" in out


def test_bad_near_sum_names_clause(capsys):
    assert main(["decompose", str(CONFIGS / "two_classes_bad_near_sum.ini")]) == 2
    out = capsys.readouterr().out
    assert "ERROR PreconditionFailed clause='t(s)h(r) = 0 on FZ" in out


def test_not_jordan_exits_1():
    code, rep = run(loads_config(NOT_JORDAN), "decompose")
    assert code == 1
    assert "SKIP near-sum reason=not-a-jordan-isomorphism" in rep.lines
    assert any(l.startswith("CHECK jordan.square FAIL") for l in rep.lines)


def test_sum_hypothesis_exit_3(tmp_path):
    text = (CONFIGS / "chain3_identity.ini").read_text().replace("suite = all", "suite = jordan sum")
    cfg = tmp_path / "c.ini"
    cfg.write_text(text)
    assert main(["decompose", str(cfg)]) == 3


def test_hypothesis_and_failure_prefers_1():
    text = NOT_JORDAN.replace("suite = jordan near-sum", "suite = jordan sum")
    code, _ = run(loads_config(text), "decompose")
    assert code == 1


def test_deterministic_report(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    cfg = str(CONFIGS / "two_classes_sum.ini")
    assert main(["verify", cfg, "--samples", "500", "--report", str(a)]) == 0
    assert main(["verify", cfg, "--samples", "500", "--report", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[1] == "SEED 0"


def test_seed_override_changes_header(tmp_path):
    out = tmp_path / "r.txt"
    main(["decompose", str(CONFIGS / "m2_jtwist.ini"), "--seed", "7", "--report", str(out)])
    assert "SEED 7" in out.read_text()


@pytest.mark.parametrize(
    "text",
    [
        "not ini at all",
        "[instance]\nmodulus = 6\nelements = a\n",
        "[instance]\nmodulus = six\nelements = a\n[map]\nkind = identity\n",
        "[instance]\nmodulus = 6\nelements = a b\npairs = a-b\n[map]\nkind = identity\n",
        "[instance]\nmodulus = 6\nelements = a\n[map]\nkind = identity\n[run]\nsuite = bogus\n",
    ],
)
def test_parse_errors(tmp_path, text, capsys):
    p = tmp_path / "bad.ini"
    p.write_text(text)
    assert main(["verify", str(p)]) == 2
    assert "ERROR parse" in capsys.readouterr().err


def test_unknown_label_in_pairs_exits_2():
    cfg = loads_config("[instance]\nmodulus = 6\nelements = a b\npairs = a<z\n[map]\nkind = identity\n")
    code, rep = run(cfg)
    assert code == 2 and rep.lines[-1].startswith("ERROR parse")


def test_unknown_map_kind():
    cfg = loads_config("[instance]\nmodulus = 6\nelements = a\n[map]\nkind = warp\n")
    with pytest.raises(ConfigError):
        build_map(cfg)


def test_non_unit_inner_is_precondition():
    cfg = loads_config("[instance]\nmodulus = 6\nelements = a b\npairs = a<b\n[map]\nkind = inner\nunit = {a}->{a}: 2\n")
    code, rep = run(cfg)
    assert code == 2
    assert rep.lines[-1].startswith("ERROR PreconditionFailed")


def test_missing_file():
    assert main(["verify", "/nonexistent/x.ini"]) == 2


def test_bad_arguments():
    assert main(["frobnicate"]) == 2


def test_suites_listing(capsys):
    assert main(["suites"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("axioms -> ")
    assert any(l.startswith("restriction-compat -> ") for l in lines)


def test_chain3_reversal_fails_only_dprime(capsys):
    assert main(["verify", str(CONFIGS / "chain3_reversal.ini")]) == 1
    failing = [l for l in capsys.readouterr().out.splitlines() if l.startswith("CHECK") and " FAIL " in l]
    assert len(failing) == 1 and failing[0].startswith("CHECK prime-hom.dprime FAIL")


def test_explicit_unit_series():
    base = "[instance]\nmodulus = 6\nelements = a b c d\npairs = a~b c~d a<c\n[map]\nkind = inner\nunit = "
    good = "{a,b}->{a,b}: 1 0 0 1; {a,b}->{c,d}: 2 0 0 1; {c,d}->{c,d}: 1 0 0 1\n[run]\nsuite = jordan classify\n"
    code, rep = run(loads_config(base + good), "decompose")
    assert code == 0 and "CLASSIFY hom PASS" in rep.lines
    code, rep = run(loads_config(base + "{a,b}->{a,b}: 1 x 0 1\n"), "decompose")
    assert code == 2 and rep.lines[-1].startswith("ERROR parse")
