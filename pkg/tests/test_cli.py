import io
import json

import pytest
from hypothesis import given, strategies as st

from anticanon_lab import cli, cycles

TYPE_I = """# type I surface
scenario type-I
base quadric-cycle
pair smooth 0
pair smooth 0
pair smooth 0
pair smooth 1   # on C2
type I
"""


def run(argv, monkeypatch=None):
    out = io.StringIO()
    code = cli.main(argv, out)
    return code, out.getvalue()


def test_type_I_scenario():
    sc = cli.parse_scenario(TYPE_I)
    assert sc.type_tag == "I"
    assert cycles.canonical_string(sc.config()) == (-3, -1, -3, -1)


def test_empty_scenario_is_base_cycle():
    sc = cli.parse_scenario("")
    assert sc.events == [] and sc.config().m == 4


def test_index_error_reports_line():
    with pytest.raises(cli.ScenarioError) as exc:
        cli.parse_scenario("base quadric-cycle\npair smooth 9\n")
    assert exc.value.lineno == 2 and "out of range" in str(exc.value)


@pytest.mark.parametrize("text", [
    "pair twist 1", "pair node x", "bogus", "type V", "params b=1", "params a=1/0",
    "catalog C1 f1-e1", "catalog x = f1", "pair node 1 t=2",
])
def test_malformed_lines(text):
    with pytest.raises(cli.ScenarioError):
        cli.parse_scenario(text)


def test_round_trip_is_normalising():
    norm = cli.normalize_scenario(TYPE_I)
    assert cli.serialize_scenario(cli.parse_scenario(norm)) == norm
    assert norm.startswith("scenario type-I\nbase quadric-cycle\npair smooth 0\n")


events = st.lists(st.tuples(st.sampled_from(["node", "smooth"]), st.integers(0, 11),
                            st.one_of(st.none(), st.fractions(max_denominator=9))), max_size=4)


@given(events, st.dictionaries(st.sampled_from(["a", "a1", "a2"]), st.fractions(max_denominator=9)))
def test_round_trip_property(evs, params):
    cfg = cycles.base_cycle()
    lines = ["scenario s"]
    for kind, i, t in evs:
        i %= cfg.m
        t = t if kind == "smooth" else None
        ev = cycles.BlowupEvent(kind, i, t)
        cfg = cycles.apply_event(cfg, ev)
        lines.append(ev.text())
    lines += ["params " + " ".join(f"{k}={v}" for k, v in params.items())] if params else []
    text = "\n".join(lines) + "\n"
    sc = cli.parse_scenario(text)
    once = cli.serialize_scenario(sc)
    assert cli.serialize_scenario(cli.parse_scenario(once)) == once
    assert sc.params == params


def test_threefold_command():
    code, out = run(["threefold", "II"])
    assert code == 0 and "base curves: S3-∩E1, S3+∩cE1" in out


def test_moduli_command():
    code, out = run(["moduli"])
    assert code == 0 and "| k=3 | - | 7-dim. | - |" in out


def test_branch_command_default_sample():
    code, out = run(["branch", "IV"])
    data = json.loads(out)
    assert code == 0 and data["all_passed"] and data["seed"] == 0


def test_branch_command_with_file(tmp_path):
    p = tmp_path / "q.poly"
    p.write_text("type II\nQ = z3*z4 + z0*z3\n")
    code, out = run(["branch", "II", "--q", str(p)])
    assert code == 1 and not json.loads(out)["all_passed"]
    code, _ = run(["branch", "III", "--q", str(p)])
    assert code == 2


def test_surface_command(tmp_path):
    p = tmp_path / "s.acs"
    p.write_text(TYPE_I)
    code, out = run(["surface", str(p), "--class=-2K"])
    data = json.loads(out)
    assert code == 0 and data["h0"] == 3 and data["fixed"] == "C1+cC1"
    bad = tmp_path / "bad.acs"
    bad.write_text("pair smooth 9\n")
    assert run(["surface", str(bad), "--class=-K"])[0] == 2
    assert run(["surface", str(tmp_path / "missing.acs"), "--class=-K"])[0] == 2
    assert run(["surface", str(p), "--class", "2q"])[0] == 2


def test_usage_errors_exit_2():
    assert run(["threefold", "V"])[0] == 2
    assert run([])[0] == 2


def test_enumerate_command():
    code, out = run(["enumerate", "--json"])
    data = json.loads(out)
    assert code == 0 and data["seed"] == 0 and len(data["scenarios"]) == 17


def test_paper_check_filter(capsys):
    code, out = run(["paper-check", "--json", "--filter", "threefold"])
    data = json.loads(out)
    assert code == 0 and data["checks"]
    assert all(c["id"].startswith("threefold.") and c["anchor"] for c in data["checks"])


def test_paper_check_unknown_filter(capsys):
    code, out = run(["paper-check", "--filter", "nonexistent"])
    assert code == 0 and "0 passed, 0 failed" in out
    assert "warning" in capsys.readouterr().err


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("ANTICANON_SEED", "7")
    code, out = run(["paper-check", "--json", "--filter", "moduli"])
    assert json.loads(out)["seed"] == 7
    monkeypatch.setenv("ANTICANON_SEED", "x")
    assert run(["moduli"])[0] == 2


def test_output_is_byte_identical():
    a = run(["paper-check", "--md", "--filter", "branch.III."])[1]
    b = run(["paper-check", "--md", "--filter", "branch.III."])[1]
    assert a == b
