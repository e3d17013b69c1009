import io
import json

import pytest

from towers import cli
from towers.complexes import Undecided
from towers.workspace import (
    BUNDLED,
    WorkspaceError,
    bundled,
    dumps_workspace,
    load_workspace,
    parse_workspace,
)


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def a2_data():
    return json.loads((BUNDLED / "a2.json").read_text())


@pytest.mark.parametrize("name", ["a2", "a3"])
def test_round_trip(name):
    ws = bundled(name)
    again = parse_workspace(json.loads(dumps_workspace(ws)))
    assert again == ws
    assert dumps_workspace(again) == dumps_workspace(ws)


def test_bundled_a2_contents():
    ws = bundled("a2")
    assert {"P1", "P2", "S1"} <= set(ws.reps)
    assert ws.collections["A2"] == ["P2", "P1"]


def test_d_squared_error_names_complex_and_degree():
    data = a2_data()
    data["reps"]["Q"] = {"dims": [1, 1], "maps": [[[1]]]}
    data["complexes"]["bad"] = {
        "terms": {"2": "Q", "1": "Q", "0": "Q"},
        "diffs": {"2": [[[1]], [[1]]], "1": [[[1]], [[1]]]},
    }
    with pytest.raises(WorkspaceError, match=r"complexes\.bad.*degree 2"):
        parse_workspace(data)


def test_modulus_must_be_prime():
    data = a2_data()
    data["modulus"] = 4
    with pytest.raises(WorkspaceError, match="modulus must be prime"):
        parse_workspace(data)


def test_cyclic_quiver_rejected():
    data = {"quiver": {"vertices": 2, "edges": [[0, 1], [1, 0]]}}
    with pytest.raises(WorkspaceError, match="acyclic"):
        parse_workspace(data)


def test_non_commuting_morphism_named():
    data = a2_data()
    data["morphisms"]["broken"] = {"source": "P1", "target": "P2", "comps": {"0": [[], [[1]]]}}
    with pytest.raises(WorkspaceError, match=r"morphisms\.broken"):
        parse_workspace(data)


def test_non_commuting_rep_map_in_differential():
    data = a2_data()
    data["complexes"]["bad"] = {"terms": {"1": "P1", "0": "P2"}, "diffs": {"1": [[], [[0]]]}}
    parse_workspace(data)
    data["complexes"]["bad"] = {"terms": {"1": "P1", "0": "P2"}, "diffs": {"1": [[], [[1]]]}}
    with pytest.raises(WorkspaceError, match=r"complexes\.bad\.diffs\.1"):
        parse_workspace(data)


def test_unresolved_and_duplicate_names():
    data = a2_data()
    data["collections"]["X"] = ["P1", "nope"]
    with pytest.raises(WorkspaceError, match="nope"):
        parse_workspace(data)
    data = a2_data()
    data["complexes"]["P1"] = {"terms": {}}
    with pytest.raises(WorkspaceError, match="already used"):
        parse_workspace(data)


def test_shape_error_names_entry():
    data = a2_data()
    data["reps"]["P1"]["maps"] = [[[1, 0]]]
    with pytest.raises(WorkspaceError, match=r"reps\.P1\.maps\[0\]"):
        parse_workspace(data)


def test_parse_error_has_line(tmp_path):
    p = tmp_path / "ws.json"
    p.write_text('{\n  "modulus": 2,\n  oops\n}')
    with pytest.raises(WorkspaceError, match=r"ws.json:3:"):
        load_workspace(p)


def test_tower_command():
    code, text = run("tower", "f", "--chain", "0,1")
    assert code == 0
    assert "cofib = P2[1] in [1, +inf): ok" in text
    assert "cofib = S1 in [0, 1): ok" in text
    assert "cofib = S1[-1] in [-inf, 0): ok" in text


def test_tower_dot(tmp_path):
    target = tmp_path / "t.dot"
    code, _ = run("tower", "f", "--chain", "0,1", "--dot", str(target))
    dot = target.read_text()
    assert code == 0 and dot.startswith('digraph "f" {') and "rankdir=LR;" in dot
    assert 's0 -> s1 [label="f_3\\ncofib in [1, +inf)"];' in dot
    assert dot.count("->") == 3


def test_heart_command():
    code, text = run("heart", "incl_P2_P1")
    assert code == 0
    for line in ("ker = 0", "coker = S1", "im = P2", "coim = P2"):
        assert line in text


def test_ztower_and_sod_and_hom():
    code, text = run("ztower", "f")
    assert code == 0 and "nontrivial levels [-1, 0, 1]" in text
    code, text = run("sod", "A2", "S1")
    assert code == 0 and "cofib = P2[1] in thick(P2): ok" in text
    code, text = run("hom", "S1", "P2", "--shift", "1")
    assert code == 0 and text.strip() == "dim Hom_D(S1, P2[1]) = 1"


def test_a3_workspace():
    code, text = run("-w", "a3", "sod", "A3", "Y")
    assert code == 0


def test_input_errors_exit_3(tmp_path, capsys):
    assert run("heart", "nope")[0] == 3
    assert run("tower", "f", "--chain", "x")[0] == 3
    assert run("heart", "f")[0] == 3          # source 0 is fine, target Y is not in the heart
    assert run("-w", str(tmp_path / "missing.json"), "hom", "S1", "S1")[0] == 3
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--suite", "nope"])
    assert exc.value.code == 3


def test_failed_certificate_exit_1(tmp_path):
    data = a2_data()
    data["collections"]["bad"] = ["P1", "P2"]
    p = tmp_path / "ws.json"
    p.write_text(json.dumps(data))
    code, text = run("-w", str(p), "sod", "bad", "S1")
    assert code == 1 and "dim Hom_D(P2, P1[0]) = 1" in text


def test_undecided_exit_2(monkeypatch):
    def boom(*args, **kwargs):
        raise Undecided("too many candidates")
    monkeypatch.setattr(cli, "stagewise_equivalent", boom)
    assert run("tower", "f", "--chain", "0")[0] == 2


def test_env_var_selects_workspace(monkeypatch):
    monkeypatch.setenv(cli.ENV_VAR, str(BUNDLED / "a3.json"))
    assert cli.resolve_workspace_path(None) == BUNDLED / "a3.json"
    code, text = run("hom", "P3", "P1")
    assert code == 0 and "= 1" in text
    monkeypatch.delenv(cli.ENV_VAR)
    assert cli.resolve_workspace_path(None) == BUNDLED / "a2.json"


def test_verify_single_suite_is_deterministic():
    a = run("verify", "--suite", "heart", "--seed", "5")
    b = run("verify", "--suite", "heart", "--seed", "5")
    assert a[0] == b[0] == 0
    strip = lambda s: [ln.rsplit(None, 1)[0] for ln in s.splitlines() if not ln.startswith("total")]
    assert strip(a[1]) == strip(b[1])
