"""Exit-code contract and JSON round trips of the command line surface."""

import io
import json

import pytest

from cspgames.cli import load_structure, main
from cspgames.structures import RelationalStructure, make_named

K2 = make_named("clique", 2).to_json()
K3 = make_named("clique", 3).to_json()
D2 = make_named("directed_edge").to_json()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_load_structure_inline_file_and_stdin(tmp_path, monkeypatch):
    inline = load_structure(K2)
    assert inline == make_named("clique", 2)
    path = tmp_path / "k2.json"
    path.write_text(K2)
    assert load_structure(str(path)) == inline
    monkeypatch.setattr("sys.stdin", io.StringIO(K2))
    assert load_structure("-") == inline


def test_hom_find_exit_codes(capsys):
    code, out = run(capsys, "hom", "find", K2, K3)
    assert code == 0
    assert json.loads(out)["homomorphism"] is not None
    code, out = run(capsys, "hom", "find", K3, K2)
    assert code == 1
    assert json.loads(out)["homomorphism"] is None


def test_hom_check(capsys):
    assert run(capsys, "hom", "check", K2, K3, "--map", "[0, 2]")[0] == 0
    assert run(capsys, "hom", "check", K2, K3, "--map", "[1, 1]")[0] == 1
    assert run(capsys, "hom", "check", K2, K3)[0] == 2  # missing --map


def test_core_and_iso(capsys):
    code, out = run(capsys, "core", K3)
    assert code == 0
    assert RelationalStructure.from_json(out) == make_named("clique", 3)
    assert run(capsys, "iso", K2, K2)[0] == 0
    assert run(capsys, "iso", K2, K3)[0] == 1


def test_power_round_trips_through_json(capsys):
    code, out = run(capsys, "power", "alice", K2, "--k", "2")
    assert code == 0
    power = RelationalStructure.from_json(out)
    assert power.domain_size == 4
    code, out = run(capsys, "power", "bob", K3, "--k", "2")
    assert RelationalStructure.from_json(out).domain_size == 6


def test_power_cap_is_exit_3(capsys):
    assert run(capsys, "power", "alice", K3, "--k", "9")[0] == 3


def test_pattern_commands(capsys):
    assert run(capsys, "pattern", "show", D2)[0] == 0
    code, out = run(capsys, "pattern", "chromatic", K3)
    assert code == 0 and json.loads(out)["chromatic_number"] == 3
    assert run(capsys, "pattern", "central", D2)[0] == 1
    assert run(capsys, "pattern", "central", K3)[0] == 0
    assert run(capsys, "pattern", "complete", K2, "--n", "3")[0] == 0
    assert run(capsys, "pattern", "show")[0] == 2  # structure missing


def test_covering_array_csv_and_json(capsys):
    code, out = run(
        capsys, "pattern", "covering-array", "--n", "6", "--strength", "2", "--q", "2", "--csv"
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 6
    code, out = run(capsys, "pattern", "covering-array", "--n", "5", "--strength", "2", "--q", "2")
    data = json.loads(out)
    assert data["rows"] == 5
    assert len(data["columns"]) == data["width"]


def test_embed_commands(capsys):
    code, out = run(capsys, "embed", "clique-alice", K2, "--n", "3")
    assert code == 0
    data = json.loads(out)
    assert len(data["tuples"]) == 3
    assert all(len(t) == data["k"] for t in data["tuples"])
    code, out = run(capsys, "embed", "clique-alice-digraph", D2, "--m", "4")
    assert code == 0 and json.loads(out)["k"] == 5
    assert run(capsys, "embed", "complete-bob", D2, "--n", "2")[0] == 1
    assert run(capsys, "embed", "complete-bob", K3, "--n", "2")[0] == 0


def test_game_brute_verify_synth_loop(capsys):
    code, out = run(capsys, "game", "brute", K2, D2, "--variant", "bob", "--k", "2")
    assert code == 1
    code, strategy = run(capsys, "game", "brute", K2, D2, "--variant", "alice", "--k", "2")
    assert code == 0
    code, out = run(capsys, "game", "verify", K2, D2, "--strategy", strategy)
    assert code == 0 and json.loads(out)["perfect"] is True
    # a failing strategy surfaces its counterexample
    bad = json.loads(strategy)
    bad["bob"] = [[0, 0], [0, 0]]
    code, out = run(capsys, "game", "verify", K2, D2, "--strategy", json.dumps(bad))
    assert code == 1
    assert json.loads(out)["counterexample"]["reason"] in ("plausibility", "consistency")


def test_game_synth_from_hom(capsys):
    code, power = run(capsys, "power", "bob", K3, "--k", "2")
    code, hom = run(capsys, "hom", "find", K3, power)
    mapping = json.dumps(json.loads(hom)["homomorphism"])
    code, strategy = run(
        capsys, "game", "synth", K3, K3, "--variant", "bob", "--k", "2", "--map", mapping
    )
    assert code == 0
    assert run(capsys, "game", "verify", K3, K3, "--strategy", strategy)[0] == 0


def test_quantum_commands(capsys):
    code, out = run(capsys, "quantum", "equality-experiment", "--d", "2", "--trials", "6")
    assert code == 0
    stats = json.loads(out)
    assert stats["trials"] == 6 and stats["false_certifications"] == 0
    # malformed pvm json is a usage error
    assert run(capsys, "quantum", "validate", "--pvm", "{not json")[0] == 2
    assert run(capsys, "quantum", "member")[0] == 2


def test_geom_commands(capsys):
    code, out = run(capsys, "geom", "frames", "--n", "2", "--d", "2", "--count", "5")
    assert code == 0 and json.loads(out)["all_ok"] is True
    code, out = run(capsys, "geom", "color-sphere", "--dim", "2")
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "certified"
    assert len(data["centers"]) >= 4


def test_demo_command(capsys):
    code, out = run(capsys, "demo", "clique-alice-powers")
    assert code == 0 and json.loads(out)["ok"] is True
    assert run(capsys, "demo", "no-such-demo")[0] == 2
    assert run(capsys, "demo")[0] == 2


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["definitely-not-a-command"])
    assert info.value.code == 2


def test_malformed_structure_json_is_usage_error(capsys):
    assert run(capsys, "core", '{"signature": []}')[0] == 2
    assert run(capsys, "core", "/nonexistent/path.json")[0] == 2
