from __future__ import annotations

import json

import pytest

from graphion.cli import EXIT_GUARD, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, run
from graphion.graph import complete_bipartite, complete_graph, hat_graph


@pytest.fixture
def hat_file(tmp_path):
    p = tmp_path / "hat.graph"
    p.write_text(hat_graph().to_text(["hat"]))
    return str(p)


def test_kirchhoff(hat_file, capsys):
    assert run(["poly", "kirchhoff", hat_file]) == EXIT_OK
    out = capsys.readouterr().out
    assert "kirchhoff: a*c + a*d + b*c + b*d + c*d" in out


def test_json_manifest(hat_file, capsys):
    assert run(["--json", "--seed", "7", "poly", "kirchhoff", hat_file]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["manifest"]["subcommand"] == "poly"
    assert doc["manifest"]["seed"] == 7
    assert set(doc["manifest"]["guards"]) == {"vw", "pw", "chord"}
    assert doc["result"]["kirchhoff"] == "a*c + a*d + b*c + b*d + c*d"


def test_dodgson(hat_file, capsys):
    assert run(["poly", "dodgson", hat_file, "--I", "a", "--J", "a"]) == EXIT_OK
    assert "dodgson: c + d" in capsys.readouterr().out


def test_width_guard(tmp_path, capsys):
    p = tmp_path / "k7.graph"
    p.write_text(complete_graph(7).to_text(["k7"]))
    assert run(["--guard-vw", "10", "poly", "width", str(p)]) == EXIT_GUARD
    assert "guard exceeded" in capsys.readouterr().out


def test_width_k33(tmp_path, capsys):
    p = tmp_path / "k33.graph"
    p.write_text(complete_bipartite(3, 3).to_text(["k33"]))
    assert run(["poly", "width", str(p)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "vertex_width: 4" in out and "path_width: 3" in out


def test_chord_guard(capsys):
    assert run(["--guard-chord", "3", "chord", "list", "4"]) == EXIT_GUARD


def test_chord_list(capsys):
    assert run(["chord", "list", "3"]) == EXIT_OK
    assert "count: 4" in capsys.readouterr().out


def test_chord_stats(capsys):
    assert run(["chord", "stats", "(1,3)(2,4)"]) == EXIT_OK
    assert "terminals:" in capsys.readouterr().out


def test_dse_geometric(capsys):
    assert run(["dse", "geometric", "--s", "-2", "--order", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "r_2: -f0^2 + f0*f1" in out


def test_tree(capsys):
    assert run(["tree", "solve", "--s", "1", "--order", "2"]) == EXIT_OK
    assert "x^2: 2*(())" in capsys.readouterr().out


def test_reproduce_match(capsys):
    assert run(["reproduce", "hat-psi"]) == EXIT_OK
    assert "result: MATCH" in capsys.readouterr().out


def test_reproduce_mismatch_exit_code(capsys):
    # the second geometric choice gives a different r-series
    assert run(["reproduce", "g-independence"]) == EXIT_MISMATCH
    assert "result: MISMATCH" in capsys.readouterr().out


def test_cov_mismatch_exit_code(tmp_path, capsys):
    p = tmp_path / "k4.graph"
    p.write_text(complete_graph(4).to_text(["k4"]))
    code = run(["cov", str(p), "--g1", "1,2,3,4,5", "--g2", "", "--g3", "6"])
    assert code in (EXIT_OK, EXIT_MISMATCH)


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        run(["nope"])


def test_bundled_graph_by_name(capsys):
    assert run(["poly", "kirchhoff", "hat"]) == EXIT_OK
    assert "kirchhoff: a*c + a*d + b*c + b*d + c*d" in capsys.readouterr().out


def test_bad_input_exit_code(hat_file, capsys):
    assert run(["poly", "kirchhoff", "no-such-graph"]) == EXIT_INPUT
    assert run(["c2", hat_file, "--q", "4"]) == EXIT_INPUT
    assert "not prime" in capsys.readouterr().out
