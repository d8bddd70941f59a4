import subprocess
import sys

import numpy as np
import pytest

from eqbell.catalog import catalog_get
from eqbell.cli import main, parse_vertices_csv
from eqbell.config import caps
from eqbell.functional import InequalityFunctional, parse_facet_line, parse_ineq
from eqbell.geometry import facet_enumeration
from eqbell.quantum import parse_strategy
from eqbell.scenario import Scenario
from eqbell.strategies import vertex_array


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_kstar(capsys):
    assert run(capsys, "kstar", "--parties", "3", "--inputs", "3")[:2] == (0, "6\n")
    assert run(capsys, "kstar", "--parties", "3", "--inputs", "2", "--unanimous")[1] == "3\n"


def test_counts_side_by_side(capsys):
    code, out, _ = run(capsys, "counts", "--scenario", "n=2 m=2,2 k=2")
    assert code == 0
    assert "formula=7" in out and "brute_force=8" in out
    code, out, _ = run(capsys, "counts", "--scenario", "n=2 m=2,2 k=2", "--empty-term", "--format", "csv")
    assert out.splitlines()[1].endswith(",8,8")


def test_vertices_csv_round_trip(capsys):
    sc = Scenario.parse("n=2 m=2,3 k=3")
    code, out, err = run(capsys, "vertices", "--scenario", str(sc), "--format", "csv")
    assert code == 0
    V = parse_vertices_csv(out, sc)
    assert {tuple(r) for r in V} == {tuple(r) for r in vertex_array(sc)}
    assert f"{len(V)} vertices" in err


def test_facets_round_trip(capsys):
    sc = Scenario.parse("n=2 m=2 k=3")
    code, out, _ = run(capsys, "facets", "--scenario", str(sc))
    assert code == 0
    parsed = {parse_facet_line(line, sc) for line in out.splitlines() if not line.startswith("eq:")}
    h = facet_enumeration(vertex_array(sc))
    assert parsed == {InequalityFunctional.from_vector(sc, list(a), b) for a, b in h.facets}


def test_classify_and_save(capsys, tmp_path):
    code, out, err = run(capsys, "classify", "--scenario", "n=2 m=3 k=3", "--save", "--repo", str(tmp_path))
    assert code == 0
    assert "4 classes" in err
    assert len(out.splitlines()) == 4
    files = list((tmp_path / Scenario.parse("n=2 m=3 k=3").slug()).iterdir())
    assert len([f for f in files if f.suffix == ".ineq"]) == 4
    assert len([f for f in files if f.suffix == ".meta"]) == 4


def test_bound_types(capsys):
    assert run(capsys, "bound", "--type", "local", "chsh-smells")[1].splitlines()[0] == "2"
    assert run(capsys, "bound", "--type", "ns", "--k", "2", "chsh-smells")[1].splitlines()[0] == "3"
    assert run(capsys, "bound", "--type", "signaling", "chsh-smells")[1] == "3\n"
    out = run(capsys, "bound", "--type", "bilocal-ns", "--k", "3", "s222")[1]
    assert out.splitlines()[0] == "2"


def test_bound_on_a_file(capsys, tmp_path):
    path = tmp_path / "chsh.ineq"
    code, out, _ = run(capsys, "catalog", "chsh-smells")
    path.write_text(out)
    assert parse_ineq(out) == catalog_get("chsh-smells").ineq
    assert run(capsys, "bound", str(path))[1].splitlines()[0] == "2"


def test_game_transform(capsys):
    code, out, _ = run(capsys, "game", "--transform", "u4", "--classical")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "scale 5 shift -2"
    assert "transformed-bound 3/5" in lines
    assert "classical-value 3/5" in lines
    assert run(capsys, "game", "--transform", "s222")[0] == 1


def test_family_emits_ineq(capsys):
    code, out, _ = run(capsys, "family", "--name", "f-n2", "--parties", "3")
    assert code == 0
    f = parse_ineq(out)
    assert len(f) == 8 and f.bound == 1
    assert run(capsys, "family", "--name", "nope", "--parties", "3")[0] == 2


def test_catalog_listing_and_verify(capsys):
    code, out, _ = run(capsys, "catalog")
    assert "s4455" in out.split()
    code, out, _ = run(capsys, "catalog", "chsh-smells", "--verify", "--restarts", "5")
    assert code == 0
    assert all("[pass]" in line for line in out.splitlines())
    assert run(capsys, "catalog", "nonexistent")[0] == 2


def test_seesaw_strategy_round_trip(capsys, tmp_path):
    strat = tmp_path / "s.txt"
    code, out, _ = run(capsys, "seesaw", "--dim", "2", "--restarts", "3", "--output", str(strat), "chsh-smells")
    assert code == 0
    value = float(out.split()[1])
    assert value == pytest.approx(1 + 2 ** 0.5, abs=1e-6)
    parse_strategy(strat.read_text()).check()
    code, out, _ = run(capsys, "quantum", "--strategy", str(strat), "chsh-smells")
    assert float(out.splitlines()[-1].split()[1]) == pytest.approx(value, abs=1e-9)


def test_seesaw_with_state_file(capsys, tmp_path):
    rho = np.zeros((4, 4))
    rho[1, 1] = 1
    path = tmp_path / "rho.txt"
    path.write_text("\n".join(" ".join(f"{v},0" for v in row) for row in rho))
    code, out, _ = run(capsys, "seesaw", "--state", str(path), "--restarts", "2", "chsh-smells")
    assert code == 0
    assert float(out.split()[1]) <= 2 + 1e-9


def test_quantum_diagnostics(capsys):
    code, out, _ = run(capsys, "quantum")
    vals = dict(line.split() for line in out.splitlines())
    assert float(vals["concurrence"]) == pytest.approx(0.4144, abs=5e-4)
    assert float(vals["horodecki"]) <= 1


def test_verify_small_tables(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "paper-tables", "--max-scenario", "small")
    lines = out.splitlines()
    rows = {line.split(")")[0] + ")" for line in lines}
    assert len(rows) == 6
    # every class count in the small rows is reproduced
    assert all("[pass]" in line for line in lines if " classes:" in line)
    # exit status reflects any mismatch
    assert code == (1 if any("FAIL" in line for line in lines) else 0)


def test_cap_flag_is_scoped(capsys):
    before = caps.max_vertices
    code, _, err = run(capsys, "facets", "--scenario", "n=2 m=2 k=2", "--cap", "max_vertices=3")
    assert code == 1
    assert "max_vertices" in err and "8" in err
    assert caps.max_vertices == before


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "caps.ini"
    cfg.write_text("[caps]\nmax_hilbert_dim = 2\n")
    code, _, err = run(capsys, "seesaw", "--config", str(cfg), "chsh-smells")
    assert code == 1 and "max_hilbert_dim" in err


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "kstar")[0] == 2
    assert run(capsys, "vertices", "--scenario", "n=two")[0] == 2
    assert run(capsys, "bound", "no-such-file.ineq")[0] == 2


def test_out_of_scope_scenario_fails_on_a_cap(capsys):
    code, _, err = run(capsys, "facets", "--scenario", "n=2 m=5 k=2", "--cap", "max_dd_work=10000000")
    assert code == 1
    assert "resource cap" in err


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "eqbell.cli", "kstar", "--parties", "2", "--inputs", "3"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "4"
