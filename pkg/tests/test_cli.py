import json
from pathlib import Path

import pytest

from core.graph_io import load_graph
from main import COMMAND_HELP, COMMANDS, GRAMMAR, RunConfig, UsageError, parse_args, run

CHAIN8 = "N 8\n" + "".join(f"E {i} {i + 1} 1.0\n" for i in range(7))


@pytest.fixture
def cli(config_dir):
    def invoke(*argv):
        return run(list(argv) + ["--config-dir", config_dir])
    return invoke


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain8.txt"
    path.write_text(CHAIN8, encoding="utf-8")
    return path


def test_verify_file(cli, chain_file, capsys):
    assert cli("verify", "--graph", str(chain_file)) == 0
    out = capsys.readouterr().out
    assert "degeneracy 9 (expected 9)" in out
    assert "Overall: PASS" in out
    assert chain_file.read_text(encoding="utf-8") == CHAIN8


def test_verify_generated_instance(cli, capsys):
    assert cli("verify", "--gen", "ring:6", "--J", "random:0.5:2.0:seed3", "--format", "structured") == 0
    tree = json.loads(capsys.readouterr().out)
    assert tree["pass"] is True
    assert tree["graph"]["n"] == 6


def test_disconnected_file_is_input_error(cli, tmp_path, capsys):
    path = tmp_path / "disconnected.txt"
    path.write_text("N 4\nE 0 1 1.0\nE 2 3 1.0\n", encoding="utf-8")
    assert cli("verify", "--graph", str(path)) == 2
    err = capsys.readouterr().err
    assert "DisconnectedGraph" in err
    assert "disconnected.txt" in err


def test_configured_sector_budget_is_input_error(config_dir, cli, capsys):
    config_file = Path(config_dir) / "config.json"
    config_file.write_text(json.dumps({"basis": {"max_sector_size": 4}}), encoding="utf-8")
    assert cli("verify", "--gen", "chain:6") == 2
    assert "SectorTooLarge" in capsys.readouterr().err


def test_mixed_sign_coupling_is_input_error(cli, tmp_path, capsys):
    path = tmp_path / "mixed.txt"
    path.write_text("N 3\nE 0 1 1.0\nE 1 2 -1.0\n", encoding="utf-8")
    assert cli("verify", "--graph", str(path)) == 2
    assert "NonPositiveCoupling" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [],
    ["verify"],
    ["verify", "--gen", "chain:4", "--graph", "g.txt"],
    ["verify", "--graph", "g.txt", "--J", "uniform:1.0"],
    ["verify", "--gen", "chain:4", "--bogus"],
    ["verify", "--gen", "chain:4", "--tol-energy", "-1"],
    ["verify", "--gen", "chain:4", "--dense-cap", "lots"],
    ["arithmetic-sweep", "--gen", "chain:4"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert "commands:" in capsys.readouterr().err


def test_bad_generator_spec(cli, capsys):
    assert cli("verify", "--gen", "hex:4") == 2
    assert "InvalidParameter" in capsys.readouterr().err


def test_clause_failure_exits_one(cli, capsys):
    assert cli("verify", "--gen", "chain:4", "--tol-span", "1e-30") == 1
    assert "clause c: FAIL" in capsys.readouterr().out


def test_structured_output_is_byte_identical(cli, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for path in (first, second):
        assert cli("verify", "--gen", "random:7:0.4:seed7", "--J", "random:0.5:2.0:seed3",
                   "--seed", "5", "--format", "structured", "--output", str(path)) == 0
    assert first.read_bytes() == second.read_bytes()


def test_spectrum(cli, capsys):
    assert cli("spectrum", "--gen", "grid:2x3", "--format", "structured") == 0
    tree = json.loads(capsys.readouterr().out)
    assert len(tree["sectors"]) == 7


def test_lemma(cli, capsys):
    assert cli("lemma", "--gen", "star:6", "--format", "structured") == 0
    tree = json.loads(capsys.readouterr().out)
    assert tree["pass"] is True
    assert 0 not in tree["pair"]


def test_gen_writes_parseable_graph(cli, tmp_path):
    path = tmp_path / "ring.txt"
    assert cli("gen", "--gen", "ring:5", "--J", "random:0.5:2.0:seed1", "--output", str(path)) == 0
    graph = load_graph(str(path))
    assert graph.vertex_count == 5 and len(graph.edges) == 5


def test_gen_does_not_overwrite_input(chain_file, capsys):
    assert run(["gen", "--graph", str(chain_file), "--output", str(chain_file)]) == 2
    assert chain_file.read_text(encoding="utf-8") == CHAIN8


def test_arithmetic_sweep(cli, capsys):
    assert cli("arithmetic-sweep", "--max-n", "2000") == 0
    assert "no excluded S admits a solution" in capsys.readouterr().out


def test_unwritable_output(cli, tmp_path):
    assert cli("lemma", "--gen", "chain:4", "--format", "structured", "--output", str(tmp_path)) == 2


@pytest.mark.parametrize("config", [
    RunConfig("verify", graph="chain8.txt"),
    RunConfig("verify", gen="random:9:0.4:seed7", coupling="random:0.5:2.0:seed3", dense_cap=512,
              tol_energy=1e-10, tol_span=2.5e-8, seed=7, fmt="structured", output="out.json", timings=True),
    RunConfig("spectrum", gen="grid:3x4", krylov_count=5, log_level="DEBUG", config_dir="/tmp/ferro"),
    RunConfig("arithmetic-sweep", max_n=1_000_000),
])
def test_config_round_trips_through_argv(config):
    assert parse_args(config.to_argv()) == config


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("lemma")
    with pytest.raises(UsageError):
        RunConfig("verify", gen="chain:4", max_n=10)


def test_grammar_lists_every_command(capsys):
    assert tuple(COMMAND_HELP) == COMMANDS
    for name, text in COMMAND_HELP.items():
        assert f"  {name:<18}{text}" in GRAMMAR
    assert run(["bogus"]) == 2
    assert "arithmetic-sweep  exact exclusion arithmetic" in capsys.readouterr().err
