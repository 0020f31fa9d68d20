import json

import pytest

from padicrd.cli import main

K4_EDGES = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"


@pytest.fixture
def k4_file(tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text(K4_EDGES)
    return path


def run(args):
    return main([str(a) for a in args])


def test_embed_reports_codes(k4_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["embed", "--graph", k4_file, "--out", out, "--no-figures"]) == 0
    text = capsys.readouterr().out
    assert "p = 2, N = 2" in text
    doc = json.loads((out / "embedding.json").read_text())
    assert doc["p"] == 2 and doc["N"] == 2
    assert [v["value"] for v in doc["vertices"]] == [0, 1, 2, 3]


def test_embed_with_prime_override(k4_file, tmp_path, capsys):
    assert run(["embed", "--graph", k4_file, "--p", 3, "--out", tmp_path / "o"]) == 0
    assert "p = 3, N = 2" in capsys.readouterr().out  # 3**2 >= 4


def test_embed_bad_graph_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 junk\n")
    assert run(["embed", "--graph", bad, "--out", tmp_path / "o"]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_graph_exits_2(tmp_path):
    assert run(["spectrum", "--out", tmp_path / "o"]) == 2


def test_spectrum_level_and_infinity(k4_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["spectrum", "--graph", k4_file, "--M", "3", "--out", out,
                "--no-figures"]) == 0
    doc = json.loads((out / "spectrum.json").read_text())
    assert doc["max_difference"] <= 1e-9
    mults = [e["multiplicity"] for e in doc["computed"]["eigenvalues"]]
    assert mults == [3, 4, 1]

    assert run(["spectrum", "--graph", k4_file, "--space", "infinity", "--out", out,
                "--no-figures"]) == 0
    doc = json.loads((out / "spectrum.json").read_text())
    values = [e["value"] for e in doc["infinity"]["eigenvalues"]]
    assert values == [-4.0, -3.0]


def test_turing_command(k4_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = run(["turing", "--graph", k4_file, "--model", "brusselator",
                "--A", 2, "--B", 4.5, "--eps", 0.3, "--d", 9,
                "--levels", "N,infinity", "--out", out, "--no-figures"])
    assert code == 0
    text = capsys.readouterr().out
    assert "T1: PASS" in text and "pattern" in text
    doc = json.loads((out / "turing.json").read_text())
    assert doc["conditions"]["T5"]["holds"] is True
    assert doc["band"]["kappa1"] == pytest.approx(-9.675, abs=1e-3)
    assert doc["spaces"][0]["pattern"] is True


def test_turing_below_critical_prints_dc(k4_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["turing", "--graph", k4_file, "--model", "brusselator",
                "--A", 2, "--B", 4.5, "--eps", 0.3, "--d", 2, "--out", out,
                "--no-figures"]) == 0
    text = capsys.readouterr().out
    assert "no pattern" in text
    assert "critical d = 3.18127" in text


def test_simulate_with_config_and_golden_rerun(tmp_path, capsys):
    graph = tmp_path / "k4.txt"
    graph.write_text(K4_EDGES)
    config = tmp_path / "run.toml"
    config.write_text(
        f"""
[graph]
path = '{graph}'

[model]
kind = "brusselator"
A = 2.0
B = 4.5

[run]
eps = 0.3
d = 9.0
t_end = 2.0
stride = 10
seed = 11

[perturbation]
kind = "random"
amplitude = 1e-4
"""
    )
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert run(["simulate", "--config", config, "--out", out1, "--no-figures"]) == 0
    assert run(["simulate", "--config", config, "--out", out2, "--no-figures"]) == 0
    # determinism contract: identical config + seed -> byte-identical outputs
    assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()
    assert (out1 / "pattern.json").read_bytes() == (out2 / "pattern.json").read_bytes()
    doc = json.loads((out1 / "pattern.json").read_text())
    assert doc["cluster_count"] == 4
    header = (out1 / "trajectory.csv").read_text().splitlines()[0]
    assert header.split(",")[:2] == ["t", "u_0_0"]


def test_flags_override_config(tmp_path, capsys):
    graph = tmp_path / "k4.txt"
    graph.write_text(K4_EDGES)
    config = tmp_path / "run.toml"
    config.write_text(
        f"""
[graph]
path = '{graph}'

[run]
eps = 0.3
d = 2.0
"""
    )
    out = tmp_path / "out"
    assert run(["turing", "--config", config, "--d", 9, "--out", out,
                "--no-figures"]) == 0
    doc = json.loads((out / "turing.json").read_text())
    assert doc["d"] == 9.0


def test_unknown_config_key_rejected(tmp_path, capsys):
    config = tmp_path / "run.toml"
    config.write_text("[run]\nepzilon = 0.3\n")
    assert run(["turing", "--config", config, "--out", tmp_path / "o"]) == 2
    assert "unknown key" in capsys.readouterr().err


def test_custom_kinetics_via_config(tmp_path, capsys):
    graph = tmp_path / "k4.txt"
    graph.write_text(K4_EDGES)
    config = tmp_path / "run.toml"
    config.write_text(
        f"""
[graph]
path = '{graph}'

[model]
kind = "custom"

[kinetics]
f = "A - (B+1)*u + u^2*v"
g = "B*u - u^2*v"

guess = [2.1, 2.3]

[kinetics.params]
A = 2.0
B = 4.5

[box]
a = -8.0
b = 12.0
"""
    )
    out = tmp_path / "out"
    code = run(["turing", "--config", config, "--eps", 0.3, "--d", 9,
                "--out", out, "--no-figures"])
    assert code == 0
    doc = json.loads((out / "turing.json").read_text())
    # the parsed expressions reproduce the built-in analysis
    assert doc["steady_state"] == pytest.approx([2.0, 2.25], abs=1e-9)
    assert doc["band"]["kappa1"] == pytest.approx(-9.675, abs=1e-3)


def test_converge_and_replica_commands(k4_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert run(["converge", "--graph", k4_file, "--model", "brusselator",
                "--A", 2, "--B", 1, "--eps", 0.3, "--d", 1, "--M", "2,3,4",
                "--t-end", 0.5, "--out", out, "--no-figures"]) == 0
    doc = json.loads((out / "convergence.json").read_text())
    assert doc["levels"] == [2, 3, 4]
    assert doc["gaps"][-1] == 0.0

    assert run(["replica", "--graph", k4_file, "--M", "3", "--eps", 0.3,
                "--out", out, "--no-figures"]) == 0
    doc = json.loads((out / "replica.json").read_text())
    assert doc["spectra_match"] is False
    assert doc["identification_supported"] is False
    text = capsys.readouterr().out
    assert "NOT supported" in text


def test_operator_command_scaled_lambda(k4_file, tmp_path):
    out = tmp_path / "out"
    assert run(["operator", "--graph", k4_file, "--kind", "scaled_lambda",
                "--M", "3", "--lam", 2.0, "--out", out, "--no-figures"]) == 0
    doc = json.loads((out / "operator.json").read_text())
    assert doc["kind"] == "scaled_lambda"
    assert doc["lambda"] == 2.0
    assert doc["entries"][0][0] == -6.0


def test_figures_are_rendered(k4_file, tmp_path):
    out = tmp_path / "out"
    assert run(["spectrum", "--graph", k4_file, "--M", "3", "--out", out]) == 0
    assert (out / "spectrum.png").stat().st_size > 0


COMMANDS = {
    "embed": ["embed"],
    "operator": ["operator", "--kind", "full_level", "--M", "3"],
    "spectrum": ["spectrum", "--M", "3"],
    "turing": ["turing", "--model", "brusselator", "--A", 2, "--B", 4.5,
               "--eps", 0.3, "--d", 9, "--levels", "N,infinity"],
    "simulate": ["simulate", "--model", "brusselator", "--A", 2, "--B", 4.5,
                 "--eps", 0.3, "--d", 9, "--t-end", 0.5, "--seed", 5],
    "converge": ["converge", "--model", "brusselator", "--A", 2, "--B", 1,
                 "--eps", 0.3, "--d", 1, "--M", "2,3", "--t-end", 0.2],
    "replica": ["replica", "--M", "3", "--eps", 0.3, "--seed", 2],
}


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_every_document_is_deterministic(name, k4_file, tmp_path):
    # golden contract: identical invocation -> byte-identical documents
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert run(COMMANDS[name] + ["--graph", k4_file, "--out", out,
                                     "--no-figures"]) == 0
        outs.append(out)
    files = sorted(p.name for p in outs[0].iterdir())
    assert files
    for fname in files:
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes(), fname


def test_blowup_exits_3(tmp_path, capsys):
    graph = tmp_path / "k4.txt"
    graph.write_text(K4_EDGES)
    config = tmp_path / "run.toml"
    # u' = u^2 - 1 pushes sites perturbed above the unstable rest point out
    # of the validity box
    config.write_text(
        f"""
[graph]
path = '{graph}'

[model]
kind = "custom"

[kinetics]
f = "u^2 - 1"
g = "-v"
guess = [1.2, 0.0]

[box]
a = -9.0
b = 11.0

[run]
eps = 1e-6
d = 1.0
t_end = 10.0
seed = 1

[perturbation]
amplitude = 1e-3
"""
    )
    code = run(["simulate", "--config", config, "--out", tmp_path / "o", "--no-figures"])
    assert code == 3
    assert "halted" in capsys.readouterr().out
