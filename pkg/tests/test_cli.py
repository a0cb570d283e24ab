"""Command-line behavior: exit codes, config handling, artifact round trips."""

import json
import os

import numpy as np
import pytest

import lppgeo.cli as cli
from lppgeo import InstabilityGraph, load_field, read_edges_tsv
from lppgeo.acceptance import AcceptanceRun
from lppgeo.stats import make_report


def test_usage_errors_exit_2(capsys, tmp_path):
    assert cli.run(["simulate", "--no-such-flag"]) == 2
    assert cli.run([]) == 2
    assert cli.run(["scan-jumps", "--edge", "0,0:1,0", "--alpha", "0.9:0.1"]) == 2
    assert cli.run(["simulate", "--window", "0,8,0,8"]) == 2
    assert "missing required setting(s): --out" in capsys.readouterr().err


def test_help_exits_0(capsys):
    assert cli.run(["--help"]) == 0
    assert "simulate" in capsys.readouterr().out


def test_simulate_round_trip(tmp_path, capsys):
    out = tmp_path / "field.lppw"
    assert cli.run(["simulate", "--window", "0,8,0,8", "--seed", "42",
                    "--out", str(out)]) == 0
    assert str(out) in capsys.readouterr().out
    field = load_field(out)
    assert field.window.x_max == 8
    assert field.seed == 42


def test_busemann_exact_npz(tmp_path):
    out = tmp_path / "b.npz"
    assert cli.run(["busemann", "--mode", "exact", "--window", "0,6,0,6",
                    "--alpha", "0.5", "--seed", "3", "--out", str(out)]) == 0
    with np.load(out) as doc:
        assert doc["horizon"] == -1
        assert doc["U"].shape == (1, 7, 7)
        assert list(doc["window"]) == [0, 6, 0, 6]
        # increments exist wherever the stepped-to site stays in the window
        assert not np.any(np.isnan(doc["U"][0, :-1, :]))
        assert np.all(np.isnan(doc["U"][0, -1, :]))


def test_busemann_argument_mismatches(tmp_path, capsys):
    out = str(tmp_path / "b.npz")
    assert cli.run(["busemann", "--mode", "exact", "--window", "0,6,0,6",
                    "--alpha", "0.4", "0.6", "--out", out]) == 2
    assert "one direction at a time" in capsys.readouterr().err
    assert cli.run(["busemann", "--window", "0,6,0,6", "--alpha", "0.4", "0.6",
                    "--sign", "minus", "--out", out]) == 2
    assert "one sign per alpha" in capsys.readouterr().err


def test_graphs_writes_readable_edge_lists(tmp_path, capsys):
    prefix = str(tmp_path / "pair")
    svg = tmp_path / "fig.svg"
    assert cli.run(["graphs", "--window", "0,10,0,10", "--alpha-lo", "0.4",
                    "--alpha-hi", "0.6", "--horizon", "256", "--seed", "0",
                    "--out-prefix", prefix, "--svg", str(svg)]) == 0
    assert "instability edges" in capsys.readouterr().out
    lo = read_edges_tsv(f"{prefix}.geodesic-lo.tsv")
    hi = read_edges_tsv(f"{prefix}.geodesic-hi.tsv")
    inst = read_edges_tsv(f"{prefix}.instability.tsv")
    assert lo.direction.alpha == 0.4 and hi.direction.alpha == 0.6
    assert isinstance(inst, InstabilityGraph)
    assert inst.interval == (0.4, 0.6)
    assert svg.read_text().startswith("<svg ")


def test_graphs_degenerate_interval_uses_one_sided_pair(tmp_path):
    prefix = str(tmp_path / "thin")
    assert cli.run(["graphs", "--window", "0,6,0,6", "--alpha-lo", "0.5",
                    "--alpha-hi", "0.5", "--horizon", "128",
                    "--out-prefix", prefix]) == 0
    lo = read_edges_tsv(f"{prefix}.geodesic-lo.tsv")
    hi = read_edges_tsv(f"{prefix}.geodesic-hi.tsv")
    assert lo.sign.name == "MINUS" and hi.sign.name == "PLUS"


def test_scan_jumps_json_is_sorted(tmp_path, capsys):
    assert cli.run(["scan-jumps", "--edge", "0,0:1,0", "--alpha", "0.3:0.7",
                    "--horizon", "512", "--seed", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["edge"] == [[0, 0], [1, 0]]
    alphas = [r["alpha"] for r in doc["records"]]
    assert alphas == sorted(alphas)
    for r in doc["records"]:
        assert r["gap"] > 0
        assert r["bracket"][0] <= r["alpha"] <= r["bracket"][1]
    out = tmp_path / "scan.json"
    assert cli.run(["scan-jumps", "--edge", "0,0:1,0", "--alpha", "0.3:0.7",
                    "--horizon", "512", "--seed", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text()) == doc


def test_stats_single_check(tmp_path, capsys):
    assert cli.run(["stats", "--test", "jump-probability",
                    "--n-samples", "2000"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["test_name"] == "jump-probability"
    assert doc["n_samples"] == 2000
    assert doc["verdict"] in ("PASS", "FAIL")
    assert cli.run(["stats", "--test", "no-such-check"]) == 2


def test_verify_subset_is_deterministic(tmp_path, capsys):
    args = ["verify", "--suite", "instability-edge-growth",
            "--out", str(tmp_path / "s1.json")]
    assert cli.run(args) == 0
    first = capsys.readouterr()
    args[-1] = str(tmp_path / "s2.json")
    assert cli.run(args) == 0
    second = capsys.readouterr()
    assert first.out == second.out
    assert "PASS instability-edge-growth" in first.out
    assert "1/1 passed" in first.out
    assert "runtime" in first.err  # timings stay off stdout
    assert (tmp_path / "s1.json").read_text() == (tmp_path / "s2.json").read_text()
    doc = json.loads((tmp_path / "s1.json").read_text())
    assert doc["suite_version"] == "1.0"
    assert [r["test_name"] for r in doc["reports"]] == ["instability-edge-growth"]


def test_verify_exits_1_on_any_failure(monkeypatch, capsys):
    canned = AcceptanceRun(
        master_seed=0,
        reports=(
            make_report("alpha-check", 0.0, 1.0, 10, (0,)),
            make_report("beta-check", 2.0, 1.0, 10, (1,)),
        ),
        runtimes={"alpha-check": 0.1, "beta-check": 0.2},
    )
    monkeypatch.setattr(cli, "acceptance_suite", lambda **kw: canned)
    assert cli.run(["verify"]) == 1
    out = capsys.readouterr().out
    assert "FAIL beta-check" in out
    assert "1/2 passed" in out


def test_verify_unknown_name_is_a_usage_error(capsys):
    assert cli.run(["verify", "--suite", "no-such-check"]) == 2
    assert "unknown test name" in capsys.readouterr().err


def test_config_supplies_required_settings(tmp_path):
    out = tmp_path / "field.lppw"
    cfg = tmp_path / "sim.cfg"
    cfg.write_text(
        "# reusable setup\nwindow=0,5,0,5\nseed=11\n" f"out={out}\n"
    )
    assert cli.run(["simulate", "--config", str(cfg)]) == 0
    assert load_field(out).seed == 11


def test_flags_override_config(tmp_path):
    out = tmp_path / "field.lppw"
    cfg = tmp_path / "sim.cfg"
    cfg.write_text(f"window=0,5,0,5\nseed=11\nout={out}\n")
    assert cli.run(["simulate", "--config", str(cfg), "--seed", "99"]) == 0
    assert load_field(out).seed == 99


def test_config_rejects_junk(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("window 0,5,0,5\n")
    assert cli.run(["simulate", "--config", str(bad)]) == 2
    assert "expected key=value" in capsys.readouterr().err
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("frobnicate=1\n")
    assert cli.run(["simulate", "--config", str(unknown)]) == 2
    assert "unknown config key" in capsys.readouterr().err
    assert cli.run(["simulate", "--config", str(tmp_path / "absent.cfg")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_threads_flag_sets_the_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("LPPGEO_THREADS", raising=False)
    out = tmp_path / "f.lppw"
    assert cli.run(["simulate", "--window", "0,4,0,4", "--out", str(out),
                    "--threads", "3"]) == 0
    assert os.environ["LPPGEO_THREADS"] == "3"
    assert cli.run(["simulate", "--window", "0,4,0,4", "--out", str(out),
                    "--threads", "0"]) == 2
    assert "--threads must be >= 1" in capsys.readouterr().err
