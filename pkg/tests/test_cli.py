"""CLI surface: exit codes, provenance headers, byte-identical reruns."""

import json
import subprocess
import sys

import pytest

from netcomplexity import (
    ScenarioConfig,
    build_topology,
    run_scenario,
    stability_experiment,
    write_edge_list,
)
from netcomplexity.cli import main

from test_complexity import P4_COMPLEXITY


def run_cli(*argv):
    return main([str(a) for a in argv])


def write_graph(path, n, edges):
    write_edge_list(build_topology(n, edges), str(path))
    return str(path)


def parse_output(path):
    """Split a CLI file into header comments, data rows, summary comments."""
    header, rows, summary = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        header.append(lines[i])
        i += 1
    while i < len(lines) and not lines[i].startswith("#"):
        rows.append(lines[i].split(","))
        i += 1
    summary = lines[i:]
    return header, rows, summary


def summary_value(summary, key):
    prefix = f"# {key}: "
    for line in summary:
        if line.startswith(prefix):
            return line[len(prefix):]
    raise AssertionError(f"{key!r} not in summary block {summary}")


# ---------------------------------------------------------------------------
# generic behavior


def test_help_exits_zero(capsys):
    assert run_cli("--help") == 0
    assert "cfc" in capsys.readouterr().out


def test_unknown_flag_is_parse_error(capsys):
    assert run_cli("cfc", "--bogus") == 1
    capsys.readouterr()


def test_missing_subcommand_is_parse_error(capsys):
    assert run_cli() == 1
    capsys.readouterr()


def test_every_output_starts_with_provenance(tmp_path):
    graph = write_graph(tmp_path / "p4.edges", 4, [(0, 1), (1, 2), (2, 3)])
    out = tmp_path / "out.csv"
    assert run_cli("cfc", "--graph", graph, "--out", out) == 0
    header, _, _ = parse_output(out)
    assert header[0] == "# tool: netcomplexity 0.1.0"
    assert header[1] == "# command: cfc"
    assert header[2].startswith("# config: {")
    assert header[3] == "# seed: 0"
    json.loads(header[2][len("# config: "):])  # header config is valid JSON


def test_malformed_config_file_is_parse_error(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json", encoding="utf-8")
    assert run_cli("cfc", "--config", cfg) == 1
    capsys.readouterr()


def test_unknown_config_key_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"graphs": 10}', encoding="utf-8")
    assert run_cli("cfc", "--config", cfg) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "netcomplexity", "--version"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "netcomplexity 0.1.0" in proc.stdout


# ---------------------------------------------------------------------------
# cfc


def test_cfc_path4_matches_frozen_constant(tmp_path):
    graph = write_graph(tmp_path / "p4.edges", 4, [(0, 1), (1, 2), (2, 3)])
    out = tmp_path / "out.csv"
    assert run_cli("cfc", "--graph", graph, "--out", out) == 0
    _, rows, summary = parse_output(out)
    assert float(summary_value(summary, "complexity")) == pytest.approx(
        P4_COMPLEXITY, abs=1e-12
    )
    # scales 1..diameter-1 with sizes r+1..4: (1,2),(1,3),(1,4),(2,3),(2,4)
    assert [(int(r[0]), int(r[1])) for r in rows[1:]] == [
        (1, 2), (1, 3), (1, 4), (2, 3), (2, 4),
    ]


def test_cfc_complete_graph_warns_and_scores_zero(tmp_path, capsys):
    edges = [(u, v) for u in range(5) for v in range(u + 1, 5)]
    graph = write_graph(tmp_path / "k5.edges", 5, edges)
    out = tmp_path / "out.csv"
    assert run_cli("cfc", "--graph", graph, "--out", out) == 0
    assert "no usable scales" in capsys.readouterr().err
    _, rows, summary = parse_output(out)
    assert len(rows) == 1  # column header only, no scale cells
    assert summary_value(summary, "complexity") == "0.0"
    assert summary_value(summary, "degenerate") == "True"


def test_cfc_disconnected_graph_exits_two(tmp_path, capsys):
    graph = write_graph(tmp_path / "d.edges", 4, [(0, 1), (2, 3)])
    assert run_cli("cfc", "--graph", graph, "--out", tmp_path / "o") == 2
    assert "disconnected" in capsys.readouterr().err


def test_cfc_missing_graph_flag_exits_two(capsys):
    assert run_cli("cfc") == 2
    capsys.readouterr()


def test_cfc_unreadable_file_exits_one(tmp_path, capsys):
    assert run_cli("cfc", "--graph", tmp_path / "absent.edges") == 1
    capsys.readouterr()


def test_cfc_malformed_file_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1\n", encoding="utf-8")
    assert run_cli("cfc", "--graph", bad) == 1
    capsys.readouterr()


def test_cfc_flag_overrides_config(tmp_path):
    p4 = write_graph(tmp_path / "p4.edges", 4, [(0, 1), (1, 2), (2, 3)])
    k3 = write_graph(tmp_path / "k3.edges", 3, [(0, 1), (1, 2), (0, 2)])
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"graph": k3}), encoding="utf-8")
    out = tmp_path / "out.csv"
    assert run_cli("cfc", "--config", cfg, "--graph", p4, "--out", out) == 0
    header, _, _ = parse_output(out)
    assert json.loads(header[2][len("# config: "):])["graph"] == p4


# ---------------------------------------------------------------------------
# son-stability


def test_stability_zero_instances_header_only(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli("son-stability", "--instances", 0, "--out", out) == 0
    header, rows, summary = parse_output(out)
    assert len(header) == 4
    assert rows == [
        ["instance", "row", "col", "forced_channel", "distance", "exceeded"]
    ]
    assert summary == []


def test_stability_centralized_matches_library(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli(
        "son-stability", "--allocator", "centralized", "--dims", "4x4",
        "--channels", 2, "--neighborhood", "von-neumann",
        "--instances", 1, "--budget", 8, "--out", out,
    ) == 0
    study = stability_experiment(
        "centralized", 4, 4, 2, "von-neumann",
        instance_count=1, seed=0, budget=8,
    )
    _, rows, summary = parse_output(out)
    data = rows[1:]
    assert len(data) == len(study.rows)
    for line, row in zip(data, study.rows):
        assert (int(line[0]), int(line[1]), int(line[2]), int(line[3])) == (
            row.instance, row.cell[0], row.cell[1], row.forced_channel,
        )
        if row.distance is None:
            assert line[4] == "" and line[5] == "True"
        else:
            assert int(line[4]) == row.distance and line[5] == "False"
    hist = " ".join(f"{d}:{n}" for d, n in study.histogram)
    assert summary_value(summary, "histogram") == hist
    assert int(summary_value(summary, "exceeded_count")) == study.exceeded_count


def test_stability_infeasible_channels_exits_two(capsys):
    assert run_cli(
        "son-stability", "--allocator", "centralized",
        "--dims", "4x4", "--channels", 2,
    ) == 2
    assert "channels" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# excess-entropy


def constant_lattice_file(path, width=6, height=6, channels=3, value=1):
    body = "\n".join(" ".join(str(value) for _ in range(width)) for _ in range(height))
    path.write_text(f"{width} {height} {channels}\n{body}\n", encoding="utf-8")
    return str(path)


def test_excess_entropy_constant_lattice_is_exactly_zero(tmp_path):
    lat = constant_lattice_file(tmp_path / "c.lat")
    out = tmp_path / "out.csv"
    assert run_cli("excess-entropy", lat, "--out", out) == 0
    _, rows, summary = parse_output(out)
    assert [r[1] for r in rows[1:]] == ["0.0", "0.0", "0.0", "0.0"]
    assert summary_value(summary, "excess_entropy") == "0.0"
    assert summary_value(summary, "entropy_rate") == "0.0"


def test_excess_entropy_mmax_zero_exits_two(tmp_path, capsys):
    lat = constant_lattice_file(tmp_path / "c.lat")
    assert run_cli("excess-entropy", lat, "--mmax", 0) == 2
    capsys.readouterr()


def test_excess_entropy_mixed_dims_exits_two(tmp_path, capsys):
    a = constant_lattice_file(tmp_path / "a.lat", width=6)
    b = constant_lattice_file(tmp_path / "b.lat", width=4)
    assert run_cli("excess-entropy", a, b) == 2
    assert "dimensions" in capsys.readouterr().err


def test_excess_entropy_requires_exactly_one_source(tmp_path, capsys):
    lat = constant_lattice_file(tmp_path / "c.lat")
    assert run_cli("excess-entropy") == 2
    assert run_cli("excess-entropy", lat, "--generate", "iid") == 2
    capsys.readouterr()


def test_excess_entropy_iid_generator_near_full_rate(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli(
        "excess-entropy", "--generate", "iid", "--dims", "128x128",
        "--channels", "2", "--count", 8, "--mmax", 3, "--seed", 5,
        "--out", out,
    ) == 0
    _, _, summary = parse_output(out)
    assert float(summary_value(summary, "entropy_rate")) == pytest.approx(1.0, abs=0.01)
    assert int(summary_value(summary, "pooled_cells")) == 128 * 128 * 8


def test_son_run_output_feeds_excess_entropy(tmp_path):
    lat_path = tmp_path / "son.lat"
    assert run_cli(
        "son-run", "--dims", "10x10", "--channels", 5,
        "--seed", 7, "--out", lat_path,
    ) == 0
    text = lat_path.read_text(encoding="utf-8")
    assert "# converged: True" in text
    assert "# conflicts: 0" in text
    assert "10 10 5" in text.splitlines()
    out = tmp_path / "out.csv"
    assert run_cli("excess-entropy", lat_path, "--mmax", 3, "--out", out) == 0
    _, _, summary = parse_output(out)
    # an interference-free allocation carries real spatial structure
    assert float(summary_value(summary, "excess_entropy")) > 0.5


def test_son_run_requires_out(capsys):
    assert run_cli("son-run", "--dims", "4x4", "--channels", 5) == 1
    capsys.readouterr()


# ---------------------------------------------------------------------------
# abm


def test_abm_zero_iterations_header_only(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli("abm", "--iterations", 0, "--out", out) == 0
    _, rows, summary = parse_output(out)
    assert rows == [
        ["seed", "iteration", "actual", "perceived", "gap",
         "delivered", "collisions"]
    ]
    assert "# summary:" in summary


def test_abm_ideal_channel_gap_all_zero(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli(
        "abm", "--ideal-channel", "--iterations", 120,
        "--seeds", "1,2", "--out", out,
    ) == 0
    _, rows, _ = parse_output(out)
    data = rows[1:]
    assert len(data) == 240
    assert all(line[4] == "0" for line in data)


def test_abm_seed_range_parses_inclusive(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli(
        "abm", "--iterations", 10, "--seeds", "3..6", "--out", out,
    ) == 0
    _, rows, summary = parse_output(out)
    assert sorted({line[0] for line in rows[1:]}) == ["3", "4", "5", "6"]
    assert any(line.startswith("# aggregate: seeds=4 ") for line in summary)


def test_abm_trace_matches_library(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli(
        "abm", "--iterations", 40, "--mac", "csma", "--persistence", 0.3,
        "--seed", 9, "--out", out,
    ) == 0
    res = run_scenario(ScenarioConfig(iterations=40, mac="csma",
                                      persistence=0.3, seed=9))
    _, rows, summary = parse_output(out)
    data = rows[1:]
    assert len(data) == 40
    for line, rec in zip(data, res.trace):
        assert [int(x) for x in line] == [
            9, rec.iteration, rec.actual, rec.perceived,
            rec.gap, rec.delivered, rec.collisions,
        ]
    seed_line = next(line for line in summary if line.startswith("# seed 9: "))
    mean_token = dict(tok.split("=") for tok in seed_line.split()[3:])["mean_gap"]
    assert float(mean_token) == pytest.approx(res.mean_gap)


def test_abm_invalid_config_value_exits_two(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mac": "token-ring"}), encoding="utf-8")
    assert run_cli("abm", "--config", cfg) == 2
    assert "mac" in capsys.readouterr().err


def test_abm_config_file_supplies_seeds_and_params(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({
            "iterations": 15, "mac": "ideal", "arrival_probability": 0.0,
            "seeds": [4, 8],
        }),
        encoding="utf-8",
    )
    out = tmp_path / "out.csv"
    assert run_cli("abm", "--config", cfg, "--out", out) == 0
    _, rows, summary = parse_output(out)
    assert sorted({line[0] for line in rows[1:]}) == ["4", "8"]
    # no arrivals: every seed reports zero cars created
    assert all(" created=0 " in line for line in summary if line.startswith("# seed"))


# ---------------------------------------------------------------------------
# correlate


def test_correlate_emits_three_rho_footer_rows(tmp_path):
    out = tmp_path / "out.csv"
    assert run_cli("correlate", "--graphs", 8, "--out", out) == 0
    _, rows, _ = parse_output(out)
    footer = rows[-3:]
    assert [line[0] for line in footer] == ["rho_apl", "rho_degree", "rho_clustering"]
    for line in footer:
        assert -1.0 <= float(line[1]) <= 1.0
    assert len(rows) == 1 + 8 + 3


def test_correlate_single_graph_exits_two(capsys):
    assert run_cli("correlate", "--graphs", 1) == 2
    capsys.readouterr()


def test_correlate_degenerate_metric_marked(tmp_path):
    # complete graphs: zero variance everywhere, no coefficient defined
    out = tmp_path / "out.csv"
    assert run_cli(
        "correlate", "--nodes", 5, "--graphs", 3,
        "--edge-probability", "1.0", "--out", out,
    ) == 0
    _, rows, summary = parse_output(out)
    assert all(line[1] == "degenerate" for line in rows[-3:])
    assert any(line.startswith("# note: rho_apl") for line in summary)


# ---------------------------------------------------------------------------
# determinism


def test_rerun_is_byte_identical(tmp_path):
    graph = write_graph(tmp_path / "p4.edges", 4, [(0, 1), (1, 2), (2, 3)])
    pairs = []
    for tag in ("a", "b"):
        cfc = tmp_path / f"cfc_{tag}.csv"
        run_cli("cfc", "--graph", graph, "--out", cfc)
        ee = tmp_path / f"ee_{tag}.csv"
        run_cli("excess-entropy", "--generate", "iid", "--dims", "16x16",
                "--channels", 3, "--count", 2, "--seed", 3, "--out", ee)
        son = tmp_path / f"son_{tag}.lat"
        run_cli("son-run", "--dims", "8x8", "--channels", 5, "--seed", 2,
                "--out", son)
        pairs.append((cfc.read_bytes(), ee.read_bytes(), son.read_bytes()))
    assert pairs[0] == pairs[1]


def test_worker_count_does_not_change_bytes(tmp_path):
    outputs = []
    for workers in (1, 3):
        corr = tmp_path / f"corr_{workers}.csv"
        assert run_cli("correlate", "--graphs", 10, "--nodes", 8,
                       "--workers", workers, "--out", corr) == 0
        stab = tmp_path / f"stab_{workers}.csv"
        assert run_cli("son-stability", "--dims", "5x5", "--channels", 5,
                       "--instances", 3, "--budget", 2,
                       "--workers", workers, "--out", stab) == 0
        abm = tmp_path / f"abm_{workers}.csv"
        assert run_cli("abm", "--iterations", 60, "--seeds", "1..4",
                       "--workers", workers, "--out", abm) == 0
        outputs.append(
            (corr.read_bytes(), stab.read_bytes(), abm.read_bytes())
        )
    assert outputs[0] == outputs[1]
