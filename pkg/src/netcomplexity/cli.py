"""Command-line front end: every experiment behind one seeded entry point.

Each subcommand writes a single CSV-style file that opens with a provenance
header (tool version, command, resolved parameter block, seed) and closes
with a structured summary block in comment lines.  Re-running a command with
the same flags reproduces the file byte for byte; the worker count is a pure
throughput knob and is deliberately left out of the header.

Exit codes: 0 success, 1 unreadable/unparsable input, 2 violated
precondition or invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import __version__
from .abm import LIGHT_POLICIES, MACS, ScenarioConfig, run_scenario
from .complexity import functional_complexity
from .entropy import NeighborhoodTemplate, estimate_excess_entropy
from .graph import InputFormatError, SamplingPolicy, read_edge_list, sample_stream
from .harness import ENSEMBLE_KINDS, METRIC_FIELDS, EnsembleSpec, correlation_report
from .lattice import (
    ChannelLattice,
    centralized_allocate,
    conflict_count,
    read_lattice,
    son_allocate,
    stability_experiment,
    write_lattice,
)

SAMPLING_MODES = ("exhaustive", "uniform-sample")
NEIGHBORHOODS = ("moore", "von-neumann")
BOUNDARIES = ("toroidal", "bounded")
ALLOCATORS = ("son", "centralized")
GENERATORS = ("son", "iid")


# ---------------------------------------------------------------------------
# shared plumbing


def _fmt(value) -> str:
    """One CSV cell; repr keeps floats round-trippable."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _provenance(command: str, params: dict, seed_repr: str) -> list[str]:
    blob = json.dumps(params, sort_keys=True)
    return [
        f"# tool: netcomplexity {__version__}",
        f"# command: {command}",
        f"# config: {blob}",
        f"# seed: {seed_repr}",
    ]


@contextmanager
def _output(path: str | None):
    # newline="" hands line endings to the csv writer, so files are
    # byte-identical across platforms
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit(fh, header_lines, columns, rows, summary_lines=()) -> None:
    for line in header_lines:
        fh.write(line + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    for line in summary_lines:
        fh.write(line + "\n")


@contextmanager
def _mapper(workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield pool.map
    else:
        yield map


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise InputFormatError(f"{path}: config root must be a JSON object")
    return data


def _check_keys(config: dict, allowed) -> None:
    unknown = sorted(set(config) - set(allowed))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")


def _resolve(flag_value, config: dict, key: str, default):
    """Precedence: explicit flag, then config file, then default."""
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) != 2:
            raise ValueError
        width, height = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"dims must look like WxH, got {text!r}") from None
    return width, height


def _parse_seeds(text: str) -> list[int]:
    """'1..30' inclusive range, '3,7,9' list, '5' single seed."""
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
        if hi < lo:
            raise ValueError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    seeds = [int(tok) for tok in text.split(",") if tok.strip()]
    if not seeds:
        raise ValueError(f"no seeds in {text!r}")
    return seeds


def _policy(mode: str, samples: int, limit: int, seed: int) -> SamplingPolicy:
    return SamplingPolicy(
        mode=mode, sample_count=samples, exhaustive_limit=limit, seed=seed
    )


# ---------------------------------------------------------------------------
# cfc


def cmd_cfc(args) -> int:
    config = _load_config(args.config)
    _check_keys(config, ("graph", "mode", "samples", "limit", "seed"))
    graph_path = _resolve(args.graph, config, "graph", None)
    if graph_path is None:
        raise ValueError("no graph file given (use --graph or a config file)")
    mode = _resolve(args.mode, config, "mode", "exhaustive")
    samples = int(_resolve(args.samples, config, "samples", 10_000))
    limit = int(_resolve(args.limit, config, "limit", 100_000))
    seed = int(_resolve(args.seed, config, "seed", 0))

    g = read_edge_list(graph_path)
    profile = functional_complexity(g, policy=_policy(mode, samples, limit, seed))
    if profile.degenerate:
        print(
            "warning: graph diameter is 1, so there are no usable scales; "
            "complexity is 0 by construction",
            file=sys.stderr,
        )

    params = {
        "graph": graph_path,
        "mode": mode,
        "samples": samples,
        "limit": limit,
        "seed": seed,
    }
    rows = [
        (
            c.scale,
            c.size,
            c.mean_information,
            c.baseline,
            c.deviation,
            c.stderr,
            c.subset_count,
            c.sampled,
        )
        for c in profile.cells
    ]
    summary = [
        "# summary:",
        f"# node_count: {profile.node_count}",
        f"# diameter: {profile.diameter}",
        f"# degenerate: {profile.degenerate}",
        f"# complexity: {profile.complexity!r}",
        f"# pooled_standard_error: {profile.pooled_standard_error!r}",
    ]
    with _output(args.out) as fh:
        _emit(
            fh,
            _provenance("cfc", params, str(seed)),
            (
                "scale",
                "size",
                "mean_information",
                "baseline",
                "deviation",
                "stderr",
                "subset_count",
                "sampled",
            ),
            rows,
            summary,
        )
    return 0


# ---------------------------------------------------------------------------
# son-stability


def cmd_son_stability(args) -> int:
    config = _load_config(args.config)
    keys = (
        "dims", "channels", "neighborhood", "boundary", "allocator",
        "instances", "budget", "max_sweeps", "cell_sample", "channel_sample",
        "seed",
    )
    _check_keys(config, keys)
    width, height = _parse_dims(_resolve(args.dims, config, "dims", "8x8"))
    channels = int(_resolve(args.channels, config, "channels", 5))
    neighborhood = _resolve(args.neighborhood, config, "neighborhood", "moore")
    boundary = _resolve(args.boundary, config, "boundary", "toroidal")
    allocator = _resolve(args.allocator, config, "allocator", "son")
    instances = int(_resolve(args.instances, config, "instances", 20))
    budget = int(_resolve(args.budget, config, "budget", 8))
    max_sweeps = int(_resolve(args.max_sweeps, config, "max_sweeps", 10_000))
    cell_sample = _resolve(args.cell_sample, config, "cell_sample", None)
    channel_sample = _resolve(args.channel_sample, config, "channel_sample", None)
    seed = int(_resolve(args.seed, config, "seed", 0))
    if instances < 0:
        raise ValueError("instances must be >= 0")
    if allocator not in ALLOCATORS:
        raise ValueError(f"unknown allocator {allocator!r}")

    params = {
        "dims": f"{width}x{height}",
        "channels": channels,
        "neighborhood": neighborhood,
        "boundary": boundary,
        "allocator": allocator,
        "instances": instances,
        "budget": budget,
        "max_sweeps": max_sweeps,
        "cell_sample": cell_sample,
        "channel_sample": channel_sample,
        "seed": seed,
    }
    columns = ("instance", "row", "col", "forced_channel", "distance", "exceeded")
    header = _provenance("son-stability", params, str(seed))

    if instances == 0:
        with _output(args.out) as fh:
            _emit(fh, header, columns, [])
        return 0

    with _mapper(args.workers) as mapper:
        study = stability_experiment(
            allocator, width, height, channels, neighborhood,
            instance_count=instances, seed=seed, budget=budget,
            max_sweeps=max_sweeps, boundary=boundary,
            cell_sample=None if cell_sample is None else int(cell_sample),
            channel_sample=None if channel_sample is None else int(channel_sample),
            mapper=mapper,
        )
    rows = [
        (
            r.instance,
            r.cell[0],
            r.cell[1],
            r.forced_channel,
            "" if r.distance is None else r.distance,
            r.distance is None,
        )
        for r in study.rows
    ]
    hist = " ".join(f"{d}:{n}" for d, n in study.histogram)
    summary = [
        "# summary:",
        f"# allocator: {study.allocator}",
        f"# perturbations: {len(study.rows)}",
        f"# histogram: {hist}",
        f"# exceeded_count: {study.exceeded_count}",
        f"# mean_distance: {study.mean_distance!r}",
        f"# stderr: {study.stderr!r}",
        f"# max_distance: {study.max_distance}",
        f"# budget: {study.budget}",
    ]
    with _output(args.out) as fh:
        _emit(fh, header, columns, rows, summary)
    return 0


# ---------------------------------------------------------------------------
# excess-entropy


def _generated_lattices(
    generator: str,
    width: int,
    height: int,
    channels: int,
    count: int,
    neighborhood: str,
    seed: int,
    max_sweeps: int,
) -> list[ChannelLattice]:
    samples: list[ChannelLattice] = []
    for i in range(count):
        inst_seed = sample_stream(seed, generator, i).getrandbits(48)
        if generator == "son":
            lat, report = son_allocate(
                width, height, channels, neighborhood,
                seed=inst_seed, max_sweeps=max_sweeps,
            )
            if not report.converged:
                raise ValueError(
                    f"generator instance {i} did not converge "
                    f"({report.conflicts} conflicts after {report.sweeps} sweeps)"
                )
        else:  # iid
            rng = np.random.default_rng(inst_seed)
            lat = ChannelLattice(
                width=width,
                height=height,
                channel_count=channels,
                cells=rng.integers(0, channels, size=(height, width), dtype=np.int64),
                neighborhood=neighborhood,
            )
        samples.append(lat)
    return samples


def cmd_excess_entropy(args) -> int:
    config = _load_config(args.config)
    keys = (
        "lattices", "generate", "dims", "channels", "count",
        "neighborhood", "max_sweeps", "mmax", "radius", "tolerance", "seed",
    )
    _check_keys(config, keys)
    paths = args.lattice if args.lattice else config.get("lattices", [])
    generator = _resolve(args.generate, config, "generate", None)
    mmax = int(_resolve(args.mmax, config, "mmax", 4))
    radius = int(_resolve(args.radius, config, "radius", 2))
    tolerance = float(_resolve(args.tolerance, config, "tolerance", 0.01))
    seed = int(_resolve(args.seed, config, "seed", 0))

    if paths and generator:
        raise ValueError("give lattice files or --generate, not both")
    if generator is not None and generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}")

    if generator:
        width, height = _parse_dims(_resolve(args.dims, config, "dims", "32x32"))
        channels = int(_resolve(args.channels, config, "channels", 4))
        count = int(_resolve(args.count, config, "count", 10))
        neighborhood = _resolve(args.neighborhood, config, "neighborhood", "moore")
        max_sweeps = int(_resolve(args.max_sweeps, config, "max_sweeps", 10_000))
        if count < 1:
            raise ValueError("count must be >= 1")
        samples = _generated_lattices(
            generator, width, height, channels, count,
            neighborhood, seed, max_sweeps,
        )
        source = {
            "generate": generator,
            "dims": f"{width}x{height}",
            "channels": channels,
            "count": count,
            "neighborhood": neighborhood,
            "max_sweeps": max_sweeps,
        }
    elif paths:
        samples = [read_lattice(p) for p in paths]
        source = {"lattices": list(paths)}
    else:
        raise ValueError("no lattice source: give files or --generate")

    template = NeighborhoodTemplate.chebyshev(radius)
    profile = estimate_excess_entropy(
        samples, max_context=mmax, template=template, tolerance=tolerance
    )
    pooled = sum(s.width * s.height for s in samples)

    params = dict(source)
    params.update({"mmax": mmax, "radius": radius, "tolerance": tolerance, "seed": seed})
    rows = [
        (m, h) for m, h in enumerate(profile.conditional_entropies, start=1)
    ]
    summary = [
        "# summary:",
        f"# entropy_rate: {profile.entropy_rate!r}",
        f"# excess_entropy: {profile.excess!r}",
        f"# converged: {profile.converged}",
        f"# sample_count: {profile.sample_count}",
        f"# pooled_cells: {pooled}",
    ]
    with _output(args.out) as fh:
        _emit(
            fh,
            _provenance("excess-entropy", params, str(seed)),
            ("context_depth", "conditional_entropy"),
            rows,
            summary,
        )
    return 0


# ---------------------------------------------------------------------------
# abm


def cmd_abm(args) -> int:
    config = _load_config(args.config)
    keys = (
        "iterations", "mac", "arrival_probability", "road_length",
        "green_period", "light_policy", "min_green", "persistence",
        "message_duration", "slots_per_iteration", "seeds", "seed",
    )
    _check_keys(config, keys)
    mac = _resolve(args.mac, config, "mac", "aloha")
    if args.ideal_channel:
        mac = "ideal"
    base = {
        "iterations": int(_resolve(args.iterations, config, "iterations", 2000)),
        "mac": mac,
        "arrival_probability": float(
            _resolve(args.arrival_probability, config, "arrival_probability", 0.5)
        ),
        "road_length": int(_resolve(args.road_length, config, "road_length", 20)),
        "green_period": int(_resolve(args.green_period, config, "green_period", 20)),
        "light_policy": _resolve(args.light_policy, config, "light_policy", "fixed"),
        "min_green": int(_resolve(args.min_green, config, "min_green", 5)),
        "persistence": float(_resolve(args.persistence, config, "persistence", 1.0)),
        "message_duration": int(
            _resolve(args.message_duration, config, "message_duration", 1)
        ),
        "slots_per_iteration": int(
            _resolve(args.slots_per_iteration, config, "slots_per_iteration", 1)
        ),
    }
    if args.seeds is not None:
        seeds = _parse_seeds(args.seeds)
    elif "seeds" in config:
        seeds = [int(s) for s in config["seeds"]]
    else:
        seeds = [int(_resolve(args.seed, config, "seed", 0))]
    if not seeds:
        raise ValueError("empty seed list")

    configs = [ScenarioConfig(**base, seed=s) for s in seeds]
    with _mapper(args.workers) as mapper:
        results = list(mapper(run_scenario, configs))

    params = dict(base)
    params["seeds"] = seeds
    rows = [
        (res.config.seed, rec.iteration, rec.actual, rec.perceived,
         rec.gap, rec.delivered, rec.collisions)
        for res in results
        for rec in res.trace
    ]
    summary = ["# summary:"]
    for res in results:
        summary.append(
            f"# seed {res.config.seed}: mean_gap={res.mean_gap!r} "
            f"delivery_ratio={res.delivery_ratio!r} "
            f"collision_rate={res.collision_rate!r} "
            f"created={res.created} departed={res.departed} "
            f"remaining={res.remaining} blocked_arrivals={res.blocked_arrivals} "
            f"reports={res.reports_generated}"
        )
    means = [res.mean_gap for res in results]
    grand = sum(means) / len(means)
    if len(means) > 1:
        var = sum((m - grand) ** 2 for m in means) / (len(means) - 1)
        spread = (var / len(means)) ** 0.5
    else:
        spread = 0.0
    summary.append(
        f"# aggregate: seeds={len(means)} mean_gap={grand!r} stderr={spread!r}"
    )
    with _output(args.out) as fh:
        _emit(
            fh,
            _provenance("abm", params, json.dumps(seeds)),
            ("seed", "iteration", "actual", "perceived", "gap",
             "delivered", "collisions"),
            rows,
            summary,
        )
    return 0


# ---------------------------------------------------------------------------
# correlate


def cmd_correlate(args) -> int:
    config = _load_config(args.config)
    keys = (
        "kind", "nodes", "graphs", "edge_probability", "ring_degree",
        "rewiring_probability", "attachment_count", "connected_only",
        "mode", "samples", "limit", "seed",
    )
    _check_keys(config, keys)
    kind = _resolve(args.kind, config, "kind", "erdos-renyi")
    nodes = int(_resolve(args.nodes, config, "nodes", 10))
    graphs = int(_resolve(args.graphs, config, "graphs", 200))
    edge_probability = _resolve(args.edge_probability, config, "edge_probability", None)
    if kind == "erdos-renyi" and edge_probability is None:
        edge_probability = 0.35
    ring_degree = _resolve(args.ring_degree, config, "ring_degree", None)
    rewiring = _resolve(args.rewiring_probability, config, "rewiring_probability", None)
    attachment = _resolve(args.attachment_count, config, "attachment_count", None)
    connected_only = bool(
        _resolve(
            False if args.no_connected_filter else None,
            config, "connected_only", True,
        )
    )
    mode = _resolve(args.mode, config, "mode", "exhaustive")
    samples = int(_resolve(args.samples, config, "samples", 10_000))
    limit = int(_resolve(args.limit, config, "limit", 100_000))
    seed = int(_resolve(args.seed, config, "seed", 11))

    spec = EnsembleSpec(
        kind=kind,
        node_count=nodes,
        graph_count=graphs,
        seed=seed,
        connected_only=connected_only,
        edge_probability=None if edge_probability is None else float(edge_probability),
        ring_degree=None if ring_degree is None else int(ring_degree),
        rewiring_probability=None if rewiring is None else float(rewiring),
        attachment_count=None if attachment is None else int(attachment),
    )
    with _mapper(args.workers) as mapper:
        report = correlation_report(
            spec, policy=_policy(mode, samples, limit, seed), mapper=mapper
        )

    params = {
        "kind": kind,
        "nodes": nodes,
        "graphs": graphs,
        "edge_probability": spec.edge_probability,
        "ring_degree": spec.ring_degree,
        "rewiring_probability": spec.rewiring_probability,
        "attachment_count": spec.attachment_count,
        "connected_only": connected_only,
        "mode": mode,
        "samples": samples,
        "limit": limit,
        "seed": seed,
    }
    rows = [
        (
            r.graph_id,
            r.complexity,
            r.average_path_length,
            r.average_degree,
            r.clustering_coefficient,
        )
        for r in report.rows
    ]
    labels = dict(METRIC_FIELDS)
    footer_rows = []
    notes = []
    for corr in report.correlations:
        label = labels[corr.metric]
        if corr.rho is None:
            footer_rows.append((label, "degenerate", "", "", ""))
            notes.append(f"# note: {label}: {corr.note}")
        else:
            footer_rows.append((label, corr.rho, "", "", ""))
    summary = notes + [f"# flag: {flag}" for flag in report.flags]
    with _output(args.out) as fh:
        _emit(
            fh,
            _provenance("correlate", params, str(seed)),
            (
                "graph_id",
                "complexity",
                "average_path_length",
                "average_degree",
                "clustering_coefficient",
            ),
            rows + footer_rows,
            summary,
        )
    return 0


# ---------------------------------------------------------------------------
# son-run


def cmd_son_run(args) -> int:
    config = _load_config(args.config)
    keys = (
        "dims", "channels", "neighborhood", "boundary", "allocator",
        "max_sweeps", "seed",
    )
    _check_keys(config, keys)
    width, height = _parse_dims(_resolve(args.dims, config, "dims", "10x10"))
    channels = int(_resolve(args.channels, config, "channels", 5))
    neighborhood = _resolve(args.neighborhood, config, "neighborhood", "moore")
    boundary = _resolve(args.boundary, config, "boundary", "toroidal")
    allocator = _resolve(args.allocator, config, "allocator", "son")
    max_sweeps = int(_resolve(args.max_sweeps, config, "max_sweeps", 10_000))
    seed = int(_resolve(args.seed, config, "seed", 0))
    if allocator not in ALLOCATORS:
        raise ValueError(f"unknown allocator {allocator!r}")

    if allocator == "son":
        lat, report = son_allocate(
            width, height, channels, neighborhood,
            seed=seed, max_sweeps=max_sweeps, boundary=boundary,
        )
        converged, sweeps, conflicts = report.converged, report.sweeps, report.conflicts
    else:
        lat = centralized_allocate(width, height, channels, neighborhood, boundary)
        converged, sweeps, conflicts = True, 0, conflict_count(lat)

    params = {
        "dims": f"{width}x{height}",
        "channels": channels,
        "neighborhood": neighborhood,
        "boundary": boundary,
        "allocator": allocator,
        "max_sweeps": max_sweeps,
        "seed": seed,
    }
    # write_lattice prefixes each header line with "# " itself
    header = [line[2:] for line in _provenance("son-run", params, str(seed))]
    header += [
        f"converged: {converged}",
        f"sweeps: {sweeps}",
        f"conflicts: {conflicts}",
    ]
    write_lattice(lat, args.out, header)
    if not converged:
        print(
            f"warning: allocation still has {conflicts} conflicts "
            f"after {sweeps} sweeps",
            file=sys.stderr,
        )
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sub, out_required: bool = False) -> None:
    sub.add_argument("--seed", type=int, default=None, help="base RNG seed")
    sub.add_argument(
        "--out", default=None, required=out_required,
        help="output file (default: stdout)",
    )
    sub.add_argument(
        "--workers", type=int, default=1,
        help="parallel workers; never affects the output bytes",
    )
    sub.add_argument("--config", default=None, help="JSON parameter file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcomplexity",
        description="complexity metrics, channel-allocation experiments, "
        "and the intersection traffic simulation",
    )
    parser.add_argument(
        "--version", action="version", version=f"netcomplexity {__version__}"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("cfc", help="functional complexity of one graph")
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--mode", choices=SAMPLING_MODES, default=None)
    p.add_argument("--samples", type=int, default=None,
                   help="subset draws per sampled size")
    p.add_argument("--limit", type=int, default=None,
                   help="max subsets per size before sampling kicks in")
    _add_common(p)
    p.set_defaults(func=cmd_cfc)

    p = subs.add_parser("son-stability", help="repair-distance experiment")
    p.add_argument("--dims", default=None, help="lattice size WxH")
    p.add_argument("--channels", type=int, default=None)
    p.add_argument("--neighborhood", choices=NEIGHBORHOODS, default=None)
    p.add_argument("--boundary", choices=BOUNDARIES, default=None)
    p.add_argument("--allocator", choices=ALLOCATORS, default=None)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--budget", type=int, default=None,
                   help="deepest repair distance searched")
    p.add_argument("--max-sweeps", type=int, default=None)
    p.add_argument("--cell-sample", type=int, default=None,
                   help="perturb only this many cells per instance")
    p.add_argument("--channel-sample", type=int, default=None,
                   help="force only this many channels per cell")
    _add_common(p)
    p.set_defaults(func=cmd_son_stability)

    p = subs.add_parser("excess-entropy", help="spatial structure of lattices")
    p.add_argument("lattice", nargs="*", help="lattice files")
    p.add_argument("--generate", choices=GENERATORS, default=None,
                   help="generate sample lattices instead of reading files")
    p.add_argument("--dims", default=None, help="generated lattice size WxH")
    p.add_argument("--channels", type=int, default=None)
    p.add_argument("--count", type=int, default=None,
                   help="number of generated lattices")
    p.add_argument("--neighborhood", choices=NEIGHBORHOODS, default=None)
    p.add_argument("--max-sweeps", type=int, default=None)
    p.add_argument("--mmax", type=int, default=None,
                   help="deepest context size")
    p.add_argument("--radius", type=int, default=None,
                   help="context template radius")
    p.add_argument("--tolerance", type=float, default=None,
                   help="convergence tolerance on the entropy-rate tail")
    _add_common(p)
    p.set_defaults(func=cmd_excess_entropy)

    p = subs.add_parser("abm", help="intersection traffic over a shared channel")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--mac", choices=MACS, default=None)
    p.add_argument("--ideal-channel", action="store_true",
                   help="shorthand for --mac ideal")
    p.add_argument("--arrival-probability", type=float, default=None)
    p.add_argument("--road-length", type=int, default=None)
    p.add_argument("--green-period", type=int, default=None)
    p.add_argument("--light-policy", choices=LIGHT_POLICIES, default=None)
    p.add_argument("--min-green", type=int, default=None)
    p.add_argument("--persistence", type=float, default=None,
                   help="per-slot transmission probability")
    p.add_argument("--message-duration", type=int, default=None,
                   help="slots one report occupies")
    p.add_argument("--slots-per-iteration", type=int, default=None)
    p.add_argument("--seeds", default=None,
                   help="seed list: '1..30', '3,7,9', or one integer")
    _add_common(p)
    p.set_defaults(func=cmd_abm)

    p = subs.add_parser("correlate", help="complexity vs classical metrics")
    p.add_argument("--kind", choices=ENSEMBLE_KINDS, default=None)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--graphs", type=int, default=None)
    p.add_argument("--edge-probability", type=float, default=None)
    p.add_argument("--ring-degree", type=int, default=None)
    p.add_argument("--rewiring-probability", type=float, default=None)
    p.add_argument("--attachment-count", type=int, default=None)
    p.add_argument("--no-connected-filter", action="store_true",
                   help="keep disconnected graphs in the ensemble")
    p.add_argument("--mode", choices=SAMPLING_MODES, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--limit", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_correlate)

    p = subs.add_parser("son-run", help="run one allocation, write the lattice")
    p.add_argument("--dims", default=None, help="lattice size WxH")
    p.add_argument("--channels", type=int, default=None)
    p.add_argument("--neighborhood", choices=NEIGHBORHOODS, default=None)
    p.add_argument("--boundary", choices=BOUNDARIES, default=None)
    p.add_argument("--allocator", choices=ALLOCATORS, default=None)
    p.add_argument("--max-sweeps", type=int, default=None)
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_son_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on usage errors and --help; remap usage to 1
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
