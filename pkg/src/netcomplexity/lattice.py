"""Channel allocation on 2-D cell lattices.

A lattice assigns one channel per cell; two neighboring cells (von Neumann
or Moore neighborhood, bounded or toroidal wrap) sharing a channel is an
interference conflict.  The module provides a deterministic periodic
planner, a decentralized trial-and-error allocator, and an exact
minimum-repair search that measures how many other cells must change after
one cell is forced to a given channel.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .graph import InputFormatError, sample_stream

NEIGHBORHOODS = {
    "von-neumann": ((-1, 0), (1, 0), (0, -1), (0, 1)),
    "moore": ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}
# offsets covering each unordered neighbor pair exactly once
_HALF_OFFSETS = {
    "von-neumann": ((0, 1), (1, 0)),
    "moore": ((0, 1), (1, 0), (1, 1), (1, -1)),
}
BOUNDARIES = ("toroidal", "bounded")


@dataclass(frozen=True)
class ChannelLattice:
    """A width x height grid of channel ids in 0..channel_count-1."""

    width: int
    height: int
    channel_count: int
    cells: np.ndarray
    neighborhood: str = "moore"
    boundary: str = "toroidal"

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"bad dimensions {self.width}x{self.height}")
        if self.channel_count < 1:
            raise ValueError("channel_count must be >= 1")
        if self.neighborhood not in NEIGHBORHOODS:
            raise ValueError(f"unknown neighborhood {self.neighborhood!r}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {self.boundary!r}")
        arr = np.asarray(self.cells, dtype=np.int64)
        if arr.shape != (self.height, self.width):
            raise ValueError(
                f"cells shape {arr.shape} does not match "
                f"height x width = ({self.height}, {self.width})"
            )
        if arr.size and (arr.min() < 0 or arr.max() >= self.channel_count):
            raise ValueError(
                f"cell values must lie in 0..{self.channel_count - 1}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "cells", arr)


def neighbor_index_table(
    width: int, height: int, neighborhood: str, boundary: str
) -> list[list[int]]:
    """Flat-index neighbor lists (row-major), duplicates removed."""
    offs = NEIGHBORHOODS[neighborhood]
    table: list[list[int]] = []
    for r in range(height):
        for c in range(width):
            seen: list[int] = []
            for dr, dc in offs:
                rr, cc = r + dr, c + dc
                if boundary == "toroidal":
                    rr %= height
                    cc %= width
                elif not (0 <= rr < height and 0 <= cc < width):
                    continue
                idx = rr * width + cc
                if idx != r * width + c and idx not in seen:
                    seen.append(idx)
            table.append(seen)
    return table


def neighbor_pairs(
    width: int, height: int, neighborhood: str, boundary: str
) -> list[tuple[int, int]]:
    """Unordered neighbor pairs as sorted flat-index tuples, each once."""
    pairs: set[tuple[int, int]] = set()
    for i, nbrs in enumerate(
        neighbor_index_table(width, height, neighborhood, boundary)
    ):
        for j in nbrs:
            pairs.add((i, j) if i < j else (j, i))
    return sorted(pairs)


def conflict_count(lat: ChannelLattice) -> int:
    """Number of unordered neighbor pairs sharing a channel."""
    a = lat.cells
    # the roll trick double-counts wrapped pairs when a dimension is < 3
    if lat.boundary == "toroidal" and min(lat.width, lat.height) >= 3:
        total = 0
        for dr, dc in _HALF_OFFSETS[lat.neighborhood]:
            total += int(np.count_nonzero(a == np.roll(a, (-dr, -dc), axis=(0, 1))))
        return total
    pairs = neighbor_pairs(lat.width, lat.height, lat.neighborhood, lat.boundary)
    flat = a.ravel()
    return sum(1 for i, j in pairs if flat[i] == flat[j])


# ---------------------------------------------------------------------------
# allocators


def centralized_allocate(
    width: int,
    height: int,
    channel_count: int,
    neighborhood: str = "moore",
    boundary: str = "toroidal",
) -> ChannelLattice:
    """Interference-free periodic reuse pattern.

    von Neumann: 2-channel checkerboard.  Moore: 4-channel 2x2 tile.  On a
    toroidal lattice the pattern only closes when both dimensions are even.
    """
    if neighborhood not in NEIGHBORHOODS:
        raise ValueError(f"unknown neighborhood {neighborhood!r}")
    need = 2 if neighborhood == "von-neumann" else 4
    if channel_count < need:
        raise ValueError(
            f"{neighborhood} reuse pattern needs at least {need} channels, "
            f"got {channel_count}"
        )
    if boundary == "toroidal" and (width % 2 or height % 2):
        raise ValueError(
            f"periodic pattern does not close on a {width}x{height} torus; "
            "both dimensions must be even"
        )
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]
    if neighborhood == "von-neumann":
        cells = (rows + cols) % 2
    else:
        cells = 2 * (rows % 2) + (cols % 2)
    return ChannelLattice(
        width=width,
        height=height,
        channel_count=channel_count,
        cells=cells,
        neighborhood=neighborhood,
        boundary=boundary,
    )


@dataclass(frozen=True)
class SonReport:
    """Outcome of a decentralized allocation run."""

    converged: bool
    sweeps: int
    conflicts: int


def son_allocate(
    width: int,
    height: int,
    channel_count: int,
    neighborhood: str = "moore",
    seed: int = 0,
    max_sweeps: int = 10_000,
    boundary: str = "toroidal",
) -> tuple[ChannelLattice, SonReport]:
    """Decentralized trial-and-error allocation.

    Start from a uniform random assignment; sweep cells in a fresh random
    order each round, and every cell in conflict with a neighbor resamples
    uniformly among the channels least used by its neighbors.  When any
    channel is entirely unused nearby that set is exactly the unused ones,
    so the move is a uniform pick over locally-free channels; otherwise it
    degrades to the least-bad choice instead of a blind restart, which is
    what lets dense neighborhoods settle.  Non-convergence within
    max_sweeps is reported, not raised.
    """
    if max_sweeps < 0:
        raise ValueError("max_sweeps must be >= 0")
    rng = random.Random(seed)
    cell_total = width * height
    grid = [rng.randrange(channel_count) for _ in range(cell_total)]
    nbrs = neighbor_index_table(width, height, neighborhood, boundary)

    def grid_conflicts() -> int:
        total = 0
        for i, own in enumerate(grid):
            for j in nbrs[i]:
                if j > i and grid[j] == own:
                    total += 1
        return total

    order = list(range(cell_total))
    sweeps = 0
    conflicts = grid_conflicts()
    while conflicts and sweeps < max_sweeps:
        rng.shuffle(order)
        for i in order:
            counts = [0] * channel_count
            for j in nbrs[i]:
                counts[grid[j]] += 1
            if counts[grid[i]] == 0:
                continue
            least = min(counts)
            grid[i] = rng.choice([f for f in range(channel_count) if counts[f] == least])
        sweeps += 1
        conflicts = grid_conflicts()
    lat = ChannelLattice(
        width=width,
        height=height,
        channel_count=channel_count,
        cells=np.array(grid, dtype=np.int64).reshape(height, width),
        neighborhood=neighborhood,
        boundary=boundary,
    )
    return lat, SonReport(converged=(conflicts == 0), sweeps=sweeps, conflicts=conflicts)


# ---------------------------------------------------------------------------
# exact repair search


@dataclass(frozen=True)
class StabilityRecord:
    """Minimum-repair outcome for one forced (cell, channel) perturbation.

    distance is the number of other cells that must change (None when the
    search budget was exceeded); changed_cells lists ((row, col), channel)
    assignments realizing that minimum.
    """

    cell: tuple[int, int]
    forced_channel: int
    distance: int | None
    changed_cells: tuple[tuple[tuple[int, int], int], ...]
    budget: int

    @property
    def exceeded(self) -> bool:
        return self.distance is None


def apply_repair(lat: ChannelLattice, record: StabilityRecord) -> ChannelLattice:
    """Lattice with the forced perturbation and the witness changes applied."""
    if record.exceeded:
        raise ValueError("cannot apply a budget-exceeded record")
    cells = lat.cells.copy()
    cells[record.cell] = record.forced_channel
    for (r, c), ch in record.changed_cells:
        cells[r, c] = ch
    return ChannelLattice(
        width=lat.width,
        height=lat.height,
        channel_count=lat.channel_count,
        cells=cells,
        neighborhood=lat.neighborhood,
        boundary=lat.boundary,
    )


def repair_distance(
    lat: ChannelLattice,
    cell: tuple[int, int],
    forced_channel: int,
    budget: int = 8,
) -> StabilityRecord:
    """Exact minimum number of other cells to recolor after clamping one cell.

    Preconditions: lat is conflict-free and forced_channel is a valid channel.
    Iterative deepening over the repair size; within each depth, DFS branches
    on the endpoints of a deterministic pivot conflict (every conflicting
    pair must have an endpoint changed, and the clamped cell never changes),
    so the first depth that admits a repair is the exact minimum.
    """
    r0, c0 = cell
    if not (0 <= r0 < lat.height and 0 <= c0 < lat.width):
        raise ValueError(f"cell {cell} outside the {lat.width}x{lat.height} lattice")
    if not (0 <= forced_channel < lat.channel_count):
        raise ValueError(
            f"forced channel {forced_channel} outside 0..{lat.channel_count - 1}"
        )
    if budget < 0:
        raise ValueError("budget must be >= 0")
    if conflict_count(lat):
        raise ValueError("repair_distance requires an interference-free lattice")

    width, height, f_count = lat.width, lat.height, lat.channel_count
    nbrs = neighbor_index_table(width, height, lat.neighborhood, lat.boundary)
    grid = [int(v) for v in lat.cells.ravel()]
    clamped = r0 * width + c0
    grid[clamped] = forced_channel

    conflicts: set[tuple[int, int]] = set()
    for j in nbrs[clamped]:
        if grid[j] == forced_channel:
            conflicts.add((min(clamped, j), max(clamped, j)))

    changed: dict[int, int] = {}

    def recolor(i: int, value: int) -> list[tuple[int, int, bool]]:
        """Assign grid[i] = value, updating the conflict set; returns undo log."""
        log: list[tuple[int, int, bool]] = []
        for j in nbrs[i]:
            pair = (min(i, j), max(i, j))
            was = pair in conflicts
            now = grid[j] == value
            if was and not now:
                conflicts.discard(pair)
                log.append((pair[0], pair[1], True))
            elif now and not was:
                conflicts.add(pair)
                log.append((pair[0], pair[1], False))
        grid[i] = value
        return log

    def undo(i: int, old_value: int, log) -> None:
        grid[i] = old_value
        for a, b, was in log:
            if was:
                conflicts.add((a, b))
            else:
                conflicts.discard((a, b))

    def lower_bound() -> int:
        """Forced endpoints of clamped conflicts, plus disjoint free pairs."""
        forced = set()
        rest = []
        for a, b in conflicts:
            if a == clamped or b == clamped:
                forced.add(b if a == clamped else a)
            else:
                rest.append((a, b))
        used = set(forced)
        bound = len(forced)
        for a, b in sorted(rest):
            if a not in used and b not in used:
                bound += 1
                used.add(a)
                used.add(b)
        return bound

    def dfs(depth_left: int) -> bool:
        if not conflicts:
            return True
        if depth_left == 0 or lower_bound() > depth_left:
            return False
        # prefer a conflict touching the clamped cell: its repair endpoint is forced
        pivot = None
        for pair in sorted(conflicts):
            if clamped in pair:
                pivot = pair
                break
        if pivot is None:
            pivot = min(conflicts)
        for endpoint in pivot:
            if endpoint == clamped or endpoint in changed:
                continue
            old = grid[endpoint]
            for value in range(f_count):
                if value == old:
                    continue
                log = recolor(endpoint, value)
                changed[endpoint] = value
                if dfs(depth_left - 1):
                    return True
                del changed[endpoint]
                undo(endpoint, old, log)
        return False

    for depth in range(budget + 1):
        if dfs(depth):
            witness = tuple(
                (divmod(i, width), v) for i, v in sorted(changed.items())
            )
            return StabilityRecord(
                cell=cell,
                forced_channel=forced_channel,
                distance=len(changed),
                changed_cells=witness,
                budget=budget,
            )
    return StabilityRecord(
        cell=cell,
        forced_channel=forced_channel,
        distance=None,
        changed_cells=(),
        budget=budget,
    )


# ---------------------------------------------------------------------------
# stability experiment


@dataclass(frozen=True)
class StabilityRow:
    instance: int
    cell: tuple[int, int]
    forced_channel: int
    distance: int | None


@dataclass(frozen=True)
class StabilityStudy:
    """Repair-distance distribution for one allocator."""

    allocator: str
    rows: tuple[StabilityRow, ...]
    histogram: tuple[tuple[int, int], ...]
    exceeded_count: int
    mean_distance: float
    stderr: float
    max_distance: int | None
    budget: int


def _summarize(allocator: str, rows: list[StabilityRow], budget: int) -> StabilityStudy:
    finite = [r.distance for r in rows if r.distance is not None]
    hist: dict[int, int] = {}
    for d in finite:
        hist[d] = hist.get(d, 0) + 1
    mean = sum(finite) / len(finite) if finite else float("nan")
    if len(finite) > 1:
        var = sum((d - mean) ** 2 for d in finite) / (len(finite) - 1)
        stderr = math.sqrt(var / len(finite))
    else:
        stderr = 0.0
    return StabilityStudy(
        allocator=allocator,
        rows=tuple(rows),
        histogram=tuple(sorted(hist.items())),
        exceeded_count=sum(1 for r in rows if r.distance is None),
        mean_distance=mean,
        stderr=stderr,
        max_distance=max(finite) if finite else None,
        budget=budget,
    )


def _instance_lattice(
    allocator: str,
    width: int,
    height: int,
    channel_count: int,
    neighborhood: str,
    seed: int,
    instance: int,
    max_sweeps: int,
    boundary: str,
) -> ChannelLattice:
    if allocator == "centralized":
        return centralized_allocate(width, height, channel_count, neighborhood, boundary)
    if allocator == "son":
        inst_seed = sample_stream(seed, "instance", instance).getrandbits(48)
        lat, report = son_allocate(
            width, height, channel_count, neighborhood,
            seed=inst_seed, max_sweeps=max_sweeps, boundary=boundary,
        )
        if not report.converged:
            raise ValueError(
                f"son allocation did not converge for instance {instance} "
                f"({report.conflicts} conflicts after {report.sweeps} sweeps)"
            )
        return lat
    raise ValueError(f"unknown allocator {allocator!r}")


def stability_instance_rows(
    allocator: str,
    width: int,
    height: int,
    channel_count: int,
    neighborhood: str,
    seed: int,
    instance: int,
    budget: int,
    max_sweeps: int,
    boundary: str,
    cell_sample: int | None = None,
    channel_sample: int | None = None,
) -> list[StabilityRow]:
    """All (cell, forced channel) repair distances for one instance.

    cell_sample / channel_sample restrict the scan to a seeded uniform
    subset, for lattices too large to perturb exhaustively.
    """
    lat = _instance_lattice(
        allocator, width, height, channel_count, neighborhood,
        seed, instance, max_sweeps, boundary,
    )
    cells = [(r, c) for r in range(height) for c in range(width)]
    channels = list(range(channel_count))
    if cell_sample is not None and cell_sample < len(cells):
        rng = sample_stream(seed, "cells", instance)
        cells = sorted(rng.sample(cells, cell_sample))
    if channel_sample is not None and channel_sample < len(channels):
        rng = sample_stream(seed, "channels", instance)
        channels = sorted(rng.sample(channels, channel_sample))
    rows = []
    for cell in cells:
        for ch in channels:
            rec = repair_distance(lat, cell, ch, budget)
            rows.append(
                StabilityRow(
                    instance=instance,
                    cell=cell,
                    forced_channel=ch,
                    distance=rec.distance,
                )
            )
    return rows


def stability_experiment(
    allocator: str,
    width: int,
    height: int,
    channel_count: int,
    neighborhood: str = "moore",
    instance_count: int = 20,
    seed: int = 0,
    budget: int = 8,
    max_sweeps: int = 10_000,
    boundary: str = "toroidal",
    cell_sample: int | None = None,
    channel_sample: int | None = None,
    mapper: Callable[..., Iterable] = map,
) -> StabilityStudy:
    """Perturb every instance at every scanned (cell, channel) pair.

    mapper allows a parallel map; per-instance work is independent and
    results are assembled in instance order either way.
    """
    if instance_count < 1:
        raise ValueError("instance_count must be >= 1")
    args = [
        (
            allocator, width, height, channel_count, neighborhood,
            seed, i, budget, max_sweeps, boundary, cell_sample, channel_sample,
        )
        for i in range(instance_count)
    ]
    rows: list[StabilityRow] = []
    for chunk in mapper(_stability_rows_star, args):
        rows.extend(chunk)
    return _summarize(allocator, rows, budget)


def _stability_rows_star(args) -> list[StabilityRow]:
    return stability_instance_rows(*args)


# ---------------------------------------------------------------------------
# lattice file format


def read_lattice(
    path: str, neighborhood: str = "moore", boundary: str = "toroidal"
) -> ChannelLattice:
    """Parse a lattice file: header "W H F", then H rows of W channel ids.

    '#' starts a comment; blank lines are ignored.
    """
    header: tuple[int, int, int] | None = None
    rows: list[list[int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                values = [int(x) for x in fields]
            except ValueError:
                raise InputFormatError(
                    f"{path}:{lineno}: non-integer token in {raw.strip()!r}"
                ) from None
            if header is None:
                if len(values) != 3:
                    raise InputFormatError(
                        f"{path}:{lineno}: expected header 'W H F', got {raw.strip()!r}"
                    )
                header = (values[0], values[1], values[2])
                continue
            if len(values) != header[0]:
                raise InputFormatError(
                    f"{path}:{lineno}: expected {header[0]} values, got {len(values)}"
                )
            rows.append(values)
    if header is None:
        raise InputFormatError(f"{path}: empty file, missing header")
    if len(rows) != header[1]:
        raise InputFormatError(
            f"{path}: expected {header[1]} rows, got {len(rows)}"
        )
    try:
        return ChannelLattice(
            width=header[0],
            height=header[1],
            channel_count=header[2],
            cells=np.array(rows, dtype=np.int64),
            neighborhood=neighborhood,
            boundary=boundary,
        )
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def write_lattice(lat: ChannelLattice, path: str, header_lines: list[str] | None = None) -> None:
    """Write the lattice file format; header_lines become leading comments."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        fh.write(f"{lat.width} {lat.height} {lat.channel_count}\n")
        for row in lat.cells:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")
