"""Functional topologies: validated graphs, bounded reachability, classical
metrics, and subgraph enumeration/sampling.

Nodes are dense integer ids 0..N-1.  Undirected edges are stored once as
(min, max) pairs.  Classical metrics (diameter, average path length,
clustering) use the undirected view of the graph; bounded reachability on a
directed graph follows edge direction and counts the nodes that can reach
the target.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence


class InputFormatError(ValueError):
    """A file or textual input could not be parsed."""


# ---------------------------------------------------------------------------
# core types


@dataclass(frozen=True)
class FunctionalTopology:
    """A validated graph.  Build instances through build_topology()."""

    node_count: int
    edges: tuple[tuple[int, int], ...]
    directed: bool = False
    labels: tuple[str, ...] | None = None

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        """Out-neighbors per node (undirected: all neighbors)."""
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            if not self.directed:
                adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        """In-neighbors per node (undirected: all neighbors)."""
        if not self.directed:
            return self.successors
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def undirected_neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Neighbors ignoring direction; used by the classical metrics."""
        if not self.directed:
            return self.successors
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def degree(self, n: int) -> int:
        return len(self.undirected_neighbors[n])


@dataclass(frozen=True)
class SubgraphView:
    """An induced subgraph: a sorted member tuple over a parent topology.

    index is the ordinal of the view within an enumeration or sample stream
    (None for ad-hoc views).
    """

    parent: FunctionalTopology
    members: tuple[int, ...]
    index: int | None = None

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    @property
    def size(self) -> int:
        return len(self.members)


def build_topology(
    node_count: int,
    edges: Iterable[Sequence[int]],
    directed: bool = False,
    labels: Sequence[str] | None = None,
) -> FunctionalTopology:
    """Validate and construct a FunctionalTopology.

    Rejects node ids outside 0..node_count-1, self-loops, and duplicate
    edges (in undirected mode (u, v) and (v, u) are the same edge).
    """
    if node_count < 1:
        raise ValueError(f"node_count must be >= 1, got {node_count}")
    if labels is not None and len(labels) != node_count:
        raise ValueError(
            f"got {len(labels)} labels for {node_count} nodes"
        )
    seen: set[tuple[int, int]] = set()
    canonical: list[tuple[int, int]] = []
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise ValueError(
                f"edge ({u}, {v}) references a node outside 0..{node_count - 1}"
            )
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) is not allowed")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"duplicate edge ({u}, {v})")
        seen.add(key)
        canonical.append(key)
    return FunctionalTopology(
        node_count=node_count,
        edges=tuple(canonical),
        directed=directed,
        labels=tuple(labels) if labels is not None else None,
    )


def subgraph_view(
    g: FunctionalTopology, members: Sequence[int], index: int | None = None
) -> SubgraphView:
    """Validated induced-subgraph view: distinct in-range members, size >= 1."""
    mt = tuple(sorted(int(m) for m in members))
    if not mt:
        raise ValueError("a subgraph view needs at least one member")
    if len(set(mt)) != len(mt):
        raise ValueError(f"duplicate members in {mt}")
    if mt[0] < 0 or mt[-1] >= g.node_count:
        raise ValueError(f"members {mt} outside 0..{g.node_count - 1}")
    return SubgraphView(parent=g, members=mt, index=index)


# ---------------------------------------------------------------------------
# reachability and classical metrics


def reachability_count(
    g: FunctionalTopology | SubgraphView, n: int, r: int
) -> int:
    """Number of nodes within r hops that can reach node n, counting n itself.

    On a SubgraphView paths are confined to the induced subgraph.  Directed
    graphs follow edge direction (BFS over predecessors).
    """
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if isinstance(g, SubgraphView):
        parent, members = g.parent, g.member_set
    else:
        parent, members = g, None
    if members is not None:
        if n not in members:
            raise ValueError(f"node {n} is not a member of the view")
    elif not (0 <= n < parent.node_count):
        raise ValueError(f"node {n} outside 0..{parent.node_count - 1}")
    adj = parent.predecessors
    seen = {n}
    frontier = [n]
    for _ in range(r):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w in seen or (members is not None and w not in members):
                    continue
                seen.add(w)
                nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return len(seen)


def _bfs_distances(adj: Sequence[Sequence[int]], source: int) -> list[int]:
    """Hop distances from source; -1 marks unreachable nodes."""
    dist = [-1] * len(adj)
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def is_connected(g: FunctionalTopology) -> bool:
    """Connectivity of the undirected view."""
    dist = _bfs_distances(g.undirected_neighbors, 0)
    return all(d >= 0 for d in dist)


def _require_connected(dist: list[int], source: int) -> None:
    for v, d in enumerate(dist):
        if d < 0:
            raise ValueError(
                f"graph is disconnected: nodes {source} and {v} "
                "are in different components"
            )


def diameter(g: FunctionalTopology) -> int:
    """Longest shortest path of the undirected view; rejects N = 1 and
    disconnected graphs."""
    if g.node_count < 2:
        raise ValueError("diameter is undefined for a single-node graph")
    adj = g.undirected_neighbors
    best = 0
    for s in range(g.node_count):
        dist = _bfs_distances(adj, s)
        _require_connected(dist, s)
        best = max(best, max(dist))
    return best


def average_path_length(g: FunctionalTopology) -> float:
    """Mean shortest-path length over unordered node pairs (undirected view)."""
    if g.node_count < 2:
        raise ValueError("average path length needs at least 2 nodes")
    adj = g.undirected_neighbors
    total = 0
    for s in range(g.node_count):
        dist = _bfs_distances(adj, s)
        _require_connected(dist, s)
        total += sum(dist)
    # each unordered pair counted twice in the double loop
    return total / (g.node_count * (g.node_count - 1))


def average_degree(g: FunctionalTopology) -> float:
    """2|E|/N (edge endpoints per node)."""
    return 2.0 * len(g.edges) / g.node_count


def clustering_coefficient(g: FunctionalTopology) -> float:
    """Mean local clustering; nodes of degree < 2 contribute 0."""
    adj = g.undirected_neighbors
    sets = [set(a) for a in adj]
    total = 0.0
    for n in range(g.node_count):
        k = len(adj[n])
        if k < 2:
            continue
        links = 0
        for a, b in itertools.combinations(adj[n], 2):
            if b in sets[a]:
                links += 1
        total += 2.0 * links / (k * (k - 1))
    return total / g.node_count


# ---------------------------------------------------------------------------
# subgraph enumeration / sampling


@dataclass(frozen=True)
class SamplingPolicy:
    """How subgraphs of each size are visited.

    mode "exhaustive" enumerates every size-j subset, except that sizes where
    C(N, j) exceeds exhaustive_limit fall back to uniform sampling with
    replacement (sample_count draws).  mode "uniform-sample" always samples,
    except the single full-size subset which is exact by construction.
    """

    mode: str = "exhaustive"
    sample_count: int = 10_000
    exhaustive_limit: int = 100_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("exhaustive", "uniform-sample"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.exhaustive_limit < 1:
            raise ValueError("exhaustive_limit must be >= 1")

    def resolved_mode(self, node_count: int, size: int) -> str:
        """Effective strategy for one subgraph size."""
        if size == node_count:
            return "exhaustive"  # single subset, always exact
        if self.mode == "uniform-sample":
            return "uniform-sample"
        if math.comb(node_count, size) > self.exhaustive_limit:
            return "uniform-sample"
        return "exhaustive"


def sample_stream(seed: int, *parts: object) -> random.Random:
    """Deterministic RNG derived from a base seed and a stream tag.

    String seeding hashes the tag, so distinct tags give independent
    reproducible streams.
    """
    tag = ":".join(str(p) for p in (seed, *parts))
    return random.Random(tag)


def enumerate_subgraphs(
    g: FunctionalTopology, size: int, policy: SamplingPolicy | None = None
) -> Iterator[SubgraphView]:
    """Yield induced size-j subgraph views.

    Exhaustive mode yields all C(N, j) member tuples in lexicographic order;
    sample mode yields policy.sample_count independent uniform draws (with
    replacement) from the same universe, reproducible from the policy seed.
    """
    policy = policy or SamplingPolicy()
    n = g.node_count
    if not (1 <= size <= n):
        raise ValueError(f"subgraph size {size} outside 1..{n}")
    if policy.mode == "exhaustive" or size == n:
        for k, members in enumerate(itertools.combinations(range(n), size)):
            yield SubgraphView(parent=g, members=members, index=k)
        return
    rng = sample_stream(policy.seed, size)
    pool = range(n)
    for k in range(policy.sample_count):
        members = tuple(sorted(rng.sample(pool, size)))
        yield SubgraphView(parent=g, members=members, index=k)


# ---------------------------------------------------------------------------
# edge-list file format


def read_edge_list(path: str) -> FunctionalTopology:
    """Parse a graph file.

    Format: header line "N <node_count> <directed|undirected>", then one
    "u v" pair per line.  '#' starts a comment; blank lines are ignored.
    """
    header: tuple[int, bool] | None = None
    edges: list[tuple[int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if header is None:
                if len(fields) != 3 or fields[0] != "N":
                    raise InputFormatError(
                        f"{path}:{lineno}: expected header 'N <count> "
                        f"<directed|undirected>', got {raw.strip()!r}"
                    )
                try:
                    count = int(fields[1])
                except ValueError:
                    raise InputFormatError(
                        f"{path}:{lineno}: node count {fields[1]!r} is not an integer"
                    ) from None
                if fields[2] not in ("directed", "undirected"):
                    raise InputFormatError(
                        f"{path}:{lineno}: mode must be 'directed' or "
                        f"'undirected', got {fields[2]!r}"
                    )
                header = (count, fields[2] == "directed")
                continue
            if len(fields) != 2:
                raise InputFormatError(
                    f"{path}:{lineno}: expected 'u v', got {raw.strip()!r}"
                )
            try:
                edges.append((int(fields[0]), int(fields[1])))
            except ValueError:
                raise InputFormatError(
                    f"{path}:{lineno}: non-integer node id in {raw.strip()!r}"
                ) from None
    if header is None:
        raise InputFormatError(f"{path}: empty file, missing header")
    try:
        return build_topology(header[0], edges, directed=header[1])
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def write_edge_list(g: FunctionalTopology, path: str) -> None:
    """Write a graph in the edge-list format read_edge_list understands."""
    mode = "directed" if g.directed else "undirected"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"N {g.node_count} {mode}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")
