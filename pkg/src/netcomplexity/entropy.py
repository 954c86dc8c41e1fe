"""Excess-entropy estimation over channel lattices.

Conditional entropies h(M) = H(X | M context cells) are estimated with the
plug-in estimator over counts pooled across every cell of every sample
lattice (toroidal wrap, so every cell has a full context).  The context is
the first M offsets of a neighborhood template: offsets ordered by
Chebyshev ring, then clockwise angle starting from north.  The excess is
the accumulated gap between h(M) and the entropy-rate estimate h_hat
(the deepest h(M) in auto mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .lattice import ChannelLattice


@dataclass(frozen=True)
class NeighborhoodTemplate:
    """Ordered context offsets (row delta, col delta); (0, 0) excluded."""

    offsets: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.offsets:
            raise ValueError("template needs at least one offset")
        if len(set(self.offsets)) != len(self.offsets):
            raise ValueError("template offsets must be distinct")
        if (0, 0) in self.offsets:
            raise ValueError("template must not include the cell itself")

    def __len__(self) -> int:
        return len(self.offsets)

    @classmethod
    def chebyshev(cls, radius: int) -> "NeighborhoodTemplate":
        """Rings of increasing Chebyshev distance, each ring clockwise from
        north (up, then up-right, right, ...)."""
        if radius < 1:
            raise ValueError("radius must be >= 1")
        offs = []
        for dr in range(-radius, radius + 1):
            for dc in range(-radius, radius + 1):
                if (dr, dc) != (0, 0):
                    offs.append((dr, dc))

        def key(o):
            dr, dc = o
            ring = max(abs(dr), abs(dc))
            angle = math.atan2(dc, -dr) % (2 * math.pi)
            return (ring, angle)

        return cls(offsets=tuple(sorted(offs, key=key)))


DEFAULT_TEMPLATE = NeighborhoodTemplate.chebyshev(2)


def empirical_entropy(counts: Mapping) -> float:
    """Plug-in Shannon entropy (bits) of a symbol->count table."""
    if not counts:
        raise ValueError("empty count table")
    values = list(counts.values())
    if any(c < 0 for c in values):
        raise ValueError("negative count")
    total = sum(values)
    if total <= 0:
        raise ValueError("count table sums to zero")
    acc = 0.0
    for c in values:
        if c:
            acc += c * math.log2(c)
    return math.log2(total) - acc / total


def _entropy_of_count_vector(counts: np.ndarray) -> float:
    total = int(counts.sum())
    acc = float((counts * np.log2(counts)).sum())
    return math.log2(total) - acc / total


def conditional_entropy_profile(
    samples: Sequence[ChannelLattice],
    max_context: int = 4,
    template: NeighborhoodTemplate | None = None,
) -> tuple[float, ...]:
    """h(M) for M = 1..max_context, pooled over all cells of all samples.

    Counts always wrap toroidally, so every cell contributes a full context
    regardless of the lattice's own boundary flag.  Conditioning on a prefix
    of a fixed template makes h exactly non-increasing in M.
    """
    template = template or DEFAULT_TEMPLATE
    if not samples:
        raise ValueError("need at least one sample lattice")
    if max_context < 1:
        raise ValueError("max_context must be >= 1")
    if max_context > len(template):
        raise ValueError(
            f"max_context {max_context} exceeds template length {len(template)}"
        )
    first = samples[0]
    for s in samples:
        if (s.width, s.height, s.channel_count) != (
            first.width, first.height, first.channel_count,
        ):
            raise ValueError(
                "all sample lattices must share dimensions and alphabet"
            )
    f_count = first.channel_count
    if f_count ** (max_context + 1) > 2 ** 62:
        raise ValueError(
            f"alphabet {f_count} with context depth {max_context} overflows "
            "the dense code space"
        )
    stack = np.stack([s.cells for s in samples]).astype(np.int64)
    planes = [stack]
    for dr, dc in template.offsets[:max_context]:
        # value at offset (dr, dc) from each cell, toroidal wrap
        planes.append(np.roll(stack, (-dr, -dc), axis=(1, 2)))
    h: list[float] = []
    for m in range(1, max_context + 1):
        ctx = planes[1]
        for i in range(2, m + 1):
            ctx = ctx * f_count + planes[i]
        joint = ctx * f_count + planes[0]
        _, joint_counts = np.unique(joint.ravel(), return_counts=True)
        _, ctx_counts = np.unique(ctx.ravel(), return_counts=True)
        h.append(
            _entropy_of_count_vector(joint_counts)
            - _entropy_of_count_vector(ctx_counts)
        )
    return tuple(h)


@dataclass(frozen=True)
class EntropyProfile:
    """Excess-entropy evaluation record."""

    conditional_entropies: tuple[float, ...]
    entropy_rate: float
    excess: float
    max_context: int
    sample_count: int
    template: tuple[tuple[int, int], ...]
    converged: bool


def excess_entropy(
    conditional_entropies: Sequence[float],
    entropy_rate: float | str = "auto",
    tolerance: float = 0.01,
) -> tuple[float, float, bool]:
    """(excess, entropy_rate, converged) from an h(M) table.

    auto mode uses the deepest h(M) as the entropy-rate estimate; the
    convergence flag reports whether the last two h values agree within
    tolerance (a single-entry table cannot be assessed and reports False).
    """
    h = [float(x) for x in conditional_entropies]
    if not h:
        raise ValueError("empty conditional-entropy table")
    if entropy_rate == "auto":
        rate = h[-1]
    else:
        rate = float(entropy_rate)
    excess = sum(v - rate for v in h)
    converged = len(h) >= 2 and abs(h[-1] - h[-2]) <= tolerance
    return excess, rate, converged


def estimate_excess_entropy(
    samples: Sequence[ChannelLattice],
    max_context: int = 4,
    template: NeighborhoodTemplate | None = None,
    entropy_rate: float | str = "auto",
    tolerance: float = 0.01,
) -> EntropyProfile:
    """One-stop pooled estimate over a set of sample lattices."""
    template = template or DEFAULT_TEMPLATE
    h = conditional_entropy_profile(samples, max_context, template)
    excess, rate, converged = excess_entropy(h, entropy_rate, tolerance)
    return EntropyProfile(
        conditional_entropies=h,
        entropy_rate=rate,
        excess=excess,
        max_context=max_context,
        sample_count=len(samples),
        template=template.offsets,
        converged=converged,
    )
