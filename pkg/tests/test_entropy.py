"""Spatial entropy rate and excess entropy over channel lattices."""

import math

import numpy as np
import pytest

from netcomplexity.entropy import (
    DEFAULT_TEMPLATE,
    NeighborhoodTemplate,
    conditional_entropy_profile,
    empirical_entropy,
    estimate_excess_entropy,
    excess_entropy,
)
from netcomplexity.lattice import ChannelLattice

from oracles import (
    oracle_conditional_profile,
    oracle_entropy_bits,
    oracle_stripe_h1,
)


def random_lattice(width, height, channels, seed, count=1):
    rng = np.random.default_rng(seed)
    return [
        ChannelLattice(width, height, channels,
                       rng.integers(0, channels, size=(height, width)))
        for _ in range(count)
    ]


# ---------------------------------------------------------------------------
# neighborhood templates


def test_chebyshev_ring_one_is_clockwise_from_north():
    tpl = NeighborhoodTemplate.chebyshev(1)
    assert tpl.offsets == (
        (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1),
    )


def test_chebyshev_two_has_inner_ring_first():
    tpl = NeighborhoodTemplate.chebyshev(2)
    assert len(tpl) == 24
    assert tpl.offsets[:8] == NeighborhoodTemplate.chebyshev(1).offsets
    assert tpl.offsets[8] == (-2, 0)
    assert max(max(abs(r), abs(c)) for r, c in tpl.offsets[8:]) == 2
    assert len(set(tpl.offsets)) == 24


def test_default_template_is_radius_two():
    assert DEFAULT_TEMPLATE.offsets == NeighborhoodTemplate.chebyshev(2).offsets


def test_template_rejects_center_and_duplicates():
    with pytest.raises(ValueError):
        NeighborhoodTemplate(offsets=((0, 0),))
    with pytest.raises(ValueError):
        NeighborhoodTemplate(offsets=((0, 1), (0, 1)))
    with pytest.raises(ValueError):
        NeighborhoodTemplate.chebyshev(0)


# ---------------------------------------------------------------------------
# plug-in entropy


def test_empirical_entropy_anchors():
    assert empirical_entropy({"a": 1, "b": 1}) == pytest.approx(1.0, abs=1e-12)
    assert empirical_entropy({i: 5 for i in range(4)}) == pytest.approx(2.0, abs=1e-12)
    assert empirical_entropy({"only": 17}) == 0.0


def test_empirical_entropy_matches_closed_form():
    counts = {0: 3, 1: 5, 2: 7, 3: 11}
    n = 26
    expect = math.log2(n) - sum(c * math.log2(c) for c in counts.values()) / n
    assert empirical_entropy(counts) == pytest.approx(expect, abs=1e-12)
    assert empirical_entropy(counts) == pytest.approx(
        oracle_entropy_bits(counts.values()), abs=1e-12
    )


def test_empirical_entropy_high_precision_cross_check():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    counts = [3, 5, 7, 11, 13]
    total = sum(counts)
    acc = mp.mpf(0)
    for c in counts:
        p = mp.mpf(c) / total
        acc -= p * mp.log(p) / mp.log(2)
    got = empirical_entropy(dict(enumerate(counts)))
    assert abs(got - float(acc)) < 1e-12


def test_empirical_entropy_rejections():
    with pytest.raises(ValueError):
        empirical_entropy({})
    with pytest.raises(ValueError):
        empirical_entropy({"a": 0, "b": 0})
    with pytest.raises(ValueError):
        empirical_entropy({"a": -1, "b": 2})


# ---------------------------------------------------------------------------
# conditional entropy profile


def test_stripe_pattern_is_fully_determined_by_west_neighbor():
    # Vertical 2-stripes, both phases pooled: the west cell fixes the value.
    tpl = NeighborhoodTemplate(offsets=((0, -1),))
    samples = [
        ChannelLattice(6, 6, 2, np.fromfunction(
            lambda r, c: (c + phase) % 2, (6, 6), dtype=np.int64))
        for phase in (0, 1)
    ]
    (h1,) = conditional_entropy_profile(samples, 1, tpl)
    assert h1 == pytest.approx(oracle_stripe_h1(), abs=1e-12)
    assert h1 == pytest.approx(0.0, abs=1e-12)


def test_profile_matches_literal_counting_oracle():
    tpl = NeighborhoodTemplate.chebyshev(1)
    for seed in range(4):
        samples = random_lattice(6, 5, 3, seed, count=2)
        got = conditional_entropy_profile(samples, 4, tpl)
        want = oracle_conditional_profile(samples, 4, tpl.offsets)
        assert got == pytest.approx(want, abs=1e-10)


def test_profile_is_monotone_nonincreasing():
    for seed in range(6):
        samples = random_lattice(8, 8, 4, seed, count=3)
        h = conditional_entropy_profile(samples, 6)
        for a, b in zip(h, h[1:]):
            assert b <= a + 1e-9


def test_constant_lattice_has_zero_profile():
    samples = [ChannelLattice(5, 5, 3, np.full((5, 5), 2))]
    h = conditional_entropy_profile(samples, 4)
    assert h == pytest.approx((0.0,) * 4, abs=1e-12)


def test_profile_invariant_under_channel_relabeling():
    samples = random_lattice(7, 6, 4, 11, count=2)
    perm = np.array([2, 0, 3, 1])
    relabeled = [
        ChannelLattice(s.width, s.height, s.channel_count, perm[s.cells])
        for s in samples
    ]
    assert conditional_entropy_profile(samples, 3) == pytest.approx(
        conditional_entropy_profile(relabeled, 3), abs=1e-12
    )


def test_duplicated_sample_does_not_move_the_estimate():
    samples = random_lattice(6, 6, 3, 23)
    once = conditional_entropy_profile(samples, 3)
    twice = conditional_entropy_profile(samples * 2, 3)
    assert once == pytest.approx(twice, abs=1e-12)


def test_iid_lattice_profile_is_near_log2_alphabet():
    samples = random_lattice(300, 300, 2, 5)
    h = conditional_entropy_profile(samples, 3)
    for v in h:
        assert abs(v - 1.0) < 0.01
    excess, _, _ = excess_entropy(h)
    assert abs(excess) < 0.02


def test_profile_validation():
    samples = random_lattice(5, 5, 3, 0)
    with pytest.raises(ValueError):
        conditional_entropy_profile([], 2)
    with pytest.raises(ValueError):
        conditional_entropy_profile(samples, 0)
    with pytest.raises(ValueError):
        conditional_entropy_profile(samples, 25)  # template holds 24 offsets
    mixed = samples + random_lattice(6, 5, 3, 1)
    with pytest.raises(ValueError):
        conditional_entropy_profile(mixed, 2)
    wide = [ChannelLattice(2, 2, 2 ** 16, np.zeros((2, 2), dtype=np.int64))]
    with pytest.raises(ValueError):
        conditional_entropy_profile(wide, 4)


# ---------------------------------------------------------------------------
# excess entropy


def test_excess_entropy_partial_sum_anchor():
    excess, rate, converged = excess_entropy([1.0, 0.6, 0.5, 0.5], "auto")
    assert excess == pytest.approx(0.6, abs=1e-12)
    assert rate == 0.5
    assert converged


def test_excess_entropy_explicit_rate():
    excess, rate, converged = excess_entropy([1.0, 0.6], entropy_rate=0.5)
    assert excess == pytest.approx(0.6, abs=1e-12)
    assert rate == 0.5
    assert not converged  # last two h values differ by 0.4 > tolerance


def test_excess_entropy_edge_cases():
    excess, rate, converged = excess_entropy([0.7], "auto")
    assert excess == 0.0 and rate == 0.7 and not converged
    with pytest.raises(ValueError):
        excess_entropy([])


def test_estimate_wrapper_populates_record():
    samples = random_lattice(10, 10, 3, 2, count=2)
    profile = estimate_excess_entropy(samples, max_context=3)
    assert profile.max_context == 3
    assert profile.sample_count == 2
    assert profile.template == DEFAULT_TEMPLATE.offsets
    assert len(profile.conditional_entropies) == 3
    assert profile.entropy_rate == profile.conditional_entropies[-1]
    assert profile.excess == pytest.approx(
        sum(v - profile.entropy_rate for v in profile.conditional_entropies),
        abs=1e-12,
    )


def test_constant_lattice_has_zero_excess():
    samples = [ChannelLattice(8, 8, 4, np.full((8, 8), 1))]
    profile = estimate_excess_entropy(samples)
    assert profile.excess == pytest.approx(0.0, abs=1e-12)
    assert profile.entropy_rate == pytest.approx(0.0, abs=1e-12)
    assert profile.converged
