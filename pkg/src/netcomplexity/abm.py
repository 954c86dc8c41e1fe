"""Single-intersection traffic microsimulation with wireless queue sensing.

Two perpendicular roads, one lane per direction, cross in a 2x2 block of
shared cells.  Cars enter at the four edges, drive straight at one cell per
iteration, queue at stop lines, and leave at the far edge.  A sensor on every
approach cell reports occupancy changes over a shared channel (Aloha or CSMA)
to a decision maker whose perceived queue lengths are compared with ground
truth each iteration.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import NamedTuple

from .graph import sample_stream

INACTIVE, MOVING, STATIC = 0, 1, 2
STATE_NAMES = {INACTIVE: "inactive", MOVING: "moving", STATIC: "static"}

LANES = ("east", "west", "south", "north")
LANE_AXIS = {"east": "h", "west": "h", "south": "v", "north": "v"}
# Right-hand traffic through the shared 2x2 block, cells keyed (row, col).
# Each lane crosses two block cells; each block cell is shared by exactly
# one horizontal and one vertical lane.
BOX_PATHS = {
    "east": ((1, 0), (1, 1)),
    "west": ((0, 1), (0, 0)),
    "south": ((0, 0), (1, 0)),
    "north": ((1, 1), (0, 1)),
}

MACS = ("aloha", "csma", "ideal")
LIGHT_POLICIES = ("fixed", "queue")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated run parameters; invalid combinations raise ValueError."""

    iterations: int = 2000
    mac: str = "aloha"
    arrival_probability: float = 0.5
    road_length: int = 20
    green_period: int = 20
    light_policy: str = "fixed"
    min_green: int = 5
    persistence: float = 1.0
    message_duration: int = 1
    slots_per_iteration: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.mac not in MACS:
            raise ValueError(f"unknown mac {self.mac!r}")
        if not 0.0 <= self.arrival_probability <= 1.0:
            raise ValueError("arrival_probability must lie in [0, 1]")
        if self.road_length < 1:
            raise ValueError("road_length must be >= 1")
        if self.green_period < 1:
            raise ValueError("green_period must be >= 1")
        if self.light_policy not in LIGHT_POLICIES:
            raise ValueError(f"unknown light_policy {self.light_policy!r}")
        if self.min_green < 1:
            raise ValueError("min_green must be >= 1")
        if not 0.0 < self.persistence <= 1.0:
            raise ValueError("persistence must lie in (0, 1]")
        if self.message_duration < 1:
            raise ValueError("message_duration must be >= 1")
        if self.slots_per_iteration < 1:
            raise ValueError("slots_per_iteration must be >= 1")


def config_from_mapping(data: dict) -> ScenarioConfig:
    """Build a config from a parsed mapping, rejecting unknown keys."""
    fields = set(ScenarioConfig.__dataclass_fields__)
    unknown = set(data) - fields
    if unknown:
        raise ValueError(f"unknown config keys {sorted(unknown)}")
    return ScenarioConfig(**data)


def mac_comparison_config(**overrides) -> ScenarioConfig:
    """Reference scenario for contrasting random-access schemes.

    The per-field defaults make Aloha and CSMA literally coincide (with
    1-slot messages there is never an in-flight transmission to sense, and
    persistence 1 removes the randomness that resolves contention), so the
    comparison runs with 2-slot messages, persistence 0.05, and 10 channel
    slots per iteration; every traffic parameter keeps its default.  Under
    this load the two schemes separate decisively: sensing keeps a delivery
    trickle alive while the blind scheme collapses under its own backlog.
    """
    base = {"persistence": 0.05, "message_duration": 2, "slots_per_iteration": 10}
    base.update(overrides)
    return ScenarioConfig(**base)


class Car:
    __slots__ = ("ident", "lane", "moved", "arrived_at")

    def __init__(self, ident: int, lane: str, arrived_at: int) -> None:
        self.ident = ident
        self.lane = lane
        # entering the grid counts as displacement, so fresh cars read as
        # moving to the cell sensor
        self.moved = True
        self.arrived_at = arrived_at


class TrafficWorld:
    """Mutable grid state; step() applies arrivals, movement, removal."""

    def __init__(self, road_length: int, arrival_probability: float, rng) -> None:
        self.length = road_length
        self.arrival_probability = arrival_probability
        self.rng = rng
        self.approach = {lane: [None] * road_length for lane in LANES}
        self.exit = {lane: [None] * road_length for lane in LANES}
        self.box: dict[tuple[int, int], Car] = {}
        self.green = "h"
        self.iteration = 0
        self.created = 0
        self.departed = 0
        self.blocked_arrivals = 0

    def step(self) -> None:
        now = self.iteration
        length = self.length
        # arrivals: sample every edge so the arrival stream is independent
        # of blocking; a blocked car is discarded, not queued
        for lane in LANES:
            if self.rng.random() < self.arrival_probability:
                entry = self.approach[lane]
                if entry[0] is None:
                    entry[0] = Car(self.created, lane, now)
                    self.created += 1
                else:
                    self.blocked_arrivals += 1
        # movement, one lane at a time front to back; cars placed this
        # iteration sit out the movement phase so speed is one cell per
        # iteration from the entry cell onward
        for lane in LANES:
            first, second = BOX_PATHS[lane]
            ex = self.exit[lane]
            ap = self.approach[lane]
            box = self.box
            if ex[length - 1] is not None:
                ex[length - 1] = None
                self.departed += 1
            for i in range(length - 2, -1, -1):
                car = ex[i]
                if car is None:
                    continue
                if ex[i + 1] is None:
                    ex[i + 1] = car
                    ex[i] = None
                    car.moved = True
                else:
                    car.moved = False
            car = box.get(second)
            if car is not None and car.lane == lane:
                if ex[0] is None:
                    ex[0] = car
                    del box[second]
                    car.moved = True
                else:
                    car.moved = False
            car = box.get(first)
            if car is not None and car.lane == lane:
                if second not in box:
                    box[second] = car
                    del box[first]
                    car.moved = True
                else:
                    car.moved = False
            car = ap[length - 1]
            if car is not None and car.arrived_at != now:
                # stop line: cross only on green and only when the whole
                # box path is clear, which provably rules out gridlock
                if (
                    self.green == LANE_AXIS[lane]
                    and first not in box
                    and second not in box
                ):
                    box[first] = car
                    ap[length - 1] = None
                    car.moved = True
                else:
                    car.moved = False
            for i in range(length - 2, -1, -1):
                car = ap[i]
                if car is None or car.arrived_at == now:
                    continue
                if ap[i + 1] is None:
                    ap[i + 1] = car
                    ap[i] = None
                    car.moved = True
                else:
                    car.moved = False
        self.iteration += 1

    def cars_on_grid(self) -> list[Car]:
        cars = [c for lane in LANES for c in self.approach[lane] if c is not None]
        cars += [c for lane in LANES for c in self.exit[lane] if c is not None]
        cars += list(self.box.values())
        return cars

    def light_color(self, lane: str) -> str:
        return "green" if LANE_AXIS[lane] == self.green else "red"


class SensorField:
    """One sensor per approach cell; reports are event-triggered."""

    def __init__(self, road_length: int) -> None:
        self.ids = [(lane, i) for lane in LANES for i in range(road_length)]
        self.state = {sid: INACTIVE for sid in self.ids}
        self.reports_generated = 0

    def observe(self, world: TrafficWorld, pending: dict) -> int:
        """Refresh all sensors from cell occupancy; queue a report for each
        state change (latest state wins).  Returns the actual waiting count,
        i.e. static cars on approach cells."""
        waiting = 0
        state = self.state
        for lane in LANES:
            ap = world.approach[lane]
            for i, car in enumerate(ap):
                if car is None:
                    new = INACTIVE
                elif car.moved:
                    new = MOVING
                else:
                    new = STATIC
                    waiting += 1
                sid = (lane, i)
                if state[sid] != new:
                    state[sid] = new
                    pending[sid] = new
                    self.reports_generated += 1
        return waiting


class DecisionMaker:
    """Sink of sensor reports; remembers the last delivered state per sensor."""

    def __init__(self, road_length: int) -> None:
        self.store = {(lane, i): INACTIVE for lane in LANES for i in range(road_length)}
        self.perceived = {"h": 0, "v": 0}

    def apply(self, deliveries) -> None:
        for sid, new in deliveries:
            old = self.store[sid]
            if old == new:
                continue
            axis = LANE_AXIS[sid[0]]
            if old == STATIC:
                self.perceived[axis] -= 1
            if new == STATIC:
                self.perceived[axis] += 1
            self.store[sid] = new

    def perceived_waiting(self) -> int:
        return self.perceived["h"] + self.perceived["v"]


class _Transmission:
    __slots__ = ("sid", "state", "end", "corrupted")

    def __init__(self, sid, state, end) -> None:
        self.sid = sid
        self.state = state
        self.end = end
        self.corrupted = False


class MacChannel:
    """Shared slotted channel.

    Aloha senders transmit with probability `persistence` whenever they hold
    a pending report, channel state ignored.  CSMA senders defer while any
    transmission is in flight and otherwise transmit with the same
    persistence.  Two or more overlapping transmissions corrupt each other
    (one collision event per slot); corrupted senders occupy the channel to
    the end of their message and then re-queue.  The ideal kind bypasses the
    channel entirely and delivers every pending report at once.
    """

    def __init__(self, kind: str, persistence: float = 1.0, message_duration: int = 1) -> None:
        if kind not in MACS:
            raise ValueError(f"unknown mac {kind!r}")
        self.kind = kind
        self.persistence = persistence
        self.duration = message_duration
        self.slot = 0
        self.ongoing: list[_Transmission] = []
        self.in_flight: set = set()

    def round(self, pending: dict, rng) -> tuple[list, int]:
        """Run one slot; mutates pending, returns (deliveries, collisions)."""
        if self.kind == "ideal":
            deliveries = sorted(pending.items())
            pending.clear()
            self.slot += 1
            return deliveries, 0
        slot = self.slot
        busy = bool(self.ongoing)
        starters = []
        for sid in sorted(pending):
            if sid in self.in_flight:
                continue
            if self.kind == "csma" and busy:
                continue
            if rng.random() < self.persistence:
                starters.append(sid)
        collided = len(starters) >= 2 or (starters and busy)
        for sid in starters:
            tx = _Transmission(sid, pending.pop(sid), slot + self.duration - 1)
            tx.corrupted = collided
            self.ongoing.append(tx)
            self.in_flight.add(sid)
        collisions = 0
        if collided:
            collisions = 1
            for tx in self.ongoing:
                tx.corrupted = True
        deliveries = []
        keep = []
        for tx in self.ongoing:
            if tx.end > slot:
                keep.append(tx)
                continue
            self.in_flight.discard(tx.sid)
            if tx.corrupted:
                # retry unless the sensor queued a fresher state meanwhile
                pending.setdefault(tx.sid, tx.state)
            else:
                deliveries.append((tx.sid, tx.state))
        self.ongoing = keep
        self.slot += 1
        return deliveries, collisions


class PerceptionRecord(NamedTuple):
    iteration: int
    actual: int
    perceived: int
    gap: int
    delivered: int
    collisions: int


@dataclass(frozen=True)
class ScenarioResult:
    config: ScenarioConfig
    trace: tuple[PerceptionRecord, ...]
    mean_gap: float
    gap_histogram: tuple[tuple[int, int], ...]
    delivery_ratio: float
    collision_rate: float
    created: int
    departed: int
    remaining: int
    blocked_arrivals: int
    reports_generated: int


def fixed_phase(iteration: int, green_period: int) -> str:
    """Fixed-cycle light schedule: axes alternate every green_period."""
    return "h" if (iteration // green_period) % 2 == 0 else "v"


def queue_phase(current: str, time_in_phase: int, perceived: dict, min_green: int) -> str:
    """Queue-responsive schedule on perceived counts; ties keep the phase."""
    other = "v" if current == "h" else "h"
    if time_in_phase + 1 >= min_green and perceived[other] > perceived[current]:
        return other
    return current


def run_scenario(config: ScenarioConfig, check_invariants: bool = False) -> ScenarioResult:
    """Run one seeded scenario and summarize the perception gap.

    Traffic and channel randomness come from separate streams, so runs with
    the same seed see identical arrivals regardless of the MAC under test.
    """
    rng_world = sample_stream(config.seed, "world")
    rng_mac = sample_stream(config.seed, "mac")
    world = TrafficWorld(config.road_length, config.arrival_probability, rng_world)
    sensors = SensorField(config.road_length)
    dm = DecisionMaker(config.road_length)
    channel = MacChannel(config.mac, config.persistence, config.message_duration)
    pending: dict = {}
    trace = []
    delivered_total = 0
    collisions_total = 0
    time_in_phase = 0
    for it in range(config.iterations):
        if config.light_policy == "fixed":
            world.green = fixed_phase(it, config.green_period)
        world.step()
        actual = sensors.observe(world, pending)
        delivered = 0
        collisions = 0
        for _ in range(config.slots_per_iteration):
            out, hits = channel.round(pending, rng_mac)
            dm.apply(out)
            delivered += len(out)
            collisions += hits
        delivered_total += delivered
        collisions_total += collisions
        perceived = dm.perceived_waiting()
        trace.append(PerceptionRecord(it, actual, perceived, actual - perceived, delivered, collisions))
        if config.light_policy == "queue":
            nxt = queue_phase(world.green, time_in_phase, dm.perceived, config.min_green)
            if nxt != world.green:
                world.green = nxt
                time_in_phase = 0
            else:
                time_in_phase += 1
        if check_invariants:
            cars = world.cars_on_grid()
            if len(cars) != world.created - world.departed:
                raise AssertionError(
                    f"conservation violated at iteration {it}: "
                    f"{len(cars)} on grid, {world.created} created, "
                    f"{world.departed} departed"
                )
            if len({c.ident for c in cars}) != len(cars):
                raise AssertionError(f"duplicate car placement at iteration {it}")
    gaps = [row.gap for row in trace]
    histogram = tuple(sorted(Counter(gaps).items()))
    slots = config.iterations * config.slots_per_iteration
    return ScenarioResult(
        config=config,
        trace=tuple(trace),
        mean_gap=(sum(gaps) / len(gaps)) if gaps else 0.0,
        gap_histogram=histogram,
        delivery_ratio=delivered_total / max(1, sensors.reports_generated),
        collision_rate=collisions_total / max(1, slots),
        created=world.created,
        departed=world.departed,
        remaining=world.created - world.departed,
        blocked_arrivals=world.blocked_arrivals,
        reports_generated=sensors.reports_generated,
    )


def gap_comparison(
    mac_a: str,
    mac_b: str,
    seeds,
    config: ScenarioConfig,
    mapper=map,
) -> dict:
    """Mean-gap separation between two MACs over a common seed list.

    Returns per-seed means, the two grand means, and a 95% confidence
    interval on their difference treating per-seed means as independent
    samples.  The scenario config's own mac/seed fields are overridden.
    """
    seeds = list(seeds)
    if len(seeds) < 2:
        raise ValueError("need at least two seeds to compare")
    configs_a = [
        ScenarioConfig(**{**_config_dict(config), "mac": mac_a, "seed": s}) for s in seeds
    ]
    configs_b = [
        ScenarioConfig(**{**_config_dict(config), "mac": mac_b, "seed": s}) for s in seeds
    ]
    means_a = [r.mean_gap for r in mapper(run_scenario, configs_a)]
    means_b = [r.mean_gap for r in mapper(run_scenario, configs_b)]
    diff = statistics.fmean(means_a) - statistics.fmean(means_b)
    half = 1.96 * math.sqrt(
        statistics.variance(means_a) / len(seeds)
        + statistics.variance(means_b) / len(seeds)
    )
    return {
        "mac_a": mac_a,
        "mac_b": mac_b,
        "seeds": seeds,
        "means_a": means_a,
        "means_b": means_b,
        "mean_a": statistics.fmean(means_a),
        "mean_b": statistics.fmean(means_b),
        "difference": diff,
        "ci_half_width": half,
        "separated": abs(diff) > half,
    }


def _config_dict(config: ScenarioConfig) -> dict:
    return {name: getattr(config, name) for name in ScenarioConfig.__dataclass_fields__}
