"""Discrete-event loss-system simulation of fabric blocking.

Connection requests arrive as an aggregate Poisson stream with rate
load * D * L / mean_holding, so each input line fiber offers `load`
Erlang.  Every arrival draws a source uniformly over the D*L input
fibers and a destination uniformly over the (D-1)*L output fibers on
other directional degrees, then tries to admit; a success holds its
resources for an exponential time, a failure is counted blocked and
discarded (no retry, no queue).  All arrivals count toward the blocking
ratio; there is no warm-up discard.

The event queue holds pending departures ordered by (time, insertion
sequence); a departure scheduled at exactly an arrival's timestamp is
processed before that arrival, which together with the sequence numbers
makes every run fully deterministic given (config, seed).  Interarrival,
source, destination, and holding time are drawn for every arrival in a
fixed order (holding is simply discarded on a block), so two simulations
with the same seed see identical request streams regardless of how their
architectures block.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from heapq import heappop, heappush
from typing import Optional, Sequence

from . import admission
from .admission import ConnectionRequest, Policy
from .errors import InvalidConfig, InvalidInput
from .fabric import FabricKind, FabricSpec, build_fabric

RNG_NAME = "mt19937"

# Offset between derived sweep seeds; index 0 keeps the base seed so a
# singleton sweep reproduces a plain run exactly.
_SEED_STRIDE = 0x9E3779B97F4A7C15


@dataclass(frozen=True, slots=True)
class SimConfig:
    """Parameters of one simulation run."""

    fabric: FabricSpec
    load_per_fiber: float
    arrivals: int
    seed: int
    policy: Policy = Policy.FIRST_FIT
    mean_holding: float = 1.0

    def __post_init__(self) -> None:
        if self.load_per_fiber <= 0:
            raise InvalidConfig(f"load must be > 0, got {self.load_per_fiber}")
        if self.arrivals < 1:
            raise InvalidConfig(f"need at least 1 arrival, got {self.arrivals}")
        if self.mean_holding <= 0:
            raise InvalidConfig(f"mean holding must be > 0, got {self.mean_holding}")


@dataclass(frozen=True, slots=True)
class SimStats:
    """Measured outcome of one run.

    wall_seconds is timing metadata and excluded from equality; all other
    fields are deterministic functions of (config, seed).
    """

    spec: FabricSpec
    load_per_fiber: float
    mean_holding: float
    seed: int
    policy: Policy
    arrivals: int
    blocked: int
    blocking_prob: float
    std_err: float
    ci_lo: float
    ci_hi: float
    sim_time: float
    rng_name: str = RNG_NAME
    wall_seconds: float = field(default=0.0, compare=False)


def confidence_interval(blocked: int, arrivals: int) -> tuple[float, float]:
    """Normal-approximation 95% interval for the blocking ratio,
    clamped to [0, 1]."""
    if arrivals < 1:
        raise InvalidInput(f"need at least 1 arrival, got {arrivals}")
    if not 0 <= blocked <= arrivals:
        raise InvalidInput(f"blocked={blocked} outside [0, {arrivals}]")
    p = blocked / arrivals
    half = 1.96 * math.sqrt(p * (1.0 - p) / arrivals)
    return (max(0.0, p - half), min(1.0, p + half))


def run(config: SimConfig) -> SimStats:
    """Simulate one loss system and measure its blocking ratio."""
    spec = config.fabric
    fabric = build_fabric(spec)
    rng = random.Random(config.seed)
    expovariate = rng.expovariate
    randrange = rng.randrange

    d, l = spec.d, spec.l
    n_src = d * l
    n_dst = (d - 1) * l
    arrival_rate = config.load_per_fiber * n_src / config.mean_holding
    holding_rate = 1.0 / config.mean_holding
    policy = config.policy
    admit = admission.admit
    release = fabric.release
    line_in_refs = fabric._line_in_refs
    line_out_refs = fabric._line_out_refs

    departures: list[tuple[float, int, int]] = []
    seq = 0
    now = 0.0
    blocked = 0
    started = time.perf_counter()

    for _ in range(config.arrivals):
        now += expovariate(arrival_rate)
        while departures and departures[0][0] <= now:
            release(heappop(departures)[2])

        src_i = randrange(n_src)
        dst_i = randrange(n_dst)
        holding = expovariate(holding_rate)

        d_s, l_s = divmod(src_i, l)
        d_t, l_t = divmod(dst_i, l)
        if d_t >= d_s:
            d_t += 1
        request = ConnectionRequest(line_in_refs[d_s][l_s], line_out_refs[d_t][l_t])

        connection = admit(fabric, request, policy, rng)
        if connection is None:
            blocked += 1
        else:
            heappush(departures, (now + holding, seq, connection.id))
            seq += 1

    wall = time.perf_counter() - started
    p = blocked / config.arrivals
    std_err = math.sqrt(p * (1.0 - p) / config.arrivals)
    ci_lo, ci_hi = confidence_interval(blocked, config.arrivals)
    return SimStats(
        spec=spec,
        load_per_fiber=config.load_per_fiber,
        mean_holding=config.mean_holding,
        seed=config.seed,
        policy=config.policy,
        arrivals=config.arrivals,
        blocked=blocked,
        blocking_prob=p,
        std_err=std_err,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        sim_time=now,
        wall_seconds=wall,
    )


def derive_seed(base_seed: int, index: int) -> int:
    """Deterministic per-run seed for sweep point `index`."""
    return (base_seed + index * _SEED_STRIDE) % (1 << 64)


def _config_for_value(base: SimConfig, param: str, value) -> SimConfig:
    spec = base.fabric
    if param == "m":
        if spec.kind is not FabricKind.CLOS:
            raise InvalidConfig("middle-stage sweep needs a Clos base spec")
        return replace(base, fabric=replace(spec, m=int(value)))
    if param == "load":
        return replace(base, load_per_fiber=float(value))
    if param == "middle":
        if spec.kind is not FabricKind.CLOS:
            raise InvalidConfig("middle-kind sweep needs a Clos base spec")
        from .fabric import MiddleKind

        return replace(base, fabric=replace(spec, middle_kind=MiddleKind(value)))
    if param == "arch":
        kind = FabricKind(value)
        if kind is FabricKind.SPANKE:
            return replace(base, fabric=FabricSpec.spanke(spec.d, spec.l, spec.w))
        if spec.kind is not FabricKind.CLOS:
            raise InvalidConfig("arch sweep including clos needs a Clos base spec")
        return replace(base, fabric=spec)
    raise InvalidConfig(f"unknown sweep parameter {param!r}")


def sweep(
    base: SimConfig,
    param: str,
    values: Sequence,
    workers: Optional[int] = 1,
) -> list[SimStats]:
    """One independent run per value of `param`.

    param is one of "m", "load", "arch", "middle" ("middle_kind" is
    accepted as an alias).  Run i uses derive_seed(base.seed, i); results
    come back in input order, so the output is identical whether runs
    execute sequentially (workers=1) or in a process pool.
    """
    if not values:
        raise InvalidConfig("sweep needs at least one value")
    if param == "middle_kind":
        param = "middle"
    configs = [
        replace(_config_for_value(base, param, v), seed=derive_seed(base.seed, i))
        for i, v in enumerate(values)
    ]
    if workers is not None and workers <= 1:
        return [run(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, configs))
