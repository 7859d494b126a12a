"""Independent oracles and random fleet generators for the test suite.

Everything here recomputes results from first principles (dense sampling,
exhaustive subset enumeration) without touching the library's sweep or
search internals, so agreement is meaningful.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from pulsesched import PulseSpec


def level_at_tick(specs: list[PulseSpec], t: int) -> Fraction:
    """Aggregate current at tick t, straight from the pulse definition."""
    total = Fraction(0)
    for s in specs:
        if (t - s.phase) % s.period < s.on_width:
            total += s.amplitude
    return total


def dense_metrics(specs: list[PulseSpec]) -> tuple[Fraction, Fraction, Fraction]:
    """(min, max, mean) by sampling every tick of one hyperperiod."""
    t_lcm = math.lcm(*(s.period for s in specs))
    levels = [level_at_tick(specs, t) for t in range(t_lcm)]
    return min(levels), max(levels), sum(levels) / t_lcm


def samefreq_subset_feasible(specs: list[PulseSpec], bins: tuple[int, ...]) -> bool:
    """Exact packing decision for one bin subset, by plain input-order search."""
    items = [j for j in range(len(specs)) if j not in set(bins)]
    room = {b: specs[b].off_width for b in bins}
    # sound necessary conditions, checked before the search
    if sum(specs[j].on_width for j in items) > sum(room.values()):
        return False
    if items and max(specs[j].on_width for j in items) > max(room.values()):
        return False

    def assign(pos: int) -> bool:
        if pos == len(items):
            return True
        w = specs[items[pos]].on_width
        for b in bins:
            if room[b] >= w:
                room[b] -= w
                if assign(pos + 1):
                    room[b] += w
                    return True
                room[b] += w
        return False

    return assign(0)


def oracle_min_bins_samefreq(specs: list[PulseSpec]) -> int:
    """Minimum bin count over all 2^n bin subsets, each decided exactly."""
    n = len(specs)
    best = n
    for size in range(1, n + 1):
        if size >= best:
            break
        for bins in combinations(range(n), size):
            if samefreq_subset_feasible(specs, bins):
                best = size
                break
    return best


def multifreq_subset_feasible(specs: list[PulseSpec], bins: tuple[int, ...], t_lcm: int) -> bool:
    """Exact slot-packing decision: items pick a host bin and a slot class."""
    bin_set = set(bins)
    items = [j for j in range(len(specs)) if j not in bin_set]
    loads = {b: [0] * (t_lcm // specs[b].period) for b in bins}

    def assign(pos: int) -> bool:
        if pos == len(items):
            return True
        j = items[pos]
        w = specs[j].on_width
        for b in bins:
            if specs[j].period % specs[b].period != 0 or w > specs[b].off_width:
                continue
            ratio = specs[j].period // specs[b].period
            slots = loads[b]
            for cls in range(1, ratio + 1):
                hit = range(cls - 1, len(slots), ratio)
                if all(slots[k] + w <= specs[b].off_width for k in hit):
                    for k in hit:
                        slots[k] += w
                    if assign(pos + 1):
                        for k in hit:
                            slots[k] -= w
                        return True
                    for k in hit:
                        slots[k] -= w
        return False

    return assign(0)


def oracle_min_bins_multifreq(specs: list[PulseSpec]) -> int:
    n = len(specs)
    t_lcm = math.lcm(*(s.period for s in specs))
    best = n
    for size in range(1, n + 1):
        if size >= best:
            break
        for bins in combinations(range(n), size):
            if multifreq_subset_feasible(specs, bins, t_lcm):
                best = size
                break
    return best


def random_samefreq_fleet(rng, n: int, period: int = 60) -> list[PulseSpec]:
    return [
        PulseSpec(
            id=i + 1,
            amplitude=rng.randrange(1, 12),
            period=period,
            on_width=rng.randrange(1, period + 1),
            phase=rng.randrange(period),
        )
        for i in range(n)
    ]


def random_multifreq_fleet(rng, n: int, base: int = 12) -> list[PulseSpec]:
    specs = []
    for i in range(n):
        period = base * rng.choice((1, 2, 4))
        specs.append(
            PulseSpec(
                id=i + 1,
                amplitude=rng.randrange(1, 12),
                period=period,
                on_width=rng.randrange(1, period + 1),
                phase=rng.randrange(period),
            )
        )
    return specs


def random_mixed_fleet(rng, n: int) -> list[PulseSpec]:
    """Arbitrary small-tick fleet for simulator properties (no groupability bias)."""
    specs = []
    for i in range(n):
        period = rng.choice((4, 6, 8, 10, 12, 20))
        specs.append(
            PulseSpec(
                id=i + 1,
                amplitude=Fraction(rng.randrange(1, 30), rng.choice((1, 2, 4))),
                period=period,
                on_width=rng.randrange(1, period + 1),
                phase=rng.randrange(period),
            )
        )
    return specs
