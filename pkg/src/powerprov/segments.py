"""Critical decomposition of a workload count function.

The count path is cut at critical times found inductively: from an arrival
epoch the next cut is the first departure; from a departure epoch it is the
first arrival returning to the same count if one exists, else the next
departure; t=0 counts as an arrival epoch and T closes the last segment.
Each resulting segment has one of four shapes:

* I   non-decreasing
* II  steps down by one and never returns to the starting level before T
* III U-shape of depth exactly one (down then back up)
* IV  canyon: returns to the starting level after a non-constant excursion
      at least one below it
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cost import CostModel
from .errors import NotACriticalSegment
from .trace import CountFunction


class SegmentType(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    kind: SegmentType
    anchor_level: int  # a(start)

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class CriticalDecomposition:
    critical_times: tuple[float, ...]
    segments: tuple[Segment, ...]

    def to_jsonable(self) -> dict:
        return {
            "critical_times": list(self.critical_times),
            "segments": [
                {
                    "start": s.start,
                    "end": s.end,
                    "type": s.kind.value,
                    "anchor_level": s.anchor_level,
                }
                for s in self.segments
            ],
        }


@dataclass(frozen=True)
class EpochPairing:
    """Departure/arrival epoch pairs of a canyon segment.

    ``pairs`` lists every departure epoch in the segment with the first later
    arrival returning to its level.  ``selected`` is the greedy sublist whose
    gaps satisfy beta_on+beta_off >= P*(arrival-departure); the scan resumes
    after each selected pair, so nested pairs inside a selection are skipped.
    """

    pairs: tuple[tuple[float, float], ...]
    selected: tuple[tuple[float, float], ...]


class _EpochIndex:
    """Sorted lookup tables over a count function's epochs and pieces.

    Pieces are numbered 0..P-1 with bounds[k] and bounds[k+1] around value
    vals[k]; departures and per-level arrival times support the inductive
    next-critical-time searches in O(log E).
    """

    def __init__(self, a: CountFunction):
        if not a.has_unit_steps():
            raise NotACriticalSegment("decomposition requires unit arrival/departure steps")
        self.bounds = np.concatenate(([0.0], np.asarray(a.times), [a.horizon]))
        self.vals = np.concatenate(([a.initial_value], np.asarray(a.values, dtype=int)))
        if a.times and a.times[-1] == a.horizon:
            # event exactly at the horizon: no piece after it
            self.bounds = self.bounds[:-1]
            self.vals = self.vals[: len(self.bounds) - 1]
        signs = a.step_signs()
        self.departures = np.asarray([t for t, s in zip(a.times, signs) if s == -1])
        arrivals: dict[int, list[float]] = {}
        for t, s, v in zip(a.times, signs, a.values):
            if s == 1:
                arrivals.setdefault(v, []).append(t)  # post-arrival value = epoch value
        self.arrivals_by_level = {lvl: np.asarray(ts) for lvl, ts in arrivals.items()}
        # suffix_max[k] = max piece value from piece k on, including the tail
        self.suffix_max = np.maximum.accumulate(self.vals[::-1])[::-1]

    def first_departure_after(self, t: float) -> float | None:
        i = int(np.searchsorted(self.departures, t, side="right"))
        return float(self.departures[i]) if i < len(self.departures) else None

    def first_return_after(self, t: float, level: int) -> float | None:
        ts = self.arrivals_by_level.get(level)
        if ts is None:
            return None
        i = int(np.searchsorted(ts, t, side="right"))
        return float(ts[i]) if i < len(ts) else None

    def piece_range(self, start: float, end: float) -> tuple[int, int]:
        """Indices [k0, k1) of pieces overlapping the open interval (start, end)."""
        k0 = int(np.searchsorted(self.bounds, start, side="right")) - 1
        if self.bounds[k0 + 1] <= start:  # piece ending exactly at start
            k0 += 1
        k1 = int(np.searchsorted(self.bounds, end, side="left"))
        return k0, min(k1, len(self.vals))


def _index(a: CountFunction) -> _EpochIndex:
    # cached on the instance; repeated hashing of large tuples is too dear
    idx = a.__dict__.get("_epoch_index")
    if idx is None:
        idx = _EpochIndex(a)
        object.__setattr__(a, "_epoch_index", idx)
    return idx


def decompose(a: CountFunction) -> CriticalDecomposition:
    """Cut [0, T] into critical segments and classify each one."""
    idx = _index(a)
    times = [0.0]
    kind_is_arrival = True  # t=0 is treated as an arrival epoch
    cur = 0.0
    while True:
        if kind_is_arrival:
            nxt = idx.first_departure_after(cur)
            next_is_arrival = False
        else:
            nxt = idx.first_return_after(cur, a.value_at(cur))
            next_is_arrival = True
            if nxt is None:
                nxt = idx.first_departure_after(cur)
                next_is_arrival = False
        if nxt is None:
            if cur < a.horizon:
                times.append(a.horizon)
            break
        times.append(nxt)
        cur, kind_is_arrival = nxt, next_is_arrival
        if cur >= a.horizon:
            break
    segments = tuple(
        Segment(s, e, classify(a, s, e), a.value_at(s))
        for s, e in zip(times, times[1:])
    )
    return CriticalDecomposition(tuple(times), segments)


def classify(a: CountFunction, start: float, end: float) -> SegmentType:
    """Classify a critical segment by re-checking its shape predicate.

    Epoch values at interior breakpoints are maxes of adjacent pieces, so the
    ordered piece values alone decide every predicate.
    """
    if not 0.0 <= start < end <= a.horizon:
        raise NotACriticalSegment(f"bad interval [{start}, {end}]")
    idx = _index(a)
    a_s, a_e = a.value_at(start), a.value_at(end)
    k0, k1 = idx.piece_range(start, end)
    inner = idx.vals[k0:k1]

    seq = np.concatenate(([a_s], inner, [a_e]))
    if np.all(seq[:-1] <= seq[1:]):
        return SegmentType.I
    if a_e == a_s and np.all(inner == a_s - 1):
        return SegmentType.III
    if a_e == a_s and np.all(inner <= a_s - 1) and len(np.unique(inner)) > 1:
        return SegmentType.IV
    # Step-decreasing: one below the anchor through the segment end, and the
    # count never climbs back to the anchor level anywhere up to T.
    if a_e == a_s - 1 and np.all(inner == a_s - 1):
        after = int(np.searchsorted(idx.bounds[1:], end, side="right"))
        tail_max = idx.suffix_max[after] if after < len(idx.suffix_max) else a.final_value
        if max(tail_max, a.final_value) <= a_s - 1:
            return SegmentType.II
    raise NotACriticalSegment(f"[{start}, {end}] matches no segment shape")


def corresponding_arrival(a: CountFunction, departure: float) -> float | None:
    """First arrival epoch after a departure returning to its count level."""
    return _index(a).first_return_after(departure, a.value_at(departure))


def pair_epochs(a: CountFunction, segment: Segment, m: CostModel) -> EpochPairing:
    """Greedy pair selection inside a canyon segment.

    A pair (tau, tau') is selected when holding through it is no dearer than
    an off/on cycle: beta_on+beta_off >= P*(tau'-tau), closed comparison.
    """
    idx = _index(a)
    d0 = int(np.searchsorted(idx.departures, segment.start, side="left"))
    d1 = int(np.searchsorted(idx.departures, segment.end, side="left"))
    pairs = []
    for tau in idx.departures[d0:d1]:
        tau2 = idx.first_return_after(float(tau), a.value_at(float(tau)))
        if tau2 is not None and tau2 <= segment.end:
            pairs.append((float(tau), tau2))
    beta = m.beta_on + m.beta_off
    selected = []
    resume = segment.start
    for tau, tau2 in pairs:
        if tau < resume:
            continue
        if beta >= m.power * (tau2 - tau):
            selected.append((tau, tau2))
            resume = tau2
    return EpochPairing(tuple(pairs), tuple(selected))
