"""Offline-optimal schedules: segment-wise construction, the per-segment
lower bound, and an exhaustive DP oracle for desk-scale verification.

An optimal schedule only changes value at event epochs (holding cost is
linear in duration) and never exceeds the running peak, which bounds the DP
state space.  Down-steps at a breakpoint mean "drop just after t" and
up-steps "rise completing at t"; toggles are attributed to segments
accordingly when splitting costs.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .cost import CostModel, StepSchedule
from .errors import CapExceeded
from .segments import CriticalDecomposition, Segment, SegmentType, decompose, pair_epochs
from .trace import CountFunction, FluidTrace


@dataclass(frozen=True)
class OptimalSchedule:
    schedule: StepSchedule
    per_segment_costs: tuple[float, ...]
    total: float
    decomposition: CriticalDecomposition

    def to_jsonable(self) -> dict:
        return {
            "schedule": self.schedule.to_jsonable(),
            "per_segment_costs": list(self.per_segment_costs),
            "total": self.total,
        }


def construct_optimal(a: CountFunction, m: CostModel) -> OptimalSchedule:
    """Build the optimal schedule segment by segment.

    Non-decreasing and step-decreasing segments track the workload exactly.
    A U-shape dips one server iff an off/on cycle is cheaper than idling
    through it.  A canyon either holds at its anchor level (cycle at least as
    dear as idling the whole segment) or tracks the workload except across
    greedily selected departure/arrival pairs, which are held through.
    """
    deco = decompose(a)
    beta = m.beta_on + m.beta_off
    steps: list[tuple[float, int]] = []
    for i, seg in enumerate(deco.segments):
        steps.extend(_segment_steps(a, seg, m, beta, last=i == len(deco.segments) - 1))
    schedule = StepSchedule.from_steps(a.horizon, a.initial_value, steps)
    per_segment = _split_costs(schedule, deco, m)
    return OptimalSchedule(schedule, tuple(per_segment), math.fsum(per_segment), deco)


def _a_steps_within(a: CountFunction, seg: Segment, last: bool) -> list[tuple[float, int]]:
    """Steps of a owned by the segment: down-steps drop just after their
    epoch, so a drop at the segment end belongs to the next segment; rises
    complete at their epoch, so a rise at the segment start belongs to the
    previous one.  A drop exactly at T stays with the last segment."""
    lo = bisect.bisect_left(a.times, seg.start)
    hi = bisect.bisect_right(a.times, seg.end)
    steps = []
    for k in range(lo, hi):
        t, v = a.times[k], a.values[k]
        prev = a.values[k - 1] if k else a.initial_value
        if v < prev:
            if seg.start <= t < seg.end or (last and t == seg.end):
                steps.append((t, v))
        elif seg.start < t <= seg.end:
            steps.append((t, v))
    return steps


def _segment_steps(
    a: CountFunction, seg: Segment, m: CostModel, beta: float, last: bool
) -> list[tuple[float, int]]:
    if seg.kind in (SegmentType.I, SegmentType.II):
        return _a_steps_within(a, seg, last)
    if beta >= m.power * seg.length:
        return []  # hold at the anchor level through the segment
    if seg.kind == SegmentType.III:
        return _a_steps_within(a, seg, last)  # dip of depth one
    pairing = pair_epochs(a, seg, m)
    steps, p = [], 0
    for t, v in _a_steps_within(a, seg, last):
        while p < len(pairing.selected) and pairing.selected[p][1] <= t:
            p += 1
        if p < len(pairing.selected) and pairing.selected[p][0] <= t < pairing.selected[p][1]:
            continue  # held through a selected pair
        steps.append((t, v))
    return steps


def _split_costs(x: StepSchedule, deco: CriticalDecomposition, m: CostModel) -> list[float]:
    """Energy plus toggles per segment; a down-step at t belongs to the
    segment starting at or before t (the drop happens just after t), an
    up-step to the segment ending at or after it."""
    cuts = deco.critical_times
    nseg = len(deco.segments)
    terms: list[list[float]] = [[] for _ in range(nseg)]
    i = 0
    for lo, hi, v in x.pieces():
        while i + 1 < nseg and cuts[i + 1] <= lo:
            i += 1
        j = i
        while j < nseg:
            lo_j, hi_j = max(lo, cuts[j]), min(hi, cuts[j + 1])
            if hi_j > lo_j:
                terms[j].append(m.power * v * (hi_j - lo_j))
            if cuts[j + 1] >= hi:
                break
            j += 1
    for t, prev, v in x.steps():
        if v < prev:
            cost, down = m.beta_off * (prev - v), True
        else:
            cost, down = m.beta_on * (v - prev), False
        terms[_segment_at(cuts, t, down, nseg)].append(cost)
    return [math.fsum(part) for part in terms]


def _segment_at(cuts: tuple[float, ...], t: float, down: bool, nseg: int) -> int:
    # down-steps live in [cut_i, cut_{i+1}), up-steps in (cut_i, cut_{i+1}];
    # a down-step exactly at T belongs to the last segment
    if down:
        i = bisect.bisect_right(cuts, t) - 1
    else:
        i = bisect.bisect_left(cuts, t) - 1
    return min(max(i, 0), nseg - 1)


def dp_oracle(
    a: CountFunction, m: CostModel, max_epochs: int = 24, max_level: int = 8
) -> tuple[float, StepSchedule]:
    """Exact minimum cost over integer schedules constant between epochs.

    States range over [a(t), peak(a)] per piece with boundary values pinned
    to a at 0 and T; transition cost beta_on per rise and beta_off per fall;
    ties broken toward smaller x.  Raises CapExceeded beyond the caps.
    """
    _check_caps(a, max_epochs, max_level)
    pieces = list(a.pieces())
    cost, levels = _dp_levels(pieces, a.initial_value, a.final_value, m, a.peak())
    steps = [(lo, v) for (lo, _, _), v in zip(pieces, levels) if lo > 0.0]
    if levels[-1] != a.final_value:
        steps.append((a.horizon, a.final_value))
    return cost, StepSchedule.from_steps(a.horizon, a.initial_value, steps)


def lower_bound(a: CountFunction, m: CostModel, max_epochs: int = 24, max_level: int = 8) -> float:
    """Sum of the sub-problem optima over critical segments, each solved by
    the DP oracle restricted to the segment with x pinned to a at both ends."""
    _check_caps(a, max_epochs, max_level)
    deco = decompose(a)
    peak = a.peak()
    parts = []
    for i, seg in enumerate(deco.segments):
        pieces = [
            (max(lo, seg.start), min(hi, seg.end), v)
            for lo, hi, v in a.pieces()
            if hi > seg.start and lo < seg.end
        ]
        last = i == len(deco.segments) - 1
        end_value = a.final_value if last else a.value_at(seg.end)
        cost, _ = _dp_levels(pieces, a.value_at(seg.start), end_value, m, peak)
        parts.append(cost)
    return math.fsum(parts)


def _check_caps(a: CountFunction, max_epochs: int, max_level: int) -> None:
    if len(a.times) > max_epochs:
        raise CapExceeded(f"{len(a.times)} epochs exceeds cap {max_epochs}")
    if a.peak() > max_level:
        raise CapExceeded(f"peak level {a.peak()} exceeds cap {max_level}")


def _toggle(m: CostModel, u: int, v: int) -> float:
    return m.beta_on * max(v - u, 0) + m.beta_off * max(u - v, 0)


def _dp_levels(
    pieces: list[tuple[float, float, int]],
    start_value: int,
    end_value: int,
    m: CostModel,
    peak: int,
) -> tuple[float, list[int]]:
    INF = math.inf
    lo0, hi0, req0 = pieces[0]
    cur = [
        _toggle(m, start_value, v) + m.power * v * (hi0 - lo0) if v >= req0 else INF
        for v in range(peak + 1)
    ]
    choices: list[list[int]] = []
    for lo, hi, req in pieces[1:]:
        nxt = [INF] * (peak + 1)
        pick = [0] * (peak + 1)
        for v in range(req, peak + 1):
            best, best_u = INF, 0
            for u in range(peak + 1):
                if cur[u] == INF:
                    continue
                c = cur[u] + _toggle(m, u, v)
                if c < best:
                    best, best_u = c, u
            nxt[v] = best + m.power * v * (hi - lo)
            pick[v] = best_u
        choices.append(pick)
        cur = nxt

    best, best_v = INF, 0
    for v in range(peak + 1):
        if cur[v] == INF:
            continue
        c = cur[v] + _toggle(m, v, end_value)
        if c < best:
            best, best_v = c, v
    levels = [best_v]
    for pick in reversed(choices):
        levels.append(pick[levels[-1]])
    levels.reverse()
    return best, levels


def fluid_dp_oracle(trace: FluidTrace, m: CostModel, max_level: int = 4096) -> tuple[float, StepSchedule]:
    """Exact minimum cost for a slotted workload over per-slot integer levels.

    Same boundary/transition conventions as dp_oracle; vectorized over levels
    so week-long traces with ~100-server peaks stay cheap.
    """
    reqs = trace.required_servers()
    peak = max(reqs)
    if peak > max_level:
        raise CapExceeded(f"peak level {peak} exceeds cap {max_level}")
    s = trace.slot_duration
    n = len(reqs)
    lv = np.arange(peak + 1)
    toggle = m.beta_on * np.maximum(lv[None, :] - lv[:, None], 0) + m.beta_off * np.maximum(
        lv[:, None] - lv[None, :], 0
    )  # [from, to]

    cur = np.where(lv >= reqs[0], toggle[reqs[0]] + m.power * lv * s, np.inf)
    picks = np.zeros((n, peak + 1), dtype=np.int32)
    for j in range(1, n):
        via = cur[:, None] + toggle
        best_from = np.argmin(via, axis=0)  # first index wins ties: smaller level
        cur = via[best_from, lv] + m.power * lv * s
        cur = np.where(lv >= reqs[j], cur, np.inf)
        picks[j] = best_from
    closing = cur + toggle[:, reqs[-1]]
    last = int(np.argmin(closing))
    total = float(closing[last])

    levels = [last]
    for j in range(n - 1, 0, -1):
        levels.append(int(picks[j][levels[-1]]))
    levels.reverse()
    assert levels[0] == reqs[0], "opening level above the requirement is never optimal"
    steps = [(j * s, v) for j, v in enumerate(levels) if j > 0]
    if levels[-1] != reqs[-1]:
        steps.append((n * s, reqs[-1]))
    return total, StepSchedule.from_steps(n * s, levels[0], steps)
