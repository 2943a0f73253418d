"""Cost model, integer step schedules, and evaluation of server operation cost.

A schedule x(t) shares the count function's epoch convention: the stored value
holds on the open interval after its breakpoint, and pointwise evaluation at a
breakpoint takes the max of the one-sided limits.  A breakpoint therefore
encodes "rise completing at t" for up-steps and "drop just after t" for
down-steps, which is what lets x touch a(t) at a departure epoch and still dip
immediately afterwards.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import Infeasible, MalformedTrace
from .trace import CountFunction, FluidTrace, required_servers

COMPARE_TOL = 1e-9


@dataclass(frozen=True)
class CostModel:
    """Energy price P per server-time-unit plus per-toggle wear costs."""

    power: float
    beta_on: float = 0.0
    beta_off: float = 0.0

    def __post_init__(self):
        if not (self.power > 0 and math.isfinite(self.power)):
            raise ValueError(f"power must be positive, got {self.power}")
        if self.beta_on < 0 or self.beta_off < 0:
            raise ValueError("toggle costs must be >= 0")

    @property
    def delta(self) -> float:
        """Break-even empty-period length: idling this long costs one off/on cycle."""
        return (self.beta_on + self.beta_off) / self.power

    @classmethod
    def from_json(cls, text: str) -> "CostModel":
        doc = json.loads(text)
        unknown = set(doc) - {"power", "beta_on", "beta_off"}
        if unknown:
            raise ValueError(f"unknown cost model keys: {sorted(unknown)}")
        return cls(float(doc["power"]), float(doc.get("beta_on", 0.0)), float(doc.get("beta_off", 0.0)))

    def to_json(self) -> str:
        return json.dumps(
            {"power": self.power, "beta_on": self.beta_on, "beta_off": self.beta_off},
            sort_keys=True,
        )


@dataclass(frozen=True)
class StepSchedule:
    """Canonical integer step function on [0, T].

    Breakpoint times are strictly increasing in (0, T] and consecutive values
    differ.  ``values[i]`` holds after ``times[i]``.
    """

    horizon: float
    initial_value: int
    times: tuple[float, ...] = ()
    values: tuple[int, ...] = ()

    def __post_init__(self):
        if self.horizon < 0:
            raise MalformedTrace("horizon must be >= 0")
        if self.initial_value < 0:
            raise MalformedTrace("negative server count")
        prev_t, prev_v = 0.0, self.initial_value
        for t, v in zip(self.times, self.values, strict=True):
            if not 0.0 < t <= self.horizon:
                raise MalformedTrace(f"breakpoint {t} outside (0, T]")
            if t <= prev_t:
                raise MalformedTrace("breakpoints not strictly increasing")
            if v < 0:
                raise MalformedTrace("negative server count")
            if v == prev_v:
                raise MalformedTrace("consecutive equal values; not canonical")
            prev_t, prev_v = t, v

    @classmethod
    def from_steps(cls, horizon: float, initial_value: int, steps: Iterable[tuple[float, int]]) -> "StepSchedule":
        """Build from (time, new value) pairs, dropping no-op steps."""
        times, values = [], []
        prev = initial_value
        for t, v in sorted(steps):
            if v != prev:
                times.append(t)
                values.append(v)
                prev = v
        return cls(horizon, initial_value, tuple(times), tuple(values))

    @classmethod
    def from_deltas(cls, horizon: float, initial_value: int, deltas: Iterable[tuple[float, int]]) -> "StepSchedule":
        """Build from (time, +/-k) toggles; same-time deltas are summed."""
        merged: dict[float, int] = {}
        for t, d in deltas:
            merged[t] = merged.get(t, 0) + d
        level, steps = initial_value, []
        for t in sorted(merged):
            if merged[t]:
                level += merged[t]
                steps.append((t, level))
        return cls.from_steps(horizon, initial_value, steps)

    def value_at(self, t: float) -> int:
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        i = bisect.bisect_left(self.times, t)
        left = self.initial_value if i == 0 else self.values[i - 1]
        if i < len(self.times) and self.times[i] == t:
            return max(left, self.values[i])
        return left

    @property
    def final_value(self) -> int:
        return self.values[-1] if self.values else self.initial_value

    def pieces(self) -> Iterator[tuple[float, float, int]]:
        start, value = 0.0, self.initial_value
        for t, v in zip(self.times, self.values):
            yield start, t, value
            start, value = t, v
        if start < self.horizon:
            yield start, self.horizon, value

    def steps(self) -> Iterator[tuple[float, int, int]]:
        """Yield (time, old value, new value) per breakpoint."""
        prev = self.initial_value
        for t, v in zip(self.times, self.values):
            yield t, prev, v
            prev = v

    def to_jsonable(self) -> dict:
        return {
            "horizon": self.horizon,
            "initial_value": self.initial_value,
            "breakpoints": [[t, v] for t, v in zip(self.times, self.values)],
        }


@dataclass(frozen=True)
class CostBreakdown:
    energy: float
    turn_on: float
    turn_off: float
    total: float

    @classmethod
    def of(cls, energy: float, turn_on: float, turn_off: float) -> "CostBreakdown":
        return cls(energy, turn_on, turn_off, energy + turn_on + turn_off)

    def to_jsonable(self) -> dict:
        return {
            "energy": self.energy,
            "turn_on": self.turn_on,
            "turn_off": self.turn_off,
            "total": self.total,
        }


def integrate(x: StepSchedule) -> float:
    """Exact integral of the step function over [0, T]."""
    return math.fsum(v * (end - start) for start, end, v in x.pieces())


def toggle_costs(x: StepSchedule, m: CostModel) -> tuple[float, float]:
    """(turn_on, turn_off) wear cost: beta times the summed rise/fall amounts."""
    rises = math.fsum(max(v - prev, 0) for _, prev, v in x.steps())
    falls = math.fsum(max(prev - v, 0) for _, prev, v in x.steps())
    return m.beta_on * rises, m.beta_off * falls


def _merged_pieces(x: StepSchedule, a: CountFunction) -> Iterator[tuple[float, float, int, int]]:
    cuts = sorted({0.0, x.horizon, *x.times, *a.times})
    xi = ai = 0
    xv, av = x.initial_value, a.initial_value
    for lo, hi in zip(cuts, cuts[1:]):
        while xi < len(x.times) and x.times[xi] <= lo:
            xv = x.values[xi]
            xi += 1
        while ai < len(a.times) and a.times[ai] <= lo:
            av = a.values[ai]
            ai += 1
        yield lo, hi, xv, av


def evaluate(x: StepSchedule, a: CountFunction, m: CostModel) -> CostBreakdown:
    """Cost of a schedule against a workload, enforcing feasibility.

    Raises Infeasible at the first time x(t) < a(t), or on a boundary
    mismatch: x(0) must equal a(0) and the closing (post-event) values must
    agree at T.  Using closing values at T keeps x = a feasible when the last
    event sits exactly at the horizon, and forces an idle server left over at
    T to book its shutdown inside [0, T].
    """
    if abs(x.horizon - a.horizon) > COMPARE_TOL:
        raise Infeasible(f"domains differ: {x.horizon} vs {a.horizon}")
    if x.initial_value != a.initial_value:
        raise Infeasible(f"x(0)={x.initial_value} != a(0)={a.initial_value}", time=0.0)
    for lo, _hi, xv, av in _merged_pieces(x, a):
        if xv < av:
            raise Infeasible(f"x={xv} below a={av}", time=lo)
    if x.final_value != a.final_value:
        raise Infeasible(
            f"x(T)={x.final_value} != a(T)={a.final_value}", time=x.horizon
        )
    energy = m.power * integrate(x)
    on, off = toggle_costs(x, m)
    return CostBreakdown.of(energy, on, off)


def static_benchmark(a: CountFunction | FluidTrace, m: CostModel) -> float:
    """Cost of provisioning a constant fleet sized to the peak: peak * P * T.

    Fluid peaks are rounded up to whole servers; no toggles occur.
    """
    if isinstance(a, FluidTrace):
        peak = required_servers(max(a.loads))
        horizon = a.horizon
    else:
        peak = a.peak()
        horizon = a.horizon
    return peak * m.power * horizon
