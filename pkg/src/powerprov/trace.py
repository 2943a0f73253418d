"""Workload representations: event ("brick") traces, slotted ("fluid") traces,
and the piecewise-constant job-count function shared by the schedulers.

Conventions used everywhere downstream:

* Event times live in (0, T]; t=0 state is given by ``initial_jobs``.
* At an event epoch the count function evaluates to the max of its one-sided
  limits, so an arrival counts at its own epoch and a departing job still
  counts at its departure epoch.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import (
    InvalidTarget,
    MalformedTrace,
    SimultaneousEvents,
    UnknownJob,
    Unreachable,
    ZeroMean,
)

ARRIVE = "arrive"
DEPART = "depart"

# Achieved-ratio tolerance for rescale_pmr; the mean is preserved exactly
# up to float rounding by construction.
_PMR_ATOL = 1e-3


class Event(NamedTuple):
    time: float
    kind: str  # ARRIVE | DEPART
    job_id: str


class ResolvedEvent(NamedTuple):
    """Event with the departure identity bound to a concrete job key.

    ``job_key`` is the original job_id for jobs introduced by an arrival and
    ``("init", i)`` for the i-th anonymous initial job.
    """

    time: float
    kind: str
    job_key: object


@dataclass(frozen=True)
class EventTrace:
    """Continuous-time workload: one job per server, arrivals and departures.

    ``initial_jobs`` are anonymous jobs already running at t=0.  A departure
    row naming an id never introduced by an arrival binds (first-come first)
    to one of them; once all initial jobs are bound, unknown ids are errors.
    """

    initial_jobs: int
    events: tuple[Event, ...]
    horizon: float

    def __post_init__(self):
        validate_events(self.initial_jobs, self.events, self.horizon)

    @property
    def final_jobs(self) -> int:
        n = self.initial_jobs
        for ev in self.events:
            n += 1 if ev.kind == ARRIVE else -1
        return n

    def resolved_events(self) -> tuple[ResolvedEvent, ...]:
        return _resolve(self.initial_jobs, self.events)


@dataclass(frozen=True)
class FluidTrace:
    """Slotted workload: average load per slot, splittable across servers."""

    slot_duration: float
    loads: tuple[float, ...]

    def __post_init__(self):
        if self.slot_duration <= 0:
            raise MalformedTrace("slot_duration must be positive")
        if not self.loads:
            raise MalformedTrace("fluid trace has no slots")
        for j, load in enumerate(self.loads):
            if not math.isfinite(load) or load < 0:
                raise MalformedTrace(f"negative or non-finite load {load}", row=j)

    @property
    def horizon(self) -> float:
        return self.slot_duration * len(self.loads)

    def required_servers(self) -> tuple[int, ...]:
        """Integer servers per slot: ceil(load), tolerant of float fuzz."""
        return tuple(required_servers(v) for v in self.loads)


def required_servers(load: float) -> int:
    if load <= 1e-9:
        return 0
    return int(math.ceil(load - 1e-9))


def validate_events(initial_jobs: int, events: Sequence[Event], horizon: float) -> None:
    if initial_jobs < 0:
        raise MalformedTrace(f"initial_jobs must be >= 0, got {initial_jobs}")
    if not math.isfinite(horizon) or horizon <= 0:
        raise MalformedTrace(f"horizon must be positive, got {horizon}")
    _resolve(initial_jobs, events, horizon=horizon)


def _resolve(
    initial_jobs: int,
    events: Sequence[Event],
    horizon: float | None = None,
) -> tuple[ResolvedEvent, ...]:
    """Validate event ordering/identities and bind initial-job departures."""
    active: dict[object, object] = {}  # job_key -> job_key (set semantics)
    seen_ids: set[str] = set()
    unbound_init = list(range(initial_jobs))
    resolved = []
    prev_time = 0.0
    for row, ev in enumerate(events):
        if not math.isfinite(ev.time) or ev.time <= 0:
            raise MalformedTrace(f"event time must be in (0, T], got {ev.time}", row=row)
        if horizon is not None and ev.time > horizon:
            raise MalformedTrace(f"event time {ev.time} beyond horizon {horizon}", row=row)
        if ev.time < prev_time:
            raise MalformedTrace("events not sorted by time", row=row)
        if ev.time == prev_time and row > 0:
            raise SimultaneousEvents(f"duplicate timestamp {ev.time}", row=row)
        prev_time = ev.time
        if ev.kind == ARRIVE:
            if ev.job_id in seen_ids:
                raise MalformedTrace(f"job id reused: {ev.job_id!r}", row=row)
            seen_ids.add(ev.job_id)
            active[ev.job_id] = ev.job_id
            resolved.append(ResolvedEvent(ev.time, ARRIVE, ev.job_id))
        elif ev.kind == DEPART:
            if ev.job_id in active:
                key = ev.job_id
            elif ev.job_id not in seen_ids and unbound_init:
                key = ("init", unbound_init.pop(0))
                seen_ids.add(ev.job_id)
            else:
                raise UnknownJob(f"departure of inactive job {ev.job_id!r}", row=row)
            active.pop(key, None)
            resolved.append(ResolvedEvent(ev.time, DEPART, key))
        else:
            raise MalformedTrace(f"unknown event kind {ev.kind!r}", row=row)
    for i in unbound_init:
        active[("init", i)] = None
    return tuple(resolved)


@dataclass(frozen=True)
class CountFunction:
    """Piecewise-constant job count a(t) on [0, T].

    ``values[i]`` holds on the open interval after ``times[i]``; pointwise
    evaluation at a breakpoint takes the max of the one-sided limits.
    """

    horizon: float
    initial_value: int
    times: tuple[float, ...] = field(default=())
    values: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.horizon <= 0:
            raise MalformedTrace("horizon must be positive")
        if self.initial_value < 0:
            raise MalformedTrace("negative initial count")
        prev_t, prev_v = 0.0, self.initial_value
        for t, v in zip(self.times, self.values, strict=True):
            if not 0.0 < t <= self.horizon:
                raise MalformedTrace(f"breakpoint {t} outside (0, T]")
            if t <= prev_t:
                raise MalformedTrace("breakpoints not strictly increasing")
            if v < 0:
                raise MalformedTrace("negative count")
            if v == prev_v:
                raise MalformedTrace("consecutive equal values; not canonical")
            prev_t, prev_v = t, v

    def value_at(self, t: float) -> int:
        """a(t) with the max-of-limits rule at breakpoints."""
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        i = bisect.bisect_left(self.times, t)
        left = self.initial_value if i == 0 else self.values[i - 1]
        if i < len(self.times) and self.times[i] == t:
            return max(left, self.values[i])
        return left

    def pieces(self) -> Iterator[tuple[float, float, int]]:
        """Yield (start, end, value) open intervals covering [0, T]."""
        start, value = 0.0, self.initial_value
        for t, v in zip(self.times, self.values):
            yield start, t, value
            start, value = t, v
        if start < self.horizon:
            yield start, self.horizon, value

    @property
    def final_value(self) -> int:
        return self.values[-1] if self.values else self.initial_value

    def boundary_value(self) -> int:
        """a(T) under the max-of-limits rule."""
        return self.value_at(self.horizon)

    def peak(self) -> int:
        return max(self.initial_value, max(self.values, default=0))

    def total_variation(self) -> int:
        prev, tv = self.initial_value, 0
        for v in self.values:
            tv += abs(v - prev)
            prev = v
        return tv

    def has_unit_steps(self) -> bool:
        prev = self.initial_value
        for v in self.values:
            if abs(v - prev) != 1:
                return False
            prev = v
        return True

    def step_signs(self) -> tuple[int, ...]:
        """+1 for each up-step breakpoint, -1 for each down-step."""
        prev, signs = self.initial_value, []
        for v in self.values:
            signs.append(1 if v > prev else -1)
            prev = v
        return tuple(signs)


def count_function(trace: EventTrace) -> CountFunction:
    """Job count a(t) of an event trace."""
    times, values = [], []
    n = trace.initial_jobs
    for ev in trace.events:
        n += 1 if ev.kind == ARRIVE else -1
        times.append(ev.time)
        values.append(n)
    return CountFunction(trace.horizon, trace.initial_jobs, tuple(times), tuple(values))


def fluid_count_function(trace: FluidTrace) -> CountFunction:
    """Integer server requirement per slot as a count function (may jump by >1)."""
    reqs = trace.required_servers()
    times, values = [], []
    prev = reqs[0]
    for j in range(1, len(reqs)):
        if reqs[j] != prev:
            times.append(j * trace.slot_duration)
            values.append(reqs[j])
            prev = reqs[j]
    return CountFunction(trace.horizon, reqs[0], tuple(times), tuple(values))


# ---------------------------------------------------------------------------
# CSV ingestion.  Format: '#'-prefixed comment lines are ignored, except that
# '# key: value' comments before the header may set metadata
# (initial_jobs, horizon, horizon_margin, slot_duration).
# ---------------------------------------------------------------------------

def _split_lines(text: str) -> tuple[dict[str, str], list[tuple[int, str]]]:
    meta: dict[str, str] = {}
    rows: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, val = body.partition(":")
                meta.setdefault(key.strip().lower(), val.strip())
            continue
        rows.append((lineno, raw))
    return meta, rows


def parse_event_trace(
    text: str,
    initial_jobs: int | None = None,
    horizon: float | None = None,
) -> EventTrace:
    """Parse a `time,event,job_id` CSV document into an EventTrace.

    Explicit arguments win over `# initial_jobs:` / `# horizon:` /
    `# horizon_margin:` metadata comments.  The horizon defaults to the last
    event time (plus the margin, when given).
    """
    meta, rows = _split_lines(text)
    if not rows:
        raise MalformedTrace("empty trace document")
    header_line, payload = rows[0], rows[1:]
    header = [h.strip() for h in header_line[1].split(",")]
    if header != ["time", "event", "job_id"]:
        raise MalformedTrace(f"expected header 'time,event,job_id', got {header_line[1]!r}", row=header_line[0])

    events = []
    for lineno, raw in payload:
        fields = next(csv.reader(io.StringIO(raw)))
        if len(fields) != 3:
            raise MalformedTrace(f"expected 3 fields, got {len(fields)}", row=lineno)
        t_str, kind, job_id = (f.strip() for f in fields)
        try:
            t = float(t_str)
        except ValueError:
            raise MalformedTrace(f"bad time {t_str!r}", row=lineno) from None
        if kind not in (ARRIVE, DEPART):
            raise MalformedTrace(f"event must be arrive|depart, got {kind!r}", row=lineno)
        events.append(Event(t, kind, job_id))

    if initial_jobs is None:
        initial_jobs = int(meta.get("initial_jobs", "0"))
    if horizon is None:
        if "horizon" in meta:
            horizon = float(meta["horizon"])
        elif events:
            horizon = events[-1].time + float(meta.get("horizon_margin", "0"))
        else:
            raise MalformedTrace("no events and no horizon metadata")
    return EventTrace(initial_jobs, tuple(events), horizon)


def serialize_event_trace(trace: EventTrace) -> str:
    """Canonical CSV form; parse(serialize(t)) == t and data rows round-trip."""
    out = [f"# initial_jobs: {trace.initial_jobs}", f"# horizon: {trace.horizon!r}"]
    out.append("time,event,job_id")
    for ev in trace.events:
        out.append(f"{ev.time!r},{ev.kind},{ev.job_id}")
    return "\n".join(out) + "\n"


def parse_fluid_trace(text: str, slot_duration: float | None = None) -> FluidTrace:
    """Parse a `slot,load` CSV document (contiguous slot indices from 0)."""
    meta, rows = _split_lines(text)
    if not rows:
        raise MalformedTrace("empty trace document")
    header_line, payload = rows[0], rows[1:]
    header = [h.strip() for h in header_line[1].split(",")]
    if header != ["slot", "load"]:
        raise MalformedTrace(f"expected header 'slot,load', got {header_line[1]!r}", row=header_line[0])
    loads = []
    for expected, (lineno, raw) in enumerate(payload):
        fields = [f.strip() for f in raw.split(",")]
        if len(fields) != 2:
            raise MalformedTrace(f"expected 2 fields, got {len(fields)}", row=lineno)
        try:
            slot, load = int(fields[0]), float(fields[1])
        except ValueError:
            raise MalformedTrace(f"bad row {raw!r}", row=lineno) from None
        if slot != expected:
            raise MalformedTrace(f"slot indices must be contiguous from 0; expected {expected}, got {slot}", row=lineno)
        if load < 0:
            raise MalformedTrace(f"negative load {load}", row=lineno)
        loads.append(load)
    if not loads:
        raise MalformedTrace("fluid trace has no slots")
    if slot_duration is None:
        slot_duration = float(meta.get("slot_duration", "1"))
    return FluidTrace(slot_duration, tuple(loads))


def serialize_fluid_trace(trace: FluidTrace) -> str:
    out = [f"# slot_duration: {trace.slot_duration!r}", "slot,load"]
    for j, load in enumerate(trace.loads):
        out.append(f"{j},{load!r}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Peak-to-mean ratio tooling.
# ---------------------------------------------------------------------------

def pmr(trace: FluidTrace) -> float:
    """Peak-to-mean ratio max(loads)/mean(loads)."""
    loads = np.asarray(trace.loads, dtype=float)
    mean = loads.mean()
    if mean <= 0:
        raise ZeroMean("all-zero trace has no peak-to-mean ratio")
    return float(loads.max() / mean)


def _scaled_power(loads: np.ndarray, gamma: float) -> np.ndarray:
    # (load/max)**gamma stays in [0, 1], so huge gammas cannot overflow
    scaled = loads / loads.max()
    return np.power(scaled, gamma, where=scaled > 0, out=np.zeros_like(scaled))


def _pmr_of_power(loads: np.ndarray, gamma: float) -> float:
    # PMR of loads**gamma; the mean-normalizing K cancels.
    powered = _scaled_power(loads, gamma)
    return float(len(loads) / powered.sum())


def rescale_pmr(trace: FluidTrace, target_pmr: float) -> FluidTrace:
    """Reshape loads as K*load**gamma, preserving the mean and hitting the
    target peak-to-mean ratio.

    gamma is found by bisection (the ratio is monotone increasing in gamma)
    and K renormalizes the mean.  Identity when the target equals the current
    ratio.
    """
    if target_pmr < 1.0:
        raise InvalidTarget(f"target PMR must be >= 1, got {target_pmr}")
    loads = np.asarray(trace.loads, dtype=float)
    mean = loads.mean()
    if mean <= 0:
        raise ZeroMean("cannot rescale an all-zero trace")
    current = float(loads.max() / mean)
    if abs(target_pmr - current) <= _PMR_ATOL * 1e-3:
        return trace
    if loads.max() == loads.min():
        raise Unreachable("constant trace cannot change its peak-to-mean ratio")

    lo, hi = 1.0, 1.0
    if target_pmr > current:
        while _pmr_of_power(loads, hi) < target_pmr:
            hi *= 2.0
            if hi > 1e6:
                raise Unreachable(f"target PMR {target_pmr} beyond this trace's reachable range")
    else:
        while _pmr_of_power(loads, lo) > target_pmr:
            lo /= 2.0
            if lo < 1e-9:
                raise Unreachable(f"target PMR {target_pmr} below this trace's reachable range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _pmr_of_power(loads, mid) < target_pmr:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    gamma = 0.5 * (lo + hi)
    powered = _scaled_power(loads, gamma)
    rescaled = mean * powered / powered.mean()
    out = FluidTrace(trace.slot_duration, tuple(float(v) for v in rescaled))
    if abs(pmr(out) - target_pmr) > _PMR_ATOL:
        raise Unreachable(f"bisection failed to reach PMR {target_pmr} (got {pmr(out)})")
    return out


# ---------------------------------------------------------------------------
# Synthetic traces (stand-in for non-redistributable production data).
# ---------------------------------------------------------------------------

SOJOURN_KINDS = ("exponential", "uniform", "fixed")
IDENTITY_POLICIES = ("fifo", "lifo", "random")


def synth_fluid_trace(
    n_slots: int,
    mean_load: float,
    target_pmr: float,
    seed: int,
    slot_duration: float = 1.0,
    cycles: int = 7,
) -> FluidTrace:
    """Diurnal-style synthetic slotted trace with a requested peak-to-mean ratio.

    Deterministic in (params, seed); the achieved ratio is within the
    bisection tolerance of ``target_pmr``.
    """
    if n_slots <= 1 or mean_load <= 0:
        raise InvalidTarget("need n_slots > 1 and mean_load > 0")
    rng = np.random.default_rng(seed)
    j = np.arange(n_slots)
    base = 1.2 + np.sin(2 * np.pi * cycles * j / n_slots)
    noise = np.exp(rng.normal(0.0, 0.25, size=n_slots))
    raw = FluidTrace(slot_duration, tuple(float(v) for v in base * noise))
    shaped = rescale_pmr(raw, target_pmr)
    scale = mean_load / (sum(shaped.loads) / n_slots)
    return FluidTrace(slot_duration, tuple(v * scale for v in shaped.loads))


def synth_event_trace(
    n_jobs: int,
    mean_load: float,
    seed: int,
    sojourn: str = "exponential",
    sojourn_scale: float = 1.0,
    departure_identity: str = "fifo",
    initial_jobs: int = 0,
) -> EventTrace:
    """Synthetic brick trace: Poisson arrivals, per-job sojourns, and a choice
    of which active job leaves at each departure epoch.

    The arrival/departure *times* depend only on (params, seed), never on
    ``departure_identity``, so permuting the identity policy keeps a(t) fixed.
    """
    if n_jobs <= 0 or mean_load <= 0:
        raise InvalidTarget("need n_jobs > 0 and mean_load > 0")
    if sojourn not in SOJOURN_KINDS:
        raise InvalidTarget(f"sojourn must be one of {SOJOURN_KINDS}")
    if departure_identity not in IDENTITY_POLICIES:
        raise InvalidTarget(f"departure_identity must be one of {IDENTITY_POLICIES}")
    rng = np.random.default_rng(seed)

    if sojourn == "exponential":
        sojourns = rng.exponential(sojourn_scale, size=n_jobs)
    elif sojourn == "uniform":
        sojourns = rng.uniform(0.5 * sojourn_scale, 1.5 * sojourn_scale, size=n_jobs)
    else:
        sojourns = np.full(n_jobs, sojourn_scale)
    mean_sojourn = float(np.mean(sojourns))
    rate = mean_load / mean_sojourn
    arrivals = np.cumsum(rng.exponential(1.0 / rate, size=n_jobs)) + 1e-6
    departures = np.sort(arrivals + sojourns)

    # Identity policy only relabels which job leaves; epochs stay fixed.
    id_rng = np.random.default_rng((seed, 1))
    merged = sorted(
        [(float(t), ARRIVE) for t in arrivals] + [(float(t), DEPART) for t in departures]
    )
    merged = _dedupe_times(merged)
    events: list[Event] = []
    active: list[str] = [f"init{i}" for i in range(initial_jobs)]
    next_id = 0
    for t, kind in merged:
        if kind == ARRIVE:
            job = f"j{next_id}"
            next_id += 1
            active.append(job)
            events.append(Event(t, ARRIVE, job))
        else:
            if departure_identity == "fifo":
                job = active.pop(0)
            elif departure_identity == "lifo":
                job = active.pop()
            else:
                job = active.pop(int(id_rng.integers(len(active))))
            events.append(Event(t, DEPART, job))
    horizon = events[-1].time
    # Initial jobs are anonymous in the trace; departures of "initN" ids bind.
    return EventTrace(initial_jobs, tuple(events), horizon)


def _dedupe_times(merged: list[tuple[float, str]]) -> list[tuple[float, str]]:
    # Float collisions are vanishingly rare; nudge forward to keep times strict.
    out: list[tuple[float, str]] = []
    for t, kind in merged:
        if out and t <= out[-1][0]:
            t = np.nextafter(out[-1][0], np.inf)
        out.append((t, kind))
    return out


def synth_trace(kind: str, params: dict, seed: int):
    """Dispatcher used by the CLI: kind 'brick' -> EventTrace, 'fluid' -> FluidTrace."""
    if kind == "fluid":
        return synth_fluid_trace(
            n_slots=int(params.get("n_slots", 1008)),
            mean_load=float(params.get("mean_load", 20.0)),
            target_pmr=float(params.get("target_pmr", 4.63)),
            seed=seed,
            slot_duration=float(params.get("slot_duration", 1.0)),
        )
    if kind == "brick":
        return synth_event_trace(
            n_jobs=int(params.get("n_jobs", 100)),
            mean_load=float(params.get("mean_load", 5.0)),
            seed=seed,
            sojourn=params.get("sojourn", "exponential"),
            sojourn_scale=float(params.get("sojourn_scale", 1.0)),
            departure_identity=params.get("departure_identity", "fifo"),
            initial_jobs=int(params.get("initial_jobs", 0)),
        )
    raise InvalidTarget(f"kind must be brick|fluid, got {kind!r}")
