"""Dispatchers, per-server ski-rental policies, and the simulation loops.

Dispatching is last-empty-server-first: a LIFO stack holds every non-busy
server id (idle or off), arrivals pop the top, departures push.  Assignments
therefore depend only on the event sequence, never on off/idle decisions or
randomness, so every policy sees the same empty periods on the same trace.

Policies decide, per empty period starting at t1:

* A0  (offline) stays idle iff it will be popped within (t1, t1+delta].
* A1  waits (1-alpha)*delta; if still empty, peeks the alpha*delta window and
  turns off iff no job is coming.
* A2  waits Z ~ exp(z/s)/((e-1)s) on [0, s], s=(1-alpha)*delta, then peeks.
* A3  waits Z=0 with probability alpha/(e-1+alpha), else Z from the same
  exponential shape renormalized; then peeks.
* DELAYEDOFF waits t_wait unconditionally (no peek) and dispatches to the
  most-recently-busy idle server, or a seeded-random off server if none idle.

Window boundaries are closed: a pop exactly at the window edge counts, so an
empty period of exactly delta stays idle.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .cost import CostBreakdown, CostModel, StepSchedule, evaluate
from .errors import FleetExhausted, InvalidTarget
from .segments import corresponding_arrival
from .trace import (
    ARRIVE,
    CountFunction,
    EventTrace,
    FluidTrace,
    ResolvedEvent,
    count_function,
    fluid_count_function,
    required_servers,
)

E = math.e
VARIANTS = ("A0", "A1", "A2", "A3", "DELAYEDOFF")


@dataclass(frozen=True)
class PolicySpec:
    variant: str
    alpha: float = 0.0
    t_wait: float | None = None  # DELAYEDOFF only; defaults to delta at run time
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variant", self.variant.upper())
        if self.variant not in VARIANTS:
            raise InvalidTarget(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidTarget(f"alpha must be in [0, 1], got {self.alpha}")
        if self.t_wait is not None and self.t_wait < 0:
            raise InvalidTarget(f"t_wait must be >= 0, got {self.t_wait}")


@dataclass(frozen=True)
class LookaheadConfig:
    alpha: float
    noise_std_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidTarget(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.noise_std_fraction <= 0.5:
            raise InvalidTarget(
                f"noise_std_fraction must be in [0, 0.5], got {self.noise_std_fraction}"
            )


class Assignment(NamedTuple):
    server: int
    job: str
    assigned: float
    released: float | None


class Decision(NamedTuple):
    server: int
    empty_at: float
    action: str  # "idle" | "off" | "off_at_horizon"
    off_at: float | None


@dataclass(frozen=True)
class SimResult:
    breakdown: CostBreakdown
    schedule: StepSchedule
    assignments: tuple[Assignment, ...]
    decisions: tuple[Decision, ...]
    migration_count: int = 0

    def to_jsonable(self) -> dict:
        return {
            "breakdown": self.breakdown.to_jsonable(),
            "schedule": self.schedule.to_jsonable(),
            "assignments": [list(a) for a in self.assignments],
            "decisions": [list(d) for d in self.decisions],
            "migration_count": self.migration_count,
        }


# ---------------------------------------------------------------------------
# Wait-time distributions.
# ---------------------------------------------------------------------------

def wait_time_quantile(alpha: float, delta: float, u: float) -> float:
    """Inverse CDF of the exponential-shape waiting density on [0, (1-alpha)*delta]."""
    return (1.0 - alpha) * delta * math.log1p(u * (E - 1.0))

def a3_zero_probability(alpha: float) -> float:
    """Atom at zero of the best-ratio randomized policy."""
    return alpha / (E - 1.0 + alpha)

def a3_density_mass(alpha: float) -> float:
    """Mass of the continuous branch; atom + mass = 1 exactly."""
    return (E - 1.0) / (E - 1.0 + alpha)

def sample_wait_time(variant: str, alpha: float, delta: float, rng: np.random.Generator) -> float:
    if variant == "A1":
        return (1.0 - alpha) * delta
    if variant == "A2":
        return wait_time_quantile(alpha, delta, float(rng.random()))
    if variant == "A3":
        if float(rng.random()) < a3_zero_probability(alpha):
            return 0.0
        return wait_time_quantile(alpha, delta, float(rng.random()))
    raise InvalidTarget(f"no wait-time distribution for variant {variant}")


# ---------------------------------------------------------------------------
# Dispatchers.
# ---------------------------------------------------------------------------

OFF, IDLE, BUSY = "off", "idle", "busy"


class LesfDispatcher:
    """Last-empty-server-first: LIFO stack of all non-busy server ids.

    Servers 0..initially_busy-1 start busy; the rest start off, stacked so
    the first pop is the lowest id.  Off servers keep their stack position.
    """

    def __init__(self, fleet_size: int, initially_busy: int):
        if initially_busy > fleet_size:
            raise FleetExhausted(f"fleet {fleet_size} below initial demand {initially_busy}")
        self.fleet_size = fleet_size
        self.state = [BUSY] * initially_busy + [OFF] * (fleet_size - initially_busy)
        self.stack = list(range(fleet_size - 1, initially_busy - 1, -1))
        self.job_server: dict[object, int] = {("init", k): k for k in range(initially_busy)}

    def on_arrival(self, t: float, job_key: object) -> tuple[int, bool]:
        if not self.stack:
            raise FleetExhausted(f"arrival at t={t} with no server available")
        sid = self.stack.pop()
        was_off = self.state[sid] == OFF
        self.state[sid] = BUSY
        self.job_server[job_key] = sid
        return sid, was_off

    def on_departure(self, t: float, job_key: object) -> int:
        sid = self.job_server.pop(job_key)
        self.state[sid] = IDLE
        self.stack.append(sid)
        return sid

    def mark_off(self, sid: int) -> None:
        self.state[sid] = OFF  # keeps its stack position


class DelayedOffDispatcher:
    """Most-recently-busy-idle-first; a seeded-random off server if none idle."""

    def __init__(self, fleet_size: int, initially_busy: int, rng: np.random.Generator):
        if initially_busy > fleet_size:
            raise FleetExhausted(f"fleet {fleet_size} below initial demand {initially_busy}")
        self.fleet_size = fleet_size
        self.state = [BUSY] * initially_busy + [OFF] * (fleet_size - initially_busy)
        self.last_busy = [-math.inf] * fleet_size
        self.job_server: dict[object, int] = {("init", k): k for k in range(initially_busy)}
        self.rng = rng

    def on_arrival(self, t: float, job_key: object) -> tuple[int, bool]:
        idle = [s for s in range(self.fleet_size) if self.state[s] == IDLE]
        if idle:
            sid = min(idle, key=lambda s: (-self.last_busy[s], s))
            was_off = False
        else:
            off = [s for s in range(self.fleet_size) if self.state[s] == OFF]
            if not off:
                raise FleetExhausted(f"arrival at t={t} with no server available")
            sid = off[int(self.rng.integers(len(off)))]
            was_off = True
        self.state[sid] = BUSY
        self.job_server[job_key] = sid
        return sid, was_off

    def on_departure(self, t: float, job_key: object) -> int:
        sid = self.job_server.pop(job_key)
        self.state[sid] = IDLE
        self.last_busy[sid] = t
        return sid

    def mark_off(self, sid: int) -> None:
        self.state[sid] = OFF


# ---------------------------------------------------------------------------
# Lookahead peeks.
# ---------------------------------------------------------------------------

def lesf_will_receive(
    stack: Sequence[int],
    job_server: dict[object, int],
    upcoming: Iterable[ResolvedEvent],
    server_id: int,
    window_end: float,
    tol: float = 0.0,
) -> bool:
    """Forward-simulate the stack over events up to window_end (inclusive):
    True iff server_id is popped.  ``upcoming`` must start strictly after the
    peek instant."""
    sim_stack = list(stack)
    sim_jobs = dict(job_server)
    for ev in upcoming:
        if ev.time > window_end + tol:
            break
        if ev.kind == ARRIVE:
            if not sim_stack:
                break
            sid = sim_stack.pop()
            if sid == server_id:
                return True
            sim_jobs[ev.job_key] = sid
        else:
            sim_stack.append(sim_jobs.pop(ev.job_key))
    return False


def slotted_will_receive(servers_above: int, busy_now: int, window_requirements: Sequence[int]) -> bool:
    """Slotted analogue: at each upcoming slot boundary the busy servers are
    pushed back above the target and the requirement is popped from the top.
    True iff some requirement digs past everything above the target."""
    above, busy = servers_above, busy_now
    for req in window_requirements:
        pool = above + busy
        if req > pool:
            return True
        above, busy = pool - req, req
    return False


# ---------------------------------------------------------------------------
# Continuous-time simulation.
# ---------------------------------------------------------------------------

def _job_label(job_key: object) -> str:
    if isinstance(job_key, tuple):
        return f"init:{job_key[1]}"
    return str(job_key)


def run(
    trace: EventTrace,
    m: CostModel,
    policy: PolicySpec,
    look: LookaheadConfig | None = None,
    fleet_size: int | None = None,
) -> SimResult:
    """Simulate a policy on an event trace.

    Deterministic given (trace, policy, look, fleet_size).  The realized
    schedule satisfies the same boundary conditions as the offline problem:
    a(0) servers start on, and servers still idle at the horizon book their
    shutdown at T.
    """
    a = count_function(trace)
    if look is None:
        look = LookaheadConfig(policy.alpha, 0.0, policy.seed)
    if policy.variant in ("A1", "A2", "A3") and abs(look.alpha - policy.alpha) > 1e-12:
        raise InvalidTarget("policy.alpha and look.alpha disagree")
    if look.noise_std_fraction > 0.0:
        raise InvalidTarget("noisy lookahead is only defined for slotted traces")
    delta = m.delta
    T = trace.horizon
    peak = a.peak()
    fleet = peak if fleet_size is None else fleet_size
    if fleet < peak:
        raise FleetExhausted(f"fleet {fleet} below workload peak {peak}")

    rng_wait = np.random.default_rng([policy.seed, 101])
    rng_dispatch = np.random.default_rng([policy.seed, 202])
    if policy.variant == "DELAYEDOFF":
        disp = DelayedOffDispatcher(fleet, trace.initial_jobs, rng_dispatch)
    else:
        disp = LesfDispatcher(fleet, trace.initial_jobs)
    t_wait = delta if policy.t_wait is None else policy.t_wait
    eps = 1e-9 * max(1.0, delta)

    events = trace.resolved_events()
    deltas: list[tuple[float, int]] = []
    assignments: list[list] = []
    open_assign: dict[int, int] = {}
    decisions: list[Decision] = []
    pending: dict[int, float] = {}  # sid -> empty_at, unresolved decision
    guard = [0] * fleet
    timers: list[tuple[float, int, int, int, bool]] = []  # (time, seq, sid, guard, uncond)
    seq = 0

    for k in range(trace.initial_jobs):
        open_assign[k] = len(assignments)
        assignments.append([k, _job_label(("init", k)), 0.0, None])

    def resolve(sid: int, action: str, off_at: float | None):
        empty_at = pending.pop(sid, None)
        if empty_at is not None:
            decisions.append(Decision(sid, empty_at, action, off_at))

    def turn_off(sid: int, t: float, action: str = "off"):
        disp.mark_off(sid)
        deltas.append((t, -1))
        guard[sid] += 1
        resolve(sid, action, t)

    def push_timer(time: float, sid: int, uncond: bool):
        nonlocal seq
        heapq.heappush(timers, (time, seq, sid, guard[sid], uncond))
        seq += 1

    def peek(sid: int, t_from: float, window: float, start_index: int) -> bool:
        window_end = min(t_from + window, T)
        upcoming = itertools.islice(events, start_index, None)  # no tail copy
        return lesf_will_receive(disp.stack, disp.job_server, upcoming, sid, window_end, tol=eps)

    def decide(sid: int, t: float, start_index: int):
        if policy.variant == "A0":
            # the just-pushed server is popped again exactly when the count
            # returns to its level, so the full-window forward simulation
            # reduces to the first same-level arrival lookup
            ret = corresponding_arrival(a, t)
            if ret is not None and ret <= t + delta + eps:
                resolve(sid, "idle", None)
            else:
                turn_off(sid, t)
            return
        if policy.variant == "DELAYEDOFF":
            push_timer(t + t_wait, sid, True)
            return
        w = sample_wait_time(policy.variant, policy.alpha, delta, rng_wait)
        if w <= 0.0:
            finish_wait(sid, t, start_index)
        else:
            push_timer(t + w, sid, False)

    def finish_wait(sid: int, t: float, start_index: int):
        if peek(sid, t, policy.alpha * delta, start_index):
            # A job is predicted inside the window: stay idle.  Re-check when
            # the window runs out; with exact lookahead the job always lands
            # first, so the re-check only matters under forecast noise.
            if policy.alpha * delta > 0.0:
                push_timer(t + policy.alpha * delta, sid, False)
            else:
                resolve(sid, "idle", None)
        else:
            turn_off(sid, t)

    def fire_timer(t: float, sid: int, g: int, uncond: bool, start_index: int):
        if guard[sid] != g or disp.state[sid] != IDLE:
            return  # stale: the server was popped or already decided
        if uncond:
            turn_off(sid, t)
        else:
            finish_wait(sid, t, start_index)

    i = 0
    n = len(events)
    while i < n or timers:
        t_ev = events[i].time if i < n else math.inf
        while timers and timers[0][0] < t_ev:
            t_tm, _, sid, g, uncond = heapq.heappop(timers)
            if t_tm > T:
                continue
            fire_timer(t_tm, sid, g, uncond, i)
        if i >= n:
            break
        ev = events[i]
        i += 1
        if ev.kind == ARRIVE:
            sid, was_off = disp.on_arrival(ev.time, ev.job_key)
            guard[sid] += 1
            if was_off:
                deltas.append((ev.time, +1))
            else:
                resolve(sid, "idle", None)
            open_assign[sid] = len(assignments)
            assignments.append([sid, _job_label(ev.job_key), ev.time, None])
        else:
            sid = disp.on_departure(ev.time, ev.job_key)
            guard[sid] += 1
            assignments[open_assign.pop(sid)][3] = ev.time
            pending[sid] = ev.time
            decide(sid, ev.time, i)

    for sid in range(fleet):
        if disp.state[sid] == IDLE:
            turn_off(sid, T, action="off_at_horizon")

    schedule = StepSchedule.from_deltas(T, trace.initial_jobs, deltas)
    breakdown = evaluate(schedule, a, m)
    return SimResult(
        breakdown,
        schedule,
        tuple(Assignment(*row) for row in assignments),
        tuple(sorted(decisions, key=lambda d: (d.empty_at, d.server))),
    )


# ---------------------------------------------------------------------------
# Discrete-slot simulation.
# ---------------------------------------------------------------------------

def run_discrete(
    trace: FluidTrace,
    m: CostModel,
    policy: PolicySpec,
    look: LookaheadConfig | None = None,
    fleet_size: int | None = None,
) -> SimResult:
    """Simulate a policy on a slotted trace.

    At each slot boundary every just-busy server is pushed back (ascending
    id) and ceil(load) ids are popped LIFO; emptied servers run the same
    ski-rental policies with delta measured in time units.  Peeks during the
    lookahead window may use noise-perturbed loads; cost accounting always
    uses the true loads.
    """
    if look is None:
        look = LookaheadConfig(policy.alpha, 0.0, policy.seed)
    if policy.variant in ("A1", "A2", "A3") and abs(look.alpha - policy.alpha) > 1e-12:
        raise InvalidTarget("policy.alpha and look.alpha disagree")
    reqs = trace.required_servers()
    s = trace.slot_duration
    n = len(reqs)
    T = trace.horizon
    delta = m.delta
    peak = max(reqs)
    fleet = peak if fleet_size is None else fleet_size
    if fleet < peak:
        raise FleetExhausted(f"fleet {fleet} below workload peak {peak}")

    rng_wait = np.random.default_rng([policy.seed, 101])
    rng_dispatch = np.random.default_rng([policy.seed, 202])
    rng_noise = np.random.default_rng([look.seed, 303])
    delayed = policy.variant == "DELAYEDOFF"
    t_wait = delta if policy.t_wait is None else policy.t_wait
    eps = 1e-9 * max(1.0, delta)

    state = [BUSY] * reqs[0] + [OFF] * (fleet - reqs[0])
    stack = list(range(fleet - 1, reqs[0] - 1, -1))
    last_busy = [-math.inf] * fleet
    busy: set[int] = set(range(reqs[0]))

    deltas: list[tuple[float, int]] = []
    assignments: list[list] = []
    open_assign: dict[int, int] = {}
    decisions: list[Decision] = []
    pending: dict[int, float] = {}
    guard = [0] * fleet
    timers: list[tuple[float, int, int, int, bool]] = []
    seq = 0

    for sid in sorted(busy):
        open_assign[sid] = len(assignments)
        assignments.append([sid, "load", 0.0, None])

    def resolve(sid: int, action: str, off_at: float | None):
        empty_at = pending.pop(sid, None)
        if empty_at is not None:
            decisions.append(Decision(sid, empty_at, action, off_at))

    def turn_off(sid: int, t: float, action: str = "off"):
        state[sid] = OFF
        deltas.append((t, -1))
        guard[sid] += 1
        resolve(sid, action, t)

    def window_reqs(t_from: float, window: float, noisy: bool) -> list[int]:
        t_end = min(t_from + window, T) + eps
        j0 = int(math.floor(t_from / s + 1e-9)) + 1
        out = []
        for j in range(j0, n):
            if j * s > t_end:
                break
            if noisy and look.noise_std_fraction > 0.0:
                load = trace.loads[j] * (1.0 + look.noise_std_fraction * float(rng_noise.standard_normal()))
                out.append(required_servers(max(0.0, load)))
            else:
                out.append(reqs[j])
        return out

    def peek(sid: int, t_from: float, window: float, noisy: bool) -> bool:
        above = len(stack) - 1 - stack.index(sid)
        return slotted_will_receive(above, len(busy), window_reqs(t_from, window, noisy))

    def decide(sid: int, t: float):
        nonlocal seq
        if policy.variant == "A0":
            if peek(sid, t, delta, noisy=False):
                resolve(sid, "idle", None)
            else:
                turn_off(sid, t)
            return
        if delayed:
            heapq.heappush(timers, (t + t_wait, seq, sid, guard[sid], True))
            seq += 1
            return
        if policy.variant == "A1":
            # Slot-granular break-even: pops land on slot starts, so seeing
            # the start of the last in-window slot reveals one further slot
            # of workload; waiting one slot less keeps the decision optimal
            # once window + slot covers delta (and is the classic discrete
            # rule at alpha=0).
            w = max(0.0, (1.0 - policy.alpha) * delta - s)
        else:
            w = sample_wait_time(policy.variant, policy.alpha, delta, rng_wait)
        if w <= 0.0:
            finish_wait(sid, t)
        else:
            heapq.heappush(timers, (t + w, seq, sid, guard[sid], False))
            seq += 1

    def finish_wait(sid: int, t: float):
        nonlocal seq
        if peek(sid, t, policy.alpha * delta, noisy=True):
            # predicted pop inside the window; re-check when it runs out
            if policy.alpha * delta > 0.0:
                heapq.heappush(timers, (t + policy.alpha * delta, seq, sid, guard[sid], False))
                seq += 1
            else:
                resolve(sid, "idle", None)
        else:
            turn_off(sid, t)

    def fire_timer(t: float, sid: int, g: int, uncond: bool):
        if guard[sid] != g or state[sid] != IDLE:
            return
        if uncond:
            turn_off(sid, t)
        else:
            finish_wait(sid, t)

    def pop_for_slot(t: float, req: int) -> list[int]:
        picked = []
        if delayed:
            idle = [x for x in range(fleet) if state[x] == IDLE]
            idle.sort(key=lambda x: (-last_busy[x], x))
            picked = idle[:req]
            short = req - len(picked)
            if short > 0:
                off = [x for x in range(fleet) if state[x] == OFF]
                if short > len(off):
                    raise FleetExhausted(f"slot at t={t} needs {req} servers")
                for _ in range(short):
                    k = int(rng_dispatch.integers(len(off)))
                    picked.append(off.pop(k))
        else:
            for _ in range(req):
                if not stack:
                    raise FleetExhausted(f"slot at t={t} needs {req} servers")
                picked.append(stack.pop())
        return picked

    for j in range(1, n):
        t_j = j * s
        while timers and timers[0][0] < t_j - eps:
            t_tm, _, sid, g, uncond = heapq.heappop(timers)
            fire_timer(t_tm, sid, g, uncond)
        prior = busy
        if not delayed:
            for sid in sorted(prior):
                state[sid] = IDLE
                stack.append(sid)
        else:
            for sid in sorted(prior):
                state[sid] = IDLE
                last_busy[sid] = t_j
        popped = pop_for_slot(t_j, reqs[j])
        busy = set(popped)
        for sid in popped:
            if sid in prior:
                state[sid] = BUSY
                continue
            was_off = state[sid] == OFF
            state[sid] = BUSY
            guard[sid] += 1
            if was_off:
                deltas.append((t_j, +1))
            else:
                resolve(sid, "idle", None)
            open_assign[sid] = len(assignments)
            assignments.append([sid, "load", t_j, None])
        for sid in sorted(prior - busy):
            guard[sid] += 1
            assignments[open_assign.pop(sid)][3] = t_j
            pending[sid] = t_j
            decide(sid, t_j)

    while timers:
        t_tm, _, sid, g, uncond = heapq.heappop(timers)
        if t_tm > T:
            continue
        fire_timer(t_tm, sid, g, uncond)
    for sid in range(fleet):
        if state[sid] == IDLE:
            turn_off(sid, T, action="off_at_horizon")

    schedule = StepSchedule.from_deltas(T, reqs[0], deltas)
    breakdown = evaluate(schedule, fluid_count_function(trace), m)
    return SimResult(
        breakdown,
        schedule,
        tuple(Assignment(*row) for row in assignments),
        tuple(sorted(decisions, key=lambda d: (d.empty_at, d.server))),
    )


# ---------------------------------------------------------------------------
# Single-empty-period ratio curves: closed forms and Monte-Carlo checks.
# ---------------------------------------------------------------------------

def analytic_expected_ratio(
    variant: str, t_empty: float, t_busy: float, alpha: float, m: CostModel
) -> float:
    """Expected online/offline cost over one busy+empty server period.

    The offline side idles iff the empty period is within delta, else pays
    one full off/on cycle.  Piecewise in t_empty; the A3 curve is flat at its
    worst value on (alpha*delta, infinity).
    """
    if t_empty < 0 or t_busy < 0:
        raise InvalidTarget("periods must be >= 0")
    d = m.delta
    P = m.power
    beta = m.beta_on + m.beta_off
    offline = P * t_busy + min(P * t_empty, beta)
    if offline == 0.0:
        return 1.0
    if variant == "A1":
        on_empty = P * t_empty if t_empty <= d else P * (1.0 - alpha) * d + beta
    elif variant == "A2":
        if t_empty <= alpha * d:
            on_empty = P * t_empty
        elif t_empty <= d:
            on_empty = P * (E * t_empty - alpha * d) / (E - 1.0)
        else:
            on_empty = P * d * (E - alpha) / (E - 1.0)
    elif variant == "A3":
        if t_empty <= alpha * d:
            on_empty = P * t_empty
        elif t_empty <= d:
            on_empty = P * E * t_empty / (E - 1.0 + alpha)
        else:
            on_empty = P * E * d / (E - 1.0 + alpha)
    else:
        raise InvalidTarget(f"no ratio curve for variant {variant}")
    return (P * t_busy + on_empty) / offline


def monte_carlo_ratio(
    variant: str,
    t_empty: float,
    t_busy: float,
    alpha: float,
    m: CostModel,
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Empirical (mean, stderr) of the online/offline cost ratio for one
    busy+empty period under the sampled wait times."""
    if samples < 1:
        raise InvalidTarget("samples must be >= 1")
    d = m.delta
    P = m.power
    beta = m.beta_on + m.beta_off
    s = (1.0 - alpha) * d
    rng = np.random.default_rng(seed)
    if variant == "A1":
        z = np.full(samples, s)
    elif variant == "A2":
        z = s * np.log1p(rng.random(samples) * (E - 1.0))
    elif variant == "A3":
        atom = rng.random(samples) < a3_zero_probability(alpha)
        z = np.where(atom, 0.0, s * np.log1p(rng.random(samples) * (E - 1.0)))
    else:
        raise InvalidTarget(f"no sampler for variant {variant}")
    cutoff = t_empty - alpha * d
    turned_off = z < cutoff
    online = P * t_busy + np.where(turned_off, P * z + beta, P * t_empty)
    offline = P * t_busy + min(P * t_empty, beta)
    if offline == 0.0:
        return 1.0, 0.0
    ratios = online / offline
    mean = float(ratios.mean())
    stderr = float(ratios.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return mean, stderr
