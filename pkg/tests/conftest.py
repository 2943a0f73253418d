import numpy as np
import pytest

from powerprov.cost import CostModel
from powerprov.trace import Event, EventTrace, count_function


def random_brick_trace(rng, max_epochs=24, max_level=8, span=10.0):
    """Random unit-step workload: distinct event times, level kept in range,
    horizon sometimes pinned to the last event and sometimes beyond it."""
    n = int(rng.integers(0, max_epochs + 1))
    times = np.unique(np.round(np.sort(rng.uniform(0.05 * span, span, size=n)), 9))
    level = int(rng.integers(0, 4))
    events, cur, next_id = [], level, 0
    active = [("init", i) for i in range(level)]
    for t in times:
        up = rng.random() < 0.5
        if cur == 0:
            up = True
        if cur == max_level:
            up = False
        if up:
            cur += 1
            jid = f"j{next_id}"
            next_id += 1
            active.append(jid)
            events.append(Event(float(t), "arrive", jid))
        else:
            cur -= 1
            picked = active.pop(int(rng.integers(len(active))))
            jid = picked if isinstance(picked, str) else f"x{picked[1]}"
            events.append(Event(float(t), "depart", jid))
    if len(events) and rng.random() < 0.5:
        horizon = events[-1].time
    else:
        horizon = span * 1.1
    return EventTrace(level, tuple(events), horizon)


def random_cost_model(rng, beta_on_zero=True, max_beta=12.0):
    beta = float(rng.uniform(0.0, max_beta))
    power = float(rng.uniform(0.2, 3.0))
    if beta_on_zero:
        return CostModel(power, 0.0, beta)
    split = float(rng.random())
    return CostModel(power, beta * split, beta * (1.0 - split))


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def canyon_trace():
    """Two departures then two arrivals around a canyon; anchor level 2."""
    events = (
        Event(1.0, "depart", "a"),
        Event(2.0, "depart", "b"),
        Event(3.0, "arrive", "j1"),
        Event(4.0, "arrive", "j2"),
    )
    return EventTrace(2, events, 5.0)


def u_dip_trace():
    return EventTrace(1, (Event(1.0, "depart", "a"), Event(2.0, "arrive", "j1")), 3.0)


def canyon_count():
    return count_function(canyon_trace())


def u_dip_count():
    return count_function(u_dip_trace())
