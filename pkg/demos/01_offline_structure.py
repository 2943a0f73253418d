"""Critical decomposition and the offline-optimal schedule.

Walks a small workload through the three stages: cut the count path into
critical segments, classify each shape, then build the optimal schedule and
cross-check it against the exhaustive DP oracle.
"""

from powerprov import (
    CostModel,
    Event,
    EventTrace,
    count_function,
    construct_optimal,
    decompose,
    dp_oracle,
    lower_bound,
    pair_epochs,
)

# two jobs leave, then two arrive: a canyon between two flat shoulders
trace = EventTrace(
    initial_jobs=2,
    events=(
        Event(1.0, "depart", "a"),
        Event(2.0, "depart", "b"),
        Event(3.0, "arrive", "c"),
        Event(4.0, "arrive", "d"),
    ),
    horizon=5.0,
)
a = count_function(trace)

print("count path:")
for lo, hi, v in a.pieces():
    print(f"  [{lo:.1f}, {hi:.1f}) -> {v} jobs")

deco = decompose(a)
print("\ncritical times:", deco.critical_times)
for seg in deco.segments:
    print(f"  [{seg.start:.1f}, {seg.end:.1f}] type {seg.kind.value}, anchor {seg.anchor_level}")

print("\noptimal schedule as the toggle price moves (P = 1):")
for beta_off in (6.0, 1.0, 0.5):
    m = CostModel(power=1.0, beta_off=beta_off)
    opt = construct_optimal(a, m)
    dp_cost, _ = dp_oracle(a, m)
    steps = list(zip(opt.schedule.times, opt.schedule.values)) or "hold at 2 throughout"
    print(f"  delta={m.delta:>4}: total={opt.total:.2f}  dp={dp_cost:.2f}  "
          f"lower_bound={lower_bound(a, m):.2f}  steps={steps}")

print("\ncanyon pairing at delta=1 (hold across gaps no longer than delta):")
pairing = pair_epochs(a, deco.segments[1], CostModel(1.0, beta_off=1.0))
print("  candidate pairs:", pairing.pairs)
print("  selected:       ", pairing.selected)
