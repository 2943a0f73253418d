import pytest

from powerprov.cost import CostModel
from powerprov.errors import NotACriticalSegment
from powerprov.segments import SegmentType, classify, decompose, pair_epochs
from powerprov.trace import CountFunction, count_function

from conftest import canyon_count, random_brick_trace, u_dip_count


def test_decompose_canyon_trace():
    deco = decompose(canyon_count())
    assert deco.critical_times == (0.0, 1.0, 4.0, 5.0)
    assert [s.kind for s in deco.segments] == [SegmentType.I, SegmentType.IV, SegmentType.I]
    assert [s.anchor_level for s in deco.segments] == [2, 2, 2]


def test_decompose_u_dip():
    deco = decompose(u_dip_count())
    assert deco.critical_times == (0.0, 1.0, 2.0, 3.0)
    assert [s.kind for s in deco.segments] == [SegmentType.I, SegmentType.III, SegmentType.I]


def test_decompose_constant():
    deco = decompose(CountFunction(7.0, 3))
    assert deco.critical_times == (0.0, 7.0)
    assert [s.kind for s in deco.segments] == [SegmentType.I]


def test_decompose_step_down_tail():
    a = CountFunction(5.0, 2, (1.0, 3.0), (1, 0))
    deco = decompose(a)
    assert deco.critical_times == (0.0, 1.0, 3.0, 5.0)
    assert [s.kind for s in deco.segments] == [SegmentType.I, SegmentType.II, SegmentType.II]


def test_classify_shapes():
    a = canyon_count()
    assert classify(a, 1.0, 4.0) == SegmentType.IV
    assert classify(a, 0.0, 1.0) == SegmentType.I
    assert classify(u_dip_count(), 1.0, 2.0) == SegmentType.III


def test_classify_rejects_non_segment():
    with pytest.raises(NotACriticalSegment):
        classify(canyon_count(), 0.0, 2.5)


def test_segment_tiling_property(rng):
    for _ in range(100):
        tr = random_brick_trace(rng)
        a = count_function(tr)
        deco = decompose(a)
        assert deco.critical_times[0] == 0.0
        assert deco.critical_times[-1] == a.horizon
        for s, e in zip(deco.segments, deco.segments[1:]):
            assert s.end == e.start
        # re-classification never fails and matches the recorded type
        for s in deco.segments:
            assert classify(a, s.start, s.end) == s.kind


def test_pair_epochs_cases():
    a = canyon_count()
    seg = decompose(a).segments[1]
    p = pair_epochs(a, seg, CostModel(1.0, 0.0, 0.5))
    assert p.pairs == ((1.0, 4.0), (2.0, 3.0))
    assert p.selected == ()
    p = pair_epochs(a, seg, CostModel(1.0, 0.0, 1.0))
    assert p.selected == ((2.0, 3.0),)  # closed comparison beta >= P*gap
    p = pair_epochs(a, seg, CostModel(1.0, 0.0, 3.0))
    assert p.selected == ((1.0, 4.0),)  # greedy-first, scan resumes after 4


def test_pair_epochs_disjoint_and_valid(rng):
    for _ in range(50):
        tr = random_brick_trace(rng)
        a = count_function(tr)
        m = CostModel(1.0, 0.0, float(rng.uniform(0.1, 8.0)))
        for seg in decompose(a).segments:
            if seg.kind != SegmentType.IV:
                continue
            p = pair_epochs(a, seg, m)
            prev_end = seg.start - 1.0
            for tau, tau2 in p.selected:
                assert tau >= prev_end
                assert m.beta_on + m.beta_off >= m.power * (tau2 - tau)
                assert a.value_at(tau) == a.value_at(tau2)
                prev_end = tau2
