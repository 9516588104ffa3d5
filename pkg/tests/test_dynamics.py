import csv
import io
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmflow.cantor import TernaryPoint, compile_machine
from tmflow.dynamics import (Decided, DiscreteSystem, IrrationalFrequency, NotWithin, Reached,
                             Rect, blockmap_system, halting_equivalence, reach,
                             return_map, rotation_reach_decider, rotation_return, suspend,
                             trace_csv)
from tmflow.machine import Configuration, Tape

from machines import COUNTER, IMMEDIATE_HALT, LOOP, MERGING

F = Fraction


def test_reach_on_a_counter_system():
    sys_ = DiscreteSystem("succ", lambda n: n + 1)
    assert reach(sys_, 0, lambda n: n == 7, 10) == Reached(7)
    assert reach(sys_, 0, lambda n: n == 7, 6) == NotWithin(6)
    assert reach(sys_, 7, lambda n: n == 7, 0) == Reached(0)


def test_halting_equivalence_examples():
    rep = halting_equivalence(IMMEDIATE_HALT, IMMEDIATE_HALT.initial(), 10)
    assert rep.machine == rep.flow == Reached(1) and rep.agree
    rep = halting_equivalence(LOOP, LOOP.initial(), 50)
    assert rep.flow == NotWithin(50) and rep.agree
    rep = halting_equivalence(COUNTER, COUNTER.initial(), 0)
    assert rep.flow == NotWithin(0) and rep.agree
    halted = Configuration(COUNTER.halt, Tape())
    assert halting_equivalence(COUNTER, halted, 0).flow == Reached(0)


def test_blockmap_system_halt_set_is_intensional():
    cm = compile_machine(MERGING)
    sys_ = blockmap_system(cm)
    p = cm.encode(Configuration(MERGING.halt, Tape.from_cells({4: 1})))
    assert sys_.coding_sets["halt"](p)
    assert not sys_.coding_sets["halt"](cm.encode(MERGING.initial()))


def test_trace_csv_is_exact():
    cm = compile_machine(COUNTER)
    text = trace_csv(cm, COUNTER.initial(Tape.from_cells({0: 1})), 50)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["step"]) for r in rows] == [0, 1, 2, 3]
    assert rows[-1]["state"] == str(COUNTER.halt)
    for r in rows:
        for v in (F(r["x"]), F(r["y"])):
            d = v.denominator
            while d % 3 == 0:
                d //= 3
            assert d == 1 and 0 <= v <= 1


@given(st.text("02", max_size=8), st.text("02", max_size=8),
       st.fractions(0, 1).filter(lambda v: v < 1), st.fractions(0, 20))
def test_suspension_flow_is_a_flow(x, y, phase, t):
    cm = compile_machine(COUNTER)
    fl = suspend(cm.step)
    p = TernaryPoint(x, y)
    q, ph = fl.flow(p, phase, t)
    assert 0 <= ph < 1
    # group property: flowing t then s equals flowing t + s
    q2, ph2 = fl.flow(*fl.flow(p, phase, t), F(1, 3))
    assert (q2, ph2) == fl.flow(p, phase, t + F(1, 3))


def test_return_map_recovers_base():
    f = lambda n: (3 * n + 1) % 1000
    g = return_map(suspend(f))
    assert all(g(n) == f(n) for n in range(200))


def test_suspension_rejects_bad_phase():
    with pytest.raises(ValueError):
        suspend(abs).flow(0, 1, 0)
    with pytest.raises(ValueError):
        suspend(abs).flow(0, 0, -1)


def test_rotation_return_identity_and_period():
    rot = rotation_return(1, 1)
    assert rot.is_identity
    assert rot((F(1, 2), F(1, 7))) == (F(1, 2), F(1, 7))
    r = rotation_return(5, 2)
    p = (F(1, 3), F(1, 10))
    for _ in range(5):
        p = r(p)
    assert p == (F(1, 3), F(1, 10))
    s, phi = r.radians(0.5, 0.0)
    assert math.isclose(phi, 2 * math.pi * 2 / 5)


def test_rotation_return_rejects_floats_and_nonpositive():
    with pytest.raises(TypeError):
        rotation_return(1.0, 2)
    with pytest.raises(ValueError):
        rotation_return(0, 1)


def _brute_rotation(l, k, start, rects, n=500):
    rot = rotation_return(l, k)
    p = (F(start[0]), F(start[1]) % 1)
    for i in range(n):
        if any(r.contains(*p) for r in rects):
            return True
        p = rot(p)
    return False


def test_rotation_decider_matches_brute_force():
    target = [Rect(F(1, 4), F(3, 4), F(1, 3), F(1, 3) + F(1, 50))]
    for l, k in [(1, 1), (7, 3), (10, 3), (2, 1), (13, 5)]:
        for start in [(F(1, 2), F(0)), (F(1, 2), F(1, 5)), (F(9, 10), F(1, 3))]:
            d = rotation_reach_decider(l, k, start, target)
            assert isinstance(d, Decided)
            assert d.value == _brute_rotation(l, k, start, target)


def test_rotation_decider_irrational_cases():
    open_target = [Rect(F(0), F(1, 2), F(0), F(1, 10))]
    assert rotation_reach_decider(1.0, math.sqrt(2), (0.25, 0.3), open_target) == Decided(True)
    assert rotation_reach_decider(1.0, math.sqrt(2), (0.75, 0.3), open_target) == Decided(False)
    line = [Rect(F(0), F(1), F(1, 3), F(1, 3))]
    with pytest.raises(IrrationalFrequency):
        rotation_reach_decider(1.0, math.sqrt(2), (0.5, 0.0), line)
