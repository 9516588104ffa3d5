import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmflow.machine import (Configuration, Halted, HaltedAt, MachineSemanticError,
                            MachineSyntaxError, Next, Running, Tape, TuringMachine,
                            format_machine, is_reversible, iterate, parse_machine,
                            random_machine, random_tape, run, step, transition)

from machines import (COUNTER, IMMEDIATE_HALT, LOOP, MERGING, PERMUTER, REVERSIBLE, WALKER,
                      brute_force_injective)


def test_tape_trims_blanks_and_reads_outside_support():
    t = Tape(-3, (0, 0, 1, 0, 1, 0))
    assert t == Tape(-1, (1, 0, 1))
    assert t.support == (-1, 1)
    assert t[-5] == 0 and t[-1] == 1 and t[0] == 0 and t[1] == 1
    assert Tape(4, (0, 0)) == Tape()
    assert Tape().support is None


def test_tape_from_cells_and_write():
    t = Tape.from_cells({2: 1, -2: 1})
    assert t.cells() == {-2: 1, 2: 1}
    assert t.write(0, 1).cells() == {-2: 1, 0: 1, 2: 1}
    assert t.write(2, 0) == Tape.from_cells({-2: 1})


def test_shift_convention():
    # new[n] = old[n + eps]; eps = +1 slides the tape left
    t = Tape.from_cells({1: 1})
    assert t.shift(1)[0] == 1
    assert t.shift(-1)[2] == 1
    assert t.shift(0) == t


def test_step_writes_then_shifts():
    tm = parse_machine("states: 2\nstart: 1\nhalt: 2\n1 0 -> 1 1 L\n1 1 -> 2 0 R\n")
    c = tm.initial(Tape.from_cells({1: 1}))
    nxt = step(tm, c)
    assert isinstance(nxt, Next)
    # wrote 1 at 0, then moved the tape left: old cells 0 and 1 now at -1 and 0
    assert nxt.config == Configuration(1, Tape.from_cells({-1: 1, 0: 1}))
    nxt2 = step(tm, nxt.config)
    assert nxt2.config == Configuration(2, Tape.from_cells({0: 1}))
    assert step(tm, nxt2.config) == Halted(Tape.from_cells({0: 1}))


def test_halting_configuration_is_a_fixed_point():
    c = Configuration(IMMEDIATE_HALT.halt, Tape.from_cells({0: 1}))
    assert transition(IMMEDIATE_HALT, c) == c


def test_run_examples():
    r = run(IMMEDIATE_HALT, IMMEDIATE_HALT.initial(), 10)
    assert r.status == HaltedAt(1, Tape()) and len(r.trace) == 2
    r = run(LOOP, LOOP.initial(), 25)
    assert r.status == Running() and len(r.trace) == 26
    r = run(COUNTER, COUNTER.initial(), 0)
    assert r.status == Running() and r.trace == [COUNTER.initial()]
    halted = Configuration(COUNTER.halt, Tape())
    assert run(COUNTER, halted, 0).status == HaltedAt(0, Tape())
    with pytest.raises(ValueError):
        run(LOOP, LOOP.initial(), -1)


def test_iterate_stops_at_halt():
    trace = list(iterate(COUNTER, COUNTER.initial()))
    assert trace[-1].state == COUNTER.halt
    assert trace == run(COUNTER, COUNTER.initial(), 100).trace


def test_parse_roundtrip_and_comments():
    text = """
    # a comment
    states: 3   # trailing comment
    start: 1
    halt: 3

    1 0 -> 2 1 N
    1 1 -> 1 0 L
    2 0 -> 1 0 R
    2 1 -> 3 1 N
    """
    tm = parse_machine(text)
    assert tm == COUNTER
    assert parse_machine(format_machine(tm)) == tm
    assert tm.delta[2, 0] == (1, 0, -1)
    assert tm.delta[1, 1] == (1, 0, 1)


@pytest.mark.parametrize("text, lineno", [
    ("states: 2\nstart: 1\nhalt: 2\n1 0 -> 2 0 X\n1 1 -> 2 0 N\n", 4),
    ("states: 2\nstart: 1\nhalt: 2\n1 2 -> 2 0 N\n1 1 -> 2 0 N\n", 4),
    ("states: 2\nstart: 1\nhalt: 2\nnonsense\n", 4),
])
def test_parse_syntax_errors(text, lineno):
    with pytest.raises(MachineSyntaxError) as e:
        parse_machine(text)
    assert e.value.lineno == lineno


@pytest.mark.parametrize("text", [
    "states: 2\nstart: 1\nhalt: 2\n1 0 -> 2 0 N\n",                      # missing (1,1)
    "states: 2\nstart: 1\nhalt: 2\n1 0 -> 3 0 N\n1 1 -> 2 0 N\n",        # unknown state
    "states: 2\nstart: 1\nhalt: 2\n1 0 -> 2 0 N\n1 1 -> 2 0 N\n2 0 -> 1 0 N\n",
    "start: 1\nhalt: 2\n1 0 -> 2 0 N\n1 1 -> 2 0 N\n",                    # no states header
    "states: 2\nstart: 1\nhalt: 2\n1 0 -> 2 0 N\n1 0 -> 2 1 N\n1 1 -> 2 0 N\n",  # duplicate
])
def test_parse_semantic_errors(text):
    with pytest.raises((MachineSemanticError, MachineSyntaxError)):
        parse_machine(text)


def test_constructor_validates():
    with pytest.raises(MachineSemanticError):
        TuringMachine(2, 1, 2, {(1, 0): (2, 0, 0)})
    with pytest.raises(MachineSemanticError):
        TuringMachine(2, 1, 2, {(1, 0): (2, 0, 2), (1, 1): (2, 0, 0)})


def test_reversibility_examples():
    for tm in REVERSIBLE:
        assert is_reversible(tm)
    assert not is_reversible(MERGING)
    assert not is_reversible(COUNTER)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2 ** 32 - 1), st.floats(0.0, 0.5))
def test_reversibility_matches_brute_force(states, seed, halt_weight):
    tm = random_machine(states, random.Random(seed), halt_weight)
    assert is_reversible(tm) == brute_force_injective(tm)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_step_is_deterministic_and_total(seed):
    rng = random.Random(seed)
    tm = random_machine(4, rng)
    c = Configuration(rng.randint(1, 4), random_tape(rng))
    assert transition(tm, c) == transition(tm, c)
    assert transition(tm, c).state in range(1, 5)


def test_random_tape_covers_head():
    rng = random.Random(7)
    for _ in range(100):
        t = random_tape(rng, support=20)
        assert t.support is None or (t.support[1] - t.support[0] < 20)


def test_walker_and_permuter_never_halt():
    for tm in (WALKER, PERMUTER):
        assert not run(tm, tm.initial(Tape.from_cells({0: 1, 3: 1})), 200).halted
