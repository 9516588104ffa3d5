import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmflow.gshift import (DecodeError, GeneralizedShift, SymbolSequence, apply_gshift,
                           compile_tm_to_gshift, identity_shift, make_witness, marked,
                           four_window_shift, recode_binary, unmark, valid_windows)
from tmflow.machine import Configuration, Tape, random_machine, random_tape, transition

from machines import COUNTER, MERGING, WALKER


def seq(cells, alphabet=2):
    return SymbolSequence.from_cells(alphabet, cells)


def test_symbol_sequence_read_rewrite_shift():
    s = seq({-1: 1, 2: 1})
    assert s.read(-1, 4) == (1, 0, 0, 1)
    assert s.rewrite(0, (1, 1)).cells() == {-1: 1, 0: 1, 1: 1, 2: 1}
    # new[p] = old[p + n]
    assert s.shift(2).cells() == {-3: 1, 0: 1}
    assert s.shift(0) == s
    assert SymbolSequence(2, 5, (0, 0)) == SymbolSequence(2)


def test_symbol_sequence_rejects_bad_symbols():
    with pytest.raises(ValueError):
        SymbolSequence(2, 0, (2,))


def test_generalized_shift_must_be_total():
    with pytest.raises(ValueError):
        GeneralizedShift(2, 0, 1, 0, 1, {(0,): 0}, {(0,): (0,), (1,): (1,)})
    with pytest.raises(ValueError):
        GeneralizedShift(2, 0, 1, 0, 1, {(0,): 0, (1,): 0}, {(0,): (0, 1), (1,): (1,)})


def test_four_window_on_each_window():
    gs = four_window_shift()
    # window (s_-1, s_0) = 01 is rewritten to 01 and the sequence shifted by -1
    s = seq({0: 1})
    assert apply_gshift(gs, s) == seq({1: 1})
    # 11 -> 00, shift -1
    assert apply_gshift(gs, seq({-1: 1, 0: 1, 3: 1})) == seq({4: 1})
    # 00 -> 01, no shift
    assert apply_gshift(gs, seq({})) == seq({0: 1})
    # 10 -> 11, no shift
    assert apply_gshift(gs, seq({-1: 1})) == seq({-1: 1, 0: 1})
    assert gs.shifts == {-1, 0}
    assert gs.max_shift == 1


def test_identity_shift():
    gs = identity_shift()
    s = seq({-3: 1, 4: 1})
    assert apply_gshift(gs, s) == s


def test_marking_roundtrip():
    for q in range(1, 6):
        for a in (0, 1):
            assert unmark(marked(q, a)) == (q, a)
    assert unmark(0) is None and unmark(1) is None


def test_witness_roundtrip_and_errors():
    w = make_witness(COUNTER)
    c = Configuration(2, Tape.from_cells({-2: 1, 0: 1, 5: 1}))
    s = w.enc(c)
    assert s[0] == marked(2, 1)
    assert w.dec(s) == c
    with pytest.raises(DecodeError):
        w.dec(SymbolSequence.from_cells(s.alphabet, {0: 1}))
    with pytest.raises(DecodeError):
        w.dec(SymbolSequence.from_cells(s.alphabet, {0: marked(1, 0), 3: marked(1, 1)}))


@pytest.mark.parametrize("tm", [COUNTER, MERGING, WALKER])
def test_compiled_shift_commutes_with_machine(tm):
    gs, w = compile_tm_to_gshift(tm)
    rng = random.Random(3)
    for _ in range(200):
        c = Configuration(rng.randint(1, tm.states), random_tape(rng))
        s = w.enc(c)
        for _ in range(20):
            c, s = transition(tm, c), apply_gshift(gs, s)
            assert w.dec(s) == c


def test_invalid_windows_are_identity():
    gs, _ = compile_tm_to_gshift(COUNTER)
    m = marked(1, 0)
    for w in [(0, 0, 1), (m, m, 0), (0, m, m), (0, marked(COUNTER.halt, 1), 1)]:
        assert gs.F[w] == 0 and gs.G[w] == w


def test_valid_windows_count():
    assert len(valid_windows(COUNTER)) == 8 * COUNTER.states


def test_binary_recoding_widths():
    gs, _ = compile_tm_to_gshift(COUNTER)
    rec = recode_binary(gs)
    assert rec.k == 3                      # 8 symbols
    assert rec.shift.f_start == -rec.k and rec.shift.f_len == 3 * rec.k
    assert rec.shift.shifts == {rec.k * e for e in gs.shifts}
    assert rec.code(5) == (1, 0, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_binary_recoding_is_a_conjugacy(seed):
    rng = random.Random(seed)
    tm = random_machine(rng.randint(2, 4), rng)
    gs, w = compile_tm_to_gshift(tm)
    rec = recode_binary(gs)
    s = w.enc(Configuration(rng.randint(1, tm.states), random_tape(rng)))
    b = rec.encode(s)
    assert rec.decode(b) == s
    for _ in range(10):
        s, b = apply_gshift(gs, s), apply_gshift(rec.shift, b)
        assert rec.decode(b) == s
