"""Generalized shifts and the lowering of Turing machines onto them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import ceil, log2
from typing import Callable, Mapping

from .machine import Configuration, Tape, TuringMachine


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class SymbolSequence:
    """Finitely supported sequence ``Z -> {0..alphabet-1}`` with blank 0.

    Stored as ``(offset, word)``, trimmed like :class:`~tmflow.machine.Tape`.
    """

    alphabet: int
    offset: int = 0
    word: tuple[int, ...] = ()

    def __post_init__(self):
        word = tuple(self.word)
        if any(not 0 <= s < self.alphabet for s in word):
            raise ValueError(f"symbol outside alphabet of size {self.alphabet}")
        lo = 0
        while lo < len(word) and word[lo] == 0:
            lo += 1
        hi = len(word)
        while hi > lo and word[hi - 1] == 0:
            hi -= 1
        object.__setattr__(self, "word", word[lo:hi])
        object.__setattr__(self, "offset", self.offset + lo if hi > lo else 0)

    @classmethod
    def from_cells(cls, alphabet: int, cells: Mapping[int, int]) -> "SymbolSequence":
        nz = [p for p, s in cells.items() if s]
        if not nz:
            return cls(alphabet)
        lo, hi = min(nz), max(nz)
        return cls(alphabet, lo, tuple(cells.get(p, 0) for p in range(lo, hi + 1)))

    def __getitem__(self, pos: int) -> int:
        i = pos - self.offset
        if 0 <= i < len(self.word):
            return self.word[i]
        return 0

    def read(self, start: int, length: int) -> tuple[int, ...]:
        return tuple(self[p] for p in range(start, start + length))

    def cells(self) -> dict[int, int]:
        return {self.offset + i: s for i, s in enumerate(self.word) if s}

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.word:
            return None
        return self.offset, self.offset + len(self.word) - 1

    def rewrite(self, start: int, block: tuple[int, ...]) -> "SymbolSequence":
        if not block:
            return self
        if self.word:
            lo = min(self.offset, start)
            hi = max(self.offset + len(self.word), start + len(block))
        else:
            lo, hi = start, start + len(block)
        word = [self[p] for p in range(lo, hi)]
        word[start - lo:start - lo + len(block)] = block
        return SymbolSequence(self.alphabet, lo, tuple(word))

    def shift(self, n: int) -> "SymbolSequence":
        """Sequence with ``new[p] = self[p + n]``."""
        return SymbolSequence(self.alphabet, self.offset - n, self.word)


@dataclass(frozen=True)
class GeneralizedShift:
    """Moore's generalized shift.

    ``F`` reads the ``f_len`` cells starting at ``f_start`` and returns the
    shift amount; ``G`` rewrites the ``g_len`` cells starting at ``g_start``.
    Both tables are exhaustive over their window words.
    """

    alphabet: int
    f_start: int
    f_len: int
    g_start: int
    g_len: int
    F: Mapping[tuple[int, ...], int]
    G: Mapping[tuple[int, ...], tuple[int, ...]]

    def __post_init__(self):
        for w in itertools.product(range(self.alphabet), repeat=self.f_len):
            if w not in self.F:
                raise ValueError(f"F undefined on window {w}")
        for w in itertools.product(range(self.alphabet), repeat=self.g_len):
            if w not in self.G:
                raise ValueError(f"G undefined on window {w}")
            if len(self.G[w]) != self.g_len:
                raise ValueError(f"G({w}) has wrong length")

    @property
    def shifts(self) -> set[int]:
        return set(self.F.values())

    @property
    def max_shift(self) -> int:
        return max((abs(v) for v in self.F.values()), default=0)


def apply_gshift(gs: GeneralizedShift, s: SymbolSequence) -> SymbolSequence:
    if s.alphabet != gs.alphabet:
        raise ValueError("sequence alphabet does not match the shift")
    t = gs.F[s.read(gs.f_start, gs.f_len)]
    g = gs.G[s.read(gs.g_start, gs.g_len)]
    return s.rewrite(gs.g_start, g).shift(t)


def identity_shift(alphabet: int = 2) -> GeneralizedShift:
    return GeneralizedShift(alphabet, 0, 0, 0, 0, {(): 0}, {(): ()})


def four_window_shift() -> GeneralizedShift:
    """The two-cell example on ``{-1, 0}``; the four windows A, B, C, D are 01, 11, 00, 10."""
    G = {(0, 1): (0, 1), (1, 1): (0, 0), (0, 0): (0, 1), (1, 0): (1, 1)}
    F = {(0, 1): -1, (1, 1): -1, (0, 0): 0, (1, 0): 0}
    return GeneralizedShift(2, -1, 2, -1, 2, F, G)


# -- Turing machine lowering ------------------------------------------------


def marked(q: int, a: int) -> int:
    """Symbol id of the head cell carrying state ``q`` over tape symbol ``a``."""
    return 2 + 2 * (q - 1) + a


def unmark(sym: int) -> tuple[int, int] | None:
    if sym < 2:
        return None
    return (sym - 2) // 2 + 1, (sym - 2) % 2


@dataclass(frozen=True)
class ConjugacyWitness:
    enc: Callable[[Configuration], SymbolSequence]
    dec: Callable[[SymbolSequence], Configuration]


def make_witness(tm: TuringMachine) -> ConjugacyWitness:
    alphabet = 2 + 2 * tm.states

    def enc(c: Configuration) -> SymbolSequence:
        cells = c.tape.cells()
        cells[0] = marked(c.state, c.tape[0])
        return SymbolSequence.from_cells(alphabet, cells)

    def dec(s: SymbolSequence) -> Configuration:
        head = unmark(s[0])
        if head is None:
            raise DecodeError("position 0 carries no state mark")
        cells = s.cells()
        extra = [p for p, v in cells.items() if v >= 2 and p != 0]
        if extra:
            raise DecodeError(f"stray state marks at positions {sorted(extra)}")
        q, a = head
        if q > tm.states:
            raise DecodeError(f"state {q} out of range")
        cells[0] = a
        return Configuration(q, Tape.from_cells(cells))

    return ConjugacyWitness(enc, dec)


def compile_tm_to_gshift(tm: TuringMachine) -> tuple[GeneralizedShift, ConjugacyWitness]:
    """Generalized shift over ``{0,1} + Q x {0,1}`` acting on the window ``{-1,0,1}``.

    Windows with an unmarked or halt-marked centre, or with a mark on either
    neighbour, are left fixed with ``F = 0``; encoded configurations never
    produce the latter.
    """
    n = 2 + 2 * tm.states
    F: dict[tuple[int, ...], int] = {}
    G: dict[tuple[int, ...], tuple[int, ...]] = {}
    for w in itertools.product(range(n), repeat=3):
        x, mid, z = w
        head = unmark(mid)
        F[w], G[w] = 0, w
        if head is None or head[0] == tm.halt or x >= 2 or z >= 2:
            continue
        q2, a2, eps = tm.delta[head]
        if eps == 1:
            G[w] = (x, a2, marked(q2, z))
        elif eps == -1:
            G[w] = (marked(q2, x), a2, z)
        else:
            G[w] = (x, marked(q2, a2), z)
        F[w] = eps
    return GeneralizedShift(n, -1, 3, -1, 3, F, G), make_witness(tm)


def valid_windows(tm: TuringMachine) -> list[tuple[int, int, int]]:
    """Windows ``(x, (q,a), z)`` that occur at the head of encoded configurations."""
    return [(x, marked(q, a), z)
            for q in range(1, tm.states + 1) for a in (0, 1)
            for x in (0, 1) for z in (0, 1)]


@dataclass(frozen=True)
class BinaryRecoding:
    """Block code from a symbol-level shift to a bit-level one.

    Symbol ``v`` becomes the ``k``-bit big-endian word of ``v``; cell ``n``
    occupies bit positions ``k*n .. k*n + k - 1``.
    """

    k: int
    alphabet: int
    shift: GeneralizedShift

    def code(self, v: int) -> tuple[int, ...]:
        return tuple((v >> (self.k - 1 - j)) & 1 for j in range(self.k))

    def encode(self, s: SymbolSequence) -> SymbolSequence:
        cells = {}
        for p, v in s.cells().items():
            for j, b in enumerate(self.code(v)):
                if b:
                    cells[self.k * p + j] = 1
        return SymbolSequence.from_cells(2, cells)

    def decode(self, bits: SymbolSequence) -> SymbolSequence:
        sup = bits.support
        if sup is None:
            return SymbolSequence(self.alphabet)
        k = self.k
        lo, hi = sup[0] // k, sup[1] // k
        word = []
        for n in range(lo, hi + 1):
            v = 0
            for j in range(k):
                v = 2 * v + bits[k * n + j]
            if v >= self.alphabet:
                raise DecodeError(f"bit word at cell {n} is not a symbol code")
            word.append(v)
        return SymbolSequence(self.alphabet, lo, tuple(word))


def recode_binary(gs: GeneralizedShift) -> BinaryRecoding:
    """Bit-level shift conjugate to ``gs`` through the fixed-width block code.

    Requires both windows of ``gs`` to be ``{-1, 0, 1}`` (the shape produced by
    :func:`compile_tm_to_gshift`).  Bit windows that do not decode to three
    symbols are fixed with ``F = 0``.
    """
    if (gs.f_start, gs.f_len, gs.g_start, gs.g_len) != (-1, 3, -1, 3):
        raise ValueError("recode_binary expects windows {-1,0,1}")
    n = gs.alphabet
    k = max(1, ceil(log2(n)))
    F: dict[tuple[int, ...], int] = {}
    G: dict[tuple[int, ...], tuple[int, ...]] = {}
    rec = BinaryRecoding(k, n, identity_shift())
    for bits in itertools.product((0, 1), repeat=3 * k):
        syms = []
        for c in range(3):
            v = 0
            for b in bits[c * k:(c + 1) * k]:
                v = 2 * v + b
            syms.append(v)
        F[bits], G[bits] = 0, bits
        if all(v < n for v in syms):
            w = tuple(syms)
            F[bits] = k * gs.F[w]
            G[bits] = sum((rec.code(v) for v in gs.G[w]), ())
    gs2 = GeneralizedShift(2, -k, 3 * k, -k, 3 * k, F, G)
    return BinaryRecoding(k, n, gs2)
