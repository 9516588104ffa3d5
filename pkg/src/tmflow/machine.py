"""Turing machines over the binary alphabet with a fixed head.

The head always sits at position 0; a step writes the new symbol there and
then shifts the whole tape (``+1`` is a left shift, ``-1`` a right shift).
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

BLANK = 0
MOVES = {"L": 1, "N": 0, "R": -1}
MOVE_NAMES = {v: k for k, v in MOVES.items()}


class MachineSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MachineSemanticError(ValueError):
    pass


@dataclass(frozen=True)
class Tape:
    """Finitely supported binary tape stored as ``(offset, word)``.

    ``word[i]`` is the symbol at position ``offset + i``.  The constructor
    trims blanks at both ends so equal tapes compare equal.
    """

    offset: int = 0
    word: tuple[int, ...] = ()

    def __post_init__(self):
        word = tuple(self.word)
        if any(s not in (0, 1) for s in word):
            raise ValueError(f"tape symbols must be 0 or 1: {word}")
        lo = 0
        while lo < len(word) and word[lo] == BLANK:
            lo += 1
        hi = len(word)
        while hi > lo and word[hi - 1] == BLANK:
            hi -= 1
        offset = self.offset + lo if hi > lo else 0
        object.__setattr__(self, "word", word[lo:hi])
        object.__setattr__(self, "offset", offset)

    @classmethod
    def from_cells(cls, cells: Mapping[int, int] | Iterable[tuple[int, int]]) -> "Tape":
        items = dict(cells)
        ones = [p for p, s in items.items() if s]
        if not ones:
            return cls()
        lo, hi = min(ones), max(ones)
        return cls(lo, tuple(items.get(p, 0) for p in range(lo, hi + 1)))

    def __getitem__(self, pos: int) -> int:
        i = pos - self.offset
        if 0 <= i < len(self.word):
            return self.word[i]
        return BLANK

    def cells(self) -> dict[int, int]:
        return {self.offset + i: s for i, s in enumerate(self.word) if s}

    @property
    def support(self) -> tuple[int, int] | None:
        """Closed range of positions holding a 1, or None for a blank tape."""
        if not self.word:
            return None
        return self.offset, self.offset + len(self.word) - 1

    def write(self, pos: int, sym: int) -> "Tape":
        if self[pos] == sym:
            return self
        if not self.word:
            return Tape(pos, (sym,))
        lo = min(self.offset, pos)
        hi = max(self.offset + len(self.word) - 1, pos)
        word = [self[p] for p in range(lo, hi + 1)]
        word[pos - lo] = sym
        return Tape(lo, tuple(word))

    def shift(self, eps: int) -> "Tape":
        """Tape with ``new[n] = self[n + eps]``."""
        if not self.word:
            return self
        return Tape(self.offset - eps, self.word)

    def __str__(self):
        if not self.word:
            return "blank"
        return ",".join(f"{p}:1" for p in sorted(self.cells()))


@dataclass(frozen=True)
class Configuration:
    state: int
    tape: Tape = field(default_factory=Tape)

    def __str__(self):
        return f"({self.state}, {self.tape})"


@dataclass(frozen=True)
class TuringMachine:
    """Machine with states ``1..states``; ``delta`` maps ``(q, sym)`` to ``(q', sym', move)``."""

    states: int
    start: int
    halt: int
    delta: Mapping[tuple[int, int], tuple[int, int, int]]

    def __post_init__(self):
        object.__setattr__(self, "delta", dict(self.delta))
        validate(self)

    def __hash__(self):
        return hash((self.states, self.start, self.halt, tuple(sorted(self.delta.items()))))

    @property
    def active_states(self) -> list[int]:
        return [q for q in range(1, self.states + 1) if q != self.halt]

    def initial(self, tape: Tape | None = None) -> Configuration:
        return Configuration(self.start, tape if tape is not None else Tape())


def validate(tm: TuringMachine) -> None:
    m = tm.states
    if not isinstance(m, int) or m < 1:
        raise MachineSemanticError(f"state count must be a positive integer, got {m!r}")
    for name, q in (("start", tm.start), ("halt", tm.halt)):
        if not 1 <= q <= m:
            raise MachineSemanticError(f"{name} state {q} outside 1..{m}")
    if tm.start == tm.halt:
        raise MachineSemanticError("start and halt states must differ")
    for (q, a), (q2, a2, eps) in tm.delta.items():
        if q == tm.halt:
            raise MachineSemanticError(f"transition defined on halt state {q}")
        if not 1 <= q <= m or not 1 <= q2 <= m:
            raise MachineSemanticError(f"unknown state in transition ({q},{a}) -> {q2}")
        if a not in (0, 1) or a2 not in (0, 1):
            raise MachineSemanticError(f"symbol outside {{0,1}} in transition ({q},{a})")
        if eps not in (-1, 0, 1):
            raise MachineSemanticError(f"move {eps} outside {{-1,0,1}}")
    missing = [(q, a) for q in tm.active_states for a in (0, 1) if (q, a) not in tm.delta]
    if missing:
        raise MachineSemanticError(f"missing transitions: {missing}")


_HEADER = re.compile(r"^(states|start|halt)\s*:\s*(\S+)$")
_RULE = re.compile(r"^(\S+)\s+(\S+)\s*->\s*(\S+)\s+(\S+)\s+(\S+)$")


def _int(tok: str, lineno: int, what: str) -> int:
    if not re.fullmatch(r"[0-9]+", tok):
        raise MachineSyntaxError(lineno, f"expected {what}, got {tok!r}")
    return int(tok)


def parse_machine(text: str) -> TuringMachine:
    """Parse the line-based machine format.

    ::

        states: 3
        start: 1
        halt: 3
        1 0 -> 2 1 L    # move is L (+1), N (0) or R (-1)
    """
    header: dict[str, int] = {}
    delta: dict[tuple[int, int], tuple[int, int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            key = m.group(1)
            if key in header:
                raise MachineSyntaxError(lineno, f"duplicate header {key!r}")
            header[key] = _int(m.group(2), lineno, key)
            continue
        m = _RULE.match(line)
        if not m:
            raise MachineSyntaxError(lineno, f"unrecognised line {line!r}")
        q, a, q2, a2, mv = m.groups()
        q, q2 = _int(q, lineno, "state"), _int(q2, lineno, "state")
        a, a2 = _int(a, lineno, "symbol"), _int(a2, lineno, "symbol")
        if a > 1 or a2 > 1:
            raise MachineSyntaxError(lineno, "symbols must be 0 or 1")
        if mv not in MOVES:
            raise MachineSyntaxError(lineno, f"move must be one of L, N, R, got {mv!r}")
        if (q, a) in delta:
            raise MachineSemanticError(f"line {lineno}: duplicate transition for ({q},{a})")
        delta[q, a] = (q2, a2, MOVES[mv])
    for key in ("states", "start", "halt"):
        if key not in header:
            raise MachineSemanticError(f"missing header {key!r}")
    return TuringMachine(header["states"], header["start"], header["halt"], delta)


def format_machine(tm: TuringMachine) -> str:
    lines = [f"states: {tm.states}", f"start: {tm.start}", f"halt: {tm.halt}"]
    for (q, a), (q2, a2, eps) in sorted(tm.delta.items()):
        lines.append(f"{q} {a} -> {q2} {a2} {MOVE_NAMES[eps]}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Halted:
    tape: Tape


@dataclass(frozen=True)
class Next:
    config: Configuration


StepResult = Union[Halted, Next]


def step(tm: TuringMachine, c: Configuration) -> StepResult:
    if c.state == tm.halt:
        return Halted(c.tape)
    q2, a2, eps = tm.delta[c.state, c.tape[0]]
    return Next(Configuration(q2, c.tape.write(0, a2).shift(eps)))


def transition(tm: TuringMachine, c: Configuration) -> Configuration:
    """Global transition; halting configurations are returned unchanged."""
    r = step(tm, c)
    return r.config if isinstance(r, Next) else c


@dataclass(frozen=True)
class HaltedAt:
    step: int
    tape: Tape


@dataclass(frozen=True)
class Running:
    pass


@dataclass(frozen=True)
class RunResult:
    status: HaltedAt | Running
    trace: list[Configuration]

    @property
    def halted(self) -> bool:
        return isinstance(self.status, HaltedAt)


def iterate(tm: TuringMachine, c: Configuration) -> Iterator[Configuration]:
    while True:
        yield c
        if c.state == tm.halt:
            return
        c = transition(tm, c)


def run(tm: TuringMachine, c: Configuration, max_steps: int) -> RunResult:
    """Iterate from ``c`` for at most ``max_steps`` steps; ``trace[k]`` is the k-th iterate."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    trace = [c]
    while True:
        cur = trace[-1]
        if cur.state == tm.halt:
            return RunResult(HaltedAt(len(trace) - 1, cur.tape), trace)
        if len(trace) - 1 == max_steps:
            return RunResult(Running(), trace)
        trace.append(transition(tm, cur))


def is_reversible(tm: TuringMachine) -> bool:
    """True iff the compiled block map sends reachable windows to pairwise disjoint blocks."""
    from .cantor import compile_machine

    return compile_machine(tm).reversibility()[0]


def random_machine(states: int, rng: random.Random, halt_weight: float = 0.15) -> TuringMachine:
    """Random total machine with start 1 and halt ``states``.

    ``halt_weight`` biases transitions into the halt state so that a decent
    fraction of random machines halt early.
    """
    halt = states
    delta = {}
    for q in range(1, states):
        for a in (0, 1):
            if rng.random() < halt_weight:
                q2 = halt
            else:
                q2 = rng.randint(1, states)
            delta[q, a] = (q2, rng.randint(0, 1), rng.choice((-1, 0, 1)))
    return TuringMachine(states, 1, halt, delta)


def random_tape(rng: random.Random, support: int = 20) -> Tape:
    """Uniform tape on a window of ``support`` cells placed around the head."""
    lo = rng.randint(-support + 1, 0)
    return Tape(lo, tuple(rng.randint(0, 1) for _ in range(support)))
