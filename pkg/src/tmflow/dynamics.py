"""Bounded reachability, suspension flows and the rigid-rotation control."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Mapping, Sequence, Union

from .cantor import CompiledMachine, TernaryPoint, compile_machine
from .machine import Configuration, TuringMachine, run


@dataclass(frozen=True)
class DiscreteSystem:
    """A map on a state space plus named, decidable coding sets."""

    tag: str
    map: Callable[[Any], Any]
    coding_sets: Mapping[str, Callable[[Any], bool]] = field(default_factory=dict)


@dataclass(frozen=True)
class HaltingSet:
    """Points whose head window carries the halt state (intensional)."""

    compiled: CompiledMachine

    def __call__(self, p: TernaryPoint) -> bool:
        return self.compiled.is_halting(p)


def blockmap_system(cm: CompiledMachine) -> DiscreteSystem:
    return DiscreteSystem("cantor-square", cm.step, {"halt": HaltingSet(cm)})


@dataclass(frozen=True)
class Reached:
    step: int


@dataclass(frozen=True)
class NotWithin:
    bound: int


ReachResult = Union[Reached, NotWithin]


def reach(system: DiscreteSystem, start, target: Callable[[Any], bool], N: int) -> ReachResult:
    """Smallest ``n <= N`` with ``map^n(start)`` in ``target``.

    ``NotWithin(N)`` says nothing about later steps.
    """
    p = start
    for n in range(N + 1):
        if target(p):
            return Reached(n)
        if n < N:
            p = system.map(p)
    return NotWithin(N)


@dataclass(frozen=True)
class EquivalenceReport:
    machine: ReachResult
    flow: ReachResult

    @property
    def agree(self) -> bool:
        return self.machine == self.flow


def halting_equivalence(tm: TuringMachine, c: Configuration, N: int,
                        compiled: CompiledMachine | None = None) -> EquivalenceReport:
    """Compare the machine's halting step with reachability on its block map."""
    cm = compiled or compile_machine(tm)
    r = run(tm, c, N)
    machine_side = Reached(r.status.step) if r.halted else NotWithin(N)
    sys_ = blockmap_system(cm)
    flow_side = reach(sys_, cm.encode(c), sys_.coding_sets["halt"], N)
    return EquivalenceReport(machine_side, flow_side)


def trace_csv(cm: CompiledMachine, c: Configuration, N: int) -> str:
    """Orbit of ``encode(c)``: step, state, head window, exact Cantor coordinates."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "state", "head_window", "x", "y"])
    p = cm.encode(c)
    for n in range(N + 1):
        conf = cm.decode(p)
        window = "".join(str(conf.tape[i]) for i in (-1, 0, 1))
        x, y = p.coords
        w.writerow([n, conf.state, window, str(x), str(y)])
        if cm.is_halting(p) or n == N:
            break
        p = cm.step(p)
    return buf.getvalue()


# -- suspension --------------------------------------------------------------


@dataclass(frozen=True)
class SuspensionFlow:
    """Flow on ``(point, phase)`` with roof 1; crossing phase 1 applies ``base`` once."""

    base: Callable[[Hashable], Hashable]

    def flow(self, point, phase, time) -> tuple[Any, Fraction]:
        phase, time = Fraction(phase), Fraction(time)
        if not 0 <= phase < 1 or time < 0:
            raise ValueError("phase must lie in [0,1) and time must be non-negative")
        total = phase + time
        n = math.floor(total)
        for _ in range(n):
            point = self.base(point)
        return point, total - n


def suspend(f: Callable) -> SuspensionFlow:
    return SuspensionFlow(f)


def return_map(flow: SuspensionFlow) -> Callable:
    """First-return map to the section ``phase = 0``."""

    def first_return(p):
        q, phase = flow.flow(p, 0, 1)
        assert phase == 0
        return q

    return first_return


# -- rigid rotation ----------------------------------------------------------


class IrrationalFrequency(ValueError):
    pass


def _exact(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError("pass exact rationals (int, Fraction or str), not float")
    return Fraction(v)


@dataclass(frozen=True)
class RotationSystem:
    """Return map of the Seifert flow ``l d/dphi1 + k d/dphi2`` on the disk ``phi1 = 0``.

    Angles are measured in turns, so the rotation number is ``k / l`` and the
    frequency in radians is ``2*pi*k/l``.
    """

    l: Fraction
    k: Fraction

    @property
    def rotation_number(self) -> Fraction:
        return self.k / self.l

    @property
    def omega(self) -> float:
        return 2 * math.pi * float(self.rotation_number)

    @property
    def is_identity(self) -> bool:
        return self.rotation_number.denominator == 1

    def __call__(self, point: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
        s, phi = point
        return s, (Fraction(phi) + self.rotation_number) % 1

    def radians(self, s: float, phi: float) -> tuple[float, float]:
        return s, (phi + self.omega) % (2 * math.pi)


def rotation_return(l, k) -> RotationSystem:
    l, k = _exact(l), _exact(k)
    if l <= 0 or k <= 0:
        raise ValueError("l and k must be positive")
    return RotationSystem(l, k)


@dataclass(frozen=True)
class Rect:
    """Closed rectangle ``[s0, s1] x [phi0, phi1]`` with angles in turns, ``0 <= phi0 <= phi1 <= 1``."""

    s0: Fraction
    s1: Fraction
    phi0: Fraction
    phi1: Fraction

    def contains(self, s, phi) -> bool:
        return self.s0 <= s <= self.s1 and self.phi0 <= phi <= self.phi1


@dataclass(frozen=True)
class Decided:
    value: bool
    step: int | None = None


def rotation_reach_decider(l, k, start: tuple, target: Sequence[Rect]) -> Decided:
    """Decide whether the forward orbit of ``start`` meets ``target``.

    Rational ``k/l`` (exact input) gives a finite orbit checked point by point.
    A float ``k/l`` is treated as an irrational rotation: the orbit is dense in
    its invariant circle, so the answer is whether that circle meets the
    interior of some rectangle; degenerate contacts raise
    :class:`IrrationalFrequency`.
    """
    s, phi = start
    if isinstance(l, float) or isinstance(k, float):
        s = float(s)
        touched = False
        for r in target:
            if float(r.s0) <= s <= float(r.s1):
                if r.phi1 > r.phi0:
                    return Decided(True)
                touched = True
        if touched:
            raise IrrationalFrequency("orbit circle meets the target only in a null set")
        return Decided(False)
    rot = rotation_return(l, k)
    s, phi = Fraction(s), Fraction(phi) % 1
    period = rot.rotation_number.denominator
    p = (s, phi)
    for n in range(period):
        if any(r.contains(*p) for r in target):
            return Decided(True, n)
        p = rot(p)
    return Decided(False)
