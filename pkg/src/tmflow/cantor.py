"""Square Cantor set encoding and piecewise-linear block maps.

Everything here is exact: points are digit strings over ``{0, 2}`` and all
coordinates are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .gshift import (
    BinaryRecoding,
    ConjugacyWitness,
    DecodeError,
    GeneralizedShift,
    SymbolSequence,
    compile_tm_to_gshift,
    recode_binary,
    unmark,
    valid_windows,
)
from .machine import Configuration, Tape, TuringMachine


class NoSourceBlock(LookupError):
    pass


def _ternary(digits: str, first_power: int) -> Fraction:
    # sum of d_i * 3^-(i + first_power)
    if not digits:
        return Fraction(0)
    n = int(digits, 3)
    return Fraction(n, 3 ** (len(digits) + first_power - 1))


@dataclass(frozen=True)
class TernaryPoint:
    """Point of the square Cantor set with finitely many nonzero digits.

    ``x[i-1]`` is the digit ``x_i`` (weight ``3**-i``) and ``y[i]`` is ``y_i``
    (weight ``3**-(i+1)``).
    """

    x: str = ""
    y: str = ""

    def __post_init__(self):
        if set(self.x) - {"0", "2"} or set(self.y) - {"0", "2"}:
            raise ValueError("Cantor digits must be 0 or 2")
        object.__setattr__(self, "x", self.x.rstrip("0"))
        object.__setattr__(self, "y", self.y.rstrip("0"))

    @classmethod
    def _trusted(cls, x: str, y: str) -> "TernaryPoint":
        # digits already known to be in {0, 2}
        p = object.__new__(cls)
        object.__setattr__(p, "x", x.rstrip("0"))
        object.__setattr__(p, "y", y.rstrip("0"))
        return p

    @property
    def coords(self) -> tuple[Fraction, Fraction]:
        return _ternary(self.x, 1), _ternary(self.y, 1)


def encode_sequence(s: SymbolSequence) -> TernaryPoint:
    if s.alphabet != 2:
        raise ValueError("only binary sequences embed in the square Cantor set")
    sup = s.support
    if sup is None:
        return TernaryPoint()
    lo, hi = sup
    x = "".join("2" if s[-i] else "0" for i in range(1, max(0, -lo) + 1))
    y = "".join("2" if s[i] else "0" for i in range(0, max(0, hi + 1)))
    return TernaryPoint(x, y)


def decode_point(p: TernaryPoint) -> SymbolSequence:
    cells = {-(i + 1): 1 for i, d in enumerate(p.x) if d == "2"}
    cells.update({i: 1 for i, d in enumerate(p.y) if d == "2"})
    return SymbolSequence.from_cells(2, cells)


@dataclass(frozen=True)
class CantorBlock:
    """Cylinder of Cantor points whose digits start with the given prefixes."""

    x: str
    y: str

    def contains(self, p: TernaryPoint) -> bool:
        return (p.x[:len(self.x)].ljust(len(self.x), "0") == self.x
                and p.y[:len(self.y)].ljust(len(self.y), "0") == self.y)

    @property
    def footprint(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """Closed rectangle ``(x0, x1, y0, y1)`` covering the cylinder."""
        x0, y0 = _ternary(self.x, 1), _ternary(self.y, 1)
        return x0, x0 + Fraction(1, 3 ** len(self.x)), y0, y0 + Fraction(1, 3 ** len(self.y))

    @property
    def area(self) -> Fraction:
        return Fraction(1, 3 ** (len(self.x) + len(self.y)))

    @property
    def cantor_measure(self) -> Fraction:
        return Fraction(1, 2 ** (len(self.x) + len(self.y)))

    def meets(self, other: "CantorBlock") -> bool:
        n, m = min(len(self.x), len(other.x)), min(len(self.y), len(other.y))
        return self.x[:n] == other.x[:n] and self.y[:m] == other.y[:m]


@dataclass(frozen=True)
class BlockMapComponent:
    """One affine piece ``(x, y) -> (3**-shift * x + a, 3**shift * y + b)``.

    ``shift`` is the generalized-shift amount ``F`` of the window; moving the
    sequence by ``shift`` transfers ``shift`` digits from the y stream to the
    x stream.
    """

    source: CantorBlock
    image: CantorBlock
    shift: int
    word: tuple[int, ...]

    @property
    def scale(self) -> tuple[Fraction, Fraction]:
        return Fraction(3) ** -self.shift, Fraction(3) ** self.shift

    @property
    def offset(self) -> tuple[Fraction, Fraction]:
        sx, sy = self.scale
        x0, _, y0, _ = self.source.footprint
        u0, _, v0, _ = self.image.footprint
        return u0 - sx * x0, v0 - sy * y0

    @property
    def determinant(self) -> Fraction:
        sx, sy = self.scale
        return sx * sy

    def affine(self, x: Fraction, y: Fraction) -> tuple[Fraction, Fraction]:
        (sx, sy), (a, b) = self.scale, self.offset
        return sx * x + a, sy * y + b


@dataclass(frozen=True)
class BlockMap:
    """Components over a common source window ``[lo, hi]`` of sequence positions."""

    lo: int
    hi: int
    components: tuple[BlockMapComponent, ...]
    _index: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        index = {(c.source.x, c.source.y): i for i, c in enumerate(self.components)}
        object.__setattr__(self, "_index", index)

    @property
    def dx(self) -> int:
        return max(0, -self.lo)

    @property
    def dy(self) -> int:
        return max(0, self.hi + 1)

    def locate(self, p: TernaryPoint) -> int:
        key = (p.x[:self.dx].ljust(self.dx, "0"), p.y[:self.dy].ljust(self.dy, "0"))
        try:
            return self._index[key]
        except KeyError:
            raise NoSourceBlock(f"no source block for {p}") from None

    def component_for_word(self, word: tuple[int, ...]) -> int:
        x = "".join("2" if word[-i - self.lo] else "0" for i in range(1, self.dx + 1))
        y = "".join("2" if word[i - self.lo] else "0" for i in range(self.dy))
        return self._index[x, y]


def _hull(gs: GeneralizedShift) -> tuple[int, int]:
    # source and every image window must straddle the x/y boundary so that
    # cylinders are digit prefixes
    lows, highs = [0], [-1]
    for start, length in ((gs.f_start, gs.f_len), (gs.g_start, gs.g_len)):
        if length:
            lows.append(start)
            highs.append(start + length - 1)
    shifts = gs.shifts
    return min(lows + [min(shifts)]), max(highs + [max(shifts) - 1])


def gshift_to_blockmap(gs: GeneralizedShift) -> BlockMap:
    """Block map realizing ``gs`` on the square Cantor set.

    One component per binary word on the hull of both windows (widened when a
    shift would otherwise leave an image cylinder that is not a prefix set).
    """
    if gs.alphabet != 2:
        raise ValueError("block maps need a binary shift; use recode_binary first")
    lo, hi = _hull(gs)
    comps = []
    for w in itertools.product((0, 1), repeat=hi - lo + 1):
        t = gs.F[w[gs.f_start - lo:gs.f_start - lo + gs.f_len]]
        g = gs.G[w[gs.g_start - lo:gs.g_start - lo + gs.g_len]]
        w2 = list(w)
        w2[gs.g_start - lo:gs.g_start - lo + gs.g_len] = g

        def digit(word, p, base):
            return "2" if word[p - base] else "0"

        src = CantorBlock(
            "".join(digit(w, -i, lo) for i in range(1, -lo + 1)),
            "".join(digit(w, i, lo) for i in range(0, hi + 1)),
        )
        # image position p holds w2[p + t]
        img = CantorBlock(
            "".join(digit(w2, -i + t, lo) for i in range(1, t - lo + 1)),
            "".join(digit(w2, i + t, lo) for i in range(0, hi - t + 1)),
        )
        comps.append(BlockMapComponent(src, img, t, w))
    return BlockMap(lo, hi, tuple(comps))


def apply_blockmap(bm: BlockMap, p: TernaryPoint) -> TernaryPoint:
    """Replace the source prefix by the image prefix; the digit tails carry over."""
    c = bm.components[bm.locate(p)]
    return TernaryPoint._trusted(c.image.x + p.x[bm.dx:], c.image.y + p.y[bm.dy:])


@dataclass(frozen=True)
class AreaCertificate:
    ok: bool
    determinants: tuple[Fraction, ...]
    depths: tuple[tuple[int, int], ...]
    source_area: Fraction
    image_area: Fraction
    source_measure: Fraction
    image_measure: Fraction


def check_area_preserving(bm: BlockMap) -> AreaCertificate:
    dets, depths = [], []
    ok = True
    for c in bm.components:
        d = c.determinant
        ds = len(c.source.x) + len(c.source.y)
        di = len(c.image.x) + len(c.image.y)
        dets.append(d)
        depths.append((ds, di))
        if d != 1 or ds != di or c.source.area != c.image.area:
            ok = False
        # the affine form must carry the source footprint onto the image footprint
        x0, x1, y0, y1 = c.source.footprint
        u0, v0 = c.affine(x0, y0)
        u1, v1 = c.affine(x1, y1)
        if (u0, u1, v0, v1) != c.image.footprint:
            ok = False
    src = sum((c.source.area for c in bm.components), Fraction(0))
    img = sum((c.image.area for c in bm.components), Fraction(0))
    msrc = sum((c.source.cantor_measure for c in bm.components), Fraction(0))
    mimg = sum((c.image.cantor_measure for c in bm.components), Fraction(0))
    ok = ok and src == img and msrc == mimg == 1
    return AreaCertificate(ok, tuple(dets), tuple(depths), src, img, msrc, mimg)


@dataclass(frozen=True)
class DisjointnessResult:
    ok: bool
    witness: tuple[int, int] | None = None

    def __bool__(self):
        return self.ok


def check_disjoint_images(bm: BlockMap, indices=None) -> DisjointnessResult:
    """Pairwise disjointness of image cylinders, optionally restricted to ``indices``.

    Two cylinders meet iff their prefixes agree on the common depth, so images
    are bucketed by depth class and compared on truncated prefixes.
    """
    idx = list(range(len(bm.components))) if indices is None else sorted(indices)
    groups: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i in idx:
        im = bm.components[i].image
        groups[len(im.x), len(im.y)].append(i)
    classes = sorted(groups)
    for a, ca in enumerate(classes):
        for cb in classes[a:]:
            nx, ny = min(ca[0], cb[0]), min(ca[1], cb[1])
            seen: dict[tuple[str, str], int] = {}
            for i in groups[ca]:
                im = bm.components[i].image
                key = (im.x[:nx], im.y[:ny])
                if ca == cb and key in seen:
                    return DisjointnessResult(False, (seen[key], i))
                seen.setdefault(key, i)
            if ca == cb:
                continue
            for j in groups[cb]:
                im = bm.components[j].image
                key = (im.x[:nx], im.y[:ny])
                if key in seen:
                    return DisjointnessResult(False, tuple(sorted((seen[key], j))))
    return DisjointnessResult(True)


def _fmt_ternary(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    k = 0
    d = v.denominator
    while d % 3 == 0:
        d //= 3
        k += 1
    assert d == 1, "block-map coordinates are ternary rationals"
    return f"{v.numerator}/3^{k}"


def blockmap_report(bm: BlockMap) -> str:
    lines = ["# component source_x source_y -> image_x image_y shift a b"]
    for i, c in enumerate(bm.components):
        a, b = c.offset
        lines.append(
            f"{i} {c.source.x or '-'} {c.source.y or '-'} -> "
            f"{c.image.x or '-'} {c.image.y or '-'} {c.shift} "
            f"{_fmt_ternary(a)} {_fmt_ternary(b)}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CompiledMachine:
    """The full lowering chain machine -> symbol shift -> bit shift -> block map."""

    tm: TuringMachine
    shift: GeneralizedShift
    witness: ConjugacyWitness
    recoding: BinaryRecoding

    @cached_property
    def blockmap(self) -> BlockMap:
        return gshift_to_blockmap(self.recoding.shift)

    @cached_property
    def live(self) -> list[int]:
        """Components whose source window occurs at the head of an encoded configuration."""
        bm = self.blockmap
        out = []
        for w in valid_windows(self.tm):
            bits = sum((self.recoding.code(v) for v in w), ())
            out.append(bm.component_for_word(bits))
        return sorted(out)

    @cached_property
    def halt_codes(self) -> frozenset[str]:
        from .gshift import marked

        return frozenset(
            "".join("2" if b else "0" for b in self.recoding.code(marked(self.tm.halt, a)))
            for a in (0, 1)
        )

    def encode(self, c: Configuration) -> TernaryPoint:
        return encode_sequence(self.recoding.encode(self.witness.enc(c)))

    def decode(self, p: TernaryPoint) -> Configuration:
        """Read the configuration straight off the digit strings.

        Same result as ``witness.dec(recoding.decode(decode_point(p)))``
        without building the intermediate sequences.
        """
        k, n = self.recoding.k, self.recoding.alphabet
        bits = str.maketrans("02", "01")
        y = p.y.translate(bits)
        x = p.x.translate(bits)
        right = [int(y[i:i + k].ljust(k, "0"), 2) for i in range(0, len(y), k)] or [0]
        left = [int(x[i:i + k].ljust(k, "0")[::-1], 2) for i in range(0, len(x), k)]
        head = unmark(right[0]) if right[0] < n else None
        if head is None or head[0] > self.tm.states:
            raise DecodeError("position 0 carries no state mark")
        right[0] = head[1]
        if max(right) >= 2 or (left and max(left) >= 2):
            raise DecodeError("stray state marks or invalid bit words")
        return Configuration(head[0], Tape(-len(left), tuple(left[::-1] + right)))

    def step(self, p: TernaryPoint) -> TernaryPoint:
        return apply_blockmap(self.blockmap, p)

    def is_halting(self, p: TernaryPoint) -> bool:
        """Head cell (the first ``k`` y digits) carries the halt state."""
        k = self.recoding.k
        return p.y[:k].ljust(k, "0") in self.halt_codes

    def reversibility(self) -> tuple[bool, tuple[int, int] | None]:
        r = check_disjoint_images(self.blockmap, self.live)
        return r.ok, r.witness


def compile_machine(tm: TuringMachine) -> CompiledMachine:
    gs, wit = compile_tm_to_gshift(tm)
    return CompiledMachine(tm, gs, wit, recode_binary(gs))
