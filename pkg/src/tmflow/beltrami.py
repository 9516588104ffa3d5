"""Truncated Cauchy-Kovalevskaya extension for ``curl u = lambda * u``.

Given a planar gradient datum ``grad F`` on ``z = 0`` the Beltrami field is
built as a power series in ``z`` whose coefficients are polynomials in
``x, y`` over the rationals::

    u3[k]           = (d_x u2[k] - d_y u1[k]) / lam
    (k+1) u1[k+1]   = lam * u2[k] + d_x u3[k]
    (k+1) u2[k+1]   = d_y u3[k] - lam * u1[k]
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


class NotAGradient(ValueError):
    def __init__(self, curl: "BivariatePoly"):
        super().__init__(f"datum is not a gradient: d_x v2 - d_y v1 = {curl}")
        self.curl = curl


class BivariatePoly:
    """Sparse polynomial in ``x, y`` with :class:`Fraction` coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[i, j] = c
        self.terms: dict[tuple[int, int], Fraction] = clean

    @classmethod
    def const(cls, c) -> "BivariatePoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "BivariatePoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BivariatePoly":
        return cls({(0, 1): 1})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, BivariatePoly):
            other = BivariatePoly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if not isinstance(other, BivariatePoly):
            other = BivariatePoly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, BivariatePoly) else -Fraction(other))

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        if not isinstance(other, BivariatePoly):
            other = Fraction(other)
            return BivariatePoly({m: c * other for m, c in self.terms.items()})
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                out[i + k, j + l] = out.get((i + k, j + l), 0) + a * b
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / Fraction(other))

    def __pow__(self, n: int):
        out = BivariatePoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def dx(self) -> "BivariatePoly":
        return BivariatePoly({(i - 1, j): i * c for (i, j), c in self.terms.items() if i})

    def dy(self) -> "BivariatePoly":
        return BivariatePoly({(i, j - 1): j * c for (i, j), c in self.terms.items() if j})

    def integrate_x(self) -> "BivariatePoly":
        return BivariatePoly({(i + 1, j): c / (i + 1) for (i, j), c in self.terms.items()})

    def integrate_y(self) -> "BivariatePoly":
        return BivariatePoly({(i, j + 1): c / (j + 1) for (i, j), c in self.terms.items()})

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def __call__(self, x, y):
        if isinstance(x, Fraction) or isinstance(y, Fraction) or (
                isinstance(x, int) and isinstance(y, int)):
            return sum((c * Fraction(x) ** i * Fraction(y) ** j
                        for (i, j), c in self.terms.items()), Fraction(0))
        return sum(float(c) * x ** i * y ** j for (i, j), c in self.terms.items())

    def __repr__(self):
        return f"BivariatePoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda t: (-(t[0][0] + t[0][1]), t[0])):
            mono = "*".join(p for p in (
                "x" if i == 1 else f"x^{i}" if i else "",
                "y" if j == 1 else f"y^{j}" if j else "") if p)
            parts.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(parts)


def parse_poly(text: str) -> BivariatePoly:
    """Parse a polynomial in ``x, y`` with rational coefficients, e.g. ``x^3 - 3*x*y^2``."""
    import sympy

    x, y = sympy.symbols("x y")
    expr = sympy.sympify(text.replace("^", "**"), locals={"x": x, "y": y}, rational=True)
    poly = sympy.Poly(expr, x, y, domain="QQ")
    return BivariatePoly({
        m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms()
    })


@dataclass(frozen=True)
class CauchyDatum:
    F: BivariatePoly
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")


def check_compatibility(v1: BivariatePoly, v2: BivariatePoly) -> BivariatePoly:
    """Potential ``F`` with ``grad F = (v1, v2)`` and zero constant term."""
    curl = v2.dx() - v1.dy()
    if curl:
        raise NotAGradient(curl)
    F = v1.integrate_x()
    rest = v2 - F.dy()
    return F + rest.integrate_y()


@dataclass(frozen=True)
class VectorSeries:
    """``u_c(x, y, z) = sum_k components[c][k](x, y) * z**k`` for ``k = 0..order``."""

    u1: tuple[BivariatePoly, ...]
    u2: tuple[BivariatePoly, ...]
    u3: tuple[BivariatePoly, ...]
    lam: Fraction

    @property
    def order(self) -> int:
        return len(self.u1) - 1

    @property
    def components(self):
        return self.u1, self.u2, self.u3


def extend(datum: CauchyDatum, K: int) -> VectorSeries:
    if K < 1:
        raise ValueError("truncation order must be at least 1")
    lam = datum.lam
    u1 = [datum.F.dx()]
    u2 = [datum.F.dy()]
    u3 = []
    for k in range(K + 1):
        u3.append((u2[k].dx() - u1[k].dy()) / lam)
        if k == K:
            break
        u1.append((lam * u2[k] + u3[k].dx()) / (k + 1))
        u2.append((u3[k].dy() - lam * u1[k]) / (k + 1))
    return VectorSeries(tuple(u1), tuple(u2), tuple(u3), lam)


@dataclass(frozen=True)
class Residual:
    """z-coefficients of ``curl u - lam*u`` and ``div u`` for orders ``0..order-1``,
    plus the datum mismatch ``u|_{z=0} - grad F``."""

    curl: tuple[tuple[BivariatePoly, BivariatePoly, BivariatePoly], ...]
    div: tuple[BivariatePoly, ...]
    datum: tuple[BivariatePoly, BivariatePoly, BivariatePoly]

    @property
    def certified_order(self) -> int:
        """Largest ``k`` such that every identity holds through z-order ``k`` (``-1`` if none)."""
        if any(self.datum):
            return -1
        k = -1
        for c, d in zip(self.curl, self.div):
            if any(c) or d:
                break
            k += 1
        return k

    @property
    def exact(self) -> bool:
        return self.certified_order == len(self.curl) - 1


def residual(series: VectorSeries, lam=None, F: BivariatePoly | None = None) -> Residual:
    """Exact residuals; ``F`` defaults to the potential recovered from ``u|_{z=0}``."""
    lam = series.lam if lam is None else Fraction(lam)
    u1, u2, u3 = series.components
    K = series.order
    curl = []
    div = []
    for k in range(K):
        r1 = u3[k].dy() - (k + 1) * u2[k + 1] - lam * u1[k]
        r2 = (k + 1) * u1[k + 1] - u3[k].dx() - lam * u2[k]
        r3 = u2[k].dx() - u1[k].dy() - lam * u3[k]
        curl.append((r1, r2, r3))
        div.append(u1[k].dx() + u2[k].dy() + (k + 1) * u3[k + 1])
    if F is None:
        try:
            F = check_compatibility(u1[0], u2[0])
        except NotAGradient:
            F = BivariatePoly()
    datum = (u1[0] - F.dx(), u2[0] - F.dy(), u3[0])
    return Residual(tuple(curl), tuple(div), datum)


def evaluate(series: VectorSeries, point) -> tuple:
    """Horner evaluation in ``z``; exact if the point is rational, float otherwise."""
    x, y, z = point
    out = []
    for comp in series.components:
        acc = 0
        for p in reversed(comp):
            acc = acc * z + p(x, y)
        out.append(acc)
    return tuple(out)


def truncation_estimate(series: VectorSeries, point) -> float:
    """Size of the last retained term, a heuristic for the truncation error at ``point``."""
    x, y, z = (float(v) for v in point)
    K = series.order
    return max(abs(comp[K](x, y)) * abs(z) ** K for comp in series.components)


def series_dump(series: VectorSeries) -> str:
    lines = [f"# lambda={series.lam} order={series.order}", "# k component i j coefficient"]
    for name, comp in zip(("u1", "u2", "u3"), series.components):
        for k, p in enumerate(comp):
            for (i, j), c in sorted(p.terms.items()):
                lines.append(f"{k} {name} {i} {j} {c}")
    return "\n".join(lines) + "\n"


def grid_csv(series: VectorSeries, xs: Iterable[float], ys: Iterable[float],
             zs: Iterable[float]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "z", "u1", "u2", "u3", "norm"])
    ys, zs = list(ys), list(zs)
    for x in xs:
        for y in ys:
            for z in zs:
                u = evaluate(series, (float(x), float(y), float(z)))
                w.writerow([repr(float(x)), repr(float(y)), repr(float(z)),
                            *(repr(float(v)) for v in u),
                            repr(sum(float(v) ** 2 for v in u) ** 0.5)])
    return buf.getvalue()
