"""Planar gradient flow whose trajectories track Turing machine runs.

Configurations are encoded as rationals ``phi(q, t) = 2**-q * 3**-r * 5**-s``.
Input ``i`` lives in the vertical band ``[2i, 2i+1] x [0, inf)``: its
computation curve passes through ``(2i + phi(c_k), k)`` at every integer
height ``k``.

The potential on a band with curve ``x = g(y)`` is::

    f = y + beta(y) * xi - (c/2) * P(xi),   xi = x - g(y),  beta = g' / (1 + g'**2)

with ``P(xi) = 2a**2 (sqrt(1 + (xi/a)**2) - 1)``, which equals ``xi**2`` to
leading order and grows only linearly far from the curve.  The curve is an
exact integral curve of ``grad f`` and nearby offsets obey
``d(xi)/dt = -(c*(1 + g'**2) + g' * beta') * xi`` to first order.  Outside the
band ``x`` is smoothly clamped to the band edge, and bands are glued across
the gaps ``(2i+1, 2i+2)`` by a smooth partition of unity; bands without a
curve carry the background ``f = y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .machine import Configuration, Tape, TuringMachine, run

LN2, LN3, LN5 = math.log(2), math.log(3), math.log(5)


class TubeTooWide(ValueError):
    pass


class StepFailure(RuntimeError):
    pass


# -- encoding ----------------------------------------------------------------


def tape_numbers(t: Tape) -> tuple[int, int]:
    """``(r, s)``: the non-negative half read as ``t_b..t_0`` and the negative half as ``t_-a..t_-1``."""
    r = s = 0
    for p, v in t.cells().items():
        if p >= 0:
            r |= v << p
        else:
            s |= v << (-p - 1)
    return r, s


def tape_from_numbers(r: int, s: int) -> Tape:
    cells = {i: 1 for i in range(r.bit_length()) if r >> i & 1}
    cells.update({-i - 1: 1 for i in range(s.bit_length()) if s >> i & 1})
    return Tape.from_cells(cells)


def phi_encode(q: int, t: Tape) -> Fraction:
    r, s = tape_numbers(t)
    return Fraction(1, 2 ** q * 3 ** r * 5 ** s)


def phi_of(c: Configuration) -> Fraction:
    return phi_encode(c.state, c.tape)


def interval_of(q: int, t: Tape) -> tuple[Fraction, Fraction]:
    """Interval of length ``phi**2 / 4`` centred at ``phi(q, t)``."""
    v = phi_encode(q, t)
    w = v * v / 8
    return v - w, v + w


def decode_phi(v, states: int) -> Configuration | None:
    """Configuration whose open interval contains ``v``, if any.

    ``v`` is converted exactly to a rational, so a float abscissa is tested
    without rounding.
    """
    v = Fraction(v)
    if not 0 < v < 1:
        return None
    L = -math.log(v)
    for q in range(1, states + 1):
        s = 0
        while q * LN2 + s * LN5 <= L + 1:
            est = (L - q * LN2 - s * LN5) / LN3
            for r in {max(0, math.floor(est)), max(0, math.ceil(est))}:
                c = Fraction(1, 2 ** q * 3 ** r * 5 ** s)
                w = c * c / 8
                if c - w < v < c + w:
                    return Configuration(q, tape_from_numbers(r, s))
            s += 1
    return None


@dataclass(frozen=True)
class USet:
    """Finite part of the coding set of one configuration: open rectangles
    ``(I + 2j) x (k - eps/2, k + eps/2)`` for ``j in js`` and ``k in ks``."""

    config: Configuration
    eps: Fraction
    js: tuple[int, ...]
    ks: tuple[int, ...]

    @property
    def rects(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        lo, hi = interval_of(self.config.state, self.config.tape)
        h = self.eps / 2
        return [(lo + 2 * j, hi + 2 * j, k - h, k + h) for j in self.js for k in self.ks]

    def contains(self, point) -> bool:
        x, y = Fraction(point[0]), Fraction(point[1])
        return any(x0 < x < x1 and y0 < y < y1 for x0, x1, y0, y1 in self.rects)


def u_set(q: int, t: Tape, js: Sequence[int] = (0,), ks: Sequence[int] = (0,),
          eps=Fraction(1, 10)) -> USet:
    return USet(Configuration(q, t), Fraction(eps), tuple(js), tuple(ks))


def initial_point(i: int, c: Configuration) -> tuple[Fraction, Fraction]:
    return 2 * i + phi_of(c), Fraction(0)


# -- curves ------------------------------------------------------------------


def _step7(s):
    """C^3 smooth step on [0, 1] and its first three derivatives."""
    s = np.clip(s, 0.0, 1.0)
    u = 1.0 - s
    h = s ** 4 * (35 - 84 * s + 70 * s ** 2 - 20 * s ** 3)
    h1 = 140 * s ** 3 * u ** 3
    h2 = 420 * s ** 2 * u ** 2 * (1 - 2 * s)
    h3 = 840 * (s * u * (1 - 2 * s) ** 2 - s ** 2 * u ** 2)
    return h, h1, h2, h3


_CLAMP = 1.0
_SOFT = 0.2


def _profile(xi):
    """Contraction profile: ``xi**2`` near the curve, linear growth beyond ``_SOFT``."""
    r = np.sqrt(1 + (xi / _SOFT) ** 2)
    return 2 * _SOFT * _SOFT * (r - 1), 2 * xi / r


def _clamp(x, band):
    """Smooth clamp of ``x`` onto band ``band``: identity on ``[2b, 2b+1]``, flat
    a distance ``_CLAMP`` into the gaps.  Returns the clamped value and its derivative."""
    lo, hi = 2 * band, 2 * band + 1
    u = np.where(x > hi, x - hi, np.where(x < lo, lo - x, 0.0))
    v = np.clip(u / _CLAMP, 0.0, 1.0)
    inner = v ** 5 * (7 - 14 * v + 10 * v ** 2 - 2.5 * v ** 3)
    S = _CLAMP * (v - inner)
    chi, _, _, _ = _step7(v)
    dS = 1 - chi
    xc = np.where(x > hi, hi + S, np.where(x < lo, lo - S, x))
    return xc, dS


def _clamp_point(x, band):
    lo, hi = 2 * band, 2 * band + 1
    if lo <= x <= hi:
        return x, 1.0
    v = min((x - hi if x > hi else lo - x) / _CLAMP, 1.0)
    S = _CLAMP * (v - v ** 5 * (7 - 14 * v + 10 * v * v - 2.5 * v ** 3))
    dS = 1 - v ** 4 * (35 - 84 * v + 70 * v * v - 20 * v ** 3)
    return (hi + S if x > hi else lo - S), dS


@dataclass(frozen=True)
class ComputationCurve:
    """Graph ``x = g(y)`` through the knots ``(2*band + phi(c_k), k)``.

    Consecutive knots are joined by a C^3 septic step, so the curve is flat at
    every knot and monotone in between; it is vertical below the first and
    above the last knot.
    """

    band: int
    configs: tuple[Configuration, ...]
    halted_at: int | None = None

    @property
    def phis(self) -> list[Fraction]:
        return [phi_of(c) for c in self.configs]

    @property
    def knots(self) -> np.ndarray:
        return np.array([2 * self.band + float(p) for p in self.phis])

    @property
    def height(self) -> int:
        return len(self.configs) - 1

    @property
    def gap(self) -> float:
        """Smallest distance from the curve to its band walls."""
        return min(min(float(p), 1 - float(p)) for p in self.phis)

    def eval(self, y):
        """``g, g', g'', g'''`` at heights ``y`` (array)."""
        y = np.asarray(y, dtype=float)
        xs = self._knots
        n = len(xs) - 1
        if n == 0:
            z = np.zeros_like(y)
            return xs[0] + z, z, z, z
        k = np.clip(np.floor(y), 0, n - 1).astype(int)
        s = np.clip(y - k, 0.0, 1.0)
        h, h1, h2, h3 = _step7(s)
        d = xs[k + 1] - xs[k]
        return xs[k] + d * h, d * h1, d * h2, d * h3

    def eval_point(self, y: float) -> tuple[float, float, float]:
        """Scalar ``g, g', g''``."""
        xs = self._knot_list
        n = len(xs) - 1
        if n == 0:
            return xs[0], 0.0, 0.0
        k = min(max(math.floor(y), 0), n - 1)
        s = min(max(y - k, 0.0), 1.0)
        u = 1.0 - s
        d = xs[k + 1] - xs[k]
        h = s ** 4 * (35 - 84 * s + 70 * s * s - 20 * s ** 3)
        return xs[k] + d * h, d * 140 * s ** 3 * u ** 3, d * 420 * s * s * u * u * (1 - 2 * s)

    @cached_property
    def _knot_list(self) -> list[float]:
        return [float(v) for v in self._knots]

    @cached_property
    def _knots(self) -> np.ndarray:
        return self.knots

    def max_curvature(self) -> float:
        ys = np.linspace(0, max(self.height, 1), 64 * max(self.height, 1) + 1)
        _, g1, g2, _ = self.eval(ys)
        return float(np.max(np.abs(g2) / (1 + g1 ** 2) ** 1.5))


def build_curve(tm: TuringMachine, c: Configuration, K: int, band: int) -> ComputationCurve:
    r = run(tm, c, K)
    configs = list(r.trace)
    halted = r.status.step if r.halted else None
    configs += [configs[-1]] * (K + 1 - len(configs))
    return ComputationCurve(band, tuple(configs), halted)


# -- potential ---------------------------------------------------------------


@dataclass(frozen=True)
class ScalarPotential:
    curves: dict[int, ComputationCurve]
    c: float
    r_tube: float

    def _band(self, b, x, y):
        """Band formula for band index ``b`` (scalar) at points ``x, y``: ``f, fx, fy``."""
        curve = self.curves.get(int(b))
        if curve is None:
            return y.copy(), np.zeros_like(x), np.ones_like(y)
        g, g1, g2, _ = curve.eval(y)
        L2 = 1 + g1 * g1
        beta = g1 / L2
        beta1 = g2 * (1 - g1 * g1) / (L2 * L2)
        xc, dS = _clamp(x, int(b))
        xi = xc - g
        P, P1 = _profile(xi)
        c = self.c
        f = y + beta * xi - 0.5 * c * P
        fx = (beta - 0.5 * c * P1) * dS
        fy = 1 + beta1 * xi - beta * g1 + 0.5 * c * P1 * g1
        return f, fx, fy

    def evaluate(self, x, y):
        """``(f, X_x, X_y)`` at arrays ``x, y``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        f = np.empty_like(x)
        fx = np.empty_like(x)
        fy = np.empty_like(x)
        b = np.floor(x / 2)
        u = x - 2 * b
        for bb in np.unique(b):
            sel = b == bb
            xs, ys, us = x[sel], y[sel], u[sel]
            fl, fxl, fyl = self._band(bb, xs, ys)
            gap = us > 1
            if self.curves.get(int(bb)) is None and self.curves.get(int(bb) + 1) is None:
                gap[:] = False
            if gap.any():
                fr, fxr, fyr = self._band(bb + 1, xs[gap], ys[gap])
                chi, chi1, _, _ = _step7(us[gap] - 1)
                fl_g = fl[gap]
                fxl[gap] = (1 - chi) * fxl[gap] + chi * fxr + chi1 * (fr - fl_g)
                fyl[gap] = (1 - chi) * fyl[gap] + chi * fyr
                fl[gap] = (1 - chi) * fl_g + chi * fr
            f[sel], fx[sel], fy[sel] = fl, fxl, fyl
        return f, fx, fy

    def f(self, x, y):
        return self.evaluate(x, y)[0]

    def grad(self, x, y):
        _, fx, fy = self.evaluate(x, y)
        return fx, fy

    def offset_rate(self, band: int, y):
        """Linearized contraction rate ``lam`` in ``d(xi)/dt = -lam * xi`` at the curve."""
        curve = self.curves[band]
        _, g1, g2, _ = curve.eval(y)
        L2 = 1 + g1 * g1
        beta1 = g2 * (1 - g1 * g1) / (L2 * L2)
        return self.c * L2 + g1 * beta1

    def _band_point(self, b, x, y):
        curve = self.curves.get(b)
        if curve is None:
            return y, 0.0, 1.0
        g, g1, g2 = curve.eval_point(y)
        L2 = 1 + g1 * g1
        beta = g1 / L2
        beta1 = g2 * (1 - g1 * g1) / (L2 * L2)
        xc, dS = _clamp_point(x, b)
        xi = xc - g
        r = math.sqrt(1 + (xi / _SOFT) ** 2)
        P, P1 = 2 * _SOFT * _SOFT * (r - 1), 2 * xi / r
        c = self.c
        return (y + beta * xi - 0.5 * c * P, (beta - 0.5 * c * P1) * dS,
                1 + beta1 * xi - beta * g1 + 0.5 * c * P1 * g1)

    def grad_point(self, x: float, y: float) -> tuple[float, float]:
        """Scalar version of :meth:`grad` (same formulas, no array overhead)."""
        b = math.floor(x / 2)
        u = x - 2 * b
        fl, fxl, fyl = self._band_point(b, x, y)
        if u <= 1 or (b not in self.curves and b + 1 not in self.curves):
            return fxl, fyl
        fr, fxr, fyr = self._band_point(b + 1, x, y)
        s = u - 1
        chi = s ** 4 * (35 - 84 * s + 70 * s ** 2 - 20 * s ** 3)
        chi1 = 140 * s ** 3 * (1 - s) ** 3
        return (1 - chi) * fxl + chi * fxr + chi1 * (fr - fl), (1 - chi) * fyl + chi * fyr

    def __call__(self, t, p):
        return np.array(self.grad_point(float(p[0]), float(p[1])))


def build_potential(curves: Sequence[ComputationCurve], r_tube: float | None = None,
                    c: float = 10.0) -> ScalarPotential:
    """Gradient field for the given curves.

    ``r_tube`` is the capture radius inside which the contraction estimate is
    claimed; it defaults to a quarter of the smallest wall gap and must stay
    below half of it.  The contraction rate must be positive on every curve.
    """
    by_band = {}
    for cv in curves:
        if cv.band in by_band:
            raise ValueError(f"two curves in band {cv.band}")
        by_band[cv.band] = cv
    gap = min((cv.gap for cv in curves), default=0.5)
    if r_tube is None:
        r_tube = gap / 4
    if not 0 < r_tube < gap / 2:
        raise TubeTooWide(f"r_tube={r_tube} must be positive and below half the gap {gap}")
    pot = ScalarPotential(by_band, float(c), float(r_tube))
    for cv in curves:
        ys = np.linspace(0, max(cv.height, 1), 64 * max(cv.height, 1) + 1)
        if np.min(pot.offset_rate(cv.band, ys)) <= 0:
            raise ValueError(f"contraction c={c} too weak for the curvature of band {cv.band}")
    return pot


# -- perturbation ------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationSpec:
    delta: float
    seed: int = 0
    modes: int = 6


@dataclass(frozen=True)
class PerturbedField:
    """``X + delta * exp(-(x^2+y^2)) * (cos theta, sin theta)`` with a seeded smooth angle field."""

    base: ScalarPotential
    spec: PerturbationSpec
    _modes: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        rng = np.random.default_rng(self.spec.seed)
        m = self.spec.modes
        modes = np.column_stack([
            rng.normal(0.0, 2.0, m),          # amplitude
            rng.normal(0.0, 1.5, m),          # wave vector x
            rng.normal(0.0, 1.5, m),          # wave vector y
            rng.uniform(0.0, 2 * np.pi, m),   # phase
        ])
        object.__setattr__(self, "_modes", modes)

    def noise(self, x, y):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        theta = np.zeros_like(x)
        for a, kx, ky, ph in self._modes:
            theta += a * np.sin(kx * x + ky * y + ph)
        amp = self.spec.delta * np.exp(-(x * x + y * y))
        return amp * np.cos(theta), amp * np.sin(theta)

    def grad(self, x, y):
        fx, fy = self.base.grad(x, y)
        if self.spec.delta == 0:
            return fx, fy
        nx, ny = self.noise(x, y)
        return fx + nx, fy + ny

    def __call__(self, t, p):
        x, y = float(p[0]), float(p[1])
        fx, fy = self.base.grad_point(x, y)
        if self.spec.delta:
            theta = 0.0
            for a, kx, ky, ph in self._mode_list:
                theta += a * math.sin(kx * x + ky * y + ph)
            amp = self.spec.delta * math.exp(-(x * x + y * y))
            fx += amp * math.cos(theta)
            fy += amp * math.sin(theta)
        return np.array([fx, fy])

    @cached_property
    def _mode_list(self):
        return [tuple(map(float, row)) for row in self._modes]


def perturb(X: ScalarPotential, spec: PerturbationSpec) -> PerturbedField:
    return PerturbedField(X, spec)


# -- integration -------------------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    height: int
    t: float
    x: float
    y: float
    band: int
    config: Configuration | None


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    crossings: list[Crossing]

    @property
    def visits(self) -> list[Configuration | None]:
        return [c.config for c in self.crossings]

    def to_csv(self) -> str:
        rows = {float(t): (float(x), float(y), "") for t, x, y in zip(self.t, self.x, self.y)}
        rows.update({c.t: (c.x, c.y, c.height) for c in self.crossings})
        out = ["t,x,y,band,crossing"]
        for t in sorted(rows):
            x, y, k = rows[t]
            out.append(f"{t!r},{x!r},{y!r},{math.floor(x / 2)},{k}")
        return "\n".join(out) + "\n"


def integrate(X, p0, K: int, states: int, t_max: float | None = None,
              atol: float = 1e-12, rtol: float = 1e-12, method: str = "DOP853") -> Trajectory:
    """Integrate from ``p0`` until height ``K`` and log every integer-height crossing.

    Each crossing abscissa is decoded exactly against the coding intervals of
    machines with ``states`` states.
    """
    x0, y0 = float(p0[0]), float(p0[1])
    if t_max is None:
        t_max = 50.0 * (K + 1)

    def crossing(k, t, x, y):
        b = math.floor(x / 2)
        return Crossing(k, t, x, y, b, decode_phi(Fraction(x) - 2 * b, states))

    log = [crossing(0, 0.0, x0, y0)] if y0 == 0 else []
    if K == 0:
        return Trajectory(np.array([0.0]), np.array([x0]), np.array([y0]), log)

    events = []
    for k in range(1, K + 1):
        def ev(t, p, k=k):
            return p[1] - k
        ev.direction = 1
        ev.terminal = k == K
        events.append(ev)
    sol = solve_ivp(X, (0.0, t_max), [x0, y0], method=method, events=events,
                    atol=atol, rtol=rtol)
    if sol.status == -1:
        raise StepFailure(sol.message)
    hits = []
    for k, (ts, ps) in enumerate(zip(sol.t_events, sol.y_events), 1):
        if len(ts):
            hits.append((float(ts[0]), k, float(ps[0][0]), float(ps[0][1])))
    hits.sort()
    log += [crossing(k, t, x, k) for t, k, x, _ in hits]
    return Trajectory(sol.t, sol.y[0], sol.y[1], log)


# -- halting check -----------------------------------------------------------


@dataclass(frozen=True)
class InputReport:
    band: int
    start: Configuration
    machine_halt: int | None
    flow_halt: int | None
    visits_match: bool
    divergence: int | None
    max_abscissa_error: float
    decoded_match: bool = True

    @property
    def equivalent(self) -> bool:
        return (self.machine_halt is not None) == (self.flow_halt is not None)


@dataclass(frozen=True)
class FlowReport:
    K: int
    delta: float
    seed: int | None
    inputs: tuple[InputReport, ...]
    delta_star: float

    @property
    def ok(self) -> bool:
        return all(r.equivalent and r.visits_match for r in self.inputs)


def check_visits(tm: TuringMachine, curve: ComputationCurve, traj: Trajectory,
                 tol: float = 1e-6) -> tuple[bool, int | None, float]:
    """Compare crossings with the machine trace: decoded config, strict interval
    membership and abscissa error ``<= tol``.  Returns ``(ok, first bad height, max error)``."""
    expected = curve.configs
    ok, first_bad, worst = True, None, 0.0
    if len(traj.crossings) != len(expected):
        ok, first_bad = False, len(traj.crossings)
    for cr, conf in zip(traj.crossings, expected):
        lo, hi = interval_of(conf.state, conf.tape)
        target = 2 * curve.band + phi_of(conf)
        err = abs(Fraction(cr.x) - target)
        worst = max(worst, float(err))
        good = (cr.config == conf and cr.band == curve.band
                and 2 * curve.band + lo < Fraction(cr.x) < 2 * curve.band + hi and err <= tol)
        if not good and ok:
            ok, first_bad = False, cr.height
    return ok, first_bad, worst


def delta_star(curves: Sequence[ComputationCurve], c: float) -> float:
    """Perturbation amplitude below which the steady offset ``delta / c`` stays
    inside every coding interval the curves visit (ignores the spatial decay)."""
    w = min(float(p * p / 8) for cv in curves for p in cv.phis)
    return c * w


@dataclass(frozen=True)
class FlowRun:
    report: FlowReport
    curves: tuple[ComputationCurve, ...]
    trajectories: tuple[Trajectory, ...]


def _integrate_job(args):
    field_, p0, K, states = args
    return integrate(field_, p0, K, states)


def flow_run(tm: TuringMachine, inputs: Sequence[Configuration], K: int,
             delta: float = 0.0, seed: int | None = None, c: float = 10.0,
             r_tube: float | None = None, first_band: int = 0, tol: float = 1e-6,
             jobs: int = 1) -> FlowRun:
    """Build the field for ``inputs`` (one band each), integrate every input and
    compare the crossings with the machine trace."""
    curves = [build_curve(tm, x, K, first_band + i) for i, x in enumerate(inputs)]
    X = build_potential(curves, r_tube=r_tube, c=c)
    field_ = perturb(X, PerturbationSpec(delta, seed or 0)) if delta else X
    work = [(field_, initial_point(cv.band, cv.configs[0]), K, tm.states) for cv in curves]
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            trajs = list(ex.map(_integrate_job, work))
    else:
        trajs = [_integrate_job(w) for w in work]
    reports = []
    for cv, traj in zip(curves, trajs):
        flow_halt = next((cr.height for cr in traj.crossings
                          if cr.config is not None and cr.config.state == tm.halt), None)
        ok, bad, err = check_visits(tm, cv, traj, tol)
        decoded = (traj.visits == list(cv.configs)
                   and all(cr.band == cv.band for cr in traj.crossings))
        reports.append(InputReport(cv.band, cv.configs[0], cv.halted_at, flow_halt, ok, bad, err,
                                   decoded))
    report = FlowReport(K, delta, seed, tuple(reports), delta_star(curves, c))
    return FlowRun(report, tuple(curves), tuple(trajs))


def halting_flow_check(tm: TuringMachine, inputs: Sequence[Configuration], K: int,
                       delta: float = 0.0, seed: int | None = None, c: float = 10.0,
                       first_band: int = 0, tol: float = 1e-6) -> FlowReport:
    """For each input: does the flow reach the halting coding set by height ``K``
    exactly when the machine halts within ``K`` steps?"""
    return flow_run(tm, inputs, K, delta, seed, c, None, first_band, tol).report


# -- gradient certificate ----------------------------------------------------


@dataclass(frozen=True)
class GradientCertificate:
    fd_max: float
    loop_max: float
    h: float
    grid: int
    loops: int


def gradient_certificate(X: ScalarPotential, box: tuple[float, float, float, float],
                         grid: int = 200, h: float = 1e-4, loops: int = 100,
                         nodes: int = 32768, seed: int = 0) -> GradientCertificate:
    """Central differences of ``f`` against ``X`` on a ``grid x grid`` lattice of
    ``box = (x0, x1, y0, y1)``, and circulation of ``X`` around random circles
    inside the box (periodic trapezoid rule with ``nodes`` points)."""
    x0, x1, y0, y1 = box
    xs, ys = np.meshgrid(np.linspace(x0, x1, grid), np.linspace(y0, y1, grid))
    xs, ys = xs.ravel(), ys.ravel()
    fx, fy = X.grad(xs, ys)
    dfx = (X.f(xs + h, ys) - X.f(xs - h, ys)) / (2 * h)
    dfy = (X.f(xs, ys + h) - X.f(xs, ys - h)) / (2 * h)
    fd = float(np.max(np.maximum(np.abs(fx - dfx), np.abs(fy - dfy))))
    rng = np.random.default_rng(seed)
    th = 2 * np.pi * np.arange(nodes) / nodes
    worst = 0.0
    for _ in range(loops):
        r = rng.uniform(0.05, min(x1 - x0, y1 - y0) / 2)
        cx, cy = rng.uniform(x0 + r, x1 - r), rng.uniform(y0 + r, y1 - r)
        px, py = cx + r * np.cos(th), cy + r * np.sin(th)
        gx, gy = X.grad(px, py)
        circ = np.sum(-gx * np.sin(th) + gy * np.cos(th)) * r * 2 * np.pi / nodes
        worst = max(worst, abs(float(circ)))
    return GradientCertificate(fd, worst, h, grid, loops)
