import csv
import io
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmflow.beltrami import (BivariatePoly, CauchyDatum, NotAGradient, check_compatibility,
                             evaluate, extend, grid_csv, parse_poly, residual, series_dump,
                             truncation_estimate)

F = Fraction
X, Y = BivariatePoly.x(), BivariatePoly.y()

coeffs = st.fractions(-5, 5, max_denominator=7)
polys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs,
                        max_size=5).map(BivariatePoly)


def test_polynomial_arithmetic():
    p = X ** 2 + 3 * X * Y - F(1, 2)
    assert p.dx() == 2 * X + 3 * Y
    assert p.dy() == 3 * X
    assert p(F(1), F(2)) == F(13, 2)
    assert p.degree == 2
    assert (p - p) == 0 and not (p - p)
    assert (X * Y).integrate_x() == X ** 2 * Y / 2
    assert str(BivariatePoly()) == "0"


@given(polys, polys)
def test_product_rule(p, q):
    assert (p * q).dx() == p.dx() * q + p * q.dx()
    assert (p * q).dy() == p.dy() * q + p * q.dy()


@given(polys)
def test_compatibility_recovers_potential(p):
    F0 = p - p(0, 0)
    assert check_compatibility(F0.dx(), F0.dy()) == F0


def test_parse_poly():
    assert parse_poly("x^3 - 3*x*y^2") == X ** 3 - 3 * X * Y ** 2
    assert parse_poly("(x^2+y^2)/2") == (X ** 2 + Y ** 2) / 2
    assert parse_poly("0") == BivariatePoly()


def test_not_a_gradient_witness():
    with pytest.raises(NotAGradient) as e:
        check_compatibility(Y, -X)
    assert e.value.curl == BivariatePoly.const(-2)


def test_lambda_must_be_nonzero():
    with pytest.raises(ValueError):
        CauchyDatum(X, 0)
    with pytest.raises(ValueError):
        extend(CauchyDatum(X, 1), 0)


def test_first_order_for_quadratic_datum():
    s = extend(CauchyDatum((X ** 2 + Y ** 2) / 2, 1), 3)
    assert (s.u1[0], s.u2[0]) == (X, Y)
    assert s.u3[0] == 0
    assert (s.u1[1], s.u2[1]) == (Y, -X)
    assert s.u3[1] == -2


def test_zero_datum_gives_zero_series():
    s = extend(CauchyDatum(BivariatePoly(), 2), 5)
    assert not any(p for comp in s.components for p in comp)
    assert residual(s).exact


@settings(max_examples=25, deadline=None)
@given(polys, st.sampled_from([F(1), F(2), F(-1, 2), F(3, 7)]))
def test_random_datum_residuals_vanish(p, lam):
    s = extend(CauchyDatum(p, lam), 8)
    r = residual(s, F=p)
    assert r.certified_order == 7 and r.exact


def test_residual_detects_corruption():
    s = extend(CauchyDatum(X ** 3, 1), 6)
    bad = type(s)(s.u1[:3] + (s.u1[3] + 1,) + s.u1[4:], s.u2, s.u3, s.lam)
    assert residual(bad).certified_order == 1
    assert residual(s, lam=2).certified_order == -1


def test_datum_mismatch_is_reported():
    s = extend(CauchyDatum(X, 1), 4)
    assert residual(s, F=Y).certified_order == -1


def test_linear_datum_matches_closed_form():
    lam = F(3, 2)
    s = extend(CauchyDatum(X, lam), 20)
    for z in (-1.0, -0.3, 0.5, 1.0):
        u = evaluate(s, (0.2, -0.7, z))
        ref = (math.cos(lam * z), -math.sin(lam * z), 0.0)
        assert max(abs(a - b) for a, b in zip(u, ref)) < 1e-12


def test_exact_evaluation_on_rationals():
    s = extend(CauchyDatum(X * Y, 1), 5)
    u = evaluate(s, (F(1, 2), F(1, 3), F(1, 5)))
    assert all(isinstance(v, Fraction) for v in u)
    assert truncation_estimate(s, (0.5, 0.5, 0.1)) >= 0


def test_dump_and_grid_formats():
    s = extend(CauchyDatum(X, 1), 3)
    lines = series_dump(s).splitlines()
    assert lines[0] == "# lambda=1 order=3"
    assert "0 u1 0 0 1" in lines
    assert "1 u2 0 0 -1" in lines
    rows = list(csv.DictReader(io.StringIO(grid_csv(s, [0.0], [0.0], [0.0, 0.5]))))
    assert len(rows) == 2 and float(rows[0]["u1"]) == 1.0
    assert math.isclose(float(rows[1]["norm"]), math.hypot(float(rows[1]["u1"]),
                                                           float(rows[1]["u2"])))
