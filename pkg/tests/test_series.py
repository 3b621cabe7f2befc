"""Truncated power series: arithmetic, composition, reversion."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ratdyn.series import SeriesError, TruncatedSeries

from conftest import finite_complex


def test_identity_and_getitem():
    s = TruncatedSeries.identity(5)
    assert s[1] == 1 and s[0] == 0 and s[5] == 0
    assert s.order == 5


def test_mul_truncates():
    s = TruncatedSeries([0, 1, 1], order=4)  # z + z^2
    p = s * s
    assert np.allclose(p.c, [0, 0, 1, 2, 1])
    assert p.order == 4


def test_inverse_of_unit():
    s = TruncatedSeries([1, -1], order=6)  # 1 - z
    inv = s.inverse()
    assert np.allclose(inv.c, np.ones(7))  # geometric series
    assert np.allclose((s * inv).c, np.eye(1, 7, 0)[0])


def test_inverse_requires_unit():
    with pytest.raises(SeriesError):
        TruncatedSeries([0, 1], order=3).inverse()


def test_compose_known():
    outer = TruncatedSeries([0, 1, 1], order=4)   # z + z^2
    inner = TruncatedSeries([0, 2], order=4)      # 2z
    comp = outer.compose(inner)
    assert np.allclose(comp.c, [0, 2, 4, 0, 0])


def test_derivative():
    s = TruncatedSeries([3, 0, 5, 1], order=3)
    d = s.derivative()
    assert np.allclose(d.c, [0, 10, 3])


@given(
    c1=finite_complex(2.0, min_mag=0.2),
    tail=st.lists(finite_complex(1.0), min_size=0, max_size=6),
)
def test_reversion_round_trip(c1, tail):
    coeffs = [0, c1] + list(tail)
    s = TruncatedSeries(coeffs, order=len(coeffs) + 3)
    inv = s.reverse()
    round_trip = inv.compose(s)
    ident = TruncatedSeries.identity(s.order)
    scale = max(1.0, np.max(np.abs(s.c)) ** s.order / max(abs(c1), 1e-3) ** s.order)
    assert np.max(np.abs(round_trip.c - ident.c)) < 1e-8 * scale


@given(
    a=st.lists(finite_complex(1.0), min_size=2, max_size=5),
    b=st.lists(finite_complex(1.0), min_size=2, max_size=5),
)
def test_product_rule(a, b):
    s = TruncatedSeries(a, order=len(a) + len(b))
    t = TruncatedSeries(b, order=len(a) + len(b))
    lhs = (s * t).derivative()
    rhs = s.derivative() * t.truncate(lhs.order) + s.truncate(lhs.order) * t.derivative()
    n = min(len(lhs.c), len(rhs.c))
    assert np.allclose(lhs.c[:n], rhs.c[:n], atol=1e-10)
