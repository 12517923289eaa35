import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from phaseless.special import (
    legendre_p,
    legendre_table,
    spherical_h1,
    spherical_h1_prime,
    spherical_j,
    spherical_j_prime,
    spherical_jn_table,
    spherical_y,
    spherical_y_prime,
    spherical_yn_table,
)

X = np.linspace(0.1, 50.0, 400)
NMAX = 40


def test_j0_at_pi():
    assert abs(spherical_j(0, np.pi)) < 1e-15


def test_j0_at_one():
    assert spherical_j(0, 1.0) == pytest.approx(0.8414709848078965, rel=1e-15)


def test_j1_regular_near_origin():
    # j_1(x) ~ x/3 as x -> 0
    assert spherical_j(1, 1e-8) == pytest.approx(1e-8 / 3, rel=1e-6)
    assert spherical_j(5, 1e-3) == pytest.approx(1e-15 / 10395, rel=1e-6)  # x**5 / 11!!


def test_h0_closed_forms():
    assert spherical_h1(0, 1.0) == pytest.approx(-1j * np.exp(1j) / 1.0, abs=1e-15)
    assert spherical_h1(0, 1.0) == pytest.approx(0.8414709848078965 - 0.5403023058681398j, abs=1e-15)
    assert spherical_h1(0, np.pi) == pytest.approx(1j / np.pi, abs=1e-15)


def test_wronskian_single_point():
    n, x = 3, 2.7
    w = spherical_j(n, x) * spherical_y_prime(n, x) - spherical_j_prime(n, x) * spherical_y(n, x)
    assert w == pytest.approx(1.0 / x**2, rel=1e-12)


def test_derivative_identities():
    assert spherical_j_prime(0, 2.0) == pytest.approx(-spherical_j(1, 2.0), rel=1e-15)
    assert spherical_h1_prime(0, 1.0) == pytest.approx(-spherical_h1(1, 1.0), rel=1e-15)


@pytest.mark.parametrize("func, deriv", [(spherical_j, spherical_j_prime), (spherical_h1, spherical_h1_prime)])
def test_derivative_finite_difference(func, deriv):
    n, x, step = 2, 3.1, 1e-5
    fd = (func(n, x + step) - func(n, x - step)) / (2 * step)
    assert abs(deriv(n, x) - fd) <= 1e-8 * abs(fd)


def test_legendre_examples():
    assert legendre_p(0, 0.3) == 1.0
    for t in (-1.0, -0.4, 0.0, 0.77, 1.0):
        assert legendre_p(1, t) == t
    assert legendre_p(2, 0.5) == pytest.approx(-0.125, abs=1e-16)


def test_legendre_bounded():
    t = np.linspace(-1, 1, 2001)
    assert np.all(np.abs(legendre_table(NMAX, t)) <= 1 + 1e-13)


def test_legendre_against_scipy():
    t = np.linspace(-1, 1, 101)
    table = legendre_table(NMAX, t)
    for n in range(NMAX + 1):
        np.testing.assert_allclose(table[n], sp.eval_legendre(n, t), atol=1e-13)


def test_closed_forms_n0_n1():
    j = spherical_jn_table(NMAX, X)
    y = spherical_yn_table(NMAX, X)
    s, c = np.sin(X), np.cos(X)
    np.testing.assert_allclose(j[0], s / X, rtol=1e-12)
    np.testing.assert_allclose(j[1], s / X**2 - c / X, rtol=1e-12)
    np.testing.assert_allclose(y[0], -c / X, rtol=1e-12)
    np.testing.assert_allclose(y[1], -c / X**2 - s / X, rtol=1e-12)


@pytest.mark.parametrize("which", ["j", "y"])
def test_cross_recurrence(which):
    table = (spherical_jn_table if which == "j" else spherical_yn_table)(NMAX + 1, X)
    for n in range(1, NMAX + 1):
        lhs = (2 * n + 1) * table[n]
        rhs = X * (table[n - 1] + table[n + 1])
        scale = np.maximum.reduce([np.abs(lhs), X * np.abs(table[n - 1]), X * np.abs(table[n + 1])])
        assert np.max(np.abs(lhs - rhs) / scale) <= 1e-10


def test_wronskian_table():
    j = spherical_jn_table(NMAX + 1, X)
    y = spherical_yn_table(NMAX + 1, X)
    from phaseless.special import derivative_table

    jp, yp = derivative_table(j, X), derivative_table(y, X)
    w = X**2 * (j[: NMAX + 1] * yp - jp * y[: NMAX + 1])
    assert np.max(np.abs(w - 1)) <= 1e-9


def test_against_scipy_real():
    j = spherical_jn_table(NMAX, X)
    y = spherical_yn_table(NMAX, X)
    for n in range(NMAX + 1):
        ref_j = sp.spherical_jn(n, X)
        np.testing.assert_allclose(j[n], ref_j, rtol=1e-10, atol=1e-14 * np.abs(ref_j).max())
        np.testing.assert_allclose(y[n], sp.spherical_yn(n, X), rtol=1e-10)


def test_against_scipy_complex():
    z = np.array([2.6 + 0.3j, 0.05 + 0.01j, 13.0 + 2.0j, 40.0 + 5.0j])
    table = spherical_jn_table(30, z)
    for n in range(31):
        np.testing.assert_allclose(table[n], sp.spherical_jn(n, z), rtol=1e-10)


def test_downward_recurrence_small_argument_high_order():
    # Upward recurrence would lose every digit here.
    x = 0.5
    table = spherical_jn_table(60, x)
    for n in (10, 30, 60):
        assert table[n] == pytest.approx(sp.spherical_jn(n, x), rel=1e-12)


def test_argument_floor():
    with pytest.raises(ValueError):
        spherical_j(0, 1e-13)
    with pytest.raises(ValueError):
        spherical_h1(2, -1.0)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 30), x=st.floats(0.1, 50.0))
def test_wronskian_property(n, x):
    w = spherical_j(n, x) * spherical_y_prime(n, x) - spherical_j_prime(n, x) * spherical_y(n, x)
    assert abs(x**2 * w - 1) <= 1e-9
