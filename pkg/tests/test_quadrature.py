import math

import numpy as np
import pytest

from uavcov.quadrature import (
    DEFAULT_QUAD,
    QuadratureSpec,
    gauss_laguerre,
    gauss_legendre,
    integrate,
    integrate_complex,
    integrate_complex_semi_inf,
    integrate_semi_inf,
)


def test_legendre_rule_is_exact_for_polynomials():
    # an n-point rule integrates degrees up to 2n-1
    for n in (4, 8, 16):
        x, w = gauss_legendre(n)
        for d in range(2 * n):
            got = float(np.sum(w * x ** d))
            assert got == pytest.approx(1.0 / (d + 1), rel=1e-13, abs=1e-15)


def test_legendre_rule_rescales():
    x, w = gauss_legendre(10, 2.0, 5.0)
    assert np.all((x > 2.0) & (x < 5.0))
    assert float(np.sum(w * x)) == pytest.approx((25.0 - 4.0) / 2.0, rel=1e-13)


def test_laguerre_rule_reproduces_factorials():
    x, w = gauss_laguerre(32)
    for k in range(6):
        assert float(np.sum(w * x ** k)) == pytest.approx(math.factorial(k), rel=1e-12)


def test_finite_interval_integration():
    assert integrate(math.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-12)
    assert integrate(lambda t: t ** 3, -1.0, 2.0) == pytest.approx(15.0 / 4.0, rel=1e-12)


def test_semi_infinite_integration():
    assert integrate_semi_inf(lambda t: math.exp(-t), 0.0) == pytest.approx(1.0, rel=1e-10)
    assert integrate_semi_inf(lambda t: 1.0 / (1.0 + t * t), 0.0) == pytest.approx(math.pi / 2.0, rel=1e-9)
    assert integrate_semi_inf(lambda t: math.exp(-t), 2.0) == pytest.approx(math.exp(-2.0), rel=1e-10)


def test_semi_infinite_scale_hint():
    # a badly scaled integrand still converges once the hint matches
    rate = 1e-4
    got = integrate_semi_inf(lambda t: rate * math.exp(-rate * t), 0.0, scale=1.0 / rate)
    assert got == pytest.approx(1.0, rel=1e-9)


def test_complex_integration():
    got = integrate_complex(lambda t: np.exp(1j * t), 0.0, math.pi / 2.0)
    assert got == pytest.approx(1.0 + 1j * 1.0, rel=1e-12)
    s = 1.0 + 0.5j
    got = integrate_complex_semi_inf(lambda t: np.exp(-s * t), 0.0)
    assert got == pytest.approx(1.0 / s, rel=1e-9)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    assert DEFAULT_QUAD.rel_tol > 0.0
