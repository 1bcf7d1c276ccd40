import math

import numpy as np
import pytest

from uavcov.inversion import (
    DEFAULT_INVERSION,
    InversionError,
    InversionSpec,
    ccdf_via_inversion,
    high_order_derivative,
    invert_laplace,
    verification_corpus,
)


def test_builtin_corpus_all_pass():
    results = verification_corpus()
    assert len(results) >= 40
    failed = [name for name, ok, _ in results if not ok]
    assert failed == []


def test_constant_original():
    for t in (0.3, 1.0, 7.0):
        assert invert_laplace(lambda s: 1.0 / s, t) == pytest.approx(1.0, rel=1e-6)


def test_exponential_decay():
    got = invert_laplace(lambda s: 1.0 / (s + 1.0), 2.0)
    assert got == pytest.approx(math.exp(-2.0), rel=1e-6)


def test_heavy_tailed_density():
    """Transform exp(-sqrt(s)) inverts to the one-sided stable density."""

    def exact(t):
        return t ** -1.5 * math.exp(-0.25 / t) / (2.0 * math.sqrt(math.pi))

    for t in (0.2, 1.0, 4.0):
        got = invert_laplace(lambda s: np.exp(-np.sqrt(s)), t)
        assert got == pytest.approx(exact(t), rel=1e-6)


def test_linearity():
    f = lambda s: 1.0 / (s + 1.0)
    g = lambda s: 1.0 / s ** 2
    combo = lambda s: 2.5 * f(s) - 0.75 * g(s)
    t = 1.3
    want = 2.5 * invert_laplace(f, t) - 0.75 * invert_laplace(g, t)
    # linearity holds down to the rule's own roundoff floor
    assert invert_laplace(combo, t) == pytest.approx(want, abs=1e-7)


def test_rules_agree():
    talbot = InversionSpec(method="talbot")
    euler = InversionSpec(method="euler")
    for transform, t in [(lambda s: 1.0 / (s + 1.0) ** 2, 1.5),
                         (lambda s: 1.0 / (s * np.sqrt(s + 1.0)), 0.8)]:
        a = invert_laplace(transform, t, talbot)
        b = invert_laplace(transform, t, euler)
        assert a == pytest.approx(b, rel=1e-6)


def test_invert_rejects_bad_time():
    with pytest.raises(ValueError):
        invert_laplace(lambda s: 1.0 / s, 0.0)
    with pytest.raises(ValueError):
        invert_laplace(lambda s: 1.0 / s, -1.0)
    with pytest.raises(ValueError):
        ccdf_via_inversion(lambda s: np.exp(-s), 0.0)


def test_cross_check_flags_inconsistent_transforms():
    # a transform evaluated inconsistently between calls cannot be certified
    calls = [0]

    def unstable(s):
        calls[0] += 1
        return 1.0 / s if calls[0] % 5 else 17.0 / s

    with pytest.raises(InversionError):
        invert_laplace(unstable, 1.0)


def test_ccdf_of_a_point_mass():
    # Z identically 2: E[exp(-s/Z)] = exp(-s/2).  The damped-series rule
    # resolves the step away from the atom and refuses certification near it.
    spec = InversionSpec(method="euler")
    transform = lambda s: np.exp(-s / 2.0)
    assert ccdf_via_inversion(transform, 0.25, spec) == pytest.approx(1.0, abs=1e-6)
    assert ccdf_via_inversion(transform, 4.0, spec) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(InversionError):
        ccdf_via_inversion(transform, 1.6, spec)


def test_ccdf_of_exponential_variable():
    """E[exp(-s/Z)] for Exp(1) has a Bessel form; the CCDF must come back
    as exp(-z)."""
    from scipy.special import kv

    def transform(s):
        s = np.asarray(s, dtype=complex)
        return 2.0 * np.sqrt(s) * kv(1, 2.0 * np.sqrt(s))

    for z in (0.5, 1.0, 2.5):
        assert ccdf_via_inversion(transform, z) == pytest.approx(math.exp(-z), abs=2e-7)


def test_derivatives_of_polynomials_are_exact():
    coeffs = [3.0, -1.0, 0.5, 2.0, -0.25, 1.5, 0.125, -2.0, 0.75]

    def poly(z):
        total = 0.0
        for c in reversed(coeffs):
            total = total * z + c
        return total

    for order in range(9):
        want = 0.0
        for d in range(order, len(coeffs)):
            want += coeffs[d] * math.factorial(d) / math.factorial(d - order) * 5.0 ** (d - order)
        got = high_order_derivative(poly, 5.0, order)
        assert got == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_cubic_second_derivative():
    assert high_order_derivative(lambda z: z ** 3, 5.0, 2) == pytest.approx(30.0, rel=1e-12)


def test_derivatives_of_the_exponential():
    for order in (1, 3, 6):
        got = high_order_derivative(np.exp, 2.0, order)
        assert got == pytest.approx(math.exp(2.0), rel=1e-9)


def test_derivative_matches_finite_differences():
    f = lambda z: np.log(1.0 + z)
    t0 = 1.7
    h = 1e-4
    coarse = (f(t0 + h) - f(t0 - h)) / (2.0 * h)
    fine = (f(t0 + h / 2.0) - f(t0 - h / 2.0)) / h
    richardson = (4.0 * fine - coarse) / 3.0
    got = high_order_derivative(f, t0, 1)
    assert got == pytest.approx(richardson, rel=1e-6)
    assert got == pytest.approx(1.0 / (1.0 + t0), rel=1e-9)


def test_derivative_rejects_bad_order():
    with pytest.raises(ValueError):
        high_order_derivative(np.exp, 1.0, -1)
    with pytest.raises(ValueError):
        high_order_derivative(np.exp, 1.0, 1.5)


def test_spec_validation():
    with pytest.raises(ValueError):
        InversionSpec(method="fourier")
    with pytest.raises(ValueError):
        InversionSpec(nodes=4)
    assert DEFAULT_INVERSION.cross_check
