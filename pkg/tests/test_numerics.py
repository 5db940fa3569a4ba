"""Quadrature, root finding, and incomplete elliptic integrals."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import ellipeinc, ellipkinc

from elastica_lab.numerics import (
    DomainError,
    NoBracketError,
    adaptive_integrate,
    elliptic_FE_grid,
    find_root,
    incomplete_E,
    incomplete_F,
)


def test_integrate_polynomial_is_exact():
    # Simpson integrates cubics exactly; only roundoff remains.
    q = adaptive_integrate(lambda x: x**3 - 2.0 * x, 0.0, 2.0)
    assert abs(q.value - 0.0) < 1e-14


def test_integrate_sine():
    q = adaptive_integrate(math.sin, 0.0, math.pi)
    assert abs(q.value - 2.0) < 1e-12
    assert q.error_estimate < 1e-10
    assert q.evaluations > 100


def test_integrate_narrow_spike():
    """A spike visible to the initial sampling gets dug out by recursion.

    (Features narrower than the initial sample spacing can be missed
    entirely; that is the standard adaptive-Simpson caveat, not a target.)
    """
    w = 0.05
    q = adaptive_integrate(lambda x: math.exp(-(((x - 0.37) / w) ** 2)), 0.0, 1.0, tol=1e-13)
    assert abs(q.value - w * math.sqrt(math.pi)) < 1e-13


def test_integrate_rejects_inverted_interval():
    with pytest.raises(DomainError):
        adaptive_integrate(lambda x: x, 1.0, 0.0)


def test_integrate_rejects_nonfinite_integrand():
    f = lambda x: math.inf if x == 0.0 else 1.0 / math.sqrt(x)
    with pytest.raises(DomainError):
        adaptive_integrate(f, 0.0, 1.0)


def test_find_root_cosine():
    assert abs(find_root(math.cos, 1.0, 2.0) - math.pi / 2.0) < 1e-12


def test_find_root_requires_bracket():
    with pytest.raises(NoBracketError):
        find_root(lambda x: x * x + 1.0, 0.0, 1.0)


@given(st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=200, deadline=None)
def test_find_root_recovers_cubic_root(r):
    # x^3 + x is strictly increasing, so x -> (x-r)^3 + (x-r) brackets r.
    f = lambda x: (x - r) ** 3 + (x - r)
    assert abs(find_root(f, r - 2.0, r + 3.0) - r) < 1e-10


@given(
    st.floats(min_value=0.05, max_value=3.0),
    st.floats(min_value=0.0, max_value=0.95),
)
@settings(max_examples=60, deadline=None)
def test_incomplete_integrals_match_scipy(x, m):
    assert abs(incomplete_F(x, m) - ellipkinc(x, m)) < 5e-13
    assert abs(incomplete_E(x, m) - ellipeinc(x, m)) < 5e-13


def test_incomplete_integrals_degenerate_modulus():
    # At m = 0 both integrals collapse to the identity.
    for x in (0.3, 1.0, 2.5):
        assert abs(incomplete_F(x, 0.0) - x) < 1e-14
        assert abs(incomplete_E(x, 0.0) - x) < 1e-14


def test_incomplete_integrals_teardrop_point():
    # Values at the closure modulus, frozen from scipy.special.  At this
    # (x, m) the combination 2E - F vanishes, which is exactly how the
    # modulus is defined, so the two values must sit in ratio 1:2.
    x, m = 2.1679559150753045, 0.7311830257410411
    F = incomplete_F(x, m, tol=1e-14)
    E = incomplete_E(x, m, tol=1e-14)
    assert abs(F - 3.1484375015125154) < 1e-12
    assert abs(E - 1.5742187507562582) < 1e-12
    assert abs(2.0 * E - F) < 1e-12


def test_incomplete_integrals_reject_bad_modulus():
    with pytest.raises(DomainError):
        incomplete_F(1.0, 1.5)


def test_elliptic_grid_agrees_with_pointwise():
    xs = np.linspace(0.0, 2.0, 9)
    F, E = elliptic_FE_grid(xs, 0.6)
    for i, x in enumerate(xs):
        assert abs(F[i] - incomplete_F(float(x), 0.6)) < 1e-11
        assert abs(E[i] - incomplete_E(float(x), 0.6)) < 1e-11
