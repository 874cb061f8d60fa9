import numpy as np
import pytest
import scipy.special

from fracstep.errors import DomainError, QuadratureError
from fracstep.quadrature import fixed_order_integral, singular_integral

# frozen oracle self-check: int_0^1 t^-1/4 (1-t)^-1/4 dt = Gamma(3/4)^2/Gamma(3/2)
BETA_QUARTER = 1.6944261695879577


def test_unit_integral():
    assert singular_integral(0.0, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_inverse_sqrt_singularity():
    assert singular_integral(0.0, 1.0, p=-0.5) == pytest.approx(2.0, rel=1e-12)


def test_beta_identity_cross_check():
    value = singular_integral(0.0, 1.0, p=-0.25, q=-0.25)
    assert value == pytest.approx(BETA_QUARTER, rel=1e-12)
    closed = scipy.special.gamma(0.75) ** 2 / scipy.special.gamma(1.5)
    assert value == pytest.approx(closed, rel=1e-12)


def test_smooth_factor_polynomial():
    # int_0^2 t^2 dt = 8/3 with the polynomial passed as the smooth part
    value = singular_integral(0.0, 2.0, smooth=lambda t: t ** 2)
    assert value == pytest.approx(8.0 / 3.0, rel=1e-13)


def test_shifted_interval_with_both_exponents():
    # int_1^3 (t-1)^{-0.3} (3-t)^{-0.6} e^t dt against a dense reference rule
    reference = fixed_order_integral(1.0, 3.0, p=-0.3, q=-0.6,
                                     smooth=np.exp, order=600)
    value = singular_integral(1.0, 3.0, p=-0.3, q=-0.6, smooth=np.exp)
    assert value == pytest.approx(reference, rel=1e-10)


def test_absolute_floor_for_zero_integrands():
    value = singular_integral(0.0, 1.0, smooth=lambda t: 0.0 * t, atol=1e-14)
    assert abs(value) <= 1e-14


def test_domain_errors():
    with pytest.raises(DomainError):
        singular_integral(1.0, 1.0)
    with pytest.raises(DomainError):
        singular_integral(2.0, 1.0)
    with pytest.raises(DomainError):
        singular_integral(0.0, 1.0, p=-1.0)
    with pytest.raises(DomainError):
        singular_integral(0.0, 1.0, q=-1.5)


def test_budget_exhaustion_raises():
    # far too oscillatory for the allotted node budget
    with pytest.raises(QuadratureError):
        singular_integral(0.0, 1.0, smooth=lambda t: np.sin(5e4 * t),
                          max_order=64)


def test_fixed_order_matches_adaptive_on_smooth_data():
    adaptive = singular_integral(0.0, 1.0, p=0.3, smooth=lambda t: np.cos(t))
    fixed = fixed_order_integral(0.0, 1.0, p=0.3, smooth=lambda t: np.cos(t),
                                 order=128)
    assert fixed == pytest.approx(adaptive, rel=1e-12)


def test_gauss_jacobi_moment_exactness():
    # weight moments reproduce Beta values for a spread of exponents
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = rng.uniform(-0.9, 2.0)
        q = rng.uniform(-0.9, 2.0)
        value = singular_integral(0.0, 1.0, p=p, q=q)
        closed = (scipy.special.gamma(p + 1.0) * scipy.special.gamma(q + 1.0)
                  / scipy.special.gamma(p + q + 2.0))
        assert value == pytest.approx(closed, rel=1e-10)
