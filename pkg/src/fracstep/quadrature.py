"""Quadrature oracle for weakly singular integrands.

Ground-truth generator for every frozen expected value in the test suite:
integrals of the form

    int_a^b (t - a)^p (b - t)^q f(t) dt,        p, q > -1,  f smooth,

are computed with Gauss-Jacobi rules of increasing order until two
consecutive estimates agree to a relative tolerance.  The default tolerance
1e-10 sits one order below the 1e-9 acceptance threshold for the closed
forms, so oracle error never masks a kernel bug.

This module is intentionally independent of :mod:`fracstep.gammafn`: nodes
and weights come from scipy, giving the dual evaluation route the property
checks rely on.
"""

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, QuadratureError

DEFAULT_RTOL = 1e-10
_MIN_ORDER = 8
_MAX_ORDER = 4096


def singular_integral(a, b, p=0.0, q=0.0, smooth=None, rtol=DEFAULT_RTOL,
                      atol=0.0, max_order=_MAX_ORDER):
    """Integrate ``(t-a)^p (b-t)^q * smooth(t)`` over ``(a, b)``.

    Parameters
    ----------
    a, b : float
        Integration endpoints, ``a < b``.
    p, q : float
        Endpoint exponents at ``a`` and ``b``; both must exceed -1.
    smooth : callable, optional
        Vectorized factor evaluated at the quadrature nodes.  Defaults to 1.
        It must be smooth on ``[a, b]``; endpoint singularities belong in
        ``p``/``q``.
    rtol : float
        Relative agreement required between consecutive rule orders.
    atol : float
        Absolute agreement floor; needed when the integral itself can be
        zero up to roundoff (a relative test never terminates on noise).
    max_order : int
        Node budget; ``QuadratureError`` if agreement is not reached.

    Returns
    -------
    float
    """
    a = float(a)
    b = float(b)
    if not b > a:
        raise DomainError(f"empty or inverted interval ({a}, {b})")
    if p <= -1.0 or q <= -1.0:
        raise DomainError(f"endpoint exponents must exceed -1, got p={p}, q={q}")

    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    scale = half ** (p + q + 1.0)

    previous = None
    n = _MIN_ORDER
    while n <= max_order:
        # roots_jacobi weight is (1-x)^alpha (1+x)^beta; t-a maps to (1+x)
        x, w = roots_jacobi(n, q, p)
        t = mid + half * x
        vals = w if smooth is None else w * np.asarray(smooth(t), dtype=float)
        estimate = scale * float(np.sum(vals))
        if previous is not None:
            tol = max(rtol * max(abs(estimate), abs(previous)), atol, 1e-300)
            if abs(estimate - previous) <= tol:
                return estimate
        previous = estimate
        n *= 2
    raise QuadratureError(
        f"no convergence to rtol={rtol} within {max_order} nodes on ({a}, {b})")


def fixed_order_integral(a, b, p=0.0, q=0.0, smooth=None, order=256):
    """Single Gauss-Jacobi rule of the given order, no convergence loop.

    Used where the caller differentiates the result numerically and needs a
    noise floor at machine level rather than an adaptive stopping test.
    """
    a = float(a)
    b = float(b)
    if not b > a:
        raise DomainError(f"empty or inverted interval ({a}, {b})")
    if p <= -1.0 or q <= -1.0:
        raise DomainError(f"endpoint exponents must exceed -1, got p={p}, q={q}")
    half = 0.5 * (b - a)
    x, w = roots_jacobi(order, q, p)
    t = 0.5 * (a + b) + half * x
    vals = w if smooth is None else w * np.asarray(smooth(t), dtype=float)
    return half ** (p + q + 1.0) * float(np.sum(vals))
