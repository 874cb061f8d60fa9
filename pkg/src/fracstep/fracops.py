"""Closed-form fractional calculus on power functions and piecewise constants.

Everything here is exact in terms of the gamma function: left/right
fractional integrals and derivatives of ``c (t-a)^sigma``, the causal
temporal Galerkin weight matrix for piecewise constants, and the discrete
fractional seminorm recovered from the left-right derivative pairing.  No
discretized convolution kernels appear in this module; quadrature lives only
in the independent oracle (:mod:`fracstep.quadrature`).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .gammafn import gamma_fn

ROLE_INTEGRAL = "integral"
ROLE_LEFT_DERIVATIVE = "left-derivative"
ROLE_RIGHT_DERIVATIVE = "right-derivative"
_ROLES = (ROLE_INTEGRAL, ROLE_LEFT_DERIVATIVE, ROLE_RIGHT_DERIVATIVE)


@dataclass(frozen=True)
class FracOrder:
    """A fractional order in (0, 1) together with its operator role."""

    gamma: float
    role: str = ROLE_INTEGRAL

    def __post_init__(self):
        if self.role not in _ROLES:
            raise DomainError(f"unknown operator role {self.role!r}")
        if not 0.0 < self.gamma < 1.0:
            raise DomainError(f"fractional order must lie in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class PowerFunction:
    """The function ``t -> coefficient * (t - offset)^exponent`` on ``t > offset``."""

    coefficient: float
    exponent: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.exponent > -1.0:
            raise DomainError(
                f"exponent must exceed -1 for local integrability, got {self.exponent}")
        if not math.isfinite(self.coefficient):
            raise DomainError("coefficient must be finite")

    def __call__(self, t):
        return self.coefficient * np.power(np.asarray(t, dtype=float) - self.offset,
                                           self.exponent)


@dataclass(frozen=True)
class TemporalGrid:
    """Partition ``0 = t_0 < t_1 < ... < t_J = T`` of the time axis."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("grid needs at least two nodes")
        if nodes[0] != 0.0:
            raise DomainError("grid must start at t_0 = 0")
        if not np.all(np.diff(nodes) > 0.0):
            raise DomainError("grid nodes must be strictly increasing")
        nodes.flags.writeable = False

    @classmethod
    def uniform(cls, num_steps: int, final_time: float = 1.0) -> "TemporalGrid":
        if num_steps < 1:
            raise DomainError("need at least one step")
        if not final_time > 0.0:
            raise DomainError("final time must be positive")
        return cls(final_time * (np.arange(num_steps + 1) / num_steps))

    @property
    def num_steps(self) -> int:
        return self.nodes.size - 1

    @property
    def final_time(self) -> float:
        return float(self.nodes[-1])

    @property
    def tau(self) -> np.ndarray:
        """Interval lengths tau_j."""
        return np.diff(self.nodes)

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        tau = self.tau
        return bool(np.all(np.abs(tau - tau[0]) <= rtol * tau[0]))


def _ensure_order(gamma: float, lo=0.0, hi=1.0, what="order") -> float:
    gamma = float(gamma)
    if not lo < gamma < hi:
        raise DomainError(f"{what} must lie in ({lo}, {hi}), got {gamma}")
    return gamma


# ---------------------------------------------------------------------------
# power-function rules
# ---------------------------------------------------------------------------

def integral_power_function(p: PowerFunction, gamma: float) -> PowerFunction:
    """Left fractional integral of a power function, as a power function.

    The order-``gamma`` integral of ``c (t-a)^sigma`` is
    ``c Gamma(sigma+1)/Gamma(sigma+1+gamma) (t-a)^(sigma+gamma)``.
    """
    gamma = _ensure_order(gamma, 0.0, 2.0, "integral order")
    coeff = p.coefficient * gamma_fn(p.exponent + 1.0) / gamma_fn(p.exponent + 1.0 + gamma)
    return PowerFunction(coeff, p.exponent + gamma, p.offset)


def riemann_liouville_integral_power(p: PowerFunction, gamma: float, t: float) -> float:
    """Evaluate the left fractional integral of a power function at ``t``."""
    if not t > p.offset:
        raise DomainError(f"evaluation point {t} must exceed the offset {p.offset}")
    return float(integral_power_function(p, gamma)(t))


def derivative_power_function(p: PowerFunction, gamma: float) -> PowerFunction:
    """Left fractional derivative of a power function, as a power function.

    The order-``gamma`` derivative of ``c (t-a)^sigma`` is
    ``c Gamma(sigma+1)/Gamma(sigma+1-gamma) (t-a)^(sigma-gamma)``; the result
    exponent must stay above -1, which is also what keeps the formula's gamma
    argument off the poles.
    """
    gamma = _ensure_order(gamma, 0.0, 1.0, "derivative order")
    if not p.exponent - gamma > -1.0:
        raise DomainError(
            f"derivative exponent sigma-gamma = {p.exponent - gamma} must exceed -1")
    coeff = p.coefficient * gamma_fn(p.exponent + 1.0) / gamma_fn(p.exponent + 1.0 - gamma)
    return PowerFunction(coeff, p.exponent - gamma, p.offset)


def riemann_liouville_derivative_power(p: PowerFunction, gamma: float, t: float) -> float:
    """Evaluate the left fractional derivative of a power function at ``t``."""
    if not t > p.offset:
        raise DomainError(f"evaluation point {t} must exceed the offset {p.offset}")
    return float(derivative_power_function(p, gamma)(t))


def right_integral_power(coefficient: float, exponent: float, endpoint: float,
                         gamma: float, t: float) -> float:
    """Right fractional integral of ``c (b-s)^sigma`` evaluated at ``t < b``.

    Mirror of the left-sided rule: the result is
    ``c Gamma(sigma+1)/Gamma(sigma+1+gamma) (b-t)^(sigma+gamma)``.
    """
    gamma = _ensure_order(gamma, 0.0, 2.0, "integral order")
    if not exponent > -1.0:
        raise DomainError(f"exponent must exceed -1, got {exponent}")
    if not t < endpoint:
        raise DomainError(f"evaluation point {t} must precede the endpoint {endpoint}")
    coeff = coefficient * gamma_fn(exponent + 1.0) / gamma_fn(exponent + 1.0 + gamma)
    return coeff * (endpoint - t) ** (exponent + gamma)


# ---------------------------------------------------------------------------
# piecewise-constant kernels
# ---------------------------------------------------------------------------

def _plus_power(x, mu: float) -> np.ndarray:
    # (x)_+^mu with the exact-zero convention: 0 wherever x <= 0, for any mu
    # (negative mu included, where naive clipping would produce inf at 0).
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mask = x > 0.0
    out[mask] = x[mask] ** mu
    return out


def _four_corner(grid: TemporalGrid, mu: float) -> np.ndarray:
    """Matrix ``C[k, j]`` of four-corner differences with exponent ``mu``.

    ``C[k, j] = (t_{k+1}-t_j)_+^mu - (t_k-t_j)_+^mu - (t_{k+1}-t_{j+1})_+^mu
    + (t_k-t_{j+1})_+^mu`` for 0-based interval indices; every piecewise
    constant pairing in this module is such a matrix up to a gamma factor.
    """
    upper = grid.nodes[1:]
    lower = grid.nodes[:-1]
    a = _plus_power(upper[:, None] - lower[None, :], mu)
    b = _plus_power(lower[:, None] - lower[None, :], mu)
    c = _plus_power(upper[:, None] - upper[None, :], mu)
    d = _plus_power(lower[:, None] - upper[None, :], mu)
    return a - b - c + d


@dataclass(frozen=True)
class TemporalWeightMatrix:
    """Causal Galerkin matrix of the left fractional derivative.

    Entry ``(k, j)`` is the integral over interval ``k`` of the order-alpha
    derivative of the indicator of interval ``j``; it vanishes for ``j > k``.
    Uniform grids get a Toeplitz kernel so that storage stays O(J).
    """

    grid: TemporalGrid
    alpha: float
    _kernel: np.ndarray | None = field(default=None, repr=False)
    _dense: np.ndarray | None = field(default=None, repr=False)

    @property
    def num_steps(self) -> int:
        return self.grid.num_steps

    @property
    def is_toeplitz(self) -> bool:
        return self._kernel is not None

    def diagonal(self, k: int) -> float:
        if self._kernel is not None:
            return float(self._kernel[0])
        return float(self._dense[k, k])

    def entry(self, k: int, j: int) -> float:
        if j > k:
            return 0.0
        if self._kernel is not None:
            return float(self._kernel[k - j])
        return float(self._dense[k, j])

    def row_sum(self, k: int) -> float:
        """Closed-form telescoped row sum ``(t_{k+1}^{1-a} - t_k^{1-a})/Gamma(2-a)``."""
        mu = 1.0 - self.alpha
        nodes = self.grid.nodes
        return (nodes[k + 1] ** mu - nodes[k] ** mu) / gamma_fn(2.0 - self.alpha)

    def history_dot(self, values: np.ndarray, k: int) -> np.ndarray:
        """``sum_{j<k} G[k, j] * values[j]`` along the leading axis."""
        if k == 0:
            return np.zeros(values.shape[1:], dtype=float)
        if self._kernel is not None:
            return self._kernel[k:0:-1] @ values[:k]
        return self._dense[k, :k] @ values[:k]

    def dense(self) -> np.ndarray:
        """Materialize the full lower-triangular matrix (small J only)."""
        if self._dense is not None:
            return self._dense.copy()
        J = self.num_steps
        out = np.zeros((J, J))
        for k in range(J):
            out[k, :k + 1] = self._kernel[k::-1]
        return out


def temporal_weights(grid: TemporalGrid, alpha: float) -> TemporalWeightMatrix:
    """Assemble the causal weight matrix for the order-``alpha`` derivative.

    On a uniform grid the entries depend only on ``k - j`` and the matrix is
    stored as its Toeplitz kernel; otherwise the full lower triangle is built
    from the four-corner formula.
    """
    alpha = _ensure_order(alpha, 0.0, 1.0, "alpha")
    mu = 1.0 - alpha
    norm = gamma_fn(2.0 - alpha)
    if grid.is_uniform():
        tau = grid.final_time / grid.num_steps
        d = np.arange(grid.num_steps, dtype=float)
        kernel = (_plus_power(d + 1.0, mu) - 2.0 * _plus_power(d, mu)
                  + _plus_power(d - 1.0, mu)) * tau ** mu / norm
        return TemporalWeightMatrix(grid, alpha, _kernel=kernel)
    dense = np.tril(_four_corner(grid, mu)) / norm
    return TemporalWeightMatrix(grid, alpha, _dense=dense)


def derivative_pairing_matrix(grid: TemporalGrid, gamma: float) -> np.ndarray:
    """Matrix of ``<D_left^gamma chi_j, D_right^gamma chi_k>`` pairings.

    Requires ``gamma < 1/2``: interval indicators fall outside the pairing
    space at gamma = 1/2 and beyond.  Entry ``(k, j)`` vanishes for ``j > k``
    because the left derivative is causal and the right one anti-causal.
    """
    gamma = float(gamma)
    if not 0.0 < gamma < 0.5:
        raise DomainError(
            f"derivative pairing requires 0 < gamma < 1/2, got {gamma}")
    return np.tril(_four_corner(grid, 1.0 - 2.0 * gamma)) / gamma_fn(2.0 - 2.0 * gamma)


def integral_pairing_matrix(grid: TemporalGrid, gamma: float) -> np.ndarray:
    """Matrix of ``<I_left^gamma chi_j, I_right^gamma chi_k>`` pairings.

    Computed through the adjoint/composition rules, which turn the pairing
    into ``<I_left^{2 gamma} chi_j, chi_k>`` with the same four-corner shape.
    """
    gamma = _ensure_order(gamma, 0.0, 1.0, "integral order")
    return np.tril(_four_corner(grid, 1.0 + 2.0 * gamma)) / gamma_fn(2.0 + 2.0 * gamma)


def derivative_pairing_pwc(grid: TemporalGrid, values, gamma: float) -> float:
    """Bilinear pairing of the left/right derivatives of a piecewise constant."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.num_steps,):
        raise DomainError("one value per grid interval required")
    mat = derivative_pairing_matrix(grid, gamma)
    return float(values @ mat @ values)


def fractional_integral_pairing_pwc(grid: TemporalGrid, values, gamma: float) -> float:
    """Pairing ``<I_left^gamma v, I_right^gamma v>`` for piecewise-constant v."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.num_steps,):
        raise DomainError("one value per grid interval required")
    mat = integral_pairing_matrix(grid, gamma)
    return float(values @ mat @ values)


def fractional_seminorm_pwc(grid: TemporalGrid, values, gamma: float) -> float:
    """Order-``gamma`` seminorm of a piecewise constant on the grid.

    Recovered from the left-right derivative pairing divided by
    ``cos(gamma pi)``; valid for ``gamma`` in (0, 1/2) only, and an explicit
    error keeps gamma = 1/2 (where indicators leave the space) out.
    """
    pairing = derivative_pairing_pwc(grid, values, gamma)
    squared = pairing / math.cos(gamma * math.pi)
    if squared < 0.0:
        if squared < -1e-12 * float(np.max(np.abs(values), initial=0.0) ** 2 + 1.0):
            raise DomainError("pairing lost positivity; inputs out of range")
        squared = 0.0
    return math.sqrt(squared)


# ---------------------------------------------------------------------------
# pointwise evaluators for piecewise constants (test/oracle support)
# ---------------------------------------------------------------------------

def pwc_left_derivative(grid: TemporalGrid, values, gamma: float, t) -> np.ndarray:
    """Pointwise left fractional derivative of a piecewise constant."""
    gamma = _ensure_order(gamma, 0.0, 1.0, "derivative order")
    values = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    lo = grid.nodes[:-1]
    hi = grid.nodes[1:]
    terms = (_plus_power(t[..., None] - lo, -gamma)
             - _plus_power(t[..., None] - hi, -gamma))
    return terms @ values / gamma_fn(1.0 - gamma)


def pwc_left_integral(grid: TemporalGrid, values, gamma: float, t) -> np.ndarray:
    """Pointwise left fractional integral of a piecewise constant."""
    gamma = _ensure_order(gamma, 0.0, 2.0, "integral order")
    values = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    lo = grid.nodes[:-1]
    hi = grid.nodes[1:]
    terms = (_plus_power(t[..., None] - lo, gamma)
             - _plus_power(t[..., None] - hi, gamma))
    return terms @ values / gamma_fn(1.0 + gamma)


def pwc_right_integral(grid: TemporalGrid, values, gamma: float, t) -> np.ndarray:
    """Pointwise right fractional integral of a piecewise constant."""
    gamma = _ensure_order(gamma, 0.0, 2.0, "integral order")
    values = np.asarray(values, dtype=float)
    t = np.asarray(t, dtype=float)
    lo = grid.nodes[:-1]
    hi = grid.nodes[1:]
    terms = (_plus_power(hi - t[..., None], gamma)
             - _plus_power(lo - t[..., None], gamma))
    return terms @ values / gamma_fn(1.0 + gamma)
