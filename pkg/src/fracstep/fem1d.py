"""Uniform 1D P1 finite elements on (0, 1) with homogeneous Dirichlet ends.

Interior-node unknowns only: for ``n`` cells the unknown vector has
``n - 1`` entries at ``x_i = i h``.  Mass and stiffness matrices are
tridiagonal; load vectors for power-law and sine data are assembled from
closed-form antiderivatives, never from pointwise sampling (the experiments'
data blow up at ``x = 0``).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NestingError, SolverError


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of ``n_cells`` cells on (0, 1); nonuniform meshes are rejected."""

    n_cells: int

    def __post_init__(self):
        if not isinstance(self.n_cells, (int, np.integer)) or self.n_cells < 2:
            raise DomainError(f"need an integer n_cells >= 2, got {self.n_cells!r}")

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def n_interior(self) -> int:
        return self.n_cells - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return np.arange(1, self.n_cells) * self.h

    def refine(self, factor: int) -> "Mesh1D":
        if factor < 1:
            raise DomainError("refinement factor must be >= 1")
        return Mesh1D(self.n_cells * factor)


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as (sub, diag, super) bands."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise DomainError("band lengths must be n-1, n, n-1")

    @property
    def size(self) -> int:
        return len(self.diag)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        if self.size > 1:
            y[:-1] += self.sup * x[1:]
            y[1:] += self.sub * x[:-1]
        return y

    def matmat_rows(self, rows: np.ndarray) -> np.ndarray:
        """Apply to each row of a (m, n) array."""
        y = rows * self.diag
        if self.size > 1:
            y[:, :-1] += rows[:, 1:] * self.sup
            y[:, 1:] += rows[:, :-1] * self.sub
        return y

    def quadform(self, x: np.ndarray) -> float:
        return float(x @ self.matvec(np.array(x, dtype=float)))

    def quadform_rows(self, rows: np.ndarray) -> np.ndarray:
        """x^T A x for each row x of a (m, n) array."""
        out = np.einsum("ij,ij->i", rows, rows * self.diag)
        if self.size > 1:
            out += 2.0 * np.einsum("ij,ij->i", rows[:, :-1], rows[:, 1:] * self.sup)
        return out

    def factor(self) -> "ThomasFactor":
        return ThomasFactor.from_matrix(self)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.factor().solve(rhs)

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.size > 1:
            a += np.diag(self.sub, -1) + np.diag(self.sup, 1)
        return a


@dataclass(frozen=True)
class ThomasFactor:
    """Reusable forward-elimination coefficients of a tridiagonal matrix.

    The same matrix is solved once per time step, so the elimination
    multipliers are computed once and only the substitution sweeps run per
    right-hand side.
    """

    sub: np.ndarray
    sup: np.ndarray
    pivots: np.ndarray

    @classmethod
    def from_matrix(cls, tri: TridiagonalMatrix) -> "ThomasFactor":
        n = tri.size
        pivots = np.empty(n)
        pivots[0] = tri.diag[0]
        if pivots[0] == 0.0:
            raise SolverError("zero pivot in tridiagonal elimination")
        for i in range(1, n):
            pivots[i] = tri.diag[i] - tri.sub[i - 1] * tri.sup[i - 1] / pivots[i - 1]
            if pivots[i] == 0.0:
                raise SolverError("zero pivot in tridiagonal elimination")
        return cls(np.array(tri.sub, dtype=float), np.array(tri.sup, dtype=float),
                   pivots)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        n = len(self.pivots)
        y = np.empty(n)
        y[0] = rhs[0]
        sub, sup, piv = self.sub, self.sup, self.pivots
        for i in range(1, n):
            y[i] = rhs[i] - sub[i - 1] / piv[i - 1] * y[i - 1]
        x = np.empty(n)
        x[n - 1] = y[n - 1] / piv[n - 1]
        for i in range(n - 2, -1, -1):
            x[i] = (y[i] - sup[i] * x[i + 1]) / piv[i]
        return x


def assemble_mass(mesh: Mesh1D) -> TridiagonalMatrix:
    """Mass matrix ``h/6 tridiag(1, 4, 1)`` on interior nodes."""
    n = mesh.n_interior
    h = mesh.h
    return TridiagonalMatrix(np.full(n - 1, h / 6.0), np.full(n, 2.0 * h / 3.0),
                             np.full(n - 1, h / 6.0))


def assemble_stiffness(mesh: Mesh1D) -> TridiagonalMatrix:
    """Stiffness matrix ``1/h tridiag(-1, 2, -1)`` on interior nodes."""
    n = mesh.n_interior
    h = mesh.h
    return TridiagonalMatrix(np.full(n - 1, -1.0 / h), np.full(n, 2.0 / h),
                             np.full(n - 1, -1.0 / h))


def power_load_vector(mesh: Mesh1D, r: float) -> np.ndarray:
    """Hat-function moments ``int_0^1 x^r phi_i dx`` in closed form.

    Uses the second antiderivative of ``x^r``: the moment against a hat is
    the scaled second difference ``(F(x_{i-1}) - 2 F(x_i) + F(x_{i+1}))/h``
    with ``F(x) = x^(r+2)/((r+1)(r+2))``.  Finite for every ``r > -1`` even
    though the integrand is singular at the left boundary hat.
    """
    r = float(r)
    if not r > -1.0:
        raise DomainError(f"power exponent must exceed -1, got {r}")
    nodes = np.arange(mesh.n_cells + 1) * mesh.h
    second_antideriv = nodes ** (r + 2.0) / ((r + 1.0) * (r + 2.0))
    return (second_antideriv[:-2] - 2.0 * second_antideriv[1:-1]
            + second_antideriv[2:]) / mesh.h


def sine_load_vector(mesh: Mesh1D, mode: int) -> np.ndarray:
    """Moments ``int_0^1 sin(m pi x) phi_i dx`` in closed form."""
    if mode < 1:
        raise DomainError(f"sine mode must be >= 1, got {mode}")
    k = mode * math.pi
    h = mesh.h
    factor = 2.0 * (1.0 - math.cos(k * h)) / (h * k * k)
    return factor * np.sin(k * mesh.interior_nodes)


def sine_vector(mesh: Mesh1D, mode: int) -> np.ndarray:
    """Nodal values ``sin(m pi x_i)`` at the interior nodes."""
    if mode < 1:
        raise DomainError(f"sine mode must be >= 1, got {mode}")
    return np.sin(mode * math.pi * mesh.interior_nodes)


def pencil_eigenvalue(mesh: Mesh1D, mode: int) -> float:
    """Exact eigenvalue of the (stiffness, mass) pencil for the sine mode."""
    if not 1 <= mode <= mesh.n_interior:
        raise DomainError(f"mode must lie in 1..{mesh.n_interior}, got {mode}")
    h = mesh.h
    c = math.cos(mode * math.pi * h)
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c)


@dataclass(frozen=True)
class SpatialField:
    """P1 function vanishing at both ends, given by interior nodal values."""

    mesh: Mesh1D
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coeffs)
        if coeffs.shape != (self.mesh.n_interior,):
            raise DomainError(
                f"expected {self.mesh.n_interior} coefficients, got {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("coefficients must be finite")


def prolongation_stencil(coarse: Mesh1D, fine: Mesh1D):
    """Index/weight arrays interpolating coarse interior values to fine nodes.

    Fine node ``m i_c + s`` takes ``(1 - s/m) u[i_c] + (s/m) u[i_c + 1]``
    with zero boundary values; exact for P1 functions on nested meshes.
    """
    if fine.n_cells % coarse.n_cells != 0:
        raise NestingError(
            f"{fine.n_cells} cells do not refine {coarse.n_cells} cells")
    m = fine.n_cells // coarse.n_cells
    fine_idx = np.arange(1, fine.n_cells)
    left = fine_idx // m
    weight = (fine_idx - m * left) / m
    return left, weight


def prolong_rows(values: np.ndarray, coarse: Mesh1D, fine: Mesh1D) -> np.ndarray:
    """Prolong each row of a (m, N_coarse) array to the fine mesh."""
    left, weight = prolongation_stencil(coarse, fine)
    values = np.atleast_2d(np.asarray(values, dtype=float))
    padded = np.zeros((values.shape[0], coarse.n_cells + 1))
    padded[:, 1:-1] = values
    return (1.0 - weight) * padded[:, left] + weight * padded[:, left + 1]


def prolong(field: SpatialField, fine: Mesh1D) -> SpatialField:
    """Exact P1 interpolation of a field onto a nested finer mesh."""
    row = prolong_rows(field.coefficients, field.mesh, fine)[0]
    return SpatialField(fine, row)


def field_norms(a: SpatialField, b: SpatialField) -> tuple[float, float]:
    """L2 and H1(seminorm) distances between fields on nested meshes.

    ``b`` must live on an integer refinement of ``a``'s mesh; ``a`` is
    prolonged exactly and the norms of the difference are evaluated with the
    fine mass and stiffness matrices, hence exactly for P1 data.
    """
    diff = prolong(a, b.mesh).coefficients - b.coefficients
    mass = assemble_mass(b.mesh)
    stiffness = assemble_stiffness(b.mesh)
    return math.sqrt(mass.quadform(diff)), math.sqrt(stiffness.quadform(diff))
