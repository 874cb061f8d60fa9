import numpy as np
import pytest

from fracstep import assembly, fem1d, solver
from fracstep.assembly import InitialData, ProblemSpec, SourceTerm
from fracstep.errors import DomainError
from fracstep.fracops import TemporalGrid, temporal_weights
from fracstep.gammafn import gamma_fn


def experiment1_spec(alpha):
    return ProblemSpec(
        alpha=alpha,
        initial=InitialData(kind="power", scale=1.0, exponent=-0.8),
        sources=(SourceTerm("power", -0.8, -0.49),), tag="check")


class TestSolve:
    def test_zero_data_zero_solution(self):
        grid = TemporalGrid.uniform(16, 1.0)
        mesh = fem1d.Mesh1D(8)
        field, report = solver.solve(ProblemSpec(alpha=0.5, tag="check"), grid, mesh)
        assert np.all(field.values == 0.0)
        assert report.steps == 16

    def test_residuals_within_tolerance(self):
        grid = TemporalGrid.uniform(64, 1.0)
        mesh = fem1d.Mesh1D(64)
        field, report = solver.solve(experiment1_spec(0.3), grid, mesh)
        assert np.max(report.residual_norms) <= 1e-12
        assert report.history_flops == sum(2 * k * 63 for k in range(64))

    def test_grid_horizon_mismatch_rejected(self):
        grid = TemporalGrid.uniform(8, 2.0)
        mesh = fem1d.Mesh1D(8)
        with pytest.raises(DomainError):
            solver.solve(ProblemSpec(alpha=0.5, tag="check"), grid, mesh)

    def test_causality_bit_identical(self):
        rng = np.random.default_rng(9)
        grid = TemporalGrid.uniform(12, 1.0)
        mesh = fem1d.Mesh1D(8)
        spec = ProblemSpec(alpha=0.4, tag="check")
        loads = rng.uniform(-1.0, 1.0, size=(12, 7))
        base, _ = solver.solve(spec, grid, mesh, loads=loads)
        bumped = loads.copy()
        bumped[7:] *= -2.5
        other, _ = solver.solve(spec, grid, mesh, loads=bumped)
        assert np.array_equal(base.values[:7], other.values[:7])
        assert not np.array_equal(base.values[7:], other.values[7:])


class TestHistorySum:
    def test_first_step_is_zero(self):
        grid = TemporalGrid.uniform(8, 1.0)
        weights = temporal_weights(grid, 0.5)
        mass = fem1d.assemble_mass(fem1d.Mesh1D(8))
        values = np.ones((8, 7))
        assert np.all(solver.history_sum(weights, mass, values, 0) == 0.0)

    def test_constant_field_telescopes(self):
        grid = TemporalGrid.uniform(8, 1.0)
        weights = temporal_weights(grid, 0.3)
        mesh = fem1d.Mesh1D(8)
        mass = fem1d.assemble_mass(mesh)
        values = np.tile(np.arange(1.0, 8.0), (8, 1))
        k = 5
        hist = solver.history_sum(weights, mass, values, k)
        factor = weights.row_sum(k) - weights.diagonal(k)
        assert np.allclose(hist, factor * mass.matvec(values[0]), rtol=1e-12)

    def test_matches_dense_block_product(self):
        rng = np.random.default_rng(31)
        grid = TemporalGrid.uniform(16, 1.0)
        weights = temporal_weights(grid, 0.6)
        mesh = fem1d.Mesh1D(8)
        mass = fem1d.assemble_mass(mesh)
        values = rng.uniform(-1.0, 1.0, size=(16, 7))
        dense = weights.dense()
        for k in (1, 7, 15):
            expected = mass.matvec(dense[k, :k] @ values[:k])
            assert np.allclose(solver.history_sum(weights, mass, values, k),
                               expected, rtol=1e-12, atol=1e-15)


class TestScalar:
    def test_zero_data(self):
        grid = TemporalGrid.uniform(8, 1.0)
        y = solver.scalar_solve(0.5, 2.0, grid, y0=0.0)
        assert np.all(y == 0.0)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
    def test_first_step_with_unit_source_no_reaction(self, alpha):
        grid = TemporalGrid.uniform(4, 1.0)
        tau = 0.25
        y = solver.scalar_solve(alpha, 0.0, grid, y0=0.0, g_factors=grid.tau)
        assert y[0] == pytest.approx(gamma_fn(2.0 - alpha) * tau ** alpha,
                                     rel=1e-13)

    def test_negative_reaction_rejected(self):
        grid = TemporalGrid.uniform(4, 1.0)
        with pytest.raises(DomainError):
            solver.scalar_solve(0.5, -1.0, grid, y0=0.0)


class TestSpectralDecoupling:
    def test_pde_equals_scalar_times_sine(self):
        mesh = fem1d.Mesh1D(32)
        grid = TemporalGrid.uniform(128, 1.0)
        alpha, mode = 0.6, 1
        spec = assembly.spectral_test_problem(mode, mesh, alpha)
        field, _ = solver.solve(spec, grid, mesh)
        lam = assembly.spectral_eigenvalue(mesh, mode)
        scalars = solver.scalar_solve(alpha, lam, grid, y0=1.0)
        predicted = np.outer(scalars, fem1d.sine_vector(mesh, mode))
        scale = np.max(np.abs(predicted))
        assert np.max(np.abs(field.values - predicted)) / scale <= 1e-10

    def test_higher_mode(self):
        mesh = fem1d.Mesh1D(16)
        grid = TemporalGrid.uniform(32, 1.0)
        spec = assembly.spectral_test_problem(3, mesh, 0.4)
        field, _ = solver.solve(spec, grid, mesh)
        lam = assembly.spectral_eigenvalue(mesh, 3)
        predicted = np.outer(solver.scalar_solve(0.4, lam, grid, y0=1.0),
                             fem1d.sine_vector(mesh, 3))
        assert np.max(np.abs(field.values - predicted)) <= 1e-10


class TestBlockEquivalence:
    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
    def test_marched_equals_dense_uniform(self, alpha):
        grid = TemporalGrid.uniform(16, 1.0)
        mesh = fem1d.Mesh1D(8)
        loads = assembly.assemble_load(experiment1_spec(alpha), grid, mesh)
        marched, _ = solver.solve(experiment1_spec(alpha), grid, mesh, loads=loads)
        dense = solver.dense_block_solve(grid, mesh, alpha, loads)
        scale = np.max(np.abs(dense))
        assert np.max(np.abs(marched.values - dense)) / scale <= 1e-10

    def test_marched_equals_dense_nonuniform(self):
        rng = np.random.default_rng(13)
        nodes = np.concatenate([[0.0], np.cumsum(rng.uniform(0.3, 1.0, size=12))])
        grid = TemporalGrid(nodes / nodes[-1])
        mesh = fem1d.Mesh1D(8)
        spec = experiment1_spec(0.5)
        loads = assembly.assemble_load(spec, grid, mesh)
        marched, _ = solver.solve(spec, grid, mesh, loads=loads)
        dense = solver.dense_block_solve(grid, mesh, 0.5, loads)
        scale = np.max(np.abs(dense))
        assert np.max(np.abs(marched.values - dense)) / scale <= 1e-10


class TestEnergyIdentity:
    @pytest.mark.parametrize("alpha", [0.3, 0.8])
    def test_gap_small_and_consistent(self, alpha):
        grid = TemporalGrid.uniform(32, 1.0)
        mesh = fem1d.Mesh1D(16)
        spec = experiment1_spec(alpha)
        loads = assembly.assemble_load(spec, grid, mesh)
        field, report = solver.solve(spec, grid, mesh, loads=loads)
        weights = temporal_weights(grid, alpha)
        standalone = solver.energy_identity_gap(field, weights, loads)
        assert report.energy_gap <= 1e-10
        assert standalone <= 1e-10
