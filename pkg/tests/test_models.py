import numpy as np
import pytest

from conftest import bump
from oracles import fourier_diff_matrix
from whithamlab.dno import DnoConfig
from whithamlab.errors import ChartMismatch, CflViolated, NonFinite
from whithamlab.models import (
    ModelKind,
    Scheme,
    StepperConfig,
    default_t_end,
    evolve,
    linear_phase_speeds,
    rhs,
    step,
)
from whithamlab.spectral import Field, Params, PeriodicGrid, fmu_symbol
from whithamlab.state import Chart, ModelState, diagonal, surface_potential, surface_velocity

RAW = DnoConfig(dealias=False)


def _zero(kind, grid):
    z = Field.zeros(grid)
    return z if kind.chart is None else ModelState(kind.chart, z, z)


@pytest.mark.parametrize("kind", list(ModelKind))
def test_zero_state_is_stationary(kind, grid):
    out = rhs(kind, _zero(kind, grid), Params(0.1, 0.1))
    assert all(f.max_abs() == 0 for f in ([out] if isinstance(out, Field) else out))


def test_diagonalized_shallow_nodewise(grid):
    D = fourier_diff_matrix(grid.n_points, grid.length)
    up, um = bump(grid, 1.0, 3.0), bump(grid, 0.5, 4.0, 2.0, "gauss")
    eps = 0.1
    out = rhs(ModelKind.DIAGONALIZED, diagonal(up, um), Params(0.0, eps), RAW)
    a, b = up.values, um.values
    ea = -(D @ a) - 0.5 * eps * (3 * a + b) * (D @ a)
    eb = (D @ b) - 0.5 * eps * (a + 3 * b) * (D @ b)
    assert np.max(np.abs(out.a.values - ea)) < 1e-10
    assert np.max(np.abs(out.b.values - eb)) < 1e-10


def test_whitham_boussinesq_shallow_nodewise(grid):
    D = fourier_diff_matrix(grid.n_points, grid.length)
    z, v = bump(grid, 1.0, 3.0), bump(grid, 0.5, 4.0, 2.0, "gauss")
    eps = 0.1
    out = rhs(ModelKind.WHITHAM_BOUSSINESQ, surface_velocity(z, v), Params(0.0, eps), RAW)
    zz, vv = z.values, v.values
    assert np.max(np.abs(out.a.values + D @ (vv + eps * zz * vv))) < 1e-10
    assert np.max(np.abs(out.b.values + D @ zz + eps * vv * (D @ vv))) < 1e-10


def test_linear_hamiltonian_wb_matches_water_waves(rfield):
    s = surface_potential(rfield(), rfield())
    p = Params(0.3, 0.0)
    a = rhs(ModelKind.WATER_WAVES, s, p)
    b = rhs(ModelKind.HAMILTONIAN_WB, s, p)
    assert np.max(np.abs((a.a - b.a).values)) < 1e-12
    assert np.max(np.abs((a.b - b.b).values)) < 1e-12


def test_ifrk4_exact_on_linear_problem(grid):
    u0 = bump(grid, 1.0, 3.0)
    p = Params(0.2, 0.0)
    t = 5.0
    out = evolve(ModelKind.WHITHAM_RIGHT, u0, p, StepperConfig(0.2, t)).final
    xi = grid.rfreq
    sym = -1j * xi * fmu_symbol(xi, p.mu)
    sym[-1] = 0
    exact = Field.from_spectrum(grid, np.exp(sym * t) * u0.spectrum)
    assert np.max(np.abs((out - exact).values)) <= 1e-12


def test_water_waves_linear_plane_wave():
    grid = PeriodicGrid(64, 2 * np.pi)
    x, k, mu, t = grid.nodes, 8, 0.5, 1.0
    omega = k * fmu_symbol(np.array([k]), mu)[0]
    s0 = surface_potential(Field(grid, np.cos(k * x)), Field(grid, np.sin(k * x) / omega))
    out = evolve(ModelKind.WATER_WAVES, s0, Params(mu, 0.0), StepperConfig(0.002, t)).final
    assert np.max(np.abs(out.a.values - np.cos(k * x - omega * t))) <= 1e-8
    assert np.max(np.abs(out.b.values - np.sin(k * x - omega * t) / omega)) <= 1e-8


def test_phase_speed_table():
    xi = np.array([0.0, 1.0, 4.0])
    p = Params(0.25, 0.1)
    right = linear_phase_speeds(ModelKind.WHITHAM_RIGHT, xi, p)[0]
    assert np.allclose(right, fmu_symbol(xi, 0.25))
    assert np.allclose(linear_phase_speeds(ModelKind.DIAGONALIZED, xi, p), [right, -right])
    assert np.allclose(linear_phase_speeds(ModelKind.KDV, xi, p)[0], 1 - 0.25 * xi**2 / 6)


def test_time_convergence_order(grid):
    u0 = bump(grid, 1.0, 3.0)
    p = Params(0.1, 0.1)
    runs = [evolve(ModelKind.WHITHAM_RIGHT, u0, p, StepperConfig(dt, 4.0)).final for dt in (0.2, 0.1, 0.05)]
    d1 = np.max(np.abs((runs[0] - runs[1]).values))
    d2 = np.max(np.abs((runs[1] - runs[2]).values))
    assert d1 / d2 == pytest.approx(16, rel=0.2)


def test_t_end_zero_returns_initial(grid):
    u0 = bump(grid)
    traj = evolve(ModelKind.WHITHAM_RIGHT, u0, Params(0.1, 0.1), StepperConfig(0.05, 0.0))
    assert traj.times == [0.0] and traj.final is u0


def test_mass_observer(grid):
    u0 = bump(grid, 1.0, 3.0, kind="gauss")
    traj = evolve(
        ModelKind.WHITHAM_RIGHT, u0, Params(0.1, 0.1), StepperConfig(0.05, 10.0),
        observers={"mass": lambda u: u.mean() * grid.length}, save_every=20,
    )
    m = traj.observation("mass")
    assert len(m) == len(traj.times) == 11
    assert np.max(np.abs(m - m[0])) <= 1e-10


def test_step_matches_evolve(grid):
    u0 = bump(grid)
    p, sc = Params(0.1, 0.1), StepperConfig(0.05, 0.05)
    a = step(ModelKind.WHITHAM_RIGHT, u0, p, sc)
    b = evolve(ModelKind.WHITHAM_RIGHT, u0, p, sc).final
    assert np.array_equal(a.values, b.values)


def test_cfl_violation(grid):
    with pytest.raises(CflViolated):
        evolve(ModelKind.WHITHAM_RIGHT, bump(grid), Params(0.1, 0.1), StepperConfig(1.0, 2.0))


def _unstable(grid):
    # explicit RK4 on the stiff KdV symbol
    return dict(kind=ModelKind.KDV, state0=bump(grid, 1.0, 3.0), p=Params(1.0, 0.1),
                stepper=StepperConfig(0.2, 200.0, scheme=Scheme.RK4))


def test_blowup_raises(grid):
    with pytest.raises(NonFinite):
        evolve(**_unstable(grid))


def test_blowup_can_stop_early(grid):
    traj = evolve(**_unstable(grid), stop_on_blowup=True)
    assert traj.stopped_early and traj.times[-1] < 200.0


def test_chart_mismatch(grid):
    z = Field.zeros(grid)
    with pytest.raises(ChartMismatch):
        rhs(ModelKind.WATER_WAVES, z, Params(0.1, 0.1))
    with pytest.raises(ChartMismatch):
        rhs(ModelKind.WATER_WAVES, surface_velocity(z, z), Params(0.1, 0.1))
    with pytest.raises(ChartMismatch):
        rhs(ModelKind.WHITHAM_RIGHT, diagonal(z, z), Params(0.1, 0.1))


def test_ifrk4_needs_diagonal_kind(grid):
    z = Field.zeros(grid)
    with pytest.raises(ValueError):
        evolve(ModelKind.WATER_WAVES, surface_potential(z, z), Params(0.1, 0.1),
               StepperConfig(0.05, 1.0, scheme="IFRK4"))


def test_default_charts():
    assert ModelKind.WATER_WAVES.chart is Chart.SURFACE_POTENTIAL
    assert ModelKind.WHITHAM_RIGHT.chart is None
    assert StepperConfig(0.1, 1).scheme_for(ModelKind.KDV) is Scheme.IFRK4
    assert StepperConfig(0.1, 1).scheme_for(ModelKind.WATER_WAVES) is Scheme.RK4


def test_default_t_end():
    assert default_t_end(Params(0.1, 0.05)) == pytest.approx(10.0)
    assert default_t_end(Params(0.0, 0.0)) == 50.0


def test_reflection_symmetry(grid):
    u0 = bump(grid, 1.0, 3.0, 2.0, "gauss")
    p, sc = Params(0.1, 0.1), StepperConfig(0.05, 5.0)
    ref = lambda f: Field(grid, np.roll(f.values[::-1], 1))
    left = evolve(ModelKind.WHITHAM_LEFT, u0, p, sc).final
    right = evolve(ModelKind.WHITHAM_RIGHT, -ref(u0), p, sc).final
    assert np.max(np.abs((left + ref(right)).values)) <= 1e-10


def test_water_waves_conserves_energy_roughly(grid):
    from whithamlab.hamiltonians import Functional, FunctionalKind

    p = Params(0.1, 0.1)
    s0 = surface_potential(bump(grid, 1.0, 3.0), Field.zeros(grid))
    H = Functional(FunctionalKind.H_WW, p)
    traj = evolve(ModelKind.WATER_WAVES, s0, p, StepperConfig(0.05, 5.0), observers={"H": H}, save_every=50)
    h = traj.observation("H")
    assert np.max(np.abs(h - h[0])) / h[0] < 1e-3
