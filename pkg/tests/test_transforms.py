import numpy as np
import pytest

from conftest import bump
from whithamlab.errors import CavitationViolated, NonZeroMean
from whithamlab.spectral import Field, Params, PeriodicGrid, derivative, fmu, inner, norm_l2
from whithamlab.state import Chart, surface_potential
from whithamlab.transforms import (
    diag_forward,
    initial_normal_form,
    pipeline_velocity,
    pipeline_wh,
    reconstruct_c,
    riemann_map,
    t_b,
    t_b_inv,
    t_b_jacobian,
    t_b_jacobian_adjoint,
    t_b_tilde,
    t_d,
    t_d_inv,
    t_i,
    t_i_inv,
)


def _err(f, g):
    return float(np.max(np.abs(f.values - g.values)))


@pytest.fixture
def torus():
    return PeriodicGrid(64, 2 * np.pi)


def test_t_b_trig_oracle(torus):
    x = torus.nodes
    r, s = Field(torus, np.cos(x)), Field(torus, np.cos(2 * x))
    eps = 0.1
    a = -0.25 * np.sin(x) * np.sin(2 * x) / 2 + 0.25 * np.cos(x) * np.cos(2 * x) + 0.125 * np.cos(2 * x) ** 2
    b = -0.25 * 2 * np.sin(2 * x) * np.sin(x) + 0.25 * np.cos(x) * np.cos(2 * x) + 0.125 * np.cos(x) ** 2
    rc, sc = t_b(r, s, Params(0.3, eps))
    assert np.max(np.abs(rc.values - (np.cos(x) + eps * a))) <= 1e-12
    assert np.max(np.abs(sc.values - (np.cos(2 * x) + eps * b))) <= 1e-12


def test_t_b_swap_symmetry(rfield):
    r, s = rfield(), rfield()
    p = Params(0.2, 0.1)
    a, b = t_b(r, s, p)
    b2, a2 = t_b(s, r, p)
    assert _err(a, a2) <= 1e-14 and _err(b, b2) <= 1e-14


def test_t_b_tilde_is_quadratic(rfield):
    r, s = rfield(), rfield()
    a, b = t_b_tilde(r, s)
    a3, b3 = t_b_tilde(3 * r, 3 * s)
    assert _err(a3, 9 * a) <= 1e-12 and _err(b3, 9 * b) <= 1e-12


def test_eps_zero_identities(rfield):
    r, s = rfield(), rfield()
    p = Params(0.2, 0.0)
    for out in (t_b(r, s, p), t_b_inv(r, s, p)):
        assert out[0] is r and out[1] is s
    state = pipeline_wh(r, s, p)
    zeta, v = t_d(r, s, p)
    assert _err(state.a, zeta) == 0 and _err(derivative(state.b), v) <= 1e-12


def test_first_order_inverse(rfield):
    r, s = rfield(), rfield()
    gaps = []
    for eps in (0.1, 0.05, 0.025):
        p = Params(0.2, eps)
        a, b = t_b_inv(*t_b(r, s, p), p, strict=False)
        gaps.append(norm_l2(a - r) + norm_l2(b - s))
    assert gaps[0] / gaps[1] == pytest.approx(4, rel=0.1)
    assert gaps[1] / gaps[2] == pytest.approx(4, rel=0.1)


def test_t_b_strict_mean(rfield):
    r, s = rfield(), rfield()
    with pytest.raises(NonZeroMean):
        t_b(r + 0.1, s, Params(0.2, 0.1))
    t_b(r + 0.1, s, Params(0.2, 0.1), strict=False)


def test_jacobian_matches_finite_difference(rfield):
    r, s, a, b = rfield(), rfield(), rfield(), rfield()
    p = Params(0.2, 0.1)
    Ja, Jb = t_b_jacobian(r, s, (a, b), p)
    h = 1e-5
    plus = t_b(r + h * a, s + h * b, p)
    minus = t_b(r - h * a, s - h * b, p)
    assert _err(Ja, (plus[0] - minus[0]) / (2 * h)) <= 1e-9
    assert _err(Jb, (plus[1] - minus[1]) / (2 * h)) <= 1e-9


def test_jacobian_adjoint_pairing(rfield):
    r, s, a, b, c, d = (rfield() for _ in range(6))
    p = Params(0.2, 0.1)
    Ja, Jb = t_b_jacobian(r, s, (a, b), p)
    Aa, Ab = t_b_jacobian_adjoint(r, s, (c, d), p)
    lhs = inner(Ja, c) + inner(Jb, d)
    rhs = inner(a, Aa) + inner(b, Ab)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_riemann_roundtrip(rfield):
    zeta, psi = rfield(), rfield()
    p = Params(0.2, 0.1)
    v = fmu(derivative(psi), p, 2.0)
    up, um = riemann_map(zeta, v, p)
    back = reconstruct_c(up, um, p)
    assert back.chart is Chart.SURFACE_POTENTIAL and back.current == 0.0
    assert _err(back.a, zeta) <= 1e-12 and _err(back.b, psi) <= 1e-12


def test_reconstruct_one_sided(rfield):
    g = rfield()
    p = Params(0.2, 0.1)
    state = reconstruct_c(g, Field.zeros(g.grid), p)
    assert _err(state.a, g + 0.025 * g * g) <= 1e-14


def test_reconstruct_mean_handling(rfield):
    g = rfield() + 0.2
    p = Params(0.2, 0.1)
    with pytest.raises(NonZeroMean):
        reconstruct_c(g, Field.zeros(g.grid), p)
    state = reconstruct_c(g, Field.zeros(g.grid), p, allow_current=True)
    assert state.current == pytest.approx(0.2, abs=1e-12)


def test_riemann_cavitation(rfield):
    z = rfield(1.0)
    with pytest.raises(CavitationViolated):
        riemann_map(-2 * z, z, Params(0.2, 0.9))
    with pytest.raises(CavitationViolated):
        reconstruct_c(z * 0, 20 * z, Params(0.2, 0.9))


def test_diagonalisation_roundtrip(rfield):
    zeta, v = rfield(), rfield()
    p = Params(0.2, 0.1)
    z2, v2 = t_d(*t_d_inv(zeta, v, p), p)
    assert _err(z2, zeta) <= 1e-13 and _err(v2, v) <= 1e-12
    r, s = diag_forward(zeta, t_i(zeta, v).b, p)
    r2, s2 = t_d_inv(zeta, v, p)
    assert _err(r, r2) <= 1e-12 and _err(s, s2) <= 1e-12


def test_velocity_potential_roundtrip(rfield):
    zeta, v = rfield(), rfield()
    state = t_i(zeta, v + 0.3, allow_current=True)
    assert state.current == pytest.approx(0.3, abs=1e-13)
    z2, v2 = t_i_inv(state)
    assert z2 is zeta and _err(v2, v + 0.3) <= 1e-12
    with pytest.raises(NonZeroMean):
        t_i(zeta, v + 0.3)


def test_pipeline_variants_agree(rfield):
    r, s = rfield(), rfield()
    p = Params(0.2, 0.1)
    state = pipeline_wh(r, s, p)
    zeta, v = pipeline_velocity(r, s, p)
    z2, v2 = t_i_inv(state)
    assert _err(zeta, z2) == 0 and _err(v, v2) <= 1e-12


def test_initial_normal_form_inverts_pipeline(grid):
    zeta0 = bump(grid, 1.0, 3.0)
    psi0 = Field.zeros(grid)
    gaps = []
    for eps in (0.1, 0.05):
        p = Params(0.2, eps)
        r0, s0 = initial_normal_form(zeta0, psi0, p)
        zeta, _ = pipeline_velocity(r0, s0, p, strict=False)
        gaps.append(norm_l2(zeta - zeta0))
    assert gaps[0] / gaps[1] == pytest.approx(4, rel=0.15)
