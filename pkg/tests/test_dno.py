import numpy as np
import pytest

from oracles import laplace_dno
from whithamlab.dno import DnoConfig, dno_apply, dno_flat, dno_shallow
from whithamlab.errors import CavitationViolated, TruncationUnsupported
from whithamlab.spectral import Field, Params, PeriodicGrid, derivative, inner, norm_l2


@pytest.fixture
def torus():
    return PeriodicGrid(32, 2 * np.pi)


def test_flat_symbol(rfield):
    psi = rfield()
    p = Params(0.3, 0.1)
    out = dno_apply(Field.zeros(psi.grid), psi, p)
    xi = psi.grid.rfreq
    expected = xi * np.tanh(np.sqrt(p.mu) * xi) / np.sqrt(p.mu) * psi.spectrum
    expected[0] = 0
    assert np.allclose(out.spectrum, expected, atol=1e-12 * np.abs(expected).max())
    assert np.allclose(out.values, dno_flat(psi, p).values, atol=1e-12)


def test_shallow_limit(rfield):
    psi = rfield()
    lap = -derivative(psi, 2)
    errs = []
    for mu in (1e-2, 5e-3):
        out = dno_apply(Field.zeros(psi.grid), psi, Params(mu, 0.0))
        errs.append(np.max(np.abs(out.values - lap.values)))
    assert errs[1] < 0.6 * errs[0]  # O(mu)
    assert np.allclose(dno_apply(Field.zeros(psi.grid), psi, Params(0.0, 0.0)).values, lap.values, atol=1e-12)


def _first_order_oracle(zeta, psi, length, mu, e=1e-2):
    # d/d eps of the exact operator at eps = 0, fourth-order central difference
    G = lambda eps: laplace_dno(zeta, psi, length, mu, eps, n_sigma=16)
    return (8 * (G(e) - G(-e)) - (G(2 * e) - G(-2 * e))) / (12 * e)


def test_first_order_term_against_laplace_oracle(torus):
    x = torus.nodes
    zeta, psi = Field(torus, np.cos(x)), Field(torus, np.cos(2 * x))
    mu, eps = 0.5, 0.1
    cfg = DnoConfig(1, dealias=False)
    g1 = (dno_apply(zeta, psi, Params(mu, eps), cfg) - dno_apply(zeta, psi, Params(mu, eps), DnoConfig(0))) / eps
    ref = _first_order_oracle(zeta.values, psi.values, torus.length, mu)
    assert np.max(np.abs(g1.values - ref)) <= 1e-6 * np.max(np.abs(ref))


def test_truncation_converges_to_laplace_oracle(torus):
    x = torus.nodes
    zeta = Field(torus, np.cos(x) + 0.5 * np.sin(2 * x))
    psi = Field(torus, np.sin(x) + 0.3 * np.cos(3 * x))
    mu = 0.5
    errs = []
    for eps in (0.1, 0.05):
        ref = laplace_dno(zeta.values, psi.values, torus.length, mu, eps, n_sigma=24)
        out = dno_apply(zeta, psi, Params(mu, eps), DnoConfig(3, dealias=False))
        errs.append(np.max(np.abs(out.values - ref)))
    assert errs[0] < 1e-4
    # remainder after three terms is O(eps^4)
    assert errs[0] / errs[1] > 12


def test_mean_zero_and_gauge(rfield):
    zeta, psi = rfield(), rfield()
    p = Params(0.2, 0.1)
    out = dno_apply(zeta, psi, p)
    assert abs(out.mean()) <= 1e-10
    shifted = dno_apply(zeta, psi + 3.0, p)
    assert np.allclose(out.values, shifted.values, atol=1e-13)


def test_linearity(rfield):
    zeta, a, b = rfield(), rfield(), rfield()
    p = Params(0.2, 0.1)
    lhs = dno_apply(zeta, 2 * a - b, p)
    rhs = 2 * dno_apply(zeta, a, p) - dno_apply(zeta, b, p)
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-12


@pytest.mark.parametrize("order", [0, 1, 2])
def test_self_adjoint(rfield, order):
    zeta, a, b = rfield(0.5, 0.5), rfield(0.5, 0.5), rfield(0.5, 0.5)
    p = Params(0.2, 0.1)
    cfg = DnoConfig(order)
    gap = inner(a, dno_apply(zeta, b, p, cfg)) - inner(dno_apply(zeta, a, p, cfg), b)
    assert abs(gap) <= 1e-8


def test_positivity(grid, rng):
    from whithamlab.spectral import random_field

    p = Params(0.3, 0.1)
    for _ in range(10):
        zeta = random_field(grid, rng, scale=1.0)
        psi = random_field(grid, rng, scale=1.0)
        assert inner(psi, dno_apply(zeta, psi, p)) >= 0


def test_order_ratios(rfield):
    zeta, psi = rfield(0.5, 0.5), rfield(0.5, 0.5)
    for M in (1, 2, 3):
        d = []
        for eps in (0.1, 0.05):
            p = Params(0.3, eps)
            d.append(norm_l2(dno_apply(zeta, psi, p, DnoConfig(M)) - dno_apply(zeta, psi, p, DnoConfig(M - 1))))
        assert d[0] / d[1] == pytest.approx(2**M, rel=0.2)


def test_current_term(rfield):
    zeta, psi = rfield(), rfield()
    p = Params(0.2, 0.1)
    c = 0.3
    base = dno_apply(zeta, psi, p)
    with_c = dno_apply(zeta, psi, p, current=c)
    assert np.allclose((with_c - base).values, (-p.eps * c * derivative(zeta)).values, atol=1e-13)
    # mu = 0: -(1 + eps zeta) times the uniform slope, differentiated
    p0 = Params(0.0, 0.1)
    d = dno_apply(zeta, psi, p0, current=c) - dno_apply(zeta, psi, p0)
    assert np.allclose(d.values, (-p0.eps * c * derivative(zeta)).values, atol=1e-13)


def test_errors(rfield):
    zeta, psi = rfield(1.0), rfield()
    with pytest.raises(CavitationViolated):
        dno_apply(zeta * 20.0, psi, Params(0.1, 0.5))
    with pytest.raises(TruncationUnsupported):
        DnoConfig(4)


def test_dno_shallow_examples(rfield):
    zeta, psi = rfield(), rfield()
    p = Params(0.2, 0.1)
    flat = dno_apply(Field.zeros(zeta.grid), psi, p)
    assert np.allclose(dno_shallow(Field.zeros(zeta.grid), psi, p).values, flat.values, atol=1e-12)
    assert np.allclose(dno_shallow(zeta, psi, p.with_(eps=0.0)).values, flat.values, atol=1e-12)


def test_dno_shallow_consistency(grid):
    from conftest import bump

    zeta, psi = bump(grid, 1.0, 3.0), bump(grid, 1.0, 4.0, shift=2.0)
    ratios = []
    for e in (0.1, 0.05, 0.025):
        p = Params(e, e)
        gap = norm_l2(dno_apply(zeta, psi, p) - dno_shallow(zeta, psi, p))
        ratios.append(gap / (p.mu * p.eps))
    # bounded: the normalised gap does not grow as (mu, eps) -> 0
    assert max(ratios) <= 1.5 * ratios[0]
