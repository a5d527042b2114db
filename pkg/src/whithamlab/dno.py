"""Dirichlet-Neumann operator of the fluid domain ``-1 < z < eps*zeta(x)``.

``dno_apply`` returns ``(1/mu) G^mu[eps zeta] psi`` through the
Craig-Sulem Taylor expansion in the surface elevation.  Working in the
stretched variable ``X = x/sqrt(mu)`` the potential is a Laplace solution,
and the expansion is generated by the recursion

    q_0 = psi,        q_j = -sum_{n=1..j} eta^n/n! A_n q_{j-n}
    G_j = sum_{n=0..j} eta^n/n! A_{n+1} q_{j-n}
          - mu*eps*zeta_x * sum_{n=0..j-1} eta^n/n! d_x A_n q_{j-1-n}

with ``eta = eps*zeta`` and ``A_n`` the multiplier
``(sqrt(mu)|xi|)^n`` times ``tanh(sqrt(mu)|xi|)`` when ``n`` is odd
(``d_z^n`` of the flat-bottom harmonic extension at ``z = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import CavitationViolated, TruncationUnsupported
from .spectral import Field, Params, derivative, fmu, multiply_spectrum, pointwise_product

MAX_ORDER = 3


@dataclass(frozen=True)
class DnoConfig:
    """``truncation_order`` is the number of Taylor terms kept beyond the flat one."""

    truncation_order: int = 2
    dealias: bool = True

    def __post_init__(self):
        if self.truncation_order not in range(MAX_ORDER + 1):
            raise TruncationUnsupported(
                f"truncation order {self.truncation_order} not in 0..{MAX_ORDER}"
            )


def check_cavitation(zeta: Field, p: Params):
    h = 1.0 + p.eps * zeta.values
    hmin = float(h.min())
    if hmin < p.h_min:
        raise CavitationViolated(f"min(1 + eps*zeta) = {hmin:.4f} < h_min = {p.h_min}")


def _a_symbol(xi: np.ndarray, mu: float, n: int) -> np.ndarray:
    x = np.sqrt(mu) * np.abs(xi)
    out = x**n
    if n % 2:
        out = out * np.tanh(x)
    return out


def dno_apply(
    zeta: Field,
    psi: Field,
    p: Params,
    cfg: DnoConfig = DnoConfig(),
    current: float = 0.0,
) -> Field:
    """``(1/mu) G^mu[eps zeta] psi`` truncated after ``cfg.truncation_order`` terms.

    ``current`` is a uniform part of ``d_x psi`` that cannot be stored in a
    periodic ``psi`` (the potential ``c*x``); it contributes ``-eps*c*zeta_x``,
    entirely through the first-order term.
    """
    if cfg.truncation_order > MAX_ORDER:
        raise TruncationUnsupported(f"truncation order {cfg.truncation_order}")
    zeta._check(psi)
    check_cavitation(zeta, p)
    M = cfg.truncation_order
    psi = psi - psi.mean()
    mu, eps = p.mu, p.eps

    if mu == 0.0:
        # shallow limit: every term beyond first order is O(mu)
        psi_x = derivative(psi)
        flux = psi_x if M == 0 or eps == 0 else psi_x + eps * pointwise_product(zeta, psi_x, cfg.dealias)
        out = -derivative(flux)
    else:
        out = _craig_sulem(zeta, psi, mu, eps, M, cfg.dealias)

    if current and M >= 1 and eps:
        out = out - (eps * current) * derivative(zeta)
    spec = out.spectrum.copy()
    spec[0] = 0.0
    return Field.from_spectrum(zeta.grid, spec)


def _craig_sulem(zeta: Field, psi: Field, mu: float, eps: float, M: int, dealias: bool) -> Field:
    grid = zeta.grid
    xi = grid.rfreq
    symbols = {}

    def A(n: int, f: Field) -> Field:
        if n == 0:
            return f
        if n not in symbols:
            symbols[n] = _a_symbol(xi, mu, n)
        return multiply_spectrum(f, symbols[n])

    eta = eps * zeta
    # eta^n / n! as plain nodal fields
    powers = [None] + [Field(grid, eta.values**n / factorial(n)) for n in range(1, M + 1)]
    zeta_x = derivative(zeta)

    q = [psi]
    cache = {}

    def Aq(n: int, m: int) -> Field:
        key = (n, m)
        if key not in cache:
            cache[key] = A(n, q[m])
        return cache[key]

    for j in range(1, M + 1):
        acc = Field.zeros(grid)
        for n in range(1, j + 1):
            acc = acc + pointwise_product(powers[n], Aq(n, j - n), dealias)
        q.append(-acc)

    total = Field.zeros(grid)
    for j in range(M + 1):
        term = Aq(1, j)
        for n in range(1, j + 1):
            term = term + pointwise_product(powers[n], Aq(n + 1, j - n), dealias)
        if j >= 1:
            inner_sum = derivative(q[j - 1])
            for n in range(1, j):
                inner_sum = inner_sum + pointwise_product(powers[n], derivative(Aq(n, j - 1 - n)), dealias)
            term = term - mu * eps * pointwise_product(zeta_x, inner_sum, dealias)
        total = total + term
    return total / mu


def dno_flat(psi: Field, p: Params) -> Field:
    """Flat-surface operator ``-d_x F_mu^2 d_x psi``."""
    return -derivative(fmu(derivative(psi), p, 2.0))


def dno_shallow(zeta: Field, psi: Field, p: Params, dealias: bool = True) -> Field:
    """First-order surrogate ``-d_x (h F_mu^2 d_x psi)`` with ``h = 1 + eps*zeta``."""
    check_cavitation(zeta, p)
    w = fmu(derivative(psi), p, 2.0)
    flux = w + p.eps * pointwise_product(zeta, w, dealias) if p.eps else w
    return -derivative(flux)
