"""Changes of variables between the water-wave charts.

* ``riemann_map`` / ``reconstruct_c``: surface-velocity chart <-> Riemann
  variables ``u+-``.
* ``diag_forward``, ``t_d``, ``t_d_inv``: the linear diagonalisation
  ``(zeta, d_x psi) <-> (r, s)``.
* ``t_b``, ``t_b_inv``: the quadratic near-identity map ``Id + eps*T~`` that
  puts the cubic Hamiltonian in normal form, and its first-order inverse.
* ``t_i``, ``t_i_inv``: velocity <-> potential.

All algebra is nodewise (no dealiasing) so that the polynomial identities
between these maps hold to rounding.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

from .dno import check_cavitation
from .errors import CavitationViolated
from .spectral import Field, Params, anti_derivative, check_mean_zero, derivative, fmu
from .state import Chart, ModelState, surface_potential

Pair = Tuple[Field, Field]

__all__ = [
    "Chart",
    "riemann_map",
    "reconstruct_c",
    "diag_forward",
    "t_d",
    "t_d_inv",
    "t_b",
    "t_b_tilde",
    "t_b_inv",
    "t_b_jacobian",
    "t_b_jacobian_adjoint",
    "t_i",
    "t_i_inv",
    "pipeline_wh",
    "pipeline_velocity",
    "initial_normal_form",
]


def riemann_map(zeta: Field, v: Field, p: Params) -> Pair:
    """``u+- = +-(sqrt(h)-1)/eps + F_mu^{-1} v / 2`` with ``h = 1 + eps*zeta``.

    ``v`` is the weighted velocity ``F_mu^2 d_x psi``.  The first term is
    evaluated as ``zeta/(1+sqrt(h))``.
    """
    check_cavitation(zeta, p)
    h = 1.0 + p.eps * zeta.values
    d = Field(zeta.grid, zeta.values / (1.0 + np.sqrt(h)))
    half = 0.5 * fmu(v, p, -1.0)
    return half + d, half - d


def _primitive(v: Field, allow_current: bool) -> Tuple[Field, float]:
    if allow_current:
        c = v.mean()
        return anti_derivative(v - c), c
    return anti_derivative(v), 0.0


def reconstruct_c(u_plus: Field, u_minus: Field, p: Params, allow_current: bool = False) -> ModelState:
    """Surface elevation and potential from Riemann variables.

    ``zeta = d + eps*d^2/4`` with ``d = u+ - u-`` and
    ``psi = d_x^{-1} F_mu^{-1}[u+ + u-]``.  When ``u+ + u-`` has a mean the
    call fails unless ``allow_current``, in which case the mean is returned as
    the uniform current of the state.
    """
    d = u_plus - u_minus
    floor = np.sqrt(p.h_min)
    lo = float(np.min(0.5 * p.eps * d.values + 1.0))
    if lo < floor:
        raise CavitationViolated(f"eps*(u+ - u-)/2 + 1 = {lo:.4f} < sqrt(h_min) = {floor:.4f}")
    zeta = d + (0.25 * p.eps) * d * d
    psi, c = _primitive(fmu(u_plus + u_minus, p, -1.0), allow_current)
    return surface_potential(zeta, psi, c)


def diag_forward(zeta: Field, psi: Field, p: Params, current: float = 0.0) -> Pair:
    """``r, s = (zeta +- F_mu[d_x psi]) / 2``."""
    w = fmu(derivative(psi) + current, p)
    return 0.5 * (zeta + w), 0.5 * (zeta - w)


def t_d(r: Field, s: Field, p: Params) -> Pair:
    """``(r + s, F_mu^{-1}[r - s])``; the second slot is ``d_x psi``."""
    return r + s, fmu(r - s, p, -1.0)


def t_d_inv(zeta: Field, v: Field, p: Params) -> Pair:
    w = fmu(v, p)
    return 0.5 * (zeta + w), 0.5 * (zeta - w)


def _dinv(f: Field, strict: bool, what: str) -> Field:
    if strict:
        check_mean_zero(f, what)
    return anti_derivative(f, project=True)


def t_b_tilde(r: Field, s: Field, strict: bool = True) -> Pair:
    """Quadratic part ``T~`` of ``t_b = Id + eps*T~``."""
    ir = _dinv(r, strict, "r")
    is_ = _dinv(s, strict, "s")
    rs = r * s
    a = 0.25 * (derivative(r) * is_) + 0.25 * rs + 0.125 * (s * s)
    b = 0.25 * (derivative(s) * ir) + 0.25 * rs + 0.125 * (r * r)
    return a, b


def t_b(r: Field, s: Field, p: Params, strict: bool = True) -> Pair:
    """Normal-form map.

    ``strict`` enforces mean-zero inputs.  With ``strict=False`` the primitive
    is applied to the mean-free part, the periodic realisation used for the
    slightly non-mean-zero data produced by :func:`t_b_inv`.
    """
    if p.eps == 0.0:
        if strict:
            check_mean_zero(r, "r")
            check_mean_zero(s, "s")
        return r, s
    a, b = t_b_tilde(r, s, strict)
    return r + p.eps * a, s + p.eps * b


def t_b_inv(eta: Field, w: Field, p: Params, strict: bool = True) -> Pair:
    """First-order inverse ``Id - eps*T~``."""
    if p.eps == 0.0:
        if strict:
            check_mean_zero(eta, "eta")
            check_mean_zero(w, "w")
        return eta, w
    a, b = t_b_tilde(eta, w, strict)
    return eta - p.eps * a, w - p.eps * b


def t_b_jacobian(r: Field, s: Field, V: Pair, p: Params) -> Pair:
    """Derivative of ``t_b`` at ``(r, s)`` applied to the direction ``V``."""
    a, b = V
    q = 0.25 * p.eps
    ir = anti_derivative(r, project=True)
    is_ = anti_derivative(s, project=True)
    ia = anti_derivative(a, project=True)
    ib = anti_derivative(b, project=True)
    rps = r + s
    out_a = a + q * (s * a + is_ * derivative(a) + derivative(r) * ib + rps * b)
    out_b = b + q * (derivative(s) * ia + rps * a + r * b + ir * derivative(b))
    return out_a, out_b


def t_b_jacobian_adjoint(r: Field, s: Field, U: Pair, p: Params) -> Pair:
    """L2-adjoint of :func:`t_b_jacobian`."""
    c, d = U
    q = 0.25 * p.eps
    ir = anti_derivative(r, project=True)
    is_ = anti_derivative(s, project=True)
    rps = r + s
    out_a = c + q * (s * c - derivative(is_ * c) + rps * d - anti_derivative(derivative(s) * d, project=True))
    out_b = d + q * (rps * c - anti_derivative(derivative(r) * c, project=True) + r * d - derivative(ir * d))
    return out_a, out_b


def t_i(zeta: Field, v: Field, allow_current: bool = False) -> ModelState:
    """``(zeta, v) -> (zeta, psi)`` with ``psi`` the mean-zero primitive of ``v``.

    A non-negligible mean of ``v`` raises unless ``allow_current``; then the
    mean becomes the state's uniform current.
    """
    psi, c = _primitive(v, allow_current)
    return surface_potential(zeta, psi, c)


def t_i_inv(state: ModelState) -> Pair:
    """``(zeta, psi) -> (zeta, d_x psi)``, including the uniform current."""
    state.expect(Chart.SURFACE_POTENTIAL)
    return state.a, derivative(state.b) + state.current


def pipeline_wh(r: Field, s: Field, p: Params, strict: bool = True) -> ModelState:
    """``t_i(t_d(t_b(r, s)))``: surface variables from normal-form variables.

    The mean of the resulting velocity (of order eps) is carried as the
    state's uniform current rather than rejected.
    """
    rc, sc = t_b(r, s, p, strict)
    zeta, v = t_d(rc, sc, p)
    return t_i(zeta, v, allow_current=True)


def pipeline_velocity(r: Field, s: Field, p: Params, strict: bool = True) -> Pair:
    """``t_d(t_b(r, s))``, i.e. the pipeline stopped in the velocity chart."""
    return t_d(*t_b(r, s, p, strict), p)


def initial_normal_form(zeta0: Field, psi0: Field, p: Params, current: float = 0.0) -> Pair:
    """``(r0, s0) = t_b_inv(t_d_inv(t_i_inv(zeta0, psi0)))``.

    The outputs carry means of order eps, so the inverse map is applied in its
    projected form.
    """
    zeta, v = t_i_inv(surface_potential(zeta0, psi0, current))
    return t_b_inv(*t_d_inv(zeta, v, p), p, strict=False)
