"""Hamiltonian functionals, Poisson tensors and normal-form diagnostics.

Functionals act on :class:`ModelState` values.  The water-wave energies
live in the surface-potential chart (``H0_eps_H1`` also accepts the
velocity chart), all the others in the diagonal chart ``(r, s)``:

    L = int r^2 + s^2,      Z = 1/2 int r^3 + s^3,
    W = -1/2 int r^2 s + r s^2,
    H_BW = L + eps Z + eps W,   H_Wh = L + eps Z,
    G = 1/4 int d^{-1}(r^2) s + d^{-1}(r) s^2.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Tuple

from .dno import DnoConfig, dno_apply
from .errors import ChartMismatch
from .models import water_waves_fields
from .spectral import Field, Params, anti_derivative, check_mean_zero, derivative, fmu, inner, integrate, norm_l2
from .state import Chart, ModelState, diagonal
from .transforms import t_b, t_b_jacobian, t_b_jacobian_adjoint

Pair = Tuple[Field, Field]


class FunctionalKind(enum.Enum):
    H_WW = "H_WW"
    H0_EPS_H1 = "H0_eps_H1"
    H_BW = "H_BW"
    H_WH = "H_Wh"
    L_QUAD = "L_quad"
    Z_CUBIC = "Z_cubic"
    W_COUPLING = "W_coupling"
    G_AUX = "G_aux"


_DIAGONAL_KINDS = {
    FunctionalKind.H_BW,
    FunctionalKind.H_WH,
    FunctionalKind.L_QUAD,
    FunctionalKind.Z_CUBIC,
    FunctionalKind.W_COUPLING,
    FunctionalKind.G_AUX,
}


@dataclass(frozen=True)
class Functional:
    kind: FunctionalKind
    params: Params
    dno_cfg: DnoConfig = DnoConfig()

    def __call__(self, state: ModelState) -> float:
        return evaluate(self, state)

    def gradient(self, state: ModelState) -> ModelState:
        return gradient(self, state)


def _charts(kind: FunctionalKind):
    if kind in _DIAGONAL_KINDS:
        return (Chart.DIAGONAL,)
    if kind is FunctionalKind.H0_EPS_H1:
        return (Chart.SURFACE_POTENTIAL, Chart.SURFACE_VELOCITY)
    return (Chart.SURFACE_POTENTIAL,)


def _check_chart(fn: Functional, state: ModelState):
    allowed = _charts(fn.kind)
    if not isinstance(state, ModelState) or state.chart not in allowed:
        got = state.chart.value if isinstance(state, ModelState) else type(state).__name__
        raise ChartMismatch(f"{fn.kind.value} expects {[c.value for c in allowed]}, got {got}")


def _velocity(state: ModelState) -> Field:
    if state.chart is Chart.SURFACE_VELOCITY:
        return state.b
    return derivative(state.b) + state.current


def evaluate(fn: Functional, state: ModelState) -> float:
    """Value of the functional by trapezoid quadrature."""
    _check_chart(fn, state)
    p, k = fn.params, fn.kind
    a, b = state
    eps = p.eps
    if k is FunctionalKind.H_WW:
        if state.current:
            raise ChartMismatch("H_WW is only defined for periodic potentials (zero current)")
        G = dno_apply(a, b, p, fn.dno_cfg)
        return 0.5 * inner(a, a) + 0.5 * inner(b, G)
    if k is FunctionalKind.H0_EPS_H1:
        w = fmu(_velocity(state), p)
        w2 = w * w
        return 0.5 * inner(a, a) + 0.5 * integrate(w2) + 0.5 * eps * inner(a, w2)
    if k is FunctionalKind.L_QUAD:
        return _L(a, b)
    if k is FunctionalKind.Z_CUBIC:
        return _Z(a, b)
    if k is FunctionalKind.W_COUPLING:
        return _W(a, b)
    if k is FunctionalKind.H_WH:
        return _L(a, b) + eps * _Z(a, b)
    if k is FunctionalKind.H_BW:
        return _L(a, b) + eps * (_Z(a, b) + _W(a, b))
    if k is FunctionalKind.G_AUX:
        check_mean_zero(a, "r")
        check_mean_zero(b, "s")
        r2 = a * a
        return 0.25 * (inner(anti_derivative(r2, project=True), b) + inner(anti_derivative(a), b * b))
    raise ValueError(k)


def _L(r, s):
    return inner(r, r) + inner(s, s)


def _Z(r, s):
    return 0.5 * (integrate(r * r * r) + integrate(s * s * s))


def _W(r, s):
    return -0.5 * (integrate(r * r * s) + integrate(r * s * s))


def gradient(fn: Functional, state: ModelState) -> ModelState:
    """L2 gradient, returned in the chart of ``state``."""
    _check_chart(fn, state)
    p, k = fn.params, fn.kind
    a, b = state
    eps = p.eps
    if k is FunctionalKind.H_WW:
        G, dpsi = water_waves_fields(a, b, p, fn.dno_cfg, state.current)
        return state.with_fields(-dpsi, G)
    if k is FunctionalKind.H0_EPS_H1:
        w = fmu(_velocity(state), p)
        ga = a + 0.5 * eps * (w * w)
        dv = fmu(w + eps * (a * w), p)
        gb = dv if state.chart is Chart.SURFACE_VELOCITY else -derivative(dv)
        return state.with_fields(ga, gb)
    r, s = a, b
    if k is FunctionalKind.L_QUAD:
        g = (2.0 * r, 2.0 * s)
    elif k is FunctionalKind.Z_CUBIC:
        g = (1.5 * (r * r), 1.5 * (s * s))
    elif k is FunctionalKind.W_COUPLING:
        g = _grad_w(r, s)
    elif k is FunctionalKind.H_WH:
        g = (2.0 * r + 1.5 * eps * (r * r), 2.0 * s + 1.5 * eps * (s * s))
    elif k is FunctionalKind.H_BW:
        rs = r * s
        g = (
            2.0 * r + 1.5 * eps * (r * r) - eps * rs - 0.5 * eps * (s * s),
            2.0 * s + 1.5 * eps * (s * s) - eps * rs - 0.5 * eps * (r * r),
        )
    elif k is FunctionalKind.G_AUX:
        ir = anti_derivative(r, project=True)
        is_ = anti_derivative(s, project=True)
        g = (
            -0.25 * (2.0 * (r * is_) + anti_derivative(s * s, project=True)),
            0.25 * (anti_derivative(r * r, project=True) + 2.0 * (s * ir)),
        )
    else:
        raise ValueError(k)
    return state.with_fields(*g)


def _grad_w(r, s):
    return -(r * s) - 0.5 * (s * s), -0.5 * (r * r) - r * s


# ---------------------------------------------------------------------------
# Poisson tensors


class TensorKind(enum.Enum):
    J_CANONICAL = "J_canonical"
    J_TILDE = "J_tilde"
    J_MU = "J_mu"
    J_SIMP = "J_simp"


@dataclass(frozen=True)
class PoissonTensor:
    kind: TensorKind
    params: Params = Params(0.0, 0.0)

    def __call__(self, cotangent):
        return apply_tensor(self, cotangent)


def apply_tensor(t: PoissonTensor, cotangent):
    """Apply ``t`` to a pair (or ModelState); the result has the same type."""
    a, b = cotangent
    k = t.kind
    if k is TensorKind.J_CANONICAL:
        out = (b, -a)
    elif k is TensorKind.J_TILDE:
        out = (-derivative(b), -derivative(a))
    elif k is TensorKind.J_MU:
        out = (-0.5 * fmu(derivative(a), t.params), 0.5 * fmu(derivative(b), t.params))
    elif k is TensorKind.J_SIMP:
        out = (-0.5 * derivative(a), 0.5 * derivative(b))
    else:
        raise ValueError(k)
    if isinstance(cotangent, ModelState):
        return cotangent.with_fields(*out)
    return out


def pair_inner(U, V) -> float:
    (a, b), (c, d) = U, V
    return inner(a, c) + inner(b, d)


def pair_norm(U) -> float:
    a, b = U
    return float((norm_l2(a) ** 2 + norm_l2(b) ** 2) ** 0.5)


def lie_bracket(f: Functional, g: Functional, state: ModelState, tensor: PoissonTensor) -> float:
    """``{f, g} = <grad f, T grad g>``."""
    return pair_inner(gradient(f, state), apply_tensor(tensor, gradient(g, state)))


# ---------------------------------------------------------------------------
# normal-form diagnostics


class HomologicalResidual(NamedTuple):
    residual: float
    mu_gap: float


def homological_residual(r: Field, s: Field, p: Params) -> HomologicalResidual:
    """``|{L, G}_simp + W|`` and the gap ``|{L, G}_mu - {L, G}_simp|``."""
    check_mean_zero(r, "r")
    check_mean_zero(s, "s")
    state = diagonal(r, s)
    L = Functional(FunctionalKind.L_QUAD, p)
    G = Functional(FunctionalKind.G_AUX, p)
    W = Functional(FunctionalKind.W_COUPLING, p)
    simp = lie_bracket(L, G, state, PoissonTensor(TensorKind.J_SIMP, p))
    full = lie_bracket(L, G, state, PoissonTensor(TensorKind.J_MU, p))
    return HomologicalResidual(abs(simp + evaluate(W, state)), abs(full - simp))


def normal_form_defect(r: Field, s: Field, p: Params, strict: bool = True) -> float:
    """``|H_BW(t_b(r, s)) - H_Wh(r, s)|``."""
    rc, sc = t_b(r, s, p, strict)
    hbw = evaluate(Functional(FunctionalKind.H_BW, p), diagonal(rc, sc))
    hwh = evaluate(Functional(FunctionalKind.H_WH, p), diagonal(r, s))
    return abs(hbw - hwh)


def structure_defect(r: Field, s: Field, U: Pair, p: Params, project_mean: bool = True) -> float:
    """``|| DT_B J_mu DT_B^* U - J_mu U ||`` at ``(r, s)``.

    On the torus ``d_x d^{-1} = Id - mean``, which leaves an O(eps) constant
    in the defect that has no counterpart on the line.  ``project_mean``
    measures the defect modulo constants.
    """
    check_mean_zero(r, "r")
    check_mean_zero(s, "s")
    J = PoissonTensor(TensorKind.J_MU, p)
    lhs = t_b_jacobian(r, s, apply_tensor(J, t_b_jacobian_adjoint(r, s, U, p)), p)
    rhs_ = apply_tensor(J, tuple(U))
    da, db = lhs[0] - rhs_[0], lhs[1] - rhs_[1]
    if project_mean:
        da, db = da - da.mean(), db - db.mean()
    return pair_norm((da, db))
