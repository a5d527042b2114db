"""Invariant suites: one verdict row per property, with a witness on failure.

Each check is a function ``(ctx) -> Check``.  The three suites group them
by module: ``dispersion_suite`` (symbols, linear speeds, integrator),
``transform_suite`` (charts and normal-form maps) and ``hamiltonian_suite``
(functionals, tensors, normal-form diagnostics).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .. import __version__
from ..dno import DnoConfig
from ..hamiltonians import (
    Functional,
    FunctionalKind,
    PoissonTensor,
    TensorKind,
    apply_tensor,
    evaluate,
    gradient,
    homological_residual,
    normal_form_defect,
    pair_inner,
    structure_defect,
)
from ..models import ModelKind, StepperConfig, evolve, rhs
from ..spectral import (
    Field,
    Params,
    PeriodicGrid,
    anti_derivative,
    derivative,
    fmu,
    fmu_symbol,
    inner,
    integrate,
    norm_l2,
    random_field,
)
from ..state import diagonal, surface_potential, surface_velocity
from ..transforms import (
    diag_forward,
    pipeline_wh,
    reconstruct_c,
    riemann_map,
    t_b,
    t_b_inv,
    t_d,
    t_i,
    t_i_inv,
)
from .config import ExperimentConfig, ExperimentKind, SUITES, default_config
from .report import Row, ScalingReport

Symbol = Callable[[np.ndarray, float], np.ndarray]


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    witness: str = ""
    mu: Optional[float] = None
    eps: Optional[float] = None


@dataclass
class Context:
    grid: PeriodicGrid
    params: Params
    rng: np.random.Generator
    symbol: Symbol = fmu_symbol

    def field(self, scale=0.5, k0=1.0) -> Field:
        return random_field(self.grid, self.rng, scale=scale, k0=k0)

    def bump(self, amp, width, shift=0.0, kind="hat") -> Field:
        y = (self.grid.nodes - self.grid.length / 2 - shift) / width
        if kind == "hat":
            return Field(self.grid, amp * (1 - 2 * y**2) * np.exp(-(y**2)))
        if kind == "odd":
            return Field(self.grid, amp * y * np.exp(-(y**2)))
        return Field(self.grid, amp * np.exp(-(y**2)))


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _maxdiff(f: Field, g: Field) -> float:
    return float(np.max(np.abs(f.values - g.values)))


# ---------------------------------------------------------------------------
# dispersion suite

SYMBOL_MUS = (0.01, 0.1, 1.0)


def check_fmu_bounds(ctx: Context) -> Check:
    """|F-1| <= 0.17 mu xi^2 and |F'| <= 0.5 mu |xi| on the grid lattice."""
    xi = ctx.grid.frequencies
    h = 1e-6
    worst, witness = -np.inf, ""
    for mu in SYMBOL_MUS:
        F = ctx.symbol(xi, mu)
        dF = (ctx.symbol(xi + h, mu) - ctx.symbol(xi - h, mu)) / (2 * h)
        ex1 = np.abs(F - 1.0) - 0.17 * mu * xi**2
        ex2 = np.abs(dF) - 0.5 * mu * np.abs(xi) - 1e-8
        for ex, what in ((ex1, "|F-1| <= 0.17 mu xi^2"), (ex2, "|F'| <= 0.5 mu |xi|")):
            i = int(np.argmax(ex))
            if ex[i] > worst:
                worst = float(ex[i])
                witness = f"{what} fails at mu={mu}, xi={xi[i]:.6g} (excess {ex[i]:.3e})"
    return Check("fmu_bounds", worst <= 0.0, worst, witness if worst > 0 else "")


def check_fmu_range(ctx: Context) -> Check:
    """0 < F <= 1, F even, F(0) = 1."""
    xi = ctx.grid.frequencies
    for mu in SYMBOL_MUS:
        F = ctx.symbol(xi, mu)
        bad = np.flatnonzero((F <= 0) | (F > 1 + 1e-15))
        if bad.size:
            i = bad[0]
            return Check("fmu_range", False, float(F[i]), f"F_mu({xi[i]:.6g}) = {F[i]:.6g} at mu={mu}")
        odd = float(np.max(np.abs(ctx.symbol(xi, mu) - ctx.symbol(-xi, mu))))
        if odd > 1e-15 or abs(ctx.symbol(np.array([0.0]), mu)[0] - 1) > 1e-15:
            return Check("fmu_range", False, odd, f"F_mu not even or F_mu(0) != 1 at mu={mu}")
    return Check("fmu_range", True, 0.0)


def _expected_speed(kind: ModelKind, xi, mu, symbol: Symbol):
    F = symbol(np.asarray(xi, float), mu)
    if kind is ModelKind.WHITHAM_LEFT:
        return -F
    if kind is ModelKind.KDV:
        return 1.0 - mu * xi**2 / 6.0
    return F


def _plane_wave(kind: ModelKind, grid: PeriodicGrid, k: int, speed: float):
    xi = 2 * np.pi * k / grid.length
    c = Field(grid, np.cos(xi * grid.nodes))
    s = Field(grid, np.sin(xi * grid.nodes))
    if kind.chart is None:
        return c
    if kind in (ModelKind.DIAGONALIZED, ModelKind.DECOUPLED_PAIR):
        return diagonal(c, Field.zeros(grid))
    if kind in (ModelKind.WHITHAM_BOUSSINESQ, ModelKind.WHITHAM_BOUSSINESQ_SMOOTHED):
        return surface_velocity(c, c * speed)
    # zeta = cos(xi x - w t), psi = sin(xi x - w t) / w
    return surface_potential(c, s * (1.0 / (xi * speed)))


PHASE_K = 8
PHASE_T = 1.0


def check_phase_speeds(ctx: Context) -> Check:
    """Linear (eps = 0) plane waves travel at the symbol's phase speed."""
    p = Params(ctx.params.mu, 0.0)
    grid = ctx.grid
    xi = 2 * np.pi * PHASE_K / grid.length
    worst, witness = 0.0, ""
    for kind in ModelKind:
        # measured on the true model, compared with the symbol under test
        true_speed = float(_expected_speed(kind, xi, p.mu, fmu_symbol))
        state = _plane_wave(kind, grid, PHASE_K, true_speed)
        tr = evolve(kind, state, p, StepperConfig(0.01, PHASE_T), keep_states=False)
        first = tr.final if kind.chart is None else tr.final.a
        z0 = (state if kind.chart is None else state.a).spectrum[PHASE_K]
        ratio = first.spectrum[PHASE_K] / z0
        measured = -np.angle(ratio) / (xi * PHASE_T)
        expected = float(_expected_speed(kind, xi, p.mu, ctx.symbol))
        err = abs(measured - expected)
        if err > worst:
            worst = err
            witness = f"{kind.value}: xi={xi:.6g}, mu={p.mu}, measured {measured:.12f}, expected {expected:.12f}"
    return Check("phase_speeds", worst <= 1e-8, worst, witness if worst > 1e-8 else "", p.mu, 0.0)


# divergence-form kinds; DiagonalizedSystem is not in conservation form
_MEAN_KINDS = (
    ModelKind.WHITHAM_RIGHT,
    ModelKind.WHITHAM_LEFT,
    ModelKind.KDV,
    ModelKind.DECOUPLED_PAIR,
    ModelKind.WHITHAM_BOUSSINESQ,
    ModelKind.WHITHAM_BOUSSINESQ_SMOOTHED,
    ModelKind.WATER_WAVES,
    ModelKind.HAMILTONIAN_WB,
)


def check_mean_conservation(ctx: Context) -> Check:
    """Spatial means of conservative components are constant to 1e-10 over t = 10."""
    p = ctx.params
    u = ctx.bump(1.0, 3.0, kind="gauss")
    w = ctx.bump(0.5, 2.0, shift=6.0, kind="gauss")
    worst, witness = 0.0, ""
    for kind in _MEAN_KINDS:
        if kind.chart is None:
            state = u
        elif kind in (ModelKind.WATER_WAVES, ModelKind.HAMILTONIAN_WB):
            state = surface_potential(u, w - w.mean())
        elif kind is ModelKind.DECOUPLED_PAIR:
            state = diagonal(u, w)
        else:
            state = surface_velocity(u, w)
        tr = evolve(kind, state, p, StepperConfig(0.05, 10.0), keep_states=False)
        comps = [(state, tr.final)] if kind.chart is None else [(state.a, tr.final.a)]
        if kind not in (ModelKind.WATER_WAVES, ModelKind.HAMILTONIAN_WB) and kind.chart is not None:
            comps.append((state.b, tr.final.b))
        for a, b in comps:
            d = abs(b.mean() - a.mean())
            if d > worst:
                worst, witness = d, f"{kind.value}: mean drift {d:.3e}"
    return Check("mean_conservation", worst <= 1e-10, worst, witness if worst > 1e-10 else "", p.mu, p.eps)


def _reflect(f: Field) -> Field:
    # x -> L - x about the domain centre, exact on the grid
    return Field(f.grid, np.roll(f.values[::-1], 1))


def check_reflection(ctx: Context) -> Check:
    """WhithamLeft(s0) equals -R(x -> -x) of WhithamRight(-s0(-x))."""
    p = ctx.params
    s0 = ctx.bump(1.0, 3.0, shift=2.0, kind="gauss")
    st = StepperConfig(0.05, 10.0)
    left = evolve(ModelKind.WHITHAM_LEFT, s0, p, st, keep_states=False).final
    right = evolve(ModelKind.WHITHAM_RIGHT, -_reflect(s0), p, st, keep_states=False).final
    err = _maxdiff(left, -_reflect(right))
    return Check("reflection_symmetry", err <= 1e-10, err, f"max gap {err:.3e}" if err > 1e-10 else "", p.mu, p.eps)


def check_ifrk4_linear(ctx: Context) -> Check:
    """One IFRK4 step of linear Whitham is exact on a single mode."""
    p = Params(ctx.params.mu, 0.0)
    g = ctx.grid
    xi = 2 * np.pi * PHASE_K / g.length
    u0 = Field(g, np.cos(xi * g.nodes))
    dt = 0.1
    c = float(fmu_symbol(np.array([xi]), p.mu)[0])
    u1 = evolve(ModelKind.WHITHAM_RIGHT, u0, p, StepperConfig(dt, dt), keep_states=False).final
    err = _maxdiff(u1, Field(g, np.cos(xi * (g.nodes - c * dt))))
    return Check("ifrk4_linear_exact", err <= 1e-12, err, f"one-step error {err:.3e}" if err > 1e-12 else "")


DRIFT_DTS = (0.2, 0.1, 0.05)


def check_energy_drift(ctx: Context) -> Check:
    """Drift of H_Wh along DecoupledWhithamPair converges like dt^4 (ratio 16 +- 3)."""
    p = ctx.params
    r = ctx.bump(1.0, 3.0)
    s = ctx.bump(0.8, 4.0, shift=10.0)
    H = Functional(FunctionalKind.H_WH, p)
    h0 = H(diagonal(r, s))
    drifts = []
    for dt in DRIFT_DTS:
        tr = evolve(ModelKind.DECOUPLED_PAIR, diagonal(r, s), p, StepperConfig(dt, 10.0, cfl_guard=1.0), keep_states=False)
        drifts.append(H(tr.final) - h0)
    ratio = drifts[-2] / drifts[-1]
    ok = 13.0 <= ratio <= 19.0
    return Check(
        "energy_drift_order",
        ok,
        float(ratio),
        "" if ok else f"drifts {['%.3e' % d for d in drifts]} at dt={DRIFT_DTS}",
        p.mu,
        p.eps,
    )


# ---------------------------------------------------------------------------
# transform suite

N_RANDOM_DINV = 100


def check_dinv_skew(ctx: Context) -> Check:
    worst = 0.0
    for _ in range(N_RANDOM_DINV):
        f, g = ctx.field(1.0), ctx.field(1.0)
        worst = max(worst, abs(inner(anti_derivative(f), g) + inner(f, anti_derivative(g))))
    return Check("dinv_skew_adjoint", worst <= 1e-12, worst, f"|<d^-1 f, g> + <f, d^-1 g>| = {worst:.3e}" if worst > 1e-12 else "")


def check_dinv_identity(ctx: Context) -> Check:
    worst = 0.0
    for _ in range(N_RANDOM_DINV):
        f = ctx.field(1.0)
        worst = max(worst, _maxdiff(derivative(anti_derivative(f)), f))
    return Check("dinv_identity", worst <= 1e-10, worst, f"|d d^-1 f - f| = {worst:.3e}" if worst > 1e-10 else "")


def check_riemann_roundtrip(ctx: Context) -> Check:
    p = Params(0.2, 0.1)
    zeta, v = ctx.field(0.5), ctx.field(0.5)
    up, um = riemann_map(zeta, fmu(v, p, 2.0), p)
    back = reconstruct_c(up, um, p)
    err = max(_maxdiff(back.a, zeta), _maxdiff(derivative(back.b), v))
    return Check("riemann_roundtrip", err <= 1e-10, err, f"round trip error {err:.3e}" if err > 1e-10 else "", p.mu, p.eps)


def check_diag_roundtrip(ctx: Context) -> Check:
    p = ctx.params
    zeta, psi = ctx.field(0.5), ctx.field(0.5)
    z, v = t_d(*diag_forward(zeta, psi, p), p)
    err = max(_maxdiff(z, zeta), _maxdiff(v, derivative(psi)))
    return Check("diag_roundtrip", err <= 1e-10, err, f"round trip error {err:.3e}" if err > 1e-10 else "", p.mu, p.eps)


def check_t_b_quadratic(ctx: Context) -> Check:
    p = ctx.params
    r, s = ctx.field(0.5), ctx.field(0.5)
    a1, b1 = t_b(r, s, p)
    a2, b2 = t_b(0.5 * r, 0.5 * s, p)
    n1 = (a1 - r, b1 - s)
    n2 = (a2 - 0.5 * r, b2 - 0.5 * s)
    err = max(_maxdiff(n1[0], 4 * n2[0]), _maxdiff(n1[1], 4 * n2[1]))
    return Check("t_b_quadratic", err <= 1e-12, err, f"lambda^2 scaling gap {err:.3e}" if err > 1e-12 else "", p.mu, p.eps)


T_B_INV_EPS = (0.2, 0.1, 0.05)


def check_t_b_inv_ratio(ctx: Context) -> Check:
    """|t_b(t_b_inv(U)) - U| drops by 4 +- 0.5 when eps halves."""
    eta = ctx.bump(0.5, 2.0)
    w = ctx.bump(0.4, 3.0, shift=4.0)
    dev = []
    for eps in T_B_INV_EPS:
        p = ctx.params.with_(eps=eps)
        a, b = t_b(*t_b_inv(eta, w, p), p, strict=False)
        dev.append(float(np.hypot(norm_l2(a - eta), norm_l2(b - w))))
    ratios = [dev[i] / dev[i + 1] for i in range(len(dev) - 1)]
    ok = all(3.5 <= q <= 4.5 for q in ratios)
    return Check("t_b_inv_ratio", ok, min(ratios), "" if ok else f"ratios {ratios} at eps={T_B_INV_EPS}")


def check_pipeline_composition(ctx: Context) -> Check:
    p = ctx.params
    r, s = ctx.field(0.5), ctx.field(0.5)
    out = pipeline_wh(r, s, p)
    rc, sc = t_b(r, s, p)
    z, v = t_d(rc, sc, p)
    manual = t_i(z, v, allow_current=True)
    err = max(_maxdiff(out.a, manual.a), _maxdiff(out.b, manual.b), abs(out.current - manual.current))
    return Check("pipeline_composition", err <= 1e-12, err, f"gap {err:.3e}" if err > 1e-12 else "", p.mu, p.eps)


def check_t_d_hamiltonian(ctx: Context) -> Check:
    """(H0 + eps H1)(t_d(r, s)) = H_BW(r, s)."""
    p = ctx.params
    r, s = ctx.field(0.5), ctx.field(0.5)
    z, v = t_d(r, s, p)
    lhs = evaluate(Functional(FunctionalKind.H0_EPS_H1, p), surface_velocity(z, v))
    rhs_ = evaluate(Functional(FunctionalKind.H_BW, p), diagonal(r, s))
    err = abs(lhs - rhs_)
    return Check("t_d_hamiltonian", err <= 1e-10, err, f"gap {err:.3e}" if err > 1e-10 else "", p.mu, p.eps)


def check_cancellation(ctx: Context) -> Check:
    """int r r_x d^-1(s) = -1/2 int r^2 s on mean-zero fields."""
    r, s = ctx.field(0.5), ctx.field(0.5)
    err = abs(integrate(r * derivative(r) * anti_derivative(s)) + 0.5 * integrate(r * r * s))
    return Check("cancellation_identity", err <= 1e-12, err, f"gap {err:.3e}" if err > 1e-12 else "")


# ---------------------------------------------------------------------------
# hamiltonian suite

N_DIRECTIONS = 20
FD_STEP = 1e-5


def _gradient_state(kind: FunctionalKind, ctx: Context):
    # H_WW goes through the truncated DNO; its closed-form gradient differs
    # from the derivative of the truncated value at O(eps^(M+1)), which stays
    # far below tolerance only for long waves
    k0 = 0.5 if kind is FunctionalKind.H_WW else 1.0
    a, b = ctx.field(0.5, k0), ctx.field(0.5, k0)
    if kind is FunctionalKind.H_WW:
        return surface_potential(a, b)
    if kind is FunctionalKind.H0_EPS_H1:
        return surface_velocity(a, b)
    return diagonal(a, b)


def check_gradient(kind: FunctionalKind):
    def check(ctx: Context) -> Check:
        p = Params(0.1, 0.05) if kind is FunctionalKind.H_WW else ctx.params
        fn = Functional(kind, p, DnoConfig(2))
        state = _gradient_state(kind, ctx)
        g = gradient(fn, state)
        worst, witness = 0.0, ""
        k0 = 0.5 if kind is FunctionalKind.H_WW else 1.0
        for j in range(N_DIRECTIONS):
            d = (ctx.field(1.0, k0), ctx.field(1.0, k0))
            plus = state.with_fields(state.a + FD_STEP * d[0], state.b + FD_STEP * d[1])
            minus = state.with_fields(state.a - FD_STEP * d[0], state.b - FD_STEP * d[1])
            fd = (fn(plus) - fn(minus)) / (2 * FD_STEP)
            an = pair_inner(g, d)
            e = _rel(an, fd)
            if e > worst:
                worst, witness = e, f"direction {j}: analytic {an:.12e}, finite difference {fd:.12e}"
        return Check(f"gradient_{kind.value}", worst <= 1e-6, worst, witness if worst > 1e-6 else "", p.mu, p.eps)

    check.__name__ = f"check_gradient_{kind.value}"
    return check


N_HOMOLOGICAL = 50


def check_homological(ctx: Context) -> Check:
    worst, witness = 0.0, ""
    for j in range(N_HOMOLOGICAL):
        scale = 0.25 + 0.75 * ctx.rng.random()
        r, s = ctx.field(scale), ctx.field(scale)
        res = homological_residual(r, s, ctx.params).residual
        bound = 1e-10 * (1 + norm_l2(r) ** 3 + norm_l2(s) ** 3)
        if res / bound > worst:
            worst, witness = res / bound, f"pair {j}: residual {res:.3e}, bound {bound:.3e}"
    return Check("homological_identity", worst <= 1.0, worst, witness if worst > 1 else "", ctx.params.mu, ctx.params.eps)


MU_GAP = (0.2, 0.1, 0.05)


def check_mu_gap(ctx: Context) -> Check:
    r, s = ctx.field(0.5), ctx.field(0.5)
    gaps = [homological_residual(r, s, ctx.params.with_(mu=mu)).mu_gap for mu in MU_GAP]
    ratios = [gaps[i + 1] / gaps[i] for i in range(len(gaps) - 1)]
    ok = all(0.35 <= q <= 0.65 for q in ratios)
    worst = max(ratios, key=lambda q: abs(q - 0.5))
    return Check("mu_gap_ratio", ok, worst, "" if ok else f"ratios {ratios} at mu={MU_GAP}")


NF_EPS = (0.2, 0.1, 0.05)
NF_AMPLITUDE = 0.25


def normal_form_fields(ctx: Context):
    """Fixed smooth mean-zero test pair for the normal-form defect."""
    return ctx.bump(NF_AMPLITUDE, 2.0), ctx.bump(0.8 * NF_AMPLITUDE, 3.0, shift=4.0)


def check_normal_form(ctx: Context) -> Check:
    """defect/eps^2 varies by at most 5% over eps in {0.2, 0.1, 0.05}."""
    r, s = normal_form_fields(ctx)
    scaled = [normal_form_defect(r, s, ctx.params.with_(eps=e)) / e**2 for e in NF_EPS]
    spread = (max(scaled) - min(scaled)) / max(scaled)
    ok = spread <= 0.05
    return Check("normal_form_defect", ok, spread, "" if ok else f"defect/eps^2 = {scaled} at eps={NF_EPS}")


def check_normal_form_mu(ctx: Context) -> Check:
    r, s = normal_form_fields(ctx)
    vals = [normal_form_defect(r, s, ctx.params.with_(mu=mu)) for mu in (0.0, 0.1, 1.0)]
    err = max(vals) - min(vals)
    return Check("normal_form_mu_independent", err <= 1e-12, err, f"defects {vals}" if err > 1e-12 else "")


SD_EPS = (0.2, 0.1, 0.05)
N_STRUCTURE_PAIRS = 10


def structure_test_pairs(ctx: Context):
    """Smooth localized test pairs ``U``; widths between 3 and 5."""
    out = []
    for j in range(N_STRUCTURE_PAIRS):
        w = 3.0 + 2.0 * j / max(N_STRUCTURE_PAIRS - 1, 1)
        shift = ctx.rng.uniform(-4.0, 4.0)
        out.append((ctx.bump(1.0, w, shift - w, kind="odd"), ctx.bump(1.0, 1.25 * w, shift + w / 2)))
    return out


def check_structure(ctx: Context) -> Check:
    """Fitted total order of the structure defect along mu = eps is >= 1.8."""
    r = ctx.bump(0.5, 3.0)
    s = ctx.bump(0.4, 4.5, shift=6.0)
    worst, witness = np.inf, ""
    for j, U in enumerate(structure_test_pairs(ctx)):
        d = [structure_defect(r, s, U, Params(e, e)) for e in SD_EPS]
        order = float(np.polyfit(np.log(SD_EPS), np.log(d), 1)[0])
        if order < worst:
            worst, witness = order, f"test pair {j}: defects {d}"
    return Check("structure_defect_order", worst >= 1.8, worst, witness if worst < 1.8 else "")


def check_tensors(ctx: Context) -> Check:
    U = (ctx.field(), ctx.field())
    V = (ctx.field(), ctx.field())
    worst, witness = 0.0, ""
    for k in TensorKind:
        t = PoissonTensor(k, ctx.params)
        e = abs(pair_inner(U, apply_tensor(t, V)) + pair_inner(apply_tensor(t, U), V))
        if e > worst:
            worst, witness = e, k.value
    return Check("tensor_skew_adjoint", worst <= 1e-12, worst, witness if worst > 1e-12 else "")


def check_hamilton_equations(ctx: Context) -> Check:
    """rhs(DecoupledWhithamPair) = J_mu grad H_Wh nodewise (no dealiasing)."""
    p = ctx.params
    # well-resolved fields, so r r_x and d_x(r^2)/2 agree spectrally
    state = diagonal(ctx.field(0.5, 0.5), ctx.field(0.5, 0.5))
    a, b = rhs(ModelKind.DECOUPLED_PAIR, state, p, DnoConfig(2, dealias=False))
    c, d = apply_tensor(PoissonTensor(TensorKind.J_MU, p), gradient(Functional(FunctionalKind.H_WH, p), state))
    err = max(_maxdiff(a, c), _maxdiff(b, d))
    return Check("hamilton_equations", err <= 1e-12, err, f"gap {err:.3e}" if err > 1e-12 else "", p.mu, p.eps)


# ---------------------------------------------------------------------------

SUITE_CHECKS: Dict[ExperimentKind, List[Callable[[Context], Check]]] = {
    ExperimentKind.DISPERSION_SUITE: [
        check_fmu_bounds,
        check_fmu_range,
        check_phase_speeds,
        check_ifrk4_linear,
        check_mean_conservation,
        check_reflection,
        check_energy_drift,
    ],
    ExperimentKind.TRANSFORM_SUITE: [
        check_dinv_skew,
        check_dinv_identity,
        check_riemann_roundtrip,
        check_diag_roundtrip,
        check_t_b_quadratic,
        check_t_b_inv_ratio,
        check_pipeline_composition,
        check_t_d_hamiltonian,
        check_cancellation,
    ],
    ExperimentKind.HAMILTONIAN_SUITE: [check_gradient(k) for k in FunctionalKind]
    + [
        check_homological,
        check_mu_gap,
        check_normal_form,
        check_normal_form_mu,
        check_structure,
        check_tensors,
        check_hamilton_equations,
    ],
}


def make_context(cfg: ExperimentConfig, symbol: Symbol = fmu_symbol, seed: Optional[int] = None) -> Context:
    p = cfg.params()[0] if cfg.params_grid else Params(0.1, 0.1)
    rng = np.random.default_rng(cfg.seeds if seed is None else seed)
    return Context(cfg.grid.build(), p, rng, symbol)


def run_suite(cfg: ExperimentConfig, symbol: Symbol = fmu_symbol) -> ScalingReport:
    """Run the suite named by ``cfg.experiment``; ``symbol`` allows fault injection."""
    kind = cfg.experiment
    if not kind.is_suite:
        raise ValueError(f"{kind.value} is not a suite")
    ctx = make_context(cfg, symbol)
    rid = f"{kind.value};{cfg.grid.build().describe()};seed{cfg.seeds};v{__version__}"
    report = ScalingReport(kind.value, provenance={"version": __version__, "seed": str(cfg.seeds)})
    for fn in SUITE_CHECKS[kind]:
        c = fn(ctx)
        report.add(Row(kind.value, rid, c.mu, c.eps, None, c.name, float(c.value)))
        report.verdicts[c.name] = bool(c.passed)
        if not c.passed:
            report.witnesses[c.name] = c.witness
    return report


def run_suites(cfg: Optional[ExperimentConfig] = None, symbol: Symbol = fmu_symbol) -> ScalingReport:
    """Run one suite (``cfg`` names it) or, with ``cfg=None``, all three."""
    if cfg is not None:
        return run_suite(cfg, symbol)
    report = None
    for kind in SUITES:
        r = run_suite(default_config(kind), symbol)
        report = r if report is None else report.merge(r)
    report.experiment = "suites"
    return report
