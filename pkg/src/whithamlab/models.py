"""Evolution systems and their time integration.

Every model is written as ``d_t U = rhs(U)``.  For the kinds whose
linear part is a diagonal Fourier multiplier (the Whitham family, the
diagonalized system and KdV) the right-hand side is split into
``Lambda U + N(U)`` and integrated with an integrating-factor RK4 that
propagates the dispersive part exactly.  The coupled systems use classic RK4.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Union

import numpy as np

from .dno import DnoConfig, check_cavitation, dno_apply
from .errors import CflViolated, ChartMismatch, NonFinite
from .spectral import Field, Params, dealias as truncate, derivative, fmu, fmu_symbol, pointwise_product
from .state import Chart, ModelState

State = Union[Field, ModelState]

BLOWUP = 1e6


class ModelKind(enum.Enum):
    """Evolution systems.

    The two left-going equations use different sign conventions.
    ``WhithamLeft`` evolves the Riemann variable ``u-`` of the diagonalized
    system, ``u_t - F u_x + (3 eps/2) u u_x = 0``.  The second component of
    ``DecoupledWhithamPair`` follows the normal-form convention,
    ``s_t - F s_x - (3 eps/2) F[s s_x] = 0``, so ``-u-`` is its counterpart.
    """

    WATER_WAVES = "WaterWaves"
    WHITHAM_BOUSSINESQ = "WhithamBoussinesq"
    WHITHAM_BOUSSINESQ_SMOOTHED = "WhithamBoussinesqSmoothed"
    HAMILTONIAN_WB = "HamiltonianWB"
    DIAGONALIZED = "DiagonalizedSystem"
    WHITHAM_RIGHT = "WhithamRight"
    WHITHAM_LEFT = "WhithamLeft"
    DECOUPLED_PAIR = "DecoupledWhithamPair"
    KDV = "KdV"

    @property
    def chart(self) -> Optional[Chart]:
        """Chart of the state, or ``None`` for single-field models."""
        return _CHART[self]

    @property
    def is_diagonal(self) -> bool:
        return self in _LINEAR


_CHART = {
    ModelKind.WATER_WAVES: Chart.SURFACE_POTENTIAL,
    ModelKind.HAMILTONIAN_WB: Chart.SURFACE_POTENTIAL,
    ModelKind.WHITHAM_BOUSSINESQ: Chart.SURFACE_VELOCITY,
    ModelKind.WHITHAM_BOUSSINESQ_SMOOTHED: Chart.SURFACE_VELOCITY,
    ModelKind.DIAGONALIZED: Chart.DIAGONAL,
    ModelKind.DECOUPLED_PAIR: Chart.DIAGONAL,
    ModelKind.WHITHAM_RIGHT: None,
    ModelKind.WHITHAM_LEFT: None,
    ModelKind.KDV: None,
}

_LINEAR = frozenset(
    {
        ModelKind.DIAGONALIZED,
        ModelKind.DECOUPLED_PAIR,
        ModelKind.WHITHAM_RIGHT,
        ModelKind.WHITHAM_LEFT,
        ModelKind.KDV,
    }
)


class Scheme(enum.Enum):
    RK4 = "RK4"
    IFRK4 = "IFRK4"


@dataclass(frozen=True)
class StepperConfig:
    """Time stepping controls.  ``scheme=None`` picks the kind's default."""

    dt: float
    t_end: float
    scheme: Optional[Scheme] = None
    cfl_guard: float = 0.5

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if isinstance(self.scheme, str):
            object.__setattr__(self, "scheme", Scheme(self.scheme))

    def scheme_for(self, kind: ModelKind) -> Scheme:
        if self.scheme is not None:
            return self.scheme
        return Scheme.IFRK4 if kind.is_diagonal else Scheme.RK4


def default_t_end(p: Params, cap: float = 50.0) -> float:
    """``min(1/eps, 1/mu, cap)`` with zero parameters ignored."""
    out = cap
    for v in (p.eps, p.mu):
        if v > 0:
            out = min(out, 1.0 / v)
    return out


# ---------------------------------------------------------------------------
# linear symbols of the diagonal kinds, on the rfft lattice


def _odd(sym: np.ndarray) -> np.ndarray:
    sym = np.array(sym, dtype=complex)
    sym[-1] = 0.0  # consistent with the Nyquist convention of derivative()
    return sym


def _whitham_symbol(xi, p, sign):
    # symbol of -sign * F_mu d_x
    return _odd(-sign * 1j * xi * fmu_symbol(xi, p.mu))


def _kdv_symbol(xi, p):
    return _odd(-1j * xi + 1j * p.mu * xi**3 / 6.0)


def linear_symbols(kind: ModelKind, xi: np.ndarray, p: Params) -> np.ndarray:
    """Diagonal linear part ``Lambda`` as an array of shape (components, len(xi))."""
    if kind in (ModelKind.DIAGONALIZED, ModelKind.DECOUPLED_PAIR):
        return np.stack([_whitham_symbol(xi, p, +1), _whitham_symbol(xi, p, -1)])
    if kind is ModelKind.WHITHAM_RIGHT:
        return _whitham_symbol(xi, p, +1)[None]
    if kind is ModelKind.WHITHAM_LEFT:
        return _whitham_symbol(xi, p, -1)[None]
    if kind is ModelKind.KDV:
        return _kdv_symbol(xi, p)[None]
    raise ValueError(f"{kind.value} has no diagonal linear part")


def linear_phase_speeds(kind: ModelKind, xi, p: Params) -> np.ndarray:
    """Phase speed(s) of the linearised model; one row per one-way branch.

    For the coupled systems only the right-going branch is returned.
    """
    F = fmu_symbol(xi, p.mu)
    if kind in (ModelKind.DIAGONALIZED, ModelKind.DECOUPLED_PAIR):
        return np.stack([F, -F])
    if kind is ModelKind.WHITHAM_LEFT:
        return -F[None]
    if kind is ModelKind.KDV:
        return (1.0 - p.mu * np.asarray(xi) ** 2 / 6.0)[None]
    return F[None]


# ---------------------------------------------------------------------------
# nonlinear parts of the diagonal kinds


def _prod(f, g, cfg):
    return pointwise_product(f, g, cfg.dealias)


def _nl_whitham(u, p, cfg):
    return -1.5 * p.eps * _prod(u, derivative(u), cfg)


def _nl_pair(r, s, p, cfg):
    eps = p.eps
    return (
        -1.5 * eps * fmu(_prod(r, derivative(r), cfg), p),
        1.5 * eps * fmu(_prod(s, derivative(s), cfg), p),
    )


def _nl_diagonalized(up, um, p, cfg):
    eps = p.eps
    cp = 0.5 * eps * (3.0 * up + um)
    cm = 0.5 * eps * (up + 3.0 * um)
    return (
        -_prod(cp, fmu(derivative(up), p), cfg),
        -_prod(cm, fmu(derivative(um), p), cfg),
    )


def _nonlinear(kind: ModelKind, fields, p, cfg):
    if kind in (ModelKind.WHITHAM_RIGHT, ModelKind.WHITHAM_LEFT, ModelKind.KDV):
        return (_nl_whitham(fields[0], p, cfg),)
    if kind is ModelKind.DECOUPLED_PAIR:
        return _nl_pair(*fields, p, cfg)
    if kind is ModelKind.DIAGONALIZED:
        return _nl_diagonalized(*fields, p, cfg)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# coupled systems


def water_waves_fields(zeta: Field, psi: Field, p: Params, cfg: DnoConfig, current: float = 0.0):
    """Right-hand side ``(zeta_t, psi_t)`` of the full water waves system."""
    eps, mu = p.eps, p.mu
    G = dno_apply(zeta, psi, p, cfg, current)
    v = derivative(psi) + current
    dpsi = -zeta - 0.5 * eps * _prod(v, v, cfg)
    if eps and mu:
        zx = derivative(zeta)
        w = G + eps * _prod(zx, v, cfg)
        denom = 1.0 + eps**2 * mu * zx.values**2
        frac = Field(zeta.grid, _prod(w, w, cfg).values / denom)
        if cfg.dealias:
            frac = truncate(frac)
        dpsi = dpsi + 0.5 * mu * eps * frac
    return G, dpsi


def _rhs_wb(zeta, v, p, cfg):
    check_cavitation(zeta, p)
    eps = p.eps
    dz = -derivative(v + eps * _prod(zeta, v, cfg))
    dv = -fmu(derivative(zeta), p, 2.0) - eps * _prod(v, derivative(v), cfg)
    return dz, dv


def _rhs_wb_smoothed(zeta, v, p, cfg):
    check_cavitation(zeta, p)
    eps = p.eps
    dz = -derivative(v) - eps * fmu(derivative(_prod(zeta, v, cfg)), p, 2.0)
    dv = -fmu(derivative(zeta), p, 2.0) - 0.5 * eps * fmu(_prod(v, derivative(v), cfg), p, 2.0)
    return dz, dv


def _rhs_hamiltonian_wb(zeta, psi, p, cfg, current):
    eps = p.eps
    w = fmu(derivative(psi) + current, p)
    dz = -fmu(derivative(psi, 2), p, 2.0) - eps * fmu(derivative(_prod(zeta, w, cfg)), p)
    dpsi = -zeta - 0.5 * eps * _prod(w, w, cfg)
    return dz, dpsi


# ---------------------------------------------------------------------------


def _fields_of(kind: ModelKind, state: State):
    chart = kind.chart
    if chart is None:
        if not isinstance(state, Field):
            raise ChartMismatch(f"{kind.value} evolves a single Field")
        return (state,), 0.0
    if not isinstance(state, ModelState):
        raise ChartMismatch(f"{kind.value} needs a {chart.value} ModelState")
    state.expect(chart)
    return state.fields, state.current


def _wrap(kind: ModelKind, like: State, fields) -> State:
    if kind.chart is None:
        return fields[0]
    return like.with_fields(*fields)


def _rhs_fields(kind, fields, current, p, cfg):
    if kind.is_diagonal:
        xi = fields[0].grid.rfreq
        lam = linear_symbols(kind, xi, p)
        nl = _nonlinear(kind, fields, p, cfg)
        return tuple(
            Field.from_spectrum(f.grid, lam[i] * f.spectrum) + nl[i] for i, f in enumerate(fields)
        )
    if kind is ModelKind.WATER_WAVES:
        return water_waves_fields(*fields, p, cfg, current)
    if kind is ModelKind.WHITHAM_BOUSSINESQ:
        return _rhs_wb(*fields, p, cfg)
    if kind is ModelKind.WHITHAM_BOUSSINESQ_SMOOTHED:
        return _rhs_wb_smoothed(*fields, p, cfg)
    if kind is ModelKind.HAMILTONIAN_WB:
        return _rhs_hamiltonian_wb(*fields, p, cfg, current)
    raise ValueError(kind)


def rhs(kind: ModelKind, state: State, p: Params, cfg: DnoConfig = DnoConfig()) -> State:
    """Time derivative of ``state`` under model ``kind`` (same chart as the input)."""
    fields, current = _fields_of(kind, state)
    return _wrap(kind, state, _rhs_fields(kind, fields, current, p, cfg))


# ---------------------------------------------------------------------------
# steppers


class _System:
    """Spectral-array view of a model used by the steppers."""

    def __init__(self, kind, template: State, p, cfg, dt, scheme):
        self.kind, self.p, self.cfg = kind, p, cfg
        fields, self.current = _fields_of(kind, template)
        self.template = template
        self.grid = fields[0].grid
        self.scheme = scheme
        if scheme is Scheme.IFRK4:
            if not kind.is_diagonal:
                raise ValueError(f"IFRK4 needs a diagonal linear part; {kind.value} has none")
            lam = linear_symbols(kind, self.grid.rfreq, p)
            self.E = np.exp(lam * dt)
            self.E2 = np.exp(lam * dt / 2)

    def pack(self, state: State) -> np.ndarray:
        fields, _ = _fields_of(self.kind, state)
        return np.stack([f.spectrum for f in fields])

    def fields(self, Y):
        return tuple(Field.from_spectrum(self.grid, y) for y in Y)

    def unpack(self, Y) -> State:
        return _wrap(self.kind, self.template, self.fields(Y))

    def full(self, Y):
        out = _rhs_fields(self.kind, self.fields(Y), self.current, self.p, self.cfg)
        return np.stack([f.spectrum for f in out])

    def nonlinear(self, Y):
        out = _nonlinear(self.kind, self.fields(Y), self.p, self.cfg)
        return np.stack([f.spectrum for f in out])

    def step(self, Y, dt):
        if self.scheme is Scheme.RK4:
            f = self.full
            k1 = f(Y)
            k2 = f(Y + 0.5 * dt * k1)
            k3 = f(Y + 0.5 * dt * k2)
            k4 = f(Y + dt * k3)
            return Y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        N, E, E2 = self.nonlinear, self.E, self.E2
        k1 = N(Y)
        k2 = N(E2 * (Y + 0.5 * dt * k1))
        k3 = N(E2 * Y + 0.5 * dt * k2)
        k4 = N(E * Y + dt * E2 * k3)
        return E * Y + dt / 6.0 * (E * k1 + 2 * E2 * (k2 + k3) + k4)


def _max_abs(state: State) -> float:
    return state.max_abs()


def check_cfl(state: State, p: Params, stepper: StepperConfig):
    grid = state.grid
    limit = stepper.cfl_guard * grid.dx / (1.0 + p.eps * _max_abs(state))
    if stepper.dt > limit * (1 + 1e-12):
        raise CflViolated(f"dt={stepper.dt:.4g} exceeds CFL limit {limit:.4g}")


def _check_blowup(system: _System, Y, t: float = 0.0) -> None:
    vals = np.fft.irfft(Y, n=system.grid.n_points, axis=-1)
    if not np.all(np.isfinite(vals)) or np.max(np.abs(vals)) > BLOWUP:
        raise NonFinite(f"solution exceeded the blow-up threshold at t={t:.4g}")


def step(kind: ModelKind, state: State, p: Params, stepper: StepperConfig, cfg: DnoConfig = DnoConfig()) -> State:
    """Advance ``state`` by one step of size ``stepper.dt``."""
    check_cfl(state, p, stepper)
    system = _System(kind, state, p, cfg, stepper.dt, stepper.scheme_for(kind))
    Y = system.step(system.pack(state), stepper.dt)
    _check_blowup(system, Y)
    return system.unpack(Y)


@dataclass
class Trajectory:
    """Saved times, states and observer values of one run."""

    times: List[float]
    states: List[State]
    observations: Dict[str, List[float]] = field(default_factory=dict)
    final: Optional[State] = None
    stopped_early: Optional[str] = None

    def observation(self, name: str) -> np.ndarray:
        return np.asarray(self.observations[name])


def evolve(
    kind: ModelKind,
    state0: State,
    p: Params,
    stepper: StepperConfig,
    cfg: DnoConfig = DnoConfig(),
    observers: Optional[Mapping[str, Callable[[State], float]]] = None,
    save_every: Optional[int] = None,
    keep_states: bool = True,
    stop_on_blowup: bool = False,
) -> Trajectory:
    """Step from ``t = 0`` to ``stepper.t_end``.

    The step is shrunk slightly so that an integer number of steps lands on
    ``t_end``.  States and observers are recorded at ``t = 0``, every
    ``save_every`` steps and at the final time.  With ``stop_on_blowup`` a
    blow-up ends the run early and is reported in ``stopped_early`` instead
    of raising.
    """
    observers = dict(observers or {})
    traj = Trajectory([], [], {name: [] for name in observers})

    def record(t, s):
        traj.times.append(t)
        if keep_states:
            traj.states.append(s)
        for name, fn in observers.items():
            traj.observations[name].append(float(fn(s)))

    record(0.0, state0)
    traj.final = state0
    if stepper.t_end == 0:
        return traj
    n_steps = int(np.ceil(stepper.t_end / stepper.dt - 1e-9))
    dt = stepper.t_end / n_steps
    check_cfl(state0, p, stepper)
    system = _System(kind, state0, p, cfg, dt, stepper.scheme_for(kind))
    Y = system.pack(state0)
    for i in range(1, n_steps + 1):
        Y = system.step(Y, dt)
        try:
            _check_blowup(system, Y, i * dt)
        except NonFinite as exc:
            if not stop_on_blowup:
                raise
            traj.stopped_early = str(exc)
            break
        if (save_every and i % save_every == 0) or i == n_steps:
            s = system.unpack(Y)
            check_cfl(s, p, stepper)
            record(i * dt, s)
            traj.final = s
    return traj
