"""Experiment configuration: dataclasses, strict YAML loading, profiles.

A config file mirrors :class:`ExperimentConfig` key for key::

    experiment: consistency_diag
    grid: {n_points: 256, length: 125.66370614359172}
    params_grid: [[0.025, 0.025], [0.05, 0.025], ...]
    stepper: {dt: 0.05, t_end: 10.0, scheme: null, cfl_guard: 0.5, time_scale: fixed}
    initial_data: {profile: gaussian, amplitude: 1.0, width: 3.0}
    seeds: 0
    output: {path: null, format: csv}

Optional keys: ``model`` (for ``simulate``), ``reference`` (reference tier
and DNO order), ``sample_every`` (steps between snapshots) and ``mirror``.
Unknown keys raise :class:`ConfigError`.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from typing import List, Optional, Tuple

import numpy as np
import yaml

from ..errors import WhithamLabError
from ..models import ModelKind, Scheme, StepperConfig, default_t_end
from ..spectral import DEFAULT_LENGTH, Field, Params, PeriodicGrid


class ConfigError(WhithamLabError, ValueError):
    pass


class ExperimentKind(enum.Enum):
    CONSISTENCY_DIAG = "consistency_diag"
    CONSISTENCY_WHITHAM = "consistency_whitham"
    COROLLARY_ONESIDED = "corollary_onesided"
    THEOREM_PIPELINE = "theorem_pipeline"
    HAMILTONIAN_SUITE = "hamiltonian_suite"
    TRANSFORM_SUITE = "transform_suite"
    DISPERSION_SUITE = "dispersion_suite"

    @property
    def is_suite(self) -> bool:
        return self.value.endswith("_suite")


SUITES = (ExperimentKind.HAMILTONIAN_SUITE, ExperimentKind.TRANSFORM_SUITE, ExperimentKind.DISPERSION_SUITE)

PROFILES = ("gaussian", "sech2", "mexican_hat")


@dataclass(frozen=True)
class GridSpec:
    n_points: int = 256
    length: float = DEFAULT_LENGTH

    def build(self) -> PeriodicGrid:
        return PeriodicGrid(self.n_points, self.length)


TIME_SCALES = ("fixed", "inv_eps", "auto")


@dataclass(frozen=True)
class StepperSpec:
    """``time_scale`` decides how ``t_end`` is read: ``fixed`` uses it as is,
    ``inv_eps`` as ``t_end / eps`` and ``auto`` ignores it in favour of
    ``min(1/eps, 1/mu, 50)``."""

    dt: float = 0.05
    t_end: float = 10.0
    scheme: Optional[str] = None
    cfl_guard: float = 0.5
    time_scale: str = "fixed"

    def horizon(self, p: Params) -> float:
        if self.time_scale == "auto":
            return default_t_end(p)
        if self.time_scale == "inv_eps" and p.eps > 0:
            return self.t_end / p.eps
        return self.t_end

    def build(self, p: Params) -> StepperConfig:
        return StepperConfig(self.dt, self.horizon(p), Scheme(self.scheme) if self.scheme else None, self.cfl_guard)

    def describe(self) -> str:
        t = {"fixed": repr(float(self.t_end)), "inv_eps": f"{self.t_end!r}/eps", "auto": "auto"}[self.time_scale]
        return f"{self.scheme or 'default'}-dt{self.dt!r}-T{t}"


@dataclass(frozen=True)
class InitialData:
    profile: str = "gaussian"
    amplitude: float = 1.0
    width: float = 3.0


@dataclass(frozen=True)
class OutputSpec:
    path: Optional[str] = None
    format: str = "csv"


@dataclass(frozen=True)
class ReferenceSpec:
    model: str = "DiagonalizedSystem"
    dno_order: int = 2


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: ExperimentKind
    grid: GridSpec = GridSpec()
    params_grid: Tuple[Tuple[float, float], ...] = ()
    stepper: StepperSpec = StepperSpec()
    initial_data: InitialData = InitialData()
    seeds: int = 0
    output: OutputSpec = OutputSpec()
    model: Optional[str] = None
    reference: ReferenceSpec = ReferenceSpec()
    sample_every: int = 10
    mirror: bool = False

    def __post_init__(self):
        validate(self)

    def params(self) -> List[Params]:
        return [Params(mu, eps) for mu, eps in self.params_grid]

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["experiment"] = self.experiment.value
        d["params_grid"] = [list(x) for x in self.params_grid]
        return d


# ---------------------------------------------------------------------------
# validation


def profile_values(x: np.ndarray, center: float, data: InitialData) -> np.ndarray:
    y = (x - center) / data.width
    if data.profile == "gaussian":
        shape = np.exp(-(y**2))
    elif data.profile == "sech2":
        shape = 1.0 / np.cosh(y) ** 2
    elif data.profile == "mexican_hat":
        shape = (1.0 - 2.0 * y**2) * np.exp(-(y**2))
    else:
        raise ConfigError(f"unknown profile {data.profile!r}; choose from {PROFILES}")
    return data.amplitude * shape


def initial_profile(grid: PeriodicGrid, data: InitialData) -> Field:
    """The configured bump, centred in the domain."""
    return Field(grid, profile_values(grid.nodes, grid.length / 2, data))


def validate(cfg: ExperimentConfig):
    if not isinstance(cfg.experiment, ExperimentKind):
        raise ConfigError(f"experiment must be an ExperimentKind, got {cfg.experiment!r}")
    try:
        grid = cfg.grid.build()
        params = cfg.params()
        if cfg.stepper.scheme:
            Scheme(cfg.stepper.scheme)
        StepperConfig(cfg.stepper.dt, cfg.stepper.t_end, None, cfg.stepper.cfl_guard)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.stepper.time_scale not in TIME_SCALES:
        raise ConfigError(f"stepper.time_scale must be one of {TIME_SCALES}")
    if cfg.initial_data.profile not in PROFILES:
        raise ConfigError(f"unknown profile {cfg.initial_data.profile!r}; choose from {PROFILES}")
    if not cfg.initial_data.width > 0:
        raise ConfigError("initial_data.width must be positive")
    if cfg.output.format not in ("csv", "json"):
        raise ConfigError(f"output.format must be csv or json, got {cfg.output.format!r}")
    if cfg.model is not None:
        _model_kind(cfg.model)
    ref = _model_kind(cfg.reference.model)
    if ref not in (ModelKind.DIAGONALIZED, ModelKind.WATER_WAVES):
        raise ConfigError("reference.model must be DiagonalizedSystem or WaterWaves")
    if cfg.sample_every < 1:
        raise ConfigError("sample_every must be >= 1")
    # non-cavitation margin: 1 + eps*zeta0 >= 1.5 h_min at every node
    zmin = float(np.min(profile_values(grid.nodes, grid.length / 2, cfg.initial_data)))
    for p in params:
        floor = 1.5 * p.h_min
        if 1.0 + p.eps * zmin < floor:
            raise ConfigError(
                f"initial data violates the cavitation margin at eps={p.eps}: "
                f"min(1 + eps*zeta0) = {1.0 + p.eps * zmin:.3f} < {floor:.3f}"
            )


def _model_kind(name: str) -> ModelKind:
    try:
        return ModelKind(name)
    except ValueError:
        raise ConfigError(f"unknown model {name!r}; choose from {[k.value for k in ModelKind]}") from None


# ---------------------------------------------------------------------------
# parsing


def _section(cls, raw, where: str):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be a table")
    known = set(cls.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")
    return cls(**raw)


_TOP = set(ExperimentConfig.__dataclass_fields__)


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a table")
    unknown = set(d) - _TOP
    if unknown:
        raise ConfigError(f"unknown key(s): {sorted(unknown)}")
    if "experiment" not in d:
        raise ConfigError("missing key: experiment")
    try:
        kind = ExperimentKind(d["experiment"])
    except ValueError:
        raise ConfigError(f"unknown experiment {d['experiment']!r}") from None
    base = default_config(kind)
    grid = d.get("params_grid", base.params_grid)
    try:
        pg = tuple((float(mu), float(eps)) for mu, eps in grid)
    except (TypeError, ValueError):
        raise ConfigError("params_grid must be a list of [mu, eps] pairs") from None
    try:
        return ExperimentConfig(
            experiment=kind,
            grid=_section(GridSpec, d["grid"], "grid") if "grid" in d else base.grid,
            params_grid=pg,
            stepper=_section(StepperSpec, d["stepper"], "stepper") if "stepper" in d else base.stepper,
            initial_data=(
                _section(InitialData, d["initial_data"], "initial_data") if "initial_data" in d else base.initial_data
            ),
            seeds=int(d.get("seeds", base.seeds)),
            output=_section(OutputSpec, d["output"], "output") if "output" in d else base.output,
            model=d.get("model", base.model),
            reference=_section(ReferenceSpec, d["reference"], "reference") if "reference" in d else base.reference,
            sample_every=int(d.get("sample_every", base.sample_every)),
            mirror=bool(d.get("mirror", base.mirror)),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_dict(yaml.safe_load(fh))


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


# ---------------------------------------------------------------------------
# defaults


def _square(values):
    return tuple((mu, eps) for mu in values for eps in values)


_SWEEP = (0.025, 0.05, 0.1)
_DIAG = ((0.2, 0.2), (0.1, 0.1), (0.05, 0.05))


def default_config(kind) -> ExperimentConfig:
    """Built-in defaults; the packaged YAML files spell out the same values."""
    kind = ExperimentKind(kind)
    if kind is ExperimentKind.CONSISTENCY_DIAG:
        return ExperimentConfig(kind, params_grid=_square(_SWEEP), initial_data=InitialData("gaussian", 1.0, 3.0))
    if kind is ExperimentKind.CONSISTENCY_WHITHAM:
        # the O(mu eps) claim holds on times of order 1/eps
        return ExperimentConfig(
            kind,
            params_grid=_square(_SWEEP),
            stepper=StepperSpec(t_end=0.5, time_scale="inv_eps"),
            initial_data=InitialData("mexican_hat", 0.3, 3.0),
        )
    if kind is ExperimentKind.COROLLARY_ONESIDED:
        return ExperimentConfig(
            kind, params_grid=_square(_SWEEP), initial_data=InitialData("mexican_hat", 0.3, 3.0), mirror=True
        )
    if kind is ExperimentKind.THEOREM_PIPELINE:
        return ExperimentConfig(
            kind,
            params_grid=_DIAG,
            initial_data=InitialData("mexican_hat", 1.0, 3.0),
            reference=ReferenceSpec("WaterWaves", 2),
        )
    return ExperimentConfig(kind, params_grid=((0.1, 0.1),), initial_data=InitialData("mexican_hat", 1.0, 3.0))


def packaged_config_path(kind) -> str:
    kind = ExperimentKind(kind)
    return str(resources.files("whithamlab.harness") / "configs" / f"{kind.value}.yaml")
