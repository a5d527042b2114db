"""Coordinate charts and the two-field state container."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .errors import ChartMismatch
from .spectral import Field


class Chart(enum.Enum):
    SURFACE_POTENTIAL = "SurfacePotential"  # (zeta, psi)
    SURFACE_VELOCITY = "SurfaceVelocity"  # (zeta, v)
    DIAGONAL = "Diagonal"  # (u+, u-) or (r, s)


@dataclass(frozen=True)
class ModelState:
    """Pair of fields tagged with a chart.

    In the surface-potential chart ``current`` holds the uniform part of
    ``d_x psi``: on the torus a potential ``psi = c*x + periodic`` cannot be
    stored as a periodic field, so ``psi`` keeps the periodic part and the
    slope ``c`` rides along.  It is zero for ordinary periodic data.

    Unpacks as ``a, b = state``.
    """

    chart: Chart
    a: Field
    b: Field
    current: float = 0.0

    def __post_init__(self):
        self.a._check(self.b)

    def __iter__(self):
        yield self.a
        yield self.b

    @property
    def grid(self):
        return self.a.grid

    @property
    def fields(self):
        return (self.a, self.b)

    def expect(self, chart: Chart) -> "ModelState":
        if self.chart is not chart:
            raise ChartMismatch(f"expected {chart.value} state, got {self.chart.value}")
        return self

    def with_fields(self, a: Field, b: Field) -> "ModelState":
        return replace(self, a=a, b=b)

    def max_abs(self) -> float:
        return max(self.a.max_abs(), self.b.max_abs())


def surface_potential(zeta: Field, psi: Field, current: float = 0.0) -> ModelState:
    return ModelState(Chart.SURFACE_POTENTIAL, zeta, psi, current)


def surface_velocity(zeta: Field, v: Field) -> ModelState:
    return ModelState(Chart.SURFACE_VELOCITY, zeta, v)


def diagonal(a: Field, b: Field) -> ModelState:
    return ModelState(Chart.DIAGONAL, a, b)
