"""Periodic grids, spectral fields and Fourier multipliers.

Everything lives on a torus of length ``L`` sampled at ``N`` equispaced
nodes.  Spectra are stored in the real-FFT layout (wavenumbers
``0 .. N/2``); the negative half is implied by Hermitian symmetry.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import GridMismatch, NonFinite, NonZeroMean

DEFAULT_LENGTH = 40.0 * np.pi
MEAN_TOL = 1e-10


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on ``[0, length)`` with ``n_points`` nodes.

    Parameters
    ----------
    n_points : int
        Number of nodes, even and at least 8.
    length : float
        Period of the domain.
    """

    n_points: int
    length: float = DEFAULT_LENGTH

    def __post_init__(self):
        n = self.n_points
        if int(n) != n or n < 8 or n % 2:
            raise ValueError(f"n_points must be an even integer >= 8, got {n}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"length must be positive, got {self.length}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.arange(self.n_points) * self.dx
        x.setflags(write=False)
        return x

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Full lattice ``2*pi*k/L`` for ``k = -N/2 .. N/2-1``."""
        k = np.arange(-self.n_points // 2, self.n_points // 2)
        xi = 2.0 * np.pi * k / self.length
        xi.setflags(write=False)
        return xi

    @cached_property
    def rfreq(self) -> np.ndarray:
        """Nonnegative wavenumbers matching the rfft layout (last one is Nyquist)."""
        xi = 2.0 * np.pi * np.arange(self.n_points // 2 + 1) / self.length
        xi.setflags(write=False)
        return xi

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        # 2/3 rule: keep |k| < N/3
        k = np.arange(self.n_points // 2 + 1)
        mask = 3 * k < self.n_points
        mask.setflags(write=False)
        return mask

    @cached_property
    def parseval_weight(self) -> np.ndarray:
        """Weights turning ``sum w |rfft|^2`` into the continuum L2 norm squared."""
        w = np.full(self.n_points // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        w *= self.length / self.n_points**2
        w.setflags(write=False)
        return w

    def describe(self) -> str:
        return f"N={self.n_points} L={self.length:.6g}"


class Field:
    """Real function sampled on a :class:`PeriodicGrid`.

    Fields are immutable; the spectrum is computed on first access.
    Arithmetic with scalars and other fields on the same grid is nodewise.
    """

    __slots__ = ("grid", "_values", "_spectrum")

    def __init__(self, grid: PeriodicGrid, values, *, _spectrum=None):
        v = np.array(values, dtype=float)
        if v.shape != (grid.n_points,):
            raise ValueError(f"expected {grid.n_points} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFinite("field contains NaN or Inf")
        v.setflags(write=False)
        self.grid = grid
        self._values = v
        self._spectrum = _spectrum

    @classmethod
    def from_spectrum(cls, grid: PeriodicGrid, spectrum: np.ndarray) -> "Field":
        values = np.fft.irfft(spectrum, n=grid.n_points)
        return cls(grid, values)

    @classmethod
    def from_function(cls, grid: PeriodicGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(grid, fn(grid.nodes))

    @classmethod
    def zeros(cls, grid: PeriodicGrid) -> "Field":
        return cls(grid, np.zeros(grid.n_points))

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def spectrum(self) -> np.ndarray:
        # benign race: two threads may both compute the same array
        if self._spectrum is None:
            s = np.fft.rfft(self._values)
            s.setflags(write=False)
            self._spectrum = s
        return self._spectrum

    def mean(self) -> float:
        return float(np.mean(self._values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._values)))

    def _check(self, other: "Field"):
        if self.grid != other.grid:
            raise GridMismatch(f"{self.grid.describe()} vs {other.grid.describe()}")

    def _coerce(self, other):
        if isinstance(other, Field):
            self._check(other)
            return other._values
        return other

    def __add__(self, other):
        return Field(self.grid, self._values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self._values - self._coerce(other))

    def __rsub__(self, other):
        return Field(self.grid, self._coerce(other) - self._values)

    def __mul__(self, other):
        return Field(self.grid, self._values * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self._values / self._coerce(other))

    def __neg__(self):
        return Field(self.grid, -self._values)

    def __pow__(self, k):
        return Field(self.grid, self._values**k)

    def __repr__(self):
        return f"Field({self.grid.describe()}, max|f|={self.max_abs():.3g})"


@dataclass(frozen=True)
class Params:
    """Shallow-water regime parameters.

    ``mu`` is the shallowness parameter, ``eps`` the nonlinearity.  ``h_min``
    is the non-cavitation floor for ``1 + eps*zeta``.
    """

    mu: float
    eps: float
    mu_max: float = 1.0
    h_min: float = 0.2

    def __post_init__(self):
        if not self.mu_max > 0:
            raise ValueError("mu_max must be positive")
        if not 0.0 <= self.mu <= self.mu_max:
            raise ValueError(f"mu={self.mu} outside [0, {self.mu_max}]")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps={self.eps} outside [0, 1]")
        if not self.h_min > 0:
            raise ValueError("h_min must be positive")

    def with_(self, **changes) -> "Params":
        d = dict(mu=self.mu, eps=self.eps, mu_max=self.mu_max, h_min=self.h_min)
        d.update(changes)
        return Params(**d)


# ---------------------------------------------------------------------------
# symbols


def fmu_symbol(xi, mu: float) -> np.ndarray:
    """``sqrt(tanh(sqrt(mu)|xi|) / (sqrt(mu)|xi|))``, equal to 1 at ``xi = 0``."""
    x = np.sqrt(mu) * np.abs(np.asarray(xi, dtype=float))
    out = np.ones_like(x)
    nz = x > 0
    out[nz] = np.sqrt(np.tanh(x[nz]) / x[nz])
    return out


class SymbolKind(enum.Enum):
    FMU = "Fmu"
    FMU2 = "Fmu2"
    FMU_INV = "FmuInv"
    DERIVATIVE = "Derivative"
    ANTI_DERIVATIVE = "AntiDerivative"
    IDENTITY = "Identity"
    CUSTOM = "Custom"


_ODD = (SymbolKind.DERIVATIVE, SymbolKind.ANTI_DERIVATIVE)


@dataclass(frozen=True)
class MultiplierSymbol:
    """A Fourier multiplier ``m(xi)``.

    For ``CUSTOM`` the evaluator receives ``(xi, params)`` and must return
    the symbol on an array of nonnegative wavenumbers; it is assumed even
    or odd so that real fields stay real.
    """

    kind: SymbolKind
    evaluator: Optional[Callable[[np.ndarray, Params], np.ndarray]] = None
    odd: bool = False

    def __call__(self, xi, p: Params) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        k = self.kind
        if k is SymbolKind.FMU:
            return fmu_symbol(xi, p.mu)
        if k is SymbolKind.FMU2:
            return fmu_symbol(xi, p.mu) ** 2
        if k is SymbolKind.FMU_INV:
            return 1.0 / fmu_symbol(xi, p.mu)
        if k is SymbolKind.DERIVATIVE:
            return 1j * xi
        if k is SymbolKind.ANTI_DERIVATIVE:
            out = np.zeros(xi.shape, dtype=complex)
            nz = xi != 0
            out[nz] = 1.0 / (1j * xi[nz])
            return out
        if k is SymbolKind.IDENTITY:
            return np.ones_like(xi)
        if self.evaluator is None:
            raise ValueError("custom symbol needs an evaluator")
        return np.asarray(self.evaluator(xi, p))

    @property
    def is_odd(self) -> bool:
        return self.kind in _ODD or self.odd


FMU = MultiplierSymbol(SymbolKind.FMU)
FMU2 = MultiplierSymbol(SymbolKind.FMU2)
FMU_INV = MultiplierSymbol(SymbolKind.FMU_INV)
DERIVATIVE = MultiplierSymbol(SymbolKind.DERIVATIVE)
ANTI_DERIVATIVE = MultiplierSymbol(SymbolKind.ANTI_DERIVATIVE)
IDENTITY = MultiplierSymbol(SymbolKind.IDENTITY)

# Params are irrelevant for the parameter-free symbols
_NO_PARAMS = Params(0.0, 0.0)


def check_mean_zero(f: Field, what: str = "field", tol: float = MEAN_TOL):
    m = f.mean()
    if abs(m) > tol * (1.0 + f.max_abs()):
        raise NonZeroMean(f"{what} has mean {m:.3e}; a mean-zero field is required")


def multiply_spectrum(f: Field, symbol_values: np.ndarray, odd: bool = False) -> Field:
    s = f.spectrum * symbol_values
    if odd:
        s = s.copy()
        s[-1] = 0.0
    return Field.from_spectrum(f.grid, s)


def apply_multiplier(sym: MultiplierSymbol, f: Field, p: Optional[Params] = None) -> Field:
    """Apply the Fourier multiplier ``sym`` to ``f``.

    Odd symbols have their Nyquist mode zeroed.  ``AntiDerivative`` refuses
    fields with non-negligible mean.
    """
    if p is None:
        if sym.kind in (SymbolKind.FMU, SymbolKind.FMU2, SymbolKind.FMU_INV, SymbolKind.CUSTOM):
            raise ValueError(f"{sym.kind.value} needs Params")
        p = _NO_PARAMS
    if sym.kind is SymbolKind.ANTI_DERIVATIVE:
        check_mean_zero(f, "anti_derivative input")
    if sym.kind is SymbolKind.IDENTITY or (
        sym.kind in (SymbolKind.FMU, SymbolKind.FMU2, SymbolKind.FMU_INV) and p.mu == 0.0
    ):
        return f
    return multiply_spectrum(f, sym(f.grid.rfreq, p), sym.is_odd)


def fmu(f: Field, p: Params, power: float = 1.0) -> Field:
    """Shorthand for ``F_mu**power`` applied to ``f``."""
    if p.mu == 0.0 or power == 0:
        return f
    return multiply_spectrum(f, fmu_symbol(f.grid.rfreq, p.mu) ** power)


def derivative(f: Field, order: int = 1) -> Field:
    """Spectral derivative; the Nyquist mode is always zeroed."""
    if order == 0:
        return f
    sym = (1j * f.grid.rfreq) ** order
    return multiply_spectrum(f, sym, odd=True)


def anti_derivative(f: Field, project: bool = False) -> Field:
    """Mean-zero primitive, symbol ``1/(i xi)`` with the zero mode set to 0.

    With ``project=True`` the mean of ``f`` is discarded silently instead of
    raising :class:`NonZeroMean`.  The projected operator is still exactly
    skew-adjoint, which is what the normal-form identities need.
    """
    if not project:
        check_mean_zero(f, "anti_derivative input")
    return multiply_spectrum(f, ANTI_DERIVATIVE(f.grid.rfreq, _NO_PARAMS), odd=True)


def project_mean(f: Field) -> Field:
    return f - f.mean()


def norm_hs(f: Field, alpha: float = 0.0) -> float:
    """Sobolev norm ``|f|_{H^alpha}`` normalised so alpha=0 is the L2 norm."""
    g = f.grid
    w = g.parseval_weight
    if alpha:
        w = w * (1.0 + g.rfreq**2) ** alpha
    return float(np.sqrt(np.sum(w * np.abs(f.spectrum) ** 2)))


def norm_l2(f: Field) -> float:
    return float(np.sqrt(f.grid.dx * np.dot(f.values, f.values)))


def inner(f: Field, g: Field) -> float:
    """L2 pairing by the trapezoid rule (spectrally exact on the torus)."""
    f._check(g)
    return float(f.grid.dx * np.dot(f.values, g.values))


def integrate(f: Field) -> float:
    return float(f.grid.dx * np.sum(f.values))


def dealias(f: Field) -> Field:
    return Field.from_spectrum(f.grid, f.spectrum * f.grid.dealias_mask)


def pointwise_product(f: Field, g: Field, dealias: bool = True) -> Field:
    """Nodewise product, optionally 2/3-rule truncated."""
    f._check(g)
    out = Field(f.grid, f.values * g.values)
    if dealias:
        out = Field.from_spectrum(f.grid, out.spectrum * f.grid.dealias_mask)
    return out


def random_field(
    grid: PeriodicGrid,
    rng: np.random.Generator,
    *,
    scale: float = 1.0,
    k0: float = 1.0,
    mean_zero: bool = True,
) -> Field:
    """Smooth random field with a Gaussian spectral envelope ``exp(-(xi/k0)^2)``.

    The amplitude is normalised so that ``max|f| = scale``.  The Nyquist mode
    is left empty, so the field is exactly band-limited.
    """
    xi = grid.rfreq
    env = np.exp(-((xi / k0) ** 2))
    spec = env * (rng.standard_normal(xi.size) + 1j * rng.standard_normal(xi.size))
    spec[0] = 0.0 if mean_zero else spec[0].real
    spec[-1] = 0.0
    f = Field.from_spectrum(grid, spec)
    m = f.max_abs()
    return f * (scale / m) if m > 0 else f
