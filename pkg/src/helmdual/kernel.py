"""Spectral realization of the Helmholtz resolvent on a periodic box.

The operator (-Delta - 1)^{-1} acts as the Fourier multiplier

    sigma(k) = (|k|^2 - 1) / ((|k|^2 - 1)^2 + eps^2)

on the discrete frequency lattice k = 2 pi m / L, m in [-n/2, n/2)^N.
With eps = 0 this is the principal-value symbol 1/(|k|^2 - 1) and the
construction requires every lattice point to stay off the unit shell;
eps > 0 is the limiting-absorption regularization used for far-field
experiments.  Only the real part of the outgoing fundamental solution
enters, matching the dual variational formulation.

All operations are pure; numpy's pairwise summation keeps quadrature
reductions deterministic.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, GridMismatchError, ShellResonanceError
from .special import bessel_y0

RESONANCE_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic lattice on [0, L)^N.

    dimension       N, 2 or 3
    box_length      L > 0
    points_per_axis even n
    shell_epsilon   eps >= 0, absorption parameter of the resolvent symbol
    """

    dimension: int
    box_length: float
    points_per_axis: int
    shell_epsilon: float = 0.0

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dimension}")
        if not self.box_length > 0:
            raise ValueError("box_length must be positive")
        n = self.points_per_axis
        if n <= 0 or n % 2 != 0:
            raise ValueError("points_per_axis must be a positive even integer")
        if self.shell_epsilon < 0:
            raise ValueError("shell_epsilon must be nonnegative")
        if self.shell_epsilon == 0.0 and self.delta_min <= RESONANCE_TOL:
            raise ShellResonanceError(
                f"lattice touches the unit shell: min ||k|^2 - 1| = {self.delta_min:.3e} "
                f"(L={self.box_length}, n={n}); use shell_epsilon > 0 or change the box"
            )

    @property
    def spacing(self) -> float:
        return self.box_length / self.points_per_axis

    @property
    def weight(self) -> float:
        """Quadrature weight h^N of the uniform trapezoid rule."""
        return self.spacing ** self.dimension

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dimension

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.dimension

    @cached_property
    def axis_coordinates(self) -> np.ndarray:
        x = np.arange(self.points_per_axis) * self.spacing
        x.setflags(write=False)
        return x

    @cached_property
    def axis_frequencies(self) -> np.ndarray:
        k = 2.0 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)
        k.setflags(write=False)
        return k

    @cached_property
    def k_squared(self) -> np.ndarray:
        mesh = np.meshgrid(*([self.axis_frequencies] * self.dimension), indexing="ij")
        k2 = sum(km ** 2 for km in mesh)
        k2.setflags(write=False)
        return k2

    @cached_property
    def delta_min(self) -> float:
        """Distance of the frequency lattice to the unit shell, min ||k|^2 - 1|."""
        return float(np.abs(self.k_squared - 1.0).min())

    def coordinate_mesh(self) -> list:
        return np.meshgrid(*([self.axis_coordinates] * self.dimension), indexing="ij")

    def unit_cell_mesh(self) -> list:
        """Coordinate mesh folded into [0, 1) per axis, bit-identical across
        unit cells; sampling unit-periodic expressions on it makes them
        exactly invariant under unit-cell rolls."""
        ppu = self.unit_shift_points
        if ppu is None:
            raise GridMismatchError("grid does not support unit-cell translations")
        folded = (np.arange(self.points_per_axis) % ppu) * self.spacing
        return np.meshgrid(*([folded] * self.dimension), indexing="ij")

    @property
    def unit_shift_points(self):
        """Grid points per unit translation, or None when L does not divide n."""
        L = self.box_length
        if abs(L - round(L)) > 1e-12:
            return None
        Li = int(round(L))
        if Li <= 0 or self.points_per_axis % Li != 0:
            return None
        return self.points_per_axis // Li


@dataclass
class Field:
    """Real scalar sampled on a GridSpec, row-major with the last axis fastest."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.shape == (self.grid.size,):
            vals = vals.reshape(self.grid.shape)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        self.values = vals

    def _check_same_grid(self, other: "Field"):
        if self.grid != other.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "Field":
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def lp_norm(self, q: float) -> float:
        """Discrete L^q norm with the grid quadrature weight."""
        return float((self.grid.weight * np.sum(np.abs(self.values) ** q)) ** (1.0 / q))

    def inner(self, other: "Field") -> float:
        """Quadrature of the pointwise product."""
        self._check_same_grid(other)
        return float(self.grid.weight * np.sum(self.values * other.values))


def helmholtz_multiplier(grid: GridSpec) -> np.ndarray:
    """Resolvent symbol over the frequency lattice.

    Returns sigma(k) = (|k|^2 - 1)/((|k|^2 - 1)^2 + eps^2); for eps = 0 the
    grid construction already guarantees no lattice resonance.
    """
    shifted = grid.k_squared - 1.0
    eps = grid.shell_epsilon
    if eps == 0.0 and np.abs(shifted).min() <= RESONANCE_TOL:
        raise ShellResonanceError("lattice resonance at |k| = 1 with eps = 0")
    return shifted / (shifted ** 2 + eps ** 2)


def resolvent_apply(f: Field) -> Field:
    """Apply R = (-Delta - 1)^{-1} (real part) as a Fourier multiplier."""
    sigma = helmholtz_multiplier(f.grid)
    out = np.fft.ifftn(sigma * np.fft.fftn(f.values)).real
    return Field(f.grid, out)


def spectral_laplacian(u: Field) -> Field:
    """Laplacian via the -|k|^2 multiplier; annihilates constants."""
    out = np.fft.ifftn(-u.grid.k_squared * np.fft.fftn(u.values)).real
    return Field(u.grid, out)


def fundamental_solution_psi(r, dimension: int):
    """Real part of the outgoing free-space fundamental solution of -Delta - 1.

    Closed forms: cos(r)/(4 pi r) in dimension 3 and -Y0(r)/4 in dimension 2,
    the normalization for which (-Delta - 1) Psi = delta.  Validation helper
    only; the solver works with the lattice multiplier.
    """
    if dimension not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dimension}")
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0.0):
        raise DomainError("fundamental_solution_psi requires r > 0")
    if dimension == 3:
        out = np.cos(arr) / (4.0 * np.pi * arr)
    else:
        out = -0.25 * bessel_y0(arr)
    return float(out) if np.ndim(r) == 0 else out
