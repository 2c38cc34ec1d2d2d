"""Far-field structure of primal solutions.

For a compactly supported source h = Q |u|^{p-2} u the solution radiates an
outgoing wave whose leading term at distance r from the box center is

    u(x) ~ -2 (2 pi / r)^{(N-1)/2} Re[ exp(i(r - (N-1) pi/4)) g(x/|x|) ],

with direction-dependent amplitude g(xi) = -(i/4) (2 pi)^{-(N-1)} hhat(xi),
where hhat is the plain box Fourier integral of h (phases measured from the
box center; the constant is the unitary-transform normalization, which makes
the formula match the outgoing free-space kernel exactly in both dimensions).

With absorption eps > 0 the operator's outgoing wavenumber is
k+ = sqrt(1 + i eps); the checks below use exp(i k+ r) in the leading term
and evaluate the amplitude at k+ xi, which reduces to the formula above as
eps -> 0.  The decay fit removes the known attenuation exp(-Im k+ r) and
compares only the power of r, so it stays constant-free.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientShellsError, InterpolationDegenerateError
from .dual_functional import FunctionalContext, odd_power
from .kernel import Field

MIN_BANDWIDTH = 2.0  # required max lattice |k| relative to the unit sphere


@dataclass
class SphereSamples:
    """Complex far-field amplitudes at unit directions (antipodally paired)."""

    directions: np.ndarray  # (M, N), unit rows
    values: np.ndarray      # (M,), complex

    def __post_init__(self):
        dirs = np.asarray(self.directions, dtype=float)
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("directions must be unit vectors to 1e-12")
        self.directions = dirs
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (dirs.shape[0],):
            raise ValueError("one amplitude per direction required")


def equal_area_directions(dimension: int, count: int) -> np.ndarray:
    """Antipodally symmetric, approximately equal-area unit directions.

    Uniform angles on the circle for N = 2; a symmetrized Fibonacci spiral
    on the sphere for N = 3.  count is rounded up to an even number.
    """
    half = max(1, (count + 1) // 2)
    if dimension == 2:
        theta = np.pi * np.arange(half) / half
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    elif dimension == 3:
        idx = np.arange(half) + 0.5
        phi = np.pi * (1.0 + np.sqrt(5.0)) * idx
        cos_t = 1.0 - idx / half  # upper hemisphere, mirrored below
        sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t ** 2))
        dirs = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=1)
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    else:
        raise ValueError("dimension must be 2 or 3")
    return np.concatenate([dirs, -dirs], axis=0)


def _box_transform(ctx: FunctionalContext, source: np.ndarray, wavevectors: np.ndarray) -> np.ndarray:
    """Fourier integral of the trigonometric interpolant of `source` over the box.

    Evaluates int_box s(x) exp(-i k (x - center)) dx at arbitrary (complex)
    wavevectors through the Dirichlet-kernel interpolation of the lattice
    transform; spectrally accurate for sources supported inside the box.
    """
    grid = ctx.grid
    n = grid.points_per_axis
    L = grid.box_length
    coeffs = np.fft.fftn(source) / grid.size  # trig-interpolant coefficients
    lattice = grid.axis_frequencies
    # per-axis integral: int_0^L e^{i(k_m - k)x} e^{ikL/2} dx
    #                  = L sinc((k_m - k)L/2) e^{i k_m L/2} = L sinc(.) (-1)^m
    m_int = np.rint(lattice * L / (2.0 * np.pi)).astype(int)
    parity = 1.0 - 2.0 * (np.abs(m_int) % 2)
    nyquist = abs(lattice[n // 2])

    def axis_factor(k_axis):
        z = (lattice - k_axis) * (L / 2.0)  # complex when k is complex
        small = np.abs(z) < 1e-8
        z_safe = np.where(small, 1.0, z)
        sinc = np.where(small, 1.0 - z * z / 6.0, np.sin(z_safe) / z_safe)
        # split the unpaired Nyquist coefficient across +-n/2 (real interpolant)
        z_m = (nyquist - k_axis) * (L / 2.0)
        sinc = np.asarray(sinc, dtype=complex)
        sinc[n // 2] = 0.5 * (sinc[n // 2] + np.sin(z_m) / z_m)
        return L * parity * sinc

    out = np.empty(wavevectors.shape[0], dtype=complex)
    for j, k in enumerate(wavevectors):
        acc = coeffs
        for axis in range(grid.dimension):
            acc = np.tensordot(acc, axis_factor(k[axis]), axes=([0], [0]))
        out[j] = acc
    return out


def farfield_amplitude(
    ctx: FunctionalContext,
    u: Field,
    directions: np.ndarray,
    wavenumber: complex = 1.0,
) -> SphereSamples:
    """Far-field amplitude of the source h = Q |u|^{p-2} u at unit directions.

    With the default wavenumber 1 this is
    g(xi) = -(i/4) (2 pi)^{-(N-1)} int h(x) exp(-i xi x) dx; a complex
    wavenumber evaluates the transform at k+ xi for absorption-aware checks.
    The conjugate antisymmetry g(-xi) = -conj(g(xi)) holds for real u and
    real wavenumber.
    """
    grid = ctx.grid
    k_max = np.pi * grid.points_per_axis / grid.box_length
    if k_max < MIN_BANDWIDTH or 2.0 * np.pi / grid.box_length > 1.0:
        raise InterpolationDegenerateError(
            f"grid resolves |k| only to {k_max:.2f} with spacing "
            f"{2 * np.pi / grid.box_length:.2f}; too coarse near the unit sphere"
        )
    dirs = np.asarray(directions, dtype=float)
    source = ctx.coefficient.field.values * odd_power(u.values, ctx.exponents.p - 1.0)
    transform = _box_transform(ctx, source, wavenumber * dirs)
    constant = -0.25j * (2.0 * np.pi) ** (-(grid.dimension - 1))
    return SphereSamples(directions=dirs, values=constant * transform)


# ---------------------------------------------------------------------------
# decay and expansion diagnostics
# ---------------------------------------------------------------------------


@dataclass
class FarfieldReport:
    degenerate: bool
    decay_exponent: float
    target_exponent: float
    shell_radii: np.ndarray
    shell_means: np.ndarray
    expansion_radii: np.ndarray
    expansion_errors: np.ndarray
    trend_nonincreasing: bool
    interpolation_residual: float
    attenuation_rate: float


def _monomial_design(directions: np.ndarray, degree: int) -> np.ndarray:
    """All monomials of total degree <= degree in the direction components;
    restricted to the unit sphere these span the harmonics up to that degree."""
    dim = directions.shape[1]
    columns = []
    if dim == 2:
        for a in range(degree + 1):
            for b in range(degree + 1 - a):
                columns.append(directions[:, 0] ** a * directions[:, 1] ** b)
    else:
        for a in range(degree + 1):
            for b in range(degree + 1 - a):
                for c in range(degree + 1 - a - b):
                    columns.append(
                        directions[:, 0] ** a * directions[:, 1] ** b * directions[:, 2] ** c
                    )
    return np.stack(columns, axis=1)


def decay_and_expansion_check(
    ctx: FunctionalContext,
    u: Field,
    samples: SphereSamples,
    r_min: float | None = None,
    r_max: float | None = None,
    shell_count: int = 8,
    fit_degree: int = 6,
) -> FarfieldReport:
    """Shell-decay fit and leading-term expansion error around the box center.

    The decay exponent comes from regressing log(mean_shell |u|) + beta r on
    log r, beta = Im sqrt(1 + i eps) being the known absorption rate.  The
    expansion error at radius R is the ball average
    (1/R) int_{B_R} |u - leading|^2 with the sampled amplitudes interpolated
    smoothly across the sphere; the report flags whether the error is
    nonincreasing over the tabulated radii.
    """
    grid = ctx.grid
    dim = grid.dimension
    L = grid.box_length
    eps = grid.shell_epsilon
    k_plus = np.sqrt(1.0 + 1j * eps)
    beta = float(k_plus.imag)

    if not np.any(u.values):
        return FarfieldReport(
            degenerate=True,
            decay_exponent=float("nan"),
            target_exponent=(dim - 1) / 2.0,
            shell_radii=np.array([]),
            shell_means=np.array([]),
            expansion_radii=np.array([]),
            expansion_errors=np.array([]),
            trend_nonincreasing=False,
            interpolation_residual=float("nan"),
            attenuation_rate=beta,
        )

    if r_max is None:
        r_max = 0.46 * L
    if r_min is None:
        r_min = max(0.18 * L, 4.0 * grid.spacing)
    if not (0.0 < r_min < r_max <= 0.5 * L):
        raise ValueError("need 0 < r_min < r_max <= L/2")

    mesh = grid.coordinate_mesh()
    center = L / 2.0
    radius = np.sqrt(sum((m - center) ** 2 for m in mesh))

    edges = np.linspace(r_min, r_max, shell_count + 1)
    shell_radii, shell_means = [], []
    for i in range(shell_count):
        mask = (radius >= edges[i]) & (radius < edges[i + 1])
        if mask.sum() < 8:
            continue
        shell_radii.append(0.5 * (edges[i] + edges[i + 1]))
        shell_means.append(float(np.abs(u.values[mask]).mean()))
    if len(shell_radii) < 3:
        raise InsufficientShellsError(
            f"only {len(shell_radii)} usable shells between r={r_min} and {r_max}"
        )
    shell_radii = np.asarray(shell_radii)
    shell_means = np.asarray(shell_means)

    corrected = np.log(shell_means) + beta * shell_radii
    design = np.stack([np.ones_like(shell_radii), np.log(shell_radii)], axis=1)
    coeffs, *_ = np.linalg.lstsq(design, corrected, rcond=None)
    decay_exponent = float(-coeffs[1])

    # smooth interpolation of the sampled amplitudes across the sphere
    design_s = _monomial_design(samples.directions, fit_degree)
    fit_re, *_ = np.linalg.lstsq(design_s, samples.values.real, rcond=None)
    fit_im, *_ = np.linalg.lstsq(design_s, samples.values.imag, rcond=None)
    reproduced = design_s @ fit_re + 1j * (design_s @ fit_im)
    scale = np.abs(samples.values).max()
    interp_residual = float(np.abs(reproduced - samples.values).max() / scale) if scale > 0 else 0.0

    ball = (radius >= max(2.0 * grid.spacing, 1e-9)) & (radius <= r_max)
    pts = np.stack([m[ball] - center for m in mesh], axis=1)
    r_pts = radius[ball]
    directions = pts / r_pts[:, None]
    design_pts = _monomial_design(directions, fit_degree)
    g_pts = design_pts @ fit_re + 1j * (design_pts @ fit_im)
    leading = -2.0 * (2.0 * np.pi / r_pts) ** ((dim - 1) / 2.0) * np.real(
        np.exp(1j * (k_plus * r_pts - (dim - 1) * np.pi / 4.0)) * g_pts
    )
    mismatch = (u.values[ball] - leading) ** 2

    expansion_radii = np.linspace(r_min + 0.25 * (r_max - r_min), r_max, max(4, shell_count // 2 + 3))
    expansion_errors = np.array([
        grid.weight * float(mismatch[r_pts <= R].sum()) / R for R in expansion_radii
    ])
    tail = expansion_errors[-3:]
    trend = bool(np.all(np.diff(tail) <= 1e-12 * max(1.0, tail.max())))

    return FarfieldReport(
        degenerate=False,
        decay_exponent=decay_exponent,
        target_exponent=(dim - 1) / 2.0,
        shell_radii=shell_radii,
        shell_means=shell_means,
        expansion_radii=expansion_radii,
        expansion_errors=expansion_errors,
        trend_nonincreasing=trend,
        interpolation_residual=interp_residual,
        attenuation_rate=beta,
    )
