"""Uniform circle grids and the FFT bridge between samples and spectra.

A grid of ``N`` points carries trigonometric polynomials with frequencies
``-N/2 .. N/2-1``.  The frequency ``-N/2`` counts as negative, so the Riesz
projection removes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import GridMismatchError

# ---------------------------------------------------------------------------
# Grid types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CircleGrid:
    """Nodes ``exp(2 pi i j / N)``, ``N`` a power of two, ``N >= 8``."""

    N: int

    def __post_init__(self):
        N = int(self.N)
        if N < 8 or N & (N - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {self.N}")
        object.__setattr__(self, "N", N)

    @property
    def angles(self) -> np.ndarray:
        """Node angles in turns."""
        return np.arange(self.N) / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.angles)

    def doubled(self) -> "CircleGrid":
        return CircleGrid(2 * self.N)


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    """Coefficients ``c_k`` for ``k = -N/2 .. N/2-1`` in increasing order."""

    grid: CircleGrid
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.grid.N,):
            raise GridMismatchError(f"expected {self.grid.N} coefficients, got {c.shape}")
        object.__setattr__(self, "coefficients", c)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.grid.N // 2, self.grid.N // 2)

    def __getitem__(self, k: int) -> complex:
        N = self.grid.N
        if not -N // 2 <= k < N // 2:
            return 0j
        return complex(self.coefficients[k + N // 2])

    @property
    def analytic(self) -> np.ndarray:
        """Coefficients with ``k >= 0``."""
        return self.coefficients[self.grid.N // 2 :]

    def to_grid(self) -> "GridFunction":
        fft_order = np.fft.ifftshift(self.coefficients)
        return GridFunction(self.grid, np.fft.ifft(fft_order) * self.grid.N)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a boundary function at the nodes of a grid."""

    grid: CircleGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.N,):
            raise GridMismatchError(f"expected {self.grid.N} samples, got {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: CircleGrid, f: Callable) -> "GridFunction":
        return cls(grid, f(grid.nodes))

    @classmethod
    def from_analytic(cls, grid: CircleGrid, coeffs) -> "GridFunction":
        """Boundary values of ``sum_k coeffs[k] z**k`` (``k < N/2``)."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.size > grid.N // 2:
            raise GridMismatchError("too many coefficients for the grid")
        spec = np.zeros(grid.N, dtype=complex)
        spec[: coeffs.size] = coeffs
        return cls(grid, np.fft.ifft(spec) * grid.N)

    def spectrum(self) -> FourierCoefficients:
        raw = np.fft.fft(self.values) / self.grid.N
        return FourierCoefficients(self.grid, np.fft.fftshift(raw))

    def fft(self) -> np.ndarray:
        """Coefficients in FFT order (``k = 0..N/2-1`` then ``-N/2..-1``)."""
        return np.fft.fft(self.values) / self.grid.N

    def analytic_coefficients(self) -> np.ndarray:
        return self.fft()[: self.grid.N // 2]

    def conj(self) -> "GridFunction":
        return GridFunction(self.grid, np.conj(self.values))

    def _check(self, other: "GridFunction"):
        if other.grid != self.grid:
            raise GridMismatchError(f"grids differ: {self.grid.N} vs {other.grid.N}")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values + other.values)
        return GridFunction(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values - other.values)
        return GridFunction(self.grid, self.values - other)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values * other.values)
        return GridFunction(self.grid, self.values * other)

    __rmul__ = __mul__

    def evaluate_analytic(self, z) -> np.ndarray:
        """Evaluate the analytic part ``sum_{k>=0} c_k z**k`` inside the disc."""
        c = self.analytic_coefficients()
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), c)


# ---------------------------------------------------------------------------
# Projections and transforms
# ---------------------------------------------------------------------------


def riesz_project(f: GridFunction) -> GridFunction:
    """Keep frequencies ``k >= 0``."""
    c = f.fft()
    c[f.grid.N // 2 :] = 0.0
    return GridFunction(f.grid, np.fft.ifft(c) * f.grid.N)


def herglotz(f: GridFunction) -> GridFunction:
    """Boundary values of ``int (zeta+z)/(zeta-z) f(zeta) dm(zeta)``.

    Equal to ``2 P+ f - mean(f)``.
    """
    c = f.fft()
    mean = c[0]
    return GridFunction(f.grid, 2.0 * riesz_project(f).values - mean)


def herglotz_inside(f: GridFunction, z) -> np.ndarray:
    """Herglotz integral of ``f`` at interior points."""
    c = f.fft()[: f.grid.N // 2].copy()
    c[1:] *= 2.0
    return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), c)


def _pad_spectrum(c: np.ndarray, M: int) -> np.ndarray:
    """Embed FFT-ordered coefficients of an ``N`` grid into an ``M`` grid."""
    N = c.size
    out = np.zeros(M, dtype=complex)
    out[: N // 2] = c[: N // 2]
    out[M - N // 2 :] = c[N // 2 :]
    return out


def toeplitz_coanalytic(H: GridFunction, f: GridFunction, oversample: int = 2) -> GridFunction:
    """``P+(conj(H) f)`` with the product formed on an oversampled grid.

    Raises
    ------
    GridMismatchError
        If ``H`` and ``f`` live on different grids.
    """
    if H.grid != f.grid:
        raise GridMismatchError(f"grids differ: {H.grid.N} vs {f.grid.N}")
    N = f.grid.N
    M = oversample * N
    h = np.fft.ifft(_pad_spectrum(H.fft(), M)) * M
    g = np.fft.ifft(_pad_spectrum(f.fft(), M)) * M
    prod = np.fft.fft(np.conj(h) * g) / M
    out = np.zeros(N, dtype=complex)
    out[: N // 2] = prod[: N // 2]
    return GridFunction(f.grid, np.fft.ifft(out) * N)


def h2_inner(f, g) -> complex:
    """``sum_{k>=0} f_k conj(g_k)``.  Accepts grid functions or coefficient arrays."""
    a = f.analytic_coefficients() if isinstance(f, GridFunction) else np.asarray(f)
    b = g.analytic_coefficients() if isinstance(g, GridFunction) else np.asarray(g)
    n = min(a.size, b.size)
    return complex(np.vdot(b[:n], a[:n]))


def h2_norm(f) -> float:
    a = f.analytic_coefficients() if isinstance(f, GridFunction) else np.asarray(f)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


# ---------------------------------------------------------------------------
# Inner functions on the grid
# ---------------------------------------------------------------------------


class GridSample(NamedTuple):
    values: np.ndarray
    rotated: np.ndarray  # node indices moved by half a step
    skipped: np.ndarray  # node indices still singular after rotation (value set to 0)


def _near_support(theta, z: np.ndarray) -> np.ndarray:
    hit = np.zeros(z.shape, dtype=bool)
    zeta, _ = theta.measure.atom_arrays()
    for a in zeta:
        hit |= np.abs(z - a) < 1e-12
    t = np.mod(np.angle(z) / (2 * np.pi), 1.0)
    for comp in theta.measure.components:
        starts, length = comp.schedule.level_intervals(theta.singular.max_level)
        for lo in range(0, starts.size, 1024):
            rel = np.mod(t[:, None] - starts[None, lo : lo + 1024], 1.0)
            hit |= np.any(rel <= length, axis=1)
    return hit


def theta_on_grid(theta, grid: CircleGrid) -> GridSample:
    """Sample an inner function at the grid nodes.

    Nodes on the singular support are moved by half a grid step.  Nodes
    that remain on the support are skipped and reported.
    """
    z = grid.nodes.copy()
    hit = _near_support(theta, z)
    rotated = np.nonzero(hit)[0]
    z[hit] = z[hit] * np.exp(1j * np.pi / grid.N)
    still = np.zeros_like(hit)
    if rotated.size:
        still[hit] = _near_support(theta, z[hit])
    vals = np.zeros(grid.N, dtype=complex)
    ok = ~still
    vals[ok] = theta(z[ok])
    return GridSample(vals, rotated, np.nonzero(still)[0])


def taylor_coefficients(f: Callable, K: int, radius: float | None = None, oversample: int = 4):
    """First ``K`` Taylor coefficients of an analytic function.

    Samples ``f`` on the circle of radius ``r`` with ``r**K = 1e-3`` (or the
    given radius) using ``oversample * K`` points.  Aliasing from degrees
    beyond the sample count is damped by ``r**(oversample K) = 1e-12``.
    """
    K = int(K)
    r = math.exp(math.log(1e-3) / K) if radius is None else float(radius)
    M = oversample * K
    z = r * np.exp(2j * np.pi * np.arange(M) / M)
    c = np.fft.fft(f(z))[:K] / M
    return c / r ** np.arange(K)


def _correlate_theta(f_coef: np.ndarray, th_coef: np.ndarray) -> np.ndarray:
    """``r_j = sum_{k>=j} f_k conj(th_{k-j})`` for ``j = 0..len(f)-1``."""
    n = f_coef.size
    L = 1 << int(math.ceil(math.log2(2 * n)))
    a = np.fft.fft(f_coef, L)
    b = np.fft.fft(th_coef[:n], L)
    r = np.fft.ifft(a * np.conj(b))
    return r[:n]


def ktheta_membership_residual(theta, f: GridFunction, method: str = "taylor", theta_coeffs=None) -> float:
    """Norm of the projection of ``f`` onto ``Theta H2``, read spectrally.

    The ``j``-th coefficient of ``P+(conj(Theta) f)`` equals
    ``<f, Theta z**j>``.  With ``method="taylor"`` these pairings are formed
    from the Taylor coefficients of ``Theta``; with ``method="grid"`` the
    product is sampled on the grid, which aliases for rough ``Theta``.
    """
    N = f.grid.N
    fc = f.analytic_coefficients()
    if method == "grid":
        sample = theta_on_grid(theta, f.grid)
        prod = np.conj(sample.values) * f.values
        c = np.fft.fft(prod) / N
        return float(np.sqrt(np.sum(np.abs(c[: N // 2]) ** 2)))
    if method != "taylor":
        raise ValueError(f"unknown method {method!r}")
    th = taylor_coefficients(theta, N // 2) if theta_coeffs is None else np.asarray(theta_coeffs)
    r = _correlate_theta(fc, th)
    return float(np.sqrt(np.sum(np.abs(r) ** 2)))


# ---------------------------------------------------------------------------
# Decay reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayReport:
    """Fitted algebraic decay of a spectrum.

    Attributes
    ----------
    exponent : float
        ``p`` in ``max_{j>=k} |c_j| ~ k**(-p)``; ``inf`` when the spectrum
        drops below the noise floor before ``k_min``.
    k_range : tuple
        Fitted range of ``k``.
    tail_sups : dict
        ``sup_{k>=1} |c_k| k**p`` for ``p = 1..4``.
    """

    exponent: float
    k_range: tuple
    tail_sups: dict = field(default_factory=dict)

    @property
    def finite_spectrum(self) -> bool:
        return math.isinf(self.exponent)


def tail_envelope(c: np.ndarray) -> np.ndarray:
    """``max_{j>=k} |c_j|``."""
    return np.maximum.accumulate(np.abs(c)[::-1])[::-1]


def decay_report(f, k_min: int = 16, floor: float = 1e-13, k_max: int | None = None) -> DecayReport:
    """Least-squares fit of log tail envelope against log k.

    The fit uses every integer ``k`` in ``[k_min, min(k_max, k_floor))``
    where ``k_floor`` is the first index at which the envelope falls below
    ``floor`` times its maximum.  ``k_max`` defaults to a quarter of the
    coefficient count (``N/4`` for a grid function).
    """
    if isinstance(f, GridFunction):
        c = f.analytic_coefficients()
        n_full = f.grid.N
    else:
        c = np.asarray(f, dtype=complex)
        n_full = 2 * c.size
    env = tail_envelope(c)
    k = np.arange(c.size, dtype=float)
    sups = {p: float(np.max(np.abs(c[1:]) * k[1:] ** p)) if c.size > 1 else 0.0 for p in (1, 2, 3, 4)}
    top = env[0] if env.size else 0.0
    hi = n_full // 4 if k_max is None else int(k_max)
    if top > 0:
        below = np.nonzero(env < floor * top)[0]
        if below.size:
            hi = min(hi, int(below[0]))
    if top == 0 or hi - k_min < 4:
        return DecayReport(math.inf, (k_min, hi), sups)
    kk = k[k_min:hi]
    slope = np.polyfit(np.log(kk), np.log(env[k_min:hi]), 1)[0]
    return DecayReport(float(-slope), (k_min, hi), sups)
