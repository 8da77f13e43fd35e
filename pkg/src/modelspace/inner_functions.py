"""Blaschke products, singular inner functions and model-space kernels.

Derivatives are computed from local Taylor jets: each factor is expanded
around the evaluation point and jets are multiplied as truncated power
series.  For the singular factor the jet of the Herglotz integral is known
in closed form and the exponential is taken by the usual power-series
recurrence, which is the same as repeated differentiation of
``S' = -S F'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .boundary_measures import (
    Discretization,
    SingularMeasure,
    boundary_distance,
    decompose,
    discretize,
    support_sets,
)
from .errors import DecompositionRequiredError, SingularityError, UnsupportedOrderError

MAX_ORDER = 4
ATOM_CHUNK = 64
COLLISION_TOL = 1e-13


# ---------------------------------------------------------------------------
# Jet arithmetic
# ---------------------------------------------------------------------------


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    out = np.zeros_like(a)
    for n in range(k):
        for j in range(n + 1):
            out[n] += a[j] * b[n - j]
    return out


def _jet_exp(a: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    g = np.zeros_like(a)
    g[0] = np.exp(a[0])
    for n in range(1, k):
        acc = np.zeros_like(a[0])
        for j in range(1, n + 1):
            acc = acc + j * a[j] * g[n - j]
        g[n] = acc / n
    return g


def _jet_to_derivative(jet: np.ndarray, k: int) -> np.ndarray:
    return jet[k] * math.factorial(k)


# ---------------------------------------------------------------------------
# Blaschke products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product.

    Each zero ``a`` contributes ``(|a|/a)(a - z)/(1 - conj(a) z)``; a zero
    at the origin contributes the factor ``z``.
    """

    zeros: tuple = ()

    def __post_init__(self):
        zs = tuple(complex(a) for a in self.zeros)
        for a in zs:
            if not abs(a) < 1.0:
                raise SingularityError(f"Blaschke zero {a} is not in the open disc")
        object.__setattr__(self, "zeros", zs)

    def __len__(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape, dtype=complex)
        for a in self.zeros:
            if a == 0:
                out = out * z
            else:
                out = out * (abs(a) / a) * (a - z) / (1.0 - np.conj(a) * z)
        return out

    def jet(self, z, order: int) -> np.ndarray:
        """Taylor coefficients ``B^(j)(z)/j!`` for ``j <= order``."""
        z = np.asarray(z, dtype=complex)
        jet = np.zeros((order + 1,) + z.shape, dtype=complex)
        jet[0] = 1.0
        for a in self.zeros:
            f = np.zeros_like(jet)
            if a == 0:
                f[0] = z
                if order >= 1:
                    f[1] = 1.0
            else:
                u = abs(a) / a
                d = 1.0 - np.conj(a) * z
                q = np.conj(a) / d
                for j in range(order + 1):
                    term = (a - z) * q**j
                    if j >= 1:
                        term = term - q ** (j - 1)
                    f[j] = u * term / d
            jet = _jet_mul(jet, f)
        return jet


def eval_blaschke(B: BlaschkeProduct, z):
    return B(z)


# ---------------------------------------------------------------------------
# Singular inner functions
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _cached_discretize(measure: SingularMeasure, level: int) -> Discretization:
    return discretize(measure, level)


class Evaluation(NamedTuple):
    value: np.ndarray
    error_bound: np.ndarray


class DerivativeValue(NamedTuple):
    value: np.ndarray
    scaled: np.ndarray  # |value| * dist(z, E)**(2k): empirical size of the constant


def _herglotz_jet(zeta: np.ndarray, mass: np.ndarray, z: np.ndarray, order: int) -> np.ndarray:
    """Jet of ``F(z) = sum m (zeta + z)/(zeta - z)`` at ``z``."""
    jet = np.zeros((order + 1,) + z.shape, dtype=complex)
    zf = z.reshape(-1)
    for lo in range(0, zeta.size, ATOM_CHUNK):
        zc = zeta[lo : lo + ATOM_CHUNK, None]
        mc = mass[lo : lo + ATOM_CHUNK, None]
        diff = zc - zf[None, :]
        if np.any(np.abs(diff) < COLLISION_TOL):
            raise SingularityError("evaluation point coincides with a point mass")
        inv = 1.0 / diff
        num = 2.0 * mc * zc * inv
        jet[0] += (np.sum(num, axis=0) - np.sum(mc)).reshape(z.shape)
        for j in range(1, order + 1):
            num = num * inv
            jet[j] += np.sum(num, axis=0).reshape(z.shape)
    return jet


@dataclass(frozen=True)
class SingularInner:
    """Singular inner function ``exp(-int (zeta+z)/(zeta-z) dnu)``.

    Atomic measures are evaluated exactly.  Cantor components are replaced
    by midpoint atoms at a level refined until the discretization bound is
    below ``tol`` at every requested point, or ``max_level`` is reached.
    """

    measure: SingularMeasure = field(default_factory=SingularMeasure)
    tol: float = 1e-8
    min_level: int = 6
    max_level: int = 14
    level: int | None = None

    def _check_boundary(self, z: np.ndarray):
        on_circle = np.abs(z) >= 1.0 - 1e-15
        if not np.any(on_circle) or self.measure.is_atomic:
            return
        zc = z[on_circle]
        for comp in self.measure.components:
            starts, length = comp.schedule.level_intervals(self.max_level)
            t = np.mod(np.angle(zc) / (2 * np.pi), 1.0)
            rel = np.mod(t[:, None] - starts[None, :], 1.0)
            if np.any(rel <= length):
                raise SingularityError("boundary point lies on the Cantor support")

    def _atoms_for(self, z: np.ndarray) -> tuple[Discretization | None, np.ndarray]:
        if self.measure.is_atomic:
            return None, np.zeros(z.shape)
        if self.level is not None:
            disc = _cached_discretize(self.measure, int(self.level))
            return disc, disc.error_bound(z)
        self._check_boundary(z)
        level = self.min_level
        while True:
            disc = _cached_discretize(self.measure, level)
            bound = disc.error_bound(z)
            if level >= self.max_level or np.all(bound <= self.tol):
                return disc, bound
            level += 1

    def evaluate(self, z) -> Evaluation:
        z = np.asarray(z, dtype=complex)
        disc, bound = self._atoms_for(z)
        meas = self.measure if disc is None else disc.measure
        zeta, mass = meas.atom_arrays()
        F = _herglotz_jet(zeta, mass, z, 0)[0]
        return Evaluation(np.exp(-F), bound)

    def __call__(self, z):
        return self.evaluate(z).value

    def jet(self, z, order: int) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        disc, _ = self._atoms_for(z)
        meas = self.measure if disc is None else disc.measure
        zeta, mass = meas.atom_arrays()
        return _jet_exp(-_herglotz_jet(zeta, mass, z, order))


def eval_singular_inner(S: SingularInner, z) -> Evaluation:
    return S.evaluate(z)


def _support_distance(measure: SingularMeasure, z: np.ndarray) -> np.ndarray:
    d = np.full(z.shape, np.inf)
    for s in support_sets(measure):
        d = np.minimum(d, boundary_distance(s, z))
    return d


def inner_derivative(S: SingularInner, z, order: int = 1) -> DerivativeValue:
    """``k``-th derivative of a singular inner function, ``1 <= k <= 4``.

    Returns the value together with ``|S^(k)(z)| dist(z, E)**(2k)``, the
    empirical size of the constant in the crude derivative estimate.
    """
    if not 1 <= int(order) <= MAX_ORDER:
        raise UnsupportedOrderError(f"derivative order must lie in 1..{MAX_ORDER}, got {order}")
    k = int(order)
    z = np.asarray(z, dtype=complex)
    val = _jet_to_derivative(S.jet(z, k), k)
    d = _support_distance(S.measure, z)
    return DerivativeValue(val, np.abs(val) * d ** (2 * k))


# ---------------------------------------------------------------------------
# Full inner functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InnerFunction:
    """Inner function ``B * S_nu``."""

    blaschke: BlaschkeProduct = field(default_factory=BlaschkeProduct)
    singular: SingularInner = field(default_factory=SingularInner)

    @classmethod
    def build(cls, zeros=(), measure: SingularMeasure | None = None, **kw) -> "InnerFunction":
        meas = SingularMeasure() if measure is None else measure
        return cls(BlaschkeProduct(tuple(zeros)), SingularInner(meas, **kw))

    @property
    def measure(self) -> SingularMeasure:
        return self.singular.measure

    @property
    def is_constant(self) -> bool:
        return len(self.blaschke) == 0 and self.measure.is_zero

    @property
    def is_blaschke(self) -> bool:
        return self.measure.is_zero

    def evaluate(self, z) -> Evaluation:
        z = np.asarray(z, dtype=complex)
        s = self.singular.evaluate(z)
        return Evaluation(self.blaschke(z) * s.value, s.error_bound)

    def __call__(self, z):
        return self.evaluate(z).value

    def jet(self, z, order: int) -> np.ndarray:
        return _jet_mul(self.blaschke.jet(z, order), self.singular.jet(z, order))

    def derivative(self, z, order: int = 1) -> np.ndarray:
        if not 0 <= int(order) <= MAX_ORDER:
            raise UnsupportedOrderError(f"derivative order must lie in 0..{MAX_ORDER}, got {order}")
        return _jet_to_derivative(self.jet(z, int(order)), int(order))


@dataclass(frozen=True)
class KernelSpec:
    theta: InnerFunction
    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if not abs(lam) < 1.0:
            raise SingularityError(f"kernel point {lam} is not in the open disc")
        object.__setattr__(self, "lam", lam)

    @property
    def theta_lam(self) -> complex:
        return complex(self.theta(np.array(self.lam)))

    @property
    def diagonal(self) -> float:
        """``k(lam, lam) = (1 - |Theta(lam)|**2)/(1 - |lam|**2)``, the squared norm."""
        return (1.0 - abs(self.theta_lam) ** 2) / (1.0 - abs(self.lam) ** 2)


def reproducing_kernel(spec: KernelSpec, z, theta_z=None):
    """``(1 - conj(Theta(lam)) Theta(z)) / (1 - conj(lam) z)``.

    ``theta_z`` may carry precomputed values of ``Theta`` at ``z``.
    """
    z = np.asarray(z, dtype=complex)
    if spec.theta.is_constant:
        return np.zeros(z.shape, dtype=complex)
    tz = spec.theta(z) if theta_z is None else theta_z
    return (1.0 - np.conj(spec.theta_lam) * tz) / (1.0 - np.conj(spec.lam) * z)


def factor_truncate(theta: InnerFunction, N: int) -> InnerFunction:
    """Keep the first ``N`` zeros and the first ``N`` BC-carried pieces.

    Pieces are ordered as by :func:`decompose`: atoms first, then
    Beurling-Carleson components.

    Raises
    ------
    DecompositionRequiredError
        If the measure has a part that charges no Beurling-Carleson set.
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    dec = decompose(theta.measure)
    if not dec.kr.is_zero:
        raise DecompositionRequiredError(
            f"measure has a BC-null part of mass {dec.kr.total_mass}; truncate its BC part only"
        )
    atoms = dec.bc.atoms[:N]
    comps = dec.bc.components[: max(0, N - len(dec.bc.atoms))]
    s = theta.singular
    return InnerFunction(
        BlaschkeProduct(theta.blaschke.zeros[:N]),
        SingularInner(SingularMeasure(atoms, comps), s.tol, s.min_level, s.max_level, s.level),
    )
