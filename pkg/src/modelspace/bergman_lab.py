"""Disc quadrature, Bergman and Sobolev norms, the disc pairing identity,
and least-squares cyclicity experiments.

Area integrals use normalized area measure, written in ``s = |z|**2`` so
that ``dA = ds dtheta / (2 pi)``.  Gauss-Legendre in ``s`` with ``R`` nodes
and the trapezoid rule in angle with ``M`` nodes integrate
``z**j conj(z)**k`` exactly for ``j, k <= 2R - 1`` when ``M > j + k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import DerivativeUnavailableError, UnsupportedFormError


@dataclass(frozen=True)
class DiscQuadrature:
    """Product rule on the unit disc for normalized area measure."""

    R: int = 64
    M: int = 512

    @cached_property
    def _tables(self):
        x, w = np.polynomial.legendre.leggauss(self.R)
        s = (x + 1.0) / 2.0
        ws = w / 2.0
        theta = 2.0 * np.pi * np.arange(self.M) / self.M
        z = (np.sqrt(s)[:, None] * np.exp(1j * theta)[None, :]).ravel()
        wt = np.repeat(ws / self.M, self.M)
        return z, wt

    @property
    def nodes(self) -> np.ndarray:
        return self._tables[0]

    @property
    def weights(self) -> np.ndarray:
        return self._tables[1]

    def integrate(self, values) -> complex:
        return complex(np.dot(self.weights, values))

    def doubled(self) -> "DiscQuadrature":
        return DiscQuadrature(2 * self.R, 2 * self.M)


class DiscFunction:
    """Analytic function on the disc, by coefficients or by node samples.

    Parameters
    ----------
    coefficients : array_like, optional
        Taylor coefficients of a polynomial.
    values, derivative_values : array_like, optional
        Samples at the nodes of ``quad`` (sampled form).
    quad : DiscQuadrature, optional
    """

    def __init__(self, coefficients=None, values=None, quad: DiscQuadrature | None = None, derivative_values=None):
        if (coefficients is None) == (values is None):
            raise UnsupportedFormError("give either coefficients or sampled values")
        self.coefficients = None if coefficients is None else np.atleast_1d(np.asarray(coefficients, dtype=complex))
        self.quad = quad
        if values is not None:
            if quad is None:
                raise UnsupportedFormError("sampled values need their quadrature")
            values = np.asarray(values, dtype=complex)
            if values.shape != quad.nodes.shape:
                raise UnsupportedFormError("sample count does not match the quadrature")
        self._values = values
        self._dvalues = None if derivative_values is None else np.asarray(derivative_values, dtype=complex)

    @classmethod
    def polynomial(cls, coefficients) -> "DiscFunction":
        return cls(coefficients=coefficients)

    @property
    def is_polynomial(self) -> bool:
        return self.coefficients is not None

    def __call__(self, z):
        if not self.is_polynomial:
            raise UnsupportedFormError("sampled functions can only be read at their nodes")
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coefficients)

    def values(self, quad: DiscQuadrature) -> np.ndarray:
        if self.is_polynomial:
            return self(quad.nodes)
        if quad != self.quad:
            raise UnsupportedFormError("sampled function lives on a different quadrature")
        return self._values

    def at_zero(self) -> complex:
        if self.is_polynomial:
            return complex(self.coefficients[0])
        raise UnsupportedFormError("value at 0 needs the coefficient form")

    def derivative(self) -> "DiscFunction":
        if self.is_polynomial:
            c = self.coefficients
            d = c[1:] * np.arange(1, c.size) if c.size > 1 else np.zeros(1, complex)
            return DiscFunction(coefficients=d)
        if self._dvalues is None:
            raise DerivativeUnavailableError("sampled function carries no derivative")
        return DiscFunction(values=self._dvalues, quad=self.quad)


def _q(f: DiscFunction, quad: DiscQuadrature | None) -> DiscQuadrature:
    if quad is not None:
        return quad
    return f.quad if f.quad is not None else DiscQuadrature()


def lp_bergman_norm(f: DiscFunction, p: float = 2.0, quad: DiscQuadrature | None = None) -> float:
    """``(int |f|**p dA)**(1/p)``; ``p = inf`` gives the node supremum."""
    quad = _q(f, quad)
    a = np.abs(f.values(quad))
    if math.isinf(p):
        return float(a.max())
    if not p > 0:
        raise ValueError("p must be positive")
    return float(np.dot(quad.weights, a**p) ** (1.0 / p))


def sobolev_norm(f: DiscFunction, p: float = 2.0, quad: DiscQuadrature | None = None) -> float:
    """``||f||_p + ||f'||_p``."""
    return lp_bergman_norm(f, p, quad) + lp_bergman_norm(f.derivative(), p, quad)


def backward_shift(g: DiscFunction) -> DiscFunction:
    """``(g(z) - g(0))/z``."""
    if not g.is_polynomial:
        raise UnsupportedFormError("backward shift needs the coefficient form")
    c = g.coefficients
    return DiscFunction(coefficients=c[1:] if c.size > 1 else np.zeros(1, complex))


class PairingResult(NamedTuple):
    lhs: complex
    rhs: complex
    gap: float
    ratio: float  # |pairing| / (||f||_{W^{1,p}} ||g||_{L^q})


def _conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _disc_integral(f: DiscFunction, g: DiscFunction, quad: DiscQuadrature) -> complex:
    z = quad.nodes
    fp = f.derivative().values(quad)
    gp = g.derivative().values(quad)
    lg = backward_shift(g).values(quad)
    return quad.integrate(fp * np.conj(gp + lg) * (1.0 - np.abs(z) ** 2))


def disc_pairing(f: DiscFunction, g: DiscFunction, quad: DiscQuadrature, f_at_zero=None) -> complex:
    """``f(0) conj(g(0)) + int f' conj(g' + Lg) (1 - |z|**2) dA``."""
    f0 = f.at_zero() if f_at_zero is None else complex(f_at_zero)
    return f0 * np.conj(g.at_zero()) + _disc_integral(f, g, quad)


def cauchy_pairing_disc(f: DiscFunction, g: DiscFunction, p: float = 2.0, quad: DiscQuadrature | None = None) -> PairingResult:
    """Compare the boundary pairing ``sum f_k conj(g_k)`` with its disc form."""
    if not (f.is_polynomial and g.is_polynomial):
        raise UnsupportedFormError("pairing identity is checked on polynomials")
    quad = DiscQuadrature() if quad is None else quad
    a, b = f.coefficients, g.coefficients
    n = min(a.size, b.size)
    lhs = complex(np.dot(a[:n], np.conj(b[:n])))
    rhs = disc_pairing(f, g, quad)
    denom = sobolev_norm(f, p, quad) * lp_bergman_norm(g, _conjugate_exponent(p), quad)
    ratio = abs(rhs) / denom if denom > 0 else 0.0
    rhs = complex(rhs)
    return PairingResult(lhs, rhs, float(abs(lhs - rhs)), float(ratio))


# ---------------------------------------------------------------------------
# Cyclicity
# ---------------------------------------------------------------------------


class CyclicityResult(NamedTuple):
    degrees: tuple
    distances: tuple
    coefficients: np.ndarray  # monomial coefficients of the optimal p at the top degree
    condition: float
    regularization: float


def _theta_values(S, quad: DiscQuadrature) -> np.ndarray:
    return np.asarray(S(quad.nodes), dtype=complex)


def cyclicity_curve(S, degrees, q: float = 2.0, quad: DiscQuadrature | None = None, values=None) -> CyclicityResult:
    """``d_N = min_p ||S p - 1||`` in ``L2_a`` for several degrees at once.

    The problem is solved in the basis ``sqrt(k+1) z**k``, orthonormal in
    ``L2_a``.  A Cholesky factor of the Gram matrix of ``S sqrt(k+1) z**k``
    turns the nested least-squares problems into partial sums, so the
    computed ``d_N`` are exactly nonincreasing in ``N``.
    """
    if q != 2:
        raise UnsupportedFormError("cyclicity distances are computed for q = 2 only")
    quad = DiscQuadrature() if quad is None else quad
    degrees = tuple(sorted(int(d) for d in degrees))
    top = degrees[-1]
    s = _theta_values(S, quad) if values is None else np.asarray(values)
    z = quad.nodes
    k = np.arange(top + 1)
    V = s[:, None] * z[:, None] ** k[None, :] * np.sqrt(k + 1.0)
    WV = V * quad.weights[:, None]
    G = V.conj().T @ WV
    b = WV.conj().T @ np.ones_like(z)
    G = 0.5 * (G + G.conj().T)
    ev = np.linalg.eigvalsh(G)
    cond = float(ev[-1] / ev[0]) if ev[0] > 0 else math.inf
    reg = 0.0
    while True:
        try:
            L = np.linalg.cholesky(G + reg * np.eye(top + 1))
            break
        except np.linalg.LinAlgError:
            reg = max(1e-15, 10.0 * reg) * max(1.0, float(ev[-1]))
    y = np.linalg.solve(L, b)
    one = float(np.sum(quad.weights))
    captured = np.cumsum(np.abs(y) ** 2)
    d2 = np.maximum(one - captured, 0.0)
    # enforce exact monotonicity against rounding in the clip
    d2 = np.minimum.accumulate(d2)
    dist = tuple(float(math.sqrt(d2[d])) for d in degrees)
    coef = np.linalg.solve(L.conj().T, y) * np.sqrt(k + 1.0)
    return CyclicityResult(degrees, dist, coef, cond, reg)


def cyclicity_distance(S, N: int, q: float = 2.0, quad: DiscQuadrature | None = None) -> tuple[float, np.ndarray]:
    """``d_N`` and the optimal polynomial coefficients."""
    res = cyclicity_curve(S, (N,), q, quad)
    return res.distances[0], res.coefficients


# ---------------------------------------------------------------------------
# Obstruction
# ---------------------------------------------------------------------------


def orthogonal_remainder(theta_coeffs: np.ndarray, J: int, degree: int) -> np.ndarray:
    """``1`` minus its H2 projection onto ``span{P(Theta z**j), j <= J}``.

    ``P`` truncates to degree ``degree``; the result is a polynomial of
    degree at most ``degree``, returned by coefficients.
    """
    t = np.asarray(theta_coeffs, dtype=complex)[: degree + 1]
    cols = []
    for j in range(J + 1):
        c = np.zeros(degree + 1, dtype=complex)
        c[j:] = t[: degree + 1 - j]
        cols.append(c)
    A = np.column_stack(cols)
    e0 = np.zeros(degree + 1, dtype=complex)
    e0[0] = 1.0
    x, *_ = np.linalg.lstsq(A, e0, rcond=None)
    return e0 - A @ x


def obstruction_functional(theta_c, f: DiscFunction, g: DiscFunction, p: float = 2.0, quad: DiscQuadrature | None = None) -> complex:
    """Boundary pairing ``int Theta_C f conj(g) dm`` through the disc identity.

    ``theta_c`` is ``None`` for the constant one, or an inner function
    evaluated with its derivative at the nodes.
    """
    quad = DiscQuadrature() if quad is None else quad
    if not g.is_polynomial:
        raise UnsupportedFormError("g must be a polynomial")
    if not np.any(g.coefficients):
        return 0j
    if theta_c is None or getattr(theta_c, "is_constant", False):
        return disc_pairing(f, g, quad)
    z = quad.nodes
    tv, td = theta_c(z), theta_c.derivative(z, 1)
    fv, fd = f.values(quad), f.derivative().values(quad)
    F = DiscFunction(values=tv * fv, quad=quad, derivative_values=td * fv + tv * fd)
    f0 = complex(theta_c(np.array(0j))) * f.at_zero()
    return disc_pairing(F, g, quad, f_at_zero=f0)
