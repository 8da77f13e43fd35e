"""Blow-up profiles, smoothing outer functions and kernel approximation.

For a finite closed set ``E`` with gaps ``(a_k, a_k + L_k)`` the profile

    h(t) = c (log(e L_k / delta_k(t)))**alpha,   delta_k = distance to the gap ends,

is integrable with closed-form gap integrals.  Cutting ``h`` off near the
ends of the first ``n`` gaps gives weights ``h (1 - phi_n)`` whose outer
functions ``H_n`` are bounded by one and tend to one off ``E``.  Applying
the co-analytic Toeplitz operator with symbol ``conj(H_n)`` to a model-space
kernel keeps it in the model space and makes its boundary values smooth.

Boundary computations use cell averages of the weight on a uniform grid,
a narrow discrete Gaussian mollifier and an FFT conjugate function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate
from scipy.special import gamma, gammaincc

from .boundary_measures import ArcSet, SingularMeasure, decompose
from .circle_harmonics import (
    CircleGrid,
    DecayReport,
    GridFunction,
    decay_report,
    taylor_coefficients,
    theta_on_grid,
    _correlate_theta,
)
from .errors import (
    DomainError,
    HypothesisViolationError,
    IntegrabilityError,
    SupportMismatchError,
    UnsupportedFormError,
)
from .inner_functions import InnerFunction, KernelSpec, SingularInner, factor_truncate, reproducing_kernel

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def smoothstep(x):
    """C-infinity step: 0 for ``x <= 0``, 1 for ``x >= 1``."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / x), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / (1.0 - x)), 0.0)
    return a / (a + b)


# ---------------------------------------------------------------------------
# Profile
# ---------------------------------------------------------------------------


def _primitive(x, alpha: float):
    """``int_0^x (1 + log(1/s))**alpha ds`` for ``0 <= x <= 1``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    pos = x > 0
    out[pos] = math.e * gamma(alpha + 1.0) * gammaincc(alpha + 1.0, 1.0 + np.log(1.0 / x[pos]))
    return out


@dataclass(frozen=True)
class BlowupProfile:
    """Log-power blow-up profile on the gaps of a finite closed set.

    Attributes
    ----------
    gaps : tuple of (start, length)
        Gaps in turns, sorted by decreasing length (ties by start).
    alpha, c : float
    """

    gaps: tuple
    alpha: float
    c: float

    @property
    def support(self) -> ArcSet:
        return ArcSet(tuple((a, a + L) for a, L in self.gaps))

    def gap_integral(self, k: int) -> float:
        """``int h dt`` over gap ``k`` (turns)."""
        L = self.gaps[k][1]
        return 2.0 * self.c * L * float(_primitive(0.5, self.alpha))

    @property
    def total_integral(self) -> float:
        return math.fsum(self.gap_integral(k) for k in range(len(self.gaps)))

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, np.inf)
        for a, L in self.gaps:
            u = np.mod(t - a, 1.0)
            inside = (u > 0) & (u < L)
            d = np.minimum(u, L - u)
            with np.errstate(divide="ignore", invalid="ignore"):
                val = self.c * np.log(math.e * L / d) ** self.alpha
            out = np.where(inside, val, out)
        return out

    def blowup_radius(self, level: float, k: int = 0) -> float:
        """Distance to an end of gap ``k`` within which ``h >= level``."""
        L = self.gaps[k][1]
        if level <= self.c:
            return 0.5 * L
        return math.e * L * math.exp(-((level / self.c) ** (1.0 / self.alpha)))


def build_profile(E, alpha: float = 1.0, c: float = 1.0) -> BlowupProfile:
    """Profile on the gaps of a finite Beurling-Carleson set.

    Raises
    ------
    DomainError
        If ``E`` is not a finite arc set of measure zero or parameters are
        not positive.
    IntegrabilityError
        If ``sum L_k log(1/L_k)**alpha`` is not finite.
    """
    if not isinstance(E, ArcSet):
        raise DomainError("profiles are built on finite arc sets")
    if not E.is_null():
        raise DomainError(f"closed set has positive measure {E.measure:.3e}")
    if not (0 < alpha < math.inf and 0 < c < math.inf):
        raise DomainError("alpha and c must be positive")
    lengths = E.lengths
    with np.errstate(over="ignore"):
        partial = float(np.sum(lengths * np.log(np.e / lengths) ** alpha))
    if not math.isfinite(partial):
        raise IntegrabilityError(f"sum L (log e/L)**alpha is not finite: {partial}")
    gaps = sorted(((s, e - s) for s, e in E.arcs), key=lambda g: (-g[1], g[0]))
    return BlowupProfile(tuple(gaps), float(alpha), float(c))


# ---------------------------------------------------------------------------
# Cutoffs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffFamily:
    """Cutoffs ``phi_n`` equal to one on the middle of the first ``n`` gaps.

    ``psi_n(x) = smoothstep(2 d / eps_n - 1)`` with ``d = min(x, 1 - x)``
    vanishes for ``d <= eps_n / 2`` and equals one for ``d >= eps_n``, where
    ``eps_n = min(1/n, (2/n)**exponent / 2)``.  Hence ``psi_n = 1`` on
    ``[1/n, 1 - 1/n]`` and ``psi_n`` increases with ``n``.
    """

    exponent: float = 3.2

    def width(self, n: int) -> float:
        if n < 1:
            return math.inf
        return min(1.0 / n, 0.5 * (2.0 / n) ** self.exponent)

    def psi(self, n: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = np.minimum(x, 1.0 - x)
        inside = (x > 0) & (x < 1)
        return np.where(inside, smoothstep(2.0 * d / self.width(n) - 1.0), 0.0)

    def phi(self, profile: BlowupProfile, n: int, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for a, L in profile.gaps[:n]:
            out = out + self.psi(n, np.mod(t - a, 1.0) / L)
        return out


# ---------------------------------------------------------------------------
# Smoothing sequence
# ---------------------------------------------------------------------------


def _segment_integral(xlo, xhi, alpha: float, eps: float | None) -> np.ndarray:
    """``int_xlo^xhi (1 + log 1/x)**alpha (1 - psi(x)) dx`` on ``[0, 1/2]``."""
    if eps is None or eps >= 1.0:
        return _primitive(xhi, alpha) - _primitive(xlo, alpha)
    half = 0.5 * eps
    out = _primitive(np.minimum(xhi, half), alpha) - _primitive(np.minimum(xlo, half), alpha)
    out = np.maximum(out, 0.0)
    rlo = np.maximum(xlo, half)
    rhi = np.minimum(xhi, eps)
    ramp = rhi > rlo
    if np.any(ramp):
        a, b = rlo[ramp], rhi[ramp]
        s = a[:, None] + (b - a)[:, None] * (_GL_NODES + 1.0) / 2.0
        f = (1.0 + np.log(1.0 / s)) ** alpha * (1.0 - smoothstep(2.0 * s / eps - 1.0))
        out[ramp] += (f @ _GL_WEIGHTS) * (b - a) / 2.0
    return out


@dataclass(frozen=True)
class SmoothingSequence:
    """Outer functions of the cut-off weights on a uniform work grid.

    Parameters
    ----------
    profile : BlowupProfile
    cutoffs : CutoffFamily
    M : int
        Work-grid size (power of two).
    mollifier_width : float
        Standard deviation, in cells, of the discrete Gaussian applied to
        the cell averages before the conjugate function is taken.
    """

    profile: BlowupProfile
    cutoffs: CutoffFamily = field(default_factory=CutoffFamily)
    M: int = 2**14
    mollifier_width: float = 4.0

    @property
    def grid(self) -> CircleGrid:
        return CircleGrid(self.M)

    def _eps(self, n: int, k: int):
        return self.cutoffs.width(n) if k < n else None

    def cell_weights(self, n: int) -> np.ndarray:
        """Cell averages of ``h (1 - phi_n)``; ``n = 0`` gives ``h``."""
        M = self.M
        hcell = 1.0 / M
        t = np.arange(M) / M
        w = np.zeros(M)
        alpha = self.profile.alpha
        for k, (a, L) in enumerate(self.profile.gaps):
            eps = self._eps(n, k)
            u = np.mod(t - a, 1.0)
            reach = L if eps is None else eps * L
            for shift in (-1.0, 0.0, 1.0):
                lo = np.clip(u + shift - 0.5 * hcell, 0.0, L)
                hi = np.clip(u + shift + 0.5 * hcell, 0.0, L)
                near = (hi > lo) & ((lo < reach) | (hi > L - reach))
                idx = np.nonzero(near)[0]
                if idx.size == 0:
                    continue
                lo, hi = lo[idx] / L, hi[idx] / L
                left = _segment_integral(lo, np.maximum(np.minimum(hi, 0.5), lo), alpha, eps)
                rlo = np.minimum(np.maximum(lo, 0.5), hi)
                right = _segment_integral(1.0 - hi, 1.0 - rlo, alpha, eps)
                w[idx] += self.profile.c * L * (left + right) * M
        return w

    def weight_integral(self, n: int) -> float:
        """``int h (1 - phi_n) dt`` by closed form plus adaptive quadrature."""
        p = self.profile
        total = []
        for k, (a, L) in enumerate(p.gaps):
            eps = self._eps(n, k)
            if eps is None:
                total.append(p.gap_integral(k))
                continue
            pure = float(_primitive(0.5 * eps, p.alpha))
            f = lambda s: (1.0 + math.log(1.0 / s)) ** p.alpha * (1.0 - float(smoothstep(2.0 * s / eps - 1.0)))
            ramp = integrate.quad(f, 0.5 * eps, eps, epsabs=0.0, epsrel=1e-12, limit=200)[0]
            total.append(2.0 * p.c * L * (pure + ramp))
        return math.fsum(total)

    def _multiplier(self) -> np.ndarray:
        k = np.fft.fftfreq(self.M, d=1.0 / self.M)
        return np.exp(-2.0 * math.pi**2 * (self.mollifier_width * k / self.M) ** 2)

    def log_coefficients(self, n: int) -> np.ndarray:
        """Taylor coefficients of ``G`` with ``H_n = exp(-G)``, FFT ordered."""
        M = self.M
        wh = np.fft.fft(self.cell_weights(n)) / M * self._multiplier()
        co = np.zeros(M, dtype=complex)
        co[0] = wh[0].real
        co[1 : M // 2] = 2.0 * wh[1 : M // 2]
        co[M // 2] = wh[M // 2].real
        return co

    def boundary(self, n: int) -> GridFunction:
        co = self.log_coefficients(n)
        return GridFunction(self.grid, np.exp(-np.fft.ifft(co) * self.M))

    def interior(self, n: int, z) -> np.ndarray:
        co = self.log_coefficients(n)[: self.M // 2 + 1]
        return np.exp(-np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), co))


def smoothing_function(seq: SmoothingSequence, n: int) -> GridFunction:
    """Boundary values of ``H_n`` on the work grid of ``seq``."""
    if n < 1:
        raise DomainError("smoothing index must be >= 1")
    return seq.boundary(n)


# ---------------------------------------------------------------------------
# Outer function by quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OuterFunction:
    """``g = exp(-int (zeta+z)/(zeta-z) h dt)`` evaluated by quadrature.

    Each half gap is integrated in ``u = log(L/delta)``, which turns the
    logarithmic blow-up into an exponentially decaying integrand.
    """

    profile: BlowupProfile
    epsrel: float = 1e-11

    def _integral(self, z: complex, power: int) -> complex:
        # power 0: herglotz kernel; power p >= 1: p-th derivative in z
        p = self.profile
        total = 0j
        r = abs(z)
        peak = math.log(1.0 / max(1.0 - r, 1e-300))
        for a, L in p.gaps:
            for side in (0, 1):
                def kern(u, re):
                    d = L * math.exp(-u)
                    t = a + d if side == 0 else a + L - d
                    zeta = complex(math.cos(2 * math.pi * t), math.sin(2 * math.pi * t))
                    if power == 0:
                        k = (zeta + z) / (zeta - z)
                    else:
                        k = 2.0 * zeta * math.factorial(power) / (zeta - z) ** (power + 1)
                    val = k * p.c * (1.0 + u) ** p.alpha * d
                    return val.real if re else val.imag

                lo = math.log(2.0)
                brk = sorted({lo, max(lo, peak + math.log(L) - 5), max(lo, peak + math.log(L) + 5), 60.0, 740.0})
                acc = 0j
                for x0, x1 in zip(brk, brk[1:]):
                    if x1 <= x0:
                        continue
                    re = integrate.quad(kern, x0, x1, args=(True,), epsabs=1e-15, epsrel=self.epsrel, limit=400)[0]
                    im = integrate.quad(kern, x0, x1, args=(False,), epsabs=1e-15, epsrel=self.epsrel, limit=400)[0]
                    acc += complex(re, im)
                total += acc
        return total

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.array([np.exp(-self._integral(complex(v), 0)) for v in z.ravel()])
        return out.reshape(z.shape)

    def derivative(self, z, order: int = 1):
        """``g'`` or ``g''`` from ``g' = -g F'`` and ``g'' = g (F'**2 - F'')``."""
        if order not in (1, 2):
            raise DomainError("outer derivatives are available for orders 1 and 2")
        z = np.asarray(z, dtype=complex)
        res = []
        for v in z.ravel():
            v = complex(v)
            g = np.exp(-self._integral(v, 0))
            f1 = self._integral(v, 1)
            if order == 1:
                res.append(-g * f1)
            else:
                res.append(g * (f1 * f1 - self._integral(v, 2)))
        return np.array(res).reshape(z.shape)


def outer_from_profile(profile: BlowupProfile) -> OuterFunction:
    return OuterFunction(profile)


# ---------------------------------------------------------------------------
# Smoothed products
# ---------------------------------------------------------------------------


class SmoothProductReport(NamedTuple):
    product_decay: DecayReport
    theta_decay: DecayReport
    radial: dict  # (k, l) -> |S^(k) g^(l)| along the radius toward the support point
    radii: tuple


def _theta_sample(theta: InnerFunction, grid: CircleGrid) -> tuple[np.ndarray, np.ndarray]:
    sample = theta_on_grid(theta, grid)
    z = grid.nodes
    z[sample.rotated] *= np.exp(1j * np.pi / grid.N)
    return sample.values, z


def smooth_product_check(
    S: SingularInner,
    H: GridFunction,
    outer: OuterFunction | None = None,
    radii=(1 - 1e-2, 1 - 1e-3, 1 - 1e-4),
    support_point: complex = 1.0,
) -> SmoothProductReport:
    """Smoothness of ``P+(conj(H) S)`` compared with ``S`` itself.

    ``H`` holds boundary samples of the outer function (or of a smoothing
    function) on a work grid.  When ``outer`` is given, products of
    derivatives ``S^(k) g^(l)``, ``k, l <= 2``, are sampled along the
    radius ending at ``support_point``.

    Raises
    ------
    SupportMismatchError
        If an atom of ``S`` lies off the closed set of the profile.
    """
    theta = InnerFunction(singular=S)
    if outer is not None:
        E = outer.profile.support
        for pos, _ in S.measure.atoms:
            if not bool(E.contains_angle(pos)):
                raise SupportMismatchError(f"atom at {pos} lies off the profile's zero set")
    grid = H.grid
    vals, _ = _theta_sample(theta, grid)
    prod = np.fft.fft(np.conj(H.values) * vals) / grid.N
    product_decay = decay_report(prod[: grid.N // 2])
    if S.measure.is_zero:
        theta_coef = np.zeros(grid.N // 2, dtype=complex)
        theta_coef[0] = 1.0
    else:
        theta_coef = taylor_coefficients(theta, grid.N // 2)
    theta_decay = decay_report(theta_coef)
    radial = {}
    if outer is not None:
        zs = np.array([r * support_point for r in radii], dtype=complex)
        gd = {0: outer(zs), 1: outer.derivative(zs, 1), 2: outer.derivative(zs, 2)}
        sd = {0: S(zs)}
        jet = S.jet(zs, 2)
        sd[1], sd[2] = jet[1], 2.0 * jet[2]
        for k in range(3):
            for l in range(3):
                radial[(k, l)] = tuple(float(v) for v in np.abs(sd[k] * gd[l]))
    return SmoothProductReport(product_decay, theta_decay, radial, tuple(radii))


# ---------------------------------------------------------------------------
# Kernel approximation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelApproximation:
    n: int
    approximant: np.ndarray  # Taylor coefficients 0..N/2-1
    h2_error: float
    membership_residual: float
    decay: DecayReport
    kernel_decay: DecayReport
    dominating_bound: float  # L2 grid norm of (H_n - 1) k

    def grid_function(self) -> GridFunction:
        N = 2 * self.approximant.size
        return GridFunction.from_analytic(CircleGrid(N), self.approximant)


def _support_set(measure: SingularMeasure) -> ArcSet | None:
    if measure.is_zero:
        return None
    return ArcSet.from_points([p for p, _ in measure.atoms])


class KernelSmoother:
    """Smooth approximants ``P+(conj(H_n) k_Theta(lam, .))`` of one kernel.

    Parameters
    ----------
    theta : InnerFunction
        Blaschke zeros and point masses; Cantor components with divergent
        entropy violate the hypothesis, convergent ones are not supported.
    lam : complex
    N : int
        Approximant grid; approximants keep ``N/2`` Taylor coefficients.
    oversample : int
        Work grid is ``oversample * N``; products are formed there.
    alpha, c, cutoff_exponent, mollifier_width
        Profile and cutoff parameters.
    """

    def __init__(
        self,
        theta: InnerFunction,
        lam: complex,
        N: int = 2**20,
        oversample: int = 2,
        alpha: float = 3.0,
        c: float = 0.03,
        cutoff_exponent: float = 3.2,
        mollifier_width: float = 4.0,
        fit_max: int | None = None,
    ):
        dec = decompose(theta.measure)
        if not dec.kr.is_zero:
            raise HypothesisViolationError(
                f"measure has a part of mass {dec.kr.total_mass} charging no Beurling-Carleson set"
            )
        if theta.measure.components:
            raise UnsupportedFormError("kernel smoothing supports point masses only")
        self.theta = theta
        self.spec = KernelSpec(theta, lam)
        self.grid = CircleGrid(N)
        self.work = CircleGrid(oversample * N)
        E = _support_set(theta.measure)
        self.sequence = None
        if E is not None:
            profile = build_profile(E, alpha, c)
            self.sequence = SmoothingSequence(profile, CutoffFamily(cutoff_exponent), self.work.N, mollifier_width)
        self.fit_max = N // 4 if fit_max is None else int(fit_max)
        self._cache = {}

    @property
    def trivial(self) -> bool:
        return self.theta.is_constant

    def _kernel_work(self) -> np.ndarray:
        if "kw" not in self._cache:
            vals, z = _theta_sample(self.theta, self.work)
            self._cache["kw"] = reproducing_kernel(self.spec, z, theta_z=vals)
        return self._cache["kw"]

    def kernel_coefficients(self) -> np.ndarray:
        if "kc" not in self._cache:
            K = self.grid.N // 2
            if self.trivial:
                self._cache["kc"] = np.zeros(K, dtype=complex)
            else:
                self._cache["kc"] = taylor_coefficients(lambda z: reproducing_kernel(self.spec, z), K)
        return self._cache["kc"]

    def theta_coefficients(self) -> np.ndarray:
        if "tc" not in self._cache:
            self._cache["tc"] = taylor_coefficients(self.theta, self.grid.N // 2)
        return self._cache["tc"]

    def kernel_decay(self) -> DecayReport:
        return decay_report(self.kernel_coefficients(), k_max=self.fit_max)

    def approximate(self, n: int) -> KernelApproximation:
        K = self.grid.N // 2
        kdec = self.kernel_decay()
        if self.trivial:
            zero = np.zeros(K, dtype=complex)
            return KernelApproximation(n, zero, 0.0, 0.0, decay_report(zero, k_max=self.fit_max), kdec, 0.0)
        kw = self._kernel_work()
        M = self.work.N
        if self.sequence is None:
            H = np.ones(M, dtype=complex)
        else:
            H = self.sequence.boundary(n).values
        A = (np.fft.fft(np.conj(H) * kw) / M)[:K]
        kc = self.kernel_coefficients()
        err2 = float(np.sum(np.abs(A) ** 2)) - 2.0 * float(np.vdot(kc, A).real) + self.spec.diagonal
        if self.sequence is None:
            err2 = float(np.sum(np.abs(A - kc) ** 2))
        resid = _correlate_theta(A, self.theta_coefficients())
        dominating = float(np.sqrt(np.mean(np.abs((H - 1.0) * kw) ** 2)))
        return KernelApproximation(
            n,
            A,
            math.sqrt(max(err2, 0.0)),
            float(np.sqrt(np.sum(np.abs(resid) ** 2))),
            decay_report(A, k_max=self.fit_max),
            kdec,
            dominating,
        )


def approximate_kernel(theta: InnerFunction, lam: complex, n: int, **kw) -> KernelApproximation:
    """One approximant; see :class:`KernelSmoother` for the parameters."""
    return KernelSmoother(theta, lam, **kw).approximate(n)


class TruncatedApproximation(NamedTuple):
    approximation: KernelApproximation
    kernel_gap: tuple  # |k_{Theta_N}(lam, z) - k_Theta(lam, z)| at the sample points
    sample_points: tuple


def approximate_truncated(
    theta: InnerFunction, lam: complex, N: int, n: int, sample_points=(0.0,), grid_size: int = 2**20, **kw
):
    """Approximate the kernel of the truncated inner function ``Theta_N``.

    ``grid_size`` is the approximant grid passed to :class:`KernelSmoother`.
    """
    theta_n = factor_truncate(theta, N)
    approx = approximate_kernel(theta_n, lam, n, N=grid_size, **kw)
    z = np.asarray(sample_points, dtype=complex)
    gap = np.abs(reproducing_kernel(KernelSpec(theta_n, lam), z) - reproducing_kernel(KernelSpec(theta, lam), z))
    return TruncatedApproximation(approx, tuple(float(g) for g in gap), tuple(complex(p) for p in z))
