"""Closed boundary sets, Cantor-type gap schedules and singular measures.

Angles are measured in normalized turns, so the full circle has length 1,
and logarithms are natural.  A closed set ``E`` on the circle is stored
through its complementary open arcs.  Self-similar Cantor sets are stored
through a :class:`GapSchedule`, which gives the gap lengths in closed form.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .errors import DomainError, RepresentationError, UnsupportedScheduleError

MEASURE_TOL = 1e-12
TWO_PI = 2.0 * math.pi


def _wrap(t: float) -> float:
    t = math.fmod(float(t), 1.0)
    if t < 0:
        t += 1.0
    return 0.0 if t >= 1.0 else t


def _xlogx_inv(x: float) -> float:
    return 0.0 if x <= 0.0 or x >= 1.0 else -x * math.log(x)


# ---------------------------------------------------------------------------
# Arc sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArcSet:
    """Closed set ``E`` given by its complementary open arcs.

    Parameters
    ----------
    arcs : sequence of (start, end)
        Open arcs in turns with ``0 < end - start <= 1``.  Starts are
        reduced modulo 1 and the list is sorted.  Arcs sharing an endpoint
        are kept separate because the shared point belongs to ``E``.

    Raises
    ------
    RepresentationError
        If an arc is empty, longer than the circle, or two arcs overlap.
    """

    arcs: tuple = ()

    def __post_init__(self):
        canon = []
        for a in self.arcs:
            if len(a) != 2:
                raise RepresentationError(f"arc {a!r} is not a (start, end) pair")
            s, e = float(a[0]), float(a[1])
            length = e - s
            if not (length > 0.0) or length > 1.0 + MEASURE_TOL:
                raise RepresentationError(f"arc ({s}, {e}) has invalid length {length}")
            s0 = _wrap(s)
            canon.append((s0, s0 + min(length, 1.0)))
        canon.sort()
        for (s1, e1), (s2, e2) in zip(canon, canon[1:]):
            if s2 < e1 - MEASURE_TOL:
                raise RepresentationError(f"arcs ({s1}, {e1}) and ({s2}, {e2}) overlap")
        if len(canon) > 1:
            s_first = canon[0][0]
            s_last, e_last = canon[-1]
            if e_last - 1.0 > s_first + MEASURE_TOL:
                raise RepresentationError("last arc wraps into the first arc")
        if math.fsum(e - s for s, e in canon) > 1.0 + MEASURE_TOL:
            raise RepresentationError("total arc length exceeds 1")
        object.__setattr__(self, "arcs", tuple(canon))

    @classmethod
    def from_points(cls, points: Sequence[float]) -> "ArcSet":
        """Finite closed set of points (angles in turns)."""
        pts = sorted({_wrap(p) for p in points})
        if not pts:
            raise RepresentationError("a point set needs at least one point")
        arcs = [(a, b) for a, b in zip(pts, pts[1:])]
        arcs.append((pts[-1], pts[0] + 1.0))
        return cls(tuple(arcs))

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e - s for s, e in self.arcs], dtype=float)

    @property
    def total_length(self) -> float:
        return math.fsum(e - s for s, e in self.arcs)

    @property
    def measure(self) -> float:
        """Lebesgue measure of ``E`` in turns."""
        return max(0.0, 1.0 - self.total_length)

    def is_null(self, tol: float = MEASURE_TOL) -> bool:
        return self.measure <= tol

    def contains_angle(self, t) -> np.ndarray:
        """True where the angle ``t`` (turns) lies in ``E``."""
        t = np.mod(np.asarray(t, dtype=float), 1.0)
        inside = np.zeros(t.shape, dtype=bool)
        for s, e in self.arcs:
            inside |= ((t > s) & (t < e)) | ((t + 1.0 > s) & (t + 1.0 < e))
        return ~inside

    def union(self, other: "ArcSet") -> "ArcSet":
        """Union of the closed sets, i.e. intersection of the open arcs."""
        pieces = []
        for s1, e1 in self.arcs:
            for s2, e2 in other.arcs:
                for shift in (-1.0, 0.0, 1.0):
                    lo, hi = max(s1, s2 + shift), min(e1, e2 + shift)
                    if hi - lo > MEASURE_TOL:
                        pieces.append((_wrap(lo), _wrap(lo) + (hi - lo)))
        pieces = sorted(set(pieces))
        return ArcSet(tuple(pieces))


# ---------------------------------------------------------------------------
# Gap schedules
# ---------------------------------------------------------------------------


class Family(str, enum.Enum):
    GEOMETRIC = "GEOMETRIC"
    POLYLOG = "POLYLOG"

    @classmethod
    def parse(cls, tag) -> "Family":
        if isinstance(tag, Family):
            return tag
        try:
            return cls(str(tag).upper())
        except ValueError:
            raise UnsupportedScheduleError(f"unknown schedule family {tag!r}") from None


@dataclass(frozen=True)
class GapSchedule:
    """Symmetric Cantor construction inside a base arc.

    At level ``n >= 1`` each of the ``2**(n-1)`` intervals of level ``n-1``
    loses a central open gap of length ``gap_length(n)``.  The constant
    ``c`` is chosen so that all gaps together fill the base arc.

    GEOMETRIC (``param = r``, ``0 < r < 1/2``): gap length ``c r**n``.
    POLYLOG (``param = beta > 0``): gap length ``c / (2**n n**(beta+1))``.

    Parameters
    ----------
    family : Family or str
    param : float
        Ratio ``r`` or exponent ``beta``.
    base_start, base_length : float
        Base arc in turns, ``0 < base_length <= 1``.
    depth : int
        Default truncation depth for numerics.
    """

    family: Family
    param: float
    base_start: float = 0.0
    base_length: float = 1.0
    depth: int = 12

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        object.__setattr__(self, "base_start", _wrap(self.base_start))
        p = float(self.param)
        if self.family is Family.GEOMETRIC and not 0.0 < p < 0.5:
            raise RepresentationError(f"GEOMETRIC ratio must lie in (0, 1/2), got {p}")
        if self.family is Family.POLYLOG and not p > 0.0:
            raise RepresentationError(f"POLYLOG exponent must be positive, got {p}")
        if not 0.0 < self.base_length <= 1.0:
            raise RepresentationError("base_length must lie in (0, 1]")
        if int(self.depth) < 1:
            raise RepresentationError("depth must be >= 1")
        object.__setattr__(self, "param", p)
        object.__setattr__(self, "depth", int(self.depth))

    @classmethod
    def middle_thirds(cls, base_start: float = 0.0, base_length: float = 1.0, depth: int = 12):
        return cls(Family.GEOMETRIC, 1.0 / 3.0, base_start, base_length, depth)

    @property
    def c(self) -> float:
        if self.family is Family.GEOMETRIC:
            r = self.param
            return self.base_length * (1.0 - 2.0 * r) / r
        return 2.0 * self.base_length / float(hurwitz_zeta(self.param + 1.0, 1.0))

    @staticmethod
    def gap_count(n: int) -> int:
        return 2 ** (n - 1)

    def gap_length(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        if self.family is Family.GEOMETRIC:
            return self.c * self.param**n
        return self.c / (2.0**n * n ** (self.param + 1.0))

    def interval_length(self, n) -> np.ndarray:
        """Length of each of the ``2**n`` closed intervals at level ``n``."""
        n = np.asarray(n, dtype=float)
        if self.family is Family.GEOMETRIC:
            r = self.param
            return self.c * r ** (n + 1.0) / (1.0 - 2.0 * r)
        return self.c * hurwitz_zeta(self.param + 1.0, n + 1.0) / 2.0 ** (n + 1.0)

    def level_intervals(self, level: int) -> tuple[np.ndarray, np.ndarray]:
        """Left endpoints and common length of the level intervals (turns)."""
        starts = np.array([self.base_start])
        for n in range(1, level + 1):
            child = float(self.interval_length(n))
            shift = child + float(self.gap_length(n))
            starts = np.column_stack([starts, starts + shift]).ravel()
        return starts, float(self.interval_length(level))

    def gaps(self, level: int) -> ArcSet:
        """Complement of the level-``level`` hull: gaps plus the outer arc."""
        arcs = []
        starts = np.array([self.base_start])
        for n in range(1, level + 1):
            child = float(self.interval_length(n))
            gap = float(self.gap_length(n))
            arcs.extend((s + child, s + child + gap) for s in starts)
            starts = np.column_stack([starts, starts + child + gap]).ravel()
        if self.base_length < 1.0:
            arcs.append((self.base_start + self.base_length, self.base_start + 1.0))
        return ArcSet(tuple(arcs))


BoundarySet = Union[ArcSet, GapSchedule]


# ---------------------------------------------------------------------------
# Entropy and classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleEntropy:
    """Entropy of a schedule: partial sum, tail control and verdict.

    For convergent families ``tail_bound`` bounds the omitted tail.  For
    divergent families ``tail_bound`` is ``inf`` and ``witness`` is a lower
    bound for the partial sum at ``depth`` that grows without limit.
    """

    partial_sum: float
    tail_bound: float
    converges: bool
    depth: int
    witness: float = 0.0

    @property
    def value(self) -> float:
        return self.partial_sum if self.converges else math.inf


def _schedule_terms(s: GapSchedule, depth: int) -> np.ndarray:
    # level mass 2**(n-1) * gap and log(1/gap), both in closed form to avoid overflow
    n = np.arange(1, depth + 1, dtype=float)
    c = s.c
    if s.family is Family.GEOMETRIC:
        r = s.param
        level_mass = 0.5 * c * (2.0 * r) ** n
        log_inv = -math.log(c) - n * math.log(r)
    else:
        p = s.param + 1.0
        level_mass = 0.5 * c / n**p
        log_inv = -math.log(c) + n * math.log(2.0) + p * np.log(n)
    return level_mass * log_inv


def _schedule_tail(s: GapSchedule, depth: int) -> tuple[float, bool, float]:
    L = depth
    c = s.c
    if s.family is Family.GEOMETRIC:
        r = s.param
        x = 2.0 * r
        geo = x ** (L + 1) / (1.0 - x)
        lin = x ** (L + 1) * ((L + 1) - L * x) / (1.0 - x) ** 2
        # exact: sum_{n>L} (c/2) x^n (-ln c - n ln r)
        tail = 0.5 * c * (-math.log(c) * geo - math.log(r) * lin)
        return max(tail, 0.0), True, 0.0
    beta = s.param
    if beta > 1.0:
        L = max(L, 3)
        p = beta + 1.0
        s_beta = L ** (1.0 - beta) / (beta - 1.0)
        s_p = L ** (1.0 - p) / (p - 1.0)
        s_log = L ** (1.0 - p) * (math.log(L) / (p - 1.0) + 1.0 / (p - 1.0) ** 2)
        tail = 0.5 * c * (math.log(2.0) * s_beta + p * s_log + max(0.0, -math.log(c)) * s_p)
        return tail, True, 0.0
    # the ln 2 part of each term is (c ln 2 / 2) / n**beta >= (c ln 2 / 2) / n
    harmonic = math.fsum(1.0 / k for k in range(1, depth + 1))
    return math.inf, False, 0.5 * c * math.log(2.0) * harmonic


def entropy(obj: BoundarySet, depth: int | None = None):
    """Beurling-Carleson entropy ``sum |I_k| log(1/|I_k|)`` of the gaps.

    Parameters
    ----------
    obj : ArcSet or GapSchedule
    depth : int, optional
        Summation depth for schedules (defaults to ``obj.depth``).

    Returns
    -------
    float or ScheduleEntropy
        A float for arc sets, a :class:`ScheduleEntropy` for schedules.
    """
    if isinstance(obj, ArcSet):
        return math.fsum(_xlogx_inv(x) for x in obj.lengths)
    if isinstance(obj, GapSchedule):
        L = obj.depth if depth is None else int(depth)
        partial = math.fsum(_schedule_terms(obj, L))
        partial += _xlogx_inv(1.0 - obj.base_length)
        tail, conv, witness = _schedule_tail(obj, L)
        return ScheduleEntropy(partial, tail, conv, L, witness)
    raise UnsupportedScheduleError(f"cannot compute entropy of {type(obj).__name__}")


@dataclass(frozen=True)
class BCCertificate:
    """Outcome of a Beurling-Carleson test with its evidence."""

    is_bc: bool
    entropy: float
    tail_bound: float
    reason: str
    witness: float = 0.0

    def as_dict(self) -> dict:
        return {
            "is_bc": self.is_bc,
            "entropy": self.entropy,
            "tail_bound": self.tail_bound,
            "witness": self.witness,
            "reason": self.reason,
        }


def is_beurling_carleson(obj: BoundarySet) -> BCCertificate:
    """Decide Beurling-Carleson membership.

    Arc sets must have measure zero.  Schedules are classified analytically:
    GEOMETRIC always converges, POLYLOG converges iff ``beta > 1``.

    Raises
    ------
    DomainError
        If an arc set has positive measure.
    """
    if isinstance(obj, ArcSet):
        excess = obj.measure
        if excess > MEASURE_TOL:
            raise DomainError(f"closed set has positive measure {excess:.3e}")
        ent = entropy(obj)
        return BCCertificate(True, ent, 0.0, f"finite arc list, {len(obj.arcs)} gaps")
    if isinstance(obj, GapSchedule):
        se = entropy(obj)
        if se.converges:
            if obj.family is Family.GEOMETRIC:
                why = "geometric tail summed in closed form"
            else:
                why = "polylog tail bounded by integral comparison (beta > 1)"
            return BCCertificate(True, se.partial_sum, se.tail_bound, why)
        why = "ln 2 part dominates (c ln 2 / 2) * harmonic series (beta <= 1)"
        return BCCertificate(False, se.partial_sum, math.inf, why, se.witness)
    raise UnsupportedScheduleError(f"cannot classify {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Singular measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CantorComponent:
    """Cantor measure on a schedule, split equally among level intervals."""

    schedule: GapSchedule
    mass: float

    def __post_init__(self):
        if not float(self.mass) > 0.0:
            raise RepresentationError(f"component mass must be positive, got {self.mass}")
        object.__setattr__(self, "mass", float(self.mass))


@dataclass(frozen=True)
class SingularMeasure:
    """Finite positive singular measure: atoms plus Cantor components.

    Parameters
    ----------
    atoms : sequence of (position, mass)
        Positions in turns, masses positive.
    components : sequence of CantorComponent
    """

    atoms: tuple = ()
    components: tuple = ()

    def __post_init__(self):
        atoms = []
        for a in self.atoms:
            pos, m = float(a[0]), float(a[1])
            if not m > 0.0:
                raise RepresentationError(f"atom mass must be positive, got {m}")
            atoms.append((_wrap(pos), m))
        comps = tuple(self.components)
        for c in comps:
            if not isinstance(c, CantorComponent):
                raise RepresentationError(f"expected CantorComponent, got {type(c).__name__}")
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(self, "components", comps)

    @classmethod
    def point_mass(cls, position: float = 0.0, mass: float = 1.0) -> "SingularMeasure":
        return cls(((position, mass),))

    @property
    def masses(self) -> tuple:
        """Atom masses followed by component masses."""
        return tuple(m for _, m in self.atoms) + tuple(c.mass for c in self.components)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.components

    @property
    def is_atomic(self) -> bool:
        return not self.components

    def __add__(self, other: "SingularMeasure") -> "SingularMeasure":
        return SingularMeasure(self.atoms + other.atoms, self.components + other.components)

    def atom_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Atom positions on the circle (complex) and masses."""
        if not self.atoms:
            return np.zeros(0, complex), np.zeros(0)
        t = np.array([p for p, _ in self.atoms])
        return np.exp(2j * np.pi * t), np.array([m for _, m in self.atoms])


@dataclass(frozen=True)
class Decomposition:
    """Split of a measure into its BC-carried and BC-null parts.

    Attributes
    ----------
    bc, kr : SingularMeasure
        Part carried by Beurling-Carleson sets and the remainder.
    witnesses : tuple of float
        ``bc`` mass captured by the union of the first ``k`` witnessing
        BC sets, ``k = 1, 2, ...`` (atoms first, then BC components).
    certificates : tuple of BCCertificate
        One per Cantor component, in input order.
    """

    bc: SingularMeasure
    kr: SingularMeasure
    witnesses: tuple = ()
    certificates: tuple = ()

    def __iter__(self):
        return iter((self.bc, self.kr))


def decompose(measure: SingularMeasure) -> Decomposition:
    """Partition atoms and components by Beurling-Carleson membership.

    Each Cantor component is classified as a whole from its schedule; atoms
    always go to the BC part.  Masses are moved, never modified.
    """
    bc_comps, kr_comps, certs = [], [], []
    for comp in measure.components:
        cert = is_beurling_carleson(comp.schedule)
        certs.append(cert)
        (bc_comps if cert.is_bc else kr_comps).append(comp)
    bc = SingularMeasure(measure.atoms, tuple(bc_comps))
    kr = SingularMeasure((), tuple(kr_comps))
    masses = bc.masses
    captured = tuple(math.fsum(masses[: k + 1]) for k in range(len(masses)))
    return Decomposition(bc, kr, captured, tuple(certs))


# ---------------------------------------------------------------------------
# Discretization and distances
# ---------------------------------------------------------------------------


def _arc_distance(z: np.ndarray, starts: np.ndarray, length: float, chunk: int = 128) -> np.ndarray:
    """Distance from points ``z`` to a union of equal closed arcs."""
    z = np.asarray(z, dtype=complex)
    t = np.mod(np.angle(z) / TWO_PI, 1.0)
    inside = np.zeros(z.shape, dtype=bool)
    d_end = np.full(z.shape, np.inf)
    for lo in range(0, starts.size, chunk):
        st = starts[lo : lo + chunk]
        rel = np.mod(t[..., None] - st, 1.0)
        inside |= np.any(rel <= length, axis=-1)
        w = np.exp(2j * np.pi * np.concatenate([st, st + length]))
        d_end = np.minimum(d_end, np.min(np.abs(z[..., None] - w), axis=-1))
    return np.where(inside, 1.0 - np.abs(z), d_end)


@dataclass(frozen=True)
class Discretization:
    """Atomic surrogate of a measure and the data for its error bound."""

    measure: SingularMeasure
    level: int
    hulls: tuple = ()  # (starts, interval length, mass) per component

    def error_bound(self, z) -> np.ndarray:
        """Bound on ``|S_nu(z) - S_nu_tilde(z)|``.

        The Herglotz kernel satisfies ``|d/dzeta (zeta+z)/(zeta-z)| =
        2|z|/|zeta-z|**2`` and each level interval has arc length
        ``2 pi I_L``, so moving its mass to the midpoint changes the
        exponent by at most ``2|z| pi I_L mass / dist(z, hull)**2``.
        """
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape)
        for starts, length, mass in self.hulls:
            d = _arc_distance(z, starts, length)
            with np.errstate(divide="ignore"):
                out = out + np.where(
                    d > 0, 2.0 * np.abs(z) * math.pi * length * mass / d**2, np.inf
                )
        return out


def discretize(measure: SingularMeasure, level: int) -> Discretization:
    """Replace each Cantor component by ``2**level`` equal midpoint atoms."""
    if int(level) < 1:
        raise DomainError("discretization level must be >= 1")
    level = int(level)
    atoms = list(measure.atoms)
    hulls = []
    for comp in measure.components:
        starts, length = comp.schedule.level_intervals(level)
        m = comp.mass / starts.size
        atoms.extend((float(s + 0.5 * length), m) for s in starts)
        hulls.append((starts, length, comp.mass))
    return Discretization(SingularMeasure(tuple(atoms)), level, tuple(hulls))


def boundary_distance(obj: BoundarySet, z, level: int | None = None, with_error: bool = False):
    """Euclidean distance from ``z`` (closed disc) to the closed set ``E``.

    For a schedule the distance is taken to the endpoints of the level
    intervals, which lie in ``E``; the true distance is smaller by at most
    the chord of one level interval, returned when ``with_error`` is set.
    """
    z = np.asarray(z, dtype=complex)
    if isinstance(obj, ArcSet):
        t = np.mod(np.angle(z) / TWO_PI, 1.0)
        in_e = obj.contains_angle(t)
        if obj.arcs:
            ends = np.array([a for arc in obj.arcs for a in arc])
            w = np.exp(2j * np.pi * ends)
            d_end = np.min(np.abs(z[..., None] - w), axis=-1)
        else:
            d_end = np.full(z.shape, np.inf)
        d = np.where(in_e, 1.0 - np.abs(z), d_end)
        d = np.maximum(d, 0.0)
        return (d, np.zeros(z.shape)) if with_error else d
    if isinstance(obj, GapSchedule):
        L = obj.depth if level is None else int(level)
        starts, length = obj.level_intervals(L)
        ends = np.concatenate([starts, starts + length])
        w = np.exp(2j * np.pi * ends)
        d = np.min(np.abs(z[..., None] - w), axis=-1)
        err = 2.0 * math.sin(math.pi * length)
        return (d, np.full(z.shape, err)) if with_error else d
    raise UnsupportedScheduleError(f"cannot measure distance to {type(obj).__name__}")


def support_sets(measure: SingularMeasure) -> list:
    """Closed sets carrying each atom and component, in storage order."""
    sets: list = [ArcSet.from_points([p]) for p, _ in measure.atoms]
    sets.extend(c.schedule for c in measure.components)
    return sets
