import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modelspace.boundary_measures import (
    ArcSet,
    CantorComponent,
    Family,
    GapSchedule,
    SingularMeasure,
    boundary_distance,
    decompose,
    discretize,
    entropy,
    is_beurling_carleson,
)
from modelspace.errors import DomainError, RepresentationError, UnsupportedScheduleError
from modelspace.inner_functions import SingularInner

from conftest import random_disc_points


def xlogx(x):
    return -x * math.log(x)


# --------------------------------------------------------------------- arcs


def test_single_point_has_zero_entropy():
    assert entropy(ArcSet.from_points([0.0])) == 0.0


def test_antipodal_pair_entropy_is_ln2():
    assert entropy(ArcSet.from_points([0.0, 0.5])) == pytest.approx(math.log(2), abs=1e-15)


def test_arcs_are_canonicalized():
    E = ArcSet(((1.2, 1.7), (0.8, 1.1)))
    assert np.allclose(E.arcs, ((0.2, 0.7), (0.8, 1.1)), atol=1e-15)


def test_overlapping_arcs_rejected():
    with pytest.raises(RepresentationError):
        ArcSet(((0.1, 0.4), (0.3, 0.5)))
    with pytest.raises(RepresentationError):
        ArcSet(((0.9, 1.2), (0.1, 0.3)))
    with pytest.raises(RepresentationError):
        ArcSet(((0.3, 0.3),))


def test_positive_measure_set_is_not_classified():
    with pytest.raises(DomainError):
        is_beurling_carleson(ArcSet(((0.0, 0.5),)))


def test_unknown_family_rejected():
    with pytest.raises(UnsupportedScheduleError):
        GapSchedule("SPIRAL", 0.3)
    with pytest.raises(UnsupportedScheduleError):
        entropy("not a set")


def test_abutting_arcs_keep_the_shared_point():
    E = ArcSet(((0.0, 0.5), (0.5, 1.0)))
    assert bool(E.contains_angle(0.5)) and bool(E.contains_angle(0.0))
    assert not bool(E.contains_angle(0.25))


# ---------------------------------------------------------------- schedules


def test_middle_thirds_entropy_equals_3_ln3():
    se = entropy(GapSchedule.middle_thirds(depth=40))
    assert se.converges
    assert abs(se.partial_sum + se.tail_bound - 3 * math.log(3)) < 1e-12
    assert se.partial_sum <= 3 * math.log(3)


def test_middle_thirds_partial_sum_matches_gap_enumeration():
    s = GapSchedule.middle_thirds()
    for L in (1, 5, 10):
        gaps = s.gaps(L)
        assert len(gaps.arcs) == 2**L - 1
        assert entropy(s, depth=L).partial_sum == pytest.approx(entropy(gaps), rel=1e-12)
        # every gap at level n has length 3**-n
        assert np.allclose(np.sort(gaps.lengths)[-1], 1 / 3)


def test_geometric_tail_is_exact():
    s = GapSchedule(Family.GEOMETRIC, 0.2, depth=5)
    deep = entropy(s, depth=200)
    shallow = entropy(s, depth=5)
    assert shallow.partial_sum + shallow.tail_bound == pytest.approx(deep.partial_sum, rel=1e-13)


def test_schedule_gaps_fill_base_arc():
    for s in (GapSchedule.middle_thirds(0.25, 0.25), GapSchedule(Family.POLYLOG, 2.0, 0.6, 0.3)):
        L = 14
        starts, length = s.level_intervals(L)
        assert math.fsum(s.gaps(L).lengths) + starts.size * length == pytest.approx(1.0, abs=1e-12)
        # intervals stay inside the base arc and in order
        assert starts[0] == pytest.approx(s.base_start)
        assert starts[-1] + length == pytest.approx(s.base_start + s.base_length, abs=1e-12)


def test_polylog_beta2_converges_with_bounded_tail():
    s = GapSchedule(Family.POLYLOG, 2.0, depth=200)
    se = entropy(s)
    deeper = entropy(s, depth=4000)
    assert se.converges
    assert se.partial_sum <= deeper.partial_sum <= se.partial_sum + se.tail_bound
    cert = is_beurling_carleson(s)
    assert cert.is_bc and math.isfinite(cert.entropy)


def test_polylog_beta1_diverges_with_witness():
    s = GapSchedule(Family.POLYLOG, 1.0, depth=4000)
    se = entropy(s)
    assert not se.converges and se.value == math.inf
    # the witness is a lower bound for the partial sum and grows like log(depth)
    assert 0 < se.witness <= se.partial_sum
    w2 = entropy(s, depth=8000).witness
    c = s.c
    assert w2 - se.witness == pytest.approx(0.5 * c * math.log(2) * math.log(2), rel=1e-3)
    cert = is_beurling_carleson(s)
    assert not cert.is_bc and cert.tail_bound == math.inf


@pytest.mark.parametrize("beta", [0.5, 1.0])
def test_polylog_small_beta_is_not_bc(beta):
    assert not is_beurling_carleson(GapSchedule(Family.POLYLOG, beta)).is_bc


# ------------------------------------------------------- property: entropy

points = st.lists(st.floats(0.0, 0.999, allow_nan=False), min_size=1, max_size=12, unique=True)


def _separated(ps):
    ps = sorted({round(p, 6) for p in ps})
    out = [p for i, p in enumerate(ps) if i == 0 or p - ps[i - 1] > 1e-6]
    if len(out) > 1 and out[0] + 1 - out[-1] <= 1e-6:
        out.pop()
    return out


@given(points)
def test_entropy_is_sum_over_gaps(ps):
    E = ArcSet.from_points(_separated(ps))
    assert entropy(E) == pytest.approx(math.fsum(xlogx(x) for x in E.lengths if x < 1), abs=1e-14)


@given(points, points)
def test_finite_unions_of_bc_sets_are_bc(a, b):
    A = ArcSet.from_points(_separated(a))
    B = ArcSet.from_points(_separated(b))
    U = A.union(B)
    cert = is_beurling_carleson(U)
    assert cert.is_bc and math.isfinite(cert.entropy)
    # the union refines both gap lists and x log(1/x) is subadditive
    assert cert.entropy >= max(entropy(A), entropy(B)) - 1e-12


@given(
    st.lists(st.floats(0.01, 0.49), min_size=1, max_size=6, unique=True),
    st.lists(st.floats(0.51, 0.99), min_size=1, max_size=6, unique=True),
)
def test_entropy_additive_over_disjoint_refinements(left, right):
    # A refines [0, 1/2], B refines [1/2, 1]; both contain {0, 1/2}
    A = ArcSet.from_points(_separated([0.0, 0.5] + left))
    B = ArcSet.from_points(_separated([0.0, 0.5] + right))
    base = ArcSet.from_points([0.0, 0.5])
    assert entropy(A.union(B)) == pytest.approx(entropy(A) + entropy(B) - entropy(base), abs=1e-12)


# ------------------------------------------------------------- measures


def _mixed_measure():
    return SingularMeasure(
        atoms=((0.125, 1.0),),
        components=(
            CantorComponent(GapSchedule.middle_thirds(0.25, 0.25), 0.5),
            CantorComponent(GapSchedule(Family.POLYLOG, 1.0, 0.6, 0.3), 0.3),
        ),
    )


def test_decompose_splits_atom_and_middle_thirds_from_polylog():
    nu = _mixed_measure()
    bc, kr = decompose(nu)
    assert bc.atoms == nu.atoms and bc.components == nu.components[:1]
    assert kr.atoms == () and kr.components == nu.components[1:]
    assert bc.total_mass + kr.total_mass == nu.total_mass


def test_decompose_records_certificates_and_witnesses():
    dec = decompose(_mixed_measure())
    assert [c.is_bc for c in dec.certificates] == [True, False]
    assert dec.witnesses == (1.0, 1.5)


def test_empty_measure_decomposes_to_zero():
    bc, kr = decompose(SingularMeasure())
    assert bc.is_zero and kr.is_zero


schedules = st.one_of(
    st.builds(
        lambda r, a, L: GapSchedule(Family.GEOMETRIC, r, a, L),
        st.floats(0.05, 0.45),
        st.floats(0, 1),
        st.floats(0.05, 1.0),
    ),
    st.builds(
        lambda b, a, L: GapSchedule(Family.POLYLOG, b, a, L),
        st.floats(0.2, 3.0),
        st.floats(0, 1),
        st.floats(0.05, 1.0),
    ),
)
measures = st.builds(
    lambda atoms, comps: SingularMeasure(tuple(atoms), tuple(comps)),
    st.lists(st.tuples(st.floats(0, 1, exclude_max=True), st.floats(1e-3, 5.0)), max_size=4),
    st.lists(st.builds(CantorComponent, schedules, st.floats(1e-3, 5.0)), max_size=3),
)


@given(measures)
def test_decompose_is_idempotent_and_conserves_mass(nu):
    bc, kr = decompose(nu)
    # masses are moved unchanged, so the exactly rounded totals agree
    assert sorted(bc.masses + kr.masses) == sorted(nu.masses)
    assert math.fsum(bc.masses + kr.masses) == nu.total_mass
    bc2, kr2 = decompose(bc)
    assert bc2 == bc and kr2.is_zero
    bc3, kr3 = decompose(kr)
    assert bc3.is_zero and kr3 == kr


# --------------------------------------------------------- discretization


@given(st.integers(3, 7), st.integers(0, 2**31 - 1))
def test_discretization_bound_is_sound(level, seed):
    nu = SingularMeasure(
        components=(
            CantorComponent(GapSchedule.middle_thirds(0.1, 0.4), 0.7),
            CantorComponent(GapSchedule(Family.POLYLOG, 1.0, 0.6, 0.3), 0.4),
        )
    )
    z = random_disc_points(np.random.default_rng(seed), 20, rmax=0.9)
    coarse = SingularInner(nu, level=level).evaluate(z)
    fine = SingularInner(nu, level=level + 4)(z)
    assert np.all(np.abs(coarse.value - fine) <= coarse.error_bound)


def test_discretize_keeps_mass_and_atom_count():
    nu = _mixed_measure()
    d = discretize(nu, 6)
    assert len(d.measure.atoms) == 1 + 2 * 2**6
    assert d.measure.total_mass == pytest.approx(nu.total_mass, abs=1e-14)


def test_discretize_rejects_level_zero():
    with pytest.raises(DomainError):
        discretize(_mixed_measure(), 0)


# -------------------------------------------------------------- distance


def test_boundary_distance_examples():
    E = ArcSet.from_points([0.0])
    assert float(boundary_distance(E, 0.0)) == pytest.approx(1.0)
    assert float(boundary_distance(E, -1.0)) == pytest.approx(2.0)
    assert float(boundary_distance(E, 1.0)) == 0.0


@given(points, st.floats(0, 0.999), st.floats(0, 1))
def test_boundary_distance_vanishes_exactly_on_the_set(ps, r, t):
    pts = _separated(ps)
    E = ArcSet.from_points(pts)
    on = np.exp(2j * np.pi * np.array(pts))
    assert np.all(boundary_distance(E, on) < 1e-12)
    z = r * np.exp(2j * np.pi * t)
    assert float(boundary_distance(E, z)) >= 1 - r - 1e-15 > 0


def test_boundary_distance_to_schedule_with_error():
    s = GapSchedule.middle_thirds(depth=10)
    starts, length = s.level_intervals(10)
    e = np.exp(2j * np.pi * starts[:5])
    d, err = boundary_distance(s, e, with_error=True)
    assert np.all(d < 1e-12)
    # the centre of the disc is at distance one from any boundary set
    assert float(boundary_distance(s, 0.0)) == pytest.approx(1.0)
    assert np.all(err == pytest.approx(2 * math.sin(math.pi * length)))
