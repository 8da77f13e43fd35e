import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from modelspace.boundary_measures import ArcSet, CantorComponent, Family, GapSchedule, SingularMeasure
from modelspace.circle_harmonics import GridFunction, decay_report, h2_norm, toeplitz_coanalytic
from modelspace.errors import (
    DomainError,
    HypothesisViolationError,
    IntegrabilityError,
    SupportMismatchError,
    UnsupportedFormError,
)
from modelspace.inner_functions import InnerFunction, KernelSpec, SingularInner, reproducing_kernel
from modelspace.smoothing_pipeline import (
    CutoffFamily,
    KernelSmoother,
    OuterFunction,
    SmoothingSequence,
    approximate_kernel,
    approximate_truncated,
    build_profile,
    smooth_product_check,
    smoothing_function,
    smoothstep,
)

POINT = ArcSet.from_points([0.0])
THREE = ArcSet.from_points([0.0, 0.2, 0.45])


# ------------------------------------------------------------------ profile


def test_smoothstep_is_a_step():
    x = np.linspace(-1, 2, 301)
    s = smoothstep(x)
    assert np.all(s[x <= 0] == 0) and np.all(s[x >= 1] == 1)
    assert np.all(np.diff(s) >= 0)
    assert smoothstep(0.5) == pytest.approx(0.5)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 3.0])
def test_gap_integral_matches_quadrature(alpha):
    prof = build_profile(THREE, alpha, 0.7)
    for k, (a, L) in enumerate(prof.gaps):
        ref = integrate.quad(lambda t: float(prof(t)), a, a + L, points=[a + L / 2], limit=400, epsrel=1e-12)[0]
        assert prof.gap_integral(k) == pytest.approx(ref, rel=1e-9)


def test_alpha_one_gap_integral_closed_form():
    prof = build_profile(THREE, 1.0, 0.7)
    for k, (_, L) in enumerate(prof.gaps):
        assert prof.gap_integral(k) == pytest.approx(0.7 * L * (2 + math.log(2)), rel=1e-14)


def test_profile_values():
    prof = build_profile(POINT, 2.0, 0.5)
    assert float(prof(0.5)) == pytest.approx(0.5 * (1 + math.log(2)) ** 2)
    assert float(prof(0.0)) == math.inf
    t = np.linspace(0.001, 0.999, 500)
    assert np.all(prof(t) >= prof.c)
    assert float(prof(prof.blowup_radius(10.0))) == pytest.approx(10.0)


def test_gaps_sorted_by_length():
    prof = build_profile(THREE, 1.0, 1.0)
    lengths = [L for _, L in prof.gaps]
    assert lengths == sorted(lengths, reverse=True)


def test_profile_rejects_bad_input():
    with pytest.raises(DomainError):
        build_profile(ArcSet(((0.0, 0.5),)))
    with pytest.raises(DomainError):
        build_profile(POINT, alpha=0.0)
    with pytest.raises(DomainError):
        build_profile(GapSchedule.middle_thirds())
    with pytest.raises(DomainError):
        build_profile(POINT, alpha=math.inf)
    # log(e / L)**alpha overflows for large alpha
    with pytest.raises(IntegrabilityError):
        build_profile(THREE, alpha=1e4)


# ------------------------------------------------------------------ cutoffs


@given(st.integers(1, 40), st.floats(0.0, 1.0))
def test_cutoff_invariants(n, t):
    cut = CutoffFamily()
    prof = build_profile(THREE, 1.0, 1.0)
    v = float(cut.phi(prof, n, t))
    assert 0.0 <= v <= 1.0
    eps = cut.width(n)
    for k, (a, L) in enumerate(prof.gaps):
        x = (t - a) % 1.0 / L
        if x < 1 and min(x, 1 - x) <= eps / 2:
            assert v == 0.0
        if k >= n and x < 1:
            assert v == 0.0


@given(st.integers(2, 60), st.floats(0.0, 1.0))
def test_psi_equals_one_in_the_middle(n, x):
    cut = CutoffFamily()
    if 1 / n <= x <= 1 - 1 / n:
        assert float(cut.psi(n, x)) == 1.0
    assert float(cut.psi(n, x)) <= float(cut.psi(n + 1, x)) + 1e-15


# ------------------------------------------------------- smoothing sequence


@pytest.fixture(scope="module")
def seq():
    return SmoothingSequence(build_profile(POINT, 1.0, 1.0), CutoffFamily(), 2**14)


def test_cell_weights_integrate_to_weight_integral(seq):
    for n in (0, 2, 4, 16):
        ref = seq.profile.total_integral if n == 0 else seq.weight_integral(n)
        assert seq.cell_weights(n).mean() == pytest.approx(ref, rel=1e-12)


def test_weight_integral_decreases_to_small_fraction(seq):
    w = [seq.weight_integral(n) for n in (1, 2, 4, 8, 16)]
    assert all(b <= a for a, b in zip(w, w[1:]))
    assert w[-1] < 0.05 * seq.profile.total_integral


def test_weight_integral_matches_direct_quadrature(seq):
    for n in (2, 8):
        f = lambda t: float(seq.profile(t)) * (1 - float(seq.cutoffs.phi(seq.profile, n, t)))
        eps = seq.cutoffs.width(n)
        ref = integrate.quad(f, 0, 1, points=[eps / 2, eps, 0.5, 1 - eps, 1 - eps / 2], limit=500, epsrel=1e-11)[0]
        assert seq.weight_integral(n) == pytest.approx(ref, rel=1e-8)


def test_smoothing_functions_are_bounded_by_one(seq):
    for n in (1, 2, 4, 8, 16):
        assert np.abs(smoothing_function(seq, n).values).max() <= 1 + 1e-9


def test_value_at_origin_is_exp_minus_weight(seq):
    prev = 0.0
    for n in (2, 4, 8, 16):
        h0 = abs(complex(seq.interior(n, 0.0)))
        assert h0 == pytest.approx(math.exp(-seq.weight_integral(n)), rel=1e-12)
        assert h0 > prev
        prev = h0


def test_median_distance_to_one_decreases(seq):
    med = [np.median(np.abs(seq.boundary(n).values - 1)) for n in (2, 4, 8, 16)]
    assert all(b < a for a, b in zip(med, med[1:]))


def test_toeplitz_sequence_converges_strongly(seq):
    f = GridFunction.from_analytic(seq.grid, 1.0 / (1.0 + np.arange(200)))
    err = [h2_norm(toeplitz_coanalytic(seq.boundary(n), f) - f) for n in (2, 4, 8, 16)]
    assert all(b < a for a, b in zip(err, err[1:]))
    assert err[-1] < 0.25 * err[0]


def test_smoothing_index_must_be_positive(seq):
    with pytest.raises(DomainError):
        smoothing_function(seq, 0)


# ------------------------------------------------------------ outer function


def test_outer_function_at_origin():
    prof = build_profile(POINT, 1.0, 1.0)
    g = OuterFunction(prof)
    assert abs(complex(g(np.array(0j)))) == pytest.approx(math.exp(-prof.total_integral), rel=1e-10)


def test_outer_function_matches_spectral_construction(seq):
    g = OuterFunction(seq.profile)
    z = np.array([0.3, 0.5j, -0.7])
    assert np.allclose(g(z), seq.interior(0, z), rtol=1e-5)


def test_outer_derivatives_match_cauchy_differences():
    g = OuterFunction(build_profile(THREE, 2.0, 0.3))
    z0 = 0.4 + 0.2j
    rho, M = 0.1, 32
    w = z0 + rho * np.exp(2j * np.pi * np.arange(M) / M)
    vals = g(w)
    for k in (1, 2):
        ref = math.factorial(k) * np.mean(vals * (w - z0) ** (-k))
        assert abs(complex(g.derivative(np.array(z0), k)) - ref) <= 1e-7 * abs(ref)
    with pytest.raises(DomainError):
        g.derivative(z0, 3)


def test_outer_boundary_samples_decay_fast(seq):
    # the spectral outer function with the default profile is smooth
    assert decay_report(seq.boundary(0)).exponent >= 3


def test_smooth_product_gains_decay():
    prof = build_profile(POINT, 3.0, 0.1)
    seq3 = SmoothingSequence(prof, CutoffFamily(), 2**16)
    S = SingularInner(SingularMeasure.point_mass(0.0, 1.0))
    rep = smooth_product_check(S, seq3.boundary(0), OuterFunction(prof))
    assert rep.product_decay.exponent >= rep.theta_decay.exponent + 2
    for k in range(3):
        for l in range(3):
            assert rep.radial[(k, l)][-1] < 1e-4


def test_smooth_product_checks_support():
    prof = build_profile(POINT, 1.0, 1.0)
    S = SingularInner(SingularMeasure.point_mass(0.3, 1.0))
    H = SmoothingSequence(prof, M=256).boundary(0)
    with pytest.raises(SupportMismatchError):
        smooth_product_check(S, H, OuterFunction(prof))


# ---------------------------------------------------------- kernel pipeline

ATOM = InnerFunction.build(measure=SingularMeasure.point_mass(0.0, 1.0))


@pytest.fixture(scope="module")
def small_smoother():
    return KernelSmoother(ATOM, 0.4, N=2**14)


def test_kernel_approximants_small_grid(small_smoother):
    # n = 16 needs the full-size grid to resolve the product near the atom
    errs = []
    for n in (2, 4, 8, 16):
        a = small_smoother.approximate(n)
        if n <= 8:
            assert a.membership_residual < 1e-6
        assert a.h2_error <= a.dominating_bound + 1e-9
        errs.append(a.h2_error)
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_kernel_error_matches_direct_difference(small_smoother):
    a = small_smoother.approximate(4)
    direct = math.sqrt(np.sum(np.abs(a.approximant - small_smoother.kernel_coefficients()) ** 2))
    # the direct difference misses the kernel's tail beyond N/2 coefficients
    kc = small_smoother.kernel_coefficients()
    tail2 = small_smoother.spec.diagonal - np.sum(np.abs(kc) ** 2)
    assert a.h2_error == pytest.approx(math.sqrt(direct**2 + tail2), rel=1e-6)


def test_blaschke_kernel_needs_no_smoothing():
    theta = InnerFunction.build((0.5, -0.4j))
    a = approximate_kernel(theta, 0.3, 2, N=2**10)
    assert a.h2_error < 1e-12 and a.membership_residual < 1e-12


def test_constant_theta_gives_zero_approximant():
    a = approximate_kernel(InnerFunction(), 0.3, 2, N=2**10)
    assert not np.any(a.approximant) and a.h2_error == 0.0


def test_bc_null_measure_violates_hypothesis():
    nu = SingularMeasure(components=(CantorComponent(GapSchedule(Family.POLYLOG, 1.0), 0.3),))
    with pytest.raises(HypothesisViolationError):
        KernelSmoother(InnerFunction.build(measure=nu), 0.2, N=2**10)


def test_bc_cantor_component_is_unsupported():
    nu = SingularMeasure(components=(CantorComponent(GapSchedule.middle_thirds(), 0.3),))
    with pytest.raises(UnsupportedFormError):
        KernelSmoother(InnerFunction.build(measure=nu), 0.2, N=2**10)


def test_truncated_approximation_two_atoms():
    theta = InnerFunction.build(measure=SingularMeasure(((0.0, 1.0), (0.5, 0.5))))
    lam = 0.4
    out = approximate_truncated(theta, lam, 1, 4, sample_points=(0.0,), grid_size=2**14)
    k = complex(reproducing_kernel(KernelSpec(theta, lam), 0.0))
    th1 = InnerFunction.build(measure=SingularMeasure(((0.0, 1.0),)))
    k1 = complex(reproducing_kernel(KernelSpec(th1, lam), 0.0))
    assert out.kernel_gap[0] == pytest.approx(abs(k - k1), rel=1e-12)
    assert out.approximation.membership_residual < 1e-6


def test_truncation_exhausting_components_matches_full():
    theta = InnerFunction.build(measure=SingularMeasure(((0.0, 1.0), (0.5, 0.5))))
    full = approximate_kernel(theta, 0.4, 4, N=2**12)
    out = approximate_truncated(theta, 0.4, 5, 4, grid_size=2**12)
    assert np.array_equal(out.approximation.approximant, full.approximant)
    assert out.kernel_gap == (0.0,)


def test_truncation_to_zero_gives_zero_kernel():
    theta = InnerFunction.build(measure=SingularMeasure(((0.0, 1.0),)))
    out = approximate_truncated(theta, 0.4, 0, 4, grid_size=2**10)
    assert not np.any(out.approximation.approximant)
