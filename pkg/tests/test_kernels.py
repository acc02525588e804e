"""Tests for kernel evaluation routes, identity checks, and gap bounds."""

import numpy as np
import pytest
from scipy.integrate import quad

from dpptree.densities import BoxDensity, GridDensity, TentWindow, tent_eval
from dpptree.errors import QuadratureToleranceError, ValidationError
from dpptree.kernels import (
    KernelSpec,
    KernelEvaluator,
    kernel_eval,
    kernel_eval_checked,
    kernel_gap_bound,
    kernel_table,
    smoothed_kernel_identity_check,
)

BOX = BoxDensity(1, 0.5)


def test_base_kernel_at_zero_is_total_mass():
    assert kernel_eval(KernelSpec(BOX), [0.0], [0.0]) == pytest.approx(1.0, abs=1e-12)


def test_base_kernel_sinc_zeros():
    assert abs(kernel_eval(KernelSpec(BOX), [1.0], [0.0])) < 1e-12


def test_base_kernel_half_displacement():
    # sin(pi/2)/(pi/2) = 2/pi
    v = kernel_eval(KernelSpec(BOX), [0.5], [0.0])
    assert v.real == pytest.approx(2.0 / np.pi, rel=1e-12)
    assert abs(v.imag) < 1e-12


def test_base_quadrature_matches_sinc_closed_form():
    spec = KernelSpec(BOX)
    us = np.linspace(-4, 4, 100)
    got = np.array([kernel_eval(spec, [u], [0.0], route="quadrature") for u in us])
    want = np.sinc(us)
    assert np.max(np.abs(got - want)) < 1e-10


def test_checked_eval_passes_for_box():
    v = kernel_eval_checked(KernelSpec(BOX), [0.7], [0.0])
    assert abs(v - np.sinc(0.7)) < 1e-9


def test_checked_eval_requires_closed_form():
    g = GridDensity(1, (-0.5,), 0.125, 0.5 * np.ones(8))
    with pytest.raises(ValidationError):
        kernel_eval_checked(KernelSpec(g), [0.1], [0.0])


def test_hermitian_symmetry_random_points():
    rng = np.random.default_rng(11)
    spec = KernelSpec(BOX, "smoothed", 2.0)
    for _ in range(20):
        x, y = rng.uniform(-3, 3, size=2)
        k1 = kernel_eval(spec, [x], [y])
        k2 = kernel_eval(spec, [y], [x])
        assert abs(k1 - np.conj(k2)) < 1e-10


def test_translation_invariance_random_shifts():
    rng = np.random.default_rng(12)
    spec = KernelSpec(BOX, "upper", 1.0)
    for _ in range(20):
        x, y, a = rng.uniform(-2, 2, size=3)
        k1 = kernel_eval(spec, [x + a], [y + a])
        k2 = kernel_eval(spec, [x], [y])
        assert abs(k1 - k2) < 1e-10


def test_even_density_kernel_is_real():
    rng = np.random.default_rng(13)
    for variant, r in [("base", None), ("smoothed", 2.0), ("lower", 2.0), ("upper", 2.0)]:
        spec = KernelSpec(BOX, variant, r)
        for u in rng.uniform(-5, 5, size=10):
            assert abs(kernel_eval(spec, [u], [0.0]).imag) < 1e-10


def test_smoothed_quadrature_identity_small_deviation():
    # both sides by independent routes; deviation is quadrature error only
    for r in (1.0, 2.0, 4.0):
        us = np.linspace(-8, 8, 50)[:, None]
        dev = smoothed_kernel_identity_check(BOX, r, us)
        assert dev < 1e-6


def test_smoothed_identity_check_includes_unit_mass_at_zero():
    dev = smoothed_kernel_identity_check(BOX, 2.0, np.array([[0.0]]))
    assert dev < 1e-8


def test_smoothed_kernel_vanishes_beyond_radius():
    for r in (1.0, 2.0):
        spec = KernelSpec(BOX, "smoothed", r)
        for u in (r, r + 0.5, 2 * r, -r):
            assert abs(kernel_eval(spec, [u], [0.0], route="quadrature")) < 1e-6
            assert abs(kernel_eval(spec, [u], [0.0], route="closed")) < 1e-15


def test_smoothed_identity_specific_point():
    # r=2, u=0.5: deviation below 1e-6
    dev = smoothed_kernel_identity_check(BOX, 2.0, np.array([[0.5]]))
    assert dev < 1e-6


def test_lower_upper_linearity_identity():
    # min + max = sum, so K_lower + K_upper = K + K_r pointwise
    r = 2.0
    for u in (0.0, 0.3, 0.9, 1.7):
        klo = kernel_eval(KernelSpec(BOX, "lower", r), [u], [0.0])
        kup = kernel_eval(KernelSpec(BOX, "upper", r), [u], [0.0])
        kb = kernel_eval(KernelSpec(BOX), [u], [0.0])
        ks = kernel_eval(KernelSpec(BOX, "smoothed", r), [u], [0.0])
        assert abs((klo + kup) - (kb + ks)) < 1e-10


def test_lower_kernel_matches_direct_quadrature_oracle():
    # oracle: adaptive quadrature of the closed-form lower profile
    from dpptree.densities import smoothed_box_profile

    r, u = 2.0, 0.8
    re, _ = quad(lambda t: smoothed_box_profile(t, r, 0.5) * np.cos(2 * np.pi * u * t), -0.5, 0.5, epsabs=1e-13)
    got = kernel_eval(KernelSpec(BOX, "lower", r), [u], [0.0])
    assert got.real == pytest.approx(re, abs=1e-10)
    assert abs(got.imag) < 1e-12


def test_grid_kernel_matches_box_kernel_when_grid_replicates_box():
    # step density equal to the box: transforms agree exactly
    g = GridDensity(1, (-0.5,), 0.0625, np.ones(16))
    us = np.linspace(-3, 3, 25)
    for u in us:
        kg = kernel_eval(KernelSpec(g), [u], [0.0])
        kb = kernel_eval(KernelSpec(BOX), [u], [0.0])
        assert abs(kg - kb) < 1e-12


def test_grid_smoothed_kernel_tracks_closed_form_within_tail_budget():
    # grid route carries the documented truncation bias, nothing worse
    g = GridDensity(1, (-0.5,), 0.0625, np.ones(16))
    r = 2.0
    spec = KernelSpec(g, "smoothed", r)
    window = TentWindow(1, r)
    for u in (0.0, 0.4, 1.1):
        kq = kernel_eval(spec, [u], [0.0])
        want = np.sinc(u) * tent_eval(window, [u])
        assert abs(kq - want) < 5e-4


def test_kernel_table_columns():
    tab = kernel_table(KernelSpec(BOX), [[0.0], [0.5], [1.0]])
    assert tab.shape == (3, 3)
    assert tab[0, 1] == pytest.approx(1.0, abs=1e-12)
    assert tab[1, 1] == pytest.approx(2 / np.pi, rel=1e-10)


def test_kernel_2d_product_structure():
    spec = KernelSpec(BoxDensity(2, 0.5), "smoothed", 2.0)
    v = kernel_eval(spec, [0.5, 0.25], [0.0, 0.0])
    w = TentWindow(2, 2.0)
    want = np.sinc(0.5) * np.sinc(0.25) * tent_eval(w, [0.5, 0.25])
    assert v.real == pytest.approx(want, rel=1e-10)


# ---------------------------------------------------------------------------
# gap bounds
# ---------------------------------------------------------------------------


def test_gap_bound_zero_for_identical_specs():
    spec = KernelSpec(BOX, "lower", 2.0)
    assert kernel_gap_bound(spec, spec, [(0,)])[0] < 1e-12


def test_gap_bound_decreases_in_r():
    vals = []
    for r in (1.0, 2.0, 4.0, 8.0):
        lo = KernelSpec(BOX, "lower", r)
        hi = KernelSpec(BOX, "upper", r)
        vals.append(kernel_gap_bound(lo, hi, [(1,)])[0])
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_gap_bound_dominates_matrix_element_gap():
    # compare against actual cell-basis matrix elements of the gap
    from dpptree.treerep import CellBasis, tree_kernel_entry

    r = 4.0
    lo = KernelSpec(BOX, "lower", r)
    hi = KernelSpec(BOX, "upper", r)
    basis = CellBasis(1)
    bound = kernel_gap_bound(lo, hi, [(1,)])[0]
    worst = 0.0
    for l in range(1, 4):
        for m in range(1, 4):
            gap = tree_kernel_entry(hi, basis, ((1,), l), ((0,), m)) - tree_kernel_entry(
                lo, basis, ((1,), l), ((0,), m)
            )
            worst = max(worst, abs(gap))
    assert bound >= worst - 1e-12
