from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssepdual.ssep_model import (
    BoundaryKind,
    BoundaryRates,
    ProcessSpec,
    Side,
    YVariant,
    assemble_generator,
    assemble_H,
    build_boundary,
    build_bulk_h,
    build_dual_rates,
    dual_rates,
    is_equilibrium,
)
from ssepdual.tensor_core import DimensionError

rate = st.floats(0.01, 3.0, allow_nan=False)
rate_sets = st.tuples(rate, rate, rate, rate).map(lambda v: BoundaryRates(*v))


def test_bulk_h():
    h = build_bulk_h()
    assert h[1, 2] == 1.0
    np.testing.assert_array_equal(h.sum(axis=0), 0)
    np.testing.assert_array_equal(h, h.T)
    np.testing.assert_array_equal(h, np.array([[1, 0, 0, 0], [0, 0, 1, 0],
                                               [0, 1, 0, 0], [0, 0, 0, 1]]) - np.eye(4))


def test_boundaries_by_hand():
    np.testing.assert_array_equal(build_boundary(Side.LEFT, BoundaryRates(1, 1, 0, 0)),
                                  [[-1, 0], [1, 0]])
    np.testing.assert_array_equal(build_boundary(Side.RIGHT, BoundaryRates(1, 1, 0, 0)),
                                  [[0, 1], [0, -1]])


@settings(max_examples=50, deadline=None)
@given(rate_sets)
def test_boundary_columns_sum_to_zero(rates):
    for side in Side:
        assert np.abs(build_boundary(side, rates).sum(axis=0)).max() <= 1e-15


@pytest.mark.parametrize("values", [(-1, 1, 0, 0), (float("nan"), 1, 0, 0), (0, 1, 0, 1),
                                    (1, 0, 0, 0)])
def test_invalid_rates(values):
    with pytest.raises(ValueError):
        BoundaryRates(*values)


def test_rates_reject_non_numbers():
    with pytest.raises(TypeError):
        BoundaryRates("1", 1, 0, 0)


def test_dual_rates_yr_symmetric():
    B_L, B_R, r = build_dual_rates(BoundaryRates(1, 1, 0, 0), YVariant.YR)
    assert r == 1
    np.testing.assert_array_equal(B_L, [[0, 1], [0, -1]])
    np.testing.assert_array_equal(B_R, [[0, 1], [0, -1]])


@settings(max_examples=50, deadline=None)
@given(rate_sets)
def test_dual_rates_yr_proportional(rates):
    B_L, B_R, r = build_dual_rates(rates, YVariant.YR)
    np.testing.assert_allclose(B_L, r * B_R, rtol=1e-15)


def test_dual_rates_yl():
    # the left reservoir is kept and copied, rescaled by 1/r, onto the right end
    rates = BoundaryRates(2, 1, 0, 1)
    B_L, B_R, r = build_dual_rates(rates, YVariant.YL)
    assert r == 1
    A_L = build_boundary(Side.LEFT, rates)
    np.testing.assert_array_equal(B_L, A_L)
    np.testing.assert_array_equal(B_R, A_L)


@settings(max_examples=50, deadline=None)
@given(rate_sets)
def test_dual_rates_match_matrices(rates):
    for variant in YVariant:
        B_L, B_R, _ = build_dual_rates(rates, variant)
        dual = dual_rates(rates, variant)
        np.testing.assert_allclose(build_boundary(Side.LEFT, dual), B_L, rtol=1e-14)
        np.testing.assert_allclose(build_boundary(Side.RIGHT, dual), B_R, rtol=1e-14)


def test_h_single_site():
    H = assemble_H(ProcessSpec(1, BoundaryRates(1, 1, 0, 0)))
    np.testing.assert_array_equal(H, [[-1, 1], [1, -1]])


@settings(max_examples=30, deadline=None)
@given(rate_sets, st.integers(1, 6))
def test_generator_stochastic(rates, N):
    H = assemble_H(ProcessSpec(N, rates))
    scale = max(1.0, np.abs(H).max())
    assert np.abs(H.sum(axis=0)).max() <= 1e-13 * scale
    off = H - np.diag(np.diag(H))
    assert off.min() >= 0


def test_dual_right_two_sites():
    H = assemble_H(ProcessSpec(2, BoundaryRates(1, 1, 0, 0), BoundaryKind.DUAL_EQUILIBRIUM_RIGHT))
    np.testing.assert_array_equal(H.sum(axis=0), 0)
    np.testing.assert_array_equal(H @ np.array([1.0, 0, 0, 0]), 0)


def test_dual_left_kind_uses_yl():
    rates = BoundaryRates(2, 1, 0.5, 1)
    H = assemble_H(ProcessSpec(3, rates, BoundaryKind.DUAL_EQUILIBRIUM_LEFT))
    B_L, B_R, _ = build_dual_rates(rates, YVariant.YL)
    np.testing.assert_array_equal(H, assemble_generator(3, B_L, B_R))


def test_generator_exact_mode():
    rates = BoundaryRates(1, 1, 0, 0).to_exact()
    H = assemble_H(ProcessSpec(3, rates))
    assert H.dtype == object
    assert all(x == 0 for x in H.sum(axis=0))


def test_generator_size_cap():
    with pytest.raises(DimensionError):
        assemble_H(ProcessSpec(13, BoundaryRates(1, 1, 0, 0)))


def test_is_equilibrium():
    assert is_equilibrium(BoundaryRates(1, 1, 1, 1))
    assert not is_equilibrium(BoundaryRates(1, 1, 0, 0))


@settings(max_examples=50, deadline=None)
@given(rate_sets)
def test_dual_rates_are_equilibrium(rates):
    for variant in YVariant:
        assert is_equilibrium(dual_rates(rates, variant), tol=1e-12)


def test_dual_rates_equilibrium_exact():
    rates = BoundaryRates(2, 1, 0.5, 1).to_exact()
    for variant in YVariant:
        dual = dual_rates(rates, variant)
        assert all(isinstance(x, Fraction) for x in dual.as_tuple())
        assert dual.drive == 0


def test_mirror_is_involution():
    rates = BoundaryRates(2, 1, 0.5, 1)
    assert rates.mirrored().mirrored() == rates


def test_mirror_reflects_chain():
    rates = BoundaryRates(2, 1, 0.5, 1)
    N = 3
    P = np.zeros((8, 8))
    for i in range(8):
        P[int(format(i, "03b")[::-1], 2), i] = 1
    H = assemble_H(ProcessSpec(N, rates))
    Hm = assemble_H(ProcessSpec(N, rates.mirrored()))
    np.testing.assert_allclose(P @ H @ P.T, Hm, atol=1e-15)


def test_to_exact_reads_decimal():
    assert BoundaryRates(0.1, 1, 0, 0).to_exact().alpha == Fraction(1, 10)
