from fractions import Fraction

import numpy as np
import pytest

from ssepdual.intertwiner import build_G
from ssepdual.ssep_model import (
    BoundaryRates,
    ProcessSpec,
    YVariant,
    assemble_generator,
    assemble_H,
    build_dual_rates,
)
from ssepdual.steady_state import (
    NonUniqueSteadyState,
    Provenance,
    SteadyState,
    ZeroImageError,
    build_bernoulli,
    build_dehp_mps,
    build_oracle,
    dehp_normalization,
    map_through,
    oracle_for,
)
from ssepdual.tensor_core import angle
from ssepdual.verification import random_rates

from conftest import SYMMETRIC


def dual_generator(rates, N, variant):
    B_L, B_R, _ = build_dual_rates(rates, variant)
    return assemble_generator(N, B_L, B_R)


def test_dehp_single_site_symmetric():
    state = build_dehp_mps(SYMMETRIC, 1)
    np.testing.assert_allclose(state.vector, [0.5, 0.5], atol=1e-15)
    assert state.provenance is Provenance.DEHP_MPS


def test_dehp_two_site_symmetry():
    p = build_dehp_mps(SYMMETRIC, 2).vector
    rho1 = p[2] + p[3]
    rho2 = p[1] + p[3]
    assert rho1 == pytest.approx(1 - rho2, abs=1e-15)


@pytest.mark.parametrize("N", range(1, 7))
def test_dehp_matches_oracle(N):
    for rates in random_rates(5, 4) + [SYMMETRIC]:
        dehp = build_dehp_mps(rates, N)
        assert dehp.angle_to(oracle_for(rates, N)) <= 1e-9
        assert abs(dehp.vector.sum() - 1) <= 1e-12
        assert dehp.vector.min() >= -1e-14


def test_dehp_negative_drive():
    # alpha*beta < gamma*delta: all raw weights share the sign of Z_N,
    # which alternates with N
    rates = BoundaryRates(0.3, 0.5, 1.2, 1.4)
    assert rates.drive < 0
    signs = set()
    for N in (3, 4):
        state = build_dehp_mps(rates, N)
        signs.add(np.sign(state.normalization))
        assert state.vector.min() >= 0
        assert state.angle_to(oracle_for(rates, N)) <= 1e-9
    assert signs == {-1.0, 1.0}


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_dehp_exact_is_null_vector(N):
    rates = BoundaryRates(2, 1, 0.5, 1).to_exact()
    raw = build_dehp_mps(rates, N, normalize=False)
    assert raw.dtype == object
    H = assemble_H(ProcessSpec(N, rates))
    assert all(x == 0 for x in H @ raw)
    assert isinstance(dehp_normalization(rates, N), Fraction)


@pytest.mark.parametrize("N", [1, 3, 5])
def test_dehp_normalization(N):
    rates = BoundaryRates(2, 1, 0.5, 1)
    raw = build_dehp_mps(rates, N, normalize=False)
    assert dehp_normalization(rates, N) == pytest.approx(raw.sum(), rel=1e-13)


def test_bernoulli_all_empty():
    for N in (1, 3):
        vec = build_bernoulli(BoundaryRates(1, 1, 0, 0), N).vector
        expected = np.zeros(2**N)
        expected[0] = 1
        np.testing.assert_array_equal(vec, expected)


def test_bernoulli_uniform():
    vec = build_bernoulli(BoundaryRates(1, 0.7, 0.3, 0.7), 2).vector
    np.testing.assert_allclose(vec, 0.25, rtol=1e-15)


@pytest.mark.parametrize("variant", list(YVariant))
def test_bernoulli_is_dual_steady_state(rates, variant):
    for N in (1, 3, 5):
        vec = build_bernoulli(rates, N, variant).vector
        assert np.abs(dual_generator(rates, N, variant) @ vec).max() <= 1e-12


@pytest.mark.parametrize("variant", list(YVariant))
@pytest.mark.parametrize("N", range(1, 7))
def test_g_maps_bernoulli_to_dehp(rates, variant, N):
    mapped = map_through(build_G(rates, N, variant), build_bernoulli(rates, N, variant))
    assert mapped.angle_to(build_dehp_mps(rates, N)) <= 1e-9
    assert mapped.angle_to(oracle_for(rates, N)) <= 1e-9
    assert mapped.provenance is Provenance.MAPPED_THROUGH_G
    # the unnormalized image is the unnormalized matrix-product state up to sign
    expected = 1.0 if variant is YVariant.YR else (-1.0) ** N
    assert mapped.scalar == pytest.approx(expected, rel=1e-9)


def test_g_maps_symmetric_single_site():
    mapped = map_through(build_G(SYMMETRIC, 1), build_bernoulli(SYMMETRIC, 1))
    np.testing.assert_allclose(mapped.vector, [0.5, 0.5], atol=1e-15)


@pytest.mark.parametrize("variant", list(YVariant))
def test_g_maps_dual_oracle_to_null_vector(rates, variant):
    N = 4
    dual_state = build_oracle(dual_generator(rates, N, variant))
    image = map_through(build_G(rates, N, variant), dual_state)
    H = assemble_H(ProcessSpec(N, rates))
    assert np.linalg.norm(H @ image.vector) <= 1e-9


def test_map_through_zero_state():
    zero = SteadyState(np.zeros(4), 0.0, Provenance.ORACLE)
    with pytest.raises(ZeroImageError):
        map_through(build_G(BoundaryRates(2, 1, 0.5, 1), 2), zero)


def test_map_through_dimension_mismatch():
    with pytest.raises(ValueError):
        map_through(build_G(BoundaryRates(2, 1, 0.5, 1), 2), build_bernoulli(SYMMETRIC, 3))


def test_oracle_requires_unique_null_vector():
    with pytest.raises(NonUniqueSteadyState):
        build_oracle(np.zeros((4, 4)))


def test_oracle_is_probability():
    state = oracle_for(BoundaryRates(2, 1, 0.5, 1), 4)
    assert state.vector.sum() == pytest.approx(1.0)
    assert state.vector.min() >= 0
    assert state.N == 4
    assert angle(state.vector, 3 * state.vector) <= 1e-15
