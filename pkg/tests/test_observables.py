import numpy as np
import pytest

from ssepdual.intertwiner import build_G
from ssepdual.observables import (
    CorrelatorSpec,
    XConvention,
    correlate_direct,
    correlate_dual,
    density_profile,
    dual_normalization,
    occupation_mask,
)
from ssepdual.ssep_model import BoundaryRates, YVariant, dual_rates
from ssepdual.steady_state import build_bernoulli, dehp_normalization, map_through, oracle_for
from ssepdual.verification import correlator_specs, random_rates

from conftest import SYMMETRIC


def test_mask():
    np.testing.assert_array_equal(occupation_mask([1], 2), [False, False, True, True])
    np.testing.assert_array_equal(occupation_mask([1, 2], 2), [False, False, False, True])


@pytest.mark.parametrize("sites,N,exc", [((), 3, ValueError), ((2, 1), 3, ValueError),
                                          ((2, 2), 3, ValueError), ((5,), 4, IndexError),
                                          ((0,), 4, IndexError)])
def test_spec_validation(sites, N, exc):
    with pytest.raises(exc):
        CorrelatorSpec(sites, SYMMETRIC, N)


def test_direct_single_site():
    assert correlate_direct(CorrelatorSpec([1], SYMMETRIC, 1)) == pytest.approx(0.5, abs=1e-15)


def test_direct_two_site_symmetry():
    left = correlate_direct(CorrelatorSpec([1], SYMMETRIC, 2))
    right = correlate_direct(CorrelatorSpec([2], SYMMETRIC, 2))
    assert left == pytest.approx(1 - right, abs=1e-15)
    # balance equations by hand: P(00, 01, 10, 11) = (1, 1, 3, 1) / 6
    np.testing.assert_allclose(oracle_for(SYMMETRIC, 2).vector, np.array([1, 1, 3, 1]) / 6,
                               atol=1e-15)
    assert left == pytest.approx(2 / 3, abs=1e-15)


def test_direct_full_lattice():
    rates = BoundaryRates(1.3, 0.8, 0.0, 0.0)
    N = 4
    full = correlate_direct(CorrelatorSpec(range(1, N + 1), rates, N))
    assert full == pytest.approx(oracle_for(rates, N).vector[-1], rel=1e-14)


def test_direct_sources_agree():
    spec = CorrelatorSpec([2, 3], BoundaryRates(2, 1, 0.5, 1), 4)
    assert correlate_direct(spec, "dehp") == pytest.approx(correlate_direct(spec), rel=1e-12)
    with pytest.raises(ValueError):
        correlate_direct(spec, "nope")


@pytest.mark.parametrize("variant", list(YVariant))
def test_dual_single_site_symmetric(variant):
    spec = CorrelatorSpec([1], SYMMETRIC, 1)
    assert correlate_dual(spec, XConvention.X_TIMES_YINV, variant) == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("variant", list(YVariant))
def test_dual_matches_direct(variant):
    for rates in random_rates(2, 4):
        for N in range(1, 6):
            for spec in correlator_specs(rates, N):
                direct = correlate_direct(spec)
                dual = correlate_dual(spec, XConvention.X_TIMES_YINV, variant)
                assert abs(dual - direct) <= 1e-8 * max(1.0, abs(direct))


def test_raw_insertion_fails_somewhere():
    rates = BoundaryRates(2, 1, 0.5, 1)
    errors = [abs(correlate_dual(s, XConvention.X_RAW) - correlate_direct(s))
              for s in correlator_specs(rates, 4)]
    assert max(errors) > 1e-3


def test_pair_correlator():
    spec = CorrelatorSpec([2, 3], BoundaryRates(2, 1, 0.5, 1), 4)
    assert correlate_dual(spec) == pytest.approx(correlate_direct(spec), rel=1e-10)


@pytest.mark.parametrize("variant", list(YVariant))
def test_empty_insertion_consistency(rates, variant):
    N = 4
    norm = dual_normalization(rates, N, variant)
    mapped = map_through(build_G(rates, N, variant), build_bernoulli(rates, N, variant))
    assert norm == pytest.approx(mapped.normalization, rel=1e-12)
    assert norm == pytest.approx(mapped.scalar * dehp_normalization(rates, N), rel=1e-9)


@pytest.mark.parametrize("N", [1, 2, 3, 6])
def test_profile_symmetry(N):
    rho = density_profile(SYMMETRIC, N)
    for i in range(N):
        assert rho[i] + rho[N - 1 - i] == pytest.approx(1.0, abs=1e-12)


def test_profile_flat_for_dual():
    rates = BoundaryRates(2, 1, 0.5, 1)
    rho = density_profile(dual_rates(rates, YVariant.YR), 5)
    np.testing.assert_allclose(rho, rates.delta / rates.right_sum, rtol=1e-12)


@pytest.mark.parametrize("N", range(2, 7))
def test_profile_is_linear(N):
    for rates in random_rates(8, 3):
        rho = np.array(density_profile(rates, N))
        line = np.linspace(rho[0], rho[-1], N)
        assert np.abs(rho - line).max() <= 1e-8
