"""Multi-point density correlations, directly and through the intertwiner."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .intertwiner import MpoIntertwiner, build_G, contract, inverse_2x2, phys_right
from .ssep_model import BoundaryRates, YVariant
from .steady_state import build_bernoulli, build_dehp_mps, oracle_for

__all__ = [
    "XConvention",
    "CorrelatorSpec",
    "occupation_mask",
    "correlate_direct",
    "insertion_tensor",
    "correlate_dual",
    "dual_normalization",
    "density_profile",
]


class XConvention(enum.Enum):
    """Whether the insertion tensor carries the per-site ``Y^{-1}`` like ``L``."""

    X_RAW = "x_raw"
    X_TIMES_YINV = "x_times_yinv"


@dataclass(frozen=True)
class CorrelatorSpec:
    sites: tuple
    rates: BoundaryRates
    N: int

    def __post_init__(self):
        sites = tuple(int(i) for i in self.sites)
        object.__setattr__(self, "sites", sites)
        if not sites:
            raise ValueError("at least one site is required")
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ValueError(f"sites must be strictly increasing: {sites}")
        if sites[0] < 1 or sites[-1] > self.N:
            raise IndexError(f"sites {sites} outside 1..{self.N}")


def occupation_mask(sites, N: int) -> np.ndarray:
    """Boolean mask of configurations in which every listed site is occupied."""
    idx = np.arange(2**N)
    mask = np.ones(2**N, dtype=bool)
    for i in sites:
        mask &= ((idx >> (N - i)) & 1).astype(bool)
    return mask


def correlate_direct(spec: CorrelatorSpec, source: str = "oracle") -> float:
    """``<1| n_i ... n_j |P_ss>`` in the normalized non-equilibrium steady state.

    ``source`` picks the brute-force null vector (``"oracle"``) or the
    matrix-product state (``"dehp"``).
    """
    if source == "oracle":
        p = oracle_for(spec.rates, spec.N).vector
    elif source == "dehp":
        p = build_dehp_mps(spec.rates, spec.N).vector
    else:
        raise ValueError(f"unknown source {source!r}")
    return float(np.asarray(p, dtype=float)[occupation_mask(spec.sites, spec.N)].sum())


def insertion_tensor(mpo: MpoIntertwiner, convention: XConvention) -> np.ndarray:
    """``X = ((0, 0), (F, D))`` in the MPO's auxiliary layout."""
    if mpo.rep is None or mpo.y_factor is None:
        raise ValueError("insertions need an MPO built by build_G")
    F, D = mpo.rep.F, mpo.rep.D
    X = np.array([[0 * F, 0 * F], [F, D]])
    if convention is XConvention.X_TIMES_YINV:
        X = phys_right(X, inverse_2x2(mpo.y_factor))
    if mpo.mirrored:
        X = X.transpose(0, 1, 3, 2)
    return X


def _covector_value(mpo, state, overrides=None) -> float:
    G = contract(mpo, overrides)
    return float(np.sum(np.asarray(G @ state, dtype=float)))


def dual_normalization(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR) -> float:
    """``<1| G |Bernoulli>``: the dual-path value with no insertion."""
    mpo = build_G(rates, N, variant)
    return _covector_value(mpo, build_bernoulli(rates, N, variant).vector)


def correlate_dual(spec: CorrelatorSpec,
                   convention: XConvention = XConvention.X_TIMES_YINV,
                   variant: YVariant = YVariant.YR) -> float:
    """Same correlator evaluated against the product measure of the dual.

    ``X`` replaces the site tensor at every listed site; the result is
    divided by the insertion-free value so both paths share a normalization.
    """
    mpo = build_G(spec.rates, spec.N, variant)
    bern = build_bernoulli(spec.rates, spec.N, variant).vector
    X = insertion_tensor(mpo, convention)
    value = _covector_value(mpo, bern, {i: X for i in spec.sites})
    return value / _covector_value(mpo, bern)


def density_profile(rates: BoundaryRates, N: int) -> list[float]:
    p = np.asarray(oracle_for(rates, N).vector, dtype=float)
    return [float(p[occupation_mask([i], N)].sum()) for i in range(1, N + 1)]
