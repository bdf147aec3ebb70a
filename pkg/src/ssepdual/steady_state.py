"""Stationary distributions: matrix-product form, product measure, brute force."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .intertwiner import AuxWindow, Direction, MpoIntertwiner, build_rep, contract
from .ssep_model import BoundaryRates, ProcessSpec, YVariant, assemble_H
from .tensor_core import angle, best_scalar, kron_power, null_space, to_float

__all__ = [
    "Provenance",
    "SteadyState",
    "NegativeWeightError",
    "ZeroImageError",
    "NonUniqueSteadyState",
    "mps_amplitudes",
    "build_dehp_mps",
    "dehp_normalization",
    "build_bernoulli",
    "build_oracle",
    "oracle_for",
    "map_through",
]


class Provenance(enum.Enum):
    DEHP_MPS = "dehp_mps"
    BERNOULLI = "bernoulli"
    ORACLE = "oracle"
    MAPPED_THROUGH_G = "mapped_through_g"


class NegativeWeightError(ValueError):
    pass


class ZeroImageError(ValueError):
    pass


class NonUniqueSteadyState(ValueError):
    pass


@dataclass(frozen=True)
class SteadyState:
    """A probability vector over the ``2^N`` configurations.

    ``normalization`` is the entry sum before normalizing. For mapped states
    ``scalar`` is the least-squares factor between the unnormalized image and
    the unnormalized matrix-product state of the same rates (``None`` when no
    such reference applies).
    """

    vector: np.ndarray
    normalization: float
    provenance: Provenance
    scalar: float | None = None

    @property
    def N(self) -> int:
        return int(self.vector.shape[0]).bit_length() - 1

    def angle_to(self, other: "SteadyState | np.ndarray") -> float:
        v = other.vector if isinstance(other, SteadyState) else other
        return angle(self.vector, v)


def _normalized(raw: np.ndarray, provenance: Provenance, scalar=None) -> SteadyState:
    total = raw.sum()
    if total == 0:
        raise ZeroImageError("vector sums to zero; cannot normalize")
    return SteadyState(raw / total, total, provenance, scalar)


def mps_amplitudes(tensors, W: np.ndarray, V: np.ndarray, N: int) -> np.ndarray:
    """``<W| A^{tau_1} ... A^{tau_N} |V>`` for every configuration.

    ``tensors`` has shape ``(2, m, m)``; site 1 is the most significant bit.
    """
    acc = W.reshape(1, -1)
    for _ in range(N):
        # (r,i) x (s,i,j) -> (r,s,j)
        nxt = np.tensordot(acc, tensors, axes=([1], [1]))
        acc = nxt.reshape(-1, nxt.shape[-1])
    return acc @ V


def _dehp_parts(rates: BoundaryRates, N: int):
    # seeded at |0> and only lowered, so n never goes negative; r_n has no
    # zero for n >= 0, which keeps the state finite even where G has a pole
    window = AuxWindow(0, N + 1)
    rep = build_rep(rates, window)
    A = np.array([rep.E, rep.D])
    if rep.exact:
        W = np.full(window.size, Fraction(1), dtype=object)
        V = np.full(window.size, Fraction(0), dtype=object)
        V[window.position(0)] = Fraction(1)
    else:
        W = np.ones(window.size)
        V = np.zeros(window.size)
        V[window.position(0)] = 1.0
    return rep, A, W, V


def dehp_normalization(rates: BoundaryRates, N: int):
    """``Z_N = <W|(D+E)^N|V>``, computed as a power of the transfer matrix."""
    rep, _, W, V = _dehp_parts(rates, N)
    C = rep.D + rep.E
    vec = V
    for _ in range(N):
        vec = C @ vec
    return W @ vec


def build_dehp_mps(rates: BoundaryRates, N: int, tol: float = 1e-12,
                   normalize: bool = True) -> SteadyState | np.ndarray:
    """Matrix-product steady state with ``A^{empty} = E``, ``A^{occupied} = D``.

    With ``normalize=False`` the raw amplitudes are returned.
    """
    _, A, W, V = _dehp_parts(rates, N)
    raw = mps_amplitudes(A, W, V, N)
    if not normalize:
        return raw
    total = raw.sum()
    # all weights share the sign of Z_N, which is negative when alpha*beta < gamma*delta
    signed = to_float(raw) * np.sign(float(total))
    if np.any(signed < -tol * abs(float(total))):
        raise NegativeWeightError(f"weight of the wrong sign {signed.min()} for {rates.as_tuple()}")
    return SteadyState(raw / total, total, Provenance.DEHP_MPS)


def build_bernoulli(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR) -> SteadyState:
    """Product measure of the equilibrium dual.

    Per site (empty, occupied) = (beta, delta)/(beta+delta) for ``YR`` and
    (gamma, alpha)/(alpha+gamma) for ``YL``.
    """
    if variant is YVariant.YR:
        site = np.array([rates.beta, rates.delta]) / rates.right_sum
    else:
        site = np.array([rates.gamma, rates.alpha]) / rates.left_sum
    if rates.exact:
        site = site.astype(object)
    else:
        site = site.astype(float)
    vec = kron_power(site[:, None], N).ravel()
    return SteadyState(vec, vec.sum(), Provenance.BERNOULLI)


def build_oracle(H: np.ndarray, tol: float = 1e-10) -> SteadyState:
    """Normalized null vector of a generator, by singular value decomposition."""
    basis = null_space(H, tol)
    if len(basis) != 1:
        raise NonUniqueSteadyState(f"null space has dimension {len(basis)}")
    v = basis[0]
    return _normalized(v, Provenance.ORACLE)


def oracle_for(rates: BoundaryRates, N: int) -> SteadyState:
    return build_oracle(assemble_H(ProcessSpec(N, rates)))


def map_through(mpo: MpoIntertwiner, state: SteadyState, tol: float = 1e-14) -> SteadyState:
    """Apply a contracted intertwiner to a state and renormalize."""
    G = contract(mpo)
    if G.shape[1] != state.vector.shape[0]:
        raise ValueError(f"dimension mismatch: {G.shape} vs {state.vector.shape}")
    image = G @ state.vector
    if np.linalg.norm(to_float(image)) <= tol * max(1.0, np.linalg.norm(to_float(G))):
        raise ZeroImageError("intertwiner annihilates the state")
    scalar = None
    if mpo.direction is Direction.NE_TO_E:
        reference = build_dehp_mps(mpo.rates, mpo.N, normalize=False)
        scalar = best_scalar(image, reference)
    return _normalized(image, Provenance.MAPPED_THROUGH_G, scalar)
