"""Stochastic generators of the open symmetric simple exclusion process.

Conventions, fixed everywhere in the package:

* site state index 0 = empty, 1 = occupied;
* Kronecker factor order left to right is site 1 .. site N, so site 1 is the
  most significant bit of a configuration index;
* master equation ``d|P>/dt = H |P>``: columns of ``H`` sum to zero and
  off-diagonal entries are non-negative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from .tensor_core import DimensionError, embed_local

__all__ = [
    "MAX_SITES",
    "Side",
    "YVariant",
    "BoundaryKind",
    "BoundaryRates",
    "ProcessSpec",
    "build_bulk_h",
    "build_boundary",
    "build_dual_rates",
    "dual_rates",
    "assemble_generator",
    "assemble_H",
    "is_equilibrium",
]

MAX_SITES = 12


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class YVariant(enum.Enum):
    """Which product operator fixes the equilibrium dual."""

    YR = "yr"
    YL = "yl"


class BoundaryKind(enum.Enum):
    NON_EQUILIBRIUM = "non_equilibrium"
    DUAL_EQUILIBRIUM_RIGHT = "dual_equilibrium_right"
    DUAL_EQUILIBRIUM_LEFT = "dual_equilibrium_left"


@dataclass(frozen=True)
class BoundaryRates:
    """Reservoir rates of one open boundary set.

    alpha: injection at site 1, gamma: extraction at site 1,
    delta: injection at site N, beta: extraction at site N.
    Entries may be floats or :class:`~fractions.Fraction` (exact mode).
    """

    alpha: Real
    beta: Real
    gamma: Real
    delta: Real

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, Real):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            if value != value or abs(value) == float("inf"):
                raise ValueError(f"{name} must be finite")
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
        if self.alpha + self.gamma <= 0:
            raise ValueError("alpha + gamma must be positive")
        if self.beta + self.delta <= 0:
            raise ValueError("beta + delta must be positive")

    @classmethod
    def from_sequence(cls, values) -> "BoundaryRates":
        a, b, g, d = values
        return cls(a, b, g, d)

    def as_tuple(self) -> tuple:
        return (self.alpha, self.beta, self.gamma, self.delta)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.as_tuple())

    def to_exact(self) -> "BoundaryRates":
        """Convert to rationals through the decimal repr (0.1 -> 1/10)."""
        return BoundaryRates(*(Fraction(str(x)) if not isinstance(x, Fraction) else x
                               for x in self.as_tuple()))

    def to_float(self) -> "BoundaryRates":
        return BoundaryRates(*(float(x) for x in self.as_tuple()))

    def mirrored(self) -> "BoundaryRates":
        """Rates of the spatially reflected chain (site i -> N+1-i)."""
        return BoundaryRates(self.delta, self.gamma, self.beta, self.alpha)

    @property
    def left_sum(self):
        return self.alpha + self.gamma

    @property
    def right_sum(self):
        return self.beta + self.delta

    @property
    def ratio(self):
        """``r = (alpha + gamma) / (beta + delta)``."""
        return self.left_sum / self.right_sum

    @property
    def drive(self):
        """``alpha*beta - gamma*delta``; zero for equilibrium boundaries."""
        return self.alpha * self.beta - self.gamma * self.delta


@dataclass(frozen=True)
class ProcessSpec:
    N: int
    rates: BoundaryRates
    kind: BoundaryKind = BoundaryKind.NON_EQUILIBRIUM

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")


def _matrix(rows, exact: bool) -> np.ndarray:
    if exact:
        return np.array([[Fraction(x) for x in row] for row in rows], dtype=object)
    return np.array(rows, dtype=float)


def build_bulk_h(exact: bool = False) -> np.ndarray:
    """Two-site symmetric hopping generator (swap minus identity)."""
    return _matrix([[0, 0, 0, 0],
                    [0, -1, 1, 0],
                    [0, 1, -1, 0],
                    [0, 0, 0, 0]], exact)


def build_boundary(side: Side, rates: BoundaryRates) -> np.ndarray:
    a, b, g, d = rates.as_tuple()
    if side is Side.LEFT:
        rows = [[-a, g], [a, -g]]
    else:
        rows = [[-d, b], [d, -b]]
    return _matrix(rows, rates.exact)


def build_dual_rates(rates: BoundaryRates, variant: YVariant = YVariant.YR):
    """Boundary matrices ``(B_L, B_R, r)`` of the equilibrium dual process.

    For ``YR`` the right reservoir is kept and the left one is replaced by a
    rescaled copy of it. ``YL`` is the mirror image: the left reservoir is
    kept and copied, rescaled by ``1/r``, onto the right end.
    """
    r = rates.ratio
    A_L = build_boundary(Side.LEFT, rates)
    A_R = build_boundary(Side.RIGHT, rates)
    if variant is YVariant.YR:
        return r * A_R, A_R, r
    return A_L, A_L / r, r


def dual_rates(rates: BoundaryRates, variant: YVariant = YVariant.YR) -> BoundaryRates:
    """The equilibrium rate set whose boundary matrices are :func:`build_dual_rates`."""
    a, b, g, d = rates.as_tuple()
    r = rates.ratio
    if variant is YVariant.YR:
        return BoundaryRates(r * d, b, r * b, d)
    return BoundaryRates(a, g / r, g, a / r)


def assemble_generator(N: int, B_L: np.ndarray, B_R: np.ndarray,
                       h: np.ndarray | None = None) -> np.ndarray:
    """``B_L`` on site 1, ``B_R`` on site N, and ``h`` on every bond."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > MAX_SITES:
        raise DimensionError(f"N = {N} exceeds the cap of {MAX_SITES} sites")
    exact = B_L.dtype == object or B_R.dtype == object
    if h is None:
        h = build_bulk_h(exact)
    H = embed_local(B_L, 1, 1, N) + embed_local(B_R, N, 1, N)
    for i in range(1, N):
        H = H + embed_local(h, i, 2, N)
    return H


def assemble_H(spec: ProcessSpec) -> np.ndarray:
    rates = spec.rates
    if spec.kind is BoundaryKind.NON_EQUILIBRIUM:
        B_L = build_boundary(Side.LEFT, rates)
        B_R = build_boundary(Side.RIGHT, rates)
    else:
        variant = YVariant.YR if spec.kind is BoundaryKind.DUAL_EQUILIBRIUM_RIGHT else YVariant.YL
        B_L, B_R, _ = build_dual_rates(rates, variant)
    return assemble_generator(spec.N, B_L, B_R)


def is_equilibrium(rates: BoundaryRates, tol: float = 1e-12) -> bool:
    """True iff ``alpha*beta == gamma*delta`` (exactly, for rational rates)."""
    drive = rates.drive
    if rates.exact:
        return drive == 0
    scale = max(1.0, abs(rates.alpha * rates.beta), abs(rates.gamma * rates.delta))
    return abs(drive) <= tol * scale

