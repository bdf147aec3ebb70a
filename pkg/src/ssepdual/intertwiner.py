"""Matrix-product-operator intertwiners between open SSEP generators.

Site tensors are arrays of shape ``(2, 2, m, m)`` indexed as
``[phys_out, phys_in, aux_left, aux_right]``; the dense operator is

    G[tau, tau'] = <W| T^{tau_1 tau'_1} ... T^{tau_N tau'_N} |V>

with site 1 the most significant bit of ``tau``. The auxiliary space is a
finite window ``[n_min, n_max]`` of the bi-infinite lattice on which the
D/E/F representation lives. Starting from ``|V> = |0>`` every site moves the
auxiliary index by at most one, so ``N`` sites only ever reach ``[-N, N]``;
the default window adds one guard index on each side.

The ``YL`` constructions are the spatial mirror images of the ``YR`` ones:
they are built from the reflected rates with auxiliary matrices transposed
and the boundary vectors exchanged.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ssep_model import MAX_SITES, BoundaryRates, YVariant
from .tensor_core import (
    DimensionError,
    best_scalar,
    frobenius_residual,
    identity,
    kron,
    kron_power,
)

__all__ = [
    "EquilibriumRatesError",
    "PoleError",
    "ConstraintViolated",
    "Direction",
    "AuxWindow",
    "RepMatrices",
    "SiteTensors",
    "MpoIntertwiner",
    "ClosureResult",
    "build_rep",
    "build_Y_factor",
    "build_Y",
    "inverse_2x2",
    "phys_left",
    "phys_right",
    "build_G",
    "build_G_prime",
    "build_local",
    "compose_tilde_G",
    "contract",
    "contract_dense_tilde_G",
    "closure_check",
    "check_rate_sums",
]


class EquilibriumRatesError(ValueError):
    """The representation is singular because alpha*beta == gamma*delta."""


class PoleError(ValueError):
    """Some r_n vanishes on a bond the contraction can reach."""

    def __init__(self, n: int):
        super().__init__(f"r_n vanishes at n = {n}: F_(n,n+1) diverges")
        self.n = n


class ConstraintViolated(ValueError):
    """Composed rate sets do not share alpha+gamma and beta+delta."""


class Direction(enum.Enum):
    NE_TO_E = "ne_to_e"
    E_TO_NE = "e_to_ne"
    COMPOSED = "composed"


@dataclass(frozen=True)
class AuxWindow:
    n_min: int
    n_max: int

    def __post_init__(self):
        if not self.n_min <= 0 <= self.n_max:
            raise ValueError(f"window [{self.n_min}, {self.n_max}] must contain 0")

    @classmethod
    def for_sites(cls, N: int, guard: int = 1) -> "AuxWindow":
        return cls(-N - guard, N + guard)

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def position(self, n: int) -> int:
        return n - self.n_min

    def widened(self, k: int) -> "AuxWindow":
        return AuxWindow(self.n_min - k, self.n_max + k)

    def interior(self, margin: int = 2) -> slice:
        """Positions at distance >= ``margin`` from either window edge."""
        return slice(margin, self.size - margin)

    def supports(self, N: int) -> bool:
        return self.n_min <= -N - 1 and self.n_max >= N + 1


@dataclass(frozen=True)
class RepMatrices:
    """Truncated D, E, F on a window, plus the ``r_n`` used for each bond."""

    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    r_seq: dict
    window: AuxWindow
    negated: bool = False
    masked_guards: tuple = ()

    @property
    def exact(self) -> bool:
        return self.D.dtype == object


@dataclass(frozen=True)
class SiteTensors:
    L: np.ndarray
    Z: np.ndarray | None = None


@dataclass(frozen=True)
class MpoIntertwiner:
    site_tensors: SiteTensors
    W: np.ndarray
    V: np.ndarray
    N: int
    direction: Direction
    variant: YVariant
    rates: BoundaryRates
    window: AuxWindow | None = None
    rep: RepMatrices | None = None
    y_factor: np.ndarray | None = None
    rates_b: BoundaryRates | None = None
    mirrored: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def bond_dim(self) -> int:
        return self.W.shape[0]

    @property
    def exact(self) -> bool:
        return self.W.dtype == object


def _zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape)


def _unit(size: int, pos: int, exact: bool) -> np.ndarray:
    v = _zeros(size, exact)
    v[pos] = Fraction(1) if exact else 1.0
    return v


def _ones(size: int, exact: bool) -> np.ndarray:
    if exact:
        return np.full(size, Fraction(1), dtype=object)
    return np.ones(size)


def _is_zero(x, scale) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= 1e-12 * max(1.0, abs(scale))


def build_rep(rates: BoundaryRates, window: AuxWindow, negate: bool = False) -> RepMatrices:
    """Bidiagonal representation of ``[E,F]=F, [D,F]=-F, [D,E]=D+E``.

    Non-zero entries, with ``s = beta+delta``, ``t = alpha+gamma``:

        D[n,n] = -E[n,n] = n + 1/s,   F[n,n+1] = 1/r_n,
        D[n+1,n] = delta*t*r_n/s,     E[n+1,n] = beta*t*r_n/s,
        r_n = s/(alpha*beta - gamma*delta) * (1/t + 1/s + n).

    With ``negate`` every rate is replaced by its negative first. A vanishing
    ``r_n`` is an error unless it sits on the outermost (guard) bond of the
    window, which no contraction seeded at ``|0>`` reaches; there the
    divergent F entry is dropped and recorded in ``masked_guards``.
    """
    a, b, g, d = rates.as_tuple()
    if negate:
        a, b, g, d = -a, -b, -g, -d
    exact = rates.exact
    drive = a * b - g * d
    if drive == 0 or _is_zero(drive, max(abs(a * b), abs(g * d))):
        raise EquilibriumRatesError(
            f"alpha*beta - gamma*delta = 0 for {rates.as_tuple()}: representation is singular")
    s, t = b + d, a + g
    shift = 1 / t + 1 / s
    m = window.size
    D = _zeros((m, m), exact)
    E = _zeros((m, m), exact)
    F = _zeros((m, m), exact)
    r_seq = {}
    masked = []
    for i, n in enumerate(window.indices.tolist()):
        diag = n + 1 / s
        D[i, i] = diag
        E[i, i] = -diag
        r_n = s / drive * (shift + n)
        r_seq[n] = r_n
        if i + 1 == m:
            continue
        if _is_zero(shift + n, n):
            if i == 0 or i + 2 == m:
                masked.append(n)
                continue
            raise PoleError(n)
        F[i, i + 1] = 1 / r_n
        D[i + 1, i] = d * t * r_n / s
        E[i + 1, i] = b * t * r_n / s
    return RepMatrices(D, E, F, r_seq, window, negate, tuple(masked))


def build_Y_factor(rates: BoundaryRates, variant: YVariant = YVariant.YR) -> np.ndarray:
    """Single-site factor of the product operator ``Y``."""
    a, b, g, d = rates.as_tuple()
    t, s = a + g, b + d
    if variant is YVariant.YR:
        rows = [[-1 / t, b / s], [1 / t, d / s]]
    else:
        rows = [[-1 / s, g / t], [1 / s, a / t]]
    return np.array(rows, dtype=object if rates.exact else float)


def build_Y(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR) -> np.ndarray:
    return kron_power(build_Y_factor(rates, variant), N)


def inverse_2x2(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0:
        raise ZeroDivisionError("singular 2x2 factor")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=m.dtype) / det


def phys_left(M: np.ndarray, T: np.ndarray) -> np.ndarray:
    """``(M T)^{s t} = sum_u M[s,u] T^{u t}`` on the physical legs."""
    return np.tensordot(M, T, axes=([1], [0]))


def phys_right(T: np.ndarray, M: np.ndarray) -> np.ndarray:
    """``(T M)^{s t} = sum_u T^{s u} M[u,t]`` on the physical legs."""
    return np.tensordot(T, M, axes=([1], [0])).transpose(0, 3, 1, 2)


def _blocks(rows) -> np.ndarray:
    return np.array([[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]])


def _check_size(N: int, window: AuxWindow) -> None:
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > MAX_SITES:
        raise DimensionError(f"N = {N} exceeds the cap of {MAX_SITES} sites")
    if not window.supports(N):
        raise ValueError(f"window [{window.n_min}, {window.n_max}] too small for N = {N}")


def _mirror(tensors: SiteTensors, W, V) -> tuple[SiteTensors, np.ndarray, np.ndarray]:
    # Reversing the site order transposes every auxiliary matrix and flips the
    # sign of the divergence term.
    L = tensors.L.transpose(0, 1, 3, 2)
    Z = None if tensors.Z is None else -tensors.Z.transpose(0, 1, 3, 2)
    return SiteTensors(L, Z), V, W


def _g_tensors(rates: BoundaryRates, window: AuxWindow):
    rep = build_rep(rates, window)
    exact = rep.exact
    I = identity(window.size, exact)
    O = _zeros(I.shape, exact)
    L = _blocks([[-rep.F, rep.E], [rep.F, rep.D]])
    Z = _blocks([[O, -I], [O, I]])
    yinv = inverse_2x2(build_Y_factor(rates, YVariant.YR))
    tensors = SiteTensors(phys_right(L, yinv), phys_right(Z, yinv))
    return rep, tensors


def _g_prime_tensors(rates: BoundaryRates, window: AuxWindow):
    rep = build_rep(rates, window, negate=True)
    exact = rep.exact
    I = identity(window.size, exact)
    O = _zeros(I.shape, exact)
    L = _blocks([[rep.D, -rep.E], [rep.F, rep.F]])
    Z = -_blocks([[I, I], [O, O]])
    y = build_Y_factor(rates, YVariant.YR)
    tensors = SiteTensors(phys_left(y, L), phys_left(y, Z))
    return rep, tensors


def _assemble(rates, N, variant, window, direction) -> MpoIntertwiner:
    source = rates if variant is YVariant.YR else rates.mirrored()
    maker = _g_tensors if direction is Direction.NE_TO_E else _g_prime_tensors
    rep, tensors = maker(source, window)
    W = _ones(window.size, rep.exact)
    V = _unit(window.size, window.position(0), rep.exact)
    mirrored = variant is YVariant.YL
    if mirrored:
        tensors, W, V = _mirror(tensors, W, V)
    return MpoIntertwiner(
        site_tensors=tensors, W=W, V=V, N=N, direction=direction, variant=variant,
        rates=rates, window=window, rep=rep, y_factor=build_Y_factor(rates, variant),
        mirrored=mirrored)


def _build(rates, N, variant, window, guard, direction):
    window = window or AuxWindow.for_sites(N, guard)
    _check_size(N, window)
    return _assemble(rates, N, variant, window, direction)


def build_local(rates: BoundaryRates, window: AuxWindow,
                direction: Direction = Direction.NE_TO_E,
                variant: YVariant = YVariant.YR) -> MpoIntertwiner:
    """Site tensors on an arbitrary window, for local (per-index) relations.

    The window need not support any chain length, so it can be chosen to
    leave out a pole bond. The result has ``N = None`` and cannot be
    contracted.
    """
    return _assemble(rates, None, variant, window, direction)


def build_G(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
            window: AuxWindow | None = None, guard: int = 1) -> MpoIntertwiner:
    """Intertwiner ``G`` with ``H_NE G = G H_E`` (non-equilibrium to equilibrium).

    Site tensor ``L Y^{-1}`` with ``L = ((-F, E), (F, D))`` and divergence
    tensor ``Z Y^{-1}`` with ``Z = ((0, -1), (0, 1))``.
    """
    return _build(rates, N, variant, window, guard, Direction.NE_TO_E)


def build_G_prime(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
                  window: AuxWindow | None = None, guard: int = 1) -> MpoIntertwiner:
    """Intertwiner ``G'`` with ``H_E G' = G' H_NE`` (equilibrium to non-equilibrium).

    Site tensor ``Y L~`` with ``L~ = ((D', -E'), (F', F'))`` evaluated at the
    negated rates, and divergence tensor ``-Y ((1, 1), (0, 0))``.
    """
    return _build(rates, N, variant, window, guard, Direction.E_TO_NE)


def check_rate_sums(a: BoundaryRates, b: BoundaryRates, rtol: float = 1e-12) -> None:
    """Raise :class:`ConstraintViolated` unless both reservoir sums agree."""
    for name, x, y in (("alpha+gamma", a.left_sum, b.left_sum),
                       ("beta+delta", a.right_sum, b.right_sum)):
        if isinstance(x, Fraction) and isinstance(y, Fraction):
            ok = x == y
        else:
            ok = abs(x - y) <= rtol * max(1.0, abs(x), abs(y))
        if not ok:
            raise ConstraintViolated(f"{name} differs: {x} vs {y}")


def _fuse(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """MPO product: physical legs multiplied, auxiliary legs tensored."""
    # (s,u,i,j) x (u,t,k,l) -> (s,i,j,t,k,l) -> (s,t,i,k,j,l)
    out = np.tensordot(A, B, axes=([1], [0])).transpose(0, 3, 1, 4, 2, 5)
    s, t, i, k, j, l = out.shape
    return out.reshape(s, t, i * k, j * l)


def compose_tilde_G(rates_a: BoundaryRates, rates_b: BoundaryRates, N: int,
                    variant: YVariant = YVariant.YR) -> MpoIntertwiner:
    """``G~(a, b) = G(a) Y(a) Y(b)^{-1} G'(b)`` as a single MPO.

    The auxiliary space is the tensor product of the two component windows;
    nothing is compressed.
    """
    check_rate_sums(rates_a, rates_b)
    Ga = build_G(rates_a, N, variant)
    Gb = build_G_prime(rates_b, N, variant)
    middle = Ga.y_factor @ inverse_2x2(Gb.y_factor)
    L = _fuse(phys_right(Ga.site_tensors.L, middle), Gb.site_tensors.L)
    return MpoIntertwiner(
        site_tensors=SiteTensors(L), W=kron(Ga.W[None, :], Gb.W[None, :]).ravel(),
        V=kron(Ga.V[None, :], Gb.V[None, :]).ravel(), N=N, direction=Direction.COMPOSED,
        variant=variant, rates=rates_a, rates_b=rates_b, mirrored=Ga.mirrored)


def contract(mpo: MpoIntertwiner, overrides: dict | None = None,
             max_sites: int = MAX_SITES) -> np.ndarray:
    """Dense ``2^N x 2^N`` operator of an MPO.

    ``overrides`` maps 1-based sites to replacement site tensors (used for
    operator insertions).
    """
    N = mpo.N
    if N is None:
        raise ValueError("MPO was built for local checks only and has no chain length")
    if N > max_sites:
        raise DimensionError(f"N = {N} exceeds the cap of {max_sites} sites")
    overrides = overrides or {}
    for site in overrides:
        if not 1 <= site <= N:
            raise IndexError(f"site {site} outside 1..{N}")
    acc = mpo.W.reshape(1, 1, -1)
    for site in range(1, N + 1):
        T = overrides.get(site, mpo.site_tensors.L)
        # (r,c,i) x (s,t,i,j) -> (r,c,s,t,j) -> (r,s,c,t,j)
        nxt = np.tensordot(acc, T, axes=([2], [2])).transpose(0, 2, 1, 3, 4)
        r, s, c, t, j = nxt.shape
        acc = nxt.reshape(r * s, c * t, j)
    return np.tensordot(acc, mpo.V, axes=([2], [0]))


def contract_dense_tilde_G(rates_a, rates_b, N, variant=YVariant.YR) -> np.ndarray:
    """``G~`` assembled from dense factors instead of the fused MPO."""
    check_rate_sums(rates_a, rates_b)
    G = contract(build_G(rates_a, N, variant))
    Gp = contract(build_G_prime(rates_b, N, variant))
    Ya = build_Y(rates_a, N, variant)
    Yb_inv = kron_power(inverse_2x2(build_Y_factor(rates_b, variant)), N)
    return G @ Ya @ Yb_inv @ Gp


@dataclass(frozen=True)
class ClosureResult:
    raw_residual: float
    fitted_residual: float
    scalar: float


def closure_check(rates_a: BoundaryRates, rates_b: BoundaryRates, rates_c: BoundaryRates,
                  N: int, variant: YVariant = YVariant.YR) -> ClosureResult:
    """Residual of ``G~(a,b) G~(b,c) - G~(a,c)``, raw and after a scalar fit."""
    check_rate_sums(rates_a, rates_b)
    check_rate_sums(rates_b, rates_c)
    ab = contract(compose_tilde_G(rates_a, rates_b, N, variant))
    bc = contract(compose_tilde_G(rates_b, rates_c, N, variant))
    ac = contract(compose_tilde_G(rates_a, rates_c, N, variant))
    lhs = np.asarray(ab @ bc, dtype=float)
    rhs = np.asarray(ac, dtype=float)
    c = best_scalar(lhs, rhs)
    return ClosureResult(frobenius_residual(lhs, rhs), frobenius_residual(lhs, c * rhs), c)
