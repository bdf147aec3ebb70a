"""Dense linear-algebra substrate.

Operators and vectors are plain numpy arrays. Two scalar modes are supported:

* float mode: ``float64`` arrays (the default);
* exact mode: ``object`` arrays holding :class:`fractions.Fraction` entries,
  used for zero-tolerance certification at very small system sizes.

Every routine here accepts either kind, except :func:`null_space`, which
always works in floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import numpy as np

__all__ = [
    "MAX_SIDE",
    "DimensionError",
    "is_exact",
    "identity",
    "kron",
    "kron_power",
    "embed_local",
    "null_space",
    "frobenius_norm",
    "frobenius_residual",
    "angle",
    "best_scalar",
    "to_float",
]

MAX_SIDE = 2**20


class DimensionError(ValueError):
    """Raised when an operator would exceed the configured size cap."""


def is_exact(a) -> bool:
    """True for object arrays (exact rational mode)."""
    return isinstance(a, np.ndarray) and a.dtype == object


def identity(n: int, exact: bool = False) -> np.ndarray:
    if not exact:
        return np.eye(n)
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def to_float(a) -> np.ndarray:
    return np.asarray(a, dtype=float)


def _check_finite(a: np.ndarray) -> None:
    if not is_exact(a) and not np.all(np.isfinite(a)):
        raise ValueError("operator has non-finite entries")


def kron(a: np.ndarray, b: np.ndarray, max_side: int = MAX_SIDE) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` with a cap on the result dimension."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > max_side:
        raise DimensionError(f"kron result {rows}x{cols} exceeds cap {max_side}")
    return np.kron(a, b)


def kron_power(a: np.ndarray, n: int, max_side: int = MAX_SIDE) -> np.ndarray:
    """N-fold tensor power; ``n = 0`` gives the 1x1 identity."""
    if n == 0:
        return identity(1, exact=is_exact(a))
    return reduce(lambda x, y: kron(x, y, max_side), [a] * n)


def embed_local(op: np.ndarray, site: int, span: int, N: int, d: int = 2) -> np.ndarray:
    """Place a ``span``-site operator acting on sites ``site..site+span-1``.

    Sites are 1-based; site 1 is the leftmost (most significant) tensor factor.
    Returns ``1^{site-1} ⊗ op ⊗ 1^{N-site-span+1}``.
    """
    if site < 1 or span < 1 or site + span - 1 > N:
        raise IndexError(f"cannot place a {span}-site operator at site {site} of {N}")
    if op.shape != (d**span, d**span):
        raise ValueError(f"operator shape {op.shape} does not match d**span = {d**span}")
    if d**N > MAX_SIDE:
        raise DimensionError(f"{d}**{N} exceeds cap {MAX_SIDE}")
    exact = is_exact(op)
    left = identity(d ** (site - 1), exact)
    right = identity(d ** (N - site - span + 1), exact)
    return kron(kron(left, op), right)


def null_space(op: np.ndarray, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal basis of the right null space of a square matrix.

    Singular values below ``tol * max_singular_value`` count as zero.
    """
    op = to_float(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError(f"null_space needs a square matrix, got shape {op.shape}")
    _check_finite(op)
    _, s, vh = np.linalg.svd(op)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return [row.copy() for row in np.eye(op.shape[1])]
    rank = int(np.sum(s > tol * smax))
    return [vh[k].copy() for k in range(rank, op.shape[1])]


def frobenius_norm(a: np.ndarray) -> float:
    if is_exact(a):
        return math.sqrt(float(sum(x * x for x in a.ravel())))
    return float(np.linalg.norm(np.asarray(a, dtype=float).ravel()))


def frobenius_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Relative Frobenius distance ``|a - b|_F / max(1, |a|_F)``.

    In exact mode the difference is formed in rational arithmetic, so an
    identity that holds exactly yields exactly ``0.0``.
    """
    if np.shape(a) != np.shape(b):
        raise ValueError(f"shape mismatch {np.shape(a)} vs {np.shape(b)}")
    diff = np.asarray(a) - np.asarray(b)
    return frobenius_norm(diff) / max(1.0, frobenius_norm(a))


def angle(u: np.ndarray, v: np.ndarray) -> float:
    """Proportionality defect ``1 - |cos(u, v)|``; zero iff u ∥ v."""
    u = to_float(u).ravel()
    v = to_float(v).ravel()
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 1.0
    return float(max(0.0, 1.0 - abs(np.dot(u, v)) / (nu * nv)))


def best_scalar(a: np.ndarray, b: np.ndarray) -> float:
    """Least-squares ``c`` minimising ``|a - c b|_F``."""
    a = to_float(a).ravel()
    b = to_float(b).ravel()
    bb = float(np.dot(b, b))
    return float(np.dot(b, a) / bb) if bb else 0.0
