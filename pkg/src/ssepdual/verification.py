"""Residual checks for every identity of the intertwiner construction.

Each ``check_*`` function returns a :class:`CheckReport`. Precondition
failures (equilibrium rates, poles, violated rate-sum constraints) propagate
as exceptions from the individual checks; :func:`run_suite` turns them into
errored reports and keeps going.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment

from .intertwiner import (
    AuxWindow,
    Direction,
    MpoIntertwiner,
    build_G,
    build_G_prime,
    build_local,
    build_rep,
    closure_check,
    contract,
    phys_left,
    phys_right,
)
from .observables import CorrelatorSpec, XConvention, correlate_direct, correlate_dual
from .ssep_model import (
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
from .steady_state import build_bernoulli, build_dehp_mps, dehp_normalization, map_through, oracle_for
from .tensor_core import best_scalar, frobenius_norm, frobenius_residual, to_float

__all__ = [
    "DEFAULT_TOLERANCES",
    "CheckReport",
    "SuiteConfig",
    "random_rates",
    "constrained_triples",
    "check_generator",
    "check_rep_algebra",
    "check_bulk_exchange",
    "check_boundary_exchange",
    "check_intertwining",
    "check_window_stability",
    "check_inverse",
    "check_closure",
    "check_spectra",
    "check_steady_state",
    "check_dual_equilibrium",
    "check_dehp_normalization",
    "check_correlators",
    "select_convention",
    "convention_report",
    "correlator_specs",
    "run_suite",
]

DEFAULT_TOLERANCES = {
    "generator": 1e-13,
    "rep_algebra": 1e-12,
    "bulk_exchange": 1e-12,
    "boundary_exchange": 1e-12,
    "intertwining": 1e-9,
    "window_stability": 1e-12,
    "steady_state": 1e-9,
    "dual_equilibrium": 1e-12,
    "dehp_normalization": 1e-12,
    "inverse": 1e-10,
    "closure": 1e-8,
    "spectra": 1e-8,
    "correlator": 1e-8,
}


@dataclass
class CheckReport:
    check_name: str
    N: int | None
    rates: tuple
    residual: float
    tolerance: float
    passed: bool = field(init=False)
    rates_b: tuple | None = None
    details: dict = field(default_factory=dict)
    error: str | None = None

    def __post_init__(self):
        self.passed = self.error is None and bool(self.residual <= self.tolerance)

    @classmethod
    def errored(cls, check_name, N, rates, tolerance, exc, rates_b=None) -> "CheckReport":
        return cls(check_name, N, rates, float("nan"), tolerance, rates_b=rates_b,
                   error=f"{type(exc).__name__}: {exc}")

    def to_record(self) -> dict:
        """Flat record with a stable field order and 17 significant digits."""
        return {
            "check_name": self.check_name,
            "N": "" if self.N is None else self.N,
            "rates": _fmt_rates(self.rates),
            "rates_b": "" if self.rates_b is None else _fmt_rates(self.rates_b),
            "residual": _fmt(self.residual),
            "tolerance": _fmt(self.tolerance),
            "passed": self.passed,
            "details": ";".join(f"{k}={_fmt(v)}" for k, v in sorted(self.details.items())),
            "error": self.error or "",
        }


def _fmt(x) -> str:
    if isinstance(x, bool) or isinstance(x, str):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating, Fraction)):
        return format(float(x), ".17g")
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in x) + "]"
    return str(x)


def _fmt_rates(rates) -> str:
    if isinstance(rates, BoundaryRates):
        rates = rates.as_tuple()
    return ",".join(_fmt(v) for v in rates)


def _tuple(rates) -> tuple:
    return tuple(float(x) for x in rates.as_tuple()) if rates is not None else None


# --------------------------------------------------------------------------
# random inputs

def _acceptable(rates: BoundaryRates, drive_margin: float, pole_margin: float) -> bool:
    a, b, g, d = rates.as_tuple()
    if abs(a * b - g * d) < drive_margin * max(a * b, g * d):
        return False
    shift = 1 / (a + g) + 1 / (b + d)
    return abs(shift - round(shift)) >= pole_margin


def random_rates(seed: int, count: int, high: float = 3.0, drive_margin: float = 0.05,
                 pole_margin: float = 0.02) -> list[BoundaryRates]:
    """Seeded rate sets with every rate in ``(0, high]``.

    Near-equilibrium sets (relative drive below ``drive_margin``) and sets
    whose ``r_n`` has a pole within ``pole_margin`` of an integer are rejected.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        vals = high * (1.0 - rng.random(4))
        rates = BoundaryRates(*(float(v) for v in vals))
        if _acceptable(rates, drive_margin, pole_margin):
            out.append(rates)
    return out


def constrained_triples(seed: int, count: int, high: float = 3.0, drive_margin: float = 0.05,
                        pole_margin: float = 0.02) -> list[tuple[BoundaryRates, ...]]:
    """Seeded triples sharing ``alpha+gamma`` and ``beta+delta``."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        t, s = high * (1.0 - rng.random(2)) + 0.2
        triple = []
        while len(triple) < 3:
            fa, fb = rng.uniform(0.05, 0.95, 2)
            rates = BoundaryRates(fa * t, fb * s, (1 - fa) * t, (1 - fb) * s)
            if _acceptable(rates, drive_margin, pole_margin):
                triple.append(rates)
        out.append(tuple(triple))
    return out


# --------------------------------------------------------------------------
# individual checks

def check_generator(rates: BoundaryRates, N: int, tol: float = DEFAULT_TOLERANCES["generator"],
                    kind=None) -> CheckReport:
    """Zero column sums (absolute) plus sign pattern of a stochastic generator."""
    spec = ProcessSpec(N, rates) if kind is None else ProcessSpec(N, rates, kind)
    H = to_float(assemble_H(spec))
    colsum = float(np.abs(H.sum(axis=0)).max())
    off = H - np.diag(np.diag(H))
    signs_ok = bool(off.min() >= 0 and np.diag(H).max() <= 0)
    report = CheckReport("generator", N, _tuple(rates), colsum, tol,
                         details={"signs_ok": signs_ok, "kind": spec.kind.value})
    report.passed = report.passed and signs_ok
    return report


def _rep_algebra_residuals(rep, rates_values, sign):
    a, b, g, d = rates_values
    D, E, F = rep.D, rep.E, rep.F
    sl = rep.window.interior()
    pieces = {
        "EF": (E @ F - F @ E, F),
        "DF": (D @ F - F @ D, -F),
        "DE": (D @ E - E @ D, D + E),
    }
    out = {}
    for name, (lhs, rhs) in pieces.items():
        out[name] = frobenius_residual(lhs[sl, sl], rhs[sl, sl])
    W = np.ones(rep.window.size, dtype=D.dtype) if D.dtype != object else \
        np.full(rep.window.size, Fraction(1), dtype=object)
    V = 0 * W
    V[rep.window.position(0)] = W[0]
    left = W @ (a * E - g * D)
    right = (b * D - d * E) @ V
    out["left_boundary"] = frobenius_residual(left[sl], sign * W[sl])
    out["right_boundary"] = frobenius_residual(right, sign * V)
    return out


def check_rep_algebra(rates: BoundaryRates, N: int = 4, negate: bool = False,
                      tol: float = DEFAULT_TOLERANCES["rep_algebra"]) -> CheckReport:
    """Commutation relations and boundary conditions of D, E, F on the interior.

    With ``negate`` the representation is the one at negated rates, for which
    the boundary conditions, written with the original rates, carry a minus.
    """
    rep = build_rep(rates, AuxWindow.for_sites(N), negate=negate)
    res = _rep_algebra_residuals(rep, rates.as_tuple(), -1 if negate else 1)
    return CheckReport("rep_algebra" + ("_negated" if negate else ""), N, _tuple(rates),
                       max(res.values()), tol, details=res)


def _processes(rates: BoundaryRates, direction: Direction, variant: YVariant):
    """Boundary matrices of (H1, H2) so that H1 G = G H2."""
    ne = (build_boundary(Side.LEFT, rates), build_boundary(Side.RIGHT, rates))
    B_L, B_R, _ = build_dual_rates(rates, variant)
    eq = (B_L, B_R)
    return (ne, eq) if direction is Direction.NE_TO_E else (eq, ne)


def _build(rates, N, direction, variant, **kw) -> MpoIntertwiner:
    maker = build_G if direction is Direction.NE_TO_E else build_G_prime
    return maker(rates, N, variant, **kw)


def _local(rates, N, direction, variant, window) -> MpoIntertwiner:
    if window is None:
        return _build(rates, N, direction, variant)
    return build_local(rates, window, direction, variant)


def _two_site(A, B):
    # (s1,t1,i,j) x (s2,t2,j,k) -> (s1 s2, t1 t2, i, k)
    out = np.tensordot(A, B, axes=([3], [2])).transpose(0, 3, 1, 4, 2, 5)
    s1, s2, t1, t2, i, k = out.shape
    return out.reshape(s1 * s2, t1 * t2, i, k)


def check_bulk_exchange(rates: BoundaryRates, direction: Direction = Direction.NE_TO_E,
                        variant: YVariant = YVariant.YR, N: int = 4,
                        window: AuxWindow | None = None,
                        tol: float = DEFAULT_TOLERANCES["bulk_exchange"]) -> CheckReport:
    """``h LL - LL h = LZ - ZL`` on auxiliary indices away from the window edge.

    By default the tensors live on the window for ``N`` sites; an explicit
    ``window`` (which may exclude a pole bond) overrides it.
    """
    mpo = _local(rates, N, direction, variant, window)
    L, Z = mpo.site_tensors.L, mpo.site_tensors.Z
    h = build_bulk_h(mpo.exact)
    LL = _two_site(L, L)
    lhs = phys_left(h, LL) - phys_right(LL, h)
    rhs = _two_site(L, Z) - _two_site(Z, L)
    sl = mpo.window.interior()
    res = frobenius_residual(lhs[:, :, sl, sl], rhs[:, :, sl, sl])
    return CheckReport(f"bulk_exchange_{direction.value}_{variant.value}", None, _tuple(rates),
                       res, tol, details={"window": mpo.window.size})


def check_boundary_exchange(rates: BoundaryRates, direction: Direction = Direction.NE_TO_E,
                            variant: YVariant = YVariant.YR, N: int = 4,
                            window: AuxWindow | None = None,
                            tol: float = DEFAULT_TOLERANCES["boundary_exchange"]) -> CheckReport:
    """``<W|(A_L L - Z) = <W|L B_L`` and ``(A_R L + Z)|V> = L|V> B_R``."""
    mpo = _local(rates, N, direction, variant, window)
    L, Z = mpo.site_tensors.L, mpo.site_tensors.Z
    (A_L, A_R), (B_L, B_R) = _processes(rates, direction, variant)
    sl = mpo.window.interior()
    left_lhs = np.tensordot(mpo.W, phys_left(A_L, L) - Z, axes=([0], [2]))[:, :, sl]
    left_rhs = np.tensordot(mpo.W, phys_right(L, B_L), axes=([0], [2]))[:, :, sl]
    right_lhs = np.tensordot(phys_left(A_R, L) + Z, mpo.V, axes=([3], [0]))[:, :, sl]
    right_rhs = np.tensordot(phys_right(L, B_R), mpo.V, axes=([3], [0]))[:, :, sl]
    left = frobenius_residual(left_lhs, left_rhs)
    right = frobenius_residual(right_lhs, right_rhs)
    return CheckReport(f"boundary_exchange_{direction.value}_{variant.value}", None,
                       _tuple(rates), max(left, right), tol,
                       details={"left": left, "right": right})


def check_intertwining(rates: BoundaryRates, N: int, direction: Direction = Direction.NE_TO_E,
                       variant: YVariant = YVariant.YR,
                       tol: float = DEFAULT_TOLERANCES["intertwining"]) -> CheckReport:
    """Relative residual of ``H1 G - G H2`` for the contracted operator."""
    (A_L, A_R), (B_L, B_R) = _processes(rates, direction, variant)
    H1 = assemble_generator(N, A_L, A_R)
    H2 = assemble_generator(N, B_L, B_R)
    G = contract(_build(rates, N, direction, variant))
    lhs = H1 @ G
    res = frobenius_residual(lhs, G @ H2)
    # cancellation in H1 G: float64 cannot resolve the residual below kappa*eps
    norm_G, norm_lhs = frobenius_norm(G), frobenius_norm(lhs)
    kappa = frobenius_norm(H1) * norm_G / norm_lhs if norm_lhs else float("inf")
    return CheckReport(f"intertwining_{direction.value}_{variant.value}", N, _tuple(rates),
                       res, tol, details={"norm_G": norm_G, "kappa": kappa,
                                         "float_floor": kappa * np.finfo(float).eps})


def check_window_stability(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
                           direction: Direction = Direction.NE_TO_E, widen: int = 2,
                           tol: float = DEFAULT_TOLERANCES["window_stability"]) -> CheckReport:
    base = _build(rates, N, direction, variant)
    wide = _build(rates, N, direction, variant, window=base.window.widened(widen))
    res = frobenius_residual(contract(base), contract(wide))
    return CheckReport(f"window_stability_{variant.value}", N, _tuple(rates), res, tol,
                       details={"bond_dim": base.bond_dim, "widened_by": widen,
                                "direction": direction.value})


def check_inverse(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
                  tol: float = DEFAULT_TOLERANCES["inverse"]) -> CheckReport:
    """Residual of ``G G' - c 1`` after the least-squares scalar ``c``."""
    G = to_float(contract(build_G(rates, N, variant)))
    Gp = to_float(contract(build_G_prime(rates, N, variant)))
    P = G @ Gp
    I = np.eye(2**N)
    c = best_scalar(P, I)
    res = frobenius_residual(P, c * I)
    return CheckReport(f"inverse_{variant.value}", N, _tuple(rates), res, tol,
                       details={"scalar": c, "cond_G": float(np.linalg.cond(G))})


def check_closure(rates_a, rates_b, rates_c, N: int, variant: YVariant = YVariant.YR,
                  tol: float = DEFAULT_TOLERANCES["closure"]) -> CheckReport:
    """Raw residual is judged; the scalar-fitted one is reported alongside."""
    result = closure_check(rates_a, rates_b, rates_c, N, variant)
    return CheckReport(f"closure_{variant.value}", N, _tuple(rates_a), result.raw_residual, tol,
                       rates_b=_tuple(rates_b) + _tuple(rates_c),
                       details={"fitted_residual": result.fitted_residual,
                                "scalar": result.scalar})


def _sorted_eigs(H):
    w = np.linalg.eigvals(to_float(H))
    return w[np.lexsort((w.imag, w.real))]


def _cluster_means(w: np.ndarray, cluster_tol: float) -> tuple[np.ndarray, int]:
    """Replace each eigenvalue by the mean of its single-linkage cluster.

    A Jordan block of size k scatters its computed eigenvalues by about
    ``eps**(1/k)`` while their mean stays accurate to ``eps``.
    """
    if len(w) < 2:
        return w, 0
    pts = np.column_stack([w.real, w.imag])
    labels = fcluster(linkage(pts, "single"), cluster_tol * max(1.0, np.abs(w).max()),
                      criterion="distance")
    out = w.copy()
    for lab in np.unique(labels):
        out[labels == lab] = w[labels == lab].mean()
    return out, len(w) - len(np.unique(labels))


def check_spectra(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
                  tol: float = DEFAULT_TOLERANCES["spectra"],
                  cluster_tol: float = 1e-5) -> CheckReport:
    """Largest eigenvalue distance under the optimal one-to-one matching.

    Eigenvalues closer than ``cluster_tol`` (relative) are first collapsed to
    their cluster mean, so defective generators compare at full precision.
    """
    if N > 6:
        raise ValueError("spectra are compared for N <= 6 only")
    H_ne = assemble_H(ProcessSpec(N, rates))
    B_L, B_R, _ = build_dual_rates(rates, variant)
    H_e = assemble_generator(N, B_L, B_R)
    a, merged_a = _cluster_means(_sorted_eigs(H_ne), cluster_tol)
    b, merged_b = _cluster_means(_sorted_eigs(H_e), cluster_tol)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    res = float(cost[rows, cols].max())
    zero = min(np.abs(a).min(), np.abs(b).min())
    return CheckReport(f"spectra_{variant.value}", N, _tuple(rates), res, tol,
                       details={"min_abs_eig": float(zero),
                                "max_real_part": float(max(a.real.max(), b.real.max())),
                                "merged": merged_a + merged_b})


def check_steady_state(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
                       tol: float = DEFAULT_TOLERANCES["steady_state"]) -> CheckReport:
    """Angles of ``G |Bernoulli>`` and of the MPS to the null vector of ``H_NE``."""
    oracle = oracle_for(rates, N)
    mapped = map_through(build_G(rates, N, variant), build_bernoulli(rates, N, variant))
    dehp = build_dehp_mps(rates, N)
    a_map = oracle.angle_to(mapped)
    a_dehp = oracle.angle_to(dehp)
    H = to_float(assemble_H(ProcessSpec(N, rates)))
    return CheckReport(f"steady_state_{variant.value}", N, _tuple(rates), max(a_map, a_dehp), tol,
                       details={"angle_mapped": a_map, "angle_dehp": a_dehp,
                                "scalar": mapped.scalar,
                                "H_mapped": float(np.linalg.norm(H @ to_float(mapped.vector)))})


def check_dual_equilibrium(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
                           tol: float = DEFAULT_TOLERANCES["dual_equilibrium"]) -> CheckReport:
    """The dual rates have zero drive and the product measure is stationary."""
    dual = dual_rates(rates, variant)
    B_L, B_R, _ = build_dual_rates(rates, variant)
    H_e = assemble_generator(N, B_L, B_R)
    bern = build_bernoulli(rates, N, variant).vector
    drive = dual.drive
    null_res = frobenius_norm(H_e @ bern)
    return CheckReport(f"dual_equilibrium_{variant.value}", N, _tuple(rates),
                       max(abs(float(drive)), null_res), tol,
                       details={"drive": drive, "is_equilibrium": is_equilibrium(dual),
                                "exact": rates.exact})


def check_dehp_normalization(rates: BoundaryRates, N: int,
                             tol: float = DEFAULT_TOLERANCES["dehp_normalization"]) -> CheckReport:
    raw = build_dehp_mps(rates, N, normalize=False)
    z = dehp_normalization(rates, N)
    res = abs(float(raw.sum() - z)) / max(1.0, abs(float(z)))
    return CheckReport("dehp_normalization", N, _tuple(rates), res, tol,
                       details={"Z_N": float(z)})


def correlator_specs(rates: BoundaryRates, N: int) -> list[CorrelatorSpec]:
    """All single-site and nearest-neighbour pair specs."""
    singles = [CorrelatorSpec((i,), rates, N) for i in range(1, N + 1)]
    pairs = [CorrelatorSpec((i, i + 1), rates, N) for i in range(1, N)]
    return singles + pairs


def _correlator_error(rates, N, convention, variant) -> float:
    worst = 0.0
    for spec in correlator_specs(rates, N):
        direct = correlate_direct(spec)
        dual = correlate_dual(spec, convention, variant)
        worst = max(worst, abs(dual - direct) / max(1.0, abs(direct)))
    return worst


def check_correlators(rates: BoundaryRates, N: int, variant: YVariant = YVariant.YR,
                      conventions=tuple(XConvention),
                      tol: float = DEFAULT_TOLERANCES["correlator"]) -> CheckReport:
    """Dual-path versus direct correlators over all single and pair specs.

    The error of a convention is ``max |dual - direct| / max(1, |direct|)``.
    The report passes when at least one convention is within tolerance and
    lists which ones are in ``details["passing"]``.
    """
    errors = {c.value: _correlator_error(rates, N, c, variant) for c in conventions}
    passing = [name for name, err in errors.items() if err <= tol]
    return CheckReport(f"correlator_{variant.value}", N, _tuple(rates), min(errors.values()),
                       tol, details={**errors, "passing": passing})


def select_convention(reports: list[CheckReport]) -> list[str]:
    """Conventions that pass in every correlator report."""
    corr = [r for r in reports if r.check_name.startswith("correlator_") and r.error is None
            and "passing" in r.details]
    if not corr:
        return []
    common = set(corr[0].details["passing"])
    for r in corr[1:]:
        common &= set(r.details["passing"])
    return sorted(common)


def convention_report(reports: list[CheckReport]) -> CheckReport:
    """Suite-level verdict: exactly one X convention works across the sweep."""
    passing = select_convention(reports)
    return CheckReport("correlator_convention", None, (), float(abs(len(passing) - 1)), 0.0,
                       details={"passing": passing})


# --------------------------------------------------------------------------
# suite

ALL_CHECKS = (
    "generator", "rep_algebra", "bulk_exchange", "boundary_exchange", "intertwining",
    "window_stability", "steady_state", "dual_equilibrium", "dehp_normalization",
    "inverse", "closure", "spectra", "correlator",
)


@dataclass
class SuiteConfig:
    """What to sweep. Sizes above the per-check caps are skipped for that check."""

    rate_sets: list = field(default_factory=list)
    random_count: int = 5
    seed: int = 0
    n_min: int = 1
    n_max: int = 6
    variants: tuple = (YVariant.YR, YVariant.YL)
    scalar_mode: str = "float"
    tolerances: dict = field(default_factory=dict)
    checks: tuple = ALL_CHECKS
    closure_triples: int = 3
    closure_n_max: int = 4
    spectra_n_max: int = 6
    steady_n_max: int = 6
    inverse_n_max: int = 6
    window_n_max: int = 6
    correlator_n_max: int = 5
    exact_n_max: int = 3

    def __post_init__(self):
        if not 1 <= self.n_min <= self.n_max <= 12:
            raise ValueError(f"N range [{self.n_min}, {self.n_max}] must lie within [1, 12]")
        if self.scalar_mode not in ("float", "exact"):
            raise ValueError(f"unknown scalar mode {self.scalar_mode!r}")
        unknown = set(self.checks) - set(ALL_CHECKS)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def all_rates(self) -> list[BoundaryRates]:
        rates = list(self.rate_sets)
        if self.random_count:
            rates += random_rates(self.seed, self.random_count)
        if self.scalar_mode == "exact":
            rates = [r.to_exact() for r in rates]
        return rates


def _guarded(name, N, rates, tol, fn, *args, rates_b=None, **kw) -> CheckReport:
    try:
        return fn(*args, tol=tol, **kw)
    except (ValueError, ZeroDivisionError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return CheckReport.errored(name, N, _tuple(rates) if rates is not None else (),
                                   tol, exc, rates_b=rates_b)


def run_suite(config: SuiteConfig) -> list[CheckReport]:
    """Deterministic sweep in config order; member errors become errored reports."""
    reports: list[CheckReport] = []
    want = set(config.checks)
    exact = config.scalar_mode == "exact"
    n_hi = min(config.n_max, config.exact_n_max) if exact else config.n_max
    Ns = range(config.n_min, n_hi + 1)

    def run(check, name, N, rates, fn, *args, rates_b=None, **kw):
        if check in want:
            reports.append(_guarded(name, N, rates, config.tol(check), fn, *args,
                                    rates_b=rates_b, **kw))

    # float-only checks, each with its own size cap
    sized = (
        ("window_stability", check_window_stability, config.window_n_max),
        ("steady_state", check_steady_state, config.steady_n_max),
        ("inverse", check_inverse, config.inverse_n_max),
        ("spectra", check_spectra, config.spectra_n_max),
        ("correlator", check_correlators, config.correlator_n_max),
    )

    for rates in config.all_rates():
        for N in Ns:
            run("generator", "generator", N, rates, check_generator, rates, N)
        for negate in (False, True):
            run("rep_algebra", "rep_algebra_negated" if negate else "rep_algebra", None, rates,
                check_rep_algebra, rates, negate=negate)
        for variant in config.variants:
            v = variant.value
            for direction in (Direction.NE_TO_E, Direction.E_TO_NE):
                tag = f"{direction.value}_{v}"
                run("bulk_exchange", f"bulk_exchange_{tag}", None, rates,
                    check_bulk_exchange, rates, direction, variant)
                run("boundary_exchange", f"boundary_exchange_{tag}", None, rates,
                    check_boundary_exchange, rates, direction, variant)
                for N in Ns:
                    run("intertwining", f"intertwining_{tag}", N, rates,
                        check_intertwining, rates, N, direction, variant)
            for N in Ns:
                run("dual_equilibrium", f"dual_equilibrium_{v}", N, rates,
                    check_dual_equilibrium, rates, N, variant)
            if exact:
                continue
            for N in Ns:
                for check, fn, cap in sized:
                    if N <= cap:
                        run(check, f"{check}_{v}", N, rates, fn, rates, N, variant)
        if not exact:
            for N in Ns:
                run("dehp_normalization", "dehp_normalization", N, rates,
                    check_dehp_normalization, rates, N)

    if not exact and config.closure_triples:
        for a, b, c in constrained_triples(config.seed, config.closure_triples):
            for variant in config.variants:
                for N in Ns:
                    if N <= config.closure_n_max:
                        run("closure", f"closure_{variant.value}", N, a, check_closure,
                            a, b, c, N, variant, rates_b=_tuple(b) + _tuple(c))
    if any(r.check_name.startswith("correlator_") for r in reports):
        reports.append(convention_report(reports))
    return reports
