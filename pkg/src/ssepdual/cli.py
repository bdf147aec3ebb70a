"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails or the rates
violate a precondition (equilibrium rates, a pole of the representation),
2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .intertwiner import ConstraintViolated, EquilibriumRatesError, PoleError, build_G
from .observables import CorrelatorSpec, XConvention, correlate_direct, correlate_dual
from .ssep_model import BoundaryRates, YVariant
from .steady_state import build_bernoulli, build_dehp_mps, map_through, oracle_for
from .verification import (
    ALL_CHECKS,
    DEFAULT_TOLERANCES,
    CheckReport,
    SuiteConfig,
    check_closure,
    check_spectra,
    constrained_triples,
    run_suite,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

RECORD_FIELDS = ("check_name", "N", "rates", "rates_b", "residual", "tolerance",
                 "passed", "details", "error")

# keys accepted in the [caps] section, mapped onto SuiteConfig fields
CAP_KEYS = ("closure_triples", "closure_n_max", "spectra_n_max", "steady_n_max",
            "inverse_n_max", "window_n_max", "correlator_n_max", "exact_n_max")


# the insertion convention selected by the correlator sweep
CHOSEN_CONVENTION = XConvention.X_TIMES_YINV


class UsageError(Exception):
    """Bad flags or config contents; maps to exit code 2."""


# --------------------------------------------------------------------------
# parsing helpers

def parse_rates(text: str) -> BoundaryRates:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--rates expects four comma-separated numbers, got {text!r}") from None
    if len(values) != 4:
        raise UsageError(f"--rates expects a,b,g,d (four values), got {len(values)}")
    try:
        return BoundaryRates(*values)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid rates {text!r}: {exc}") from None


def parse_sites(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--sites expects comma-separated integers, got {text!r}") from None


def parse_variants(name: str) -> tuple:
    if name == "both":
        return (YVariant.YR, YVariant.YL)
    try:
        return (YVariant(name),)
    except ValueError:
        raise UsageError(f"unknown variant {name!r} (yr, yl or both)") from None


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        if path.suffix.lower() == ".json":
            return json.loads(raw)
        return tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from None


def default_config_text() -> str:
    return resources.files("ssepdual").joinpath("data/default.toml").read_text()


def _section(data: dict, name: str) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise UsageError(f"[{name}] must be a table")
    return sec


def config_from_dict(data: dict) -> tuple[SuiteConfig, dict]:
    """Build a SuiteConfig plus the ``[output]`` section from parsed data."""
    known = {"suite", "rates", "tolerances", "caps", "output"}
    extra = set(data) - known
    if extra:
        raise UsageError(f"unknown config sections: {sorted(extra)}")
    suite = _section(data, "suite")
    rates = _section(data, "rates")
    caps = _section(data, "caps")
    bad = set(caps) - set(CAP_KEYS)
    if bad:
        raise UsageError(f"unknown [caps] keys: {sorted(bad)}")
    try:
        explicit = [BoundaryRates.from_sequence(r) for r in rates.get("explicit", [])]
        n_range = suite.get("n_range", [1, 6])
        cfg = SuiteConfig(
            rate_sets=explicit,
            random_count=int(rates.get("random_count", 5)),
            seed=int(suite.get("seed", 0)),
            n_min=int(n_range[0]),
            n_max=int(n_range[1]),
            variants=parse_variants(suite.get("variant", "both")),
            scalar_mode=suite.get("mode", "float"),
            tolerances={k: float(v) for k, v in _section(data, "tolerances").items()},
            checks=tuple(suite.get("checks", ALL_CHECKS)),
            **{k: int(v) for k, v in caps.items()},
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"invalid config: {exc}") from None
    return cfg, _section(data, "output")


# --------------------------------------------------------------------------
# emitters

def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(fields, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit_reports(reports: list[CheckReport], fmt: str, out: str | None) -> None:
    rows = [r.to_record() for r in reports]
    if fmt == "json":
        _write(json.dumps(rows, indent=1) + "\n", out)
    else:
        _write(_csv_text(RECORD_FIELDS, rows), out)


def emit_table(rows: list[dict], fmt: str, out: str | None) -> None:
    """Long-format ``quantity, key, value`` table for the non-suite commands."""
    if fmt == "json":
        _write(json.dumps(rows, indent=1) + "\n", out)
    else:
        _write(_csv_text(("quantity", "key", "value"), rows), out)


def _num(x) -> str:
    return format(float(x), ".17g")


def _resolve_format(args, output: dict | None = None) -> tuple[str, str | None]:
    output = output or {}
    out = args.out or output.get("path")
    fmt = args.format or output.get("format")
    if fmt is None:
        fmt = "json" if out and str(out).endswith(".json") else "csv"
    if fmt not in ("csv", "json"):
        raise UsageError(f"unknown output format {fmt!r}")
    return fmt, out


def _summary(reports: list[CheckReport]) -> None:
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed", file=sys.stderr)
    names = sorted({r.check_name for r in failed})
    if names:
        print("failing: " + ", ".join(names), file=sys.stderr)


# --------------------------------------------------------------------------
# commands

def cmd_verify(args) -> int:
    if args.config:
        data = load_config_file(args.config)
    else:
        data = tomllib.loads(default_config_text())
    cfg, output = config_from_dict(data)
    # flags override the file
    if args.seed is not None:
        cfg.seed = args.seed
    if args.mode:
        cfg.scalar_mode = args.mode
    if args.variant:
        cfg.variants = parse_variants(args.variant)
    if args.rates:
        cfg.rate_sets = [parse_rates(r) for r in args.rates]
    if args.n is not None:
        if not 1 <= args.n <= 12:
            raise UsageError("--n must lie within [1, 12]")
        cfg.n_min, cfg.n_max = min(cfg.n_min, args.n), args.n
    fmt, out = _resolve_format(args, output)
    reports = run_suite(cfg)
    emit_reports(reports, fmt, out)
    _summary(reports)
    return 0 if all(r.passed for r in reports) else 1


def _single_rates(args) -> BoundaryRates:
    if not args.rates:
        raise UsageError("--rates a,b,g,d is required")
    if len(args.rates) != 1:
        raise UsageError("this command takes a single --rates")
    return parse_rates(args.rates[0])


def _size(args, default=None) -> int:
    n = args.n if args.n is not None else default
    if n is None:
        raise UsageError("--n is required")
    if not 1 <= n <= 12:
        raise UsageError("--n must lie within [1, 12]")
    return n


def _float_only(args) -> None:
    if args.mode == "exact":
        raise UsageError("exact mode is only available for verify")


def cmd_steady_state(args) -> int:
    _float_only(args)
    rates, N = _single_rates(args), _size(args)
    variant = parse_variants(args.variant or "yr")[0]
    fmt, out = _resolve_format(args)
    oracle = oracle_for(rates, N)
    dehp = build_dehp_mps(rates, N)
    mapped = map_through(build_G(rates, N, variant), build_bernoulli(rates, N, variant))
    states = {"dehp": dehp, "mapped": mapped, "oracle": oracle}
    rows = []
    for name, state in states.items():
        vec = np.asarray(state.vector, dtype=float)
        rows += [{"quantity": name, "key": format(i, f"0{N}b"), "value": _num(v)}
                 for i, v in enumerate(vec)]
    pairs = (("dehp", "oracle"), ("mapped", "oracle"), ("dehp", "mapped"))
    angles = {f"{a}~{b}": states[a].angle_to(states[b]) for a, b in pairs}
    rows += [{"quantity": "angle", "key": k, "value": _num(v)} for k, v in angles.items()]
    rows.append({"quantity": "scalar", "key": variant.value, "value": _num(mapped.scalar)})
    emit_table(rows, fmt, out)
    return 0 if max(angles.values()) <= DEFAULT_TOLERANCES["steady_state"] else 1


def cmd_correlate(args) -> int:
    _float_only(args)
    rates, N = _single_rates(args), _size(args)
    if not args.sites:
        raise UsageError("--sites is required")
    variant = parse_variants(args.variant or "yr")[0]
    fmt, out = _resolve_format(args)
    try:
        spec = CorrelatorSpec(parse_sites(args.sites), rates, N)
    except (ValueError, IndexError) as exc:
        raise UsageError(str(exc)) from None
    direct = correlate_direct(spec)
    tol = DEFAULT_TOLERANCES["correlator"]
    rows = [{"quantity": "direct", "key": "", "value": _num(direct)}]
    passing = []
    for conv in XConvention:
        value = correlate_dual(spec, conv, variant)
        rows.append({"quantity": "dual", "key": conv.value, "value": _num(value)})
        if abs(value - direct) <= tol * max(1.0, abs(direct)):
            passing.append(conv.value)
    rows.append({"quantity": "passing", "key": variant.value, "value": ",".join(passing)})
    rows.append({"quantity": "convention", "key": "", "value": CHOSEN_CONVENTION.value})
    emit_table(rows, fmt, out)
    return 0 if CHOSEN_CONVENTION.value in passing else 1


def cmd_spectrum(args) -> int:
    _float_only(args)
    rates = _single_rates(args)
    fmt, out = _resolve_format(args)
    sizes = [_size(args)] if args.n is not None else range(1, 7)
    reports = [check_spectra(rates, N, v)
               for v in parse_variants(args.variant or "both") for N in sizes]
    emit_reports(reports, fmt, out)
    _summary(reports)
    return 0 if all(r.passed for r in reports) else 1


def cmd_compose_check(args) -> int:
    _float_only(args)
    if args.rates:
        if len(args.rates) != 3:
            raise UsageError("compose-check takes --rates three times (a, b, c) or none")
        triples = [tuple(parse_rates(r) for r in args.rates)]
    else:
        triples = constrained_triples(args.seed or 0, 10)
    sizes = [_size(args)] if args.n is not None else range(1, 5)
    fmt, out = _resolve_format(args)
    reports = [check_closure(a, b, c, N, v)
               for a, b, c in triples
               for v in parse_variants(args.variant or "both")
               for N in sizes]
    emit_reports(reports, fmt, out)
    _summary(reports)
    return 0 if all(r.passed for r in reports) else 1


COMMANDS = {
    "verify": cmd_verify,
    "steady-state": cmd_steady_state,
    "correlate": cmd_correlate,
    "spectrum": cmd_spectrum,
    "compose-check": cmd_compose_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssepdual",
                                     description="Intertwiner checks for the open SSEP.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML (or .json) suite config; verify only")
        p.add_argument("--rates", action="append", metavar="a,b,g,d",
                       help="alpha,beta,gamma,delta; repeat for several sets")
        p.add_argument("--n", type=int, help="number of sites")
        p.add_argument("--sites", metavar="i,j,...", help="occupied sites for correlate")
        p.add_argument("--variant", choices=("yr", "yl", "both"))
        p.add_argument("--mode", choices=("float", "exact"))
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EquilibriumRatesError as exc:
        print(f"EquilibriumRates: {exc}", file=sys.stderr)
        return 1
    except (PoleError, ConstraintViolated) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
