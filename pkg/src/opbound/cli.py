"""Command-line front end: evaluate operators and bounds, write CSV reports.

Exit status: 0 when every checked inequality holds, 2 when one is violated,
1 on input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bounds as bd
from .errors import (
    ConsistencyError,
    ContractError,
    DomainError,
    OpboundError,
    RangeError,
    SpecError,
    ValidityError,
)
from .funcspace import PiecewiseFunction, associated_g, limits_at, load_function, local_modulus, primitive_phi
from .operators import bernstein_apply, convolution_apply
from .probkit import as_rational, binom_abs_mgf, binom_z_law
from .verify import (
    BOUND_REGISTRY,
    SHARPNESS_TOL,
    VALIDITY_TOL,
    _data_dir,
    check_theorem6_a,
    check_theorem6_b,
    load_corpus,
    load_profile,
    validity_sweep,
)

log = logging.getLogger("opbound")

EXIT_OK, EXIT_INPUT, EXIT_INVALID = 0, 1, 2

BOUND_NAMES = ("corollary10", "corollary11", "theorem3", "theorem5", "zeng", "bojanic_cheng")
BOUND_COLUMNS = (
    "n", "x", "bound_name", "point_jump_term", "half_jump_term", "modulus_term",
    "main_term", "total", "actual_error", "slack",
)
_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class InputError(OpboundError):
    pass


@dataclass
class RunConfig:
    command: str
    function_spec_path: Path | None = None
    n_values: list[int] = field(default_factory=list)
    x_values: list[Fraction] = field(default_factory=list)
    beta: float = 1.0
    bound_names: list[str] = field(default_factory=lambda: ["corollary10"])
    output_path: str = "-"
    m_sandwich: int = bd.DEFAULT_SANDWICH_M
    bc_constant_M: float | None = None
    expectation: str = "quadrature"
    operators: list[str] = field(default_factory=lambda: ["bernstein"])
    profile_path: Path | None = None
    corpus_path: Path | None = None
    part: str = "a"

    def validate(self) -> None:
        if not self.n_values:
            raise InputError("at least one --n value is required")
        if any(n < 1 for n in self.n_values):
            raise InputError("--n values must be positive integers")
        if not self.beta > 0:
            raise InputError("--beta must be positive")
        if self.m_sandwich < 2:
            raise InputError("--m-sandwich must be >= 2")
        needs_unit = self.command in ("bound", "compare", "sweep") or (
            self.command == "eval" and "bernstein" in self.operators
        )
        if needs_unit:
            for x in self.x_values:
                if not 0 < x < 1:
                    raise InputError(f"x = {x} must lie strictly inside (0, 1)")


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if v == 0:
        return "0"
    return f"{v:.12g}"


def write_csv(rows: Sequence[Sequence], header: Sequence[str], out: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    data = buf.getvalue()
    if out == "-":
        sys.stdout.write(data)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(data.encode("utf-8"))


# ---------------------------------------------------------------------------
# input resolution
# ---------------------------------------------------------------------------


def _resolve(path: Path, kind: str) -> Path:
    """Local path if it exists, else a shipped spec of the same file name."""
    if path.exists():
        return path
    name = path.name if path.suffix else f"{path.name}.json"
    shipped = _data_dir(kind) / name
    if shipped.exists():
        return shipped
    raise InputError(f"{path}: no such file (and no shipped {kind} entry {name!r})")


def _load_fn(cfg: RunConfig) -> PiecewiseFunction:
    if cfg.function_spec_path is None:
        raise InputError("--fn is required")
    return load_function(_resolve(cfg.function_spec_path, "corpus"))


def _resolve_corpus(path: Path | None) -> Path | None:
    if path is not None and not path.exists():
        raise InputError(f"{path}: no such corpus file or directory")
    return path


def parse_x(text: str, strict: bool) -> Fraction:
    text = text.strip()
    if strict and not _RATIONAL_RE.match(text):
        raise InputError(f"x must be given as a rational 'p/q', got {text!r}")
    try:
        return as_rational(text)
    except OpboundError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_eval(cfg: RunConfig) -> int:
    f = _load_fn(cfg)
    rows = []
    for n in cfg.n_values:
        for x in cfg.x_values:
            for op in cfg.operators:
                if op == "bernstein":
                    value = bernstein_apply(f, n, x)
                else:
                    value = convolution_apply(f, n, x, cfg.beta)
                rows.append((n, x, op, value))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    write_csv(rows, ("n", "x", "operator", "value"), cfg.output_path)
    return EXIT_OK


def _bound_row(
    name: str, f: PiecewiseFunction, n: int, x: Fraction, cfg: RunConfig
) -> tuple[bd.BoundReport, float]:
    """A report for ``name`` together with the exact error it must dominate."""
    triple = limits_at(f, x)
    if name in ("corollary10", "theorem3", "zeng"):
        actual = abs(bernstein_apply(f, n, x) - triple.midpoint)
        if name == "corollary10":
            report = bd.corollary10_bound(f, n, x)
        elif name == "zeng":
            report = bd.zeng_report(f, n, x)
        else:
            omega = local_modulus(associated_g(f, x), x)
            report = bd.theorem3_bound(
                triple, binom_z_law(n, x), binom_abs_mgf(n, x, cfg.beta), cfg.beta, n, omega, x,
                method=cfg.expectation, m=cfg.m_sandwich,
            )
        return report, actual
    phi = primitive_phi(f, x)
    if name == "corollary11":
        dec = bd.corollary11_bound(phi, f, n, x)
        beta = 1.0
    elif name == "theorem5":
        omega = local_modulus(associated_g(f, x), x)
        dec = bd.theorem5_decomposition(
            triple, binom_z_law(n, x), binom_abs_mgf(n, x, cfg.beta), cfg.beta, n, omega,
            method=cfg.expectation, m=cfg.m_sandwich,
        )
        beta = cfg.beta
    else:
        if cfg.bc_constant_M is None:
            raise InputError("bojanic_cheng needs the constant --M")
        dec = bd.bojanic_cheng_bound(phi, f, n, x, cfg.bc_constant_M)
        beta = None
    actual = abs(bernstein_apply(phi, n, x) - phi(x) - dec.main_term)
    report = bd.BoundReport(name, n, x, 0.0, 0.0, dec.remainder_bound, dec.main_term, beta)
    return report, actual


def _holds(name: str, slack: float) -> bool:
    # Bojanic-Cheng's constant M is user supplied, so its rows are reported, not judged
    return name == "bojanic_cheng" or slack >= -VALIDITY_TOL


def cmd_bound(cfg: RunConfig) -> int:
    f = _load_fn(cfg)
    rows, ok = [], True
    for n in cfg.n_values:
        for x in cfg.x_values:
            for name in cfg.bound_names:
                report, actual = _bound_row(name, f, n, x, cfg)
                slack = report.total - actual
                ok &= _holds(name, slack)
                rows.append((
                    n, x, name, report.point_jump_term, report.half_jump_term,
                    report.modulus_term, report.main_term, report.total, actual, slack,
                ))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    write_csv(rows, BOUND_COLUMNS, cfg.output_path)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_compare(cfg: RunConfig) -> int:
    f = _load_fn(cfg)
    names = ["corollary10", "zeng", "corollary11"]
    if cfg.bc_constant_M is not None:
        names.append("bojanic_cheng")
    rows, ok = [], True
    for n in cfg.n_values:
        for x in cfg.x_values:
            totals = {}
            for name in names:
                report, actual = _bound_row(name, f, n, x, cfg)
                ok &= _holds(name, report.total - actual)
                totals[name] = report.total
            rows.append((n, x, *(totals.get(k) for k in (*names[:3], "bojanic_cheng"))))
    rows.sort(key=lambda r: (r[0], r[1]))
    header = ("n", "x", "corollary10", "zeng", "corollary11", "bojanic_cheng")
    write_csv(rows, header, cfg.output_path)
    return EXIT_OK if ok else EXIT_INVALID


def cmd_sharpness(cfg: RunConfig) -> int:
    if cfg.profile_path is None:
        raise InputError("--profile is required")
    spec = load_profile(_resolve(cfg.profile_path, "profiles"))
    check = check_theorem6_a if cfg.part == "a" else check_theorem6_b
    rows = []
    for n in cfg.n_values:
        res = check(spec, n, cfg.beta)
        rows.append((cfg.beta, n, res.lhs, res.rhs, res.gap))
    rows.sort(key=lambda r: r[1])
    write_csv(rows, ("beta", "n", "lhs", "rhs", "gap"), cfg.output_path)
    return EXIT_OK if all(r[4] <= SHARPNESS_TOL for r in rows) else EXIT_INVALID


def cmd_sweep(cfg: RunConfig) -> int:
    # --fn alone sweeps that function; --corpus alone or neither sweeps a corpus
    corpus = []
    if cfg.corpus_path is not None or cfg.function_spec_path is None:
        corpus = load_corpus(_resolve_corpus(cfg.corpus_path))
    if cfg.function_spec_path is not None:
        corpus.append(_load_fn(cfg))
    name = cfg.bound_names[0]
    if name not in BOUND_REGISTRY:
        raise InputError(f"sweep supports {sorted(BOUND_REGISTRY)}, got {name!r}")
    results = validity_sweep(corpus, cfg.n_values, cfg.x_values, name)
    rows = [
        (r.n, r.x, r.function_id, r.actual_error, r.bound_total, r.slack, r.passed)
        for r in results
    ]
    header = ("n", "x", "function_id", "actual_error", "bound_total", "slack", "pass")
    write_csv(rows, header, cfg.output_path)
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


COMMANDS = {
    "eval": cmd_eval,
    "bound": cmd_bound,
    "compare": cmd_compare,
    "sharpness": cmd_sharpness,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opbound", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, x_required=True):
        p.add_argument("--n", type=int, nargs="+", required=True, dest="n_values")
        if x_required:
            p.add_argument("--x", nargs="+", required=True, dest="x_values")
        p.add_argument("--beta", type=float, default=1.0)
        p.add_argument("-o", "--out", default="-", dest="output_path")

    p = sub.add_parser("eval", help="evaluate Bernstein or convolution operators")
    p.add_argument("--fn", type=Path, required=True, dest="function_spec_path")
    p.add_argument("--operator", nargs="+", choices=("bernstein", "convolution"),
                   default=["bernstein"], dest="operators")
    common(p)

    p = sub.add_parser("bound", help="itemised bounds with the exact error")
    p.add_argument("--fn", type=Path, required=True, dest="function_spec_path")
    p.add_argument("--bound", nargs="+", choices=BOUND_NAMES, default=["corollary10"], dest="bound_names")
    p.add_argument("--M", type=float, dest="bc_constant_M")
    p.add_argument("--m-sandwich", type=int, default=bd.DEFAULT_SANDWICH_M, dest="m_sandwich")
    p.add_argument("--expectation", choices=("quadrature", "sandwich"), default="quadrature")
    common(p)

    p = sub.add_parser("compare", help="modulus bounds next to total-variation bounds")
    p.add_argument("--fn", type=Path, required=True, dest="function_spec_path")
    p.add_argument("--M", type=float, dest="bc_constant_M")
    common(p)

    p = sub.add_parser("sharpness", help="equality cases of the convolution operators")
    p.add_argument("--profile", type=Path, required=True, dest="profile_path")
    p.add_argument("--part", choices=("a", "b"), default="a")
    common(p, x_required=False)

    p = sub.add_parser("sweep", help="bound validity over a function corpus")
    p.add_argument("--corpus", type=Path, dest="corpus_path")
    p.add_argument("--fn", type=Path, dest="function_spec_path")
    p.add_argument("--bound", choices=sorted(BOUND_REGISTRY), default="corollary10", dest="bound_name")
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    strict = args.command in ("bound", "compare", "sweep")
    kwargs = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    kwargs["x_values"] = [parse_x(x, strict) for x in getattr(args, "x_values", []) or []]
    if getattr(args, "bound_name", None):
        kwargs["bound_names"] = [args.bound_name]
    cfg = RunConfig(**kwargs)
    cfg.validate()
    return cfg


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
        return run(cfg)
    except (InputError, SpecError, DomainError, ContractError, RangeError) as exc:
        print(f"opbound: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValidityError, ConsistencyError) as exc:
        print(f"opbound: contract violated: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
