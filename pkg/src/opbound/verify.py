"""Sharpness, identity and validity checks run on concrete numbers.

Every check is an exact finite sum or a deterministic quadrature; nothing
here samples.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .bounds import (
    BoundReport,
    Decomposition,
    b_n,
    corollary10_bound,
    corollary11_bound,
)
from .errors import ContractError, SpecError, ValidityError
from .expr import parse_expr
from .funcspace import (
    PiecewiseFunction,
    function_from_spec,
    limits_at,
    load_json,
    primitive_phi,
)
from .operators import bernstein_apply, convolution_apply
from .probkit import ModulusProfile, as_rational, binom_sign_probs, exp_expectation, primitive_of

log = logging.getLogger(__name__)

SHARPNESS_TOL = 2e-9
VALIDITY_TOL = 1e-10
ENVELOPE_TOL = 1e-12


# ---------------------------------------------------------------------------
# sharpness of the modulus term
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetricSpec:
    """``f(y) = offset + radial(|y - center|)`` with ``radial`` nondecreasing and bounded."""

    center: Fraction
    radial: ModulusProfile
    offset: float = 0.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "center", as_rational(self.center))
        self.radial.check()

    def f(self, y: float) -> float:
        return self.offset + self.radial(abs(y - float(self.center)))

    def phi_tilde(self) -> Callable[[float], float]:
        """``y -> integral_0^{|y-x|} f(x+u) du``."""
        R = primitive_of(self.radial)
        x = float(self.center)
        return lambda y: self.offset * abs(y - x) + R(abs(y - x))


class SharpnessCheck(NamedTuple):
    lhs: float
    rhs: float
    gap: float

    @property
    def passed(self) -> bool:
        return self.gap <= SHARPNESS_TOL


def _finish(lhs: float, rhs: float, what: str, strict: bool) -> SharpnessCheck:
    check = SharpnessCheck(lhs, rhs, abs(lhs - rhs))
    if strict and not check.passed:
        raise ValidityError(f"{what}: lhs {lhs!r} and rhs {rhs!r} differ by {check.gap:.3e}")
    return check


def check_theorem6_a(spec: SymmetricSpec, n: int, beta: float, strict: bool = False) -> SharpnessCheck:
    """``L_n^beta(f, x) - a`` against ``E omega(g, X_beta/sqrt n)`` with ``omega(g, .) = radial``."""
    lhs = convolution_apply(spec.f, n, spec.center, beta, kinks=spec.radial.kinks) - spec.offset
    rhs = exp_expectation(spec.radial, beta, n)
    return _finish(lhs, rhs, f"{spec.name} part (a), beta={beta}, n={n}", strict)


def check_theorem6_b(spec: SymmetricSpec, n: int, beta: float, strict: bool = False) -> SharpnessCheck:
    """``L_n^beta(phi~, x) - a/(beta sqrt n)`` against ``E omega(g, X_beta/sqrt n)/(beta sqrt n)``."""
    scale = 1.0 / (beta * math.sqrt(n))
    phi = spec.phi_tilde()
    lhs = convolution_apply(phi, n, spec.center, beta, kinks=spec.radial.kinks) - spec.offset * scale
    rhs = scale * exp_expectation(spec.radial, beta, n)
    return _finish(lhs, rhs, f"{spec.name} part (b), beta={beta}, n={n}", strict)


# ---------------------------------------------------------------------------
# sign probabilities of the binomial law
# ---------------------------------------------------------------------------


class Prop2Row(NamedTuple):
    n: int
    p_pos: float
    p_neg: float
    deviation: float
    envelope: float


def check_prop2(n_list: Sequence[int], x) -> list[Prop2Row]:
    """Exact ``P(Z_n>0)``, ``P(Z_n<0)`` and their distance to 1/2 next to ``b_n(x)``.

    Raises :class:`ValidityError` if a deviation exceeds its envelope.
    ``prop2_converging`` reports whether the envelope shrinks along the list.
    """
    q = as_rational(x)
    rows = []
    for n in n_list:
        p_neg, _p_zero, p_pos = binom_sign_probs(n, q)
        dev = abs(p_pos - 0.5)
        env = b_n(n, q)
        if dev > env + ENVELOPE_TOL:
            raise ValidityError(f"|P(Z_n>0) - 1/2| = {dev!r} exceeds b_n = {env!r} at n={n}, x={q}")
        rows.append(Prop2Row(n, p_pos, p_neg, dev, env))
    return rows


def prop2_converging(rows: Sequence[Prop2Row]) -> bool:
    ordered = sorted(rows, key=lambda r: r.n)
    return len(ordered) < 2 or ordered[-1].envelope < ordered[0].envelope


# ---------------------------------------------------------------------------
# validity sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    n: int
    x: Fraction
    function_id: str
    actual_error: float
    bound_total: float
    slack: float
    passed: bool
    detail: BoundReport | Decomposition | None = None

    @property
    def key(self):
        return (self.n, self.x, self.function_id)


def _sweep_corollary10(f: PiecewiseFunction, n: int, x: Fraction):
    report = corollary10_bound(f, n, x)
    actual = abs(bernstein_apply(f, n, x) - limits_at(f, x).midpoint)
    return actual, report.total, report


def _sweep_corollary11(f: PiecewiseFunction, n: int, x: Fraction):
    phi = primitive_phi(f, x)
    dec = corollary11_bound(phi, f, n, x)
    actual = abs(bernstein_apply(phi, n, x) - phi(x) - dec.main_term)
    return actual, dec.remainder_bound, dec


#: name -> (f, n, x) -> (actual_error, bound_total, detail)
BOUND_REGISTRY: dict[str, Callable] = {
    "corollary10": _sweep_corollary10,
    "corollary11": _sweep_corollary11,
}


def thread_count() -> int | None:
    """Worker cap from ``OPBOUND_THREADS``; ``None`` (auto) when unset or 0."""
    raw = os.environ.get("OPBOUND_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError as exc:
        raise ContractError(f"OPBOUND_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise ContractError(f"OPBOUND_THREADS must be >= 0, got {value}")
    return value or None


def parallel_map(fn: Callable, items: Sequence) -> list:
    workers = thread_count()
    if workers == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def validity_sweep(
    corpus: Iterable[PiecewiseFunction] | Mapping[str, PiecewiseFunction],
    n_grid: Sequence[int],
    x_grid: Sequence,
    bound_selector: str | Callable = "corollary10",
) -> list[SweepResult]:
    """Compare the exact error with the bound at every ``(n, x, function)``.

    Results come back sorted by ``(n, x, function_id)``.  Failing points are
    logged with their itemised terms; check ``passed`` on each result.
    """
    if isinstance(corpus, Mapping):
        items = list(corpus.items())
    else:
        items = [(f.name, f) for f in corpus]
    if callable(bound_selector):
        bound = bound_selector
    else:
        try:
            bound = BOUND_REGISTRY[bound_selector]
        except KeyError:
            raise ContractError(
                f"unknown bound {bound_selector!r}; choose from {sorted(BOUND_REGISTRY)}"
            ) from None
    xs = [as_rational(x) for x in x_grid]
    grid = [(n, x, fid, f) for fid, f in items for n in n_grid for x in xs]

    def run(point):
        n, x, fid, f = point
        actual, total, detail = bound(f, n, x)
        slack = total - actual
        result = SweepResult(n, x, fid, actual, total, slack, slack >= -VALIDITY_TOL, detail)
        if not result.passed:
            log.error("bound violated: function=%s n=%d x=%s error=%r bound=%r terms=%r",
                      fid, n, x, actual, total, detail)
        return result

    return sorted(parallel_map(run, grid), key=lambda r: r.key)


# ---------------------------------------------------------------------------
# shipped corpus and profile specs
# ---------------------------------------------------------------------------


def _data_dir(kind: str) -> Path:
    return Path(str(resources.files("opbound") / "data" / kind))


def load_corpus(path=None) -> list[PiecewiseFunction]:
    """Functions from a directory of JSON specs, a JSON list file, or the shipped corpus."""
    path = _data_dir("corpus") if path is None else Path(path)
    if path.is_dir():
        return [
            function_from_spec(load_json(p), where=str(p)) for p in sorted(path.glob("*.json"))
        ]
    data = load_json(path)
    if isinstance(data, list):
        return [function_from_spec(d, where=f"{path}[{i}]") for i, d in enumerate(data)]
    return [function_from_spec(data, where=str(path))]


def profile_from_spec(spec: Mapping, where: str = "profile") -> SymmetricSpec:
    """``{"id", "center", "offset", "radial", "sup", "kinks", "primitive"?}``."""
    try:
        radial = parse_expr(spec["radial"])
        sup = float(spec["sup"])
        center = as_rational(str(spec.get("center", "0")))
        offset = float(spec.get("offset", 0.0))
        kinks = tuple(float(as_rational(str(k))) for k in spec.get("kinks", []))
        prim = parse_expr(spec["primitive"]) if spec.get("primitive") else None
    except KeyError as exc:
        raise SpecError(f"{where}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{where}: {exc}") from exc
    name = str(spec.get("id", ""))
    profile = ModulusProfile(radial, sup, kinks, prim, name=name)
    try:
        return SymmetricSpec(center, profile, offset, name)
    except ContractError as exc:
        raise SpecError(f"{where}: {exc}") from exc


def load_profile(path) -> SymmetricSpec:
    return profile_from_spec(load_json(path), where=str(path))


def shipped_profiles() -> list[SymmetricSpec]:
    return [load_profile(p) for p in sorted(_data_dir("profiles").glob("*.json"))]
