"""Piecewise functions with exact one-sided limits, local moduli and variation.

A :class:`PiecewiseFunction` lives on a closed interval with rational
endpoints and rational breakpoints.  Every open piece carries an evaluable
expression, continuous up to the piece's closure, together with a declared
split into monotone segments.  That declaration is what makes suprema and
total variations exact: on a monotone segment both are read off at the
segment ends.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, optimize

from .errors import ContractError, DomainError, SpecError
from .expr import parse_expr, polynomial_source, shifted
from .probkit import ModulusProfile, as_rational

__all__ = [
    "JumpTriple",
    "ModulusProfile",
    "Piece",
    "PiecewiseFunction",
    "associated_g",
    "e_n_indicator",
    "function_from_spec",
    "limits_at",
    "load_function",
    "local_modulus",
    "primitive_phi",
    "total_variation",
]

_MONOTONE_SAMPLES = 17
PRIMITIVE_QUAD_TOL = 1e-11


@dataclass(frozen=True)
class JumpTriple:
    """One-sided limits and value ``(f(x-), f(x), f(x+))`` at a point."""

    left: float
    at: float
    right: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.left, self.at, self.right)):
            raise ContractError(f"jump triple must be finite, got {self}")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)

    @property
    def jump(self) -> float:
        """``f(x+) - f(x-)``."""
        return self.right - self.left


@dataclass(frozen=True)
class Piece:
    """One open piece ``(lo, hi)`` with monotone cut points ``cuts``."""

    lo: Fraction
    hi: Fraction
    func: Callable = field(compare=False)
    cuts: tuple[Fraction, ...] = ()
    source: str | None = None

    def segments(self) -> Iterator[tuple[Fraction, Fraction]]:
        edges = (self.lo, *self.cuts, self.hi)
        yield from zip(edges, edges[1:])

    def polynomial(self) -> Polynomial | None:
        if self.source is None:
            return None
        return parse_expr(self.source).as_polynomial()

    def minus(self, c: float) -> "Piece":
        src = self.source
        if src is not None and c != 0:
            src = f"({src}) - ({float(c)!r})"
        return Piece(self.lo, self.hi, shifted(self.func, c), self.cuts, src)

    def restricted(self, lo: Fraction, hi: Fraction) -> "Piece":
        cuts = tuple(c for c in self.cuts if lo < c < hi)
        return Piece(lo, hi, self.func, cuts, self.source)


def _point(u) -> tuple[float, Fraction | None]:
    """``u`` as ``(nearest float, exact value)``; the exact part is ``None`` for floats."""
    if isinstance(u, float):
        return (u, None)
    q = as_rational(u)
    return (float(q), q)


def _lt(p, q) -> bool:
    """Exact ``p < q`` for points made by :func:`_point`.

    Rounding to the nearest float is monotone, so distinct floats already
    order the exact values; only ties need rational arithmetic.
    """
    if p[0] != q[0]:
        return p[0] < q[0]
    pe, qe = p[1], q[1]
    if pe is None and qe is None:
        return False
    return (Fraction(p[0]) if pe is None else pe) < (Fraction(q[0]) if qe is None else qe)


def _is_monotone(values: np.ndarray) -> bool:
    d = np.diff(values)
    scale = max(1.0, float(np.max(np.abs(values))))
    tol = 1e-9 * scale
    return bool(np.all(d >= -tol) or np.all(d <= tol))


@dataclass(frozen=True, eq=False)
class PiecewiseFunction:
    """A bounded function on ``[lo, hi]`` given piece by piece.

    ``point_values`` holds the value at every breakpoint; endpoint values
    default to the adjoining piece's limit when absent.
    """

    lo: Fraction
    hi: Fraction
    breakpoints: tuple[Fraction, ...]
    pieces: tuple[Piece, ...]
    point_values: Mapping[Fraction, float]
    name: str = ""

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ContractError(f"empty domain [{self.lo}, {self.hi}]")
        knots = (self.lo, *self.breakpoints, self.hi)
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ContractError("breakpoints must be strictly increasing inside the domain")
        if len(self.pieces) != len(knots) - 1:
            raise ContractError(f"need {len(knots) - 1} pieces, got {len(self.pieces)}")
        for (a, b), piece in zip(zip(knots, knots[1:]), self.pieces):
            if (piece.lo, piece.hi) != (a, b):
                raise ContractError(f"piece ({piece.lo}, {piece.hi}) does not match ({a}, {b})")
            edges = (a, *piece.cuts, b)
            if any(v <= u for u, v in zip(edges, edges[1:])):
                raise ContractError(f"monotone boundaries of piece ({a}, {b}) are not inside it")
        pv = dict(self.point_values)
        for c in self.breakpoints:
            if c not in pv:
                raise ContractError(f"missing point value at breakpoint {c}")
        pv.setdefault(self.lo, float(self.pieces[0].func(float(self.lo))))
        pv.setdefault(self.hi, float(self.pieces[-1].func(float(self.hi))))
        extra = set(pv) - set(knots)
        if extra:
            raise ContractError(f"point values given at non-breakpoints {sorted(extra)}")
        pv = {k: float(v) for k, v in pv.items()}
        object.__setattr__(self, "point_values", pv)
        object.__setattr__(self, "_knots", knots)
        object.__setattr__(self, "_fknots", np.array([float(k) for k in knots]))
        # exact-comparable copies of knots and segment ends for the window scans
        object.__setattr__(self, "_knot_pts", tuple(((float(c), c), c) for c in knots))
        object.__setattr__(self, "_end_pts", (_point(self.lo), _point(self.hi)))
        object.__setattr__(
            self, "_seg_pts", tuple((_point(a), _point(b), fn) for a, b, fn in self.segments())
        )
        limits = {}
        for i, c in enumerate(knots):
            left = float(self.pieces[i - 1].func(float(c))) if i > 0 else math.nan
            right = float(self.pieces[i].func(float(c))) if i < len(self.pieces) else math.nan
            limits[c] = (left, right)
        object.__setattr__(self, "_knot_limits", limits)
        self._validate_values()

    def _validate_values(self) -> None:
        if not all(math.isfinite(v) for v in self.point_values.values()):
            raise ContractError(f"{self.name or 'function'}: non-finite point value")
        for piece in self.pieces:
            for a, b in piece.segments():
                ts = np.linspace(float(a), float(b), _MONOTONE_SAMPLES)
                vals = np.asarray(piece.func(ts), dtype=float)
                if not np.all(np.isfinite(vals)):
                    raise ContractError(
                        f"{self.name or 'function'} is not finite on [{a}, {b}]"
                    )
                if not _is_monotone(vals):
                    raise ContractError(
                        f"{self.name or 'function'}: declared segment [{a}, {b}] is not monotone"
                    )

    # -- construction -----------------------------------------------------

    @classmethod
    def from_exprs(
        cls,
        lo,
        hi,
        pieces: Sequence[str | tuple[str, Sequence]],
        breakpoints: Sequence = (),
        point_values: Mapping | None = None,
        name: str = "",
    ) -> "PiecewiseFunction":
        """Build from expression strings.

        ``pieces`` holds one entry per open piece: either an expression or
        ``(expression, monotone_boundaries)``.
        """
        lo, hi = as_rational(lo), as_rational(hi)
        bps = tuple(as_rational(b) for b in breakpoints)
        knots = (lo, *bps, hi)
        if len(pieces) != len(knots) - 1:
            raise ContractError(f"need {len(knots) - 1} pieces, got {len(pieces)}")
        built = []
        for (a, b), spec in zip(zip(knots, knots[1:]), pieces):
            src, cuts = (spec, ()) if isinstance(spec, str) else spec
            ex = parse_expr(src)
            built.append(Piece(a, b, ex, tuple(as_rational(c) for c in cuts), ex.source))
        pv = {as_rational(k): float(v) for k, v in (point_values or {}).items()}
        return cls(lo, hi, bps, tuple(built), pv, name)

    # -- evaluation -------------------------------------------------------

    @property
    def knots(self) -> tuple[Fraction, ...]:
        return self._knots

    def _locate(self, y) -> tuple[int, bool]:
        """``(index, on_knot)``: knot index if ``y`` is a knot, else piece index."""
        if y < self.lo or y > self.hi:
            raise DomainError(f"{y} lies outside [{self.lo}, {self.hi}]")
        i = bisect.bisect_left(self._knots, y)
        if i < len(self._knots) and self._knots[i] == y:
            return i, True
        return i - 1, False

    def __call__(self, y) -> float:
        i, on_knot = self._locate(y)
        if on_knot:
            return self.point_values[self._knots[i]]
        return float(self.pieces[i].func(float(y)))

    def evaluate(self, ys) -> np.ndarray:
        """Vectorised evaluation; points equal to a knot get its point value."""
        ys = np.asarray(ys, dtype=float)
        if np.any(ys < float(self.lo)) or np.any(ys > float(self.hi)):
            raise DomainError(f"points outside [{self.lo}, {self.hi}]")
        out = np.empty_like(ys)
        idx = np.clip(np.searchsorted(self._fknots, ys, side="right") - 1, 0, len(self.pieces) - 1)
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = piece.func(ys[mask])
        for j in np.flatnonzero(np.isin(ys, self._fknots)):
            out[j] = self(float(ys[j]))
        return out

    def extended(self, y: float) -> float:
        """Evaluate with constant continuation outside the domain."""
        if y < self.lo:
            return self.point_values[self.lo]
        if y > self.hi:
            return self.point_values[self.hi]
        return self(y)

    def lattice_values(self, n: int) -> np.ndarray:
        """Values at the exact nodes ``k/n``, ``k = 0..n``."""
        if self.lo > 0 or self.hi < 1:
            raise DomainError(f"domain [{self.lo}, {self.hi}] does not contain [0, 1]")
        out = np.empty(n + 1)
        for piece in self.pieces:
            k0 = max(0, math.floor(n * piece.lo) + 1)
            k1 = min(n, math.ceil(n * piece.hi) - 1)
            if k0 <= k1:
                ks = np.arange(k0, k1 + 1)
                out[k0 : k1 + 1] = piece.func(ks / n)
        for c in self._knots:
            nc = n * c
            if nc.denominator == 1 and 0 <= nc <= n:
                out[int(nc)] = self.point_values[c]
        return out

    def left_limit(self, c: Fraction) -> float:
        i, on_knot = self._locate(c)
        if on_knot:
            if i == 0:
                raise DomainError(f"no left limit at the left endpoint {c}")
            return float(self.pieces[i - 1].func(float(c)))
        return float(self.pieces[i].func(float(c)))

    def right_limit(self, c: Fraction) -> float:
        i, on_knot = self._locate(c)
        if on_knot:
            if i == len(self.pieces):
                raise DomainError(f"no right limit at the right endpoint {c}")
            return float(self.pieces[i].func(float(c)))
        return float(self.pieces[i].func(float(c)))

    def segments(self) -> Iterator[tuple[Fraction, Fraction, Callable]]:
        """All monotone segments ``(a, b, func)`` in increasing order."""
        for piece in self.pieces:
            for a, b in piece.segments():
                yield a, b, piece.func

    def nonsmooth_points(self) -> tuple[Fraction, ...]:
        """Knots plus monotone cuts: where the function may be non-smooth."""
        pts = set(self._knots)
        for piece in self.pieces:
            pts.update(piece.cuts)
        return tuple(sorted(pts))

    # -- exact suprema and variation --------------------------------------

    def _window(self, a, b):
        A, B = _point(a), _point(b)
        if _lt(A, self._end_pts[0]):
            A = self._end_pts[0]
        if _lt(self._end_pts[1], B):
            B = self._end_pts[1]
        if _lt(B, A):
            raise DomainError(f"window [{a}, {b}] misses the domain")
        return A, B

    def sup_abs(self, a, b) -> float:
        """``sup |f|`` over ``[a, b]`` intersected with the domain."""
        A, B = self._window(a, b)
        best = 0.0
        for C, c in self._knot_pts:
            if not _lt(C, A) and not _lt(B, C):
                best = max(best, abs(self.point_values[c]))
        for S0, S1, fn in self._seg_pts:
            lo = S0 if _lt(A, S0) else A
            hi = S1 if _lt(S1, B) else B
            if _lt(lo, hi):
                best = max(best, abs(float(fn(lo[0]))), abs(float(fn(hi[0]))))
            elif not _lt(hi, lo) and _lt(S0, lo) and _lt(lo, S1):
                best = max(best, abs(float(fn(lo[0]))))
        return best

    def variation(self, a, b) -> float:
        """Total variation on ``[a, b]`` intersected with the domain."""
        A, B = self._window(a, b)
        total = 0.0
        for S0, S1, fn in self._seg_pts:
            lo = S0 if _lt(A, S0) else A
            hi = S1 if _lt(S1, B) else B
            if _lt(lo, hi):
                total += abs(float(fn(hi[0])) - float(fn(lo[0])))
        for C, c in self._knot_pts:
            if _lt(C, A) or _lt(B, C):
                continue
            value = self.point_values[c]
            left, right = self._knot_limits[c]
            if _lt(A, C):
                total += abs(value - left)
            if _lt(C, B):
                total += abs(right - value)
        return total

    # -- derived functions -------------------------------------------------

    def with_knot(self, x: Fraction) -> "PiecewiseFunction":
        """The same function with ``x`` promoted to a breakpoint."""
        i, on_knot = self._locate(x)
        if on_knot:
            return self
        piece = self.pieces[i]
        value = float(piece.func(float(x)))
        pieces = (
            *self.pieces[:i],
            piece.restricted(piece.lo, x),
            piece.restricted(x, piece.hi),
            *self.pieces[i + 1 :],
        )
        bps = tuple(sorted((*self.breakpoints, x)))
        pv = dict(self.point_values)
        pv[x] = value
        return PiecewiseFunction(self.lo, self.hi, bps, pieces, pv, self.name)

    def to_spec(self) -> dict:
        """Serialise to the JSON function-spec layout (expression pieces only)."""
        pieces = []
        for p in self.pieces:
            if p.source is None:
                raise ContractError(f"piece ({p.lo}, {p.hi}) has no expression source")
            pieces.append(
                {
                    "interval": [str(p.lo), str(p.hi)],
                    "expr": p.source,
                    "monotone_boundaries": [str(c) for c in p.cuts],
                }
            )
        return {
            "id": self.name,
            "domain": {"lo": str(self.lo), "hi": str(self.hi)},
            "breakpoints": [str(b) for b in self.breakpoints],
            "pieces": pieces,
            "point_values": {str(k): v for k, v in sorted(self.point_values.items())},
        }


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _interior(f: PiecewiseFunction, x) -> Fraction:
    q = as_rational(x)
    if not f.lo < q < f.hi:
        raise DomainError(f"x = {q} is not interior to [{f.lo}, {f.hi}]")
    return q


def limits_at(f: PiecewiseFunction, x) -> JumpTriple:
    """``(f(x-), f(x), f(x+))`` at an interior point."""
    q = _interior(f, x)
    return JumpTriple(f.left_limit(q), f(q), f.right_limit(q))


def associated_g(f: PiecewiseFunction, x) -> PiecewiseFunction:
    """``f`` minus its right limit on ``y > x`` and its left limit on ``y < x``.

    The result vanishes at ``x`` and is continuous there.
    """
    q = _interior(f, x)
    triple = limits_at(f, q)
    h = f.with_knot(q)
    pieces = tuple(p.minus(triple.left if p.hi <= q else triple.right) for p in h.pieces)
    pv = {}
    for c, v in h.point_values.items():
        if c < q:
            pv[c] = v - triple.left
        elif c > q:
            pv[c] = v - triple.right
        else:
            pv[c] = 0.0
    name = f"g[{f.name}@{q}]" if f.name else ""
    return PiecewiseFunction(h.lo, h.hi, h.breakpoints, pieces, pv, name)


def local_modulus(g: PiecewiseFunction, x) -> ModulusProfile:
    """``theta -> sup{|g(x+u)| : x+u in domain, |u| <= theta}``.

    ``g`` must vanish at ``x`` and be continuous there, as the output of
    :func:`associated_g` is.
    """
    q = _interior(g, x)
    triple = limits_at(g, q)
    if max(abs(triple.left), abs(triple.at), abs(triple.right)) > 1e-12:
        raise ContractError(f"g must vanish and be continuous at {q}, got {triple}")
    xf = float(q)

    def omega(theta: float) -> float:
        if theta <= 0:
            return 0.0
        return g.sup_abs(xf - theta, xf + theta)

    kinks = tuple(sorted({abs(float(c) - xf) for c in g.nonsmooth_points()} - {0.0}))
    return ModulusProfile(omega, g.sup_abs(g.lo, g.hi), kinks, name=f"omega[{g.name}]")


def total_variation(g: PiecewiseFunction, interval) -> float:
    """Total variation of ``g`` on ``interval = (a, b)`` inside the domain."""
    a, b = interval
    if a < g.lo or b > g.hi or a > b:
        raise DomainError(f"[{a}, {b}] is not a sub-interval of [{g.lo}, {g.hi}]")
    return g.variation(a, b)


def e_n_indicator(x, n: int) -> int:
    """1 if ``x = k/n`` for some ``k = 1..n-1``, else 0 (exact)."""
    q = as_rational(x)
    if not 0 < q < 1:
        raise DomainError(f"x must lie in (0, 1), got {q}")
    return int(n % q.denominator == 0)


def _piece_antiderivative(piece: Piece) -> tuple[Callable, Polynomial | None]:
    """Antiderivative of the piece vanishing at ``piece.lo``."""
    poly = piece.polynomial()
    if poly is not None:
        prim = poly.integ()
        prim = prim - prim(float(piece.lo))
        return prim, prim
    fn = piece.func
    lo = float(piece.lo)
    cuts = [float(c) for c in piece.cuts]

    def scalar(t: float) -> float:
        pts = [c for c in cuts if lo < c < t] or None
        val, _ = integrate.quad(
            fn, lo, t, points=pts, epsabs=PRIMITIVE_QUAD_TOL, epsrel=PRIMITIVE_QUAD_TOL, limit=200
        )
        return float(val)

    def prim(t):
        if np.ndim(t) == 0:
            return scalar(float(t))
        flat = np.ravel(np.asarray(t, dtype=float))
        if flat.size == 0:
            return np.zeros(np.shape(t))
        top = float(flat.max())
        grid = np.unique(np.concatenate(([lo], flat, [c for c in cuts if lo < c < top])))
        running = np.concatenate(([0.0], np.cumsum(_interval_integrals(fn, grid[:-1], grid[1:]))))
        return running[np.searchsorted(grid, flat)].reshape(np.shape(t))

    return prim, None


_GAUSS_LOW = np.polynomial.legendre.leggauss(20)
_GAUSS_HIGH = np.polynomial.legendre.leggauss(30)


def _interval_integrals(fn: Callable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``integral_a^b fn`` on many short intervals at once.

    Two Gauss-Legendre orders are compared; intervals where they disagree
    are redone with adaptive quadrature.
    """
    mid, half = 0.5 * (a + b), 0.5 * (b - a)

    def rule(nodes, weights):
        return half * (np.asarray(fn(mid[:, None] + half[:, None] * nodes), dtype=float) @ weights)

    low, high = rule(*_GAUSS_LOW), rule(*_GAUSS_HIGH)
    for i in np.flatnonzero(np.abs(high - low) > PRIMITIVE_QUAD_TOL * np.maximum(1.0, np.abs(high))):
        high[i], _ = integrate.quad(
            fn, a[i], b[i], epsabs=PRIMITIVE_QUAD_TOL, epsrel=PRIMITIVE_QUAD_TOL, limit=200
        )
    return high


def _sign_change_cuts(piece: Piece) -> tuple[Fraction, ...]:
    cuts = set(piece.cuts)
    for a, b in piece.segments():
        fa, fb = float(piece.func(float(a))), float(piece.func(float(b)))
        if fa * fb < 0:
            root = optimize.brentq(lambda t: float(piece.func(t)), float(a), float(b), xtol=1e-15)
            r = Fraction(root)
            if a < r < b:
                cuts.add(r)
    return tuple(sorted(cuts))


def primitive_phi(f: PiecewiseFunction, x) -> PiecewiseFunction:
    """``phi(y) = integral_x^y f`` normalised so that ``phi(x) = 0``.

    Polynomial pieces integrate exactly; other pieces use adaptive
    quadrature at tolerance 1e-11.
    """
    q = as_rational(x)
    if not f.lo <= q <= f.hi:
        raise DomainError(f"anchor {q} outside [{f.lo}, {f.hi}]")
    antis = [_piece_antiderivative(p) for p in f.pieces]
    at_knot = [0.0]
    for (prim, _), piece in zip(antis, f.pieces):
        at_knot.append(at_knot[-1] + float(prim(float(piece.hi))))
    i, on_knot = f._locate(q)
    base = at_knot[i] if on_knot else at_knot[i] + float(antis[i][0](float(q)))

    pieces = []
    for (prim, poly), piece, start in zip(antis, f.pieces, at_knot):
        offset = start - base
        cuts = _sign_change_cuts(piece)
        if poly is not None:
            p = poly + offset
            pieces.append(Piece(piece.lo, piece.hi, p, cuts, polynomial_source(p)))
        else:
            pieces.append(
                Piece(piece.lo, piece.hi, (lambda t, pr=prim, o=offset: pr(t) + o), cuts)
            )
    pv = {c: at_knot[j] - base for j, c in enumerate(f.knots)}
    name = f"phi[{f.name}]" if f.name else ""
    return PiecewiseFunction(f.lo, f.hi, f.breakpoints, tuple(pieces), pv, name)


# ---------------------------------------------------------------------------
# JSON function specs
# ---------------------------------------------------------------------------


def _rational_field(value, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SpecError(f"{where}: expected a rational string like \"1/2\", got {value!r}")
    try:
        return as_rational(value)
    except DomainError as exc:
        raise SpecError(f"{where}: {exc}") from exc


def function_from_spec(spec: Mapping, where: str = "spec") -> PiecewiseFunction:
    """Build a :class:`PiecewiseFunction` from the JSON layout.

    ``{"id", "domain": {"lo", "hi"}, "breakpoints": [...], "pieces":
    [{"interval", "expr", "monotone_boundaries"}], "point_values": {...}}``
    """
    if not isinstance(spec, Mapping):
        raise SpecError(f"{where}: expected an object")
    try:
        domain = spec["domain"]
        lo = _rational_field(domain["lo"], f"{where}.domain.lo")
        hi = _rational_field(domain["hi"], f"{where}.domain.hi")
    except (KeyError, TypeError) as exc:
        raise SpecError(f"{where}.domain: missing field {exc}") from exc
    bps = tuple(
        _rational_field(b, f"{where}.breakpoints[{i}]")
        for i, b in enumerate(spec.get("breakpoints", []))
    )
    knots = (lo, *bps, hi)
    raw_pieces = spec.get("pieces")
    if not isinstance(raw_pieces, list) or len(raw_pieces) != len(knots) - 1:
        raise SpecError(f"{where}.pieces: expected a list of {len(knots) - 1} pieces")
    pieces = []
    for i, (raw, a, b) in enumerate(zip(raw_pieces, knots, knots[1:])):
        at = f"{where}.pieces[{i}]"
        if not isinstance(raw, Mapping) or "expr" not in raw:
            raise SpecError(f"{at}: expected an object with an 'expr' field")
        if "interval" in raw:
            iv = raw["interval"]
            if not isinstance(iv, list) or len(iv) != 2:
                raise SpecError(f"{at}.interval: expected [lo, hi]")
            got = (_rational_field(iv[0], f"{at}.interval[0]"), _rational_field(iv[1], f"{at}.interval[1]"))
            if got != (a, b):
                raise SpecError(f"{at}.interval: expected [{a}, {b}], got [{got[0]}, {got[1]}]")
        try:
            ex = parse_expr(raw["expr"])
        except SpecError as exc:
            raise SpecError(f"{at}.expr: {exc}") from exc
        declared = [
            _rational_field(v, f"{at}.monotone_boundaries[{j}]")
            for j, v in enumerate(raw.get("monotone_boundaries", []))
        ]
        cuts = [c for c in declared if a < c < b]
        pieces.append(Piece(a, b, ex, tuple(sorted(set(cuts))), ex.source))
    pv = {}
    for k, v in (spec.get("point_values") or {}).items():
        key = _rational_field(k, f"{where}.point_values key")
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SpecError(f"{where}.point_values[{k!r}]: expected a number, got {v!r}")
        pv[key] = float(v)
    try:
        return PiecewiseFunction(lo, hi, bps, tuple(pieces), pv, str(spec.get("id", "")))
    except ContractError as exc:
        raise SpecError(f"{where}: {exc}") from exc


def load_json(path) -> object:
    """Read JSON, turning decode errors into :class:`SpecError` with line numbers."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_function(path) -> PiecewiseFunction:
    return function_from_spec(load_json(path), where=str(path))
