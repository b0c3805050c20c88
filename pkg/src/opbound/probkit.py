"""Exact and deterministic numerics for the binomial and exponential laws.

Everything here is a finite sum or a deterministic quadrature.  Evaluation
points that decide lattice membership (``n*x`` integral, ``x = k/n``) are
handled as :class:`fractions.Fraction` so that indicator terms never depend
on floating-point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import logsumexp
from scipy.stats import binom

from .errors import ConsistencyError, ContractError, DomainError, RangeError

#: pmfs for n above this are taken from a saddle-point log-domain routine.
DIRECT_PMF_MAX_N = 50
EXACT_SIGN_BITS = 200_000

#: Exponential expectations are integrated on [0, TRUNCATION / beta].
TRUNCATION = 40.0

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
QUAD_LIMIT = 400


def as_rational(x) -> Fraction:
    """Convert ``x`` to an exact :class:`~fractions.Fraction`.

    Accepts ints, Fractions, strings such as ``"2/7"`` or ``"0.25"`` and
    floats.  A float is converted to the rational it represents exactly, so
    ``0.1`` is *not* ``1/10``; pass strings or Fractions when lattice
    membership matters.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError(f"not a number: {x!r}")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse {x!r} as a rational") from exc
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r}")
        return Fraction(float(x))
    raise DomainError(f"cannot interpret {x!r} as a rational")


def _check_unit(x, *, open_interval: bool) -> Fraction:
    q = as_rational(x)
    if open_interval and not 0 < q < 1:
        raise DomainError(f"x must lie in (0, 1), got {q}")
    if not 0 <= q <= 1:
        raise DomainError(f"x must lie in [0, 1], got {q}")
    return q


def _check_n(n, minimum: int = 1) -> int:
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise DomainError(f"n must be an integer >= {minimum}, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class DiscreteLaw:
    """Finite law: strictly increasing support points with probabilities."""

    support: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.probs) or not self.support:
            raise ContractError("support and probs must be non-empty and of equal length")
        if any(p < 0 for p in self.probs):
            raise ContractError("probabilities must be non-negative")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise ContractError(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ContractError("support must be strictly increasing")

    @classmethod
    def point_mass(cls, at: float = 0.0) -> "DiscreteLaw":
        return cls((float(at),), (1.0,))

    def expect(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """Return ``E fn(Z)`` as an exact finite sum."""
        s = np.asarray(self.support, dtype=float)
        return math.fsum(np.asarray(self.probs) * np.asarray(fn(s), dtype=float))

    def mean(self) -> float:
        return self.expect(lambda s: s)

    def abs_mean(self) -> float:
        return self.expect(np.abs)

    def sign_probs(self) -> tuple[float, float, float]:
        """``(P(Z<0), P(Z=0), P(Z>0))`` with zero tested exactly."""
        neg = math.fsum(p for s, p in zip(self.support, self.probs) if s < 0)
        zero = math.fsum(p for s, p in zip(self.support, self.probs) if s == 0)
        pos = math.fsum(p for s, p in zip(self.support, self.probs) if s > 0)
        return neg, zero, pos


@dataclass(frozen=True)
class ExpLaw:
    """Exponential law with rate ``beta`` (mean ``1/beta``)."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0 or not math.isfinite(self.beta):
            raise DomainError(f"beta must be a positive finite real, got {self.beta!r}")

    def cdf(self, y: float) -> float:
        return -math.expm1(-self.beta * y) if y > 0 else 0.0

    def quantile(self, p: float) -> float:
        return -math.log1p(-p) / self.beta


@dataclass(frozen=True)
class ModulusProfile:
    """A member of the class of bounded nondecreasing profiles vanishing at 0.

    ``eval`` maps ``theta >= 0`` to ``psi(theta)``; ``sup_value`` is the limit
    at infinity, stored rather than extrapolated.  ``kinks`` lists the
    ``theta`` where ``psi`` may fail to be smooth (used as quadrature break
    points).  ``primitive``, when given, is the closed form of
    ``y -> integral_0^y psi``.
    """

    eval: Callable[[float], float]
    sup_value: float
    kinks: tuple[float, ...] = ()
    primitive: Callable[[float], float] | None = field(default=None, compare=False)
    name: str = ""

    def __call__(self, theta: float) -> float:
        if theta == math.inf:
            return float(self.sup_value)
        if theta < 0:
            raise DomainError(f"modulus profiles are defined for theta >= 0, got {theta}")
        return float(self.eval(theta))

    def check(self, grid: Sequence[float] | None = None, tol: float = 1e-12) -> None:
        """Raise :class:`ContractError` unless the class invariants hold on ``grid``."""
        if grid is None:
            grid = self._default_grid()
        if abs(self(0.0)) > tol:
            raise ContractError(f"profile {self.name!r}: psi(0) = {self(0.0)!r} != 0")
        if not math.isfinite(self.sup_value) or self.sup_value < 0:
            raise ContractError(f"profile {self.name!r}: sup_value must be finite and >= 0")
        prev = 0.0
        for t in sorted(grid):
            v = self(t)
            if v < prev - tol:
                raise ContractError(f"profile {self.name!r} decreases near theta={t}")
            if v > self.sup_value + tol:
                raise ContractError(f"profile {self.name!r} exceeds its sup_value at theta={t}")
            prev = max(prev, v)

    def _default_grid(self) -> list[float]:
        pts = set(np.geomspace(1e-6, 1e3, 48).tolist())
        for k in self.kinks:
            if k > 0:
                pts.update((k, k * (1 - 1e-9), k * (1 + 1e-9)))
        return sorted(pts)

    @classmethod
    def zero(cls) -> "ModulusProfile":
        return cls(lambda t: 0.0, 0.0, name="zero")


# ---------------------------------------------------------------------------
# binomial law
# ---------------------------------------------------------------------------


def binom_pmf(n: int, k: int, x) -> float:
    """``C(n,k) x^k (1-x)^(n-k)``.

    Direct products for ``n <= 50``; a log-domain saddle-point routine
    (scipy) above that, which keeps relative error near 1e-14 where plain
    log-gamma differences lose three digits by ``n = 10**4``.
    """
    n = _check_n(n, minimum=0)
    if isinstance(k, bool) or int(k) != k or not 0 <= k <= n:
        raise DomainError(f"k must be an integer in [0, {n}], got {k!r}")
    xf = float(_check_unit(x, open_interval=False))
    k = int(k)
    if n <= DIRECT_PMF_MAX_N:
        return math.comb(n, k) * xf**k * (1.0 - xf) ** (n - k)
    return float(binom.pmf(k, n, xf))


def binom_pmf_vector(n: int, x) -> np.ndarray:
    """All ``n+1`` binomial probabilities ``P(S_n(x) = k)``, ``k = 0..n``."""
    n = _check_n(n, minimum=0)
    xf = float(_check_unit(x, open_interval=False))
    if n <= DIRECT_PMF_MAX_N:
        return np.array(
            [math.comb(n, k) * xf**k * (1.0 - xf) ** (n - k) for k in range(n + 1)]
        )
    return binom.pmf(np.arange(n + 1), n, xf)


def _centered_offsets(n: int, x: Fraction) -> np.ndarray:
    # k - n*x exactly, then rounded once; zero stays exactly zero
    return np.array([float(k - n * x) for k in range(n + 1)])


def binom_z_law(n: int, x) -> DiscreteLaw:
    """Law of ``Z_n(x) = (S_n(x) - n x) / sqrt(n)`` on its ``n+1`` atoms."""
    n = _check_n(n)
    q = _check_unit(x, open_interval=True)
    support = _centered_offsets(n, q) / math.sqrt(n)
    probs = binom_pmf_vector(n, q)
    law = DiscreteLaw(tuple(support.tolist()), tuple(probs.tolist()))
    if abs(law.mean()) > 1e-12:
        raise ConsistencyError(f"binomial Z law for n={n}, x={q} has mean {law.mean()!r}")
    return law


def _sign_counts(n: int, x: Fraction) -> tuple[int, int | None]:
    """Index of the first atom with ``k > n x`` and the zero atom, if any."""
    nx = n * x
    zero = int(nx) if nx.denominator == 1 else None
    first_pos = math.floor(nx) + 1
    return first_pos, zero


def _exact_sign_counts(n: int, q: Fraction, neg_end: int, zero: int | None):
    """Integer numerators of the three sign probabilities over ``d**n``.

    With ``x = a/d`` the binomial weights are ``C(n,k) a^k (d-a)^(n-k) / d^n``;
    consecutive numerators differ by the integer factor ``(n-k) a / ((k+1)(d-a))``.
    """
    a, d = q.numerator, q.denominator
    b = d - a
    term = b**n
    neg = 0
    for k in range(neg_end):
        neg += term
        term = term * (n - k) * a // ((k + 1) * b)
    at_zero = term if zero is not None else 0
    return neg, at_zero, d**n - neg - at_zero, d**n


def binom_sign_probs(n: int, x) -> tuple[float, float, float]:
    """``(P(Z_n<0), P(Z_n=0), P(Z_n>0))`` with the lattice test done exactly.

    While the integers stay small (``n log2(denominator)`` up to
    ``EXACT_SIGN_BITS``) the sums are rational, so each probability is
    correctly rounded; beyond that the float pmf is summed with ``fsum``.
    """
    n = _check_n(n)
    q = _check_unit(x, open_interval=True)
    first_pos, zero = _sign_counts(n, q)
    last_neg = zero if zero is not None else first_pos  # exclusive
    if n * q.denominator.bit_length() <= EXACT_SIGN_BITS:
        neg, at_zero, pos, total = _exact_sign_counts(n, q, last_neg, zero)
        return neg / total, at_zero / total, pos / total
    pmf = binom_pmf_vector(n, q)
    p_neg = math.fsum(pmf[:last_neg])
    p_zero = float(pmf[zero]) if zero is not None else 0.0
    p_pos = math.fsum(pmf[first_pos:])
    return p_neg, p_zero, p_pos


def binom_mad(n: int, x) -> float:
    """Mean absolute deviation ``E|S_n(x)/n - x|``.

    Computed twice: as a brute-force sum over the pmf and through the
    closed form ``2 x (1-x) P(S_{n-1}(x) = floor(n x))``.  The closed form
    is returned after checking agreement to 1e-12.
    """
    n = _check_n(n)
    q = _check_unit(x, open_interval=True)
    xf = float(q)
    pmf = binom_pmf_vector(n, q)
    dev = np.abs(_centered_offsets(n, q)) / n
    brute = math.fsum(pmf * dev)
    closed = 2.0 * xf * (1.0 - xf) * binom_pmf(n - 1, math.floor(n * q), q)
    if abs(brute - closed) > 1e-12:
        raise ConsistencyError(
            f"mean absolute deviation mismatch at n={n}, x={q}: sum {brute!r} vs closed form {closed!r}"
        )
    return closed


def binom_abs_mgf(n: int, x, beta: float) -> float:
    """``E exp(beta |Z_n(x)|)`` by a finite sum over the binomial atoms.

    Any such value is a valid tail constant ``C_n(beta)`` through Markov's
    inequality ``P(|Z| >= t) <= E e^{beta|Z|} e^{-beta t}``.
    """
    n = _check_n(n)
    q = _check_unit(x, open_interval=True)
    ExpLaw(beta)
    pmf = binom_pmf_vector(n, q)
    expo = beta * np.abs(_centered_offsets(n, q)) / math.sqrt(n)
    with np.errstate(divide="ignore"):
        log_terms = np.log(pmf) + expo
    log_value = float(logsumexp(log_terms))
    if log_value > 709.0:
        raise RangeError(
            f"E exp(beta|Z_n|) overflows a double for n={n}, beta={beta}; "
            f"reduce beta (beta*sqrt(n) = {beta * math.sqrt(n):.3g})"
        )
    return math.fsum(pmf * np.exp(expo))


# ---------------------------------------------------------------------------
# exponential law
# ---------------------------------------------------------------------------


def _quad_points(kinks: Sequence[float], lo: float, hi: float) -> list[float] | None:
    pts = sorted({k for k in kinks if lo < k < hi})
    return pts or None


def _quad(fn, lo: float, hi: float, kinks: Sequence[float] = ()) -> float:
    val, _err = integrate.quad(
        fn,
        lo,
        hi,
        points=_quad_points(kinks, lo, hi),
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=QUAD_LIMIT,
    )
    return float(val)


def exponential_expectation(
    fn: Callable[[float], float], beta: float, kinks: Sequence[float] = (), tail: float = 0.0
) -> float:
    """``E fn(X_beta)`` for ``X_beta`` exponential with rate ``beta``.

    Integrates on ``[0, 40/beta]``; ``tail`` is the value ``fn`` settles to
    beyond the cut, weighted by ``P(X_beta > 40/beta) = e^{-40}``.
    """
    law = ExpLaw(beta)
    cut = TRUNCATION / law.beta
    body = _quad(lambda t: fn(t) * law.beta * math.exp(-law.beta * t), 0.0, cut, kinks)
    return body + tail * math.exp(-TRUNCATION)


def exp_expectation(psi: ModulusProfile, beta: float, n: int) -> float:
    """``E psi(X_beta / sqrt(n))`` by adaptive quadrature."""
    n = _check_n(n)
    psi.check()
    if psi.sup_value == 0:
        return 0.0
    root = math.sqrt(n)
    kinks = [k * root for k in psi.kinks]
    return exponential_expectation(lambda t: psi(t / root), beta, kinks, tail=psi.sup_value)


def primitive_of(psi: ModulusProfile) -> Callable[[float], float]:
    """``y -> integral_0^y psi``: the closed form if known, else quadrature."""
    if psi.primitive is not None:
        return psi.primitive
    kinks = sorted(k for k in psi.kinks if k > 0)

    def Psi(y: float) -> float:
        if y <= 0:
            return 0.0
        return _quad(psi, 0.0, y, kinks)

    return Psi


def exp_expectation_primitive(psi: ModulusProfile, beta: float, n: int) -> float:
    """``E Psi(X_beta / sqrt(n))`` where ``Psi`` is the primitive of ``psi``.

    Checked against ``exp_expectation(psi, beta, n) / (beta sqrt(n))`` to
    1e-9; a mismatch raises :class:`ConsistencyError`.
    """
    n = _check_n(n)
    psi.check()
    law = ExpLaw(beta)
    if psi.sup_value == 0:
        return 0.0
    root = math.sqrt(n)
    Psi = primitive_of(psi)
    kinks = [k * root for k in psi.kinks]
    cut = TRUNCATION / law.beta
    value = exponential_expectation(lambda t: Psi(t / root), law.beta, kinks)
    # beyond the cut Psi grows at most linearly with slope sup_value
    value += math.exp(-TRUNCATION) * (Psi(cut / root) + psi.sup_value / (law.beta * root))
    expected = exp_expectation(psi, law.beta, n) / (law.beta * root)
    if abs(value - expected) > 1e-9:
        raise ConsistencyError(
            f"E Psi = {value!r} but E psi / (beta sqrt n) = {expected!r} (beta={beta}, n={n})"
        )
    return value


def stirling_bounds(k: int) -> tuple[float, float]:
    """Two-sided bracket for ``k! e^k / k^k``.

    ``sqrt(2 pi k) exp(1/(12k+1)) <= k! e^k / k^k <= sqrt(2 pi k) exp(1/(12k))``.
    """
    k = _check_n(k)
    base = math.sqrt(2.0 * math.pi * k)
    return base * math.exp(1.0 / (12 * k + 1)), base * math.exp(1.0 / (12 * k))
