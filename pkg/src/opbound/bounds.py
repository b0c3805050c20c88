"""Explicit error bounds for positive linear operators at a jump.

Bounds come in two flavours.  For ``|L_n(f,x) - (f(x+)+f(x-))/2|`` a
:class:`BoundReport` itemises a point-jump term, a half-jump term and a
modulus term.  For ``L_n(phi,x) - phi(x)`` with ``phi`` a primitive a
:class:`Decomposition` pairs the explicit main term with a remainder bound.

Bernstein-specific constants: ``a_n`` bounds ``P(Z_n = 0)`` (Stirling),
``b_n`` bounds ``|P(Z_n > 0) - 1/2|`` (Berry-Esseen), ``cn_beta`` bounds
``E exp(beta |Z_n|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import ContractError, DomainError
from .funcspace import (
    JumpTriple,
    PiecewiseFunction,
    associated_g,
    e_n_indicator,
    limits_at,
    local_modulus,
)
from .probkit import DiscreteLaw, ModulusProfile, as_rational, binom_pmf, exp_expectation

#: Shevtsova's upper bound for the Berry-Esseen constant (Esseen's lower bound is 0.4097).
BERRY_ESSEEN_C = 0.4690
BERRY_ESSEEN_LOWER = 0.4097

DEFAULT_SANDWICH_M = 1000


@dataclass(frozen=True)
class BoundReport:
    """Itemised bound.  ``total`` is always the sum of the three non-negative terms.

    ``main_term`` is the signed drift of primitive-type results and is not
    part of ``total``; it is 0 for the jump bounds.
    """

    name: str
    n: int
    x: Fraction
    point_jump_term: float
    half_jump_term: float
    modulus_term: float
    main_term: float = 0.0
    beta: float | None = None
    total: float = field(init=False)

    def __post_init__(self):
        terms = (self.point_jump_term, self.half_jump_term, self.modulus_term)
        if any(not t >= 0 for t in terms):
            raise ContractError(f"{self.name}: negative or NaN bound term in {terms}")
        object.__setattr__(self, "total", math.fsum(terms))


class Decomposition(NamedTuple):
    """``|L_n(phi,x) - phi(x) - main_term| <= remainder_bound``."""

    main_term: float
    remainder_bound: float


def _unit_rational(x) -> Fraction:
    q = as_rational(x)
    if not 0 < q < 1:
        raise DomainError(f"x must lie in (0, 1), got {q}")
    return q


def ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


# ---------------------------------------------------------------------------
# exponential-law expectations of a modulus
# ---------------------------------------------------------------------------


def kn_sandwich(psi: ModulusProfile, beta: float, n: int, m: int) -> tuple[float, float]:
    """Lower and upper Riemann-type bounds for ``E psi(X_beta / sqrt(n))``.

    The ``m`` quantiles ``log(m/k)/beta`` of the exponential law split it
    into cells of mass ``1/m``; on each cell ``psi`` is squeezed between its
    end values.  The ``k = 0`` term of the upper sum sits at infinity and
    contributes ``psi.sup_value``, so ``upper - lower = sup_value / m``.
    """
    if isinstance(m, bool) or int(m) != m or m < 2:
        raise DomainError(f"m must be an integer >= 2, got {m!r}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    m = int(m)
    scale = 1.0 / (beta * math.sqrt(n))
    terms = [psi(scale * math.log(m / k)) for k in range(1, m)]
    return math.fsum(terms) / m, math.fsum([*terms, psi.sup_value]) / m


def modulus_expectation(
    omega: ModulusProfile, beta: float, n: int, method: str = "quadrature", m: int = DEFAULT_SANDWICH_M
) -> float:
    """``E omega(X_beta / sqrt(n))`` by quadrature, or its sandwich upper bound."""
    if method == "quadrature":
        return exp_expectation(omega, beta, n)
    if method == "sandwich":
        return kn_sandwich(omega, beta, n, m)[1]
    raise ValueError(f"unknown method {method!r}")


def lemma2_bounds(C_beta: float, beta: float, n: int, psi: ModulusProfile) -> tuple[float, float]:
    """Bounds on ``E psi(X/sqrt n)`` and ``E Psi(X/sqrt n)`` for ``P(X >= y) <= C e^{-beta y}``."""
    if not C_beta >= 1:
        raise ContractError(f"a tail constant must be >= 1, got {C_beta!r}")
    modulus = C_beta * exp_expectation(psi, beta, n)
    return modulus, modulus / (beta * math.sqrt(n))


# ---------------------------------------------------------------------------
# Bernstein constants
# ---------------------------------------------------------------------------


def a_n(n: int, x) -> float:
    """``1/sqrt(2 pi n x(1-x))`` on the lattice ``{k/n: 0<k<n}``, else 0."""
    q = _unit_rational(x)
    if not e_n_indicator(q, n):
        return 0.0
    xf = float(q)
    return 1.0 / math.sqrt(2.0 * math.pi * n * xf * (1.0 - xf))


def b_n(n: int, x) -> float:
    """Envelope for ``|P(Z_n(x) > 0) - 1/2|``.

    Exact tail values near the ends of ``(0, 1)`` and the Berry-Esseen
    estimate in between; the three indicator sets are compared exactly.
    """
    q = _unit_rational(x)
    xf = float(q)
    total = 0.0
    if q < Fraction(1, n):
        total += abs(0.5 - (1.0 - xf) ** n)
    if Fraction(n - 1, n) <= q:
        total += abs(0.5 - xf**n)
    if Fraction(1, n) <= q < Fraction(n - 1, n):
        spread = xf * xf + (1.0 - xf) ** 2
        total += BERRY_ESSEEN_C * spread / math.sqrt(n * xf * (1.0 - xf))
    return total


def cn_beta(n: int, x, beta: float) -> float:
    """Closed-form upper bound for ``E exp(beta |Z_n(x)|)``."""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    xf = float(_unit_rational(x))
    root = math.sqrt(n)
    spread = xf * xf + (1.0 - xf) ** 2
    inner = beta**2 + spread / (3.0 * root) * beta**3 * math.exp(beta / root)
    return 2.0 * math.exp(0.5 * xf * (1.0 - xf) * inner)


def _lemma1_sum(omega: ModulusProfile, n: int, count: int) -> float:
    """``(1/n) sum_{k<count} omega(log(n/k)/sqrt n)`` with the ``k=0`` term at infinity."""
    root = math.sqrt(n)
    terms = [omega.sup_value] + [omega(math.log(n / k) / root) for k in range(1, count)]
    return math.fsum(terms) / n


# ---------------------------------------------------------------------------
# general bounds
# ---------------------------------------------------------------------------


def _sign_probs(probs) -> tuple[float, float, float]:
    if isinstance(probs, DiscreteLaw):
        return probs.sign_probs()
    p_neg, p_zero, p_pos = (float(p) for p in probs)
    if min(p_neg, p_zero, p_pos) < 0 or abs(p_neg + p_zero + p_pos - 1.0) > 1e-12:
        raise ContractError(f"not a sign-probability triple: {probs!r}")
    return p_neg, p_zero, p_pos


def jump_report(
    name: str,
    triple: JumpTriple,
    zero_weight: float,
    half_weight: float,
    modulus_term: float,
    n: int,
    x,
    beta: float | None = None,
) -> BoundReport:
    """Assemble ``|f(x)-f(x-)| w0 + |f(x+)-f(x-)| w1 + modulus_term``.

    ``w0`` is ``P(Z_n = 0)`` or an upper bound for it; ``w1`` is
    ``|P(Z_n > 0) - 1/2|`` or an upper bound for it.
    """
    return BoundReport(
        name,
        n,
        as_rational(x),
        abs(triple.at - triple.left) * zero_weight,
        abs(triple.jump) * half_weight,
        modulus_term,
        beta=beta,
    )


def theorem3_bound(
    triple: JumpTriple,
    probs,
    C_beta: float,
    beta: float,
    n: int,
    omega_g: ModulusProfile,
    x=Fraction(0),
    *,
    method: str = "quadrature",
    m: int = DEFAULT_SANDWICH_M,
) -> BoundReport:
    """Bound on ``|L_n(f,x) - (f(x+)+f(x-))/2|`` with exact sign probabilities.

    ``probs`` is the law of ``Z_n(x)`` or the triple ``(P(Z<0), P(Z=0),
    P(Z>0))``; ``C_beta`` is a tail constant for ``|Z_n(x)|``.
    """
    _p_neg, p_zero, p_pos = _sign_probs(probs)
    modulus = C_beta * modulus_expectation(omega_g, beta, n, method, m)
    return jump_report("theorem3", triple, p_zero, abs(p_pos - 0.5), modulus, n, x, beta)


def theorem4_bound(
    triple: JumpTriple,
    probs,
    p_x: float,
    q_x: float,
    C_beta: float,
    beta: float,
    n: int,
    omega_g: ModulusProfile,
    x=Fraction(0),
) -> tuple[float, BoundReport]:
    """Variant for laws whose sign probabilities tend to ``(q(x), p(x))`` instead of halves.

    Returns the reference value ``f(x+) p + f(x-) q`` and a report whose
    ``point_jump_term`` holds ``|f(x+)-f(x)| |P(Z>0)-p|`` and whose
    ``half_jump_term`` holds ``|f(x-)-f(x)| |P(Z<0)-q|``.
    """
    if abs(p_x + q_x - 1.0) > 1e-12:
        raise ContractError(f"p(x) + q(x) must be 1, got {p_x} + {q_x}")
    p_neg, _p_zero, p_pos = _sign_probs(probs)
    reference = triple.right * p_x + triple.left * q_x
    report = BoundReport(
        "theorem4",
        n,
        as_rational(x),
        abs(triple.right - triple.at) * abs(p_pos - p_x),
        abs(triple.left - triple.at) * abs(p_neg - q_x),
        C_beta * exp_expectation(omega_g, beta, n),
        beta=beta,
    )
    return reference, report


def theorem5_decomposition(
    triple_of_derivative: JumpTriple,
    law: DiscreteLaw,
    C_beta: float,
    beta: float,
    n: int,
    omega_g: ModulusProfile,
    *,
    method: str = "quadrature",
    m: int = DEFAULT_SANDWICH_M,
) -> Decomposition:
    """Main term and remainder bound for ``L_n(phi,x) - phi(x)``.

    ``triple_of_derivative`` holds the one-sided limits of ``f = phi'`` at
    ``x``; ``omega_g`` is the local modulus of the function associated to
    ``f``.
    """
    root = math.sqrt(n)
    t = triple_of_derivative
    main = (t.right + t.left) * law.mean() / (2 * root) + t.jump * law.abs_mean() / (2 * root)
    remainder = C_beta / (beta * root) * modulus_expectation(omega_g, beta, n, method, m)
    return Decomposition(main, remainder)


# ---------------------------------------------------------------------------
# Bernstein corollaries and competitors
# ---------------------------------------------------------------------------


def _jump_data(f: PiecewiseFunction, x: Fraction):
    triple = limits_at(f, x)
    g = associated_g(f, x)
    return triple, g, local_modulus(g, x)


def _check_unit_domain(f: PiecewiseFunction) -> None:
    if f.lo != 0 or f.hi != 1:
        raise DomainError(f"Bernstein bounds need functions on [0, 1], got [{f.lo}, {f.hi}]")


def corollary10_bound(f: PiecewiseFunction, n: int, x) -> BoundReport:
    """Fully explicit bound on ``|B_n(f,x) - (f(x+)+f(x-))/2|``."""
    q = _unit_rational(x)
    _check_unit_domain(f)
    triple, _g, omega = _jump_data(f, q)
    modulus = cn_beta(n, q, 1.0) * _lemma1_sum(omega, n, n)
    return jump_report("corollary10", triple, a_n(n, q), b_n(n, q), modulus, n, q, 1.0)


def corollary11_main_term(n: int, x, jump: float) -> float:
    """``x(1-x) P(S_{n-1}(x) = floor(n x)) (f(x+) - f(x-))``."""
    q = _unit_rational(x)
    xf = float(q)
    return xf * (1.0 - xf) * binom_pmf(n - 1, math.floor(n * q), q) * jump


def corollary11_bound(phi: PiecewiseFunction, f: PiecewiseFunction, n: int, x) -> Decomposition:
    """Explicit decomposition of ``B_n(phi,x) - phi(x)`` for ``phi' = f``."""
    q = _unit_rational(x)
    _check_unit_domain(f)
    _check_unit_domain(phi)
    triple, _g, omega = _jump_data(f, q)
    main = corollary11_main_term(n, q, triple.jump)
    remainder = cn_beta(n, q, 1.0) * _lemma1_sum(omega, n, ceil_sqrt(n))
    return Decomposition(main, remainder)


def _zeng_interval(x: float, k: int) -> tuple[float, float]:
    r = math.sqrt(k + 1)
    return x - x / r, x + (1.0 - x) / r


def zeng_report(f: PiecewiseFunction, n: int, x) -> BoundReport:
    """Total-variation bound of Zeng and Piriou, itemised.

    ``point_jump_term`` holds the ``e_n(x)|f(x)-f(x-)|`` part,
    ``half_jump_term`` the ``|f(x+)-f(x-)|`` part and ``modulus_term`` the
    variation sum.
    """
    q = _unit_rational(x)
    _check_unit_domain(f)
    triple = limits_at(f, q)
    g = associated_g(f, q)
    xf = float(q)
    spread = n * xf * (1.0 - xf)
    variation = math.fsum(g.variation(*_zeng_interval(xf, k)) for k in range(n))
    jump_coef = 2.0 / (math.sqrt(spread) + 1.0)
    return BoundReport(
        "zeng",
        n,
        q,
        jump_coef * e_n_indicator(q, n) * abs(triple.at - triple.left),
        jump_coef * abs(triple.jump),
        3.0 / (spread + 1.0) * variation,
    )


def zeng_bound(f: PiecewiseFunction, n: int, x) -> float:
    return zeng_report(f, n, x).total


def bojanic_cheng_bound(
    phi: PiecewiseFunction, f: PiecewiseFunction, n: int, x, M: float
) -> Decomposition:
    """Bojanic-Cheng decomposition of ``B_n(phi,x) - phi(x)``; ``M`` is their constant."""
    q = _unit_rational(x)
    _check_unit_domain(f)
    _check_unit_domain(phi)
    xf = float(q)
    var = xf * (1.0 - xf)
    if n < var:
        raise DomainError(f"requires n >= x(1-x), got n={n}")
    if not M > 0:
        raise DomainError(f"M must be positive, got {M!r}")
    triple = limits_at(f, q)
    g = associated_g(f, q)
    main = math.sqrt(var / (2.0 * math.pi)) * triple.jump / math.sqrt(n)
    count = math.isqrt(n)  # k = 0 .. floor(sqrt(n) - 1)
    variation = math.fsum(g.variation(*_zeng_interval(xf, k)) for k in range(count))
    remainder = M / (2.0 * n * math.sqrt(var)) * abs(triple.jump) + 2.0 / n * variation
    return Decomposition(main, remainder)


def modulus_vs_tv_gap(g: PiecewiseFunction, x, n: int) -> tuple[float, float]:
    """Modulus sum of the Bernstein corollaries next to the matching variation sum."""
    q = as_rational(x)
    omega = local_modulus(g, q)
    root = math.sqrt(n)
    xf = float(q)
    mod_terms = [omega.sup_value]
    tv_terms = [g.variation(g.lo, g.hi)]
    for k in range(1, n):
        theta = math.log(n / k) / root
        mod_terms.append(omega(theta))
        tv_terms.append(g.variation(max(xf - theta, g.lo), min(xf + theta, g.hi)))
    return math.fsum(mod_terms), math.fsum(tv_terms)
