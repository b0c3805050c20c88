"""Positive linear operators written as ``L_n(f, x) = E f(x + Z_n(x)/sqrt(n))``.

Three families: Bernstein polynomials (binomial ``Z_n``), the symmetric
exponential convolution operators ``L_n^beta`` (``Z_n = Y_beta`` with
density ``beta/2 exp(-beta|t|)``), and any finite law supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ContractError, DomainError
from .funcspace import PiecewiseFunction
from .probkit import (
    DiscreteLaw,
    ExpLaw,
    ModulusProfile,
    as_rational,
    binom_pmf_vector,
    binom_z_law,
    exponential_expectation,
)


@dataclass(frozen=True)
class DiscreteOperator:
    """``f -> E f(x + Z/sqrt(n))`` for a finite law of ``Z``.

    ``nodes`` optionally gives the evaluation points ``x + s/sqrt(n)`` as
    exact rationals, so that atoms landing on a breakpoint pick up the
    breakpoint value instead of a rounded neighbour.
    """

    law: DiscreteLaw
    n: int
    x: Fraction
    nodes: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "x", as_rational(self.x))
        if self.nodes is not None and len(self.nodes) != len(self.law.support):
            raise ContractError("nodes must match the law's support point for point")

    def points(self) -> list:
        if self.nodes is not None:
            return list(self.nodes)
        root = math.sqrt(self.n)
        xf = float(self.x)
        # an atom at 0 lands on x itself, which may be a breakpoint
        return [self.x if s == 0 else xf + s / root for s in self.law.support]


def bernstein_operator(n: int, x) -> DiscreteOperator:
    """The Bernstein operator as a :class:`DiscreteOperator` with nodes ``k/n``."""
    law = binom_z_law(n, x)
    return DiscreteOperator(law, n, as_rational(x), tuple(Fraction(k, n) for k in range(n + 1)))


def bernstein_apply(f: PiecewiseFunction, n: int, x) -> float:
    """``B_n(f, x) = sum_k f(k/n) C(n,k) x^k (1-x)^(n-k)``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    q = as_rational(x)
    if not 0 <= q <= 1:
        raise DomainError(f"x must lie in [0, 1], got {q}")
    weights = binom_pmf_vector(n, q)
    return math.fsum(weights * f.lattice_values(n))


def discrete_apply(op: DiscreteOperator, f: PiecewiseFunction) -> float:
    """``sum_j p_j f(x + s_j/sqrt(n))``."""
    values = []
    for y in op.points():
        if y < f.lo or y > f.hi:
            raise DomainError(f"atom {y} maps outside [{f.lo}, {f.hi}]")
        values.append(f(y))
    return math.fsum(p * v for p, v in zip(op.law.probs, values))


def _kinks_for(f, x: float, root: float, side: int) -> list[float]:
    if not isinstance(f, PiecewiseFunction):
        return []
    return [side * (float(c) - x) * root for c in f.nonsmooth_points() if side * (float(c) - x) > 0]


def convolution_apply(
    f: PiecewiseFunction | Callable[[float], float],
    n: int,
    x,
    beta: float,
    kinks: Sequence[float] = (),
) -> float:
    """``L_n^beta(f, x) = (E f(x + X/sqrt n) + E f(x - X/sqrt n)) / 2``.

    ``X`` is exponential with rate ``beta``.  A :class:`PiecewiseFunction`
    is continued by constants outside its domain.  For a plain callable,
    ``kinks`` lists offsets ``|y - x|`` where it is not smooth.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    law = ExpLaw(beta)
    xf = float(as_rational(x))
    root = math.sqrt(n)
    if isinstance(f, PiecewiseFunction):
        fn = f.extended
        upper, lower = f.point_values[f.hi], f.point_values[f.lo]
    else:
        fn = f
        upper = lower = 0.0
    extra = [k * root for k in kinks]
    plus = exponential_expectation(
        lambda t: fn(xf + t / root), law.beta, _kinks_for(f, xf, root, +1) + extra, tail=upper
    )
    minus = exponential_expectation(
        lambda t: fn(xf - t / root), law.beta, _kinks_for(f, xf, root, -1) + extra, tail=lower
    )
    return 0.5 * (plus + minus)


def discrete_expected_modulus(op: DiscreteOperator, omega: ModulusProfile) -> float:
    """``E omega(|Z|/sqrt(n))`` summed exactly over the law's atoms."""
    root = math.sqrt(op.n)
    return math.fsum(p * omega(abs(s) / root) for s, p in zip(op.law.support, op.law.probs))

