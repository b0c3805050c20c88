import math
from fractions import Fraction

import pytest

from opbound import ModulusProfile, PiecewiseFunction, load_corpus
from opbound.expr import parse_expr

HALF = Fraction(1, 2)

#: rational evaluation points, lattice and off-lattice
X_GRID = [Fraction(p, q) for p, q in [
    (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5), (2, 5), (1, 7), (3, 7), (5, 8),
    (9, 10), (1, 10), (3, 10), (7, 11), (1, 12), (5, 12), (2, 9), (13, 16), (1, 20), (17, 20),
]]


def pw(pieces, breakpoints=(), point_values=None, lo=0, hi=1, name="f"):
    """Shorthand for :meth:`PiecewiseFunction.from_exprs` with one expression per piece."""
    return PiecewiseFunction.from_exprs(lo, hi, pieces, breakpoints, point_values, name)


def sign_fn():
    return pw(["-1", "1"], [HALF], {HALF: 0.0}, name="sign")


def indicator_upper_half(closed=True):
    """``1_{[1/2,1]}`` (closed) or ``1_{(1/2,1]}``."""
    return pw(["0", "1"], [HALF], {HALF: 1.0 if closed else 0.0})


def profile(src, sup, kinks=(), primitive=None, name=""):
    return ModulusProfile(parse_expr(src), sup, tuple(kinks),
                          parse_expr(primitive) if primitive else None, name=name)


CAPPED_RAMP = profile("min(t, 1)", 1.0, [1.0], "min(t, 1)**2/2 + max(t - 1, 0)", "capped_ramp")
SATURATING = profile("1 - exp(-t)", 1.0, name="saturating_exp")
CAPPED_SQUARE = profile("min(t**2, 0.25)", 0.25, [0.5], name="capped_square")
PSI_GRID = [CAPPED_RAMP, SATURATING, CAPPED_SQUARE]


@pytest.fixture(scope="session")
def corpus():
    return {f.name: f for f in load_corpus()}


@pytest.fixture(scope="session")
def jump_corpus(corpus):
    return {k: f for k, f in corpus.items() if k != "constant"}


def indicator_profile(c):
    return ModulusProfile(lambda t: c if t > 0 else 0.0, c, name="indicator")


def isclose(a, b, tol):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)
