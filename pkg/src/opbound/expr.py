"""A small closed-form expression grammar for function pieces.

Expressions are written in the variable ``t`` and may use numbers, ``+ - *
/ **``, unary minus, and the functions ``abs``, ``min``, ``max``, ``exp``,
``log`` and ``sqrt``.  Parsing goes through :mod:`ast` with a whitelist, so
spec files are never passed to ``eval``.  Compiled expressions accept
floats or numpy arrays.
"""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .errors import SpecError

VARIABLE = "t"

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

_NUMERIC_FUNCS = {
    "abs": np.abs,
    "min": np.minimum,
    "max": np.maximum,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
}

_ARITY = {"abs": 1, "exp": 1, "log": 1, "sqrt": 1, "min": 2, "max": 2}


class _NotPolynomial(Exception):
    pass


def _validate(node: ast.AST, src: str) -> None:
    if isinstance(node, ast.Expression):
        _validate(node.body, src)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise SpecError(f"operator {type(node.op).__name__} not allowed in {src!r}")
        _validate(node.left, src)
        _validate(node.right, src)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise SpecError(f"unary operator not allowed in {src!r}")
        _validate(node.operand, src)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _NUMERIC_FUNCS:
            raise SpecError(f"unknown function in {src!r}")
        if node.keywords or len(node.args) != _ARITY[node.func.id]:
            raise SpecError(f"{node.func.id} takes {_ARITY[node.func.id]} argument(s) in {src!r}")
        for arg in node.args:
            _validate(arg, src)
    elif isinstance(node, ast.Name):
        if node.id != VARIABLE:
            raise SpecError(f"unknown name {node.id!r} in {src!r} (the variable is {VARIABLE!r})")
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise SpecError(f"constant {node.value!r} not allowed in {src!r}")
    else:
        raise SpecError(f"syntax {type(node).__name__} not allowed in {src!r}")


def _numeric(node: ast.AST, t):
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_numeric(node.left, t), _numeric(node.right, t))
    if isinstance(node, ast.UnaryOp):
        val = _numeric(node.operand, t)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.Call):
        return _NUMERIC_FUNCS[node.func.id](*(_numeric(a, t) for a in node.args))
    if isinstance(node, ast.Name):
        return t
    return float(node.value)


def _polynomial(node: ast.AST) -> Polynomial:
    if isinstance(node, ast.BinOp):
        left, right = _polynomial(node.left), _polynomial(node.right)
        if isinstance(node.op, ast.Pow):
            if right.degree() > 0:
                raise _NotPolynomial
            e = right.coef[0]
            if e != int(e) or e < 0:
                raise _NotPolynomial
            return left ** int(e)
        if isinstance(node.op, ast.Div):
            if right.degree() > 0 or right.coef[0] == 0:
                raise _NotPolynomial
            return left / right.coef[0]
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp):
        val = _polynomial(node.operand)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.Name):
        return Polynomial([0.0, 1.0])
    if isinstance(node, ast.Constant):
        return Polynomial([float(node.value)])
    raise _NotPolynomial


@dataclass(frozen=True)
class Expr:
    """A parsed, validated expression in ``t``."""

    source: str
    _tree: ast.Expression = field(repr=False, compare=False)

    def __call__(self, t):
        with np.errstate(all="ignore"):
            out = _numeric(self._tree.body, t)
        if np.ndim(t) == 0:
            return float(out)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(t)).copy()

    def as_polynomial(self) -> Polynomial | None:
        """The expression as a numpy Polynomial, or None if it is not one."""
        try:
            return _polynomial(self._tree.body)
        except _NotPolynomial:
            return None


def parse_expr(source: str) -> Expr:
    """Parse and validate ``source``; raise :class:`SpecError` if invalid."""
    if not isinstance(source, str) or not source.strip():
        raise SpecError(f"expression must be a non-empty string, got {source!r}")
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as exc:
        raise SpecError(f"cannot parse expression {source!r}: {exc.msg}") from exc
    _validate(tree, source)
    return Expr(source.strip(), tree)


def polynomial_source(poly: Polynomial) -> str:
    """Render a Polynomial back into the grammar, exact to float round-trip."""
    terms = [f"({c!r})*t**{i}" for i, c in enumerate(poly.coef) if c != 0.0]
    return " + ".join(terms) if terms else "0"


def shifted(fn: Callable, c: float) -> Callable:
    """``t -> fn(t) - c``."""
    if c == 0:
        return fn
    return lambda t: fn(t) - c
