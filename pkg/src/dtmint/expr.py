"""Tiny vectorized expression language for grid functions and predicates.

Grammar: variables ``x`` and ``y`` (cell-center coordinates), numeric
literals, ``pi``, the operators ``+ - * / **``, comparisons, ``and``/``or``/
``not``, and the functions ``min``, ``max``, ``abs``, ``hypot``, ``sqrt``.
Expressions are parsed with :mod:`ast` and evaluated element-wise with numpy;
nothing else is reachable.
"""
import ast
import math
import operator

import numpy as np


class ExpressionError(ValueError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_CMPOPS = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}


def _fmin(*args):
    _need(args, 2, "min")
    return np.minimum.reduce(np.broadcast_arrays(*args))


def _fmax(*args):
    _need(args, 2, "max")
    return np.maximum.reduce(np.broadcast_arrays(*args))


def _need(args, n, name):
    if len(args) < n:
        raise ExpressionError(f"{name}() needs at least {n} arguments")


def _fixed(fn, n, name):
    def call(*args):
        if len(args) != n:
            raise ExpressionError(f"{name}() takes {n} argument(s)")
        return fn(*args)

    return call


_FUNCS = {
    "min": _fmin,
    "max": _fmax,
    "abs": _fixed(np.abs, 1, "abs"),
    "hypot": _fixed(np.hypot, 2, "hypot"),
    "sqrt": _fixed(np.sqrt, 1, "sqrt"),
}


def parse(text):
    """Parse ``text`` and return a callable ``f(x, y)``."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression")
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"malformed expression {text!r}: {exc.msg}") from None
    _check(tree.body)

    def evaluate(x, y):
        env = {"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float), "pi": math.pi}
        with np.errstate(divide="ignore", invalid="ignore"):
            return _eval(tree.body, env)

    return evaluate


def _check(node):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported literal {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id not in ("x", "y", "pi"):
            raise ExpressionError(f"unknown variable {node.id!r}")
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError("unsupported operator")
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd, ast.Not)):
            raise ExpressionError("unsupported unary operator")
        _check(node.operand)
    elif isinstance(node, ast.BoolOp):
        for v in node.values:
            _check(v)
    elif isinstance(node, ast.Compare):
        if any(type(op) not in _CMPOPS for op in node.ops):
            raise ExpressionError("unsupported comparison")
        _check(node.left)
        for c in node.comparators:
            _check(c)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
            raise ExpressionError("unknown function")
        if node.keywords:
            raise ExpressionError("keyword arguments are not supported")
        for a in node.args:
            _check(a)
    else:
        raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def _eval(node, env):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.Not):
            return np.logical_not(v)
        return v
    if isinstance(node, ast.BoolOp):
        combine = np.logical_and if isinstance(node.op, ast.And) else np.logical_or
        out = _eval(node.values[0], env)
        for v in node.values[1:]:
            out = combine(out, _eval(v, env))
        return out
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env)
        out = None
        for op, comp in zip(node.ops, node.comparators):
            right = _eval(comp, env)
            part = _CMPOPS[type(op)](left, right)
            out = part if out is None else np.logical_and(out, part)
            left = right
        return out
    return _FUNCS[node.func.id](*[_eval(a, env) for a in node.args])
