"""Tiny arithmetic grammar for metric components.

Accepted: numeric literals, variables ``x1 .. xn``, ``+ - * / ^`` (``^`` is
power), unary minus, parentheses and the functions ``exp``, ``sin``, ``cos``.
Parsing goes through :mod:`ast` with a node whitelist; the resulting tree is
evaluated against any array namespace exposing ``exp``/``sin``/``cos`` (numpy
or ``jax.numpy``), so compiled components can be traced.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Callable

FUNCTIONS = ("exp", "sin", "cos")
_VAR = re.compile(r"x([1-9][0-9]*)$")


class ExprError(ValueError):
    """Invalid expression; ``column`` is 1-based within the expression."""

    def __init__(self, message: str, text: str, column: int):
        self.text = text
        self.column = column
        super().__init__(f"{message} at column {column}: {text!r}")


@dataclass(frozen=True)
class Expr:
    text: str
    tree: ast.expr
    max_var: int   # highest variable index used, 0 if constant

    def evaluate(self, x, xp) -> object:
        return _eval(self.tree, x, xp)

    def compile(self, xp) -> Callable:
        return lambda x: _eval(self.tree, x, xp)


_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def parse(text: str) -> Expr:
    """Parse one expression; raises :class:`ExprError` with the offending column."""
    if not isinstance(text, str):
        raise ExprError("expression must be a string", str(text), 1)
    if "**" in text:
        raise ExprError("use '^' for powers", text, text.index("**") + 1)
    # '^' becomes '**' so that it binds tighter than the other operators
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip() or " ", mode="eval").body
    except SyntaxError as exc:
        raise ExprError("syntax error", text, _orig_col(src, (exc.offset or 1) - 1)) from None
    max_var = _validate(tree, text, src)
    return Expr(text, tree, max_var)


def _orig_col(src, offset):
    """Map a 0-based offset in the stripped, rewritten source back to a text column."""
    offset += len(src) - len(src.lstrip())
    return offset - src[:offset].count("**") + 1


def _col(node, src):
    return _orig_col(src, getattr(node, "col_offset", 0))


def _validate(node, text, src) -> int:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExprError("only numeric literals are allowed", text, _col(node, src))
        return 0
    if isinstance(node, ast.Name):
        m = _VAR.match(node.id)
        if not m:
            raise ExprError(f"unknown name {node.id!r}", text, _col(node, src))
        return int(m.group(1))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        return _validate(node.operand, text, src)
    if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
        return max(_validate(node.left, text, src), _validate(node.right, text, src))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ExprError("unknown function", text, _col(node, src))
        if len(node.args) != 1 or node.keywords:
            raise ExprError(f"{node.func.id} takes one argument", text, _col(node, src))
        return _validate(node.args[0], text, src)
    raise ExprError(f"unsupported syntax {type(node).__name__}", text, _col(node, src))


def _eval(node, x, xp):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return x[int(node.id[1:]) - 1]
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, x, xp)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        a, b = _eval(node.left, x, xp), _eval(node.right, x, xp)
        op = node.op
        if isinstance(op, ast.Add):
            return a + b
        if isinstance(op, ast.Sub):
            return a - b
        if isinstance(op, ast.Mult):
            return a * b
        if isinstance(op, ast.Div):
            return a / b
        return a ** b
    return getattr(xp, node.func.id)(_eval(node.args[0], x, xp))
