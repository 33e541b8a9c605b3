"""Tiny expression language for support patterns.

Index rules (``"k^2"``, ``"2^k"``) evaluate over Python integers; amplitude
rules (``"k*2^(-k^2)"``) evaluate with :mod:`mpmath` so that magnitudes such
as ``2^(-16384)`` survive without underflow.  ``^`` means power.
"""
import ast
import operator

import mpmath

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


class ExpressionError(ValueError):
    pass


def _compile(text, variables):
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse expression {text!r}") from exc

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return check(node.left) and check(node.right)
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return check(node.operand)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return True
        if isinstance(node, ast.Name) and node.id in variables:
            return True
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in variables and not node.keywords):
            return all(check(a) for a in node.args)
        raise ExpressionError(f"unsupported token in expression {text!r}")

    check(tree)
    return tree.body


def _evaluate(node, env):
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_evaluate(node.operand, env))
    if isinstance(node, ast.Constant):
        return env["__const__"](node.value)
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.Call):
        return env[node.func.id](*[_evaluate(a, env) for a in node.args])
    raise ExpressionError("bad node")  # pragma: no cover


class IndexRule:
    """Integer-valued rule ``k -> index``."""

    def __init__(self, text):
        self.text = text
        self._tree = _compile(text, {"k"})

    def __call__(self, k):
        env = {"k": int(k), "__const__": lambda v: v}
        value = _evaluate(self._tree, env)
        if isinstance(value, float):
            if not value.is_integer():
                raise ExpressionError(f"index rule {self.text!r} gave non-integer {value} at k={k}")
            value = int(value)
        return value


_MP_FUNCS = {
    "sqrt": mpmath.sqrt,
    "exp": mpmath.exp,
    "log": mpmath.log,
    "log2": lambda x: mpmath.log(x, 2),
    "abs": abs,
}


class AmplitudeRule:
    """Real amplitude rule ``k -> a_k``, evaluated in arbitrary exponent range."""

    def __init__(self, text, extra=None):
        self.text = text
        names = {"k", "n", *_MP_FUNCS, *(extra or {})}
        self._extra = dict(extra or {})
        self._tree = _compile(text, names)

    def __call__(self, k, n):
        env = dict(_MP_FUNCS)
        env.update({key: mpmath.mpf(v) for key, v in self._extra.items()})
        env.update(k=mpmath.mpf(k), n=mpmath.mpf(n), __const__=mpmath.mpf)
        with mpmath.workprec(80):
            return _evaluate(self._tree, env)


def mp_to_scaled(value):
    """Split an mpmath real into (float mantissa, int exponent)."""
    if value == 0:
        return 0.0, 0
    mant, ex = mpmath.frexp(value)
    return float(mant), int(ex)
