"""A small expression language for complex functions of one variable ``x``.

Grammar (``^`` is right-associative, unary minus binds looser than ``^``)::

    expr  := sum
    sum   := prod (('+' | '-') prod)*
    prod  := unary (('*' | '/') unary)*
    unary := '-' unary | pow
    pow   := atom ('^' unary)?
    atom  := number | 'x' | 'i' | 'pi' | '(' expr ')' | ident '(' args ')'

Parsing is Pratt-style over binding powers. Evaluation is vectorised over
numpy arrays and always complex.
"""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import eval_genlaguerre

from ._errors import DomainError
from .special import bessel_j, chirp, gamma_fn

MAX_DEPTH = 64


class ParseError(ValueError):
    def __init__(self, message, source, offset):
        line = source.count("\n", 0, offset) + 1
        col = offset - (source.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.offset = offset
        self.line = line
        self.column = col


# ---------------------------------------------------------------- AST nodes

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple[object, ...]


def _real_arg(z, name):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.imag) > 1e-12 * np.maximum(1.0, np.abs(z.real))):
        raise DomainError(f"{name} needs a real argument")
    return z.real


def _gamma(z):
    return gamma_fn(_real_arg(z, "gamma"))


def _besselj(mu, z):
    mu = _real_arg(mu, "besselj order")
    if mu.size != 1 and np.ptp(mu) != 0:
        raise DomainError("besselj order must be constant")
    return bessel_j(float(mu.flat[0]), _real_arg(z, "besselj"))


FUNCTIONS = {
    "exp": (1, np.exp),
    "log": (1, np.log),
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "sqrt": (1, np.sqrt),
    "abs": (1, np.abs),
    "pow": (2, np.power),
    "besselj": (2, _besselj),
    "gamma": (1, _gamma),
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

# binding powers for infix operators: (left bp, right bp)
_INFIX = {"+": (10, 11), "-": (10, 11), "*": (20, 21), "/": (20, 21), "^": (41, 40)}
_PREFIX_MINUS = 30


def _tokenize(source):
    text = source.replace("−", "-")
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", source, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.source, tok[2])

    def expect(self, text):
        tok = self.take()
        if tok[1] != text:
            self.fail(f"expected {text!r}", tok)

    def expression(self, min_bp=0, depth=0):
        if depth > MAX_DEPTH:
            self.fail("expression nested too deeply")
        left = self.prefix(depth)
        while True:
            kind, text, _ = self.peek()
            if kind != "op" or text not in _INFIX:
                break
            lbp, rbp = _INFIX[text]
            if lbp < min_bp:
                break
            self.take()
            if text == "^":
                # the exponent may carry its own sign: x^-2
                right = self.exponent(depth + 1)
            else:
                right = self.expression(rbp, depth + 1)
            left = Binary(text, left, right)
        return left

    def exponent(self, depth):
        if self.peek()[1] == "-":
            self.take()
            return Unary("-", self.exponent(depth + 1))
        return self.expression(_INFIX["^"][1], depth)

    def prefix(self, depth):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "op" and text == "-":
            return Unary("-", self.expression(_PREFIX_MINUS, depth + 1))
        if kind == "op" and text == "(":
            inner = self.expression(0, depth + 1)
            self.expect(")")
            return inner
        if kind == "ident":
            if text == "x":
                return Var()
            if text == "i":
                return Imag()
            if text == "pi":
                return Pi()
            if text not in FUNCTIONS:
                self.fail(f"unknown identifier {text!r}", (kind, text, pos))
            self.expect("(")
            args = [self.expression(0, depth + 1)]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.expression(0, depth + 1))
            self.expect(")")
            arity = FUNCTIONS[text][0]
            if len(args) != arity:
                self.fail(f"{text} expects {arity} argument(s), got {len(args)}",
                          (kind, text, pos))
            return Call(text, tuple(args))
        if kind == "end":
            self.fail("unexpected end of input", (kind, text, pos))
        self.fail(f"unexpected token {text!r}", (kind, text, pos))


def parse_expr(source):
    """Parse ``source`` into an immutable AST."""
    if not source or not source.strip():
        raise ParseError("empty expression", source or "", 0)
    p = _Parser(source)
    tree = p.expression()
    if p.peek()[0] != "end":
        p.fail(f"unexpected token {p.peek()[1]!r}")
    return tree


def to_source(node):
    """Print an AST so that ``parse_expr(to_source(t)) == t``."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Unary):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, Binary):
        return f"({to_source(node.left)}{node.op}{to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}(" + ",".join(to_source(a) for a in node.args) + ")"
    raise TypeError(node)


def evaluate(node, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        return np.broadcast_to(_eval(node, x), x.shape).astype(complex)


def _eval(node, x):
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Var):
        return x.astype(complex)
    if isinstance(node, Imag):
        return 1j
    if isinstance(node, Pi):
        return complex(math.pi)
    if isinstance(node, Unary):
        return -_eval(node.operand, x)
    if isinstance(node, Binary):
        a, b = _eval(node.left, x), _eval(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return _power(a, b)
    if isinstance(node, Call):
        args = [_eval(a, x) for a in node.args]
        if node.name == "pow":
            return _power(*args)
        return np.asarray(FUNCTIONS[node.name][1](*args), dtype=complex)
    raise TypeError(node)


def _power(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    # keep positive real bases on the real branch for accuracy
    if np.all(b.imag == 0) and np.all((a.imag == 0) & (a.real > 0)):
        return (a.real ** b.real).astype(complex)
    return a ** b


# ---------------------------------------------------------------- builtins

def _bump(x, a, b, height=1.0):
    x = np.asarray(x, dtype=float)
    t = (2 * x - (a + b)) / (b - a)
    out = np.zeros_like(x)
    inside = np.abs(t) < 1
    out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def _chirp(c1, x):
    x = np.asarray(x, dtype=np.longdouble)
    return chirp(c1, x * x, sign=+1)


BUILTINS = {
    "zero": ((), lambda x: np.zeros_like(x)),
    "power": (("a",), lambda x, a: x ** a),
    "log_power": (("a", "b"), lambda x, a, b: x ** a * np.abs(np.log(x)) ** b),
    "chirped_power": (("a", "c1"), lambda x, a, c1: _chirp(c1, x) * x ** a),
    "gaussian": (("mu",), lambda x, mu: x ** (mu + 0.5) * np.exp(-x * x / 2)),
    "chirped_gaussian": (("mu", "c1"),
                         lambda x, mu, c1: _chirp(c1, x) * x ** (mu + 0.5) * np.exp(-x * x / 2)),
    "laguerre": (("mu", "n"), lambda x, mu, n: x ** (mu + 0.5)
                 * eval_genlaguerre(int(n), mu, x * x) * np.exp(-x * x / 2)),
    "bump": (("a", "b", "height"), _bump),
}
_BUILTIN_DEFAULTS = {"bump": {"height": 1.0}}


def _validate_builtin(name, params):
    if name not in BUILTINS:
        raise DomainError(f"unknown builtin {name!r}")
    keys = BUILTINS[name][0]
    params = {**_BUILTIN_DEFAULTS.get(name, {}), **params}
    extra = set(params) - set(keys)
    missing = set(keys) - set(params)
    if extra or missing:
        raise DomainError(f"builtin {name!r} takes {keys}; got {sorted(params)}")
    clean = {k: float(params[k]) for k in keys}
    if name in ("gaussian", "chirped_gaussian", "laguerre") and clean["mu"] < -0.5:
        raise DomainError("mu must be >= -1/2")
    if name == "laguerre" and (clean["n"] != int(clean["n"]) or clean["n"] < 0):
        raise DomainError("laguerre index must be a nonnegative integer")
    if name == "bump" and not 0 < clean["a"] < clean["b"]:
        raise DomainError("bump needs 0 < a < b")
    return clean


# ---------------------------------------------------------------- FunctionSpec

class FunctionSpec:
    """A complex-valued function on (0, inf).

    Build one with :meth:`builtin`, :meth:`expr`, :meth:`sampled` or
    :meth:`from_callable`; call it on arrays of positive abscissae.
    """

    def __init__(self, kind, label, fn, *, ast=None, grid=None, params=None, name=None):
        self.kind = kind
        self.label = label
        self._fn = fn
        self.ast = ast
        self.grid = grid
        self.params = params
        self.name = name

    def __repr__(self):
        return f"FunctionSpec({self.kind}: {self.label})"

    @classmethod
    def builtin(cls, name, **params):
        clean = _validate_builtin(name, params)
        impl = BUILTINS[name][1]
        label = name + ("{" + ",".join(f"{k}={v!r}" for k, v in clean.items()) + "}"
                        if clean else "")

        def fn(x):
            return np.asarray(impl(x, **clean), dtype=complex)
        return cls("builtin", label, fn, params=clean, name=name)

    @classmethod
    def expr(cls, source):
        tree = parse_expr(source)
        return cls("expr", source, lambda x: evaluate(tree, x), ast=tree)

    @classmethod
    def sampled(cls, x, values):
        x = np.asarray(x, dtype=float)
        v = np.asarray(values, dtype=complex)
        if x.ndim != 1 or x.size < 8 or x.shape != v.shape:
            raise DomainError("sampled specs need >= 8 matching abscissae/values")
        if np.any(np.diff(x) <= 0) or x[0] <= 0:
            raise DomainError("sampled abscissae must be positive and strictly increasing")
        re_s = CubicSpline(x, v.real)
        im_s = CubicSpline(x, v.imag)
        lo, hi = x[0], x[-1]

        def fn(t):
            t = np.asarray(t, dtype=float)
            if np.any((t < lo * (1 - 1e-13)) | (t > hi * (1 + 1e-13))):
                raise DomainError(f"sampled spec evaluated outside [{lo}, {hi}]")
            t = np.clip(t, lo, hi)
            return re_s(t) + 1j * im_s(t)
        return cls("sampled", f"sampled[{x.size}]", fn, grid=(x, v))

    @classmethod
    def from_callable(cls, fn, label="callable"):
        return cls("callable", label, lambda x: np.asarray(fn(x), dtype=complex))

    @classmethod
    def parse(cls, text):
        """``builtin:name:k=v,...`` for builtins, anything else is an expression."""
        if text.startswith("builtin:"):
            parts = text.split(":", 2)
            params = {}
            if len(parts) == 3 and parts[2]:
                for item in parts[2].split(","):
                    k, _, v = item.partition("=")
                    params[k.strip()] = float(v)
            return cls.builtin(parts[1], **params)
        return cls.expr(text)

    @classmethod
    def from_config(cls, item):
        if isinstance(item, str):
            return cls.parse(item)
        if isinstance(item, dict) and "builtin" in item:
            return cls.builtin(item["builtin"], **item.get("params", {}))
        if isinstance(item, dict) and "expr" in item:
            return cls.expr(item["expr"])
        if isinstance(item, dict) and "csv" in item:
            return cls.from_csv(item["csv"])
        raise DomainError(f"cannot build a function from {item!r}")

    @classmethod
    def from_csv(cls, path):
        """Re-ingest a CSV written by the CLI (first column abscissa, then re, im)."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        body = rows[1:]
        x = [float(r[0]) for r in body]
        v = [complex(float(r[1]), float(r[2])) for r in body]
        return cls.sampled(x, v)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.broadcast_to(self._fn(x), x.shape).astype(complex)

    def __add__(self, other):
        return FunctionSpec.from_callable(lambda x: self(x) + other(x),
                                          f"({self.label})+({other.label})")

    def scaled(self, c):
        return FunctionSpec.from_callable(lambda x: c * self(x), f"{c!r}*({self.label})")

    def dilated(self, lam):
        """x -> f(lam * x)."""
        return FunctionSpec.from_callable(lambda x: self(lam * np.asarray(x)),
                                          f"({self.label})({lam!r}x)")

    @property
    def is_zero(self):
        return self.kind == "builtin" and self.name == "zero"


def eval_fn(spec: FunctionSpec, x):
    """Evaluate ``spec`` at positive ``x``; overflow yields complex infinity."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError("functions are defined on x > 0 only")
    out = spec(x_arr)
    return complex(out) if out.ndim == 0 else out


ZERO = FunctionSpec.builtin("zero")
