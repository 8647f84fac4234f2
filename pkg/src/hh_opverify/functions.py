"""Named scalar functions addressable from the command line."""
from __future__ import annotations

import re

import numpy as np

from .linalg import ScalarFunction

_PARAM = re.compile(r"^(affine|constant)\(([^()]*)\)$")


def square() -> ScalarFunction:
    return ScalarFunction(lambda t: t * t, label="square", derivative=lambda t: 2.0 * t)


def cube() -> ScalarFunction:
    return ScalarFunction(lambda t: t * t * t, label="cube", derivative=lambda t: 3.0 * t * t)


def exp() -> ScalarFunction:
    return ScalarFunction(np.exp, label="exp", derivative=np.exp)


def abs_neg() -> ScalarFunction:
    return ScalarFunction(lambda t: -np.abs(t), label="abs-neg", derivative=lambda t: -np.sign(t))


def identity() -> ScalarFunction:
    return ScalarFunction(lambda t: t + 0.0, label="identity", derivative=lambda t: np.ones_like(t))


def affine(a: float, b: float) -> ScalarFunction:
    return ScalarFunction(lambda t: a + b * t, label=f"affine({a:g},{b:g})",
                          derivative=lambda t: b + 0.0 * t)


def constant(c: float) -> ScalarFunction:
    return ScalarFunction(lambda t: c + 0.0 * t, label=f"constant({c:g})",
                          derivative=lambda t: 0.0 * t)


SIMPLE = {
    "square": square,
    "cube": cube,
    "exp": exp,
    "abs-neg": abs_neg,
    "identity": identity,
}
REGISTRY_NAMES = sorted(SIMPLE) + ["affine(a,b)", "constant(c)"]


def parse_function(name: str) -> ScalarFunction:
    """Resolve a registry name such as ``square`` or ``affine(5,2)``."""
    name = name.strip()
    if name in SIMPLE:
        return SIMPLE[name]()
    m = _PARAM.match(name.replace(" ", ""))
    if m:
        kind, args = m.groups()
        try:
            vals = [float(v) for v in args.split(",")] if args else []
        except ValueError:
            vals = None
        if kind == "affine" and vals is not None and len(vals) == 2:
            return affine(*vals)
        if kind == "constant" and vals is not None and len(vals) == 1:
            return constant(*vals)
    raise KeyError(f"unknown function {name!r}; known: {', '.join(REGISTRY_NAMES)}")


def kind_of(name: str) -> str:
    """Registry family of a function name: "square", "affine", "constant", ..."""
    name = name.strip()
    m = _PARAM.match(name.replace(" ", ""))
    return m.group(1) if m else name


def scalar_convex_on(name: str, lo: float, hi: float) -> bool | None:
    """Whether the named function is convex on [lo, hi]; None when it is not."""
    kind = kind_of(name)
    if kind in ("square", "exp", "identity", "affine", "constant"):
        return True
    if kind == "cube":
        return lo >= 0.0
    return None
