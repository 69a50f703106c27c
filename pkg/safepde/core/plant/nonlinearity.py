"""Strict-feedback nonlinearities f_1..f_m given as symbolic expressions."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from safepde.exceptions import ConfigurationError

_ALLOWED_NAMES = (
    "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh",
    "atan", "Abs", "pi", "E", "Integer", "Float", "Rational", "Symbol",
)

PRESETS: dict[str, tuple[str, ...]] = {
    "paper": ("x1**2", "x1*x2"),
    "zero": ("0", "0"),
}


def parse_symbolic(text: str, symbols: dict[str, sp.Symbol]) -> sp.Expr:
    """Parse ``text`` against a fixed symbol table; other names are rejected."""
    global_dict = {name: getattr(sp, name) for name in _ALLOWED_NAMES}
    global_dict["__builtins__"] = {}
    try:
        expr = parse_expr(
            str(text),
            local_dict=dict(symbols),
            global_dict=global_dict,
            transformations=standard_transformations,
            evaluate=True,
        )
    except Exception as e:
        raise ConfigurationError(f"cannot parse expression {text!r}: {e}") from e
    expr = sp.sympify(expr)
    unknown = {str(s) for s in expr.free_symbols} - set(symbols)
    if unknown:
        raise ConfigurationError(
            f"expression {text!r} uses unknown symbols", details={"unknown": sorted(unknown)}
        )
    return expr


class StrictFeedbackNonlinearity:
    """Evaluation rules f_j(x_1..x_j) for the actuator chain.

    f_j may only depend on x_1..x_j and must vanish at the origin.
    """

    def __init__(self, expressions: Sequence[str]):
        if not expressions:
            raise ConfigurationError("at least one nonlinearity rule is required")
        self.m = len(expressions)
        self.symbols = sp.symbols(f"x1:{self.m + 1}")
        table = {str(s): s for s in self.symbols}
        self.expressions = tuple(parse_symbolic(e, table) for e in expressions)

        for j, expr in enumerate(self.expressions):
            later = {str(s) for s in self.symbols[j + 1:]}
            used = {str(s) for s in expr.free_symbols}
            if used & later:
                raise ConfigurationError(
                    f"f_{j + 1} must depend on x1..x{j + 1} only",
                    details={"expression": str(expr)},
                )
            at_origin = sp.simplify(expr.subs({s: 0 for s in self.symbols}))
            if at_origin != 0:
                raise ConfigurationError(
                    f"f_{j + 1}(0) must vanish", details={"expression": str(expr), "value": str(at_origin)}
                )

        self._f = [sp.lambdify(self.symbols, e, modules="numpy") for e in self.expressions]
        self.df1_expr = sp.diff(self.expressions[0], self.symbols[0])
        self._df1 = sp.lambdify(self.symbols, self.df1_expr, modules="numpy")

    @classmethod
    def from_preset(cls, name: str, m: int) -> "StrictFeedbackNonlinearity":
        if name not in PRESETS:
            raise ConfigurationError(f"unknown nonlinearity preset {name!r}")
        rules = PRESETS[name]
        if m > len(rules):
            raise ConfigurationError(f"preset {name!r} defines only {len(rules)} rules")
        return cls(rules[:m])

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.array([float(f(*X)) for f in self._f])

    def df1_dx1(self, X: np.ndarray) -> float:
        return float(self._df1(*np.asarray(X, dtype=float)))

    def __repr__(self) -> str:
        return f"StrictFeedbackNonlinearity({[str(e) for e in self.expressions]})"
