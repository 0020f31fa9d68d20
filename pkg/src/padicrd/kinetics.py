"""Reaction terms: built-in activator-inhibitor models and custom expressions.

Both built-ins are rational two-species models with closed-form steady
states and Jacobians; custom models are parsed from expression strings
and differentiated symbolically.  Every model carries a validity box
(a, b)^2 around its steady state on which evaluation is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import expressions as ex

__all__ = [
    "KineticsModel",
    "SteadyStateError",
    "brusselator",
    "cima",
    "parse_kinetics",
    "steady_state",
]

_BOX_MARGIN = 10.0


class SteadyStateError(RuntimeError):
    pass


@dataclass
class KineticsModel:
    """A reaction pair (f, g) with parameters, Jacobian, and validity box."""

    f: Callable
    g: Callable
    jacobian: Callable
    params: dict[str, float]
    provenance: str
    box: tuple[float, float] | None = None
    closed_form_steady: tuple[float, float] | None = None
    known_steady: tuple[float, float] | None = None
    expr_f: str | None = None
    expr_g: str | None = None
    _ast: dict = field(default_factory=dict, repr=False)

    def in_box(self, u, v) -> bool:
        if self.box is None:
            return True
        a, b = self.box
        return bool(np.all(u > a) and np.all(u < b) and np.all(v > a) and np.all(v < b))

    def gradients_nonvanishing_at(self, u: float, v: float) -> tuple[bool, bool]:
        """Whether grad f and grad g are nonzero at (u, v)."""
        J = np.asarray(self.jacobian(u, v), dtype=float)
        return (
            bool(np.hypot(J[0, 0], J[0, 1]) > 0.0),
            bool(np.hypot(J[1, 0], J[1, 1]) > 0.0),
        )


def _default_box(u0: float, v0: float) -> tuple[float, float]:
    return (min(u0, v0) - _BOX_MARGIN, max(u0, v0) + _BOX_MARGIN)


def brusselator(A: float, B: float, box: tuple[float, float] | None = None) -> KineticsModel:
    """f = A - (B+1)u + u^2 v,  g = Bu - u^2 v; steady state (A, B/A)."""
    if A <= 0 or B <= 0:
        raise ValueError("brusselator parameters must be positive")

    def f(u, v):
        return A - (B + 1.0) * u + u * u * v

    def g(u, v):
        return B * u - u * u * v

    def jacobian(u, v):
        return np.array(
            [[-(B + 1.0) + 2.0 * u * v, u * u], [B - 2.0 * u * v, -u * u]]
        )

    steady = (A, B / A)
    return KineticsModel(
        f=f, g=g, jacobian=jacobian,
        params={"A": A, "B": B},
        provenance="brusselator",
        box=box if box is not None else _default_box(*steady),
        closed_form_steady=steady,
    )


def cima(A: float, B: float, C: float, box: tuple[float, float] | None = None) -> KineticsModel:
    """f = A - u - 4uv/(1+u^2),  g = BCu - Cuv/(1+u^2).

    Steady state u0 = A/(4B+1), v0 = B(1 + u0^2).
    """
    if A <= 0 or B <= 0 or C <= 0:
        raise ValueError("cima parameters must be positive")

    def f(u, v):
        return A - u - 4.0 * u * v / (1.0 + u * u)

    def g(u, v):
        return B * C * u - C * u * v / (1.0 + u * u)

    def jacobian(u, v):
        s = 1.0 + u * u
        duv = (1.0 - u * u) / (s * s)  # d/du of u/(1+u^2)
        return np.array(
            [[-1.0 - 4.0 * v * duv, -4.0 * u / s], [B * C - C * v * duv, -C * u / s]]
        )

    u0 = A / (4.0 * B + 1.0)
    steady = (u0, B * (1.0 + u0 * u0))
    return KineticsModel(
        f=f, g=g, jacobian=jacobian,
        params={"A": A, "B": B, "C": C},
        provenance="cima",
        box=box if box is not None else _default_box(*steady),
        closed_form_steady=steady,
    )


def parse_kinetics(
    expr_f: str,
    expr_g: str,
    params: dict[str, float] | None = None,
    box: tuple[float, float] | None = None,
) -> KineticsModel:
    """Build a model from two expression strings in u, v and named parameters.

    The Jacobian is the symbolic derivative of the parsed trees; unknown
    identifiers (anything besides u, v and the parameter names) are
    rejected here rather than at evaluation time.
    """
    params = dict(params or {})
    ast_f = ex.parse(expr_f)
    ast_g = ex.parse(expr_g)
    allowed = {"u", "v"} | set(params)
    unknown = (ex.names_in(ast_f) | ex.names_in(ast_g)) - allowed
    if unknown:
        raise ex.EvaluationError(
            f"unknown identifier(s) {sorted(unknown)}; define them in params"
        )
    partials = {
        ("f", "u"): ex.derivative(ast_f, "u"),
        ("f", "v"): ex.derivative(ast_f, "v"),
        ("g", "u"): ex.derivative(ast_g, "u"),
        ("g", "v"): ex.derivative(ast_g, "v"),
    }

    def make_eval(tree):
        def call(u, v):
            return ex.evaluate(tree, {"u": u, "v": v, **params})
        return call

    f = make_eval(ast_f)
    g = make_eval(ast_g)
    dfu, dfv = make_eval(partials["f", "u"]), make_eval(partials["f", "v"])
    dgu, dgv = make_eval(partials["g", "u"]), make_eval(partials["g", "v"])

    def jacobian(u, v):
        return np.array([[dfu(u, v), dfv(u, v)], [dgu(u, v), dgv(u, v)]])

    return KineticsModel(
        f=f, g=g, jacobian=jacobian,
        params=params,
        provenance="custom",
        box=box,
        expr_f=expr_f,
        expr_g=expr_g,
        _ast={"f": ast_f, "g": ast_g, **partials},
    )


def steady_state(
    model: KineticsModel,
    guess: tuple[float, float] | None = None,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> tuple[float, float]:
    """Solve f = g = 0: closed form for built-ins, damped Newton otherwise.

    Custom models require a starting guess on the first call; the solved
    state is remembered on the model.  A successful solve on a model
    without a validity box installs the default box around the solution.
    """
    if model.closed_form_steady is not None:
        return model.closed_form_steady
    if guess is None:
        if model.known_steady is not None:
            return model.known_steady
        raise SteadyStateError("custom models need a starting guess for the steady state")

    u, v = float(guess[0]), float(guess[1])
    for _ in range(max_iter):
        F = np.array([model.f(u, v), model.g(u, v)], dtype=float)
        if np.abs(F).max() <= tol:
            break
        J = np.asarray(model.jacobian(u, v), dtype=float)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise SteadyStateError(f"singular Jacobian at ({u}, {v})") from exc
        lam = 1.0
        base = np.abs(F).max()
        while lam > 1e-6:
            u_new, v_new = u + lam * step[0], v + lam * step[1]
            try:
                F_new = np.array([model.f(u_new, v_new), model.g(u_new, v_new)], dtype=float)
            except ex.EvaluationError:
                lam *= 0.5
                continue
            if np.abs(F_new).max() < base:
                break
            lam *= 0.5
        u, v = u + lam * step[0], v + lam * step[1]
    else:
        F = np.array([model.f(u, v), model.g(u, v)], dtype=float)
        if np.abs(F).max() > tol:
            raise SteadyStateError(
                f"Newton did not reach residual {tol} in {max_iter} iterations "
                f"(residual {np.abs(F).max():.3e})"
            )
    if model.box is not None and not model.in_box(u, v):
        raise SteadyStateError(f"steady state ({u}, {v}) lies outside the validity box {model.box}")
    if model.box is None:
        model.box = _default_box(u, v)
    model.known_steady = (u, v)
    return (u, v)
