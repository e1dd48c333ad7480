"""Difference-operator realizations of skew elements.

Exact mode acts on rational functions of the moved symbols: a shift
monomial acts by the skew automorphism and coefficients multiply after
the shift.  Numeric mode uses the analytic dictionary for the torus

    u_{i,k} = exp(i w1 d_i d/d gamma_{i,k}),   v_{i,k} = exp(2 pi gamma_{i,k}/w2),
    lam = exp(pi i w1/w2),  q = lam^2,

and for the additive instance shifts gamma_{i,k} by h*d_i with h numeric.
Test functions are black boxes of the gamma values.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .errors import NumericPole
from .scalars import RatFunc
from .skew import SkewElement

REL_TOL = 1e-9
POLE_GUARD = 1e-12

TestFunction = Callable[[Mapping[str, complex]], complex]


def gamma_name(moved: str) -> str:
    """Numeric coordinate behind a moved symbol: v_i_k and g_i_k both map to g_i_k."""
    return "g_" + moved.split("_", 1)[1]


@dataclass
class FunctionPoint:
    """A numeric sample: gamma values, moduli w1, w2 and other parameters.

    ``params`` holds complex values for the remaining symbols (h, nu, w,
    spectral variables); lam is derived from w1/w2 and may not be given.
    """

    gamma: dict[str, complex]
    omega1: complex = 1.0
    omega2: complex = 1.0
    params: dict[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.omega2 == 0:
            raise ValueError("omega2 must be nonzero")
        self.lam = cmath.exp(cmath.pi * 1j * self.omega1 / self.omega2)
        self.q = self.lam**2


def apply_exact(x: SkewElement, f: RatFunc) -> RatFunc:
    """sum_m c_m * sigma^m(f)."""
    act = x.alg.action.act
    f = x.alg.field(f)
    out = x.alg.field.zero
    for m, c in x.terms.items():
        out = out + c * act(f, m)
    return out


def _coefficient_values(x: SkewElement, point: FunctionPoint) -> dict[str, complex]:
    alg = x.alg
    vals = dict(point.params)
    if alg.kind == "multiplicative":
        if "lam" in point.params:
            raise ValueError("lam is fixed by omega1/omega2 and cannot be passed as a parameter")
        vals["lam"] = point.lam
        for g in alg.gens:
            vals[g.moves] = cmath.exp(2 * cmath.pi * point.gamma[gamma_name(g.moves)] / point.omega2)
    else:
        for g in alg.gens:
            vals[g.moves] = point.gamma[gamma_name(g.moves)]
    return vals


def _steps(x: SkewElement, point: FunctionPoint) -> list[tuple[str, complex]]:
    """Per shift generator: (gamma coordinate, shift per unit power)."""
    alg = x.alg
    out = []
    for g in alg.gens:
        name = gamma_name(g.moves)
        if alg.kind == "multiplicative":
            d = g.step // 2
            out.append((name, 1j * point.omega1 * d))
        else:
            coeff, _ = g.step.monomial_exponents()  # step = d_i * h
            out.append((name, complex(coeff) * point.params["h"]))
    return out


def evaluate_coefficient(c: RatFunc, values: Mapping[str, complex], pole_guard: float = POLE_GUARD) -> complex:
    num, den = c.evaluate_complex(values)
    if abs(den) < pole_guard:
        raise NumericPole(f"coefficient denominator {abs(den):.3g} below guard {pole_guard}")
    return num / den


def apply_numeric(x: SkewElement, f: TestFunction, point: FunctionPoint, pole_guard: float = POLE_GUARD) -> complex:
    """sum_m c_m(point) * f(point shifted by m)."""
    values = _coefficient_values(x, point)
    steps = _steps(x, point)
    total = 0j
    for m, c in x.terms.items():
        g = dict(point.gamma)
        for e, (name, s) in zip(m, steps):
            if e:
                g[name] = g[name] + e * s
        total += evaluate_coefficient(c, values, pole_guard) * f(g)
    return total


def compose_numeric(ops, f: TestFunction, point: FunctionPoint, pole_guard: float = POLE_GUARD) -> complex:
    """(ops[0] ops[1] ... ops[-1] f)(point), each operator applied numerically."""
    h = f
    for x in reversed(ops):
        h = _lift(x, h, point, pole_guard)
    return h(point.gamma)


def _lift(x, f, point, pole_guard):
    def g(gamma):
        p = FunctionPoint(dict(gamma), point.omega1, point.omega2, point.params)
        return apply_numeric(x, f, p, pole_guard)

    return g


def relative_residual(terms: list[tuple[complex, complex]]) -> float:
    """|sum s*v| / sum |v| for signed contributions (s, v)."""
    total = sum(s * v for s, v in terms)
    scale = sum(abs(v) for _, v in terms)
    return abs(total) / scale if scale else abs(total)
