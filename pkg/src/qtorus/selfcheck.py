"""Built-in invariant suite behind ``qtorus selfcheck``.

Small, deterministic checks of every layer: field axioms, skew
associativity, q-binomial recurrence, expansion-difference oracle,
relation suites for rank one, delta/mode agreement, zero modes, the
module property of the exact realization and the mutation harness.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cartan import cartan_from_type, make_config
from .generators import MUTATIONS, build, zero_mode_generators
from .relations import q_binomial, verify
from .repr import apply_exact
from .scalars import Field, Symbol
from .series import expand, expansion_difference, truncated_modes
from .skew import ShiftGen, SkewAlgebra


def _rand_poly(K: Field, names, rng, terms=3, deg=2):
    out = K.zero
    for _ in range(terms):
        mono = K(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        for n in names:
            mono = mono * K.gen(n) ** rng.randint(0, deg)
        out = out + mono
    return out


def _rand_ratfunc(K, names, rng):
    while True:
        den = _rand_poly(K, names, rng)
        if not den.is_zero():
            return _rand_poly(K, names, rng) / den


def check_field_axioms(rng) -> bool:
    K = Field([Symbol("x", "gamma", (1, 1)), Symbol("y", "gamma", (1, 2)), Symbol("h", "hbar")])
    for _ in range(5):
        a, b, c = (_rand_ratfunc(K, ["x", "y", "h"], rng) for _ in range(3))
        if not ((a + b) * c == a * c + b * c and (a * b) * c == a * (b * c) and a - a == K.zero):
            return False
        if not a.is_zero() and not (a * a.inverse() == K.one):
            return False
    return True


def _toy_algebras():
    K = Field([Symbol("h", "hbar"), Symbol("g_1_1", "gamma", (1, 1)), Symbol("t", "spectral")])
    add = SkewAlgebra(K, "additive", [ShiftGen("beta_1_1", "g_1_1", K.gen("h"))])
    T = Field([Symbol("lam", "lambda"), Symbol("v_1_1", "v", (1, 1)), Symbol("t", "spectral")])
    mul = SkewAlgebra(T, "multiplicative", [ShiftGen("u_1_1", "v_1_1", 2)])
    return (add, ["h", "g_1_1", "t"], "beta_1_1"), (mul, ["lam", "v_1_1", "t"], "u_1_1")


def _rand_skew(alg, names, shift, rng):
    x = alg.zero()
    for _ in range(2):
        x = x + alg.shift(shift, rng.randint(-2, 2), _rand_ratfunc(alg.field, names, rng))
    return x


def check_skew_associativity(rng) -> bool:
    for alg, names, shift in _toy_algebras():
        for _ in range(3):
            x, y, z = (_rand_skew(alg, names, shift, rng) for _ in range(3))
            if not ((x * y) * z == x * (y * z)):
                return False
    return True


def check_q_binomial_recurrence(rng) -> bool:
    K = Field([Symbol("lam", "lambda")])
    q = K.gen("lam")
    for m in range(1, 7):
        for k in range(1, m):
            rec = q**k * q_binomial(m - 1, k, q) + q ** (-(m - k)) * q_binomial(m - 1, k - 1, q)
            if not (q_binomial(m, k, q) == rec and q_binomial(m, k, q) == q_binomial(m, m - k, q)):
                return False
    return True


def check_expansion_difference(rng) -> bool:
    """Residue deltas equal the difference of the two expansions, mode by mode."""
    K = Field([Symbol("lam", "lambda"), Symbol("a", "v", (1, 1)), Symbol("b", "v", (1, 2)), Symbol("z", "spectral")])
    alg = SkewAlgebra(K, "multiplicative", [])
    z, a, b = K.gen("z"), K.gen("a"), K.gen("b")
    f = (z**2 + 3 * a) / ((z - a) * (z - 2 * b))
    diff = expansion_difference(alg.scalar(f), "z")
    modes = truncated_modes(diff, ["z"], 5)
    plus = expand(f, "z", "+", -5, 5)
    minus = expand(f, "z", "-", -5, 5)
    for e in range(-5, 6):
        want = plus.get(e, K.zero) - minus.get(e, K.zero)
        got = modes.get((e,), alg.zero()).scalar_part()
        if not (got == want):
            return False
    return True


def _rank_one(family, **kw):
    c = cartan_from_type("A", 1)
    return c, make_config(c, family, [1], **kw)


FAMILIES = (("yangian", {}), ("qaffine", {}), ("uqg", {"lattice": "adjoint"}))


def check_rank_one_suites(rng) -> bool:
    ok = True
    for family, kw in FAMILIES:
        c, cfg = _rank_one(family, **kw)
        ok &= verify(build(c, cfg)).status == "pass"
    return ok


def check_delta_mode_agreement(rng) -> bool:
    c, cfg = _rank_one("qaffine")
    rep = verify(build(c, cfg), "modes", N=3)
    return rep.status == "pass" and all(r.detail.get("delta_mode_agreement") for r in rep.results)


def check_zero_modes(rng) -> bool:
    c, cfg = _rank_one("qaffine")
    return verify(zero_mode_generators(build(c, cfg))).status == "pass"


def check_module_property(rng) -> bool:
    (alg, names, shift), _ = _toy_algebras()
    for _ in range(5):
        x, y = _rand_skew(alg, names, shift, rng), _rand_skew(alg, names, shift, rng)
        f = _rand_ratfunc(alg.field, names, rng)
        if not (apply_exact(x * y, f) == apply_exact(x, apply_exact(y, f))):
            return False
    return True


def check_mutations(rng) -> bool:
    """Every deliberate corruption must be reported as a failure."""
    for family, kw in FAMILIES:
        c, cfg = _rank_one(family, **kw)
        for mutation in MUTATIONS:
            if verify(build(c, cfg, mutation=mutation)).status != "fail":
                return False
    return True


CHECKS = (
    ("scalars-field-axioms", check_field_axioms),
    ("skew-associativity", check_skew_associativity),
    ("q-binomial-recurrence", check_q_binomial_recurrence),
    ("expansion-difference-oracle", check_expansion_difference),
    ("rank-one-relation-suites", check_rank_one_suites),
    ("delta-mode-agreement", check_delta_mode_agreement),
    ("zero-mode-consistency", check_zero_modes),
    ("exact-module-property", check_module_property),
    ("mutation-harness", check_mutations),
)


def run_selfcheck(seed: int = 0, progress=None) -> list[dict]:
    out = []
    for name, fn in CHECKS:
        rng = random.Random(f"{seed}:{name}")
        try:
            ok = bool(fn(rng))
            entry = {"check": name, "status": "pass" if ok else "fail"}
        except Exception as exc:  # a crash is a failed invariant
            ok = False
            entry = {"check": name, "status": "fail", "error": f"{type(exc).__name__}: {exc}"}
        out.append(entry)
        if progress:
            progress(name, ok)
    return out
