"""Explicit generator families.

* Yangian ``Y(g)`` (and its Borel part) as difference operators in the
  ``gamma_{i,k}`` with shifts ``beta_{i,k}``;
* level-zero quantum affine currents ``K_i(z), E_i(z), F_i(z)`` in the
  quantum torus (``u_{i,k}``, ``v_{i,k}``, central ``w_{i,s}``);
* the rational forms ``U_q^M(g)`` in the same torus.

Node indices are 0-based internally and 1-based in symbol names.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

from .cartan import CartanData, RepConfig
from .errors import ConfigMismatch, NonIntegerExponent
from .scalars import Field, RatFunc, Symbol
from .series import DeltaSeries, DeltaTerm, expand
from .skew import ShiftGen, SkewAlgebra, SkewElement

MUTATIONS = ("sign-flip", "scale-E", "drop-factor", "wrong-shift")


def _prod(items, one):
    out = one
    for x in items:
        out = out * x
    return out


def serre_order(c: CartanData) -> int:
    orders = [1 - c.a[i][j] for i in range(c.rank) for j in range(c.rank) if i != j]
    return max(orders, default=0)


def gamma(i: int, k: int) -> str:
    return f"g_{i + 1}_{k + 1}"


def vname(i: int, k: int) -> str:
    return f"v_{i + 1}_{k + 1}"


def wname(i: int, s: int) -> str:
    return f"w_{i + 1}_{s + 1}"


def yangian_field(c: CartanData, cfg: RepConfig) -> Field:
    syms = [Symbol("h", "hbar")]
    for i in range(c.rank):
        syms += [Symbol(gamma(i, k), "gamma", (i + 1, k + 1)) for k in range(cfg.m[i])]
    for i in range(c.rank):
        if cfg.family == "yangian-borel":
            syms += [Symbol(f"nup_{i + 1}_{s + 1}", "nu+", (i + 1, s + 1)) for s in range(cfg.l_plus[i])]
            syms += [Symbol(f"num_{i + 1}_{s + 1}", "nu-", (i + 1, s + 1)) for s in range(cfg.l_minus[i])]
        else:
            syms += [Symbol(f"nu_{i + 1}_{s + 1}", "nu", (i + 1, s + 1)) for s in range(cfg.l[i])]
    for d in sorted(set(c.d)):
        if d in (2, 3):
            syms.append(Symbol(f"s{d}", "sqrt"))
        elif d != 1:
            raise ConfigMismatch(f"symmetrizer d = {d} needs an unsupported square root")
    syms += [Symbol("u", "spectral"), Symbol("v", "spectral")]
    syms += [Symbol(f"u{k}", "spectral") for k in range(1, serre_order(c) + 1)]
    # expansion variable for modes; never specialized
    syms.append(Symbol("t", "spectral"))
    return Field(syms)


def torus_field(c: CartanData, cfg: RepConfig) -> Field:
    syms = [Symbol("lam", "lambda")]
    for i in range(c.rank):
        syms += [Symbol(vname(i, k), "v", (i + 1, k + 1)) for k in range(cfg.m[i])]
    for i in range(c.rank):
        syms += [Symbol(wname(i, s), "w", (i + 1, s + 1)) for s in range(cfg.l[i])]
    if cfg.family == "qaffine":
        syms += [Symbol("z", "spectral"), Symbol("w", "spectral")]
        syms += [Symbol(f"z{k}", "spectral") for k in range(1, serre_order(c) + 1)]
    return Field(syms)


@dataclass
class GeneratorSet:
    """Generators of one family, built lazily per node and spectral variable.

    ``assignment`` specializes central symbols (randomized verification);
    ``mutation`` corrupts the construction on purpose (mutation harness).
    """

    family: str
    cartan: CartanData
    cfg: RepConfig
    field: Field
    alg: SkewAlgebra
    builders: dict[str, Callable]
    assignment: dict = dc_field(default_factory=dict)
    mutation: str | None = None
    rebuild: Callable | None = dc_field(default=None, repr=False)
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        return self.cartan.rank

    def _get(self, kind: str, *args):
        key = (kind,) + args
        if key not in self._cache:
            self._cache[key] = self.builders[kind](*args)
        return self._cache[key]

    def sym(self, name: str) -> RatFunc:
        """A field symbol with this set's specialization applied."""
        x = self.field.gen(name)
        return self.field(self.assignment[name]) if name in self.assignment else x

    def H(self, i: int, var: str = "u") -> SkewElement:
        return self._get("H", i, var)

    def E(self, i: int, var=None):
        return self._get("E", i, var if var is not None else self.default_var)

    def F(self, i: int, var=None):
        return self._get("F", i, var if var is not None else self.default_var)

    def K(self, i: int, var: str = "z") -> SkewElement:
        """Affine: the rational function K_i(z); uqg: K_i = prod K_beta^m."""
        if self.family == "uqg":
            return self._get("K", i)
        return self._get("K", i, var)

    def Kinv(self, i: int) -> SkewElement:
        return self._get("Kinv", i)

    def Kbeta(self, i: int) -> SkewElement:
        return self._get("Kbeta", i)

    def Kbeta_inv(self, i: int) -> SkewElement:
        return self._get("Kbeta_inv", i)

    def constant(self, i: int) -> RatFunc:
        return self._get("c", i)

    @property
    def default_var(self):
        return {"qaffine": "z", "uqg": None}.get(self.family, "u")

    def specialize(self, assignment) -> "GeneratorSet":
        """Same construction with central symbols fixed to rationals.

        The shift action is rebuilt too, since h and lam enter it.
        """
        merged = dict(self.assignment)
        merged.update({k: Fraction(v) for k, v in assignment.items()})
        if self.rebuild is None:
            raise ValueError("this generator set cannot be specialized")
        return self.rebuild(merged)

    def with_mutation(self, mutation: str | None) -> "GeneratorSet":
        return build(self.cartan, self.cfg, mutation=mutation, assignment=self.assignment)

    def central_symbols(self) -> list[str]:
        """Symbols fixed by the shift action and free to specialize."""
        keep = set(self.alg.action.moved) | {"t"}
        if self.family == "qaffine":
            keep |= {s.name for s in self.field.by_kind("spectral")}
        return [s.name for s in self.field.symbols if s.name not in keep and s.kind != "sqrt"]


def build(c: CartanData, cfg: RepConfig, mutation: str | None = None, assignment=None) -> GeneratorSet:
    if mutation is None:
        # test hook: corrupt every default build
        mutation = os.environ.get("QTORUS_INJECT_MUTATION") or None
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}; expected one of {MUTATIONS}")
    if cfg.family in ("yangian", "yangian-borel"):
        return build_yangian(c, cfg, mutation, assignment)
    if cfg.family == "qaffine":
        return build_qaffine(c, cfg, mutation, assignment)
    if cfg.family == "uqg":
        return build_uqg(c, cfg, mutation, assignment)
    raise ConfigMismatch(f"unknown family {cfg.family!r}")


def _check_cfg(c: CartanData, cfg: RepConfig, families):
    if cfg.family not in families:
        raise ConfigMismatch(f"config family {cfg.family!r} does not match builder {families}")
    if len(cfg.m) != c.rank:
        raise ConfigMismatch("multiplicity vector does not match the rank")


def _assignment(K: Field, cfg: RepConfig, extra) -> dict:
    """Explicit parameter values from the config merged with ``extra``."""
    out = {}
    if not isinstance(cfg.nu, str):
        unknown = [k for k in cfg.nu if k not in K]
        if unknown:
            raise ConfigMismatch(f"explicit parameter values for undeclared symbols {unknown}")
        out.update(cfg.nu)
    out.update({k: Fraction(v) for k, v in (extra or {}).items() if k in K})
    return out


def _lookup(K: Field, assign: dict):
    def P(name: str) -> RatFunc:
        return K(assign[name]) if name in assign else K.gen(name)

    return P


# -- Yangian ---------------------------------------------------------------


def build_yangian(c: CartanData, cfg: RepConfig, mutation: str | None = None, assignment=None) -> GeneratorSet:
    _check_cfg(c, cfg, ("yangian", "yangian-borel"))
    K = yangian_field(c, cfg)
    assign = _assignment(K, cfg, assignment)
    P = _lookup(K, assign)
    h = P("h")
    n = c.rank
    shifts = [ShiftGen(f"beta_{i + 1}_{k + 1}", gamma(i, k), h * c.d[i]) for i in range(n) for k in range(cfg.m[i])]
    A = SkewAlgebra(K, "additive", shifts)
    g = {(i, k): K.gen(gamma(i, k)) for i in range(n) for k in range(cfg.m[i])}
    half = Fraction(1, 2)

    def inner_shift(i, j, r):
        # (h/2)(alpha_i + r alpha_j, alpha_j)
        return h * (half * (c.bilinear(i, j) + r * c.bilinear(j, j)))

    def R(i, x: RatFunc, mutate=False) -> RatFunc:
        if cfg.family == "yangian-borel":
            top = _prod((x - P(f"nup_{i + 1}_{s + 1}") for s in range(cfg.l_plus[i])), K.one)
            bot = _prod((x - P(f"num_{i + 1}_{s + 1}") for s in range(cfg.l_minus[i])), K.one)
            return top / bot
        factors = [x - P(f"nu_{i + 1}_{s + 1}") for s in range(cfg.l[i])]
        if mutate and mutation == "drop-factor" and i == 0 and factors:
            factors = factors[1:]
        return _prod(factors, K.one)

    def inv_sqrt_d(i) -> RatFunc:
        d = c.d[i]
        return K.one if d == 1 else K.gen(f"s{d}") / d

    def H(i, var):
        x = P(var)
        num = R(i, x, mutate=True)
        for j in range(n):
            if j == i:
                continue
            for r in range(1, -c.a[j][i] + 1):
                for p in range(cfg.m[j]):
                    num = num * (x - g[j, p] - inner_shift(i, j, r))
        den = _prod(((x - g[i, p]) * (x - g[i, p] - h * c.d[i]) for p in range(cfg.m[i])), K.one)
        return A.scalar(num / den)

    def vandermonde(i, k):
        return _prod((g[i, k] - g[i, p] for p in range(cfg.m[i]) if p != k), K.one)

    def E(i, var):
        x = P(var)
        out = A.zero()
        for k in range(cfg.m[i]):
            num = K.one
            for j in range(i + 1, n):
                for r in range(1, -c.a[j][i] + 1):
                    for p in range(cfg.m[j]):
                        num = num * (g[i, k] - g[j, p] - inner_shift(i, j, r))
            coeff = inv_sqrt_d(i) * num / ((x - g[i, k]) * vandermonde(i, k))
            power = 1 if (mutation == "wrong-shift" and i == 0) else -1
            out = out + A.shift(f"beta_{i + 1}_{k + 1}", power, coeff)
        if mutation == "scale-E" and i == 0:
            out = 2 * out
        return out

    def F(i, var):
        if cfg.family == "yangian-borel":
            raise ConfigMismatch("the Borel family has no F generators")
        x = P(var)
        hd = h * c.d[i]
        out = A.zero()
        for k in range(cfg.m[i]):
            num = R(i, g[i, k] + hd)
            for j in range(i):
                for r in range(1, -c.a[j][i] + 1):
                    for p in range(cfg.m[j]):
                        num = num * (g[i, k] - g[j, p] - inner_shift(i, j, r) + hd)
            coeff = -inv_sqrt_d(i) * num / ((x - g[i, k] - hd) * vandermonde(i, k))
            out = out + A.shift(f"beta_{i + 1}_{k + 1}", 1, coeff)
        if mutation == "sign-flip":
            out = -out
        return out

    return GeneratorSet(
        cfg.family, c, cfg, K, A, {"H": H, "E": E, "F": F}, assign, mutation,
        lambda a: build_yangian(c, cfg, mutation, a),
    )


# -- quantum torus families -------------------------------------------------


class _Torus:
    """Shared torus data for the affine and finite builders."""

    def __init__(self, c: CartanData, cfg: RepConfig, wpower: int, assignment=None):
        self.c, self.cfg = c, cfg
        K = self.K = torus_field(c, cfg)
        self.assign = _assignment(K, cfg, assignment)
        P = self.P = _lookup(K, self.assign)
        n = c.rank
        shifts = [ShiftGen(f"u_{i + 1}_{k + 1}", vname(i, k), 2 * c.d[i]) for i in range(n) for k in range(cfg.m[i])]
        self.A = SkewAlgebra(K, "multiplicative", shifts, self.assign.get("lam"))
        self.lam = P("lam")
        self.v = {(i, k): P(vname(i, k)) for i in range(n) for k in range(cfg.m[i])}
        self.w = {(i, s): P(wname(i, s)) for i in range(n) for s in range(cfg.l[i])}
        self.wpower = wpower

    def q(self, i: int, e=1) -> RatFunc:
        """q_i**e = lam**(2 d_i e)."""
        return self.lam ** (2 * self.c.d[i] * e)

    def lam_pow(self, e: int) -> RatFunc:
        return self.lam**e

    def R_factor(self, i, s, x):
        w = self.w[i, s] ** self.wpower
        return x / w - w

    def R_plus(self, i, x, drop_first=False):
        idx = list(self.cfg.plus_factors(i))
        if drop_first and idx:
            idx = idx[1:]
        return _prod((self.R_factor(i, s - 1, x) for s in idx), self.K.one)

    def R_minus(self, i, x):
        return _prod((self.R_factor(i, s - 1, x) for s in self.cfg.minus_factors(i)), self.K.one)

    def c_alpha(self, i: int) -> RatFunc:
        # prod_j q_j^(m_j a_ji / 2) = lam^(sum_j d_j m_j a_ji)
        c = self.c
        return self.lam_pow(sum(c.d[j] * self.cfg.m[j] * c.a[j][i] for j in range(c.rank)))

    def neighbour(self, i, k, j, r, p, base):
        # (base - q_j^(a_ji + 2r) v_jp^2)
        c = self.c
        return base - self.lam ** (2 * c.d[j] * (c.a[j][i] + 2 * r)) * self.v[j, p] ** 2

    def vandermonde(self, i, k):
        vk = self.v[i, k] ** 2
        return _prod((vk - self.v[i, p] ** 2 for p in range(self.cfg.m[i]) if p != k), self.K.one)

    def E_terms(self, i, mutation=None):
        """[(support, coefficient, u-power)] for E_i; the zero mode drops the deltas."""
        c, cfg, K = self.c, self.cfg, self.K
        n = c.rank
        pref = self.c_alpha(i) / (self.q(i) - self.q(i, -1))
        pref = pref * _prod((self.v[i, p] for p in range(cfg.m[i])), K.one)
        for j in range(i + 1, n):
            for p in range(cfg.m[j]):
                pref = pref * self.v[j, p] ** c.a[j][i]
        if mutation == "scale-E" and i == 0:
            pref = pref * self.q(0)
        out = []
        for k in range(cfg.m[i]):
            vk2 = self.v[i, k] ** 2
            num = self.R_plus(i, vk2, drop_first=(mutation == "drop-factor" and i == 0))
            for j in range(i + 1, n):
                for r in range(1, -c.a[j][i] + 1):
                    for p in range(cfg.m[j]):
                        num = num * self.neighbour(i, k, j, r, p, vk2)
            coeff = pref * num / (vk2 * self.vandermonde(i, k))
            power = 1 if (mutation == "wrong-shift" and i == 0) else -1
            out.append((vk2, coeff, power))
        return out

    def F_terms(self, i, mutation=None):
        c, cfg, K = self.c, self.cfg, self.K
        pref = -self.q(i, -2 * cfg.m[i]) / (self.q(i) - self.q(i, -1))
        pref = pref * _prod((self.v[i, p] for p in range(cfg.m[i])), K.one)
        for j in range(i):
            for p in range(cfg.m[j]):
                pref = pref * self.v[j, p] ** c.a[j][i]
        if mutation == "sign-flip":
            pref = -pref
        out = []
        for k in range(cfg.m[i]):
            vk2 = self.v[i, k] ** 2
            sup = self.q(i, 2) * vk2
            num = self.R_minus(i, sup)
            for j in range(i):
                for r in range(1, -c.a[j][i] + 1):
                    for p in range(cfg.m[j]):
                        num = num * self.neighbour(i, k, j, r, p, sup)
            coeff = pref * num / (vk2 * self.vandermonde(i, k))
            out.append((sup, coeff, 1))
        return out

    def shift(self, i, k, power, coeff) -> SkewElement:
        return self.A.shift(f"u_{i + 1}_{k + 1}", power, coeff)


def build_qaffine(c: CartanData, cfg: RepConfig, mutation: str | None = None, assignment=None) -> GeneratorSet:
    _check_cfg(c, cfg, ("qaffine",))
    T = _Torus(c, cfg, 1, assignment)
    K, A = T.K, T.A
    n = c.rank

    def Kfun(i, var):
        x = T.P(var)
        num = T.c_alpha(i)
        for j in range(n):
            for p in range(cfg.m[j]):
                num = num * T.v[j, p] ** c.a[j][i]
        for s in range(cfg.l[i]):
            num = num * T.R_factor(i, s, x)
        for j in range(n):
            if j == i:
                continue
            for r in range(1, -c.a[j][i] + 1):
                for p in range(cfg.m[j]):
                    num = num * T.neighbour(i, None, j, r, p, x)
        den = _prod(((x - T.v[i, p] ** 2) * (x - T.q(i, 2) * T.v[i, p] ** 2) for p in range(cfg.m[i])), K.one)
        # numerator and denominator degrees in z agree
        dn, dd = (num / den).degree_in(var)
        if dn != dd:
            raise ConfigMismatch(f"K_{i + 1}(z) is not degree balanced ({dn} vs {dd})")
        return A.scalar(num / den)

    def E(i, var):
        terms = [
            DeltaTerm(((var, sup),), T.shift(i, k, power, coeff))
            for k, (sup, coeff, power) in enumerate(T.E_terms(i, mutation))
        ]
        return DeltaSeries(A, terms)

    def F(i, var):
        terms = [
            DeltaTerm(((var, sup),), T.shift(i, k, power, coeff))
            for k, (sup, coeff, power) in enumerate(T.F_terms(i, mutation))
        ]
        return DeltaSeries(A, terms)

    def const(i):
        return T.c_alpha(i)

    return GeneratorSet(
        "qaffine", c, cfg, K, A, {"K": Kfun, "E": E, "F": F, "c": const}, T.assign, mutation,
        lambda a: build_qaffine(c, cfg, mutation, a),
    )


def build_uqg(c: CartanData, cfg: RepConfig, mutation: str | None = None, assignment=None) -> GeneratorSet:
    _check_cfg(c, cfg, ("uqg",))
    lat = cfg.lattice
    if lat is None:
        raise ConfigMismatch("the uqg family needs lattice data")
    d = lat.detA
    T = _Torus(c, cfg, d, assignment)
    K, A = T.K, T.A
    n = c.rank

    def c_beta(i):
        return T.lam_pow(sum(c.d[j] * cfg.m[j] * lat.n[j][i] for j in range(n)))

    def Kbeta(i):
        coeff = c_beta(i)
        for j in range(n):
            e = d * lat.mInv[j][i]
            if e.denominator != 1:
                raise NonIntegerExponent(f"d*M_{j + 1}{i + 1} = {e} is not an integer")
            for s in range(cfg.l[j]):
                coeff = coeff * T.w[j, s] ** int(-e)
            for p in range(cfg.m[j]):
                coeff = coeff * T.v[j, p] ** lat.n[j][i]
        return A.scalar(coeff)

    def Kbeta_inv(i):
        return A.scalar(Kbeta(i).scalar_part().inverse())

    def Kalpha(i):
        coeff = K.one
        for j in range(n):
            coeff = coeff * Kbeta(j).scalar_part() ** lat.m[j][i]
        return A.scalar(coeff)

    def Kalpha_inv(i):
        return A.scalar(Kalpha(i).scalar_part().inverse())

    def E(i, var=None):
        out = A.zero()
        for k, (_, coeff, power) in enumerate(T.E_terms(i, mutation)):
            out = out + T.shift(i, k, power, coeff)
        return out

    def F(i, var=None):
        out = A.zero()
        for k, (_, coeff, power) in enumerate(T.F_terms(i, mutation)):
            out = out + T.shift(i, k, power, coeff)
        return out

    builders = {
        "Kbeta": Kbeta,
        "Kbeta_inv": Kbeta_inv,
        "K": Kalpha,
        "Kinv": Kalpha_inv,
        "E": E,
        "F": F,
        "c": c_beta,
    }
    return GeneratorSet("uqg", c, cfg, K, A, builders, T.assign, mutation, lambda a: build_uqg(c, cfg, mutation, a))


# -- modes -------------------------------------------------------------------


def extract_modes(g: GeneratorSet, which: str, i: int, n: int) -> SkewElement:
    """Mode coefficient of a generating series.

    Yangian: ``X(u) = [1 +] sum_{n>=0} X^(n) u^(-n-1)``.
    Affine: ``E(z) = sum_n E^(n) z^(-n)``; for ``K`` the coefficient of
    ``z^(-n)`` of the z^-1 expansion (n >= 0) or of ``z^(-n)`` of the z
    expansion (n <= 0, written ``K-``).
    """
    if g.family in ("yangian", "yangian-borel"):
        if n < 0:
            raise ValueError("Yangian modes start at n = 0")
        x = {"H": g.H, "E": g.E, "F": g.F}[which](i, "t")
        return x.map_coefficients(lambda f: expand(f, "t", "+", -n - 1, -n - 1).get(-n - 1, g.field.zero))
    if g.family == "qaffine":
        if which in ("K", "K+", "K-"):
            x = g.K(i, "z")
            direction = "-" if which == "K-" else "+"
            return x.map_coefficients(lambda f: expand(f, "z", direction, -n, -n).get(-n, g.field.zero))
        series = {"E": g.E, "F": g.F}[which](i, "z")
        out = g.alg.zero()
        for t in series.items():
            (_, p), = t.supports
            out = out + p**n * t.coeff
        return out
    raise ConfigMismatch(f"mode extraction is not defined for family {g.family!r}")


def zero_mode_generators(g: GeneratorSet) -> GeneratorSet:
    """U_q(g) generators K_i^(+-1), E_i^(0), F_i^(0) read off an affine set.

    The result uses the adjoint lattice, so K_beta = K_i.
    """
    if g.family != "qaffine":
        raise ConfigMismatch("zero modes are taken from a qaffine generator set")
    from .cartan import lattice_from_choice

    lat = lattice_from_choice(g.cartan, "adjoint")
    cfg = RepConfig("uqg", g.cfg.m, g.cfg.l, g.cfg.nu, g.cfg.rsplit, lat)

    def Kp(i):
        return extract_modes(g, "K+", i, 0)

    def Km(i):
        return extract_modes(g, "K-", i, 0)

    builders = {
        "Kbeta": Kp,
        "Kbeta_inv": Km,
        "K": Kp,
        "Kinv": Km,
        "E": lambda i, var=None: extract_modes(g, "E", i, 0),
        "F": lambda i, var=None: extract_modes(g, "F", i, 0),
        "c": lambda i: g.constant(i),
    }
    return GeneratorSet(
        "uqg", g.cartan, cfg, g.field, g.alg, builders, g.assignment, g.mutation,
        lambda a: zero_mode_generators(g.specialize(a)),
    )


def constant_term(g: GeneratorSet, i: int) -> tuple[RatFunc, RatFunc]:
    """(z^0 coefficient of K_i(z) expanded in z^-1, closed form c_i prod w^-1 prod v^a_ji)."""
    if g.family != "qaffine":
        raise ConfigMismatch("the constant-term identity concerns qaffine generator sets")
    K = g.field
    f = g.K(i, "z").scalar_part()
    lead = expand(f, "z", "+", 0, 0).get(0, K.zero)
    closed = g.constant(i)
    for s in range(g.cfg.l[i]):
        closed = closed / g.sym(wname(i, s))
    for j in range(g.rank):
        for p in range(g.cfg.m[j]):
            closed = closed * g.sym(vname(j, p)) ** g.cartan.a[j][i]
    return lead, closed
