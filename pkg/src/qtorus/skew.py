"""Skew (Ore) algebras of pure automorphism type.

An element is a finite sum ``f_m * S^m`` with rational-function
coefficients on the left of commuting shift monomials ``S^m``.  The shift
monoid acts on coefficients through field automorphisms ``sigma^m`` and

    (f S^m)(g S^n) = f sigma^m(g) S^(m+n).

Two actions are provided: *additive*, where ``beta_{i,k}`` moves
``gamma_{i,k}`` by ``h d_i``, and *multiplicative*, where ``u_{i,k}``
rescales ``v_{i,k}`` by ``q_i = lam**(2 d_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import MixedInstance, SubstitutionIntoShiftedSymbol
from .scalars import Field, RatFunc, ratfunc_sum, to_fmpq

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class ShiftGen:
    """One shift generator and the coefficient symbol it moves.

    ``step`` is ``h*d_i`` (additive) or the lam-exponent ``2*d_i``
    (multiplicative) per unit power.
    """

    name: str
    moves: str
    step: object


class SkewAction:
    def __init__(self, field: Field, kind: str, gens: Iterable[ShiftGen], lam_value=None):
        if kind not in ("additive", "multiplicative"):
            raise ValueError(f"unknown skew action {kind!r}")
        self.field = field
        self.kind = kind
        self.gens: tuple[ShiftGen, ...] = tuple(gens)
        self._moved_idx = tuple(field.index(g.moves) for g in self.gens)
        self.moved = frozenset(g.moves for g in self.gens)
        if kind == "multiplicative":
            self._lam = field.index("lam")
        # a specialized lam turns u_{i,k} into v -> c*v with c rational
        self.lam_value = lam_value
        self._cache: dict = {}

    def _images(self, m: Monomial):
        imgs = self._cache.get(m)
        if imgs is None:
            f = self.field
            imgs = list(f._gens)
            for e, g, i in zip(m, self.gens, self._moved_idx):
                if e:
                    imgs[i] = imgs[i] + (g.step * e).num  # step is a polynomial h*d_i
            self._cache[m] = imgs
        return imgs

    def _scale_numeric(self, p, m: Monomial):
        imgs = self._cache.get(m)
        if imgs is None:
            imgs = list(self.field._gens)
            for e, g, i in zip(m, self.gens, self._moved_idx):
                if e:
                    imgs[i] = imgs[i] * to_fmpq(self.lam_value ** (g.step * e))
            self._cache[m] = imgs
        return p.compose(*imgs)

    def _scale(self, p, m: Monomial):
        """sigma^m(p) = P / lam**k for polynomial p (multiplicative case)."""
        weights = [(i, g.step * e) for e, g, i in zip(m, self.gens, self._moved_idx) if e]
        if not weights or p.is_constant():
            return p, 0
        degs = p.degrees()
        weights = [(i, w) for i, w in weights if degs[i]]
        if not weights:
            return p, 0
        if all(w > 0 for _, w in weights):
            imgs = list(self.field._gens)
            lam = imgs[self._lam]
            for i, w in weights:
                imgs[i] = imgs[i] * lam**w
            return p.compose(*imgs), 0
        lam = self._lam
        terms = []
        lo = 0
        for exps, c in p.to_dict().items():
            s = sum(w * exps[i] for i, w in weights)
            lo = min(lo, exps[lam] + s)
            terms.append((exps, s, c))
        out = {}
        for exps, s, c in terms:
            e = list(exps)
            e[lam] += s - lo
            out[tuple(e)] = c
        return self.field.ctx.from_dict(out), -lo

    def act(self, f: RatFunc, m: Monomial) -> RatFunc:
        """sigma^m(f)."""
        if not any(m) or f.is_constant():
            return f
        if self.kind == "additive":
            imgs = self._images(m)
            return RatFunc(self.field, f.num.compose(*imgs), f.den.compose(*imgs))
        if self.lam_value is not None:
            return RatFunc(self.field, self._scale_numeric(f.num, m), self._scale_numeric(f.den, m))
        num, a = self._scale(f.num, m)
        den, b = self._scale(f.den, m)
        lam = self.field._gens[self._lam]
        if b > a:
            num = num * lam ** (b - a)
        elif a > b:
            den = den * lam ** (a - b)
        return RatFunc(self.field, num, den)


class SkewAlgebra:
    """A skew algebra instance: coefficient field + shift generators + action."""

    def __init__(self, field: Field, kind: str, gens: Iterable[ShiftGen], lam_value=None):
        self.field = field
        self.action = SkewAction(field, kind, gens, lam_value)
        self.kind = kind
        self.gens = self.action.gens
        self.nshifts = len(self.gens)
        self.identity: Monomial = (0,) * self.nshifts
        self._gen_index = {g.name: k for k, g in enumerate(self.gens)}

    def __repr__(self):
        return f"SkewAlgebra({self.kind}, shifts={[g.name for g in self.gens]})"

    def shift_index(self, name: str) -> int:
        return self._gen_index[name]

    def element(self, terms: Mapping[Monomial, RatFunc] | None = None) -> "SkewElement":
        return SkewElement(self, dict(terms or {}))

    def scalar(self, f) -> "SkewElement":
        return SkewElement(self, {self.identity: self.field(f)})

    def shift(self, name: str, power: int = 1, coeff=1) -> "SkewElement":
        """``coeff * S_name**power``."""
        e = [0] * self.nshifts
        e[self.shift_index(name)] = power
        return SkewElement(self, {tuple(e): self.field(coeff)})

    def zero(self) -> "SkewElement":
        return SkewElement(self, {})

    def one(self) -> "SkewElement":
        return self.scalar(1)


def _add_mono(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class SkewElement:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: SkewAlgebra, terms: dict):
        self.alg = alg
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}

    # -- helpers -------------------------------------------------------

    def _coerce(self, other) -> "SkewElement":
        if isinstance(other, SkewElement):
            if other.alg is not self.alg:
                raise MixedInstance("operands come from different skew algebras")
            return other
        return self.alg.scalar(other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def support(self) -> set[Monomial]:
        return set(self.terms)

    def coefficient(self, m: Monomial) -> RatFunc:
        return self.terms.get(tuple(m), self.alg.field.zero)

    def is_scalar(self) -> bool:
        return all(not any(m) for m in self.terms)

    def scalar_part(self) -> RatFunc:
        return self.coefficient(self.alg.identity)

    def map_coefficients(self, fn) -> "SkewElement":
        return SkewElement(self.alg, {m: fn(c) for m, c in self.terms.items()})

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out[m] + c if m in out else c
        return SkewElement(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return SkewElement(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SkewElement):
            # right multiplication by a scalar moves it through the shifts
            f = self.alg.field(other)
            act = self.alg.action.act
            return SkewElement(self.alg, {m: c * act(f, m) for m, c in self.terms.items()})
        o = self._coerce(other)
        act = self.alg.action.act
        acc: dict[Monomial, list[RatFunc]] = {}
        for m, f in self.terms.items():
            for n, g in o.terms.items():
                acc.setdefault(_add_mono(m, n), []).append(f * act(g, m))
        field = self.alg.field
        return SkewElement(self.alg, {k: v[0] if len(v) == 1 else ratfunc_sum(v, field) for k, v in acc.items()})

    def __rmul__(self, other):
        f = self.alg.field(other)
        return SkewElement(self.alg, {m: f * c for m, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of skew elements are not supported; use inverse_monomial")
        out = self.alg.one()
        for _ in range(n):
            out = out * self
        return out

    def inverse_monomial(self) -> "SkewElement":
        """Inverse of a single term ``f S^m``: ``S^-m f^-1 = sigma^-m(1/f) S^-m``."""
        if len(self.terms) != 1:
            raise ValueError("only single-term elements are invertible here")
        (m, f), = self.terms.items()
        neg = tuple(-x for x in m)
        return SkewElement(self.alg, {neg: self.alg.action.act(f.inverse(), neg)})

    def __eq__(self, other):
        if not isinstance(other, SkewElement):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return skew_eq(self, other)

    __hash__ = None

    # -- substitution --------------------------------------------------

    def substitute_central(self, var: str, value) -> "SkewElement":
        value = self.alg.field(value)
        if var in self.alg.action.moved and any(any(m) for m in self.terms):
            raise SubstitutionIntoShiftedSymbol(f"{var} is moved by the shift action and the element has shift parts")
        return SkewElement(self.alg, {m: c.substitute(var, value) for m, c in self.terms.items()})

    def specialize(self, assignment) -> "SkewElement":
        return SkewElement(self.alg, {m: c.specialize(assignment) for m, c in self.terms.items()})

    # -- display -------------------------------------------------------

    def monomial_str(self, m: Monomial) -> str:
        parts = []
        for e, g in zip(m, self.alg.gens):
            if e == 1:
                parts.append(g.name)
            elif e:
                parts.append(f"{g.name}^{e}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for m in sorted(self.terms):
            c = str(self.terms[m])
            mono = self.monomial_str(m)
            if not mono:
                out.append(c)
            else:
                out.append(f"({c})*{mono}" if c != "1" else mono)
        return " + ".join(out)

    def __repr__(self):
        return f"SkewElement({self})"

    def to_json(self) -> list:
        return [
            {"shift": list(m), "shift_str": self.monomial_str(m), "coeff": str(self.terms[m])}
            for m in sorted(self.terms)
        ]


def skew_eq(x: SkewElement, y: SkewElement) -> bool:
    if x.alg is not y.alg:
        raise MixedInstance("operands come from different skew algebras")
    if x.terms.keys() != y.terms.keys():
        return False
    return all(x.terms[m] == y.terms[m] for m in x.terms)


def commutator(x: SkewElement, y: SkewElement) -> SkewElement:
    return x * y - y * x


def anticommutator(x: SkewElement, y: SkewElement) -> SkewElement:
    return x * y + y * x


def skew_sum(items: Iterable[SkewElement], alg: SkewAlgebra) -> SkewElement:
    acc: dict[Monomial, list[RatFunc]] = {}
    for x in items:
        if x.alg is not alg:
            raise MixedInstance("operands come from different skew algebras")
        for m, c in x.terms.items():
            acc.setdefault(m, []).append(c)
    return SkewElement(alg, {m: v[0] if len(v) == 1 else ratfunc_sum(v, alg.field) for m, v in acc.items()})
