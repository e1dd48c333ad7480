"""Spectral-parameter layer: delta calculus, partial fractions, mode expansion.

A :class:`DeltaSeries` is a finite sum of

    delta(z_1/p_1) ... delta(z_k/p_k) * c

with ``c`` a skew element free of ``z_1..z_k``, plus a delta-free regular
part.  Supports ``p`` are free of spectral symbols.  ``delta(z/p) delta(w/p)``
is the same distribution as ``delta(z/w) delta(w/p)``, so keeping one support
per spectral variable is a normal form for the products we need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    DegenerateDenominator,
    MixedInstance,
    NonLinearFactor,
    NonSimplePole,
    PoleOnSupport,
)
from .scalars import RatFunc, ratfunc_sum
from .skew import SkewAlgebra, SkewElement, skew_sum

Supports = tuple[tuple[str, RatFunc], ...]


def _skey(supports: Supports) -> tuple:
    return tuple((v, p.key()) for v, p in supports)


@dataclass(frozen=True)
class DeltaTerm:
    supports: Supports
    coeff: SkewElement

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.supports)


class DeltaSeries:
    """Finite sum of delta-supported terms with skew coefficients plus a regular part."""

    __slots__ = ("alg", "terms", "regular")

    def __init__(self, alg: SkewAlgebra, terms: Mapping | Iterable = (), regular: SkewElement | None = None):
        self.alg = alg
        self.regular = regular if regular is not None else alg.zero()
        if regular is not None and regular.alg is not alg:
            raise MixedInstance("regular part from another skew algebra")
        self.terms: dict[tuple, DeltaTerm] = {}
        items = terms.values() if isinstance(terms, Mapping) else terms
        for t in items:
            self._accumulate(t)

    def _accumulate(self, t: DeltaTerm):
        if t.coeff.is_zero():
            return
        k = _skey(t.supports)
        if k in self.terms:
            c = self.terms[k].coeff + t.coeff
            if c.is_zero():
                del self.terms[k]
            else:
                self.terms[k] = DeltaTerm(self.terms[k].supports, c)
        else:
            self.terms[k] = t

    # -- constructors --------------------------------------------------

    @classmethod
    def delta(cls, alg: SkewAlgebra, var: str, support: RatFunc, coeff: SkewElement) -> "DeltaSeries":
        t = _make_term(((var, support),), coeff)
        return cls(alg, [t])

    @classmethod
    def regular_only(cls, x: SkewElement) -> "DeltaSeries":
        return cls(x.alg, (), x)

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms and self.regular.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __len__(self):
        return len(self.terms)

    def items(self):
        return list(self.terms.values())

    # -- linear structure ---------------------------------------------

    def _coerce(self, other) -> "DeltaSeries":
        if isinstance(other, DeltaSeries):
            if other.alg is not self.alg:
                raise MixedInstance("operands come from different skew algebras")
            return other
        if isinstance(other, SkewElement):
            return DeltaSeries.regular_only(other)
        return DeltaSeries.regular_only(self.alg.scalar(other))

    def __add__(self, other):
        o = self._coerce(other)
        groups: dict[tuple, list] = {}
        for src in (self, o):
            for k, t in src.terms.items():
                groups.setdefault(k, [t.supports, []])[1].append(t.coeff)
        terms = [DeltaTerm(s, skew_sum(cs, self.alg)) for s, cs in groups.values()]
        return DeltaSeries(self.alg, terms, self.regular + o.regular)

    __radd__ = __add__

    def __neg__(self):
        return DeltaSeries(self.alg, [DeltaTerm(t.supports, -t.coeff) for t in self.terms.values()], -self.regular)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return delta_mul(self, self._coerce(other))

    def __rmul__(self, other):
        return delta_mul(self._coerce(other), self)

    def __eq__(self, other):
        if not isinstance(other, (DeltaSeries, SkewElement)):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def map_coefficients(self, fn) -> "DeltaSeries":
        terms = [
            DeltaTerm(tuple((v, fn(p)) for v, p in t.supports), t.coeff.map_coefficients(fn))
            for t in self.terms.values()
        ]
        return DeltaSeries(self.alg, terms, self.regular.map_coefficients(fn))

    def specialize(self, assignment) -> "DeltaSeries":
        return self.map_coefficients(lambda c: c.specialize(assignment))

    # -- display -------------------------------------------------------

    def __str__(self):
        parts = []
        for t in self.terms.values():
            merged = _display_supports(t.supports)
            parts.append(f"{merged}*[{t.coeff}]")
        if not self.regular.is_zero():
            parts.append(f"[{self.regular}]")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"DeltaSeries({self})"

    def to_json(self) -> dict:
        return {
            "terms": [
                {"supports": {v: str(p) for v, p in t.supports}, "coeff": t.coeff.to_json()}
                for t in self.terms.values()
            ],
            "regular": self.regular.to_json(),
        }


def _display_supports(supports: Supports) -> str:
    """Render equal supports as delta(z/w) delta(w/p)."""
    out = []
    seen: dict[tuple, str] = {}
    for v, p in supports:
        k = p.key()
        if k in seen:
            out.append(f"delta({v}/{seen[k]})")
        else:
            seen[k] = v
            out.append(f"delta({v}/({p}))")
    return "*".join(out)


def _make_term(supports: Supports, coeff: SkewElement) -> DeltaTerm:
    """Sort supports by variable and push the substitution into ``coeff``."""
    supports = tuple(sorted(supports, key=lambda s: s[0]))
    names = [v for v, _ in supports]
    if len(set(names)) != len(names):
        raise NotImplementedError("products of two deltas in the same spectral variable")
    for v, p in supports:
        try:
            coeff = coeff.map_coefficients(lambda c, v=v, p=p: c.substitute(v, p))
        except DegenerateDenominator as exc:
            raise PoleOnSupport(f"coefficient has a pole on the support {v} = {p}") from exc
    return DeltaTerm(supports, coeff)


def _split_monomials(x: SkewElement):
    for m, f in x.terms.items():
        yield m, SkewElement(x.alg, {m: f})


def delta_mul(x: DeltaSeries, y: DeltaSeries) -> DeltaSeries:
    """Normal-ordered product; shifts are pushed through supports first.

    ``S^m delta(w/r) = delta(w/sigma^m(r)) S^m``.
    """
    if x.alg is not y.alg:
        raise MixedInstance("operands come from different skew algebras")
    alg = x.alg
    act = alg.action.act
    xs = [((), x.regular)] + [(t.supports, t.coeff) for t in x.terms.values()]
    ys = [((), y.regular)] + [(t.supports, t.coeff) for t in y.terms.values()]
    groups: dict[tuple, list] = {}
    regular = []
    for sx, cx in xs:
        if cx.is_zero():
            continue
        for sy, cy in ys:
            if cy.is_zero():
                continue
            if not sy:
                prod = cx * cy
                if sx:
                    t = _make_term(sx, prod)
                    groups.setdefault(_skey(t.supports), [t.supports, []])[1].append(t.coeff)
                else:
                    regular.append(prod)
                continue
            for m, piece in _split_monomials(cx):
                moved = tuple((v, act(p, m)) for v, p in sy)
                t = _make_term(sx + moved, piece * cy)
                groups.setdefault(_skey(t.supports), [t.supports, []])[1].append(t.coeff)
    terms = [DeltaTerm(s, skew_sum(cs, alg)) for s, cs in groups.values()]
    return DeltaSeries(alg, terms, skew_sum(regular, alg))


def delta_apply_function(f: SkewElement, t: DeltaTerm) -> DeltaSeries:
    """f(z) delta(z/p) = f(p) delta(z/p)."""
    return delta_mul(DeltaSeries.regular_only(f), DeltaSeries(f.alg, [t]))


def delta_substitute(x: DeltaSeries, var: str, support: RatFunc) -> DeltaSeries:
    """Multiply by delta(var/support) on the left; used for delta(z/w) on the RHS."""
    return delta_mul(DeltaSeries.delta(x.alg, var, support, x.alg.one()), x)


# -- partial fractions ---------------------------------------------------


def _z_coeffs(field, p, i: int) -> dict[int, object]:
    """Coefficients of p as a polynomial in generator i."""
    buckets: dict[int, dict] = {}
    for exps, c in p.to_dict().items():
        e = list(exps)
        j = e[i]
        e[i] = 0
        buckets.setdefault(j, {})[tuple(e)] = c
    return {j: field.ctx.from_dict(t) for j, t in buckets.items()}


def partial_fractions(f: RatFunc, zvar: str):
    """Decompose ``f`` as polynomial part + sum residue/(z - pole).

    Returns ``(poles, polynomial_part)`` with ``poles`` a list of
    ``(support, residue)``.  The denominator must split over the symbol
    field into distinct linear factors in ``zvar``.
    """
    field = f.field
    i = field.index(zvar)
    z = field.gen(zvar)
    if f.den.degrees()[i] == 0:
        return [], f
    _, factors = f.den.factor()
    poles = []
    dden = f.den.derivative(zvar)
    for fac, mult in factors:
        deg = fac.degrees()[i]
        if deg == 0:
            continue
        if deg > 1:
            raise NonLinearFactor(f"factor {fac} of the denominator is not linear in {zvar}")
        if mult > 1:
            raise NonSimplePole(f"factor {fac} occurs with multiplicity {mult}")
        cs = _z_coeffs(field, fac, i)
        p = -field.poly(cs.get(0, field.ctx.constant(0))) / field.poly(cs[1])
        res = field.poly(f.num).substitute(zvar, p) / field.poly(dden).substitute(zvar, p)
        poles.append((p, res))
    poles.sort(key=lambda pr: str(pr[0]))
    rest = f - ratfunc_sum((r / (z - p) for p, r in poles), field)
    if rest.den.degrees()[i] != 0:
        raise NonLinearFactor("denominator does not split into linear factors in " + zvar)
    return poles, rest


def expansion_difference(K: SkewElement, zvar: str) -> DeltaSeries:
    """(expansion in z^-1) - (expansion in z) of K as residue-weighted deltas.

    1/(z - p) contributes p^-1 delta(z/p); a pole at z = 0 has identical
    expansions on both sides and contributes nothing.
    """
    alg = K.alg
    out = []
    for m, f in K.terms.items():
        poles, _ = partial_fractions(f, zvar)
        for p, res in poles:
            if p.is_zero():
                continue
            coeff = SkewElement(alg, {m: res / p})
            out.append(_make_term(((zvar, p),), coeff))
    return DeltaSeries(alg, out)


# -- Laurent expansions and truncated modes -------------------------------


def expand(f: RatFunc, var: str, direction: str, lo: int, hi: int) -> dict[int, RatFunc]:
    """Coefficients of var**e, lo <= e <= hi, of the expansion of f.

    direction '+' expands in var**-1 (around infinity), '-' in var (around 0).
    """
    field = f.field
    i = field.index(var)
    if f.num.degrees()[i] == 0 and f.den.degrees()[i] == 0:
        return {0: f} if lo <= 0 <= hi and not f.is_zero() else {}
    A = _z_coeffs(field, f.num, i)
    B = _z_coeffs(field, f.den, i)
    zero = field.ctx.constant(0)
    if direction == "+":
        a, b = max(A), max(B)
        at = [A.get(a - k, zero) for k in range(a + 1)]  # coefficients in t = 1/var
        bt = [B.get(b - k, zero) for k in range(b + 1)]
        top = a - b  # f = var**top * (at/bt)(1/var)
        nmax = top - lo
        if nmax < 0:
            return {}
        series = _series_div(field, at, bt, nmax)
        return {top - n: c for n, c in enumerate(series) if lo <= top - n <= hi and not c.is_zero()}
    if direction == "-":
        va = min(A)
        vb = min(B)
        an = [A.get(va + k, zero) for k in range(max(A) - va + 1)]
        bn = [B.get(vb + k, zero) for k in range(max(B) - vb + 1)]
        base = va - vb
        nmax = hi - base
        if nmax < 0:
            return {}
        series = _series_div(field, an, bn, nmax)
        return {base + n: c for n, c in enumerate(series) if lo <= base + n <= hi and not c.is_zero()}
    raise ValueError(f"direction must be '+' or '-', got {direction!r}")


def _series_div(field, a: Sequence, b: Sequence, nmax: int) -> list[RatFunc]:
    inv_b0 = field.poly(b[0]).inverse()
    bs = [field.poly(x) for x in b]
    out = []
    for n in range(nmax + 1):
        acc = field.poly(a[n]) if n < len(a) else field.zero
        terms = [acc] + [-(bs[k] * out[n - k]) for k in range(1, min(n, len(bs) - 1) + 1)]
        out.append(ratfunc_sum(terms, field) * inv_b0)
    return out


Mode = tuple[int, ...]


def truncated_modes(
    x: DeltaSeries | SkewElement,
    variables: Sequence[str],
    N: int,
    directions: Mapping[str, str] | None = None,
) -> dict[Mode, SkewElement]:
    """Coefficients of prod var**e over |e| <= N (keys follow ``variables``).

    delta(z/p) = sum_n z**n p**-n; spectral dependence of coefficients and of
    the regular part is expanded in ``directions[var]`` ('+' default).
    """
    if N < 1:
        raise ValueError("truncation N must be >= 1")
    if isinstance(x, SkewElement):
        x = DeltaSeries.regular_only(x)
    alg = x.alg
    directions = dict(directions or {})
    acc: dict[Mode, list[SkewElement]] = {}
    pieces = [((), x.regular)] + [(t.supports, t.coeff) for t in x.terms.values()]
    for supports, coeff in pieces:
        if coeff.is_zero():
            continue
        sup = dict(supports)
        for m, f in coeff.terms.items():
            # expand the coefficient in each non-delta variable
            partial: dict[Mode, RatFunc] = {(): f}
            for var in variables:
                nxt: dict[Mode, RatFunc] = {}
                if var in sup:
                    pinv = sup[var].inverse()
                    for key, c in partial.items():
                        if not c.free_of(var):
                            raise ValueError(f"coefficient still depends on {var} under delta")
                        for e in range(-N, N + 1):
                            nxt[key + (e,)] = c * pinv**e
                else:
                    for key, c in partial.items():
                        for e, ce in expand(c, var, directions.get(var, "+"), -N, N).items():
                            nxt[key + (e,)] = ce
                partial = nxt
            for key, c in partial.items():
                acc.setdefault(key, []).append(SkewElement(alg, {m: c}))
    out = {}
    for key, items in acc.items():
        s = skew_sum(items, alg)
        if not s.is_zero():
            out[key] = s
    return out
