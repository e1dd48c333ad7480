"""Exact coefficient field: multivariate rational functions over Q.

Polynomials are FLINT sparse multivariate polynomials (``fmpq_mpoly``).
Negative powers of the Laurent symbols (``lam``, torus ``v``/``w``) are
carried by the denominator, so ``num``/``den`` always have non-negative
exponents.  The adjoined roots ``s2``, ``s3`` are ordinary generators
rewritten by ``s_d**2 -> d`` and kept out of denominators; with that
restriction the reduced fraction is a canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import flint

from .errors import DegenerateDenominator, EvalPole

SYMBOL_KINDS = frozenset(
    {"lambda", "hbar", "gamma", "nu", "nu+", "nu-", "w", "v", "spectral", "sqrt"}
)

_SURD_VALUE = {"s2": 2, "s3": 3}
_SCALAR_TYPES = (int, Fraction, flint.fmpq)  # RatFunc appended below


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    index: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in SYMBOL_KINDS:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "sqrt" and self.name not in _SURD_VALUE:
            raise ValueError(f"sqrt symbols are s2 and s3, got {self.name!r}")


def to_fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return flint.fmpq(x)
    if isinstance(x, str):
        f = Fraction(x)
        return flint.fmpq(f.numerator, f.denominator)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def to_fraction(x: flint.fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


class Field:
    """Frozen symbol table plus the polynomial context built from it.

    Every symbol is declared once, up front; the variable order is the
    declaration order.
    """

    def __init__(self, symbols: Sequence[Symbol]):
        names = [s.name for s in symbols]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"symbols declared twice: {dup}")
        if not names:
            raise ValueError("a field needs at least one symbol")
        self.symbols: tuple[Symbol, ...] = tuple(symbols)
        self.names: tuple[str, ...] = tuple(names)
        self._index = {n: i for i, n in enumerate(names)}
        self._by_name = {s.name: s for s in symbols}
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "degrevlex")
        self.nvars = len(names)
        self._gens = self.ctx.gens()
        # (index, d) for each adjoined square root
        self.surds: tuple[tuple[int, int], ...] = tuple(
            (self._index[s.name], _SURD_VALUE[s.name]) for s in symbols if s.kind == "sqrt"
        )
        self.zero = RatFunc(self, self.ctx.constant(0), self.ctx.constant(1), False)
        self.one = RatFunc(self, self.ctx.constant(1), self.ctx.constant(1), False)

    def __repr__(self):
        return f"Field({', '.join(self.names)})"

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"symbol {name!r} is not declared in this field") from None

    def symbol(self, name: str) -> Symbol:
        return self._by_name[name]

    def by_kind(self, *kinds: str) -> list[Symbol]:
        return [s for s in self.symbols if s.kind in kinds]

    def gen(self, name: str) -> "RatFunc":
        return RatFunc(self, self._gens[self.index(name)], self.ctx.constant(1), False)

    def __call__(self, value) -> "RatFunc":
        """Coerce an int / Fraction / fmpq / symbol name / RatFunc."""
        if isinstance(value, RatFunc):
            if value.field is not self:
                raise ValueError("RatFunc belongs to a different field")
            return value
        if isinstance(value, str) and value in self._index:
            return self.gen(value)
        return RatFunc(self, self.ctx.constant(to_fmpq(value)), self.ctx.constant(1), False)

    def monomial(self, exps: Mapping[str, int], coeff=1) -> "RatFunc":
        """Laurent monomial ``coeff * prod name**e`` (negative e allowed)."""
        up = [0] * self.nvars
        down = [0] * self.nvars
        for name, e in exps.items():
            (up if e >= 0 else down)[self.index(name)] += abs(e)
        num = self.ctx.term(exp_vec=tuple(up), coeff=to_fmpq(coeff))
        den = self.ctx.term(exp_vec=tuple(down), coeff=flint.fmpq(1))
        return RatFunc(self, num, den)

    def poly(self, p) -> "RatFunc":
        return RatFunc(self, p, self.ctx.constant(1))

    # -- surd handling -------------------------------------------------

    def reduce_surds(self, p):
        """Rewrite ``s_d**2 -> d`` termwise."""
        if not self.surds:
            return p
        degs = p.degrees()
        if all(degs[i] < 2 for i, _ in self.surds):
            return p
        out: dict[tuple, flint.fmpq] = {}
        for exps, c in p.to_dict().items():
            e = list(exps)
            for i, d in self.surds:
                if e[i] >= 2:
                    c = c * flint.fmpq(d) ** (e[i] // 2)
                    e[i] %= 2
            k = tuple(e)
            out[k] = out.get(k, 0) + c
        return self.ctx.from_dict({k: v for k, v in out.items() if v != 0})

    def surd_conjugate(self, p, i: int):
        """Image of ``p`` under ``s -> -s`` for the surd generator at index ``i``."""
        images = list(self._gens)
        images[i] = -images[i]
        return p.compose(*images)

    def has_surd(self, p) -> bool:
        if not self.surds:
            return False
        degs = p.degrees()
        return any(degs[i] > 0 for i, _ in self.surds)


class Surd:
    """Element ``a + b*sqrt2 + c*sqrt3 + d*sqrt6`` of Q(sqrt2, sqrt3)."""

    __slots__ = ("c",)

    def __init__(self, a=0, b=0, c=0, d=0):
        self.c = (Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    @classmethod
    def coerce(cls, x) -> "Surd":
        return x if isinstance(x, Surd) else cls(x)

    def __repr__(self):
        return "Surd(%s, %s, %s, %s)" % self.c

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Surd(other)
        if not isinstance(other, Surd):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c[0]) if self.is_rational() else hash(self.c)

    def __add__(self, other):
        o = Surd.coerce(other)
        return Surd(*(x + y for x, y in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return Surd(*(-x for x in self.c))

    def __sub__(self, other):
        if not isinstance(other, _SURD_OPERANDS):
            return NotImplemented
        return self + (-Surd.coerce(other))

    def __rsub__(self, other):
        if not isinstance(other, _SURD_OPERANDS):
            return NotImplemented
        return Surd.coerce(other) - self

    def __mul__(self, other):
        a, b, c, d = self.c
        e, f, g, h = Surd.coerce(other).c
        return Surd(
            a * e + 2 * b * f + 3 * c * g + 6 * d * h,
            a * f + b * e + 3 * (c * h + d * g),
            a * g + c * e + 2 * (b * h + d * f),
            a * h + d * e + b * g + c * f,
        )

    __rmul__ = __mul__

    def _conj2(self):
        a, b, c, d = self.c
        return Surd(a, -b, c, -d)

    def _conj3(self):
        a, b, c, d = self.c
        return Surd(a, b, -c, -d)

    def inverse(self) -> "Surd":
        if not any(self.c):
            raise ZeroDivisionError("inverse of zero in Q(sqrt2, sqrt3)")
        t = self * self._conj3()  # sqrt3-free
        n = t * t._conj2()  # rational
        return self._conj3() * t._conj2() * Surd(1 / n.c[0])

    def __truediv__(self, other):
        if not isinstance(other, _SURD_OPERANDS):
            return NotImplemented
        return self * Surd.coerce(other).inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, _SURD_OPERANDS):
            return NotImplemented
        return Surd.coerce(other) * self.inverse()

    def __complex__(self):
        a, b, c, d = (float(x) for x in self.c)
        return complex(a + b * 2**0.5 + c * 3**0.5 + d * 6**0.5)

    def __float__(self):
        return complex(self).real


_SURD_OPERANDS = (int, Fraction, Surd)


class RatFunc:
    """Reduced fraction ``num/den`` of polynomials over Q.

    Canonical: gcd(num, den) = 1, leading coefficient of ``den`` is 1,
    no surd generator in ``den`` and surd exponents in {0, 1}.
    Instances are immutable.
    """

    __slots__ = ("field", "num", "den", "_key")

    def __init__(self, field: Field, num, den, normalize: bool = True):
        self.field = field
        self._key = None
        if normalize:
            num, den = _canonical(field, num, den)
        self.num = num
        self.den = den

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return to_fraction(self.num.leading_coefficient() if not self.num.is_zero() else flint.fmpq(0)) / to_fraction(
            self.den.leading_coefficient()
        )

    def is_monomial(self) -> bool:
        """True for nonzero ``c * prod x**e`` with integer (possibly negative) e."""
        return len(self.num) == 1 and len(self.den) == 1

    def monomial_exponents(self) -> tuple[Fraction, tuple[int, ...]]:
        if not self.is_monomial():
            raise ValueError(f"{self} is not a Laurent monomial")
        (en, cn), = self.num.terms()
        (ed, cd), = self.den.terms()
        return to_fraction(cn) / to_fraction(cd), tuple(a - b for a, b in zip(en, ed))

    def variables(self) -> set[str]:
        dn = self.num.degrees()
        dd = self.den.degrees()
        return {n for n, a, b in zip(self.field.names, dn, dd) if a or b}

    def free_of(self, name: str) -> bool:
        i = self.field.index(name)
        return self.num.degrees()[i] == 0 and self.den.degrees()[i] == 0

    def degree_in(self, name: str) -> tuple[int, int]:
        i = self.field.index(name)
        return self.num.degrees()[i], self.den.degrees()[i]

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.field is not self.field:
                raise ValueError("operands live in different fields")
            return other
        return self.field(other)

    def __add__(self, other):
        if not isinstance(other, _SCALAR_TYPES):
            return NotImplemented
        o = self._coerce(other)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return RatFunc(self.field, self.num + o.num, self.den)
        g = self.den.gcd(o.den)
        a, b = self.den / g, o.den / g
        return RatFunc(self.field, self.num * b + o.num * a, self.den * b)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.field, -self.num, self.den, False)

    def __sub__(self, other):
        if not isinstance(other, _SCALAR_TYPES):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        if not isinstance(other, _SCALAR_TYPES):
            return NotImplemented
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, _SCALAR_TYPES):
            return NotImplemented
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return self.field.zero
        f = self.field
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        num = (self.num / g1) * (o.num / g2)
        den = (self.den / g2) * (o.den / g1)
        if f.surds and f.has_surd(num):
            return RatFunc(f, num, den)
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RatFunc(f, num, den, False)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise DegenerateDenominator("division by the zero rational function")
        return RatFunc(self.field, self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, _SCALAR_TYPES):
            return NotImplemented
        o = self._coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, _SCALAR_TYPES):
            return NotImplemented
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self.field.one
        num, den = self.num**n, self.den**n
        if self.field.surds:
            return RatFunc(self.field, num, den)
        return RatFunc(self.field, num, den, False)

    # -- comparison ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, (int, Fraction, flint.fmpq)):
                other = self.field(other)
            else:
                return NotImplemented
        return self.field is other.field and self.num == other.num and self.den == other.den

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                tuple(sorted((e, (int(c.p), int(c.q))) for e, c in self.num.to_dict().items())),
                tuple(sorted((e, (int(c.p), int(c.q))) for e, c in self.den.to_dict().items())),
            )
        return self._key

    def __hash__(self):
        return hash(self.key())

    # -- substitution / evaluation ------------------------------------

    def substitute(self, name: str, value: "RatFunc") -> "RatFunc":
        """Replace the symbol ``name`` by the rational function ``value``."""
        value = self._coerce(value)
        i = self.field.index(name)
        if self.num.degrees()[i] == 0 and self.den.degrees()[i] == 0:
            return self
        na, ka = _compose_rational(self.field, self.num, i, value.num, value.den)
        nb, kb = _compose_rational(self.field, self.den, i, value.num, value.den)
        if nb.is_zero():
            raise DegenerateDenominator(f"denominator of {self} vanishes at {name} = {value}")
        if kb >= ka:
            na = na * value.den ** (kb - ka)
        else:
            nb = nb * value.den ** (ka - kb)
        return RatFunc(self.field, na, nb)

    def substitute_many(self, values: Mapping[str, "RatFunc"]) -> "RatFunc":
        out = self
        for name, val in values.items():
            out = out.substitute(name, val)
        return out

    def specialize(self, assignment: Mapping[str, object]) -> "RatFunc":
        """Substitute rational constants for a subset of the symbols."""
        vals = {k: to_fmpq(v) for k, v in assignment.items() if k in self.field and k not in _SURD_VALUE}
        if not vals:
            return self
        den = self.den.subs(vals)
        if den.is_zero():
            raise EvalPole(f"denominator of {self} vanishes at {assignment}")
        return RatFunc(self.field, self.num.subs(vals), den)

    def evaluate(self, assignment: Mapping[str, object]):
        """Exact value at a point; ``Fraction`` or ``Surd`` if s2/s3 survive."""
        missing = self.variables() - set(assignment) - {"s2", "s3"}
        if missing:
            raise ValueError(f"assignment misses symbols {sorted(missing)}")
        vals = {k: to_fmpq(v) for k, v in assignment.items() if k in self.field and k not in _SURD_VALUE}
        den = self.den.subs(vals) if vals else self.den
        if den.is_zero():
            raise EvalPole(f"denominator of {self} vanishes at the sample point")
        dval = to_fraction(den.leading_coefficient())
        num = self.num.subs(vals) if vals else self.num
        if not self.field.has_surd(num):
            return (to_fraction(num.leading_coefficient()) if not num.is_zero() else Fraction(0)) / dval
        parts = [Fraction(0)] * 4
        i2 = self.field.index("s2") if "s2" in self.field else None
        i3 = self.field.index("s3") if "s3" in self.field else None
        for exps, c in num.to_dict().items():
            e2 = exps[i2] if i2 is not None else 0
            e3 = exps[i3] if i3 is not None else 0
            parts[e2 + 2 * e3] += to_fraction(c)
        return Surd(*parts) / Surd(dval)

    def evaluate_complex(self, values: Mapping[str, complex]) -> tuple[complex, complex]:
        """Floating evaluation of (num, den) at complex values."""
        names = self.field.names
        full = dict(values)
        full.setdefault("s2", 2**0.5)
        full.setdefault("s3", 3**0.5)
        return _eval_poly_complex(self.num, names, full), _eval_poly_complex(self.den, names, full)

    # -- display -------------------------------------------------------

    def __str__(self):
        n = self.num.str() if hasattr(self.num, "str") else str(self.num)
        if self.den.is_one():
            return n
        d = str(self.den)
        if len(self.num) > 1:
            n = f"({n})"
        if len(self.den) > 1 or "*" in d:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatFunc({self})"


_SCALAR_TYPES = _SCALAR_TYPES + (RatFunc,)


def _canonical(field: Field, num, den):
    if den.is_zero():
        raise DegenerateDenominator("zero denominator")
    if num.is_zero():
        return field.ctx.constant(0), field.ctx.constant(1)
    if field.surds:
        for i, _ in field.surds:
            if den.degrees()[i] > 0:
                conj = field.surd_conjugate(den, i)
                num = num * conj
                den = field.reduce_surds(den * conj)
        num = field.reduce_surds(num)
        den = field.reduce_surds(den)
        if num.is_zero():
            return field.ctx.constant(0), field.ctx.constant(1)
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _compose_rational(field: Field, p, i: int, vn, vd):
    """Return (P_h, k) with P(x_i = vn/vd) = P_h / vd**k, k = deg_{x_i} P."""
    k = p.degrees()[i]
    if k == 0:
        return p, 0
    ctx = field.ctx
    if vd.is_one():
        images = list(field._gens)
        images[i] = vn
        return p.compose(*images), 0
    buckets: dict[int, dict] = {}
    for exps, c in p.to_dict().items():
        e = list(exps)
        j = e[i]
        e[i] = 0
        buckets.setdefault(j, {})[tuple(e)] = c
    out = ctx.constant(0)
    for j, terms in buckets.items():
        out += ctx.from_dict(terms) * vn**j * vd ** (k - j)
    return out, k


def _eval_poly_complex(p, names: Sequence[str], values: Mapping[str, complex]) -> complex:
    total = 0j
    for exps, c in p.terms():
        t = complex(float(to_fraction(c)))
        for name, e in zip(names, exps):
            if e:
                t *= values[name] ** int(e)
        total += t
    return total


def ratfunc_eq(a: RatFunc, b: RatFunc) -> bool:
    """Equality by cross-multiplication, independent of canonical form."""
    if a.field is not b.field:
        raise ValueError("operands live in different fields")
    return a.num * b.den == b.num * a.den


def ratfunc_sum(items: Iterable[RatFunc], field: Field) -> RatFunc:
    """Sum grouping equal denominators first (one gcd per group)."""
    groups: dict = {}
    order = []
    for r in items:
        if r.is_zero():
            continue
        k = r.den.str() if hasattr(r.den, "str") else str(r.den)
        if k in groups:
            groups[k][1] = groups[k][1] + r.num
        else:
            groups[k] = [r.den, r.num]
            order.append(k)
    out = field.zero
    for k in order:
        den, num = groups[k]
        if num.is_zero():
            continue
        out = out + RatFunc(field, num, den)
    return out
