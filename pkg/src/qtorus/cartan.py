"""Cartan data, rational-form lattices and representation configurations.

Node numbering is the one of the input matrix (Bourbaki tables for the
builtin types).  The generator formulas split neighbour products into
``j > i`` and ``j < i`` ranges, so renumbering the Dynkin diagram gives a
different, equally valid, realization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .errors import (
    ConfigError,
    LatticeOutOfRange,
    NegativeL,
    NotCartan,
    NotSymmetrizable,
    UnknownType,
)

FAMILIES = ("yangian", "yangian-borel", "qaffine", "uqg")
POLYNOMIAL_FAMILIES = ("yangian", "qaffine", "uqg")

Matrix = tuple[tuple[int, ...], ...]


def _as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(x) for x in r) for r in rows)


def det(a: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued elimination."""
    m = [[Fraction(x) for x in r] for r in a]
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            out = -out
        out *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return out


def inverse(a: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(a)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return tuple(tuple(r[n:]) for r in m)


def matmul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))) for i in range(len(a))
    )


@dataclass(frozen=True)
class CartanData:
    a: Matrix
    d: tuple[int, ...]
    name: str = ""

    @property
    def rank(self) -> int:
        return len(self.a)

    def bilinear(self, i: int, j: int) -> int:
        """(alpha_i, alpha_j) = d_i a_ij, 0-based node indices."""
        return self.d[i] * self.a[i][j]

    def det(self) -> int:
        return int(det(self.a))

    def to_json(self) -> dict:
        return {"name": self.name, "matrix": [list(r) for r in self.a], "d": list(self.d)}


def _check_cartan(a: Matrix) -> None:
    n = len(a)
    if n == 0:
        raise NotCartan("empty Cartan matrix")
    if any(len(r) != n for r in a):
        raise NotCartan("Cartan matrix must be square")
    for i in range(n):
        if a[i][i] != 2:
            raise NotCartan(f"diagonal entry a[{i + 1}][{i + 1}] = {a[i][i]} != 2")
        for j in range(n):
            if i == j:
                continue
            if a[i][j] > 0:
                raise NotCartan(f"off-diagonal entry a[{i + 1}][{j + 1}] = {a[i][j]} > 0")
            if (a[i][j] == 0) != (a[j][i] == 0):
                raise NotCartan(f"a[{i + 1}][{j + 1}] and a[{j + 1}][{i + 1}] must vanish together")


def _symmetrizer(a: Matrix) -> tuple[int, ...]:
    n = len(a)
    d: list[Fraction | None] = [None] * n
    comps: list[list[int]] = []
    for root in range(n):
        if d[root] is not None:
            continue
        d[root] = Fraction(1)
        comp, stack = [root], [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j == i or a[i][j] == 0:
                    continue
                dj = d[i] * a[i][j] / a[j][i]
                if d[j] is None:
                    d[j] = dj
                    comp.append(j)
                    stack.append(j)
                elif d[j] != dj:
                    raise NotSymmetrizable(f"no positive d with d_i a_ij = d_j a_ji (cycle through node {j + 1})")
        comps.append(comp)
    out = [0] * n
    for comp in comps:
        lcm_den = 1
        for i in comp:
            lcm_den = lcm_den * d[i].denominator // gcd(lcm_den, d[i].denominator)
        ints = [int(d[i] * lcm_den) for i in comp]
        g = 0
        for x in ints:
            g = gcd(g, x)
        for i, x in zip(comp, ints):
            out[i] = x // g
    return tuple(out)


def cartan_from_matrix(rows: Sequence[Sequence[int]], name: str = "") -> CartanData:
    """Validate a finite-type Cartan matrix and compute minimal coprime d_i."""
    a = _as_matrix(rows)
    _check_cartan(a)
    d = _symmetrizer(a)
    n = len(a)
    for i in range(n):
        for j in range(n):
            if d[i] * a[i][j] != d[j] * a[j][i]:
                raise NotSymmetrizable("symmetrizer check failed")
    # finite type: the symmetrized matrix must be positive definite
    sym = [[d[i] * a[i][j] for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        if det([r[:k] for r in sym[:k]]) <= 0:
            raise NotCartan("matrix is not of finite type (symmetrized form not positive definite)")
    return CartanData(a, d, name or "custom")


def _chain(n: int) -> list[list[int]]:
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
        if i + 1 < n:
            a[i][i + 1] = a[i + 1][i] = -1
    return a


def _link(a, i, j):
    """Simply-laced edge between 1-based nodes i, j."""
    a[i - 1][j - 1] = a[j - 1][i - 1] = -1


def cartan_from_type(series: str, rank: int) -> CartanData:
    """Cartan matrix of a simple type, Bourbaki numbering."""
    s = series.upper()
    n = int(rank)
    valid = {
        "A": n >= 1,
        "B": n >= 2,
        "C": n >= 2,
        "D": n >= 4,
        "E": n in (6, 7, 8),
        "F": n == 4,
        "G": n == 2,
    }
    if s not in valid or not valid[s]:
        raise UnknownType(f"no simple Lie algebra of type {series}{rank}")
    if s == "A":
        a = _chain(n)
    elif s == "B":
        a = _chain(n)
        a[n - 1][n - 2] = -2
    elif s == "C":
        a = _chain(n)
        a[n - 2][n - 1] = -2
    elif s == "D":
        a = _chain(n - 1) if n > 1 else []
        a = [r + [0] for r in a] + [[0] * n]
        a[n - 1][n - 1] = 2
        _link(a, n - 2, n)
    elif s == "E":
        a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        _link(a, 1, 3)
        _link(a, 2, 4)
        for k in range(3, n):
            _link(a, k, k + 1)
    elif s == "F":
        a = _chain(4)
        a[2][1] = -2
    else:
        a = [[2, -3], [-1, 2]]
    return cartan_from_matrix(a, f"{s}{n}")


def derive_l(c: CartanData, m: Sequence[int], *, allow_negative: bool = False) -> tuple[int, ...]:
    """l_i = sum_j m_j a_ji."""
    if len(m) != c.rank:
        raise ConfigError(f"m has {len(m)} entries, rank is {c.rank}")
    if any(int(x) < 1 for x in m):
        raise ConfigError("multiplicities m_i must be positive integers")
    l = tuple(sum(int(m[j]) * c.a[j][i] for j in range(c.rank)) for i in range(c.rank))
    if not allow_negative:
        bad = [i + 1 for i, x in enumerate(l) if x < 0]
        if bad:
            raise NegativeL(f"l = {l} has negative entries at nodes {bad} for m = {tuple(m)}")
    return l


@dataclass(frozen=True)
class LatticeData:
    """Basis beta_i = sum_j n_ji lambda_j of a lattice Q <= M <= P.

    ``m`` expresses simple roots in the beta basis (alpha_i = sum_j m_ji beta_j),
    ``mInv`` is its inverse and ``detA`` = det(a).
    """

    choice: str
    n: Matrix
    m: Matrix
    mInv: tuple[tuple[Fraction, ...], ...]
    detA: int

    def to_json(self) -> dict:
        return {"choice": self.choice, "n": [list(r) for r in self.n]}


def lattice_from_choice(c: CartanData, choice) -> LatticeData:
    """``choice`` is "adjoint", "simply-connected" or an explicit n-matrix."""
    a = c.a
    if isinstance(choice, str):
        key = choice.lower()
        if key in ("adjoint", "q"):
            n, label = a, "adjoint"
        elif key in ("simply-connected", "sc", "p"):
            n, label = tuple(tuple(int(i == j) for j in range(c.rank)) for i in range(c.rank)), "simply-connected"
        else:
            raise LatticeOutOfRange(f"unknown lattice choice {choice!r}")
    else:
        n, label = _as_matrix(choice), "explicit"
    if len(n) != c.rank or any(len(r) != c.rank for r in n):
        raise LatticeOutOfRange("lattice matrix has the wrong shape")
    if det(n) == 0:
        raise LatticeOutOfRange("beta vectors are linearly dependent")
    # a = n . m  =>  m = n^{-1} a must be integral (Q <= M)
    m_frac = matmul(inverse(n), a)
    if any(x.denominator != 1 for r in m_frac for x in r):
        raise LatticeOutOfRange("lattice does not contain the root lattice")
    m = tuple(tuple(int(x) for x in r) for r in m_frac)
    mInv = matmul(inverse(a), n)
    return LatticeData(label, n, m, mInv, c.det())


@dataclass(frozen=True)
class RepConfig:
    family: str
    m: tuple[int, ...]
    l: tuple[int, ...]
    nu: Mapping[str, Fraction] | str = "symbolic"
    rsplit: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()
    lattice: LatticeData | None = None
    l_plus: tuple[int, ...] = ()
    l_minus: tuple[int, ...] = ()
    extra: Mapping[str, object] = field(default_factory=dict)

    def plus_factors(self, i: int) -> tuple[int, ...]:
        return self.rsplit[i][0]

    def minus_factors(self, i: int) -> tuple[int, ...]:
        return self.rsplit[i][1]

    def to_json(self) -> dict:
        out = {"family": self.family, "m": list(self.m), "l": list(self.l)}
        out["nu"] = self.nu if isinstance(self.nu, str) else {k: str(v) for k, v in sorted(self.nu.items())}
        out["rsplit"] = [[list(p), list(q)] for p, q in self.rsplit]
        if self.family == "yangian-borel":
            out["l_plus"], out["l_minus"] = list(self.l_plus), list(self.l_minus)
        if self.lattice is not None:
            out["lattice"] = self.lattice.to_json()
        return out


def make_config(
    c: CartanData,
    family: str,
    m: Sequence[int],
    *,
    nu="symbolic",
    rsplit=None,
    lattice=None,
    l_plus=None,
) -> RepConfig:
    """Validate and assemble a RepConfig.

    ``rsplit`` maps each node to the 1-based factor indices assigned to
    R^(+); the rest go to R^(-).  Default puts every factor in R^(+).
    """
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; expected one of {FAMILIES}")
    m = tuple(int(x) for x in m)
    borel = family == "yangian-borel"
    l = derive_l(c, m, allow_negative=borel)
    lp: tuple[int, ...] = ()
    lm: tuple[int, ...] = ()
    if borel:
        lp = tuple(int(x) for x in l_plus) if l_plus is not None else tuple(max(x, 0) for x in l)
        if len(lp) != c.rank or any(x < 0 for x in lp):
            raise ConfigError("l_plus must be a non-negative vector of length rank")
        lm = tuple(p - x for p, x in zip(lp, l))
        if any(x < 0 for x in lm):
            raise ConfigError(f"l_plus = {lp} gives negative l_minus = {lm}")
    elif l_plus is not None:
        raise ConfigError("l_plus only applies to the yangian-borel family")

    if rsplit is None:
        split = tuple((tuple(range(1, x + 1)), ()) for x in l) if not borel else ()
    else:
        if borel:
            raise ConfigError("rsplit does not apply to the yangian-borel family")
        if len(rsplit) != c.rank:
            raise ConfigError("rsplit needs one entry per node")
        split = []
        for i, plus in enumerate(rsplit):
            plus = tuple(sorted(int(s) for s in plus))
            full = set(range(1, l[i] + 1))
            if len(set(plus)) != len(plus) or not set(plus) <= full:
                raise ConfigError(f"rsplit for node {i + 1} must be a subset of 1..{l[i]} without repeats")
            split.append((plus, tuple(sorted(full - set(plus)))))
        split = tuple(split)

    lat = None
    if family == "uqg":
        lat = lattice if isinstance(lattice, LatticeData) else lattice_from_choice(c, lattice or "adjoint")
    elif lattice is not None:
        raise ConfigError("a lattice only applies to the uqg family")

    if not isinstance(nu, str):
        nu = {str(k): Fraction(v) for k, v in dict(nu).items()}
    elif nu != "symbolic":
        raise ConfigError(f"nu must be 'symbolic' or a mapping, got {nu!r}")
    return RepConfig(family, m, l, nu, split, lat, lp, lm)
