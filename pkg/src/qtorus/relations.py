"""Defining-relation schemas and their verification.

Every relation is rewritten as ``residual == 0`` with spectral denominators
cleared, and the residual is reduced to normal form (a SkewElement or a
DeltaSeries).  Three ways to decide ``residual == 0``:

* ``symbolic``: exact normal form over the full symbol field;
* ``random-k``: central symbols specialized to random rationals per seed,
  residual coefficients then evaluated at random points;
* ``truncated-N`` (affine only): independent mode-by-mode computation on
  ``|n| <= N``, compared coefficientwise with the delta-calculus path.
"""

from __future__ import annotations

import itertools
import logging
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .cartan import CartanData
from .errors import DegenerateDenominator, EvalPole, OutOfRange, PoleOnSupport
from .generators import GeneratorSet, extract_modes
from .scalars import RatFunc, Surd
from .series import DeltaSeries, _make_term, expand, expansion_difference, truncated_modes
from .skew import SkewElement, anticommutator, commutator, skew_sum

log = logging.getLogger(__name__)

MAX_RETRIES = 5


# -- q-arithmetic ------------------------------------------------------------


def q_number(n: int, q: RatFunc) -> RatFunc:
    """[n]_q = (q^n - q^-n)/(q - q^-1)."""
    return (q**n - q ** (-n)) / (q - q ** (-1))


def q_factorial(n: int, q: RatFunc) -> RatFunc:
    out = q.field.one
    for j in range(1, n + 1):
        out = out * q_number(j, q)
    return out


def q_binomial(m: int, k: int, q: RatFunc) -> RatFunc:
    """[m choose k]_q from q-factorials; a Laurent polynomial in q."""
    if not (0 <= k <= m):
        raise OutOfRange(f"q-binomial needs 0 <= k <= m, got m={m}, k={k}")
    return q_factorial(m, q) / (q_factorial(k, q) * q_factorial(m - k, q))


def q_binomial_node(g: GeneratorSet, m: int, k: int, i: int) -> RatFunc:
    """[m choose k]_{q_i} with q_i = lam^(2 d_i)."""
    return q_binomial(m, k, g.sym("lam") ** (2 * g.cartan.d[i]))


# -- instances -----------------------------------------------------------------


@dataclass(frozen=True)
class RelationInstance:
    schema: str
    nodes: tuple[int, ...]
    order: int | None = None

    def label(self) -> str:
        nodes = ",".join(str(i + 1) for i in self.nodes)
        extra = f";m={self.order}" if self.order is not None else ""
        return f"{self.schema}({nodes}{extra})"


# Printed relation lines and the schema that encodes each of them.
COVERAGE = {
    "yangian": {
        "[H_i(u),H_j(v)]=0": "yangian-HH",
        "[H_i(u),E_j(v)] = -(h/2)(a_i,a_j)[H_i(u),E_j(u)-E_j(v)]_+/(u-v)": "yangian-HE",
        "[H_i(u),F_j(v)] = (h/2)(a_i,a_j)[H_i(u),F_j(u)-F_j(v)]_+/(u-v)": "yangian-HF",
        "[E_i(u),F_j(v)] = -h delta_ij (H_i(u)-H_i(v))/(u-v)": "yangian-EF",
        "[E_i(u),E_i(v)] = -(h/2)(a_i,a_i)(E_i(u)-E_i(v))^2/(u-v)": "yangian-EE-same",
        "[F_i(u),F_i(v)] = (h/2)(a_i,a_i)(F_i(u)-F_i(v))^2/(u-v)": "yangian-FF-same",
        "[E_i(u),E_j(v)], i != j": "yangian-EE-cross",
        "[F_i(u),F_j(v)], i != j": "yangian-FF-cross",
        "sum_S_m [E_i(u_s1),[...,[E_i(u_sm),E_j(v)]]] = 0": "yangian-serre-E",
        "sum_S_m [F_i(u_s1),[...,[F_i(u_sm),F_j(v)]]] = 0": "yangian-serre-F",
    },
    "qaffine": {
        "K_i^{+-}(z)K_j^{+-}(w) = K_j^{+-}(w)K_i^{+-}(z)": "affine-KK",
        "K_i^+(z)K_j^-(w) = K_j^-(w)K_i^+(z)": "affine-KK",
        "(z-q_i^a w)K_i(z)E_j(w) = (q_i^a z-w)E_j(w)K_i(z)": "affine-KE",
        "(z-q_i^-a w)K_i(z)F_j(w) = (q_i^-a z-w)F_j(w)K_i(z)": "affine-KF",
        "[E_i(z),F_j(w)] = delta_ij delta(z/w)(K_i^+(w)-K_i^-(z))/(q_i-q_i^-1)": "affine-EF",
        "(z-q_i^a w)E_i(z)E_j(w) = (q_i^a z-w)E_j(w)E_i(z)": "affine-EE",
        "(z-q_i^-a w)F_i(z)F_j(w) = (q_i^-a z-w)F_j(w)F_i(z)": "affine-FF",
        "sum_S_m sum_k (-1)^k [m,k] E_i..E_j(w)..E_i = 0": "affine-serre-E",
        "sum_S_m sum_k (-1)^k [m,k] F_i..F_j(w)..F_i = 0": "affine-serre-F",
    },
    "uqg": {
        "K_i K_i^-1 = K_i^-1 K_i = 1, K_i K_j = K_j K_i": "uqg-KK",
        "K_i E_j K_i^-1 = q_i^a_ij E_j": "uqg-KE",
        "K_i F_j K_i^-1 = q_i^-a_ij F_j": "uqg-KF",
        "K_beta_i E_j K_beta_i^-1 = q_j^n_ji E_j": "uqg-KbE",
        "K_beta_i F_j K_beta_i^-1 = q_j^-n_ji F_j": "uqg-KbF",
        "E_i F_j - F_j E_i = delta_ij (K_i-K_i^-1)/(q_i-q_i^-1)": "uqg-EF",
        "sum_r (-1)^r [1-a_ij, r] E_i^(1-a_ij-r) E_j E_i^r = 0": "uqg-serre-E",
        "sum_r (-1)^r [1-a_ij, r] F_i^(1-a_ij-r) F_j F_i^r = 0": "uqg-serre-F",
    },
}
COVERAGE["yangian-borel"] = {
    k: v for k, v in COVERAGE["yangian"].items() if v in (
        "yangian-HH", "yangian-HE", "yangian-EE-same", "yangian-EE-cross", "yangian-serre-E",
    )
}


def relation_instances(family: str, c: CartanData) -> list[RelationInstance]:
    n = c.rank
    pairs = [(i, j) for i in range(n) for j in range(n)]
    upper = [(i, j) for i, j in pairs if i <= j]
    off = [(i, j) for i, j in pairs if i != j]
    out: list[RelationInstance] = []

    def add(schema, nodes, order=None):
        out.append(RelationInstance(schema, tuple(nodes), order))

    if family in ("yangian", "yangian-borel"):
        borel = family == "yangian-borel"
        for p in upper:
            add("yangian-HH", p)
        for p in pairs:
            add("yangian-HE", p)
        if not borel:
            for p in pairs:
                add("yangian-HF", p)
            for p in pairs:
                add("yangian-EF", p)
        for i in range(n):
            add("yangian-EE-same", (i,))
        if not borel:
            for i in range(n):
                add("yangian-FF-same", (i,))
        for p in off:
            add("yangian-EE-cross", p)
        if not borel:
            for p in off:
                add("yangian-FF-cross", p)
        for i, j in off:
            add("yangian-serre-E", (i, j), 1 - c.a[i][j])
        if not borel:
            for i, j in off:
                add("yangian-serre-F", (i, j), 1 - c.a[i][j])
    elif family == "qaffine":
        for p in upper:
            add("affine-KK", p)
        for s in ("affine-KE", "affine-KF", "affine-EF", "affine-EE", "affine-FF"):
            for p in pairs:
                add(s, p)
        for s in ("affine-serre-E", "affine-serre-F"):
            for i, j in off:
                add(s, (i, j), 1 - c.a[i][j])
    elif family == "uqg":
        for p in upper:
            add("uqg-KK", p)
        for s in ("uqg-KE", "uqg-KF", "uqg-KbE", "uqg-KbF", "uqg-EF"):
            for p in pairs:
                add(s, p)
        for s in ("uqg-serre-E", "uqg-serre-F"):
            for i, j in off:
                add(s, (i, j), 1 - c.a[i][j])
    else:
        raise ValueError(f"unknown family {family!r}")
    return out


# -- residuals: Yangian --------------------------------------------------------


def _nested_commutator(items: Sequence[SkewElement], last: SkewElement) -> SkewElement:
    acc = last
    for x in reversed(items):
        acc = commutator(x, acc)
    return acc


def _yangian_residual(g: GeneratorSet, inst: RelationInstance) -> SkewElement:
    h, u, v = g.sym("h"), g.sym("u"), g.sym("v")
    c = g.cartan
    s = inst.schema
    if s == "yangian-HH":
        i, j = inst.nodes
        return commutator(g.H(i, "u"), g.H(j, "v"))
    if s in ("yangian-HE", "yangian-HF"):
        i, j = inst.nodes
        X = g.E if s == "yangian-HE" else g.F
        sign = 1 if s == "yangian-HE" else -1
        half = h * Fraction(c.bilinear(i, j), 2)
        Hu = g.H(i, "u")
        return (u - v) * commutator(Hu, X(j, "v")) + (sign * half) * anticommutator(Hu, X(j, "u") - X(j, "v"))
    if s == "yangian-EF":
        i, j = inst.nodes
        r = (u - v) * commutator(g.E(i, "u"), g.F(j, "v"))
        if i == j:
            r = r + h * (g.H(i, "u") - g.H(i, "v"))
        return r
    if s in ("yangian-EE-same", "yangian-FF-same"):
        (i,) = inst.nodes
        X = g.E if s == "yangian-EE-same" else g.F
        sign = 1 if s == "yangian-EE-same" else -1
        d = X(i, "u") - X(i, "v")
        return (u - v) * commutator(X(i, "u"), X(i, "v")) + (sign * h * c.d[i]) * (d * d)
    if s in ("yangian-EE-cross", "yangian-FF-cross"):
        i, j = inst.nodes
        which = "E" if s == "yangian-EE-cross" else "F"
        X = g.E if which == "E" else g.F
        sign = 1 if which == "E" else -1
        half = h * Fraction(c.bilinear(i, j), 2)
        d = X(j, "u") - X(j, "v")
        zero_mode = extract_modes(g, which, i, 0)
        return (
            (u - v) * commutator(X(i, "u"), X(j, "v"))
            + (sign * half) * anticommutator(X(i, "u"), d)
            + commutator(zero_mode, d)
        )
    if s in ("yangian-serre-E", "yangian-serre-F"):
        i, j = inst.nodes
        X = g.E if s == "yangian-serre-E" else g.F
        m = inst.order
        xs = [X(i, f"u{k}") for k in range(1, m + 1)]
        last = X(j, "v")
        terms = [_nested_commutator([xs[p] for p in perm], last) for perm in itertools.permutations(range(m))]
        return skew_sum(terms, g.alg)
    raise ValueError(f"unknown Yangian schema {s}")


# -- residuals: quantum affine ------------------------------------------------


def _reg(g: GeneratorSet, f) -> DeltaSeries:
    return DeltaSeries.regular_only(g.alg.scalar(f))


def _qpow(g: GeneratorSet, i: int, e: int) -> RatFunc:
    """q_i^e."""
    return g.sym("lam") ** (2 * g.cartan.d[i] * e)


def _affine_sides(g: GeneratorSet, inst: RelationInstance):
    """(lhs, rhs) as DeltaSeries / SkewElement with lhs - rhs the residual."""
    c = g.cartan
    s = inst.schema
    if s == "affine-KK":
        i, j = inst.nodes
        a, b = g.K(i, "z"), g.K(j, "w")
        return a * b, b * a
    z, w = g.sym("z"), g.sym("w")
    if s in ("affine-KE", "affine-KF"):
        i, j = inst.nodes
        e = c.a[i][j] if s == "affine-KE" else -c.a[i][j]
        X = (g.E if s == "affine-KE" else g.F)(j, "w")
        qa = _qpow(g, i, e)
        Kz = DeltaSeries.regular_only(g.K(i, "z"))
        return _reg(g, z - qa * w) * Kz * X, _reg(g, qa * z - w) * X * Kz
    if s == "affine-EF":
        i, j = inst.nodes
        Ez, Fw = g.E(i, "z"), g.F(j, "w")
        lhs = Ez * Fw - Fw * Ez
        if i != j:
            return lhs, DeltaSeries(g.alg)
        return lhs, _ef_rhs(g, i)
    if s in ("affine-EE", "affine-FF"):
        i, j = inst.nodes
        e = c.a[i][j] if s == "affine-EE" else -c.a[i][j]
        X = g.E if s == "affine-EE" else g.F
        qa = _qpow(g, i, e)
        Xi, Xj = X(i, "z"), X(j, "w")
        return _reg(g, z - qa * w) * Xi * Xj, _reg(g, qa * z - w) * Xj * Xi
    if s in ("affine-serre-E", "affine-serre-F"):
        i, j = inst.nodes
        X = g.E if s == "affine-serre-E" else g.F
        m = inst.order
        zs = [X(i, f"z{k}") for k in range(1, m + 1)]
        Xj = X(j, "w")
        acc = DeltaSeries(g.alg)
        for perm in itertools.permutations(range(m)):
            for k in range(m + 1):
                coeff = (-1) ** k * q_binomial_node(g, m, k, i)
                word = [zs[p] for p in perm[:k]] + [Xj] + [zs[p] for p in perm[k:]]
                prod = _reg(g, coeff)
                for x in word:
                    prod = prod * x
                acc = acc + prod
        return acc, DeltaSeries(g.alg)
    raise ValueError(f"unknown affine schema {s}")


def _ef_rhs(g: GeneratorSet, i: int) -> DeltaSeries:
    """delta(z/w)(K+(w) - K-(z))/(q_i - q_i^-1) in delta normal form."""
    diff = expansion_difference(g.K(i, "w"), "w")
    pref = 1 / (_qpow(g, i, 1) - _qpow(g, i, -1))
    terms = []
    for t in diff.items():
        ((_, p),) = t.supports
        terms.append(_make_term((("w", p), ("z", p)), (t.coeff).map_coefficients(lambda f: f * pref)))
    return DeltaSeries(g.alg, terms)


def _affine_residual(g, inst):
    lhs, rhs = _affine_sides(g, inst)
    return lhs - rhs


# -- residuals: finite quantum group ------------------------------------------


def _uqg_residual(g: GeneratorSet, inst: RelationInstance) -> SkewElement:
    c = g.cartan
    s = inst.schema
    one = g.alg.one()
    if s == "uqg-KK":
        i, j = inst.nodes
        parts = [commutator(g.Kbeta(i), g.Kbeta(j)), commutator(g.K(i), g.K(j))]
        if i == j:
            parts += [
                g.Kbeta(i) * g.Kbeta_inv(i) - one,
                g.Kbeta_inv(i) * g.Kbeta(i) - one,
                g.K(i) * g.Kinv(i) - one,
                g.Kinv(i) * g.K(i) - one,
            ]
        return _stack(g, parts)
    if s in ("uqg-KE", "uqg-KF"):
        i, j = inst.nodes
        sign = 1 if s == "uqg-KE" else -1
        X = (g.E if s == "uqg-KE" else g.F)(j)
        return g.K(i) * X * g.Kinv(i) - _qpow(g, i, sign * c.a[i][j]) * X
    if s in ("uqg-KbE", "uqg-KbF"):
        i, j = inst.nodes
        sign = 1 if s == "uqg-KbE" else -1
        X = (g.E if s == "uqg-KbE" else g.F)(j)
        n = g.cfg.lattice.n
        return g.Kbeta(i) * X * g.Kbeta_inv(i) - _qpow(g, j, sign * n[j][i]) * X
    if s == "uqg-EF":
        i, j = inst.nodes
        r = g.E(i) * g.F(j) - g.F(j) * g.E(i)
        if i == j:
            r = r - (g.K(i) - g.Kinv(i)) * (1 / (_qpow(g, i, 1) - _qpow(g, i, -1)))
        return r
    if s in ("uqg-serre-E", "uqg-serre-F"):
        i, j = inst.nodes
        X = g.E if s == "uqg-serre-E" else g.F
        m = inst.order
        xi, xj = X(i), X(j)
        terms = [
            ((-1) ** r * q_binomial_node(g, m, r, i)) * (xi ** (m - r) * xj * xi**r) for r in range(m + 1)
        ]
        return skew_sum(terms, g.alg)
    raise ValueError(f"unknown uqg schema {s}")


class _Stack:
    """Several residuals that must all vanish."""

    def __init__(self, parts):
        self.parts = list(parts)

    def is_zero(self):
        return all(p.is_zero() for p in self.parts)

    def specialize(self, a):
        return _Stack(p.specialize(a) for p in self.parts)

    def __str__(self):
        return " ; ".join(str(p) for p in self.parts)


def _stack(g, parts):
    return _Stack(parts)


RESIDUALS: dict[str, Callable] = {
    "yangian": _yangian_residual,
    "yangian-borel": _yangian_residual,
    "qaffine": _affine_residual,
    "uqg": _uqg_residual,
}


def residual(g: GeneratorSet, inst: RelationInstance):
    return RESIDUALS[g.family](g, inst)


def residual_coefficients(r) -> list[RatFunc]:
    """All rational coefficients of a residual (zero iff the residual is zero)."""
    if isinstance(r, _Stack):
        return [c for p in r.parts for c in residual_coefficients(p)]
    if isinstance(r, SkewElement):
        return list(r.terms.values())
    if isinstance(r, DeltaSeries):
        out = list(r.regular.terms.values())
        for t in r.items():
            out += list(t.coeff.terms.values())
        return out
    raise TypeError(f"cannot read coefficients of {type(r).__name__}")


# -- reports -------------------------------------------------------------------


@dataclass
class InstanceResult:
    instance: RelationInstance
    status: str  # pass | fail | skipped
    mode: str
    residual: str | None = None
    witness: dict | None = None
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self, verbose=False, timings=False) -> dict:
        out = {
            "relation": self.instance.label(),
            "schema": self.instance.schema,
            "nodes": [i + 1 for i in self.instance.nodes],
            "status": self.status,
            "mode": self.mode,
        }
        if self.instance.order is not None:
            out["order"] = self.instance.order
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness
        if self.residual is not None:
            out["residual"] = self.residual if verbose else _short(self.residual)
        if timings:
            out["seconds"] = round(self.seconds, 4)
        return out


def _short(s: str, n: int = 200) -> str:
    return s if len(s) <= n else s[:n] + f"... ({len(s)} chars; use --verbose)"


@dataclass
class VerificationReport:
    family: str
    config: dict
    results: list[InstanceResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        if any(r.status == "fail" for r in self.results):
            return "fail"
        return "pass"

    def totals(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for r in self.results:
            out[r.status] += 1
        out["instances"] = len(self.results)
        return out

    def verdicts(self) -> dict[str, str]:
        return {r.instance.label(): r.status for r in self.results}

    def extend(self, other: "VerificationReport") -> None:
        self.results += other.results
        self.warnings += other.warnings

    def to_json(self, verbose=False, timings=False) -> dict:
        return {
            "family": self.family,
            "config": self.config,
            "status": self.status,
            "totals": self.totals(),
            "instances": [r.to_json(verbose, timings) for r in self.results],
            "warnings": list(self.warnings),
        }


def thread_count() -> int:
    env = os.environ.get("QTORUS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer QTORUS_THREADS=%r", env)
    return min(4, os.cpu_count() or 1)


def run_parallel(jobs: Sequence, fn: Callable, progress: Callable | None = None) -> list:
    """Apply fn to each job in a thread pool; results keep job order."""
    workers = min(thread_count(), max(1, len(jobs)))
    if workers == 1:
        out = []
        for job in jobs:
            out.append(fn(job))
            if progress:
                progress(out[-1])
        return out
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, job) for job in jobs]
        out = []
        for f in futures:
            out.append(f.result())
            if progress:
                progress(out[-1])
        return out


def _check_symbolic(g: GeneratorSet, inst: RelationInstance) -> InstanceResult:
    t0 = time.perf_counter()
    try:
        r = residual(g, inst)
    except (PoleOnSupport, DegenerateDenominator) as exc:
        return InstanceResult(inst, "fail", "symbolic", residual=f"error: {exc}", seconds=time.perf_counter() - t0)
    status = "pass" if r.is_zero() else "fail"
    res = None if status == "pass" else str(r)
    return InstanceResult(inst, status, "symbolic", residual=res, seconds=time.perf_counter() - t0)


def _verify(g: GeneratorSet, checker, mode_label=None, progress=None, instances=None) -> VerificationReport:
    insts = instances if instances is not None else relation_instances(g.family, g.cartan)
    report = VerificationReport(g.family, g.cfg.to_json())
    report.results = run_parallel(insts, lambda inst: checker(g, inst), progress)
    for r in report.results:
        report.warnings += r.detail.pop("_warnings", [])
    return report


def verify_yangian(g: GeneratorSet, progress=None, instances=None) -> VerificationReport:
    if g.family not in ("yangian", "yangian-borel"):
        raise ValueError("verify_yangian needs a yangian or yangian-borel generator set")
    return _verify(g, _check_symbolic, progress=progress, instances=instances)


def verify_uqg(g: GeneratorSet, progress=None, instances=None) -> VerificationReport:
    if g.family != "uqg":
        raise ValueError("verify_uqg needs a uqg generator set")
    return _verify(g, _check_symbolic, progress=progress, instances=instances)


def verify_qaffine(g: GeneratorSet, mode: str = "symbolic", N: int = 8, progress=None, instances=None) -> VerificationReport:
    """Affine relations by delta calculus (``symbolic``) or by both paths (``modes``)."""
    if g.family != "qaffine":
        raise ValueError("verify_qaffine needs a qaffine generator set")
    if mode == "symbolic":
        return _verify(g, _check_symbolic, progress=progress, instances=instances)
    if mode == "modes":
        oracle = ModeOracle(g, N)
        return _verify(g, lambda g_, inst: oracle.check(inst), progress=progress, instances=instances)
    raise ValueError(f"unknown affine mode {mode!r}")


def verify_symbolic(g: GeneratorSet, progress=None, instances=None) -> VerificationReport:
    return _verify(g, _check_symbolic, progress=progress, instances=instances)


# -- truncated modes ------------------------------------------------------------


class ModeOracle:
    """Mode-by-mode affine relations on the window ``|n| <= N``.

    Mode inputs come from the delta supports of E, F (``p^-n``) and from
    series division of K(z); no delta products or partial fractions are
    used, so this is independent of the symbolic path.
    """

    def __init__(self, g: GeneratorSet, N: int):
        if N < 1:
            raise ValueError("truncation N must be >= 1")
        self.g, self.N = g, N
        self._modes: dict = {}

    def mode(self, which: str, i: int, e: int) -> SkewElement:
        """Coefficient of z^e."""
        key = (which, i, e)
        got = self._modes.get(key)
        if got is None:
            g = self.g
            if which in ("K+", "K-"):
                d = "+" if which == "K+" else "-"
                got = g.K(i, "z").map_coefficients(lambda f: expand(f, "z", d, e, e).get(e, g.field.zero))
            else:
                got = extract_modes(g, which, i, -e)
            self._modes[key] = got
        return got

    def _pair(self, A, B, e, f, c):
        """[(z - c w) X]_{e,f} with X_{e,f} = A_e B_f."""
        return A(e - 1) * B(f) - c * (A(e) * B(f - 1))

    def sides(self, inst: RelationInstance, branch: str = "+") -> tuple[dict, dict]:
        """Mode dicts {exponents: element} for lhs and rhs."""
        g, N = self.g, self.N
        cart = g.cartan
        s = inst.schema
        rng = range(-N, N + 1)
        zero = g.alg.zero()
        lhs, rhs = {}, {}
        M = self.mode
        if s == "affine-KK":
            i, j = inst.nodes
            for b1, b2 in (("K+", "K+"), ("K-", "K-"), ("K+", "K-"), ("K-", "K+")):
                for e in rng:
                    for f in rng:
                        a, b = M(b1, i, e), M(b2, j, f)
                        lhs[(b1, b2, e, f)] = a * b
                        rhs[(b1, b2, e, f)] = b * a
            return lhs, rhs
        if s in ("affine-KE", "affine-KF", "affine-EE", "affine-FF"):
            i, j = inst.nodes
            kind = s.split("-")[1]
            e_ = cart.a[i][j] if kind in ("KE", "EE") else -cart.a[i][j]
            qa = _qpow(g, i, e_)
            left = {"KE": "K" + branch, "KF": "K" + branch, "EE": "E", "FF": "F"}[kind]
            right = {"KE": "E", "KF": "F", "EE": "E", "FF": "F"}[kind]
            for e in rng:
                for f in rng:
                    # (z - qa w) L(z) R(w)  vs  (qa z - w) R(w) L(z)
                    x = M(left, i, e - 1) * M(right, j, f) - qa * (M(left, i, e) * M(right, j, f - 1))
                    y = qa * (M(right, j, f) * M(left, i, e - 1)) - M(right, j, f - 1) * M(left, i, e)
                    lhs[(e, f)] = x
                    rhs[(e, f)] = y
            return lhs, rhs
        if s == "affine-EF":
            i, j = inst.nodes
            pref = 1 / (_qpow(g, i, 1) - _qpow(g, i, -1))
            for e in rng:
                for f in rng:
                    a, b = M("E", i, e), M("F", j, f)
                    lhs[(e, f)] = a * b - b * a
                    if i == j:
                        rhs[(e, f)] = (M("K+", i, e + f) - M("K-", i, e + f)) * pref
                    else:
                        rhs[(e, f)] = zero
            return lhs, rhs
        if s in ("affine-serre-E", "affine-serre-F"):
            i, j = inst.nodes
            which = "E" if s == "affine-serre-E" else "F"
            m = inst.order
            coeffs = [(-1) ** k * q_binomial_node(g, m, k, i) for k in range(m + 1)]
            for es in itertools.product(rng, repeat=m + 1):
                zs, f = es[:m], es[m]
                acc = []
                for perm in itertools.permutations(range(m)):
                    for k in range(m + 1):
                        word = [M(which, i, zs[p]) for p in perm[:k]] + [M(which, j, f)]
                        word += [M(which, i, zs[p]) for p in perm[k:]]
                        prod = g.alg.scalar(coeffs[k])
                        for x in word:
                            prod = prod * x
                        acc.append(prod)
                lhs[es] = skew_sum(acc, g.alg)
                rhs[es] = zero
            return lhs, rhs
        raise ValueError(f"unknown affine schema {s}")

    def delta_sides(self, inst: RelationInstance, branch: str = "+") -> tuple[dict, dict]:
        """The symbolic sides, truncated to the same window."""
        g, N = self.g, self.N
        lhs, rhs = _affine_sides(g, inst)
        if inst.schema == "affine-KK":
            out_l, out_r = {}, {}
            for b1, b2 in (("K+", "K+"), ("K-", "K-"), ("K+", "K-"), ("K-", "K+")):
                dirs = {"z": b1[1], "w": b2[1]}
                for side, out in ((lhs, out_l), (rhs, out_r)):
                    for k, x in truncated_modes(side, ["z", "w"], N, dirs).items():
                        out[(b1, b2) + k] = x
            return out_l, out_r
        if inst.schema.startswith("affine-serre"):
            names = [f"z{k}" for k in range(1, inst.order + 1)] + ["w"]
        else:
            names = ["z", "w"]
        dirs = {v: branch for v in names}
        return truncated_modes(lhs, names, N, dirs), truncated_modes(rhs, names, N, dirs)

    def check(self, inst: RelationInstance) -> InstanceResult:
        t0 = time.perf_counter()
        label = f"truncated-{self.N}"
        branches = ("+", "-") if inst.schema in ("affine-KE", "affine-KF") else ("+",)
        ok = agree = True
        bad = []
        counts = 0
        for br in branches:
            ml, mr = self.sides(inst, br)
            dl, dr = self.delta_sides(inst, br)
            for k in ml:
                res = ml[k] - mr[k]
                counts += 1
                if not res.is_zero():
                    ok = False
                    bad.append((k, str(res)))
            for mine, theirs in ((ml, dl), (mr, dr)):
                for k, x in mine.items():
                    if not (x - theirs.get(k, self.g.alg.zero())).is_zero():
                        agree = False
                extra = [k for k in theirs if k not in mine and all(abs(e) <= self.N for e in k if isinstance(e, int))]
                if any(not theirs[k].is_zero() for k in extra):
                    agree = False
        status = "pass" if ok and agree else "fail"
        detail = {"modes_checked": counts, "delta_mode_agreement": agree}
        res = None
        if bad:
            k, r = bad[0]
            res = f"mode {list(k)}: {r}"
        return InstanceResult(inst, status, label, residual=res, detail=detail, seconds=time.perf_counter() - t0)


# -- randomized ------------------------------------------------------------------


def _random_value(rng: random.Random) -> Fraction:
    while True:
        x = Fraction(rng.randint(2, 97) * rng.choice((1, -1)), rng.randint(1, 13))
        if abs(x) != 1:
            return x


def _random_assignment(g: GeneratorSet, rng: random.Random) -> dict:
    names = g.central_symbols()
    while True:
        vals = {n: _random_value(rng) for n in names}
        if len(set(vals.values())) == len(vals):
            return vals


def _eval_ok(f: RatFunc, point: dict) -> bool:
    val = f.evaluate(point)
    return val == 0 if not isinstance(val, Surd) else val == Surd(0)


def _sample_residual(g, inst, rng):
    """Specialize central symbols and reduce; resample on poles."""
    for _ in range(MAX_RETRIES + 1):
        sample = _random_assignment(g, rng)
        try:
            r = residual(g.specialize(sample), inst)
        except (EvalPole, DegenerateDenominator, PoleOnSupport):
            continue
        return sample, r
    return None


def _find_witness(coeffs, rng, trials):
    """First sample point where some coefficient is nonzero, else None."""
    if not coeffs:
        return None
    free = sorted({v for c in coeffs for v in c.variables()} - {"s2", "s3"})
    for _ in range(trials):
        for _ in range(MAX_RETRIES + 1):
            point = {v: _random_value(rng) for v in free}
            try:
                if any(not _eval_ok(c, point) for c in coeffs):
                    return point
                break
            except EvalPole:
                continue
    return None


def _check_random(g: GeneratorSet, inst: RelationInstance, seed: int, seeds: int, trials: int) -> InstanceResult:
    t0 = time.perf_counter()
    label = f"random-{seeds}"
    warnings = []
    checked = 0
    for s in range(seeds):
        rng = random.Random(f"{seed}:{s}:{inst.label()}")
        got = _sample_residual(g, inst, rng)
        if got is None:
            warnings.append(f"{inst.label()}: seed {s} skipped after {MAX_RETRIES} pole retries")
            continue
        sample, r = got
        point = _find_witness(residual_coefficients(r), rng, trials)
        checked += 1
        if point is not None:
            witness = {k: str(v) for k, v in sorted({**sample, **point}.items())}
            detail = {"seeds_checked": checked, "trials": trials, "failing_seed": s}
            return InstanceResult(inst, "fail", label, residual=str(r), witness=witness, detail=detail,
                                  seconds=time.perf_counter() - t0)
    detail = {"seeds_checked": checked, "trials": trials}
    if warnings:
        detail["_warnings"] = warnings
    return InstanceResult(inst, "pass" if checked else "skipped", label, detail=detail,
                          seconds=time.perf_counter() - t0)


def verify_randomized(g: GeneratorSet, seeds: int = 20, trials: int = 20, seed: int = 0, progress=None, instances=None) -> VerificationReport:
    """Probabilistic check: a pass is probabilistic, a fail comes with an exact witness."""
    if seeds < 1 or trials < 1:
        raise ValueError("seeds and trials must be positive")
    return _verify(g, lambda g_, inst: _check_random(g_, inst, seed, seeds, trials), progress=progress, instances=instances)


def verify(g: GeneratorSet, mode: str = "symbolic", N: int = 8, seeds: int = 20, trials: int = 20, seed: int = 0, progress=None) -> VerificationReport:
    """Dispatch on family and mode."""
    if mode == "random":
        return verify_randomized(g, seeds, trials, seed, progress)
    if mode == "modes":
        if g.family != "qaffine":
            raise ValueError("truncated-mode verification applies to the qaffine family only")
        return verify_qaffine(g, "modes", N, progress)
    if mode != "symbolic":
        raise ValueError(f"unknown mode {mode!r}")
    if g.family in ("yangian", "yangian-borel"):
        return verify_yangian(g, progress)
    if g.family == "qaffine":
        return verify_qaffine(g, "symbolic", N, progress)
    return verify_uqg(g, progress)
