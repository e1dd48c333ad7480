"""Command line: ``qtorus verify | print-generators | selfcheck``.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
Reports are JSON with a ``schema_version`` field; progress goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

from . import __version__
from .cartan import CartanData, cartan_from_matrix, cartan_from_type, make_config
from .errors import ConfigError, QTorusError
from .generators import build
from .relations import verify

SCHEMA_VERSION = 1
MODES = ("symbolic", "random", "modes")

log = logging.getLogger("qtorus")


@dataclass
class RunConfig:
    family: str = "uqg"
    type: str | None = None
    rank: int | None = None
    matrix: list | None = None
    m: list = field(default_factory=list)
    nu: object = "symbolic"
    rsplit: list | None = None
    lattice: object = None
    l_plus: list | None = None
    mode: str = "symbolic"
    truncation: int = 8
    seed: int = 0
    seeds: int = 20
    trials: int = 20

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def cartan(self) -> CartanData:
        if self.matrix is not None:
            if self.type is not None:
                raise ConfigError("give either --matrix or --type/--rank, not both")
            return cartan_from_matrix(self.matrix)
        if self.type is None or self.rank is None:
            raise ConfigError("a Cartan type and rank (or an explicit matrix) are required")
        return cartan_from_type(self.type, self.rank)

    def validate(self):
        """Cartan data and representation config; raises ConfigError."""
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.mode == "modes" and self.family != "qaffine":
            raise ConfigError("--mode modes applies to the qaffine family only")
        if self.truncation < 1 or self.seeds < 1 or self.trials < 1:
            raise ConfigError("truncation, seeds and trials must be positive")
        c = self.cartan()
        nu = self.nu if isinstance(self.nu, str) else {k: Fraction(v) for k, v in self.nu.items()}
        cfg = make_config(
            c, self.family, self.m, nu=nu, rsplit=self.rsplit,
            lattice=self.lattice if self.family == "uqg" else None, l_plus=self.l_plus,
        )
        return c, cfg


# -- flag parsing ----------------------------------------------------------------


def _ints(s: str) -> list[int]:
    s = s.strip()
    return [int(x) for x in s.split(",") if x.strip()] if s else []


def _matrix(s: str) -> list[list[int]]:
    s = s.strip()
    if s.startswith("["):
        return json.loads(s)
    return [_ints(r) for r in s.split(";")]


def _nu(s: str):
    if s.strip() in ("symbolic", ""):
        return "symbolic"
    out = {}
    for part in s.split(","):
        k, _, v = part.partition("=")
        if not v:
            raise argparse.ArgumentTypeError(f"--nu expects name=value pairs, got {part!r}")
        out[k.strip()] = str(Fraction(v.strip()))
    return out


def _rsplit(s: str) -> list[list[int]]:
    return [_ints(r) for r in s.split(";")]


def _lattice(s: str):
    s = s.strip()
    if s.lower() in ("adjoint", "simply-connected", "sc", "q", "p"):
        return s.lower()
    return _matrix(s)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtorus", description="Verify difference-operator representations of Yangians and quantum groups.")
    p.add_argument("--version", action="version", version=f"qtorus {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def config_flags(sp):
        sp.add_argument("--config", help="JSON config file; flags override its fields")
        sp.add_argument("--family", choices=("yangian", "yangian-borel", "qaffine", "uqg"))
        sp.add_argument("--type", help="Cartan series A..G")
        sp.add_argument("--rank", type=int)
        sp.add_argument("--matrix", type=_matrix, help='Cartan matrix, rows split by ";" (e.g. "2,-1;-1,2")')
        sp.add_argument("--m", type=_ints, help="multiplicities m_i, comma separated")
        sp.add_argument("--nu", type=_nu, help='"symbolic" or name=value pairs (e.g. nu_1_1=1/2,w_1_1=3)')
        sp.add_argument("--rsplit", type=_rsplit, help='R+ factor indices per node, nodes split by ";"')
        sp.add_argument("--lattice", type=_lattice, help="adjoint, simply-connected or an n-matrix (uqg)")
        sp.add_argument("--l-plus", dest="l_plus", type=_ints, help="numerator degrees for yangian-borel")
        sp.add_argument("--out", help="write the JSON document here instead of stdout")
        sp.add_argument("--verbose", "-v", action="store_true")

    v = sub.add_parser("verify", help="check every defining relation")
    config_flags(v)
    v.add_argument("--mode", choices=MODES)
    v.add_argument("--truncation", type=int, help="mode window |n| <= N for --mode modes")
    v.add_argument("--seed", type=int)
    v.add_argument("--seeds", type=int, help="number of random specializations (--mode random)")
    v.add_argument("--trials", type=int, help="evaluation points per specialization")
    v.add_argument("--timings", action="store_true", help="include wall times (breaks byte stability)")

    g = sub.add_parser("print-generators", help="print the generators of a configuration")
    config_flags(g)
    g.add_argument("--format", choices=("text", "json"), default="text")

    s = sub.add_parser("selfcheck", help="run the built-in invariant suite")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--verbose", "-v", action="store_true")
    s.add_argument("--timings", action="store_true")
    return p


def config_from_args(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    cfg = RunConfig.from_json(base)
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    return cfg


def _emit(doc: dict, out: str | None):
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _progress(total):
    count = [0]

    def report(r):
        count[0] += 1
        print(f"[{count[0]}/{total}] {r.instance.label()}: {r.status}", file=sys.stderr, flush=True)

    return report


def cmd_verify(args) -> int:
    cfg = config_from_args(args)
    c, rep_cfg = cfg.validate()
    t0 = time.perf_counter()
    g = build(c, rep_cfg)
    from .relations import relation_instances

    n = len(relation_instances(g.family, c))
    report = verify(
        g, cfg.mode, N=cfg.truncation, seeds=cfg.seeds, trials=cfg.trials, seed=cfg.seed, progress=_progress(n)
    )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "qtorus", "version": __version__},
        "command": "verify",
        "run_config": cfg.to_json(),
        "cartan": c.to_json(),
        "report": report.to_json(verbose=args.verbose, timings=args.timings),
    }
    if args.timings:
        doc["runtime_seconds"] = round(time.perf_counter() - t0, 3)
    _emit(doc, args.out)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    totals = report.totals()
    print(f"{report.status}: {totals['pass']} pass, {totals['fail']} fail, {totals['skipped']} skipped", file=sys.stderr)
    return 0 if report.status == "pass" else 1


def describe_generators(g) -> dict:
    """Text and structured forms of every generator."""
    out = {}
    n = g.rank
    if g.family in ("yangian", "yangian-borel"):
        names = [("H", g.H), ("E", g.E)] + ([("F", g.F)] if g.family == "yangian" else [])
        for i in range(n):
            for name, fn in names:
                x = fn(i, "u")
                out[f"{name}_{i + 1}(u)"] = {"text": str(x), "terms": x.to_json()}
    elif g.family == "qaffine":
        for i in range(n):
            k = g.K(i, "z")
            out[f"K_{i + 1}(z)"] = {"text": str(k), "terms": k.to_json()}
            for name, fn in (("E", g.E), ("F", g.F)):
                x = fn(i, "z")
                out[f"{name}_{i + 1}(z)"] = {"text": str(x), "terms": x.to_json()}
    else:
        for i in range(n):
            for name, x in (("K_beta", g.Kbeta(i)), ("K", g.K(i)), ("E", g.E(i)), ("F", g.F(i))):
                out[f"{name}_{i + 1}"] = {"text": str(x), "terms": x.to_json()}
    return out


def cmd_print_generators(args) -> int:
    cfg = config_from_args(args)
    c, rep_cfg = cfg.validate()
    g = build(c, rep_cfg)
    gens = describe_generators(g)
    if args.format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "qtorus", "version": __version__},
            "command": "print-generators",
            "run_config": cfg.to_json(),
            "config": rep_cfg.to_json(),
            "generators": gens,
        }
        _emit(doc, args.out)
    else:
        text = "".join(f"{k} = {v['text']}\n" for k, v in gens.items())
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0


def cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    t0 = time.perf_counter()
    results = run_selfcheck(seed=args.seed, progress=lambda name, ok: print(f"{name}: {'ok' if ok else 'FAIL'}", file=sys.stderr))
    ok = all(r["status"] == "pass" for r in results)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "qtorus", "version": __version__},
        "command": "selfcheck",
        "seed": args.seed,
        "status": "pass" if ok else "fail",
        "checks": results,
    }
    if args.timings:
        doc["runtime_seconds"] = round(time.perf_counter() - t0, 3)
    _emit(doc, args.out)
    return 0 if ok else 1


COMMANDS = {"verify": cmd_verify, "print-generators": cmd_print_generators, "selfcheck": cmd_selfcheck}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING, stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (QTorusError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
