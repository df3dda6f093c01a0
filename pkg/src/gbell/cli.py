"""Command-line front end: ``gbell <subcommand> ...``.

Settings come from flags, then ``GBELL_*`` environment variables, then a
JSON config file (``--config`` or ``GBELL_CONFIG``), then defaults.
Exit status: 0 success/PASS, 1 check failure or computation error, 2 usage
error or unreadable input.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from . import inequalities as ineqs
from .behavior import bob_marginal, dump_behavior, load_behavior
from .errors import (
    FormatError,
    GBellError,
    IncompatibleSetError,
    InvalidInequalityError,
    InvalidPairError,
    InvalidScenarioError,
    PreconditionError,
    ScenarioMismatchError,
)
from .geometry import (
    enumerate_vertices,
    nd_hrep,
    write_ieq,
    write_poi,
)
from .quantifiers import check_quantifier_tradeoff, contextual_fraction
from .scenario import GeneralizedBellScenario, alice_side, dump_scenario, generalized_bell, load_scenario, n_cycle, peres_mermin

ENV_PREFIX = "GBELL_"
FORMATS = ("text", "structured", "csv")
VERIFY_CHECKS = (
    "result1",
    "result4",
    "lemma-d",
    "appendix-e",
    "appendix-f",
    "appendix-g",
    "eq11",
    "quantifier-tradeoff",
    "tradeoff-equivalence",
)


# bad arguments rather than failed computations
USAGE_ERRORS = (
    PreconditionError,
    InvalidScenarioError,
    InvalidInequalityError,
    InvalidPairError,
    ScenarioMismatchError,
    IncompatibleSetError,
)


@dataclass
class CliConfig:
    budget: int = 5_000_000
    tolerance: float = 1e-12
    threads: int = 1
    format: str = "text"
    long: bool = False
    seed: int = 0

    def validate(self) -> None:
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if not 0 < self.tolerance <= 1e-3:
            raise ValueError("tolerance must lie in (0, 1e-3]")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")


def _coerce(name: str, value):
    kind = {f.name: f.type for f in fields(CliConfig)}[name]
    if kind == "bool":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if kind == "int":
        return int(value)
    if kind == "float":
        return float(value)
    return str(value)


def resolve_config(args: argparse.Namespace, environ=None) -> CliConfig:
    environ = os.environ if environ is None else environ
    merged = asdict(CliConfig())
    path = getattr(args, "config", None) or environ.get(ENV_PREFIX + "CONFIG")
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise FileNotFoundError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from None
        unknown = set(data) - set(merged)
        if unknown:
            raise FormatError(f"unknown config keys: {sorted(unknown)}")
        merged.update({k: _coerce(k, v) for k, v in data.items()})
    for name in merged:
        env = environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            merged[name] = _coerce(name, env)
    for name in merged:
        v = getattr(args, name, None)
        if v is not None:
            merged[name] = v
    cfg = CliConfig(**merged)
    cfg.validate()
    return cfg


# -- output --------------------------------------------------------------------------

def _str(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return float(f"{v:.12g}")
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


def emit(record: dict, fmt: str, out) -> None:
    """One flat-ish record in the chosen format."""
    if fmt == "structured":
        out.write(json.dumps(_plain(record), indent=2) + "\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in record.items():
            w.writerow([k, json.dumps(_plain(v)) if isinstance(v, (dict, list, tuple)) else _str(v)])
    else:
        for k, v in record.items():
            out.write(f"{k}: {json.dumps(_plain(v)) if isinstance(v, (dict, list, tuple)) else _str(v)}\n")


# -- scenario arguments -----------------------------------------------------------------

def _bob(spec: str):
    if spec in ("pm", "peres-mermin"):
        return peres_mermin()
    if spec.isdigit():
        return n_cycle(int(spec))
    raise argparse.ArgumentTypeError(f"Bob scenario is an n-cycle size or 'pm', got {spec!r}")


def _scenario_from_args(args):
    if getattr(args, "scenario", None):
        return load_scenario(args.scenario)
    bob = _bob(args.bob)
    return generalized_bell(alice_side(args.alice), bob) if args.alice else bob


def _add_scenario_args(p):
    p.add_argument("--bob", default="5", help="n-cycle size, or 'pm' for Peres-Mermin (default 5)")
    p.add_argument("--alice", type=int, default=0, help="number of Alice settings; 0 for Bob alone")
    p.add_argument("--scenario", help="scenario file (overrides --bob/--alice)")


# -- subcommands ----------------------------------------------------------------------------

def cmd_scenario(args, cfg, out) -> int:
    s = _scenario_from_args(args)
    if args.out:
        dump_scenario(s, args.out)
    if args.export_porta:
        write_ieq(nd_hrep(s), args.export_porta + ".ieq")
    emit(
        {"scenario": s.name, "measurements": len(s.measurement_ids), "contexts": len(s.contexts), "dimension": s.dim},
        cfg.format,
        out,
    )
    return 0


def cmd_vertices(args, cfg, out) -> int:
    s = _scenario_from_args(args)
    h = nd_hrep(s)
    v = enumerate_vertices(h, budget=None if cfg.long else cfg.budget, checkpoint=args.checkpoint)
    if args.export_porta:
        write_ieq(h, args.export_porta + ".ieq")
        write_poi(v, args.export_porta + ".poi")
    emit({"scenario": s.name, "vertices": len(v), "dimension": s.dim}, cfg.format, out)
    return 0


def cmd_fractions(args, cfg, out) -> int:
    b = load_behavior(args.behavior)
    if isinstance(b.scenario, GeneralizedBellScenario):
        t = check_quantifier_tradeoff(b)
        record = {"NLF": t.nlf, "CF": t.cf, "NClF": t.nclf, "tradeoff_holds": t.holds}
    else:
        record = {"CF": contextual_fraction(b).value}
    emit(record, cfg.format, out)
    return 0


def _inequality(args) -> ineqs.Inequality:
    if args.file:
        return ineqs.load_inequality(args.file)
    name = args.name
    if name in ineqs.NAMED:
        return ineqs.NAMED[name]()
    if name == "nc":
        gamma = [int(x) for x in args.gamma.split(",")] if args.gamma else [1] * (args.n - 1) + [-1]
        return ineqs.ncycle_nc(len(gamma), gamma)
    if name == "chsh":
        return ineqs.chsh_usual(args.i, args.j, n=args.n)
    if name.startswith("chsh-"):
        return ineqs.chsh_generalized(name[5:], i=args.i, j=args.j, n=args.n)
    if name == "chained":
        return ineqs.chained(args.n)
    raise PreconditionError(f"unknown inequality {name!r}")


def cmd_ineq(args, cfg, out) -> int:
    i = _inequality(args)
    if args.out:
        ineqs.dump_inequality(i, args.out)
    sign = -1 if i.orientation == ">=" else 1
    record = {"label": i.label, "inequality": i.display(), "classical_bound": sign * i.classical_bound}
    if args.action == "evaluate":
        if not args.behavior:
            raise PreconditionError("evaluate needs --behavior")
        b = load_behavior(args.behavior)
        if b.scenario != i.scenario and isinstance(b.scenario, GeneralizedBellScenario) and b.scenario.bob == i.scenario:
            b = bob_marginal(b)
        value = ineqs.evaluate(i, b)
        record.update({"value": sign * value, "violated": value > i.classical_bound})
    elif args.action == "maximize":
        r = ineqs.maximize(i)
        record.update({"polytope_max": r.value, "optimizer": [str(x) for x in r.point]})
    elif args.action == "normalize":
        ni = ineqs.normalize(i)
        record.update({"polytope_max": ni.nsnd_max, "normalized": str(ni)})
    emit(record, cfg.format, out)
    return 0


def _verify_reports(args, cfg):
    from . import verify as V

    n = args.n
    if args.check == "result1":
        return [V.check_result1(n or 3, long=cfg.long, budget=cfg.budget, checkpoint=args.checkpoint, seed=cfg.seed)]
    if args.check == "result4":
        return [V.check_result4(n or 5)]
    if args.check == "lemma-d":
        return [V.check_lemma_equal_mixtures(k) for k in ([n] if n else range(3, 7))]
    if args.check == "appendix-e":
        return [V.check_max_violation_implies_nc(f, n or 4, budget=cfg.budget) for f in ("pair-pair", "single-pair")]
    if args.check == "appendix-f":
        return [V.check_max_violation_implies_nc("chained", n or 3, budget=cfg.budget)]
    if args.check == "appendix-g":
        return [V.pm_counterexample()[1]]
    if args.check == "eq11":
        return [V.check_monogamy(n or 5)]
    if args.check == "quantifier-tradeoff":
        return [V.check_quantifier_tradeoff_sample(n or 3, count=args.samples, seed=cfg.seed)]
    return [V.check_tradeoff_equivalence(n or 3, seed=cfg.seed)]


def cmd_verify(args, cfg, out) -> int:
    reports = _verify_reports(args, cfg)
    if cfg.format == "structured":
        payload = {
            "reports": [r.to_dict() for r in reports],
            "summary": {r.check: r.status for r in reports},
            "status": "PASS" if all(r.passed for r in reports) else "FAIL",
        }
        out.write(json.dumps(_plain(payload), indent=2, default=str) + "\n")
    elif cfg.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["check", "key", "value"])
        for r in reports:
            for k, v in r.summary.items():
                w.writerow([r.check, k, json.dumps(_plain(v)) if isinstance(v, (dict, list)) else _str(v)])
            w.writerow([r.check, "status", r.status])
    else:
        for r in reports:
            out.write(r.to_text())
    return 0 if all(r.passed for r in reports) else 1


def cmd_quantum(args, cfg, out) -> int:
    from . import quantum as Q
    from .quantifiers import nonclassical_fraction, nonlocal_fraction

    setup = Q.load_setup(args.setup) if args.setup else Q.pentagon_setup()
    if args.action == "sweep":
        k = args.points
        vis = [j / (k - 1) for j in range(k)] if k > 1 else [1.0]
        points = Q.noise_sweep(setup, vis)
        if cfg.format == "structured":
            out.write(json.dumps([_plain(vars(p)) for p in points], indent=2) + "\n")
        else:
            out.write(Q.sweep_csv(points))
        return 0
    b = setup.behavior()
    r = Q.rationalize(b, cfg.tolerance)
    e = r.behavior
    if args.out:
        dump_behavior(e, args.out)
    record = {
        "conditional_pentagon_value": Q.conditional_pentagon_value(b),
        "classicality_value": Q.classicality_value(b),
        "reference_5_minus_4_sqrt5": 5 - 4 * 5 ** 0.5,
        "rationalization_radius": r.radius,
        "NLF": nonlocal_fraction(e).value,
        "CF_bob": contextual_fraction(bob_marginal(e)).value,
        "NClF": nonclassical_fraction(e).value,
    }
    record["NClF_float"] = float(record["NClF"])
    emit(record, cfg.format, out)
    return 0


# -- parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default=None, help="output format (default text)")
    common.add_argument("--long", action="store_const", const=True, default=None, help="allow long-running enumerations")
    common.add_argument("--seed", type=int, default=None, help="PRNG seed for sampled checks")
    common.add_argument("--budget", type=int, default=None, help="max intermediate rays during enumeration")
    common.add_argument("--threads", type=int, default=None, help="worker threads (recorded; computation is serial)")
    common.add_argument("--tolerance", type=float, default=None, help="rationalization tolerance")
    common.add_argument("--config", default=None, help="JSON config file")

    p = argparse.ArgumentParser(prog="gbell", description="Generalized Bell scenarios: polytopes, fractions and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scenario", parents=[common], help="describe and write a scenario file")
    _add_scenario_args(s)
    s.add_argument("--out", help="write the scenario file here")
    s.add_argument("--export-porta", metavar="PREFIX", help="also write PREFIX.ieq")
    s.set_defaults(func=cmd_scenario)

    s = sub.add_parser("vertices", parents=[common], help="enumerate ND/NSND vertices")
    _add_scenario_args(s)
    s.add_argument("--checkpoint", help="checkpoint file for resumable enumeration")
    s.add_argument("--export-porta", metavar="PREFIX", help="write PREFIX.ieq and PREFIX.poi")
    s.set_defaults(func=cmd_vertices)

    s = sub.add_parser("fractions", parents=[common], help="CF / NLF / NClF of a behavior file")
    s.add_argument("--behavior", required=True)
    s.set_defaults(func=cmd_fractions)

    s = sub.add_parser("ineq", parents=[common], help="construct, evaluate, normalize or maximize an inequality")
    s.add_argument("action", choices=("show", "evaluate", "normalize", "maximize"))
    s.add_argument("name", nargs="?", default="kcbs", help="kcbs, nc, chsh, chsh-<variant>, chained, peres-mermin, ...")
    s.add_argument("--file", help="inequality file (overrides name)")
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--i", type=int, default=0)
    s.add_argument("--j", type=int, default=2)
    s.add_argument("--gamma", help="comma-separated +-1 signs for 'nc'")
    s.add_argument("--behavior", help="behavior file for 'evaluate'")
    s.add_argument("--out", help="write the inequality file here")
    s.set_defaults(func=cmd_ineq)

    s = sub.add_parser("verify", parents=[common], help="run a reproduction check")
    s.add_argument("check", choices=VERIFY_CHECKS)
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--checkpoint", help="checkpoint file for the vertex enumeration")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("quantum", parents=[common], help="the separable pentagon construction")
    s.add_argument("action", choices=("appendix-c", "sweep"))
    s.add_argument("--setup", help="quantum setup file (default: built-in pentagon setup)")
    s.add_argument("--points", type=int, default=11, help="visibility grid size for 'sweep'")
    s.add_argument("--out", help="write the rationalized behavior here")
    s.set_defaults(func=cmd_quantum)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg, out)
    except FileNotFoundError as exc:
        print(f"gbell: file not found: {exc.filename or exc}", file=sys.stderr)
        return 2
    except (FormatError, ValueError) as exc:
        print(f"gbell: {exc}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"gbell: {exc}", file=sys.stderr)
        return 2
    except GBellError as exc:
        print(f"gbell: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
