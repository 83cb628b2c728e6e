"""Command-line front end.

Exit codes: 0 value or exact pass, 1 law failure, 2 out of fuel (or every
instance indeterminate), 3 parse or scope error, 4 stuck or bad
configuration, 10 pass that relied on sampling.
"""
from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence

from . import machine
from .algebra import FuelExhausted, Stuck, bracket, check_bracket, check_mca_laws, check_sk_axioms, evaluate
from .config import ConfigError, RunConfig, load_config, parse_table
from .effects import EFFECTS, Param, State
from .gen import Gen
from .modality import (MODALITIES, check_modality, check_separator_progress, law_samples,
                       make_modality)
from .order import BrokenImpl, Preorder, StatePred, TwoPoint, UpperSets, check_heyting_laws
from .report import Report, Verdict
from .syntax import Closure, ParseError, ScopeError, parse, show, show_code

EXIT_OK, EXIT_FAIL, EXIT_FUEL, EXIT_PARSE, EXIT_STUCK, EXIT_SAMPLED = 0, 1, 2, 3, 4, 10

SUITES = ("mca", "sk", "bracket", "heyting", "modality", "frame", "consistency", "tripos",
          "assembly")


# -- suites -------------------------------------------------------------------

def suite_mca(cfg: RunConfig, n: int | None) -> list[Report]:
    eff = cfg.make_effect()
    g = Gen(cfg.seed, prims=sorted(eff.prims - {"k"}))
    closures = [g.closure(6, max_n=3) for _ in range(n or 500)]
    args = g.codes(2, depth=2)
    return [check_mca_laws(eff, closures, args, fuel=min(cfg.fuel, 500))]


def suite_sk(cfg: RunConfig, n: int | None) -> list[Report]:
    eff = cfg.make_effect()
    g = Gen(cfg.seed, prims=sorted(eff.prims - {"k"}))
    triples = [tuple(g.codes(3, depth=2)) for _ in range(n or 200)]
    return [check_sk_axioms(eff, triples, fuel=min(cfg.fuel, 500))]


def suite_bracket(cfg: RunConfig, n: int | None) -> list[Report]:
    eff = cfg.make_effect()
    g = Gen(cfg.seed, prims=sorted(eff.prims - {"k"}))
    closures = [g.closure(4, max_n=2) for _ in range(n or 100)]
    arg_lists = [g.codes(3, depth=2) for _ in range(3)]
    return [check_bracket(eff, closures, arg_lists, fuel=min(cfg.fuel, 500))]


def suite_heyting(cfg: RunConfig, n: int | None) -> list[Report]:
    if cfg.poset is not None:
        return [check_heyting_laws(UpperSets(cfg.poset))]
    diamond = Preorder("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    return [check_heyting_laws(H) for H in (
        TwoPoint(), UpperSets(Preorder.chain(["a", "b"])), UpperSets(diamond),
        StatePred(cfg.probes))]


def suite_modality(cfg: RunConfig, n: int | None) -> list[Report]:
    eff = cfg.make_effect()
    names = [cfg.modality] if cfg.modality else list(MODALITIES[eff.name])
    out = []
    for name in names:
        mod = make_modality(eff, name)
        out.append(check_modality(mod, law_samples(mod, n or 20, cfg.seed)))
    return out


def suite_frame(cfg: RunConfig, n: int | None) -> list[Report]:
    from .frame import check_consistency, check_ef_laws

    core = cfg.make_core()
    return [check_ef_laws(core, n or 100, cfg.seed), check_consistency(core, 200, cfg.seed)]


def suite_consistency(cfg: RunConfig, n: int | None) -> list[Report]:
    from .frame import check_consistency

    core = cfg.make_core()
    members = core.separator.generate(n or 25, cfg.seed)
    return [check_separator_progress(core.modality, core.separator, members, min(cfg.fuel, 500)),
            check_consistency(core, 200, cfg.seed)]


def suite_tripos(cfg: RunConfig, n: int | None) -> list[Report]:
    from .frame import check_tripos_laws

    return [check_tripos_laws(cfg.make_core(), n or 50, cfg.seed)]


def suite_assembly(cfg: RunConfig, n: int | None) -> list[Report]:
    from .assemblies import check_assembly, check_assembly_laws, check_morphism

    core = cfg.make_core()
    if not cfg.assemblies:
        return [check_assembly_laws(core, n or 50, cfg.seed)]
    out = [check_assembly(core, X) for X in cfg.assemblies.values()]
    out += [check_morphism(core, f) for f in cfg.morphisms.values()]
    return out


RUNNERS: dict[str, Callable[[RunConfig, int | None], list[Report]]] = {
    "mca": suite_mca, "sk": suite_sk, "bracket": suite_bracket, "heyting": suite_heyting,
    "modality": suite_modality, "frame": suite_frame, "consistency": suite_consistency,
    "tripos": suite_tripos, "assembly": suite_assembly,
}


def exit_code(reports: Sequence[Report]) -> int:
    verdicts = [r.verdict for r in reports]
    if Verdict.FAIL in verdicts:
        return EXIT_FAIL
    if verdicts and all(v is Verdict.UNKNOWN for v in verdicts):
        return EXIT_FUEL
    if Verdict.SAMPLED in verdicts:
        return EXIT_SAMPLED
    return EXIT_OK


# -- commands -----------------------------------------------------------------

def _show_computation(cfg: RunConfig, eff, m) -> str:
    if isinstance(eff, State):
        states = eff.probe_states if cfg.state0 is None else [cfg.state0]
        return eff.show(m, states)
    return eff.show(m)


def cmd_eval(args, cfg: RunConfig, out) -> int:
    e = parse(args.term)
    eff = cfg.make_effect()
    m = evaluate(eff, e, cfg.fuel)
    print(_show_computation(cfg, eff, m), file=out)
    return EXIT_OK


def cmd_machine(args, cfg: RunConfig, out) -> int:
    e = parse(args.term)
    if args.trace:
        states = machine.trace(e, cfg.fuel)
        out.write(machine.format_trace(states, sk=args.sk))
        last = states[-1]
        if isinstance(last, machine.Final):
            return EXIT_OK
        res = machine.run(e, cfg.fuel)
    else:
        res = machine.run(e, cfg.fuel)
        if res.status == "final":
            print(show_code(res.code, sk=args.sk), file=out)
            return EXIT_OK
    if res.status == "fuel":
        print(f"out of fuel after {res.applications} applications", file=sys.stderr)
        return EXIT_FUEL
    print(f"stuck: {res.message}", file=sys.stderr)
    return EXIT_STUCK


def cmd_compile(args, cfg: RunConfig, out) -> int:
    print(show(bracket(args.n, parse(args.term)), sk=True), file=out)
    return EXIT_OK


def cmd_check(args, cfg: RunConfig, out) -> int:
    reports = RUNNERS[args.suite](cfg, args.instances)
    for r in reports:
        print(r.text(), file=out)
    for r in reports:
        print(r.json(), file=out)
    return exit_code(reports)


# -- argument parsing ---------------------------------------------------------

def _parse_params(text: str) -> tuple:
    """``name=0;other={<1|0>: 1, default: 0}``."""
    out = []
    for item in filter(None, (x.strip() for x in text.split(";"))):
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--params entry {item!r} should read name=VALUE")
        value = value.strip()
        if value in ("0", "1"):
            out.append(Param(name.strip(), (), int(value)))
        else:
            table, default = parse_table(value)
            out.append(Param.of(name.strip(), {k: int(v) for k, v in table.items()},
                                int(default or 0)))
    return tuple(out)


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"expected whole numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--effect", choices=EFFECTS)
    common.add_argument("--fuel", type=int)
    common.add_argument("--state0", type=int, help="initial state to print (state effect)")
    common.add_argument("--probes", help="probe states, e.g. '0 1 2'")
    common.add_argument("--pole", help="answers inside the pole, e.g. 'ok'")
    common.add_argument("--params", help="reader parameters, e.g. 'zero=0;one=1'")
    common.add_argument("--separator", help="all, pl, pure")
    common.add_argument("--modality")
    common.add_argument("--seed", type=int)
    common.add_argument("--timeout-as-bottom", action="store_true", default=None,
                        help="read fuel exhaustion as divergence (partial/power; approximate)")

    p = argparse.ArgumentParser(prog="mca", description="Monadic combinatory algebra toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    ev = sub.add_parser("eval", parents=[common], help="evaluate a closed term")
    ev.add_argument("term")
    ma = sub.add_parser("machine", parents=[common], help="run the stack machine")
    ma.add_argument("term")
    ma.add_argument("--trace", action="store_true", help="print every configuration")
    ma.add_argument("--sk", action="store_true", help="print S and K by name")
    co = sub.add_parser("compile", parents=[common], help="bracket-abstract <n|term> to S/K")
    co.add_argument("n", type=int)
    co.add_argument("term")
    ch = sub.add_parser("check", parents=[common], help="run a law suite")
    ch.add_argument("suite", choices=SUITES)
    ch.add_argument("--instances", type=int, help="instances (per row where applicable)")
    return p


def config_from_args(args) -> RunConfig:
    overrides = {
        "effect": args.effect, "fuel": args.fuel, "state0": args.state0,
        "separator": args.separator, "modality": args.modality, "seed": args.seed,
        "timeout_as_bottom": args.timeout_as_bottom,
        "probes": _ints(args.probes) if args.probes else None,
        "pole": frozenset(args.pole.split()) if args.pole is not None else None,
        "params": _parse_params(args.params) if args.params else None,
    }
    return load_config(args.config, overrides)


COMMANDS = {"eval": cmd_eval, "machine": cmd_machine, "compile": cmd_compile, "check": cmd_check}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](args, cfg, out)
    except (ParseError, ScopeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FuelExhausted:
        print("out of fuel", file=sys.stderr)
        return EXIT_FUEL
    except Stuck as exc:
        print(f"stuck: {exc}", file=sys.stderr)
        return EXIT_STUCK
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_STUCK


if __name__ == "__main__":
    sys.exit(main())
