"""Run configuration: an INI file plus command-line overrides.

Example::

    [run]
    effect = cps
    fuel = 10000
    seed = 0
    modality = exact
    separator = pl

    [state]
    state0 = 0
    probes = 0 1 2 3 4 5 6 7 8

    [cps]
    answers = ok abort
    pole = ok
    continuations = halt; const ok; const abort; table t1 { <1|0>: ok, default: abort }

    [params]
    zero = 0
    marked = { <1|0>: 1, default: 0 }

    [poset]
    points = a b c
    covers = a < b, a < c

    [props]
    phi = base { <1|0>: top, <1|1>: bot, default: bot }
    both = conj(phi, top)
    arrow = uimpl(phi, [phi, both])

    [assembly X]
    x = phi by <0|<1|0>>

    [morphism f]
    source = X
    target = X
    map = x -> x
    tracker = <0|0>

Codes inside tables and after ``by``/``tracker`` use the term grammar and
must be literal codes.  Truth values are ``top``, ``bot``, or ``up(p q)``
(the upper set generated by the listed points).
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from typing import Any

from .effects import (DEFAULT_ANSWERS, DEFAULT_PARAMS, DEFAULT_POLE, EFFECTS, Cont, Param,
                      const, halt, make_effect)
from .order import Heyting, Preorder, StatePred, UpperSets
from .syntax import Code, Lit, ParseError, parse

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_code", "parse_prop",
           "parse_value", "parse_table"]


class ConfigError(ValueError):
    """A configuration value is malformed or names something unknown."""


def parse_code(text: str) -> Code:
    e = parse(text.strip())
    if not isinstance(e, Lit):
        raise ConfigError(f"{text.strip()!r} is not a literal code")
    return e.code


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside brackets of any kind."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "<([{":
            depth += 1
        elif ch in ">)]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def parse_table(text: str) -> tuple[dict, str | None]:
    """``{ code: value, ..., default: value }`` as ``({code: raw}, raw default)``."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ConfigError(f"expected a braced table, got {text!r}")
    table: dict = {}
    default = None
    for entry in _split_top(text[1:-1]):
        key, sep, value = entry.rpartition(":")
        if not sep:
            raise ConfigError(f"table entry {entry!r} lacks ':'")
        key, value = key.strip(), value.strip()
        if key == "default":
            default = value
        else:
            try:
                table[parse_code(key)] = value
            except ParseError as exc:
                raise ConfigError(f"bad code {key!r} in table: {exc}") from exc
    return table, default


def parse_value(text: str, H: Heyting):
    t = text.strip()
    if t in ("top", "1", "true"):
        return H.top
    if t in ("bot", "0", "false"):
        return H.bottom
    m = re.fullmatch(r"up\((.*)\)", t)
    if m and isinstance(H, UpperSets):
        pts = []
        for tok in m.group(1).split():
            p = int(tok) if isinstance(H, StatePred) else tok
            if p not in H.poset.points:
                raise ConfigError(f"unknown point {tok!r} in {t!r}")
            pts.append(p)
        return H.close(pts)
    raise ConfigError(f"bad truth value {t!r} for {H.name}")


def parse_prop(text: str, H: Heyting, env: dict | None = None):
    """A proposition literal; names in ``env`` refer to earlier propositions."""
    from .frame import Base, BotP, Conj, TopP, UImpl

    env = env or {}
    t = text.strip()
    if t == "top":
        return TopP()
    if t == "bot":
        return BotP()
    if t in env:
        return env[t]
    if t.startswith("base"):
        table, default = parse_table(t[4:])
        vals = {k: parse_value(v, H) for k, v in table.items()}
        return Base.of(vals, parse_value(default or "bot", H))
    m = re.fullmatch(r"conj\((.*)\)", t, re.S)
    if m:
        parts = _split_top(m.group(1))
        if len(parts) != 2:
            raise ConfigError(f"conj takes two propositions: {t!r}")
        return Conj(parse_prop(parts[0], H, env), parse_prop(parts[1], H, env))
    m = re.fullmatch(r"uimpl\((.*)\)", t, re.S)
    if m:
        parts = _split_top(m.group(1))
        if len(parts) != 2 or not (parts[1].startswith("[") and parts[1].endswith("]")):
            raise ConfigError(f"uimpl takes a proposition and a [list]: {t!r}")
        fam = tuple(parse_prop(q, H, env) for q in _split_top(parts[1][1:-1]))
        if len(fam) > 8:
            raise ConfigError("a uimpl family has at most 8 members")
        return UImpl(parse_prop(parts[0], H, env), fam)
    raise ConfigError(f"cannot read proposition {t!r}")


def _parse_cont(text: str) -> Cont:
    t = text.strip()
    if t == "halt":
        return halt
    if t.startswith("const "):
        return const(t[6:].strip())
    m = re.fullmatch(r"table\s+(\S+)\s*(\{.*\})", t, re.S)
    if m:
        table, default = parse_table(m.group(2))
        items = tuple(sorted(table.items(), key=lambda kv: kv[0]._h))
        if default in (None, "halt"):
            return Cont(m.group(1), items)
        return Cont(m.group(1), items, default)
    raise ConfigError(f"cannot read continuation {t!r}")


def _parse_param(name: str, text: str) -> Param:
    t = text.strip()
    if t in ("0", "1"):
        return Param(name, (), int(t))
    if not t.startswith("{"):
        raise ConfigError(f"parameter {name} takes values 0 or 1, or a braced table")
    table, default = parse_table(t)
    try:
        vals = {k: int(v) for k, v in table.items()}
        d = int(default or 0)
    except ValueError as exc:
        raise ConfigError(f"parameter {name} takes values 0 or 1") from exc
    if any(v not in (0, 1) for v in [*vals.values(), d]):
        raise ConfigError(f"parameter {name} takes values 0 or 1")
    return Param.of(name, vals, d)


def _answer(tok: str):
    """Pole and answer entries are names, or codes when they parse as one."""
    try:
        return parse_code(tok)
    except (ParseError, ConfigError):
        return tok


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"expected whole numbers, got {text!r}") from exc


@dataclass
class RunConfig:
    effect: str = "partial"
    fuel: int = 10_000
    seed: int = 0
    modality: str | None = None
    separator: str | None = None
    timeout_as_bottom: bool = False
    state0: int | None = None
    probes: tuple = tuple(range(9))
    answers: tuple = DEFAULT_ANSWERS
    pole: frozenset = DEFAULT_POLE
    continuations: tuple = ()
    params: tuple = DEFAULT_PARAMS
    poset: Preorder | None = None
    props: dict = field(default_factory=dict)
    assemblies: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.effect not in EFFECTS:
            raise ConfigError(f"unknown effect {self.effect!r}; expected one of {', '.join(EFFECTS)}")
        if self.fuel <= 0:
            raise ConfigError("fuel must be positive")
        if not self.probes or min(self.probes) < 0:
            raise ConfigError("probe states must be a nonempty set of naturals")
        if any(isinstance(a, str) and a not in self.answers for a in self.pole):
            raise ConfigError("named pole answers must be among the declared answers")
        if self.timeout_as_bottom and self.effect not in ("partial", "power"):
            raise ConfigError("--timeout-as-bottom applies to the partial and power effects only")
        return self

    def make_effect(self):
        dictionary = self.continuations or None
        return make_effect(self.effect, timeout_as_bottom=self.timeout_as_bottom,
                           probe_states=self.probes, params=self.params,
                           dictionary=dictionary, answers=self.answers, pole=self.pole)

    def make_core(self):
        from .frame import make_core

        return make_core(self.make_effect(), self.modality, self.separator,
                         fuel=min(self.fuel, 2000))


def load_config(path: str | None = None, overrides: dict[str, Any] | None = None) -> RunConfig:
    """Read ``path`` (if given), then apply non-``None`` ``overrides``."""
    cfg = RunConfig()
    raw_props: list[tuple[str, str]] = []
    raw_asm: dict = {}
    raw_mor: dict = {}
    if path is not None:
        cp = configparser.ConfigParser(interpolation=None, delimiters=("=",))
        cp.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if cp.has_section("run"):
            r = cp["run"]
            cfg.effect = r.get("effect", cfg.effect)
            cfg.fuel = r.getint("fuel", cfg.fuel)
            cfg.seed = r.getint("seed", cfg.seed)
            cfg.modality = r.get("modality", cfg.modality)
            cfg.separator = r.get("separator", cfg.separator)
            cfg.timeout_as_bottom = r.getboolean("timeout_as_bottom", cfg.timeout_as_bottom)
        if cp.has_section("state"):
            st = cp["state"]
            if "state0" in st:
                cfg.state0 = int(st["state0"])
            if "probes" in st:
                cfg.probes = _ints(st["probes"])
        if cp.has_section("cps"):
            c = cp["cps"]
            if "answers" in c:
                cfg.answers = tuple(_answer(a) for a in c["answers"].split())
            if "pole" in c:
                cfg.pole = frozenset(_answer(a) for a in c["pole"].split())
            if "continuations" in c:
                cfg.continuations = tuple(_parse_cont(t) for t in _split_top(c["continuations"], ";"))
        if cp.has_section("params"):
            cfg.params = tuple(_parse_param(k, v) for k, v in cp["params"].items())
        if cp.has_section("poset"):
            p = cp["poset"]
            points = p.get("points", "").split()
            covers = []
            for pair in filter(None, (x.strip() for x in p.get("covers", "").split(","))):
                a, sep, b = pair.partition("<")
                if not sep:
                    raise ConfigError(f"covering pair {pair!r} should read 'a < b'")
                covers.append((a.strip(), b.strip()))
            try:
                cfg.poset = Preorder(points, covers)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        if cp.has_section("props"):
            raw_props = list(cp["props"].items())
        for sec in cp.sections():
            kind, _, name = sec.partition(" ")
            if kind == "assembly" and name:
                raw_asm[name] = dict(cp[sec].items())
            elif kind == "morphism" and name:
                raw_mor[name] = dict(cp[sec].items())
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate()
    if raw_props or raw_asm:
        _resolve(cfg, raw_props, raw_asm, raw_mor)
    return cfg


def _resolve(cfg: RunConfig, raw_props, raw_asm, raw_mor) -> None:
    from .assemblies import Assembly, AsmMorphism
    from .modality import make_modality

    H = make_modality(cfg.make_effect(), cfg.modality).H
    for name, text in raw_props:
        cfg.props[name] = parse_prop(text, H, cfg.props)
    for name, entries in raw_asm.items():
        real, wit = {}, {}
        for label, text in entries.items():
            prop, sep, w = text.rpartition(" by ")
            if not sep:
                raise ConfigError(f"assembly {name}: label {label} needs 'PROP by CODE'")
            real[label] = parse_prop(prop, H, cfg.props)
            wit[label] = parse_code(w)
        cfg.assemblies[name] = Assembly(name, tuple(entries), real, wit)
    for name, entries in raw_mor.items():
        try:
            src = cfg.assemblies[entries["source"]]
            tgt = cfg.assemblies[entries["target"]]
            tracker = parse_code(entries["tracker"])
        except KeyError as exc:
            raise ConfigError(f"morphism {name}: missing or unknown {exc}") from exc
        mapping = {}
        for pair in filter(None, (x.strip() for x in entries.get("map", "").split(","))):
            a, sep, b = pair.partition("->")
            if not sep:
                raise ConfigError(f"morphism {name}: map entry {pair!r} should read 'x -> y'")
            mapping[a.strip()] = b.strip()
        try:
            cfg.morphisms[name] = AsmMorphism(name, src, tgt, mapping, tracker)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
