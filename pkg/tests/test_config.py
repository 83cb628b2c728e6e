from pathlib import Path

import pytest

from mca.assemblies import check_assembly, check_morphism
from mca.config import ConfigError, RunConfig, load_config, parse_code, parse_prop, parse_table, parse_value
from mca.effects import Cont, halt
from mca.frame import Base, Conj, TopP, UImpl
from mca.order import StatePred, TwoPoint, UpperSets
from mca.syntax import Closure, Var

DATA = Path(__file__).parent / "data"
I1 = Closure(1, Var(0))


def test_defaults():
    cfg = load_config()
    assert cfg == RunConfig().validate()
    assert cfg.effect == "partial" and cfg.fuel == 10_000


def test_props_and_assemblies():
    cfg = load_config(str(DATA / "example.ini"))
    assert (cfg.fuel, cfg.seed) == (5000, 4)
    one = cfg.props["one"]
    assert one == Base.of({I1: True}, False)
    assert cfg.props["both"] == Conj(one, TopP())
    assert cfg.props["arrow"] == UImpl(one, (one, cfg.props["both"]))
    core = cfg.make_core()
    X = cfg.assemblies["X"]
    assert X.carrier == ("x", "y")
    assert check_assembly(core, X).ok
    f = cfg.morphisms["f"]
    assert f("y") == "x"
    assert check_morphism(core, f).ok


def test_continuations_and_pole():
    cfg = load_config(str(DATA / "cps.ini"))
    eff = cfg.make_effect()
    names = [k.name for k in eff.dictionary]
    assert names == ["halt", "const ok", "const abort", "t1"]
    t1 = eff.dictionary[3]
    assert t1(I1) == "ok" and t1(Closure(1, Var(1))) == "abort"
    assert eff.pole == frozenset({"ok"})
    assert cfg.make_core().separator.name == "pl"


def test_poset_section():
    cfg = load_config(str(DATA / "poset.ini"))
    assert cfg.poset.le("a", "c") and not cfg.poset.le("b", "c")


def test_overrides_win():
    cfg = load_config(str(DATA / "example.ini"), {"fuel": 7, "seed": None})
    assert cfg.fuel == 7 and cfg.seed == 4


def test_parse_table():
    table, default = parse_table("{ <1|0>: ok, <0|0 <1|1>>: abort, default: abort }")
    assert list(table.values()) == ["ok", "abort"] and default == "abort"
    with pytest.raises(ConfigError):
        parse_table("<1|0>: ok")
    with pytest.raises(ConfigError):
        parse_table("{ <1|0> ok }")


def test_parse_values():
    assert parse_value("top", TwoPoint()) is True
    H = StatePred(range(4))
    assert parse_value("up(2)", H) == H.at_least(2)
    with pytest.raises(ConfigError):
        parse_value("up(9)", H)
    with pytest.raises(ConfigError):
        parse_value("maybe", TwoPoint())


def test_parse_prop_errors():
    H = TwoPoint()
    with pytest.raises(ConfigError):
        parse_prop("conj(top)", H)
    with pytest.raises(ConfigError):
        parse_prop("uimpl(top, top)", H)
    with pytest.raises(ConfigError):
        parse_prop("uimpl(top, [" + ", ".join(["top"] * 9) + "])", H)
    with pytest.raises(ConfigError):
        parse_prop("whatever", H)


def test_parse_code_wants_a_literal():
    assert parse_code(" <1|0> ") == I1
    with pytest.raises(ConfigError):
        parse_code("<0|0> <1|0>")


@pytest.mark.parametrize("text,message", [
    ("[run]\neffect = quantum\n", "unknown effect"),
    ("[run]\nfuel = 0\n", "fuel"),
    ("[state]\nprobes = -1 2\n", "probe"),
    ("[cps]\nanswers = ok\npole = elsewhere\n", "pole"),
    ("[run]\neffect = state\ntimeout_as_bottom = yes\n", "timeout"),
    ("[params]\nflag = 2\n", "0 or 1"),
    ("[poset]\npoints = a\ncovers = a < z\n", "unknown point"),
    ("[assembly X]\nx = top\n", "PROP by CODE"),
    ("[run\n", "cannot read"),
])
def test_bad_configs(tmp_path, text, message):
    p = tmp_path / "bad.ini"
    p.write_text(text)
    with pytest.raises(ConfigError, match=message):
        load_config(str(p))


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.ini")


def test_cont_table_default_halts():
    cfg = load_config(str(DATA / "cps.ini"))
    assert isinstance(cfg.continuations[0], Cont) and cfg.continuations[0] is halt
