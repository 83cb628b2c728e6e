import io
import json
from pathlib import Path

import pytest

from mca.cli import EXIT_FAIL, EXIT_FUEL, EXIT_OK, EXIT_PARSE, EXIT_SAMPLED, EXIT_STUCK, main
from mca.effects import church
from mca.syntax import show_code

DATA = Path(__file__).parent / "data"


def run(*argv):
    out = io.StringIO()
    rc = main(list(argv), out=out)
    return rc, out.getvalue()


def reports(text):
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


def test_flip():
    assert run("eval", "--effect=power", "#flip <0|0>") == (EXIT_OK, "{<1|0>, <1|1>}\n")


def test_identity():
    assert run("eval", "<0|0> <1|0>") == (EXIT_OK, "<1|0>\n")


def test_counter_demo():
    rc, out = run("eval", "--effect=state", "--state0=0", "<0|#get 0> (#inc (#inc <0|0>))")
    assert rc == EXIT_OK
    assert out == f"0: {{(2, {show_code(church(2))})}}\n"


def test_reader_params_flag():
    rc, out = run("eval", "--effect=reader", "--params=on=1;marked={<1|0>: 0, default: 1}",
                  "#search <1|0>")
    assert rc == EXIT_OK
    assert out.splitlines() == ["on: {<1|1>}", "marked: {<1|0>}"]


def test_cps_eval_prints_each_continuation():
    rc, out = run("eval", "--effect=cps", "#cc <0|0 <1|0> <1|1>>")
    assert out.splitlines() == ["halt: <1|0>", "const ok: ok", "const abort: abort"]


def test_omega_is_out_of_fuel():
    assert run("eval", "--fuel=100", "<0|0 0> <0|0 0>")[0] == EXIT_FUEL
    assert run("machine", "--fuel=100", "<0|0 0> <0|0 0>")[0] == EXIT_FUEL


def test_parse_and_scope_errors():
    assert run("eval", "<0|0")[0] == EXIT_PARSE
    assert run("eval", "<0|1>")[0] == EXIT_PARSE


def test_machine_outcomes():
    assert run("machine", "<0|0> <1|0>") == (EXIT_OK, "<1|0>\n")
    assert run("machine", "#flip <1|0>")[0] == EXIT_STUCK


def test_machine_trace_matches_golden():
    rc, out = run("machine", "--trace", "--sk", "S K K <1|1>")
    assert rc == EXIT_OK
    assert out == (DATA.parent / "golden" / "skk0.trace").read_text()


def test_compile():
    assert run("compile", "0", "0") == (EXIT_OK, "S K K\n")
    assert run("compile", "1", "0") == (EXIT_OK, "K\n")


def test_bad_flag_combination():
    assert run("eval", "--effect=state", "--timeout-as-bottom", "<1|0>")[0] == EXIT_STUCK


def test_check_mca():
    rc, out = run("check", "mca", "--instances=20")
    assert rc == EXIT_OK
    (rep,) = reports(out)
    assert rep["verdict"] == "exact-pass"
    assert set(rep["laws"]) == {"<0|e> . c = eval e[c]", "<n+1|e> . c = ret <n|e[c]>"}


def test_check_heyting_with_a_poset():
    rc, out = run("check", "heyting", f"--config={DATA / 'poset.ini'}")
    assert rc == EXIT_OK and len(reports(out)) == 1


def test_check_frame_cps_separators():
    assert run("check", "frame", "--effect=cps", "--separator=pl", "--instances=5")[0] == EXIT_SAMPLED
    rc, out = run("check", "frame", "--effect=cps", "--separator=all", "--instances=5")
    assert rc == EXIT_FAIL
    assert any(r["verdict"] == "fail" for r in reports(out))


def test_check_consistency_inf_only():
    rc, out = run("check", "consistency", "--modality=inf-only", "--instances=6")
    assert rc == EXIT_FAIL
    assert "progress  pass" in out and "<0|<0|0 0> <0|0 0>> . " in out
    assert "<0|<0|0 0> <0|0 0>> certifies top <= bot" in out


def test_check_assembly_from_config():
    rc, out = run("check", "assembly", f"--config={DATA / 'example.ini'}")
    # label y is realized by top, which is only checked on probes
    assert rc == EXIT_SAMPLED
    assert [r["report"] for r in reports(out)] == ["assembly X (partial/all)",
                                                  "morphism f: X -> X (partial/all)"]


@pytest.mark.parametrize("suite", ["sk", "bracket", "modality", "tripos"])
def test_other_suites_pass(suite):
    rc, out = run("check", suite, "--instances=5")
    assert rc in (EXIT_OK, EXIT_SAMPLED), out


def test_config_error():
    assert run("eval", "--config=/nonexistent.ini", "<1|0>")[0] == EXIT_STUCK


def test_unknown_suite_exits_through_argparse():
    with pytest.raises(SystemExit):
        main(["check", "everything"])
