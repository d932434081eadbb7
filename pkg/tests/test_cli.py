import io
import json
import subprocess
import sys

from andorlab.combinatorics import count_trees
from andorlab.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_OK, EXIT_USAGE, parse_grid, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_count():
    code, out, err = call("count", "--n", "2", "--k", "2", "--model", "E")
    assert code == EXIT_OK and out == "6\n"
    meta = json.loads(err.split("# meta ", 1)[1])
    assert meta["params"]["n"] == 2 and "version" in meta and meta["seed"] == 0


def test_complexity_xor():
    code, out, _ = call("complexity", "--table", "m=2:0x6")
    assert code == EXIT_OK and out.strip() == "L=4 E=2 R=2"


def test_verify_bonferroni():
    code, out, _ = call("verify", "--suite", "bonferroni", "--n-max", "200")
    assert code == EXIT_OK and ",pass," in out


def test_verify_failure_exit_code():
    # the size-7 grid with k_n = n does not meet the r = 2 bound
    code, out, err = call("verify", "--suite", "lemma57")
    assert code == EXIT_FAIL and "FAIL" in err


def test_usage_errors():
    assert call("bogus")[0] == EXIT_USAGE
    assert call("count", "--n", "0", "--k", "2")[0] == EXIT_USAGE
    assert call("count", "--n", "2")[0] == EXIT_USAGE
    assert call("complexity", "--table", "zz")[0] == EXIT_USAGE
    assert call("dist", "--n", "2..4", "--k", "2")[0] == EXIT_USAGE
    assert call("verify", "--suite", "nope")[0] == EXIT_USAGE
    assert call("thresholds", "--n", "10", "--k", "3", "--k-rule", "sqrt")[0] == EXIT_USAGE


def test_budget_exit_code():
    code, _, err = call("enumerate", "--n", "6", "--k", "3", "--model", "G", "--budget", "1000")
    assert code == EXIT_BUDGET
    assert str(count_trees(6, 3, "G")) in err


def test_enumerate_and_json():
    code, out, _ = call("enumerate", "--n", "2", "--k", "1", "--model", "E", "--format", "json")
    payload = json.loads(out)
    assert code == EXIT_OK and len(payload["rows"]) == 4
    assert {"seed", "generator", "version"} <= set(payload["meta"])


def test_sample_deterministic_and_thread_independent():
    a = call("sample", "--n", "6", "--k", "3", "--model", "G", "--samples", "70000", "--event", "tautology", "--seed", "5")
    b = call("sample", "--n", "6", "--k", "3", "--model", "G", "--samples", "70000", "--event", "tautology", "--seed", "5", "--threads", "2")
    assert a[0] == b[0] == EXIT_OK and a[1] == b[1]
    code, out, _ = call("sample", "--n", "3", "--k", "2", "--model", "E", "--samples", "5")
    assert code == EXIT_OK and len(out.strip().splitlines()) == 6


def test_dist_and_tautology():
    code, out, _ = call("dist", "--n", "2", "--k", "2", "--model", "E")
    assert code == EXIT_OK and "m=0:0x1" in out
    code, out, _ = call("dist", "--n", "2..3", "--k-rule", "identity", "--model", "G", "--table", "m=0:0x1")
    assert code == EXIT_OK and len(out.strip().splitlines()) == 3
    code, out, _ = call("tautology", "--census", "--n", "2", "--k", "2", "--model", "G")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "n,k,model,count_total,count_tautology,count_simple,ratio_simple_over_rat"
    assert out.splitlines()[1] == "2,2,G,32,4,4,0.5"


def test_thresholds():
    code, out, _ = call("thresholds", "--n", "10,1000", "--k-rule", "sqrt", "--model", "E")
    lines = out.strip().splitlines()
    assert code == EXIT_OK and lines[0] == "n,M_n,n_over_ln_n,k,model,rat_exact,rat_asymptotic,regime"
    assert lines[1].startswith("10,4,")


def test_parse_grid():
    assert parse_grid("7") == [7]
    assert parse_grid("50,100") == [50, 100]
    assert parse_grid("2..4,9") == [2, 3, 4, 9]


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "andorlab.cli", "count", "--n", "3", "--k", "1", "--model", "G"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "64\n"
