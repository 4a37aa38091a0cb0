import json

import pytest

from akalab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_honest_outputs_jsonl(capsys):
    code, out = run(capsys, "honest", "--protocol", "5g-aka", "--subscribers", "2")
    assert code == 0
    lines = out.out.splitlines()
    assert lines and all("endpoint" in json.loads(x) for x in lines)


def test_attack_result_line(capsys):
    code, out = run(capsys, "attack", "failure-message", "--protocol", "5g-aka", "--trials", "20")
    assert code == 0
    assert out.out.startswith("RESULT name=failure-message advantage=1.0000")


def test_attack_wrong_verdict_exits_one(capsys):
    # with one oracle call the attack cannot finish and falls back to a coin flip
    code, out = run(capsys, "attack", "failure-message", "--protocol", "5g-aka", "--trials", "40",
                    "--q-budget", "1")
    assert code == 1 and "advantage=1.0000" not in out.out


def test_matrix_passes(capsys):
    code, out = run(capsys, "matrix", "--trials", "20")
    lines = out.out.splitlines()
    assert code == 0 and len(lines) == 8 and all(x.endswith("verdict=pass") for x in lines)


def test_game_output_is_reproducible(capsys):
    argv = ["game", "guti-linkability", "--trials", "20", "--seed", "9"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv, "--jobs", "2")
    assert a.out == b.out


def test_demos(capsys):
    code, out = run(capsys, "attack", "imsi-catcher", "--protocol", "5g-aka-legacy", "--trials", "10")
    assert code == 0 and "captured=10/10" in out.out
    code, out = run(capsys, "attack", "imsi-catcher", "--protocol", "5g-aka")
    assert code == 0 and "inapplicable" in out.out
    code, out = run(capsys, "attack", "privaka-desync", "--protocol", "priv-aka")
    assert code == 0 and "delta=2" in out.out
    assert run(capsys, "attack", "privaka-desync", "--protocol", "aka-plus")[0] == 2


def test_trace_commands(tmp_path, capsys):
    good = tmp_path / "good.txt"
    good.write_text("PNAI(0,0) PUAI(A,0,1) PNAI(0,1) PUAI(A,0,2) FNAI(0) FUAI(A,0)\n")
    code, out = run(capsys, "trace", "validate", str(good))
    assert code == 0 and out.out.strip() == "valid"
    bad = tmp_path / "bad.txt"
    bad.write_text("PNAI(0,1)")
    code, out = run(capsys, "trace", "validate", str(bad))
    assert code == 1 and out.out.startswith("invalid at 0")
    draws = tmp_path / "ns.txt"
    draws.write_text("CUAI(A,0,0) NS(A,1) CUAI(A,2,0)")
    code, out = run(capsys, "trace", "ufresh", str(draws))
    assert code == 0 and out.out.strip() == "CUAI(A,0,0) NS(A.1,1) CUAI(A.1,2,0)"
    junk = tmp_path / "junk.txt"
    junk.write_text("NOPE(1)")
    assert run(capsys, "trace", "validate", str(junk))[0] == 1
    assert run(capsys, "trace", "validate", str(tmp_path / "missing"))[0] == 2


@pytest.mark.parametrize("argv", [[], ["bogus"], ["game", "no-such-script"],
                                  ["honest", "--protocol", "wifi"], ["honest", "--trials", "0"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_out_file(tmp_path, capsys):
    path = tmp_path / "t.jsonl"
    code, _ = run(capsys, "game", "subtle", "--protocol", "aka-plus-minus", "--trials", "4",
                  "--out", str(path))
    assert code == 0 and path.read_text().count("\n") > 5
