import io
import json
import random
import sys

import pytest

from conftest import T, random_pair
from hogen.cli import main
from hogen.syntax import ParseError, format_term, parse_problem, parse_term, parse_type

PROBLEM = """\
sig:
  const f : i -> i -> i [A]
  const g : i -> i -> i [C]
  const j : i -> i -> i [AC]
  const h : i -> i -> i
  const u : i -> i
  const a : i
  const b : i
  const c : i
left:
  f(a, f(b, c))
right:
  f(c, a)
"""

LGG_PROBLEM = """\
sig:
  const f : i -> i -> i
  const h3 : i -> i -> i -> i
  const g3 : i -> i -> i -> i
left:
  \\x:i, y:i. f(h3(x, x, y), h3(x, y, y))
right:
  \\x:i, y:i. f(g3(x, x, y), g3(x, y, y))
"""


def run_cli(argv, stdin_text=None, capsys=None):
    if stdin_text is not None:
        old = sys.stdin
        sys.stdin = io.StringIO(stdin_text)
        try:
            code = main(argv)
        finally:
            sys.stdin = old
    else:
        code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------------------
# Parsing


def test_parse_problem_flattens():
    problem = parse_problem(PROBLEM)
    assert format_term(problem.left, problem.sig) == "f(a,b,c)"
    assert format_term(problem.right, problem.sig) == "f(c,a)"


def test_parse_reports_positions():
    with pytest.raises(ParseError) as err:
        parse_problem(PROBLEM.replace("f(c, a)", "f(c, a"))
    assert "expected" in str(err.value)


def test_parse_rejects_empty_input():
    with pytest.raises(ParseError):
        parse_problem("")


def test_parse_rejects_unknown_constant():
    bad = PROBLEM.replace("f(c, a)", "f(c, q)")
    with pytest.raises(ParseError) as err:
        parse_problem(bad)
    assert "undeclared" in str(err.value)


def test_parse_type_mismatch():
    bad = PROBLEM.replace("f(c, a)", "u")
    with pytest.raises(ParseError):
        parse_problem(bad)


def test_parse_axiom_shape_error():
    bad = PROBLEM.replace("const u : i -> i", "const u : i -> i [A]")
    with pytest.raises(ParseError):
        parse_problem(bad)


def test_non_pattern_input_reported(sig):
    t = parse_term(
        r"\x:i, y:i. X(x, x)", sig, free_types={"X": parse_type("i -> i -> i")}
    )
    from hogen.terms import is_pattern

    assert not is_pattern(t)


def test_round_trip_random(sig):
    rng = random.Random(77)
    for _ in range(200):
        left, right = random_pair(rng, sig, rng.randint(1, 12))
        for t in (left, right):
            printed = format_term(t, sig)
            again = parse_term(printed, sig)
            assert again == t


def test_round_trip_raw_mode(sig):
    t = T(r"\x:i, y:i. f(u(x), y, a)", sig)
    printed = format_term(t, sig, raw=True)
    assert parse_term(printed, sig) == t


# ---------------------------------------------------------------------------
# CLI commands


def test_cli_lgg_running_example(tmp_path, capsys):
    path = tmp_path / "p.hog"
    path.write_text(LGG_PROBLEM)
    code, out, err = run_cli(["lgg", str(path)], capsys=capsys)
    assert code == 0
    assert out.splitlines()[0] == "\\x,y.f(Y0(x,y),Y1(x,y))"


def test_cli_lgg_stdin_json_verify(capsys):
    code, out, err = run_cli(["lgg", "--json", "--verify"], stdin_text=LGG_PROBLEM, capsys=capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["generalizations"][0]["term"] == "\\x,y.f(Y0(x,y),Y1(x,y))"
    assert set(doc["generalizations"][0]["theta_left"]) == {"Y0", "Y1"}


def test_cli_complete_commutative(capsys):
    problem = PROBLEM.replace("f(a, f(b, c))", "g(a, b)").replace("f(c, a)", "g(b, a)")
    code, out, err = run_cli(["complete", "--json"], stdin_text=problem, capsys=capsys)
    assert code == 0
    doc = json.loads(out)
    assert [g["term"] for g in doc["generalizations"]] == ["g(a,b)"]
    assert doc["generalizations"][0]["theta_left"] == {}
    assert doc["stats"]["states_explored"] > 0


def test_cli_complete_budget_exit_code(capsys):
    problem = PROBLEM.replace("f(a, f(b, c))", "j(u(a), u(b), a, b)").replace(
        "f(c, a)", "j(u(b), u(c), b, c)"
    )
    code, out, err = run_cli(
        ["complete", "--json", "--max-branches", "3"], stdin_text=problem, capsys=capsys
    )
    assert code == 2
    doc = json.loads(out)
    assert doc["truncated"] is True


def test_cli_optimal(capsys):
    problem = PROBLEM.replace("f(a, f(b, c))", "f(a, c, b)").replace("f(c, a)", "f(a, b)")
    code, out, err = run_cli(
        ["optimal", "--rigidity", "a", "--k", "1", "--verify"],
        stdin_text=problem,
        capsys=capsys,
    )
    assert code == 0
    assert out.strip() == "f(a,Y0)"


def test_cli_fragment(capsys):
    problem = PROBLEM.replace("f(a, f(b, c))", "f(a, c, b)").replace("f(c, a)", "f(a, b)")
    code, out, err = run_cli(
        ["fragment", "--json", "--k", "1", "--l", "2"], stdin_text=problem, capsys=capsys
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["k_determined"] is True
    assert doc["total_k_determined"] is True
    assert doc["kl_distinct"] is False  # head is A, not AC


def test_cli_det_command(capsys):
    code, out, err = run_cli(["det", "1", "a,b", "a,b"], capsys=capsys)
    assert code == 0
    assert out.strip() == "{(a[1,1],(b[2,2],∅))}"


def test_cli_det_strict(capsys):
    code, out, err = run_cli(["det", "1", "a,b", "b,a", "--strict"], capsys=capsys)
    assert code == 0
    assert out.strip() == "{(a[1,2],∅),(b[2,1],∅)}"


def test_cli_parse_error_exit_code(capsys):
    code, out, err = run_cli(["lgg"], stdin_text="left:\n  f(a\n", capsys=capsys)
    assert code == 1
    assert "error" in err


def test_cli_empty_input_fails(capsys):
    code, out, err = run_cli(["lgg"], stdin_text="", capsys=capsys)
    assert code == 1


def test_cli_json_deterministic_across_runs(capsys):
    problem = PROBLEM.replace("f(a, f(b, c))", "j(a, b, c)").replace("f(c, a)", "j(c, b, a)")
    outputs = set()
    for _ in range(3):
        code, out, err = run_cli(["complete", "--json"], stdin_text=problem, capsys=capsys)
        assert code == 0
        outputs.add(out)
    for _ in range(3):
        code, out, err = run_cli(
            ["complete", "--json", "--parallel", "2"], stdin_text=problem, capsys=capsys
        )
        assert code == 0
        outputs.add(out)
    assert len(outputs) == 1


def test_cli_verify_catches_broken_results(capsys, monkeypatch):
    # sanity for the --verify flag: a corrupted result must fail verification
    import hogen.cli as cli

    real = cli.syntactic_lgg

    def broken(t, s, sig):
        res = real(t, s, sig)
        return type(res)(res.term, {}, {})

    monkeypatch.setattr(cli, "syntactic_lgg", broken)
    code, out, err = run_cli(["lgg", "--verify"], stdin_text=LGG_PROBLEM, capsys=capsys)
    assert code == 1
    assert "verification failed" in err
