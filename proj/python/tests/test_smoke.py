from pathlib import Path

import pytest

import sepref

ROOT = Path(__file__).resolve().parents[2]
GOALS = ROOT / "data" / "goals"


def goal(name):
    return (GOALS / f"{name}.goal").read_text()


def test_sll4_proves_with_oracle():
    r = sepref.check(goal("sll4"), hints=["sll"], oracle="addr=4 step=4 heap=0 w=0 ls=[]")
    assert r.proved
    assert r.unfold_count == 5
    assert r.residual == ""
    assert r.oracle_agrees is not False


def test_residual_is_a_goal():
    r = sepref.check(goal("unify_residual"))
    assert not r.proved
    assert "(entail" in r.residual
    again = sepref.check(r.residual)
    assert not again.proved


def test_increment_cell():
    ok = sepref.check(goal("incr"), prover="word", memeval="ptsto", trace=True)
    assert ok.proved
    assert {e.phase for e in ok.trace} >= {"exec"}
    assert not sepref.check(goal("incr_wrong"), prover="word", memeval="ptsto").proved


def test_oracle_agrees_on_bst():
    r = sepref.check(goal("bst1"), hints=["bst"], oracle="addr=12 step=4 heap=0,1 w=0,4,1 ls=[],[1]")
    assert r.proved and r.oracle_agrees is True


def test_bench_rows():
    text = sepref.bench_csv([0, 1, 4])
    lines = text.splitlines()
    assert lines[0] == "n,unfold_count,cancel_time_ms,total_time_ms,verdict"
    assert [l.split(",")[1] for l in lines[1:]] == ["1", "2", "5"]
    assert all(l.endswith(",proved") for l in lines[1:])


def test_validate_and_builtin():
    for db in ("sll", "bst"):
        assert all(ok for _, ok in sepref.validate_hints(db))
    assert sepref.builtin_hints("sll") == (ROOT / "data" / "hints" / "sll.hints").read_text()
    assert sepref.builtin_hints("nope") is None


def test_errors():
    with pytest.raises(sepref.ParseError, match="unknown sort 'ls'"):
        sepref.check("(type w word_eq)\n(var x ls)\n")
    with pytest.raises(ValueError, match="unknown prover"):
        sepref.check(goal("incr"), prover="magic")
    with pytest.raises(RuntimeError):
        sepref.check(goal("sll4"), hints=["nosuchdb"])


def test_normalize_is_idempotent():
    once = sepref.normalize_goal(goal("sll_split"), hints=["sll"])
    assert sepref.normalize_goal(once) == once
