import phi
import pytest


def test_run_prints_and_returns_value():
    result = phi.run('[] > main\n  seq > @\n    stdout "hi\\n"\n    6.mul 7\n')
    assert result["exit_code"] == 0
    assert result["stdout"] == b"hi\n"
    assert result["value"] == 42


def test_exit_codes():
    assert phi.run("[] > main\n  1.div 0 > @\n")["exit_code"] == 1
    assert phi.run("[x] > f\n   x > @\n")["exit_code"] == 2
    assert phi.run("[] > main\n  goto > @\n    [g]\n      g.backward > @\n", max_steps=500)["exit_code"] == 3


def test_runtime_error_goes_to_stderr():
    result = phi.run("[] > main\n  memory > m\n  m.add 1 > @\n", file="m.phi")
    assert result["stdout"] == b""
    assert "read-before-write" in result["stderr"]


def test_format_round_trips():
    text = phi.format("[a b] > max\n  if. > @\n    a.greater b\n    a\n    b\n")
    assert phi.format(text) == text


def test_format_raises_parse_error():
    with pytest.raises(phi.ParseError):
        phi.format("[a b > f\n")


def test_traceability_spans():
    source = '[x] > f\n  [] (42.div x > @) > @\n  "int f(int x)" > signature\nf 6 > main\n'
    result = phi.run(source, file="src/main.c", trace=True, traceability=True)
    assert result["value"] == 7
    assert "src/main.c:1-1" in result["stderr"]


def test_corpus():
    entries = phi.corpus_entries()
    assert len(entries) >= 22
    verdicts = phi.run_corpus("goto-*")
    assert len(verdicts) == 4
    assert all(passed for _, passed, _ in verdicts)
