import pytest

from doubleoctics.cli import main
from doubleoctics.newforms import load_table
from doubleoctics.search import read_results


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_tables_cache_hit(capsys, cache_dir):
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "tables")
    assert code == 0
    assert "total points: 4763331" in out
    assert "aggregates (exact): 759931" in out
    assert "cache hit" in out


def test_tables_build(capsys, tmp_path):
    code, out, _ = run(capsys, "--cache-dir", tmp_path, "--scheme", "modsq", "tables")
    assert code == 0 and "built 25 tables" in out
    assert "aggregates (modsq): 215823" in out
    assert len(list(tmp_path.glob("*.oct"))) == 25


def test_count(capsys, cache_dir):
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "count", "--coeffs", "b=1", "--prime", 3)
    assert code == 0
    assert out.splitlines() == ["# p count (1-count) mod p", "3 48 1"]
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "count", "--coeffs", "R=1")
    lines = out.splitlines()[1:]
    assert len(lines) == 25 and lines[0] == "2 15 0"


def test_count_naive_and_torus(capsys):
    code, out, _ = run(capsys, "count", "--coeffs", "n=1", "--prime", 3, "--naive")
    assert code == 0 and out.splitlines()[1] == "3 67 0"
    code, out, _ = run(capsys, "count", "--coeffs", "b=1", "--prime", 5, "--torus")
    # b=1 is (xyzt)^2, a nonzero square on the torus: 2 * 4^3 points
    assert code == 0 and out.splitlines()[1].split()[:2] == ["5", "128"]


@pytest.mark.parametrize("argv, expected", [
    (["count", "--coeffs", "q=1"], 1),
    (["count", "--coeffs", "b=1", "--prime", "4"], 1),
    (["count", "--coeffs", "b=0"], 2),
    (["count"], 1),
    (["frobnicate"], 1),
    (["search", "--out", "x", "--threshold", "26"], 1),
    (["search", "--out", "x", "--preset", "nope"], 1),
    (["transform", "--op", "segre", "--coeffs", "n=1"], 2),
    (["transform", "--op", "coordchange", "--coeffs", "n=1"], 1),
    (["transform", "--op", "coordchange", "--coeffs", "n=1", "--lam", "0"], 1),
    (["transform", "--op", "linear", "--coeffs", "n=1", "--matrix", "1,1;0,1"], 1),
    (["estimate", "--octics", "1.5", "--forms", "2"], 1),
    (["etaform", "--spec", "1:2,2:2"], 1),
])
def test_exit_codes(capsys, argv, expected):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == expected


def test_search_missing_tables_is_data_error(capsys, tmp_path):
    code, _, err = run(capsys, "--cache-dir", tmp_path / "empty", "search", "--letters", "B",
                       "--psi-max", 3, "--phi-max", 1, "--out", tmp_path / "o")
    assert code == 2 and "tables" in err


def test_search_io_error(capsys, cache_dir, tmp_path):
    code, _, err = run(capsys, "--cache-dir", cache_dir, "search", "--letters", "B", "--phi-max", 1,
                       "--psi-max", 3, "--out", tmp_path / "missing" / "o.txt")
    assert code == 3 and "I/O" in err


def test_search_and_resume(capsys, cache_dir, tmp_path):
    out, cp = tmp_path / "hits.txt", tmp_path / "cp"
    base = ["--cache-dir", cache_dir, "search", "--preset", "sweep-bruch", "--psi-max", 6,
            "--out", out, "--checkpoint", cp, "--chunk-size", 100]
    code, text, _ = run(capsys, *base, "--max-chunks", 2)
    assert code == 0 and "interrupted" in text
    code, text, _ = run(capsys, "--threads", 2, *base, "--resume")
    assert code == 0 and "complete" in text
    hits = read_results(out)
    assert any(h.octic[1] == 1 and not any(h.octic[2:]) and h.level == 8 for h in hits)
    code, _, err = run(capsys, *base[:-2], "--chunk-size", 99, "--resume")
    assert code == 2 and "different search" in err


def test_search_custom_forms(capsys, cache_dir, tmp_path):
    forms = tmp_path / "forms.txt"
    assert run(capsys, "etaform", "--spec", "2:4,4:4", "--out", forms)[0] == 0
    out = tmp_path / "hits.txt"
    code, _, _ = run(capsys, "--cache-dir", cache_dir, "search", "--letters", "R", "--phi-max", 1,
                     "--psi-max", 2, "--forms", forms, "--twists", "1,-4", "--threshold", 25,
                     "--out", out)
    assert code == 0
    assert {(h.octic[1], h.label, h.twist) for h in read_results(out)} == {(1, "8/eta", -4)}


def test_transform(capsys):
    cases = [
        (["--op", "segre", "--coeffs", "r=1"], "u=4,c=-2,w=-2,e=1"),
        (["--op", "invert", "--coeffs", "c=1"], "w=1"),
        (["--op", "signchange", "--coeffs", "b=1"], "b=-1"),
        (["--op", "coordchange", "--coeffs", "n=1", "--lam", "-2"], "n=1"),
        (["--op", "linear", "--coeffs", "b=1,r=2", "--matrix", "0,1,0,0;1,0,0,0;0,0,1,0;0,0,0,1"],
         "b=1,r=2"),
    ]
    for argv, expected in cases:
        code, out, _ = run(capsys, "transform", *argv)
        assert code == 0 and out.strip() == expected


def test_transform_not_symmetric(capsys):
    code, _, err = run(capsys, "transform", "--op", "linear", "--coeffs", "n=1",
                       "--matrix", "1,1,0,0;1,-1,0,0;0,0,1,1;0,0,1,-1")
    assert code == 2 and "symmetric" in err


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--octics", "4e11", "--forms", 3438)
    assert code == 0
    assert "chance possibilities (>= 21 of 25): 32882683894" in out
    assert "expected false positives: 1.96" in out


def test_etaform_stdout(capsys, tmp_path):
    code, out, _ = run(capsys, "etaform", "--spec", "2:4,4:4", "--spec", "1:2,2:2,3:2,6:2")
    assert code == 0
    path = tmp_path / "t.txt"
    path.write_text(out)
    assert [r.label for r in load_table(path)] == ["8/eta", "6/eta"]
