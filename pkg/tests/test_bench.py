import csv
import io
import subprocess
import sys

import pytest

from ealign import EvalReport, MatchConfig, UsageError
from ealign.bench import COLUMNS, MATCHERS, RunSpec, emit_report, expand_matchers, run
from ealign.cli import main


def spec_for(fixtures_dir, stem, **kwargs):
    return RunSpec(gold=fixtures_dir / f"{stem}.gold.tsv", sim=fixtures_dir / f"{stem}.sim.tsv", **kwargs)


def by_name(reports):
    return {r.matcher: r for r in reports}


def test_identity_all_perfect(fixtures_dir):
    reports = run(spec_for(fixtures_dir, "identity5"))
    assert [r.matcher for r in reports] == list(MATCHERS)
    for r in reports:
        assert (r.f1, r.predicted, r.correct, r.theta) == (100.0, 5, 5, 0.5)


def test_many_to_one_trap(fixtures_dir):
    reports = by_name(run(spec_for(fixtures_dir, "trap4")))
    # rows 0 and 1 both pick column 0 under greedy argmax
    dinf = reports["dinf"]
    assert (dinf.predicted, dinf.correct) == (4, 3)
    for name in ("hun", "smat", "bmat"):
        assert (reports[name].predicted, reports[name].correct) == (4, 4)
        assert reports[name].f1 == 100.0
    assert dinf.predicted - dinf.correct > 0


def test_names_dice(fixtures_dir):
    spec = RunSpec(
        gold=fixtures_dir / "names3.gold.tsv",
        names_left=fixtures_dir / "names3.left.tsv",
        names_right=fixtures_dir / "names3.right.tsv",
        similarity="dice",
    )
    # diagonal Dice scores 6/7, 2/3 and 4/5 are the only non-zero entries
    for r in run(spec):
        assert (r.predicted, r.correct, r.f1) == (3, 3, 100.0), r.matcher


def test_embedding_source(tmp_path):
    (tmp_path / "l.tsv").write_text("a\t1\t0\nb\t0\t1\n")
    (tmp_path / "r.tsv").write_text("x\t0\t2\ny\t3\t0.1\n")
    (tmp_path / "g.tsv").write_text("a\ty\nb\tx\n")
    spec = RunSpec(gold=tmp_path / "g.tsv", emb_left=tmp_path / "l.tsv", emb_right=tmp_path / "r.tsv",
                   similarity="cosine", matchers=("hun", "bmat"))
    assert all(r.f1 == 100.0 for r in run(spec))


def test_all_equals_union_of_singles(fixtures_dir):
    combined = run(spec_for(fixtures_dir, "trap4"))
    singles = [run(spec_for(fixtures_dir, "trap4", matchers=(m,)))[0] for m in MATCHERS]
    assert combined == singles


def test_peak_pairs(fixtures_dir):
    reports = by_name(run(spec_for(fixtures_dir, "identity5")))
    assert reports["bmat"].peak_pairs == 5
    assert reports["hun"].peak_pairs == 25


def test_timing_optional(fixtures_dir):
    assert run(spec_for(fixtures_dir, "identity5", matchers=("dinf",)))[0].wall_ms is None
    assert run(spec_for(fixtures_dir, "identity5", matchers=("dinf",), timing=True))[0].wall_ms >= 0


@pytest.mark.parametrize("kwargs", [
    {},
    {"sim": "x", "names_left": "y", "names_right": "z", "similarity": "dice"},
    {"emb_left": "x", "emb_right": "y"},
    {"names_left": "x"},
])
def test_spec_validation(fixtures_dir, kwargs):
    spec = RunSpec(gold=fixtures_dir / "identity5.gold.tsv", **kwargs)
    with pytest.raises(UsageError):
        spec.validate()


def test_unknown_matcher():
    with pytest.raises(UsageError):
        expand_matchers(("dinf", "greedy"))
    assert expand_matchers(("bmat", "all")) == ("bmat",) + tuple(m for m in MATCHERS if m != "bmat")


def report(**kw):
    base = dict(matcher="bmat", theta=0.5, precision=96.8, recall=85.3, f1=90.7,
                predicted=10, gold=11, correct=9)
    base.update(kw)
    return EvalReport(**base)


def test_csv_line():
    text = emit_report([report()], "csv")
    header, line = text.splitlines()
    assert header == ",".join(COLUMNS)
    assert line.startswith("bmat,0.50,96.8,85.3,90.7,")


def test_rounding_one_decimal():
    line = emit_report([report(precision=100 / 3, recall=0.04, f1=99.96)], "csv").splitlines()[1]
    assert line.split(",")[2:5] == ["33.3", "0.0", "100.0"]


def test_markdown_matches_csv():
    reports = [report(), report(matcher="dinf", precision=12.345)]
    rows = list(csv.reader(io.StringIO(emit_report(reports, "csv"))))
    md = emit_report(reports, "markdown").splitlines()
    table = [[c.strip() for c in line.strip("|").split("|")] for line in md if line.startswith("|")]
    assert table[0] == rows[0]
    assert table[2:] == rows[1:]


def test_empty_reports():
    with pytest.raises(UsageError):
        emit_report([], "csv")


class TestCli:
    def test_ok_to_file(self, fixtures_dir, tmp_path):
        out = tmp_path / "r.csv"
        code = main(["--sim", str(fixtures_dir / "trap4.sim.tsv"), "--gold", str(fixtures_dir / "trap4.gold.tsv"),
                     "--matcher", "dinf", "--matcher", "hun", "--format", "csv", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "dinf,0.50,75.0,75.0,75.0,4,4,3,"
        assert lines[2] == "hun,0.50,100.0,100.0,100.0,4,4,4,"

    def test_stdout_markdown(self, fixtures_dir, capsys):
        assert main(["--sim", str(fixtures_dir / "identity5.sim.tsv"),
                     "--gold", str(fixtures_dir / "identity5.gold.tsv")]) == 0
        out = capsys.readouterr().out
        assert out.startswith("| matcher | theta |")
        assert out.count("| 100.0 | 100.0 | 100.0 |") == 6

    def test_usage_error(self, fixtures_dir, capsys):
        assert main(["--gold", str(fixtures_dir / "identity5.gold.tsv")]) == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file(self, fixtures_dir, tmp_path):
        assert main(["--sim", str(tmp_path / "nope.tsv"), "--gold", str(fixtures_dir / "identity5.gold.tsv")]) == 2

    def test_bad_theta(self, fixtures_dir):
        assert main(["--sim", str(fixtures_dir / "identity5.sim.tsv"),
                     "--gold", str(fixtures_dir / "identity5.gold.tsv"), "--theta", "2"]) == 2

    def test_bad_choice_exits_two(self, fixtures_dir):
        with pytest.raises(SystemExit) as info:
            main(["--sim", "x", "--gold", "y", "--matcher", "greedy"])
        assert info.value.code == 2

    def test_data_error_names_file_and_line(self, fixtures_dir, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("L0\tR0\t0.5\nL1\tR1\n")
        assert main(["--sim", str(bad), "--gold", str(fixtures_dir / "identity5.gold.tsv")]) == 1
        assert f"{bad}:2:" in capsys.readouterr().err

    def test_module_entry_point(self, fixtures_dir):
        proc = subprocess.run(
            [sys.executable, "-m", "ealign", "--sim", str(fixtures_dir / "identity5.sim.tsv"),
             "--gold", str(fixtures_dir / "identity5.gold.tsv"), "--matcher", "bmat", "--format", "csv"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[1] == "bmat,0.50,100.0,100.0,100.0,5,5,5,"
