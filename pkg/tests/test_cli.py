import json
import subprocess
import sys

import pytest

import database
from config import (
    EXIT_EXISTS,
    EXIT_INDETERMINATE,
    EXIT_INPUT,
    EXIT_NO_INPUT,
    EXIT_NOT_EXISTS,
    EXIT_USAGE,
    FIXTURES_DIR,
    ROOT_DIR,
)
from main import run
from reports import Report, emit_report, parse_report


@pytest.fixture
def ledger(tmp_path):
    database.configure(f"sqlite:///{tmp_path / 'runs.db'}")
    yield
    database.configure("sqlite://")


def test_describe(fixture_path, capsys):
    code, report = run(["describe", fixture_path("p2_anticanonical"), "--format", "json"])
    assert code == EXIT_EXISTS
    document = json.loads(capsys.readouterr().out)
    assert document["values"]["a"] == "2"
    assert document["values"]["rank"] == 2
    assert document["outcome"] is None
    assert "timing" not in document


@pytest.mark.parametrize(
    "fixture, code",
    [("p2_anticanonical", EXIT_EXISTS), ("f1_toric_anticanonical", EXIT_NOT_EXISTS)],
)
def test_check_fano_exit_codes(fixture_path, capsys, fixture, code):
    assert run(["check-fano", fixture_path(fixture)])[0] == code


def test_check_csck_dispatches_by_rank(fixture_path, capsys):
    code, report = run(["check-csck", fixture_path("f1_sl2_rank1_31")])
    assert code == EXIT_NOT_EXISTS
    assert report.provenance["criterion"] == "rank-one"
    code, report = run(["check-csck", fixture_path("f1_toric_31")])
    assert code == EXIT_NOT_EXISTS
    assert report.provenance["criterion"] == "toric-surface/futaki"
    assert report.values["witness_L"].startswith("-")


def test_check_csck_without_criterion_or_search(fixture_path, capsys):
    code, _ = run(["check-csck", fixture_path("p1_cube_anticanonical"), "--no-search"])
    assert code == EXIT_USAGE


def test_check_csck_search_fallback_is_not_conclusive(fixture_path, capsys):
    code, report = run(["check-csck", fixture_path("p1_cube_anticanonical"), "--m", "2", "--budget", "1"])
    assert code == EXIT_INDETERMINATE
    assert report.provenance["criterion"] == "search"
    assert "not a proof" in report.values["diagnostics"]["note"]


def test_eval_L(fixture_path, capsys):
    code, report = run(["eval-L", fixture_path("p1xp1_11"), "--f", fixture_path("crease_half")])
    assert code == EXIT_EXISTS
    assert report.values["L"] == "1/4"
    assert report.values["L_polygon"] == "1/4"
    assert report.values["nld"] == 2


def test_eval_L_needs_a_function(fixture_path, capsys):
    assert run(["eval-L", fixture_path("p1xp1_11")])[0] == EXIT_USAGE


def test_eval_L_rejects_slopes_outside_the_cone(fixture_path, capsys):
    assert run(["eval-L", fixture_path("p1xp1_diagonal_11"), "--f", fixture_path("linear_minus_q")])[0] == EXIT_INPUT


def test_hilbert(fixture_path, capsys):
    code, report = run(["hilbert", fixture_path("segment_p1"), "--f", fixture_path("segment_abs"), "--kmax", "20"])
    assert code == EXIT_EXISTS
    assert report.values["F1"] > 0
    assert report.values["L"] == "1"


def test_search_output_is_byte_stable(fixture_path, capsys):
    argv = ["search", fixture_path("f1_toric_21"), "--m", "2", "--budget", "2", "--seed", "5"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first


def test_search_ledger(fixture_path, capsys, ledger):
    path = fixture_path("f1_toric_21")
    code, report = run(["search", path, "--m", "2", "--budget", "2", "--seed", "1", "--record"])
    assert "run_id" in report.provenance
    _, history = run(["search", path, "--history"])
    (entry,) = history.values["history"]
    assert entry["best_value"] == report.values["best_value"]
    assert entry["seed"] == 1


@pytest.mark.parametrize(
    "argv, code",
    [
        (["frobnicate", "x.json"], EXIT_USAGE),
        (["describe"], EXIT_USAGE),
        (["describe", "does/not/exist.json"], EXIT_NO_INPUT),
        (["check-fano", "FIXTURE:p1xp1_11"], EXIT_USAGE),
        (["describe", "FIXTURE:crease_half"], EXIT_INPUT),
    ],
)
def test_error_exit_codes(fixture_path, capsys, argv, code):
    argv = [fixture_path(a.split(":", 1)[1]) if a.startswith("FIXTURE:") else a for a in argv]
    assert run(argv) == (code, None)


def test_malformed_input_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"ambient_dim": 2,')
    assert run(["describe", str(path)])[0] == EXIT_INPUT


def test_report_round_trip_and_text_format():
    report = Report(
        command="check-fano",
        source="fixtures/p2_anticanonical.json",
        outcome="EXISTS",
        values={"barycenter": ["0", "0"], "diagnostics": {"a": "2", "violated": []}},
        provenance={"criterion": "fano-barycenter"},
    )
    assert parse_report(emit_report(report, "json")) == report
    text = emit_report(report, "text")
    assert "outcome" in text and "values.diagnostics.a" in text
    with pytest.raises(ValueError):
        emit_report(report, "yaml")


PL_DOCUMENTS = {"crease_half", "segment_abs", "linear_minus_q"}


@pytest.mark.parametrize(
    "name", sorted(p.stem for p in FIXTURES_DIR.glob("*.json") if p.stem not in PL_DOCUMENTS)
)
def test_every_fixture_describes(fixture_path, capsys, name):
    code, report = run(["describe", fixture_path(name)])
    assert code == EXIT_EXISTS
    assert "values.rank" in capsys.readouterr().out
    if report.values["toric"]:
        assert (report.values["P"], report.values["Q"]) == ("1", "0")


def test_main_script_describes_a_fixture(fixture_path):
    completed = subprocess.run(
        [sys.executable, str(ROOT_DIR / "app" / "main.py"), "describe", fixture_path("p2_anticanonical")],
        cwd=ROOT_DIR,
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert completed.returncode == EXIT_EXISTS, completed.stderr
    assert "values.a" in completed.stdout


def test_report_from_a_run_round_trips(fixture_path, capsys):
    code, report = run(["describe", fixture_path("p2_anticanonical"), "--format", "json", "--timing"])
    assert code == EXIT_EXISTS
    assert report.timing is not None
    parsed = parse_report(capsys.readouterr().out)
    assert parsed == report
    assert parsed.timing == report.timing


def test_undecodable_input_file(tmp_path, capsys):
    path = tmp_path / "binary.json"
    path.write_bytes(b"\xff\xfe{")
    assert run(["describe", str(path)]) == (EXIT_INPUT, None)
