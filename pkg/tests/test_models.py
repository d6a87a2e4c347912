import json

import pytest
from sqlalchemy import select
from sympy import Rational

import database
from functional import PLFunction
from handlers.destabilizer import record_run, run_history
from models import SearchRun
from search import SearchReport


@pytest.fixture
def session_factory(tmp_path):
    database.configure(f"sqlite:///{tmp_path / 'ledger.db'}")
    database.init_db()
    yield database.SessionLocal
    database.configure("sqlite://")


def report(value, seed):
    return SearchReport(
        m=2,
        seed=seed,
        restarts=3,
        best_f=PLFunction.constant(0, 2),
        best_value=Rational(value),
        best_numeric=float(Rational(value)),
        trace=(0.5, float(Rational(value))),
    )


def test_search_run_columns(session_factory):
    record_run("fixtures/f1_toric_21.json", "abc", 3, report("-1/9", 4))
    with session_factory() as session:
        run = session.scalars(select(SearchRun)).one()
        assert run.best_value == "-1/9"
        assert run.budget == 3 and run.m == 2 and run.seed == 4
        assert json.loads(run.trace) == [0.5, pytest.approx(-1 / 9)]
        assert run.created_at is not None


def test_history_is_filtered_by_digest_and_sorted(session_factory):
    record_run("a.json", "abc", 3, report("0", 1))
    record_run("a.json", "abc", 3, report("-2/7", 2))
    record_run("b.json", "def", 3, report("-5", 3))
    history = run_history("abc")
    assert [entry["seed"] for entry in history] == [2, 1]
    assert history[0]["best_f"] == {"pieces": [{"c": "0", "v": ["0", "0"]}]}
