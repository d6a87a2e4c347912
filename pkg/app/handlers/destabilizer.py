import json
import logging

from sqlalchemy import select

import database
from config import RECORD_RUNS, SEARCH_RESTARTS
from handlers import load_input
from models import SearchRun
from reports import Report, jsonable
from search import SearchReport, search_destabilizer

logger = logging.getLogger(__name__)


def record_run(source: str, digest: str, budget: int, report: SearchReport) -> int:
    database.init_db()
    with database.SessionLocal() as session:
        run = SearchRun(
            source=source,
            digest=digest,
            m=report.m,
            budget=budget,
            seed=report.seed,
            best_value=str(report.best_value),
            best_numeric=report.best_numeric,
            best_f=json.dumps(report.best_f.to_document(), sort_keys=True),
            trace=json.dumps(list(report.trace)),
        )
        session.add(run)
        session.commit()
        logger.info(f"Recorded search run #{run.id} for {source}")
        return run.id


def run_history(digest: str) -> list[dict]:
    database.init_db()
    with database.SessionLocal() as session:
        runs = session.scalars(
            select(SearchRun).where(SearchRun.digest == digest).order_by(SearchRun.best_numeric, SearchRun.id)
        ).all()
        return [
            {"id": r.id, "m": r.m, "budget": r.budget, "seed": r.seed, "best_value": r.best_value, "best_f": json.loads(r.best_f)}
            for r in runs
        ]


def destabilizer_handler(args) -> Report:
    loaded = load_input(args.input)
    provenance = {"digest": loaded.digest}
    if args.history:
        return Report(
            command="search",
            source=str(loaded.path),
            values={"history": jsonable(run_history(loaded.digest))},
            provenance=provenance,
        )

    budget = args.budget or SEARCH_RESTARTS
    report = search_destabilizer(loaded.model, loaded.fdata, m=args.m or 2, budget=budget, seed=args.seed)
    values = {
        "m": report.m,
        "seed": report.seed,
        "restarts": report.restarts,
        "best_f": report.best_f,
        "best_value": report.best_value,
        "best_numeric": report.best_numeric,
        "trace": report.trace,
        "negative_found": report.negative_found,
        "conclusive": report.conclusive,
    }
    if not report.negative_found:
        values["note"] = "no destabilizer found; this is not evidence of existence"
    if args.record or RECORD_RUNS:
        provenance["run_id"] = record_run(str(loaded.path), loaded.digest, budget, report)
    return Report(command="search", source=str(loaded.path), values=jsonable(values), provenance=provenance)
