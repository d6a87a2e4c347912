import logging

from config import SEARCH_RESTARTS
from criteria import CriterionError, Outcome, Verdict, check_rank_one, check_toric_surface
from handlers import load_input
from reports import Report, verdict_report
from search import search_destabilizer

logger = logging.getLogger(__name__)

SEARCH_THEOREM = "cscK implies L(f) >= 0 for every convex PL f with slopes in the valuation cone"


def _search_verdict(loaded, args) -> Verdict:
    report = search_destabilizer(
        loaded.model,
        loaded.fdata,
        m=args.m or 2,
        budget=args.budget or SEARCH_RESTARTS,
        seed=args.seed,
    )
    diagnostics = {
        "search_m": report.m,
        "search_seed": report.seed,
        "search_trace": report.trace,
        "note": "no effective criterion applies; a search without a negative value is not a proof of existence",
    }
    if report.negative_found:
        return Verdict(Outcome.NOT_EXISTS, "search", SEARCH_THEOREM, report.best_f, report.best_value, diagnostics)
    return Verdict(Outcome.INDETERMINATE, "search", SEARCH_THEOREM, diagnostics=diagnostics)


def csck_handler(args) -> Report:
    loaded = load_input(args.input)
    model = loaded.model
    if model.rank == 1:
        verdict = check_rank_one(model, loaded.fdata)
    elif model.rank == 2 and model.is_toric:
        verdict = check_toric_surface(model, loaded.fdata, tol=args.tol)
    elif args.no_search:
        raise CriterionError(
            f"no effective criterion for a rank {model.rank} {'toric' if model.is_toric else 'spherical'} model and search is disabled"
        )
    else:
        logger.warning(f"No effective criterion for rank {model.rank}; falling back to destabilizer search")
        verdict = _search_verdict(loaded, args)
    return verdict_report("check-csck", str(loaded.path), verdict)
