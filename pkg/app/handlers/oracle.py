from functional import PLFunction, eval_L
from handlers import load_function, load_input
from hilbert import hilbert_series_oracle
from reports import Report, jsonable

DEFAULT_KMAX = 24


def oracle_handler(args) -> Report:
    loaded = load_input(args.input)
    model, fdata = loaded.model, loaded.fdata
    f = load_function(args.f, model.rank) or PLFunction.constant(0, model.rank)
    fit = hilbert_series_oracle(model, f, args.kmax or DEFAULT_KMAX)
    L = eval_L(model, fdata, f)
    values = {
        "f": f,
        "F0": fit.F0,
        "F1": fit.F1,
        "residual": fit.residual,
        "samples": [{"k": k, "w_over_kd": s} for k, s in fit.samples],
        "fit_ks": fit.fit_ks,
        "base_change": fit.base_change,
        "period": fit.period,
        "L": L,
        "vol_P": fdata.vol_P,
        "F1_over_L": fit.F1 / float(L) if L else None,
        "normalized_F1": 2 * float(fdata.vol_P) * fit.F1,
    }
    return Report(command="hilbert", source=str(loaded.path), values=jsonable(values), provenance={"digest": loaded.digest})
