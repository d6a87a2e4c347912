from criteria import CriterionError
from functional import donaldson_toric_functional, eval_L, is_product_function, linearity_domains
from handlers import load_function, load_input
from reports import Report, jsonable


def evaluate_handler(args) -> Report:
    loaded = load_input(args.input)
    model = loaded.model
    f = load_function(args.f, model.rank)
    if f is None:
        raise CriterionError("eval-L needs a PL function (--f pl.json)")
    decomposition = linearity_domains(model, f)
    values = {
        "f": f,
        "L": eval_L(model, loaded.fdata, f),
        "a": loaded.fdata.a,
        "nld": decomposition.nld,
        "redundant_pieces": decomposition.redundant,
        "product": is_product_function(model, f),
    }
    if model.is_toric and model.rank == 2:
        values["L_polygon"] = donaldson_toric_functional(model.polytope, f)
    return Report(
        command="eval-L",
        source=str(loaded.path),
        values=jsonable(values),
        provenance={"digest": loaded.digest},
    )
