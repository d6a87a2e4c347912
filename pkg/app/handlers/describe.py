import logging

from functional import weighted_barycenter
from handlers import load_input
from reports import Report, jsonable

logger = logging.getLogger(__name__)


def describe_handler(args) -> Report:
    loaded = load_input(args.input)
    model, fdata = loaded.model, loaded.fdata
    polytope = model.polytope
    values = {
        "name": loaded.data.name,
        "ambient_dim": loaded.data.ambient_dim,
        "rank": model.rank,
        "toric": model.is_toric,
        "horospherical": model.is_horospherical,
        "fano": loaded.data.is_fano_anticanonical,
        "chi": loaded.data.chi,
        "vertices": polytope.vertices,
        "ambient_vertices": [loaded.data.to_ambient(v) for v in polytope.vertices],
        "facets": [{"normal": u, "bound": c} for u, c, _ in polytope.facets],
        "valuation_cone": {
            "generators": model.valuation_cone.generators,
            "lineality": model.valuation_cone.lineality,
        },
        "varpi": model.varpi,
        "active_roots": model.active_roots,
        "two_varpi_X": model.two_varpi_X,
        "P": str(fdata.P.as_expr()),
        "Q": str(fdata.Q.as_expr()),
        "a": fdata.a,
        "vol_P": fdata.vol_P,
        "boundary_P": fdata.boundary_P,
        "int_Q": fdata.int_Q,
        "barycenter": weighted_barycenter(model, fdata.P),
    }
    logger.info(f"Described {loaded.path}: rank {model.rank}, a = {fdata.a}")
    return Report(
        command="describe",
        source=str(loaded.path),
        values=jsonable(values),
        provenance={"digest": loaded.digest},
    )
