"""Effective existence criteria: Fano barycenter, rank one, toric surfaces."""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.optimize import minimize
from sympy import Rational

from config import RATIONALIZE_DENOMINATOR, TOLERANCE, TORIC_ANGLES, TORIC_OFFSETS
from functional import (
    FunctionalData,
    PLFunction,
    eval_L,
    functional_data,
    futaki_character,
    integrate_pl,
    weight_polynomials,
    weighted_barycenter,
)
from geometry import dual_cone, neg, solve_in_span, sub
from quadrature import build_quadrature
from spherical import NormalizedModel

logger = logging.getLogger(__name__)


class CriterionError(ValueError):
    pass


class Outcome(str, Enum):
    EXISTS = "EXISTS"
    NOT_EXISTS = "NOT_EXISTS"
    INDETERMINATE = "INDETERMINATE"


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    criterion: str
    theorem: str
    witness: PLFunction | None = None
    witness_value: Rational | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)


def rationalize(x: float, denominator: int = RATIONALIZE_DENOMINATOR) -> Rational:
    return Rational(float(x)).limit_denominator(denominator)


def _one_piece(v) -> PLFunction:
    return PLFunction(((Rational(0), tuple(Rational(x) for x in v)),))


# ─────────────────────────────────────────────
# Fano: barycenter criterion
# ─────────────────────────────────────────────

def check_fano_KE(model: NormalizedModel) -> Verdict:
    if not model.data.is_fano_anticanonical:
        raise CriterionError("the barycenter criterion needs the anticanonical moment polytope (set 'fano')")
    P, _ = weight_polynomials(model)
    barycenter = weighted_barycenter(model, P)
    offset = sub(barycenter, model.two_varpi_X)
    columns = [tuple(model.data.lattice_basis.col(i)) for i in range(model.rank)]
    coordinates = solve_in_span(columns, offset)
    if coordinates is None:
        raise CriterionError(
            f"barycenter minus 2 varpi_X = {offset} does not lie in the span of the weight lattice"
        )

    target = dual_cone(model.valuation_cone.negated())
    membership = target.facet_report(coordinates)
    violated = [row for row in membership if not row["ok"]]
    outcome = Outcome.NOT_EXISTS if violated else Outcome.EXISTS
    logger.info(f"Fano criterion: barycenter={barycenter}, offset={coordinates}, outcome={outcome.value}")
    return Verdict(
        outcome=outcome,
        criterion="fano-barycenter",
        theorem="Kahler-Einstein iff the P-weighted barycenter lies in 2 varpi_X + relint of the dual of minus the valuation cone",
        diagnostics={
            "barycenter": barycenter,
            "two_varpi_X": model.two_varpi_X,
            "offset_lattice_coordinates": coordinates,
            "membership": membership,
            "violated": violated,
        },
    )


# ─────────────────────────────────────────────
# Rank one
# ─────────────────────────────────────────────

def check_rank_one(model: NormalizedModel, fdata: FunctionalData | None = None) -> Verdict:
    if model.rank != 1:
        raise CriterionError(f"rank-one criterion applied to a rank {model.rank} model")
    fdata = fdata or functional_data(model)
    theorem = "rank one: cscK iff L(l) >= 0 for l spanning the valuation cone, equality iff horospherical"
    cone = model.valuation_cone

    if model.is_horospherical:
        values = {}
        for slope in ((1,), (-1,)):
            values[slope] = eval_L(model, fdata, _one_piece(slope))
        diagnostics = {"a": fdata.a, "horospherical": True, "L_on_slopes": {str(s[0]): v for s, v in values.items()}}
        negative = [s for s, v in values.items() if v < 0]
        if not negative:
            return Verdict(Outcome.EXISTS, "rank-one", theorem, diagnostics=diagnostics)
        slope = negative[0]
        return Verdict(Outcome.NOT_EXISTS, "rank-one", theorem, _one_piece(slope), values[slope], diagnostics)

    if not cone.generators:
        raise CriterionError("the valuation cone of a rank one model must be a ray or the whole line")
    ray = cone.generators[0]
    f = _one_piece(ray)
    value = eval_L(model, fdata, f)
    diagnostics = {"a": fdata.a, "horospherical": False, "generator": ray, "L_generator": value}
    if value > 0:
        return Verdict(Outcome.EXISTS, "rank-one", theorem, diagnostics=diagnostics)
    return Verdict(Outcome.NOT_EXISTS, "rank-one", theorem, f, value, diagnostics)


# ─────────────────────────────────────────────
# Toric surfaces
# ─────────────────────────────────────────────

def _crease(vertices: np.ndarray, theta: float, s: float) -> tuple[np.ndarray, float]:
    """Unit normal and offset of a crease meeting the interior for ``0 < s < 1``."""
    normal = np.array([math.cos(theta), math.sin(theta)])
    heights = vertices @ normal
    lo, hi = heights.min(), heights.max()
    return normal, lo + s * (hi - lo)


def _sides(normal: np.ndarray, t: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """``max(0, <n, q> - t)`` and ``max(0, t - <n, q>)`` as ``(c, V)`` arrays."""
    zero = np.zeros(2)
    return [
        (np.array([0.0, -t]), np.array([zero, -normal])),
        (np.array([0.0, t]), np.array([zero, normal])),
    ]


def _smaller_side(rule, normal: np.ndarray, t: float) -> tuple[int, float]:
    """Index of the side with less mass and its normalized L.

    The crease ``max(0, <n, q> - t)`` is normalized by the P-mass of whichever
    side is smaller, not by the mass of the positive part of side 0. Both sides
    have the same L once the Futaki character vanishes, so the two
    normalizations agree in sign.
    """
    masses = [rule.positive_part_mass(c, V) for c, V in _sides(normal, t)]
    side = int(np.argmin(masses))
    if masses[side] <= 1e-14:
        return side, 0.0
    c, V = _sides(normal, t)[side]
    return side, rule.L(c, V) / masses[side]


def check_toric_surface(
    model: NormalizedModel,
    fdata: FunctionalData | None = None,
    tol: float = TOLERANCE,
    angles: int = TORIC_ANGLES,
    offsets: int = TORIC_OFFSETS,
) -> Verdict:
    if model.rank != 2 or not model.is_toric:
        raise CriterionError("the toric surface criterion needs toric data of rank two")
    fdata = fdata or functional_data(model)
    theorem = "toric surface: cscK iff L(max(l1, l2)) >= 0 for all affine l1, l2, equality iff affine"

    futaki = futaki_character(model, fdata)
    diagnostics: dict[str, Any] = {"a": fdata.a, "futaki": [{"direction": l, "L": v} for l, v in futaki]}
    for direction, value in futaki:
        if value != 0:
            slope = neg(direction) if value > 0 else direction
            witness = _one_piece(slope)
            witness_value = eval_L(model, fdata, witness)
            logger.info(f"Toric surface: Futaki character nonzero along {direction}: {value}")
            return Verdict(Outcome.NOT_EXISTS, "toric-surface/futaki", theorem, witness, witness_value, diagnostics)

    rule = build_quadrature(model, fdata)

    def objective(params: np.ndarray) -> float:
        theta, s = params
        normal, t = _crease(rule.vertices, theta, min(max(s, 1e-6), 1 - 1e-6))
        return _smaller_side(rule, normal, t)[1]

    grid = sorted(
        (objective(np.array([theta, s])), theta, s)
        for theta in np.linspace(0.0, 2 * math.pi, angles, endpoint=False)
        for s in np.linspace(0.0, 1.0, offsets + 2)[1:-1]
    )
    best_value, best_theta, best_s = grid[0]
    for _, theta, s in grid[:5]:
        result = minimize(objective, np.array([theta, s]), method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12})
        if result.fun < best_value:
            best_value, (best_theta, best_s) = float(result.fun), result.x
    best_s = min(max(best_s, 1e-6), 1 - 1e-6)
    logger.info(f"Toric surface search: minimum {best_value:.6g} at theta={best_theta:.6f}, s={best_s:.6f}")

    normal, t = _crease(rule.vertices, best_theta, best_s)
    side, _ = _smaller_side(rule, normal, t)
    n = (rationalize(normal[0]), rationalize(normal[1]))
    t = rationalize(t)
    zero = (Rational(0), Rational(0))
    if side == 0:
        candidate = PLFunction(((Rational(0), zero), (-t, neg(n))))
    else:
        candidate = PLFunction(((Rational(0), zero), (t, n)))
    exact_value = eval_L(model, fdata, candidate)
    exact_mass = integrate_pl(model, fdata.P, candidate)
    diagnostics.update(
        search_minimum=best_value,
        grid_points=len(grid),
        candidate_L=exact_value,
        candidate_normalized_L=exact_value / exact_mass if exact_mass else Rational(0),
    )

    if best_value < -tol and exact_value < 0:
        return Verdict(Outcome.NOT_EXISTS, "toric-surface/search", theorem, candidate, exact_value, diagnostics)
    if best_value > tol:
        return Verdict(Outcome.EXISTS, "toric-surface/search", theorem, diagnostics=diagnostics)
    return Verdict(Outcome.INDETERMINATE, "toric-surface/search", theorem, candidate, exact_value, diagnostics)
