"""Multi-start numerical search for a destabilizing PL function.

Restarts are independent and run concurrently in worker threads; the best
candidate is rationalized and re-evaluated exactly. A search that finds nothing
negative proves nothing.
"""
import asyncio
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, nnls
from sympy import Rational

from config import RATIONALIZE_DENOMINATOR, SEARCH_MAXITER, SEARCH_RESTARTS
from criteria import rationalize
from functional import FunctionalData, PLFunction, eval_L
from geometry import PolyhedralCone, Vector, add, scale
from quadrature import QuadratureRule, build_quadrature
from spherical import NormalizedModel

logger = logging.getLogger(__name__)

NORMALIZATION_FLOOR = 1e-12


@dataclass(frozen=True)
class SearchReport:
    m: int
    seed: int
    restarts: int
    best_f: PLFunction
    best_value: Rational
    best_numeric: float
    trace: tuple[float, ...] = field(default_factory=tuple)

    @property
    def negative_found(self) -> bool:
        return self.best_value < 0

    @property
    def conclusive(self) -> bool:
        return self.negative_found


def cone_spanning_set(cone: PolyhedralCone) -> list[Vector]:
    """Generators plus both signs of the lineality basis: the cone is their nonnegative span."""
    vectors = list(cone.generators)
    for l in cone.lineality:
        vectors.append(tuple(l))
        vectors.append(tuple(-x for x in l))
    return vectors


def project_onto_cone(G: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest point of ``{G a : a >= 0}`` to ``v``; returns the point and ``a``."""
    if G.shape[1] == 0:
        return np.zeros_like(v), np.zeros(0)
    coefficients, _ = nnls(G, v)
    return G @ coefficients, coefficients


class _Objective:
    def __init__(self, rule: QuadratureRule, G: np.ndarray, m: int, r: int):
        self.rule, self.G, self.m, self.r = rule, G, m, r

    def unpack(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        c = x[: self.m]
        raw = x[self.m:].reshape(self.m, self.r)
        projected = [project_onto_cone(self.G, row) for row in raw]
        V = np.array([p for p, _ in projected])
        A = np.array([a for _, a in projected])
        return c, V, A

    def __call__(self, x: np.ndarray) -> float:
        c, V, _ = self.unpack(x)
        norm = self.rule.normalization(c, V)
        if norm < NORMALIZATION_FLOOR:
            return 0.0
        return self.rule.L(c, V) / norm


def _restart(objective: _Objective, x0: np.ndarray, maxiter: int) -> tuple[float, np.ndarray]:
    result = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={"maxiter": maxiter, "xatol": 1e-8, "fatol": 1e-12, "adaptive": True},
    )
    return float(result.fun), result.x


async def _run_restarts(objective: _Objective, starts: list[np.ndarray], maxiter: int):
    return await asyncio.gather(*(asyncio.to_thread(_restart, objective, x0, maxiter) for x0 in starts))


def _exact_candidate(objective: _Objective, x: np.ndarray, generators: list[Vector], denominator: int) -> PLFunction:
    c, V, A = objective.unpack(x)
    norm = objective.rule.normalization(c, V)
    factor = rationalize(1.0 / norm, denominator) if norm >= NORMALIZATION_FLOOR else Rational(1)
    if factor <= 0:
        factor = Rational(1)
    zero = tuple(Rational(0) for _ in range(objective.r))
    pieces = []
    for j in range(objective.m):
        slope = zero
        for g, a in zip(generators, A[j]):
            coefficient = rationalize(max(a, 0.0), denominator)
            if coefficient:
                slope = add(slope, scale(g, coefficient))
        pieces.append((rationalize(c[j], denominator) * factor, scale(slope, factor)))
    return PLFunction(tuple(pieces)).canonical()


def search_destabilizer(
    model: NormalizedModel,
    fdata: FunctionalData,
    m: int,
    budget: int = SEARCH_RESTARTS,
    seed: int = 0,
    maxiter: int = SEARCH_MAXITER,
    rule: QuadratureRule | None = None,
) -> SearchReport:
    if m < 1:
        raise ValueError(f"need at least one affine piece, got m={m}")
    if budget < 1:
        raise ValueError(f"need at least one restart, got budget={budget}")
    r = model.rank
    rule = rule or build_quadrature(model, fdata, seed=seed)
    generators = cone_spanning_set(model.valuation_cone)
    G = np.array([[float(x) for x in g] for g in generators]).T.reshape(r, len(generators))
    objective = _Objective(rule, G, m, r)

    starts = []
    for child in np.random.SeedSequence(seed).spawn(budget):
        rng = np.random.default_rng(child)
        starts.append(np.concatenate([rng.uniform(-1.0, 1.0, m), rng.normal(size=m * r)]))

    results = asyncio.run(_run_restarts(objective, starts, maxiter * m * (r + 1)))
    trace = tuple(value for value, _ in results)
    index = min(range(budget), key=lambda i: (trace[i], i))
    best_numeric, best_x = results[index]
    logger.info(f"Search m={m}: best normalized L {best_numeric:.6g} from restart {index}/{budget}")

    best_f = PLFunction.constant(0, r)
    best_value = Rational(0)
    if best_numeric < 0:
        candidate = _exact_candidate(objective, best_x, generators, RATIONALIZE_DENOMINATOR)
        value = eval_L(model, fdata, candidate)
        if value < 0:
            best_f, best_value = candidate, value
        else:
            logger.warning(f"Rationalized search incumbent lost its sign: exact L = {value}")

    return SearchReport(
        m=m,
        seed=seed,
        restarts=budget,
        best_f=best_f,
        best_value=best_value,
        best_numeric=best_numeric,
        trace=trace,
    )
