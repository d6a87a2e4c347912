"""Weight polynomials, the constant ``a`` and exact evaluation of L on PL functions."""
import logging
import math
from dataclasses import dataclass
from typing import Any, Sequence

from sympy import Matrix, Rational

from geometry import (
    MultivariatePolynomial,
    RationalPolytope,
    Vector,
    add,
    affine_dimension,
    affine_polynomial,
    coordinate_symbols,
    dot,
    integrate_facet,
    integrate_polynomial,
    integrate_polynomial_boundary,
    is_zero,
    neg,
    polynomial,
    sub,
    to_rational,
    to_vector,
)
from spherical import NormalizedModel

logger = logging.getLogger(__name__)


class FunctionalError(ValueError):
    pass


class NotInConeError(FunctionalError):
    pass


class DegenerateMeasureError(FunctionalError):
    pass


# ─────────────────────────────────────────────
# PL functions
# ─────────────────────────────────────────────

@dataclass(frozen=True)
class PLFunction:
    """``f(q) = max_j (c_j - <v_j, q>)``."""

    pieces: tuple[tuple[Rational, Vector], ...]

    def __post_init__(self):
        if not self.pieces:
            raise FunctionalError("a PL function needs at least one piece")
        dims = {len(v) for _, v in self.pieces}
        if len(dims) != 1:
            raise FunctionalError(f"pieces have inconsistent slope dimensions {sorted(dims)}")

    @classmethod
    def from_pieces(cls, pieces: Sequence) -> "PLFunction":
        return cls(tuple((to_rational(c), to_vector(v)) for c, v in pieces))

    @classmethod
    def constant(cls, c, dim: int) -> "PLFunction":
        return cls.from_pieces([(c, [0] * dim)])

    @classmethod
    def from_document(cls, document: dict) -> "PLFunction":
        try:
            return cls.from_pieces([(piece["c"], piece["v"]) for piece in document["pieces"]])
        except (KeyError, TypeError) as e:
            raise FunctionalError(f"PL function document needs pieces of {{'c', 'v'}}: {e}") from e

    def to_document(self) -> dict[str, Any]:
        return {"pieces": [{"c": str(c), "v": [str(x) for x in v]} for c, v in self.pieces]}

    @property
    def dim(self) -> int:
        return len(self.pieces[0][1])

    def __call__(self, q: Sequence) -> Rational:
        return max(c - dot(v, q) for c, v in self.pieces)

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return PLFunction(tuple((c1 + c2, add(v1, v2)) for c1, v1 in self.pieces for c2, v2 in other.pieces))

    def scaled(self, t) -> "PLFunction":
        t = to_rational(t)
        if t <= 0:
            raise FunctionalError(f"only positive multiples stay in the cone, got {t}")
        return PLFunction(tuple((t * c, tuple(t * x for x in v)) for c, v in self.pieces))

    def translated(self, shift: Sequence) -> "PLFunction":
        """``q' -> f(q' + shift)``, the same function after moving the base point."""
        shift = to_vector(shift)
        return PLFunction(tuple((c - dot(v, shift), v) for c, v in self.pieces))

    def transformed(self, U) -> "PLFunction":
        """``q' -> f(U q')`` for an integer matrix ``U``."""
        return PLFunction(tuple((c, tuple(U.T * Matrix(list(v)))) for c, v in self.pieces))

    def canonical(self) -> "PLFunction":
        """Merge pieces sharing a slope, keeping the largest constant."""
        best: dict[Vector, Rational] = {}
        for c, v in self.pieces:
            if v not in best or c > best[v]:
                best[v] = c
        return PLFunction(tuple((c, v) for v, c in best.items()))

    def piece_polynomial(self, index: int) -> MultivariatePolynomial:
        c, v = self.pieces[index]
        return affine_polynomial(c, neg(v), self.dim)


@dataclass(frozen=True)
class LinearityDecomposition:
    regions: tuple[tuple[int, RationalPolytope], ...]
    redundant: tuple[int, ...]

    @property
    def nld(self) -> int:
        return len(self.regions)


@dataclass(frozen=True)
class FunctionalData:
    P: MultivariatePolynomial
    Q: MultivariatePolynomial
    a: Rational
    vol_P: Rational
    boundary_P: Rational
    int_Q: Rational


# ─────────────────────────────────────────────
# Weight polynomials
# ─────────────────────────────────────────────

def weight_polynomials(model: NormalizedModel) -> tuple[MultivariatePolynomial, MultivariatePolynomial]:
    r = model.rank
    factors = []
    for form in model.active_forms:
        if form.kappa_varpi == 0:
            raise FunctionalError(f"kappa(alpha, varpi) vanishes for the active root {form.root}")
        factors.append(affine_polynomial(form.constant / form.kappa_varpi, [x / form.kappa_varpi for x in form.linear], r))

    one = polynomial(1, r)
    P = math.prod(factors, start=one)
    Q = polynomial(0, r)
    for skip in range(len(factors)):
        Q += math.prod((f for i, f in enumerate(factors) if i != skip), start=one)
    return P, Q


def mean_constant(model: NormalizedModel, P: MultivariatePolynomial, Q: MultivariatePolynomial) -> Rational:
    vol_P = integrate_polynomial(P, model.polytope)
    if vol_P == 0:
        raise DegenerateMeasureError("the measure P dmu has zero mass")
    return (integrate_polynomial_boundary(P, model.polytope) + integrate_polynomial(Q, model.polytope)) / vol_P


def functional_data(model: NormalizedModel) -> FunctionalData:
    P, Q = weight_polynomials(model)
    vol_P = integrate_polynomial(P, model.polytope)
    if vol_P <= 0:
        raise DegenerateMeasureError(f"the measure P dmu has mass {vol_P}")
    boundary_P = integrate_polynomial_boundary(P, model.polytope)
    int_Q = integrate_polynomial(Q, model.polytope)
    a = (boundary_P + int_Q) / vol_P
    logger.info(f"Functional data: vol_P={vol_P}, boundary_P={boundary_P}, int_Q={int_Q}, a={a}")
    return FunctionalData(P=P, Q=Q, a=a, vol_P=vol_P, boundary_P=boundary_P, int_Q=int_Q)


def weighted_barycenter(model: NormalizedModel, P: MultivariatePolynomial) -> Vector:
    """Barycenter of the moment polytope for ``P dmu``, in ambient weight coordinates."""
    vol_P = integrate_polynomial(P, model.polytope)
    if vol_P == 0:
        raise DegenerateMeasureError("the measure P dmu has zero mass")
    q = coordinate_symbols(model.rank)
    center = tuple(
        integrate_polynomial(polynomial(x * P.as_expr(), model.rank), model.polytope) / vol_P for x in q
    )
    return model.data.to_ambient(center)


# ─────────────────────────────────────────────
# Linearity domains and L
# ─────────────────────────────────────────────

def check_slopes(model: NormalizedModel, f: PLFunction) -> None:
    if f.dim != model.rank:
        raise FunctionalError(f"PL function has slopes of dimension {f.dim}, model rank is {model.rank}")
    for c, v in f.pieces:
        if not model.valuation_cone.contains(v):
            raise NotInConeError(f"slope vector {tuple(str(x) for x in v)} is outside the valuation cone")


def linearity_domains(model: NormalizedModel, f: PLFunction) -> LinearityDecomposition:
    polytope = model.polytope
    regions = []
    redundant = []
    for j, (cj, vj) in enumerate(f.pieces):
        rows = []
        dominated = False
        for i, (ci, vi) in enumerate(f.pieces):
            if i == j:
                continue
            if vi == vj:
                if ci > cj or (ci == cj and i < j):
                    dominated = True
                    break
                continue
            rows.append((sub(vj, vi), cj - ci))
        region = None if dominated else polytope.intersect(rows)
        if region is not None and region.is_full_dimensional:
            regions.append((j, region))
        else:
            redundant.append(j)
    return LinearityDecomposition(regions=tuple(regions), redundant=tuple(redundant))


def eval_L(model: NormalizedModel, fdata: FunctionalData, f: PLFunction) -> Rational:
    check_slopes(model, f)
    r = model.rank
    interior_weight = fdata.P * fdata.a - fdata.Q
    boundary = Rational(0)
    interior = Rational(0)
    for j, region in linearity_domains(model, f).regions:
        g = f.piece_polynomial(j)
        interior += integrate_polynomial(g * interior_weight, region)
        gP = g * fdata.P
        for u, c, _ in model.polytope.facets:
            face = tuple(v for v in region.vertices if dot(u, v) == c)
            if len(face) >= r and affine_dimension(face) == r - 1:
                boundary += integrate_facet(gP, region, u, face)
    return boundary - interior


def integrate_pl(model: NormalizedModel, weight: MultivariatePolynomial, f: PLFunction) -> Rational:
    """Exact ``int_Delta f * weight dmu``."""
    return sum(
        (integrate_polynomial(f.piece_polynomial(j) * weight, region) for j, region in linearity_domains(model, f).regions),
        Rational(0),
    )


def is_product_function(model: NormalizedModel, f: PLFunction) -> bool:
    decomposition = linearity_domains(model, f)
    if decomposition.nld != 1:
        return False
    j, _ = decomposition.regions[0]
    return model.valuation_cone.in_lineality_space(f.pieces[j][1])


def futaki_character(model: NormalizedModel, fdata: FunctionalData) -> list[tuple[Vector, Rational]]:
    """L on the linear functions ``q -> -<l, q>`` along the lineality of the valuation cone."""
    origin = Rational(0)
    return [
        (l, eval_L(model, fdata, PLFunction(((origin, tuple(Rational(x) for x in l)),))))
        for l in model.valuation_cone.lineality_space
    ]


# ─────────────────────────────────────────────
# Toric surfaces: Donaldson's functional, coded on polygons directly
# ─────────────────────────────────────────────

def _clip(polygon: list[Vector], normal: Vector, bound) -> list[Vector]:
    """Sutherland-Hodgman clip of a convex polygon by ``<normal, x> <= bound``."""
    result = []
    for k, current in enumerate(polygon):
        previous = polygon[k - 1]
        inside_cur = dot(normal, current) <= bound
        inside_prev = dot(normal, previous) <= bound
        if inside_cur != inside_prev:
            t = (bound - dot(normal, previous)) / dot(normal, sub(current, previous))
            result.append(add(previous, tuple(t * x for x in sub(current, previous))))
        if inside_cur:
            result.append(current)
    return result


def _lattice_length(p: Vector, q: Vector) -> Rational:
    d = sub(q, p)
    if is_zero(d):
        return Rational(0)
    denominator = math.lcm(*(int(x.q) for x in d))
    integral = [int(x * denominator) for x in d]
    return Rational(math.gcd(*integral), denominator)


def _polygon_moments(polygon: list[Vector]) -> tuple[Rational, Rational, Rational]:
    """Area and first moments of a counterclockwise polygon (shoelace)."""
    area = mx = my = Rational(0)
    for k in range(len(polygon)):
        x0, y0 = polygon[k - 1]
        x1, y1 = polygon[k]
        cross = x0 * y1 - x1 * y0
        area += cross / 2
        mx += (x0 + x1) * cross / 6
        my += (y0 + y1) * cross / 6
    return area, mx, my


def _counterclockwise(vertices: Sequence[Vector]) -> list[Vector]:
    cx = sum((v[0] for v in vertices), Rational(0)) / len(vertices)
    cy = sum((v[1] for v in vertices), Rational(0)) / len(vertices)

    def half_and_slope(v):
        dx, dy = v[0] - cx, v[1] - cy
        upper = dy > 0 or (dy == 0 and dx > 0)
        # exact angular order: by half-plane, then by cross product sign
        return (0 if upper else 1, _AngleKey(dx, dy))

    return sorted(vertices, key=half_and_slope)


class _AngleKey:
    def __init__(self, dx, dy):
        self.dx, self.dy = dx, dy

    def __lt__(self, other):
        return self.dx * other.dy - self.dy * other.dx > 0


def donaldson_toric_functional(polytope: RationalPolytope, f: PLFunction) -> Rational:
    """``int_{boundary} f dsigma - a int f dx`` for a lattice-normalized polygon."""
    if polytope.dim != 2:
        raise FunctionalError("the polygon functional is only defined for surfaces")
    base = _counterclockwise(list(polytope.vertices))
    area, _, _ = _polygon_moments(base)
    perimeter = sum((_lattice_length(base[k - 1], base[k]) for k in range(len(base))), Rational(0))
    a = perimeter / area

    f = f.canonical()
    boundary = interior = Rational(0)
    for j, (cj, vj) in enumerate(f.pieces):
        cell = base
        for i, (ci, vi) in enumerate(f.pieces):
            if i != j and cell:
                cell = _clip(cell, sub(vj, vi), cj - ci)
        if len(cell) < 3:
            continue
        cell_area, mx, my = _polygon_moments(cell)
        if cell_area == 0:
            continue
        interior += cj * cell_area - vj[0] * mx - vj[1] * my
        for k in range(len(cell)):
            p, q = cell[k - 1], cell[k]
            on_edge = any(
                dot(u, p) == c and dot(u, q) == c for u, c in polytope.inequalities
            )
            if on_edge and p != q:
                midpoint = tuple((x + y) / 2 for x, y in zip(p, q))
                boundary += (cj - dot(vj, midpoint)) * _lattice_length(p, q)
    return boundary - a * interior
