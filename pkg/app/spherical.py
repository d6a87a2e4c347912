"""Combinatorial data of a polarized spherical variety and its lattice normalization."""
import json
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Any, Sequence

from sympy import ImmutableMatrix, Matrix, Rational

from geometry import (
    GeometryError,
    PolyhedralCone,
    RationalPolytope,
    Vector,
    add,
    dot,
    scale,
    to_rational,
    to_vector,
)

logger = logging.getLogger(__name__)


class SphericalDataError(ValueError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


@dataclass(frozen=True)
class SphericalData:
    ambient_dim: int
    gram: ImmutableMatrix
    positive_roots: tuple[Vector, ...]
    lattice_basis: ImmutableMatrix
    chi: Vector
    polytope_ambient: tuple[tuple[Vector, Rational], ...]
    valuation_cone: PolyhedralCone
    is_fano_anticanonical: bool = False
    name: str = ""

    @property
    def rank(self) -> int:
        return self.lattice_basis.cols

    def kappa(self, u: Sequence, v: Sequence) -> Rational:
        return (Matrix([list(u)]) * self.gram * Matrix(list(v)))[0, 0]

    def to_ambient(self, q: Sequence) -> Vector:
        return add(self.chi, tuple(self.lattice_basis * Matrix(list(q))))

    def with_chi(self, chi: Sequence) -> "SphericalData":
        return replace(self, chi=to_vector(chi))

    def with_lattice_change(self, U: Matrix) -> "SphericalData":
        """Replace the lattice basis ``B`` by ``B U`` and carry the valuation cone along."""
        if abs(U.det()) != 1:
            raise SphericalDataError("lattice change must be unimodular", "lattice_basis")
        UT = ImmutableMatrix(U).T
        cone = PolyhedralCone.from_vectors(
            self.rank,
            [tuple(UT * Matrix(list(g))) for g in self.valuation_cone.generators],
            [tuple(UT * Matrix(list(l))) for l in self.valuation_cone.lineality],
        )
        return replace(self, lattice_basis=ImmutableMatrix(self.lattice_basis * U), valuation_cone=cone)

    def dilated(self, t) -> "SphericalData":
        t = to_rational(t)
        rows = tuple((n, c * t) for n, c in self.polytope_ambient)
        return replace(self, chi=scale(self.chi, t), polytope_ambient=rows, is_fano_anticanonical=False)

    def with_gram(self, gram: Matrix) -> "SphericalData":
        return replace(self, gram=ImmutableMatrix(gram))


@dataclass(frozen=True)
class RootForm:
    root: Vector
    constant: Rational
    linear: Vector
    kappa_varpi: Rational

    def at(self, q: Sequence) -> Rational:
        return self.constant + dot(self.linear, q)


@dataclass(frozen=True)
class NormalizedModel:
    data: SphericalData
    polytope: RationalPolytope
    root_forms: tuple[RootForm, ...]
    varpi: Vector
    active_roots: tuple[Vector, ...]
    two_varpi_X: Vector
    valuation_cone: PolyhedralCone

    @property
    def rank(self) -> int:
        return self.polytope.dim

    @property
    def active_forms(self) -> tuple[RootForm, ...]:
        return tuple(form for form in self.root_forms if form.root in self.active_roots)

    @property
    def is_toric(self) -> bool:
        return not self.data.positive_roots

    @cached_property
    def is_horospherical(self) -> bool:
        return self.valuation_cone.is_whole_space


# ─────────────────────────────────────────────
# Parsing
# ─────────────────────────────────────────────

def _rational(value: Any, field: str) -> Rational:
    try:
        return to_rational(value)
    except (GeometryError, TypeError, ValueError) as e:
        raise SphericalDataError(f"expected a rational 'p/q', got {value!r} ({e})", field) from e


def _vector(value: Any, field: str, length: int | None = None) -> Vector:
    if not isinstance(value, list):
        raise SphericalDataError(f"expected an array, got {type(value).__name__}", field)
    vector = tuple(_rational(x, f"{field}[{i}]") for i, x in enumerate(value))
    if length is not None and len(vector) != length:
        raise SphericalDataError(f"expected {length} entries, got {len(vector)}", field)
    return vector


def _required(document: dict, key: str) -> Any:
    if key not in document:
        raise SphericalDataError("missing required key", key)
    return document[key]


def parse_spherical_data(document: str | dict, source: str = "<input>") -> SphericalData:
    """Validate a JSON document (text or already decoded) into ``SphericalData``."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise SphericalDataError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(document, dict):
        raise SphericalDataError("top level must be an object")

    d = _required(document, "ambient_dim")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise SphericalDataError(f"expected a positive integer, got {d!r}", "ambient_dim")

    gram_rows = _required(document, "gram")
    if not isinstance(gram_rows, list) or len(gram_rows) != d:
        raise SphericalDataError(f"expected {d} rows", "gram")
    gram = ImmutableMatrix([list(_vector(row, f"gram[{i}]", d)) for i, row in enumerate(gram_rows)])
    if gram != gram.T:
        raise SphericalDataError("pairing matrix is not symmetric", "gram")
    if not gram.is_positive_semidefinite:
        raise SphericalDataError("pairing matrix is not positive semidefinite", "gram")

    roots = tuple(
        _vector(root, f"positive_roots[{i}]", d) for i, root in enumerate(document.get("positive_roots") or [])
    )
    for i, root in enumerate(roots):
        norm = (Matrix([list(root)]) * gram * Matrix(list(root)))[0, 0]
        if norm <= 0:
            raise SphericalDataError(f"root has kappa(alpha, alpha) = {norm} <= 0", f"positive_roots[{i}]")

    columns = _required(document, "lattice_basis")
    if not isinstance(columns, list) or not columns:
        raise SphericalDataError("expected a nonempty array of column vectors", "lattice_basis")
    basis_columns = [_vector(c, f"lattice_basis[{i}]", d) for i, c in enumerate(columns)]
    basis = ImmutableMatrix([list(c) for c in basis_columns]).T
    if basis.rank() != len(basis_columns):
        raise SphericalDataError("lattice basis columns are not linearly independent", "lattice_basis")
    r = len(basis_columns)

    polytope_doc = _required(document, "polytope")
    inequalities = polytope_doc.get("inequalities") if isinstance(polytope_doc, dict) else None
    if not isinstance(inequalities, list) or not inequalities:
        raise SphericalDataError("expected a nonempty array of inequalities", "polytope.inequalities")
    rows = []
    for i, row in enumerate(inequalities):
        field = f"polytope.inequalities[{i}]"
        if not isinstance(row, dict):
            raise SphericalDataError("expected an object with 'normal' and 'bound'", field)
        rows.append((_vector(_required(row, "normal"), f"{field}.normal", d), _rational(_required(row, "bound"), f"{field}.bound")))

    cone_doc = _required(document, "valuation_cone")
    if not isinstance(cone_doc, dict):
        raise SphericalDataError("expected an object", "valuation_cone")
    try:
        cone = PolyhedralCone.from_vectors(
            r,
            [_vector(g, f"valuation_cone.generators[{i}]", r) for i, g in enumerate(cone_doc.get("generators") or [])],
            [_vector(g, f"valuation_cone.lineality[{i}]", r) for i, g in enumerate(cone_doc.get("lineality") or [])],
        )
    except GeometryError as e:
        raise SphericalDataError(str(e), "valuation_cone") from e

    provisional_chi = None
    if document.get("chi") is not None:
        provisional_chi = _vector(document["chi"], "chi", d)
    elif r != d:
        raise SphericalDataError("chi may only be omitted when the lattice has full rank", "chi")
    else:
        provisional_chi = tuple(Rational(0) for _ in range(d))

    data = SphericalData(
        ambient_dim=d,
        gram=gram,
        positive_roots=roots,
        lattice_basis=basis,
        chi=provisional_chi,
        polytope_ambient=tuple(rows),
        valuation_cone=cone,
        is_fano_anticanonical=bool(document.get("fano", False)),
        name=str(document.get("name", "")),
    )
    polytope = _lattice_polytope(data)
    if document.get("chi") is None:
        data = data.with_chi(min(data.to_ambient(v) for v in polytope.vertices))
        polytope = _lattice_polytope(data)

    for i, form in enumerate(_root_forms(data)):
        for vertex in polytope.vertices:
            if form.at(vertex) < 0:
                raise SphericalDataError(
                    f"moment polytope vertex {data.to_ambient(vertex)} lies outside the dominant chamber",
                    f"positive_roots[{i}]",
                )
    logger.info(f"Parsed {source}: ambient_dim={d}, rank={r}, roots={len(roots)}")
    return data


def load_spherical_data(path: str | Path) -> SphericalData:
    path = Path(path)
    return parse_spherical_data(path.read_text(encoding="utf-8"), source=str(path))


# ─────────────────────────────────────────────
# Normalization
# ─────────────────────────────────────────────

def _lattice_polytope(data: SphericalData) -> RationalPolytope:
    B = data.lattice_basis
    rows = []
    for normal, bound in data.polytope_ambient:
        pulled = tuple(B.T * Matrix(list(normal)))
        rows.append((pulled, bound - dot(normal, data.chi)))
    try:
        polytope = RationalPolytope.from_inequalities(data.rank, rows)
        if not polytope.is_full_dimensional:
            raise SphericalDataError(
                f"moment polytope has dimension {polytope.affine_dimension}, expected {data.rank}", "polytope"
            )
    except GeometryError as e:
        raise SphericalDataError(str(e), "polytope") from e
    return polytope


def _varpi(data: SphericalData) -> Vector:
    total = tuple(Rational(0) for _ in range(data.ambient_dim))
    for root in data.positive_roots:
        total = add(total, root)
    return scale(total, Rational(1, 2))


def _root_forms(data: SphericalData) -> tuple[RootForm, ...]:
    varpi = _varpi(data)
    columns = [tuple(data.lattice_basis.col(i)) for i in range(data.rank)]
    return tuple(
        RootForm(
            root=root,
            constant=data.kappa(root, data.chi),
            linear=tuple(data.kappa(root, e) for e in columns),
            kappa_varpi=data.kappa(root, varpi),
        )
        for root in data.positive_roots
    )


def active_roots(data: SphericalData) -> tuple[Vector, ...]:
    polytope = _lattice_polytope(data)
    return tuple(
        form.root for form in _root_forms(data) if any(form.at(v) != 0 for v in polytope.vertices)
    )


def normalize(data: SphericalData) -> NormalizedModel:
    if data.lattice_basis.rank() != data.rank:
        raise SphericalDataError("lattice basis columns are not linearly independent", "lattice_basis")
    polytope = _lattice_polytope(data)
    forms = _root_forms(data)
    active = active_roots(data)
    two_varpi_X = tuple(Rational(0) for _ in range(data.ambient_dim))
    for root in active:
        two_varpi_X = add(two_varpi_X, root)
    logger.info(f"Normalized model: rank={data.rank}, active roots={len(active)}/{len(forms)}")
    return NormalizedModel(
        data=data,
        polytope=polytope,
        root_forms=forms,
        varpi=_varpi(data),
        active_roots=active,
        two_varpi_X=two_varpi_X,
        valuation_cone=data.valuation_cone,
    )


def is_horospherical(model: NormalizedModel) -> bool:
    return model.is_horospherical


def weyl_dimension(model: NormalizedModel, weight: Sequence) -> Rational:
    """Weyl dimension factor of the highest weight ``weight`` over all of Phi+."""
    data = model.data
    result = Rational(1)
    for form in model.root_forms:
        result *= data.kappa(form.root, add(weight, model.varpi)) / form.kappa_varpi
    return result
