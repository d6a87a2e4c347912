import math

import numpy as np
import pytest
from sympy import Matrix, Rational

import criteria
from config import FIXTURES_DIR, TOLERANCE
from criteria import (
    CriterionError,
    Outcome,
    _crease,
    _sides,
    _smaller_side,
    check_fano_KE,
    check_rank_one,
    check_toric_surface,
)
from functional import PLFunction, eval_L, functional_data
from quadrature import build_quadrature
from spherical import normalize

F1_POLARIZATIONS = ["21", "31", "32", "52"]


@pytest.mark.parametrize(
    "fixture, outcome",
    [
        ("p2_anticanonical", Outcome.EXISTS),
        ("p1xp1_anticanonical", Outcome.EXISTS),
        ("segment_p1", Outcome.EXISTS),
        ("f1_toric_anticanonical", Outcome.NOT_EXISTS),
        ("p1xp1_diagonal_anticanonical", Outcome.EXISTS),
    ],
)
def test_fano_barycenter(model_of, fixture, outcome):
    model, _ = model_of(fixture)
    verdict = check_fano_KE(model)
    assert verdict.outcome is outcome
    assert bool(verdict.diagnostics["violated"]) == (outcome is Outcome.NOT_EXISTS)


def test_toric_fano_criterion_reads_barycenter_zero(model_of):
    model, _ = model_of("f1_toric_anticanonical")
    verdict = check_fano_KE(model)
    assert verdict.diagnostics["two_varpi_X"] == (0, 0)
    assert verdict.diagnostics["barycenter"] != (0, 0)
    assert all(row["kind"] == "span" for row in verdict.diagnostics["membership"])


def test_fano_offset_for_diagonal_quadric(model_of):
    model, _ = model_of("p1xp1_diagonal_anticanonical")
    verdict = check_fano_KE(model)
    assert verdict.diagnostics["offset_lattice_coordinates"] == (Rational(1, 3),)


@pytest.mark.parametrize("fixture", ["p2_anticanonical", "f1_toric_anticanonical", "p1xp1_diagonal_anticanonical"])
def test_fano_verdict_survives_lattice_change_and_gram_rescaling(model_of, fixture):
    model, _ = model_of(fixture)
    expected = check_fano_KE(model).outcome
    if model.rank == 2:
        changed = model.data.with_lattice_change(Matrix([[1, 3], [0, 1]]))
    else:
        changed = model.data.with_lattice_change(Matrix([[-1]]))
    assert check_fano_KE(normalize(changed)).outcome is expected
    rescaled = model.data.with_gram(model.data.gram * 3)
    assert check_fano_KE(normalize(rescaled)).outcome is expected


def test_fano_criterion_needs_the_flag(model_of):
    model, _ = model_of("p1xp1_11")
    with pytest.raises(CriterionError):
        check_fano_KE(model)


@pytest.mark.parametrize("ab", F1_POLARIZATIONS)
def test_rank_one_f1_has_no_csck_metric(model_of, ab):
    model, fdata = model_of(f"f1_sl2_rank1_{ab}")
    verdict = check_rank_one(model, fdata)
    assert verdict.outcome is Outcome.NOT_EXISTS
    assert verdict.witness_value < 0
    assert eval_L(model, fdata, verdict.witness) == verdict.witness_value


def test_rank_one_segment_is_balanced(segment):
    model, fdata = segment
    verdict = check_rank_one(model, fdata)
    assert verdict.outcome is Outcome.EXISTS
    assert all(v == 0 for v in verdict.diagnostics["L_on_slopes"].values())


def test_rank_one_half_line(model_of):
    model, fdata = model_of("p1xp1_diagonal_11")
    verdict = check_rank_one(model, fdata)
    assert verdict.outcome is Outcome.EXISTS
    assert verdict.diagnostics["L_generator"] == Rational(1, 2)


def test_rank_one_rejects_other_ranks(unit_square):
    with pytest.raises(CriterionError):
        check_rank_one(*unit_square)


@pytest.mark.parametrize("ab", F1_POLARIZATIONS)
def test_toric_and_rank_one_pipelines_agree_on_f1(model_of, ab):
    toric = check_toric_surface(*model_of(f"f1_toric_{ab}"))
    rank_one = check_rank_one(*model_of(f"f1_sl2_rank1_{ab}"))
    assert toric.outcome is rank_one.outcome is Outcome.NOT_EXISTS
    assert toric.criterion == "toric-surface/futaki"
    assert toric.witness_value < 0


def test_toric_f1_anticanonical_has_futaki_obstruction(model_of):
    verdict = check_toric_surface(*model_of("f1_toric_anticanonical"))
    assert verdict.outcome is Outcome.NOT_EXISTS


@pytest.mark.parametrize("fixture", ["p2_anticanonical", "p1xp1_11"])
def test_toric_surface_stable_polygons(model_of, fixture):
    verdict = check_toric_surface(*model_of(fixture))
    assert verdict.outcome is Outcome.EXISTS
    assert verdict.diagnostics["search_minimum"] > 0
    assert verdict.diagnostics["candidate_L"] >= 0


def test_toric_surface_verdict_is_invariant_under_dilation(model_of):
    model, _ = model_of("f1_toric_21")
    dilated = normalize(model.data.dilated(3))
    assert check_toric_surface(dilated, functional_data(dilated)).outcome is Outcome.NOT_EXISTS


def test_toric_surface_rejects_non_toric(f1_rank_one):
    with pytest.raises(CriterionError):
        check_toric_surface(*f1_rank_one)


@pytest.mark.parametrize("bounds", [(1, 1), (1, 2), (2, 3), (1, 3), (3, 5)])
def test_toric_surface_accepts_every_p1xp1_polarization(quadrant, bounds):
    model, _ = quadrant(bounds, roots=False)
    verdict = check_toric_surface(model)
    assert verdict.outcome is Outcome.EXISTS
    assert verdict.diagnostics["search_minimum"] > TOLERANCE


def test_rank_one_computes_its_own_functional_data(model_of):
    model, _ = model_of("f1_sl2_rank1_32")
    assert check_rank_one(model).outcome is Outcome.NOT_EXISTS


def test_toric_surface_search_reports_a_destabilizing_crease(model_of, monkeypatch):
    # hide the Futaki obstruction of F1 and steer the search to the crease
    # parallel to the q2-axis near the vertex (2, 0)
    model, fdata = model_of("f1_toric_21")
    monkeypatch.setattr(criteria, "futaki_character", lambda model, fdata: [((1, 0), Rational(0)), ((0, 1), Rational(0))])
    monkeypatch.setattr(criteria, "_smaller_side", lambda rule, normal, t: (0, float(normal[0])))
    verdict = check_toric_surface(model, fdata, angles=72, offsets=19)
    assert verdict.outcome is Outcome.NOT_EXISTS
    assert verdict.criterion == "toric-surface/search"
    assert verdict.witness.pieces == ((0, (0, 0)), (Rational(19, 10), (1, 0)))
    assert verdict.witness_value < 0
    assert eval_L(model, fdata, verdict.witness) == verdict.witness_value


@pytest.mark.parametrize("fixture", ["p1xp1_11", "p2_anticanonical"])
def test_crease_normalizations_agree_in_sign(model_of, fixture):
    model, fdata = model_of(fixture)
    rule = build_quadrature(model, fdata)
    for theta in np.linspace(0.0, 2 * math.pi, 12, endpoint=False):
        for s in (0.2, 0.5, 0.8):
            normal, t = _crease(rule.vertices, theta, s)
            c, V = _sides(normal, t)[0]
            positive_part = rule.L(c, V) / rule.positive_part_mass(c, V)
            assert np.sign(positive_part) == np.sign(_smaller_side(rule, normal, t)[1])

    # with vanishing Futaki character both sides of a crease carry the same L
    t = Rational(1, 3)
    upper = PLFunction.from_pieces([(0, [0, 0]), (-t, [-1, -2])])
    lower = PLFunction.from_pieces([(0, [0, 0]), (t, [1, 2])])
    assert eval_L(model, fdata, upper) == eval_L(model, fdata, lower)


def verdict_of(model):
    if model.rank == 1:
        return check_rank_one(model)
    if model.rank == 2 and model.is_toric:
        return check_toric_surface(model)
    return check_fano_KE(model)


SPHERICAL_FIXTURES = sorted(
    p.stem for p in FIXTURES_DIR.glob("*.json") if p.stem not in {"crease_half", "segment_abs", "linear_minus_q"}
)


@pytest.mark.parametrize("fixture", SPHERICAL_FIXTURES)
def test_verdict_invariant_chi_shift(model_of, fixture):
    model, _ = model_of(fixture)
    expected = verdict_of(model)
    shift = tuple(Rational(1 - 2 * i, 2) for i in range(model.rank))
    moved = verdict_of(normalize(model.data.with_chi(model.data.to_ambient(shift))))
    assert moved.outcome is expected.outcome
    assert moved.criterion == expected.criterion
    assert moved.witness_value == expected.witness_value


@pytest.mark.parametrize("t", [2, 3])
@pytest.mark.parametrize("fixture", [f for f in SPHERICAL_FIXTURES if f != "p1_cube_anticanonical"])
def test_verdict_invariant_under_dilation(model_of, fixture, t):
    model, _ = model_of(fixture)
    expected = verdict_of(model)
    dilated = verdict_of(normalize(model.data.dilated(t)))
    assert dilated.outcome is expected.outcome
    assert dilated.criterion == expected.criterion
