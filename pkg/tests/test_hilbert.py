import pytest

from criteria import CriterionError
from functional import PLFunction, eval_L
from hilbert import HilbertBudgetError, ehrhart_count, hilbert_series_oracle, lattice_points, quasi_period


def normalized_ratio(model, fdata, f, k_max):
    fit = hilbert_series_oracle(model, f, k_max)
    return 2 * float(fdata.vol_P) * fit.F1 / float(eval_L(model, fdata, f))


def test_ehrhart_counts_for_p2(p2):
    model, _ = p2
    for k in range(1, 6):
        assert ehrhart_count(model, k) == (3 * k + 1) * (3 * k + 2) // 2


def test_lattice_points_of_dilated_square(unit_square):
    model, _ = unit_square
    assert len(lattice_points(model, 3)) == 16


def test_weyl_dimensions_enter_the_count(model_of):
    model, _ = model_of("p1xp1_diagonal_11")
    # H^0(O(k, k)) on P1 x P1
    for k in range(1, 5):
        assert ehrhart_count(model, k) == (k + 1) ** 2


def test_zero_function_has_zero_F1(unit_square):
    model, _ = unit_square
    fit = hilbert_series_oracle(model, PLFunction.constant(0, 2), 12)
    assert fit.F1 == pytest.approx(0.0, abs=1e-9)
    assert fit.residual == pytest.approx(0.0, abs=1e-9)


def test_segment_absolute_value(segment):
    model, fdata = segment
    f = PLFunction.from_pieces([(0, [-1]), (0, [1])])
    fit = hilbert_series_oracle(model, f, 30)
    assert fit.F1 > 0
    assert 2 * float(fdata.vol_P) * fit.F1 == pytest.approx(float(eval_L(model, fdata, f)), rel=5e-2)


def test_unit_square_crease(unit_square, crease_half):
    model, fdata = unit_square
    fit = hilbert_series_oracle(model, crease_half, 30)
    assert fit.base_change == 2
    assert fit.period == 2
    assert len(fit.fit_ks) >= 4
    assert fit.F1 > 0
    second = PLFunction.from_pieces([(0, [0, 0]), (-1, [-1, -1])])
    first_ratio = normalized_ratio(model, fdata, crease_half, 30)
    second_ratio = normalized_ratio(model, fdata, second, 30)
    assert first_ratio == pytest.approx(second_ratio, rel=5e-2)


def test_horospherical_rank_one_sign(f1_rank_one):
    model, fdata = f1_rank_one
    f = PLFunction.from_pieces([(0, [-1])])
    fit = hilbert_series_oracle(model, f, 30)
    assert (fit.F1 < 0) == (eval_L(model, fdata, f) < 0)


def test_quasi_period_of_integral_function(segment):
    model, _ = segment
    assert quasi_period(model, PLFunction.from_pieces([(0, [-1]), (0, [1])])) == 1


def test_budget_guard(unit_square, monkeypatch):
    import hilbert

    model, _ = unit_square
    monkeypatch.setattr(hilbert, "HILBERT_POINT_BUDGET", 100)
    with pytest.raises(HilbertBudgetError):
        hilbert_series_oracle(model, PLFunction.constant(0, 2), 20)
    with pytest.raises(HilbertBudgetError):
        hilbert_series_oracle(model, PLFunction.constant(0, 2), 3)


def test_non_horospherical_models_are_refused(model_of):
    model, _ = model_of("p1xp1_diagonal_11")
    with pytest.raises(CriterionError):
        hilbert_series_oracle(model, PLFunction.constant(0, 1), 10)


def test_F1_tracks_L_across_toric_models(model_of, crease_half):
    pairs = [
        ("p1xp1_11", crease_half),
        ("p1xp1_12", crease_half),
        ("p2_anticanonical", PLFunction.from_pieces([(0, [0, 0]), (0, [-1, 0])])),
    ]
    ratios = []
    for name, f in pairs:
        model, fdata = model_of(name)
        fit = hilbert_series_oracle(model, f, 30)
        value = eval_L(model, fdata, f)
        assert (fit.F1 > 0) == (value > 0)
        ratios.append(2 * float(fdata.vol_P) * fit.F1 / float(value))
    assert max(ratios) == pytest.approx(min(ratios), rel=5e-2)
