from fractions import Fraction

import pytest

from almostfano.invariants import (
    ChernData,
    ConicBundle,
    DelPezzoFibration,
    DivisorToCurve,
    DivisorToPoint,
    HalfInteger,
    NumericalRow,
    PairingKind,
    Reason,
    SplittingType,
    Status,
    StatusRecord,
    SurfaceType,
    TransformCoefficients,
    k3_from_blowup,
    render_rational,
    sigma,
)


def test_half_integer_accepts_halves_only():
    assert HalfInteger(7, 2) == Fraction(7, 2)
    assert HalfInteger(4) == 4
    with pytest.raises(ValueError):
        HalfInteger(1, 3)


def test_render_rational():
    assert render_rational(Fraction(9, 2)) == "9/2"
    assert render_rational(Fraction(-4, 2)) == "-2"


def test_status_record_round_trip():
    for text in ("+", "?", "x:DIV8", "x:GRUSON_PESKINE"):
        assert StatusRecord.parse(text).render() == text
    assert StatusRecord.parse("x:DIV8").flag == "x"
    with pytest.raises(ValueError):
        StatusRecord.parse("maybe")
    with pytest.raises(ValueError):
        StatusRecord(Status.EXCLUDED)
    with pytest.raises(ValueError):
        StatusRecord(Status.OPEN, Reason.DIV8)


def test_mechanical_reasons():
    assert Reason.DIV8.mechanical and Reason.GRADARG.mechanical
    assert not Reason.CASTELNUOVO.mechanical


def test_surface_numbers():
    assert [s.k2e for s in SurfaceType] == [4, 2, 1]
    assert SurfaceType.P2_MINUS2.discrepancy == Fraction(1, 2)
    assert not SurfaceType.P2_MINUS2.gorenstein


def test_transform_coefficients_relations():
    co = TransformCoefficients.from_alpha_beta(Fraction(1, 2), Fraction(-1, 2))
    assert co.alpha_plus == 1 and co.beta_plus == -2
    assert co.admissible_fibration_pair
    with pytest.raises(ValueError):
        TransformCoefficients(1, -1, 2, -1)
    with pytest.raises(ValueError):
        TransformCoefficients.from_alpha_beta(1, 1)


def test_splitting_type_render_parse():
    st = SplittingType.parse("(-1^2,0^5)")
    assert st.rank == 7 and st.h0() == 5
    assert st.render() == "(-1^2,0^5)"
    assert SplittingType.of((1, 2), (0, 0), (1, 1)).render() == "(1^3)"
    with pytest.raises(ValueError):
        SplittingType.parse("0,1")


def test_chern_data():
    assert ChernData.parse("(5,13)") == ChernData(5, 13)
    assert ChernData(3, -1).render() == "(3,-1)"


def test_sigma_and_blowup_degree():
    assert sigma(2, 4, 0) == 10
    assert k3_from_blowup(3, 2, 5, 0) == 22
    with pytest.raises(ValueError):
        sigma(0, 1, 0)


def test_side_validation():
    with pytest.raises(ValueError):
        DelPezzoFibration(7)
    with pytest.raises(ValueError):
        ConicBundle(13)
    with pytest.raises(ValueError):
        DivisorToCurve(0, 0, 1, 22)
    assert DivisorToCurve(5, 0, 3, 2).target_degree == 54


def _row(**kw):
    base = dict(
        pairing=PairingKind.DP_DP,
        k3=6,
        r_x=1,
        side_x=DelPezzoFibration(3, 1),
        side_plus=DelPezzoFibration(3),
        coeffs=TransformCoefficients.from_alpha_beta(1, -1),
        splitting=SplittingType.parse("(0^2,1^2)"),
    )
    base.update(kw)
    return NumericalRow(**base)


def test_row_identity_is_stable():
    assert _row().identity() == "k3=6;r_x=1;x.kf2=3;x.lambda=1;plus.kf2=3;alpha=1;beta=-1"


@pytest.mark.parametrize(
    "kw",
    [
        dict(k3=7),
        dict(k3=24),
        dict(k3=56, r_x=3),
        dict(side_plus=ConicBundle(3)),
        dict(side_x=DelPezzoFibration(9)),
        dict(coeffs=TransformCoefficients.from_alpha_beta(1, -3)),
        dict(splitting=SplittingType.parse("(0,1)")),
    ],
)
def test_row_rejects_inconsistent_fields(kw):
    with pytest.raises(ValueError):
        _row(**kw)


def test_curve_row_checks_degree_identity():
    kw = dict(
        pairing=PairingKind.CB_CURVE,
        r_x=1,
        side_x=ConicBundle(3),
        coeffs=TransformCoefficients.from_alpha_beta(1, -1),
        splitting=None,
    )
    NumericalRow(k3=22, side_plus=DivisorToCurve(5, 0, 3, 2), **kw)
    with pytest.raises(ValueError):
        NumericalRow(k3=20, side_plus=DivisorToCurve(5, 0, 3, 2), **kw)


def test_point_side_keeps_rationals():
    side = DivisorToPoint(SurfaceType.P2_MINUS2, Fraction(9, 2))
    assert side.target_degree == Fraction(9, 2) and side.r_target == 1
