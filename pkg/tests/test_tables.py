from shpoints.modsym import EllCurve
from shpoints.tables import find_row, load_rows, validate_fixture_exactness


def test_all_rows_parse():
    rows = load_rows()
    assert len(rows) >= 50
    labels = {r.label for r in rows}
    assert labels == {"15A1", "21A1", "33A1", "35A1", "51A1", "105A1"}


def test_every_point_row_is_exactly_on_curve():
    assert validate_fixture_exactness() == []


def test_multiple_field():
    assert find_row("105A1", 29).multiple == 2
    assert find_row("15A1", 13).multiple == 1


def test_poly_rows_present():
    r = find_row("21A1", 65)
    assert r.kind == "poly2" and r.h == 2
    r4 = find_row("33A1", 145)
    assert r4.kind == "poly4" and r4.h == 4


def test_curves_have_stated_conductors():
    for row in load_rows():
        E = EllCurve(*row.ainvs)
        assert E.conductor % row.p == 0
