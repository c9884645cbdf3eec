import math

import pytest

from vortexsphere import diagnostics as dg
from vortexsphere.geometry import Params


def test_field_check_all_pass():
    for c in dg.field_check(Params(1.0, 1.0)):
        assert c.ok, c


def test_field_check_other_params():
    for c in dg.field_check(Params(0.7, 2.5)):
        assert c.ok, c


def test_limit_table_rows(unit):
    rows = {r.name: r for r in dg.limit_table(unit)}
    assert set(rows) >= {"a", "b", "l", "A1", "A2", "B", "z_x", "z_y", "E_hat"}
    assert rows["l"].limit == pytest.approx(1 / 8)
    assert rows["E_hat"].limit == pytest.approx(2 / math.pi)
    for r in rows.values():
        assert r.ok, (r.name, r.errors)


def test_limit_row_monotone_logic():
    good = dg.LimitRow("x", (1, 2, 3), (1.0, 0.1, 1e-9), 0.0)
    bad = dg.LimitRow("x", (1, 2, 3), (1.0, 0.1, 0.5), 0.0)
    assert good.ok and not bad.monotone


def test_b_identity(unit):
    assert dg.b_identity_check(unit).ok
