import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from radplan import econ
from radplan.netmodel import Design


def test_loss_factor():
    assert econ.loss_factor(0.25) == pytest.approx(0.1, abs=1e-12)
    assert econ.loss_factor(1.0) == pytest.approx(1.0)
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            econ.loss_factor(bad)


def test_escalate():
    assert econ.escalate(168.0, 0.05, 1) == pytest.approx(176.4, abs=1e-9)
    assert econ.escalate(168.0, 0.05, 0) == 168.0
    assert econ.demand_at_year(100.0, 0.02, 2) == pytest.approx(104.04)
    with pytest.raises(ValueError):
        econ.escalate(1.0, 0.1, -1)


@given(st.floats(0.01, 1.0))
def test_loss_factor_between_lf_squared_and_lf(lf):
    assert lf * lf - 1e-12 <= econ.loss_factor(lf) <= lf + 1e-12


def test_loss_cost_horizon_hand_values(case26):
    e = dataclasses.replace(case26.economics, horizon_years=2)
    total, per_year = econ.loss_cost_horizon([100.0, 110.0], e)
    # 100 * (168*1.05 + 0.06*1.05*0.1*8760), then year 2 at 1.05**2
    assert per_year == pytest.approx([23158.8, 26748.414], abs=1e-9)
    assert total == pytest.approx(49907.214, abs=1e-9)
    with pytest.raises(ValueError):
        econ.loss_cost_horizon([1.0], e)


def test_capacitor_and_dg_costs(case26):
    d = Design({}, {3: 1, 7: 2, 9: 2}, {4: 1, 8: 1})
    assert econ.capacitor_cost(d, case26) == pytest.approx(4980.0, abs=1e-9)
    assert econ.dg_cost(d, case26.dg_type) == pytest.approx(8000.0, abs=1e-9)
    assert econ.dg_cost(Design({}, {}, {4: 0}), case26.dg_type) == 0.0
    with pytest.raises(ValueError):
        econ.capacitor_cost(Design({}, {1: 9}), case26)


def test_conductor_capital_skips_zero_length(case26):
    d = Design.uniform(case26, 1)
    total_km = sum(s.length_km for s in case26.sections)
    assert econ.conductor_capital(d, case26) == pytest.approx(151.0 * total_km)
    with pytest.raises(ValueError, match="no conductor"):
        econ.conductor_capital(Design({}), case26)


def test_voltage_index():
    assert econ.voltage_index([1.0, 0.98, 1.01]) == pytest.approx(0.03)
    with pytest.raises(ValueError):
        econ.voltage_index([])


def test_objective():
    assert econ.objective(100.0, 300.0) == 200.0
    assert econ.objective(100.0, 300.0, 1.0) == 100.0
    assert econ.objective(100.0, 300.0, 0.0) == 300.0
    with pytest.raises(ValueError):
        econ.objective(1.0, 1.0, 1.5)


@given(st.floats(0, 1), st.floats(0, 1e6), st.floats(0, 1e6))
def test_objective_between_components(w, a, b):
    lo, hi = min(a, b), max(a, b)
    assert lo - 1e-6 <= econ.objective(a, b, w) <= hi + 1e-6
