import copy
import json

import pytest

from radplan import netmodel

ECONOMICS = {
    "cp0": 168.0, "ce0": 0.06, "inflation": 0.05, "load_growth": 0.02, "load_factor": 0.25,
    "horizon_years": 3, "v_min": 0.9, "v_max": 1.0, "cap_budget": 1000.0, "dg_budget": 1000.0,
}

TWO_BUS = {
    "base_mva": 1.0,
    "base_kv": 11.0,
    "buses": [
        {"id": 0, "s_load_kva": 0.0, "power_factor": 1.0},
        {"id": 1, "s_load_kva": 500.0, "power_factor": 0.8},
    ],
    "sections": [{"id": 1, "from": 0, "to": 1, "length_km": 2.0}],
    "conductor_catalog": [{"id": 1, "r_per_km": 0.5, "x_per_km": 0.4, "price_per_km": 1000.0, "i_max": 100.0}],
    "capacitor_catalog": [{"id": 1, "q_kvar": 0.0, "capital_cost": 0.0, "install_cost": 0.0}],
    "dg_type": {"p_rated_kw": 100.0, "q_rated_kvar": 50.0, "total_cost": 500.0},
    "economics": ECONOMICS,
}


@pytest.fixture
def two_bus_doc():
    return copy.deepcopy(TWO_BUS)


@pytest.fixture
def two_bus_case():
    return netmodel.parse_case(json.dumps(TWO_BUS))


@pytest.fixture(scope="session")
def case26():
    return netmodel.builtin_case_26bus()


@pytest.fixture(scope="session")
def toy5():
    return netmodel.builtin_case_toy5()
