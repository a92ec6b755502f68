import json

import pytest

from ffharm.errors import UnknownSuite
from ffharm.suites import SUITES, run_suite, suite_defaults

SMALL = {
    "explicit-formula": {"q": [3, 5], "d": [2, 3], "trials": 3},
    "decay": {"q": [3, 5], "d": [2, 3], "trials": 2},
    "tomas-stein": {"q": [3, 5], "d": [2, 3], "trials": 2, "restarts": 1},
    "carbery": {"q": [3, 5], "d": [2, 3], "trials": 2, "restarts": 1},
    "restriction-ineq": {"q": [3, 5], "d": [2], "trials": 20},
    "mainlemma": {"q": [3, 5], "d": [2, 4], "trials": 5},
    "weaktype": {"cases": [[3, 2]], "p": [2.0], "trials": 5},
    "extension-sharpness-odd": {"q": [3, 5, 7], "q_omega": [3, 5], "restarts": 2},
    "extension-sharpness-even": {"q": [3, 5, 7], "q_m": [3], "restarts": 2},
    "averaging-sharpness": {"q": [3, 5, 7], "q_even": [3, 5, 7], "q_exact": [3], "q_small": [3], "r_le_p": [[2, 2]], "restarts": 2},
    "cone": {"q": [5, 9], "d": [3]},
}


def test_every_suite_has_a_small_configuration():
    assert set(SMALL) == set(SUITES)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suite_runs_and_reports(name):
    rep = run_suite(name, SMALL[name], seed=3)
    doc = rep.to_json()
    assert doc["suite"] == name and doc["seed"] == 3 and doc["checks"]
    json.dumps(doc)
    assert rep.to_text().startswith(f"suite {name}")
    assert rep.failures == [c.name for c in rep.checks if not c.passed]


@pytest.mark.parametrize("name", ["restriction-ineq", "weaktype", "tomas-stein"])
def test_randomized_suites_reproduce_from_seed(name):
    a = run_suite(name, SMALL[name], seed=11).to_json()
    b = run_suite(name, SMALL[name], seed=11).to_json()
    assert a == b


def test_seed_changes_random_draws():
    a = run_suite("restriction-ineq", SMALL["restriction-ineq"], seed=1).constants["C"]
    b = run_suite("restriction-ineq", SMALL["restriction-ineq"], seed=2).constants["C"]
    assert a != b


def test_unknown_suite_and_defaults_are_copies():
    with pytest.raises(UnknownSuite):
        suite_defaults("nope")
    d = suite_defaults("decay")
    d["q"].append(99)
    assert 99 not in suite_defaults("decay")["q"]
