import json
import math

import pytest

import cusplab


def test_special_functions():
    assert cusplab.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    y = 1.5707963267948966
    assert cusplab.bessel_j(0.5, y) == pytest.approx(math.sqrt(2 / (math.pi * y)), rel=1e-12)
    assert cusplab.analytic_i(0.0, 1.0) == pytest.approx(2.2795853, abs=1e-7)
    assert cusplab.legendre(2, 1.0) == 1.0


def test_classification_and_errors():
    assert cusplab.classify(cusplab.PotentialModel([(-1.0, 6.0)]))["tag"] == "NONPHYSICAL-aVdW"
    c = cusplab.classify(cusplab.PotentialModel([(-2.0, 1.0)]))
    assert c["physical"] and c["beta_alpha"] == pytest.approx(0.5)
    with pytest.raises(cusplab.CuspError, match="DomainError"):
        cusplab.bessel_j(60.0, 1.0)


def test_wronskian_in_reduced_units():
    for model in ([], [(-2.0, 1.0)], [(1.0, 6.0)], [(0.7, 2.0)]):
        w = cusplab.wronskian(cusplab.PotentialModel(model), 0, 0.5)
        assert w == pytest.approx(2 / math.pi, rel=1e-8)


def test_free_solution():
    s = cusplab.solve(cusplab.PotentialModel(), 0, -1.0, 3.0)
    i = min(range(len(s["r"])), key=lambda k: abs(s["r"][k] - 1.0))
    r = s["r"][i]
    assert s["u"][i] == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(r), rel=1e-8)
    assert s["L"][i] * s["R"][i] == pytest.approx(1.0, rel=1e-9)


def test_rigidity_and_series():
    h = cusplab.PotentialModel([(-2.0, 1.0)])
    assert cusplab.fundamental_residual(h, 0, -0.5, [1.0]) < 1e-5
    rows = cusplab.series_profiles(cusplab.PotentialModel(), 0, 2.0, 2, [1.0])
    assert rows[1][0] == pytest.approx(-0.1329807, abs=1e-7)


def test_separability_terms():
    c = cusplab.PotentialModel([(1.0, 1.0)])
    z, first, second = cusplab.expansion_terms(c, c, 1.0, 2.0, 10.0, 0.1, 0.0)
    assert first == pytest.approx(-3.3333e-4, abs=1e-8)
    assert cusplab.small_parameter(cusplab.PotentialModel([(1.0, 6.0)]), 0.01, 1.0) == pytest.approx(0.06)


def test_run_config(tmp_path):
    cfg = {"version": 1, "command": "classify", "potential": {"terms": [{"strength": -1, "exponent": 6}]}}
    r = cusplab.run_config(json.dumps(cfg), ".", str(tmp_path))
    assert r["exit_code"] == 0 and r["summary"] == "NONPHYSICAL-aVdW"
    assert (tmp_path / "classify.csv").exists()
    bad = dict(cfg, command="solve", energies=[1.0], grid={"r_max": 2.0})
    assert cusplab.run_config(json.dumps(bad), ".", str(tmp_path))["exit_code"] == 3
