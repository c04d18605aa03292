import json
import math

import numpy as np
import pytest

import gclab


def test_free_flow_matches_oracle():
    g = gclab.Grid1D(1024, 30.0)
    x = g.nodes()
    f = gclab.WaveField(g, np.exp(-x**2).astype(complex))
    u = gclab.free_propagate(f, 1.0)
    ref = gclab.oracle_gaussian(1.0, 1.0, 1j, g)
    assert gclab.relative_l2_error(u, ref) <= 1e-10
    d = 1 + 4j
    assert np.allclose(u.samples, d**-0.5 * np.exp(-x**2 / d), atol=1e-12)


def test_weighted_norm_closed_form():
    g = gclab.Grid1D(1024, 20.0)
    f = gclab.WaveField(g, np.exp(-g.nodes() ** 2))
    log_norm, divergent = gclab.gaussian_weighted_log_norm(f, 0.05)
    assert not divergent
    assert math.isclose(math.exp(2 * log_norm), math.sqrt(math.pi / 1.9), rel_tol=1e-12)


def test_bad_samples_raise():
    g = gclab.Grid1D(64, 5.0)
    with pytest.raises(ValueError):
        gclab.WaveField(g, np.zeros(10, dtype=complex))


def test_airy_and_threshold():
    assert math.isclose(gclab.airy_function(0.0), 0.3550280538878172, rel_tol=1e-12)
    assert gclab.hardy_threshold_exponent(0.5, 0.0, 0.0) == 0.0
    scan = gclab.threshold_scan([0.3 + 1e-3 * k for k in range(401)])
    assert scan["change_at_half"]
    assert scan["sign_changes"] == 1


def test_identities():
    assert "I1" in gclab.identity_names()
    report = gclab.verify_identity("I1")
    assert report["passed"]


def test_carleman_case():
    r = gclab.convexity_carleman("bump-1", 8.0)
    assert r["passed"] and r["prefactor_exact"]


def test_split_step_is_unitary():
    g = gclab.Grid1D(512, 20.0)
    f = gclab.WaveField(g, np.exp(-g.nodes() ** 2))
    fields = gclab.evolve(f, "sech2", 0.3, 1j, 0.5, 1e-3, 50)
    norms = [u.l2_norm() for u in fields]
    assert max(abs(n - norms[0]) for n in norms) <= 1e-8 * norms[0]


def test_config_roundtrip_and_run(tmp_path):
    text = "experiment: commutator\nselection: {identity: I2}\noutput: {assert: true}\n"
    assert gclab.config_roundtrip(gclab.config_roundtrip(text)) == gclab.config_roundtrip(text)
    with pytest.raises(ValueError):
        gclab.config_roundtrip("grid: {width: 1}\n")
    rec = gclab.run_experiment(text, tmp_path)
    assert rec["passed"] and rec["exit_code"] == 0
    on_disk = json.loads((tmp_path / "run_record.json").read_text())
    assert on_disk["experiment"] == "commutator"


def test_criterion():
    r = gclab.evaluate_criterion(13)
    assert r["passed"]
    assert len(gclab.experiment_names()) == 15
