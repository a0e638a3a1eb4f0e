import math

import numpy as np
import pytest

import entropykit as ek


def test_hand_examples():
    assert ek.kl_entropy([0.0, 1.0])["h_n"] == pytest.approx(math.log(2) + ek.EULER_MASCHERONI, abs=1e-12)
    est = ek.kl_entropy(np.array([[0.0], [1.0], [3.0]]), backend="brute")
    assert est["h_n"] == pytest.approx(2.1945590862080719, abs=1e-12)
    assert est["backend"] == "brute"
    assert est["n"] == 3 and est["d"] == 1


def test_backends_agree():
    pts = ek.sample({"family": "gaussian", "d": 3}, 500, seed=4)
    assert pts.shape == (500, 3)
    assert ek.nn_distances(pts, backend="index") == ek.nn_distances(pts, backend="brute")


def test_logdomain():
    est = ek.kl_entropy_logdomain([(1, 0.0), (2, 0.0)])
    assert est["h_n"] == pytest.approx(3.7552694952494785, abs=1e-12)
    assert est["log_domain"] and est["clamp"] == 512
    pts = ek.sample({"family": "counterexample"}, 200, seed=1)
    report = ek.diagnose(pts, {"family": "counterexample"})
    assert math.isfinite(report["h_n"])
    assert abs(report["decomposition_residual"]) < 1e-8 * max(1.0, abs(report["h_n"]))


def test_diagnose_hand_example():
    report = ek.diagnose([0.2, 0.7], {"family": "uniform_cube", "d": 1})
    assert report["m_n"] == pytest.approx(-0.28990924762647107, abs=1e-12)
    assert report["ball_mass_sum"] == pytest.approx(1.5)
    assert report["ks_ball_mass_uniform"] is None


def test_errors_carry_codes():
    with pytest.raises(ek.EntropyKitError) as info:
        ek.kl_entropy([1.0, 2.0, 1.0])
    assert info.value.args[1] == "DuplicatePoints"
    with pytest.raises(ek.EntropyKitError) as info:
        ek.kl_entropy([1.0])
    assert info.value.args[1] == "SampleTooSmall"
    with pytest.raises(ek.EntropyKitError) as info:
        ek.diagnose([0.1, 0.5], {"family": "gaussian", "d": 2})
    assert info.value.args[1] == "DimensionMismatch"


def test_experiment_is_deterministic():
    config = {"spec": {"family": "exponential"}, "n_grid": [50, 100], "replicates": 3, "seed": 9,
              "diagnostics": ["m_n"]}
    rows, csv = ek.run_experiment(config)
    assert len(rows) == 6
    assert [r["n"] for r in rows] == [50, 50, 50, 100, 100, 100]
    assert ek.run_experiment(config, threads=3)[1] == csv
    assert csv.splitlines()[0].startswith("n,replicate,h_n,true_entropy")
    assert ek.exact_entropy({"family": "exponential"}) == pytest.approx(1.0)
