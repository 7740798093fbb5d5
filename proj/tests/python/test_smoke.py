import math

import pytest

tlsbath = pytest.importorskip("tlsbath")


def test_free_decay_matches_exponential():
    times = [0.0, 1e-6, 5e-6, 20e-6]
    trace = tlsbath.simulate_decay([], times, gamma_q=1.0 / 10e-6, p_th=0.02)
    for t, p in zip(times, trace["population"]):
        assert p == pytest.approx(0.02 + 0.98 * math.exp(-t / 10e-6), rel=1e-10)


def test_fit_round_trip():
    times = [i * 1e-7 for i in range(400)]
    pop = [0.7 * math.exp(-t / 0.6e-6) + 0.25 * math.exp(-t / 30e-6) + 0.03 for t in times]
    result = tlsbath.fit(times, pop, model="bi")
    assert result["converged"]
    assert 1.0 / result["params"]["gamma_t"] == pytest.approx(30e-6, rel=1e-6)


def test_rates_and_regimes():
    assert tlsbath.purcell_rate(1.0, 1.0, 0.0) == pytest.approx(2.0)
    assert tlsbath.regime_classify(1e5, 1e9, 1e-6) == "fermi"


def test_config_errors_raise():
    with pytest.raises(ValueError):
        tlsbath.validate_config("qubit: {frequency: 6.3}")
    assert len(tlsbath.validate_config("qubit: {frequency: 6.3 GHz}")) == 16


def test_cli_in_process(tmp_path):
    code, out, _ = tlsbath.run_cli(["freq-model", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "freq_model.csv").exists()
    assert (tmp_path / "manifest.json").exists()
