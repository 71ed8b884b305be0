import math

import numpy as np
import pytest

import qbm

FIXED = {
    "frequency_convention": "bare",
    "noise_convention": "noise",
    "dissipation_sign": 1,
}


def test_spectral_density_shape():
    p = qbm.SpectralDensityParams()
    assert qbm.spectral_density(0.0, p) == 0.0
    w = 3.0
    expected = 2 * p.mass * p.gamma / math.pi * w * math.exp(-(w / p.cutoff) ** 2)
    assert qbm.spectral_density(w, p) == pytest.approx(expected, rel=1e-14)


def test_effective_mass_halves_at_unit_coupling():
    assert qbm.effective_mass(qbm.SpectralDensityParams(), 1.0) == pytest.approx(0.5)


def test_closed_system_keeps_variances():
    out = qbm.simulate({**FIXED, "gamma": 0, "t_end": 5}, 0.5)
    assert np.allclose(out["var_q"], 0.5, atol=1e-12)
    assert np.allclose(out["var_p"], 0.5, atol=1e-12)
    assert out["t"][-1] == pytest.approx(5.0, abs=0.04)


def test_witness_non_positive_for_ohmic_bath():
    out = qbm.simulate({**FIXED, "t_end": 10}, 1.0)
    assert out["max_det"] <= 1e-8
    assert out["min_det"] < 0


def test_oracle_tracks_green_function_solution():
    settings = {**FIXED, "t_end": 10, "oracle_modes": 300}
    a = qbm.simulate(settings, 0.0, coefficients=False)
    b = qbm.oracle(settings, 0.0)
    scale = np.max(np.abs(b["var_p"]))
    assert np.max(np.abs(a["var_p"] - b["var_p"])) / scale < 1e-2


def test_markov_limit_determinant_vanishes():
    out = qbm.markov_limit(0.6, 0.5)
    assert out["det"] == pytest.approx(0.0, abs=1e-14)
    assert out["Gamma"] == pytest.approx(-0.6)


def test_unknown_key_is_a_config_error():
    with pytest.raises(qbm.ConfigError):
        qbm.simulate({"bogus": 1}, 0.0)
