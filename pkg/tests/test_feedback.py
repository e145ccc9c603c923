"""QPS dataset export and feedback-channel tests."""

import hashlib
import json

import numpy as np
import pytest

from arisim.feedback import FeedbackChannelParams, export_dataset, feedback_channel
from arisim.montecarlo import Scenario
from arisim.ris import dequantize_index


def small_scenario(m=5):
    return Scenario(m_elements=m, quant_bits=9)


def _sha(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def test_export_empty_dataset(tmp_path):
    out = tmp_path / "qps.csv"
    count = export_dataset(small_scenario(), trials=0, seed=1, path=out)
    assert count == 0
    lines = out.read_text().splitlines()
    assert lines == ["user,element," + ",".join(f"b{k}" for k in range(9))]
    meta = json.loads((tmp_path / "qps.csv.meta.json").read_text())
    assert meta["quant_bits"] == 9
    assert meta["seed"] == 1


def test_export_format_and_counts(tmp_path):
    out = tmp_path / "qps.csv"
    sc = small_scenario(m=5)
    count = export_dataset(sc, trials=4, seed=2, path=out)
    assert count == 4 * 5 * 3
    lines = out.read_text().splitlines()
    assert len(lines) == count + 1
    tags = set()
    for line in lines[1:]:
        parts = line.split(",")
        assert len(parts) == 2 + 9
        tags.add(parts[0])
        bits = [int(b) for b in parts[2:]]
        assert set(bits).issubset({0, 1})
        index = int("".join(str(b) for b in bits), 2)
        assert 0 <= index < 512
        assert 0.0 <= dequantize_index(index, 9) < 2 * np.pi
    assert tags == {"near_1", "near_2", "far"}
    meta = json.loads((tmp_path / "qps.csv.meta.json").read_text())
    assert meta["records_per_tag"] == {"near_1": 20, "near_2": 20, "far": 20}
    assert "config_hash" in meta


def test_export_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_dataset(small_scenario(), trials=6, seed=3, path=a)
    export_dataset(small_scenario(), trials=6, seed=3, path=b)
    assert _sha(a) == _sha(b)
    c = tmp_path / "c.csv"
    export_dataset(small_scenario(), trials=6, seed=4, path=c)
    assert _sha(a) != _sha(c)


def test_export_io_error():
    with pytest.raises(OSError):
        export_dataset(small_scenario(), trials=1, seed=1, path="/nonexistent/dir/x.csv")


def test_channel_zero_input_noise_floor():
    # all-zero input trips the 1e-8 energy floor; output is pure noise with
    # sigma_n^2 = 1e-8 / SNR
    params = FeedbackChannelParams(snr_db=10.0)
    rng = np.random.default_rng(0)
    z = feedback_channel(np.zeros(1_000_000), params, rng)
    assert np.all(z >= 0)
    ratio = np.mean(z**2) / 1e-8
    assert ratio == pytest.approx(0.1, abs=0.005)


def test_channel_noiseless_los_limit():
    params = FeedbackChannelParams(snr_db=300.0, k_factor=1e12)
    rng = np.random.default_rng(1)
    x = rng.uniform(-2.0, 2.0, 10_000)
    z = feedback_channel(x, params, rng)
    np.testing.assert_allclose(z, np.abs(x), atol=1e-4)


def test_channel_noise_moment_at_10db():
    # measured through the zero-signal floor path over 1e6 components
    params = FeedbackChannelParams(snr_db=10.0)
    z = feedback_channel(np.zeros(1_000_000), params, np.random.default_rng(2))
    assert np.mean(z**2) / 1e-8 == pytest.approx(0.1, abs=0.005)


def test_channel_energy_balance_unit_input():
    # E|Z|^2 = E|h|^2 * E_avg + sigma_n^2 with E|h|^2 = 1 by construction
    params = FeedbackChannelParams(snr_db=7.0, k_factor=3.0)
    x = np.ones(1_000_000)
    z = feedback_channel(x, params, np.random.default_rng(3))
    want = 1.0 + 10 ** (-0.7)
    assert np.mean(z**2) == pytest.approx(want, rel=0.01)


def test_channel_fading_normalization():
    # K = 3 linear: LoS weight b = sqrt(3/4)
    params = FeedbackChannelParams(snr_db=300.0, k_factor=3.0)
    x = np.ones(1_000_000)
    z = feedback_channel(x, params, np.random.default_rng(4))
    assert params.los_weight == pytest.approx(np.sqrt(0.75), rel=1e-12)
    assert np.mean(z**2) == pytest.approx(1.0, rel=0.01)


def test_channel_block_fading_single_draw():
    params = FeedbackChannelParams(snr_db=300.0, k_factor=3.0, block_fading=True)
    x = np.ones(1000)
    z = feedback_channel(x, params, np.random.default_rng(5))
    assert np.std(z) < 1e-10  # one fading draw scales every component alike


def test_channel_rejects_nonfinite_input():
    with pytest.raises(ValueError):
        feedback_channel(np.array([1.0, np.inf]), FeedbackChannelParams(), np.random.default_rng(0))


def test_channel_rejects_negative_k():
    with pytest.raises(ValueError):
        FeedbackChannelParams(k_factor=-1.0)


def test_channel_deterministic_given_stream():
    params = FeedbackChannelParams(snr_db=10.0)
    x = np.linspace(-1, 1, 64)
    a = feedback_channel(x, params, np.random.default_rng(6))
    b = feedback_channel(x, params, np.random.default_rng(6))
    np.testing.assert_array_equal(a, b)
