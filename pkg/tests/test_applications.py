import math

import numpy as np
import pytest

import grassquant as gq
from grassquant import (
    AwgnConfig,
    BeamformingConfig,
    Codebook,
    FieldKind,
    GrassmannSpec,
    Plane,
    Provenance,
)


def test_awgn_config_validation():
    with pytest.raises(gq.DomainError):
        AwgnConfig(n=8, sigma_sq=1.0, epsilon=0.05)  # neither rate nor size
    with pytest.raises(gq.DomainError):
        AwgnConfig(n=8, sigma_sq=1.0, epsilon=0.05, rate=0.5, codebook_size=4)
    with pytest.raises(gq.DomainError):
        AwgnConfig(n=8, sigma_sq=1.0, epsilon=0.3, rate=0.5)
    with pytest.raises(gq.DomainError):
        AwgnConfig(n=3, sigma_sq=1.0, epsilon=0.05, rate=0.5)
    with pytest.raises(gq.CapExceeded):
        AwgnConfig(n=12, sigma_sq=1.0, epsilon=0.05, rate=1.5)
    cfg = AwgnConfig(n=12, sigma_sq=1.0, epsilon=0.05, rate=1.5, clamp_to_cap=True)
    assert cfg.nominal_size == 2**18
    assert cfg.effective_size == gq.MAX_CODEBOOK
    assert cfg.capped
    assert cfg.effective_rate == pytest.approx(16 / 12)


def test_awgn_noiseless_decodes_perfectly():
    cfg = AwgnConfig(
        n=8, sigma_sq=1e-12, epsilon=0.05, codebook_size=8, trials=50, seed=1
    )
    report = gq.awgn_grassmann_decode_experiment(cfg)
    row = report.rows[0]
    assert row["error_rate"] == 0.0
    assert row["dsq_mean"] < 1e-10


def test_awgn_window_and_concentration():
    # The squared transmit/receive line distance concentrates in the
    # epsilon window; its variance shrinks with block length.
    variances = []
    for n in (16, 32, 64):
        cfg = AwgnConfig(
            n=n, sigma_sq=1.0, epsilon=0.05, codebook_size=2, trials=400, seed=n
        )
        row = gq.awgn_grassmann_decode_experiment(cfg).rows[0]
        variances.append(row["dsq_var"])
        if n == 64:
            lo = row["window_low"] - 4 * row["dsq_stderr"]
            hi = row["window_high"] + 4 * row["dsq_stderr"]
            assert lo <= row["dsq_mean"] <= hi
    assert variances[0] > variances[1] > variances[2]


def test_awgn_capacity_threshold_ordering():
    below = AwgnConfig(n=12, sigma_sq=1.0, epsilon=0.05, rate=0.5, trials=100, seed=5)
    above = AwgnConfig(
        n=12, sigma_sq=1.0, epsilon=0.05, rate=1.5, trials=100, seed=5, clamp_to_cap=True
    )
    err_below = gq.awgn_grassmann_decode_experiment(below).rows[0]["error_rate"]
    err_above = gq.awgn_grassmann_decode_experiment(above).rows[0]["error_rate"]
    assert err_below < err_above
    assert err_above >= 0.8  # far above capacity


def beamforming_codebook(l_t, s, vectors):
    source = GrassmannSpec(l_t, 2, FieldKind.COMPLEX)
    code = GrassmannSpec(l_t, s, FieldKind.COMPLEX)
    entries = [Plane.from_span(v, FieldKind.COMPLEX) for v in vectors]
    return Codebook(source, code, entries, Provenance(kind="loaded"))


def test_beamforming_selection_oracle_entry():
    # A codebook containing the exact right singular plane is selected
    # with distance zero, and the aligned trace equals l_r.
    rng = np.random.default_rng(3)
    h = (rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))) / math.sqrt(2)
    v = gq.right_singular_plane_bases(h[None])[0]
    source = GrassmannSpec(4, 2, FieldKind.COMPLEX)
    code = GrassmannSpec(4, 2, FieldKind.COMPLEX)
    entries = [Plane(code, v)] + [
        gq.sample_isotropic(code, rng) for _ in range(3)
    ]
    cb = Codebook(source, code, entries, Provenance(kind="loaded"))
    assert gq.beamforming_selection(h, cb) == 0
    trace = np.linalg.norm(v.conj().T @ v) ** 2
    assert trace == pytest.approx(2.0, rel=1e-12)


def test_beamforming_selection_matches_brute_force():
    rng = np.random.default_rng(8)
    source = GrassmannSpec(4, 2, FieldKind.COMPLEX)
    code = GrassmannSpec(4, 1, FieldKind.COMPLEX)
    cb = Codebook(
        source,
        code,
        [gq.sample_isotropic(code, rng) for _ in range(4)],
        Provenance(kind="loaded"),
    )
    for trial in range(20):
        h = (rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))) / math.sqrt(2)
        v_plane = Plane(source, gq.right_singular_plane_bases(h[None])[0])
        # Smaller-dimensional plane goes first in the distance call.
        brute = [gq.chordal_distance(entry, v_plane) for entry in cb.entries]
        assert gq.beamforming_selection(h, cb) == int(np.argmin(brute))


def test_beamforming_selection_k1_and_mismatch():
    rng = np.random.default_rng(9)
    source = GrassmannSpec(4, 1, FieldKind.COMPLEX)
    code = GrassmannSpec(4, 1, FieldKind.COMPLEX)
    cb = gq.random_codebook(source, code, 1, rng)
    h = (rng.standard_normal((1, 4)) + 1j * rng.standard_normal((1, 4)))
    assert gq.beamforming_selection(h, cb) == 0
    with pytest.raises(gq.SpecMismatch):
        gq.beamforming_selection(np.zeros((2, 4), dtype=complex), cb)


def test_beamforming_config_validation():
    with pytest.raises(gq.DomainError):
        BeamformingConfig(l_t=4, l_r=4, s=1, rho=10.0, r_fb=3)
    with pytest.raises(gq.DomainError):
        BeamformingConfig(l_t=4, l_r=2, s=4, rho=10.0, r_fb=3)
    with pytest.raises(gq.DomainError):
        BeamformingConfig(l_t=4, l_r=2, s=1, rho=10.0, r_fb=3, trials=100)
    with pytest.raises(gq.DomainError):
        BeamformingConfig(l_t=4, l_r=2, s=1, rho=10.0, r_fb=20)


def test_beamforming_vanishing_snr():
    cfg = BeamformingConfig(
        l_t=3, l_r=1, s=1, rho=1e-9, r_fb=2, trials=1000, seed=2, design_iters=1
    )
    row = gq.beamforming_throughput_experiment(cfg).rows[0]
    assert row["throughput_mean"] < 1e-6


def test_beamforming_identity_and_bound_smoke():
    cfg = BeamformingConfig(
        l_t=4, l_r=1, s=1, rho=10.0, r_fb=3, trials=2000, seed=4, design_iters=4
    )
    row = gq.beamforming_throughput_experiment(cfg).rows[0]
    assert row["identity_gap"] <= 4 * row["identity_sigma"]
    assert row["throughput_mean"] <= row["bound_from_distortion"] + 3 * row["throughput_stderr"]
    assert row["bound_ok"]
    assert row["trace_mean"] <= 1.0 + 1e-9


def test_beamforming_nats_switch():
    cfg_bits = BeamformingConfig(
        l_t=3, l_r=1, s=1, rho=5.0, r_fb=2, trials=1000, seed=6, design_iters=1
    )
    cfg_nats = BeamformingConfig(
        l_t=3, l_r=1, s=1, rho=5.0, r_fb=2, trials=1000, seed=6, design_iters=1,
        log_base="nats",
    )
    bits = gq.beamforming_throughput_experiment(cfg_bits).rows[0]["throughput_mean"]
    nats = gq.beamforming_throughput_experiment(cfg_nats).rows[0]["throughput_mean"]
    assert nats == pytest.approx(bits * math.log(2.0), rel=1e-12)


def test_beamforming_unequal_dimensions_run():
    # s != l_r exercises the unequal-dimensional path end to end.
    cfg = BeamformingConfig(
        l_t=4, l_r=2, s=1, rho=10.0, r_fb=4, trials=1500, seed=7, design_iters=3
    )
    row = gq.beamforming_throughput_experiment(cfg).rows[0]
    assert 0.0 < row["trace_mean"] < 1.0  # one principal angle only
    assert row["identity_gap"] <= 5 * row["identity_sigma"]
