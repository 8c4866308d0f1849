import math

import numpy as np
import pytest

import grassquant as gq
from grassquant import BallSpec, VolumeMethod


def direct_coeff(n, p, q, beta):
    """Independent evaluation via plain gamma products (no log path)."""
    h = beta / 2.0
    value = 1.0 / math.gamma(h * p * (n - q) + 1.0)
    if p + q <= n:
        for i in range(1, p + 1):
            value *= math.gamma(h * (n - i + 1)) / math.gamma(h * (q - i + 1))
    else:
        for i in range(1, n - q + 1):
            value *= math.gamma(h * (n - i + 1)) / math.gamma(h * (n - p - i + 1))
    return value


def test_coeff_c_known_values():
    assert gq.coeff_c(4, 1, 1, 2) == pytest.approx(1.0, rel=1e-14)
    assert gq.coeff_c(4, 2, 2, 2) == pytest.approx(0.5, rel=1e-12)
    assert gq.coeff_c(5, 2, 2, 2) == pytest.approx(0.2, rel=1e-12)
    assert gq.coeff_c(4, 1, 2, 2) == pytest.approx(3.0, rel=1e-12)
    assert gq.coeff_c(5, 1, 2, 1) == pytest.approx(1.0, rel=1e-12)
    assert gq.coeff_c(5, 2, 2, 1) == pytest.approx(0.125, rel=1e-12)


def test_coeff_c_matches_direct_gamma_products():
    for n, p, q, beta in [(4, 1, 1, 2), (5, 2, 3, 1), (6, 2, 3, 2), (7, 3, 3, 2), (8, 2, 5, 1)]:
        assert gq.coeff_c(n, p, q, beta) == pytest.approx(direct_coeff(n, p, q, beta), rel=1e-12)


def test_coeff_c_branch_agreement_on_boundary():
    # Both product forms must agree where p + q = n.
    def branch(n, p, q, beta, first):
        h = beta / 2.0
        out = -math.lgamma(h * p * (n - q) + 1.0)
        rng_top = range(1, p + 1) if first else range(1, n - q + 1)
        for i in rng_top:
            if first:
                out += math.lgamma(h * (n - i + 1)) - math.lgamma(h * (q - i + 1))
            else:
                out += math.lgamma(h * (n - i + 1)) - math.lgamma(h * (n - p - i + 1))
        return math.exp(out)

    for n in range(3, 13):
        for p in range(1, n // 2 + 1):
            q = n - p
            if not 1 <= p <= q <= n - 1:
                continue
            for beta in (1, 2):
                a = branch(n, p, q, beta, True)
                b = branch(n, p, q, beta, False)
                assert a == pytest.approx(b, rel=1e-12)
                assert gq.coeff_c(n, p, q, beta) == pytest.approx(a, rel=1e-12)


def test_coeff_c_domain_errors():
    with pytest.raises(gq.DomainError):
        gq.coeff_c(4, 2, 1, 2)  # p > q
    with pytest.raises(gq.DomainError):
        gq.coeff_c(4, 1, 4, 2)  # q = n
    with pytest.raises(gq.DomainError):
        gq.coeff_c(4, 1, 2, 3)


def test_coeff_c1_exact_case_zeros():
    assert gq.coeff_c1(6, 2, 2, 2) == 0.0  # complex, q = p
    assert gq.coeff_c1(6, 2, 3, 1) == 0.0  # real, q = p + 1
    assert gq.coeff_c1(6, 2, 3, 2) == pytest.approx(-6 / 7, rel=1e-14)


def test_ball_spec_validation():
    with pytest.raises(gq.DomainError):
        BallSpec(4, 2, 1, 2, 0.5)  # p > q
    with pytest.raises(gq.DomainError):
        BallSpec(4, 1, 1, 2, 1.5)  # beyond sqrt(p)
    with pytest.raises(gq.DomainError):
        BallSpec(4, 1, 1, 3, 0.5)
    BallSpec(4, 1, 1, 2, 0.0)  # measure-zero ball is allowed


def test_closed_form_values():
    est = gq.ball_volume_approx(BallSpec(4, 1, 1, 2, 0.5))
    assert est.method is VolumeMethod.CLOSED_FORM
    assert est.value == pytest.approx(0.015625, rel=1e-12)
    assert est.stderr == 0.0
    # With q = p complex the correction term is exactly zero.
    est_corr = gq.ball_volume_approx(BallSpec(4, 1, 1, 2, 0.5), include_correction=True)
    assert est_corr.value == est.value

    # Independent oracle: projection mass of a line onto a 2-plane in C^4
    # is Beta(2, 2), so the volume is 3 d^4 - 2 d^6 exactly.
    for d in (0.3, 0.5, 0.9):
        expected = 3 * d**4 - 2 * d**6
        got = gq.ball_volume_approx(BallSpec(4, 1, 2, 2, d), include_correction=True)
        assert got.value == pytest.approx(expected, rel=1e-12)
    lead = gq.ball_volume_approx(BallSpec(4, 1, 2, 2, 0.5))
    assert lead.value == pytest.approx(3 * 0.5**4, rel=1e-12)


def test_closed_form_limits_and_clamping():
    assert gq.ball_volume_approx(BallSpec(5, 2, 3, 2, 1e-9)).value < 1e-30
    # c = 1.5 here, so the raw polynomial exceeds 1 near the unit radius.
    assert gq.ball_volume_approx(BallSpec(5, 1, 3, 1, 0.95)).value == 1.0
    with pytest.raises(gq.RadiusTooLarge):
        gq.ball_volume_approx(BallSpec(5, 2, 2, 1, 1.2))


def test_bounds_values():
    lo, hi = gq.ball_volume_bounds(BallSpec(4, 1, 1, 2, 0.5))
    # Exponent beta p (q - p + 1)/2 - p vanishes: bounds coincide.
    assert lo.value == pytest.approx(0.015625, rel=1e-12)
    assert hi.value == pytest.approx(0.015625, rel=1e-12)
    assert lo.method is VolumeMethod.LOWER_BOUND
    assert hi.method is VolumeMethod.UPPER_BOUND

    lo, hi = gq.ball_volume_bounds(BallSpec(5, 2, 2, 1, 0.6))
    assert lo.value == pytest.approx(0.125 * 0.6**6, rel=1e-12)
    assert hi.value == pytest.approx(0.125 * 0.6**6 / 0.64, rel=1e-12)

    for spec in [BallSpec(6, 2, 3, 2, d) for d in (0.2, 0.5, 0.8, 1.0)]:
        lo, hi = gq.ball_volume_bounds(spec)
        assert 0.0 <= lo.value <= hi.value <= 1.0
    with pytest.raises(gq.RadiusTooLarge):
        gq.ball_volume_bounds(BallSpec(4, 2, 2, 1, 1.3))


def test_barg_nogin():
    assert gq.barg_nogin_approx(5, 1, 2, 1.0).value == 1.0
    est = gq.barg_nogin_approx(10, 2, 1, 0.5)
    assert est.method is VolumeMethod.BARG_NOGIN
    assert est.value == pytest.approx(2.0**-30, rel=1e-12)


def test_mc_trivial_values():
    rng = np.random.default_rng(0)
    full = gq.ball_volume_mc(BallSpec(6, 2, 3, 2, math.sqrt(2)), 2000, rng)
    assert full.value == 1.0  # distance never exceeds sqrt(p)
    zero = gq.ball_volume_mc(BallSpec(6, 2, 3, 2, 0.0), 2000, rng)
    assert zero.value == 0.0
    with pytest.raises(gq.DomainError):
        gq.ball_volume_mc(BallSpec(4, 1, 1, 2, 0.5), 500, rng)


def test_mc_matches_exact_case():
    est = gq.ball_volume_mc(BallSpec(4, 1, 1, 2, 0.5), 100_000, np.random.default_rng(13))
    exact = 0.015625
    sigma = math.sqrt(exact * (1 - exact) / est.samples)
    assert abs(est.value - exact) <= 3 * sigma
    assert est.method is VolumeMethod.MONTE_CARLO


def test_mc_monotone_in_radius_with_shared_seed():
    values = [
        gq.ball_volume_mc(BallSpec(5, 2, 2, 2, d), 5000, np.random.default_rng(99)).value
        for d in np.linspace(0.2, 1.4, 7)
    ]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_mc_grid_shares_samples_and_is_monotone():
    deltas = np.linspace(0.1, 1.0, 10)
    grid = gq.ball_volume_mc_grid(5, 2, 2, 2, deltas, 20_000, np.random.default_rng(3))
    values = [g.value for g in grid]
    assert all(a <= b for a, b in zip(values, values[1:]))
    single = gq.ball_volume_mc(BallSpec(5, 2, 2, 2, float(deltas[4])), 20_000, np.random.default_rng(3))
    assert single.value == values[4]  # same stream, same threshold


def test_mc_threads_deterministic():
    spec = BallSpec(4, 1, 2, 2, 0.6)
    a = gq.ball_volume_mc(spec, 10_000, np.random.default_rng(5), threads=2)
    b = gq.ball_volume_mc(spec, 10_000, np.random.default_rng(5), threads=2)
    assert a.value == b.value
    exact = 3 * 0.6**4 - 2 * 0.6**6
    assert abs(a.value - exact) <= 4 * math.sqrt(exact * (1 - exact) / 10_000)


def test_sandwich_small_grid():
    rng = np.random.default_rng(21)
    for n, p, q, beta in [(4, 2, 2, 1), (6, 2, 3, 2), (5, 1, 3, 1)]:
        for d in (0.5, 0.8):
            spec = BallSpec(n, p, q, beta, d)
            lo, hi = gq.ball_volume_bounds(spec)
            mc = gq.ball_volume_mc(spec, 20_000, rng)
            slack = 3 * max(mc.stderr, 1e-4)
            assert lo.value - slack <= mc.value <= hi.value + slack


def test_exact_case_real_q_is_p_plus_one():
    # Lines in R^5 against a plane center: volume is exactly d^3.
    grid = gq.ball_volume_mc_grid(5, 1, 2, 1, [0.4, 0.8], 50_000, np.random.default_rng(2))
    for d, est in zip([0.4, 0.8], grid):
        exact = d**3
        sigma = math.sqrt(exact * (1 - exact) / est.samples)
        assert abs(est.value - exact) <= 3 * sigma


def test_log_space_scales_to_large_n():
    for n in (64, 128, 256):
        for p, q in [(1, 1), (2, 3), (n // 2, n // 2)]:
            for beta in (1, 2):
                value = gq.log_coeff_c(n, p, q, beta)
                assert math.isfinite(value)
    assert gq.coeff_c(256, 128, 128, 1) >= 0.0  # may underflow, never NaN
