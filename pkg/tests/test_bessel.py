import math

import numpy as np
import pytest

from casimir_cylinders import bessel

import oracles

# Frozen oracle values (power series with >= 20 terms / integral
# representation, computed at 40 digits in oracles.py).
I0_AT_1 = 1.2660658777520084
K0_AT_1 = 0.42102443824070834
K0_AT_2 = 0.11389387274953344
I1_AT_1 = 0.5651591039924851


def test_bessel_i_example_values():
    assert bessel.bessel_i(0, 1.0) == pytest.approx(I0_AT_1, rel=1e-12)
    assert bessel.bessel_i(3, 0.0) == 0.0
    assert bessel.bessel_i(0, 0.0) == 1.0


def test_bessel_i_reflection_bit_identical():
    for n in (1, 3, 17, 64):
        for x in (1e-3, 2.5, 40.0):
            assert bessel.bessel_i(-n, x) == bessel.bessel_i(n, x)
            assert bessel.bessel_k(-n, x) == bessel.bessel_k(n, x)


def test_bessel_k_example_values():
    assert bessel.bessel_k(0, 1.0) == pytest.approx(K0_AT_1, rel=1e-12)
    assert bessel.bessel_k(0, 2.0) == pytest.approx(K0_AT_2, rel=1e-12)


def test_bessel_k_domain_error():
    with pytest.raises(ValueError):
        bessel.bessel_k(0, 0.0)
    with pytest.raises(ValueError):
        bessel.bessel_k(2, -1.0)


def test_bessel_k_strictly_decreasing_in_x():
    xs = np.linspace(0.1, 30.0, 40)
    for n in (0, 1, 5):
        values = [bessel.bessel_k(n, x) for x in xs]
        assert all(a > b for a, b in zip(values, values[1:]))


def test_order_cap_and_overflow_signalling():
    with pytest.raises(ValueError):
        bessel.bessel_i(bessel.MAX_ORDER + 1, 1.0)
    with pytest.raises(OverflowError):
        bessel.bessel_k(400, 1e-2)  # unscaled K overflows; log form stays finite
    assert np.isfinite(bessel.log_bessel_k(400, 1e-2))


def test_scaled_pair_reconstructs_finite_product():
    for n, x in ((0, 1.0), (64, 0.5), (512, 3.0), (3, 650.0)):
        pair = bessel.scaled_bessel_pair(n, x)
        assert np.isfinite(pair.log_i + pair.log_k)


def test_derivative_identities():
    assert bessel.bessel_i_prime(0, 1.0) == pytest.approx(I1_AT_1, rel=1e-12)
    assert bessel.bessel_i_prime(0, 1.0) == bessel.bessel_i(1, 1.0)
    assert bessel.bessel_k_prime(0, 1.0) == -bessel.bessel_k(1, 1.0)
    # recurrence form against central values
    for n, x in ((2, 3.7), (5, 1.2), (17, 40.0)):
        expected = 0.5 * (bessel.bessel_i(n - 1, x) + bessel.bessel_i(n + 1, x))
        assert bessel.bessel_i_prime(n, x) == pytest.approx(expected, rel=1e-13)
        expected = -0.5 * (bessel.bessel_k(n - 1, x) + bessel.bessel_k(n + 1, x))
        assert bessel.bessel_k_prime(n, x) == pytest.approx(expected, rel=1e-13)


def test_k_prime_always_negative():
    for n in (0, 1, 7, 40):
        for x in (1e-2, 1.0, 55.0):
            assert bessel.bessel_k_prime(n, x) < 0.0


def test_wronskian_spot_value():
    n, x = 2, 3.7
    w = bessel.bessel_i(n, x) * bessel.bessel_k_prime(n, x) - bessel.bessel_i_prime(
        n, x
    ) * bessel.bessel_k(n, x)
    assert w == pytest.approx(-1.0 / x, rel=1e-12)


def test_wronskian_grid_log_space():
    # I_n K'_n - I'_n K_n = -1/x over n in 0..64, x in [1e-3, 500]; the
    # products overflow double precision at the corners, so combine in
    # log space: log(I|K'| + I'K) + log x == 0.
    xs = np.array([1e-3, 1e-2, 0.1, 1.0, 3.7, 10.0, 55.0, 200.0, 500.0])
    li = bessel.log_i_ladder(xs, 65)
    lk = bessel.log_k_ladder(xs, 65)
    ldi = bessel.log_di_ladder(xs, 64)
    ldk = bessel.log_dk_ladder(xs, 64)
    for n in range(0, 65):
        lw = np.logaddexp(li[n] + ldk[n], ldi[n] + lk[n])
        residual = np.abs(np.exp(lw + np.log(xs)) - 1.0)
        assert residual.max() < 1e-10


@pytest.mark.parametrize(
    "n,x",
    [(0, 1e-3), (0, 0.5), (1, 2.0), (5, 0.05), (17, 8.0), (64, 30.0), (128, 5.0),
     (256, 100.0), (512, 2.0), (0, 150.0), (2, 400.0), (64, 650.0)],
)
def test_log_i_against_series_oracle(n, x):
    assert bessel.log_bessel_i(n, x) == pytest.approx(
        oracles.log_bessel_i_reference(n, x), abs=1e-10
    )


@pytest.mark.parametrize(
    "n,x",
    [(0, 1e-3), (0, 1.0), (0, 2.0), (1, 0.3), (5, 10.0), (17, 2.0), (64, 60.0),
     (256, 15.0), (512, 1.0), (3, 300.0)],
)
def test_log_k_against_integral_oracle(n, x):
    assert bessel.log_bessel_k(n, x) == pytest.approx(
        oracles.log_bessel_k_reference(n, x), abs=1e-10
    )


def test_series_and_asymptotic_oracles_cross_check():
    # the two independent I oracles agree in their overlap window
    for n, x in ((0, 25.0), (1, 40.0), (4, 55.0)):
        a = float(oracles.mp.log(oracles.bessel_i_series(n, x, terms=160)))
        b = float(oracles.mp.log(oracles.bessel_i_asymptotic(n, x)))
        assert a == pytest.approx(b, abs=1e-12)


# ---------------------------------------------------------------------------
# Uniform (Debye) expansion machinery.

def test_eta_u_t_special_values():
    assert float(bessel.debye_eta(1.0)) == pytest.approx(
        math.sqrt(2.0) + math.log(1.0 / (1.0 + math.sqrt(2.0))), rel=1e-14
    )
    assert float(bessel.debye_eta(1.0)) == pytest.approx(0.5328399753535522, rel=1e-12)
    assert float(bessel.debye_u(1.0)) == pytest.approx(-1.0 / 12.0, rel=1e-15)
    assert float(bessel.debye_t(1e-9)) == pytest.approx(1.0, abs=1e-15)
    assert float(bessel.debye_t(0.0)) == 1.0


def test_eta_strictly_increasing():
    ys = np.linspace(0.05, 8.0, 60)
    values = bessel.debye_eta(ys)
    assert np.all(np.diff(values) > 0.0)


def test_t_in_unit_interval():
    ys = np.linspace(0.0, 50.0, 100)
    ts = bessel.debye_t(ys)
    assert np.all(ts > 0.0) and np.all(ts <= 1.0)


@pytest.mark.parametrize("y,alpha", [(0.5, 1.5), (1.0, 2.0), (2.0, 1.2)])
def test_uniform_k_ratio_converges_and_meets_tolerance(y, alpha):
    errors = []
    for n in (10, 20, 50, 100):
        direct = oracles.uniform_k_ratio_direct(n, y, alpha)
        errors.append(abs(bessel.uniform_k_ratio(n, y, alpha) / direct - 1.0))
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert errors[2] <= 1e-3  # n = 50


@pytest.mark.parametrize("y,alpha", [(0.5, 1.5), (1.0, 2.0), (2.0, 1.2)])
def test_uniform_i_ratio_converges_and_meets_tolerance(y, alpha):
    errors = []
    for n in (10, 20, 50, 100):
        direct = oracles.uniform_i_ratio_direct(n, y, alpha)
        errors.append(abs(bessel.uniform_i_ratio(n, y, alpha) / direct - 1.0))
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert errors[2] <= 1e-3


def test_product_ratio_leading_exponential():
    # I_n(ny) K_n(n alpha y) / (I_n(n alpha y) K_n(ny)) approaches
    # exp(-2n [eta(alpha y) - eta(y)]): prefactors cancel exactly and the
    # residual correction is O(1/n) + O((alpha-1)).
    y, alpha = 1.0, 1.1
    d_eta = float(bessel.debye_eta(alpha * y) - bessel.debye_eta(y))
    for n in (30, 60, 120):
        product = bessel.uniform_k_ratio(n, y, alpha) / bessel.uniform_i_ratio(n, y, alpha)
        assert product == pytest.approx(math.exp(-2.0 * n * d_eta), rel=0.02)


def test_uniform_requires_positive_order():
    with pytest.raises(ValueError):
        bessel.uniform_k_ratio(0, 1.0, 2.0)
