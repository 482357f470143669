"""Young-function calculus: families, conjugates, modulars, doubling
diagnostics, and Matuszewska-Orlicz limits."""

import math

import numpy as np
import pytest

from orlicz_eigen.errors import ConfigError
from orlicz_eigen.mesh import Mesh
from orlicz_eigen.young import (Endpoint, Regime, YoungFunction,
                                complementary_eval, complementary_function,
                                delta2_report, luxemburg_norm, matuszewska,
                                matuszewska_exponent, modular)


# -- family values ----------------------------------------------------------

def test_power_values():
    F = YoungFunction.power(2)
    assert F.A(3.0) == pytest.approx(9.0, rel=1e-14)
    assert F.a(3.0) == pytest.approx(6.0, rel=1e-14)
    assert F.A(0.0) == 0.0 and F.a(0.0) == 0.0


def test_sum_of_powers_values():
    F = YoungFunction.sum_of_powers(2, 4)
    assert F.A(2.0) == pytest.approx(2.0 ** 2 / 2 + 2.0 ** 4 / 4, rel=1e-14)
    assert F.a(2.0) == pytest.approx(2.0 + 8.0, rel=1e-14)


def test_power_log_values():
    F = YoungFunction.power_log(2, 1, 1)
    assert F.A(1.0) == pytest.approx(0.5 * math.log(2.0), rel=1e-13)


def test_exp_minus_poly_values():
    F = YoungFunction.exp_minus_poly(2)
    assert F.A(1.0) == pytest.approx(math.e - 2.0, rel=1e-13)
    # small-argument branch must not cancel catastrophically
    t = 1e-8
    assert F.A(t) == pytest.approx(t ** 2 / 2.0, rel=1e-6)


def test_exp_minus_poly_needs_degree_two():
    with pytest.raises(Exception):
        YoungFunction.exp_minus_poly(1)


def test_double_exp_values():
    F = YoungFunction.double_exp()
    assert F.A(0.0) == 0.0
    assert F.A(1.0) == pytest.approx(math.exp(math.e) - 2.0 * math.e,
                                     rel=1e-13)


def test_exp_neg_inv_power_continuation_is_c1():
    F = YoungFunction.exp_neg_inv_power(1)
    t0 = 0.5  # alpha/(alpha+1) for alpha = 1
    eps = 1e-7
    left = (F.A(t0) - F.A(t0 - eps)) / eps
    right = (F.A(t0 + eps) - F.A(t0)) / eps
    assert left == pytest.approx(right, rel=1e-5)


def test_density_monotone_and_A_convex():
    for F in [YoungFunction.power(3), YoungFunction.sum_of_powers(2, 4),
              YoungFunction.power_log(2, 1, 1),
              YoungFunction.exp_minus_poly(2), YoungFunction.double_exp()]:
        # cap the grid where the doubly exponential family is representable
        t = np.geomspace(1e-6, 5.0, 200)
        a = F.a(t)
        assert np.all(np.diff(a) >= -1e-12 * np.abs(a[1:]))
        A = F.A(t)
        chord = 0.5 * (A[:-2] + A[2:])
        assert np.all(F.A(0.5 * (t[:-2] + t[2:])) <= chord * (1 + 1e-10))


def test_custom_family_matches_power():
    F = YoungFunction.custom(lambda t: 2.0 * t, label="custom square")
    assert F.A(3.0) == pytest.approx(9.0, rel=1e-8)


def test_from_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        YoungFunction.from_config({"family": "power", "params": {"p": 2},
                                   "bogus": 1})
    with pytest.raises(ConfigError):
        YoungFunction.from_config({"family": "power",
                                   "params": {"p": 2, "extra": 3}})


# -- complementary function -------------------------------------------------

def test_complementary_power2():
    # conjugate of t^2 is t^2/4
    F = YoungFunction.power(2)
    assert complementary_eval(F, 2.0) == pytest.approx(1.0, rel=1e-8)


def test_complementary_via_maximization():
    # sup_tau (tau t - A(tau)) cross-check on a non-power family
    F = YoungFunction.sum_of_powers(2, 4)
    for t in (0.5, 2.0 / 3.0, 1.5):
        tau = np.linspace(0.0, 10.0, 400_001)
        sup = float(np.max(tau * t - F.A(tau)))
        assert complementary_eval(F, t) == pytest.approx(sup, rel=1e-6,
                                                         abs=1e-9)


def test_complementary_function_is_young():
    F = YoungFunction.power(3)
    G = complementary_function(F)
    assert G.A(0.0) == 0.0
    assert G.A(1.0) == pytest.approx(complementary_eval(F, 1.0), rel=1e-6)


def test_young_inequality_randomized():
    rng = np.random.default_rng(42)
    F = YoungFunction.sum_of_powers(2, 4)
    for _ in range(200):
        s, t = rng.uniform(0.0, 5.0, 2)
        assert s * t <= F.A(s) + complementary_eval(F, t) + 1e-9


# -- modular and Luxemburg norm ---------------------------------------------

def test_modular_constant_field():
    m = Mesh.interval(1.0, 100)
    u = m.field(np.ones(m.interior_count))
    F = YoungFunction.power(2)
    assert modular(F, u, m) == pytest.approx(1.0, rel=1e-14)


def test_luxemburg_norm_power_scaling():
    # for A = t^p the Luxemburg norm is the L^p norm
    m = Mesh.interval(1.0, 100)
    u = m.field(np.full(m.interior_count, 2.0))
    F = YoungFunction.power(2)
    assert luxemburg_norm(F, u, m) == pytest.approx(2.0, rel=1e-7)


def test_luxemburg_unit_ball():
    m = Mesh.interval(1.0, 100)
    rng = np.random.default_rng(3)
    u = m.field(np.abs(rng.standard_normal(m.interior_count)) + 0.1)
    F = YoungFunction.sum_of_powers(2, 4)
    k = luxemburg_norm(F, u, m)
    assert modular(F, u * (1.0 / k), m) == pytest.approx(1.0, rel=1e-6)


# -- doubling diagnostics ---------------------------------------------------

def test_delta2_power():
    rep = delta2_report(YoungFunction.power(2), Endpoint.INFINITY)
    assert rep.holds
    assert rep.p_index == pytest.approx(2.0, abs=1e-10)


def test_delta2_sum_of_powers_index():
    rep = delta2_report(YoungFunction.sum_of_powers(2, 4), Endpoint.INFINITY)
    assert rep.holds
    assert rep.p_index == pytest.approx(4.0, abs=1e-6)


def test_delta2_exp_fails_at_infinity():
    rep = delta2_report(YoungFunction.exp_minus_poly(2), Endpoint.INFINITY)
    assert not rep.holds
    rep0 = delta2_report(YoungFunction.exp_minus_poly(2), Endpoint.ZERO)
    assert rep0.holds


def test_delta2_exp_neg_inv_power_fails_at_zero():
    rep = delta2_report(YoungFunction.exp_neg_inv_power(1), Endpoint.ZERO)
    assert not rep.holds


def test_index_inequality_a_t_vs_A():
    # A(t) <= a(t) t <= p A(t) over a broad grid
    F = YoungFunction.sum_of_powers(2, 4)
    p = delta2_report(F, Endpoint.INFINITY).p_index
    t = np.geomspace(1e-4, 1e4, 200)
    ratio = F.a(t) * t / F.A(t)
    assert np.all(ratio >= 1.0 - 1e-10)
    assert np.all(ratio <= p * (1.0 + 1e-10))


# -- Matuszewska-Orlicz -----------------------------------------------------

def test_matuszewska_power():
    F = YoungFunction.power(3)
    v = matuszewska(F, Endpoint.INFINITY, 2.0)
    assert v.value == pytest.approx(8.0, rel=1e-6)


def test_matuszewska_exponents_sum_of_powers():
    F = YoungFunction.sum_of_powers(2, 4)
    est0 = matuszewska_exponent(F, Endpoint.ZERO)
    est1 = matuszewska_exponent(F, Endpoint.INFINITY)
    assert est0.regime is Regime.POWER_LIKE
    assert est1.regime is Regime.POWER_LIKE
    assert est0.exponent == pytest.approx(2.0, abs=1e-2)
    assert est1.exponent == pytest.approx(4.0, abs=1e-2)


def test_matuszewska_power_log():
    F = YoungFunction.power_log(2, 1, 1)
    est0 = matuszewska_exponent(F, Endpoint.ZERO)
    est1 = matuszewska_exponent(F, Endpoint.INFINITY)
    assert est0.exponent == pytest.approx(3.0, abs=1e-2)  # p + r alpha
    assert est1.exponent == pytest.approx(2.0, abs=1e-2)  # p
    assert est0.regime is Regime.POWER_LIKE


def test_matuszewska_degenerate_families():
    assert matuszewska_exponent(YoungFunction.exp_minus_poly(2),
                                Endpoint.INFINITY).regime \
        is Regime.TRIVIAL_DEGENERATE
    assert matuszewska_exponent(YoungFunction.double_exp(),
                                Endpoint.INFINITY).regime \
        is Regime.TRIVIAL_DEGENERATE
    assert matuszewska_exponent(YoungFunction.exp_neg_inv_power(1),
                                Endpoint.ZERO).regime \
        is Regime.TRIVIAL_DEGENERATE


def test_exp_minus_poly_zero_exponent():
    # near zero the tail series starts at t^n
    est = matuszewska_exponent(YoungFunction.exp_minus_poly(2), Endpoint.ZERO)
    assert est.exponent == pytest.approx(2.0, abs=1e-2)
