"""Fractional pair-sum energy: weights, gradients, quotients, solves."""

import numpy as np
import pytest

from orlicz_eigen.errors import ConfigError
from orlicz_eigen.fractional import (NonlocalMesh, energy_s,
                                     energy_s_gradient, lagrange_quotient_s,
                                     solve_Es, tail_bound, weak_residual_s)
from orlicz_eigen.solver import SolveOptions
from orlicz_eigen.young import YoungFunction, modular

import oracles


@pytest.fixture(scope="module")
def nm():
    return NonlocalMesh(1.0, 64, 0.5)


def test_config_validation():
    with pytest.raises(ConfigError):
        NonlocalMesh(1.0, 64, 1.0)  # s must be < 1
    with pytest.raises(ConfigError):
        NonlocalMesh(1.0, 64, 0.0)
    with pytest.raises(ConfigError):
        NonlocalMesh.from_config({"length": 1.0, "nodes": 64, "s": 0.5,
                                  "bogus": 1})


def test_pair_weights_symmetric_positive(nm):
    assert np.allclose(nm._w, nm._w.T)
    off_diag = nm._w[~np.eye(nm.interior_count, dtype=bool)]
    assert np.all(off_diag > 0.0)


def test_energy_zero_field(nm):
    F = YoungFunction.power(2)
    assert energy_s(F, np.zeros(nm.interior_count), nm) == 0.0


def test_energy_homogeneity(nm):
    F = YoungFunction.power(3)
    rng = np.random.default_rng(0)
    u = rng.standard_normal(nm.interior_count)
    assert energy_s(F, 2.0 * u, nm) == \
        pytest.approx(8.0 * energy_s(F, u, nm), rel=1e-12)


def test_energy_reflection_symmetry(nm):
    F = YoungFunction.sum_of_powers(2, 4)
    rng = np.random.default_rng(1)
    u = rng.standard_normal(nm.interior_count)
    assert energy_s(F, u, nm) == pytest.approx(energy_s(F, u[::-1], nm),
                                               abs=1e-14 * energy_s(F, u, nm))


def test_gradient_matches_finite_differences(nm):
    F = YoungFunction.sum_of_powers(2, 4)
    rng = np.random.default_rng(2)
    u = np.abs(rng.standard_normal(nm.interior_count)) + 0.1
    v = rng.standard_normal(nm.interior_count)
    g = energy_s_gradient(F, u, nm)
    num = oracles.directional_derivative(lambda w: energy_s(F, w, nm), u, v)
    assert float(g @ v) == pytest.approx(num, rel=1e-5)


def test_quotient_power_identity(nm):
    F = YoungFunction.power(2)
    rng = np.random.default_rng(3)
    u = np.abs(rng.standard_normal(nm.interior_count)) + 0.1
    lam = lagrange_quotient_s(F, u, nm)
    assert lam == pytest.approx(
        energy_s(F, u, nm) / modular(F, u, nm.mesh), rel=1e-12)


def test_quotient_sandwich_under_doubling(nm):
    F = YoungFunction.sum_of_powers(2, 4)
    res = solve_Es(F, nm, 1.0, SolveOptions(restarts=2))
    p = 4.0
    q = res.energy / 1.0
    assert q / p * (1 - 1e-9) <= res.lam <= p * q * (1 + 1e-9)


def test_solve_converges_with_small_residual(nm):
    F = YoungFunction.power(2)
    res = solve_Es(F, nm, 1.0, SolveOptions(restarts=2))
    assert res.converged
    assert weak_residual_s(F, res.u.values, res.lam, nm) <= 1e-8
    assert abs(res.alpha - 1.0) <= 1e-10


def test_solve_minimizer_symmetric(nm):
    F = YoungFunction.power(2)
    res = solve_Es(F, nm, 1.0, SolveOptions(restarts=2))
    u = res.u.values
    assert np.max(np.abs(u - u[::-1])) <= 5e-2 * np.max(np.abs(u))


def test_halo_truncation_monotone_and_small(nm):
    # widening the halo may only add energy, and the 4L -> 8L increment
    # stays below the closed-form tail bound reported for the 4L mesh
    F = YoungFunction.power(2)
    res = solve_Es(F, nm, 1.0, SolveOptions(restarts=2))
    nm8 = NonlocalMesh(1.0, 64, 0.5, r_cut=8.0)
    e4 = energy_s(F, res.u.values, nm)
    e8 = energy_s(F, res.u.values, nm8)
    assert e8 >= e4
    assert e8 - e4 <= tail_bound(F, res.u.values, nm)


def test_tail_bound_reported(nm):
    F = YoungFunction.power(2)
    res = solve_Es(F, nm, 1.0, SolveOptions(restarts=1))
    assert res.tail_bound > 0.0
    assert "tail_bound" in res.as_dict()
