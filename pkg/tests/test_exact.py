"""Dense master-equation oracle: structure checks and analytic benchmarks."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dctwa import exact
from dctwa.errors import (
    AllRatesZero,
    AsymmetricCouplings,
    DimensionMismatch,
    DimensionTooLarge,
    IntegratorDivergence,
    InvalidDensityMatrix,
)
from dctwa.models import Channel, Field, LindbladModel, RydbergCoupling, zz_all_to_all
from dctwa.phasespace import PAULI_X, PAULI_Y, PAULI_Z


def dense(op):
    return np.asarray(op.todense()) if hasattr(op, "todense") else np.asarray(op)


def test_site_operator_embedding():
    op0 = dense(exact.site_operator(PAULI_Z, 0, 2))
    op1 = dense(exact.site_operator(PAULI_Z, 1, 2))
    assert_allclose(op0, np.kron(PAULI_Z, np.eye(2)))
    assert_allclose(op1, np.kron(np.eye(2), PAULI_Z))


def test_two_site_operator():
    op = dense(exact.two_site_operator(PAULI_X, 0, PAULI_Y, 2, 3))
    assert_allclose(op, np.kron(PAULI_X, np.kron(np.eye(2), PAULI_Y)))


def test_rydberg_hamiltonian_two_sites():
    h = dense(exact.build_rydberg_hamiltonian(2, omega=0.5, j=2.0,
                                              alpha_exp=6.0, boundary="open"))
    proj = (np.eye(2) + PAULI_Z) / 2.0
    expected = (
        0.5 * (np.kron(PAULI_X, np.eye(2)) + np.kron(np.eye(2), PAULI_X))
        + 2.0 * np.kron(proj, proj)
    )
    assert_allclose(h, expected, atol=1e-14)


def test_zz_model_hamiltonian_convention():
    """A ZZ coupling term contributes + (1/2) sum_{m<n} J_mn sigma^z_m sigma^z_n."""
    model = LindbladModel(2, (zz_all_to_all(2, 3.0),), (), "down")
    h = dense(exact.hamiltonian_from_model(model))
    expected = 1.5 * np.kron(PAULI_Z, PAULI_Z)
    assert_allclose(h, expected, atol=1e-14)


def test_ising_builder_rejects_asymmetric_couplings():
    with pytest.raises(AsymmetricCouplings):
        exact.build_ising_hamiltonian(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_dimension_cap():
    with pytest.raises(DimensionTooLarge):
        exact.build_rydberg_hamiltonian(13, 0.3, 1.0, 6.0)


def test_jump_operators_fold_rates():
    model = LindbladModel(
        1, (), (Channel("decay", 4.0), Channel("dephasing", 9.0)), "down"
    )
    ops = [dense(op) for op in exact.jump_operators_from_model(model)]
    norms = sorted(np.abs(op).max() for op in ops)
    assert_allclose(norms, [2.0, 3.0])  # sqrt(rate) folded into the operator


def test_lindblad_rhs_preserves_trace_and_hermiticity():
    rng = np.random.default_rng(0)
    model = LindbladModel(
        2,
        (Field("x", 0.7), zz_all_to_all(2, 1.3)),
        (Channel("decay", 0.2), Channel("dephasing", 0.1)),
        "down",
    )
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    drho = exact.lindblad_rhs(rho, model)
    assert abs(np.trace(drho)) < 1e-12
    assert_allclose(drho, drho.conj().T, atol=1e-12)


def test_lindblad_rhs_dimension_mismatch():
    model = LindbladModel(2, (Field("x", 1.0),), (), "down")
    with pytest.raises(DimensionMismatch):
        exact.lindblad_rhs(np.eye(2) / 2.0, model)


def test_density_from_bloch():
    rho = exact.density_from_bloch(np.array([0.0, 0.0, -1.0]))
    assert_allclose(rho, np.array([[0.0, 0.0], [0.0, 1.0]]), atol=1e-14)
    rho_mixed = exact.density_from_bloch(np.zeros(3))
    assert_allclose(rho_mixed, np.eye(2) / 2.0)


def test_validate_rho0_rejects_bad_matrices():
    model = LindbladModel(1, (), (Channel("decay", 1.0),), "down")
    grid = np.array([0.0, 0.1])
    bad_trace = np.eye(2)
    with pytest.raises(InvalidDensityMatrix):
        exact.evolve_exact(bad_trace, model, grid)
    not_positive = np.array([[1.5, 0.0], [0.0, -0.5]])
    with pytest.raises(InvalidDensityMatrix):
        exact.evolve_exact(not_positive, model, grid)


def test_decay_from_up_matches_exponential():
    gamma = 0.8
    model = LindbladModel(1, (), (Channel("decay", gamma),), "up")
    grid = np.linspace(0.0, 5.0, 11)
    rhos = exact.evolve_exact(exact.initial_density_matrix(model), model, grid)
    sz = np.array([exact.expectation(r, PAULI_Z) for r in rhos])
    assert_allclose(sz, -1.0 + 2.0 * np.exp(-gamma * grid), atol=1e-7)


def test_dephasing_matches_exponential():
    kappa = 0.3
    model = LindbladModel(1, (), (Channel("dephasing", kappa),), "+x")
    grid = np.linspace(0.0, 4.0, 9)
    rhos = exact.evolve_exact(exact.initial_density_matrix(model), model, grid)
    sx = np.array([exact.expectation(r, PAULI_X) for r in rhos])
    assert_allclose(sx, np.exp(-2.0 * kappa * grid), atol=1e-7)


def test_pump_mirrors_decay():
    gamma = 0.5
    model = LindbladModel(1, (), (Channel("pump", gamma),), "down")
    grid = np.linspace(0.0, 6.0, 7)
    rhos = exact.evolve_exact(exact.initial_density_matrix(model), model, grid)
    sz = np.array([exact.expectation(r, PAULI_Z) for r in rhos])
    assert_allclose(sz, 1.0 - 2.0 * np.exp(-gamma * grid), atol=1e-7)


def test_closed_rabi_oscillation():
    omega = 0.4
    model = LindbladModel(1, (Field("x", omega),), (), "down")
    grid = np.linspace(0.0, 10.0, 21)
    series = exact.exact_observable_series(model, grid, ("Sz",))
    assert_allclose(series.means["Sz"], -np.cos(2.0 * omega * grid), atol=1e-6)


def test_two_spin_ising_dephasing_of_sx():
    """Under H = (J/2) sigma^z sigma^z from the fully x-polarised state the
    single-site coherence rephases as cos(Jt)."""
    j = 1.7
    model = LindbladModel(2, (zz_all_to_all(2, j),), (), "+x")
    grid = np.linspace(0.0, 3.0, 16)
    series = exact.exact_observable_series(model, grid, ("Sx",))
    assert_allclose(series.means["Sx"], np.cos(j * grid), atol=1e-6)


def test_steady_state_driven_spin_formula_and_guards():
    value = exact.steady_state_driven_spin(0.3, 0.01, 0.01)
    num = 0.01 * 0.01 + 0.25 * 0.01**2
    assert_allclose(value, -num / (2 * 0.3**2 + num))
    with pytest.raises(AllRatesZero):
        exact.steady_state_driven_spin(0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        exact.steady_state_driven_spin(0.0, 0.0, 0.5)


def test_steady_state_reached_by_integrator():
    omega, gamma, kappa = 0.3, 0.05, 0.02
    model = LindbladModel(
        1,
        (Field("x", omega),),
        (Channel("decay", gamma), Channel("dephasing", kappa)),
        "down",
    )
    grid = np.array([0.0, 400.0])
    rhos = exact.evolve_exact(exact.initial_density_matrix(model), model, grid)
    sz_inf = exact.expectation(rhos[-1], PAULI_Z)
    assert_allclose(sz_inf, exact.steady_state_driven_spin(omega, gamma, kappa),
                    atol=1e-6)


def test_connected_correlator_vanishes_on_product_state():
    model = LindbladModel(2, (), (), "down")
    rho = exact.initial_density_matrix(model)
    assert abs(exact.connected_correlator(rho, 0, 1)) < 1e-14


def test_connected_correlator_detects_correlations():
    # Bell-like state (|00> + |11>)/sqrt(2) in the up/down basis
    psi = np.zeros(4)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    rho = np.outer(psi, psi)
    # rr projectors: <n_0 n_1> = 1/2, <n_0><n_1> = 1/4
    assert_allclose(exact.connected_correlator(rho, 0, 1), 0.25, atol=1e-14)


def test_exact_observable_series_metadata():
    model = LindbladModel(1, (Field("x", 0.2),), (Channel("decay", 0.1),), "down")
    grid = np.linspace(0.0, 1.0, 5)
    series = exact.exact_observable_series(model, grid, ("Sz", "Sx"))
    assert series.engine == "exact"
    assert series.n_traj == 0
    for name in ("Sz", "Sx"):
        assert_allclose(series.std_errors[name], 0.0)
        assert series.means[name].shape == grid.shape


def test_rydberg_series_site_resolution():
    model = LindbladModel(
        3,
        (Field("x", 0.3), RydbergCoupling(1.0, 6.0, "open")),
        (Channel("decay", 0.01),),
        "down",
    )
    grid = np.linspace(0.0, 2.0, 5)
    series = exact.exact_observable_series(
        model, grid, ("Sz", "sz_site:0", "sz_site:1", "sz_site:2")
    )
    mean_sites = (
        series.means["sz_site:0"]
        + series.means["sz_site:1"]
        + series.means["sz_site:2"]
    ) / 3.0
    assert_allclose(series.means["Sz"], mean_sites, atol=1e-10)
