"""Dense Lindblad master-equation oracle for small chains (N <= 12).

Ground truth for every trajectory engine: builds sparse many-body operators
from a LindbladModel, integrates drho/dt = -i[H, rho] + sum_mu (L rho L+
- {L+L, rho}/2) with an adaptive embedded Runge-Kutta pair on the vectorized
density matrix, and evaluates the same named observables the engines report
(standard errors identically zero).
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .errors import (
    AllRatesZero,
    AsymmetricCouplings,
    DimensionMismatch,
    DimensionTooLarge,
    IntegratorDivergence,
    InvalidDensityMatrix,
)
from .models import Channel, Field, LindbladModel, RydbergCoupling, ZZCoupling
from .models import initial_bloch_vectors, power_law_couplings
from .observables import parse_observables
from .phasespace import IDENTITY_2, PAULI, SIGMA_MINUS, SIGMA_PLUS

MAX_SPINS = 12

_RYDBERG_PROJECTOR = 0.5 * (IDENTITY_2 + PAULI["z"])


def _check_dimension(n_spins: int):
    if n_spins > MAX_SPINS:
        raise DimensionTooLarge(
            f"dense oracle supports at most {MAX_SPINS} spins, got {n_spins}"
        )


def site_operator(op: np.ndarray, site: int, n_spins: int) -> sp.csr_matrix:
    """Embed a single-spin operator at `site` in the n-spin product space."""
    _check_dimension(n_spins)
    if not 0 <= site < n_spins:
        raise ValueError(f"site {site} outside chain of {n_spins}")
    out = sp.identity(1, dtype=complex, format="csr")
    small = sp.csr_matrix(np.asarray(op, dtype=complex))
    for k in range(n_spins):
        out = sp.kron(out, small if k == site else sp.identity(2, format="csr"),
                      format="csr")
    return out


def two_site_operator(op_a, site_a, op_b, site_b, n_spins) -> sp.csr_matrix:
    return site_operator(op_a, site_a, n_spins) @ site_operator(op_b, site_b, n_spins)


def build_rydberg_hamiltonian(n: int, omega: float, j: float, alpha_exp: float,
                              boundary: str = "periodic") -> sp.csr_matrix:
    """H = omega sum_n sigma^x_n + sum_{m<n} V_mn P_m P_n with the projector
    P = (1 + sigma^z)/2 and V_mn = j / d(m,n)^alpha_exp (min-image distance
    for periodic chains).

    Raises:
        DimensionTooLarge: for n > 12.
    """
    _check_dimension(n)
    dim = 2 ** n
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for site in range(n):
        h = h + omega * site_operator(PAULI["x"], site, n)
    v = power_law_couplings(n, j, alpha_exp, boundary)
    for m in range(n):
        for k in range(m + 1, n):
            if v[m, k]:
                h = h + v[m, k] * two_site_operator(
                    _RYDBERG_PROJECTOR, m, _RYDBERG_PROJECTOR, k, n
                )
    return h


def build_ising_hamiltonian(couplings: np.ndarray) -> sp.csr_matrix:
    """H = -1/2 sum_{m<n} J_mn sigma^z_m sigma^z_n.

    Note the minus sign: this standalone helper builds the ferromagnetic-form
    operator, whereas the ``ZZCoupling`` model term carries +1/2 (the
    convention the trajectory drift uses).  ``-build_ising_hamiltonian(J)``
    therefore equals the oracle operator of ``ZZCoupling(J)``.

    Raises:
        AsymmetricCouplings: if J is not symmetric with zero diagonal.
    """
    j = np.asarray(couplings, dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise AsymmetricCouplings(f"couplings must be square, got shape {j.shape}")
    if not np.allclose(j, j.T, atol=1e-12) or np.max(np.abs(np.diag(j))) > 1e-12:
        raise AsymmetricCouplings("couplings must be symmetric with zero diagonal")
    n = j.shape[0]
    _check_dimension(n)
    dim = 2 ** n
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for m in range(n):
        for k in range(m + 1, n):
            if j[m, k]:
                h = h - 0.5 * j[m, k] * two_site_operator(
                    PAULI["z"], m, PAULI["z"], k, n
                )
    return h


def hamiltonian_from_model(model: LindbladModel) -> sp.csr_matrix:
    _check_dimension(model.n_spins)
    n = model.n_spins
    dim = 2 ** n
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for term in model.terms:
        if isinstance(term, Field):
            for site in model.term_sites(term):
                h = h + term.strength * site_operator(PAULI[term.axis], site, n)
        elif isinstance(term, ZZCoupling):
            h = h - build_ising_hamiltonian(term.matrix)
        elif isinstance(term, RydbergCoupling):
            v = term.matrix(n)
            for m in range(n):
                for k in range(m + 1, n):
                    if v[m, k]:
                        h = h + v[m, k] * two_site_operator(
                            _RYDBERG_PROJECTOR, m, _RYDBERG_PROJECTOR, k, n
                        )
        else:
            raise ValueError(f"unknown Hamiltonian term {type(term).__name__}")
    return h


_JUMP_OPS = {"dephasing": PAULI["z"], "decay": SIGMA_MINUS, "pump": SIGMA_PLUS}


def jump_operators_from_model(model: LindbladModel) -> list[sp.csr_matrix]:
    """Jump operators with sqrt(rate) folded in, one per (channel, site)."""
    ops = []
    for ch in model.channels:
        small = np.sqrt(ch.rate) * _JUMP_OPS[ch.kind]
        for site in model.channel_sites(ch):
            ops.append(site_operator(small, site, model.n_spins))
    return ops


class _Generator:
    """Precomputed sparse pieces of the Lindblad right-hand side."""

    def __init__(self, model: LindbladModel):
        self.model = model
        self.dim = 2 ** model.n_spins
        self.h = hamiltonian_from_model(model)
        self.jumps = jump_operators_from_model(model)
        # -iH - 1/2 sum L+L applied from the left; its adjoint from the right
        nh = -1j * self.h
        for l_op in self.jumps:
            nh = nh - 0.5 * (l_op.conj().T @ l_op)
        self.nh = nh.tocsr()
        self.nh_dag = self.nh.conj().T.tocsr()
        self.jump_pairs = [(l_op, l_op.conj().T.tocsr()) for l_op in self.jumps]

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        out = self.nh @ rho + rho @ self.nh_dag
        for l_op, l_dag in self.jump_pairs:
            out = out + l_op @ (rho @ l_dag)
        return out


def lindblad_rhs(rho: np.ndarray, model: LindbladModel) -> np.ndarray:
    """drho/dt of the master equation; traceless and Hermiticity-preserving.

    Raises:
        DimensionMismatch: if rho is not 2^n x 2^n for the model's n.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = 2 ** model.n_spins
    if rho.shape != (dim, dim):
        raise DimensionMismatch(
            f"rho has shape {rho.shape}, model needs ({dim}, {dim})"
        )
    return _Generator(model).rhs(rho)


def density_from_bloch(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return 0.5 * (
        IDENTITY_2 + p[0] * PAULI["x"] + p[1] * PAULI["y"] + p[2] * PAULI["z"]
    )


def initial_density_matrix(model: LindbladModel) -> np.ndarray:
    """Product density matrix of the model's initial state."""
    rho = np.array([[1.0 + 0j]])
    for p in initial_bloch_vectors(model):
        rho = np.kron(rho, density_from_bloch(p))
    return rho


def _validate_rho0(rho: np.ndarray, dim: int):
    if rho.shape != (dim, dim):
        raise DimensionMismatch(f"rho0 has shape {rho.shape}, expected ({dim}, {dim})")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise InvalidDensityMatrix("rho0 is not Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise InvalidDensityMatrix("rho0 does not have unit trace")
    if np.min(np.linalg.eigvalsh(rho)) < -1e-8:
        raise InvalidDensityMatrix("rho0 has a significantly negative eigenvalue")


def evolve_exact(rho0: np.ndarray, model: LindbladModel, time_grid,
                 rel_tol: float = 1e-8, abs_tol: float = 1e-10) -> list[np.ndarray]:
    """Density-matrix snapshots on the given time grid (grid[0] must be 0).

    Raises:
        IntegratorDivergence: if the adaptive integrator fails or produces
            non-finite entries.
    """
    time_grid = np.asarray(time_grid, dtype=float)
    if time_grid[0] != 0.0 or np.any(np.diff(time_grid) <= 0):
        raise ValueError("time grid must start at 0 and increase strictly")
    gen = _Generator(model)
    rho0 = np.asarray(rho0, dtype=complex)
    _validate_rho0(rho0, gen.dim)
    if len(time_grid) == 1:
        return [rho0.copy()]

    def f(_, y):
        return gen.rhs(y.reshape(gen.dim, gen.dim)).ravel()

    sol = solve_ivp(f, (0.0, float(time_grid[-1])), rho0.ravel(),
                    t_eval=time_grid, rtol=rel_tol, atol=abs_tol)
    if not sol.success or not np.all(np.isfinite(sol.y)):
        raise IntegratorDivergence(f"master-equation integration failed: {sol.message}")
    out = []
    for k in range(sol.y.shape[1]):
        rho = sol.y[:, k].reshape(gen.dim, gen.dim)
        out.append(0.5 * (rho + rho.conj().T))
    return out


def steady_state_driven_spin(omega: float, gamma: float, kappa: float) -> float:
    """Closed-form steady <sigma^z> of a single spin with x-drive omega,
    decay gamma and dephasing kappa:

        -(gamma kappa + (gamma/2)^2) / (2 omega^2 + gamma kappa + (gamma/2)^2)

    Raises:
        AllRatesZero: if omega, gamma and kappa are all zero.
    """
    if omega == 0.0 and gamma == 0.0 and kappa == 0.0:
        raise AllRatesZero("steady state undefined with no drive and no dissipation")
    num = gamma * kappa + 0.25 * gamma ** 2
    den = 2.0 * omega ** 2 + num
    if den == 0.0:
        # omega = gamma = 0 with pure dephasing: sigma^z is conserved and no
        # unique steady state exists
        raise ValueError("pure dephasing without drive has no unique steady state")
    return -num / den


def expectation(rho: np.ndarray, observable) -> float:
    """Tr[rho O].real for a dense or sparse operator.

    Raises:
        DimensionMismatch: on shape disagreement.
    """
    rho = np.asarray(rho, dtype=complex)
    if sp.issparse(observable):
        if observable.shape != rho.shape:
            raise DimensionMismatch(
                f"operator shape {observable.shape} vs rho {rho.shape}"
            )
        # Tr[rho O] = sum_ij rho_ij O_ji
        return float(np.real(observable.multiply(rho.T).sum()))
    obs = np.asarray(observable, dtype=complex)
    if obs.shape != rho.shape:
        raise DimensionMismatch(f"operator shape {obs.shape} vs rho {rho.shape}")
    return float(np.real(np.trace(rho @ obs)))


def connected_correlator(rho: np.ndarray, site_i: int, site_j: int,
                         operator=None, n_spins: int | None = None) -> float:
    """<O_i O_j> - <O_i><O_j> for a single-site operator (default: the
    Rydberg projector (1 + sigma^z)/2)."""
    if operator is None:
        operator = _RYDBERG_PROJECTOR
    if n_spins is None:
        n_spins = int(np.log2(rho.shape[0]))
    oi = site_operator(operator, site_i, n_spins)
    oj = site_operator(operator, site_j, n_spins)
    return expectation(rho, oi @ oj) - expectation(rho, oi) * expectation(rho, oj)


# ---------------------------------------------------------------------------
# named-observable series (same interface as the trajectory engines)
# ---------------------------------------------------------------------------

def _base_operator(key, n_spins) -> sp.csr_matrix:
    kind = key[0]
    if kind == "coll":
        mu = key[1]
        dim = 2 ** n_spins
        op = sp.csr_matrix((dim, dim), dtype=complex)
        for site in range(n_spins):
            op = op + site_operator(PAULI[mu], site, n_spins)
        return op / n_spins
    if kind == "site":
        return site_operator(PAULI[key[1]], key[2], n_spins)
    if kind == "rr":
        return site_operator(_RYDBERG_PROJECTOR, key[1], n_spins)
    if kind == "rrpair":
        return two_site_operator(
            _RYDBERG_PROJECTOR, key[1], _RYDBERG_PROJECTOR, key[2], n_spins
        )
    raise ValueError(f"unknown estimator key {key}")


def exact_observable_series(model: LindbladModel, time_grid, observable_names,
                            rho0: np.ndarray | None = None,
                            rel_tol: float = 1e-8, abs_tol: float = 1e-10):
    """Exact means of the named observables on the time grid.

    Integrates segment by segment, so memory stays at one density matrix
    regardless of grid length.  Returns an ObservableSeries with zero
    standard errors.
    """
    from .observables import ObservableSeries

    time_grid = np.asarray(time_grid, dtype=float)
    parsed = parse_observables(observable_names, model.n_spins)
    base_keys = sorted({k for p in parsed for k in p.base_keys})
    ops = {k: _base_operator(k, model.n_spins) for k in base_keys}
    gen = _Generator(model)
    rho = initial_density_matrix(model) if rho0 is None else np.asarray(rho0, complex)
    _validate_rho0(rho, gen.dim)
    if time_grid[0] != 0.0 or np.any(np.diff(time_grid) <= 0):
        raise ValueError("time grid must start at 0 and increase strictly")

    def f(_, y):
        return gen.rhs(y.reshape(gen.dim, gen.dim)).ravel()

    base_values = {k: np.empty(len(time_grid)) for k in base_keys}
    for idx, t in enumerate(time_grid):
        if idx > 0:
            sol = solve_ivp(f, (float(time_grid[idx - 1]), float(t)), rho.ravel(),
                            rtol=rel_tol, atol=abs_tol)
            if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
                raise IntegratorDivergence(
                    f"master-equation integration failed: {sol.message}"
                )
            rho = sol.y[:, -1].reshape(gen.dim, gen.dim)
            rho = 0.5 * (rho + rho.conj().T)
        for k in base_keys:
            base_values[k][idx] = expectation(rho, ops[k])

    zeros = {k: np.zeros(len(time_grid)) for k in base_keys}
    means, errors = {}, {}
    for p in parsed:
        mean, err = p.finalize(base_values, zeros)
        means[p.name] = mean
        errors[p.name] = err
    return ObservableSeries(times=time_grid, means=means, std_errors=errors,
                            n_traj=0, engine="exact")
