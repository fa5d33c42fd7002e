"""End-to-end acceptance gates.

Each test prints exactly one machine-greppable line

    [criterion NN] <name>: PASS/FAIL (<measured numbers>)

and then asserts on the same condition, so a failing run still shows the
quantitative outcome.  Run with ``pytest tests/test_acceptance.py -v -s`` to
see the lines inline; the whole file takes tens of minutes (the Rydberg-chain
ensembles dominate).  Statistical gates use frozen seeds, so the run is
reproducible bit for bit; the quoted standard-error margins were chosen with
headroom against seed-to-seed fluctuation.

The full-scale reproduction (criterion 11) runs for hours and is opt-in via
the RUN_FULL_SCALE environment variable; it is intentionally not part of the
default gate.
"""

import os

import numpy as np
import pytest

from dctwa import engines as eng
from dctwa import exact
from dctwa import mappings as mp
from dctwa import phasespace as ps
from dctwa.models import LindbladModel, Channel, Field, model_checksum, preset

SQRT3 = np.sqrt(3.0)

CHAIN6_OBSERVABLES = ("Sx", "Sy", "Sz", "rr_corr_nn", "rr_corr_nnn")


def _line(num: int, name: str, ok: bool, detail: str) -> str:
    return f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'} ({detail})"


def _finish(num, name, ok, detail):
    line = _line(num, name, ok, detail)
    print("\n" + line)
    assert ok, line


def _angles_to_cartesian(theta, phi):
    return np.stack(
        [
            SQRT3 * np.sin(theta) * np.cos(phi),
            -SQRT3 * np.sin(theta) * np.sin(phi),
            -SQRT3 * np.cos(theta),
        ],
        axis=-1,
    )


# ---------------------------------------------------------------------------
# shared heavy fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def chain6():
    """N = 6 periodic driven-dissipative chain: long DCTWA(ring) ensemble to
    Jt = 200, the dense oracle on the same grid, and the mean-field curve.
    Shared by the medium-lattice fidelity and mean-field-failure gates."""
    pre = preset("rydberg_chain_fig2", n_spins=6)
    cfg = eng.EnsembleConfig(
        n_traj=20_000, dt=5e-3, t_max=200.0, seed=21,
        scheme="ring", engine="dctwa", n_save=41,
    )
    ring = eng.run_ensemble(pre.model, None, cfg, CHAIN6_OBSERVABLES)
    oracle = exact.exact_observable_series(pre.model, ring.times, CHAIN6_OBSERVABLES)
    mf_cfg = eng.EnsembleConfig(
        n_traj=1, dt=5e-3, t_max=200.0, engine="mean_field", n_save=41,
    )
    mean_field = eng.mean_field_run(pre.model, mf_cfg, ("Sx", "Sy", "Sz"))
    return {"model": pre.model, "ring": ring, "oracle": oracle,
            "mean_field": mean_field}


# ---------------------------------------------------------------------------
# 1. kernel algebra
# ---------------------------------------------------------------------------

def test_criterion_01_algebraic_identities():
    rng = np.random.default_rng(0)
    worst = 0.0

    # pointwise: hermiticity and unit trace
    for theta in np.linspace(0.05, np.pi - 0.05, 9):
        for phi in np.linspace(0.0, 2 * np.pi, 8, endpoint=False):
            a = ps.kernel_matrix(theta, phi)
            worst = max(worst, float(np.max(np.abs(a - a.conj().T))))
            worst = max(worst, abs(np.trace(a).real - 1.0))

    # resolution of the identity over the sphere
    nodes, weights = np.polynomial.legendre.leggauss(64)
    theta = np.arccos(nodes)
    phi = np.arange(64) * 2.0 * np.pi / 64
    acc = np.zeros((2, 2), dtype=complex)
    for t, w in zip(theta, weights):
        for p in phi:
            acc += w * ps.kernel_matrix(t, p)
    worst = max(worst, float(np.max(np.abs(acc / 64 - np.eye(2)))))

    # orthogonality of the four base-point kernels: Tr[A_a А_b] = 2 delta_ab
    kernels = [ps.kernel_matrix(*ps.discrete_point_angles(a)) for a in ps.ALPHAS]
    for i, ka in enumerate(kernels):
        for j, kb in enumerate(kernels):
            val = np.trace(ka @ kb).real
            worst = max(worst, abs(val - (2.0 if i == j else 0.0)))

    # reconstruction: rho -> four weights -> rho, and the Weyl pairing
    for _ in range(5):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = m @ m.conj().T
        rho /= np.trace(rho).real
        w4 = ps.discrete_wigner_coeffs(rho)
        worst = max(worst, float(np.max(np.abs(ps.reconstruct_density(w4) - rho))))
        obs = rng.normal(size=(2, 2))
        obs = obs + obs.T
        total = 0.0
        for t, w in zip(theta, weights):
            for p in phi:
                wig = np.trace(rho @ ps.kernel_matrix(t, p)).real
                total += w * wig * ps.weyl_symbol(obs, t, p)
        worst = max(worst, abs(total / 64 - np.trace(rho @ obs).real))

    worst_gauge = max(
        mp.gauge_orthogonality_residual(l, m)
        for l in range(2, 7)
        for m in range(-l, l + 1)
    )
    ok = worst < 1e-12 and worst_gauge < 1e-10
    _finish(1, "kernel algebraic identities", ok,
            f"worst identity residual {worst:.2e} < 1e-12, "
            f"worst gauge overlap l=2..6 {worst_gauge:.2e} < 1e-10")


# ---------------------------------------------------------------------------
# 2. mapping certification
# ---------------------------------------------------------------------------

def test_criterion_02_mapping_certification():
    grid_res = mp.sigma_z_grid_residual(n=32)

    worst = 0.0
    n_checked = 0
    for spec in mp.all_mapping_specs():
        fns = (mp.default_test_functions() if spec.representation == "angular"
               else mp.default_plane_test_functions())
        assert len(fns) >= 5
        for fn in fns:
            worst = max(worst, mp.adjoint_mapping_residual(spec, fn))
            n_checked += 1

    ok = grid_res < 1e-12 and worst < 1e-6
    _finish(2, "mapping certification", ok,
            f"sigma_z 32x32 residual {grid_res:.2e} < 1e-12; "
            f"12 mappings x >=5 functions ({n_checked} checks), "
            f"worst adjoint residual {worst:.2e} < 1e-6")


# ---------------------------------------------------------------------------
# 3. single-spin exactness
# ---------------------------------------------------------------------------

def test_criterion_03_single_spin_exactness():
    pre = preset("single_spin_figD6")
    model = pre.model
    worst_transient = 0.0
    for initial in pre.defaults["initial_sweep"]:
        cfg = eng.EnsembleConfig(
            n_traj=100_000, dt=1e-3, t_max=15.0, seed=11,
            scheme="4p", engine="dctwa", n_save=31,
        )
        series = eng.run_ensemble(model, initial, cfg, ("Sz",))
        oracle = exact.exact_observable_series(
            LindbladModel(1, model.terms, model.channels, initial),
            series.times, ("Sz",),
        )
        dev = np.abs(series.means["Sz"] - oracle.means["Sz"])
        se = series.std_errors["Sz"]
        ratio = np.divide(dev, se, out=np.zeros_like(dev), where=se > 0)
        bare = np.max(dev[se == 0]) if np.any(se == 0) else 0.0
        assert bare < 1e-12  # only the t = 0 point has zero standard error
        worst_transient = max(worst_transient, float(ratio.max()))

    gamma = 1.0
    worst_steady = 0.0
    for g_over_gamma in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
        m = LindbladModel(
            1, (Field("x", g_over_gamma * gamma / 2.0),),
            (Channel("decay", gamma),), "down",
        )
        cfg = eng.EnsembleConfig(
            n_traj=20_000, dt=2e-3, t_max=30.0, seed=5,
            scheme="4p", engine="dctwa", n_save=4,
        )
        series = eng.run_ensemble(m, None, cfg, ("Sz",))
        target = exact.steady_state_driven_spin(g_over_gamma * gamma / 2.0, gamma, 0.0)
        dev = abs(series.means["Sz"][-1] - target)
        worst_steady = max(worst_steady, dev / series.std_errors["Sz"][-1])

    ok = worst_transient < 3.0 and worst_steady < 3.0
    _finish(3, "single-spin exactness vs oracle", ok,
            f"transients from down/-y at 1e5 trajectories: worst dev "
            f"{worst_transient:.2f} SE < 3; steady state for 6 drive ratios: "
            f"worst dev {worst_steady:.2f} SE < 3")


# ---------------------------------------------------------------------------
# 4. analytic channel checks
# ---------------------------------------------------------------------------

def test_criterion_04_analytic_channels():
    # pure decay from spin-up against -1 + 2 exp(-gamma t); the jump engine
    # carries genuine per-trajectory randomness, so the 3 SE gate is meaningful
    gamma = 1.0
    decay_model = LindbladModel(1, (Field("x", 0.0),), (Channel("decay", gamma),), "up")
    cfg = eng.EnsembleConfig(n_traj=100_000, dt=1e-3, t_max=8.0, seed=31,
                             engine="osdtwa", n_save=17)
    series = eng.run_ensemble(decay_model, None, cfg, ("Sz",))
    target = -1.0 + 2.0 * np.exp(-gamma * series.times)
    dev = np.abs(series.means["Sz"] - target)
    se = series.std_errors["Sz"]
    decay_ratio = float(np.max(np.divide(dev, se, out=np.zeros_like(dev), where=se > 0)))

    # the angular engine integrates the same channel with a deterministic
    # polar drift (zero ensemble variance in sigma^z), so its gate is the
    # documented absolute stepper bias, not a standard-error multiple
    cfg = eng.EnsembleConfig(n_traj=2_000, dt=1e-3, t_max=8.0, seed=33,
                             scheme="4p", engine="dctwa", n_save=17)
    dctwa_series = eng.run_ensemble(decay_model, None, cfg, ("Sz",))
    dctwa_abs = float(np.max(np.abs(dctwa_series.means["Sz"] - target)))

    # pure dephasing of the +x coherence against exp(-2 kappa t)
    kappa = 0.2
    deph_model = LindbladModel(1, (), (Channel("dephasing", kappa),), "+x")
    cfg = eng.EnsembleConfig(n_traj=100_000, dt=1e-3, t_max=6.0, seed=32,
                             scheme="4p", engine="dctwa", n_save=13)
    series = eng.run_ensemble(deph_model, None, cfg, ("Sx",))
    target = np.exp(-2.0 * kappa * series.times)
    dev = np.abs(series.means["Sx"] - target)
    se = series.std_errors["Sx"]
    deph_ratio = float(np.max(np.divide(dev, se, out=np.zeros_like(dev), where=se > 0)))

    ok = decay_ratio < 3.0 and deph_ratio < 3.0 and dctwa_abs < 5e-3
    _finish(4, "analytic decay/dephasing channels", ok,
            f"decay (jump engine, 1e5 traj) worst {decay_ratio:.2f} SE < 3; "
            f"dephasing (angular engine, 1e5 traj) worst {deph_ratio:.2f} SE < 3; "
            f"angular decay stepper bias {dctwa_abs:.1e} < 5e-3 absolute")


# ---------------------------------------------------------------------------
# 5. non-interacting steady state
# ---------------------------------------------------------------------------

def test_criterion_05_driven_spin_steady_state():
    pre = preset("driven_spin_steady_state")
    cfg = eng.EnsembleConfig(n_traj=30_000, dt=0.01, t_max=400.0, seed=13,
                             scheme="4p", engine="dctwa", n_save=5)
    series = eng.run_ensemble(pre.model, None, cfg, ("Sz",))
    target = exact.steady_state_driven_spin(0.3, 0.01, 0.01)
    mean, se = series.means["Sz"][-1], series.std_errors["Sz"][-1]
    ratio = abs(mean - target) / se
    ok = ratio < 3.0
    _finish(5, "driven-spin steady state vs closed form", ok,
            f"<s_z> = {mean:+.5f} vs {target:+.5f} closed form, "
            f"dev {ratio:.2f} SE < 3 at (omega, gamma, kappa) = (0.3, 0.01, 0.01)")


# ---------------------------------------------------------------------------
# 6. deterministic equivalence of the two representations
# ---------------------------------------------------------------------------

def test_criterion_06_deterministic_equivalence():
    pre = preset("ising_all_to_all")
    model = pre.model
    pts = ps.sample_initial(["down"] * model.n_spins, "4p", 8, seed=0)
    theta, phi = pts[..., 0], pts[..., 1]
    s0 = _angles_to_cartesian(theta, phi)
    dt, n_steps = 1e-3, 10_000  # Jt = 10
    cart = eng.deterministic_trajectory(model, s0, dt, n_steps, "cartesian")
    th, ph = eng.deterministic_trajectory(model, (theta, phi), dt, n_steps, "angular")
    diff = float(np.max(np.abs(_angles_to_cartesian(th, ph) - cart)))
    ok = diff < 1e-6
    _finish(6, "noise-free angular vs Cartesian flow", ok,
            f"max Cartesian deviation {diff:.2e} < 1e-6 over Jt <= 10, "
            f"N = {model.n_spins}, 8 matched phase-space starts")


# ---------------------------------------------------------------------------
# 7. medium-size Rydberg chain against the oracle
# ---------------------------------------------------------------------------

def test_criterion_07_rydberg_chain_steady_state(chain6):
    ring, oracle = chain6["ring"], chain6["oracle"]
    details = []
    ok = True
    for name in ("Sx", "Sy", "Sz"):
        dev = abs(ring.means[name][-1] - oracle.means[name][-1])
        tol = max(3.0 * ring.std_errors[name][-1], 0.02)
        ok = ok and dev <= tol
        details.append(f"{name} dev {dev:.4f} <= {tol:.4f}")
    for name in ("rr_corr_nn", "rr_corr_nnn"):
        dev = abs(ring.means[name][-1] - oracle.means[name][-1])
        ok = ok and dev <= 0.02
        details.append(f"{name} dev {dev:.4f} <= 0.02")
    _finish(7, "N=6 chain steady state vs oracle", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# 8. sampling-scheme separation
# ---------------------------------------------------------------------------

def test_criterion_08_sampling_scheme_separation():
    # Trajectory count sets the resolving power of the 3-combined-SE test.
    # The 2p overshoot on S_x is ~0.18 absolute while the residual 4p/ring
    # difference (higher initial moments, N = 6) is ~0.02, so 2000
    # trajectories put 3 SE cleanly between the two.
    pre = preset("rydberg_chain_fig2", n_spins=6)
    curves = {}
    for scheme in ("2p", "4p", "ring"):
        cfg = eng.EnsembleConfig(n_traj=2_000, dt=5e-3, t_max=30.0, seed=22,
                                 scheme=scheme, engine="dctwa", n_save=21)
        curves[scheme] = eng.run_ensemble(pre.model, None, cfg, ("Sx", "Sy", "Sz"))

    def combined_ratio(a, b, name):
        d = np.abs(curves[a].means[name] - curves[b].means[name])
        se = np.sqrt(curves[a].std_errors[name] ** 2
                     + curves[b].std_errors[name] ** 2)
        return np.divide(d, se, out=np.zeros_like(d), where=se > 0)

    agree = max(float(combined_ratio("4p", "ring", n).max())
                for n in ("Sx", "Sy", "Sz"))

    times = curves["4p"].times
    early = times <= 10.0
    sep = min(float(combined_ratio("2p", other, "Sx")[early].max())
              for other in ("4p", "ring"))

    ok = agree < 3.0 and sep > 3.0
    _finish(8, "4p/ring coincide, 2p separates early", ok,
            f"4p vs ring worst {agree:.2f} combined SE < 3 at all times; "
            f"2p vs both S_x reaches {sep:.1f} combined SE > 3 early (overshoot)")


# ---------------------------------------------------------------------------
# 9. mean-field overestimates coherence
# ---------------------------------------------------------------------------

def test_criterion_09_mean_field_failure(chain6):
    exact_sz = chain6["oracle"].means["Sz"][-1]
    mf_err = abs(chain6["mean_field"].means["Sz"][-1] - exact_sz)
    dctwa_err = abs(chain6["ring"].means["Sz"][-1] - exact_sz)
    ok = mf_err > dctwa_err
    _finish(9, "mean-field steady error exceeds DCTWA error", ok,
            f"|mean-field - exact| = {mf_err:.4f} > |DCTWA - exact| = {dctwa_err:.4f}")


# ---------------------------------------------------------------------------
# 10. negative jump-rate pathology of the jump scheme
# ---------------------------------------------------------------------------

def test_criterion_10_jump_rate_clamp():
    g, gamma, dt = 4.0, 2.0, 1e-3
    state = np.array([1.0, -1.0, -1.0, 1.0])  # S^y eigenvalue -1, S^z = -1
    dp0 = eng.osdtwa_jump_probability(state, gamma)
    stepped = state + dt * eng._osdtwa_derivative(state, g, gamma)
    dp1 = eng.osdtwa_jump_probability(stepped, gamma)
    expected = -0.5 * g * gamma * dt
    ok = dp0 == 0.0 and abs(dp1 - expected) <= abs(expected) * 1e-12 + (g * gamma * dt) ** 2
    _finish(10, "jump rate 0 then -g*gamma*dt/2 before clamp", ok,
            f"dp(0) = {dp0}, dp(dt) = {dp1:.6e} vs -g*gamma*dt/2 = {expected:.6e}")


# ---------------------------------------------------------------------------
# 11. full-scale reproduction (opt-in)
# ---------------------------------------------------------------------------

@pytest.mark.skipif(
    not os.environ.get("RUN_FULL_SCALE"),
    reason="multi-hour full-scale run; set RUN_FULL_SCALE=1 to enable",
)
def test_criterion_11_full_scale_chain():
    pre = preset("rydberg_chain_fig2")
    cfg = eng.EnsembleConfig(
        n_traj=pre.defaults["n_traj"], dt=pre.defaults["dt"],
        t_max=pre.defaults["t_max"], seed=21, scheme="ring",
        engine="dctwa", n_save=21,
    )
    series = eng.run_ensemble(pre.model, None, cfg, ("Sx", "Sy", "Sz"))
    oracle = exact.exact_observable_series(pre.model, series.times, ("Sx", "Sy", "Sz"))
    details = []
    ok = True
    for name in ("Sx", "Sy", "Sz"):
        dev = abs(series.means[name][-1] - oracle.means[name][-1])
        tol = max(3.0 * series.std_errors[name][-1], 0.02)
        ok = ok and dev <= tol
        details.append(f"{name} dev {dev:.4f} <= {tol:.4f}")
    _finish(11, "N=10 full-scale steady state vs oracle", ok, "; ".join(details))
