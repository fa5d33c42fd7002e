"""Trajectory engines: mean-field, Cartesian discrete-sampling dynamics,
angular-coordinate stochastic dynamics, and the quantum-jump variant.

All engines consume the same LindbladModel and report the same named
observables (see ``observables``), so any pair can be compared point by
point against each other and against the dense master-equation oracle.

Reproducibility contract: trajectory ``i`` owns the counter-based stream
Philox(key=[seed, i]) and consumes it in a fixed order (first the initial
sampling uniforms of shape (n_spins, 3), then per-step noise row by row).
Trajectories are processed in fixed-size blocks and block partial sums are
reduced in index order, so results are bit-identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import SingularCoordinate, UnsupportedChannel, UnsupportedTerm
from .models import (
    Channel,
    Field,
    LindbladModel,
    RydbergCoupling,
    ZZCoupling,
    initial_bloch_vectors,
)
from .observables import (
    EnsembleAccumulator,
    ObservableSeries,
    assemble_series,
    evaluate_base,
    parse_observables,
)
from .phasespace import (
    SQRT3,
    angles_from_uniforms,
    canonical_scheme,
    cartesian_from_angles,
)

# reflection band keeping theta away from the coordinate poles
EPS_THETA = 1e-6

# sizing heuristics for the block loops (elements, not bytes)
_STATE_ELEMENT_TARGET = 49152
_NOISE_ELEMENT_BUDGET = 24_000_000

ENGINES = ("mean_field", "dtwa", "dctwa", "osdtwa")

DEFAULT_OBSERVABLES = ("Sx", "Sy", "Sz")


@dataclass(frozen=True)
class EnsembleConfig:
    """Run settings shared by all trajectory engines."""

    n_traj: int
    dt: float
    t_max: float
    seed: int = 0
    scheme: str = "4p"
    engine: str = "dctwa"
    n_save: int = 61
    threads: int = 1

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValueError("n_traj must be at least 1")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_max < 0:
            raise ValueError("t_max must be non-negative")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def n_steps(self) -> int:
        return max(0, int(round(self.t_max / self.dt)))


def save_step_indices(n_steps: int, n_save: int) -> np.ndarray:
    """Evenly spaced step indices (including 0 and the final step)."""
    n_save = max(2, min(n_save, n_steps + 1)) if n_steps > 0 else 1
    return np.unique(np.round(np.linspace(0, n_steps, n_save)).astype(int))


# ---------------------------------------------------------------------------
# drift construction
# ---------------------------------------------------------------------------

class _DriftContext:
    """Precomputed pieces of the effective-field drift for one model.

    The classical Hamiltonian h(s) = grad_s H_cl splits into a constant
    per-site field plus a part linear in the s^z of the other spins:
    h_z = s_z @ linear + offset (couplings enter only through s^z).
    """

    def __init__(self, model: LindbladModel):
        n = model.n_spins
        self.n_spins = n
        self.const = np.zeros((n, 3))
        self.linear = None
        offset = np.zeros(n)
        for term in model.terms:
            if isinstance(term, Field):
                axis = {"x": 0, "y": 1, "z": 2}[term.axis]
                for site in model.term_sites(term):
                    self.const[site, axis] += term.strength
            elif isinstance(term, ZZCoupling):
                self._add_linear(term.matrix / 2.0)
            elif isinstance(term, RydbergCoupling):
                v = term.matrix(n)
                self._add_linear(v / 4.0)
                offset += v.sum(axis=1) / 4.0
            else:
                raise UnsupportedTerm(
                    f"term {type(term).__name__} has no trajectory drift"
                )
        self.const[:, 2] += offset
        # per-site channel rates
        self.kappa = np.zeros(n)
        self.gamma = np.zeros(n)
        self.pump = np.zeros(n)
        for ch in model.channels:
            vec = {"dephasing": self.kappa, "decay": self.gamma,
                   "pump": self.pump}[ch.kind]
            for site in model.channel_sites(ch):
                vec[site] += ch.rate

    def _add_linear(self, mat):
        self.linear = mat if self.linear is None else self.linear + mat

    def field(self, s: np.ndarray) -> np.ndarray:
        """h(s) for s of shape (..., n, 3)."""
        h = np.broadcast_to(self.const, s.shape).copy()
        if self.linear is not None:
            h[..., 2] += s[..., 2] @ self.linear.T
        return h

    @property
    def has_decay_or_pump(self) -> bool:
        return bool(np.any(self.gamma) or np.any(self.pump))

    @property
    def has_noise(self) -> bool:
        return bool(np.any(self.kappa) or self.has_decay_or_pump)


def effective_field(model: LindbladModel, s: np.ndarray) -> np.ndarray:
    """Classical effective field h_n = grad_{s_n} H_cl, shape like s."""
    return _DriftContext(model).field(np.asarray(s, dtype=float))


def dtwa_drift(state: np.ndarray, model: LindbladModel) -> np.ndarray:
    """Cartesian Hamiltonian drift ds/dt = 2 h(s) x s for (..., n, 3) states.

    Raises:
        UnsupportedTerm: for Hamiltonian terms without a classical drift.
    """
    s = np.asarray(state, dtype=float)
    return 2.0 * np.cross(effective_field(model, s), s)


def _angular_drift_parts(ctx: _DriftContext, theta, phi):
    """Shared angular drift/diffusion evaluation; returns (A_theta, A_phi, B2).

    Works directly with the per-site field components (couplings enter only
    through s^z = -sqrt(3) cos(theta) of the other spins), avoiding the full
    Cartesian round trip in the step loop.
    """
    st = np.sin(theta)
    ct = np.cos(theta)
    sp = np.sin(phi)
    cp = np.cos(phi)
    csc = 1.0 / st
    cot = ct * csc
    hx = ctx.const[:, 0]
    hy = ctx.const[:, 1]
    hz = ctx.const[:, 2]
    if ctx.linear is not None:
        hz = hz + (-SQRT3 * ct) @ ctx.linear.T
    a_theta = -2.0 * (hx * sp + hy * cp)
    a_phi = -2.0 * cot * (hx * cp - hy * sp) - 2.0 * hz
    b2 = 4.0 * ctx.kappa + np.zeros_like(theta)
    if ctx.has_decay_or_pump:
        cot_csc = cot * csc / SQRT3
        a_theta = a_theta + ctx.gamma * (cot - csc / SQRT3)
        a_theta = a_theta + ctx.pump * (cot + csc / SQRT3)
        spread = 1.0 + 2.0 * cot ** 2
        b2 = b2 + ctx.gamma * (spread - 2.0 * cot_csc)
        b2 = b2 + ctx.pump * (spread + 2.0 * cot_csc)
    return a_theta, a_phi, b2


def dctwa_drift_diffusion(state, model: LindbladModel):
    """Angular drift and diffusion for a state (theta, phi) of shape (..., n).

    Returns (A_theta, A_phi, B_phi) such that
    d theta = A_theta dt,  d phi = A_phi dt + B_phi dW.

    Raises:
        SingularCoordinate: if theta lies outside the clamped band.
        UnsupportedTerm: for Hamiltonian terms without a classical drift.
    """
    theta, phi = (np.asarray(x, dtype=float) for x in state)
    if np.any(theta < 0.5 * EPS_THETA) or np.any(theta > np.pi - 0.5 * EPS_THETA):
        raise SingularCoordinate(
            "theta escaped the clamp band [eps, pi - eps]; clamping failed"
        )
    ctx = _DriftContext(model)
    a_theta, a_phi, b2 = _angular_drift_parts(ctx, theta, phi)
    return a_theta, a_phi, np.sqrt(b2)


def _reflect_theta(theta: np.ndarray) -> np.ndarray:
    """Fold theta back into [EPS_THETA, pi - EPS_THETA] by reflection."""
    t = np.mod(theta, 2.0 * np.pi)
    t = np.where(t > np.pi, 2.0 * np.pi - t, t)
    t = np.where(t < EPS_THETA, 2.0 * EPS_THETA - t, t)
    hi = np.pi - EPS_THETA
    t = np.where(t > hi, 2.0 * hi - t, t)
    return np.clip(t, EPS_THETA, hi)


def step_euler_maruyama(state, drift, diffusion, dt: float, rng):
    """One Ito Euler-Maruyama step of the angular SDE.

    state = (theta, phi); drift = (A_theta, A_phi); diffusion = B_phi.
    After the update theta is reflected into its band and phi wrapped mod 2 pi.
    """
    theta, phi = state
    a_theta, a_phi = drift
    noise = rng.standard_normal(np.shape(phi))
    theta = _reflect_theta(theta + a_theta * dt)
    phi = np.mod(phi + a_phi * dt + diffusion * math.sqrt(dt) * noise, 2.0 * np.pi)
    return theta, phi


def cartesian_dephasing_step(state: np.ndarray, kappa, dt: float, rng) -> np.ndarray:
    """Ito Euler-Maruyama dephasing step in Cartesian components:

        ds_x = -2 kappa s_x dt - 2 s_y dW,   ds_y = -2 kappa s_y dt + 2 s_x dW,
        ds_z = 0,   with  dW = sqrt(kappa dt) N(0, 1)  per spin,

    whose ensemble mean gives the coherence decay e^{-2 kappa t} while
    s_x^2 + s_y^2 is conserved in distribution (exactly, in continuous time).
    """
    s = np.array(state, dtype=float, copy=True)
    kappa = np.asarray(kappa, dtype=float)
    dw = np.sqrt(kappa * dt) * rng.standard_normal(s.shape[:-1])
    sx, sy = s[..., 0].copy(), s[..., 1].copy()
    s[..., 0] = sx - 2.0 * kappa * dt * sx - 2.0 * sy * dw
    s[..., 1] = sy - 2.0 * kappa * dt * sy + 2.0 * sx * dw
    return s


# ---------------------------------------------------------------------------
# quantum-jump engine (single-spin decay + transverse drive)
# ---------------------------------------------------------------------------

def osdtwa_jump_probability(state: np.ndarray, gamma: float) -> np.ndarray:
    """Jump rate delta_p = (gamma/2)(S^0 + S^z) of quadruple states (..., 4)."""
    s = np.asarray(state, dtype=float)
    return 0.5 * gamma * (s[..., 3] + s[..., 2])


def _osdtwa_derivative(s: np.ndarray, g: float, gamma: float) -> np.ndarray:
    d = np.empty_like(s)
    relax = 0.5 * gamma * (s[..., 3] + s[..., 2])
    d[..., 0] = -0.5 * gamma * s[..., 0]
    d[..., 1] = -0.5 * gamma * s[..., 1] - g * s[..., 2]
    d[..., 2] = -relax + g * s[..., 1]
    d[..., 3] = -relax
    return d


def _osdtwa_update(state, g, gamma, dt, uniforms):
    """Euler step, then jump with probability max(0, delta_p) dt evaluated on
    the post-step state, else renormalize by S^0."""
    s = state + dt * _osdtwa_derivative(state, g, gamma)
    dp = osdtwa_jump_probability(s, gamma)
    jump = uniforms < np.clip(dp, 0.0, None) * dt
    s0 = s[..., 3]
    out = np.empty_like(s)
    out[..., 0] = np.where(jump, 0.0, s[..., 0] / s0)
    out[..., 1] = np.where(jump, 0.0, s[..., 1] / s0)
    out[..., 2] = np.where(jump, -1.0, s[..., 2] / s0)
    out[..., 3] = 1.0
    return out


def osdtwa_step(state: np.ndarray, g: float, gamma: float, dt: float, rng) -> np.ndarray:
    """One step of the jump scheme for quadruples (S^x, S^y, S^z, S^0).

    Deterministic Euler update of the damped-precession equations, then with
    probability max(0, delta_p) dt a jump to the spin-down state
    (0, 0, -1, 1); surviving trajectories are renormalized to S^0 = 1.
    """
    state = np.asarray(state, dtype=float)
    return _osdtwa_update(state, g, gamma, dt, rng.random(state.shape[:-1]))


def _osdtwa_rates(model: LindbladModel):
    """Extract (g, gamma) from a model the jump engine supports.

    Raises:
        UnsupportedTerm: for couplings or non-x fields.
        UnsupportedChannel: for channels other than uniform decay.
    """
    g = 0.0
    for term in model.terms:
        if not isinstance(term, Field) or term.axis != "x" or term.sites is not None:
            raise UnsupportedTerm(
                "the jump engine integrates only a uniform transverse field"
            )
        g += 2.0 * term.strength  # H = (g/2) sigma^x
    gamma = 0.0
    for ch in model.channels:
        if ch.kind != "decay" or ch.sites is not None:
            raise UnsupportedChannel(
                f"the jump engine supports uniform decay only, got {ch.kind}"
            )
        gamma += ch.rate
    return g, gamma


# ---------------------------------------------------------------------------
# mean field
# ---------------------------------------------------------------------------

def _mean_field_derivative(ctx: _DriftContext, s: np.ndarray) -> np.ndarray:
    d = 2.0 * np.cross(ctx.field(s), s)
    transverse = 0.5 * ctx.gamma + 0.5 * ctx.pump + 2.0 * ctx.kappa
    d[..., 0] -= transverse * s[..., 0]
    d[..., 1] -= transverse * s[..., 1]
    d[..., 2] += -ctx.gamma * (1.0 + s[..., 2]) + ctx.pump * (1.0 - s[..., 2])
    return d


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def mean_field_run(model: LindbladModel, config: EnsembleConfig,
                   observables=DEFAULT_OBSERVABLES) -> ObservableSeries:
    """Single deterministic trajectory of the factorized equations of motion,
    started from the exact expectation values of the initial state.

    Dissipation enters as the deterministic damping of the single-site
    Lindblad terms (no noise, no sampling); standard errors are zero.
    """
    ctx = _DriftContext(model)
    parsed = parse_observables(observables, model.n_spins)
    base_keys = sorted({k for p in parsed for k in p.base_keys})
    save_idx = save_step_indices(config.n_steps, config.n_save)
    times = save_idx * config.dt

    s = initial_bloch_vectors(model).copy()
    acc = EnsembleAccumulator(base_keys, len(save_idx))
    sums = {k: np.zeros(len(save_idx)) for k in base_keys}
    sumsqs = {k: np.zeros(len(save_idx)) for k in base_keys}
    pos = 0
    for step in range(config.n_steps + 1):
        if step == save_idx[pos]:
            for key in base_keys:
                val = evaluate_base(key, s[None])
                sums[key][pos] += val[0]
                sumsqs[key][pos] += val[0] ** 2
            pos += 1
            if pos == len(save_idx):
                break
        s = _rk4_step(lambda y: _mean_field_derivative(ctx, y), s, config.dt)
    acc.add_block(sums, sumsqs, 1)
    return assemble_series(parsed, acc, times, "mean_field")


# ---------------------------------------------------------------------------
# ensemble machinery
# ---------------------------------------------------------------------------

def _trajectory_generators(seed: int, start: int, stop: int):
    return [
        np.random.Generator(np.random.Philox(key=np.array([seed, i], dtype=np.uint64)))
        for i in range(start, stop)
    ]


def _initial_angles(gens, bloch: np.ndarray, scheme: str):
    """Sample per-trajectory initial angles; consumes (n, 3) uniforms each."""
    n = bloch.shape[0]
    u = np.stack([g.random((n, 3)) for g in gens])  # (B, n, 3)
    theta = np.empty((len(gens), n))
    phi = np.empty((len(gens), n))
    for j in range(n):
        theta[:, j], phi[:, j] = angles_from_uniforms(u[:, j, :], bloch[j], scheme)
    return theta, phi


def _noise_chunks(gens, n_steps: int, n: int, kind: str):
    """Yield (K, B, n) noise arrays; each trajectory stream is consumed in
    step order so the chunk size never affects the result."""
    chunk = max(1, min(n_steps, _NOISE_ELEMENT_BUDGET // max(1, len(gens) * n)))
    done = 0
    while done < n_steps:
        k = min(chunk, n_steps - done)
        if kind == "normal":
            block = np.stack([g.standard_normal((k, n)) for g in gens], axis=1)
        else:
            block = np.stack([g.random((k, n)) for g in gens], axis=1)
        yield block
        done += k


class _SaveRecorder:
    def __init__(self, base_keys, save_idx):
        self.base_keys = base_keys
        self.save_idx = save_idx
        self.sums = {k: np.zeros(len(save_idx)) for k in base_keys}
        self.sumsqs = {k: np.zeros(len(save_idx)) for k in base_keys}
        self.pos = 0

    def maybe_record(self, step: int, cartesian) -> bool:
        """Record if `step` is a save point; cartesian is lazy (callable)."""
        if self.pos >= len(self.save_idx) or step != self.save_idx[self.pos]:
            return False
        s = cartesian()
        for key in self.base_keys:
            vals = evaluate_base(key, s)
            self.sums[key][self.pos] += vals.sum()
            self.sumsqs[key][self.pos] += (vals * vals).sum()
        self.pos += 1
        return True


def _run_block_dctwa(model, ctx, bloch, config, base_keys, save_idx, start, stop):
    gens = _trajectory_generators(config.seed, start, stop)
    theta, phi = _initial_angles(gens, bloch, config.scheme)
    n = model.n_spins
    rec = _SaveRecorder(base_keys, save_idx)
    rec.maybe_record(0, lambda: cartesian_from_angles(theta, phi))
    sqdt = math.sqrt(config.dt)
    dt = config.dt
    two_pi = 2.0 * np.pi
    step = 0
    for noise in _noise_chunks(gens, config.n_steps, n, "normal"):
        for k in range(noise.shape[0]):
            a_theta, a_phi, b2 = _angular_drift_parts(ctx, theta, phi)
            theta = _reflect_theta(theta + a_theta * dt)
            phi = np.mod(phi + a_phi * dt + np.sqrt(b2) * sqdt * noise[k], two_pi)
            step += 1
            rec.maybe_record(step, lambda: cartesian_from_angles(theta, phi))
    return rec.sums, rec.sumsqs, stop - start


def _run_block_dtwa(model, ctx, bloch, config, base_keys, save_idx, start, stop):
    gens = _trajectory_generators(config.seed, start, stop)
    theta, phi = _initial_angles(gens, bloch, config.scheme)
    s = cartesian_from_angles(theta, phi)
    n = model.n_spins
    has_dephasing = bool(np.any(ctx.kappa))
    rec = _SaveRecorder(base_keys, save_idx)
    rec.maybe_record(0, lambda: s)
    dt = config.dt

    def hamiltonian(y):
        return 2.0 * np.cross(ctx.field(y), y)

    def do_step(s, dw):
        s = _rk4_step(hamiltonian, s, dt)
        if dw is not None:
            sx, sy = s[..., 0].copy(), s[..., 1].copy()
            s[..., 0] = sx - 2.0 * ctx.kappa * dt * sx - 2.0 * sy * dw
            s[..., 1] = sy - 2.0 * ctx.kappa * dt * sy + 2.0 * sx * dw
        return s

    step = 0
    if has_dephasing:
        scale = np.sqrt(ctx.kappa * dt)
        for noise in _noise_chunks(gens, config.n_steps, n, "normal"):
            for k in range(noise.shape[0]):
                s = do_step(s, scale * noise[k])
                step += 1
                rec.maybe_record(step, lambda: s)
    else:
        for step in range(1, config.n_steps + 1):
            s = do_step(s, None)
            rec.maybe_record(step, lambda: s)
    return rec.sums, rec.sumsqs, stop - start


def _run_block_osdtwa(model, rates, bloch, config, base_keys, save_idx, start, stop):
    g, gamma = rates
    gens = _trajectory_generators(config.seed, start, stop)
    theta, phi = _initial_angles(gens, bloch, config.scheme)
    n = model.n_spins
    state = np.empty((len(gens), n, 4))
    state[..., :3] = cartesian_from_angles(theta, phi)
    state[..., 3] = 1.0
    rec = _SaveRecorder(base_keys, save_idx)
    rec.maybe_record(0, lambda: state[..., :3])
    step = 0
    for uniforms in _noise_chunks(gens, config.n_steps, n, "uniform"):
        for k in range(uniforms.shape[0]):
            state = _osdtwa_update(state, g, gamma, config.dt, uniforms[k])
            step += 1
            rec.maybe_record(step, lambda: state[..., :3])
    return rec.sums, rec.sumsqs, stop - start


def _check_engine_channels(model: LindbladModel, engine: str):
    for ch in model.channels:
        if engine == "dtwa" and ch.kind in ("decay", "pump"):
            raise UnsupportedChannel(
                f"{ch.kind} has no Cartesian diffusion (the diffusion matrix "
                "is not positive semidefinite); use the angular engine"
            )


def run_ensemble(model: LindbladModel, initial, config: EnsembleConfig,
                 observables=DEFAULT_OBSERVABLES) -> ObservableSeries:
    """Integrate an ensemble and return observable means and standard errors.

    Args:
        model: the shared model record.
        initial: overriding initial-state spec, or None for the model's own.
        config: ensemble settings; config.engine picks the integrator.
        observables: names per the observables module.

    Raises:
        UnsupportedTerm / UnsupportedChannel: for model pieces outside the
            selected engine's domain.
    """
    engine = config.engine
    if engine == "mean_field":
        m = model if initial is None else replace(model, initial=initial)
        return mean_field_run(m, config, observables)
    if engine not in ("dctwa", "dtwa", "osdtwa"):
        raise ValueError(f"unknown engine {engine!r}")
    config = replace(config, scheme=canonical_scheme(config.scheme))

    work_model = model if initial is None else replace(model, initial=initial)
    bloch = initial_bloch_vectors(work_model)
    _check_engine_channels(model, engine)
    parsed = parse_observables(observables, model.n_spins)
    base_keys = sorted({k for p in parsed for k in p.base_keys})
    save_idx = save_step_indices(config.n_steps, config.n_save)
    times = save_idx * config.dt

    if engine == "osdtwa":
        rates = _osdtwa_rates(model)

        def runner(a, b):
            return _run_block_osdtwa(
                model, rates, bloch, config, base_keys, save_idx, a, b)
    else:
        ctx = _DriftContext(model)
        block = _run_block_dctwa if engine == "dctwa" else _run_block_dtwa

        def runner(a, b):
            return block(model, ctx, bloch, config, base_keys, save_idx, a, b)

    block_size = max(1, min(config.n_traj,
                            _STATE_ELEMENT_TARGET // model.n_spins))
    bounds = [(a, min(a + block_size, config.n_traj))
              for a in range(0, config.n_traj, block_size)]
    acc = EnsembleAccumulator(base_keys, len(save_idx))
    if config.threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(lambda ab: runner(*ab), bounds))
    else:
        results = [runner(a, b) for a, b in bounds]
    for sums, sumsqs, count in results:
        acc.add_block(sums, sumsqs, count)
    return assemble_series(parsed, acc, times, engine)


# ---------------------------------------------------------------------------
# deterministic matched-trajectory helper
# ---------------------------------------------------------------------------

def deterministic_trajectory(model: LindbladModel, start, dt: float,
                             n_steps: int, representation: str = "cartesian"):
    """Noise-free Runge-Kutta path of a dissipation-free model.

    start is (..., n, 3) Cartesian for representation='cartesian', or a
    (theta, phi) pair of (..., n) arrays for 'angular'.  Returns the path
    with a leading time axis of length n_steps + 1 (for 'angular', a pair of
    such arrays).  Used to check that the angular flow mapped to Cartesian
    components reproduces the Cartesian flow from the matched start.

    Raises:
        UnsupportedChannel: if the model has dissipation channels.
    """
    if model.channels:
        raise UnsupportedChannel(
            "matched deterministic paths are defined for closed models only"
        )
    ctx = _DriftContext(model)
    if representation == "cartesian":
        s = np.asarray(start, dtype=float)
        path = np.empty((n_steps + 1,) + s.shape)
        path[0] = s
        f = lambda y: 2.0 * np.cross(ctx.field(y), y)
        for k in range(n_steps):
            s = _rk4_step(f, s, dt)
            path[k + 1] = s
        return path
    if representation != "angular":
        raise ValueError("representation must be 'cartesian' or 'angular'")
    theta, phi = (np.asarray(x, dtype=float) for x in start)
    th_path = np.empty((n_steps + 1,) + theta.shape)
    ph_path = np.empty((n_steps + 1,) + phi.shape)
    th_path[0], ph_path[0] = theta, phi

    def f(y):
        a_theta, a_phi, _ = _angular_drift_parts(ctx, y[0], y[1])
        return np.stack([a_theta, a_phi])

    y = np.stack([theta, phi])
    for k in range(n_steps):
        y = _rk4_step(f, y, dt)
        th_path[k + 1], ph_path[k + 1] = y[0], y[1]
    return th_path, ph_path
