"""Model definitions shared by the exact solver and the semiclassical engines.

A LindbladModel is a plain value object: a list of Hamiltonian terms plus a
list of dissipation channels acting on n spins, together with the initial
product state.  Both the dense master-equation oracle and every trajectory
engine consume the same record, and a checksum over its canonical
serialization is embedded in all output files so that data can always be
traced back to the generating model.

Sign conventions (fixed here once, used everywhere):

* ``Field(axis, strength)`` contributes  strength * sigma^axis  per site.
* ``ZZCoupling(J)`` contributes  +1/2 sum_{m<n} J_mn sigma^z_m sigma^z_n,
  the convention under which the Cartesian drift of an Ising pair is
  ds_1/dt = J s_2^z (-s_1^y, +s_1^x, 0).  (The standalone transverse-Ising
  helper in the exact module uses the opposite overall sign; see there.)
* ``RydbergCoupling(j, alpha_exp)`` contributes
  sum_{m<n} V_mn P_m P_n  with  P = (1 + sigma^z)/2  and
  V_mn = j / d(m,n)^alpha_exp, d the (min-image, if periodic) chain distance.
* ``Channel`` rates follow drho/dt = -i[H,rho] + sum (L rho L+ - {L+L, rho}/2)
  with L = sqrt(rate) * (sigma^z | sigma^- | sigma^+).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import UnknownPreset

CHANNEL_KINDS = ("dephasing", "decay", "pump")
AXES = ("x", "y", "z")


@dataclass(frozen=True)
class Field:
    """Single-spin term  strength * sigma^axis  on each listed site."""

    axis: str
    strength: float
    sites: tuple | None = None  # None = every site

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}")


@dataclass(frozen=True)
class ZZCoupling:
    """+1/2 sum_{m<n} J_mn sigma^z_m sigma^z_n with a symmetric matrix J."""

    couplings: tuple  # nested tuple (n, n), symmetric, zero diagonal

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.couplings, dtype=float)


def zz_all_to_all(n_spins: int, j: float) -> ZZCoupling:
    mat = np.full((n_spins, n_spins), float(j))
    np.fill_diagonal(mat, 0.0)
    return ZZCoupling(tuple(map(tuple, mat)))


@dataclass(frozen=True)
class RydbergCoupling:
    """Power-law projector-projector coupling on a 1D chain."""

    strength: float
    alpha_exp: float = 6.0
    boundary: str = "open"

    def __post_init__(self):
        if self.boundary not in ("open", "periodic"):
            raise ValueError("boundary must be 'open' or 'periodic'")

    def matrix(self, n_spins: int) -> np.ndarray:
        return power_law_couplings(n_spins, self.strength, self.alpha_exp, self.boundary)


def chain_distance(m: int, n: int, n_spins: int, boundary: str) -> int:
    d = abs(m - n)
    if boundary == "periodic":
        d = min(d, n_spins - d)
    return d


def power_law_couplings(n_spins: int, j: float, alpha_exp: float, boundary: str) -> np.ndarray:
    """V_mn = j / d(m, n)^alpha_exp with zero diagonal."""
    v = np.zeros((n_spins, n_spins))
    for m in range(n_spins):
        for n in range(m + 1, n_spins):
            d = chain_distance(m, n, n_spins, boundary)
            v[m, n] = v[n, m] = j / d ** alpha_exp
    return v


@dataclass(frozen=True)
class Channel:
    """Dissipation channel of a given kind and rate on the listed sites."""

    kind: str
    rate: float
    sites: tuple | None = None

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ValueError(f"kind must be one of {CHANNEL_KINDS}")
        if self.rate < 0:
            raise ValueError("rate must be non-negative")


@dataclass(frozen=True)
class LindbladModel:
    n_spins: int
    terms: tuple = ()
    channels: tuple = ()
    initial: object = "down"  # bloch spec, or a sequence of per-site specs
    label: str = ""

    def __post_init__(self):
        if self.n_spins < 1:
            raise ValueError("need at least one spin")
        for term in self.terms:
            sites = getattr(term, "sites", None)
            if sites is not None and any(not 0 <= s < self.n_spins for s in sites):
                raise ValueError(f"term {term} references a site outside the chain")
            if isinstance(term, ZZCoupling) and term.matrix.shape != (self.n_spins, self.n_spins):
                raise ValueError("coupling matrix shape does not match n_spins")
        for ch in self.channels:
            if ch.sites is not None and any(not 0 <= s < self.n_spins for s in ch.sites):
                raise ValueError(f"channel {ch} references a site outside the chain")

    def channel_sites(self, channel: Channel) -> tuple:
        return tuple(range(self.n_spins)) if channel.sites is None else channel.sites

    def term_sites(self, term) -> tuple:
        sites = getattr(term, "sites", None)
        return tuple(range(self.n_spins)) if sites is None else sites


def initial_bloch_vectors(model: LindbladModel) -> np.ndarray:
    """Per-site Bloch vectors of the initial product state, shape (n, 3).

    The model's ``initial`` may be a single spec (named state, Bloch 3-vector,
    or 2x2 density matrix) applied to every site, or a sequence of exactly
    n_spins per-site specs.
    """
    from .phasespace import bloch_from_spec

    init = model.initial
    if not isinstance(init, str):
        try:
            arr = np.asarray(init, dtype=complex)
        except (TypeError, ValueError):
            arr = None
        if arr is not None and arr.shape == (model.n_spins, 3):
            return np.array([bloch_from_spec(row) for row in arr])
        if isinstance(init, (list, tuple)) and arr is None:
            if len(init) != model.n_spins:
                raise ValueError(
                    f"per-site initial spec has length {len(init)}, "
                    f"expected {model.n_spins}"
                )
            return np.array([bloch_from_spec(s) for s in init])
    single = bloch_from_spec(init)
    return np.tile(single, (model.n_spins, 1))


# ---------------------------------------------------------------------------
# serialization / checksum
# ---------------------------------------------------------------------------

def _term_dict(term) -> dict:
    if isinstance(term, Field):
        return {"type": "field", "axis": term.axis, "strength": term.strength,
                "sites": list(term.sites) if term.sites is not None else None}
    if isinstance(term, ZZCoupling):
        return {"type": "zz", "couplings": [list(row) for row in term.couplings]}
    if isinstance(term, RydbergCoupling):
        return {"type": "rydberg", "strength": term.strength,
                "alpha_exp": term.alpha_exp, "boundary": term.boundary}
    raise ValueError(f"unknown term type {type(term).__name__}")


def _initial_dict(initial):
    if isinstance(initial, str):
        return initial
    if isinstance(initial, (list, tuple)):
        return [_initial_dict(s) for s in initial]
    return np.asarray(initial).tolist()


def model_to_dict(model: LindbladModel) -> dict:
    return {
        "n_spins": model.n_spins,
        "label": model.label,
        "initial": _initial_dict(model.initial),
        "terms": [_term_dict(t) for t in model.terms],
        "channels": [
            {"kind": c.kind, "rate": c.rate,
             "sites": list(c.sites) if c.sites is not None else None}
            for c in model.channels
        ],
    }


def model_checksum(model: LindbladModel) -> str:
    payload = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelPreset:
    """A named, fully populated experiment: model plus default run settings."""

    name: str
    model: LindbladModel
    defaults: dict = field(default_factory=dict)


def _rydberg_model(n_spins, omega, j, alpha_exp, gamma, kappa, boundary, initial, label):
    terms = [Field("x", omega)] if omega else []
    if j:
        terms.append(RydbergCoupling(j, alpha_exp, boundary))
    channels = []
    if gamma:
        channels.append(Channel("decay", gamma))
    if kappa:
        channels.append(Channel("dephasing", kappa))
    return LindbladModel(n_spins, tuple(terms), tuple(channels), initial, label)


def preset(name: str, **overrides) -> ModelPreset:
    """Named experiment presets.

    Overrides replace model parameters (n_spins, omega, gamma, ...) or run
    defaults (n_traj, dt, t_max, scheme, ...) before the preset is built, so
    reduced-size variants reuse the same construction path.

    Raises:
        UnknownPreset: for names not in the preset table.
    """
    builders = {
        "rydberg_chain_fig2": _preset_rydberg_chain,
        "rydberg_corr_fig4": _preset_rydberg_corr,
        "sampling_fig3": _preset_sampling,
        "single_spin_figD6": _preset_single_spin,
        "ising_all_to_all": _preset_ising,
        "driven_spin_steady_state": _preset_driven_spin,
    }
    if name not in builders:
        raise UnknownPreset(
            f"unknown preset {name!r}; available: {sorted(builders)}"
        )
    return builders[name](name, overrides)


def _take(overrides: dict, defaults: dict) -> dict:
    params = dict(defaults)
    unknown = set(overrides) - set(params)
    if unknown:
        raise ValueError(f"unknown preset parameters {sorted(unknown)}")
    params.update(overrides)
    return params


_RYDBERG_PARAMS = dict(
    n_spins=10, omega=0.3, j=1.0, alpha_exp=6.0, gamma=0.01, kappa=0.01,
    boundary="periodic", initial="down",
    n_traj=92000, dt=1e-3, t_max=200.0, scheme="4p",
    observables=("Sx", "Sy", "Sz"), time_unit="1/J",
)


def _rydberg_preset(name, overrides, extra=None):
    params = _take(overrides, dict(_RYDBERG_PARAMS, **(extra or {})))
    model = _rydberg_model(
        params["n_spins"], params["omega"], params["j"], params["alpha_exp"],
        params["gamma"], params["kappa"], params["boundary"], params["initial"],
        label=name,
    )
    defaults = {k: params[k] for k in
                ("n_traj", "dt", "t_max", "scheme", "observables", "time_unit")}
    if "schemes" in params:
        defaults["schemes"] = params["schemes"]
    return ModelPreset(name, model, defaults)


def _preset_rydberg_chain(name, overrides):
    return _rydberg_preset(name, overrides)


def _preset_rydberg_corr(name, overrides):
    return _rydberg_preset(
        name, overrides,
        extra={"observables": ("Sx", "Sy", "Sz", "rr_corr_nn", "rr_corr_nnn")},
    )


def _preset_sampling(name, overrides):
    return _rydberg_preset(name, overrides, extra={"schemes": ("2p", "4p", "ring")})


def _preset_single_spin(name, overrides):
    params = _take(overrides, dict(
        gamma=1.0, g_over_gamma=2.0, initial="down",
        n_traj=100000, dt=1e-3, t_max=15.0, scheme="4p",
        observables=("Sx", "Sy", "Sz"), time_unit="1/gamma",
    ))
    g = params["g_over_gamma"] * params["gamma"]
    model = LindbladModel(
        1,
        (Field("x", g / 2.0),),
        (Channel("decay", params["gamma"]),),
        params["initial"],
        label=name,
    )
    defaults = {k: params[k] for k in
                ("n_traj", "dt", "t_max", "scheme", "observables", "time_unit")}
    defaults["initial_sweep"] = ("down", "-y")
    return ModelPreset(name, model, defaults)


def _preset_ising(name, overrides):
    params = _take(overrides, dict(
        n_spins=8, j=1.0, initial="down",
        n_traj=1, dt=1e-4, t_max=10.0, scheme="4p",
        observables=("Sx", "Sy", "Sz"), time_unit="1/J",
    ))
    model = LindbladModel(
        params["n_spins"],
        (zz_all_to_all(params["n_spins"], params["j"]),),
        (),
        params["initial"],
        label=name,
    )
    defaults = {k: params[k] for k in
                ("n_traj", "dt", "t_max", "scheme", "observables", "time_unit")}
    return ModelPreset(name, model, defaults)


def _preset_driven_spin(name, overrides):
    params = _take(overrides, dict(
        omega=0.3, gamma=0.01, kappa=0.01, initial="down",
        n_traj=100000, dt=0.01, t_max=800.0, scheme="4p",
        observables=("Sz",), time_unit="1/J",
    ))
    channels = []
    if params["gamma"]:
        channels.append(Channel("decay", params["gamma"]))
    if params["kappa"]:
        channels.append(Channel("dephasing", params["kappa"]))
    model = LindbladModel(
        1,
        (Field("x", params["omega"]),),
        tuple(channels),
        params["initial"],
        label=name,
    )
    defaults = {k: params[k] for k in
                ("n_traj", "dt", "t_max", "scheme", "observables", "time_unit")}
    defaults["rates"] = {"omega": params["omega"], "gamma": params["gamma"],
                         "kappa": params["kappa"]}
    return ModelPreset(name, model, defaults)
