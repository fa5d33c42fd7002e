"""Discrete and continuous spin-1/2 phase space.

The single-spin phase space is the sphere of radius sqrt(3): a point with
polar/azimuthal angles (theta, phi) carries the Cartesian vector

    s(theta, phi) = sqrt(3) * (sin(theta)cos(phi), -sin(theta)sin(phi), -cos(theta))

and the Hermitian unit-trace kernel A(theta, phi) = (1 + s . sigma) / 2, whose
traces against operators produce Weyl symbols.  Four special points (the
Wootters quadruplet) with components +-1 support non-negative discrete Wigner
representations of Pauli eigenstates; initial-state sampling draws from those
points (2p/4p schemes) or from the azimuthal ring through them (the continuous
scheme).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDensityMatrix, NegativeWeight, NormMismatch

SQRT3 = np.sqrt(3.0)

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

#: bit pairs indexing the Wootters quadruplet, in fixed order
ALPHAS = ((0, 0), (0, 1), (1, 0), (1, 1))

# canonical sampling-scheme names and their aliases
_SCHEME_ALIASES = {
    "2p": "2p",
    "two_point": "2p",
    "4p": "4p",
    "four_point": "4p",
    "ring": "ring",
    "continuous_ring": "ring",
    "inf": "ring",
    "infp": "ring",
}


def canonical_scheme(scheme: str) -> str:
    """Normalize a sampling-scheme name to one of '2p', '4p', 'ring'."""
    try:
        return _SCHEME_ALIASES[str(scheme).lower()]
    except KeyError:
        raise ValueError(
            f"unknown sampling scheme {scheme!r}; "
            f"expected one of {sorted(set(_SCHEME_ALIASES))}"
        ) from None


def discrete_phase_vector(alpha) -> np.ndarray:
    """Cartesian vector of the discrete phase point labelled by a bit pair.

    Args:
        alpha: pair of bits (a1, a2).

    Returns:
        3-vector ((-1)^a2, (-1)^(a1+a2), (-1)^a1) with components +-1.
    """
    a1, a2 = alpha
    if a1 not in (0, 1) or a2 not in (0, 1):
        raise ValueError(f"alpha must be a pair of bits, got {alpha!r}")
    return np.array(
        [(-1.0) ** a2, (-1.0) ** (a1 + a2), (-1.0) ** a1], dtype=float
    )


#: the four discrete points stacked in ALPHAS order, shape (4, 3)
DISCRETE_POINTS = np.array([discrete_phase_vector(a) for a in ALPHAS])


def discrete_point_angles(alpha) -> tuple[float, float]:
    """Angular coordinates (theta, phi) of a discrete phase point."""
    theta, phi = angles_from_cartesian(discrete_phase_vector(alpha))
    return float(theta), float(phi)


def cartesian_from_angles(theta, phi) -> np.ndarray:
    """Cartesian phase-space vector(s) of angular coordinates.

    Broadcasts over array input; the result has shape broadcast(theta, phi)
    + (3,) and Euclidean norm sqrt(3).
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return SQRT3 * np.stack(
        np.broadcast_arrays(st * np.cos(phi), -st * np.sin(phi), -np.cos(theta)),
        axis=-1,
    )


def angles_from_cartesian(s, tol: float = 1e-9):
    """Invert :func:`cartesian_from_angles` on the radius-sqrt(3) sphere.

    Args:
        s: array of shape (..., 3).
        tol: allowed deviation of |s| from sqrt(3).

    Returns:
        (theta, phi) arrays with theta in [0, pi] and phi in [0, 2*pi);
        phi = 0 by convention at the poles.

    Raises:
        NormMismatch: if any |s| deviates from sqrt(3) beyond tol.
    """
    s = np.asarray(s, dtype=float)
    norms = np.linalg.norm(s, axis=-1)
    err = np.max(np.abs(norms - SQRT3))
    if err > tol:
        raise NormMismatch(f"|s| deviates from sqrt(3) by {err:.3e} (tol {tol:.1e})")
    z = np.clip(-s[..., 2] / SQRT3, -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.mod(np.arctan2(-s[..., 1], s[..., 0]), 2.0 * np.pi)
    # phi is arbitrary at the poles; pin it to 0 there for determinism
    at_pole = np.abs(np.abs(z) - 1.0) < 1e-15
    phi = np.where(at_pole, 0.0, phi)
    if theta.ndim == 0:
        return float(theta), float(phi)
    return theta, phi


def kernel_matrix(theta, phi) -> np.ndarray:
    """Phase-point kernel A(theta, phi), shape (..., 2, 2).

    A = [[1 - sqrt(3)cos(theta),          sqrt(3)e^{+i phi} sin(theta)],
         [sqrt(3)e^{-i phi} sin(theta),   1 + sqrt(3)cos(theta)      ]] / 2

    Hermitian with unit trace; equals (1 + s . sigma)/2.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    ct = SQRT3 * np.cos(theta)
    off = SQRT3 * np.exp(1j * phi) * np.sin(theta)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = 1.0 - ct
    out[..., 0, 1] = off
    out[..., 1, 0] = np.conj(off)
    out[..., 1, 1] = 1.0 + ct
    return out / 2.0


def kernel_dtheta(theta, phi) -> np.ndarray:
    """Analytic d/dtheta of :func:`kernel_matrix`."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st = SQRT3 * np.sin(theta)
    off = SQRT3 * np.exp(1j * phi) * np.cos(theta)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = st
    out[..., 0, 1] = off
    out[..., 1, 0] = np.conj(off)
    out[..., 1, 1] = -st
    return out / 2.0


def kernel_dphi(theta, phi) -> np.ndarray:
    """Analytic d/dphi of :func:`kernel_matrix`."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    off = 1j * SQRT3 * np.exp(1j * phi) * np.sin(theta)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = off
    out[..., 1, 0] = np.conj(off)
    return out / 2.0


def kernel_dphi2(theta, phi) -> np.ndarray:
    """Analytic d^2/dphi^2 of :func:`kernel_matrix`."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    off = -SQRT3 * np.exp(1j * phi) * np.sin(theta)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = off
    out[..., 1, 0] = np.conj(off)
    return out / 2.0


def weyl_symbol(observable: np.ndarray, theta, phi):
    """Weyl symbol Tr[A(theta, phi) O] of a 2x2 operator.

    For O = a0*1 + a . sigma this equals a0 + a . s(theta, phi); broadcasts
    over angle arrays.  The result is real for Hermitian input.
    """
    observable = np.asarray(observable, dtype=complex)
    if observable.shape != (2, 2):
        raise ValueError("observable must be a 2x2 matrix")
    a0 = np.trace(observable).real / 2.0
    a = np.array(
        [np.trace(PAULI[ax] @ observable).real / 2.0 for ax in ("x", "y", "z")]
    )
    s = cartesian_from_angles(theta, phi)
    return a0 + s @ a


def _validate_density_matrix(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidDensityMatrix(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise InvalidDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidDensityMatrix(f"trace is {np.trace(rho):.6f}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise InvalidDensityMatrix("matrix has a negative eigenvalue")
    return rho


def discrete_wigner_coeffs(rho: np.ndarray) -> np.ndarray:
    """Discrete Wigner weights W_alpha = Tr[A_alpha rho] / 2 of a qubit state.

    Returns the four real weights in ALPHAS order; they sum to 1.

    Raises:
        InvalidDensityMatrix: if rho is not a valid density matrix.
    """
    rho = _validate_density_matrix(rho)
    p = bloch_vector(rho)
    # W_alpha = (1 + r_alpha . p) / 4 for rho = (1 + p . sigma)/2
    return (1.0 + DISCRETE_POINTS @ p) / 4.0


def reconstruct_density(weights) -> np.ndarray:
    """Rebuild rho = sum_alpha W_alpha A_alpha from discrete weights."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (4,):
        raise ValueError("expected 4 weights")
    rho = np.zeros((2, 2), dtype=complex)
    for w, r in zip(weights, DISCRETE_POINTS):
        rho += w * 0.5 * (IDENTITY_2 + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z)
    return rho


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Bloch vector (Tr[sigma^x rho], Tr[sigma^y rho], Tr[sigma^z rho])."""
    rho = np.asarray(rho, dtype=complex)
    return np.array(
        [np.trace(PAULI[ax] @ rho).real for ax in ("x", "y", "z")]
    )


_NAMED_STATES = {
    "up": (0.0, 0.0, 1.0),
    "down": (0.0, 0.0, -1.0),
    "+z": (0.0, 0.0, 1.0),
    "-z": (0.0, 0.0, -1.0),
    "+x": (1.0, 0.0, 0.0),
    "-x": (-1.0, 0.0, 0.0),
    "+y": (0.0, 1.0, 0.0),
    "-y": (0.0, -1.0, 0.0),
    "mixed": (0.0, 0.0, 0.0),
}


def bloch_from_spec(spec) -> np.ndarray:
    """Resolve an initial-state spec to a Bloch vector with |p| <= 1.

    Accepts a named axis string ('down', '-y', ...), a length-3 Bloch vector,
    or a 2x2 density matrix.
    """
    if isinstance(spec, str):
        try:
            return np.array(_NAMED_STATES[spec.lower()])
        except KeyError:
            raise ValueError(
                f"unknown state name {spec!r}; known: {sorted(_NAMED_STATES)}"
            ) from None
    arr = np.asarray(spec)
    if arr.shape == (2, 2):
        return bloch_vector(_validate_density_matrix(arr))
    if arr.shape == (3,):
        p = arr.astype(float)
        if np.linalg.norm(p) > 1.0 + 1e-9:
            raise InvalidDensityMatrix(f"Bloch vector has norm {np.linalg.norm(p):.6f} > 1")
        return p
    raise ValueError(f"cannot interpret state spec with shape {arr.shape}")


@dataclass(frozen=True)
class DiscreteWignerDistribution:
    """Explicit four-point quasi-probability distribution over the base
    quadruplet, in ALPHAS order.  Entries may be negative (then it cannot be
    sampled); they must sum to 1."""

    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (4,):
            raise ValueError("expected 4 weights")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {w.sum():.6f}, expected 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))


def rotation_from_down(target: np.ndarray) -> np.ndarray:
    """Rotation matrix R with R @ (0,0,-1) = target (unit vector)."""
    t = np.asarray(target, dtype=float)
    t = t / np.linalg.norm(t)
    c = -t[2]  # cos of the rotation angle, dot((0,0,-1), t)
    if c < -1.0 + 1e-12:
        # target = +z; rotate by pi about the x axis
        return np.diag([1.0, -1.0, -1.0])
    a = np.cross([0.0, 0.0, -1.0], t)
    ax = np.array(
        [[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]]
    )
    return np.eye(3) + ax + ax @ ax / (1.0 + c)


# down-frame source points for the 2p scheme: anti-correlated x/y signs
_TWO_POINTS = np.array([[1.0, -1.0, -1.0], [-1.0, 1.0, -1.0]])


def angles_from_uniforms(u: np.ndarray, bloch: np.ndarray, scheme: str):
    """Map uniform variates to sampled angular coordinates for one spin state.

    This is the deterministic core shared by :func:`sample_initial` and the
    trajectory engines: u has shape (..., 3) with u[..., 0] selecting the
    mixture component (for |p| < 1) and u[..., 1:3] feeding the scheme.

    Returns (theta, phi) arrays of shape u.shape[:-1].
    """
    scheme = canonical_scheme(scheme)
    u = np.asarray(u, dtype=float)
    p = np.asarray(bloch, dtype=float)
    r = np.linalg.norm(p)
    direction = p / r if r > 1e-12 else np.array([0.0, 0.0, 1.0])
    w_plus = (1.0 + min(r, 1.0)) / 2.0

    if scheme == "2p":
        idx = (u[..., 1] >= 0.5).astype(int)
        s = _TWO_POINTS[idx]
    elif scheme == "4p":
        sx = np.where(u[..., 1] < 0.5, 1.0, -1.0)
        sy = np.where(u[..., 2] < 0.5, 1.0, -1.0)
        s = np.stack([sx, sy, -np.ones_like(sx)], axis=-1)
    else:  # ring
        ang = 2.0 * np.pi * u[..., 1]
        s = np.stack(
            [np.sqrt(2.0) * np.cos(ang), -np.sqrt(2.0) * np.sin(ang),
             -np.ones_like(ang)],
            axis=-1,
        )

    plus = u[..., 0] < w_plus
    if w_plus >= 1.0 - 1e-15:
        s = s @ rotation_from_down(direction).T
    else:
        s_plus = s @ rotation_from_down(direction).T
        s_minus = s @ rotation_from_down(-direction).T
        s = np.where(plus[..., None], s_plus, s_minus)
    return angles_from_cartesian(s)


def sample_initial(state, scheme: str, count: int, seed: int) -> np.ndarray:
    """Draw initial angular configurations for a product state.

    Args:
        state: one state spec (see :func:`bloch_from_spec`) or a sequence of
            per-spin specs; a :class:`DiscreteWignerDistribution` is sampled
            directly on the base quadruplet.
        scheme: '2p', '4p' or 'ring' (aliases accepted).
        count: number of Monte Carlo samples.
        seed: RNG seed; output is a pure function of (state, scheme, count, seed).

    Returns:
        Array of shape (count, n_spins, 2) holding (theta, phi) per spin.

    Raises:
        NegativeWeight: if an explicit distribution has negative entries.
    """
    specs = state if isinstance(state, (list, tuple)) else [state]
    rng = np.random.default_rng(seed)
    out = np.empty((count, len(specs), 2), dtype=float)
    for j, spec in enumerate(specs):
        u = rng.random((count, 3))
        if isinstance(spec, DiscreteWignerDistribution):
            theta, phi = _sample_discrete_weights(np.asarray(spec.weights), u)
        else:
            theta, phi = angles_from_uniforms(u, bloch_from_spec(spec), scheme)
        out[:, j, 0] = theta
        out[:, j, 1] = phi
    return out


def _sample_discrete_weights(weights: np.ndarray, u: np.ndarray):
    if weights.min() < -1e-12:
        raise NegativeWeight(
            f"distribution has negative weight {weights.min():.3e}; "
            "it cannot be sampled on the base phase-point set"
        )
    w = np.clip(weights, 0.0, None)
    edges = np.cumsum(w) / w.sum()
    idx = np.searchsorted(edges, u[..., 1], side="right").clip(0, 3)
    s = DISCRETE_POINTS[idx]
    return angles_from_cartesian(s)
