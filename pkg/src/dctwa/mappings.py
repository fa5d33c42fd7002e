"""Certification of the operator-to-differential-operator mappings.

Multiplying a qubit state by a Pauli matrix from the left or right is
equivalent to applying a first/second-order differential operator to the
flattened Wigner function chi(theta, phi) = sin(theta) W(theta, phi) / (2 pi).
This module holds the coefficient tables of those operators in both the
angular and the complex stereographic representation, plus numeric residual
checks:

* pointwise kernel identities, e.g. sigma^z A = [...] A with analytic kernel
  derivatives (machine precision);
* adjoint quadrature checks: sigma . rho[chi] against the integral of
  A (D chi) for a suite of smooth test functions;
* gauge orthogonality of the kernel against spherical harmonics with l >= 2.

All mapping operators are written in the divergence form

    D[chi] = c0 chi + d/dtheta (C_theta chi) + d/dphi (C_phi chi)
                    + d^2/dphi^2 (C_phiphi chi)

(in the plane: c0 chi + d_beta (T_b chi) + d_beta* (T_bc chi)
+ d_beta d_beta* (T_2 chi)), which integrates against the kernel by parts to
the pointwise form with flipped signs on the odd-derivative coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import sph_harm_y

from .errors import PoleError, QuadratureFailure, SingularRegion
from .phasespace import (
    PAULI,
    SQRT3,
    discrete_point_angles,
    kernel_dphi,
    kernel_dphi2,
    kernel_dtheta,
    kernel_matrix,
)

OPERATORS = ("x", "y", "z")
SIDES = ("left", "right")
REPRESENTATIONS = ("angular", "stereographic")

C_PLUS = SQRT3 + 3.0
C_MINUS = SQRT3 - 3.0


@dataclass(frozen=True)
class MappingSpec:
    """One of the twelve Pauli multiplication mappings."""

    operator: str
    side: str
    representation: str = "angular"

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ValueError(f"operator must be one of {OPERATORS}")
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"representation must be one of {REPRESENTATIONS}")


def all_mapping_specs() -> list[MappingSpec]:
    """All twelve (operator, side, representation) combinations."""
    return [
        MappingSpec(op, side, rep)
        for rep in REPRESENTATIONS
        for op in OPERATORS
        for side in SIDES
    ]


# ---------------------------------------------------------------------------
# angular representation
# ---------------------------------------------------------------------------

def angular_coefficients(operator: str, side: str, theta, phi) -> dict:
    """Coefficient functions of the angular mapping, with the derivatives
    needed to expand the divergence form by the product rule.

    Returns a dict with keys c0, Ct, dCt (theta-derivative of Ct), Cp, dCp
    (phi-derivative), Cpp, dCpp, d2Cpp (phi-derivatives).  The right-side
    mapping is the left one with the imaginary parts negated.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sgn = 1.0 if side == "left" else -1.0
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    csc = 1.0 / st
    cot = ct / st
    if operator == "x":
        return {
            "c0": SQRT3 * st * cp + 0j,
            "Ct": -(SQRT3 * ct * cp - 1j * sgn * sp),
            "dCt": SQRT3 * st * cp + 0j,
            "Cp": csc * sp / SQRT3 + 1j * sgn * cot * cp,
            "dCp": csc * cp / SQRT3 - 1j * sgn * cot * sp,
            "Cpp": 2.0 * csc * cp / SQRT3 + 0j,
            "dCpp": -2.0 * csc * sp / SQRT3 + 0j,
            "d2Cpp": -2.0 * csc * cp / SQRT3 + 0j,
        }
    if operator == "y":
        return {
            "c0": -SQRT3 * st * sp + 0j,
            "Ct": SQRT3 * ct * sp + 1j * sgn * cp,
            "dCt": -SQRT3 * st * sp + 0j,
            "Cp": csc * cp / SQRT3 - 1j * sgn * cot * sp,
            "dCp": -csc * sp / SQRT3 - 1j * sgn * cot * cp,
            "Cpp": -2.0 * csc * sp / SQRT3 + 0j,
            "dCpp": -2.0 * csc * cp / SQRT3 + 0j,
            "d2Cpp": 2.0 * csc * sp / SQRT3 + 0j,
        }
    # operator == "z"
    zero = np.zeros(np.broadcast(theta, phi).shape)
    return {
        "c0": -SQRT3 * ct + 0j,
        "Ct": -(3.0 * st - 2.0 * csc) / SQRT3 + 0j,
        "dCt": -(3.0 * ct + 2.0 * csc * cot) / SQRT3 + 0j,
        "Cp": 1j * sgn + zero,
        "dCp": zero + 0j,
        "Cpp": -2.0 * cot * csc / SQRT3 + 0j,
        "dCpp": zero + 0j,
        "d2Cpp": zero + 0j,
    }


def kernel_identity_residual(operator: str, side: str, theta: float, phi: float) -> float:
    """Pointwise residual of sigma A (or A sigma) against the integrated-by-
    parts divergence form, using analytic kernel derivatives.

    In the divergence form D[chi] = c0 chi + d(Ct chi) + d(Cp chi) + d^2(Cpp chi),
    the equivalent pointwise identity reads

        sigma A = c0 A - Ct dA/dtheta - Cp dA/dphi + Cpp d^2A/dphi^2.

    Raises:
        SingularRegion: if theta is outside [0.05, pi - 0.05].
    """
    if not 0.05 <= theta <= np.pi - 0.05:
        raise SingularRegion(
            f"theta={theta:.4f} is outside the safe band [0.05, pi-0.05]"
        )
    c = angular_coefficients(operator, side, theta, phi)
    a = kernel_matrix(theta, phi)
    rhs = (
        c["c0"] * a
        - c["Ct"] * kernel_dtheta(theta, phi)
        - c["Cp"] * kernel_dphi(theta, phi)
        + c["Cpp"] * kernel_dphi2(theta, phi)
    )
    sigma = PAULI[operator]
    lhs = sigma @ a if side == "left" else a @ sigma
    return float(np.max(np.abs(lhs - rhs)))


def kernel_identity_residual_sigma_z(theta: float, phi: float) -> float:
    """Pointwise residual of the sigma^z-from-the-left kernel identity."""
    return kernel_identity_residual("z", "left", theta, phi)


# ---------------------------------------------------------------------------
# test functions on the (theta, phi) stripe
# ---------------------------------------------------------------------------

class SinePowerMode:
    """chi = sin(theta)^k * trig(m phi); smooth, periodic, vanishing at the
    poles fast enough (k >= 3) for all boundary terms to drop."""

    def __init__(self, k: int, m: int, trig: str = "cos", amplitude: float = 1.0):
        if k < 3:
            raise ValueError("need k >= 3 so that csc-weighted terms vanish at the poles")
        self.k, self.m, self.trig, self.amp = k, m, trig, amplitude
        self.name = f"sin^{k} {trig}({m}phi)"

    def _ph(self, phi, deriv=0):
        m = self.m
        f = np.cos if self.trig == "cos" else np.sin
        g = np.sin if self.trig == "cos" else np.cos
        sg = -1.0 if self.trig == "cos" else 1.0
        if deriv == 0:
            return f(m * phi)
        if deriv == 1:
            return sg * m * g(m * phi)
        return -(m ** 2) * f(m * phi)

    def value(self, theta, phi):
        return self.amp * np.sin(theta) ** self.k * self._ph(phi)

    def d_theta(self, theta, phi):
        return (
            self.amp * self.k * np.sin(theta) ** (self.k - 1)
            * np.cos(theta) * self._ph(phi)
        )

    def d_phi(self, theta, phi):
        return self.amp * np.sin(theta) ** self.k * self._ph(phi, 1)

    def d2_phi(self, theta, phi):
        return self.amp * np.sin(theta) ** self.k * self._ph(phi, 2)


class BumpMixture:
    """Smooth surrogate of a discrete phase-point distribution: a weighted sum
    of Gaussian-in-theta times von-Mises-in-phi bumps, damped by sin^3(theta).
    """

    def __init__(self, centers, weights, sigma_theta=0.15, kappa_phi=10.0):
        self.centers = [(float(t), float(p)) for t, p in centers]
        self.weights = list(weights)
        self.sig2 = float(sigma_theta) ** 2
        self.kap = float(kappa_phi)
        self.name = f"bump mixture ({len(self.centers)} centers)"

    def _parts(self, theta, phi):
        for (t0, p0), w in zip(self.centers, self.weights):
            g = np.exp(-((theta - t0) ** 2) / (2.0 * self.sig2))
            v = np.exp(self.kap * (np.cos(phi - p0) - 1.0))
            yield (t0, p0), w, g, v

    def value(self, theta, phi):
        s3 = np.sin(theta) ** 3
        return sum(w * s3 * g * v for _, w, g, v in self._parts(theta, phi))

    def d_theta(self, theta, phi):
        st, ct = np.sin(theta), np.cos(theta)
        out = 0.0
        for (t0, _), w, g, v in self._parts(theta, phi):
            out = out + w * v * g * (
                3.0 * st ** 2 * ct - st ** 3 * (theta - t0) / self.sig2
            )
        return out

    def d_phi(self, theta, phi):
        s3 = np.sin(theta) ** 3
        out = 0.0
        for (_, p0), w, g, v in self._parts(theta, phi):
            out = out + w * s3 * g * v * (-self.kap * np.sin(phi - p0))
        return out

    def d2_phi(self, theta, phi):
        s3 = np.sin(theta) ** 3
        out = 0.0
        for (_, p0), w, g, v in self._parts(theta, phi):
            d = self.kap * np.sin(phi - p0)
            out = out + w * s3 * g * v * (d * d - self.kap * np.cos(phi - p0))
        return out


class UniformState:
    """chi = sin(theta)/(4 pi): the flattened distribution of the maximally
    mixed state.  Valid only for the x/y mappings (its boundary terms for the
    z mapping do not vanish)."""

    name = "sin(theta)/4pi (maximally mixed)"

    def value(self, theta, phi):
        return np.sin(theta) / (4.0 * np.pi) * np.ones_like(np.asarray(phi, float))

    def d_theta(self, theta, phi):
        return np.cos(theta) / (4.0 * np.pi) * np.ones_like(np.asarray(phi, float))

    def d_phi(self, theta, phi):
        return np.zeros(np.broadcast(theta, phi).shape)

    def d2_phi(self, theta, phi):
        return np.zeros(np.broadcast(theta, phi).shape)


def smoothed_down_state() -> BumpMixture:
    """Smooth stand-in for the two-point discrete distribution of the
    spin-down state (equal bumps at the two anti-correlated phase points)."""
    t0, p0 = discrete_point_angles((1, 0))
    t1, p1 = discrete_point_angles((1, 1))
    return BumpMixture([(t0, p0), (t1, p1)], [0.5, 0.5])


def default_test_functions() -> list:
    """The standard suite of smooth, boundary-safe test functions."""
    return [
        SinePowerMode(3, 0),
        SinePowerMode(3, 1, "cos"),
        SinePowerMode(4, 1, "sin"),
        SinePowerMode(4, 2, "cos"),
        SinePowerMode(5, 2, "sin"),
        SinePowerMode(6, 3, "cos"),
        smoothed_down_state(),
    ]


# ---------------------------------------------------------------------------
# adjoint quadrature checks (angular)
# ---------------------------------------------------------------------------

def _angular_grid(n_theta: int, n_phi: int):
    x, w = leggauss(n_theta)
    theta = 0.5 * np.pi * (x + 1.0)
    w_theta = 0.5 * np.pi * w
    phi = np.arange(n_phi) * 2.0 * np.pi / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    weights = np.outer(w_theta, np.full(n_phi, 2.0 * np.pi / n_phi))
    return th, ph, weights


def _apply_angular_mapping(operator, side, fn, theta, phi):
    c = angular_coefficients(operator, side, theta, phi)
    chi = fn.value(theta, phi)
    return (
        c["c0"] * chi
        + c["dCt"] * chi + c["Ct"] * fn.d_theta(theta, phi)
        + c["dCp"] * chi + c["Cp"] * fn.d_phi(theta, phi)
        + c["d2Cpp"] * chi + 2.0 * c["dCpp"] * fn.d_phi(theta, phi)
        + c["Cpp"] * fn.d2_phi(theta, phi)
    )


def _angular_adjoint_matrices(operator, side, fn, n_theta, n_phi):
    th, ph, w = _angular_grid(n_theta, n_phi)
    a = kernel_matrix(th, ph)
    chi = fn.value(th, ph)
    rho = np.einsum("ij,ijab->ab", w * chi, a)
    rhs = np.einsum("ij,ijab->ab", w * _apply_angular_mapping(operator, side, fn, th, ph), a)
    sigma = PAULI[operator]
    lhs = sigma @ rho if side == "left" else rho @ sigma
    return lhs, rhs


def adjoint_mapping_residual(spec: MappingSpec, test_function, tol: float = 1e-9) -> float:
    """Entrywise-max residual |sigma . rho[chi] - integral(A D[chi])|.

    rho[chi] is assembled from the same quadrature; the grid is refined once
    and the two refinement levels must agree below `tol`, otherwise
    QuadratureFailure is raised.
    """
    if spec.representation == "stereographic":
        return _plane_adjoint_residual(spec, test_function, tol)
    coarse = _angular_adjoint_matrices(spec.operator, spec.side, test_function, 96, 128)
    fine = _angular_adjoint_matrices(spec.operator, spec.side, test_function, 160, 256)
    drift = max(
        float(np.max(np.abs(fine[i] - coarse[i]))) for i in range(2)
    )
    if drift > tol:
        raise QuadratureFailure(
            f"quadrature levels disagree by {drift:.3e} (tol {tol:.1e}) for "
            f"{spec} with test function {getattr(test_function, 'name', test_function)!r}"
        )
    return float(np.max(np.abs(fine[0] - fine[1])))


# ---------------------------------------------------------------------------
# stereographic representation
# ---------------------------------------------------------------------------

def beta_from_angles(theta: float, phi: float) -> complex:
    """Stereographic coordinate beta = tan(theta/2) e^{-i phi}.

    Raises:
        PoleError: at theta = pi where beta diverges.
    """
    if abs(theta - np.pi) < 1e-9:
        raise PoleError("beta is undefined at theta = pi")
    return np.tan(theta / 2.0) * np.exp(-1j * phi)


def angles_from_beta(beta: complex) -> tuple[float, float]:
    """Inverse of :func:`beta_from_angles` with phi in [0, 2 pi)."""
    theta = 2.0 * np.arctan(abs(beta))
    phi = float(np.mod(-np.angle(beta), 2.0 * np.pi)) if beta != 0 else 0.0
    return float(theta), phi


def cartesian_from_beta(beta) -> np.ndarray:
    """Cartesian phase-space vector in plane coordinates, shape (..., 3)."""
    beta = np.asarray(beta, dtype=complex)
    n2 = (beta * beta.conj()).real
    pre = SQRT3 / (1.0 + n2)
    # s_x = sqrt3 f (b + b*), s_y = -i sqrt3 f (b - b*), s_z = sqrt3 f (|b|^2 - 1)
    return np.stack(
        [pre * 2.0 * beta.real, pre * 2.0 * beta.imag, pre * (-1.0 + n2)],
        axis=-1,
    )


def discrete_beta_points() -> np.ndarray:
    """beta coordinates of the Wootters quadruplet, in ALPHAS order."""
    return np.array(
        [beta_from_angles(*discrete_point_angles(a)) for a in ((0, 0), (0, 1), (1, 0), (1, 1))]
    )


def kernel_beta(beta, deriv: str = "A") -> np.ndarray:
    """Kernel on the plane and its analytic Wirtinger derivatives.

    deriv is one of 'A', 'db' (d/dbeta), 'dbc' (d/dbeta*), 'dmix'
    (d^2/dbeta dbeta*).  Shapes broadcast to beta.shape + (2, 2).
    """
    b = np.asarray(beta, dtype=complex)
    bc = b.conj()
    f = 1.0 / (1.0 + b * bc)
    shape = b.shape + (2, 2)
    m = np.empty(shape, dtype=complex)
    m[..., 0, 0] = b * bc - 1.0
    m[..., 0, 1] = 2.0 * bc
    m[..., 1, 0] = 2.0 * b
    m[..., 1, 1] = 1.0 - b * bc
    mb = np.zeros(shape, dtype=complex)   # d m / d beta
    mb[..., 0, 0] = bc
    mb[..., 1, 0] = 2.0
    mb[..., 1, 1] = -bc
    mc = np.zeros(shape, dtype=complex)   # d m / d beta*
    mc[..., 0, 0] = b
    mc[..., 0, 1] = 2.0
    mc[..., 1, 1] = -b
    pre = SQRT3 / 2.0
    fe = f[..., None, None]
    if deriv == "A":
        out = pre * fe * m
        out[..., 0, 0] += 0.5
        out[..., 1, 1] += 0.5
        return out
    if deriv == "db":
        return pre * (-(bc * f ** 2)[..., None, None] * m + fe * mb)
    if deriv == "dbc":
        return pre * (-(b * f ** 2)[..., None, None] * m + fe * mc)
    if deriv == "dmix":
        d = np.zeros(shape, dtype=complex)
        d[..., 0, 0] = 1.0
        d[..., 1, 1] = -1.0
        return pre * (
            ((-(f ** 2) + 2.0 * b * bc * f ** 3))[..., None, None] * m
            - (bc * f ** 2)[..., None, None] * mc
            - (b * f ** 2)[..., None, None] * mb
            + fe * d
        )
    raise ValueError(f"unknown derivative tag {deriv!r}")


def plane_coefficients(operator: str, side: str, beta) -> dict:
    """Coefficients of the plane mapping in divergence form, with the
    Wirtinger derivatives needed by the product rule.

    Keys: c0, Tb, dTb (d/dbeta), Tbc, dTbc (d/dbeta*), T2, dT2_db, dT2_dbc,
    d2T2.  T_b depends only on beta and T_bc only on beta*, so the cross
    derivatives vanish identically.
    """
    b = np.asarray(beta, dtype=complex)
    bc = b.conj()
    f = 1.0 / (1.0 + b * bc)
    cb = C_MINUS if side == "left" else C_PLUS
    cc = C_PLUS if side == "left" else C_MINUS
    if operator == "x":
        return {
            "c0": SQRT3 * (b + bc) * f,
            "Tb": -(cb / 6.0) * (1.0 - b ** 2),
            "dTb": (cb / 3.0) * b,
            "Tbc": -(cc / 6.0) * (1.0 - bc ** 2),
            "dTbc": (cc / 3.0) * bc,
            "T2": (b + bc) * (1.0 + b * bc) / SQRT3,
            "dT2_db": (1.0 + 2.0 * b * bc + bc ** 2) / SQRT3,
            "dT2_dbc": (1.0 + 2.0 * b * bc + b ** 2) / SQRT3,
            "d2T2": 2.0 * (b + bc) / SQRT3,
        }
    if operator == "y":
        return {
            "c0": -1j * SQRT3 * (b - bc) * f,
            "Tb": -(1j * cb / 6.0) * (1.0 + b ** 2),
            "dTb": -(1j * cb / 3.0) * b,
            "Tbc": (1j * cc / 6.0) * (1.0 + bc ** 2),
            "dTbc": (1j * cc / 3.0) * bc,
            "T2": -1j * (b - bc) * (1.0 + b * bc) / SQRT3,
            "dT2_db": -1j * (1.0 + 2.0 * b * bc - bc ** 2) / SQRT3,
            "dT2_dbc": -1j * (-1.0 - 2.0 * b * bc + b ** 2) / SQRT3,
            "d2T2": -1j * 2.0 * (b - bc) / SQRT3,
        }
    # operator == "z"
    return {
        "c0": SQRT3 * (b * bc - 1.0) * f,
        "Tb": -(cb / 3.0) * b,
        "dTb": -(cb / 3.0) * np.ones_like(b),
        "Tbc": -(cc / 3.0) * bc,
        "dTbc": -(cc / 3.0) * np.ones_like(b),
        "T2": ((b * bc) ** 2 - 1.0) / SQRT3,
        "dT2_db": 2.0 * b * bc ** 2 / SQRT3,
        "dT2_dbc": 2.0 * b ** 2 * bc / SQRT3,
        "d2T2": 4.0 * b * bc / SQRT3,
    }


def plane_identity_residual(operator: str, side: str, beta: complex) -> float:
    """Pointwise residual of the plane mapping's integrated-by-parts form:

    sigma A(beta) = c0 A - Tb dA/dbeta - Tbc dA/dbeta* + T2 d^2A/dbeta dbeta*.
    """
    c = plane_coefficients(operator, side, beta)
    rhs = (
        c["c0"] * kernel_beta(beta)
        - c["Tb"] * kernel_beta(beta, "db")
        - c["Tbc"] * kernel_beta(beta, "dbc")
        + c["T2"] * kernel_beta(beta, "dmix")
    )
    sigma = PAULI[operator]
    a = kernel_beta(beta)
    lhs = sigma @ a if side == "left" else a @ sigma
    return float(np.max(np.abs(lhs - rhs)))


class PolyGaussPlane:
    """chi(beta, beta*) = P(beta, beta*) exp(-beta beta*) with P a polynomial
    given as {(i, j): coeff} for beta^i beta*^j."""

    def __init__(self, coeffs: dict, name: str | None = None):
        self.coeffs = dict(coeffs)
        self.name = name or f"poly-gauss {sorted(self.coeffs)}"

    def _poly(self, b, bc, di=0, dj=0):
        out = np.zeros_like(b, dtype=complex)
        for (i, j), c in self.coeffs.items():
            if i < di or j < dj:
                continue
            fac = c
            for k in range(di):
                fac *= i - k
            for k in range(dj):
                fac *= j - k
            out = out + fac * b ** (i - di) * bc ** (j - dj)
        return out

    def value(self, b, bc):
        return self._poly(b, bc) * np.exp(-b * bc)

    def d_beta(self, b, bc):
        return (self._poly(b, bc, 1, 0) - bc * self._poly(b, bc)) * np.exp(-b * bc)

    def d_betac(self, b, bc):
        return (self._poly(b, bc, 0, 1) - b * self._poly(b, bc)) * np.exp(-b * bc)

    def d_mixed(self, b, bc):
        p = self._poly(b, bc)
        return (
            self._poly(b, bc, 1, 1)
            - b * self._poly(b, bc, 1, 0)
            - bc * self._poly(b, bc, 0, 1)
            + (b * bc - 1.0) * p
        ) * np.exp(-b * bc)


def default_plane_test_functions() -> list:
    return [
        PolyGaussPlane({(0, 0): 1.0}),
        PolyGaussPlane({(1, 0): 1.0}),
        PolyGaussPlane({(0, 2): 1.0}),
        PolyGaussPlane({(0, 0): 1.0, (1, 1): 1.0}),
        PolyGaussPlane({(2, 1): 1.0}),
        PolyGaussPlane({(1, 0): 1.0, (0, 1): 2.0, (1, 1): 3.0}),
    ]


def _plane_grid(n_r: int, n_psi: int, radius: float):
    x, w = leggauss(n_r)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r  # includes the polar Jacobian
    psi = np.arange(n_psi) * 2.0 * np.pi / n_psi
    rr, pp = np.meshgrid(r, psi, indexing="ij")
    weights = np.outer(wr, np.full(n_psi, 2.0 * np.pi / n_psi))
    return rr * np.exp(1j * pp), weights


def _apply_plane_mapping(operator, side, fn, b):
    bc = b.conj()
    c = plane_coefficients(operator, side, b)
    chi = fn.value(b, bc)
    return (
        c["c0"] * chi
        + c["dTb"] * chi + c["Tb"] * fn.d_beta(b, bc)
        + c["dTbc"] * chi + c["Tbc"] * fn.d_betac(b, bc)
        + c["d2T2"] * chi
        + c["dT2_db"] * fn.d_betac(b, bc)
        + c["dT2_dbc"] * fn.d_beta(b, bc)
        + c["T2"] * fn.d_mixed(b, bc)
    )


def _plane_adjoint_matrices(operator, side, fn, n_r, n_psi, radius=8.0):
    b, w = _plane_grid(n_r, n_psi, radius)
    a = kernel_beta(b)
    rho = np.einsum("ij,ijab->ab", w * fn.value(b, b.conj()), a)
    rhs = np.einsum("ij,ijab->ab", w * _apply_plane_mapping(operator, side, fn, b), a)
    sigma = PAULI[operator]
    lhs = sigma @ rho if side == "left" else rho @ sigma
    return lhs, rhs


def _plane_adjoint_residual(spec, test_function, tol):
    coarse = _plane_adjoint_matrices(spec.operator, spec.side, test_function, 96, 128)
    fine = _plane_adjoint_matrices(spec.operator, spec.side, test_function, 160, 256)
    drift = max(float(np.max(np.abs(fine[i] - coarse[i]))) for i in range(2))
    if drift > tol:
        raise QuadratureFailure(
            f"plane quadrature levels disagree by {drift:.3e} (tol {tol:.1e})"
        )
    return float(np.max(np.abs(fine[0] - fine[1])))


# ---------------------------------------------------------------------------
# gauge orthogonality
# ---------------------------------------------------------------------------

def gauge_orthogonality_residual(l: int, m: int) -> float:
    """Entrywise max of the normalized-measure integral of A Y_lm.

    The kernel's operator-valued moments vanish for all spherical harmonics
    with l >= 2 (the gauge null space used by discrete initial-state
    sampling); l = 1 gives a nonzero result, which keeps the check honest.
    """
    if abs(m) > l:
        raise ValueError("need |m| <= l")
    th, ph, w = _angular_grid(96, 128)
    ylm = sph_harm_y(l, m, th, ph)
    integrand = np.sin(th) / (2.0 * np.pi) * ylm * w
    out = np.einsum("ij,ijab->ab", integrand, kernel_matrix(th, ph))
    return float(np.max(np.abs(out)))


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------

POINTWISE_TOL = 1e-12
ADJOINT_TOL = 1e-6
GAUGE_TOL = 1e-10


def sigma_z_grid_residual(n: int = 32) -> float:
    """Max pointwise sigma^z identity residual on an n x n safe-band grid."""
    thetas = np.linspace(0.05, np.pi - 0.05, n)
    phis = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return max(
        kernel_identity_residual_sigma_z(t, p) for t in thetas for p in phis
    )


def full_report() -> dict:
    """Run every residual check and return a JSON-serializable report."""
    report = {
        "sigma_z_pointwise": {
            "grid": "32x32",
            "max_residual": sigma_z_grid_residual(),
            "tolerance": POINTWISE_TOL,
        },
        "angular_adjoint": [],
        "stereographic_adjoint": [],
        "gauge_orthogonality": [],
    }
    for op in OPERATORS:
        for side in SIDES:
            for fn in default_test_functions():
                res = adjoint_mapping_residual(MappingSpec(op, side, "angular"), fn)
                report["angular_adjoint"].append(
                    {"operator": op, "side": side,
                     "test_function": fn.name, "residual": res}
                )
            for fn in default_plane_test_functions():
                res = adjoint_mapping_residual(MappingSpec(op, side, "stereographic"), fn)
                report["stereographic_adjoint"].append(
                    {"operator": op, "side": side,
                     "test_function": fn.name, "residual": res}
                )
    for l in range(2, 7):
        for m in range(-l, l + 1):
            report["gauge_orthogonality"].append(
                {"l": l, "m": m, "residual": gauge_orthogonality_residual(l, m)}
            )
    report["all_pass"] = bool(
        report["sigma_z_pointwise"]["max_residual"] < POINTWISE_TOL
        and all(e["residual"] < ADJOINT_TOL for e in report["angular_adjoint"])
        and all(e["residual"] < ADJOINT_TOL for e in report["stereographic_adjoint"])
        and all(e["residual"] < GAUGE_TOL for e in report["gauge_orthogonality"])
    )
    return report
