"""Two-dimensional shell elasticity tensor, strain operators and load resultants.

Everything here is pointwise: given a :class:`~shellvi.geometry.SurfaceFrame`
and displacement data (values, gradients, Hessians of the three covariant
components), the functions return the membrane strain ``gamma``, the bending
strain ``rho``, the plane-stress elasticity tensor in Voigt form, thickness
load resultants and the through-thickness post-processing quantities.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import GeometryError, ParameterError
from .geometry import SurfaceFrame

# Voigt ordering of symmetric 2x2 index pairs.
VOIGT_PAIRS = ((0, 0), (1, 1), (0, 1))

# Contraction weights: the (1,2) slot appears twice in the full index sum.
VOIGT_WEIGHTS = np.array([1.0, 1.0, 2.0])

# Three-point Gauss-Legendre rule on [-1, 1]; exact through degree 5.
_GL3_NODES = np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)])
_GL3_WEIGHTS = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])


@dataclasses.dataclass(frozen=True)
class VoigtTensor2D:
    """Symmetric 3x3 Voigt representation of the shell elasticity tensor.

    ``m`` stores raw tensor components in the order (11, 22, 12); the shear
    slot carries the plain component, with the factor-2 contraction weight
    applied by :meth:`weighted` / :meth:`contract` (and at assembly).
    """

    m: np.ndarray

    def weighted(self) -> np.ndarray:
        """W M W with W = diag(1, 1, 2): the matrix of the energy density in
        raw strain coordinates (g11, g22, g12)."""
        w = VOIGT_WEIGHTS
        return self.m * np.outer(w, w)

    def mandel(self) -> np.ndarray:
        """Orthonormal (Mandel) representation; its eigenvalues are the
        quadratic form's eigenvalues w.r.t. the Frobenius norm on symmetric
        tensors."""
        d = np.array([1.0, 1.0, np.sqrt(2.0)])
        return self.m * np.outer(d, d)

    def contract(self, s: np.ndarray, t: np.ndarray) -> float:
        """Full contraction a^{abst} s_st t_ab of two symmetric 2x2 tensors."""
        vs = np.array([s[0, 0], s[1, 1], s[0, 1]])
        vt = np.array([t[0, 0], t[1, 1], t[0, 1]])
        return float(vt @ self.weighted() @ vs)


def _check_spd_metric(a_con: np.ndarray):
    if np.max(np.abs(a_con - a_con.T)) > 1e-10 * max(1.0, np.max(np.abs(a_con))):
        raise GeometryError("contravariant metric must be symmetric")
    if a_con[0, 0] <= 0.0 or np.linalg.det(a_con) <= 0.0:
        raise GeometryError("contravariant metric must be positive definite")


def elasticity_tensor(a_con: np.ndarray, lam: float, mu: float) -> VoigtTensor2D:
    """Plane-stress shell elasticity tensor for a contravariant metric.

    Components: (4*lam*mu/(lam+2*mu)) a^{ab} a^{st}
    + 2*mu (a^{as} a^{bt} + a^{at} a^{bs}), packed in Voigt order.
    """
    if mu <= 0.0:
        raise ParameterError(f"shear modulus must be positive, got mu={mu}")
    if lam < 0.0:
        raise ParameterError(f"first Lame coefficient must be nonnegative, got lambda={lam}")
    a_con = np.asarray(a_con, dtype=float)
    _check_spd_metric(a_con)
    c = 4.0 * lam * mu / (lam + 2.0 * mu)
    m = np.empty((3, 3))
    # Grouping keeps every index symmetry exact in floating point.
    for i, (a, b) in enumerate(VOIGT_PAIRS):
        for j, (s, t) in enumerate(VOIGT_PAIRS):
            m[i, j] = c * (a_con[a, b] * a_con[s, t]) + 2.0 * mu * (
                a_con[a, s] * a_con[b, t] + a_con[a, t] * a_con[b, s]
            )
    return VoigtTensor2D(m=m)


def gamma_of(frame: SurfaceFrame, eta_vals, eta_grads) -> np.ndarray:
    """Linearized membrane strain of a surface displacement.

    Parameters
    ----------
    eta_vals : (3,) covariant component values (eta_1, eta_2, eta_3)
    eta_grads : (3, 2) partial derivatives, ``eta_grads[i, b] = d_b eta_i``

    Returns the symmetric 2x2 tensor
    ``g_ab = (d_b eta_a + d_a eta_b)/2 - Gamma^s_ab eta_s - b_ab eta_3``.
    """
    eta_vals = np.asarray(eta_vals, dtype=float)
    eta_grads = np.asarray(eta_grads, dtype=float)
    t = eta_grads[:2, :]
    gamma = 0.5 * (t + t.T)
    gamma -= np.einsum("sab,s->ab", frame.christoffel, eta_vals[:2])
    gamma -= frame.b_cov * eta_vals[2]
    return gamma


def rho_of(frame: SurfaceFrame, eta_vals, eta_grads, eta3_hess) -> np.ndarray:
    """Linearized bending strain of a surface displacement.

    ``eta3_hess`` is the symmetric 2x2 Hessian of the normal component.
    The result is symmetrized, which removes the finite-difference residue of
    the covariant curvature derivative (exactly symmetric for smooth charts).
    """
    eta_vals = np.asarray(eta_vals, dtype=float)
    eta_grads = np.asarray(eta_grads, dtype=float)
    eta3_hess = np.asarray(eta3_hess, dtype=float)
    grad3 = eta_grads[2]

    rho = eta3_hess - np.einsum("sab,s->ab", frame.christoffel, grad3)
    rho -= np.einsum("sa,sb->ab", frame.b_mix, frame.b_cov) * eta_vals[2]
    # d[s, b] = d_b eta_s - Gamma^t_{bs} eta_t
    d = eta_grads[:2, :] - np.einsum("tbs,t->sb", frame.christoffel, eta_vals[:2])
    rho += np.einsum("sa,sb->ab", frame.b_mix, d)
    rho += np.einsum("tb,ta->ab", frame.b_mix, d)
    rho += np.einsum("tba,t->ab", frame.b_covdev, eta_vals[:2])
    return 0.5 * (rho + rho.T)


def load_resultant(f_profile, h_top, eps: float) -> np.ndarray:
    """Thickness-integrated load: integral of f over (-eps, eps) plus the
    upper-face traction.

    ``f_profile`` maps the transverse coordinate to a 3-vector (None means
    zero body force); the integral uses a 3-point Gauss-Legendre rule, exact
    for polynomial profiles through degree 5.
    """
    if eps <= 0.0:
        raise ParameterError(f"thickness half-width must be positive, got eps={eps}")
    p = np.zeros(3)
    if f_profile is not None:
        for node, weight in zip(_GL3_NODES, _GL3_WEIGHTS):
            p += weight * np.asarray(f_profile(eps * node), dtype=float)
        p *= eps
    if h_top is not None:
        p += np.asarray(h_top, dtype=float)
    return p


def polynomial_profile(coeffs1, coeffs2, coeffs3):
    """Build a body-force profile from per-component polynomial coefficients
    in the transverse coordinate (ascending powers)."""
    cs = [np.asarray(c, dtype=float) for c in (coeffs1, coeffs2, coeffs3)]

    def profile(x3):
        return np.array([float(np.polynomial.polynomial.polyval(x3, c)) if c.size else 0.0 for c in cs])

    return profile


def transverse_strain(frame: SurfaceFrame, gamma: np.ndarray, lam: float, mu: float) -> float:
    """Leading-order transverse normal strain
    ``-lam/(lam + 2 mu) * a^{ab} gamma_ab``."""
    if mu <= 0.0:
        raise ParameterError(f"shear modulus must be positive, got mu={mu}")
    trace = float(np.sum(frame.a_con * np.asarray(gamma, dtype=float)))
    return -lam / (lam + 2.0 * mu) * trace


def reconstruct_u1(frame: SurfaceFrame, xi0_vals, xi0_grads, xi1_vals, x3: float) -> np.ndarray:
    """First-order through-thickness displacement correction at scaled
    transverse coordinate x3 in [-1, 1]:

    ``u1_a = xi1_a - x3 (d_a xi0_3 + 2 b^s_a xi0_s)``, ``u1_3 = xi1_3``.
    """
    xi0_vals = np.asarray(xi0_vals, dtype=float)
    xi0_grads = np.asarray(xi0_grads, dtype=float)
    xi1_vals = np.asarray(xi1_vals, dtype=float)
    grad3 = xi0_grads[2]
    u1 = xi1_vals.copy()
    for a in range(2):
        u1[a] -= x3 * (grad3[a] + 2.0 * float(frame.b_mix[:, a] @ xi0_vals[:2]))
    return u1
