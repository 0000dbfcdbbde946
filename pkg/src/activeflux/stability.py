"""Von Neumann analysis of the active flux scheme.

Matrices are nondimensional: a = dx = 1 in 1D and dx = dy = 1 in 2D. The 1D
unknown ordering is [cell average, right interface value]; the 2D ordering is
[average, u_{i+1/2,j}, u_{i,j+1/2}, u_{i+1/2,j+1/2}].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import SchemeVariant

STABILITY_SLACK = 1e-12


# --------------------------------------------------------------------------
# 1D evolution matrices

def assemble_g_1d(variant, xi) -> np.ndarray:
    """Semi-discrete matrix G(xi); vectorised over ``xi`` (shape ``xi.shape + (2, 2)``)."""
    variant = SchemeVariant.parse(variant)
    t = np.exp(1j * np.asarray(xi, dtype=float))
    ti = 1.0 / t
    G = np.empty(t.shape + (2, 2), dtype=complex)
    if variant is SchemeVariant.CENTRAL4:
        G[..., 0, 0] = 2 * (ti - 2 + t)
        G[..., 0, 1] = 0.5 * (-ti**2 + ti + 1 - t)
        G[..., 1, 0] = -ti + 1 + t - t**2
        G[..., 1, 1] = 0.25 * (ti**2 + 8 * ti - 18 + 8 * t + t**2)
    elif variant is SchemeVariant.ALTERNATING4:
        G[..., 0, 0] = ti - 4 + 3 * t
        G[..., 0, 1] = (-ti**2 + 9 * ti - 3 - 5 * t) / 6
        G[..., 1, 0] = (-5 * ti + 7 + 25 * t - 3 * t**2) / 6
        G[..., 1, 1] = (5 * ti**2 + 76 * ti - 234 + 4 * t + 5 * t**2) / 36
    elif variant is SchemeVariant.CENTRAL3:
        G[..., 0, 0] = 3 * (ti - 2 + t)
        G[..., 0, 1] = -ti**2 + ti + 1 - t
        G[..., 1, 0] = 3 * (-ti + 1 + t - t**2)
        G[..., 1, 1] = ti**2 + 3 * ti - 8 + 3 * t + t**2
    else:
        G[..., 0, 0] = 6 * (-1 + t)
        G[..., 0, 1] = 2 * (2 * ti - 1 - t)
        G[..., 1, 0] = 12 * (1 + 2 * t)
        G[..., 1, 1] = -2 * (ti + 13 + 4 * t)
    return G


# --------------------------------------------------------------------------
# 2D evolution matrices (one per diffusion-matrix entry)

def _g2d_blocks(tx, ty):
    tx = np.asarray(tx, dtype=complex)
    ty = np.asarray(ty, dtype=complex)
    tx, ty = np.broadcast_arrays(tx, ty)
    shape = tx.shape + (4, 4)
    G1 = np.zeros(shape, dtype=complex)
    G2 = np.zeros(shape, dtype=complex)
    G3 = np.zeros(shape, dtype=complex)
    G4 = np.zeros(shape, dtype=complex)
    X, Y = tx, ty

    G1[..., 0, 0] = 2 * (X - 1) ** 2 / X
    G1[..., 0, 1] = -(X - 1) ** 2 * (X + 1) / (3 * X**2)
    G1[..., 0, 3] = -(X - 1) ** 2 * (X + 1) * (Y + 1) / (12 * X**2 * Y)
    G1[..., 1, 0] = -3 * (X - 1) ** 2 * (X + 1) / (2 * X)
    G1[..., 1, 1] = (X - 1) ** 2 * (X * (X + 10) + 1) / (4 * X**2)
    G1[..., 1, 2] = (X - 1) ** 2 * (X + 1) * (Y + 1) / (9 * X * Y)
    G1[..., 1, 3] = (X - 1) ** 2 * (X * (X + 3) + 1) * (Y + 1) / (18 * X**2 * Y)
    G1[..., 2, 2] = (X - 1) ** 2 * (X * (X + 66) + 1) / (36 * X**2)
    G1[..., 2, 3] = -4 * (X - 1) ** 2 * (X + 1) / (9 * X**2)
    G1[..., 3, 2] = -4 * (X - 1) ** 2 * (X + 1) / (9 * X)
    G1[..., 3, 3] = (X - 1) ** 2 * (X * (X + 66) + 1) / (36 * X**2)

    G2[..., 0, 1] = (X - 1) * (Y**2 - 1) / (9 * X * Y)
    G2[..., 0, 3] = -(X - 1) * (Y - 1) * ((Y - 30) * Y + 1) / (36 * X * Y**2)
    G2[..., 1, 0] = -(X - 1) * (Y**2 - 1) / Y
    G2[..., 1, 1] = (X**2 - 1) * (Y**2 - 1) / (12 * X * Y)
    G2[..., 1, 2] = (X - 1) * (Y - 1) * (Y * (Y + 14) + 1) / (6 * Y**2)
    G2[..., 1, 3] = (X**2 - 1) * (Y - 1) ** 3 / (24 * X * Y**2)
    G2[..., 2, 0] = -(X**2 - 1) * (Y - 1) / (2 * X)
    G2[..., 2, 1] = (X - 1) * (X * (X + 34) + 1) * (Y - 1) / (18 * X**2)
    G2[..., 2, 2] = (X**2 - 1) * (Y**2 - 1) / (12 * X * Y)
    G2[..., 2, 3] = (X - 1) * ((X - 14) * X + 1) * (Y**2 - 1) / (72 * X**2 * Y)
    G2[..., 3, 0] = 4 * (X - 1) * (Y - 1)
    G2[..., 3, 1] = -2 * (X**2 - 1) * (Y - 1) / (3 * X)
    G2[..., 3, 2] = -2 * (X - 1) * (Y**2 - 1) / (3 * Y)
    G2[..., 3, 3] = -(X**2 - 1) * (Y**2 - 1) / (12 * X * Y)

    G3[..., 0, 2] = (X**2 - 1) * (Y - 1) / (9 * X * Y)
    G3[..., 0, 3] = -(X - 1) * ((X - 30) * X + 1) * (Y - 1) / (36 * X**2 * Y)
    G3[..., 1, 0] = -(X - 1) * (Y**2 - 1) / (2 * Y)
    G3[..., 1, 1] = (X**2 - 1) * (Y**2 - 1) / (12 * X * Y)
    G3[..., 1, 2] = (X - 1) * (Y - 1) * (Y * (Y + 34) + 1) / (18 * Y**2)
    G3[..., 1, 3] = (X**2 - 1) * (Y - 1) * ((Y - 14) * Y + 1) / (72 * X * Y**2)
    G3[..., 2, 0] = -(X**2 - 1) * (Y - 1) / X
    G3[..., 2, 1] = (X - 1) * (X * (X + 14) + 1) * (Y - 1) / (6 * X**2)
    G3[..., 2, 2] = (X**2 - 1) * (Y**2 - 1) / (12 * X * Y)
    G3[..., 2, 3] = (X - 1) ** 3 * (Y**2 - 1) / (24 * X**2 * Y)
    G3[..., 3, 0] = 4 * (X - 1) * (Y - 1)
    G3[..., 3, 1] = -2 * (X**2 - 1) * (Y - 1) / (3 * X)
    G3[..., 3, 2] = -2 * (X - 1) * (Y**2 - 1) / (3 * Y)
    G3[..., 3, 3] = -(X**2 - 1) * (Y**2 - 1) / (12 * X * Y)

    G4[..., 0, 0] = 2 * (Y - 1) ** 2 / Y
    G4[..., 0, 2] = -(Y - 1) ** 2 * (Y + 1) / (3 * Y**2)
    G4[..., 0, 3] = -(X + 1) * (Y - 1) ** 2 * (Y + 1) / (12 * X * Y**2)
    G4[..., 1, 1] = (Y - 1) ** 2 * (Y * (Y + 66) + 1) / (36 * Y**2)
    G4[..., 1, 3] = -4 * (Y - 1) ** 2 * (Y + 1) / (9 * Y**2)
    G4[..., 2, 0] = -3 * (Y - 1) ** 2 * (Y + 1) / (2 * Y)
    G4[..., 2, 1] = (X + 1) * (Y - 1) ** 2 * (Y + 1) / (9 * X * Y)
    G4[..., 2, 2] = (Y - 1) ** 2 * (Y * (Y + 10) + 1) / (4 * Y**2)
    G4[..., 2, 3] = (X + 1) * (Y - 1) ** 2 * (Y * (Y + 3) + 1) / (18 * X * Y**2)
    G4[..., 3, 1] = -4 * (Y - 1) ** 2 * (Y + 1) / (9 * Y)
    G4[..., 3, 3] = (Y - 1) ** 2 * (Y * (Y + 66) + 1) / (36 * Y**2)
    return G1, G2, G3, G4


def diffusion_matrix(a: float, b: float, theta: float) -> np.ndarray:
    """A = T^T diag(a, b) T with T the rotation by ``theta``."""
    s, c = math.sin(theta), math.cos(theta)
    return a * np.eye(2) + (b - a) * np.array([[s * s, c * s], [c * s, c * c]])


def assemble_g_2d_matrix(A, xi1, xi2) -> np.ndarray:
    """G for an arbitrary 2x2 diffusion matrix, dx = dy = 1."""
    A = np.asarray(A, dtype=float)
    blocks = _g2d_blocks(np.exp(1j * np.asarray(xi1, float)), np.exp(1j * np.asarray(xi2, float)))
    return A[0, 0] * blocks[0] + A[0, 1] * blocks[1] + A[1, 0] * blocks[2] + A[1, 1] * blocks[3]


def assemble_g_2d(a: float, b: float, theta: float, xi1, xi2) -> np.ndarray:
    if a < 0 or b < 0:
        raise ValueError("eigenvalues of the diffusion matrix must be nonnegative")
    return assemble_g_2d_matrix(diffusion_matrix(a, b, theta), xi1, xi2)


# --------------------------------------------------------------------------
# fully discrete amplification

def rk_stability_matrix(G, rk_order: int, nu: float) -> np.ndarray:
    """Truncated exponential sum_{m<=p} (nu G)^m / m!, batched over leading axes."""
    if rk_order not in (3, 4):
        raise ValueError("rk_order must be 3 or 4")
    G = np.asarray(G)
    Z = nu * G
    eye = np.broadcast_to(np.eye(G.shape[-1], dtype=np.result_type(G, complex)), G.shape)
    out = eye.copy()
    term = eye
    for m in range(1, rk_order + 1):
        term = term @ Z / m
        out = out + term
    return out


def spectral_radius(M) -> np.ndarray:
    """max |eigenvalue| of a square matrix (or stack of them)."""
    M = np.asarray(M)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError("expected square matrices")
    return np.max(np.abs(np.linalg.eigvals(M)), axis=-1)


def xi_samples(count: int) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, count)


def max_amplification_1d(variant, rk_order: int, nu: float, n_xi: int = 400) -> float:
    G = assemble_g_1d(variant, xi_samples(n_xi))
    return float(np.max(spectral_radius(rk_stability_matrix(G, rk_order, nu))))


def max_cfl_1d(variant=SchemeVariant.CENTRAL4, rk_order: int = 3, n_xi: int = 400,
               tol: float = 0.005, nu_max: float = 2.0) -> float:
    """Largest CFL number a dt / dx^2 for which every sampled mode is stable.

    Scans upward in steps of ``tol`` until the first unstable value, then
    bisects the last bracket down to 1e-9.
    """
    if n_xi < 400:
        raise ValueError("use at least 400 samples of xi")
    G = assemble_g_1d(variant, xi_samples(n_xi))

    def stable(nu):
        rho = spectral_radius(rk_stability_matrix(G, rk_order, nu))
        return bool(np.max(rho) <= 1.0 + STABILITY_SLACK)

    lo = 0.0
    hi = tol
    while stable(hi):
        lo = hi
        hi += tol
        if hi > nu_max:
            return nu_max
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class StabilityRegion:
    nu_values: np.ndarray
    thetas: np.ndarray
    stable: np.ndarray  # (n_theta, n_nu_a, n_nu_b)

    def rows(self):
        for k, th in enumerate(self.thetas):
            for i, na in enumerate(self.nu_values):
                for j, nb in enumerate(self.nu_values):
                    yield float(na), float(nb), float(th), bool(self.stable[k, i, j])


def stability_region_2d(rk_order: int = 3, nu_values=None, thetas=None, symbol_samples: int = 32) -> StabilityRegion:
    """Stable/unstable flags over (a dt, b dt, theta) with dx = dy = 1."""
    if symbol_samples < 10:
        raise ValueError("use at least 10 symbol samples per axis")
    if nu_values is None:
        nu_values = np.round(np.arange(31) * 0.01, 10)
    if thetas is None:
        thetas = np.array([0.0, np.pi / 12, np.pi / 6, np.pi / 4])
    nu_values = np.asarray(nu_values, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    s = xi_samples(symbol_samples)
    X1, X2 = np.meshgrid(s, s, indexing="ij")
    out = np.zeros((thetas.size, nu_values.size, nu_values.size), dtype=bool)
    for k, th in enumerate(thetas):
        Ga = assemble_g_2d(1.0, 0.0, th, X1, X2)
        Gb = assemble_g_2d(0.0, 1.0, th, X1, X2)
        for i, na in enumerate(nu_values):
            for j, nb in enumerate(nu_values):
                amp = rk_stability_matrix(na * Ga + nb * Gb, rk_order, 1.0)
                out[k, i, j] = np.max(spectral_radius(amp)) <= 1.0 + STABILITY_SLACK
    return StabilityRegion(nu_values, thetas, out)


# --------------------------------------------------------------------------
# eigen diagnostics

@dataclass
class EigenDiagnostics:
    xi: float
    lambda1: complex
    lambda2: complex
    V1: np.ndarray | None
    V2: np.ndarray | None
    u0_hat: np.ndarray | None

    @property
    def projections_available(self) -> bool:
        return self.V1 is not None


def discrete_initial_coefficients(xi: float) -> np.ndarray:
    return np.array([2.0 * math.sin(xi / 2) / xi, np.exp(0.5j * xi)])


def eigen_diagnostics_1d(xi: float, a: float = 1.0, dx: float = 1.0,
                         variant=SchemeVariant.CENTRAL4) -> EigenDiagnostics:
    """Eigenpairs of the dimensional G and the split of the discrete initial data.

    ``V1`` and ``V2`` are the components of ``u0_hat`` along the physical and
    spurious eigenvectors; they are ``None`` when the eigenbasis is
    (numerically) degenerate, e.g. at xi = +-pi.
    """
    G = a / dx**2 * assemble_g_1d(variant, xi)
    lam, vec = np.linalg.eig(G)
    omega = xi / dx
    order = np.argsort(np.abs(lam + a * omega**2))
    lam = lam[order]
    vec = vec[:, order]
    # coincident roots (xi = +-pi) make the physical/spurious split meaningless
    coincident = abs(lam[0] - lam[1]) <= 1e-8 * max(1.0, abs(lam[0]))
    if xi == 0 or coincident or abs(np.linalg.det(vec)) < 1e-8:
        return EigenDiagnostics(xi, lam[0], lam[1], None, None, None)
    u0 = discrete_initial_coefficients(xi)
    c = np.linalg.solve(vec, u0)
    return EigenDiagnostics(xi, lam[0], lam[1], c[0] * vec[:, 0], c[1] * vec[:, 1], u0)


def characteristic_coefficients_1d(xi, a: float = 1.0, dx: float = 1.0):
    """(c1, c2) of det(lambda I - G) = lambda^2 + c1 lambda + c2 from the assembled G."""
    G = a / dx**2 * assemble_g_1d(SchemeVariant.CENTRAL4, xi)
    tr = G[..., 0, 0] + G[..., 1, 1]
    det = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]
    return -tr, det
