"""Nystrom assembly of the boundary integral operators and layer potentials.

Scalar operators act on discretized densities sampled at the grid nodes;
spinor operators act on C^2-valued densities stored interleaved by node
(index 2*i + component).  Principal values use the alternate-point trapezoid
rule on smooth closed curves and Legendre product integration on panels;
logarithmic kernels use the periodic circulant log rule (smooth curves) or a
parameter-space log split on the singular panel.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from . import kernels as K
from .errors import (
    CriticalCouplingError,
    GridTooCoarse,
    PointOnCurveError,
    SpectralParameterError,
)
from .geometry import QuadratureGrid
from .kernels import Coupling
from .quadrature import (
    cauchy_moments,
    gauss_legendre,
    kress_log_weights,
    log_moments,
    product_weights,
)

_NEAR_SCALED = 1.5  # panel product integration radius, in scaled coordinates


@dataclass(frozen=True)
class ScalarOperator:
    matrix: np.ndarray
    grid: QuadratureGrid
    label: str
    z: float | None = None

    @property
    def n(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SpinorOperator:
    matrix: np.ndarray  # (2N, 2N), interleaved-by-node 2x2 blocks
    grid: QuadratureGrid
    label: str
    z: float | None = None
    coupling: Coupling | None = None

    @property
    def n(self):
        return self.matrix.shape[0]


def spinor_from_blocks(b11, b12, b21, b22) -> np.ndarray:
    n = b11.shape[0]
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    m[0::2, 0::2] = b11
    m[0::2, 1::2] = b12
    m[1::2, 0::2] = b21
    m[1::2, 1::2] = b22
    return m


def blocks_from_spinor(m):
    return m[0::2, 0::2], m[0::2, 1::2], m[1::2, 0::2], m[1::2, 1::2]


def coupling_diagonal(coupling: Coupling, n: int) -> np.ndarray:
    """(eps sigma_0 + mu sigma_3) as a (2N,) diagonal, interleaved."""
    return np.tile([coupling.eps + coupling.mu, coupling.eps - coupling.mu], n)


def sigma_nu_matrix(grid: QuadratureGrid) -> SpinorOperator:
    """Multiplication operator by sigma . nu(x)."""
    n = grid.n_nodes
    nc = grid.nc
    m = spinor_from_blocks(np.zeros((n, n)), np.diag(np.conj(nc)),
                           np.diag(nc), np.zeros((n, n)))
    return SpinorOperator(m, grid, "sigma_nu")


# ---------------------------------------------------------------------------
# Cauchy transform
# ---------------------------------------------------------------------------


def _pairwise(grid):
    """Cached displacement matrices: DX (complex x_i - y_j), R = |DX|."""
    cache = grid.cache()
    if "pairwise" not in cache:
        z = grid.zc
        dx = z[:, None] - z[None, :]
        r = np.abs(dx)
        np.fill_diagonal(r, 1.0)  # masked; diagonal handled explicitly
        cache["pairwise"] = (dx, r)
    return cache["pairwise"]


def cauchy_weight_table(grid: QuadratureGrid) -> np.ndarray:
    """Complex weights V with sum_j V[i,j] h(y_j) ~ pv int h(y)/(y - x_i) dy."""
    cache = grid.cache()
    if "cauchy_V" in cache:
        return cache["cauchy_V"]
    n = grid.n_nodes
    z = grid.zc
    if grid.kind == "trapezoid":
        dy = grid.weights * grid.tc  # complex line elements
        with np.errstate(divide="ignore", invalid="ignore"):
            V = 2.0 * dy[None, :] / (z[None, :] - z[:, None])
        parity = (np.arange(n)[:, None] - np.arange(n)[None, :]) % 2 == 1
        V = np.where(parity, V, 0.0)
    else:
        dy = grid.weights * grid.tc
        with np.errstate(divide="ignore", invalid="ignore"):
            V = dy[None, :] / (z[None, :] - z[:, None])
        np.fill_diagonal(V, 0.0)
        norder = len(gauss_legendre(8)[0])
        for p in grid.panels:
            sl = slice(p.start, p.stop)
            mid = 0.5 * (p.za + p.zb)
            half = 0.5 * (p.zb - p.za)
            xhat = (z - mid) / half
            snod = grid.panel_s[sl]
            dyds = grid.dy_dparam[sl]
            ynod = z[sl]
            # self-panel rows: parameter-space principal value
            for row in range(p.start, p.stop):
                s0 = snod[row - p.start]
                vt = product_weights(cauchy_moments(s0, norder, True), norder)
                num = snod - s0
                den = ynod - z[row]
                ratio = np.empty(norder, dtype=complex)
                nz = num != 0.0
                ratio[nz] = num[nz] / den[nz]
                ratio[~nz] = 1.0 / dyds[~nz]
                V[row, sl] = vt * dyds * ratio
            if not p.straight:
                continue
            near = (np.abs(xhat) <= _NEAR_SCALED)
            near[sl] = False
            for row in np.nonzero(near)[0]:
                x0 = xhat[row]
                vt = product_weights(cauchy_moments(x0, norder, False), norder)
                num = snod - x0
                den = ynod - z[row]
                V[row, sl] = vt * dyds * num / den
    V.setflags(write=False)
    cache["cauchy_V"] = V
    return V


def assemble_cauchy(grid: QuadratureGrid) -> ScalarOperator:
    """C_Sigma g(x) = (i/2pi) pv int g(y)/(x - y) dy, complex line element dy."""
    if grid.n_nodes < 16:
        raise GridTooCoarse("need at least 16 nodes for Cauchy assembly")
    V = cauchy_weight_table(grid)
    return ScalarOperator(-(1j / (2 * np.pi)) * V, grid, "C_Sigma")


def cauchy_block_matrices(grid: QuadratureGrid):
    """Matrices of C_Sigma t* and t C_Sigma* (the off-diagonal blocks at z = m)."""
    cache = grid.cache()
    if "cauchy_blocks" not in cache:
        a = assemble_cauchy(grid).matrix
        tc = grid.tc
        upper = a * np.conj(tc)[None, :]
        lower = -np.conj(a) * tc[None, :]
        cache["cauchy_blocks"] = (upper, lower)
    return cache["cauchy_blocks"]


def assemble_Cm(grid: QuadratureGrid) -> SpinorOperator:
    """The singular matrix operator at z = m: off-diagonal Cauchy blocks."""
    upper, lower = cauchy_block_matrices(grid)
    n = grid.n_nodes
    zero = np.zeros((n, n))
    return SpinorOperator(spinor_from_blocks(zero, upper, lower, zero), grid, "C_m")


# ---------------------------------------------------------------------------
# logarithmic kernels
# ---------------------------------------------------------------------------


def log_kernel_matrix(grid, a_eval, b_eval, a_diag, b_diag) -> np.ndarray:
    """Nystrom matrix for kernel a(x,y) log|x-y| + b(x,y) against arclength.

    a_eval/b_eval map (R, DX) -> (N, N) values (diagonal entries ignored);
    a_diag/b_diag are length-N diagonal limits.
    """
    n = grid.n_nodes
    dx, r = _pairwise(grid)
    A = np.asarray(a_eval(r, dx), dtype=complex)
    B = np.asarray(b_eval(r, dx), dtype=complex)
    A[np.diag_indices(n)] = a_diag
    B[np.diag_indices(n)] = b_diag
    if grid.kind == "trapezoid":
        sp = np.abs(grid.dy_dparam)  # |dz/dtheta|
        th = grid.param
        c = kress_log_weights(n)
        KW = c[(np.arange(n)[:, None] - np.arange(n)[None, :]) % n]
        with np.errstate(divide="ignore", invalid="ignore"):
            sin2 = 2.0 * np.abs(np.sin(0.5 * (th[:, None] - th[None, :])))
            logpsi = np.log(r / sin2)
        logpsi[np.diag_indices(n)] = np.log(sp)
        M = A * (0.5 * KW + (2 * np.pi / n) * logpsi) * sp[None, :]
        M += B * grid.weights[None, :]
        return M
    # panel flavour: plain far quadrature, parameter log split on the own panel
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.log(r)
    M = (A * logr + B) * grid.weights[None, :]
    norder = len(gauss_legendre(8)[0])
    for p in grid.panels:
        sl = slice(p.start, p.stop)
        snod = grid.panel_s[sl]
        jac = np.abs(grid.dy_dparam[sl])
        for row in range(p.start, p.stop):
            s0 = snod[row - p.start]
            lw = product_weights(log_moments(s0, norder, True).real, norder)
            dspar = np.abs(snod - s0)
            logphi = np.empty(norder)
            nz = dspar != 0.0
            logphi[nz] = np.log(r[row, sl][nz] / dspar[nz])
            logphi[~nz] = np.log(jac[~nz])
            M[row, sl] = A[row, sl] * (jac * lw + logphi * grid.weights[sl]) \
                + B[row, sl] * grid.weights[sl]
    return M


def _scalar_k0_matrix(grid, z: float, mass: float) -> np.ndarray:
    """Matrix of (1/2pi) K0(kappa |x-y|) against arclength (real symmetric kernel)."""
    cache = grid.cache()
    key = ("k0mat", z, mass)
    if key not in cache:
        kappa = K.gap_kappa(z, mass)
        pref = 1.0 / (2 * np.pi)
        mat = log_kernel_matrix(
            grid,
            lambda r, dx: -pref * K.bessel_i0(kappa * r),
            lambda r, dx: pref * K.b_k0(r, kappa),
            np.full(grid.n_nodes, -pref),
            np.full(grid.n_nodes, pref * K.b_k0_at_zero(kappa)),
        ).real
        mat.setflags(write=False)
        cache[key] = mat
    return cache[key]


def assemble_Sz(grid: QuadratureGrid, z: float, coupling: Coupling) -> ScalarOperator:
    """(S_z g)(x) = (1/2pi) int K0(kappa|x-y|) g(y) ds(y)."""
    return ScalarOperator(_scalar_k0_matrix(grid, z, coupling.mass), grid, "S_z", z)


def assemble_Cz(grid: QuadratureGrid, z: float, coupling: Coupling) -> SpinorOperator:
    """Principal-value operator with the full gap kernel at real z, |z| < m."""
    mass = coupling.mass
    if abs(z) >= mass:
        raise SpectralParameterError(f"z = {z} outside the open gap (-{mass}, {mass})")
    kappa = K.gap_kappa(z, mass)
    pref = 1.0 / (2 * np.pi)
    s_mat = _scalar_k0_matrix(grid, z, mass)
    b11 = (mass + z) * s_mat
    b22 = (z - mass) * s_mat

    def a_off(conjugate):
        def eval_(r, dx):
            phase = (np.conj(dx) if conjugate else dx) / r
            return 1j * pref * kappa * K.bessel_i1(kappa * r) * phase
        return eval_

    def b_off(conjugate):
        def eval_(r, dx):
            phase = (np.conj(dx) if conjugate else dx) / r
            return 1j * pref * K.b_k1(r, kappa) * phase
        return eval_

    zeros = np.zeros(grid.n_nodes)
    b12 = log_kernel_matrix(grid, a_off(True), b_off(True), zeros, zeros)
    b21 = log_kernel_matrix(grid, a_off(False), b_off(False), zeros, zeros)
    diff = spinor_from_blocks(b11, b12, b21, b22)
    cm = assemble_Cm(grid).matrix
    return SpinorOperator(cm + diff, grid, "C_z", z, coupling)


# ---------------------------------------------------------------------------
# derived operators
# ---------------------------------------------------------------------------


def _cz_or_cm(grid, z, coupling):
    if z == coupling.mass:
        return assemble_Cm(grid).matrix
    return assemble_Cz(grid, z, coupling).matrix


def assemble_theta(grid: QuadratureGrid, z: float, coupling: Coupling) -> SpinorOperator:
    """Theta_z = I + (eps sigma_0 + mu sigma_3) C_z; z = m uses the Cauchy limit."""
    c = _cz_or_cm(grid, z, coupling)
    m = np.eye(c.shape[0], dtype=complex) + coupling_diagonal(coupling, grid.n_nodes)[:, None] * c
    return SpinorOperator(m, grid, "Theta_z", z, coupling)


def assemble_lambda(grid: QuadratureGrid, z: float, coupling: Coupling) -> SpinorOperator:
    """Lambda_z = (eps sigma_0 - mu sigma_3)/(eps^2 - mu^2) + C_z."""
    if coupling.is_critical:
        raise CriticalCouplingError("Lambda_z undefined at |eps| = |mu|")
    c = _cz_or_cm(grid, z, coupling)
    d = np.tile([1.0 / (coupling.eps + coupling.mu),
                 1.0 / (coupling.eps - coupling.mu)], grid.n_nodes)
    return SpinorOperator(np.diag(d).astype(complex) + c, grid, "Lambda_z", z, coupling)


def assemble_gamma(grid: QuadratureGrid, coupling: Coupling) -> SpinorOperator:
    """Gamma with (eps^2 - mu^2) Lambda_m = eps sigma_0 + Gamma."""
    upper, lower = cauchy_block_matrices(grid)
    n = grid.n_nodes
    d = coupling.strength
    eye = np.eye(n)
    m = spinor_from_blocks(-coupling.mu * eye, d * upper, d * lower, coupling.mu * eye)
    return SpinorOperator(m, grid, "Gamma", coupling.mass, coupling)


def hermitian_defect(op: SpinorOperator | ScalarOperator) -> float:
    return float(np.max(np.abs(op.matrix - op.matrix.conj().T)))


def lu_solve_with_cond(matrix: np.ndarray, rhs: np.ndarray):
    """LU solve with a 1-norm condition estimate (reported alongside inverses)."""
    lu, piv = sla.lu_factor(matrix)
    anorm = np.linalg.norm(matrix, 1)
    gecon = lapack.zgecon if np.iscomplexobj(matrix) else lapack.dgecon
    rcond, _ = gecon(lu, anorm)
    cond = np.inf if rcond == 0 else 1.0 / rcond
    return sla.lu_solve((lu, piv), rhs), cond


# ---------------------------------------------------------------------------
# layer potential
# ---------------------------------------------------------------------------


def _phi_z_apply(points, srcs, weights, g2, z, coupling, chunk=1_000_000):
    """sum_j phi_z(p - y_j) g_j w_j for points (M,2), g2 (N,2), chunked."""
    gw = g2 * weights[:, None]
    n = srcs.shape[0]
    rows = max(1, chunk // max(n, 1))
    out = np.empty((points.shape[0], 2), dtype=complex)
    for lo in range(0, points.shape[0], rows):
        hi = min(lo + rows, points.shape[0])
        d = points[lo:hi, None, :] - srcs[None, :, :]
        phi = K.phi_z(d, z, coupling)
        out[lo:hi] = np.einsum("mnab,nb->ma", phi, gw)
    return out


def _upsample_closed(grid, g2, factor):
    """Trigonometric upsampling of grid geometry and density on a single arc."""
    edge = grid.curve.edges[0]
    n = grid.n_nodes
    n_up = n * factor
    t = np.arange(n_up) / n_up
    pos = edge.point(t)
    vel = edge.velocity(t)
    speed = np.linalg.norm(vel, axis=-1)
    w = speed / n_up
    g_up = np.empty((n_up, 2), dtype=complex)
    for c in range(2):
        spec = np.fft.fft(g2[:, c])
        pad = np.zeros(n_up, dtype=complex)
        half = n // 2
        pad[:half] = spec[:half]
        pad[-half + 1:] = spec[-half + 1:]
        pad[half] = 0.5 * spec[half]
        pad[-half] += 0.5 * spec[half]
        g_up[:, c] = np.fft.ifft(pad) * factor
    return pos, w, g_up


def evaluate_potential(grid, density, z, coupling, points, near_scheme="auto"):
    """Layer potential Phi_z applied to a boundary density, evaluated off Sigma.

    Returns (values (M, 2) complex, degraded (M,) bool).  Points closer than
    ten local mesh widths are evaluated with trigonometric upsampling on
    smooth grids; on panel grids they are flagged as degraded instead.
    """
    g2 = np.asarray(density, dtype=complex)
    if g2.ndim == 1:
        g2 = g2.reshape(-1, 2)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dist = np.linalg.norm(points[:, None, :] - grid.nodes[None, :, :], axis=-1)
    jmin = np.argmin(dist, axis=1)
    dmin = dist[np.arange(len(points)), jmin]
    scale = max(1.0, float(np.max(np.abs(grid.nodes))))
    if np.any(dmin < 1e-12 * scale):
        raise PointOnCurveError("evaluation point lies on the curve")
    near = dmin < 10.0 * grid.weights[jmin]
    values = _phi_z_apply(points, grid.nodes, grid.weights, g2, z, coupling)
    degraded = np.zeros(len(points), dtype=bool)
    if not np.any(near) or near_scheme == "plain":
        degraded |= near
        return values, degraded
    if grid.kind != "trapezoid":
        degraded |= near
        return values, degraded
    # spectral upsampling for the near points
    target = 8.0 / max(np.min(dmin[near]), 1e-6)
    factor = 1
    while grid.n_nodes * factor < target and grid.n_nodes * factor < 131072:
        factor *= 2
    if grid.n_nodes * factor < target:
        degraded |= near
    if factor > 1:
        pos, w, g_up = _upsample_closed(grid, g2, factor)
        values[near] = _phi_z_apply(points[near], pos, w, g_up, z, coupling)
    return values, degraded


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

_MAGIC = b"DSH1"


def matrix_to_csv(matrix: np.ndarray, path):
    """Real/imaginary interleaved CSV, one matrix row per line."""
    m = np.asarray(matrix, dtype=complex)
    inter = np.empty((m.shape[0], 2 * m.shape[1]))
    inter[:, 0::2] = m.real
    inter[:, 1::2] = m.imag
    np.savetxt(path, inter, delimiter=",", fmt="%.17g")


def matrix_to_binary(matrix: np.ndarray, path):
    """Binary container: magic 'DSH1', u64 rows, u64 cols, f64 (re, im) pairs."""
    m = np.asarray(matrix, dtype=complex)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQ", m.shape[0], m.shape[1]))
        inter = np.empty((m.shape[0], 2 * m.shape[1]))
        inter[:, 0::2] = m.real
        inter[:, 1::2] = m.imag
        fh.write(inter.astype("<f8").tobytes())


def matrix_from_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(rows, 2 * cols)
        return data[:, 0::2] + 1j * data[:, 1::2]
