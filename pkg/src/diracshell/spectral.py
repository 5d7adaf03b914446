"""Gap eigenvalues via the boundary characterization and identity checks.

For |eps| != |mu| the discrete eigenvalues in (-m, m) are the z where the
Hermitian boundary operator Lambda_z becomes singular; for eps = +-mu != 0
the scalar operator lambda_z = 1/(2 eps) + (z +- m) S_z takes that role.
Roots are located by tracking the count of negative eigenvalues over a
sweep (bisection on count changes, then secant polish on the crossing
branch), which is robust to branch reordering at crossings.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import boundary_ops as bo
from .errors import IllConditionedWarning, SpectralParameterError
from .geometry import QuadratureGrid
from .kernels import Coupling


@dataclass(frozen=True)
class BranchData:
    z_samples: np.ndarray  # strictly increasing
    eigenvalues: np.ndarray  # (samples, k), ascending per sample
    route: str  # "lambda" | "scalar" | "empty"
    coupling: Coupling
    max_jump: float
    jump_threshold: float
    notes: tuple = ()

    @property
    def continuous(self) -> bool:
        return self.max_jump <= self.jump_threshold


@dataclass
class Eigenpair:
    z0: float
    density: np.ndarray  # (2N,) complex, interleaved, unit norm
    residual: float  # ||Theta_{z0} density||_2
    cluster: int
    second_smallest: float  # |second smallest eigenvalue| at the root
    condition: float  # spread of the Hermitian spectrum at the root
    coupling: Coupling


def _route(coupling: Coupling) -> str:
    if coupling.eps == 0.0 and coupling.mu == 0.0:
        return "empty"
    if coupling.is_critical:
        return "scalar"
    return "lambda"


def _hermitian_eigs(grid, coupling, z, want_vectors=False):
    if _route(coupling) == "scalar":
        s = bo.assemble_Sz(grid, z, coupling).matrix
        sign = 1.0 if coupling.eps == coupling.mu else -1.0
        mat = (z + sign * coupling.mass) * s
        mat = 0.5 * (mat + mat.T) + np.eye(grid.n_nodes) / (2.0 * coupling.eps)
    else:
        lam = bo.assemble_lambda(grid, z, coupling).matrix
        mat = 0.5 * (lam + lam.conj().T)
    if want_vectors:
        return np.linalg.eigh(mat)
    return np.linalg.eigvalsh(mat)


def default_window(coupling: Coupling) -> tuple:
    m = coupling.mass
    return (-m + 0.01 * m, m - 0.01 * m)


def gap_sweep(grid: QuadratureGrid, coupling: Coupling,
              z_range: tuple | None = None, samples: int = 128,
              jump_threshold: float | None = None) -> BranchData:
    """Sorted Hermitian eigenvalue trajectories over a z sweep in the gap.

    The default continuity threshold (a quarter of the median eigenvalue
    spacing) is meaningful for well-separated branches only; for clustered
    spectra pass an explicit jump_threshold, e.g. calibrated against a
    denser sweep (jumps of continuous branches scale linearly in the step).
    """
    if samples < 16:
        raise SpectralParameterError("need at least 16 sweep samples")
    route = _route(coupling)
    if route == "empty":
        return BranchData(np.zeros(0), np.zeros((0, 0)), "empty", coupling, 0.0, np.inf,
                          notes=("free operator: spectrum (-inf,-|m|] U [|m|,inf), "
                                 "no shell interaction",))
    lo, hi = z_range if z_range is not None else default_window(coupling)
    m = coupling.mass
    if not (-m < lo < hi < m):
        raise SpectralParameterError("sweep window must lie inside the open gap")
    zs = np.linspace(lo, hi, samples)
    eigs = np.stack([np.sort(_hermitian_eigs(grid, coupling, z)) for z in zs])
    jumps = np.abs(np.diff(eigs, axis=0))
    max_jump = float(jumps.max()) if jumps.size else 0.0
    if jump_threshold is None:
        spacing = float(np.median(np.diff(eigs, axis=1))) if eigs.shape[1] > 1 else np.inf
        jump_threshold = 0.25 * spacing
    return BranchData(zs, eigs, route, coupling, max_jump, float(jump_threshold))


def _neg_count(grid, coupling, z) -> int:
    return int(np.sum(_hermitian_eigs(grid, coupling, z) < 0.0))


def _smallest_eig(grid, coupling, z) -> float:
    ev = _hermitian_eigs(grid, coupling, z)
    return float(ev[np.argmin(np.abs(ev))])


def find_eigenvalues(grid: QuadratureGrid, coupling: Coupling,
                     z_range: tuple | None = None, samples: int = 128,
                     tol: float = 1e-12) -> list:
    """Locate gap eigenvalues: bisection on the negative-eigenvalue count,
    then secant polish of the crossing branch to |lambda| <= 1e-10."""
    if tol < 1e-12:
        raise SpectralParameterError("z tolerance below supported resolution")
    route = _route(coupling)
    if route == "empty":
        return []
    lo, hi = z_range if z_range is not None else default_window(coupling)
    zs = np.linspace(lo, hi, samples)
    counts = [_neg_count(grid, coupling, z) for z in zs]
    brackets = []  # (a, b, multiplicity) with the crossing isolated in [a, b]

    def isolate(a, b, ca, cb, depth=0):
        # narrow until width <= resolution, splitting whenever crossings
        # separate; a bracket may still hold several coincident crossings
        while b - a > max(tol, 1e-5):
            mid = 0.5 * (a + b)
            cm = _neg_count(grid, coupling, mid)
            if cm == ca:
                a = mid
            elif cm == cb:
                b = mid
            else:  # crossings on both sides of mid
                isolate(a, mid, ca, cm, depth + 1)
                a, ca = mid, cm
        brackets.append((a, b, abs(cb - ca)))

    for i in range(samples - 1):
        if counts[i + 1] != counts[i]:
            isolate(zs[i], zs[i + 1], counts[i], counts[i + 1])

    pairs = []  # eigenpairs
    roots = []
    cluster = 0
    for a, b, mult in sorted(brackets):
        # secant polish on the branch crossing zero
        za, zb = a, b
        fa, fb = _smallest_eig(grid, coupling, za), _smallest_eig(grid, coupling, zb)
        z0 = zb
        for _ in range(60):
            if fb == fa:
                break
            z0 = zb - fb * (zb - za) / (fb - fa)
            z0 = min(max(z0, min(za, zb) - 1e-3), max(za, zb) + 1e-3)
            f0 = _smallest_eig(grid, coupling, z0)
            za, fa, zb, fb = zb, fb, z0, f0
            if abs(f0) <= 1e-10 or abs(zb - za) <= tol:
                break
        if roots and abs(z0 - roots[-1]) <= 10.0 * tol:
            continue  # duplicate of the previous root
        roots.append(z0)
        ev, vec = _hermitian_eigs(grid, coupling, z0, want_vectors=True)
        order = np.argsort(np.abs(ev))
        second = float(np.abs(ev[order[min(mult, len(ev) - 1)]]))
        if second < 1e-6:
            warnings.warn(
                f"second-smallest eigenvalue {second:.2e} at root {z0:.6f}: "
                "possible multiplicity", IllConditionedWarning)
        cond = float(np.max(np.abs(ev)) / max(second, np.finfo(float).tiny))
        theta = bo.assemble_theta(grid, z0, coupling).matrix
        for k in range(mult):
            g = _embed_density(vec[:, order[k]], route, coupling, grid)
            g = g / np.linalg.norm(g)
            residual = float(np.linalg.norm(theta @ g))
            pairs.append(Eigenpair(float(z0), g, residual, cluster, second, cond,
                                   coupling))
        cluster += 1
    return pairs


def _embed_density(vec, route, coupling, grid):
    if route != "scalar":
        return vec.astype(complex)
    g = np.zeros(2 * grid.n_nodes, dtype=complex)
    if coupling.eps == coupling.mu:
        g[0::2] = vec
    else:
        g[1::2] = vec
    return g


def theta_min_singular(grid: QuadratureGrid, coupling: Coupling, z: float) -> float:
    """Smallest singular value of Theta_z (kernel detection for any coupling)."""
    theta = bo.assemble_theta(grid, z, coupling).matrix
    return float(np.linalg.svd(theta, compute_uv=False)[-1])


def eigenfunction(grid: QuadratureGrid, pair: Eigenpair, points):
    """Evaluate the eigenfunction Phi_{z0} g at points off the curve."""
    return bo.evaluate_potential(grid, pair.density, pair.z0, pair.coupling, points)


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------


@dataclass
class IdentityCheck:
    name: str
    residual: float
    threshold: float
    passed: bool | None  # None: not applicable on this grid
    details: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    z: float
    coupling: Coupling
    grid_kind: str
    n_nodes: int
    checks: list

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)

    def to_json_dict(self) -> dict:
        return {
            "z": self.z,
            "eps": self.coupling.eps,
            "mu": self.coupling.mu,
            "mass": self.coupling.mass,
            "grid_kind": self.grid_kind,
            "n_nodes": self.n_nodes,
            "checks": [
                {"name": c.name, "residual": c.residual, "threshold": c.threshold,
                 "passed": c.passed, "details": c.details}
                for c in self.checks
            ],
        }


DEFAULT_TOLERANCES = {
    "cc2": 1e-4,
    "jump_two_sided": 1e-2,
    "jump_one_sided": 2e-2,
    "csq_opnorm": 1e-6,
    "resolvent_factor": 1e-9,  # times cond(Lambda_z)
}


def _smooth_test_density(grid, seed=1234):
    rng = np.random.default_rng(seed)
    n = grid.n_nodes
    dens = np.zeros((n, 2), dtype=complex)
    th = grid.param
    for comp in range(2):
        for k in range(-8, 9):
            dens[:, comp] += (rng.normal() + 1j * rng.normal()) * np.exp(1j * k * th)
    return dens / np.abs(dens).max()


def verify_identities(grid: QuadratureGrid, z: float, coupling: Coupling,
                      tolerances: dict | None = None, offset: float = 1e-3,
                      seed: int = 1234) -> VerificationReport:
    """Run the four operator-identity checks and report measured residuals."""
    tols = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tols.update(tolerances)
    n = grid.n_nodes
    checks = []

    cz = bo.assemble_Cz(grid, z, coupling)
    snu = bo.sigma_nu_matrix(grid).matrix
    m1 = cz.matrix @ snu
    cc2 = float(np.linalg.norm(m1 @ m1 + 0.25 * np.eye(2 * n), 2))
    checks.append(IdentityCheck("cc2", cc2, tols["cc2"], cc2 <= tols["cc2"]))

    if grid.kind == "trapezoid":
        dens = _smooth_test_density(grid, seed)
        pin = grid.nodes - offset * grid.normals
        pout = grid.nodes + offset * grid.normals
        vin, _ = bo.evaluate_potential(grid, dens, z, coupling, pin)
        vout, _ = bo.evaluate_potential(grid, dens, z, coupling, pout)
        snu_blocks = np.zeros((n, 2, 2), complex)
        snu_blocks[:, 0, 1] = np.conj(grid.nc)
        snu_blocks[:, 1, 0] = grid.nc
        snu_g = np.einsum("nab,nb->na", snu_blocks, dens)
        want_jump = -1j * snu_g
        rel2 = float(np.linalg.norm(vin - vout - want_jump)
                     / np.linalg.norm(want_jump))
        czg = (cz.matrix @ dens.reshape(-1)).reshape(-1, 2)
        want_in = -0.5j * snu_g + czg
        want_out = +0.5j * snu_g + czg
        rel1 = max(
            float(np.linalg.norm(vin - want_in) / np.linalg.norm(want_in)),
            float(np.linalg.norm(vout - want_out) / np.linalg.norm(want_out)),
        )
        checks.append(IdentityCheck("jump_two_sided", rel2, tols["jump_two_sided"],
                                    rel2 <= tols["jump_two_sided"],
                                    {"offset": offset}))
        checks.append(IdentityCheck("jump_one_sided", rel1, tols["jump_one_sided"],
                                    rel1 <= tols["jump_one_sided"],
                                    {"offset": offset}))
    else:
        checks.append(IdentityCheck("jump_two_sided", float("nan"),
                                    tols["jump_two_sided"], None,
                                    {"note": "near-curve evaluation needs a smooth grid"}))
        checks.append(IdentityCheck("jump_one_sided", float("nan"),
                                    tols["jump_one_sided"], None,
                                    {"note": "near-curve evaluation needs a smooth grid"}))

    csigma = bo.assemble_cauchy(grid).matrix
    resid_mat = csigma @ csigma - 0.25 * np.eye(n)
    sv = np.linalg.svd(resid_mat, compute_uv=False)
    opnorm = float(sv[0])
    decay = float(sv[min(n // 4, n - 1)] / max(sv[0], np.finfo(float).tiny))
    if grid.kind == "trapezoid":
        checks.append(IdentityCheck("csq_compact", opnorm, tols["csq_opnorm"],
                                    opnorm <= tols["csq_opnorm"],
                                    {"sv_decay_at_quarter": decay}))
    else:
        checks.append(IdentityCheck("csq_compact", opnorm, tols["csq_opnorm"], None,
                                    {"sv_decay_at_quarter": decay,
                                     "note": "operator-norm criterion applies to "
                                             "smooth curves"}))

    if not coupling.is_critical:
        lam = bo.assemble_lambda(grid, z, coupling).matrix
        inv, cond = bo.lu_solve_with_cond(lam, np.eye(2 * n, dtype=complex))
        mcpl = bo.coupling_diagonal(coupling, n)
        e = mcpl[:, None] * (np.eye(2 * n) - cz.matrix @ inv) - inv
        resid = float(np.max(np.abs(e)))
        thr = tols["resolvent_factor"] * cond
        checks.append(IdentityCheck("resolvent_cancellation", resid, thr,
                                    resid <= thr, {"cond_lambda": cond}))
    else:
        checks.append(IdentityCheck("resolvent_cancellation", float("nan"), 0.0, None,
                                    {"note": "Lambda_z undefined at |eps| = |mu|"}))

    return VerificationReport(z, coupling, grid.kind, n, checks)
