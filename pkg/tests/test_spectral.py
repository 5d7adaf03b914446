import math

import numpy as np
import pytest

from diracshell import boundary_ops as bo
from diracshell import geometry as geo
from diracshell import spectral as sp
from diracshell.errors import SpectralParameterError
from diracshell.kernels import Coupling


def test_free_coupling_empty_sweep(circle_grid_128):
    bd = sp.gap_sweep(circle_grid_128, Coupling(0.0, 0.0, 1.0))
    assert bd.route == "empty"
    assert bd.z_samples.size == 0
    assert any("free operator" in n for n in bd.notes)
    assert sp.find_eigenvalues(circle_grid_128, Coupling(0.0, 0.0, 1.0)) == []


def test_sweep_continuity_dense_oracle(circle_grid_256):
    c = Coupling(0.0, 1.0, 1.0)
    coarse = sp.gap_sweep(circle_grid_256, c, z_range=(-0.9, 0.9), samples=64)
    fine = sp.gap_sweep(circle_grid_256, c, z_range=(-0.9, 0.9), samples=127)
    # jumps of continuous branches scale linearly with the step
    assert fine.max_jump <= 0.6 * coarse.max_jump + 1e-12
    recheck = sp.gap_sweep(circle_grid_256, c, z_range=(-0.9, 0.9), samples=64,
                           jump_threshold=2.2 * fine.max_jump)
    assert recheck.continuous


def test_sweep_window_validation(circle_grid_128):
    with pytest.raises(SpectralParameterError):
        sp.gap_sweep(circle_grid_128, Coupling(1.0, 0.0), z_range=(-2.0, 0.5))
    with pytest.raises(SpectralParameterError):
        sp.gap_sweep(circle_grid_128, Coupling(1.0, 0.0), samples=4)


def test_branch_mirror_symmetry(circle_grid_128):
    # eigenvalue trajectories for (eps, mu) at z mirror those for (-eps, mu)
    # at -z; numerical observation on the circle, checked by recomputation
    zs = np.linspace(-0.8, 0.8, 9)
    for z in zs:
        e1 = np.sort(sp._hermitian_eigs(circle_grid_128, Coupling(1.0, 0.5), z))
        e2 = np.sort(sp._hermitian_eigs(circle_grid_128, Coupling(-1.0, 0.5), -z))
        assert np.max(np.abs(e1 + e2[::-1])) < 1e-6


def test_find_eigenvalues_circle(circle_grid_128):
    pairs = sp.find_eigenvalues(circle_grid_128, Coupling(1.0, 0.0, 1.0), samples=48)
    assert len(pairs) >= 1
    for p in pairs:
        assert -1.0 < p.z0 < 1.0
        assert p.residual < 1e-8
        assert abs(np.linalg.norm(p.density) - 1.0) < 1e-12


def test_root_count_stable_under_refinement(circle_curve, circle_grid_128,
                                            circle_grid_256):
    for coup in (Coupling(1.0, 0.0), Coupling(0.0, 1.0), Coupling(1.0, 1.0)):
        n1 = len(sp.find_eigenvalues(circle_grid_128, coup, samples=48))
        n2 = len(sp.find_eigenvalues(circle_grid_256, coup, samples=48))
        assert n1 == n2


def test_remark_reduction_pairing(circle_grid_128):
    e1 = sorted(p.z0 for p in sp.find_eigenvalues(circle_grid_128,
                                                  Coupling(1.0, 0.0), samples=48))
    e2 = sorted(p.z0 for p in sp.find_eigenvalues(circle_grid_128,
                                                  Coupling(-4.0, 0.0), samples=48))
    assert len(e1) == len(e2)
    assert np.max(np.abs(np.array(e1) - np.array(e2))) < 1e-6


def test_scalar_route_negative_coupling(circle_grid_128):
    pairs = sp.find_eigenvalues(circle_grid_128, Coupling(-1.0, -1.0), samples=48)
    assert len(pairs) >= 1
    for p in pairs:
        # density is supported on the first spinor component for eps = mu
        assert np.max(np.abs(p.density[1::2])) < 1e-14
        assert p.residual < 1e-8
        # full-operator cross-check: Theta_z is singular there
        assert sp.theta_min_singular(circle_grid_128, p.coupling, p.z0) < 1e-7


def test_scalar_route_positive_coupling_empty(circle_grid_128):
    assert sp.find_eigenvalues(circle_grid_128, Coupling(1.0, 1.0), samples=48) == []


def test_no_spurious_roots_dominated_coupling(circle_grid_256):
    # |eps| < |mu| away from thresholds: every detected root must survive the
    # PDE-residual test (none may be a quadrature artifact)
    c = Coupling(0.0, 1.0, 1.0)
    pairs = sp.find_eigenvalues(circle_grid_256, c, samples=48)
    rng = np.random.default_rng(21)
    for p in pairs:
        pts = []
        while len(pts) < 8:
            x = rng.uniform(-3, 3, size=2)
            if abs(np.linalg.norm(x) - 1.0) >= 0.2:
                pts.append(x)
        pts = np.array(pts)
        h = 1e-4
        vals = {}
        for dx, dy in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
            vals[(dx, dy)], _ = sp.eigenfunction(circle_grid_256, p,
                                                 pts + h * np.array([dx, dy]))
        s1 = np.array([[0, 1], [1, 0]], dtype=complex)
        s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
        s3 = np.array([[1, 0], [0, -1]], dtype=complex)
        d1 = (vals[(1, 0)] - vals[(-1, 0)]) / (2 * h)
        d2 = (vals[(0, 1)] - vals[(0, -1)]) / (2 * h)
        f0 = vals[(0, 0)]
        resid = -1j * (d1 @ s1.T + d2 @ s2.T) + f0 @ s3.T - p.z0 * f0
        assert np.linalg.norm(resid) / np.linalg.norm(f0) < 1e-3


def test_lambda_m_lower_bound(circle_grid_256):
    c = Coupling(1.0, 2.0, 1.0)
    lam = bo.assemble_lambda(circle_grid_256, c.mass, c).matrix
    h = 0.5 * (lam + lam.conj().T) * c.strength
    ev = np.linalg.eigvalsh(h)
    assert np.min(np.abs(ev)) >= (abs(c.mu) - abs(c.eps)) - 1e-3


def test_eigenfunction_pde_residual(circle_grid_256):
    c = Coupling(1.0, 0.0, 1.0)
    pairs = sp.find_eigenvalues(circle_grid_256, c, samples=48)
    p = pairs[-1]
    rng = np.random.default_rng(3)
    pts = []
    while len(pts) < 20:
        x = rng.uniform(-3, 3, size=2)
        if abs(np.linalg.norm(x) - 1.0) >= 0.2:
            pts.append(x)
    pts = np.array(pts)
    h = 1e-4
    stencil = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    vals = {}
    for dx, dy in stencil:
        shifted = pts + h * np.array([dx, dy])
        vals[(dx, dy)], _ = sp.eigenfunction(circle_grid_256, p, shifted)
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    d1 = (vals[(1, 0)] - vals[(-1, 0)]) / (2 * h)
    d2 = (vals[(0, 1)] - vals[(0, -1)]) / (2 * h)
    f0 = vals[(0, 0)]
    resid = (-1j * (d1 @ s1.T + d2 @ s2.T) + f0 @ s3.T - p.z0 * f0)
    rel = np.linalg.norm(resid) / np.linalg.norm(f0)
    assert rel < 1e-3


def test_eigenfunction_decay(circle_grid_256):
    c = Coupling(1.0, 0.0, 1.0)
    p = sp.find_eigenvalues(circle_grid_256, c, samples=48)[-1]
    kappa = math.sqrt(1.0 - p.z0**2)
    v3, _ = sp.eigenfunction(circle_grid_256, p, np.array([[3.0, 0.0]]))
    v8, _ = sp.eigenfunction(circle_grid_256, p, np.array([[8.0, 0.0]]))
    a3 = np.max(np.abs(v3))
    a8 = np.max(np.abs(v8))
    assert a8 <= a3 * math.exp(-kappa * 4.0) / 2.0


def test_eigenfunction_transmission_condition(circle_grid_256):
    c = Coupling(1.0, 0.0, 1.0)
    p = sp.find_eigenvalues(circle_grid_256, c, samples=48)[-1]
    g = circle_grid_256
    h = 1e-3
    fin, _ = sp.eigenfunction(circle_grid_256, p, g.nodes - h * g.normals)
    fout, _ = sp.eigenfunction(circle_grid_256, p, g.nodes + h * g.normals)
    n = g.n_nodes
    snu = np.zeros((n, 2, 2), complex)
    snu[:, 0, 1] = np.conj(g.nc)
    snu[:, 1, 0] = g.nc
    mcoup = c.matrix()
    lhs = (fin + fout) / 2 @ mcoup.T + 1j * np.einsum("nab,nb->na", snu, fin - fout)
    rel = np.linalg.norm(lhs) / np.linalg.norm(fin)
    assert rel < 5e-2


def test_verify_identities_circle(circle_grid_256):
    rep = sp.verify_identities(circle_grid_256, 0.3, Coupling(3.0, 1.0, 1.0))
    assert rep.all_passed
    names = [c.name for c in rep.checks]
    assert names == ["cc2", "jump_two_sided", "jump_one_sided", "csq_compact",
                     "resolvent_cancellation"]


def test_verify_identities_square():
    g = geo.discretize(geo.build_curve(geo.square(1.0)), 32)
    rep = sp.verify_identities(g, 0.0, Coupling(1.0, 0.0, 1.0))
    by_name = {c.name: c for c in rep.checks}
    assert by_name["jump_two_sided"].passed is None
    assert by_name["csq_compact"].passed is None
    assert np.isfinite(by_name["cc2"].residual)
    assert by_name["resolvent_cancellation"].passed


def test_verify_identities_critical_coupling(circle_grid_128):
    rep = sp.verify_identities(circle_grid_128, 0.1, Coupling(1.0, 1.0, 1.0))
    by_name = {c.name: c for c in rep.checks}
    assert by_name["resolvent_cancellation"].passed is None
