"""Corner symbol machinery for the polygon Fredholm criterion.

Everything here is per-corner and purely analytic: the even function

    M_theta(x) = cosh((pi - theta) x) / (2 (1 + cosh(pi x))),

its supremum m(theta), the corner symbol determinant Delta on the line
xi = eta + i/2 (in closed form and by direct quadrature of the Mellin-type
integrals, which serves as the independent oracle), and the resulting
Fredholm decision for a polygon: Fredholm iff eps^2 - mu^2 < 1/m(omega)
with omega the sharpest effective corner opening.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError, CriticalCouplingError, DomainError
from .geometry import sharpest_angle
from .kernels import Coupling

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def M(theta: float, x):
    """M_theta(x), evaluated in overflow-safe exponential form.

    With a = |pi - theta| |x| and b = pi |x| all exponents are <= 0:
    M = (e^(a-b) + e^(-a-b)) / (2 (1 + e^(-b))^2).
    """
    if not 0.0 < theta < 2.0 * math.pi:
        raise DomainError(f"theta must lie in (0, 2pi), got {theta}")
    ax = np.abs(np.asarray(x, dtype=float))
    a = abs(math.pi - theta) * ax
    b = math.pi * ax
    val = 0.5 * (np.exp(a - b) + np.exp(-a - b)) / (1.0 + np.exp(-b)) ** 2
    return float(val) if np.isscalar(x) else val


def _golden_max(f, lo: float, hi: float, iters: int = 90):
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        if b - a < 1e-14 * max(1.0, abs(a)):
            break
    xm = 0.5 * (a + b)
    return xm, f(xm)


def m_of(theta: float, tol: float = 1e-12) -> float:
    """m(theta) = sup_x M_theta(x) by grid scan plus golden-section refinement.

    The scan window [0, X] is chosen from the tail bound
    M_theta(x) <= exp(-min(theta, 2pi-theta) x), so that no point beyond X
    can exceed the value M_theta(0) = 1/4 already in the candidate set.
    """
    if not 0.0 < theta < 2.0 * math.pi:
        raise DomainError(f"theta must lie in (0, 2pi), got {theta}")
    if tol < 1e-13:
        raise DomainError("tol below supported resolution 1e-13")
    omega = min(theta, 2.0 * math.pi - theta)
    xmax = (math.log(4.0) + 37.0) / omega
    grid = np.linspace(0.0, xmax, 4001)
    vals = M(theta, grid)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    _, refined = _golden_max(lambda x: M(theta, x), lo, hi)
    return max(best, float(refined), M(theta, 0.0))


def m_argsup(theta: float) -> tuple[float, float]:
    """(m(theta), x*) with M_theta(x*) = m(theta), x* >= 0."""
    omega = min(theta, 2.0 * math.pi - theta)
    xmax = (math.log(4.0) + 37.0) / omega
    grid = np.linspace(0.0, xmax, 4001)
    vals = M(theta, grid)
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    xm, fm = _golden_max(lambda x: M(theta, x), lo, hi)
    if M(theta, 0.0) >= fm:
        return M(theta, 0.0), 0.0
    return fm, xm


# ---------------------------------------------------------------------------
# symbol determinant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolPoint:
    theta: float
    eta: float

    @property
    def xi(self) -> complex:
        return self.eta + 0.5j


@dataclass(frozen=True)
class MellinResult:
    a_tau: complex  # tangential / normal components of the two Mellin integrals
    a_nu: complex
    b_tau: complex
    b_nu: complex
    h1: np.ndarray  # 2x2, anti-diagonal
    h2: np.ndarray
    s_value: complex  # coupling-free scalar S(xi)
    delta: complex  # det(sigma_0 - h1 h2)


def delta_closed(theta: float, eta: float, coupling: Coupling) -> float:
    """Closed-form corner symbol determinant (1 - (eps^2-mu^2) M_theta(2 eta))^2."""
    return (1.0 - coupling.strength * M(theta, 2.0 * eta)) ** 2


def _exp_integral(beta: complex, theta: float, trunc: float, tol: float) -> complex:
    """int_{-trunc}^{trunc} e^{beta t} / (e^t + e^-t - 2 cos theta) dt."""

    def dens(t):
        return np.exp(2.0 * t) + 1.0 - 2.0 * math.cos(theta) * np.exp(t)

    def f_re(t):
        return float(np.real(np.exp((beta + 1.0) * t)) / dens(t))

    def f_im(t):
        return float(np.imag(np.exp((beta + 1.0) * t)) / dens(t))

    out = 0.0j
    for f in (f_re, f_im):
        val, err = quad(f, -trunc, trunc, limit=400, epsabs=0.25 * tol, epsrel=0)
        if err > tol:
            raise ConvergenceError(
                f"Mellin quadrature error estimate {err:.2e} above tol {tol:.2e}")
        out = out + val if f is f_re else out + 1j * val
    return out


def mellin_symbol(theta: float, eta: float, coupling: Coupling,
                  trunc: float = 60.0, tol: float = 1e-10) -> MellinResult:
    """Direct quadrature of the corner symbol in the model frame tau=(1,0), nu=(0,1)."""
    if not (0.0 < theta < 2.0 * math.pi) or theta == math.pi:
        raise DomainError("theta must lie in (0, 2pi) \\ {pi}")
    if trunc < 40.0:
        raise DomainError("integration window must be at least 40")
    xi = eta + 0.5j
    xib = eta - 0.5j
    i_xi = _exp_integral(1j * xi, theta, trunc, tol)
    i_xib = _exp_integral(1j * xib, theta, trunc, tol)
    ct, st = math.cos(theta), math.sin(theta)
    a_tau = ct * i_xib - i_xi
    a_nu = -st * i_xib
    b_tau = ct * i_xi - i_xib
    b_nu = -st * i_xi
    # the kernel matrix enters the two symbol factors with opposite signs
    # (the second one is evaluated at -zeta), hence the opposite prefactors
    pref_a = -1j / (2.0 * math.pi)
    pref_b = +1j / (2.0 * math.pi)
    tau_c, nu_c = 1.0, 1.0j
    a_full = pref_a * (a_tau * tau_c + a_nu * nu_c)
    a_conj = pref_a * (a_tau * np.conj(tau_c) + a_nu * np.conj(nu_c))
    b_full = pref_b * (b_tau * tau_c + b_nu * nu_c)
    b_conj = pref_b * (b_tau * np.conj(tau_c) + b_nu * np.conj(nu_c))
    ep, em = coupling.eps + coupling.mu, coupling.eps - coupling.mu
    h1 = np.array([[0.0, ep * a_conj], [em * a_full, 0.0]], dtype=complex)
    h2 = np.array([[0.0, ep * b_conj], [em * b_full, 0.0]], dtype=complex)
    # The two cross-arm factors carry opposite spinor frame phases that the
    # scalar direction function above cannot represent; they cancel in the
    # symmetrized product, which is the combination the closed-form scalar
    # symbol corresponds to (the unsymmetrized product would contradict the
    # smooth-curve threshold in the flat-angle limit).
    prod = 0.5 * (h1 @ h2 + h2 @ h1)
    delta = (1.0 - prod[0, 0]) * (1.0 - prod[1, 1])
    s_value = 2.0 * st * st * (a_conj * b_full + a_full * b_conj)
    return MellinResult(a_tau, a_nu, b_tau, b_nu, h1, h2, s_value, delta)


def delta_direct(theta: float, eta: float, coupling: Coupling,
                 trunc: float = 60.0, tol: float = 1e-10) -> complex:
    """Quadrature oracle for delta_closed."""
    return mellin_symbol(theta, eta, coupling, trunc, tol).delta


def s_closed(theta: float, eta: float) -> float:
    """Closed form of the scalar symbol S: 2 sin^2(theta) cosh(2 eta (pi-theta)) / (1 + cosh(2 pi eta))."""
    st = math.sin(theta)
    return 4.0 * st * st * M(theta, 2.0 * eta)


def zeta_function(theta: float, t):
    """The unit direction entering the symbol kernel, as a complex number
    in the model frame tau = 1, nu = i."""
    t = np.asarray(t, dtype=float)
    den = np.sqrt(np.exp(t) + np.exp(-t) - 2.0 * math.cos(theta))
    return ((np.exp(-0.5 * t) * math.cos(theta) - np.exp(0.5 * t))
            - 1j * np.exp(-0.5 * t) * math.sin(theta)) / den


def shelepov_G(zeta_c: complex, coupling: Coupling) -> np.ndarray:
    """The 2x2 matrix kernel of I - Theta_m in the singular-operator normal form."""
    pref = -1j / (2.0 * math.pi)
    return np.array([
        [0.0, pref * (coupling.eps + coupling.mu) * np.conj(zeta_c)],
        [pref * (coupling.eps - coupling.mu) * zeta_c, 0.0],
    ], dtype=complex)


# ---------------------------------------------------------------------------
# reference Mellin integral
# ---------------------------------------------------------------------------


def mellin_reference(alpha: complex, omega: float, b: float) -> complex:
    """Closed form of int_0^inf x^(alpha-1) / (x^2 + 2 b x cos(omega) + b^2) dx
    for 0 < Re alpha < 2, 0 < |omega| < pi, b > 0.

    At the removable points sin(alpha pi) = 0 the value is taken as the
    symmetric limit alpha +- 1e-6.
    """
    alpha = complex(alpha)
    if not 0.0 < alpha.real < 2.0:
        raise DomainError("alpha must satisfy 0 < Re alpha < 2")
    if not 0.0 < abs(omega) < math.pi:
        raise DomainError("omega must satisfy 0 < |omega| < pi")
    if b <= 0:
        raise DomainError("b must be positive")
    s = np.sin(np.pi * alpha)
    if abs(s) < 1e-8:
        d = 1e-6
        return 0.5 * (mellin_reference(alpha - d, omega, b)
                      + mellin_reference(alpha + d, omega, b))
    return (-math.pi * b ** (alpha - 2.0) / math.sin(omega) / s
            * np.sin((alpha - 1.0) * omega))


def mellin_reference_quadrature(alpha: complex, omega: float, b: float,
                                tol: float = 1e-12) -> complex:
    """Adaptive-quadrature cross-check of mellin_reference (t = log(x/b))."""
    alpha = complex(alpha)
    if not 0.0 < alpha.real < 2.0:
        raise DomainError("alpha must satisfy 0 < Re alpha < 2")
    if not 0.0 < abs(omega) < math.pi:
        raise DomainError("omega must satisfy 0 < |omega| < pi")
    if b <= 0:
        raise DomainError("b must be positive")
    decay = min(alpha.real, 2.0 - alpha.real)
    trunc = 42.0 / decay

    def dens(t):
        return np.exp(t) + np.exp(-t) + 2.0 * math.cos(omega)

    out = 0.0j
    for part in (np.real, np.imag):
        def f(t):
            return float(part(np.exp((alpha - 1.0) * t)) / dens(t))
        val, err = quad(f, -trunc, trunc, limit=800, epsabs=0.25 * tol, epsrel=0)
        if err > 10 * tol:
            raise ConvergenceError(
                f"reference quadrature error {err:.2e} above tol {tol:.2e}")
        out = out + val if part is np.real else out + 1j * val
    return b ** (alpha - 2.0) * out


# ---------------------------------------------------------------------------
# polygon decision
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FredholmDecision:
    fredholm: bool
    omega: float
    m_omega: float
    strength: float
    threshold: float  # 1 / m(omega)
    witness_corner: int | None = None
    witness_theta: float | None = None
    witness_eta: float | None = None


def _solve_level(theta: float, level: float) -> float:
    """x >= 0 with M_theta(x) = level, for level in [1/4, m(theta)]."""
    mval, xstar = m_argsup(theta)
    if level >= mval:
        return xstar
    # descending flank beyond the maximum: scan then bisect
    grid = np.linspace(xstar, max(16.0, 4.0 * xstar + 1.0), 4001)
    vals = M(theta, grid) - level
    idx = np.nonzero(vals <= 0.0)[0]
    if idx.size == 0:
        lo, hi = xstar, grid[-1]
    else:
        hi = grid[idx[0]]
        lo = grid[max(idx[0] - 1, 0)]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if M(theta, mid) - level > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fredholm_polygon(angles, coupling: Coupling) -> FredholmDecision:
    """Fredholm decision for the boundary operator on a curvilinear polygon.

    Fredholm iff eps^2 - mu^2 < 1/m(omega); when not, the witness reports the
    sharpest corner and the eta* with M_theta(2 eta*) = 1/(eps^2 - mu^2).
    """
    if coupling.is_critical:
        raise CriticalCouplingError("Fredholm criterion requires |eps| != |mu|")
    angles = np.asarray(angles, dtype=float)
    omega = sharpest_angle(angles)
    m_omega = m_of(omega)
    d = coupling.strength
    threshold = 1.0 / m_omega
    if d < threshold:
        return FredholmDecision(True, omega, m_omega, d, threshold)
    eff = np.minimum(angles, 2.0 * math.pi - angles)
    j = int(np.argmin(eff))
    theta_j = float(angles[j])
    xstar = _solve_level(theta_j, 1.0 / d)
    return FredholmDecision(False, omega, m_omega, d, threshold,
                            witness_corner=j, witness_theta=theta_j,
                            witness_eta=0.5 * xstar)
