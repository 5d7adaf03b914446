"""Pauli algebra, modified Bessel functions and the Dirac fundamental solutions.

The fundamental solution of the two-dimensional Dirac expression
``D - z = -i(sigma_1 d_1 + sigma_2 d_2) + m sigma_3 - z`` in the spectral gap
``|z| < m`` is

    phi_z(x) = (1/2pi) K0(kappa|x|) (m sigma_3 + z sigma_0)
             + (i kappa / 2pi|x|) K1(kappa|x|) (sigma . x),   kappa = sqrt(m^2-z^2),

and the limiting value at z = m is the pure Cauchy-type matrix kernel phi_m.
Bessel K0/K1 are evaluated with the classical two-regime scheme: power series
for x <= 2, Chebyshev expansions of the exponentially scaled functions for
x > 2 (coefficients frozen from a 50-digit computation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularPointError, SpectralParameterError

EULER_GAMMA = 0.57721566490153286061

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (SIGMA1, SIGMA2, SIGMA3)


def sigma_dot(x):
    """sigma . x = x1 sigma_1 + x2 sigma_2 for x of shape (..., 2)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 1] = x[..., 0] - 1j * x[..., 1]
    out[..., 1, 0] = x[..., 0] + 1j * x[..., 1]
    return out


@dataclass(frozen=True)
class Coupling:
    """Interaction strengths: electrostatic eps, Lorentz-scalar mu, mass m > 0."""

    eps: float
    mu: float
    mass: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f"mass must be positive, got {self.mass}")

    @property
    def strength(self) -> float:
        """eps^2 - mu^2, the combination all self-adjointness thresholds use."""
        return self.eps**2 - self.mu**2

    @property
    def is_critical(self) -> bool:
        return abs(self.eps) == abs(self.mu)

    def matrix(self) -> np.ndarray:
        """eps sigma_0 + mu sigma_3."""
        return self.eps * SIGMA0 + self.mu * SIGMA3


# ---------------------------------------------------------------------------
# modified Bessel functions
# ---------------------------------------------------------------------------

_SERIES_TERMS = 64


def _nterms(q) -> int:
    """Smallest series length driving (q^n / (n!)^2)-type tails below 1e-18."""
    qmax = float(np.max(q)) if np.size(q) else 0.0
    t, n = 1.0, 0
    while n < _SERIES_TERMS:
        n += 1
        t *= qmax / (n * n)
        if t < 1e-18:
            break
    return max(n + 2, 8)

# Chebyshev coefficients of e^x sqrt(x) K_nu(x) as a function of v = 4/x - 1
# on v in [-1, 1] (i.e. x in [2, inf)); generated with mpmath at 50 digits.
_CHEB_K0 = np.array([
    2.4403030820659554547,
    -0.031448101311964500543,
    0.0015698838857300533749,
    -0.00012849549581627802638,
    0.000013949813718876499364,
    -1.8317555227191194848e-6,
    2.7668136394450150761e-7,
    -4.6604898976879476652e-8,
    8.5740340174142260760e-9,
    -1.6975345093890614910e-9,
    3.5773972814003278257e-10,
    -7.9574892444773812533e-11,
    1.8559491149548861522e-11,
    -4.5145978833734765792e-12,
    1.1403405882046311398e-12,
    -2.9800969230769603872e-13,
    8.0328907731819937964e-14,
    -2.2275133217027851879e-14,
    6.3400763401135214730e-15,
    -1.8485930065747477583e-15,
    5.5120457647396767388e-16,
    -1.6782026064137498511e-16,
    5.2095879044094443337e-17,
    -1.6452873742672072697e-17,
    5.2341876658319743007e-18,
    -1.5392616400502644812e-18,
])
_CHEB_K1 = np.array([
    2.7206261904844426694,
    0.10392373657681723844,
    -0.0028578168596227793868,
    0.00019521551847135163111,
    -0.000019361979741660829600,
    2.4064849478372171171e-6,
    -3.5019606030878125421e-7,
    5.7410841254500492919e-8,
    -1.0345762465678097016e-8,
    2.0150497551970345901e-9,
    -4.1903547593419249273e-10,
    9.2183151876052974269e-11,
    -2.1299678384277482355e-11,
    5.1396396734812382991e-12,
    -1.2891739609469437020e-12,
    3.3484196659765782435e-13,
    -8.9767051800035922260e-14,
    2.4771544188480812449e-14,
    -7.0198369440056604809e-15,
    2.0387027696753713866e-15,
    -6.0570363249857634733e-16,
    1.8380630276636902639e-16,
    -5.6886004009873353543e-17,
    1.7915864727446218185e-17,
    -5.6854173529898914296e-18,
    1.6686739374640153746e-18,
])


def _i0_series(x):
    q = 0.25 * x * x
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for k in range(1, _nterms(q) + 1):
        term = term * q / (k * k)
        acc = acc + term
    return acc


def _i1_over_halfx(x):
    """sum_k (x^2/4)^k / (k! (k+1)!)  so that I1(x) = (x/2) * this."""
    q = 0.25 * x * x
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for k in range(1, _nterms(q) + 1):
        term = term * q / (k * (k + 1))
        acc = acc + term
    return acc


def _k0_series(x):
    """K0 for 0 < x <= 2 via the logarithmic power series."""
    q = 0.25 * x * x
    term = np.ones_like(x)
    acc_i0 = np.ones_like(x)
    acc_h = np.zeros_like(x)
    h = 0.0
    for k in range(1, _nterms(q) + 1):
        term = term * q / (k * k)
        h += 1.0 / k
        acc_i0 = acc_i0 + term
        acc_h = acc_h + term * h
    return -(np.log(0.5 * x) + EULER_GAMMA) * acc_i0 + acc_h


def _k1_series(x):
    """K1 for 0 < x <= 2."""
    q = 0.25 * x * x
    i1 = 0.5 * x * _i1_over_halfx(x)
    term = np.ones_like(x)
    acc = np.full_like(x, 1.0 - 2.0 * EULER_GAMMA)  # psi(1)+psi(2) = -2g+1
    h = 0.0
    for k in range(1, _nterms(q) + 1):
        term = term * q / (k * (k + 1))
        h += 1.0 / k
        acc = acc + term * (2.0 * h + 1.0 / (k + 1) - 2.0 * EULER_GAMMA)
    return 1.0 / x + np.log(0.5 * x) * i1 - 0.25 * x * acc


def _cheb_clenshaw(coeffs, v):
    """Clenshaw evaluation of sum_k c_k T_k(v) with the c_0 term halved."""
    b0 = np.zeros_like(v)
    b1 = np.zeros_like(v)
    for c in coeffs[:0:-1]:
        b0, b1 = 2.0 * v * b0 - b1 + c, b0
    return v * b0 - b1 + 0.5 * coeffs[0]


def _k_large(coeffs, x):
    v = 4.0 / x - 1.0
    return np.exp(-x) / np.sqrt(x) * _cheb_clenshaw(coeffs, v)


def _k0(x):
    x = np.asarray(x, dtype=float)
    small = x <= 2.0
    out = np.empty_like(x)
    if small.any():
        out[small] = _k0_series(x[small])
    if (~small).any():
        out[~small] = _k_large(_CHEB_K0, x[~small])
    return out


def _k1(x):
    x = np.asarray(x, dtype=float)
    small = x <= 2.0
    out = np.empty_like(x)
    if small.any():
        out[small] = _k1_series(x[small])
    if (~small).any():
        out[~small] = _k_large(_CHEB_K1, x[~small])
    return out


def _checked(func, x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError("modified Bessel K requires finite x > 0")
    res = func(arr)
    return float(res) if np.isscalar(x) or arr.ndim == 0 else res


def bessel_k0(x):
    """Modified Bessel K0; scalar or array, x > 0."""
    return _checked(_k0, x)


def bessel_k1(x):
    """Modified Bessel K1; scalar or array, x > 0."""
    return _checked(_k1, x)


def bessel_i0(x):
    """Modified Bessel I0 (power series; intended for moderate arguments)."""
    arr = np.asarray(x, dtype=float)
    res = _i0_series(arr)
    return float(res) if np.isscalar(x) or arr.ndim == 0 else res


def bessel_i1(x):
    """Modified Bessel I1 (power series; intended for moderate arguments)."""
    arr = np.asarray(x, dtype=float)
    res = 0.5 * arr * _i1_over_halfx(arr)
    return float(res) if np.isscalar(x) or arr.ndim == 0 else res


# ---------------------------------------------------------------------------
# logarithmic splittings of the kernel difference phi_z - phi_m
# ---------------------------------------------------------------------------
#
# K0(kr)            =  -log(r) * I0(kr)   + b_k0(r; k)
# k K1(kr) - 1/r    =   log(r) * k I1(kr) + b_k1(r; k)
#
# with b_k0, b_k1 continuous at r = 0.  Near r = 0 the direct formulas
# cancel catastrophically, so a series form is used for kr <= 2.


def b_k0(r, kappa):
    """Smooth part of K0(kappa r) after removing -log(r) I0(kappa r)."""
    r = np.asarray(r, dtype=float)
    w = kappa * r
    out = np.empty_like(r)
    small = w <= 2.0
    if small.any():
        q = 0.25 * w[small] ** 2
        term = np.ones_like(q)
        acc_i0 = np.ones_like(q)
        acc_h = np.zeros_like(q)
        h = 0.0
        for k in range(1, _nterms(q) + 1):
            term = term * q / (k * k)
            h += 1.0 / k
            acc_i0 = acc_i0 + term
            acc_h = acc_h + term * h
        out[small] = -(np.log(0.5 * kappa) + EULER_GAMMA) * acc_i0 + acc_h
    if (~small).any():
        rl = r[~small]
        out[~small] = _k0(kappa * rl) + np.log(rl) * _i0_series(kappa * rl)
    return out


def b_k0_at_zero(kappa):
    return -(np.log(0.5 * kappa) + EULER_GAMMA)


def b_k1(r, kappa):
    """Smooth part of kappa K1(kappa r) - 1/r after removing log(r) kappa I1."""
    r = np.asarray(r, dtype=float)
    w = kappa * r
    out = np.empty_like(r)
    small = w <= 2.0
    if small.any():
        ws = w[small]
        q = 0.25 * ws**2
        i1s = _i1_over_halfx(ws)  # I1(w) = (w/2) * i1s
        term = np.ones_like(q)
        acc = np.full_like(q, 1.0 - 2.0 * EULER_GAMMA)
        h = 0.0
        for k in range(1, _nterms(q) + 1):
            term = term * q / (k * (k + 1))
            h += 1.0 / k
            acc = acc + term * (2.0 * h + 1.0 / (k + 1) - 2.0 * EULER_GAMMA)
        # k K1(kr) - 1/r = k log(r) I1(kr) + k [log(k/2) I1(kr) - (kr/4) acc]
        out[small] = kappa * (np.log(0.5 * kappa) * 0.5 * ws * i1s - 0.25 * ws * acc)
    if (~small).any():
        rl = r[~small]
        wl = kappa * rl
        i1l = 0.5 * wl * _i1_over_halfx(wl)
        out[~small] = kappa * _k1(wl) - 1.0 / rl - kappa * np.log(rl) * i1l
    return out


# ---------------------------------------------------------------------------
# fundamental solutions
# ---------------------------------------------------------------------------


def gap_kappa(z: float, mass: float) -> float:
    """kappa = sqrt(m^2 - z^2) for real z in the gap."""
    if abs(z) >= mass:
        raise SpectralParameterError(f"z = {z} outside the open gap (-{mass}, {mass})")
    return float(np.sqrt(mass * mass - z * z))


def phi_z(x, z: float, coupling: Coupling):
    """Fundamental-solution matrix phi_z(x) for real z in the gap, x != 0.

    x has shape (2,) or (..., 2); the result has shape (..., 2, 2).
    """
    kappa = gap_kappa(z, coupling.mass)
    x = np.asarray(x, dtype=float)
    r = np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2)
    if np.any(r == 0.0):
        raise SingularPointError("phi_z evaluated at x = 0")
    k0v = _k0(kappa * r)
    k1v = _k1(kappa * r)
    pref = 1.0 / (2.0 * np.pi)
    m = coupling.mass
    out = np.zeros(x.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = pref * k0v * (m + z)
    out[..., 1, 1] = pref * k0v * (z - m)
    radial = 1j * pref * kappa * k1v / r
    out[..., 0, 1] = radial * (x[..., 0] - 1j * x[..., 1])
    out[..., 1, 0] = radial * (x[..., 0] + 1j * x[..., 1])
    return out


def phi_m(x):
    """Limiting Cauchy-type kernel at z = m (off-diagonal only), x != 0."""
    x = np.asarray(x, dtype=float)
    xc = x[..., 0] + 1j * x[..., 1]
    if np.any(xc == 0.0):
        raise SingularPointError("phi_m evaluated at x = 0")
    pref = 1j / (2.0 * np.pi)
    out = np.zeros(x.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 1] = pref / xc
    out[..., 1, 0] = pref / np.conj(xc)
    return out
