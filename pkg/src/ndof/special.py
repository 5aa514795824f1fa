"""Bessel functions of order zero, J0 and Y0, for real positive arguments.

Small arguments use the ascending power series, large arguments the
Hankel asymptotic expansion. The switch point balances cancellation in the
series (growing like e^x) against the smallest asymptotic term (about
e^{-2x}); at ``_SWITCH`` both stay below 1e-11 absolute.
"""

import math

import numpy as np

__all__ = ["j0", "y0", "hankel2_0"]

EULER_GAMMA = 0.57721566490153286061
_SWITCH = 13.5
_SERIES_TERMS = 48
_ASYMPTOTIC_TERMS = 22


def _series_coefficients():
    # c_m = (-1)^m / (m!)^2, h_m = harmonic numbers
    c = np.empty(_SERIES_TERMS)
    h = np.zeros(_SERIES_TERMS)
    fact = 1.0
    for m in range(_SERIES_TERMS):
        if m:
            fact *= m
            h[m] = h[m - 1] + 1.0 / m
        c[m] = (-1) ** m / fact ** 2
    return c, h


def _asymptotic_coefficients():
    # b_k = prod_{j<=k} (2j-1)^2 / (k! 8^k)
    b = np.empty(2 * _ASYMPTOTIC_TERMS + 1)
    b[0] = 1.0
    for k in range(1, len(b)):
        b[k] = b[k - 1] * (2 * k - 1) ** 2 / (8.0 * k)
    p = np.array([(-1) ** m * b[2 * m] for m in range(_ASYMPTOTIC_TERMS)])
    q = np.array([(-1) ** (m + 1) * b[2 * m + 1] for m in range(_ASYMPTOTIC_TERMS)])
    return p, q


_C, _H = _series_coefficients()
_P, _Q = _asymptotic_coefficients()


def _horner(coeffs, t):
    out = np.full_like(t, coeffs[-1])
    for c in coeffs[-2::-1]:
        out *= t
        out += c
    return out


def _series(x):
    t = 0.25 * x * x
    j = _horner(_C, t)
    s = _horner(-_C * _H, t)  # sum (-1)^{m+1} H_m t^m / (m!)^2
    y = (2 / math.pi) * ((np.log(0.5 * x) + EULER_GAMMA) * j + s)
    return j, y


def _asymptotic(x):
    inv2 = 1.0 / (x * x)
    p = _horner(_P, inv2)
    q = _horner(_Q, inv2) / x
    chi = x - 0.25 * math.pi
    c, s = np.cos(chi), np.sin(chi)
    amp = np.sqrt(2 / (math.pi * x))
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _j0_y0(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("Bessel J0/Y0 are evaluated for positive arguments only")
    flat = np.atleast_1d(x).ravel()
    j = np.empty_like(flat)
    y = np.empty_like(flat)
    small = flat <= _SWITCH
    if small.any():
        j[small], y[small] = _series(flat[small])
    large = ~small
    if large.any():
        j[large], y[large] = _asymptotic(flat[large])
    return j.reshape(x.shape), y.reshape(x.shape)


def j0(x):
    """Bessel function of the first kind, order zero."""
    return _j0_y0(x)[0]


def y0(x):
    """Bessel function of the second kind, order zero."""
    return _j0_y0(x)[1]


def hankel2_0(x):
    """Hankel function H0^(2)(x) = J0(x) - j Y0(x)."""
    j, y = _j0_y0(x)
    return j - 1j * y
