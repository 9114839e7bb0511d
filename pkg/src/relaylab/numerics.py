"""Special functions and small combinatorics used by the channel and
analytics models: J0, I0, K1, the Gaussian Q-function, binomial
coefficients and the (2N)!/N! factor of the high-SNR SER constant.

All functions are pure and accept scalars or numpy arrays where noted.
Backed by scipy.special; the test suite checks them against independent
series/quadrature oracles.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

# scipy.special.i0 overflows (returns inf) a little above this argument
_I0_OVERFLOW = 713.0


def _check_finite(x, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name}: input must be finite")


def bessel_j0(x):
    """Bessel function of the first kind, order zero.

    Absolute error <= 1e-10 over |x| <= 50.  Scalar or ndarray.
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_j0")
    out = special.j0(x)
    return float(out) if out.ndim == 0 else out


def bessel_i0(x):
    """Modified Bessel function of the first kind, order zero (x >= 0)."""
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_i0")
    if np.any(x < 0):
        raise ValueError("bessel_i0: x must be >= 0")
    if np.any(x > _I0_OVERFLOW):
        raise OverflowError(f"bessel_i0: x > {_I0_OVERFLOW} overflows double precision")
    out = special.i0(x)
    return float(out) if out.ndim == 0 else out


def bessel_k1(x):
    """Modified Bessel function of the second kind, order one (x > 0).

    Relative error <= 1e-8; underflows to 0.0 for x beyond ~705 (this is
    the correct limit, not an error).  Near the origin K1(x) ~ 1/x.
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x, "bessel_k1")
    if np.any(x <= 0):
        raise ValueError("bessel_k1: x must be > 0")
    out = special.k1(x)
    return float(out) if out.ndim == 0 else out


def gaussian_q(x):
    """Gaussian Q-function Q(x) = P{N(0,1) > x}, in [0, 1].

    Evaluated through the complementary error function, absolute error
    well under 1e-12.  Scalar or ndarray.
    """
    x = np.asarray(x, dtype=float)
    _check_finite(x, "gaussian_q")
    out = special.ndtr(-x)
    return float(out) if out.ndim == 0 else out


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k) for 0 <= k <= n <= 64."""
    if n < 0 or k < 0:
        raise ValueError("binomial: n and k must be non-negative")
    if k > n:
        raise ValueError(f"binomial: k={k} exceeds n={n}")
    if n > 64:
        raise OverflowError("binomial: n > 64 not supported")
    return math.comb(n, k)


def double_factorial_ratio(n: int) -> float:
    """(2N)!/N! for 1 <= N <= 16, computed exactly in integer arithmetic."""
    if not 1 <= n <= 16:
        raise OverflowError(f"double_factorial_ratio: N={n} outside [1, 16]")
    return float(math.factorial(2 * n) // math.factorial(n))
