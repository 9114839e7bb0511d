"""Self-contained oracle checks for the numeric core.

Each check recomputes a quantity through an independent route (truncated
power series, integral representations, exact rational arithmetic) and
compares it with the library implementation.  Returns a list of
(name, passed, detail) tuples; the CLI prints them and maps any failure
to the numeric-failure exit code.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np
from scipy import integrate

from . import analytics, numerics


def j0_series(x: float, terms: int = 60) -> float:
    """Truncated power series sum (-1)^k (x/2)^(2k) / (k!)^2.

    Adequate in double precision for |x| <= 8 (mild cancellation)."""
    h = x / 2.0
    vals = []
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= -(h * h) / (k * k)
        vals.append(term)
        if abs(term) < 1e-20:
            break
    return math.fsum(vals)


def i0_series(x: float, terms: int = 200) -> float:
    """Positive-term series for the modified Bessel I0."""
    h = x / 2.0
    vals = []
    term = 1.0
    for k in range(terms):
        if k > 0:
            term *= (h * h) / (k * k)
        vals.append(term)
        if term < 1e-25 * vals[0]:
            break
    return math.fsum(vals)


def k1_integral(x: float) -> float:
    """Integral representation int_0^inf exp(-x cosh t) cosh t dt.

    The exp(-x) factor is pulled out so the quadrature works at order one
    even where K1 underflows towards zero."""
    # integrand support ends once x*(cosh t - 1) overwhelms the exponential
    upper = math.acosh(1.0 + 750.0 / x)
    val, _ = integrate.quad(
        lambda t: math.exp(-x * (math.cosh(t) - 1.0)) * math.cosh(t),
        0.0, upper, epsabs=0.0, epsrel=1e-12, limit=400)
    return val * math.exp(-x)


def q_quadrature(x: float) -> float:
    """Gaussian tail integral of the standard normal density."""
    val, _ = integrate.quad(lambda t: math.exp(-t * t / 2.0), x, 40.0,
                            epsabs=1e-18, epsrel=1e-13, limit=300)
    return val / math.sqrt(2.0 * math.pi)


def alternating_power_identity(n: int, p: int) -> int:
    """sum_k (-1)^k C(n,k) k^(p-1), with 0^0 = 1; zero for 1 <= p <= n."""
    total = 0
    for k in range(n + 1):
        kp = 1 if (p == 1 and k == 0) else k ** (p - 1)
        total += (-1) ** k * math.comb(n, k) * kp
    return total


def reciprocal_identity(n: int) -> Fraction:
    """N * sum_i (-1)^i C(N-1,i)/(i+1); equals 1 exactly."""
    return n * sum(Fraction((-1) ** i * math.comb(n - 1, i), i + 1)
                   for i in range(n))


def run_selftest() -> List[Tuple[str, bool, str]]:
    results = []

    def check(name: str, fn: Callable[[], Tuple[bool, str]]):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"raised {exc!r}"
        results.append((name, ok, detail))

    def c_j0():
        xs = np.linspace(0.0, 8.0, 81)
        worst = max(abs(numerics.bessel_j0(x) - j0_series(x)) for x in xs)
        return worst <= 1e-10, f"max abs err {worst:.2e} on [0, 8]"

    def c_i0():
        worst = max(abs(numerics.bessel_i0(x) - i0_series(x)) / i0_series(x)
                    for x in (0.5, 1.0, 5.0, 10.0))
        return worst <= 1e-10, f"max rel err {worst:.2e}"

    def c_k1():
        worst = max(abs(numerics.bessel_k1(x) - k1_integral(x)) / k1_integral(x)
                    for x in (0.5, 1.0, 2.0, 10.0))
        return worst <= 1e-8, f"max rel err {worst:.2e}"

    def c_k1_small():
        vals = [x * numerics.bessel_k1(x) for x in (1e-3, 1e-4, 1e-5)]
        mono = vals[0] <= vals[1] <= vals[2] <= 1.0
        near = abs(vals[0] - 1.0) < 1e-3
        return mono and near, f"x*K1(x) at 1e-3..1e-5: {vals}"

    def c_q():
        worst = max(abs(numerics.gaussian_q(x) - q_quadrature(x))
                    for x in (0.0, 0.5, 1.0, 3.0))
        return worst <= 1e-12, f"max abs err {worst:.2e}"

    def c_alt_identity():
        bad = [(n, p) for n in range(1, 11) for p in range(1, n + 1)
               if alternating_power_identity(n, p) != 0]
        return not bad, f"violations: {bad}" if bad else "exact for N <= 10"

    def c_recip_identity():
        bad = [n for n in range(1, 11) if reciprocal_identity(n) != 1]
        return not bad, f"violations: {bad}" if bad else "exact for N <= 10"

    def c_cdf_limits():
        coeffs = analytics.asymptotic_coeffs(1000.0, 1000.0, 0.9)
        zhi = 50.0 / min(coeffs.a, coeffs.b)
        f0 = analytics.cdf_gamma1(0.0, 4, coeffs, 0.72, 0.72)
        fhi = analytics.cdf_gamma1(zhi, 4, coeffs, 0.72, 0.72)
        ok = f0 == 0.0 and fhi >= 1.0 - 1e-9
        return ok, f"F(0)={f0}, 1-F(z_hi)={1.0 - fhi:.2e}"

    def c_rayleigh_ser():
        gbar = 10.0
        got = analytics.ser_by_integration(
            lambda zz: 1.0 - np.exp(-np.asarray(zz) / gbar),
            analytics.modulation_constants("BPSK"))
        want = 0.5 * (1.0 - math.sqrt(gbar / (1.0 + gbar)))
        return abs(got - want) <= 1e-8, f"got {got:.10g}, closed form {want:.10g}"

    check("bessel_j0 vs power series", c_j0)
    check("bessel_i0 vs power series", c_i0)
    check("bessel_k1 vs integral representation", c_k1)
    check("bessel_k1 small-argument limit", c_k1_small)
    check("gaussian_q vs quadrature", c_q)
    check("alternating binomial power identity", c_alt_identity)
    check("reciprocal binomial identity", c_recip_identity)
    check("snr cdf limits", c_cdf_limits)
    check("integration vs Rayleigh closed form", c_rayleigh_ser)
    return results
