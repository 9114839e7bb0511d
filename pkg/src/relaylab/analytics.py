"""Closed-form performance results for best-worse-channel bidirectional
relaying: distribution of the post-processing SNR at a source, the
semi-analytical average SER obtained by integrating that distribution
against the Gaussian tail, the high-SNR asymptotic SER for both the
fresh-CSI and outdated-CSI regimes, and the diversity order.

Conventions
-----------
The high-SNR end-to-end SNR is the harmonic combination
``at*g1 * bt*g2 / (at*g1 + bt*g2)`` of the two estimated transmission-time
power gains of the selected relay.  The inverse rates seen by those scaled
gains are ``a = rho_e/at`` and ``b = rho_e/bt`` (the estimated gains have
variance 1/rho_e).

The selection-to-transmission correlation of each link's *amplitude*
coefficient is rho_j (1 for a fresh link, rho_e*rho_f otherwise); the
corresponding *power* gains are correlated with coefficient rho_j**2, and
it is the squared value that enters every exponential mixture below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .numerics import binomial, double_factorial_ratio


@dataclass(frozen=True)
class AsymptoticCoeffs:
    """Forward gains (a_tilde, b_tilde) and their inverse rates (a, b)."""

    a: float
    b: float
    a_tilde: float
    b_tilde: float


@dataclass(frozen=True)
class ModulationConstants:
    """(alpha, beta) of the SER kernel alpha*Q(sqrt(beta*gamma))."""

    alpha: float
    beta: float


def modulation_constants(modulation: str) -> ModulationConstants:
    """SER-kernel constants for BPSK, QPSK and MPSK (M > 4).

    MPSK names its order inline, e.g. "MPSK8" or "8PSK".
    """
    m = modulation.strip().upper()
    if m == "BPSK":
        return ModulationConstants(alpha=1.0, beta=2.0)
    if m == "QPSK":
        return ModulationConstants(alpha=1.0, beta=1.0)
    if m.startswith("MPSK") or m.endswith("PSK"):
        digits = "".join(c for c in m if c.isdigit())
        if not digits:
            raise ValueError(f"modulation_constants: cannot parse order from {modulation!r}")
        order = int(digits)
        if order <= 4:
            raise ValueError("modulation_constants: MPSK requires M > 4")
        k = math.log2(order)
        return ModulationConstants(alpha=1.0 / k, beta=k * math.sin(math.pi / order) ** 2)
    raise ValueError(f"modulation_constants: unknown modulation {modulation!r}")


def asymptotic_coeffs(psi_s: float, psi_r: float, rho_e: float) -> AsymptoticCoeffs:
    """Coefficients of the high-SNR harmonic-SNR model.

    a = (1 + psi_r*rho_e^2*sigma_D^2) / (psi_r*rho_e^3) and
    b = (5*psi_r*psi_s*rho_e^2*sigma_D^2 + psi_r*rho_e^2 + psi_s)
        / (psi_r*psi_s*rho_e^3), with sigma_D^2 = 1 - rho_e.
    """
    if psi_s <= 0 or psi_r <= 0:
        raise ValueError("asymptotic_coeffs: psi_s and psi_r must be > 0")
    if not 0.0 < rho_e <= 1.0:
        raise ValueError("asymptotic_coeffs: rho_e must be in (0, 1]")
    s2d = 1.0 - rho_e
    a = (1.0 + psi_r * rho_e**2 * s2d) / (psi_r * rho_e**3)
    b = (5.0 * psi_r * psi_s * rho_e**2 * s2d + psi_r * rho_e**2 + psi_s) / (
        psi_r * psi_s * rho_e**3
    )
    return AsymptoticCoeffs(a=a, b=b, a_tilde=rho_e / a, b_tilde=rho_e / b)


def _exp_k1(p, q, z):
    """2*z*sqrt(p*q) * exp(-(p+q)*z) * K1(2*z*sqrt(p*q)), limit 1 at z=0."""
    u = 2.0 * z * np.sqrt(p * q)
    # u*K1(u) -> 1 as u -> 0; switch before k1 can overflow for tiny u
    small = u < 1e-8
    uk1 = np.where(small, 1.0, u * special.k1(np.where(small, 1.0, u)))
    return np.exp(-(p + q) * z) * uk1


def cdf_gamma1(z, n_relays: int, coeffs: AsymptoticCoeffs,
               rho_1: float, rho_2: float):
    """CDF of the high-SNR end-to-end SNR at source 1 for N-relay selection.

    `rho_1`/`rho_2` are the amplitude correlation coefficients of the two
    links (their squares correlate the power gains).  Accepts scalar or
    ndarray z; the result is clamped to [0, 1] against floating-point
    residue and is exactly 0 at z = 0.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("cdf_gamma1: z must be >= 0")
    n = int(n_relays)
    a, b = coeffs.a, coeffs.b
    q1 = rho_1 * rho_1
    q2 = rho_2 * rho_2
    total = np.zeros_like(z)
    for i in range(n):
        ci = binomial(n - 1, i) * (-1) ** i / (2 * i + 1)
        d1 = (2 * i + 1) * (1.0 - q1) + 1.0
        ai = 2.0 * (i + 1) * a / d1
        wi = i / (i + 1.0)
        for j in range(n):
            cj = binomial(n - 1, j) * (-1) ** j / (2 * j + 1)
            d2 = (2 * j + 1) * (1.0 - q2) + 1.0
            bj = 2.0 * (j + 1) * b / d2
            wj = j / (j + 1.0)
            term = (_exp_k1(a, b, z)
                    + wi * _exp_k1(ai, b, z)
                    + wj * _exp_k1(a, bj, z)
                    + wi * wj * _exp_k1(ai, bj, z))
            total += ci * cj * term
    out = np.clip(1.0 - n * n * total, 0.0, 1.0)
    out = np.where(z == 0.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def marginal_cdf_selected_gain(x, n_relays: int, sigma2_hhat: float):
    """CDF of one link's estimated selection-time gain at the chosen relay.

    Mixture form obtained from the max-min order statistics of N i.i.d.
    exponential pairs of mean sigma2_hhat.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("marginal_cdf_selected_gain: x must be >= 0")
    n = int(n_relays)
    u = x / sigma2_hhat
    acc = np.zeros_like(u)
    for i in range(n):
        ci = binomial(n - 1, i) * (-1) ** i / (2 * i + 1)
        acc += ci * (np.exp(-u) + (i / (i + 1.0)) * np.exp(-2.0 * (i + 1) * u))
    out = np.clip(1.0 - n * acc, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def conditional_gain_pdf(y, x, rho: float, sigma2_hhat: float):
    """Density of the transmission-time estimated gain given the selection-time
    value x of the same link, for amplitude correlation rho.

    f(y|x) = exp(-(y + rho^2 x)/c) * I0(2*rho*sqrt(x*y)/c) / c with
    c = (1 - rho^2)*sigma2_hhat.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError("conditional_gain_pdf: rho must be in [0, 1)")
    y = np.asarray(y, dtype=float)
    c = (1.0 - rho * rho) * sigma2_hhat
    arg = 2.0 * rho * np.sqrt(np.maximum(x * y, 0.0)) / c
    # i0e avoids overflow: i0(z) = i0e(z)*exp(z)
    out = np.exp(-(y + rho * rho * x) / c + arg) * special.i0e(arg) / c
    return float(out) if out.ndim == 0 else out


def ser_by_integration(cdf: Callable, mods: ModulationConstants) -> float:
    """Average SER alpha/sqrt(2*pi) * int_0^inf F(t^2/beta) exp(-t^2/2) dt.

    Adaptive quadrature truncated at t = 10 (the discarded tail is below
    1e-22 of the Gaussian weight); absolute target 1e-10.
    """
    alpha, beta = mods.alpha, mods.beta

    def integrand(t):
        return cdf(t * t / beta) * math.exp(-t * t / 2.0)

    val, err = integrate.quad(integrand, 0.0, 10.0, epsabs=1e-13,
                              epsrel=1e-10, limit=300)
    if not math.isfinite(val) or err > 1e-8:
        raise ArithmeticError(f"ser_by_integration: quadrature failed (err={err:.2e})")
    return alpha / math.sqrt(2.0 * math.pi) * val


def _outdated_weight_sum(n: int, rho: float) -> float:
    """N * sum_i (-1)^i C(N-1,i) (2 - rho^2)/((2i+1)(1 - rho^2) + 1)."""
    q = rho * rho
    s = sum((-1) ** i * binomial(n - 1, i) * (2.0 - q) / ((2 * i + 1) * (1.0 - q) + 1.0)
            for i in range(n))
    return n * s


def asymptotic_ser(n_relays: int, psi_s: float, psi_r: float, rho_e: float,
                   rho_f1: float, rho_f2: float, mods: ModulationConstants,
                   source: int = 1) -> float:
    """High-SNR average SER at `source` (1 or 2).

    Fresh CSI on both links (rho_f1 = rho_f2 = 1):
        alpha/(4*beta^N) * (2N)!/N! * (a^N + b^N).
    Any outdated link: the diversity collapses to one and the SER is the
    weighted single-relay-like sum over both links.  Source 2 is source 1
    with a and b exchanged.
    """
    if source not in (1, 2):
        raise ValueError("asymptotic_ser: source must be 1 or 2")
    n = int(n_relays)
    c = asymptotic_coeffs(psi_s, psi_r, rho_e)
    a, b = (c.a, c.b) if source == 1 else (c.b, c.a)
    alpha, beta = mods.alpha, mods.beta
    if rho_f1 == 1.0 and rho_f2 == 1.0:
        return alpha / (4.0 * beta**n) * double_factorial_ratio(n) * (a**n + b**n)
    rho_1 = 1.0 if rho_f1 == 1.0 else rho_e * rho_f1
    rho_2 = 1.0 if rho_f2 == 1.0 else rho_e * rho_f2
    return alpha / (2.0 * beta) * (a * _outdated_weight_sum(n, rho_1)
                                   + b * _outdated_weight_sum(n, rho_2))


def diversity_order(rho_f1: float, rho_f2: float, n_relays: int) -> int:
    """N when neither link is outdated, otherwise 1."""
    if n_relays < 1:
        raise ValueError("diversity_order: n_relays must be >= 1")
    return int(n_relays) if (rho_f1 == 1.0 and rho_f2 == 1.0) else 1
