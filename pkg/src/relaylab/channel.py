"""Channel model: correlated Rayleigh fading with a selection-to-transmission
delay and additive channel estimation error.

Selection-time and transmission-time coefficients are tied by a first-order
autoregressive step with coefficient rho_f (Jakes model), and every estimate
is the true coefficient plus an independent complex-Gaussian error whose
variance follows from the training-power coefficient rho_e.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import bessel_j0


@dataclass(frozen=True)
class CsiParams:
    """Correlation/variance bundle describing CSI quality.

    rho_f1/rho_f2 are the delay (Doppler) correlations of the two source-relay
    links, rho_e the estimation-quality coefficient.  The remaining fields are
    derived: rho_j collapses to 1 when the corresponding link has no delay,
    otherwise rho_j = rho_e * rho_fj; sigma2_hhat = 1/rho_e is the variance of
    every estimated coefficient, sigma2_e = (1-rho_e)/rho_e the estimation
    error variance and sigma2_D = 1 - rho_e the reverse-regression residual.
    """

    rho_f1: float
    rho_f2: float
    rho_e: float
    rho_1: float
    rho_2: float
    sigma2_hhat: float
    sigma2_D: float
    sigma2_e: float


@dataclass
class RelayChannelSet:
    """Per-relay coefficients for both sources (axis 0: source j in {1,2}).

    Arrays of shape (2, n_relays): actual selection-time (h_s), actual
    transmission-time (h_t) and the corresponding estimates (hhat_s, hhat_t).
    """

    h_s: np.ndarray
    h_t: np.ndarray
    hhat_s: np.ndarray
    hhat_t: np.ndarray

    @property
    def n_relays(self) -> int:
        return self.h_s.shape[1]


def jakes_correlation(doppler_hz: float, delay_s: float) -> float:
    """Fading autocorrelation J0(2*pi*f_d*T) for Doppler f_d and lag T.

    May be negative once 2*pi*f_d*T passes the first Bessel zero; scenario
    validation rejects such values rather than clamping them here.
    """
    if not (math.isfinite(doppler_hz) and math.isfinite(delay_s)):
        raise ValueError("jakes_correlation: inputs must be finite")
    if doppler_hz < 0 or delay_s < 0:
        raise ValueError("jakes_correlation: doppler and delay must be >= 0")
    return float(bessel_j0(2.0 * math.pi * doppler_hz * delay_s))


def cee_coefficient(training_power: float, noise_density: float) -> float:
    """Estimation-quality coefficient P/(P + N0) in [0, 1].

    training_power may be math.inf, the no-estimation-error sentinel, which
    returns exactly 1.0.
    """
    if noise_density <= 0 or not math.isfinite(noise_density):
        raise ValueError("cee_coefficient: noise_density must be positive and finite")
    if training_power < 0:
        raise ValueError("cee_coefficient: training_power must be >= 0")
    if math.isinf(training_power):
        return 1.0
    return training_power / (training_power + noise_density)


def derive_csi_params(rho_f1: float, rho_f2: float, rho_e: float) -> CsiParams:
    """Build the full CsiParams bundle from the three base coefficients."""
    for name, val in (("rho_f1", rho_f1), ("rho_f2", rho_f2), ("rho_e", rho_e)):
        if not (isinstance(val, (int, float)) and math.isfinite(val)):
            raise ValueError(f"derive_csi_params: {name} must be a finite number")
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"derive_csi_params: {name}={val} outside [0, 1]")
    if rho_e <= 0.0:
        raise ValueError("derive_csi_params: rho_e must be > 0")

    # rho_j = 1 exactly when the link is not outdated, regardless of rho_e:
    # with an unchanged channel the same estimate is reused.
    rho_1 = 1.0 if rho_f1 == 1.0 else rho_e * rho_f1
    rho_2 = 1.0 if rho_f2 == 1.0 else rho_e * rho_f2
    return CsiParams(
        rho_f1=rho_f1,
        rho_f2=rho_f2,
        rho_e=rho_e,
        rho_1=rho_1,
        rho_2=rho_2,
        sigma2_hhat=1.0 / rho_e,
        sigma2_D=1.0 - rho_e,
        sigma2_e=(1.0 - rho_e) / rho_e,
    )


def _cgauss(rng: np.random.Generator, var: float, shape) -> np.ndarray:
    """Circularly-symmetric complex Gaussian, variance `var` total."""
    s = math.sqrt(var / 2.0)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_relay_channels(rng: np.random.Generator, params: CsiParams,
                          n_relays: int) -> RelayChannelSet:
    """Draw one consistent set of actual and estimated coefficients.

    h_s and the innovation are unit-variance complex Gaussians;
    h_t = rho_f * h_s + sqrt(1 - rho_f^2) * innovation, so h_t is again
    unit variance.  Estimates add independent errors of variance sigma2_e
    at both instants.  Deterministic given the generator state.
    """
    if n_relays < 1:
        raise ValueError("sample_relay_channels: n_relays must be >= 1")
    shape = (2, n_relays)
    h_s = _cgauss(rng, 1.0, shape)
    eps = _cgauss(rng, 1.0, shape)
    rf = np.array([[params.rho_f1], [params.rho_f2]])
    h_t = rf * h_s + np.sqrt(1.0 - rf**2) * eps
    if params.sigma2_e > 0.0:
        e_s = _cgauss(rng, params.sigma2_e, shape)
        e_t = _cgauss(rng, params.sigma2_e, shape)
        hhat_s = h_s + e_s
        hhat_t = h_t + e_t
    else:
        hhat_s = h_s.copy()
        hhat_t = h_t.copy()
    return RelayChannelSet(h_s=h_s, h_t=h_t, hhat_s=hhat_s, hhat_t=hhat_t)
