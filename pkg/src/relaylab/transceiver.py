"""Monte-Carlo engine for the two-phase bidirectional exchange through the
selected relay: superposition, variable-gain amplification, self-interference
cancellation with estimated coefficients, phase compensation and coherent
minimum-distance detection.

`run_trial` performs one cycle through the channel/selection modules and is
meant for exactness tests; `estimate_ser` runs the vectorized kernel over a
fixed chunk grid so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .channel import CsiParams, RelayChannelSet, sample_relay_channels
from .selection import best_worse_channel

_CHUNK = 1 << 20
_Z95 = 1.959963984540054


def symbol_alphabet(modulation: str) -> np.ndarray:
    """Unit-average-power PSK alphabet for the given modulation name."""
    m = modulation.strip().upper()
    if m == "BPSK":
        return np.array([1.0 + 0.0j, -1.0 + 0.0j])
    if m == "QPSK":
        # Gray-mapped unit-energy QPSK on the diagonals
        return np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * np.arange(4)))
    if m.startswith("MPSK") or m.endswith("PSK"):
        digits = "".join(c for c in m if c.isdigit())
        if not digits:
            raise ValueError(f"symbol_alphabet: cannot parse order from {modulation!r}")
        order = int(digits)
        if order <= 4:
            raise ValueError("symbol_alphabet: MPSK requires M > 4")
        return np.exp(2j * np.pi * np.arange(order) / order)
    raise ValueError(f"symbol_alphabet: unknown modulation {modulation!r}")


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters: relay count, powers, noise and modulation."""

    n_relays: int
    p_s: float
    p_r: float
    n0: float
    modulation: str = "BPSK"

    def __post_init__(self):
        if self.n_relays < 1:
            raise ValueError("SystemConfig: n_relays must be >= 1")
        if self.p_s <= 0 or self.p_r <= 0 or self.n0 <= 0:
            raise ValueError("SystemConfig: powers and noise density must be > 0")
        symbol_alphabet(self.modulation)  # validates the name

    @property
    def psi_s(self) -> float:
        return self.p_s / self.n0

    @property
    def psi_r(self) -> float:
        return self.p_r / self.n0


@dataclass(frozen=True)
class TrialOutcome:
    symbols_sent: int
    symbol_errors_at_s1: int
    symbol_errors_at_s2: int

    def __post_init__(self):
        if (self.symbol_errors_at_s1 > self.symbols_sent
                or self.symbol_errors_at_s2 > self.symbols_sent):
            raise ValueError("TrialOutcome: more errors than symbols")


@dataclass(frozen=True)
class SerEstimate:
    ser1: float
    ci1: Tuple[float, float]
    ser2: float
    ci2: Tuple[float, float]
    errors1: int
    errors2: int
    trials: int


def amplification_factor(g1: float, g2: float, p_s: float, n0: float) -> float:
    """Variable relay gain (p_s*g1 + p_s*g2 + N0)^(-1/2) from the estimated
    transmission-time power gains."""
    if g1 < 0 or g2 < 0:
        raise ValueError("amplification_factor: gains must be >= 0")
    if p_s <= 0 or n0 <= 0:
        raise ValueError("amplification_factor: p_s and n0 must be > 0")
    return 1.0 / math.sqrt(p_s * (g1 + g2) + n0)


def instantaneous_snr_exact(g1, g2, cfg: SystemConfig, params: CsiParams):
    """Post-processing SNR at source 1 with all residual-interference terms.

    g1/g2 are the estimated transmission-time power gains of the selected
    relay.  Scalar or ndarray.
    """
    ps, pr = cfg.psi_s, cfg.psi_r
    re2 = params.rho_e ** 2
    s2d = params.sigma2_D
    num = pr * ps * re2 ** 2 * np.asarray(g1) * np.asarray(g2)
    den = ((5.0 * pr * ps * re2 * s2d + pr * re2 + ps) * np.asarray(g1)
           + (pr * ps * re2 * s2d + ps) * np.asarray(g2)
           + 3.0 * pr * ps * s2d ** 2 + pr * s2d + 1.0)
    out = num / den
    return float(out) if np.ndim(out) == 0 else out


def instantaneous_snr_simplified(g1, g2, cfg: SystemConfig, params: CsiParams):
    """High-SNR harmonic form at*g1*bt*g2/(at*g1 + bt*g2); 0 when both
    gains vanish.  Never below `instantaneous_snr_exact`."""
    ps, pr = cfg.psi_s, cfg.psi_r
    re2 = params.rho_e ** 2
    s2d = params.sigma2_D
    at = pr * re2 ** 2 / (1.0 + pr * re2 * s2d)
    bt = pr * ps * re2 ** 2 / (5.0 * pr * ps * re2 * s2d + pr * re2 + ps)
    num = at * np.asarray(g1) * bt * np.asarray(g2)
    den = at * np.asarray(g1) + bt * np.asarray(g2)
    out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), 0.0)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class Exchange:
    """Intermediate quantities of one full exchange, for exactness tests."""

    channels: RelayChannelSet
    index_k: int
    beta: float
    s1: complex
    s2: complex
    received_s1: complex        # y at S1 before cancellation
    received_s2: complex
    cancelled_s1: complex       # after subtracting the reconstructed self-term
    cancelled_s2: complex
    processed_s1: complex       # after phase compensation
    processed_s2: complex
    statistic: float            # coherent amplitude of the useful term
    detected_at_s1: complex     # decision on s2
    detected_at_s2: complex     # decision on s1


def _detect(y: complex, stat: float, alphabet: np.ndarray) -> complex:
    d2 = np.abs(y - stat * alphabet) ** 2
    return complex(alphabet[int(np.argmin(d2))])


def _single_exchange(rng: np.random.Generator, cfg: SystemConfig,
                     params: CsiParams, noise_scale: float = 1.0) -> Exchange:
    """One exchange cycle with full intermediate state."""
    cs = sample_relay_channels(rng, params, cfg.n_relays)
    gains = np.stack([np.abs(cs.hhat_s[0]) ** 2, np.abs(cs.hhat_s[1]) ** 2], axis=1)
    k = best_worse_channel(gains).index_k

    alphabet = symbol_alphabet(cfg.modulation)
    sym = rng.integers(0, len(alphabet), 2)
    s1, s2 = complex(alphabet[sym[0]]), complex(alphabet[sym[1]])

    ht1, ht2 = cs.h_t[0, k], cs.h_t[1, k]
    hh1, hh2 = cs.hhat_t[0, k], cs.hhat_t[1, k]
    g1, g2 = abs(hh1) ** 2, abs(hh2) ** 2
    beta = amplification_factor(g1, g2, cfg.p_s, cfg.n0)

    sig = math.sqrt(cfg.n0 / 2.0) * noise_scale
    nk, n1, n2 = (sig * (rng.standard_normal() + 1j * rng.standard_normal())
                  for _ in range(3))

    yk = math.sqrt(cfg.p_s) * (ht1 * s1 + ht2 * s2) + nk
    xk = math.sqrt(cfg.p_r) * beta * yk
    y1r = ht1 * xk + n1
    y2r = ht2 * xk + n2

    c = math.sqrt(cfg.p_r * cfg.p_s) * beta * params.rho_e ** 2
    y1c = y1r - c * hh1 * hh1 * s1
    y2c = y2r - c * hh2 * hh2 * s2
    rot = np.conj(hh1) * np.conj(hh2)
    y1 = rot * y1c
    y2 = rot * y2c
    stat = c * g1 * g2

    return Exchange(
        channels=cs, index_k=k, beta=beta, s1=s1, s2=s2,
        received_s1=complex(y1r), received_s2=complex(y2r),
        cancelled_s1=complex(y1c), cancelled_s2=complex(y2c),
        processed_s1=complex(y1), processed_s2=complex(y2),
        statistic=float(stat),
        detected_at_s1=_detect(complex(y1), stat, alphabet),
        detected_at_s2=_detect(complex(y2), stat, alphabet),
    )


def run_trial(rng: np.random.Generator, cfg: SystemConfig, params: CsiParams,
              noise_scale: float = 1.0) -> TrialOutcome:
    """One exchange; counts a symbol error per direction.

    Deterministic given the generator state.  `noise_scale` is a test-only
    hook (0 disables all noise)."""
    ex = _single_exchange(rng, cfg, params, noise_scale)
    return TrialOutcome(
        symbols_sent=1,
        symbol_errors_at_s1=int(ex.detected_at_s1 != ex.s2),
        symbol_errors_at_s2=int(ex.detected_at_s2 != ex.s1),
    )


def _batch_errors(rng: np.random.Generator, cfg: SystemConfig, params: CsiParams,
                  n: int, noise_scale: float = 1.0) -> Tuple[int, int]:
    """Vectorized error counts over n exchanges (same law as run_trial;
    the transmission-time innovation is drawn for the selected relay only)."""
    nr = cfg.n_relays
    s2e = params.sigma2_e
    rf1, rf2 = params.rho_f1, params.rho_f2
    fresh = rf1 == 1.0 and rf2 == 1.0

    z = rng.standard_normal((2, 2, n, nr))
    hs = math.sqrt(0.5) * (z[0] + 1j * z[1])
    if s2e > 0.0:
        z = rng.standard_normal((2, 2, n, nr))
        hhs = hs + math.sqrt(s2e / 2.0) * (z[0] + 1j * z[1])
    else:
        hhs = hs
    w = np.minimum(hhs[0].real**2 + hhs[0].imag**2,
                   hhs[1].real**2 + hhs[1].imag**2)
    k = np.argmax(w, axis=1)
    rows = np.arange(n)
    hs_k = hs[:, rows, k]
    if fresh:
        ht = hs_k
    else:
        z = rng.standard_normal((2, 2, n))
        eps = math.sqrt(0.5) * (z[0] + 1j * z[1])
        rf = np.array([[rf1], [rf2]])
        ht = rf * hs_k + np.sqrt(1.0 - rf**2) * eps
    if s2e > 0.0:
        z = rng.standard_normal((2, 2, n))
        hht = ht + math.sqrt(s2e / 2.0) * (z[0] + 1j * z[1])
    else:
        hht = ht

    g1 = hht[0].real**2 + hht[0].imag**2
    g2 = hht[1].real**2 + hht[1].imag**2
    beta = 1.0 / np.sqrt(cfg.p_s * (g1 + g2) + cfg.n0)

    alphabet = symbol_alphabet(cfg.modulation)
    m = len(alphabet)
    sym = rng.integers(0, m, (2, n))
    s1 = alphabet[sym[0]]
    s2 = alphabet[sym[1]]

    sig = math.sqrt(cfg.n0 / 2.0) * noise_scale
    z = rng.standard_normal((3, 2, n))
    nk = sig * (z[0, 0] + 1j * z[0, 1])
    n1 = sig * (z[1, 0] + 1j * z[1, 1])
    n2 = sig * (z[2, 0] + 1j * z[2, 1])

    yk = math.sqrt(cfg.p_s) * (ht[0] * s1 + ht[1] * s2) + nk
    xk = math.sqrt(cfg.p_r) * beta * yk
    c = math.sqrt(cfg.p_r * cfg.p_s) * beta * params.rho_e ** 2
    rot = np.conj(hht[0]) * np.conj(hht[1])
    y1 = rot * (ht[0] * xk + n1 - c * hht[0] * hht[0] * s1)
    y2 = rot * (ht[1] * xk + n2 - c * hht[1] * hht[1] * s2)

    # statistic = c*g1*g2 >= 0 and |alphabet| = 1, so minimum distance
    # reduces to maximum correlation with the alphabet phases
    if m == 2:
        det2 = (y1.real < 0.0).astype(np.int64)
        det1 = (y2.real < 0.0).astype(np.int64)
    else:
        ar, ai = alphabet.real, alphabet.imag
        det2 = np.argmax(np.outer(y1.real, ar) + np.outer(y1.imag, ai), axis=1)
        det1 = np.argmax(np.outer(y2.real, ar) + np.outer(y2.imag, ai), axis=1)
    return int(np.sum(det2 != sym[1])), int(np.sum(det1 != sym[0]))


def sample_selected_snr(seed: int, cfg: SystemConfig, params: CsiParams,
                        n: int, simplified: bool = True) -> np.ndarray:
    """Draw n instantaneous-SNR values of the selected relay's link.

    Samples the channel/selection process only (no symbols or noise) and
    evaluates the simplified (or exact) SNR formula on the estimated
    transmission-time gains; used to compare against the analytic CDF.
    """
    snr_fun = instantaneous_snr_simplified if simplified else instantaneous_snr_exact
    out = np.empty(n)
    nr = cfg.n_relays
    s2e = params.sigma2_e
    rf1, rf2 = params.rho_f1, params.rho_f2
    fresh = rf1 == 1.0 and rf2 == 1.0
    done = 0
    for index, count in _chunk_spans(n):
        rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
        z = rng.standard_normal((2, 2, count, nr))
        hs = math.sqrt(0.5) * (z[0] + 1j * z[1])
        if s2e > 0.0:
            z = rng.standard_normal((2, 2, count, nr))
            hhs = hs + math.sqrt(s2e / 2.0) * (z[0] + 1j * z[1])
        else:
            hhs = hs
        w = np.minimum(hhs[0].real**2 + hhs[0].imag**2,
                       hhs[1].real**2 + hhs[1].imag**2)
        k = np.argmax(w, axis=1)
        rows = np.arange(count)
        if fresh:
            ht = hs[:, rows, k]
        else:
            z = rng.standard_normal((2, 2, count))
            eps = math.sqrt(0.5) * (z[0] + 1j * z[1])
            rf = np.array([[rf1], [rf2]])
            ht = rf * hs[:, rows, k] + np.sqrt(1.0 - rf**2) * eps
        if s2e > 0.0:
            z = rng.standard_normal((2, 2, count))
            hht = ht + math.sqrt(s2e / 2.0) * (z[0] + 1j * z[1])
        else:
            hht = ht
        g1 = hht[0].real**2 + hht[0].imag**2
        g2 = hht[1].real**2 + hht[1].imag**2
        out[done:done + count] = snr_fun(g1, g2, cfg, params)
        done += count
    return out


def _chunk_spans(trials: int):
    return [(i, min(_CHUNK, trials - i * _CHUNK))
            for i in range((trials + _CHUNK - 1) // _CHUNK)]


def _chunk_job(args) -> Tuple[int, int]:
    seed, index, count, cfg, params, noise_scale = args
    rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
    return _batch_errors(rng, cfg, params, count, noise_scale)


def wilson_interval(errors: int, trials: int) -> Tuple[float, float]:
    """95% Wilson score interval for a binomial fraction."""
    if trials < 1:
        raise ValueError("wilson_interval: trials must be >= 1")
    p = errors / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2.0 * trials)) / denom
    half = _Z95 * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials**2)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return (lo, hi)


def estimate_ser(seed: int, cfg: SystemConfig, params: CsiParams, trials: int,
                 workers: int = 1, noise_scale: float = 1.0) -> SerEstimate:
    """Symbol-error fractions at both sources with 95% Wilson intervals.

    Trials are split into fixed chunks; chunk i draws from a generator
    seeded by (seed, i), so the result does not depend on `workers`.
    """
    if trials < 1:
        raise ValueError("estimate_ser: trials must be >= 1")
    jobs = [(seed, i, cnt, cfg, params, noise_scale) for i, cnt in _chunk_spans(trials)]
    if workers > 1 and len(jobs) > 1:
        with multiprocessing.get_context("fork").Pool(min(workers, len(jobs))) as pool:
            results = pool.map(_chunk_job, jobs)
    else:
        results = [_chunk_job(j) for j in jobs]
    e1 = sum(r[0] for r in results)
    e2 = sum(r[1] for r in results)
    return SerEstimate(
        ser1=e1 / trials, ci1=wilson_interval(e1, trials),
        ser2=e2 / trials, ci2=wilson_interval(e2, trials),
        errors1=e1, errors2=e2, trials=trials,
    )
