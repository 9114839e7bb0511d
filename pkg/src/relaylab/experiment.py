"""Scenario runner: loads INI scenario files, sweeps SNR running the
Monte-Carlo engine and the analytics per point, and writes the results as
CSV.  Shipped scenario files fig1..fig4 reproduce the four reference
figure configurations.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence

from . import analytics
from .channel import cee_coefficient, derive_csi_params, jakes_correlation
from .transceiver import SystemConfig, estimate_ser

CSV_COLUMNS = [
    "scenario", "snr_db", "n_relays", "rho_f1", "rho_f2", "rho_e",
    "modulation", "trials", "ser_mc", "ci_low", "ci_high",
    "ser_asymptotic", "ser_integral", "diversity_order", "note",
]

# adaptive trial budget: points whose predicted SER falls below this get
# ten times the configured trials, capped
ADAPTIVE_SER_FLOOR = 1e-5
ADAPTIVE_FACTOR = 10
ADAPTIVE_CAP = 100_000_000

_SCENARIO_KEYS = {
    "n_relays", "rho_f1", "rho_f2", "training_power_ratio", "modulation",
    "snr_db", "trials_per_point", "seed",
}


class ConfigError(Exception):
    """Scenario configuration problem; message names the offending field."""


@dataclass(frozen=True)
class Scenario:
    """One SER-vs-SNR curve: CSI parameters, modulation, grid and budget.

    `training_power_ratio` is the training-to-data power ratio P/P0
    (math.inf means no estimation error); the estimation coefficient then
    follows per point as rho_e = c*psi/(c*psi + 1) with psi = P0/N0.
    """

    name: str
    n_relays: int
    rho_f1: float
    rho_f2: float
    training_power_ratio: float
    modulation: str
    snr_db: tuple
    trials_per_point: int
    seed: int

    def rho_e_at(self, snr_db: float) -> float:
        if math.isinf(self.training_power_ratio):
            return 1.0
        psi = 10.0 ** (snr_db / 10.0)
        return cee_coefficient(self.training_power_ratio * psi, 1.0)


@dataclass(frozen=True)
class SerPoint:
    scenario: str
    snr_db: float
    n_relays: int
    rho_f1: float
    rho_f2: float
    rho_e: float
    modulation: str
    trials: int
    ser_mc: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    ser_asymptotic: Optional[float]
    ser_integral: Optional[float]
    diversity_order: int
    note: str = ""


def _parse_rho_f(raw: str, key: str, section: str) -> float:
    raw = raw.strip()
    m = re.fullmatch(r"jakes\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)", raw)
    if m:
        try:
            val = jakes_correlation(float(m.group(1)), float(m.group(2)))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None
    else:
        try:
            val = float(raw)
        except ValueError:
            raise ConfigError(
                f"[{section}] {key}: expected a number or jakes(f_d, T), got {raw!r}"
            ) from None
    if not 0.0 <= val <= 1.0:
        raise ConfigError(f"[{section}] {key}: value {val:.6g} outside [0, 1]")
    return val


def _parse_section(sec: configparser.SectionProxy, defaults: dict,
                   section: str, name: str) -> Scenario:
    merged = dict(defaults)
    for key in sec:
        if key not in _SCENARIO_KEYS:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        merged[key] = sec[key]
    missing = _SCENARIO_KEYS - merged.keys()
    if missing:
        raise ConfigError(f"[{section}] missing keys: {', '.join(sorted(missing))}")

    try:
        n_relays = int(merged["n_relays"])
        trials = int(merged["trials_per_point"])
        seed = int(merged["seed"])
    except ValueError as exc:
        raise ConfigError(f"[{section}] integer field: {exc}") from None
    if n_relays < 1:
        raise ConfigError(f"[{section}] n_relays: must be >= 1")
    if trials < 10_000:
        raise ConfigError(f"[{section}] trials_per_point: must be >= 10000")
    if seed < 0:
        raise ConfigError(f"[{section}] seed: must be >= 0")

    rho_f1 = _parse_rho_f(merged["rho_f1"], "rho_f1", section)
    rho_f2 = _parse_rho_f(merged["rho_f2"], "rho_f2", section)

    tpr_raw = str(merged["training_power_ratio"]).strip().lower()
    if tpr_raw in ("infinite", "inf"):
        tpr = math.inf
    else:
        try:
            tpr = float(tpr_raw)
        except ValueError:
            raise ConfigError(
                f"[{section}] training_power_ratio: expected a number or 'infinite'"
            ) from None
        if tpr <= 0:
            raise ConfigError(f"[{section}] training_power_ratio: must be > 0")

    try:
        snr = tuple(float(tok) for tok in str(merged["snr_db"]).split())
    except ValueError:
        raise ConfigError(f"[{section}] snr_db: expected space-separated numbers") from None
    if not snr:
        raise ConfigError(f"[{section}] snr_db: empty grid")
    if any(b <= a for a, b in zip(snr, snr[1:])):
        raise ConfigError(f"[{section}] snr_db: must be strictly increasing")

    modulation = str(merged["modulation"]).strip()
    try:
        analytics.modulation_constants(modulation)
    except ValueError as exc:
        raise ConfigError(f"[{section}] modulation: {exc}") from None

    return Scenario(name=name, n_relays=n_relays, rho_f1=rho_f1, rho_f2=rho_f2,
                    training_power_ratio=tpr, modulation=modulation,
                    snr_db=snr, trials_per_point=trials, seed=seed)


def parse_scenario_file(path) -> List[Scenario]:
    """Read a scenario INI file: a [common] section of shared keys plus one
    [curve:<label>] section per curve (each may override any key)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    defaults: dict = {}
    if cp.has_section("common"):
        for key in cp["common"]:
            if key not in _SCENARIO_KEYS:
                raise ConfigError(f"[common] unknown key {key!r}")
            defaults[key] = cp["common"][key]

    scenarios = []
    stem = path.stem
    for section in cp.sections():
        if section == "common":
            continue
        if not section.startswith("curve:"):
            raise ConfigError(
                f"[{section}]: sections must be [common] or [curve:<label>]")
        label = section.split(":", 1)[1].strip()
        if not label:
            raise ConfigError(f"[{section}]: empty curve label")
        scenarios.append(_parse_section(cp[section], defaults, section,
                                        name=f"{stem}/{label}"))
    if not scenarios:
        raise ConfigError(f"{path}: no [curve:...] sections")
    return scenarios


def shipped_scenario_path(fig: str) -> Path:
    """Path of a shipped scenario file, e.g. 'fig1'."""
    p = Path(__file__).parent / "scenarios" / f"{fig}.ini"
    if not p.exists():
        raise ConfigError(f"no shipped scenario named {fig!r}")
    return p


def effective_trials(base: int, predicted_ser: float) -> int:
    """Ten-fold budget for deep points, capped."""
    if predicted_ser < ADAPTIVE_SER_FLOOR:
        return min(base * ADAPTIVE_FACTOR, max(base, ADAPTIVE_CAP))
    return base


def run_scenario(scenario: Scenario, workers: int = 1,
                 trials_override: Optional[int] = None,
                 analytic_only: bool = False,
                 mc_only: bool = False) -> List[SerPoint]:
    """One SerPoint per grid SNR; deterministic in (seed, scenario) and
    independent of `workers`."""
    if analytic_only and mc_only:
        raise ConfigError("analytic_only and mc_only are mutually exclusive")
    mods = analytics.modulation_constants(scenario.modulation)
    dorder = analytics.diversity_order(scenario.rho_f1, scenario.rho_f2,
                                       scenario.n_relays)
    points = []
    for pt_index, snr_db in enumerate(scenario.snr_db):
        psi = 10.0 ** (snr_db / 10.0)
        rho_e = scenario.rho_e_at(snr_db)
        params = derive_csi_params(scenario.rho_f1, scenario.rho_f2, rho_e)
        cfg = SystemConfig(n_relays=scenario.n_relays, p_s=psi, p_r=psi,
                           n0=1.0, modulation=scenario.modulation)

        ser_asym = analytics.asymptotic_ser(
            scenario.n_relays, psi, psi, rho_e,
            scenario.rho_f1, scenario.rho_f2, mods)
        if mc_only:
            ser_int = None
            asym_out = None
        else:
            coeffs = analytics.asymptotic_coeffs(psi, psi, rho_e)
            ser_int = analytics.ser_by_integration(
                lambda zz: analytics.cdf_gamma1(zz, scenario.n_relays, coeffs,
                                                params.rho_1, params.rho_2),
                mods)
            asym_out = ser_asym

        if analytic_only:
            trials, est, note = 0, None, "analytic-only"
        else:
            base = trials_override or scenario.trials_per_point
            trials = effective_trials(base, ser_asym)
            est = estimate_ser(seed_for_point(scenario.seed, pt_index), cfg,
                               params, trials, workers=workers)
            note = "zero-error" if est.errors1 == 0 else ""

        points.append(SerPoint(
            scenario=scenario.name, snr_db=snr_db, n_relays=scenario.n_relays,
            rho_f1=scenario.rho_f1, rho_f2=scenario.rho_f2, rho_e=rho_e,
            modulation=scenario.modulation, trials=trials,
            ser_mc=None if est is None else est.ser1,
            ci_low=None if est is None else est.ci1[0],
            ci_high=None if est is None else est.ci1[1],
            ser_asymptotic=asym_out, ser_integral=ser_int,
            diversity_order=dorder, note=note,
        ))
    return points


def seed_for_point(scenario_seed: int, point_index: int) -> int:
    """Distinct, reproducible per-point seed."""
    return scenario_seed * 1000 + point_index


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def emit_csv(points: Sequence[SerPoint], path) -> None:
    """Fixed-column CSV, floats at 10 significant digits."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for p in points:
                row = [_fmt(getattr(p, col)) for col in CSV_COLUMNS]
                fh.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"emit_csv: cannot write {path}: {exc}") from exc
