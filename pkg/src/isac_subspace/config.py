"""Scenario/sweep parameters and the flat ``key = value`` config format.

Config file syntax: one ``key = value`` per line, ``#`` starts a comment,
blank lines are ignored, list values are comma separated.  Unknown keys are
errors.  Powers are given in dBm and angles in degrees; everything is
converted to linear mW / radians here and nowhere else.

=====================  =========  ==============================================
key                    default    meaning
=====================  =========  ==============================================
n_t                    10         transmit antennas
n_r                    12         receive antennas
frame_length           30         samples per frame T (must be >= n_t)
p_dbm                  20         transmit power budget P
sigma_s_dbm            0          sensing noise power per receive antenna
sigma_c_dbm            0          communication noise power
theta_deg              15         target angle(s), degrees, comma separated
alpha_abs              1          reflection coefficient magnitude(s)
alpha_phase_deg        0          reflection coefficient phase(s), degrees
seed                   2024       base seed; channel i uses seed + i
gamma_points           20         rate grid size for the Pareto sweep
gamma_min_frac         0.02       lower end of the rate grid, fraction of gamma_max
gamma_max_frac         0.98       upper end of the rate grid, fraction of gamma_max
gamma_min_bpshz        (unset)    absolute lower end; overrides gamma_min_frac
gamma_max_bpshz        (unset)    absolute upper end; overrides gamma_max_frac
channels               5          channel realizations for the correlation study
normalize_channels     true       rescale each channel to unit norm
gamma1_frac            0.4        lower integration limit, fraction of Gamma_max
gamma2_frac            0.95       upper integration limit, fraction of Gamma_max
=====================  =========  ==============================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .array_model import SteeringSet, build_steering_set
from .errors import ConfigError, IsacError


def dbm_to_mw(dbm: float) -> float:
    return float(10.0 ** (dbm / 10.0))


def mw_to_dbm(mw: float) -> float:
    return float(10.0 * np.log10(mw))


@dataclass(frozen=True)
class Scenario:
    """Physical parameters. Powers in linear mW, angles in radians."""

    n_t: int = 10
    n_r: int = 12
    targets: tuple = ((np.deg2rad(15.0), 1.0 + 0.0j),)
    T: int = 30
    P: float = 100.0
    sigma_s_sq: float = 1.0
    sigma_c_sq: float = 1.0
    seed: int = 2024

    def __post_init__(self):
        if self.n_t < 2 or self.n_r < 2:
            raise IsacError("n_t and n_r must be at least 2")
        if not self.targets:
            raise IsacError("at least one target is required")
        if self.P <= 0:
            raise IsacError("P must be positive")
        if self.sigma_s_sq <= 0 or self.sigma_c_sq <= 0:
            raise IsacError("noise powers must be positive")
        if self.T < self.n_t:
            raise IsacError(f"frame length T={self.T} must be >= n_t={self.n_t}")
        object.__setattr__(
            self, "targets", tuple((float(th), complex(al)) for th, al in self.targets)
        )

    @property
    def num_targets(self) -> int:
        return len(self.targets)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([t[0] for t in self.targets])

    @property
    def alphas(self) -> np.ndarray:
        return np.array([t[1] for t in self.targets], dtype=complex)

    @property
    def theta(self) -> float:
        """Angle of the single target; errors if there are several."""
        self.require_single_target()
        return self.targets[0][0]

    @property
    def alpha(self) -> complex:
        self.require_single_target()
        return self.targets[0][1]

    def require_single_target(self):
        if self.num_targets != 1:
            raise IsacError(f"operation needs exactly one target, scenario has {self.num_targets}")

    def steering_set(self) -> SteeringSet:
        return build_steering_set(self.thetas, self.n_t, self.n_r)


@dataclass(frozen=True)
class SweepSpec:
    gamma_points: int = 20
    gamma_min_frac: float = 0.02
    gamma_max_frac: float = 0.98
    gamma_min_bpshz: float | None = None
    gamma_max_bpshz: float | None = None
    channels: int = 5
    normalize_channels: bool = True
    Gamma1_frac: float = 0.4
    Gamma2_frac: float = 0.95

    def __post_init__(self):
        if self.gamma_points < 1 or self.channels < 1:
            raise IsacError("counts must be >= 1")
        if not 0.0 <= self.Gamma1_frac <= self.Gamma2_frac <= 1.0:
            raise IsacError("need 0 <= gamma1_frac <= gamma2_frac <= 1")
        if self.gamma_min_frac < 0 or self.gamma_max_frac < self.gamma_min_frac:
            raise IsacError("need 0 <= gamma_min_frac <= gamma_max_frac")

    def gamma_grid(self, gamma_max: float) -> np.ndarray:
        """Rate thresholds (bits/s/Hz) for a channel whose best rate is ``gamma_max``."""
        lo = self.gamma_min_bpshz if self.gamma_min_bpshz is not None else self.gamma_min_frac * gamma_max
        hi = self.gamma_max_bpshz if self.gamma_max_bpshz is not None else self.gamma_max_frac * gamma_max
        return np.linspace(lo, hi, self.gamma_points)


def _as_list(text: str, conv):
    return [conv(v.strip()) for v in text.split(",") if v.strip()]


def _as_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _as_int(text: str) -> int:
    return int(text.strip())


def _as_float(text: str) -> float:
    return float(text.strip())


_PARSERS = {
    "n_t": _as_int,
    "n_r": _as_int,
    "frame_length": _as_int,
    "p_dbm": _as_float,
    "sigma_s_dbm": _as_float,
    "sigma_c_dbm": _as_float,
    "theta_deg": lambda s: _as_list(s, float),
    "alpha_abs": lambda s: _as_list(s, float),
    "alpha_phase_deg": lambda s: _as_list(s, float),
    "seed": _as_int,
    "gamma_points": _as_int,
    "gamma_min_frac": _as_float,
    "gamma_max_frac": _as_float,
    "gamma_min_bpshz": _as_float,
    "gamma_max_bpshz": _as_float,
    "channels": _as_int,
    "normalize_channels": _as_bool,
    "gamma1_frac": _as_float,
    "gamma2_frac": _as_float,
}

DEFAULTS = {
    "n_t": 10,
    "n_r": 12,
    "frame_length": 30,
    "p_dbm": 20.0,
    "sigma_s_dbm": 0.0,
    "sigma_c_dbm": 0.0,
    "theta_deg": [15.0],
    "alpha_abs": [1.0],
    "alpha_phase_deg": [0.0],
    "seed": 2024,
    "gamma_points": 20,
    "gamma_min_frac": 0.02,
    "gamma_max_frac": 0.98,
    "gamma_min_bpshz": None,
    "gamma_max_bpshz": None,
    "channels": 5,
    "normalize_channels": True,
    "gamma1_frac": 0.4,
    "gamma2_frac": 0.95,
}

_POSITIVE_INTS = ("n_t", "n_r", "frame_length", "gamma_points", "channels")


def parse_config(text: str) -> tuple[Scenario, SweepSpec]:
    values = dict(DEFAULTS)
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError("unknown key", key=key, line=lineno)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"malformed value {value!r} ({exc})", key=key, line=lineno) from None
        lines[key] = lineno

    for key in _POSITIVE_INTS:
        if values[key] < 1:
            raise ConfigError(f"must be a positive integer, got {values[key]}", key=key, line=lines.get(key))

    thetas = values["theta_deg"]
    n = len(thetas)
    mags = values["alpha_abs"]
    phases = values["alpha_phase_deg"]
    if len(mags) == 1:
        mags = mags * n
    if len(phases) == 1:
        phases = phases * n
    for key, seq in (("alpha_abs", mags), ("alpha_phase_deg", phases)):
        if len(seq) != n:
            raise ConfigError(f"needs {n} entries to match theta_deg", key=key, line=lines.get(key))
    targets = tuple(
        (np.deg2rad(th), m * np.exp(1j * np.deg2rad(ph))) for th, m, ph in zip(thetas, mags, phases)
    )

    def build(cls, key_hint, **kwargs):
        try:
            return cls(**kwargs)
        except IsacError as exc:
            raise ConfigError(str(exc), key=key_hint, line=lines.get(key_hint)) from None

    for th in thetas:
        if not -90.0 < th < 90.0:
            raise ConfigError("angles must lie strictly inside (-90, 90) degrees", key="theta_deg",
                              line=lines.get("theta_deg"))

    scenario = build(
        Scenario,
        "frame_length",
        n_t=values["n_t"],
        n_r=values["n_r"],
        targets=targets,
        T=values["frame_length"],
        P=dbm_to_mw(values["p_dbm"]),
        sigma_s_sq=dbm_to_mw(values["sigma_s_dbm"]),
        sigma_c_sq=dbm_to_mw(values["sigma_c_dbm"]),
        seed=values["seed"],
    )
    sweep = build(
        SweepSpec,
        "gamma1_frac",
        gamma_points=values["gamma_points"],
        gamma_min_frac=values["gamma_min_frac"],
        gamma_max_frac=values["gamma_max_frac"],
        gamma_min_bpshz=values["gamma_min_bpshz"],
        gamma_max_bpshz=values["gamma_max_bpshz"],
        channels=values["channels"],
        normalize_channels=values["normalize_channels"],
        Gamma1_frac=values["gamma1_frac"],
        Gamma2_frac=values["gamma2_frac"],
    )
    return scenario, sweep


def load_config(path) -> tuple[Scenario, SweepSpec]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {str(path)!r}: {exc.strerror}") from None
    return parse_config(text)
