"""Configuration intake and derived constants.

All frequencies and rates are stored as angular frequencies in rad/s.
A configuration file may give any angular quantity either directly
(``"omega_m": 1.0e7``) or as a Hz value through the explicit marker key
(``"omega_m_2pi_hz": 350e3``, meaning omega_m = 2*pi*350 kHz). Conversion
happens once, at load time.

SI units everywhere else: meters, kilograms, watts, kelvin.
"""

from __future__ import annotations

import io
import json
import math
import os
import warnings
from dataclasses import dataclass

from .errors import ConfigError

# Fixed physical constants (SI). k_B and c are exact SI definitions; hbar is
# pinned to this truncation so results are reproducible bit for bit.
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23      # J / K
C_LIGHT = 2.99792458e8  # m / s

# Fields that are angular frequencies and accept the *_2pi_hz alternative.
_ANGULAR_FIELDS = (
    "omega_m", "kappa_A", "kappa_C",
    "Delta_A", "Delta_C", "Delta_at", "gamma_at", "g_at",
)

# Strictly positive quantities (rates, lengths, masses, powers, temperature).
_POSITIVE_FIELDS = (
    "L", "m", "lambda", "omega_m", "Q_m",
    "kappa_A", "kappa_C", "gamma_at", "P_in", "T_bath",
)

# Couplings and populations may be zero (the J -> 0 equivalence runs need it).
_NONNEGATIVE_FIELDS = ("g_at", "N_atoms")

_ALL_KEYS = (
    "L", "m", "lambda", "omega_m", "Q_m", "kappa_A", "kappa_C",
    "Delta_A", "Delta_C", "Delta_at", "gamma_at", "g_at",
    "N_atoms", "P_in", "T_bath", "feedback_enabled",
)


@dataclass(frozen=True)
class SystemConfig:
    """Lab-style inputs for the two-cavity system, in canonical units.

    Attributes
    ----------
    L : float
        Optomechanical cavity length [m].
    m : float
        Effective mirror mass [kg].
    lambda_ : float
        Drive laser wavelength [m]. (JSON key: ``"lambda"``.)
    omega_m : float
        Mechanical angular frequency [rad/s].
    Q_m : float
        Mechanical quality factor (>= 1).
    kappa_A, kappa_C : float
        Amplitude decay rates of cavities A and C [rad/s]; the rate
        multiplies a, not a^dagger a.
    Delta_A, Delta_C, Delta_at : float
        Detunings omega_X - omega_L [rad/s]; any sign.
    gamma_at : float
        Atomic coherence decay rate [rad/s].
    g_at : float
        Atom-cavity coupling [rad/s].
    N_atoms : float
        Atom number.
    P_in : float
        Drive power into cavity A [W].
    T_bath : float
        Bath temperature [K].
    feedback_enabled : bool
        Selects J = sqrt(kappa_A*kappa_C) when True, J = 0 when False.
    """

    L: float
    m: float
    lambda_: float
    omega_m: float
    Q_m: float
    kappa_A: float
    kappa_C: float
    Delta_A: float
    Delta_C: float
    Delta_at: float
    gamma_at: float
    g_at: float
    N_atoms: float
    P_in: float
    T_bath: float
    feedback_enabled: bool


@dataclass(frozen=True)
class DerivedParams:
    """Constants computed once from a SystemConfig.

    omega_m and kappa_A are carried over verbatim so the solvers can run
    from this object alone.

    Attributes
    ----------
    omega_L : float
        Drive angular frequency 2*pi*c/lambda [rad/s].
    g_OM : float
        Optomechanical coupling omega_A/L [rad/(s m)], with omega_A
        taken equal to omega_L (Delta_A << omega_L for all inputs here).
    chi : float
        Scaled coupling g_OM*sqrt(hbar/(m*omega_m))/omega_m [1/sqrt(photon)].
    gamma_m : float
        Mechanical damping omega_m/Q_m [rad/s].
    J : float
        Inter-cavity coupling sqrt(kappa_A*kappa_C), or 0 [rad/s].
    eps_A : float
        Drive amplitude sqrt(2*kappa_A*P_in/(hbar*omega_L)) [sqrt(photon)/s].
    omega_m, kappa_A : float
        Copies of the config rates [rad/s].
    """

    omega_L: float
    g_OM: float
    chi: float
    gamma_m: float
    J: float
    eps_A: float
    omega_m: float
    kappa_A: float


def config_from_dict(doc: dict) -> SystemConfig:
    """Validate a parsed key-value document and build a SystemConfig.

    Unknown keys are reported as warnings, never errors. Every validation
    error names the offending key.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object of key-value pairs")

    values: dict[str, float] = {}
    consumed = set()

    for key in _ANGULAR_FIELDS:
        alt = key + "_2pi_hz"
        has_raw, has_alt = key in doc, alt in doc
        if has_raw and has_alt:
            raise ConfigError(f"config gives both '{key}' and '{alt}'; use exactly one")
        if has_alt:
            values[key] = 2.0 * math.pi * _as_number(alt, doc[alt])
            consumed.add(alt)
        elif has_raw:
            values[key] = _as_number(key, doc[key])
            consumed.add(key)
        else:
            raise ConfigError(f"missing required config key '{key}' (or '{alt}')")

    for key in ("L", "m", "lambda", "Q_m", "N_atoms", "P_in", "T_bath"):
        if key not in doc:
            raise ConfigError(f"missing required config key '{key}'")
        values[key] = _as_number(key, doc[key])
        consumed.add(key)

    if "feedback_enabled" not in doc:
        raise ConfigError("missing required config key 'feedback_enabled'")
    fb = doc["feedback_enabled"]
    if not isinstance(fb, bool):
        raise ConfigError("config key 'feedback_enabled' must be a JSON boolean")
    consumed.add("feedback_enabled")

    unknown = sorted(set(doc) - consumed)
    if unknown:
        warnings.warn(f"ignoring unknown config keys: {', '.join(unknown)}", stacklevel=2)

    for key in _POSITIVE_FIELDS:
        if not values[key] > 0.0:
            raise ConfigError(f"config key '{key}' must be strictly positive, got {values[key]!r}")
    for key in _NONNEGATIVE_FIELDS:
        if values[key] < 0.0:
            raise ConfigError(f"config key '{key}' must be nonnegative, got {values[key]!r}")
    if values["Q_m"] < 1.0:
        raise ConfigError(f"config key 'Q_m' must be >= 1, got {values['Q_m']!r}")

    return SystemConfig(
        L=values["L"], m=values["m"], lambda_=values["lambda"],
        omega_m=values["omega_m"], Q_m=values["Q_m"],
        kappa_A=values["kappa_A"], kappa_C=values["kappa_C"],
        Delta_A=values["Delta_A"], Delta_C=values["Delta_C"],
        Delta_at=values["Delta_at"], gamma_at=values["gamma_at"],
        g_at=values["g_at"], N_atoms=values["N_atoms"],
        P_in=values["P_in"], T_bath=values["T_bath"],
        feedback_enabled=fb,
    )


def load_config(source) -> SystemConfig:
    """Load and validate a configuration.

    Parameters
    ----------
    source : str | os.PathLike | file-like | dict
        Path to a JSON file, an open text stream, or an already parsed
        mapping.
    """
    if isinstance(source, dict):
        return config_from_dict(source)
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        text = source.read()
        name = getattr(source, "name", "<stream>")
    else:
        path = os.fspath(source)
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
        name = path
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {name!r} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def derive(config: SystemConfig) -> DerivedParams:
    """Compute every derived constant the solvers need.

    Pure function: equal configs give bit-identical results.
    """
    omega_L = 2.0 * math.pi * C_LIGHT / config.lambda_
    g_OM = omega_L / config.L
    chi = g_OM * math.sqrt(HBAR / (config.m * config.omega_m)) / config.omega_m
    gamma_m = config.omega_m / config.Q_m
    J = math.sqrt(config.kappa_A * config.kappa_C) if config.feedback_enabled else 0.0
    eps_A = drive_amplitude(config, config.P_in, omega_L)
    return DerivedParams(
        omega_L=omega_L, g_OM=g_OM, chi=chi, gamma_m=gamma_m, J=J,
        eps_A=eps_A, omega_m=config.omega_m, kappa_A=config.kappa_A,
    )


def drive_amplitude(config: SystemConfig, power: float, omega_L: float | None = None) -> float:
    """eps_A = sqrt(2*kappa_A*P/(hbar*omega_L)) for an arbitrary drive power [W]."""
    if omega_L is None:
        omega_L = 2.0 * math.pi * C_LIGHT / config.lambda_
    if power < 0.0:
        raise ConfigError(f"drive power must be nonnegative, got {power!r}")
    return math.sqrt(2.0 * config.kappa_A * power / (HBAR * omega_L))


def n_bath(config: SystemConfig) -> float:
    """Thermal phonon number k_B*T_bath/(hbar*omega_m)."""
    return K_B * config.T_bath / (HBAR * config.omega_m)


def _as_number(key, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key '{key}' must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"config key '{key}' must be finite, got {value!r}")
    return float(value)
