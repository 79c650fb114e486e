"""Radiation-pressure backaction on the mechanical oscillator.

For a solved branch, the cavity response at the mechanical frequency is
captured by

    S = i*Delta_eff - sigma + kappa_A,
    R = 1/(S - i*omega_m) - 1/(S* - i*omega_m),

from which follow the optomechanical damping gamma_OM, the optical spring
K_OM, the Stokes / anti-Stokes sideband rates and the backaction-limited
phonon number n_min. Delta_eff is the branch's self-consistent effective
detuning, not the bare Delta_A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .atomic_feedback import feedback_for
from .errors import PoleProximityError
from .params import HBAR, K_B, DerivedParams, SystemConfig
from .steady_state import SteadyStateBranch


@dataclass(frozen=True)
class CoolingReport:
    """Backaction quantities for one operating point.

    gamma_OM, gamma_stokes, gamma_antistokes in rad/s; K_OM in N/m;
    omega_eff in rad/s (NaN when the spring is unstable); n_min is
    infinite in the heating regime. flags collects "unstable_spring"
    and "heating_regime" markers.
    """

    S: complex
    R: complex
    gamma_OM: float
    K_OM: float
    omega_eff: float
    gamma_stokes: float
    gamma_antistokes: float
    n_bath: float
    n_min: float
    flags: tuple[str, ...] = ()
    branch_index: int | None = None


def response_factor(
    branch: SteadyStateBranch, derived: DerivedParams, config: SystemConfig
) -> tuple[complex, complex]:
    """(S, R) evaluated at the mechanical frequency."""
    sigma = feedback_for(config, derived).sigma
    S = 1j * branch.Delta_eff - sigma + derived.kappa_A
    d_anti = S - 1j * derived.omega_m
    d_stokes = S.conjugate() - 1j * derived.omega_m
    _check_pole(d_anti, derived.omega_m)
    _check_pole(d_stokes, derived.omega_m)
    return S, 1.0 / d_anti - 1.0 / d_stokes


def damping_and_spring(
    R: complex, branch: SteadyStateBranch, derived: DerivedParams, config: SystemConfig
) -> tuple[float, float, float]:
    """(gamma_OM, K_OM, omega_eff) from the response factor.

    gamma_OM = hbar*(g_OM*|a_S|)^2*Re(R)/(m*omega_m),
    K_OM     = hbar*(g_OM*|a_S|)^2*Im(R),
    omega_eff = sqrt(omega_m^2 + K_OM/m); when the argument is negative the
    spring is unstable and omega_eff comes back NaN (flagged, not raised).
    """
    pre = HBAR * (derived.g_OM * abs(branch.a_S)) ** 2
    gamma_OM = pre * R.real / (config.m * derived.omega_m)
    K_OM = pre * R.imag
    w2 = derived.omega_m ** 2 + K_OM / config.m
    omega_eff = math.sqrt(w2) if w2 >= 0.0 else math.nan
    return gamma_OM, K_OM, omega_eff


def sideband_rates(
    branch: SteadyStateBranch, derived: DerivedParams, config: SystemConfig
) -> tuple[float, float]:
    """(gamma_stokes, gamma_antistokes): heating / cooling sideband rates."""
    S, _ = response_factor(branch, derived, config)
    pre = HBAR * (derived.g_OM * abs(branch.a_S)) ** 2 / (config.m * derived.omega_m)
    g_stokes = pre * (1.0 / (S.conjugate() - 1j * derived.omega_m)).real
    g_anti = pre * (1.0 / (S - 1j * derived.omega_m)).real
    return g_stokes, g_anti


def phonon_number(
    gamma_stokes: float, gamma_OM: float, config: SystemConfig, derived: DerivedParams
) -> tuple[float, float]:
    """(n_bath, n_min).

    n_min = (gamma_stokes + gamma_m*n_bath)/(gamma_OM + gamma_m), exactly as
    stated; a nonpositive denominator means there is no steady cooling limit
    and n_min is reported as infinity.
    """
    nb = K_B * config.T_bath / (HBAR * derived.omega_m)
    denom = gamma_OM + derived.gamma_m
    if denom <= 0.0:
        return nb, math.inf
    return nb, (gamma_stokes + derived.gamma_m * nb) / denom


def cooling_report(
    branch: SteadyStateBranch,
    derived: DerivedParams,
    config: SystemConfig,
    branch_index: int | None = None,
) -> CoolingReport:
    """Assemble the full backaction report for one branch."""
    S, R = response_factor(branch, derived, config)
    gamma_OM, K_OM, omega_eff = damping_and_spring(R, branch, derived, config)
    g_stokes, g_anti = sideband_rates(branch, derived, config)
    nb, n_min = phonon_number(g_stokes, gamma_OM, config, derived)
    flags = []
    if math.isnan(omega_eff):
        flags.append("unstable_spring")
    if math.isinf(n_min):
        flags.append("heating_regime")
    return CoolingReport(
        S=S, R=R, gamma_OM=gamma_OM, K_OM=K_OM, omega_eff=omega_eff,
        gamma_stokes=g_stokes, gamma_antistokes=g_anti,
        n_bath=nb, n_min=n_min, flags=tuple(flags), branch_index=branch_index,
    )


def _check_pole(denom: complex, omega_m: float) -> None:
    if abs(denom) < 1e-30 * omega_m:
        raise PoleProximityError(
            f"response denominator |{denom!r}| within 1e-30*omega_m of the pole"
        )
