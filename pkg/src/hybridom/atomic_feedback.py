"""Atomic cavity steady state and the feedback term it injects into cavity A.

The atomic ensemble stays in its ground state (<sigma_22> = 0, <sigma_11> = N);
there is no saturation model. The atomic cavity follows cavity A adiabatically
(kappa_C >> kappa_A), so its entire effect on the optomechanical cavity is the
single complex rate

    sigma = J^2 / (kappa_C + i*Delta_C + g_at^2 N / (gamma_at + i*Delta_at)).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateInputError
from .params import DerivedParams, SystemConfig


@dataclass(frozen=True)
class FeedbackTerm:
    """Complex feedback rate sigma [rad/s] acting on cavity A's field."""

    sigma: complex


@dataclass(frozen=True)
class CavityCState:
    """Diagnostic steady state of the atomic cavity.

    c_S is the intracavity field [sqrt(photons)], sigma12_S the atomic
    coherence amplitude (dimensionless).
    """

    c_S: complex
    sigma12_S: complex


def atomic_susceptibility(g_at: float, N_atoms: float, gamma_at: float, Delta_at: float) -> complex:
    """g_at^2 N / (gamma_at + i*Delta_at), in rad/s. Requires gamma_at > 0."""
    return g_at * g_at * N_atoms / complex(gamma_at, Delta_at)


def feedback_term(J: float, kappa_C: float, Delta_C: float, susceptibility: complex) -> FeedbackTerm:
    """Feedback rate sigma = J^2/(kappa_C + i*Delta_C + susceptibility).

    J = 0 returns sigma = 0 exactly. The denominator never vanishes for
    physical inputs; a magnitude below 1e-30*kappa_C raises
    DegenerateInputError.
    """
    if J == 0.0:
        return FeedbackTerm(0j)
    denom = complex(kappa_C, Delta_C) + susceptibility
    if abs(denom) < 1e-30 * kappa_C:
        raise DegenerateInputError(
            f"feedback denominator collapsed: |{denom!r}| < 1e-30*kappa_C"
        )
    return FeedbackTerm(J * J / denom)


def cavity_c_steady_state(
    eps_C: complex,
    kappa_C: float,
    Delta_C: float,
    susceptibility: complex,
    g_at: float,
    N_atoms: float,
    gamma_at: float,
    Delta_at: float,
) -> CavityCState:
    """Steady state of the atomic cavity for drive amplitude eps_C.

    eps_C is obtained from a solved cavity-A mean field as eps_C = i*J*a_S.
    sigma12_S = -i*g_at*c_S*N/(gamma_at + i*Delta_at) holds exactly.
    """
    denom = complex(kappa_C, Delta_C) + susceptibility
    if abs(denom) < 1e-30 * kappa_C:
        raise DegenerateInputError(
            f"cavity C denominator collapsed: |{denom!r}| < 1e-30*kappa_C"
        )
    c_S = eps_C / denom
    sigma12_S = -1j * g_at * c_S * N_atoms / complex(gamma_at, Delta_at)
    return CavityCState(c_S=c_S, sigma12_S=sigma12_S)


def feedback_for(config: SystemConfig, derived: DerivedParams) -> FeedbackTerm:
    """Feedback term for a configured system (J from derived, atoms from config)."""
    susc = atomic_susceptibility(config.g_at, config.N_atoms, config.gamma_at, config.Delta_at)
    return feedback_term(derived.J, config.kappa_C, config.Delta_C, susc)
