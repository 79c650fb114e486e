"""Linear stability of steady-state branches.

Fluctuations (dQ, dP, dX, dY) around a branch obey df/dt = A f + noise with
the 4x4 drift matrix

        (    0      omega_m    0    0 )
    A = ( -omega_m  -gamma_m   G    0 )      G = sqrt(2)*omega_m*chi*|a_S|
        (    0         0       E    F )
        (    G         0      -F    E )

where E, F absorb the cavity decay, the effective detuning and the atomic
feedback. Two independent verdict paths are always computed:

* Routh-Hurwitz inequalities on the characteristic quartic
  (the classification cross-check), and
* the quartic's roots themselves via the companion matrix
  (authoritative for the verdict).

A branch is marginal when the smallest |Re(eigenvalue)| drops below
1e-6*omega_m; that window separates tangency double roots from genuine
verdicts at double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateInputError, NumericalError
from .params import DerivedParams, SystemConfig
from .steady_state import SteadyStateBranch

MARGINAL_MARGIN_FACTOR = 1e-6


@dataclass(frozen=True)
class DriftMatrix:
    """Drift matrix with the scalars used to build its optical block.

    A is 4x4 [rad/s], rows/columns ordered (dQ, dP, dX, dY). D is the
    common positive normalization inside E and F, units (rad/s)^4.
    """

    A: np.ndarray
    E: float
    F: float
    D: float


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of both stability paths for one branch.

    margin is the smallest |Re(lambda)| among the four eigenvalues [rad/s].
    """

    rh_pass: tuple[bool, bool, bool, bool]
    eig_pass: bool
    margin: float
    verdict: str
    eigenvalues: tuple[complex, complex, complex, complex]


def build_drift(
    branch: SteadyStateBranch, derived: DerivedParams, config: SystemConfig
) -> DriftMatrix:
    """Assemble the drift matrix for a polished branch.

    E, F, D follow the printed closed forms; a_S enters as |a_S| (the
    mean field is gauged real before linearizing).
    """
    g2N = config.g_at ** 2 * config.N_atoms
    gat, Dat = config.gamma_at, config.Delta_at
    kC, DC = config.kappa_C, config.Delta_C
    J2 = derived.J ** 2

    # D = |(kappa_C + i Delta_C)(gamma_at + i Delta_at) + g^2 N|^2, so its
    # natural scale is the squared sum of the two term magnitudes.
    D = (gat * kC - Dat * DC + g2N) ** 2 + (Dat * kC + gat * DC) ** 2
    d_scale = (math.hypot(kC, DC) * math.hypot(gat, Dat) + g2N) ** 2
    if D <= 1e-30 * d_scale:
        raise DegenerateInputError(f"drift normalization D = {D!r} below resolvable scale")

    at2 = gat * gat + Dat * Dat
    E = -derived.kappa_A + J2 * (at2 * kC + g2N * gat) / D
    F = branch.Delta_eff + J2 * (at2 * DC - g2N * Dat) / D

    om, gm = derived.omega_m, derived.gamma_m
    G = np.sqrt(2.0) * om * derived.chi * abs(branch.a_S)
    A = np.array(
        [
            [0.0, om, 0.0, 0.0],
            [-om, -gm, G, 0.0],
            [0.0, 0.0, E, F],
            [G, 0.0, -F, E],
        ]
    )
    return DriftMatrix(A=A, E=E, F=F, D=D)


def routh_hurwitz(drift: DriftMatrix, derived: DerivedParams) -> tuple[bool, bool, bool, bool]:
    """The four Routh-Hurwitz inequalities for the drift quartic.

    Written out in E, F, gamma_m, omega_m and x = sqrt(2)*omega_m*chi*|a_S|
    (read off the matrix), with a_S^2 understood as |a_S|^2. The third
    inequality is the standard quartic condition
    a1*(a2*a3 - a1*a4) - a3^2 > 0; the printed version of its middle factor
    is dimensionally inconsistent and is corrected here.
    """
    E, F = drift.E, drift.F
    om = drift.A[0, 1]
    gm = -drift.A[1, 1]
    x = drift.A[1, 2]
    om2 = om * om
    ef2 = E * E + F * F
    # 2*omega_m^3*chi^2*a_S^2*F == omega_m*x^2*F with x read off the matrix;
    # this avoids dividing by chi when chi = 0.
    coupling = om * x * x * F

    c1 = gm - 2.0 * E
    c2 = c1 * (-2.0 * gm * E + ef2 + om2) - (gm * ef2 - 2.0 * E * om2)
    c3 = c1 * (
        (-2.0 * gm * E + ef2 + om2) * (gm * ef2 - 2.0 * E * om2)
        - (om2 * ef2 - coupling) * c1
    ) - (gm * ef2 - 2.0 * E * om2) ** 2
    c4 = om2 * ef2 - coupling
    return (bool(c1 > 0.0), bool(c2 > 0.0), bool(c3 > 0.0), bool(c4 > 0.0))


def characteristic_coefficients(drift: DriftMatrix, derived: DerivedParams) -> tuple[float, float, float, float]:
    """Quartic coefficients (a1, a2, a3, a4) from the symbolic expansion.

    det(A - lambda) = lambda^4 + a1 lambda^3 + a2 lambda^2 + a3 lambda + a4
    with a1 = gamma_m - 2E, a2 = E^2+F^2+omega_m^2 - 2*gamma_m*E,
    a3 = gamma_m*(E^2+F^2) - 2*E*omega_m^2,
    a4 = omega_m^2*(E^2+F^2) - omega_m*G^2*F.
    """
    E, F = drift.E, drift.F
    om = drift.A[0, 1]
    gm = -drift.A[1, 1]
    G = drift.A[1, 2]
    ef2 = E * E + F * F
    return (
        gm - 2.0 * E,
        ef2 + om * om - 2.0 * gm * E,
        gm * ef2 - 2.0 * E * om * om,
        om * om * ef2 - om * G * G * F,
    )


def expanded_characteristic(drift: DriftMatrix) -> tuple[float, float, float, float]:
    """Quartic coefficients expanded numerically from the matrix itself.

    Faddeev-LeVerrier recursion; works for any real 4x4, not only the
    drift structure.
    """
    A = np.asarray(drift.A, dtype=float)
    n = A.shape[0]
    M = np.zeros((n, n))
    eye = np.eye(n)
    coeffs = []
    c = 1.0
    for k in range(1, n + 1):
        M = A @ M + c * eye
        c = -np.trace(A @ M) / k
        coeffs.append(float(c))
    # char poly is lambda^n + c1 lambda^(n-1) + ... + cn.
    return tuple(coeffs)


def eigenvalue_stability(drift: DriftMatrix) -> tuple[bool, float, np.ndarray]:
    """(eig_pass, margin, eigenvalues) from the expanded quartic.

    Roots come from numpy's companion-matrix solver on the explicitly
    expanded det(A - lambda I); eig_pass means every real part is < 0 and
    margin is the smallest |Re(lambda)|.
    """
    a1, a2, a3, a4 = expanded_characteristic(drift)
    if not all(np.isfinite((a1, a2, a3, a4))):
        raise NumericalError("non-finite characteristic coefficients")
    try:
        lam = np.roots([1.0, a1, a2, a3, a4])
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration did not converge: {exc}") from exc
    re = lam.real
    return bool(np.all(re < 0.0)), float(np.min(np.abs(re))), lam


def classify(
    branch: SteadyStateBranch, derived: DerivedParams, config: SystemConfig
) -> tuple[SteadyStateBranch, StabilityVerdict]:
    """Run both stability paths and attach the verdict to the branch.

    verdict is "marginal" when margin < 1e-6*omega_m, otherwise "stable"
    iff the eigenvalue test and all four RH inequalities agree on
    stability.
    """
    drift = build_drift(branch, derived, config)
    rh = routh_hurwitz(drift, derived)
    eig_pass, margin, lam = eigenvalue_stability(drift)
    if margin < MARGINAL_MARGIN_FACTOR * derived.omega_m:
        verdict = "marginal"
    elif eig_pass and all(rh):
        verdict = "stable"
    else:
        verdict = "unstable"
    v = StabilityVerdict(
        rh_pass=rh,
        eig_pass=eig_pass,
        margin=margin,
        verdict=verdict,
        eigenvalues=tuple(complex(z) for z in lam),
    )
    return replace(branch, stable=verdict), v
