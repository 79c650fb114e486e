"""Shared test utilities: random physical configs and independent oracles.

Everything here is deliberately coded from the raw formulas (numpy.roots,
dense grids, bisection) and never calls the solver paths it is used to
check.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

import hybridom as h

OMEGA_M_GOOD = 2.0 * math.pi * 350e3


def random_config(rng: np.random.Generator, feedback=None) -> h.SystemConfig:
    """A wide, physically sensible random draw around the lab scales."""
    om = 10 ** rng.uniform(5.5, 7.5)
    if feedback is None:
        feedback = bool(rng.integers(2))
    return h.SystemConfig(
        L=10 ** rng.uniform(-3.5, -2.5),
        m=10 ** rng.uniform(-12.0, -10.0),
        lambda_=794.98e-9,
        omega_m=om,
        Q_m=10 ** rng.uniform(2.0, 7.0),
        kappa_A=om * 10 ** rng.uniform(-1.5, 0.5),
        kappa_C=om * 10 ** rng.uniform(0.5, 2.5),
        Delta_A=om * rng.uniform(-2.0, 4.0),
        Delta_C=om * rng.uniform(-2.0, 2.0),
        Delta_at=float((-1) ** rng.integers(2)) * 10 ** rng.uniform(7.0, 10.0),
        gamma_at=10 ** rng.uniform(6.0, 7.5),
        g_at=2.0 * math.pi * 10 ** rng.uniform(2.0, 4.0),
        N_atoms=10 ** rng.uniform(6.0, 9.0),
        P_in=10 ** rng.uniform(-9.0, -4.0),
        T_bath=300.0,
        feedback_enabled=feedback,
    )


def random_subthreshold_config(rng: np.random.Generator) -> h.SystemConfig:
    """A single-root, decisively damped draw (for settle-convergence checks)."""
    while True:
        om = 10 ** rng.uniform(5.8, 7.2)
        cfg = h.SystemConfig(
            L=10 ** rng.uniform(-3.2, -2.8),
            m=10 ** rng.uniform(-11.5, -10.5),
            lambda_=794.98e-9,
            omega_m=om,
            Q_m=rng.uniform(20.0, 120.0),
            kappa_A=om * rng.uniform(0.2, 1.0),
            kappa_C=om * 10 ** rng.uniform(1.0, 2.0),
            Delta_A=om * rng.uniform(-1.5, 1.5),
            Delta_C=om * rng.uniform(-1.0, 1.0),
            Delta_at=float((-1) ** rng.integers(2)) * 10 ** rng.uniform(8.0, 10.0),
            gamma_at=10 ** rng.uniform(6.5, 7.5),
            g_at=2.0 * math.pi * 10 ** rng.uniform(2.0, 3.5),
            N_atoms=10 ** rng.uniform(6.0, 8.0),
            P_in=10 ** rng.uniform(-9.0, -7.0),
            T_bath=300.0,
            feedback_enabled=bool(rng.integers(2)),
        )
        der = h.derive(cfg)
        sig = h.feedback_for(cfg, der)
        branches = h.solve_branches(der, cfg.Delta_A, sig)
        if len(branches) != 1:
            continue
        b, v = h.classify(branches[0], der, cfg)
        if b.stable == "stable" and v.margin > 1e-2 * om:
            return cfg


# --- independent oracles ------------------------------------------------------


def dense_sign_changes(coeffs, I_max: float, n: int = 200_001) -> int:
    """Count sign changes of the cubic on a dense grid over [0, I_max]."""
    a3, a2, a1, a0 = coeffs
    grid = np.linspace(0.0, I_max, n)
    vals = ((a3 * grid + a2) * grid + a1) * grid + a0
    signs = np.sign(vals)
    signs[signs == 0.0] = 1.0
    return int(np.sum(signs[1:] != signs[:-1]))


def cubic_discriminant(coeffs) -> float:
    a, b, c, d = coeffs
    return (
        18.0 * a * b * c * d
        - 4.0 * b ** 3 * d
        + b ** 2 * c ** 2
        - 4.0 * a * c ** 3
        - 27.0 * a ** 2 * d ** 2
    )


def discriminant_of_power(config: h.SystemConfig, delta_A: float, power: float) -> float:
    cfg = replace(config, Delta_A=delta_A, P_in=power)
    der = h.derive(cfg)
    sig = h.feedback_for(cfg, der)
    return cubic_discriminant(h.cubic_coefficients(der, delta_A, sig))


def tangency_powers(config, delta_A, p_lo, p_hi, n_scan=4001, iters=80):
    """Fold (double-root) powers located by bisection on the discriminant sign."""
    ps = np.linspace(p_lo, p_hi, n_scan)
    ds = np.array([discriminant_of_power(config, delta_A, p) for p in ps])
    zeros = []
    for i in range(1, len(ps)):
        if ds[i - 1] * ds[i] < 0.0:
            lo, hi = float(ps[i - 1]), float(ps[i])
            flo = discriminant_of_power(config, delta_A, lo)
            for _ in range(iters):
                mid = 0.5 * (lo + hi)
                fm = discriminant_of_power(config, delta_A, mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(0.5 * (lo + hi))
    return zeros


def bistable_onset_detuning(config, power, d_lo, d_hi, iters=60):
    """Smallest detuning where three roots first appear, by bisection.

    Requires one root at d_lo and three at d_hi.
    """

    def n_roots(d):
        cfg = replace(config, Delta_A=d, P_in=power)
        der = h.derive(cfg)
        sig = h.feedback_for(cfg, der)
        roots, _ = h.cubic_real_roots(h.cubic_coefficients(der, d, sig))
        return len(roots)

    if n_roots(d_lo) != 1 or n_roots(d_hi) != 3:
        raise AssertionError("onset bracket does not straddle the 1->3 transition")
    lo, hi = d_lo, d_hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if n_roots(mid) == 1:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
