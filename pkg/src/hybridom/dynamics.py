"""Time integration of the classical mean-field equations.

Serves as the brute-force oracle for steady states and stability verdicts:
stable branches must be attractors, unstable ones must be departed from.

    dQ/dt = omega_m * P
    dP/dt = omega_m*chi*|a|^2 - omega_m*Q - gamma_m*P
    da/dt = [-i*(Delta_A - omega_m*chi*Q) + sigma - kappa_A]*a + eps_A

The atomic cavity enters only through the adiabatically eliminated sigma.
The scheme is a fixed-step classical 4th-order Runge-Kutta with the complex
field carried as two real components; fixed step keeps oracle values
reproducible across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .atomic_feedback import FeedbackTerm
from .errors import ConfigError, DivergenceError
from .params import DerivedParams, SystemConfig


@dataclass(frozen=True)
class MeanFieldState:
    """Mechanical (Q, P) and optical (a) mean values at time t [s]."""

    Q: float
    P: float
    a: complex
    t: float


@dataclass(frozen=True)
class SettleResult:
    """Outcome of settle(): converged is False for limit cycles/divergence."""

    state: MeanFieldState
    converged: bool
    steps: int


def rhs(
    state: MeanFieldState,
    derived: DerivedParams,
    config: SystemConfig,
    sigma: FeedbackTerm,
) -> tuple[float, float, complex]:
    """(dQ/dt, dP/dt, da/dt) at the given state."""
    om, chi, gm = derived.omega_m, derived.chi, derived.gamma_m
    dQ = om * state.P
    dP = om * chi * abs(state.a) ** 2 - om * state.Q - gm * state.P
    da = (
        complex(-derived.kappa_A, -(config.Delta_A - om * chi * state.Q)) + sigma.sigma
    ) * state.a + derived.eps_A
    return dQ, dP, da


def max_stable_dt(derived: DerivedParams, config: SystemConfig, sigma: FeedbackTerm) -> float:
    """Step-size bound 0.05/max(omega_m, kappa_A, |Delta_A|, |sigma|)."""
    scale = max(
        derived.omega_m, derived.kappa_A, abs(config.Delta_A), abs(sigma.sigma)
    )
    return 0.05 / scale


def integrate(
    state0: MeanFieldState,
    duration: float,
    dt: float,
    derived: DerivedParams,
    config: SystemConfig,
    sigma: FeedbackTerm,
    stride: int = 1,
) -> list[MeanFieldState]:
    """Fixed-step RK4 trajectory, sampled every `stride` steps.

    The returned list starts at state0 and always includes the final state.
    Raises ConfigError when dt violates the stability bound and
    DivergenceError (with the last finite state attached) on blow-up.
    """
    if dt <= 0.0 or duration < 0.0:
        raise ConfigError("integrate needs dt > 0 and duration >= 0")
    bound = max_stable_dt(derived, config, sigma)
    if dt > bound:
        raise ConfigError(
            f"dt = {dt!r} exceeds the stability-bounded step {bound!r}"
        )
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    n_steps = max(1, round(duration / dt)) if duration > 0.0 else 0

    samples = [state0]
    if n_steps == 0:
        return samples

    stepper = _make_stepper(derived, config, sigma, dt)
    Q, P, ar, ai = state0.Q, state0.P, state0.a.real, state0.a.imag
    t0 = state0.t
    for k in range(1, n_steps + 1):
        Qn, Pn, arn, ain = stepper(Q, P, ar, ai)
        if not (
            math.isfinite(Qn) and math.isfinite(Pn)
            and math.isfinite(arn) and math.isfinite(ain)
        ):
            raise DivergenceError(
                f"state became non-finite at step {k} (t = {t0 + k * dt!r} s)",
                last_state=MeanFieldState(Q, P, complex(ar, ai), t0 + (k - 1) * dt),
            )
        Q, P, ar, ai = Qn, Pn, arn, ain
        if k % stride == 0 or k == n_steps:
            samples.append(MeanFieldState(Q, P, complex(ar, ai), t0 + k * dt))
    return samples


def settle(
    derived: DerivedParams,
    config: SystemConfig,
    sigma: FeedbackTerm,
    initial: MeanFieldState,
    max_steps: int = 10**6,
    rtol: float = 1e-10,
) -> SettleResult:
    """Integrate until the state stops moving.

    Convergence means the state changes by less than rtol (relative to the
    larger of the current and initial state norms) over one mechanical
    period. Non-convergence within max_steps (a limit cycle, or divergence)
    is reported through converged=False, not an exception.

    The step starts at the stability bound and is halved on numerical
    blow-up: the optomechanical spring shift can push the effective field
    rotation rate well past the input scales the bound is built from, while
    the true mean-field flow stays bounded.
    """
    period = 2.0 * math.pi / derived.omega_m
    dt_bound = max_stable_dt(derived, config, sigma)
    n_per = max(8, math.ceil(period / dt_bound))

    total = 0
    state, converged, steps, blew_up = initial, False, 0, False
    for _ in range(5):
        state, converged, steps, blew_up = _settle_once(
            derived, config, sigma, initial, period, n_per, max_steps - total, rtol
        )
        total += steps
        if converged or not blew_up or total >= max_steps:
            break
        n_per *= 2
    return SettleResult(state, converged, total)


def _settle_once(derived, config, sigma, initial, period, n_per, max_steps, rtol):
    """One fixed-step settling attempt; returns (state, converged, steps, blew_up)."""
    stepper = _make_stepper(derived, config, sigma, period / n_per)
    Q, P, ar, ai = initial.Q, initial.P, initial.a.real, initial.a.imag
    norm0 = math.sqrt(Q * Q + P * P + ar * ar + ai * ai)
    t = initial.t
    steps = 0
    while steps + n_per <= max_steps:
        Qp, Pp, arp, aip = Q, P, ar, ai
        for _ in range(n_per):
            Q, P, ar, ai = stepper(Q, P, ar, ai)
        steps += n_per
        t += period
        if not (math.isfinite(Q) and math.isfinite(P) and math.isfinite(ar) and math.isfinite(ai)):
            return MeanFieldState(Qp, Pp, complex(arp, aip), t - period), False, steps, True
        move = math.sqrt((Q - Qp) ** 2 + (P - Pp) ** 2 + (ar - arp) ** 2 + (ai - aip) ** 2)
        size = max(math.sqrt(Q * Q + P * P + ar * ar + ai * ai), norm0, 1e-300)
        if move < rtol * size:
            return MeanFieldState(Q, P, complex(ar, ai), t), True, steps, False
    return MeanFieldState(Q, P, complex(ar, ai), t), False, steps, False


def mechanical_energy(state: MeanFieldState) -> float:
    """Dimensionless oscillator energy (Q^2 + P^2)/2."""
    return 0.5 * (state.Q ** 2 + state.P ** 2)


def photon_number(state: MeanFieldState) -> float:
    return abs(state.a) ** 2


def write_trajectory_csv(states, destination) -> None:
    """Dump a trajectory: columns t, Q, P, Re_a, Im_a, photon_number."""
    from .sweeps import _open_dest, _fmt  # shared CSV plumbing

    with _open_dest(destination) as fh:
        fh.write("t,Q,P,Re_a,Im_a,photon_number\r\n")
        for s in states:
            fh.write(
                ",".join(
                    _fmt(x)
                    for x in (s.t, s.Q, s.P, s.a.real, s.a.imag, abs(s.a) ** 2)
                )
                + "\r\n"
            )


def _make_stepper(derived, config, sigma, dt):
    """Bind one RK4 step over (Q, P, ar, ai) with all scalars precomputed."""
    om, chi, gm = derived.omega_m, derived.chi, derived.gamma_m
    eps = derived.eps_A
    cr = sigma.sigma.real - derived.kappa_A
    ci0 = -config.Delta_A + sigma.sigma.imag
    wchi = om * chi
    h = dt

    def deriv(Q, P, ar, ai):
        dQ = om * P
        dP = wchi * (ar * ar + ai * ai) - om * Q - gm * P
        cc = ci0 + wchi * Q
        dar = cr * ar - cc * ai + eps
        dai = cr * ai + cc * ar
        return dQ, dP, dar, dai

    def step(Q, P, ar, ai):
        k1 = deriv(Q, P, ar, ai)
        k2 = deriv(
            Q + 0.5 * h * k1[0], P + 0.5 * h * k1[1],
            ar + 0.5 * h * k1[2], ai + 0.5 * h * k1[3],
        )
        k3 = deriv(
            Q + 0.5 * h * k2[0], P + 0.5 * h * k2[1],
            ar + 0.5 * h * k2[2], ai + 0.5 * h * k2[3],
        )
        k4 = deriv(Q + h * k3[0], P + h * k3[1], ar + h * k3[2], ai + h * k3[3])
        s = h / 6.0
        return (
            Q + s * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
            P + s * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
            ar + s * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
            ai + s * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3]),
        )

    return step
