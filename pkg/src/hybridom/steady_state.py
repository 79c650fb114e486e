"""Steady states of the driven optomechanical cavity.

Writing I = |a_S|^2 for the intracavity photon number, the fixed point of the
mean-field equations satisfies

    I * | (kappa_A - sigma) + i*(Delta_A - omega_m*chi^2*I) |^2 = eps_A^2,

a cubic in I. With u = kappa_A - Re(sigma) and v = Delta_A - Im(sigma) the
expanded form is

    w^2 I^3 - 2 w v I^2 + (u^2 + v^2) I - eps_A^2 = 0,    w = omega_m*chi^2.

Every physical root (I >= 0) becomes a SteadyStateBranch carrying the complex
mean field, the mirror displacement and the effective detuning.

Root finding is deliberately not closed-form: the discriminant classifies the
count, then each root is isolated by the cubic's critical points and polished
by safeguarded Newton/bisection. Closed-form cubic formulas lose most digits
near the tangency (double-root) points that define the hysteresis powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atomic_feedback import FeedbackTerm
from .errors import InternalConsistencyError, NumericalError
from .params import DerivedParams

# Extended precision (80-bit on x86-64) for final refinement and residuals;
# strongly driven branches evaluate the cubic with terms up to ~1e8 times
# eps_A^2, where plain double evaluation noise alone would breach the 1e-8
# residual gate.
_LD = np.longdouble

# Near-tangency threshold on the depressed-cubic discriminant, relative to
# its natural scale max(4|p|^3, 27 q^2).
_DISC_MARGINAL_RTOL = 1e-9

# Residual gate: |cubic(I)| / eps_A^2 on every returned root.
_RESIDUAL_TOL = 1e-8

_POLISH_MAX_ITER = 200


@dataclass(frozen=True)
class SteadyStateBranch:
    """One physical root of the intensity cubic.

    Attributes
    ----------
    I : float
        Intracavity photon number |a_S|^2 (dimensionless, >= 0).
    a_S : complex
        Mean field [sqrt(photons)].
    Q_S : float
        Dimensionless mirror displacement chi*I.
    P_S : float
        Dimensionless mirror momentum, identically 0.
    Delta_eff : float
        Effective detuning Delta_A - omega_m*chi^2*I [rad/s].
    residual : float
        |cubic(I)| normalized by eps_A^2.
    stable : str
        "stable" / "unstable" / "marginal", or "unclassified" before the
        stability module has run.
    """

    I: float
    a_S: complex
    Q_S: float
    P_S: float
    Delta_eff: float
    residual: float
    stable: str = "unclassified"


def cubic_coefficients(
    derived: DerivedParams, Delta_A: float, sigma: FeedbackTerm
) -> tuple[float, float, float, float]:
    """Coefficients (a3, a2, a1, a0) of a3*I^3 + a2*I^2 + a1*I + a0 = 0."""
    u = derived.kappa_A - sigma.sigma.real
    v = Delta_A - sigma.sigma.imag
    w = derived.omega_m * derived.chi * derived.chi
    return (w * w, -2.0 * w * v, u * u + v * v, -derived.eps_A * derived.eps_A)


def cubic_real_roots(coefficients) -> tuple[list[float], bool]:
    """All real roots with I >= 0, sorted ascending, each polished.

    Returns (roots, marginal): marginal is True when the depressed-cubic
    discriminant sits within @_DISC_MARGINAL_RTOL of zero, i.e. near a
    tangency where two roots merge. The root list has length 1, 2
    (tangency) or 3.

    Raises NumericalError (carrying the bracket) if a bracketed root fails
    to polish within the iteration cap.
    """
    a3, a2, a1, a0 = (float(c) for c in coefficients)
    if a3 < 0.0 or a0 > 0.0:
        raise ValueError(f"expected a3 >= 0 and a0 <= 0, got a3={a3!r}, a0={a0!r}")

    if a3 == 0.0:
        return _low_order_roots(a2, a1, a0), False

    if a0 == 0.0:
        # Undriven cavity: I = 0 plus whatever the deflated quadratic allows.
        roots = [0.0] + [r for r in _low_order_roots(a3, a2, a1) if r > 0.0]
        return sorted(set(roots)), False

    # Depressed form t^3 + p t + q, I = t - a2/(3 a3).
    b, c, d = a2 / a3, a1 / a3, a0 / a3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = -4.0 * p ** 3 - 27.0 * q * q
    scale = max(4.0 * abs(p) ** 3, 27.0 * q * q)
    marginal = scale > 0.0 and abs(disc) < _DISC_MARGINAL_RTOL * scale

    f = lambda x: ((a3 * x + a2) * x + a1) * x + a0
    df = lambda x: (3.0 * a3 * x + 2.0 * a2) * x + a1

    # Fujiwara bound on the monic cubic, expanded until f(hi) > 0.
    hi = 2.0 * max(abs(b), abs(c) ** 0.5, abs(d) ** (1.0 / 3.0))
    for _ in range(64):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise NumericalError("could not find an upper bound with f(hi) > 0")

    # Partition [0, hi] at the critical points; every sign change brackets
    # exactly one root.
    pts = [0.0]
    dd = a2 * a2 - 3.0 * a3 * a1
    crit = []
    if dd > 0.0:
        sq = math.sqrt(dd)
        crit = [(-a2 - sq) / (3.0 * a3), (-a2 + sq) / (3.0 * a3)]
        pts.extend(x for x in sorted(crit) if 0.0 < x < hi)
    pts.append(hi)

    roots = []
    for lo, up in zip(pts[:-1], pts[1:]):
        flo, fup = f(lo), f(up)
        if flo == 0.0:
            roots.append(lo)
        elif flo < 0.0 < fup or fup < 0.0 < flo:
            roots.append(_polish(f, df, lo, up, abs(a0)))
    if f(hi) == 0.0:
        roots.append(hi)

    # Exact or near-exact tangency: the merged double root sits at a critical
    # point and produces no sign change. Admit it when it meets the residual
    # gate and the bracketed pass found nothing in its cluster (near-tangency
    # root pairs split by ~sqrt of the discriminant tolerance).
    if marginal:
        for x in crit:
            if x < 0.0:
                continue
            if abs(f(x)) <= _RESIDUAL_TOL * abs(a0) and all(
                abs(x - r) > 3e-4 * max(abs(x), 1.0) for r in roots
            ):
                roots.append(x)

    roots = sorted(_ld_refine((a3, a2, a1, a0), r) for r in roots if r >= 0.0)
    deduped = []
    for r in roots:
        if not deduped or not _close(r, deduped[-1]):
            deduped.append(r)
    return deduped, marginal


def mean_field(I: float, derived: DerivedParams, Delta_A: float, sigma: FeedbackTerm) -> complex:
    """Mean field a_S = eps_A / ((kappa_A - sigma) + i*Delta_eff) for a solved root.

    Raises InternalConsistencyError if |a_S|^2 disagrees with I beyond
    relative 1e-8 (a solver-bug guard, not a physical condition). The check
    runs in extended precision so it measures the root, not double-rounding
    of the strongly cancelling Delta_eff.
    """
    Delta_eff = Delta_A - derived.omega_m * derived.chi ** 2 * I
    a_S = derived.eps_A / (complex(derived.kappa_A, Delta_eff) - sigma.sigma)

    # |a_S|^2 = eps^2 / M with M = a1 + I*(a2 + I*a3): same coefficient
    # rounding the root was solved under, so the check measures the root,
    # not fold-amplified coefficient noise.
    a3, a2, a1, _ = cubic_coefficients(derived, Delta_A, sigma)
    Il = _LD(I)
    M = _LD(a1) + Il * (_LD(a2) + Il * _LD(a3))
    if not M > 0:
        raise InternalConsistencyError(f"nonpositive response norm M = {float(M)!r} at I = {I!r}")
    back = float(_LD(derived.eps_A) ** 2 / M)
    if abs(back - I) > 1e-8 * max(I, 1e-300):
        raise InternalConsistencyError(
            f"|a_S|^2 = {back!r} does not reproduce the root I = {I!r}"
        )
    return a_S


def solve_branches(
    derived: DerivedParams, Delta_A: float, sigma: FeedbackTerm
) -> list[SteadyStateBranch]:
    """All physical steady-state branches at one operating point.

    Branches are sorted ascending by I and returned with
    stable="unclassified"; run the stability module to fill the verdict.
    """
    coeffs = cubic_coefficients(derived, Delta_A, sigma)
    roots, _ = cubic_real_roots(coeffs)
    w = derived.omega_m * derived.chi ** 2
    eps2 = derived.eps_A ** 2
    branches = []
    for I in roots:
        poly = float(abs(_ld_poly(coeffs, I)))
        residual = poly / eps2 if eps2 > 0.0 else poly
        branches.append(
            SteadyStateBranch(
                I=I,
                a_S=mean_field(I, derived, Delta_A, sigma),
                Q_S=derived.chi * I,
                P_S=0.0,
                Delta_eff=Delta_A - w * I,
                residual=residual,
            )
        )
    return branches


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= 1e-9 * max(abs(x), abs(y), 1e-300)


def _ld_poly(coeffs, x):
    a3, a2, a1, a0 = (_LD(c) for c in coeffs)
    xl = _LD(x)
    return ((a3 * xl + a2) * xl + a1) * xl + a0


def _ld_refine(coeffs, root: float) -> float:
    """A couple of extended-precision Newton steps on an already good root."""
    a3, a2, a1, _ = (_LD(c) for c in coeffs)
    x = _LD(root)
    for _ in range(2):
        fx = _ld_poly(coeffs, x)
        dfx = (_LD(3.0) * a3 * x + _LD(2.0) * a2) * x + a1
        if dfx == 0:
            break
        step = fx / dfx
        # Never let a refinement step move off a tangency-flattened root.
        if abs(step) > 1e-6 * max(abs(x), _LD(1.0)):
            break
        x = x - step
    out = float(x)
    return out if out >= 0.0 else 0.0


def _low_order_roots(a: float, b: float, c: float) -> list[float]:
    """Nonnegative real roots of a*x^2 + b*x + c, allowing a = 0."""
    if a == 0.0:
        if b == 0.0:
            if c == 0.0:
                return [0.0]
            raise NumericalError("degenerate polynomial: no leading coefficient")
        r = -c / b
        return [r] if r >= 0.0 else []
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # Citardauq split avoids cancellation for small roots.
    qq = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else 0.5 * sq
    cand = set()
    if qq != 0.0:
        cand.add(qq / a)
        cand.add(c / qq)
    else:
        cand.add(0.0)
    return sorted(r for r in cand if r >= 0.0)


def _polish(f, df, lo: float, hi: float, f_scale: float) -> float:
    """Safeguarded Newton with a bisection fallback inside [lo, hi]."""
    flo = f(lo)
    x = 0.5 * (lo + hi)
    for _ in range(_POLISH_MAX_ITER):
        fx = f(x)
        if fx == 0.0 or abs(fx) <= 1e-13 * f_scale:
            return x
        # Maintain the sign-change bracket.
        if (fx < 0.0) == (flo < 0.0):
            lo = x
        else:
            hi = x
        d = df(x)
        xn = x - fx / d if d != 0.0 else x
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4.0 * math.ulp(max(abs(x), abs(xn))):
            # Interval exhausted at double precision; keep the better endpoint.
            return xn if abs(f(xn)) < abs(fx) else x
        x = xn
    if abs(f(x)) <= _RESIDUAL_TOL * f_scale:
        return x
    raise NumericalError(
        f"root polish failed after {_POLISH_MAX_ITER} iterations in bracket [{lo!r}, {hi!r}]"
    )
