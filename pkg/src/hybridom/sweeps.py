"""Parameter scans: detuning sweeps, power hysteresis, cooling curves.

Branch following uses fold stability (saddle-node sense): a branch can be
followed iff it is not the middle root of a three-root region, i.e. iff
the S-curve slope d(eps_A^2)/dI is positive there. The full Routh-Hurwitz
and eigenvalue verdicts are still computed and recorded on every row; at
strong drive the outer branches can be Hopf-unstable while remaining the
states a swept experiment tracks between fold jumps.

Sweep points are independent work items; pass workers > 1 to evaluate them
in a process pool. Results are re-sorted into grid order, so the output is
identical for any worker count.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, replace

import numpy as np

from .atomic_feedback import feedback_for
from .cooling import CoolingReport, cooling_report
from .errors import ConfigError, NumericalError
from .params import DerivedParams, SystemConfig, derive
from .stability import StabilityVerdict, classify
from .steady_state import SteadyStateBranch, solve_branches

DEFAULT_POINTS = 2001


@dataclass(frozen=True)
class SweepRow:
    """All branches at one sweep point, with verdicts and a selection marker."""

    delta_A: float
    power: float
    omega_m: float
    chi: float
    branches: tuple[SteadyStateBranch, ...]
    verdicts: tuple[StabilityVerdict, ...]
    selected: int | None
    error: str | None = None


@dataclass(frozen=True)
class CoolingRow:
    """One (detuning, feedback setting, branch) cooling record."""

    delta_A: float
    delta_A_over_omega_m: float
    feedback: str
    branch_index: int | None
    branch_count: int
    selected: bool
    I: float
    omega_eff_over_omega_m: float
    gamma_OM_over_gamma_m: float
    K_OM: float
    gamma_stokes: float
    gamma_antistokes: float
    n_bath: float
    n_min: float
    flags: tuple[str, ...]


@dataclass(frozen=True)
class HysteresisResult:
    """Up/down power scans (in scan order) and the detected jump powers [W]."""

    up: tuple[SweepRow, ...]
    down: tuple[SweepRow, ...]
    P1: float | None
    P2: float | None

    def has_loop(self) -> bool:
        """True when the two scans select different intensities anywhere."""
        down_by_power = {r.power: r for r in self.down}
        for ru in self.up:
            rd = down_by_power.get(ru.power)
            if rd is None:
                continue
            iu = _selected_I(ru)
            idn = _selected_I(rd)
            if iu is None or idn is None:
                if iu is not idn:
                    return True
                continue
            if abs(iu - idn) > 1e-6 * max(iu, idn, 1e-300):
                return True
        return False


def detuning_scan(
    config: SystemConfig, P: float, delta_grid, workers: int = 1
) -> list[SweepRow]:
    """Solve and classify every branch over a detuning grid at fixed power.

    The selection marker selects the lowest followable (fold-stable) branch.
    Solver failures are recorded per row and the scan continues.
    """
    grid = _check_grid(delta_grid, "delta_A grid")
    points = _solve_points(config, [(d, P) for d in grid], workers)
    rows = []
    for d, (branches, verdicts, err) in zip(grid, points):
        followable = _followable_indices(branches, config)
        sel = followable[0] if followable else None
        rows.append(
            SweepRow(
                delta_A=d, power=P, omega_m=config.omega_m, chi=_chi_of(config),
                branches=branches, verdicts=verdicts, selected=sel, error=err,
            )
        )
    return rows


def hysteresis_scan(
    config: SystemConfig, delta_A: float, p_grid, workers: int = 1
) -> HysteresisResult:
    """Up/down power scans with branch following and jump detection.

    The up scan starts on the lowest followable branch and keeps the
    followable branch closest in intensity to the previous selection; the
    down scan starts from the highest. A jump is a step in the selected I
    exceeding 3x the local grid-neighbor change; P1 is the up-scan jump
    power, P2 the down-scan one.
    """
    grid = _check_grid(p_grid, "power grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("hysteresis power grid must be strictly ascending")
    points = _solve_points(config, [(delta_A, p) for p in grid], workers)

    up_rows = _follow_scan(config, delta_A, grid, points, start="lowest")
    down_rows = _follow_scan(
        config, delta_A, grid[::-1], points[::-1], start="highest"
    )
    P1 = _first_jump(up_rows)
    P2 = _first_jump(down_rows)
    return HysteresisResult(up=tuple(up_rows), down=tuple(down_rows), P1=P1, P2=P2)


def cooling_scan(
    config: SystemConfig,
    delta_grid,
    branch_policy: str = "lower",
    feedback: str = "both",
    workers: int = 1,
) -> list[CoolingRow]:
    """Backaction quantities over a detuning grid.

    Emits one row per branch (all roots, including the middle one, with
    the stability verdict carried in flags) for each requested feedback
    setting; the branch chosen by `branch_policy` (lower / upper / follow,
    over followable branches) is marked selected.
    """
    if branch_policy not in ("lower", "upper", "follow"):
        raise ConfigError(f"unknown branch policy {branch_policy!r}")
    modes = {"on": (True,), "off": (False,), "both": (True, False)}.get(feedback)
    if modes is None:
        raise ConfigError(f"unknown feedback setting {feedback!r}")
    grid = _check_grid(delta_grid, "delta_A grid")

    rows: list[CoolingRow] = []
    for fb in modes:
        cfg = replace(config, feedback_enabled=fb)
        der = derive(cfg)
        points = _solve_points(cfg, [(d, cfg.P_in) for d in grid], workers)
        prev_I = None
        side = "lower"
        for d, (branches, verdicts, err) in zip(grid, points):
            label = "on" if fb else "off"
            if err is not None or not branches:
                rows.append(_error_row(d, cfg, label, err or "no branches"))
                continue
            followable = _followable_indices(branches, cfg)
            sel_idx = None
            if followable:
                if branch_policy == "lower":
                    sel_idx = followable[0]
                elif branch_policy == "upper":
                    sel_idx = followable[-1]
                else:
                    sel_idx, side = _closest_index(branches, followable, prev_I, side)
                prev_I = branches[sel_idx].I
            for i, (b, v) in enumerate(zip(branches, verdicts)):
                rep = cooling_report(b, der, cfg, branch_index=i)
                rows.append(_cooling_row(d, cfg, der, label, b, v, rep, i, len(branches), i == sel_idx))
    return rows


def write_csv(rows, destination) -> None:
    """Write sweep rows as RFC-4180 CSV (one line per sweep point x branch).

    Floats carry 17 significant digits, so parsing the file recovers them
    bit-exactly.
    """
    rows = list(rows)
    if not rows:
        raise ConfigError("refusing to write an empty sweep")
    with _open_dest(destination) as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        if isinstance(rows[0], CoolingRow):
            w.writerow(
                [
                    "delta_A_over_omega_m", "feedback", "branch_index",
                    "omega_eff_over_omega_m", "gamma_OM_over_gamma_m", "K_OM",
                    "gamma_stokes", "gamma_antistokes", "n_bath", "n_min", "flags",
                ]
            )
            for r in rows:
                w.writerow(
                    [
                        _fmt(r.delta_A_over_omega_m), r.feedback, _fmt(r.branch_index),
                        _fmt(r.omega_eff_over_omega_m), _fmt(r.gamma_OM_over_gamma_m),
                        _fmt(r.K_OM), _fmt(r.gamma_stokes), _fmt(r.gamma_antistokes),
                        _fmt(r.n_bath), _fmt(r.n_min), ";".join(r.flags),
                    ]
                )
        elif isinstance(rows[0], SweepRow):
            w.writerow(
                [
                    "delta_A", "delta_A_over_omega_m", "branch_index", "branch_count",
                    "I", "chi_Q_S", "stable", "margin",
                ]
            )
            for r in rows:
                base = [_fmt(r.delta_A), _fmt(r.delta_A / r.omega_m)]
                if not r.branches:
                    w.writerow(base + ["", "0", "", "", "", ""])
                    continue
                for i, (b, v) in enumerate(zip(r.branches, r.verdicts)):
                    w.writerow(
                        base
                        + [
                            _fmt(i), _fmt(len(r.branches)), _fmt(b.I),
                            _fmt(r.chi * b.Q_S), b.stable, _fmt(v.margin),
                        ]
                    )
        else:
            raise ConfigError(f"cannot serialize rows of type {type(rows[0]).__name__}")


# --- internals ---------------------------------------------------------------


def _chi_of(config: SystemConfig) -> float:
    return derive(config).chi


def _check_grid(grid, what) -> list[float]:
    vals = [float(x) for x in np.asarray(list(grid), dtype=float)]
    if not vals:
        raise ConfigError(f"{what} is empty")
    return vals


def _solve_point(config: SystemConfig, delta_A: float, P: float):
    cfg = replace(config, Delta_A=float(delta_A), P_in=float(P))
    try:
        der = derive(cfg)
        sig = feedback_for(cfg, der)
        branches = solve_branches(der, cfg.Delta_A, sig)
        out_b, out_v = [], []
        for b in branches:
            b2, v = classify(b, der, cfg)
            out_b.append(b2)
            out_v.append(v)
        return tuple(out_b), tuple(out_v), None
    except NumericalError as exc:
        return (), (), f"{type(exc).__name__}: {exc}"


def _solve_point_task(args):
    return _solve_point(*args)


def _solve_points(config, coords, workers):
    tasks = [(config, d, p) for d, p in coords]
    if workers <= 1:
        return [_solve_point(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_point_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _fold_stable(branch: SteadyStateBranch, config: SystemConfig) -> bool:
    """Positive S-curve slope: d(eps_A^2)/dI > 0 at the root."""
    der = derive(config)
    sig = feedback_for(config, der).sigma
    u = der.kappa_A - sig.real
    x = branch.Delta_eff - sig.imag
    w = der.omega_m * der.chi ** 2
    return u * u + x * x - 2.0 * w * branch.I * x > 0.0


def _followable_indices(branches, config) -> list[int]:
    return [i for i, b in enumerate(branches) if _fold_stable(b, config)]


def _closest_index(branches, candidates, prev_I, side):
    if prev_I is None:
        idx = candidates[0] if side == "lower" else candidates[-1]
        return idx, side
    best, best_d = None, None
    for i in candidates:
        d = abs(branches[i].I - prev_I)
        if best_d is None or d < best_d:
            best, best_d = i, d
        elif d == best_d:
            # Equidistant: keep the same side (lower stays lower).
            if side == "lower" and branches[i].I < branches[best].I:
                best = i
            elif side == "upper" and branches[i].I > branches[best].I:
                best = i
    side = "lower" if best == candidates[0] else "upper"
    return best, side


def _follow_scan(config, delta_A, grid, points, start):
    rows = []
    prev_I = None
    side = "lower" if start == "lowest" else "upper"
    chi = _chi_of(config)
    for p, (branches, verdicts, err) in zip(grid, points):
        sel = None
        if err is None and branches:
            cand = _followable_indices(branches, config)
            if cand:
                sel, side = _closest_index(branches, cand, prev_I, side)
                prev_I = branches[sel].I
        rows.append(
            SweepRow(
                delta_A=delta_A, power=p, omega_m=config.omega_m, chi=chi,
                branches=branches, verdicts=verdicts, selected=sel, error=err,
            )
        )
    return rows


def _selected_I(row: SweepRow):
    return None if row.selected is None else row.branches[row.selected].I


def _first_jump(rows):
    """Power at the first selected-I step exceeding 3x the previous step."""
    prev_change = None
    for k in range(1, len(rows)):
        a, b = _selected_I(rows[k - 1]), _selected_I(rows[k])
        if a is None or b is None:
            prev_change = None
            continue
        change = abs(b - a)
        if (
            prev_change is not None
            and change > 3.0 * prev_change
            and change > 1e-9 * max(abs(a), abs(b), 1e-300)
        ):
            return rows[k].power
        prev_change = change
    return None


def _error_row(d, cfg, label, message) -> CoolingRow:
    return CoolingRow(
        delta_A=d, delta_A_over_omega_m=d / cfg.omega_m, feedback=label,
        branch_index=None, branch_count=0, selected=False, I=math.nan,
        omega_eff_over_omega_m=math.nan, gamma_OM_over_gamma_m=math.nan,
        K_OM=math.nan, gamma_stokes=math.nan, gamma_antistokes=math.nan,
        n_bath=math.nan, n_min=math.nan,
        flags=("solver_error:" + message.split("\n")[0],),
    )


def _cooling_row(
    d, cfg, der: DerivedParams, label, branch, verdict, rep: CoolingReport,
    index, count, selected,
) -> CoolingRow:
    flags = ("verdict:" + branch.stable,) + rep.flags
    return CoolingRow(
        delta_A=d, delta_A_over_omega_m=d / cfg.omega_m, feedback=label,
        branch_index=index, branch_count=count, selected=selected, I=branch.I,
        omega_eff_over_omega_m=rep.omega_eff / der.omega_m,
        gamma_OM_over_gamma_m=rep.gamma_OM / der.gamma_m,
        K_OM=rep.K_OM, gamma_stokes=rep.gamma_stokes,
        gamma_antistokes=rep.gamma_antistokes, n_bath=rep.n_bath, n_min=rep.n_min,
        flags=flags,
    )


def _open_dest(destination):
    if hasattr(destination, "write"):
        return nullcontext(destination)
    return open(os.fspath(destination), "w", encoding="utf-8", newline="")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")
