"""Online mode recognition with a gap-thresholded DeePC data matrix.

At every step the ``M`` most recent trajectory windows of length
``T_ini + T_f`` are compared with the data matrix currently used for
prediction. When their gap exceeds ``epsilon`` the window replaces the data
matrix. Control is receding-horizon DeePC on whichever matrix is active.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .behavior import format_float, hankel
from .deepc import DeePCInfeasibleError, DeePCWeights, build_problem, solve_deepc
from .metrics import gap
from .sarx import ModeSchedule, SARXPlant, SARXSystem, generate_excited_trajectory
from .subspace import DEFAULT_RANK_TOL, SubspaceBasis, orthonormal_basis, singular_values

LOG_COLUMNS = ("t", "u", "y", "r", "gap", "swap", "mode")


class WindowNotFull(RuntimeError):
    """The moving window does not hold enough columns yet."""


def square_wave(amplitude: float = 1.0, period: int = 20) -> Callable[[int], float]:
    """``+amplitude`` on the first half of each period, ``-amplitude`` on the second."""
    half = max(1, period // 2)

    def ref(t: int) -> float:
        return amplitude if (t // half) % 2 == 0 else -amplitude

    return ref


@dataclass(frozen=True)
class RecognitionConfig:
    """Closed-loop experiment settings.

    ``M`` is the number of windows kept in the moving data matrix. With
    ``prefill_window`` the window starts out holding the last ``M`` columns
    of the offline data matrix, so recognition is active from ``t = 0``;
    otherwise recognition waits until ``M`` closed-loop windows exist.
    ``reference`` overrides the square wave when given (one value per step,
    the last value is held past the end).
    """

    T_ini: int = 2
    T_f: int = 5
    n: int = 2
    m: int = 1
    p: int = 1
    epsilon: float = 0.3
    M: int = 20
    horizon: int = 70
    weights: DeePCWeights = DeePCWeights()
    reference_amplitude: float = 1.0
    reference_period: int = 20
    reference: tuple | None = None
    dither: float = 0.0
    initial_data_mode: int = 0
    initial_data_length: int = 60
    prefill_window: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if min(self.T_ini, self.T_f, self.horizon, self.m, self.p) < 1:
            raise ValueError("T_ini, T_f, horizon, m and p must be positive")
        if self.M < self.dim:
            raise ValueError(f"window width M={self.M} below subspace dimension {self.dim}")
        if self.dither < 0:
            raise ValueError(f"dither must be >= 0, got {self.dither}")
        if self.reference is not None:
            object.__setattr__(self, "reference", tuple(float(x) for x in self.reference))
            if not self.reference:
                raise ValueError("reference must be nonempty")

    @property
    def L(self) -> int:
        return self.T_ini + self.T_f

    @property
    def dim(self) -> int:
        return self.m * self.L + self.n

    def reference_at(self, t: int) -> float:
        if self.reference is not None:
            return self.reference[min(t, len(self.reference) - 1)]
        return square_wave(self.reference_amplitude, self.reference_period)(t)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = asdict(self.weights)
        d["reference"] = None if self.reference is None else list(self.reference)
        return d


def window_basis(H: np.ndarray, dim: int) -> tuple[SubspaceBasis, bool]:
    """Leading ``dim`` left singular vectors of a window matrix.

    Returns the basis and a flag telling whether some retained singular
    value lies below the relative rank threshold.

    Raises:
        WindowNotFull: ``H`` has fewer than ``dim`` columns.
    """
    H = np.asarray(H, dtype=float)
    if H.shape[1] < dim:
        raise WindowNotFull(f"window has {H.shape[1]} columns, need {dim}")
    s = singular_values(H)
    deficient = bool(s[dim - 1] <= DEFAULT_RANK_TOL * s[0]) if s[0] > 0 else True
    return orthonormal_basis(H, target_rank=dim), deficient


@dataclass
class StepRecord:
    t: int
    u: float
    y: float
    r: float
    gap: float
    swap: bool
    mode: int
    y_pred: float = math.nan
    relaxed: bool = False
    rank_deficient: bool = False


@dataclass
class ExperimentLog:
    records: list[StepRecord] = field(default_factory=list)
    swap_times: list[int] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    @property
    def error(self) -> np.ndarray:
        return self.column("y") - self.column("r")

    def rmse(self, start: int, stop: int) -> float:
        """Tracking RMSE over steps ``start <= t < stop`` (clipped to the log)."""
        t = self.t
        sel = (t >= start) & (t < stop)
        if not np.any(sel):
            return math.nan
        return float(np.sqrt(np.mean(self.error[sel] ** 2)))

    def segment_rmse(self, boundaries) -> list[dict]:
        n = len(self.records)
        edges = sorted({0, n, *(b for b in boundaries if 0 < b < n)})
        return [{"start": a, "stop": b, "rmse": self.rmse(a, b)} for a, b in zip(edges, edges[1:])]

    def swap_rmse(self, span: int = 15) -> list[dict]:
        """RMSE before and after each swap.

        A swap decided at step ``s`` first affects ``u_s`` and hence
        ``y_{s+1}``; ``y_s`` is counted on the "before" side.
        """
        return [{"t": s, "before": self.rmse(s - span + 1, s + 1),
                 "after": self.rmse(s + 1, s + span + 1)} for s in self.swap_times]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(LOG_COLUMNS)
            for rec in self.records:
                writer.writerow([rec.t, format_float(rec.u), format_float(rec.y),
                                 format_float(rec.r),
                                 "" if math.isnan(rec.gap) else format_float(rec.gap),
                                 int(rec.swap), rec.mode])

    @classmethod
    def read_csv(cls, path) -> "ExperimentLog":
        log = cls()
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                rec = StepRecord(int(row["t"]), float(row["u"]), float(row["y"]), float(row["r"]),
                                 float(row["gap"]) if row["gap"] else math.nan,
                                 bool(int(row["swap"])), int(row["mode"]))
                log.records.append(rec)
                if rec.swap:
                    log.swap_times.append(rec.t)
        return log

    def summary(self, schedule: ModeSchedule | None = None, config: dict | None = None) -> dict:
        boundaries = list(self.swap_times) + (schedule.switch_times if schedule else [])
        out = {
            "steps": len(self.records),
            "swap_times": list(self.swap_times),
            "segment_rmse": self.segment_rmse(boundaries),
            "swap_rmse": self.swap_rmse(),
            "total_rmse": self.rmse(0, len(self.records)),
            "relaxed_steps": [r.t for r in self.records if r.relaxed],
            "rank_deficient_steps": [r.t for r in self.records if r.rank_deficient],
        }
        if config is not None:
            out["config"] = config
        return out


def write_summary(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


@dataclass
class RecognitionState:
    D: np.ndarray
    D_basis: SubspaceBasis
    w: list = field(default_factory=list)
    columns: list = field(default_factory=list)
    swaps: list = field(default_factory=list)

    def push_sample(self, sample, L: int, M: int) -> None:
        """Record a realized sample and slide the window if a new column exists."""
        self.w.append([float(x) for x in sample])
        if len(self.w) >= L:
            self.columns.append(np.array(self.w[-L:]).ravel())
            del self.columns[:-M]

    def window(self, M: int) -> np.ndarray:
        """Matrix of the ``M`` most recent trajectory windows."""
        if len(self.columns) < M:
            raise WindowNotFull(f"window has {len(self.columns)} columns, need {M}")
        return np.column_stack(self.columns[-M:])


def recognition_step(state: RecognitionState, t: int, cfg: RecognitionConfig,
                     H: np.ndarray | None = None) -> tuple[bool, float, bool]:
    """Compare the current window with the data matrix and swap if needed.

    Returns ``(swapped, gap_value, window_rank_deficient)``.

    Raises:
        WindowNotFull: during warm-up.
    """
    if H is None:
        H = state.window(cfg.M)
    Hb, deficient = window_basis(H, cfg.dim)
    value = gap(Hb, state.D_basis).value
    swapped = value > cfg.epsilon
    if swapped:
        state.D = np.array(H, dtype=float)
        state.D_basis = orthonormal_basis(state.D, target_rank=cfg.dim)
        state.swaps.append(t)
    return swapped, value, deficient


def initial_data_matrix(cfg: RecognitionConfig, system: SARXSystem,
                        rng: np.random.Generator) -> np.ndarray:
    w = generate_excited_trajectory(system, cfg.initial_data_mode, cfg.initial_data_length,
                                    rng=rng, L=cfg.L)
    return hankel(w, cfg.L)


def mismatch_onsets(schedule: ModeSchedule, data_mode: int) -> list[int]:
    """Times at which the plant mode stops matching the data in use.

    The start counts when the initial data come from another mode; every
    later schedule switch counts as well.
    """
    onsets = [0] if schedule.mode_at(0) != data_mode else []
    return onsets + schedule.switch_times


def run_closed_loop(cfg: RecognitionConfig, system: SARXSystem, schedule: ModeSchedule,
                    D0: np.ndarray | None = None) -> ExperimentLog:
    """Simulate recognition plus DeePC over ``cfg.horizon`` steps.

    ``epsilon = inf`` disables recognition and keeps the initial data matrix
    (the non-adaptive baseline). The plant starts from zero history, which
    also seeds ``(u_ini, y_ini)``. Infeasible DeePC steps are re-solved with
    least-squares initial conditions and flagged as relaxed.
    """
    rng = np.random.default_rng(cfg.seed)
    data_rng, noise_rng, dither_rng = (np.random.default_rng(s) for s in rng.spawn(3))
    if D0 is None:
        D0 = initial_data_matrix(cfg, system, data_rng)
    D0 = np.asarray(D0, dtype=float)
    state = RecognitionState(D=D0, D_basis=orthonormal_basis(D0, target_rank=cfg.dim))
    state.w = [[0.0] * (cfg.m + cfg.p) for _ in range(cfg.T_ini)]
    if cfg.prefill_window:
        state.columns = [col.copy() for col in D0.T[-cfg.M:]]
    plant = SARXPlant(system, noise_rng)
    log = ExperimentLog()
    recognize = math.isfinite(cfg.epsilon)

    for t in range(cfg.horizon):
        swapped, value, deficient = False, math.nan, False
        if recognize:
            try:
                swapped, value, deficient = recognition_step(state, t, cfg)
            except WindowNotFull:
                pass
        past = np.array(state.w[-cfg.T_ini:])
        r = np.array([cfg.reference_at(t + k) for k in range(cfg.T_f)])
        prob = build_problem(state.D, cfg.T_ini, cfg.T_f, cfg.m, cfg.p,
                             past[:, :cfg.m].ravel(), past[:, cfg.m:].ravel(), r, cfg.weights)
        relaxed = False
        try:
            sol = solve_deepc(prob)
        except DeePCInfeasibleError:
            sol = solve_deepc(prob, relax=True)
            relaxed = True
        u = float(sol.u_star[0])
        if cfg.dither > 0:
            u += cfg.dither * dither_rng.uniform(-1.0, 1.0)
        mode = schedule.mode_at(t)
        y = plant.step(mode, u)
        state.push_sample([u, y], cfg.L, cfg.M)
        log.records.append(StepRecord(t, u, y, cfg.reference_at(t), value, swapped, mode,
                                      float(sol.y_star[0]), relaxed, deficient))
    log.swap_times = list(state.swaps)
    return log


def case_study_schedule() -> ModeSchedule:
    """Plant starts in the second mode and switches to the first at t = 40."""
    return ModeSchedule(((0, 1), (40, 0)))
