"""Switched ARX plant with truncated Gaussian equation noise."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .behavior import Complexity, ExcitationError, Trajectory, excitation_check

# Lag-ordered (y_{t-1}, y_{t-2}, ..., u_{t-1}, ...) coefficient sets.
CASE_STUDY_MODES = (
    {"a": (0.2, 0.24), "b": (2.0,)},
    {"a": (0.7, -0.12), "b": (1.0,)},
)
CASE_STUDY_NOISE_SIGMA = 1e-4


@dataclass(frozen=True)
class ARXMode:
    a: tuple
    b: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if not self.a and not self.b:
            raise ValueError("ARX mode needs at least one coefficient")

    @property
    def lag(self) -> int:
        return max(len(self.a), len(self.b))

    def complexity(self) -> Complexity:
        # SISO ARX in shift form: order equals lag
        return Complexity(1, self.lag, self.lag)


@dataclass(frozen=True)
class SARXSystem:
    modes: tuple
    noise_sigma: float = CASE_STUDY_NOISE_SIGMA
    truncation: float = 3.0

    def __post_init__(self) -> None:
        modes = tuple(m if isinstance(m, ARXMode) else ARXMode(**m) for m in self.modes)
        if not modes:
            raise ValueError("SARX system needs at least one mode")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def case_study(cls, noise_sigma: float = CASE_STUDY_NOISE_SIGMA) -> "SARXSystem":
        return cls(CASE_STUDY_MODES, noise_sigma)

    @property
    def lag(self) -> int:
        return max(m.lag for m in self.modes)

    def mode(self, index: int) -> ARXMode:
        if not 0 <= index < len(self.modes):
            raise IndexError(f"invalid mode {index}; system has {len(self.modes)} modes")
        return self.modes[index]


@dataclass(frozen=True)
class ModeSchedule:
    """Piecewise-constant mode sequence given as ``(start_time, mode)`` pairs."""

    entries: tuple

    def __post_init__(self) -> None:
        entries = tuple((int(t), int(k)) for t, k in self.entries)
        if not entries or entries[0][0] != 0:
            raise ValueError("mode schedule must start at t = 0")
        starts = [t for t, _ in entries]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError(f"schedule start times must increase strictly: {starts}")
        object.__setattr__(self, "entries", entries)

    def mode_at(self, t: int) -> int:
        mode = self.entries[0][1]
        for start, k in self.entries:
            if start > t:
                break
            mode = k
        return mode

    @property
    def switch_times(self) -> list[int]:
        return [t for t, _ in self.entries[1:]]


def truncated_gaussian(sigma: float, rng: np.random.Generator | None,
                       width: float = 3.0) -> float:
    """Sample N(0, sigma^2) conditioned on ``|n| <= width * sigma``.

    Rejection sampling; acceptance rate is about 0.997 for ``width = 3``.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0 or rng is None:
        return 0.0
    while True:
        x = rng.standard_normal()
        if abs(x) <= width:
            return float(sigma * x)


def sarx_step(system: SARXSystem, mode: int, y_prev: Sequence[float],
              u_prev: Sequence[float] | float, rng: np.random.Generator | None = None) -> float:
    """Next output of the selected mode.

    ``y_prev`` and ``u_prev`` are lag-ordered: ``y_prev[0] = y_{t-1}``.
    Noise is drawn only when ``rng`` is given.
    """
    md = system.mode(mode)
    u_prev = np.atleast_1d(np.asarray(u_prev, dtype=float))
    y_prev = np.asarray(y_prev, dtype=float)
    y = sum(a * y_prev[i] for i, a in enumerate(md.a))
    y += sum(b * u_prev[i] for i, b in enumerate(md.b))
    return float(y + truncated_gaussian(system.noise_sigma, rng, system.truncation))


class SARXPlant:
    """Sequential simulator holding the input/output history.

    Initial history is zero.
    """

    def __init__(self, system: SARXSystem, rng: np.random.Generator | None = None):
        self.system = system
        self.rng = rng
        lag = system.lag
        self._y = [0.0] * lag
        self._u = [0.0] * lag

    def step(self, mode: int, u: float) -> float:
        """Produce ``y_t`` from the history, then record ``u_t``."""
        y = sarx_step(self.system, mode, self._y[::-1], self._u[::-1], self.rng)
        self._y = self._y[1:] + [y]
        self._u = self._u[1:] + [float(u)]
        return y


def uniform_input(rng: np.random.Generator, T: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, T)


def simulate(system: SARXSystem, u, schedule: ModeSchedule | int,
             rng: np.random.Generator | None = None) -> Trajectory:
    """Open-loop simulation under an input sequence and mode schedule."""
    u = np.asarray(u, dtype=float).ravel()
    plant = SARXPlant(system, rng)
    y = np.empty_like(u)
    for t, ut in enumerate(u):
        mode = schedule if isinstance(schedule, int) else schedule.mode_at(t)
        y[t] = plant.step(mode, ut)
    return Trajectory.from_io(u, y)


def generate_excited_trajectory(system: SARXSystem, mode: int, T: int,
                                input_law: Callable | None = None,
                                rng: np.random.Generator | None = None,
                                L: int = 7, max_tries: int = 10,
                                noise: bool = True) -> Trajectory:
    """Single-mode trajectory that is sufficiently excited at depth ``L``.

    Inputs are drawn from ``input_law(rng, T)`` (default i.i.d. uniform on
    [-1, 1]); a fresh draw is taken up to ``max_tries`` times. The check uses
    the noise-free response so that the noise floor does not mask a
    rank-deficient input.
    """
    if rng is None:
        rng = np.random.default_rng()
    input_law = input_law or uniform_input
    c = system.mode(mode).complexity()
    if L <= c.l:
        L = c.l + 1
    need = (c.m + 1) * L - 1
    if T < need:
        raise ValueError(f"T={T} too short for depth {L}; need at least {need}")
    report = None
    for _ in range(max_tries):
        u = np.asarray(input_law(rng, T), dtype=float)
        clean = simulate(system, u, mode, None)
        report = excitation_check(clean, L, c)
        if report.passed:
            if noise and system.noise_sigma > 0:
                return simulate(system, u, mode, rng)
            return clean
    raise ExcitationError(f"no sufficiently excited draw in {max_tries} tries: {report}", report)
