"""Restricted behaviors from data and from AR coefficients.

Trajectories are stored sample-major: row ``t`` holds ``(u_t, y_t)`` with the
inputs first. A depth-L window stacked column-wise therefore reads
``(u_0, y_0, u_1, y_1, ...)``. Every other ordering used in this package
(the DeePC layout and the AR graph-form layout) is obtained from this one
through an explicit index permutation defined below.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass

import numpy as np

from .subspace import (DEFAULT_RANK_TOL, DimensionError, SubspaceBasis,
                       numerical_rank, orthonormal_basis)


class WindowError(ValueError):
    """Hankel depth incompatible with the trajectory length."""


class ExcitationError(ValueError):
    """Data are not sufficiently excited for the requested depth."""

    def __init__(self, message: str, report: "ExcitationReport | None" = None):
        super().__init__(message)
        self.report = report


class TrajectoryFormatError(ValueError):
    """Malformed trajectory CSV."""


@dataclass(frozen=True)
class Trajectory:
    samples: np.ndarray
    m: int
    p: int

    def __post_init__(self) -> None:
        w = np.array(self.samples, dtype=float)
        if w.ndim == 1:
            w = w[:, None]
        if self.m < 0 or self.p < 0 or self.m + self.p < 1:
            raise ValueError(f"need m, p >= 0 and m + p >= 1, got m={self.m}, p={self.p}")
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] != self.m + self.p:
            raise ValueError(f"samples must be T x {self.m + self.p}, got {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "samples", w)

    @classmethod
    def from_io(cls, u, y) -> "Trajectory":
        """Build from separate input and output sequences (T or T x m)."""
        u = np.asarray(u, dtype=float)
        y = np.asarray(y, dtype=float)
        u = u[:, None] if u.ndim == 1 else u
        y = y[:, None] if y.ndim == 1 else y
        return cls(np.hstack([u, y]), u.shape[1], y.shape[1])

    @property
    def T(self) -> int:
        return self.samples.shape[0]

    @property
    def q(self) -> int:
        return self.m + self.p

    @property
    def u(self) -> np.ndarray:
        return self.samples[:, :self.m]

    @property
    def y(self) -> np.ndarray:
        return self.samples[:, self.m:]


@dataclass(frozen=True)
class Complexity:
    """Structure indices (inputs, lag, order) of an LTI system."""

    m: int
    l: int
    n: int

    def __post_init__(self) -> None:
        if min(self.m, self.l, self.n) < 0:
            raise ValueError(f"complexity entries must be nonnegative: {self}")

    def dim(self, L: int) -> int:
        """Dimension ``mL + n`` of the depth-L restricted behavior."""
        return self.m * L + self.n


@dataclass(frozen=True)
class ExcitationReport:
    observed_rank: int
    required_rank: int
    passed: bool

    def __str__(self) -> str:
        status = "pass" if self.passed else "fail"
        return f"rank {self.observed_rank} (required {self.required_rank}): {status}"


# --------------------------------------------------------------------------
# Hankel matrices and excitation
# --------------------------------------------------------------------------

def hankel(w: Trajectory | np.ndarray, L: int) -> np.ndarray:
    """Block Hankel matrix of depth ``L``, shape (q*L, T-L+1).

    Column ``j`` stacks samples ``j, ..., j+L-1``.
    """
    X = w.samples if isinstance(w, Trajectory) else np.asarray(w, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    T, q = X.shape
    if not 1 <= L <= T:
        raise WindowError(f"depth L={L} must satisfy 1 <= L <= T={T}")
    cols = T - L + 1
    H = np.empty((q * L, cols))
    for i in range(L):
        H[i * q:(i + 1) * q, :] = X[i:i + cols, :].T
    return H


def excitation_check(w: Trajectory, L: int, c: Complexity,
                     rel_tol: float = DEFAULT_RANK_TOL) -> ExcitationReport:
    """Compare the numerical rank of ``H_L(w)`` with ``mL + n``."""
    if L <= c.l:
        raise ValueError(f"depth L={L} must exceed the lag l={c.l}")
    required = c.dim(L)
    if w.T < L or w.T - L + 1 < required:
        raise ExcitationError(
            f"insufficient columns: T-L+1={w.T - L + 1} < mL+n={required}")
    observed = numerical_rank(hankel(w, L), rel_tol)
    return ExcitationReport(observed, required, observed == required)


def behavior_basis(w: Trajectory, L: int, c: Complexity,
                   rel_tol: float = DEFAULT_RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the depth-L restricted behavior spanned by ``w``.

    The basis always has exactly ``mL + n`` columns. Noisy data show a
    numerical rank above ``mL + n``; they are truncated to the dominant
    singular directions. Data with rank below ``mL + n`` are refused.
    """
    report = excitation_check(w, L, c, rel_tol)
    if report.observed_rank < report.required_rank:
        raise ExcitationError(f"not sufficiently excited: {report}", report)
    return orthonormal_basis(hankel(w, L), target_rank=report.required_rank)


# --------------------------------------------------------------------------
# Row orderings
# --------------------------------------------------------------------------

def deepc_permutation(L: int, m: int, p: int) -> np.ndarray:
    """Index array mapping interleaved rows to ``col(u_1..u_L, y_1..y_L)``.

    ``H[perm]`` has all input rows first (time-major) followed by all
    output rows.
    """
    q = m + p
    u_rows = [t * q + j for t in range(L) for j in range(m)]
    y_rows = [t * q + m + j for t in range(L) for j in range(p)]
    return np.array(u_rows + y_rows, dtype=int)


def ar_permutation(L: int) -> np.ndarray:
    """Index array mapping interleaved SISO rows to the AR graph-form order.

    Interleaved order is ``(u_0, y_0, ..., u_{L-1}, y_{L-1})``; the target is
    ``(y_0, u_0, ..., y_{L-2}, u_{L-2}, u_{L-1}, y_{L-1})``.
    """
    idx = []
    for t in range(L - 1):
        idx += [2 * t + 1, 2 * t]
    idx += [2 * (L - 1), 2 * (L - 1) + 1]
    return np.array(idx, dtype=int)


def inverse_permutation(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return inv


def permute_basis(B: SubspaceBasis, perm: np.ndarray) -> SubspaceBasis:
    """Reorder ambient coordinates: row ``i`` of the result is row ``perm[i]``."""
    return SubspaceBasis(B.columns[perm])


# --------------------------------------------------------------------------
# AR models and graph forms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ARModel:
    """SISO AR model over a window of length ``L``.

    ``y_{L-1} = sum_k a_k y_k + sum_k b_k u_k`` with ``a`` of length L-1
    and ``b`` of length L.
    """

    L: int
    a: tuple
    b: tuple

    def __post_init__(self) -> None:
        a = tuple(float(x) for x in self.a)
        b = tuple(float(x) for x in self.b)
        if self.L < 1 or len(a) != self.L - 1 or len(b) != self.L:
            raise ValueError(
                f"AR model with L={self.L} needs {self.L - 1} a- and {self.L} b-coefficients, "
                f"got {len(a)} and {len(b)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_arx(cls, ay, bu, L: int) -> "ARModel":
        """Window model of ``y_t = sum_i ay[i] y_{t-1-i} + sum_i bu[i] u_{t-1-i}``.

        ``ay`` and ``bu`` are lag-ordered (coefficient of lag 1 first); they
        are zero-padded to the window.
        """
        a = np.zeros(L - 1)
        b = np.zeros(L)
        for i, coef in enumerate(ay):
            if i + 1 > L - 1:
                raise ValueError(f"lag {i + 1} does not fit in a window of length {L}")
            a[L - 2 - i] = coef
        for i, coef in enumerate(bu):
            if i + 1 > L - 1:
                raise ValueError(f"lag {i + 1} does not fit in a window of length {L}")
            b[L - 2 - i] = coef
        return cls(L, tuple(a), tuple(b))


@dataclass(frozen=True)
class GraphForm:
    """Behavior ``Image [I; F]`` for an r x s matrix ``F``."""

    F: np.ndarray

    def __post_init__(self) -> None:
        F = np.array(self.F, dtype=float)
        if F.ndim == 1:
            F = F[None, :]
        if F.ndim != 2 or F.shape[0] < 1 or F.shape[1] < 1:
            raise ValueError(f"F must be a nonempty matrix, got shape {F.shape}")
        F.setflags(write=False)
        object.__setattr__(self, "F", F)

    @property
    def shape(self) -> tuple[int, int]:
        return self.F.shape


def ar_graph_form(model: ARModel) -> GraphForm:
    """Row ``F = [a_0 b_0 ... a_{L-2} b_{L-2} b_{L-1}]``."""
    row = []
    for a_k, b_k in zip(model.a, model.b[:-1]):
        row += [a_k, b_k]
    row.append(model.b[-1])
    return GraphForm(np.array([row]))


def graph_form_basis(G: GraphForm) -> SubspaceBasis:
    """Orthonormal basis of ``Image [I; F]`` in R^(s+r)."""
    r, s = G.shape
    return orthonormal_basis(np.vstack([np.eye(s), G.F]), target_rank=s)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def _header(m: int, p: int) -> list[str]:
    return ["t"] + [f"u{i + 1}" for i in range(m)] + [f"y{i + 1}" for i in range(p)]


def format_float(x: float) -> str:
    return "%.17g" % x


def write_trajectory_csv(w: Trajectory, path_or_buf) -> None:
    """Write ``t,u1..um,y1..yp`` rows with 17 significant digits."""
    own = isinstance(path_or_buf, (str, os.PathLike))
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(w.m, w.p))
        for t, row in enumerate(w.samples):
            writer.writerow([t] + [format_float(x) for x in row])
    finally:
        if own:
            fh.close()


def read_trajectory_csv(path_or_buf) -> Trajectory:
    """Parse a trajectory CSV; errors name the offending line."""
    if isinstance(path_or_buf, (str, os.PathLike)):
        with open(path_or_buf, newline="") as fh:
            text = fh.read()
    else:
        text = path_or_buf.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise TrajectoryFormatError("line 1: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "t":
        raise TrajectoryFormatError(f"line 1: header must start with 't', got {rows[0]!r}")
    m = sum(1 for h in header if h.startswith("u"))
    p = len(header) - 1 - m
    if header != _header(m, p):
        raise TrajectoryFormatError(
            f"line 1: expected header {','.join(_header(m, p))}, got {','.join(header)}")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise TrajectoryFormatError(
                f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row[1:]]
        except ValueError:
            raise TrajectoryFormatError(f"line {lineno}: non-numeric field in {row!r}") from None
        if not np.all(np.isfinite(vals)):
            raise TrajectoryFormatError(f"line {lineno}: non-finite value in {row!r}")
        data.append(vals)
    if not data:
        raise TrajectoryFormatError("no data rows")
    return Trajectory(np.array(data), m, p)
