"""Gap-type distances between subspaces and restricted behaviors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .behavior import (Complexity, ExcitationError, GraphForm, Trajectory,
                       behavior_basis, graph_form_basis)
from .subspace import (DimensionError, SubspaceBasis, complement_basis,
                       principal_cosines, principal_sines, projector, spectral_norm)


@dataclass(frozen=True)
class GapResult:
    """Gap value together with both data-based evaluations.

    ``via_projectors`` is ``||P_V - P_W||_2`` and ``via_complement`` is
    ``||W_perp^T V||_2``. ``rank_mismatch`` flags the convention
    ``value = 1`` for subspaces of different dimension.
    """

    value: float
    theta_max: float
    via_projectors: float
    via_complement: float
    rank_mismatch: bool = False


@dataclass(frozen=True)
class GraphGapBounds:
    """Lower bound, gap and upper bound for two graph-form behaviors."""

    lower: float
    gap: float
    upper: float
    F_delta_norm: float

    def holds(self, slack: float = 1e-9) -> bool:
        return self.lower <= self.gap + slack and self.gap <= self.upper + slack


def directed_gap(V: SubspaceBasis, W: SubspaceBasis) -> float:
    """``||(I - P_W) P_V||_2``: worst distance from a unit vector of V to W."""
    if V.ambient_dim != W.ambient_dim:
        raise DimensionError(f"ambient dimension mismatch: {V.ambient_dim} vs {W.ambient_dim}")
    R = V.columns - W.columns @ (W.columns.T @ V.columns)
    return min(1.0, spectral_norm(R))


def gap(V: SubspaceBasis, W: SubspaceBasis) -> GapResult:
    if V.ambient_dim != W.ambient_dim:
        raise DimensionError(f"ambient dimension mismatch: {V.ambient_dim} vs {W.ambient_dim}")
    if V.columns.shape == W.columns.shape and np.array_equal(V.columns, W.columns):
        # identical frames: report an exact zero rather than rounding residue
        return GapResult(0.0, 0.0, 0.0, 0.0)
    via_proj = min(1.0, spectral_norm(projector(V) - projector(W)))
    if V.rank != W.rank:
        # The directed gap out of the larger subspace is always 1.
        return GapResult(1.0, math.pi / 2, via_proj, 1.0, rank_mismatch=True)
    if W.rank == W.ambient_dim:
        via_comp = 0.0
    else:
        via_comp = min(1.0, spectral_norm(complement_basis(W).T @ V.columns))
    cos_min = principal_cosines(V, W)[-1]
    theta = math.atan2(via_comp, cos_min)
    return GapResult(via_comp, theta, via_proj, via_comp)


def l_gap(w1: Trajectory, w2: Trajectory, L: int, c: Complexity) -> GapResult:
    """Gap between the depth-L restricted behaviors spanned by two trajectories."""
    return gap(behavior_basis(w1, L, c), behavior_basis(w2, L, c))


def graph_gap_bounds(F: GraphForm, F_tilde: GraphForm) -> GraphGapBounds:
    """Gap between ``Image [I; F]`` and ``Image [I; F~]`` with its graph bounds.

    ``||F - F~|| / (sqrt(1+||F||^2) sqrt(1+||F~||^2)) <= gap <= ||F - F~||``.
    """
    if F.shape != F_tilde.shape:
        raise DimensionError(f"graph forms differ in shape: {F.shape} vs {F_tilde.shape}")
    delta = spectral_norm(F.F - F_tilde.F)
    nf, nft = spectral_norm(F.F), spectral_norm(F_tilde.F)
    lower = delta / (math.sqrt(1 + nf ** 2) * math.sqrt(1 + nft ** 2))
    g = gap(graph_form_basis(F), graph_form_basis(F_tilde)).value
    return GraphGapBounds(lower, g, delta, delta)


def worst_case_projection_error(V: SubspaceBasis, w) -> float:
    """Relative distance ``||(I - P_V) w|| / ||w||`` of a vector to span(V)."""
    w = np.asarray(w, dtype=float).ravel()
    if w.size != V.ambient_dim:
        raise DimensionError(f"vector length {w.size} != ambient dimension {V.ambient_dim}")
    nw = np.linalg.norm(w)
    if nw == 0.0:
        raise ValueError("zero vector has no relative projection error")
    r = w - V.columns @ (V.columns.T @ w)
    return min(1.0, float(np.linalg.norm(r) / nw))


@dataclass
class GapProfile:
    """Gap as a function of depth; failed depths map to their error message."""

    values: dict[int, float] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)

    def as_pairs(self) -> list[tuple[int, float]]:
        return sorted(self.values.items())


def gap_profile(w1: Trajectory, w2: Trajectory, L_range, c: Complexity) -> GapProfile:
    """Evaluate ``l_gap`` over a range of depths (convergence probe in L)."""
    prof = GapProfile()
    for L in L_range:
        try:
            prof.values[L] = l_gap(w1, w2, L, c).value
        except (ExcitationError, ValueError) as exc:
            prof.failures[L] = str(exc)
    return prof


# --------------------------------------------------------------------------
# Grassmannian metric suite
# --------------------------------------------------------------------------

MARTIN_COS_FLOOR = 1e-12


def _cosines_equal_rank(V: SubspaceBasis, W: SubspaceBasis) -> np.ndarray:
    if V.ambient_dim != W.ambient_dim:
        raise DimensionError(f"ambient dimension mismatch: {V.ambient_dim} vs {W.ambient_dim}")
    if V.rank != W.rank:
        raise DimensionError(f"metrics need equal ranks, got {V.rank} and {W.rank}")
    return principal_cosines(V, W)


def _theta(V: SubspaceBasis, W: SubspaceBasis):
    """Principal angles with their cosines and sines, all ascending in angle."""
    cos = _cosines_equal_rank(V, W)
    if np.array_equal(V.columns, W.columns):
        k = V.rank
        return np.zeros(k), np.ones(k), np.zeros(k)
    sin = principal_sines(V, W)
    return np.arctan2(sin, cos), cos, sin


def _one_minus_cos_prod_sq(cos: np.ndarray, sin: np.ndarray) -> float:
    """``1 - prod(cos_i)^2`` without cancellation for small angles."""
    return float(-np.expm1(np.sum(_log_cos(cos, sin)) * 2.0))


def _log_cos(cos: np.ndarray, sin: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(sin < np.sqrt(0.5), 0.5 * np.log1p(-sin ** 2), np.log(cos))


def asimov(V, W):
    theta, _, _ = _theta(V, W)
    return float(theta.max())


def binet_cauchy(V, W):
    _, cos, sin = _theta(V, W)
    return math.sqrt(max(0.0, _one_minus_cos_prod_sq(cos, sin)))


def chordal(V, W):
    _, _, sin = _theta(V, W)
    return float(np.sqrt(np.sum(sin ** 2)))


def fubini_study(V, W):
    _, cos, sin = _theta(V, W)
    prod = float(np.prod(cos))
    return math.atan2(math.sqrt(max(0.0, _one_minus_cos_prod_sq(cos, sin))), prod)


def grassmann(V, W):
    theta, _, _ = _theta(V, W)
    return float(np.sqrt(np.sum(theta ** 2)))


def martin(V, W):
    _, cos, sin = _theta(V, W)
    if np.any(cos <= MARTIN_COS_FLOOR):
        return math.inf
    return math.sqrt(max(0.0, -2.0 * float(np.sum(_log_cos(cos, sin)))))


def procrustes(V, W):
    theta, _, _ = _theta(V, W)
    return 2.0 * float(np.sqrt(np.sum(np.sin(theta / 2) ** 2)))


def projection(V, W):
    _, _, sin = _theta(V, W)
    return float(sin.max())


def spectral(V, W):
    theta, _, _ = _theta(V, W)
    return 2.0 * math.sin(float(theta.max()) / 2)


GRASSMANN_METRICS = {
    "asimov": asimov,
    "binet-cauchy": binet_cauchy,
    "chordal": chordal,
    "fubini-study": fubini_study,
    "grassmann": grassmann,
    "martin": martin,
    "procrustes": procrustes,
    "projection": projection,
    "spectral": spectral,
}


def grassmann_metric(name: str, V: SubspaceBasis, W: SubspaceBasis) -> float:
    """Evaluate one of the principal-angle metrics by name.

    Names: asimov, binet-cauchy, chordal, fubini-study, grassmann, martin,
    procrustes, projection, spectral. Martin returns ``inf`` when some
    principal angle is (numerically) a right angle.
    """
    try:
        fn = GRASSMANN_METRICS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown metric {name!r}; choose from {sorted(GRASSMANN_METRICS)}") from None
    return fn(V, W)


def grassmann_metric_matrix_form(name: str, V: SubspaceBasis, W: SubspaceBasis) -> float:
    """Same metrics computed from frame products instead of angles.

    Uses ``V^T W = U S Z^T``; determinants are replaced by the product of
    singular values so that only equal-rank frames are needed.
    """
    _cosines_equal_rank(V, W)
    A, B = V.columns, W.columns
    U, s, Zt = np.linalg.svd(A.T @ B)
    s = np.clip(s, 0.0, 1.0)
    det_abs = float(np.prod(s))
    dP = projector(V) - projector(W)
    key = name.lower()
    if key == "asimov":
        return math.asin(min(1.0, spectral_norm(dP)))
    if key == "binet-cauchy":
        return math.sqrt(max(0.0, 1.0 - det_abs ** 2))
    if key == "chordal":
        return float(np.linalg.norm(dP, "fro")) / math.sqrt(2)
    if key == "fubini-study":
        return math.acos(det_abs)
    if key == "grassmann":
        return float(np.linalg.norm(np.arccos(s)))
    if key == "martin":
        return math.inf if det_abs <= MARTIN_COS_FLOOR else math.sqrt(max(0.0, -2.0 * math.log(det_abs)))
    if key == "procrustes":
        return float(np.linalg.norm(A @ U - B @ Zt.T, "fro"))
    if key == "projection":
        return spectral_norm(dP)
    if key == "spectral":
        return spectral_norm(A @ U - B @ Zt.T)
    raise KeyError(f"unknown metric {name!r}; choose from {sorted(GRASSMANN_METRICS)}")


def all_metrics(V: SubspaceBasis, W: SubspaceBasis) -> dict[str, float]:
    return {name: fn(V, W) for name, fn in GRASSMANN_METRICS.items()}
