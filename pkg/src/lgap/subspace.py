"""Orthonormal subspace representations and principal angles.

A point on Grass(k, N) is stored as an N x k matrix with orthonormal
columns. Everything downstream only looks at projectors or singular values
of basis products, so the choice of basis (signs, rotations) never matters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-10
DEFAULT_RANK_TOL = 1e-8


class DimensionError(ValueError):
    """Raised when matrix shapes or subspace dimensions are incompatible."""


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal frame of a k-dimensional subspace of R^N."""

    columns: np.ndarray

    def __post_init__(self) -> None:
        cols = np.array(self.columns, dtype=float)
        if cols.ndim == 1:
            cols = cols[:, None]
        if cols.ndim != 2 or cols.shape[1] == 0 or cols.shape[0] < cols.shape[1]:
            raise DimensionError(f"invalid basis shape {cols.shape}")
        gram = cols.T @ cols
        err = np.max(np.abs(gram - np.eye(cols.shape[1])))
        if err > ORTHO_TOL:
            raise ValueError(f"columns are not orthonormal (max |V^T V - I| = {err:.3e})")
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def rotated(self, Q: np.ndarray) -> "SubspaceBasis":
        """Image of the subspace under the orthogonal map ``Q``."""
        return SubspaceBasis(Q @ self.columns)


@dataclass(frozen=True)
class PrincipalAngles:
    """Principal angles in radians, sorted in nondecreasing order."""

    angles: np.ndarray

    @property
    def max(self) -> float:
        return float(self.angles[-1]) if self.angles.size else 0.0

    def __len__(self) -> int:
        return self.angles.size


def singular_values(M) -> np.ndarray:
    return np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)


def numerical_rank(M, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values strictly above ``rel_tol * sigma_1``."""
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def orthonormal_basis(M, target_rank: int | None = None,
                      rel_tol: float = DEFAULT_RANK_TOL) -> SubspaceBasis:
    """Leading left singular vectors of ``M``.

    Args:
        M: N x c matrix whose column space is wanted.
        target_rank: Keep exactly this many singular vectors. When omitted the
            numerical rank (relative threshold ``rel_tol``) is used.
        rel_tol: Relative singular value cutoff for the numerical rank.

    Raises:
        ValueError: If ``M`` is the zero matrix.
        DimensionError: If ``target_rank`` exceeds ``min(N, c)``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.size == 0 or not np.any(M):
        raise ValueError("zero matrix has no basis")
    if target_rank is not None:
        if target_rank < 1 or target_rank > min(M.shape):
            raise DimensionError(
                f"target_rank {target_rank} not in [1, {min(M.shape)}] for a {M.shape} matrix")
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    k = target_rank if target_rank is not None else int(np.sum(s > rel_tol * s[0]))
    return SubspaceBasis(U[:, :k])


def complement_basis(B: SubspaceBasis) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement, N x (N - k)."""
    U, _, _ = np.linalg.svd(B.columns, full_matrices=True)
    return U[:, B.rank:]


def projector(B: SubspaceBasis) -> np.ndarray:
    """Orthogonal projector ``V V^T`` onto the span of ``B``."""
    V = B.columns
    P = V @ V.T
    return 0.5 * (P + P.T)


def _check_ambient(V: SubspaceBasis, W: SubspaceBasis) -> None:
    if V.ambient_dim != W.ambient_dim:
        raise DimensionError(
            f"ambient dimension mismatch: {V.ambient_dim} vs {W.ambient_dim}")


def principal_cosines(V: SubspaceBasis, W: SubspaceBasis) -> np.ndarray:
    """Singular values of ``V^T W`` clipped to [0, 1], in descending order."""
    _check_ambient(V, W)
    s = np.linalg.svd(V.columns.T @ W.columns, compute_uv=False)
    return np.clip(s, 0.0, 1.0)


def principal_sines(V: SubspaceBasis, W: SubspaceBasis) -> np.ndarray:
    """Sines of the principal angles, ascending, from ``(I - P_W) V``.

    The roles of V and W swap when V has more columns, so that there are
    always ``min(k_V, k_W)`` values.
    """
    _check_ambient(V, W)
    A, B = (V.columns, W.columns) if V.rank <= W.rank else (W.columns, V.columns)
    R = A - B @ (B.T @ A)
    return np.clip(np.sort(np.linalg.svd(R, compute_uv=False)), 0.0, 1.0)


def principal_angles(V: SubspaceBasis, W: SubspaceBasis) -> PrincipalAngles:
    """Principal angles between span(V) and span(W), ``min(k_V, k_W)`` of them.

    Cosines come from ``V^T W`` and sines from the residual of V off W;
    arctan2 of the pair is accurate at both ends of [0, pi/2] where arccos
    or arcsin alone lose about half the digits.
    """
    return PrincipalAngles(np.arctan2(principal_sines(V, W), principal_cosines(V, W)))


def spectral_norm(M) -> float:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(np.atleast_2d(M), 2))
