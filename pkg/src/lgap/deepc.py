"""DeePC subproblem as an equality-constrained QP solved through its KKT system.

The predicted trajectory is eliminated through ``u = U_f g`` and
``y = Y_f g``, which leaves

    minimize    w_y ||Y_f g - r||^2 + w_u ||U_f g||^2 + lam ||g||^2
    subject to  U_p g = u_ini,  Y_p g = y_ini

a strictly convex problem in ``g`` whenever ``lam > 0``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .behavior import deepc_permutation, inverse_permutation

FEAS_TOL = 1e-6


class DeePCInfeasibleError(ValueError):
    """Initial-condition constraints cannot be met by any ``g``."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class DeePCWeights:
    output_weight: float = 2000.0
    input_weight: float = 1.0
    g_regularization: float = 20.0

    def __post_init__(self) -> None:
        if min(self.output_weight, self.input_weight, self.g_regularization) <= 0:
            raise ValueError(f"DeePC weights must be strictly positive: {self}")

    def scaled(self, factor: float) -> "DeePCWeights":
        return DeePCWeights(self.output_weight * factor, self.input_weight * factor,
                            self.g_regularization * factor)


@dataclass(frozen=True)
class DeePCProblem:
    U_p: np.ndarray
    U_f: np.ndarray
    Y_p: np.ndarray
    Y_f: np.ndarray
    u_ini: np.ndarray
    y_ini: np.ndarray
    r: np.ndarray
    weights: DeePCWeights = DeePCWeights()

    def __post_init__(self) -> None:
        for name in ("U_p", "U_f", "Y_p", "Y_f"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        for name in ("u_ini", "y_ini", "r"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float).ravel())
        cols = {self.U_p.shape[1], self.U_f.shape[1], self.Y_p.shape[1], self.Y_f.shape[1]}
        if len(cols) != 1:
            raise ValueError(f"data blocks disagree on column count: {sorted(cols)}")
        for vec, block, label in ((self.u_ini, self.U_p, "u_ini"), (self.y_ini, self.Y_p, "y_ini"),
                                  (self.r, self.Y_f, "r")):
            if vec.size != block.shape[0]:
                raise ValueError(f"{label} has length {vec.size}, expected {block.shape[0]}")

    @property
    def n_columns(self) -> int:
        return self.U_p.shape[1]

    def with_initial(self, u_ini, y_ini, r) -> "DeePCProblem":
        return DeePCProblem(self.U_p, self.U_f, self.Y_p, self.Y_f, u_ini, y_ini, r, self.weights)

    def cost(self, g) -> float:
        w = self.weights
        g = np.asarray(g, dtype=float)
        return float(w.output_weight * np.sum((self.Y_f @ g - self.r) ** 2)
                     + w.input_weight * np.sum((self.U_f @ g) ** 2)
                     + w.g_regularization * np.sum(g ** 2))


@dataclass(frozen=True)
class DeePCSolution:
    g: np.ndarray
    u_star: np.ndarray
    y_star: np.ndarray
    cost: float
    kkt_residual: float
    relaxed: bool = False
    constraint_residual: float = 0.0


def partition_data_matrix(D, T_ini: int, T_f: int, m: int, p: int):
    """Split an interleaved data matrix into ``(U_p, U_f, Y_p, Y_f)``.

    ``D`` has ``(m+p)(T_ini+T_f)`` rows ordered ``(u_1, y_1, u_2, y_2, ...)``.
    """
    D = np.asarray(D, dtype=float)
    L = T_ini + T_f
    if D.ndim != 2 or D.shape[0] != (m + p) * L:
        raise ValueError(f"data matrix needs {(m + p) * L} rows, got shape {D.shape}")
    Dp = D[deepc_permutation(L, m, p)]
    nu = m * L
    U, Y = Dp[:nu], Dp[nu:]
    return U[:m * T_ini], U[m * T_ini:], Y[:p * T_ini], Y[p * T_ini:]


def assemble_data_matrix(U_p, U_f, Y_p, Y_f, m: int, p: int) -> np.ndarray:
    """Inverse of :func:`partition_data_matrix`."""
    L = (U_p.shape[0] + U_f.shape[0]) // m
    Dp = np.vstack([U_p, U_f, Y_p, Y_f])
    return Dp[inverse_permutation(deepc_permutation(L, m, p))]


def build_problem(D, T_ini: int, T_f: int, m: int, p: int, u_ini, y_ini, r,
                  weights: DeePCWeights = DeePCWeights()) -> DeePCProblem:
    U_p, U_f, Y_p, Y_f = partition_data_matrix(D, T_ini, T_f, m, p)
    return DeePCProblem(U_p, U_f, Y_p, Y_f, u_ini, y_ini, r, weights)


def _kkt_system(prob: DeePCProblem, b: np.ndarray):
    w = prob.weights
    n = prob.n_columns
    A = np.vstack([prob.U_p, prob.Y_p])
    H = (w.output_weight * prob.Y_f.T @ prob.Y_f + w.input_weight * prob.U_f.T @ prob.U_f
         + w.g_regularization * np.eye(n))
    K = np.block([[2.0 * H, A.T], [A, np.zeros((A.shape[0], A.shape[0]))]])
    rhs = np.concatenate([2.0 * w.output_weight * prob.Y_f.T @ prob.r, b])
    return K, rhs, A


def _solve_kkt(K: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        with warnings.catch_warnings():
            # singular pivots are detected below and handled by lstsq
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(K, check_finite=True)
        if np.min(np.abs(np.diag(lu[0]))) <= 1e-13 * np.max(np.abs(np.diag(lu[0]))):
            raise np.linalg.LinAlgError("singular KKT matrix")
        x = scipy.linalg.lu_solve(lu, rhs)
        x = x + scipy.linalg.lu_solve(lu, rhs - K @ x)
        return x
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        # rank-deficient constraints: minimum-norm multipliers
        return scipy.linalg.lstsq(K, rhs, lapack_driver="gelsd")[0]


def solve_deepc(prob: DeePCProblem, relax: bool = False) -> DeePCSolution:
    """Optimal ``g`` and predicted trajectory for one receding-horizon step.

    Args:
        prob: Problem data.
        relax: If the initial-condition constraints are inconsistent, replace
            their right-hand side by its least-squares projection onto the
            range of ``[U_p; Y_p]`` instead of raising.

    Raises:
        DeePCInfeasibleError: Inconsistent constraints and ``relax`` is off.
    """
    b = np.concatenate([prob.u_ini, prob.y_ini])
    A = np.vstack([prob.U_p, prob.Y_p])
    if not np.any(A):
        raise ValueError("constraint rows [U_p; Y_p] are all zero")
    n = prob.n_columns
    g_ls = scipy.linalg.lstsq(A, b, lapack_driver="gelsd")[0]
    feas_res = float(np.linalg.norm(A @ g_ls - b))
    relaxed = False
    if feas_res > FEAS_TOL * (1.0 + np.linalg.norm(b)):
        if not relax:
            raise DeePCInfeasibleError(
                f"initial-condition constraints infeasible (residual {feas_res:.3e})", feas_res)
        b = A @ g_ls
        relaxed = True
    K, rhs, _ = _kkt_system(prob, b)
    x = _solve_kkt(K, rhs)
    g = x[:n]
    kkt_res = float(np.linalg.norm(K @ x - rhs) / (1.0 + np.linalg.norm(rhs)))
    return DeePCSolution(g=g, u_star=prob.U_f @ g, y_star=prob.Y_f @ g, cost=prob.cost(g),
                         kkt_residual=kkt_res, relaxed=relaxed, constraint_residual=feas_res)
