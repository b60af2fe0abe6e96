"""Backward Riccati recursion for the finite-horizon LQG regulator.

The recursion runs over t = horizon-1 .. 0 with zero terminal weight:

    S[t]     = Q[t] + N[t+1]                      (N[horizon] = 0)
    M[t]     = B[t]' S[t] B[t] + R[t]
    K[t]     = -inv(M[t]) B[t]' S[t] A[t]
    theta[t] = K[t]' M[t] K[t]
    N[t]     = A[t]' S[t] A[t] - theta[t]

The last line is the matrix-inversion-lemma form of the usual
A' inv(inv(S) + B inv(R) B') A update; it needs no inverse of S and is
valid when S is singular but positive semidefinite.  S, N, and theta are
re-symmetrized after every step so roundoff cannot accumulate skewness.

The recursion depends only on the plant and the weights, never on the
sensor set: the optimal gains are the same no matter which measurements
feed the state estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import NumericalError, general_condition, symmetrize
from .model import LqgWeights, LtvSystem

_COND_LIMIT = 1e12
_PD_TOL = 1e-9


@dataclass(frozen=True)
class RiccatiSolution:
    """Per-step matrices of the regulator recursion, indexed 0..horizon-1.

    ``K[t]`` is the feedback gain applied to the filtered state estimate;
    ``theta[t]`` weights the estimation error's contribution to the cost.
    """

    horizon: int
    S: tuple[np.ndarray, ...] = field(repr=False)
    N: tuple[np.ndarray, ...] = field(repr=False)
    M: tuple[np.ndarray, ...] = field(repr=False)
    K: tuple[np.ndarray, ...] = field(repr=False)
    theta: tuple[np.ndarray, ...] = field(repr=False)


def solve_riccati(system: LtvSystem, weights: LqgWeights) -> RiccatiSolution:
    """Run the backward recursion and return all per-step matrices."""
    if weights.horizon != system.horizon:
        raise ValueError(
            f"weights horizon {weights.horizon} does not match system horizon {system.horizon}"
        )
    T, n = system.horizon, system.state_dim
    S: list[np.ndarray | None] = [None] * T
    N: list[np.ndarray | None] = [None] * T
    M: list[np.ndarray | None] = [None] * T
    K: list[np.ndarray | None] = [None] * T
    theta: list[np.ndarray | None] = [None] * T
    n_next = np.zeros((n, n))
    for t in range(T - 1, -1, -1):
        A, B = system.A[t], system.B[t]
        s_t = symmetrize(weights.Q[t] + n_next)
        m_t = symmetrize(B.T @ s_t @ B + weights.R[t])
        eigs = np.linalg.eigvalsh(m_t)
        if eigs[0] <= 0.0 or eigs[-1] / eigs[0] > _COND_LIMIT:
            raise NumericalError(
                f"input-cost matrix M numerically singular at time index {t}"
            )
        k_t = -np.linalg.solve(m_t, B.T @ s_t @ A)
        theta_t = symmetrize(k_t.T @ m_t @ k_t)
        n_t = symmetrize(A.T @ s_t @ A - theta_t)
        S[t], M[t], K[t], theta[t], N[t] = s_t, m_t, k_t, theta_t, n_t
        n_next = n_t
    return RiccatiSolution(
        horizon=T, S=tuple(S), N=tuple(N), M=tuple(M), K=tuple(K), theta=tuple(theta)
    )


def theta_sum_positive_definite(sol: RiccatiSolution) -> tuple[bool, float]:
    """Smallest eigenvalue of sum_t theta[t] and whether it clears 1e-9.

    A positive-definite sum means every direction of estimation error is
    eventually penalized by the regulator, the condition under which
    applying no control at all is strictly suboptimal.
    """
    total = sum(sol.theta[t] for t in range(sol.horizon))
    lam_min = float(np.linalg.eigvalsh(symmetrize(total))[0])
    return lam_min > _PD_TOL, lam_min


def _state_maps(system: LtvSystem) -> list[np.ndarray]:
    """Cumulative products P[t] = A[t] ... A[0] for t = 0..horizon-1."""
    maps = []
    acc = np.eye(system.state_dim)
    for t in range(system.horizon):
        acc = system.A[t] @ acc
        maps.append(acc)
    return maps


def zero_control_suboptimal(
    system: LtvSystem, weights: LqgWeights, sol: RiccatiSolution
) -> bool:
    """Whether sum_t P[t]' Q[t] P[t] - N[0] is positive definite.

    ``P[t]`` is the open-loop state map A[t]...A[0]; the difference is the
    cost saved by the optimal regulator relative to applying zero input.
    Requires every A[t] to be invertible (condition number below 1e12).
    """
    for t in range(system.horizon):
        if general_condition(system.A[t]) > _COND_LIMIT:
            raise NumericalError(f"state matrix A numerically singular at time index {t}")
    gap = _open_loop_cost(system, weights) - sol.N[0]
    return float(np.linalg.eigvalsh(symmetrize(gap))[0]) > _PD_TOL


def _open_loop_cost(system: LtvSystem, weights: LqgWeights) -> np.ndarray:
    total = np.zeros((system.state_dim, system.state_dim))
    for t, p_t in enumerate(_state_maps(system)):
        total += p_t.T @ weights.Q[t] @ p_t
    return symmetrize(total)


def cascade_identity_residual(
    system: LtvSystem, weights: LqgWeights, sol: RiccatiSolution
) -> float:
    """Frobenius gap of the telescoped regulator identity.

    Pulling every theta[t] back to the initial step through the open-loop
    maps U[t] = A[t-1]...A[0] (U[0] = I) must reproduce the zero-control
    cost gap exactly:

        sum_t U[t]' theta[t] U[t]  =  sum_t P[t]' Q[t] P[t] - N[0]

    The return value is the Frobenius norm of the difference; it is pure
    algebra, so anything above roundoff indicates a recursion bug.
    """
    n = system.state_dim
    pulled = np.zeros((n, n))
    u_t = np.eye(n)
    for t in range(system.horizon):
        pulled += u_t.T @ sol.theta[t] @ u_t
        u_t = system.A[t] @ u_t
    gap = _open_loop_cost(system, weights) - sol.N[0]
    return float(np.linalg.norm(symmetrize(pulled) - gap, ord="fro"))
