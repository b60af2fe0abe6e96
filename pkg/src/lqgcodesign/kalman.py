"""Filtering covariance propagation and the sensor-dependent cost functionals.

For a fixed sensor set the filtering error covariance follows the standard
predict/update recursion, written here in information form with whitened
sensors.  Whitening replaces each (C, V) pair by Cbar = V^{-1/2} C, so the
measurement update is a single additive term Cbar' Cbar per sensor:

    post[0]  from prior[0] = sigma_init
    post[t]  = inv( inv(prior[t]) + sum_{i in S} Cbar_i[t]' Cbar_i[t] )
    prior[t+1] = A[t] post[t] A[t]' + W[t]

The empty selection performs the identity update, never inverting anything.

Two scalar functionals of the trajectory drive sensor selection:

* ``sensing_objective``: sum_t trace(theta[t] post[t]), the part of the
  LQG cost the sensor set can influence;
* ``optimal_lqg_cost``: the full expected cost of the optimal
  output-feedback loop, the sensing objective plus a sensor-independent
  constant.

``ObjectiveCache`` memoizes these per sensor set so greedy sweeps, brute
force enumeration, and ratio scans never propagate the same set twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import NumericalError, inv_sqrt_pd, sym_inverse, symmetrize
from .model import Scenario, Sensor
from .riccati import RiccatiSolution

_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class WhitenedSensor:
    """Per-step whitened wiring Cbar[t] = V[t]^{-1/2} C[t] of one sensor."""

    id: int
    matrices: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def info_matrices(self) -> tuple[np.ndarray, ...]:
        """Additive information contributions Cbar[t]' Cbar[t]."""
        return tuple(symmetrize(m.T @ m) for m in self.matrices)


def whiten_sensor(sensor: Sensor) -> WhitenedSensor:
    """Fold the noise covariance into the wiring via its inverse square root."""
    mats = tuple(inv_sqrt_pd(v, floor=_SINGULAR_TOL) @ c for c, v in zip(sensor.C, sensor.V))
    return WhitenedSensor(id=sensor.id, matrices=mats)


@dataclass(frozen=True)
class CovarianceTrajectory:
    """Prediction and filtering covariances, indexed 0..horizon-1."""

    priors: tuple[np.ndarray, ...] = field(repr=False)
    posteriors: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def horizon(self) -> int:
        return len(self.priors)


def _propagate(system, info_seq) -> CovarianceTrajectory:
    """Run the recursion given per-step added information (None for none)."""
    priors = []
    posts = []
    prior = system.sigma_init
    for t in range(system.horizon):
        priors.append(prior)
        info = info_seq[t] if info_seq is not None else None
        if info is None:
            post = prior
        else:
            if float(np.linalg.eigvalsh(prior)[0]) < _SINGULAR_TOL:
                raise NumericalError(
                    f"prediction covariance singular at time index {t}; "
                    "a positive definite W regularizes it"
                )
            post = sym_inverse(sym_inverse(prior) + info)
        posts.append(post)
        if t + 1 < system.horizon:
            A, W = system.A[t], system.W[t]
            prior = symmetrize(A @ post @ A.T + W)
    return CovarianceTrajectory(priors=tuple(priors), posteriors=tuple(posts))


def _info_sequence(whitened: dict[int, WhitenedSensor], ids, horizon: int):
    chosen = sorted(set(int(i) for i in ids))
    if not chosen:
        return None
    per_sensor = [whitened[i].info_matrices for i in chosen]
    return [symmetrize(sum(mats[t] for mats in per_sensor)) for t in range(horizon)]


def propagate_covariance(scenario: Scenario, ids) -> CovarianceTrajectory:
    """Covariance trajectory under the given sensor set (any iterable of ids)."""
    chosen = sorted(set(int(i) for i in ids))
    whitened = {i: whiten_sensor(scenario.suite.sensor(i)) for i in chosen}
    info_seq = _info_sequence(whitened, chosen, scenario.horizon)
    return _propagate(scenario.system, info_seq)


def sensing_objective(sol: RiccatiSolution, traj: CovarianceTrajectory) -> float:
    """sum_t trace(theta[t] post[t]): the sensor-dependent share of the cost."""
    if sol.horizon != traj.horizon:
        raise ValueError("solution and trajectory horizons differ")
    total = 0.0
    for t in range(sol.horizon):
        total += float(np.sum(sol.theta[t] * traj.posteriors[t]))
    return total


def cost_offset(scenario: Scenario, sol: RiccatiSolution) -> float:
    """Sensor-independent part of the expected LQG cost.

    Covers the initial-state mean and covariance through N[0] plus the
    accumulated process noise; no sensor choice can change it.
    """
    mean = scenario.system.x1_mean
    total = float(mean @ sol.N[0] @ mean)
    total += float(np.sum(sol.N[0] * scenario.system.sigma_init))
    for t in range(scenario.horizon):
        total += float(np.sum(scenario.system.W[t] * sol.S[t]))
    return total


def optimal_lqg_cost(scenario: Scenario, sol: RiccatiSolution, ids) -> float:
    """Expected cost of the optimal controller driven by the chosen sensors."""
    traj = propagate_covariance(scenario, ids)
    return sensing_objective(sol, traj) + cost_offset(scenario, sol)


def kappa_bar(scenario: Scenario, sol: RiccatiSolution) -> float:
    """Cap on the sensing objective equivalent to the scenario's cost cap.

    Subtracting the sensor-independent offset from ``kappa`` makes
    ``optimal_lqg_cost(S) <= kappa`` hold exactly when
    ``sensing_objective(S) <= kappa_bar``.  May be negative, in which case
    no sensor set can meet the cap.
    """
    if scenario.kappa is None:
        raise ValueError("scenario defines no kappa; set one to use cost-capped selection")
    return scenario.kappa - cost_offset(scenario, sol)


def logdet_objective(traj: CovarianceTrajectory) -> float:
    """Average log-volume of the filtering covariances.

    The classic sensing surrogate: (1/T) sum_t log det post[t].  Requires
    strictly positive definite posteriors.
    """
    total = 0.0
    for t, post in enumerate(traj.posteriors):
        sign, logabs = np.linalg.slogdet(post)
        if sign <= 0.0 or float(np.linalg.eigvalsh(post)[0]) <= 0.0:
            raise NumericalError(
                f"filtering covariance not positive definite at time index {t}"
            )
        total += float(logabs)
    return total / traj.horizon


class ObjectiveCache:
    """Memoized per-set evaluation of the selection objectives.

    Whitened information matrices are precomputed once per scenario; each
    distinct sensor set is propagated at most once per functional.  Reads
    and writes are idempotent, so concurrent gain evaluations may share an
    instance.
    """

    def __init__(self, scenario: Scenario, sol: RiccatiSolution):
        if sol.horizon != scenario.horizon:
            raise ValueError("solution horizon does not match scenario horizon")
        self.scenario = scenario
        self.sol = sol
        self._whitened = {s.id: whiten_sensor(s) for s in scenario.suite}
        self._info = {i: w.info_matrices for i, w in self._whitened.items()}
        self._f: dict[frozenset[int], float] = {}
        self._logdet: dict[frozenset[int], float] = {}
        self.offset = cost_offset(scenario, sol)

    @property
    def ground_set(self) -> tuple[int, ...]:
        return self.scenario.suite.ids

    def whitened(self, sensor_id: int) -> WhitenedSensor:
        return self._whitened[sensor_id]

    def trajectory(self, ids) -> CovarianceTrajectory:
        chosen = frozenset(int(i) for i in ids)
        for i in chosen:
            self.scenario.suite.sensor(i)
        if not chosen:
            info_seq = None
        else:
            per_sensor = [self._info[i] for i in sorted(chosen)]
            info_seq = [
                symmetrize(sum(mats[t] for mats in per_sensor))
                for t in range(self.scenario.horizon)
            ]
        return _propagate(self.scenario.system, info_seq)

    def f(self, ids) -> float:
        """Memoized sensing objective of the set."""
        key = frozenset(int(i) for i in ids)
        hit = self._f.get(key)
        if hit is None:
            hit = sensing_objective(self.sol, self.trajectory(key))
            self._f[key] = hit
        return hit

    def g(self, ids) -> float:
        """Memoized full LQG cost of the set."""
        return self.f(ids) + self.offset

    def logdet(self, ids) -> float:
        """Memoized log-volume objective of the set."""
        key = frozenset(int(i) for i in ids)
        hit = self._logdet.get(key)
        if hit is None:
            hit = logdet_objective(self.trajectory(key))
            self._logdet[key] = hit
        return hit

    def kappa_bar(self) -> float:
        return kappa_bar(self.scenario, self.sol)
