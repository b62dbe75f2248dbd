"""Birth-death CTMC availability model of an N-board redundant component.

State i is the number of working boards.  With failure policy l_i = i*l and
a single repairer (m_i = m), the steady-state probability of complete
failure reduces to  pi_0 = 1 / (1 + sum_k m^k / (k! l^k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DEFAULT_FAILURE_RATE = 1e-4  # per hour
DEFAULT_REPAIR_RATE = 20.83e-3  # per hour (one repair roughly every 48 h)


@dataclass(frozen=True)
class BirthDeathModel:
    n_boards: int
    failure_rate: float = DEFAULT_FAILURE_RATE
    repair_rate: float = DEFAULT_REPAIR_RATE
    # State-dependent policies; defaults: boards fail independently
    # (l_i = i*l) and one repair person works regardless of backlog.
    failure_rate_policy: Callable[[int], float] = None  # type: ignore[assignment]
    repair_rate_policy: Callable[[int], float] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.n_boards < 1:
            raise ValueError("need at least one board")
        if self.failure_rate <= 0 or self.repair_rate <= 0:
            raise ValueError("rates must be positive")
        if self.failure_rate_policy is None:
            object.__setattr__(self, "failure_rate_policy", lambda i: i * self.failure_rate)
        if self.repair_rate_policy is None:
            object.__setattr__(self, "repair_rate_policy", lambda i: self.repair_rate)

    def lam(self, i: int) -> float:
        return self.failure_rate_policy(i)

    def mu(self, i: int) -> float:
        return self.repair_rate_policy(i)


def build_generator(model: BirthDeathModel) -> np.ndarray:
    """Tridiagonal generator Q over states {0..N}; every row sums to zero."""
    n = model.n_boards
    q = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        lam = model.lam(i) if i > 0 else 0.0  # no boards left to fail
        mu = model.mu(i) if i < n else 0.0  # all boards up, nothing to repair
        if lam < 0 or mu < 0:
            raise ValueError("rate policies must be non-negative")
        if i > 0:
            q[i, i - 1] = lam
        if i < n:
            q[i, i + 1] = mu
        q[i, i] = -(lam + mu)
    return q


def steady_state_closed_form(model: BirthDeathModel) -> np.ndarray:
    """Birth-death solution: pi_k = pi_0 * prod_{i=1..k} mu_{i-1} / lam_i.

    Product terms are accumulated in log space so large N or extreme rate
    ratios cannot overflow.
    """
    n = model.n_boards
    log_terms = [0.0]  # k = 0
    acc = 0.0
    for k in range(1, n + 1):
        lam_k = model.lam(k)
        mu_prev = model.mu(k - 1)
        if lam_k <= 0 or mu_prev <= 0:
            raise ValueError("chain must be irreducible (positive birth/death rates)")
        acc += math.log(mu_prev) - math.log(lam_k)
        log_terms.append(acc)
    shift = max(log_terms)
    weights = np.exp(np.asarray(log_terms) - shift)
    return weights / weights.sum()


def steady_state_linear_solve(q: np.ndarray) -> np.ndarray:
    """Solve pi @ Q = 0 with sum(pi) = 1 by replacing one equation with the
    normalization row."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("generator must be square")
    if not np.allclose(q.sum(axis=1), 0.0, atol=1e-9 * max(1.0, np.abs(q).max())):
        raise ValueError("generator rows must sum to zero")
    n = q.shape[0]
    a = q.T.copy()
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("generator is singular/reducible") from exc
    if np.any(pi < -1e-9):
        raise ValueError("generator is reducible: negative stationary mass")
    return pi


def failure_probability(model: BirthDeathModel) -> float:
    """pi_0: steady-state probability that every board is down."""
    return float(steady_state_closed_form(model)[0])


def failure_probability_table(
    failure_rate: float = DEFAULT_FAILURE_RATE,
    repair_rate: float = DEFAULT_REPAIR_RATE,
    n_max: int = 4,
) -> list[tuple[int, float]]:
    """(N, pi_0) rows for N = 1..n_max under the default policies."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    return [
        (n, failure_probability(BirthDeathModel(n, failure_rate, repair_rate)))
        for n in range(1, n_max + 1)
    ]


def mttf_non_repairable(n_boards: int, failure_rate: float = DEFAULT_FAILURE_RATE) -> float:
    """Mean time to total failure of the pure-death chain (no repairs):
    sum over k of 1/(k*l)."""
    if n_boards < 1 or failure_rate <= 0:
        raise ValueError("need n >= 1 and a positive failure rate")
    return sum(1.0 / (k * failure_rate) for k in range(1, n_boards + 1))
