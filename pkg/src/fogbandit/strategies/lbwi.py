"""Two-phase Lipschitz bandit over the discretized action interval.

Phase I quantizes [0, 1] into N coarse intervals and pulls each exactly A
times (a fresh random sweep order every N rounds keeps the counts exact
while the visit order stays random). The per-interval average utilities
give a Lipschitz estimate, which sets the refined interval count for
Phase II; exponential weights are maintained throughout and either carried
over into the refinement (initialized variant) or reset to uniform (plain
variant). Phase II is a standard exponential-weights bandit over the
refined intervals.

Rewards entering the weights are the observed utilities affinely mapped to
[0, 1] using the closed-form utility envelope of the game; the raw average
utilities used for the Lipschitz estimate are kept unnormalized.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import FeedbackError, ProtocolError
from ..game import utility_range
from .exp3 import lipschitz_estimate, phase2_intervals, redistribute_weights

DEFAULT_INTERVALS = 10
DEFAULT_GAMMA = 0.05
DEFAULT_PHASE1_FRACTION = 0.1


def default_pulls_per_interval(T: int, N: int,
                               fraction: float = DEFAULT_PHASE1_FRACTION) -> int:
    """Pulls per coarse interval so Phase I takes about `fraction` of the
    horizon."""
    return max(1, math.ceil(fraction * T / N))


class LbwiBank:
    """All K x M independent interval learners of one game."""

    feedback_kind = "bandit"

    def __init__(self, spec, T: int, rng, N: int = DEFAULT_INTERVALS,
                 gamma: float = DEFAULT_GAMMA, pulls_per_interval=None,
                 with_init: bool = True):
        self.K, self.M = spec.K, spec.M
        self.T = T
        self.N = N
        self.gamma = gamma
        self.A = pulls_per_interval or default_pulls_per_interval(T, N)
        self.T1 = min(self.A * N, T)
        self.with_init = with_init
        self.rng = rng
        self.u_lo, self.u_hi = utility_range(spec)

        shape = (self.K, self.M)
        self.mu_hat = np.zeros(shape + (N,))
        self.counts = np.zeros(shape + (N,), dtype=int)
        self.weights = np.ones(shape + (N,))
        self.n_arms = np.full(shape, N, dtype=int)   # per-learner arm count
        self.l_hat = None
        self.l_tilde = None
        self.t = 1
        self._sweep = None
        self._arm = None
        self._prob = None

    # -- helpers ----------------------------------------------------------

    def _normalize(self, observed):
        return np.clip((observed - self.u_lo) / (self.u_hi - self.u_lo), 0.0, 1.0)

    def _mask(self):
        return np.arange(self.weights.shape[-1])[None, None, :] < self.n_arms[..., None]

    def _probs(self):
        """Mixing distribution per learner over its own (padded) arm axis."""
        mask = self._mask()
        w = np.where(mask, self.weights, 0.0)
        total = w.sum(axis=-1, keepdims=True)
        p = (1.0 - self.gamma) * w / total + self.gamma / self.n_arms[..., None]
        return np.where(mask, p, 0.0)

    # -- act / observe ----------------------------------------------------

    def act(self) -> np.ndarray:
        p = self._probs()
        if self.t <= self.T1:
            j = (self.t - 1) % self.N
            if j == 0:
                self._sweep = np.argsort(self.rng.random((self.K, self.M, self.N)),
                                         axis=-1)
            arm = self._sweep[:, :, j]
        else:
            draw = self.rng.random((self.K, self.M))
            arm = np.minimum((draw[..., None] > p.cumsum(axis=-1)).sum(axis=-1),
                             self.n_arms - 1)
        self._arm = arm
        self._prob = np.take_along_axis(p, arm[..., None], -1)[..., 0]
        return (arm + self.rng.random((self.K, self.M))) / self.n_arms

    def observe(self, observed: np.ndarray) -> None:
        if self._arm is None:
            raise ProtocolError("observe called without a preceding act")
        if not np.all(np.isfinite(observed)):
            raise FeedbackError("observed utilities must be finite")
        arm = self._arm[..., None]
        in_phase1 = self.t <= self.T1
        if in_phase1:
            c0 = np.take_along_axis(self.counts, arm, -1)
            m0 = np.take_along_axis(self.mu_hat, arm, -1)
            np.put_along_axis(self.mu_hat, arm,
                              (m0 * c0 + observed[..., None]) / (c0 + 1), -1)
            np.put_along_axis(self.counts, arm, c0 + 1, -1)
        reward = self._normalize(observed)
        w0 = np.take_along_axis(self.weights, arm, -1)[..., 0]
        mult = np.exp(self.gamma * reward / (self.n_arms * self._prob))
        np.put_along_axis(self.weights, arm, (w0 * mult)[..., None], -1)
        self.weights /= self.weights.max(axis=-1, keepdims=True)
        if in_phase1 and self.t == self.T1:
            self._refine()
        self.t += 1
        self._arm = None
        self._prob = None

    def _refine(self) -> None:
        """End of Phase I: estimate the Lipschitz constant, pick the refined
        interval counts and build the Phase-II weights."""
        self.l_hat, self.l_tilde = lipschitz_estimate(self.mu_hat, self.N,
                                                      self.A, self.T)
        n_tilde = phase2_intervals(self.N, self.l_tilde, self.T)
        fine = np.zeros((self.K, self.M, int(n_tilde.max())))
        for k in range(self.K):
            for m in range(self.M):
                n = int(n_tilde[k, m])
                if self.with_init:
                    fine[k, m, :n] = redistribute_weights(self.weights[k, m],
                                                          self.N, n)
                else:
                    fine[k, m, :n] = 1.0
        self.n_arms = n_tilde
        self.weights = fine / fine.max(axis=-1, keepdims=True)


class LbwiLearner:
    """Single (node, task) interval learner: a 1 x 1 bank behind the scalar
    act/observe surface used by the engine protocol tests."""

    def __init__(self, spec, T, rng, **kwargs):
        if spec.K != 1 or spec.M != 1:
            raise ValueError("LbwiLearner is the single-learner view; use LbwiBank")
        self._bank = LbwiBank(spec, T, rng, **kwargs)

    @property
    def phase(self) -> str:
        return "explore" if self._bank.t <= self._bank.T1 else "exploit"

    def act(self) -> float:
        return float(self._bank.act()[0, 0])

    def observe(self, utility: float) -> None:
        self._bank.observe(np.array([[utility]],
                                    dtype=float))


def lbwi_step(learner, observed_utility, rng=None):
    """One protocol step: fold in the previous round's feedback (None on the
    first call), then emit the next action."""
    if observed_utility is not None:
        learner.observe(observed_utility)
    return learner.act(), learner
