"""Bandit gradient ascent with momentum.

Each (node, task) learner works on the action interval [0, 1] shifted to
[-xi, xi]. Every round it perturbs its running point y by +/- sigma, plays
the perturbed action, and treats (observed utility) * (perturbation sign)
as a one-point estimate of the scaled gradient. A momentum accumulator
smooths the estimates and y follows projected ascent steps nu / sqrt(t) on
the shrunk interval [-(1-alpha)*xi, (1-alpha)*xi], which keeps every played
action inside [0, 1]. Plain bandit gradient descent/ascent is the beta = 0
special case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ConfigurationError, ProtocolError
from ..game import Bounds

DEFAULT_XI = 0.5
DEFAULT_BETA = 0.95
DEFAULT_NU = 0.02


def perturbation_radius(T: int, bounds: Bounds, xi: float) -> tuple[float, float]:
    """Horizon-tuned perturbation radius sigma = T^(-1/4) *
    sqrt(R*U*r / (3*(L*r + U))) with the inner/outer radii r = R = xi, and
    the matching interval-shrink factor alpha = sigma / xi. sigma is clamped
    below xi/2 if the formula exceeds it."""
    if T < 2:
        raise ConfigurationError(f"horizon must be >= 2, got {T}")
    if bounds.L <= 0 or bounds.U <= 0:
        raise ConfigurationError(f"bounds must be positive, got {bounds}")
    if xi <= 0:
        raise ConfigurationError(f"shift must be positive, got {xi}")
    r = xi
    sigma = T ** -0.25 * math.sqrt(r * bounds.U * r / (3.0 * (bounds.L * r + bounds.U)))
    sigma = min(sigma, 0.499 * xi)
    return sigma, sigma / r


@dataclass
class BgamState:
    """Per-(node, task) learner state; see bgam_configure for setup."""

    sigma: float
    alpha: float
    nu: float
    beta: float
    xi: float
    y: float = 0.0
    v: float = 0.0
    t: int = 1
    last_c: Optional[float] = field(default=None, repr=False)


def bgam_configure(T: int, bounds: Bounds, xi: float = DEFAULT_XI,
                   beta: float = DEFAULT_BETA, nu: float = DEFAULT_NU) -> BgamState:
    if not 0.0 <= beta < 1.0:
        raise ConfigurationError(f"momentum coefficient must be in [0, 1), got {beta}")
    sigma, alpha = perturbation_radius(T, bounds, xi)
    return BgamState(sigma=sigma, alpha=alpha, nu=nu, beta=beta, xi=xi)


def bgam_act(state: BgamState, rng) -> float:
    """Draw the perturbation sign, play x = y + sigma*c + xi."""
    c = 1.0 if rng.integers(0, 2) == 1 else -1.0
    state.last_c = c
    return state.y + state.sigma * c + state.xi


def bgam_update(state: BgamState, observed_utility: float) -> BgamState:
    """Fold the one-point gradient estimate into the momentum accumulator
    and take a projected step."""
    if state.last_c is None:
        raise ProtocolError("bgam_update called without a preceding bgam_act")
    g = observed_utility * state.last_c
    state.v = state.beta * state.v + g
    bound = (1.0 - state.alpha) * state.xi
    y = state.y + state.nu / math.sqrt(state.t) * state.v
    state.y = min(max(y, -bound), bound)
    state.t += 1
    state.last_c = None
    return state


class BgamBank:
    """All K x M independent learners of one game, updated as arrays.

    Same per-learner equations as the scalar state machine; one generator
    drives the whole bank (one sign draw per learner per round).
    """

    feedback_kind = "bandit"

    def __init__(self, spec, T: int, bounds: Bounds, rng, xi: float = DEFAULT_XI,
                 beta: float = DEFAULT_BETA, nu: float = DEFAULT_NU):
        if not 0.0 <= beta < 1.0:
            raise ConfigurationError(f"momentum coefficient must be in [0, 1), got {beta}")
        self.sigma, self.alpha = perturbation_radius(T, bounds, xi)
        self.xi = xi
        self.beta = beta
        self.nu = nu
        self.rng = rng
        self.shape = (spec.K, spec.M)
        self.y = np.zeros(self.shape)
        self.v = np.zeros(self.shape)
        self.t = 1
        self._c = None

    def act(self) -> np.ndarray:
        c = self.rng.integers(0, 2, self.shape) * 2.0 - 1.0
        self._c = c
        return self.y + self.sigma * c + self.xi

    def observe(self, observed: np.ndarray) -> None:
        if self._c is None:
            raise ProtocolError("observe called without a preceding act")
        self.v = self.beta * self.v + observed * self._c
        bound = (1.0 - self.alpha) * self.xi
        np.clip(self.y + self.nu / math.sqrt(self.t) * self.v, -bound, bound,
                out=self.y)
        self.t += 1
        self._c = None
