"""Exponential-weight primitives shared by the Lipschitz bandit learners.

All functions operate on the last axis, so the same code serves a single
learner (1-D weight vector) and a whole bank of learners (stacked weights).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError, ProtocolError


def exp3_probs(weights, gamma: float) -> np.ndarray:
    """Mixing distribution (1-gamma) * w / sum(w) + gamma / n over the last
    axis. Every entry is at least gamma / n."""
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise ValueError("weights must be finite and non-negative")
    total = w.sum(axis=-1, keepdims=True)
    if np.any(total <= 0.0):
        raise ValueError("weights sum to zero; distribution undefined")
    n = w.shape[-1]
    return (1.0 - gamma) * w / total + gamma / n


def exp3_update(weights, arm: int, reward: float, prob: float, gamma: float,
                count: int) -> np.ndarray:
    """Multiply the played arm's weight by exp(gamma * reward / (count * prob)),
    then rescale all weights by their maximum (which leaves exp3_probs
    unchanged and keeps the weights away from overflow)."""
    if prob <= 0.0:
        raise ProtocolError(f"played-arm probability must be positive, got {prob}")
    if not 0.0 <= reward <= 1.0:
        raise ValueError(f"reward must be normalized to [0, 1], got {reward}")
    w = np.array(weights, dtype=float)
    w[arm] *= math.exp(gamma * reward / (count * prob))
    return w / w.max()


def lbwi_sample_action(arm: int, interval_count: int, rng) -> float:
    """Uniform draw from the arm's interval [arm/n, (arm+1)/n)."""
    return (arm + rng.random()) / interval_count


def lipschitz_estimate(mu_hat, N: int, A: int, T: int):
    """Estimate the utility's Lipschitz constant from per-interval average
    utilities: the raw estimate is N times the largest difference between
    adjacent intervals, and the inflated estimate adds a confidence margin
    N * sqrt((2/A) * ln(2NT)) for the A observations per interval.

    Works on the last axis; returns (raw, inflated).
    """
    if N < 2:
        raise ConfigurationError("need at least 2 intervals to difference")
    mu = np.asarray(mu_hat, dtype=float)
    l_hat = N * np.abs(np.diff(mu, axis=-1)).max(axis=-1)
    l_tilde = l_hat + N * math.sqrt(2.0 / A * math.log(2.0 * N * T))
    if mu.ndim == 1:
        return float(l_hat), float(l_tilde)
    return l_hat, l_tilde


def phase2_intervals(N: int, l_tilde, T: int):
    """Refined interval count: N * ceil(l_tilde^(2/3) * T^(1/3) / N), always
    a positive multiple of N."""
    lt = np.asarray(l_tilde, dtype=float)
    if np.any(lt <= 0.0) or T <= 0:
        raise ConfigurationError("l_tilde and T must be positive")
    n_tilde = N * np.ceil(lt ** (2.0 / 3.0) * T ** (1.0 / 3.0) / N).astype(int)
    n_tilde = np.maximum(n_tilde, N)
    return int(n_tilde) if np.ndim(l_tilde) == 0 else n_tilde


def redistribute_weights(omega_coarse, N: int, n_tilde: int) -> np.ndarray:
    """Spread N coarse-interval weights over n_tilde refined intervals.

    Refined interval n inherits from parent (n * N) // n_tilde, scaled by
    N / n_tilde so total mass is preserved; each parent gets exactly
    n_tilde / N children, so the heaviest parent's children stay heaviest.
    """
    if n_tilde % N != 0:
        raise ConfigurationError(f"refined count {n_tilde} is not a multiple of {N}")
    coarse = np.asarray(omega_coarse, dtype=float)
    parents = (np.arange(n_tilde) * N) // n_tilde
    return (N / n_tilde) * coarse[parents]
