"""Task-allocation game: data model and closed-form math.

K fog nodes request fractions of M tasks. Requests are turned into shares
by proportional allocation with a small barrier constant in the denominator,
and each node's per-task utility is

    completion reward + power term - reservation cost
    = rho*(1 - exp(-x/(rho*(S + barrier)))) + eps*S - kappa*x

where x is the node's own request, S is the column sum of all requests and
(rho, eps, kappa) are that node's per-task indices. Utilities are additive
over tasks. Everything in this module is a pure function of its inputs.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Convexity of the utility in the other nodes' actions is only guaranteed
# for efficiency indices above this threshold; lower values get a warning.
RHO_CONVEXITY_THRESHOLD = 0.5


def _as_index_matrix(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ConfigurationError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    if np.any(m <= 0.0) or np.any(m > 1.0):
        raise ConfigurationError(f"{name} entries must lie in (0, 1]")
    return m


@dataclass
class GameSpec:
    """Parameterization of one task-allocation game.

    rho, eps, kappa are K x M matrices of efficiency, power-consumption and
    cost indices, all in (0, 1]. `barrier` is the constant added to every
    allocation denominator; `noise_std` the std of the Gaussian feedback
    noise added per (node, task) observation.
    """

    rho: np.ndarray
    eps: np.ndarray
    kappa: np.ndarray
    barrier: float = 1e-6
    noise_std: float = 0.01

    def __post_init__(self):
        self.rho = _as_index_matrix(self.rho, "rho")
        self.eps = _as_index_matrix(self.eps, "eps")
        self.kappa = _as_index_matrix(self.kappa, "kappa")
        if self.eps.shape != self.rho.shape or self.kappa.shape != self.rho.shape:
            raise ConfigurationError(
                f"index matrices disagree in shape: rho {self.rho.shape}, "
                f"eps {self.eps.shape}, kappa {self.kappa.shape}"
            )
        self.barrier = float(self.barrier)
        self.noise_std = float(self.noise_std)
        if self.barrier <= 0.0:
            raise ConfigurationError("barrier must be > 0")
        if self.noise_std < 0.0:
            raise ConfigurationError("noise_std must be >= 0")
        low = self.rho <= RHO_CONVEXITY_THRESHOLD
        if np.any(low):
            ks, ms = np.nonzero(low)
            warnings.warn(
                f"rho <= {RHO_CONVEXITY_THRESHOLD} at (node, task) pairs "
                f"{list(zip(ks.tolist(), ms.tolist()))}: convexity in others' "
                "actions is not guaranteed there",
                stacklevel=2,
            )

    @property
    def K(self) -> int:
        return self.rho.shape[0]

    @property
    def M(self) -> int:
        return self.rho.shape[1]

    def to_json(self) -> str:
        doc = {
            "K": self.K,
            "M": self.M,
            "rho": self.rho.tolist(),
            "eps": self.eps.tolist(),
            "kappa": self.kappa.tolist(),
            "barrier": self.barrier,
            "noise_std": self.noise_std,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GameSpec":
        doc = json.loads(text)
        spec = cls(
            rho=doc["rho"],
            eps=doc["eps"],
            kappa=doc["kappa"],
            barrier=doc.get("barrier", 1e-6),
            noise_std=doc.get("noise_std", 0.01),
        )
        for key in ("K", "M"):
            if key in doc and doc[key] != getattr(spec, key):
                raise ConfigurationError(
                    f"declared {key}={doc[key]} does not match matrix shape"
                )
        return spec

    def replace(self, **kwargs) -> "GameSpec":
        base = dict(rho=self.rho, eps=self.eps, kappa=self.kappa,
                    barrier=self.barrier, noise_std=self.noise_std)
        base.update(kwargs)
        return GameSpec(**base)


@dataclass
class Bounds:
    """Grid-estimated bounds on the per-task utility: Lipschitz constant L,
    utility magnitude U and curvature magnitude H (all include a 1.1 safety
    factor over the empirical grid maxima)."""

    L: float
    U: float
    H: float
    grid_resolution: int = field(default=0, compare=False)

    def __post_init__(self):
        if not (self.L > 0 and self.U > 0 and self.H > 0):
            raise ConfigurationError(f"bounds must be strictly positive, got {self}")


def check_profile(x, spec: GameSpec) -> np.ndarray:
    """Validate a joint action profile against a spec; returns it as ndarray."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.K, spec.M):
        raise ConfigurationError(
            f"action profile shape {x.shape} does not match game ({spec.K}, {spec.M})"
        )
    if np.any(x < 0.0) or np.any(x > 1.0) or not np.all(np.isfinite(x)):
        raise ValueError("action fractions must lie in [0, 1]")
    return x


def allocate(x, spec: GameSpec) -> np.ndarray:
    """Proportional allocation: share = request / (column sum + barrier).

    A column of all-zero requests yields all-zero shares (automatic under
    the barrier).
    """
    x = check_profile(x, spec)
    col = x.sum(axis=0)
    return x / (col + spec.barrier)[None, :]


def completion_reward(share: float, rho: float) -> float:
    """Risk-averse reward rho*(1 - exp(-share/rho)) for an allocated share."""
    return rho * (1.0 - math.exp(-share / rho))


def task_utility(x_own: float, x_others_sum: float, rho: float, eps: float,
                 kappa: float, barrier: float) -> float:
    """Per-task utility of one node given its own request and the sum of the
    other nodes' requests for the same task."""
    s = x_own + x_others_sum + barrier
    return (rho * (1.0 - math.exp(-x_own / (rho * s)))
            + eps * (x_own + x_others_sum) - kappa * x_own)


def total_utility(k: int, x, spec: GameSpec) -> float:
    """Node k's utility at profile x: the sum of its per-task utilities,
    accumulated in task order (fixed evaluation order)."""
    x = check_profile(x, spec)
    if not 0 <= k < spec.K:
        raise IndexError(f"node index {k} out of range for K={spec.K}")
    col = x.sum(axis=0)
    total = 0.0
    for m in range(spec.M):
        total += task_utility(x[k, m], col[m] - x[k, m], spec.rho[k, m],
                              spec.eps[k, m], spec.kappa[k, m], spec.barrier)
    return total


def task_gradient(x_own: float, x_others_sum: float, rho: float, eps: float,
                  kappa: float, barrier: float) -> float:
    """d(task_utility)/d(x_own); the barrier makes it total on [0,1]^2."""
    s = x_own + x_others_sum + barrier
    return ((x_others_sum + barrier) * math.exp(-x_own / (rho * s)) / (s * s)
            + eps - kappa)


def utility_gradient(k: int, x, spec: GameSpec) -> np.ndarray:
    """Gradient of node k's utility in its own action row (length M)."""
    x = check_profile(x, spec)
    if not 0 <= k < spec.K:
        raise IndexError(f"node index {k} out of range for K={spec.K}")
    col = x.sum(axis=0)
    return np.array([
        task_gradient(x[k, m], col[m] - x[k, m], spec.rho[k, m],
                      spec.eps[k, m], spec.kappa[k, m], spec.barrier)
        for m in range(spec.M)
    ])


def hessian_own(k: int, m: int, x, spec: GameSpec) -> float:
    """Second derivative of node k's task-m utility in its own action;
    non-positive everywhere (the utility is concave in the own action)."""
    x = check_profile(x, spec)
    xo = x.sum(axis=0)[m] - x[k, m]
    s = x[k, m] + xo + spec.barrier
    rho = spec.rho[k, m]
    return -math.exp(-x[k, m] / (rho * s)) * (2.0 * xo / s**3 + xo * xo / (rho * s**4))


def hessian_others(k: int, m: int, x, spec: GameSpec) -> float:
    """Curvature of node k's task-m utility in the other nodes' summed
    action; non-negative whenever rho > 0.5 (convexity in others)."""
    x = check_profile(x, spec)
    xkm = x[k, m]
    xo = x.sum(axis=0)[m] - xkm
    s = xkm + xo + spec.barrier
    rho = spec.rho[k, m]
    return (math.exp(-xkm / (rho * s))
            * (2.0 * xkm * xo + (2.0 * rho - 1.0) * xkm * xkm) / (rho * s**4))


def dsc_gap(x0, x1, spec: GameSpec) -> float:
    """Rosen diagonal-strict-concavity certificate with all-ones weights:
    the inner product (x1 - x0) . (grad(x1) - grad(x0)), summed over every
    (node, task) own-action coordinate. Strictly negative for every distinct
    pair certifies equilibrium uniqueness.
    """
    x0 = check_profile(x0, spec)
    x1 = check_profile(x1, spec)
    if np.array_equal(x0, x1):
        raise ValueError("profiles are identical; the certificate needs a distinct pair")
    g0 = gradient_matrix(x0, spec)
    g1 = gradient_matrix(x1, spec)
    return float(((x1 - x0) * (g1 - g0)).sum())


# ---------------------------------------------------------------------------
# Vectorized forms used by the round loop and solvers. Same formulas as the
# scalar functions above, evaluated on whole K x M profiles at once.
# ---------------------------------------------------------------------------

def utility_matrix(x: np.ndarray, spec: GameSpec) -> np.ndarray:
    """Per-(node, task) clean utilities at profile x, shape (K, M)."""
    col = x.sum(axis=0)
    s = col[None, :] + spec.barrier
    ex = np.exp(-x / (spec.rho * s))
    return spec.rho * (1.0 - ex) + spec.eps * col[None, :] - spec.kappa * x


def gradient_matrix(x: np.ndarray, spec: GameSpec) -> np.ndarray:
    """Per-(node, task) own-action utility gradients at profile x."""
    col = x.sum(axis=0)
    s = col[None, :] + spec.barrier
    xo = col[None, :] - x
    ex = np.exp(-x / (spec.rho * s))
    return (xo + spec.barrier) * ex / (s * s) + spec.eps - spec.kappa


def estimate_bounds(spec: GameSpec, grid_resolution: int = 100,
                    others_range=None) -> Bounds:
    """Estimate (L, U, H) by scanning a uniform grid of (own action,
    others' sum) pairs for every (node, task) index triple.

    By default the others'-sum axis spans [0.5, K-1]: near-empty columns
    are excluded because their sensitivity is pinned by the barrier
    (gradient magnitude grows like 1/(column sum + barrier) there) rather
    than by the competition the learners actually face. Pass others_range
    to scan a different interval. Results carry a 1.1 safety factor
    against grid undersampling.
    """
    if grid_resolution < 10:
        raise ConfigurationError("grid_resolution must be >= 10")
    G = int(grid_resolution)
    if others_range is None:
        lo, hi = 0.5, max(spec.K - 1.0, 0.5)
    else:
        lo, hi = float(others_range[0]), float(others_range[1])
        if lo < 0 or hi < lo:
            raise ConfigurationError(f"invalid others_range ({lo}, {hi})")
    xg = np.linspace(0.0, 1.0, G)[:, None, None]
    og = np.linspace(lo, hi, G)[None, :, None]
    rho = spec.rho.ravel()[None, None, :]
    eps = spec.eps.ravel()[None, None, :]
    kap = spec.kappa.ravel()[None, None, :]
    d = spec.barrier

    s = xg + og + d
    ex = np.exp(-xg / (rho * s))
    grad = (og + d) * ex / (s * s) + eps - kap
    util = rho * (1.0 - ex) + eps * (xg + og) - kap * xg
    h_own = ex * (2.0 * og / s**3 + og * og / (rho * s**4))
    h_oth = ex * (2.0 * xg * og + (2.0 * rho - 1.0) * xg * xg) / (rho * s**4)

    safety = 1.1
    return Bounds(
        L=safety * float(np.abs(grad).max()),
        U=safety * float(np.abs(util).max()),
        H=safety * float(np.maximum(np.abs(h_own), np.abs(h_oth)).max()),
        grid_resolution=G,
    )


def utility_range(spec: GameSpec) -> tuple[float, float]:
    """Closed-form envelope [u_min, u_max] of the per-task utility: the
    reward term is at most max(rho), the power term at most max(eps)*K and
    the cost at most max(kappa). Used to map rewards affinely into [0, 1]."""
    u_min = -float(spec.kappa.max())
    u_max = float(spec.rho.max() + spec.eps.max() * spec.K)
    return u_min, u_max
