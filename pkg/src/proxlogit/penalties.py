"""Sparsity penalties and their scaled proximal operators.

Four separable regularizers: the l1 norm, SCAD, MCP, and the capped l1 norm.
Each provides a value g(beta) = sum_i g(beta_i) and the proximal map

    prox(t) = argmin_w  (L/2) (w - t)^2 + g(w).

The l1 prox is the soft-threshold in closed form.  For the nonconvex
penalties the prox is evaluated by candidate enumeration: the stationary
point of every quadratic branch of the prox objective that falls inside its
branch's region, together with the region boundaries, 0, and t itself.  g is
piecewise quadratic, so the global minimizer is always in this set; ties are
broken toward the candidate of smaller magnitude.  A brute-force grid oracle
is included for verification.
"""

from __future__ import annotations

import dataclasses

import numpy as np

__all__ = [
    "CAPPED_L1",
    "KINDS",
    "L1",
    "MCP",
    "Penalty",
    "SCAD",
    "penalty_value",
    "prox_oracle",
    "prox_scalar",
    "prox_vector",
]

L1 = "l1"
SCAD = "scad"
MCP = "mcp"
CAPPED_L1 = "capped_l1"
KINDS = (L1, SCAD, MCP, CAPPED_L1)

# Below this, a branch of the prox objective is treated as linear and its
# stationary point is skipped (the branch minimum is then at a boundary).
_DEGENERATE = 1e-12


@dataclasses.dataclass(frozen=True)
class Penalty:
    """A tagged regularizer with weight ``lam`` and shape parameters.

    ``theta`` is the SCAD (> 2) or MCP (> 1) shape; ``epsilon`` is the capped
    l1 cap (> 0).  Unused parameters are left at 0.
    """

    kind: str
    lam: float
    theta: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}; expected one of {KINDS}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.kind == SCAD and not self.theta > 2:
            raise ValueError(f"SCAD requires theta > 2, got {self.theta}")
        if self.kind == MCP and not self.theta > 1:
            raise ValueError(f"MCP requires theta > 1, got {self.theta}")
        if self.kind == CAPPED_L1 and not self.epsilon > 0:
            raise ValueError(f"capped l1 requires epsilon > 0, got {self.epsilon}")

    @staticmethod
    def l1(lam: float) -> "Penalty":
        return Penalty(L1, lam)

    @staticmethod
    def scad(lam: float, theta: float = 3.7) -> "Penalty":
        return Penalty(SCAD, lam, theta=theta)

    @staticmethod
    def mcp(lam: float, theta: float = 3.0) -> "Penalty":
        return Penalty(MCP, lam, theta=theta)

    @staticmethod
    def capped_l1(lam: float, epsilon: float | None = None) -> "Penalty":
        return Penalty(CAPPED_L1, lam, epsilon=0.5 * lam if epsilon is None else epsilon)


def _g_abs(a: np.ndarray, pen: Penalty) -> np.ndarray:
    """Elementwise penalty of magnitudes a >= 0."""
    lam = pen.lam
    if pen.kind == L1:
        return lam * a
    if pen.kind == CAPPED_L1:
        return lam * np.minimum(a, pen.epsilon)
    th = pen.theta
    if pen.kind == SCAD:
        return np.where(
            a <= lam,
            lam * a,
            np.where(
                a <= th * lam,
                (-(a ** 2) + 2.0 * th * lam * a - lam ** 2) / (2.0 * (th - 1.0)),
                (th + 1.0) * lam ** 2 / 2.0,
            ),
        )
    # MCP
    return np.where(a <= th * lam, lam * a - a ** 2 / (2.0 * th), th * lam ** 2 / 2.0)


def penalty_value(beta, pen: Penalty) -> float:
    """Total penalty sum_i g(beta_i); nonnegative, zero at the origin."""
    a = np.abs(np.asarray(beta, dtype=np.float64))
    return float(np.sum(_g_abs(a, pen)))


def _check_L(L: float) -> float:
    L = float(L)
    if not L > 0:
        raise ValueError(f"prox scale L must be positive, got {L}")
    return L


def _prox_magnitudes(t: np.ndarray, pen: Penalty, L: float) -> np.ndarray:
    """Prox of nonnegative magnitudes t; the result is also nonnegative."""
    lam = pen.lam
    if pen.kind == L1:
        return np.maximum(t - lam / L, 0.0)

    ones = np.ones_like(t)
    always = np.ones_like(t, dtype=bool)
    cands = [np.zeros_like(t), t]
    valid = [always, always]

    if pen.kind == SCAD:
        th = pen.theta
        cands += [lam * ones, th * lam * ones]
        valid += [always, always]
        c_inner = t - lam / L
        cands.append(c_inner)
        valid.append((c_inner >= 0.0) & (c_inner <= lam))
        denom = L * (th - 1.0) - 1.0
        if abs(denom) > _DEGENERATE:
            c_mid = (L * (th - 1.0) * t - th * lam) / denom
            cands.append(c_mid)
            valid.append((c_mid >= lam) & (c_mid <= th * lam))
    elif pen.kind == MCP:
        th = pen.theta
        cands.append(th * lam * ones)
        valid.append(always)
        denom = L - 1.0 / th
        if abs(denom) > _DEGENERATE:
            c_inner = (L * t - lam) / denom
            cands.append(c_inner)
            valid.append((c_inner >= 0.0) & (c_inner <= th * lam))
    else:  # capped l1
        eps = pen.epsilon
        cands.append(eps * ones)
        valid.append(always)
        c_inner = t - lam / L
        cands.append(c_inner)
        valid.append((c_inner >= 0.0) & (c_inner <= eps))

    W = np.stack(cands)
    mask = np.stack(valid)
    obj = np.where(mask, 0.5 * L * (W - t) ** 2 + _g_abs(np.maximum(W, 0.0), pen), np.inf)
    best = obj.min(axis=0)
    # Ties resolve to the smallest magnitude (occur at exact region boundaries).
    tied = np.where(obj == best, W, np.inf)
    return tied.min(axis=0)


def prox_vector(u, pen: Penalty, L: float) -> np.ndarray:
    """Coordinatewise proximal map of u at scale L."""
    L = _check_L(L)
    u = np.asarray(u, dtype=np.float64)
    w = _prox_magnitudes(np.abs(u), pen, L)
    return np.where(w == 0.0, 0.0, np.copysign(w, u))


def prox_scalar(t: float, pen: Penalty, L: float) -> float:
    """Proximal map of a single coordinate; sign-symmetric in t."""
    return float(prox_vector(np.array([t]), pen, L)[0])


def prox_oracle(t: float, pen: Penalty, L: float, grid_step: float = 1e-4) -> float:
    """Exhaustive grid minimization of the prox objective over [-|t|-1, |t|+1].

    Verification-only; accurate to roughly the grid step.
    """
    L = _check_L(L)
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    hi = abs(float(t)) + 1.0
    grid = np.arange(-hi, hi + grid_step, grid_step)
    obj = 0.5 * L * (grid - t) ** 2 + _g_abs(np.abs(grid), pen)
    return float(grid[int(np.argmin(obj))])
