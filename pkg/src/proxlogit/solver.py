"""Proximal-gradient engine for sparse logistic regression.

Five solver variants share one machinery:

* ``ista_bb``       - proximal gradient; each step-size search is seeded by the
                      Barzilai-Borwein curvature estimate, then backtracks.
* ``ista_reverse``  - proximal gradient; every iteration starts from the
                      Lipschitz step and *enlarges* it until the line-search
                      criterion breaks, keeping the last accepted step.
* ``fista_lip``     - accelerated proximal gradient with Nesterov momentum,
                      seeded at the Lipschitz constant; the step scale L is
                      monotone nondecreasing across iterations (l1 only).
* ``ista_vanilla``  - classic backtracking from a caller-chosen L0; L never
                      shrinks (the baseline the seeded variants improve on).
* ``fista_vanilla`` - classic FISTA backtracking from a caller-chosen L0
                      (l1 only).

Two line-search criteria are used.  For the convex l1 penalty a candidate is
accepted when its objective is at most the quadratic upper model around the
anchor; for the nonconvex penalties the sufficient-decrease test
f(candidate) <= f(anchor) - (L/2) ||candidate - anchor||^2 is used, which
directly enforces monotone descent.

A fit is single-threaded and deterministic for a fixed seed, apart from wall
clock readings; concurrent fits may share one immutable dataset.  Dense
matrix-vector products inherit whatever BLAS threading is configured, which
is bitwise-deterministic for a fixed thread count (record it with the run).
"""

from __future__ import annotations

import dataclasses
import math
import time
from typing import NamedTuple, TYPE_CHECKING

import numpy as np

from .logistic import lipschitz_constant, loss_gradient, loss_value
from .penalties import L1, Penalty, penalty_value, prox_vector

if TYPE_CHECKING:
    from .data import Dataset

__all__ = [
    "FitResult",
    "LineSearchError",
    "NNZ_TOL",
    "SolverOptions",
    "Trace",
    "VARIANTS",
    "bb_stepsize",
    "fit",
    "linesearch_convex",
    "linesearch_sufficient_decrease",
    "nonzero_count",
    "objective",
    "prox_step",
    "q_upper",
    "reverse_search",
]

VARIANTS = ("ista_bb", "ista_reverse", "fista_lip", "ista_vanilla", "fista_vanilla")

# Entries at or below this magnitude count as zero when reporting sparsity;
# the proximal maps produce exact zeros, the threshold only guards float dust
# carried in by warm starts.
NNZ_TOL = 1e-10

# The BB seed is clamped to this window around the Lipschitz constant.
_BB_CLAMP = 1e12


def nonzero_count(beta) -> int:
    return int(np.count_nonzero(np.abs(np.asarray(beta)) > NNZ_TOL))


class LineSearchError(RuntimeError):
    """Backtracking exhausted its budget without satisfying the criterion."""

    def __init__(self, message: str, last_L: float):
        super().__init__(message)
        self.last_L = last_L


@dataclasses.dataclass(frozen=True)
class SolverOptions:
    """Configuration for a single fit.

    ``l0`` is the initial step scale; ``None`` derives it from the Lipschitz
    constant of the loss gradient, a positive number fixes it.  ``beta0`` is
    ``"zeros"``, ``"random"`` (normal with variance 1/d, drawn from ``seed``),
    or an explicit start vector.  The run stops when the relative objective
    change drops to ``tol`` or after ``max_iters`` iterations.
    """

    variant: str = "ista_bb"
    eta: float = 2.0
    l0: float | None = None
    max_iters: int = 10_000
    tol: float = 1e-9
    max_backtracks: int = 100
    max_expansions: int = 60
    seed: int = 0
    beta0: str | np.ndarray = "zeros"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if not self.eta > 1:
            raise ValueError(f"eta must exceed 1, got {self.eta}")
        if self.l0 is not None and not self.l0 > 0:
            raise ValueError(f"l0 must be positive, got {self.l0}")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be at least 1")
        if self.max_expansions < 1:
            raise ValueError("max_expansions must be at least 1")
        if isinstance(self.beta0, str) and self.beta0 not in ("zeros", "random"):
            raise ValueError(f"beta0 must be 'zeros', 'random', or a vector, got {self.beta0!r}")


class Trace:
    """Per-iteration solver records plus the starting objective.

    Each completed iteration k appends the objective f(beta_k), the accepted
    step scale L_k, the number of extra line-search trials beyond the first,
    the nonzero count, the cumulative wall time (monotonic clock; excluded
    from reproducibility guarantees), and the squared step length
    ||beta_k - beta_{k-1}||^2 used by stationarity checks.
    """

    def __init__(self, f0: float):
        self.f0 = float(f0)
        self.iterations: list[int] = []
        self.objectives: list[float] = []
        self.step_scales: list[float] = []
        self.backtracks: list[int] = []
        self.nonzeros: list[int] = []
        self.times: list[float] = []
        self.step_sqs: list[float] = []

    def append(self, k: int, f: float, L: float, backtracks: int, nnz: int,
               elapsed: float, step_sq: float) -> None:
        if not np.isfinite(f):
            raise FloatingPointError(f"non-finite objective {f} at iteration {k}")
        if not L > 0:
            raise FloatingPointError(f"nonpositive step scale {L} at iteration {k}")
        self.iterations.append(k)
        self.objectives.append(float(f))
        self.step_scales.append(float(L))
        self.backtracks.append(int(backtracks))
        self.nonzeros.append(int(nnz))
        self.times.append(float(elapsed))
        self.step_sqs.append(float(step_sq))

    def __len__(self) -> int:
        return len(self.iterations)


@dataclasses.dataclass
class FitResult:
    beta: np.ndarray
    converged: bool
    trace: Trace
    final_objective: float

    @property
    def n_iterations(self) -> int:
        return len(self.trace)

    @property
    def nnz(self) -> int:
        return nonzero_count(self.beta)


class LineSearchResult(NamedTuple):
    L: float
    candidate: np.ndarray
    backtracks: int
    objective: float


def objective(beta, data: Dataset, pen: Penalty) -> float:
    """Penalized objective: logistic loss plus penalty."""
    return loss_value(beta, data) + penalty_value(beta, pen)


def prox_step(beta, data: Dataset, pen: Penalty, L: float) -> np.ndarray:
    """One proximal-gradient step from beta at scale L."""
    beta = np.asarray(beta, dtype=np.float64)
    return prox_vector(beta - loss_gradient(beta, data) / L, pen, L)


def q_upper(candidate, anchor, data: Dataset, pen: Penalty, L: float) -> float:
    """Quadratic upper model of the objective at ``candidate`` around ``anchor``.

    l(anchor) + <candidate - anchor, grad l(anchor)> + (L/2) ||candidate - anchor||^2
    + g(candidate).  For L at least the gradient's Lipschitz constant this
    bounds the true objective at any proximal candidate.
    """
    candidate = np.asarray(candidate, dtype=np.float64)
    anchor = np.asarray(anchor, dtype=np.float64)
    diff = candidate - anchor
    return (loss_value(anchor, data)
            + float(diff @ loss_gradient(anchor, data))
            + 0.5 * L * float(diff @ diff)
            + penalty_value(candidate, pen))


def bb_stepsize(delta, v, fallback: float) -> float:
    """Barzilai-Borwein curvature estimate <delta, v> / <delta, delta>.

    ``delta`` is the difference of successive iterates, ``v`` the difference
    of their gradients.  Returns ``fallback`` when the quotient is not a
    positive finite number (possible under nonconvex curvature or a zero
    step).
    """
    delta = np.asarray(delta, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if delta.shape != v.shape:
        raise ValueError(f"shape mismatch: {delta.shape} vs {v.shape}")
    den = float(delta @ delta)
    if den > 0.0:
        quot = float(delta @ v) / den
        if quot > 0.0 and math.isfinite(quot):
            return quot
    return fallback


class _SearchOutcome(NamedTuple):
    L: float
    candidate: np.ndarray
    trials: int          # criterion evaluations beyond the first
    loss: float
    objective: float
    step_sq: float


def _try_candidate(anchor, l_anchor, f_anchor, grad_anchor, data, pen, L,
                   sufficient_decrease: bool):
    cand = prox_vector(anchor - grad_anchor / L, pen, L)
    l_cand = loss_value(cand, data)
    pen_cand = penalty_value(cand, pen)
    f_cand = l_cand + pen_cand
    diff = cand - anchor
    step_sq = float(diff @ diff)
    if sufficient_decrease:
        ok = f_cand <= f_anchor - 0.5 * L * step_sq
    else:
        model = l_anchor + float(diff @ grad_anchor) + 0.5 * L * step_sq + pen_cand
        ok = f_cand <= model
    return ok, cand, l_cand, f_cand, step_sq


def _forward_search(anchor, l_anchor, f_anchor, grad_anchor, data, pen,
                    L_start, eta, max_backtracks, sufficient_decrease) -> _SearchOutcome:
    L = float(L_start)
    for i in range(max_backtracks + 1):
        ok, cand, l_cand, f_cand, step_sq = _try_candidate(
            anchor, l_anchor, f_anchor, grad_anchor, data, pen, L, sufficient_decrease)
        if ok:
            return _SearchOutcome(L, cand, i, l_cand, f_cand, step_sq)
        L *= eta
    raise LineSearchError(
        f"line search failed after {max_backtracks} backtracks (last L = {L / eta:g})",
        last_L=L / eta)


def _reverse_search(anchor, l_anchor, f_anchor, grad_anchor, data, pen,
                    L0, eta, max_expansions, max_backtracks,
                    sufficient_decrease) -> _SearchOutcome:
    accepted: _SearchOutcome | None = None
    for i in range(max_expansions):
        L = L0 / eta ** i
        ok, cand, l_cand, f_cand, step_sq = _try_candidate(
            anchor, l_anchor, f_anchor, grad_anchor, data, pen, L, sufficient_decrease)
        if ok:
            accepted = _SearchOutcome(L, cand, i, l_cand, f_cand, step_sq)
            continue
        if accepted is None:
            # The base step already violates (possible under sufficient
            # decrease); grow forward from L0 instead.
            out = _forward_search(anchor, l_anchor, f_anchor, grad_anchor, data,
                                  pen, L0, eta, max_backtracks, sufficient_decrease)
            return out._replace(trials=out.trials + 1)
        break
    return accepted


def linesearch_convex(anchor, data: Dataset, pen: Penalty, L_start: float,
                      eta: float, max_backtracks: int) -> LineSearchResult:
    """Smallest L = eta^i * L_start whose proximal candidate is below its
    quadratic upper model; returns that L and the candidate."""
    anchor = np.asarray(anchor, dtype=np.float64)
    l_anchor = loss_value(anchor, data)
    f_anchor = l_anchor + penalty_value(anchor, pen)
    grad = loss_gradient(anchor, data)
    out = _forward_search(anchor, l_anchor, f_anchor, grad, data, pen,
                          L_start, eta, max_backtracks, sufficient_decrease=False)
    return LineSearchResult(out.L, out.candidate, out.trials, out.objective)


def linesearch_sufficient_decrease(anchor, data: Dataset, pen: Penalty, L_start: float,
                                   eta: float, max_backtracks: int) -> LineSearchResult:
    """Smallest L = eta^i * L_start whose proximal candidate drops the
    objective by at least (L/2) ||candidate - anchor||^2."""
    anchor = np.asarray(anchor, dtype=np.float64)
    l_anchor = loss_value(anchor, data)
    f_anchor = l_anchor + penalty_value(anchor, pen)
    grad = loss_gradient(anchor, data)
    out = _forward_search(anchor, l_anchor, f_anchor, grad, data, pen,
                          L_start, eta, max_backtracks, sufficient_decrease=True)
    return LineSearchResult(out.L, out.candidate, out.trials, out.objective)


def reverse_search(anchor, data: Dataset, pen: Penalty, L0: float, eta: float,
                   criterion: str = "convex", max_expansions: int = 60,
                   max_backtracks: int = 100) -> LineSearchResult:
    """Enlarge the step from 1/L0 until ``criterion`` breaks; keep the last
    accepted step (the smallest tested L that still satisfied it).

    If even L0 violates the criterion the search falls back to forward
    backtracking from L0; if no violation occurs within ``max_expansions``
    the last tested step is returned.
    """
    if criterion not in ("convex", "sufficient_decrease"):
        raise ValueError(f"unknown criterion {criterion!r}")
    anchor = np.asarray(anchor, dtype=np.float64)
    l_anchor = loss_value(anchor, data)
    f_anchor = l_anchor + penalty_value(anchor, pen)
    grad = loss_gradient(anchor, data)
    out = _reverse_search(anchor, l_anchor, f_anchor, grad, data, pen, L0, eta,
                          max_expansions, max_backtracks,
                          sufficient_decrease=(criterion == "sufficient_decrease"))
    return LineSearchResult(out.L, out.candidate, out.trials, out.objective)


def _fista_t_next(t: float) -> float:
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))


def _initial_beta(opts: SolverOptions, d: int) -> np.ndarray:
    if isinstance(opts.beta0, str):
        if opts.beta0 == "zeros":
            return np.zeros(d)
        rng = np.random.default_rng(opts.seed)
        return rng.normal(0.0, 1.0 / math.sqrt(d), size=d)
    beta0 = np.array(opts.beta0, dtype=np.float64)
    if beta0.shape != (d,):
        raise ValueError(f"beta0 has shape {beta0.shape}, expected ({d},)")
    return beta0


def fit(data: Dataset, pen: Penalty, opts: SolverOptions | None = None) -> FitResult:
    """Run the selected solver variant and return the fitted coefficients.

    The l1 penalty uses the quadratic-upper-model line-search criterion, the
    nonconvex penalties the sufficient-decrease criterion.  Stops when the
    relative objective change falls to ``opts.tol`` (converged) or at
    ``opts.max_iters`` (not converged); the trace records every iteration.
    """
    opts = opts if opts is not None else SolverOptions()
    if opts.variant in ("fista_lip", "fista_vanilla") and pen.kind != L1:
        raise ValueError(f"variant {opts.variant!r} supports only the l1 penalty")

    lip_cache: dict[str, float] = {}

    def lip() -> float:
        if "L" not in lip_cache:
            lip_cache["L"] = lipschitz_constant(data)
        return lip_cache["L"]

    L0 = lip() if opts.l0 is None else float(opts.l0)
    if not L0 > 0:
        raise ValueError("initial step scale is not positive (zero feature matrix?)")

    sufficient = pen.kind != L1
    beta = _initial_beta(opts, data.n_features)
    l_prev = loss_value(beta, data)
    f_prev = l_prev + penalty_value(beta, pen)
    trace = Trace(f0=f_prev)
    converged = False

    # Variant state.
    bb_prev: tuple[np.ndarray, np.ndarray] | None = None  # previous (anchor, gradient)
    L_carry = L0
    w = beta.copy()
    t_momentum = 1.0
    is_fista = opts.variant in ("fista_lip", "fista_vanilla")

    start = time.perf_counter()
    for k in range(1, opts.max_iters + 1):
        if is_fista:
            l_w = loss_value(w, data)
            f_w = l_w + penalty_value(w, pen)
            grad_w = loss_gradient(w, data)
            out = _forward_search(w, l_w, f_w, grad_w, data, pen, L_carry,
                                  opts.eta, opts.max_backtracks, sufficient_decrease=False)
            L_carry = out.L
            diff = out.candidate - beta
            step_sq = float(diff @ diff)
            t_next = _fista_t_next(t_momentum)
            w = out.candidate + ((t_momentum - 1.0) / t_next) * diff
            t_momentum = t_next
            out = out._replace(step_sq=step_sq)
        else:
            grad = loss_gradient(beta, data)
            if opts.variant == "ista_bb":
                if bb_prev is None:
                    seed = L0
                else:
                    seed = bb_stepsize(beta - bb_prev[0], grad - bb_prev[1], fallback=lip())
                    seed = min(max(seed, lip() / _BB_CLAMP), lip() * _BB_CLAMP)
                bb_prev = (beta, grad)
                out = _forward_search(beta, l_prev, f_prev, grad, data, pen, seed,
                                      opts.eta, opts.max_backtracks, sufficient)
            elif opts.variant == "ista_reverse":
                out = _reverse_search(beta, l_prev, f_prev, grad, data, pen, L0,
                                      opts.eta, opts.max_expansions,
                                      opts.max_backtracks, sufficient)
            else:  # ista_vanilla
                out = _forward_search(beta, l_prev, f_prev, grad, data, pen, L_carry,
                                      opts.eta, opts.max_backtracks, sufficient)
                L_carry = out.L

        beta = out.candidate
        trace.append(k, out.objective, out.L, out.trials, nonzero_count(beta),
                     time.perf_counter() - start, out.step_sq)
        if abs(f_prev - out.objective) <= opts.tol * max(1.0, abs(out.objective)):
            converged = True
        l_prev, f_prev = out.loss, out.objective
        if converged:
            break

    return FitResult(beta=beta, converged=converged, trace=trace, final_objective=f_prev)
