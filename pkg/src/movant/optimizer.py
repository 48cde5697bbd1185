"""Black-box maximisation of the sum rate over architecture parameters.

Three optimizers share one :class:`Objective` and return :class:`OptResult`:
Bayesian optimisation (:func:`bo_run`), exhaustive grid search and uniform
random search. The latter two also serve as oracles for the first.
"""
from __future__ import annotations

import csv
import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from .channel import build_channel
from .errors import RankDeficient
from .geometry import repair_spacing, validate
from .gp import gp_fit, maximize_ei
from .precoding import sum_rate
from .rng import rng_for

SPACING_PENALTY = 10.0     # score units per wavelength of spacing deficit
GRID_LIMIT = 10 ** 7


@dataclass
class Objective:
    """Function to maximise plus its box bounds."""

    func: Callable[[np.ndarray], float]
    bounds: list
    name: str = "objective"

    def __post_init__(self):
        self.bounds = [(float(lo), float(hi)) for lo, hi in self.bounds]
        for lo, hi in self.bounds:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bad bounds ({lo}, {hi})")

    @property
    def dims(self):
        return len(self.bounds)

    @property
    def lower(self):
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self):
        return np.array([b[1] for b in self.bounds])

    def __call__(self, x) -> float:
        return float(self.func(np.asarray(x, dtype=float)))

    def restricted(self, free: Sequence[int], base) -> "Objective":
        """Objective over the ``free`` coordinates with the rest held at ``base``."""
        free = np.asarray(free, dtype=int)
        base = np.array(base, dtype=float)

        def f(x):
            full = base.copy()
            full[free] = x
            return self.func(full)

        return Objective(f, [self.bounds[i] for i in free], f"{self.name}[sub]")


def sum_rate_objective(spec, scenario, transmit_snr: float, pattern=None) -> Objective:
    """Sum rate of the layout decoded from the parameters.

    Layouts that break the spacing rule are scored by the sum rate of their
    repaired projection (see :func:`~movant.geometry.repair_spacing`) minus
    ``SPACING_PENALTY`` per wavelength of total spacing deficit. Rank
    deficient channels score ``-inf``.
    """
    lam = scenario.wavelength

    def rate(layout):
        try:
            return sum_rate(build_channel(layout, scenario, check=False), transmit_snr).sum_rate
        except RankDeficient:
            return -np.inf

    def f(params):
        layout = spec.decode(params).with_pattern(pattern)
        report = validate(layout)
        if report.ok:
            return rate(layout)
        depth = report.spacing_depth(lam)
        fixed = repair_spacing(layout)
        base = rate(fixed) if validate(fixed).ok else 0.0
        return max(base, 0.0) - SPACING_PENALTY * max(depth, 1e-12)

    return Objective(f, spec.bounds(), f"sum_rate[{spec.kind}]")


@dataclass
class OptResult:
    best_params: np.ndarray
    best_score: float
    trace: np.ndarray           # best-so-far after each evaluation
    scores: np.ndarray          # raw score of each evaluation
    params: np.ndarray          # (evaluations, dims)
    evaluations: int
    seed: Optional[int]
    wall_time: float
    method: str = ""

    @property
    def best_index(self):
        return int(np.argmax(self.scores == self.best_score)) if self.evaluations else -1

    def to_csv(self, path):
        """Write ``eval_index, score, best_so_far, p0, p1, ...``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eval_index", "score", "best_so_far"] + [f"p{i}" for i in range(self.params.shape[1])])
            for i in range(self.evaluations):
                w.writerow([i, f"{self.scores[i]:.9g}", f"{self.trace[i]:.9g}"]
                           + [f"{v:.9g}" for v in self.params[i]])


class _Recorder:
    """Collects evaluations; ties keep the earliest index."""

    def __init__(self, obj):
        self.obj = obj
        self.X, self.y = [], []

    def __call__(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.obj.lower, self.obj.upper)
        s = self.obj(x)
        self.X.append(x)
        self.y.append(s)
        return s

    def result(self, seed, t0, method):
        y = np.array(self.y, dtype=float)
        X = np.array(self.X, dtype=float).reshape(len(self.y), self.obj.dims)
        trace = np.maximum.accumulate(y) if len(y) else y
        i = int(np.argmax(y)) if len(y) else -1
        best = X[i] if len(y) else np.array([])
        return OptResult(best, float(y[i]) if len(y) else -np.inf, trace, y, X, len(y), seed,
                         time.perf_counter() - t0, method)


def latin_hypercube(n: int, dims: int, seed) -> np.ndarray:
    """``n`` points in the unit cube, one per stratum in every dimension."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return qmc.LatinHypercube(d=dims, seed=rng_for(seed, 1)).random(n)


def default_init_count(dims: int, budget: int) -> int:
    return max(1, min(2 * dims, budget // 4))


def bo_run(obj: Objective, budget: int, seed: int = 0, warm_start=(), n_init: Optional[int] = None,
           xi: float = 0.01, n_restarts: int = 8, refit_every: int = 10, hyper_maxiter=(50, 15),
           n_candidates: int = 1024, n_refine: int = 4, local_fraction: float = 0.5) -> OptResult:
    """Maximise ``obj`` with GP-based Bayesian optimisation.

    Warm-start points are evaluated first, then a Latin hypercube design of
    ``n_init`` points, then one EI-maximising point per iteration until
    ``budget`` evaluations are spent. Warm starts count towards the budget.

    Hyperparameters are fully re-fitted (``n_restarts`` random starts) every
    ``refit_every`` iterations; in between a single local search continues
    from the previous optimum.
    """
    t0 = time.perf_counter()
    d = obj.dims
    n_init = default_init_count(d, budget) if n_init is None else n_init
    if budget < n_init:
        raise ValueError(f"budget {budget} smaller than initial design {n_init}")
    rec = _Recorder(obj)
    lo, hi = obj.lower, obj.upper

    for x in warm_start:
        if len(rec.y) >= budget:
            break
        rec(x)
    n_lhs = min(n_init, budget - len(rec.y))
    if n_lhs > 0:
        for u in latin_hypercube(n_lhs, d, seed):
            rec(lo + u * (hi - lo))

    rng = rng_for(seed, 2)
    theta = None
    it = 0
    while len(rec.y) < budget:
        X = np.array(rec.X)
        y = np.array(rec.y)
        finite = np.isfinite(y)
        y_fit = np.where(finite, y, y[finite].min() if finite.any() else 0.0)
        full = theta is None or it % refit_every == 0
        model = gp_fit(X, y_fit, obj.bounds, n_restarts=n_restarts if full else 0,
                       seed=int(rng.integers(2 ** 31)), theta0=theta,
                       maxiter=hyper_maxiter[0] if full else hyper_maxiter[1])
        theta = model.theta
        inc = float(model.standardize(y_fit.max()))
        center = model.X[int(np.argmax(y_fit))]
        u = maximize_ei(model, inc, rng, xi=xi, n_candidates=n_candidates, n_refine=n_refine,
                        center=center, local_fraction=local_fraction)
        rec(lo + u * (hi - lo))
        it += 1
    return rec.result(seed, t0, "bo")


def grid_search(obj: Objective, resolution) -> OptResult:
    """Evaluate every point of a regular grid that includes both bounds."""
    t0 = time.perf_counter()
    res = [int(resolution)] * obj.dims if np.isscalar(resolution) else [int(r) for r in resolution]
    if len(res) != obj.dims:
        raise ValueError("one resolution per dimension")
    if int(np.prod(res, dtype=float)) > GRID_LIMIT:
        raise ValueError(f"grid of {np.prod(res, dtype=float):.3g} points exceeds {GRID_LIMIT}")
    axes = [np.linspace(lo, hi, r) if r > 1 else np.array([lo]) for (lo, hi), r in zip(obj.bounds, res)]
    rec = _Recorder(obj)
    for x in itertools.product(*axes):
        rec(np.array(x))
    return rec.result(None, t0, "grid")


def random_search(obj: Objective, budget: int, seed: int = 0) -> OptResult:
    t0 = time.perf_counter()
    rng = rng_for(seed, 3)
    rec = _Recorder(obj)
    for _ in range(budget):
        rec(rng.uniform(obj.lower, obj.upper))
    return rec.result(seed, t0, "random")


def concat_results(first: OptResult, second: OptResult, embed_first, embed_second) -> OptResult:
    """Join two runs into one trace over a common parameter space.

    ``embed_*`` map each run's parameter rows into the common space.
    """
    scores = np.concatenate([first.scores, second.scores])
    params = np.vstack([embed_first(first.params), embed_second(second.params)])
    trace = np.maximum.accumulate(scores)
    i = int(np.argmax(scores))
    return OptResult(params[i], float(scores[i]), trace, scores, params, len(scores), first.seed,
                     first.wall_time + second.wall_time, f"{first.method}+{second.method}")
