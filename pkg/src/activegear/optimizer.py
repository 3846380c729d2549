"""Basic Bees Algorithm with per-site shrinking patches.

One iteration ranks the population, recruits foragers around the best
``n_selected`` sites (more around the ``n_elite`` best), keeps the fittest
bee of each site, and refills the rest of the population with random scouts.
All random draws of an iteration are taken before its evaluations are
dispatched, so results do not depend on how evaluations are parallelized.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class BeesConfig:
    n_scouts: int = 200
    n_selected: int = 30
    n_elite: int = 8
    recruits_elite: int = 16
    recruits_other: int = 7
    patch_fraction: float = 0.01
    max_iterations: int = 100
    shrink_factor: float = 0.95
    rng_seed: int = 0

    def __post_init__(self):
        if not (1 <= self.n_elite <= self.n_selected <= self.n_scouts):
            raise ValueError("need 1 <= n_elite <= n_selected <= n_scouts")
        if not (self.recruits_elite >= self.recruits_other >= 1):
            raise ValueError("need recruits_elite >= recruits_other >= 1")
        if not 0 < self.patch_fraction <= 1:
            raise ValueError("patch_fraction must lie in (0, 1]")
        if not 0 < self.shrink_factor <= 1:
            raise ValueError("shrink_factor must lie in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    @property
    def evaluations_per_iteration(self) -> int:
        """Objective calls in every iteration after the first."""
        return (self.n_elite * self.recruits_elite
                + (self.n_selected - self.n_elite) * self.recruits_other
                + (self.n_scouts - self.n_selected))


@dataclass(frozen=True)
class SearchSpace:
    names: Tuple[str, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if not (len(self.names) == len(self.lower) == len(self.upper)) or not self.names:
            raise ValueError("search space needs matching, non-empty names/lower/upper")
        for n, lo, hi in zip(self.names, self.lower, self.upper):
            # lower == upper pins a variable.
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"bad bounds for {n}: [{lo}, {hi}]")

    @classmethod
    def box(cls, dim: int, low: float, high: float) -> "SearchSpace":
        return cls(tuple(f"x{i}" for i in range(dim)), (low,) * dim, (high,) * dim)

    @property
    def dim(self) -> int:
        return len(self.names)

    def bounds(self):
        return np.array(self.lower), np.array(self.upper)

    def clamp(self, x) -> np.ndarray:
        lo, hi = self.bounds()
        return np.minimum(np.maximum(np.asarray(x, dtype=float), lo), hi)


@dataclass
class Candidate:
    position: np.ndarray
    fitness: float = math.inf
    evaluated: bool = False


@dataclass
class BeesResult:
    best: Candidate
    history: List[float] = field(default_factory=list)
    mean_history: List[float] = field(default_factory=list)
    evaluations: List[int] = field(default_factory=list)

    def write_convergence_csv(self, path):
        with open(path, "w", newline="") as fh:
            write_convergence(fh, self)


def write_convergence(fh, result: BeesResult):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["iteration", "best_fitness", "mean_fitness"])
    for i, (b, m) in enumerate(zip(result.history, result.mean_history), start=1):
        w.writerow([i, format(b, ".17g"), format(m, ".17g")])


def neighborhood_sample(center, patch, space: SearchSpace, rng: np.random.Generator) -> Candidate:
    """Uniform draw in ``center +/- patch``, clamped to the search bounds."""
    c = center.position if isinstance(center, Candidate) else np.asarray(center, dtype=float)
    patch = np.broadcast_to(np.asarray(patch, dtype=float), c.shape)
    u = rng.uniform(-1.0, 1.0, size=c.shape)
    return Candidate(space.clamp(c + u * patch))


def _scouts(space: SearchSpace, count: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = space.bounds()
    return lo + rng.random((count, space.dim)) * (hi - lo)


def _evaluate(objective, positions: np.ndarray, workers: int) -> np.ndarray:
    rows = list(positions)
    if workers > 1 and len(rows) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(objective, rows))
    else:
        values = [objective(r) for r in rows]
    out = np.array(values, dtype=float)
    out[np.isnan(out)] = math.inf
    return out


def _finite_mean(f: np.ndarray) -> float:
    ok = np.isfinite(f)
    return float(np.mean(f[ok])) if ok.any() else math.inf


def bees_optimize(objective: Callable[[np.ndarray], float], space: SearchSpace,
                  cfg: BeesConfig, seeds: Sequence[Sequence[float]] = (),
                  workers: int = 1,
                  callback: Optional[Callable[[int, Candidate], None]] = None) -> BeesResult:
    """Minimize ``objective`` over ``space``.

    ``seeds`` are positions placed in the initial population ahead of the
    random scouts (clamped into bounds).  Iteration 1 evaluates the initial
    ``n_scouts`` bees; each later iteration performs one recruit/select/
    re-scout cycle.
    """
    if not isinstance(space, SearchSpace) or not isinstance(cfg, BeesConfig):
        raise TypeError("bees_optimize expects a SearchSpace and a BeesConfig")
    seeds = [np.asarray(s, dtype=float) for s in seeds]
    if any(s.shape != (space.dim,) for s in seeds):
        raise ValueError(f"seed positions must have {space.dim} entries")
    seeds = [space.clamp(s) for s in seeds]
    if len(seeds) > cfg.n_scouts:
        raise ValueError("more seeds than scouts")

    rng = np.random.default_rng(cfg.rng_seed)
    lo, hi = space.bounds()
    initial_patch = cfg.patch_fraction * (hi - lo)

    pos = _scouts(space, cfg.n_scouts, rng)
    for i, s in enumerate(seeds):
        pos[i] = s
    fit = _evaluate(objective, pos, workers)
    patch = np.tile(initial_patch, (cfg.n_scouts, 1))

    result = BeesResult(best=Candidate(pos[0].copy()))
    evals = [cfg.n_scouts]

    def record():
        # Stable argsort: earlier-generated bee wins ties.
        order = np.argsort(fit, kind="stable")
        b = order[0]
        if fit[b] < result.best.fitness or not result.best.evaluated:
            result.best = Candidate(pos[b].copy(), float(fit[b]), True)
        result.history.append(result.best.fitness)
        result.mean_history.append(_finite_mean(fit))
        if callback is not None:
            callback(len(result.history), result.best)
        return order

    order = record()
    m, e = cfg.n_selected, cfg.n_elite
    for _ in range(1, cfg.max_iterations):
        sites = order[:m]
        counts = [cfg.recruits_elite if j < e else cfg.recruits_other for j in range(m)]

        recruits = []
        for site, count in zip(sites, counts):
            for _k in range(count):
                recruits.append(neighborhood_sample(pos[site], patch[site], space, rng).position)
        recruits = np.array(recruits)
        fresh = _scouts(space, cfg.n_scouts - m, rng)

        values = _evaluate(objective, np.vstack([recruits, fresh]) if len(fresh) else recruits, workers)
        r_fit, s_fit = values[:len(recruits)], values[len(recruits):]
        evals.append(len(values))

        new_pos = np.empty_like(pos)
        new_fit = np.empty_like(fit)
        new_patch = np.empty_like(patch)
        start = 0
        for j, (site, count) in enumerate(zip(sites, counts)):
            block = r_fit[start:start + count]
            k = int(np.argmin(block))
            if block[k] < fit[site]:
                new_pos[j], new_fit[j] = recruits[start + k], block[k]
                new_patch[j] = patch[site]
            else:
                new_pos[j], new_fit[j] = pos[site], fit[site]
                new_patch[j] = patch[site] * cfg.shrink_factor
            start += count
        new_pos[m:] = fresh
        new_fit[m:] = s_fit
        new_patch[m:] = initial_patch
        pos, fit, patch = new_pos, new_fit, new_patch
        order = record()

    result.evaluations = evals
    return result
