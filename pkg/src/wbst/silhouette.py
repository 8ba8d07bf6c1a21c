"""The nested-key refinement process on dyadic paths and its limit.

In the i.i.d. model the ultimate key of the node at dyadic position
``x_1..x_k`` is uniform on the interval spanned by its neighbouring keys, so
the whole family of ultimate labels is generated by recursive interval
splitting: the root key is uniform on (0,1) and a node with key interval
(a, b) draws uniformly on (a, b).  Levels are indexed with the root at level
0; ``keys_along_path`` returns the root key first.

Level increments shrink geometrically: the absolute increment between levels
k-1 and k is, at each of the 2^k level-k nodes, a product of k+1 independent
uniforms, and a union bound gives

    E[ sup_x |level-k key - level-(k-1) key| ] <= 2 (2/3)^(k/2).

The limit evaluation truncates once that bound drops under a tolerance.
Marginal densities use the exact conditional representation
``f_t(x) = E[ 1{Y >= x} / Y ]`` with ``Y`` the level-limit key at ``2t``
(for t <= 1/2; the reflection symmetry covers t > 1/2), so no kernel
bandwidth enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .rng import stream
from .statlab import TestReport, Welford, ks_two_sample
from .tree import DyadicPath, LabelledTree
from .tree import weighted_height as tree_weighted_height

MAX_TABLE_DEPTH = 24
CONTRACTION_BASE = math.sqrt(2.0 / 3.0)
DENSITY_TRUNCATION = 1e-4
DENSITY_CLIP = 1e-12


def increment_bound(k: int) -> float:
    """2 (2/3)^(k/2): mean bound for the level-k sup increment (root = level 0)."""
    return 2.0 * CONTRACTION_BASE**k


def levels_for_tolerance(tol: float, cap: int = 120) -> int:
    """Smallest k with increment_bound(k) < tol, capped."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = math.ceil(math.log(2.0 / tol) / math.log(1.0 / CONTRACTION_BASE))
    return min(max(k, 1), cap)


@dataclass
class KeyTable:
    """Complete table of refinement keys for levels 0..depth-1 (2^depth - 1
    keys, heap order: children of slot i are 2i+1 and 2i+2)."""

    depth: int
    keys: np.ndarray

    def level(self, j: int) -> np.ndarray:
        if not 0 <= j < self.depth:
            raise IndexError("level out of range")
        return self.keys[(1 << j) - 1 : (1 << (j + 1)) - 1]

    def in_order_keys(self) -> np.ndarray:
        """Keys arranged by in-order position; strictly increasing by nesting."""
        out = np.empty(self.keys.size)
        for j in range(self.depth):
            width = 1 << (self.depth - j)  # in-order stride of level j
            pos = np.arange(1 << j) * width + width // 2 - 1
            out[pos] = self.level(j)
        return out

    def evaluate(self, x: float) -> float:
        """Key of the deepest tabulated node on the dyadic path of ``x``."""
        path = DyadicPath.from_value(x, depth=self.depth)
        i = 0
        for j in range(self.depth - 1):
            i = 2 * i + 1 + path.bit(j)
        return float(self.keys[i])


def generate_table(depth: int, seed: int, replicate: int = 0) -> KeyTable:
    """Draw one refinement table to the given depth (memory-guarded)."""
    if not 1 <= depth <= MAX_TABLE_DEPTH:
        raise ValueError(f"depth must be in 1..{MAX_TABLE_DEPTH}")
    g = stream(seed, 0x51, replicate)
    keys = np.empty((1 << depth) - 1)
    lo = np.zeros(1)
    hi = np.ones(1)
    for j in range(depth):
        u = g.random(1 << j)
        level = lo + (hi - lo) * u
        keys[(1 << j) - 1 : (1 << (j + 1)) - 1] = level
        if j + 1 < depth:
            lo = np.repeat(lo, 2)
            hi = np.repeat(hi, 2)
            lo[1::2] = level
            hi[0::2] = level
    return KeyTable(depth=depth, keys=keys)


def mirrored_pair(depth: int, seed: int, replicate: int = 0):
    """A table and its reflection built from complemented uniforms.

    The reflected table's key at a node equals one minus the key at the
    mirrored node, exactly up to float rounding; used as the coupling check
    of the left-right symmetry of the process.
    """
    g = stream(seed, 0x52, replicate)
    draws = [g.random(1 << j) for j in range(depth)]
    t1 = _table_from_draws(depth, draws)
    mirrored = [1.0 - u[::-1] for u in draws]
    t2 = _table_from_draws(depth, mirrored)
    return t1, t2


def _table_from_draws(depth: int, draws: List[np.ndarray]) -> KeyTable:
    keys = np.empty((1 << depth) - 1)
    lo = np.zeros(1)
    hi = np.ones(1)
    for j in range(depth):
        level = lo + (hi - lo) * draws[j]
        keys[(1 << j) - 1 : (1 << (j + 1)) - 1] = level
        if j + 1 < depth:
            lo = np.repeat(lo, 2)
            hi = np.repeat(hi, 2)
            lo[1::2] = level
            hi[0::2] = level
    return KeyTable(depth=depth, keys=keys)


def keys_along_path(path: DyadicPath, levels: int, seed: int, replicate: int = 0) -> np.ndarray:
    """The successive keys met along one dyadic path (root first, O(levels))."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    g = stream(seed, 0x53, replicate)
    u = g.random(levels)
    out = np.empty(levels)
    a, b = 0.0, 1.0
    for j in range(levels):
        key = a + (b - a) * u[j]
        out[j] = key
        if path.bit(j) == 0:
            b = key
        else:
            a = key
    return out


@dataclass
class LimitEval:
    value: float
    levels: int
    achieved_bound: float
    converged: bool


def limit_key(path: DyadicPath, tol: float, seed: int, replicate: int = 0, cap: int = 120) -> LimitEval:
    """Iterate the path refinement until the sup-increment bound drops below
    ``tol`` (level cap 120; if hit, the achieved bound is reported)."""
    k = levels_for_tolerance(tol, cap=cap)
    vals = keys_along_path(path, k, seed, replicate)
    bound = increment_bound(k)
    return LimitEval(value=float(vals[-1]), levels=k, achieved_bound=bound, converged=bound < tol)


# -- vectorized evaluation over replicates ------------------------------------


def eval_at_value(t: float, levels: int, reps: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """Replicated level-``levels`` keys along the fixed dyadic path of ``t``."""
    path = DyadicPath.from_value(t, depth=min(levels, DyadicPath.MAX_BITS))
    g = stream(seed, 0x54, stream_id)
    a = np.zeros(reps)
    b = np.ones(reps)
    key = np.empty(reps)
    for j in range(levels):
        u = g.random(reps)
        key = a + (b - a) * u
        if path.bit(j) == 0:
            b = key
        else:
            a = key
    return key


def eval_at_uniform(levels: int, reps: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """Replicated level-``levels`` keys at an independent uniform position:
    the evaluation whose law is arcsine in the limit."""
    g = stream(seed, 0x55, stream_id)
    a = np.zeros(reps)
    b = np.ones(reps)
    key = np.empty(reps)
    for j in range(levels):
        u = g.random(reps)
        bits = g.random(reps) < 0.5
        key = a + (b - a) * u
        b = np.where(bits, b, key)
        a = np.where(bits, key, a)
    return key


def increment_sup_samples(max_level: int, reps: int, seed: int) -> np.ndarray:
    """(reps, max_level) array: column k-1 holds sup_x |level-k - level-(k-1)|
    for one replicate (root = level 0)."""
    if max_level > 22:
        raise ValueError("max_level too deep for the dense table")
    out = np.empty((reps, max_level))
    for r in range(reps):
        g = stream(seed, 0x56, r)
        lo = np.zeros(1)
        hi = np.ones(1)
        level = lo + (hi - lo) * g.random(1)
        for k in range(1, max_level + 1):
            lo2 = np.repeat(lo, 2)
            hi2 = np.repeat(hi, 2)
            lo2[1::2] = level
            hi2[0::2] = level
            child = lo2 + (hi2 - lo2) * g.random(lo2.size)
            out[r, k - 1] = np.max(np.abs(child - np.repeat(level, 2)))
            lo, hi, level = lo2, hi2, child
    return out


def fixpoint_resample_check(
    t_grid: Sequence[float], reps: int, seed: int, alpha: float = 1e-3,
    trunc_tol: float = DENSITY_TRUNCATION,
) -> List[TestReport]:
    """Two-sample KS between direct evaluation at t and the one-step
    self-similar resampling: U * eval(2t) for t < 1/2, else (1-U) * eval(2t-1) + U,
    with all pieces independent."""
    levels = levels_for_tolerance(trunc_tol)
    reports = []
    for i, t in enumerate(t_grid):
        if not 0.0 < t < 1.0:
            raise ValueError("t must lie in (0,1)")
        direct = eval_at_value(t, levels, reps, seed, stream_id=3 * i)
        g = stream(seed, 0x57, i)
        u = g.random(reps)
        if t < 0.5:
            inner = eval_at_value(2 * t, levels, reps, seed, stream_id=3 * i + 1)
            resampled = u * inner
        else:
            inner = eval_at_value(2 * t - 1, levels, reps, seed, stream_id=3 * i + 2)
            resampled = (1.0 - u) * inner + u
        reports.append(ks_two_sample(direct, resampled, alpha=alpha, name=f"resample t={t:g}"))
    return reports


@dataclass
class MarginalDensityEstimate:
    """Monte Carlo marginal density on a grid via the exact conditional form."""

    t: float
    x_grid: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    replicates: int
    clip_events: int
    integral: Welford = field(default_factory=Welford)

    def integral_within(self, n_se: float = 3.0) -> bool:
        se = max(self.integral.stderr, 1e-15)
        return abs(self.integral.mean - 1.0) <= n_se * se


def estimate_density(
    t: float,
    x_grid,
    reps: int,
    seed: int,
    trunc_tol: float = DENSITY_TRUNCATION,
    clip: float = DENSITY_CLIP,
) -> MarginalDensityEstimate:
    """Estimate the marginal density at ``t`` on a grid of x values.

    Uses f_t(x) = E[1{Y >= x}/Y], Y = limit key at 2t, for t <= 1/2, and the
    reflection f_t(x) = f_{1-t}(1-x) for t > 1/2.  The integrand is clipped
    below at ``clip`` (events counted); per-sample integrals over (0,1) are
    exactly min(Y,1)/max(Y,clip), giving the normalization check for free.
    """
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0,1)")
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any((x_grid <= 0) | (x_grid >= 1)):
        raise ValueError("x grid must lie in (0,1)")
    reflected = t > 0.5
    tt = 1.0 - t if reflected else t
    xs = 1.0 - x_grid if reflected else x_grid
    levels = levels_for_tolerance(trunc_tol)
    y = eval_at_value(2.0 * tt, levels, reps, seed)
    clipped = y < clip
    denom = np.maximum(y, clip)
    est = np.empty(xs.size)
    se = np.empty(xs.size)
    for i, x in enumerate(xs):
        vals = np.where(y >= x, 1.0 / denom, 0.0)
        est[i] = vals.mean()
        se[i] = vals.std(ddof=1) / math.sqrt(reps)
    integral = Welford().update_many(np.minimum(y, 1.0) / denom)
    return MarginalDensityEstimate(
        t=t,
        x_grid=x_grid,
        estimate=est,
        stderr=se,
        replicates=reps,
        clip_events=int(clipped.sum()),
        integral=integral,
    )


def density_csv_rows(est: MarginalDensityEstimate):
    for x, f, s in zip(est.x_grid, est.estimate, est.stderr):
        yield {"t": est.t, "x": x, "estimate": f, "stderr": s, "replicates": est.replicates}


def intercept_profile(ts, reps: int, seed: int, x_probe: float = 1e-3):
    """Exploratory: the density estimate near x = 0 across t.

    Visualizes the finite/infinite-intercept transition of the marginal
    densities (the intercept blows up for small t).  No pass/fail semantics:
    estimates of a diverging quantity are reported as-is with their standard
    errors.
    """
    rows = []
    for i, t in enumerate(ts):
        est = estimate_density(float(t), [x_probe], reps, seed + i)
        rows.append(
            {"t": float(t), "x": x_probe, "estimate": float(est.estimate[0]),
             "stderr": float(est.stderr[0]), "clip_events": est.clip_events,
             "replicates": reps}
        )
    return rows


def weighted_height(tree: LabelledTree) -> float:
    """Sup over dyadic paths of the weighted silhouette of a finite tree,
    i.e. the maximal weighted depth over nodes (one DFS)."""
    return tree_weighted_height(tree)
