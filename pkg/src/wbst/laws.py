"""Reference limit distributions: Dickman, arcsine, uniform, normal.

The Dickman law is realized by its perpetuity series sum_j prod_{i<=j} U_i,
truncated once the running product drops below 1e-15 (residual expected mass
below 2e-15, far under Monte Carlo noise), and characterized through its
characteristic function exp(int_0^1 (e^{i lambda x} - 1)/x dx).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .rng import stream

DICKMAN_TRUNCATION = 1e-15


def dickman_sample(count: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """Perpetuity-series samples of the Dickman law (mean 1, variance 1/2)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    g = stream(seed, 0xD1C, stream_id)
    total = np.zeros(count)
    prod = np.ones(count)
    alive = np.arange(count)
    block = 48
    while alive.size:
        u = g.random((alive.size, block))
        partial = np.cumprod(u, axis=1) * prod[alive, None]
        live = partial >= DICKMAN_TRUNCATION
        total[alive] += (partial * live).sum(axis=1)
        prod[alive] = partial[:, -1]
        alive = alive[live[:, -1]]
    return total


def dickman_charfn(lam: float, tol: float = 1e-12) -> complex:
    """exp(int_0^1 (e^{i lam x} - 1)/x dx); the integrand tends to i*lam at 0."""
    if abs(lam) > 100.0:
        raise ValueError("|lambda| <= 100 supported")
    if lam == 0.0:
        return complex(1.0, 0.0)

    def re_part(x: float) -> float:
        return (math.cos(lam * x) - 1.0) / x if x > 0 else 0.0

    def im_part(x: float) -> float:
        return math.sin(lam * x) / x if x > 0 else lam

    re, _ = integrate.quad(re_part, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=400)
    im, _ = integrate.quad(im_part, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=400)
    return complex(np.exp(complex(re, im)))


def arcsine_cdf(x):
    """(2/pi) arcsin(sqrt(x)) on [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("arcsine law lives on [0, 1]")
    return 2.0 / math.pi * np.arcsin(np.sqrt(arr))


def arcsine_pdf(x):
    arr = np.asarray(x, dtype=float)
    if np.any((arr <= 0) | (arr >= 1)):
        raise ValueError("density defined on (0, 1)")
    return 1.0 / (math.pi * np.sqrt(arr * (1.0 - arr)))


def arcsine_sample(count: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """sin^2(pi U / 2) with U uniform."""
    g = stream(seed, 0xA5C, stream_id)
    return np.sin(0.5 * math.pi * g.random(count)) ** 2


def arcsine_fixed_point_sample(count: int, seed: int, iters: int = 64, stream_id: int = 0) -> np.ndarray:
    """Samples via the perpetuity Y =d U Y + 1_A (1-U) with P(A) = 1/2.

    Iterating the map from an arbitrary start couples in distribution at
    geometric rate (contraction factor E[U] = 1/2), so ``iters = 64`` leaves
    bias ~2^-64.
    """
    g = stream(seed, 0xA5F, stream_id)
    y = g.random(count)
    for _ in range(iters):
        u = g.random(count)
        a = g.random(count) < 0.5
        y = u * y + np.where(a, 1.0 - u, 0.0)
    return y


def normal_cdf(x):
    from scipy.special import ndtr

    return ndtr(np.asarray(x, dtype=float))


def empirical_charfn(samples: np.ndarray, lam_grid: np.ndarray) -> np.ndarray:
    """Empirical characteristic function on a grid, chunked for memory."""
    samples = np.asarray(samples, dtype=float)
    out = np.zeros(lam_grid.size, dtype=complex)
    chunk = max(1, int(4e6 // max(lam_grid.size, 1)))
    for start in range(0, samples.size, chunk):
        part = samples[start : start + chunk]
        out += np.exp(1j * np.outer(lam_grid, part)).sum(axis=1)
    return out / samples.size


def empirical_charfn_distance(samples, charfn: Callable[[float], complex], lam_grid) -> float:
    """Sup over the grid of |empirical charfn - reference charfn|."""
    lam_grid = np.asarray(lam_grid, dtype=float)
    if lam_grid.size == 0 or len(samples) == 0:
        raise ValueError("need samples and a grid")
    emp = empirical_charfn(np.asarray(samples, dtype=float), lam_grid)
    ref = np.array([charfn(l) for l in lam_grid])
    return float(np.max(np.abs(emp - ref)))


@dataclass(frozen=True)
class ReferenceLaw:
    """A named distribution with whatever evaluators it admits."""

    kind: str
    cdf: Callable | None = None
    sampler: Callable | None = None
    charfn: Callable | None = None


def reference_law(kind: str) -> ReferenceLaw:
    if kind == "uniform":
        return ReferenceLaw("uniform", cdf=lambda x: np.clip(np.asarray(x, float), 0, 1),
                            sampler=lambda c, seed, s=0: stream(seed, 0x0F0, s).random(c))
    if kind == "normal":
        return ReferenceLaw("normal", cdf=normal_cdf,
                            sampler=lambda c, seed, s=0: stream(seed, 0x0F1, s).standard_normal(c),
                            charfn=lambda lam: complex(math.exp(-0.5 * lam * lam), 0.0))
    if kind == "arcsine":
        return ReferenceLaw("arcsine", cdf=arcsine_cdf, sampler=arcsine_sample)
    if kind == "dickman":
        return ReferenceLaw("dickman", sampler=dickman_sample, charfn=dickman_charfn)
    raise ValueError(f"unknown law {kind!r}")
