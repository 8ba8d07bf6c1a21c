"""Batched Monte Carlo kernels.

The library trees in :mod:`wbst.tree` are built node by node and are fine for
single queries; replicated simulation at n = 1e4..1e5 needs flat O(n) passes.
Each replicate here is built as a treap: ranks 0..n-1 in key order carry
i.i.d. arrival times, the tree is the Cartesian tree of the arrival array
(minimum arrival at the root), recovered with one monotone-stack sweep.
Subtree aggregates then run in reverse arrival order, which is a valid
bottom-up schedule because parents always arrive before their children.

Everything is seeded through numpy Philox streams generated outside the
kernels, so results are independent of chunking.  The numba kernels are
cross-validated against the library implementation in the test suite.

Several statistics never need the whole tree and use exact path-law samplers
instead:

- ``rank_path_sample``: depth/weighted depth of a fixed rank; the root is a
  uniform pivot and the path is the quickselect recursion, O(log n) a step.
- ``dyadic_path_sample`` / ``last_insert_sample``: in the i.i.d. model the
  subtree below a node with m keys on interval (a, b) receives Binomial
  splits, so silhouette depths and the last-insertion path are O(depth).
- ``record_chain_sample``: ancestors of rank 1 are the prefix minima of the
  arrival sequence; the positions form a uniform descending chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .rng import stream


# -- treap primitives (numba) -------------------------------------------------


@njit(cache=True)
def _fisher_yates(u_row, perm, t_of_rank):
    """perm[t] = rank arriving at time t; t_of_rank inverts it."""
    n = perm.shape[0]
    for i in range(n):
        perm[i] = i
    for i in range(n - 1, 0, -1):
        j = int(u_row[i] * (i + 1))
        if j > i:
            j = i
        perm[i], perm[j] = perm[j], perm[i]
    for t in range(n):
        t_of_rank[perm[t]] = t


@njit(cache=True)
def _sorted_uniform_keys(u_row, keys):
    """Order statistics of n uniforms via exponential spacings (no sort)."""
    n = keys.shape[0]
    total = 0.0
    for i in range(n):
        e = -np.log(u_row[i] if u_row[i] > 1e-300 else 1e-300)
        total += e
        keys[i] = total
    total += -np.log(u_row[n] if u_row[n] > 1e-300 else 1e-300)
    for i in range(n):
        keys[i] /= total


@njit(cache=True)
def _cartesian_tree(t_of_rank, left, right, parent, stack):
    """Min-arrival Cartesian tree over ranks 0..n-1; returns the root."""
    n = t_of_rank.shape[0]
    top = -1
    for v in range(n):
        last = -1
        while top >= 0 and t_of_rank[stack[top]] > t_of_rank[v]:
            last = stack[top]
            top -= 1
        left[v] = last
        right[v] = -1
        if last >= 0:
            parent[last] = v
        if top >= 0:
            right[stack[top]] = v
            parent[v] = stack[top]
        else:
            parent[v] = -1
        top += 1
        stack[top] = v


@njit(cache=True)
def _functionals_pass(perm, left, right, keys, size, p, w, wp, ww, out_row):
    """Bottom-up recursions for (path length, Wiener, weighted both)."""
    n = perm.shape[0]
    for t in range(n - 1, -1, -1):
        v = perm[t]
        l = left[v]
        r = right[v]
        s1 = size[l] if l >= 0 else 0
        s2 = size[r] if r >= 0 else 0
        s = s1 + s2 + 1
        size[v] = s
        pl = p[l] if l >= 0 else 0.0
        pr = p[r] if r >= 0 else 0.0
        wl = w[l] if l >= 0 else 0.0
        wr = w[r] if r >= 0 else 0.0
        wpl = wp[l] if l >= 0 else 0.0
        wpr = wp[r] if r >= 0 else 0.0
        wwl = ww[l] if l >= 0 else 0.0
        wwr = ww[r] if r >= 0 else 0.0
        x = keys[v]
        p[v] = pl + pr + s - 1.0
        w[v] = wl + wr + (s2 + 1.0) * pl + (s1 + 1.0) * pr + s + 2.0 * s1 * s2 - 1.0
        wp[v] = wpl + wpr + s * x
        ww[v] = wwl + wwr + (s2 + 1.0) * wpl + (s1 + 1.0) * wpr + (s + 1.0 * s1 * s2) * x
    root = perm[0]
    out_row[0] = ww[root]
    out_row[1] = w[root]
    out_row[2] = wp[root]
    out_row[3] = p[root]


@njit(cache=True)
def _functionals_batch(u_fy, u_sp, rank_keys, reflect, out):
    """Per row: build one replicate and store (ww, w, wp, p).

    ``rank_keys``: keys are ranks 1..n (permutation model) instead of sorted
    uniforms.  ``reflect``: additionally compute the tree on reflected keys
    (key -> 1-key, rank r -> n-1-r) and store it in columns 4..7.
    """
    reps, n = u_fy.shape
    perm = np.empty(n, np.int64)
    t_of_rank = np.empty(n, np.int64)
    left = np.empty(n, np.int64)
    right = np.empty(n, np.int64)
    parent = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    keys = np.empty(n, np.float64)
    rkeys = np.empty(n, np.float64)
    rt = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    p = np.empty(n, np.float64)
    w = np.empty(n, np.float64)
    wp = np.empty(n, np.float64)
    ww = np.empty(n, np.float64)
    for row in range(reps):
        _fisher_yates(u_fy[row], perm, t_of_rank)
        if rank_keys:
            for i in range(n):
                keys[i] = i + 1.0
        else:
            _sorted_uniform_keys(u_sp[row], keys)
        _cartesian_tree(t_of_rank, left, right, parent, stack)
        _functionals_pass(perm, left, right, keys, size, p, w, wp, ww, out[row, :4])
        if reflect:
            # reflected tree: rank r takes arrival and complemented key of n-1-r
            for r in range(n):
                rt[r] = t_of_rank[n - 1 - r]
                rkeys[r] = 1.0 - keys[n - 1 - r]
            for r in range(n):
                perm[rt[r]] = r
            _cartesian_tree(rt, left, right, parent, stack)
            _functionals_pass(perm, left, right, rkeys, size, p, w, wp, ww, out[row, 4:8])


@dataclass
class FunctionalSample:
    """Replicated draws of (ww, w, wp, p), optionally with the reflected tree."""

    n: int
    values: np.ndarray           # (reps, 4) or (reps, 8) with reflection
    rank_keys: bool

    def normalized(self) -> np.ndarray:
        """Columns scaled to the limit normalization (ww/n^2, w/n^2, wp/n, p/n),
        centered by the sample mean."""
        n = self.n
        scale = np.array([n * n, n * n, n, n], dtype=float)
        z = self.values[:, :4] / scale
        return z - z.mean(axis=0)


def sample_functionals(
    n: int,
    reps: int,
    seed: int,
    model: str = "iid",
    reflect: bool = False,
    chunk: int | None = None,
    stream_id: int = 0,
) -> FunctionalSample:
    """Monte Carlo draws of the four functionals, chunked to bound memory."""
    if model not in ("iid", "permutation"):
        raise ValueError("model must be 'iid' or 'permutation'")
    rank_keys = model == "permutation"
    if chunk is None:
        chunk = max(1, min(reps, int(1.5e7 // max(n, 1))))
    width = 8 if reflect else 4
    out = np.empty((reps, width))
    done = 0
    chunk_idx = 0
    while done < reps:
        m = min(chunk, reps - done)
        g = stream(seed, 0xF0, stream_id, chunk_idx)
        u_fy = g.random((m, n))
        u_sp = g.random((m, n + 1)) if not rank_keys else np.empty((m, 1))
        _functionals_batch(u_fy, u_sp, rank_keys, reflect, out[done : done + m])
        done += m
        chunk_idx += 1
    return FunctionalSample(n=n, values=out, rank_keys=rank_keys)


# -- whole-tree per-label statistics (numba) ----------------------------------


@njit(cache=True)
def _label_stats_batch(u_fy, u_sp, rank_keys, ks, out):
    """Per replicate and per requested rank k (0-based) store
    (depth_k, wdepth_k, ext_depth_k, ext_wdepth_k, subtree_height_k,
    subtree_max_key_k), plus tree height and max weighted depth in the last
    two columns.

    External nodes follow left-to-right DFS order; the k-th one hangs below
    the predecessor rank when k has a left child, else below k itself.
    Subtree heights count nodes (leaf = 1).
    """
    reps, n = u_fy.shape
    nk = ks.shape[0]
    perm = np.empty(n, np.int64)
    t_of_rank = np.empty(n, np.int64)
    left = np.empty(n, np.int64)
    right = np.empty(n, np.int64)
    parent = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    keys = np.empty(n, np.float64)
    depth = np.empty(n, np.int64)
    wdepth = np.empty(n, np.float64)
    height = np.empty(n, np.int64)
    maxkey = np.empty(n, np.float64)
    for row in range(reps):
        _fisher_yates(u_fy[row], perm, t_of_rank)
        if rank_keys:
            for i in range(n):
                keys[i] = i + 1.0
        else:
            _sorted_uniform_keys(u_sp[row], keys)
        _cartesian_tree(t_of_rank, left, right, parent, stack)
        root = perm[0]
        depth[root] = 0
        wdepth[root] = keys[root]
        hmax = 0
        wmax = keys[root]
        for t in range(1, n):
            v = perm[t]
            pa = parent[v]
            depth[v] = depth[pa] + 1
            wdepth[v] = wdepth[pa] + keys[v]
            if depth[v] > hmax:
                hmax = depth[v]
            if wdepth[v] > wmax:
                wmax = wdepth[v]
        for v in range(n):
            height[v] = 1
            maxkey[v] = keys[v]
        for t in range(n - 1, 0, -1):
            v = perm[t]
            pa = parent[v]
            if height[v] + 1 > height[pa]:
                height[pa] = height[v] + 1
            if maxkey[v] > maxkey[pa]:
                maxkey[pa] = maxkey[v]
        for i in range(nk):
            k = ks[i]
            if left[k] >= 0:
                ed = depth[k - 1] + 1
                ew = wdepth[k - 1]
            else:
                ed = depth[k] + 1
                ew = wdepth[k]
            base = 6 * i
            out[row, base] = depth[k]
            out[row, base + 1] = wdepth[k]
            out[row, base + 2] = ed
            out[row, base + 3] = ew
            out[row, base + 4] = height[k]
            out[row, base + 5] = maxkey[k]
        out[row, 6 * nk] = hmax
        out[row, 6 * nk + 1] = wmax


@dataclass
class LabelStats:
    n: int
    ks: np.ndarray               # the queried ranks, 0-based
    data: np.ndarray             # (reps, 6*len(ks) + 2)

    def field(self, name: str, k_index: int = 0) -> np.ndarray:
        cols = {"depth": 0, "wdepth": 1, "ext_depth": 2, "ext_wdepth": 3,
                "subtree_height": 4, "subtree_max_key": 5}
        return self.data[:, 6 * k_index + cols[name]]

    @property
    def tree_height(self) -> np.ndarray:
        return self.data[:, -2]

    @property
    def max_weighted_depth(self) -> np.ndarray:
        return self.data[:, -1]


def sample_label_stats(
    n: int,
    ks,
    reps: int,
    seed: int,
    model: str = "permutation",
    chunk: int | None = None,
    stream_id: int = 0,
) -> LabelStats:
    ks = np.asarray(ks, dtype=np.int64)
    if np.any((ks < 0) | (ks >= n)):
        raise ValueError("ranks out of range")
    rank_keys = model == "permutation"
    if chunk is None:
        chunk = max(1, min(reps, int(1.5e7 // max(n, 1))))
    out = np.empty((reps, 6 * ks.size + 2))
    done = 0
    chunk_idx = 0
    while done < reps:
        m = min(chunk, reps - done)
        g = stream(seed, 0xF1, stream_id, chunk_idx)
        u_fy = g.random((m, n))
        u_sp = g.random((m, n + 1)) if not rank_keys else np.empty((m, 1))
        _label_stats_batch(u_fy, u_sp, rank_keys, ks, out[done : done + m])
        done += m
        chunk_idx += 1
    return LabelStats(n=n, ks=ks, data=out)


# -- model coupling (numba) ----------------------------------------------------


@njit(cache=True)
def _coupling_batch(u_fy, u_sp, out):
    """Per replicate: (lhs, rhs) of the coupling inequality, where lhs is the
    max over ranks of |weighted depth difference between the key models| and
    rhs = (node-count height) * max rank-vs-key discrepancy."""
    reps, n = u_fy.shape
    perm = np.empty(n, np.int64)
    t_of_rank = np.empty(n, np.int64)
    left = np.empty(n, np.int64)
    right = np.empty(n, np.int64)
    parent = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    keys = np.empty(n, np.float64)
    wd_iid = np.empty(n, np.float64)
    wd_rank = np.empty(n, np.float64)
    depth = np.empty(n, np.int64)
    for row in range(reps):
        _fisher_yates(u_fy[row], perm, t_of_rank)
        _sorted_uniform_keys(u_sp[row], keys)
        _cartesian_tree(t_of_rank, left, right, parent, stack)
        root = perm[0]
        depth[root] = 0
        wd_iid[root] = keys[root]
        wd_rank[root] = root + 1.0
        hmax = 0
        for t in range(1, n):
            v = perm[t]
            pa = parent[v]
            depth[v] = depth[pa] + 1
            wd_iid[v] = wd_iid[pa] + keys[v]
            wd_rank[v] = wd_rank[pa] + v + 1.0
            if depth[v] > hmax:
                hmax = depth[v]
        lhs = 0.0
        disc = 0.0
        for v in range(n):
            d = abs(wd_iid[v] - wd_rank[v] / n)
            if d > lhs:
                lhs = d
            e = abs(keys[v] - (v + 1.0) / n)
            if e > disc:
                disc = e
        out[row, 0] = lhs
        out[row, 1] = (hmax + 1.0) * disc


def sample_coupling(n: int, reps: int, seed: int, chunk: int | None = None) -> np.ndarray:
    """(reps, 2) array of per-sample (lhs, rhs) for the coupling bound."""
    if chunk is None:
        chunk = max(1, min(reps, int(1.5e7 // max(n, 1))))
    out = np.empty((reps, 2))
    done = 0
    chunk_idx = 0
    while done < reps:
        m = min(chunk, reps - done)
        g = stream(seed, 0xF2, chunk_idx)
        u_fy = g.random((m, n))
        u_sp = g.random((m, n + 1))
        _coupling_batch(u_fy, u_sp, out[done : done + m])
        done += m
        chunk_idx += 1
    return out


# -- exact path-law samplers (vectorized numpy) --------------------------------


def rank_path_sample(n: int, k: int, reps: int, seed: int, stream_id: int = 0):
    """Exact joint draws of (depth, weighted depth) of the rank-k node
    (1-based) in the permutation model.

    The arrival-first rank in an interval is uniform on it, so the root path
    to k is the quickselect recursion: O(log n) rounds, vectorized over
    replicates.
    """
    if not 1 <= k <= n:
        raise ValueError("k out of range")
    g = stream(seed, 0xF3, stream_id)
    lo = np.ones(reps, dtype=np.int64)
    hi = np.full(reps, n, dtype=np.int64)
    depth = np.zeros(reps, dtype=np.int64)
    wsum = np.zeros(reps, dtype=np.float64)
    active = np.arange(reps)
    while active.size:
        m = hi[active] - lo[active] + 1
        r = lo[active] + np.minimum((g.random(active.size) * m).astype(np.int64), m - 1)
        wsum[active] += r
        hit = r == k
        goleft = k < r
        hi[active[goleft]] = r[goleft] - 1
        lo[active[~goleft & ~hit]] = r[~goleft & ~hit] + 1
        nxt = active[~hit]
        depth[nxt] += 1
        active = nxt
    return depth, wsum


def record_chain_sample(n: int, reps: int, seed: int, stream_id: int = 0):
    """Exact (depth, weighted depth) of rank 1 via the descending uniform
    chain of prefix-minimum positions."""
    g = stream(seed, 0xF4, stream_id)
    cur = np.full(reps, n + 1, dtype=np.int64)
    depth = np.full(reps, -1, dtype=np.int64)
    wsum = np.zeros(reps)
    active = np.arange(reps)
    while active.size:
        cur[active] = 1 + np.minimum(
            (g.random(active.size) * (cur[active] - 1)).astype(np.int64), cur[active] - 2
        )
        wsum[active] += cur[active]
        depth[active] += 1
        active = active[cur[active] > 1]
    return depth, wsum


def dyadic_path_sample(n: int, path, reps: int, seed: int, stream_id: int = 0):
    """Exact (depth, weighted depth) of the deepest node along a dyadic path
    in the i.i.d. model.

    ``path`` is a :class:`wbst.tree.DyadicPath` or a sequence of bits (zero
    extension beyond its length).  The node on interval (a, b) holding m keys
    takes the first key, uniform on (a, b); the remaining m-1 keys split
    binomially between the child intervals.
    """
    if hasattr(path, "bit"):
        bit_at = path.bit
    else:
        bit_at = lambda i: path[i] if i < len(path) else 0  # noqa: E731
    g = stream(seed, 0xF5, stream_id)
    a = np.zeros(reps)
    b = np.ones(reps)
    m = np.full(reps, n, dtype=np.int64)
    depth = np.full(reps, -1, dtype=np.int64)
    wsum = np.zeros(reps)
    level = 0
    active = np.arange(reps)
    while active.size:
        u = g.random(active.size)
        kappa = a[active] + (b[active] - a[active]) * u
        wsum[active] += kappa
        depth[active] += 1
        rest = m[active] - 1
        nleft = g.binomial(rest, u)
        if bit_at(level) == 0:
            m[active] = nleft
            b[active] = kappa
        else:
            m[active] = rest - nleft
            a[active] = kappa
        level += 1
        active = active[m[active] > 0]
    return depth, wsum


def last_insert_sample(n: int, reps: int, seed: int, stream_id: int = 0):
    """Exact (depth, rank-weighted depth, key-weighted depth, key) of the
    n-th inserted node: follow the search path of an independent uniform
    through the binomially split tree of the first n-1 keys.

    The rank-weighted depth sums, over path nodes, each node's final rank
    among all n keys (the permutation-model weighted depth of the last
    node); ranks are recovered exactly from the interval key counts.  The
    key-weighted depth sums the i.i.d. keys themselves.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    g = stream(seed, 0xF6, stream_id)
    target = g.random(reps)
    a = np.zeros(reps)
    b = np.ones(reps)
    m = np.full(reps, n - 1, dtype=np.int64)
    cnt_left = np.zeros(reps, dtype=np.int64)  # keys strictly below the interval
    depth = np.zeros(reps, dtype=np.int64)
    wsum = np.zeros(reps)
    rsum = np.zeros(reps, dtype=np.int64)
    active = np.arange(reps)[m > 0]
    while active.size:
        u = g.random(active.size)
        kappa = a[active] + (b[active] - a[active]) * u
        wsum[active] += kappa
        depth[active] += 1
        rest = m[active] - 1
        nleft = g.binomial(rest, u)
        goleft = target[active] < kappa
        # node's rank among the n-1 old keys, +1 if the new key passes left of it
        rsum[active] += cnt_left[active] + nleft + 1 + goleft
        m[active] = np.where(goleft, nleft, rest - nleft)
        b[active] = np.where(goleft, kappa, b[active])
        a[active] = np.where(goleft, a[active], kappa)
        cnt_left[active] += np.where(goleft, 0, nleft + 1)
        active = active[m[active] > 0]
    rsum += cnt_left + 1  # the new node's own rank
    return depth, rsum.astype(np.float64), wsum + target, target
