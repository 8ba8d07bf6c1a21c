"""Labelled binary search trees under the permutation and i.i.d. key models.

Trees live in a flat arena (parallel arrays indexed by node id, ids assigned
in insertion order) and are immutable once built; every query below is
read-only.  Keys are either integer ranks ``1..n`` (permutation model) or
distinct reals in ``[0, 1]`` (i.i.d. model); comparisons are exact and a
strictly larger key goes right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .rng import stream


class DuplicateKeyError(ValueError):
    """Raised when an inserted key collides with an existing one."""


class KeyNotFoundError(KeyError):
    """Raised when a query names a key that is not in the tree."""


@dataclass(frozen=True)
class PathObservation:
    """Depth and weighted depth of one root-to-node path."""

    depth: int
    weighted_depth: float
    node_key: float
    n: int


@dataclass(frozen=True)
class DyadicPath:
    """A point of [0, 1] addressed by its binary expansion.

    Stores at most 64 explicit bits; deeper queries follow the convention that
    the expansion continues with zeros.  The all-ones path (x = 1) is
    representable as ``DyadicPath((1,) * k)`` extended by ones via ``ones=True``.
    """

    bits: tuple
    all_ones: bool = False

    MAX_BITS = 64

    def __post_init__(self):
        if len(self.bits) > self.MAX_BITS:
            raise ValueError(f"at most {self.MAX_BITS} explicit bits supported")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @classmethod
    def zero(cls) -> "DyadicPath":
        return cls(())

    @classmethod
    def one(cls) -> "DyadicPath":
        return cls((), all_ones=True)

    @classmethod
    def from_value(cls, x: float, depth: int = MAX_BITS) -> "DyadicPath":
        if not 0.0 <= x <= 1.0:
            raise ValueError("x must lie in [0, 1]")
        if x == 1.0:
            return cls.one()
        bits = []
        for _ in range(min(depth, cls.MAX_BITS)):
            x *= 2.0
            b = int(x >= 1.0)
            bits.append(b)
            x -= b
        return cls(tuple(bits))

    def bit(self, i: int) -> int:
        """i-th expansion bit, 0-based; zero-extension beyond the stored bits."""
        if i < len(self.bits):
            return self.bits[i]
        return 1 if self.all_ones else 0

    @property
    def value(self) -> float:
        if self.all_ones and not self.bits:
            return 1.0
        v = 0.0
        for i, b in enumerate(self.bits):
            v += b * 0.5 ** (i + 1)
        if self.all_ones:
            v += 0.5 ** len(self.bits)
        return v


class LabelledTree:
    """Arena-backed BST; node ids are insertion order (0-based internally)."""

    __slots__ = ("keys", "left", "right", "parent", "size", "rank_model", "_by_rank")

    def __init__(self, rank_model: bool):
        self.keys: list = []
        self.left: list = []
        self.right: list = []
        self.parent: list = []
        self.size: list = []
        self.rank_model = rank_model
        self._by_rank: Optional[list] = None

    # -- construction -------------------------------------------------------

    def _insert(self, key) -> None:
        idx = len(self.keys)
        self.keys.append(key)
        self.left.append(-1)
        self.right.append(-1)
        self.size.append(1)
        if idx == 0:
            self.parent.append(-1)
            return
        v = 0
        while True:
            self.size[v] += 1
            if key == self.keys[v]:
                raise DuplicateKeyError(f"duplicate key {key!r}")
            if key < self.keys[v]:
                if self.left[v] < 0:
                    self.left[v] = idx
                    break
                v = self.left[v]
            else:
                if self.right[v] < 0:
                    self.right[v] = idx
                    break
                v = self.right[v]
        self.parent.append(v)

    @property
    def n(self) -> int:
        return len(self.keys)

    @property
    def root(self) -> int:
        return 0

    def node_of_key(self, key) -> int:
        """Node id holding ``key`` (BST search)."""
        if self.rank_model:
            if self._by_rank is None:
                by_rank = [-1] * (self.n + 1)
                for v, k in enumerate(self.keys):
                    by_rank[k] = v
                self._by_rank = by_rank
            k = int(key)
            if not 1 <= k <= self.n or self._by_rank[k] < 0:
                raise KeyNotFoundError(key)
            return self._by_rank[k]
        v = 0
        while v >= 0:
            if key == self.keys[v]:
                return v
            v = self.left[v] if key < self.keys[v] else self.right[v]
        raise KeyNotFoundError(key)

    def depth_of_node(self, v: int) -> int:
        d = 0
        while self.parent[v] >= 0:
            v = self.parent[v]
            d += 1
        return d

    def path_to_root(self, v: int) -> Iterator[int]:
        while v >= 0:
            yield v
            v = self.parent[v]

    def in_order(self) -> Iterator[int]:
        stack: list = []
        v = self.root if self.n else -1
        while stack or v >= 0:
            while v >= 0:
                stack.append(v)
                v = self.left[v]
            v = stack.pop()
            yield v
            v = self.right[v]

    def height(self) -> int:
        """Maximal node depth (root has depth 0)."""
        if self.n == 0:
            raise ValueError("empty tree")
        best = 0
        stack = [(self.root, 0)]
        while stack:
            v, d = stack.pop()
            best = max(best, d)
            if self.left[v] >= 0:
                stack.append((self.left[v], d + 1))
            if self.right[v] >= 0:
                stack.append((self.right[v], d + 1))
        return best

    def depths(self) -> np.ndarray:
        """Depth of every node, indexed by node id (insertion order)."""
        out = np.zeros(self.n, dtype=np.int64)
        for v in range(1, self.n):
            out[v] = out[self.parent[v]] + 1
        return out

    def weighted_depths(self) -> np.ndarray:
        """Weighted depth (path key sum, endpoints included) of every node."""
        out = np.zeros(self.n, dtype=float)
        out[0] = self.keys[0]
        for v in range(1, self.n):
            out[v] = out[self.parent[v]] + self.keys[v]
        return out

    def subtree_heights(self) -> np.ndarray:
        """Node-count height of each subtree (a leaf has height 1)."""
        h = np.ones(self.n, dtype=np.int64)
        for v in range(self.n - 1, 0, -1):
            p = self.parent[v]
            h[p] = max(h[p], h[v] + 1)
        return h

    def subtree_max_key(self) -> np.ndarray:
        mx = np.array(self.keys, dtype=float)
        for v in range(self.n - 1, 0, -1):
            p = self.parent[v]
            mx[p] = max(mx[p], mx[v])
        return mx

    def check_bst(self) -> None:
        """Assert the search-tree invariant by a full in-order scan."""
        prev = None
        for v in self.in_order():
            if prev is not None and not self.keys[v] > prev:
                raise AssertionError("in-order keys not strictly increasing")
            prev = self.keys[v]
        for v in range(self.n):
            s = 1
            if self.left[v] >= 0:
                s += self.size[self.left[v]]
            if self.right[v] >= 0:
                s += self.size[self.right[v]]
            if s != self.size[v]:
                raise AssertionError("subtree size bookkeeping broken")

    def shape_signature(self) -> tuple:
        return (tuple(self.left), tuple(self.right))


# -- builders ---------------------------------------------------------------


def build_from_permutation(perm: Sequence[int]) -> LabelledTree:
    """BST from successive insertion of a permutation of ``1..n``."""
    n = len(perm)
    if n < 1:
        raise ValueError("need at least one key")
    seen = [False] * (n + 1)
    for r in perm:
        if not isinstance(r, (int, np.integer)) or not 1 <= int(r) <= n or seen[int(r)]:
            raise ValueError(f"not a permutation of 1..{n}: offending value {r!r}")
        seen[int(r)] = True
    t = LabelledTree(rank_model=True)
    for r in perm:
        t._insert(int(r))
    return t


def build_from_keys(keys: Sequence[float]) -> LabelledTree:
    """BST from successive insertion of distinct real keys in [0, 1]."""
    if len(keys) < 1:
        raise ValueError("need at least one key")
    t = LabelledTree(rank_model=False)
    for k in keys:
        t._insert(float(k))
    return t


def iid_keys(n: int, seed: int, replicate: int = 0) -> np.ndarray:
    """The first ``n`` uniforms of the deterministic stream ``(seed, replicate)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return stream(seed, 0xB57, replicate).random(n)


def build_iid(n: int, seed: int, replicate: int = 0) -> LabelledTree:
    """BST on ``n`` i.i.d. uniform keys from a counter-based generator.

    Same ``(n, seed, replicate)`` gives a bit-identical tree.  In the
    probability-zero event of a duplicate draw the sample is rejected and
    redrawn from the next sub-stream, with a warning.
    """
    attempt = 0
    while True:
        try:
            return build_from_keys(iid_keys(n, seed, replicate + (attempt << 32)))
        except DuplicateKeyError:  # pragma: no cover - probability ~0
            import warnings

            warnings.warn("duplicate uniform draw; resampling the replicate")
            attempt += 1


# -- queries ----------------------------------------------------------------


def _observe(tree: LabelledTree, v: int) -> PathObservation:
    depth = 0
    wsum = 0.0
    for u in tree.path_to_root(v):
        wsum += tree.keys[u]
        depth += 1
    key = tree.keys[v]
    if tree.rank_model:
        wsum = int(round(wsum))
        key = int(key)
    return PathObservation(depth=depth - 1, weighted_depth=wsum, node_key=key, n=tree.n)


def depth_and_weight(tree: LabelledTree, key) -> PathObservation:
    """Depth and weighted depth of the node holding ``key``."""
    return _observe(tree, tree.node_of_key(key))


def last_inserted(tree: LabelledTree) -> PathObservation:
    """Depth/weighted depth of the most recently inserted node."""
    if tree.n == 0:
        raise ValueError("empty tree")
    return _observe(tree, tree.n - 1)


def silhouette_depths(tree: LabelledTree, path: DyadicPath) -> PathObservation:
    """Deepest existing node along the dyadic path and its weighted depth."""
    if tree.n == 0:
        raise ValueError("empty tree")
    v = tree.root
    depth = 0
    wsum = tree.keys[v]
    last = v
    i = 0
    while True:
        nxt = tree.left[v] if path.bit(i) == 0 else tree.right[v]
        if nxt < 0:
            break
        v = nxt
        i += 1
        depth += 1
        wsum += tree.keys[v]
        last = v
    key = tree.keys[last]
    if tree.rank_model:
        wsum = int(round(wsum))
        key = int(key)
    return PathObservation(depth=depth, weighted_depth=wsum, node_key=key, n=tree.n)


def distance_and_weight(tree: LabelledTree, key_a, key_b) -> tuple:
    """Graph distance between two labelled nodes and the key sum along the
    connecting path, both endpoints included.  ``(k, k)`` gives ``(0, key)``."""
    va = tree.node_of_key(key_a)
    vb = tree.node_of_key(key_b)
    anc = {}
    d = 0
    w = 0.0
    for u in tree.path_to_root(va):
        anc[u] = (d, w + tree.keys[u])
        w += tree.keys[u]
        d += 1
    d = 0
    w = 0.0
    for u in tree.path_to_root(vb):
        w += tree.keys[u]
        if u in anc:
            da, wa = anc[u]
            dist = da + d
            wsum = wa + w - tree.keys[u]
            if tree.rank_model:
                return dist, int(round(wsum))
            return dist, wsum
        d += 1
    raise AssertionError("paths to root must intersect")


def dfs_external(tree: LabelledTree) -> list:
    """The ``n+1`` external nodes in left-to-right DFS order.

    The k-th external node (1-based) sits in the gap between keys of rank
    ``k-1`` and ``k``; its depth is one more than its internal parent's and its
    weighted depth is the key sum over internal ancestors only.
    """
    if tree.n == 0:
        raise ValueError("empty tree")
    depths = tree.depths()
    wd = tree.weighted_depths()
    order = list(tree.in_order())
    out = []
    # left external child of the minimum
    first = order[0]
    out.append(_external_obs(tree, depths[first], wd[first]))
    for i, v in enumerate(order):
        if tree.right[v] >= 0:
            # gap (key_i, key_{i+1}) hangs below the successor, which has no
            # left child; the successor is order[i + 1]
            u = order[i + 1]
        else:
            u = v
        out.append(_external_obs(tree, depths[u], wd[u]))
    return out


def _external_obs(tree: LabelledTree, parent_depth: int, parent_wd: float) -> PathObservation:
    w = int(round(parent_wd)) if tree.rank_model else float(parent_wd)
    return PathObservation(depth=int(parent_depth) + 1, weighted_depth=w, node_key=float("nan"), n=tree.n)


def weighted_height(tree: LabelledTree) -> float:
    """Maximum over nodes of the weighted depth (the sup of the weighted
    silhouette); for keys in [0, 1] it is strictly below ``height + 1``."""
    return float(tree.weighted_depths().max())


@dataclass(frozen=True)
class CouplingReport:
    """Per-sample check of the model-coupling inequality."""

    n: int
    lhs: float  # max_k |scaled weighted depth difference between the models|
    rhs: float  # (node-count height) * max_i |U_i - rank(U_i)/n|
    height: int
    max_key_discrepancy: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def couple_models(n: int, seed: int, replicate: int = 0):
    """Build the i.i.d. tree and the rank tree from the same draws and bound
    the weighted-depth discrepancy between the models.

    Returns ``(tree_iid, tree_perm, report)``.  The bound multiplies the
    empirical key-vs-rank discrepancy by the node-count height (number of
    nodes on the longest root path, i.e. ``height() + 1``), which makes it a
    per-sample triangle inequality rather than an asymptotic statement.
    """
    keys = iid_keys(n, seed, replicate)
    ranks = np.argsort(np.argsort(keys)) + 1
    t_iid = build_from_keys(keys)
    t_perm = build_from_permutation([int(r) for r in ranks])
    if t_iid.shape_signature() != t_perm.shape_signature():
        raise AssertionError("rank tree must share the i.i.d. tree's shape")
    wd_iid = t_iid.weighted_depths()
    wd_perm = t_perm.weighted_depths()
    lhs = float(np.max(np.abs(wd_iid - wd_perm / n)))
    disc = float(np.max(np.abs(keys - ranks / n)))
    h = t_iid.height()
    rhs = (h + 1) * disc
    return t_iid, t_perm, CouplingReport(n=n, lhs=lhs, rhs=rhs, height=h, max_key_discrepancy=disc)
