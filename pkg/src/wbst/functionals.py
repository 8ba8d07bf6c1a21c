"""Path length, Wiener index and their key-weighted versions.

``functionals_recursive`` is the production path: one post-order pass using
the root-decomposition recursions (left subtree T1, right subtree T2, root
key x, sizes s1, s2, s = |T|):

    p(T) = p(T1) + p(T2) + s - 1
    w(T) = w(T1) + w(T2) + (s2+1) p(T1) + (s1+1) p(T2) + s + 2 s1 s2 - 1
    wp(T) = wp(T1) + wp(T2) + s x
    ww(T) = ww(T1) + ww(T2) + (s2+1) wp(T1) + (s1+1) wp(T2) + (s + s1 s2) x

``functionals_naive`` recomputes everything from pairwise breadth-first
distances in O(n^2) and is kept deliberately independent as a cross-check.
The weighted Wiener index counts the diagonal: the pair (v, v) contributes
key(v).

Integer functionals on rank trees are exact (Python integers), so the
recursive/naive comparison is an equality test there.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tree import LabelledTree, build_from_keys, iid_keys

NAIVE_SIZE_LIMIT = 5000


@dataclass(frozen=True)
class TreeFunctionals:
    n: int
    path_length: int
    wiener: int | float
    weighted_path_length: float
    weighted_wiener: float

    def as_tuple(self):
        return (self.path_length, self.wiener, self.weighted_path_length, self.weighted_wiener)


def functionals_recursive(tree: LabelledTree) -> TreeFunctionals:
    """All four functionals in one iterative post-order pass."""
    n = tree.n
    rank = tree.rank_model
    p = [0] * n
    w = [0] * n
    wp = [0] * n if rank else [0.0] * n
    ww = [0] * n if rank else [0.0] * n
    # children are inserted after their parent, so reverse insertion order is
    # a valid bottom-up schedule
    for v in range(n - 1, -1, -1):
        l, r = tree.left[v], tree.right[v]
        s1 = tree.size[l] if l >= 0 else 0
        s2 = tree.size[r] if r >= 0 else 0
        s = s1 + s2 + 1
        pl = p[l] if l >= 0 else 0
        pr = p[r] if r >= 0 else 0
        x = tree.keys[v]
        p[v] = pl + pr + s - 1
        w[v] = (w[l] if l >= 0 else 0) + (w[r] if r >= 0 else 0) \
            + (s2 + 1) * pl + (s1 + 1) * pr + s + 2 * s1 * s2 - 1
        wpl = wp[l] if l >= 0 else 0
        wpr = wp[r] if r >= 0 else 0
        wp[v] = wpl + wpr + s * x
        ww[v] = (ww[l] if l >= 0 else 0) + (ww[r] if r >= 0 else 0) \
            + (s2 + 1) * wpl + (s1 + 1) * wpr + (s + s1 * s2) * x
    root = tree.root
    return TreeFunctionals(n, p[root], w[root], wp[root], ww[root])


def functionals_naive(tree: LabelledTree) -> TreeFunctionals:
    """O(n^2) all-pairs oracle via BFS over the undirected tree graph."""
    n = tree.n
    if n > NAIVE_SIZE_LIMIT:
        raise ValueError(f"naive oracle guarded to n <= {NAIVE_SIZE_LIMIT}")
    rank = tree.rank_model
    adj: list = [[] for _ in range(n)]
    for v in range(n):
        for u in (tree.left[v], tree.right[v]):
            if u >= 0:
                adj[v].append(u)
                adj[u].append(v)
    keys = tree.keys
    p = 0
    wp = 0 if rank else 0.0
    w = 0
    ww = 0 if rank else 0.0
    depths = tree.depths()
    wdepths = tree.weighted_depths()
    for v in range(n):
        p += int(depths[v])
        wp += int(round(wdepths[v])) if rank else float(wdepths[v])
    dist = [0] * n
    wsum = [0.0] * n
    for src in range(n):
        dist[src] = 0
        wsum[src] = keys[src]
        frontier = [src]
        seen = [False] * n
        seen[src] = True
        while frontier:
            nxt = []
            for v in frontier:
                for u in adj[v]:
                    if not seen[u]:
                        seen[u] = True
                        dist[u] = dist[v] + 1
                        wsum[u] = wsum[v] + keys[u]
                        nxt.append(u)
            frontier = nxt
        for other in range(src + 1, n):
            w += dist[other]
            ww += int(round(wsum[other])) if rank else wsum[other]
        # diagonal term of the weighted Wiener index
        ww += keys[src]
    return TreeFunctionals(n, p, w, wp, ww)


@dataclass(frozen=True)
class IdentityReport:
    """Deviations of identities that must hold per sample."""

    n: int
    deviations: dict

    def max_relative(self) -> float:
        return max(self.deviations.values())

    def holds(self, tol: float = 1e-9) -> bool:
        return self.max_relative() <= tol


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b), 1.0)
    return abs(a - b) / scale


def affine_relabel_check(tree: LabelledTree, alpha: float, beta: float) -> IdentityReport:
    """Verify how the weighted functionals respond to the relabeling
    ``y -> alpha*y + beta`` of every key:

        wp(aT+b) = a wp(T) + (p(T) + n) b
        ww(aT+b) = a ww(T) + (w(T) + n(n+1)/2) b
    """
    if alpha <= 0 or beta < 0:
        raise ValueError("need alpha > 0 and beta >= 0")
    base = functionals_recursive(tree)
    relabeled = build_from_keys([alpha * k + beta for k in tree.keys])
    got = functionals_recursive(relabeled)
    n = tree.n
    want_wp = alpha * base.weighted_path_length + (base.path_length + n) * beta
    want_ww = alpha * base.weighted_wiener + (base.wiener + n * (n + 1) / 2) * beta
    return IdentityReport(
        n,
        {
            "weighted_path_length": _rel(got.weighted_path_length, want_wp),
            "weighted_wiener": _rel(got.weighted_wiener, want_ww),
            "path_length": _rel(got.path_length, base.path_length),
            "wiener": _rel(got.wiener, base.wiener),
        },
    )


def reflection_check(n: int, seed: int, replicate: int = 0) -> IdentityReport:
    """Build the tree from U_1..U_n and the reflected tree from 1-U_1..1-U_n
    and verify the exact per-sample identities

        wp(T) + wp(T*) = p(T) + n
        ww(T) + ww(T*) = w(T) + n(n+1)/2

    Every path node contributes key + (1 - key) = 1, so the first constant
    counts path nodes over all n root paths and the second counts node pairs
    including the n diagonal pairs: C(n,2) + n = n(n+1)/2.
    """
    keys = iid_keys(n, seed, replicate)
    t = build_from_keys(keys)
    t_ref = build_from_keys(1.0 - keys)
    f = functionals_recursive(t)
    g = functionals_recursive(t_ref)
    return IdentityReport(
        n,
        {
            "weighted_path_length": _rel(
                f.weighted_path_length + g.weighted_path_length, f.path_length + n
            ),
            "weighted_wiener": _rel(
                f.weighted_wiener + g.weighted_wiener, f.wiener + n * (n + 1) / 2
            ),
            "path_length": _rel(f.path_length, g.path_length),
            "wiener": _rel(f.wiener, g.wiener),
        },
    )
