"""Exact brute-force enumeration over all n! permutations (n <= 8).

Every statistic is tallied as an exact integer over the n! trees and reported
as a ``fractions.Fraction``, so formula checks are equality tests, not
tolerance tests.

Event notation used throughout: ``anc[j][k]`` is the event that the node
labelled ``k`` lies in the subtree of the node labelled ``j`` (equivalently,
``j`` arrives first among the ranks between ``j`` and ``k``, inclusive).  The
independent-event variant replaces it, for ``j < k``, by the same event with
target ``k - 1`` and, for ``j > k``, target ``k + 1``; the variant with
``j = k`` is almost sure.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

MAX_N = 8
MAX_N_SUBSETS = 7


def harmonic(m: int, power: int = 1) -> Fraction:
    """Exact generalized harmonic number ``sum_{j<=m} j^-power`` (0 for m <= 0)."""
    return sum((Fraction(1, j**power) for j in range(1, m + 1)), Fraction(0))


@dataclass
class ExactMoments:
    """Exact expectations/variances for one n, plus event probability tables."""

    n: int
    # statistic name -> k (1-based) -> Fraction
    mean: Dict[str, List[Fraction]] = field(default_factory=dict)
    var: Dict[str, List[Fraction]] = field(default_factory=dict)
    # scalar statistics (path length, Wiener index, last-node depths)
    scalar_mean: Dict[str, Fraction] = field(default_factory=dict)
    scalar_var: Dict[str, Fraction] = field(default_factory=dict)
    # prob_anc[j][k] = P(node k in subtree of node j), 1-based
    prob_anc: List[List[Fraction]] = field(default_factory=list)
    prob_ind: List[List[Fraction]] = field(default_factory=list)
    # per-k histogram of the independent-event indicator masks (for subset checks)
    mask_counts: List[Dict[int, int]] = field(default_factory=list)


def _ancestor_matrix(perm: Tuple[int, ...]) -> List[int]:
    """Bitmasks: row j (0-based) has bit k set iff rank j+1 is an
    ancestor-or-self of rank k+1 in the BST built from ``perm``.

    Uses the arrival characterization: j is ancestor-or-self of k iff j
    arrives first among ranks min(j,k)..max(j,k).
    """
    n = len(perm)
    t = [0] * (n + 1)
    for time, r in enumerate(perm):
        t[r] = time
    rows = [0] * n
    for j in range(1, n + 1):
        # scan outwards from j; j remains ancestor of k while its arrival time
        # stays the running minimum of the interval
        rows[j - 1] |= 1 << (j - 1)
        m = t[j]
        for k in range(j + 1, n + 1):
            if t[k] < m:
                break
            rows[j - 1] |= 1 << (k - 1)
        m = t[j]
        for k in range(j - 1, 0, -1):
            if t[k] < m:
                break
            rows[j - 1] |= 1 << (k - 1)
    return rows


def enumerate_exact(n: int) -> ExactMoments:
    """Iterate all n! permutations and tally every statistic exactly."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"enumeration supported for 1 <= n <= {MAX_N}")
    total = math.factorial(n)
    depth_sum = [0] * n
    depth_sq = [0] * n
    wdepth_sum = [0] * n
    wdepth_sq = [0] * n
    ind_depth_sum = [0] * n
    ind_depth_sq = [0] * n
    ind_wdepth_sum = [0] * n
    ind_wdepth_sq = [0] * n
    anc_count = [[0] * n for _ in range(n)]
    ind_count = [[0] * n for _ in range(n)]
    mask_counts: List[Dict[int, int]] = [dict() for _ in range(n)]
    p_sum = p_sq = 0
    w_sum = w_sq = 0
    x_sum = x_sq = 0
    wx_sum = wx_sq = 0
    for perm in itertools.permutations(range(1, n + 1)):
        rows = _ancestor_matrix(perm)
        # per-k columns of the ancestor matrix
        cols = [0] * n
        for j in range(n):
            row = rows[j]
            while row:
                low = row & -row
                cols[low.bit_length() - 1] |= 1 << j
                row ^= low
        path_len = 0
        for k in range(n):
            mask = cols[k]
            d = mask.bit_count() - 1
            wsum = 0
            m = mask
            while m:
                low = m & -m
                wsum += low.bit_length()
                m ^= low
            depth_sum[k] += d
            depth_sq[k] += d * d
            wdepth_sum[k] += wsum
            wdepth_sq[k] += wsum * wsum
            path_len += d
            for j in range(n):
                if mask >> j & 1:
                    anc_count[j][k] += 1
            # independent-event variant: left neighbours target k-1,
            # right neighbours target k+1, self almost sure
            imask = 1 << k
            if k > 0:
                imask |= cols[k - 1] & ((1 << k) - 1)
            if k < n - 1:
                imask |= cols[k + 1] & ~((1 << (k + 1)) - 1)
            idepth = imask.bit_count() - 1
            iwsum = 0
            m = imask
            while m:
                low = m & -m
                iwsum += low.bit_length()
                m ^= low
            ind_depth_sum[k] += idepth
            ind_depth_sq[k] += idepth * idepth
            ind_wdepth_sum[k] += iwsum
            ind_wdepth_sq[k] += iwsum * iwsum
            for j in range(n):
                if imask >> j & 1:
                    ind_count[j][k] += 1
            mask_counts[k][imask] = mask_counts[k].get(imask, 0) + 1
        # scalar statistics
        p_sum += path_len
        p_sq += path_len * path_len
        w = _wiener(rows, n)
        w_sum += w
        w_sq += w * w
        last = perm[-1] - 1
        xd = cols[last].bit_count() - 1
        xw = 0
        m = cols[last]
        while m:
            low = m & -m
            xw += low.bit_length()
            m ^= low
        x_sum += xd
        x_sq += xd * xd
        wx_sum += xw
        wx_sq += xw * xw

    out = ExactMoments(n=n)

    def seq(sums, sqs):
        means = [Fraction(s, total) for s in sums]
        vs = [Fraction(q, total) - mu * mu for q, mu in zip(sqs, means)]
        return means, vs

    out.mean["depth"], out.var["depth"] = seq(depth_sum, depth_sq)
    out.mean["weighted_depth"], out.var["weighted_depth"] = seq(wdepth_sum, wdepth_sq)
    out.mean["ind_depth"], out.var["ind_depth"] = seq(ind_depth_sum, ind_depth_sq)
    out.mean["ind_weighted_depth"], out.var["ind_weighted_depth"] = seq(
        ind_wdepth_sum, ind_wdepth_sq
    )
    for name, s, q in (
        ("path_length", p_sum, p_sq),
        ("wiener", w_sum, w_sq),
        ("last_depth", x_sum, x_sq),
        ("last_weighted_depth", wx_sum, wx_sq),
    ):
        mu = Fraction(s, total)
        out.scalar_mean[name] = mu
        out.scalar_var[name] = Fraction(q, total) - mu * mu
    out.prob_anc = [[Fraction(c, total) for c in row] for row in anc_count]
    out.prob_ind = [[Fraction(c, total) for c in row] for row in ind_count]
    out.mask_counts = mask_counts
    return out


def _wiener(rows: List[int], n: int) -> int:
    """Wiener index from the ancestor matrix: dist(u,v) = depth(u) + depth(v)
    - 2 depth(lca), and the lca depth equals |common ancestors| - 1."""
    depths = [0] * n
    cols = [0] * n
    for j in range(n):
        row = rows[j]
        while row:
            low = row & -row
            cols[low.bit_length() - 1] |= 1 << j
            row ^= low
    for k in range(n):
        depths[k] = cols[k].bit_count() - 1
    w = 0
    for u in range(n):
        for v in range(u + 1, n):
            common = (cols[u] & cols[v]).bit_count() - 1
            w += depths[u] + depths[v] - 2 * common
    return w


# -- formula checks -----------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    n: int
    checked: int
    failures: List[str]

    @property
    def passed(self) -> bool:
        return not self.failures


def lemma_marginal(n: int, j: int, k: int) -> Fraction:
    """P(ancestor event) = 1/(|k-j|+1); independent variant 1/|k-j| (1 if j=k)."""
    return Fraction(1, abs(k - j) + 1)


def lemma1_check(n: int, moments: ExactMoments | None = None) -> CheckReport:
    """Check the exact marginals and the full mutual independence of the
    independent-event family: for every k and every subset S of ranks,
    P(all events in S) = prod of the marginals."""
    if n > MAX_N_SUBSETS:
        raise ValueError(f"subset independence check supported for n <= {MAX_N_SUBSETS}")
    mom = moments if moments is not None else enumerate_exact(n)
    total = math.factorial(n)
    failures: List[str] = []
    checked = 0
    for k in range(1, n + 1):
        hist = mom.mask_counts[k - 1]
        # superset-sum: count[S] = number of permutations whose mask contains S
        count = [0] * (1 << n)
        for mask, c in hist.items():
            count[mask] += c
        for bit in range(n):
            step = 1 << bit
            for s in range(1 << n):
                if s & step:
                    count[s ^ step] += count[s]
        for s in range(1 << n):
            prob = Fraction(count[s], total)
            want = Fraction(1)
            m = s
            while m:
                low = m & -m
                j = low.bit_length()
                if j != k:
                    want *= Fraction(1, abs(k - j))
                m ^= low
            checked += 1
            if prob != want:
                failures.append(f"k={k} subset={s:0{n}b}: P={prob} != {want}")
        # marginals of the raw ancestor events
        for j in range(1, n + 1):
            if j == k:
                continue
            checked += 1
            if mom.prob_anc[j - 1][k - 1] != lemma_marginal(n, j, k):
                failures.append(f"P(anc {j},{k}) = {mom.prob_anc[j-1][k-1]}")
    return CheckReport("lemma1", n, checked, failures)


def expected_depth(n: int, k: int) -> Fraction:
    """Exact mean depth of the rank-k node: H1(k) + H1(n-k+1) - 2."""
    return harmonic(k) + harmonic(n - k + 1) - 2


def expected_weighted_depth(n: int, k: int) -> Fraction:
    """Exact mean weighted depth of the rank-k node.

    Every ancestor event is contained in its independent-event counterpart,
    and the containment gap at distance d has probability 1/(d(d+1)), so the
    independent-event mean k(H1(k-1)+H1(n-k)-1)+n+1 is corrected by
    sum_d (k -+ d)/(d(d+1)) over both sides.
    """
    gap = sum(
        (Fraction(k - d, d * (d + 1)) for d in range(1, k)), Fraction(0)
    ) + sum(
        (Fraction(k + d, d * (d + 1)) for d in range(1, n - k + 1)), Fraction(0)
    )
    return expected_ind_weighted_depth(n, k) - gap


def expected_ind_weighted_depth(n: int, k: int) -> Fraction:
    """Closed form for the mean of the independent-event weighted depth:
    k (H1(k-1) + H1(n-k) - 1) + n + 1."""
    return k * (harmonic(k - 1) + harmonic(n - k) - 1) + n + 1


def variance_ind_weighted_depth(n: int, k: int) -> Fraction:
    """Closed form for its variance:
    k^2 (H1 - H2 - 3) + n^2/2 + kn + 2k (H1(k-1) - H1(n-k)) - n/2 + k + 1,
    where H1/H2 are the generalized harmonic sums at k-1 and n-k combined."""
    h1 = harmonic(k - 1) + harmonic(n - k)
    h2 = harmonic(k - 1, 2) + harmonic(n - k, 2)
    return (
        k * k * (h1 - h2 - 3)
        + Fraction(n * n, 2)
        + k * n
        + 2 * k * (harmonic(k - 1) - harmonic(n - k))
        - Fraction(n, 2)
        + k
        + 1
    )


def exact_moment_formula_check(n: int, moments: ExactMoments | None = None) -> CheckReport:
    """Enumerated mean/variance of the independent-event weighted depth must
    equal the closed forms exactly for every k."""
    mom = moments if moments is not None else enumerate_exact(n)
    failures: List[str] = []
    checked = 0
    for k in range(1, n + 1):
        want_mean = expected_ind_weighted_depth(n, k)
        want_var = variance_ind_weighted_depth(n, k)
        got_mean = mom.mean["ind_weighted_depth"][k - 1]
        got_var = mom.var["ind_weighted_depth"][k - 1]
        checked += 2
        if got_mean != want_mean:
            failures.append(f"mean k={k}: {got_mean} != {want_mean}")
        if got_var != want_var:
            failures.append(f"var k={k}: {got_var} != {want_var}")
    return CheckReport("ind_weighted_depth_formulas", n, checked, failures)


def subtree_tail_check(n: int) -> CheckReport:
    """P(number of larger ranks in the subtree of k >= ell) = 1/(ell+1) and
    equals P(ancestor event of k over k+ell), for every k and ell <= n-k."""
    total = math.factorial(n)
    tail = [[0] * (n + 2) for _ in range(n)]
    anc = [[0] * (n + 1) for _ in range(n)]
    for perm in itertools.permutations(range(1, n + 1)):
        rows = _ancestor_matrix(perm)
        for k in range(1, n + 1):
            row = rows[k - 1]
            larger = row >> k  # bits for ranks > k
            cnt = larger.bit_count()
            for ell in range(0, cnt + 1):
                tail[k - 1][ell] += 1
            for ell in range(1, n - k + 1):
                if row >> (k + ell - 1) & 1:
                    anc[k - 1][ell] += 1
    failures: List[str] = []
    checked = 0
    for k in range(1, n + 1):
        for ell in range(0, n - k + 1):
            checked += 1
            got = Fraction(tail[k - 1][ell], total)
            if got != Fraction(1, ell + 1):
                failures.append(f"tail k={k} ell={ell}: {got}")
            if ell >= 1 and tail[k - 1][ell] != anc[k - 1][ell]:
                failures.append(f"tail/anc mismatch k={k} ell={ell}")
    return CheckReport("subtree_tail", n, checked, failures)


def reflection_mean_check(n: int, moments: ExactMoments | None = None) -> CheckReport:
    """E[weighted depth of k] + E[weighted depth of n+1-k] must equal
    (n+1) (E[depth of k] + 1) by the rank-reflection bijection."""
    mom = moments if moments is not None else enumerate_exact(n)
    failures: List[str] = []
    checked = 0
    for k in range(1, n + 1):
        lhs = mom.mean["weighted_depth"][k - 1] + mom.mean["weighted_depth"][n - k]
        rhs = (n + 1) * (mom.mean["depth"][k - 1] + 1)
        checked += 1
        if lhs != rhs:
            failures.append(f"k={k}: {lhs} != {rhs}")
    return CheckReport("reflection_means", n, checked, failures)


def write_moment_csv(moments: ExactMoments, path) -> None:
    """Exact-moment table with rational strings and decimal columns."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["n", "statistic", "k", "mean", "mean_decimal", "var", "var_decimal"])
        for name in sorted(moments.mean):
            for k in range(1, moments.n + 1):
                mu = moments.mean[name][k - 1]
                va = moments.var[name][k - 1]
                wr.writerow(
                    [moments.n, name, k, f"{mu.numerator}/{mu.denominator}", float(mu),
                     f"{va.numerator}/{va.denominator}", float(va)]
                )
        for name in sorted(moments.scalar_mean):
            mu = moments.scalar_mean[name]
            va = moments.scalar_var[name]
            wr.writerow(
                [moments.n, name, "", f"{mu.numerator}/{mu.denominator}", float(mu),
                 f"{va.numerator}/{va.denominator}", float(va)]
            )
