"""Declarative Monte Carlo experiments with per-claim conformance rows.

An :class:`ExperimentSpec` names a procedure (``kind``), the model, sizes,
the rank rule, replicate count, seed, and the pre-registered tolerances.
Tolerances live in the experiment description (file or preset), not in code:
the limit laws converge at 1/sqrt(log n) speed, so every finite-n band must
be explicit and documented.  ``run`` produces :class:`ClaimRow` records: one
estimate, one target, one verdict each.

The preset registry (:func:`builtin_experiments`) contains the canned desk
experiments; ``load_spec_file`` reads the JSON schema::

    {"spec_version": 1,
     "experiments": [{"id": "...", "kind": "...", "n": [10000], ...}]}

Every experiment is reproducible bit-for-bit from (spec, seed).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from . import fixedpoint, kernels, laws, silhouette
from .statlab import CORR_SURROGATE, pearson_corr, scaling_regression, ks_two_sample
from .tree import DyadicPath

EULER_GAMMA = 0.5772156649015329

SPEC_VERSION = 1


@dataclass
class ExperimentSpec:
    id: str
    kind: str
    model: str = "permutation"
    n: List[int] = field(default_factory=lambda: [10**4])
    k_rule: Dict | None = None
    replicates: int = 10**4
    seed: int = 20240817
    outputs: List[str] = field(default_factory=list)
    targets: Dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.id:
            raise ValueError("experiment id required")
        if self.kind not in RUNNERS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.model not in ("permutation", "iid"):
            raise ValueError("model must be 'permutation' or 'iid'")
        if not self.n or any(int(v) < 1 for v in self.n):
            raise ValueError("n values must be positive")


@dataclass
class ClaimRow:
    experiment: str
    claim: str
    estimate: float
    target: float | None
    tolerance: str
    passed: bool
    detail: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.estimate = float(self.estimate)
        self.target = None if self.target is None else float(self.target)
        self.passed = bool(self.passed)


def resolve_k(rule: Dict | None, n: int) -> int:
    """Evaluate a rank rule at n; rounds half-up, clamps to [1, n] warning."""
    rule = rule or {"rule": "alpha_n", "value": 0.5}
    name = rule.get("rule")
    value = rule.get("value", 0.0)
    if name == "fixed":
        k = int(value)
    elif name == "alpha_n":
        k = int(math.floor(value * n + 0.5))
    elif name == "beta_sqrtlog":
        k = int(math.floor(value * n / math.sqrt(math.log(n)) + 0.5))
    elif name == "n_over_log":
        k = int(math.floor(n / math.log(n) + 0.5))
    else:
        raise ValueError(f"unknown k rule {name!r}")
    if k < 1 or k > n:
        warnings.warn(f"k rule {rule} gave {k} at n={n}; clamping")
        k = min(max(k, 1), n)
    return k


# -- runners -------------------------------------------------------------------


def _run_depth_weight_corr(spec: ExperimentSpec) -> List[ClaimRow]:
    """Large-rank regime: standardized depth and weighted depth coincide."""
    n = int(spec.n[0])
    k = resolve_k(spec.k_rule, n)
    d, w = kernels.rank_path_sample(n, k, spec.replicates, spec.seed)
    corr = pearson_corr(d, w)
    floor = float(spec.targets.get("corr_floor", 0.95))
    return [
        ClaimRow(spec.id, f"corr(depth, weighted depth) at k={k}", corr, floor,
                 f">= {floor}", corr >= floor, {"n": n, "replicates": spec.replicates})
    ]


def _run_small_node_dickman(spec: ExperimentSpec) -> List[ClaimRow]:
    """Small-rank regime: the weighted depth centered either by k*depth or by
    its mean, scaled by n, is asymptotically Dickman (the mean-centered
    variant shifts the limit down by 1).  Both centerings are emitted."""
    n = int(spec.n[0])
    k = resolve_k(spec.k_rule or {"rule": "fixed", "value": 1}, n)
    d, w = kernels.rank_path_sample(n, k, spec.replicates, spec.seed)
    ref = laws.dickman_sample(int(spec.targets.get("reference_samples", 10**5)), spec.seed + 1)
    alpha = float(spec.targets.get("alpha", 1e-3))
    rows = []
    rep = ks_two_sample((w - k * d) / n, ref, alpha=alpha)
    rows.append(
        ClaimRow(spec.id, f"KS((W-{k}D)/n, Dickman)", rep.statistic, rep.critical,
                 f"<= crit at alpha={alpha:g}", rep.passed,
                 {"n": n, "replicates": spec.replicates, "centering": "depth"})
    )
    if k == 1:
        # the rank-1 weighted depth has exact mean n (the independent-event
        # mean H_{n-1} + n minus the event-family gap H_{n-1})
        rep2 = ks_two_sample((w - n) / n, ref - 1.0, alpha=alpha)
        rows.append(
            ClaimRow(spec.id, f"KS((W-E[W])/n, Dickman - 1) at k={k}", rep2.statistic,
                     rep2.critical, f"<= crit at alpha={alpha:g}", rep2.passed,
                     {"n": n, "centering": "mean"})
        )
    return rows


def _run_weighted_depth_mean(spec: ExperimentSpec) -> List[ClaimRow]:
    """First-moment expansion of the weighted depth at a mid rank.

    The asymptotic display is k log(k(n-k+1)) + n with an O(k + log n)
    correction whose leading constant is (2*gamma - 3) k; the Monte Carlo mean
    is therefore checked inside an explicit C (k + log n) band.  The
    independent-event variant has an exact mean formula which lands within 2%
    of the display; that analytic comparison is emitted as a second row.
    """
    from .oracle import expected_ind_weighted_depth, expected_weighted_depth

    n = int(spec.n[0])
    k = resolve_k(spec.k_rule, n)
    d, w = kernels.rank_path_sample(n, k, spec.replicates, spec.seed)
    display = k * math.log(k * (n - k + 1)) + n
    c_band = float(spec.targets.get("correction_constant", 2.5))
    band = c_band * (k + math.log(n))
    mean = float(w.mean())
    se = float(w.std(ddof=1) / math.sqrt(w.size))
    dev = abs(mean - display)
    rows = [
        ClaimRow(spec.id, f"mean weighted depth at k={k} vs k log(k(n-k+1)) + n", mean,
                 display, f"|dev| <= {c_band} (k + log n) = {band:.4g} (+3 SE)",
                 dev <= band + 3 * se,
                 {"n": n, "relative_dev": dev / display, "stderr": se}),
    ]
    exact = float(expected_weighted_depth(n, k))
    rows.append(
        ClaimRow(spec.id, f"mean weighted depth at k={k} vs exact formula", mean, exact,
                 "within 4 SE", abs(mean - exact) <= 4 * se, {"n": n, "stderr": se})
    )
    ind = float(expected_ind_weighted_depth(n, k))
    rel = abs(ind - display) / display
    tol = float(spec.targets.get("ind_mean_rel_tol", 0.02))
    rows.append(
        ClaimRow(spec.id, f"independent-event exact mean at k={k} vs display", ind,
                 display, f"relative <= {tol:g}", rel <= tol, {"n": n, "relative_dev": rel})
    )
    return rows


def _run_last_inserted(spec: ExperimentSpec) -> List[ClaimRow]:
    """Joint limit of the last insertion: normal depth, uniform weighted depth,
    asymptotically independent coordinates."""
    n = int(spec.n[0])
    reps = spec.replicates
    d, rank_wx, _, _ = kernels.last_insert_sample(n, reps, spec.seed)
    scale = 2.0 * n * math.log(n)
    ratio = rank_wx / scale
    rows = []
    mean_tol = float(spec.targets.get("mean_tol", 0.02))
    rows.append(
        ClaimRow(spec.id, "mean of weighted depth/(2 n log n)", float(ratio.mean()), 0.5,
                 f"+- {mean_tol:g}", abs(ratio.mean() - 0.5) <= mean_tol, {"n": n})
    )
    # the limit support is [0,1]; at finite n the depth tail pushes ~0.4% of
    # draws past 1.2, so the band is registered on the 99% quantile
    hi = float(spec.targets.get("support_hi", 1.2))
    q99 = float(np.quantile(ratio, 0.99))
    rows.append(
        ClaimRow(spec.id, "99% quantile of weighted depth/(2 n log n)", q99, None,
                 f"positive values, quantile <= {hi:g}", bool((ratio > 0).all() and q99 <= hi),
                 {"n": n, "max": float(ratio.max())})
    )
    depth_ratio = float(d.mean() / (2.0 * math.log(n)))
    depth_tol = float(spec.targets.get("depth_ratio_tol", 0.10))
    rows.append(
        ClaimRow(spec.id, "mean depth / (2 log n)", depth_ratio, 1.0, f"+- {depth_tol:g} relative",
                 abs(depth_ratio - 1.0) <= depth_tol, {"n": n})
    )
    # lenient uniform conformance: finite-n bias is expected, pre-registered band
    ks_band = float(spec.targets.get("uniform_ks_band", 0.1))
    sorted_r = np.sort(np.clip(ratio, 0.0, 1.0))
    grid = np.arange(1, reps + 1) / reps
    ks_stat = float(np.max(np.abs(sorted_r - grid)))
    rows.append(
        ClaimRow(spec.id, "KS(weighted depth/(2 n log n), uniform)", ks_stat, None,
                 f"<= {ks_band:g} (lenient)", ks_stat <= ks_band, {"n": n})
    )
    corr = pearson_corr((d - d.mean()), ratio)
    rows.append(
        ClaimRow(spec.id, "|corr(standardized depth, weighted ratio)|", abs(corr), None,
                 f"<= {CORR_SURROGATE}", abs(corr) <= CORR_SURROGATE,
                 {"n": n, "note": "asymptotic independence emerges at 1/sqrt(log n) rate"})
    )
    return rows


def _run_dfs_comparison(spec: ExperimentSpec) -> List[ClaimRow]:
    """DFS externals track the same-rank internal nodes: bounded mean squared
    depth gap, vanishing relative weighted gap, per-sample sandwich."""
    rows: List[ClaimRow] = []
    ratios = []
    bound = float(spec.targets.get("depth_sq_bound", 10.0))
    for i, n in enumerate(spec.n):
        n = int(n)
        ks = sorted({max(n // 4, 1) - 1, max(n // 2, 1) - 1, max(3 * n // 4, 1) - 1})
        stats = kernels.sample_label_stats(n, ks, spec.replicates, spec.seed, stream_id=i)
        viol = 0
        for idx, k0 in enumerate(ks):
            dd = stats.field("depth", idx)
            de = stats.field("ext_depth", idx)
            wd = stats.field("wdepth", idx)
            we = stats.field("ext_wdepth", idx)
            h = stats.field("subtree_height", idx)
            mx = stats.field("subtree_max_key", idx)
            viol += int(np.sum(~((dd <= de) & (de <= dd + h))))
            viol += int(np.sum(~((wd <= we + 1e-9) & (we <= wd + mx * h + 1e-9))))
            if k0 == max(n // 2, 1) - 1:
                sq = float(np.mean((dd - de) ** 2))
                rows.append(
                    ClaimRow(spec.id, f"E|depth gap|^2 at n={n}, k={k0+1}", sq, None,
                             f"<= {bound:g}", sq <= bound, {"n": n})
                )
                wvar = float(np.var(wd, ddof=1))
                ratios.append(float(np.mean((wd - we) ** 2)) / wvar)
        rows.append(
            ClaimRow(spec.id, f"sandwich violations at n={n}", float(viol), 0.0, "= 0",
                     viol == 0, {"replicates": spec.replicates})
        )
    if len(ratios) >= 2:
        decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
        rows.append(
            ClaimRow(spec.id, "E|weighted gap|^2 / Var(weighted depth) decreasing in n",
                     ratios[-1], None, "strictly decreasing", decreasing,
                     {"ratios": ratios, "n": [int(v) for v in spec.n]})
        )
    return rows


def _run_regime_variance(spec: ExperimentSpec) -> List[ClaimRow]:
    """Boundary-regime variance: Var(weighted depth / n) -> 1/2 + 2 beta^2."""
    n = int(spec.n[0])
    rows = []
    rel_tol = float(spec.targets.get("rel_tol", 0.10))
    for i, beta in enumerate(spec.targets.get("betas", [0.0, 1.0])):
        k = resolve_k({"rule": "beta_sqrtlog", "value": beta}, n) if beta > 0 else 1
        d, w = kernels.rank_path_sample(n, k, spec.replicates, spec.seed, stream_id=i)
        v = float(np.var(w / n, ddof=1))
        target = 0.5 + 2.0 * beta * beta
        rows.append(
            ClaimRow(spec.id, f"Var(weighted depth/n) at beta={beta:g} (k={k})", v, target,
                     f"+- {rel_tol:.0%}", abs(v - target) <= rel_tol * target,
                     {"n": n, "replicates": spec.replicates})
        )
    return rows


def _run_coupling(spec: ExperimentSpec) -> List[ClaimRow]:
    n = int(spec.n[0])
    out = kernels.sample_coupling(n, spec.replicates, spec.seed)
    viol = int(np.sum(out[:, 0] > out[:, 1] + 1e-12))
    return [
        ClaimRow(spec.id, f"coupling bound violations at n={n}", float(viol), 0.0, "= 0",
                 viol == 0, {"replicates": spec.replicates,
                             "max_margin": float(np.max(out[:, 0] - out[:, 1]))})
    ]


def _run_reflection(spec: ExperimentSpec) -> List[ClaimRow]:
    n = int(spec.n[0])
    sample = kernels.sample_functionals(n, spec.replicates, spec.seed, model="iid", reflect=True)
    v = sample.values
    tol = float(spec.targets.get("rel_tol", 1e-9))
    dev_wp = np.max(np.abs(v[:, 2] + v[:, 6] - (v[:, 3] + n))) / max(n, 1)
    dev_ww = np.max(np.abs(v[:, 0] + v[:, 4] - (v[:, 1] + n * (n + 1) / 2))) / (n * (n + 1) / 2)
    return [
        ClaimRow(spec.id, f"weighted path length reflection identity at n={n}", float(dev_wp),
                 0.0, f"relative <= {tol:g}", dev_wp <= tol, {"replicates": spec.replicates}),
        ClaimRow(spec.id, f"weighted Wiener reflection identity at n={n}", float(dev_ww),
                 0.0, f"relative <= {tol:g}", dev_ww <= tol, {"replicates": spec.replicates}),
    ]


def _run_functionals_moments(spec: ExperimentSpec) -> List[ClaimRow]:
    """Mean/variance targets for the four functionals and the entrywise
    comparison of the sample covariance with the fixed-point matrix."""
    n = int(spec.n[0])
    sample = kernels.sample_functionals(n, spec.replicates, spec.seed, model="iid")
    v = sample.values  # (ww, w, wp, p)
    rows = []
    varp_tol = float(spec.targets.get("varp_tol", 0.02))
    varp = float(np.var(v[:, 3], ddof=1)) / n**2
    target_varp = (21 - 2 * math.pi**2) / 3
    rows.append(
        ClaimRow(spec.id, f"Var(path length)/n^2 at n={n}", varp, round(target_varp, 4),
                 f"+- {varp_tol:g}", abs(varp - target_varp) <= varp_tol,
                 {"replicates": spec.replicates})
    )
    wp_tol = float(spec.targets.get("wp_mean_rel_tol", 0.01))
    wp_mean = float(v[:, 2].mean())
    wp_pred = n * math.log(n) + (EULER_GAMMA - 1.5) * n
    ratio = wp_mean / wp_pred
    rows.append(
        ClaimRow(spec.id, f"mean weighted path length / (n log n + (gamma-3/2) n) at n={n}",
                 ratio, 1.0, f"+- {wp_tol:g}", abs(ratio - 1.0) <= wp_tol, {})
    )
    rel = float(spec.targets.get("cov_rel_tol", 0.05))
    m = fixedpoint.solve_second_moments(1e-10).matrix
    z = sample.normalized()
    cov = (z.T @ z) / (z.shape[0] - 1)
    d = np.diag(cov)
    se = np.sqrt((np.outer(d, d) + cov * cov) / z.shape[0])
    scale = np.sqrt(np.outer(np.diag(m), np.diag(m)))
    ok = np.abs(cov - m) <= rel * scale + 3.0 * se
    worst = float(np.max((np.abs(cov - m) - 3.0 * se) / scale))
    rows.append(
        ClaimRow(spec.id, "sample covariance of normalized vector vs fixed-point matrix",
                 worst, None, f"entrywise within {rel:.0%} of scale + 3 SE", bool(ok.all()),
                 {"n": n, "fails": int((~ok).sum())})
    )
    return rows


def _run_scaling(spec: ExperimentSpec) -> List[ClaimRow]:
    """Log-log growth exponents of variances, plus the reported exponent of
    the weighted path length / weighted Wiener covariance."""
    ns = [int(v) for v in spec.n]
    var_p, var_w, var_wp, cov_wpww = [], [], [], []
    for i, n in enumerate(ns):
        # keep the total node budget flat across sizes
        reps = max(int(spec.replicates * min(1.0, 10**4 / n)), min(spec.replicates, 2000))
        sample = kernels.sample_functionals(n, reps, spec.seed, model="iid", stream_id=i)
        v = sample.values
        var_p.append(float(np.var(v[:, 3], ddof=1)))
        var_w.append(float(np.var(v[:, 1], ddof=1)))
        var_wp.append(float(np.var(v[:, 2], ddof=1)))
        c = np.cov(v[:, 2], v[:, 0])[0, 1]
        cov_wpww.append(float(c))
    tol = float(spec.targets.get("slope_tol", 0.15))
    rows = []
    for name, series, want in (
        ("Var(path length)", var_p, 2.0),
        ("Var(Wiener)", var_w, 4.0),
        ("Var(weighted path length)", var_wp, 2.0),
    ):
        fit = scaling_regression(ns, series)
        rows.append(
            ClaimRow(spec.id, f"log-log slope of {name}", fit.slope, want, f"+- {tol:g}",
                     abs(fit.slope - want) <= tol,
                     {"stderr": fit.stderr, "n": ns, "values": series})
        )
    fit = scaling_regression(ns, [abs(c) for c in cov_wpww])
    rows.append(
        ClaimRow(spec.id, "log-log slope of Cov(weighted path length, weighted Wiener)",
                 fit.slope, None, "reported (scaling question)", True,
                 {"stderr": fit.stderr, "values": cov_wpww,
                  "note": "printed expansion says n^3; the normalized entry then converges"})
    )
    return rows


def _run_silhouette_joint(spec: ExperimentSpec) -> List[ClaimRow]:
    """Joint silhouette limit at a fixed dyadic point: depth is normal at the
    log n scale while the weighted ratio converges to the path limit; the
    coordinates decorrelate at 1/sqrt(log n) speed."""
    n = int(spec.n[0])
    x = float(spec.targets.get("x", 0.5))
    path = DyadicPath.from_value(x)
    d, w = kernels.dyadic_path_sample(n, path, spec.replicates, spec.seed)
    ratio = w / math.log(n)
    rows = []
    # finite-n bias of the ratio mean is ~ (x c + C)/log n, a few percent at
    # desk n; the band is pre-registered accordingly
    mean_tol = float(spec.targets.get("mean_tol", 0.08))
    rows.append(
        ClaimRow(spec.id, f"mean weighted silhouette ratio at x={x:g}", float(ratio.mean()), x,
                 f"+- {mean_tol:g}", abs(ratio.mean() - x) <= mean_tol,
                 {"n": n, "note": "limit evaluation has mean x"})
    )
    corr = pearson_corr(d, ratio)
    rows.append(
        ClaimRow(spec.id, f"|corr(depth, weighted ratio)| at x={x:g}", abs(corr), None,
                 f"<= {CORR_SURROGATE}", abs(corr) <= CORR_SURROGATE,
                 {"n": n, "note": "asymptotic independence emerges at 1/sqrt(log n) rate"})
    )
    return rows


def _run_increment_bound(spec: ExperimentSpec) -> List[ClaimRow]:
    """Mean sup increments of the refinement process vs the geometric bound."""
    kmax = int(spec.targets.get("max_level", 20))
    sup = silhouette.increment_sup_samples(kmax, spec.replicates, spec.seed)
    worst = -1.0
    ok = True
    for k in range(1, kmax + 1):
        col = sup[:, k - 1]
        mean = col.mean()
        se = col.std(ddof=1) / math.sqrt(col.size)
        margin = (mean + 3 * se) / silhouette.increment_bound(k)
        worst = max(worst, margin)
        ok = ok and margin <= 1.0
    return [
        ClaimRow(spec.id, f"sup increment mean + 3 SE vs 2 (2/3)^(k/2), k <= {kmax}",
                 worst, None, "ratio <= 1", ok, {"replicates": spec.replicates})
    ]


RUNNERS: Dict[str, Callable[[ExperimentSpec], List[ClaimRow]]] = {
    "depth_weight_corr": _run_depth_weight_corr,
    "small_node_dickman": _run_small_node_dickman,
    "weighted_depth_mean": _run_weighted_depth_mean,
    "last_inserted": _run_last_inserted,
    "dfs_comparison": _run_dfs_comparison,
    "regime_variance": _run_regime_variance,
    "coupling": _run_coupling,
    "reflection": _run_reflection,
    "functionals_moments": _run_functionals_moments,
    "scaling": _run_scaling,
    "silhouette_joint": _run_silhouette_joint,
    "increment_bound": _run_increment_bound,
}


def run(spec: ExperimentSpec) -> List[ClaimRow]:
    spec.validate()
    return RUNNERS[spec.kind](spec)


def run_last_inserted(n_values: Sequence[int], replicates: int, seed: int) -> List[ClaimRow]:
    rows: List[ClaimRow] = []
    for n in n_values:
        spec = ExperimentSpec(id=f"last-inserted-n{n}", kind="last_inserted", model="iid",
                              n=[int(n)], replicates=replicates, seed=seed)
        rows.extend(run(spec))
    return rows


def run_dfs_comparison(n_values: Sequence[int], replicates: int, seed: int) -> List[ClaimRow]:
    spec = ExperimentSpec(id="dfs-comparison", kind="dfs_comparison", model="permutation",
                          n=[int(v) for v in n_values], replicates=replicates, seed=seed)
    return run(spec)


# -- presets and files ----------------------------------------------------------


def builtin_experiments(seed: int = 20240817) -> Dict[str, ExperimentSpec]:
    """The canned desk experiments with pre-registered tolerances."""
    return {
        "thm1-midpoint": ExperimentSpec(
            id="thm1-midpoint", kind="depth_weight_corr", model="permutation", n=[10**5],
            k_rule={"rule": "alpha_n", "value": 0.5}, replicates=10**4, seed=seed,
            targets={"corr_floor": 0.95}),
        "thm2-k1": ExperimentSpec(
            id="thm2-k1", kind="small_node_dickman", model="permutation", n=[10**5],
            k_rule={"rule": "fixed", "value": 1}, replicates=10**4, seed=seed + 1),
        "moments-w-mid": ExperimentSpec(
            id="moments-w-mid", kind="weighted_depth_mean", model="permutation", n=[10**4],
            k_rule={"rule": "alpha_n", "value": 0.5}, replicates=2 * 10**4, seed=seed + 2),
        "last-inserted": ExperimentSpec(
            id="last-inserted", kind="last_inserted", model="iid", n=[10**5],
            replicates=10**5, seed=seed + 3),
        "dfs-compare": ExperimentSpec(
            id="dfs-compare", kind="dfs_comparison", model="permutation",
            n=[10**3, 10**4, 10**5], replicates=2048, seed=seed + 4),
        "regime-beta": ExperimentSpec(
            id="regime-beta", kind="regime_variance", model="permutation", n=[10**5],
            replicates=3 * 10**4, seed=seed + 5, targets={"betas": [0.0, 1.0]}),
        "coupling": ExperimentSpec(
            id="coupling", kind="coupling", model="iid", n=[100], replicates=10**4,
            seed=seed + 6),
        "reflection": ExperimentSpec(
            id="reflection", kind="reflection", model="iid", n=[1000], replicates=10**4,
            seed=seed + 7),
        "pathlen-moments": ExperimentSpec(
            id="pathlen-moments", kind="functionals_moments", model="iid", n=[10**4],
            replicates=10**5, seed=seed + 8),
        "scaling-variance": ExperimentSpec(
            id="scaling-variance", kind="scaling", model="iid", n=[10**3, 10**4, 10**5],
            replicates=2 * 10**4, seed=seed + 9),
        "silhouette-joint": ExperimentSpec(
            id="silhouette-joint", kind="silhouette_joint", model="iid", n=[10**5],
            replicates=10**5, seed=seed + 10, targets={"x": 0.5}),
        "increment-bound": ExperimentSpec(
            id="increment-bound", kind="increment_bound", model="iid", n=[1],
            replicates=300, seed=seed + 11, targets={"max_level": 20}),
    }


def load_spec_file(path) -> List[ExperimentSpec]:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("spec_version") != SPEC_VERSION:
        raise ValueError(f"unsupported spec_version {payload.get('spec_version')!r}")
    specs = []
    ids = set()
    for entry in payload.get("experiments", []):
        spec = ExperimentSpec(**entry)
        spec.validate()
        if spec.id in ids:
            raise ValueError(f"duplicate experiment id {spec.id!r}")
        ids.add(spec.id)
        specs.append(spec)
    if not specs:
        raise ValueError("spec file contains no experiments")
    return specs


def spec_to_jsonable(spec: ExperimentSpec) -> Dict:
    return asdict(spec)


def write_results_csv(rows: List[ClaimRow], path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["experiment", "claim", "estimate", "target", "tolerance", "verdict"])
        for r in rows:
            wr.writerow([
                r.experiment, r.claim, repr(r.estimate),
                "" if r.target is None else repr(r.target), r.tolerance,
                "pass" if r.passed else "FAIL",
            ])


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value)}")


def write_results_jsonl(rows: List[ClaimRow], path) -> None:
    with open(path, "w") as fh:
        for r in rows:
            fh.write(json.dumps(asdict(r), sort_keys=True, default=_jsonable) + "\n")
