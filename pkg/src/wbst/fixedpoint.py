"""Second moments of the joint limit of (weighted Wiener index, Wiener index,
weighted path length, path length).

The centered, normalized vector converges to the unique zero-mean fixed point
``Z =d A1(U) Z + A2(U) Z' + C(U)`` with U uniform on (0,1) and Z, Z', U
independent.  Taking outer products and using that Z has mean zero kills all
cross terms, so the 4x4 second-moment matrix solves the linear equation

    M = E[A1 M A1^T] + E[A2 M A2^T] + E[C C^T].

We assemble the 16x16 Kronecker operator K = E[A1 (x) A1 + A2 (x) A2] by
adaptive quadrature and solve (I - K) vec(M) = vec(E[C C^T]) directly; the
spectral radius of K is exactly E[U^2] + E[(1-U)^2] = 2/3, so the system is
uniquely solvable and a residual certificate is reported.

Coordinate order everywhere: (ww, w, wp, p) = (weighted Wiener, Wiener,
weighted path length, path length).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import integrate

PI2 = math.pi * math.pi

#: analytic targets for every entry of M, in (ww, w, wp, p) indexing
TARGETS: Dict[Tuple[int, int], float] = {
    (3, 3): (21 - 2 * PI2) / 3,        # Var limit of path length / n
    (2, 2): (65 - 6 * PI2) / 36,       # Var limit of weighted path length / n
    (1, 1): (20 - 2 * PI2) / 3,        # Var limit of Wiener / n^2
    (0, 0): (2413 - 240 * PI2) / 1440,  # Var limit of weighted Wiener / n^2
    (2, 3): (21 - 2 * PI2) / 6,
    (1, 3): (20 - 2 * PI2) / 3,
    (1, 2): (10 - PI2) / 3,
    (0, 3): (10 - PI2) / 3,
    (0, 1): (10 - PI2) / 3,
    (0, 2): (481 - 48 * PI2) / 288,
}

NAMES = ("ww", "w", "wp", "p")


def coeff_a1(u: float) -> np.ndarray:
    """Left-subtree coefficient matrix; upper triangular, spectral radius u."""
    v = 1.0 - u
    return np.array(
        [
            [u**3, 0.0, u * u * v, 0.0],
            [0.0, u * u, 0.0, u * v],
            [0.0, 0.0, u * u, 0.0],
            [0.0, 0.0, 0.0, u],
        ]
    )


def coeff_a2(u: float) -> np.ndarray:
    """Right-subtree coefficient matrix; spectral radius 1 - u."""
    v = 1.0 - u
    return np.array(
        [
            [v**3, u * v * v, u * v * v, u * u * v],
            [0.0, v * v, 0.0, u * v],
            [0.0, 0.0, v * v, u * v],
            [0.0, 0.0, 0.0, v],
        ]
    )


def coeff_c(u: float) -> np.ndarray:
    """Toll-term vector; entries combine u log u terms with polynomials.

    The u -> 0 and u -> 1 limits exist (x log x -> 0) and the componentwise
    mean over u is zero, as it must be for a zero-mean fixed point.
    """
    if not 0.0 < u < 1.0:
        raise ValueError("coefficients are defined on the open interval (0,1)")
    v = 1.0 - u
    lu = math.log(u)
    lv = math.log(v)
    return np.array(
        [
            u * u * lu + (1.0 - u * u) * lv + u * (-14.0 * u * u + 9.0 * u + 5.0) / 4.0,
            2.0 * u * lu + 2.0 * v * lv + 6.0 * u * v,
            u * u * lu + (1.0 - u * u) * lv + u,
            2.0 * u * lu + 2.0 * v * lv + 1.0,
        ]
    )


def spectral_radius(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(m))))


@dataclass
class ContractionReport:
    analytic_sum: float          # E[rho(A1)^2] + E[rho(A2)^2] = 2/3 exactly
    numeric_sum: float           # same quantity by quadrature of eigenvalues
    max_radius_error: float      # max_u |rho(A1(u)) - u| over the test grid
    gram_sum: float              # E[rho(A1 A1^T)] + E[rho(A2 A2^T)] (op-norm form)

    @property
    def contracts(self) -> bool:
        return self.numeric_sum < 1.0


def contraction_check(grid_size: int = 2001) -> ContractionReport:
    """Verify the contraction condition guaranteeing the unique fixed point."""
    us = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    rad1 = np.array([spectral_radius(coeff_a1(u)) for u in us])
    rad2 = np.array([spectral_radius(coeff_a2(u)) for u in us])
    max_err = float(np.max(np.abs(rad1 - us)))
    max_err = max(max_err, float(np.max(np.abs(rad2 - (1.0 - us)))))
    numeric = _quad(
        lambda u: spectral_radius(coeff_a1(u)) ** 2 + spectral_radius(coeff_a2(u)) ** 2,
        1e-12,
    )
    gram = float(
        np.trapezoid(
            [
                spectral_radius(coeff_a1(u) @ coeff_a1(u).T)
                + spectral_radius(coeff_a2(u) @ coeff_a2(u).T)
                for u in us
            ],
            us,
        )
    )
    return ContractionReport(2.0 / 3.0, numeric, max_err, gram)


def _quad(f: Callable[[float], float], tol: float) -> float:
    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=200)
    return val


def mean_toll(tol: float = 1e-12) -> np.ndarray:
    """Componentwise E[C(U)]; must vanish."""
    return np.array([_quad(lambda u, i=i: coeff_c(u)[i], tol) for i in range(4)])


@dataclass
class MomentSystem:
    matrix: np.ndarray           # the solved 4x4 second-moment matrix
    residual: float              # sup-norm fixed-point residual
    quad_tol: float
    kron_spectral_radius: float

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix[i, j])

    def target_errors(self) -> Dict[str, Tuple[float, float, float]]:
        """name -> (computed, target, abs error) for each analytic constant."""
        out = {}
        for (i, j), target in TARGETS.items():
            name = f"{'var' if i == j else 'cov'}({NAMES[i]}{',' + NAMES[j] if i != j else ''})"
            c = self.entry(i, j)
            out[name] = (c, target, abs(c - target))
        return out

    def max_target_error(self) -> float:
        return max(err for _, _, err in self.target_errors().values())

    def is_psd(self) -> bool:
        try:
            np.linalg.cholesky(self.matrix + 1e-15 * np.eye(4))
            return True
        except np.linalg.LinAlgError:
            return False


def solve_second_moments(quad_tol: float = 1e-10) -> MomentSystem:
    """Assemble and solve the 10-unknown (vectorized 16x16) linear system."""
    if quad_tol > 1e-8:
        raise ValueError("quad_tol must be <= 1e-8")
    kron = np.zeros((16, 16))
    for a in range(16):
        for b in range(16):
            i, j = divmod(a, 4)
            k, l = divmod(b, 4)

            def integrand(u, i=i, j=j, k=k, l=l):
                m1 = coeff_a1(u)
                m2 = coeff_a2(u)
                return m1[i, k] * m1[j, l] + m2[i, k] * m2[j, l]

            # entries are polynomials in u; quadrature keeps one uniform path
            kron[a, b] = _quad(integrand, quad_tol)
    rhs = np.zeros((4, 4))
    for i in range(4):
        for j in range(i, 4):
            rhs[i, j] = _quad(lambda u, i=i, j=j: coeff_c(u)[i] * coeff_c(u)[j], quad_tol)
            rhs[j, i] = rhs[i, j]
    system = np.eye(16) - kron
    vec_m = np.linalg.solve(system, rhs.reshape(16))
    m = vec_m.reshape(4, 4)
    m = 0.5 * (m + m.T)
    radius = float(np.max(np.abs(np.linalg.eigvals(kron))))
    # independent residual: re-apply the moment map by direct quadrature
    def mapped(i, j):
        def integrand(u):
            m1 = coeff_a1(u)
            m2 = coeff_a2(u)
            return (m1 @ m @ m1.T)[i, j] + (m2 @ m @ m2.T)[i, j]

        return _quad(integrand, quad_tol)

    resid = 0.0
    for i in range(4):
        for j in range(i, 4):
            resid = max(resid, abs(m[i, j] - mapped(i, j) - rhs[i, j]))
    return MomentSystem(matrix=m, residual=resid, quad_tol=quad_tol, kron_spectral_radius=radius)


def covariance_report(system: MomentSystem, flag_tol: float = 1e-6):
    """All ten second-moment constants with their analytic targets.

    Returns a list of rows (name, computed, target, abs_error, ok).
    """
    rows = []
    for name, (computed, target, err) in sorted(system.target_errors().items()):
        rows.append((name, computed, target, err, err <= flag_tol))
    return rows


def write_constants(system: MomentSystem, csv_path=None, json_path=None) -> None:
    rows = covariance_report(system)
    if csv_path is not None:
        import csv as _csv

        with open(csv_path, "w", newline="") as fh:
            wr = _csv.writer(fh)
            wr.writerow(["name", "computed", "target", "abs_error", "ok"])
            for name, c, t, e, ok in rows:
                wr.writerow([name, f"{c:.15g}", f"{t:.15g}", f"{e:.3e}", int(ok)])
    if json_path is not None:
        payload = {
            "residual": system.residual,
            "quad_tol": system.quad_tol,
            "kron_spectral_radius": system.kron_spectral_radius,
            "constants": [
                {"name": name, "computed": c, "target": t, "abs_error": e, "ok": bool(ok)}
                for name, c, t, e, ok in rows
            ],
        }
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=2)
