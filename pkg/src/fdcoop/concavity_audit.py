# Numerical verification that the optimized objectives are concave:
# analytic Hessian eigenvalues against finite-difference Hessians.
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

EIGENVALUE_SLACK = 1e-6       # absolute non-positivity slack for fd eigenvalues
RELATIVE_MATCH_TOL = 1e-3     # fd vs analytic on the nonzero eigenvalue
DEFAULT_AUDIT_STEP = 3e-4     # relative fd step balancing truncation vs roundoff


@dataclass(frozen=True)
class AuditPoint:
    """Positive evaluation point (powers x, y; gains a, b; SI term c = z*gamma).

    Powers and gains must be strictly positive so the eigenvalue denominators
    stay away from zero; c may be zero (self-interference disabled).
    """

    x: float
    y: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        vals = (self.x, self.y, self.a, self.b, self.c)
        if not all(np.isfinite(vals)) or any(v <= 0 for v in vals[:4]) or self.c < 0:
            raise ValueError("audit points must be finite with x, y, a, b > 0 and c >= 0")


def simplified_coop_objective(x: float, y: float, a: float, b: float, c: float) -> float:
    """1 + simplified cooperative SINR, the field whose concavity is proved."""
    return 1.0 + x * y * a * b / (a * c * x + b * y)


def noncoop_rate_objective(x: float, b: float, c: float, z: float) -> float:
    """Two-slot direct rate log2(1 + b*x/(c*z + 1)) as a function of the power x."""
    return np.log2(1.0 + b * x / (c * z + 1.0))


def analytic_coop_eigenvalues(p: AuditPoint) -> tuple[float, float]:
    """Eigenvalues of the simplified cooperative objective's Hessian in (x, y)."""
    x, y, a, b, c = p.x, p.y, p.a, p.b, p.c
    den = a**3 * c**3 * x**3 + 3 * a**2 * b * c**2 * x**2 * y \
        + 3 * a * b**2 * c * x * y**2 + b**3 * y**3
    if den == 0.0:
        raise ZeroDivisionError("eigenvalue denominator vanished")
    num = 2 * c * a**2 * b**2 * x**2 + 2 * c * a**2 * b**2 * y**2
    return 0.0, -num / den


def analytic_noncoop_eigenvalues(b: float, x: float, c: float, z: float) -> tuple[float, float]:
    """Eigenvalues of the direct-rate Hessian; only the power direction is curved."""
    den = b * x + c * z + 1.0
    if den <= 0:
        raise ValueError("requires b*x + c*z + 1 > 0")
    return 0.0, -b * b / (np.log(2.0) * den * den)


def fd_hessian(f: Callable[[float, float], float], at: tuple[float, float],
               step: float = 1e-5) -> np.ndarray:
    """Central-difference 2x2 Hessian of f at the given point, symmetrized.

    Per-coordinate step h = max(step*|coordinate|, 1e-7).
    """
    x0, y0 = at
    hx = max(step * abs(x0), 1e-7)
    hy = max(step * abs(y0), 1e-7)
    f0 = f(x0, y0)
    fxx = (f(x0 + hx, y0) - 2.0 * f0 + f(x0 - hx, y0)) / (hx * hx)
    fyy = (f(x0, y0 + hy) - 2.0 * f0 + f(x0, y0 - hy)) / (hy * hy)
    fxy = (f(x0 + hx, y0 + hy) - f(x0 + hx, y0 - hy)
           - f(x0 - hx, y0 + hy) + f(x0 - hx, y0 - hy)) / (4.0 * hx * hy)
    hess = np.array([[fxx, fxy], [fxy, fyy]])
    if not np.all(np.isfinite(hess)):
        raise ValueError("non-finite function evaluations in finite differences")
    return hess


@dataclass(frozen=True)
class AuditReport:
    points_tested: int
    max_coop_eigenvalue: float
    max_noncoop_eigenvalue: float
    max_coop_relative_gap: float
    max_noncoop_relative_gap: float
    negative_control_detected: bool
    max_violation: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "points_tested": self.points_tested,
            "max_violation": self.max_violation,
            "pass": self.passed,
            "max_coop_eigenvalue": self.max_coop_eigenvalue,
            "max_noncoop_eigenvalue": self.max_noncoop_eigenvalue,
            "max_coop_relative_gap": self.max_coop_relative_gap,
            "max_noncoop_relative_gap": self.max_noncoop_relative_gap,
            "negative_control_detected": self.negative_control_detected,
        }


def audit_concavity(n_points: int = 1000, seed: int = 0,
                    step: float = DEFAULT_AUDIT_STEP,
                    low: float = 0.3, high: float = 3.0) -> AuditReport:
    """Sample random positive points and verify non-positive Hessian eigenvalues.

    Checks, per point: (i) fd eigenvalues of the simplified cooperative
    objective stay below the slack, (ii) the nonzero fd eigenvalue matches the
    analytic expression, (iii) both again for the direct rate in its power. A
    convex control function must be caught for the audit to pass.
    """
    rng = np.random.default_rng(seed)
    max_coop = -np.inf
    max_nc = -np.inf
    gap_coop = 0.0
    gap_nc = 0.0
    for _ in range(n_points):
        x, y, a, b, c = rng.uniform(low, high, size=5)
        point = AuditPoint(x=x, y=y, a=a, b=b, c=c)
        hess = fd_hessian(lambda u, v: simplified_coop_objective(u, v, a, b, c),
                          (x, y), step=step)
        eigs = np.linalg.eigvalsh(hess)
        max_coop = max(max_coop, float(eigs.max()))
        lam = analytic_coop_eigenvalues(point)[1]
        gap_coop = max(gap_coop, abs(float(eigs.min()) - lam) / abs(lam))

        xp, bp, cp, zp = rng.uniform(low, high, size=4)
        hess = fd_hessian(lambda u, v: noncoop_rate_objective(u, bp, cp, zp),
                          (xp, 1.0), step=step)
        eigs = np.linalg.eigvalsh(hess)
        max_nc = max(max_nc, float(eigs.max()))
        lam = analytic_noncoop_eigenvalues(bp, xp, cp, zp)[1]
        gap_nc = max(gap_nc, abs(float(eigs.min()) - lam) / abs(lam))

    control = fd_hessian(lambda u, v: u * u + v * v, (1.0, 1.0), step=step)
    control_detected = bool(np.linalg.eigvalsh(control).max() > EIGENVALUE_SLACK)

    max_violation = max(max_coop, max_nc, 0.0)
    passed = (max_coop <= EIGENVALUE_SLACK and max_nc <= EIGENVALUE_SLACK
              and gap_coop <= RELATIVE_MATCH_TOL and gap_nc <= RELATIVE_MATCH_TOL
              and control_detected)
    return AuditReport(points_tested=n_points,
                       max_coop_eigenvalue=max_coop,
                       max_noncoop_eigenvalue=max_nc,
                       max_coop_relative_gap=gap_coop,
                       max_noncoop_relative_gap=gap_nc,
                       negative_control_detected=control_detected,
                       max_violation=max_violation,
                       passed=passed)


def count_local_maxima(values: np.ndarray, tol: float = 0.0) -> int:
    """Strict interior local maxima of a sampled curve, up to tolerance."""
    v = np.asarray(values, float)
    rising = v[1:-1] > v[:-2] + tol
    falling = v[1:-1] > v[2:] + tol
    return int(np.count_nonzero(rising & falling))


def line_unimodal(a: float, b: float, c: float, pmax: float, n: int = 1024) -> bool:
    """Check the full-form SINR has a single peak along the budget line x + y = pmax."""
    xs = np.linspace(0.0, pmax, n)
    y = pmax - xs
    vals = xs * y * a * b / (1.0 + y * b + xs * a + c + c * xs * a)
    scale = max(vals.max(), 1e-300)
    return count_local_maxima(vals, tol=1e-12 * scale) <= 1
