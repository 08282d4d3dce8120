"""Finite-size scaling: power-law fits, data collapse, frequency saturation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats


class ScalingError(ValueError):
    pass


@dataclass
class FitResult:
    exponent: float
    amplitude: float
    stderr: float
    r_squared: float
    n_points: int = 0


def fit_power_law(points) -> FitResult:
    """Least-squares line through ``(ln x, ln y)``; the exponent is the slope."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ScalingError("need at least 3 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(x <= 0) or np.any(y <= 0):
        raise ScalingError("power-law fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(ly) == 0.0:
        # exactly flat data: linregress would report r = nan
        return FitResult(0.0, float(y[0]), 0.0, 1.0, len(pts))
    res = stats.linregress(lx, ly)
    return FitResult(
        exponent=float(res.slope),
        amplitude=float(np.exp(res.intercept)),
        stderr=float(res.stderr) if np.isfinite(res.stderr) else 0.0,
        r_squared=float(res.rvalue**2),
        n_points=len(pts),
    )


@dataclass
class Curve:
    L_A: int
    t: np.ndarray
    eps0: np.ndarray
    t_c: float


@dataclass
class ScalingInput:
    """Per-subsystem curves ``eps0(t)`` (min-entropy) and their critical times."""

    curves: list

    @property
    def sizes(self):
        return [c.L_A for c in self.curves]

    def critical_points(self):
        """``(L_A, t*, eps0(t*))`` read off each curve at its critical time."""
        out = []
        for c in sorted(self.curves, key=lambda c: c.L_A):
            j = int(np.argmin(np.abs(np.asarray(c.t) - c.t_c)))
            out.append((c.L_A, c.t_c, float(c.eps0[j])))
        return out


@dataclass
class CollapseResult:
    nu: float
    a: float
    curves: list  # (L_A, x, y)
    quality: float


def rescale(curve: Curve, nu: float, a: float):
    L = float(curve.L_A)
    x = (np.asarray(curve.t) / L - curve.t_c / L) * L ** (1.0 / nu)
    y = (np.asarray(curve.eps0) / L) * L**a
    return x, y


def unscale(L_A: int, x, y, t_c: float, nu: float, a: float):
    """Inverse of :func:`rescale`."""
    L = float(L_A)
    t = (np.asarray(x) / L ** (1.0 / nu) + t_c / L) * L
    eps0 = np.asarray(y) / L**a * L
    return t, eps0


def collapse_quality(rescaled) -> float:
    """Normalized mean squared deviation from the pooled master curve.

    The master curve is piecewise linear through the union of abscissae in
    the common range; its value at each abscissa is the mean of all curves
    interpolated there.  The mean squared deviation of every point in the
    common range is divided by the variance of those points.
    """
    if len(rescaled) < 2:
        return 0.0
    lo = max(float(np.min(x)) for _, x, _ in rescaled)
    hi = min(float(np.max(x)) for _, x, _ in rescaled)
    if not lo < hi:
        bad = _non_overlapping(rescaled)
        raise ScalingError(f"rescaled curves do not overlap; offending L_A: {bad}")
    xs, ys = [], []
    for _, x, y in rescaled:
        sel = (x >= lo) & (x <= hi)
        xs.append(x[sel])
        ys.append(y[sel])
    grid = np.unique(np.concatenate(xs))
    master = np.mean([np.interp(grid, x, y) for (_, x, y) in rescaled], axis=0)
    dev = np.concatenate([y - np.interp(x, grid, master) for x, y in zip(xs, ys)])
    pooled = np.concatenate(ys)
    var = float(np.var(pooled))
    msd = float(np.mean(dev * dev))
    if var == 0.0:
        return 0.0 if msd == 0.0 else float("inf")
    return msd / var


def _non_overlapping(rescaled):
    ranges = {L: (float(np.min(x)), float(np.max(x))) for L, x, _ in rescaled}
    bad = []
    for L, (lo, hi) in ranges.items():
        for L2, (lo2, hi2) in ranges.items():
            if L2 != L and (hi < lo2 or hi2 < lo):
                bad.append(L)
                break
    return sorted(bad) or sorted(ranges)


def collapse(inp: ScalingInput, nu: float, a: float) -> CollapseResult:
    """Rescale every curve with ``(nu, a)`` and score the collapse (lower is better)."""
    curves = sorted(inp.curves, key=lambda c: c.L_A)
    rescaled = []
    for c in curves:
        x, y = rescale(c, nu, a)
        order = np.argsort(x, kind="stable")
        rescaled.append((c.L_A, x[order], y[order]))
    return CollapseResult(nu, a, rescaled, collapse_quality(rescaled))


@dataclass
class CollapseSearch:
    nu: float
    a: float
    quality: float
    nu_grid: np.ndarray
    a_grid: np.ndarray
    quality_map: np.ndarray
    tie: bool = False


def optimize_collapse(inp: ScalingInput, nu_grid, a_grid, rel_tie: float = 1e-12) -> CollapseSearch:
    """Exhaustive grid search of the collapse quality.

    Ties (qualities within ``rel_tie`` of the minimum) are broken toward the
    grid midpoint and flagged.
    """
    nu_grid = np.atleast_1d(np.asarray(nu_grid, dtype=float))
    a_grid = np.atleast_1d(np.asarray(a_grid, dtype=float))
    if nu_grid.size == 0 or a_grid.size == 0:
        raise ScalingError("grids must be nonempty")
    qmap = np.full((nu_grid.size, a_grid.size), np.inf)
    for i, nu in enumerate(nu_grid):
        for j, a in enumerate(a_grid):
            try:
                qmap[i, j] = collapse(inp, nu, a).quality
            except ScalingError:
                pass
    best = float(np.min(qmap))
    cand = np.argwhere(qmap <= best + rel_tie * abs(best)) if np.isfinite(best) \
        else np.argwhere(np.ones_like(qmap, dtype=bool))
    mid = np.array([(nu_grid.size - 1) / 2.0, (a_grid.size - 1) / 2.0])
    dist = np.abs(cand - mid).sum(axis=1)
    i, j = cand[int(np.argmin(dist))]
    return CollapseSearch(
        float(nu_grid[i]), float(a_grid[j]), float(qmap[i, j]),
        nu_grid, a_grid, qmap, tie=len(cand) > 1,
    )


def synthetic_input(sizes, nu: float = 1.0, a: float = 1.0, t_c: float = 1.0,
                    dt: float = 0.01, half_width: float = 0.5, master=None,
                    t_c_jitter: float = 0.0, seed: int = 1234) -> ScalingInput:
    """Curves generated from one master function under the scaling ansatz.

    ``eps0 = L^(1-a) F((t - t_c) L^(1/nu - 1))``.  Times lie on a ``dt`` grid;
    with ``t_c_jitter > 0`` the true critical time of each size is displaced
    uniformly within ``+-t_c_jitter`` while the reported one stays on the grid,
    mimicking a detector that resolves ``t_c`` only to the sampling step.
    """
    if master is None:
        master = lambda x: 1.0 - 0.5 * np.abs(x) + 0.2 * x * x  # noqa: E731
    rng = np.random.default_rng(seed)
    n = int(round(half_width / dt))
    curves = []
    for L in sizes:
        L = int(L)
        true_tc = t_c + (rng.uniform(-t_c_jitter, t_c_jitter) if t_c_jitter else 0.0)
        t = t_c + np.arange(-n, n + 1) * dt
        x = (t - true_tc) * float(L) ** (1.0 / nu - 1.0)
        eps0 = float(L) ** (1.0 - a) * master(x)
        curves.append(Curve(L, t, eps0, t_c))
    return ScalingInput(curves)


@dataclass
class SaturationEntry:
    L_A: int
    omegas: list
    t_star: list
    plateau: float | None
    spread: float | None
    plateau_flag: bool
    decreasing_omegas: list = field(default_factory=list)


def saturation_analysis(t_star_by_omega: dict, omega_sat: float = 30.0,
                        tol: float = 0.02, min_points: int = 3) -> dict:
    """High-frequency plateau of ``t*(omega)`` for each subsystem size.

    The plateau estimate is the mean over ``omega >= omega_sat`` and its
    relative spread is ``(max - min) / mean``.  The plateau is flagged when it
    has at least two points, the spread is within ``tol`` and the input has at
    least ``min_points`` frequencies.  ``decreasing_omegas`` tags the
    frequencies below ``omega_sat`` after which ``t*`` still decreases.
    """
    report = {}
    for L_A, table in t_star_by_omega.items():
        omegas = sorted(table)
        ts = [float(table[w]) for w in omegas]
        plat = [t for w, t in zip(omegas, ts) if w >= omega_sat]
        if plat:
            mean = float(np.mean(plat))
            spread = float((max(plat) - min(plat)) / mean)
        else:
            mean, spread = None, None
        flag = (
            len(plat) >= 2 and spread is not None and spread <= tol
            and len(omegas) >= min_points
        )
        dec = [w for w, w2, t, t2 in zip(omegas, omegas[1:], ts, ts[1:]) if w < omega_sat and t2 < t]
        report[L_A] = SaturationEntry(int(L_A), omegas, ts, mean, spread, bool(flag), dec)
    return report


def curve_from_series(L_A: int, t, s_min, t_c: float, half_width: float = 0.5) -> Curve:
    """The ``eps0 = s_min`` curve within ``half_width`` of ``t_c``."""
    t = np.asarray(t, dtype=float)
    sel = np.abs(t - t_c) <= half_width + 1e-12
    return Curve(int(L_A), t[sel], np.asarray(s_min, dtype=float)[sel], float(t_c))


def exponent_fits(inp: ScalingInput) -> dict:
    """``1/nu`` from ``t*/L_A ~ L_A^(-1/nu)`` and ``a`` from ``eps0(t*)/L_A ~ L_A^(-a)``."""
    pts = inp.critical_points()
    if len({p[0] for p in pts}) < 3:
        raise ScalingError("need at least 3 distinct L_A values")
    if any(p[1] <= 0 for p in pts):
        raise ScalingError("critical times must be positive")
    t_fit = fit_power_law([(L, tc / L) for L, tc, _ in pts])
    e_fit = fit_power_law([(L, e / L) for L, _, e in pts])
    return {
        "inv_nu": -t_fit.exponent, "nu": -1.0 / t_fit.exponent if t_fit.exponent else float("inf"),
        "a": -e_fit.exponent, "t_star_fit": t_fit, "eps0_fit": e_fit, "points": pts,
    }
