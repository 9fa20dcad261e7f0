"""Rescaled-kernel grids, GUE comparisons, interpolation fits, and sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import critical, gue, orthopoly
from .critical import ScalingParams
from .errors import InvalidParameterError, PrecisionLimitError, RmtlabError
from .potential import Potential

_SINGLE_FIT_RANGE = 5  # candidate GUE sizes 0..4 for best-single selection


@dataclass(frozen=True)
class GridSpec:
    """Uniform symmetric grid u_min, u_min+step, ..., u_max."""

    u_min: float
    u_max: float
    step: float

    def __post_init__(self):
        if self.step <= 0 or self.u_max <= self.u_min:
            raise InvalidParameterError(f"bad grid spec {self}")

    def points(self) -> np.ndarray:
        count = int(round((self.u_max - self.u_min) / self.step)) + 1
        return self.u_min + self.step * np.arange(count)

    @classmethod
    def from_string(cls, text: str) -> "GridSpec":
        parts = text.split(",")
        if len(parts) != 3:
            raise InvalidParameterError(f"grid must be MIN,MAX,STEP, got {text!r}")
        return cls(float(parts[0]), float(parts[1]), float(parts[2]))


@dataclass(frozen=True)
class ComparisonReport:
    n: int
    s: float
    k: int
    grid_spec: GridSpec
    sup_error: float
    l2_error: float
    values: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class LambdaFit:
    """Convex-combination weights fitted between adjacent GUE sizes."""

    lambda_plus: float
    lambda_minus: float
    residual: float
    clamped: bool

    def json_dict(self) -> dict:
        return {
            "lambda_plus": self.lambda_plus,
            "lambda_minus": self.lambda_minus,
            "residual": self.residual,
            "clamped": self.clamped,
        }


@lru_cache(maxsize=16)
def _table_cached(coeffs: tuple, n: int, t: float, total_nodes):
    return orthopoly.build_recurrence(Potential(coeffs), n, t, n, total_nodes)


def recurrence_for(
    potential: Potential, n: int, t: float, total_nodes: int | None = None
):
    return _table_cached(potential.coeffs, n, float(t), total_nodes)


def rescaled_kernel(
    potential: Potential,
    n: int,
    s: float,
    grid: GridSpec,
    center_nt: bool = False,
    total_nodes: int | None = None,
) -> np.ndarray:
    """(cn)^{-1/2} K_{n,t}(x* + u (cn)^{-1/2}, x* + v (cn)^{-1/2}) on the grid.

    The rescaling center is the fixed gap-closing point x*; center_nt
    switches to the n,t-dependent point for diagnostics.
    """
    params = critical.make_scaling(potential, n, s)
    center = params.x_star_nt if center_nt else params.x_star
    scale = np.sqrt(params.c * n)
    pts = center + grid.points() / scale
    table = recurrence_for(potential, n, params.t, total_nodes)
    if pts.min() < table.rule.lo or pts.max() > table.rule.hi:
        raise PrecisionLimitError(
            f"rescaled grid [{pts.min():.4f}, {pts.max():.4f}] leaves the "
            f"quadrature window [{table.rule.lo:.4f}, {table.rule.hi:.4f}]; "
            "the weight there is below double-precision resolution"
        )
    return orthopoly.kernel_matrix(table, pts) / scale


def compare_to_gue(
    values: np.ndarray,
    grid: GridSpec,
    k: int,
    n: int = 0,
    s: float = float("nan"),
) -> ComparisonReport:
    """Sup and scaled-l2 distance of a kernel grid from the size-k GUE kernel."""
    pts = grid.points()
    if values.shape != (len(pts), len(pts)):
        raise InvalidParameterError("values matrix does not match the grid")
    diff = values - gue.gue_kernel_grid(k, pts)
    return ComparisonReport(
        n=n,
        s=s,
        k=k,
        grid_spec=grid,
        sup_error=float(np.abs(diff).max()),
        l2_error=float(grid.step * np.sqrt(np.sum(diff * diff))),
        values=values,
    )


def best_single_index(values: np.ndarray, grid: GridSpec) -> tuple[int, float]:
    """GUE size in 0..4 with the smallest sup distance to the given grid."""
    pts = grid.points()
    sups = [
        float(np.abs(values - gue.gue_kernel_grid(j, pts)).max())
        for j in range(_SINGLE_FIT_RANGE)
    ]
    j = int(np.argmin(sups))
    return j, sups[j]


def lambda_fit(values: np.ndarray, grid: GridSpec, k: int) -> LambdaFit:
    """Least-squares weight of K^GUE(k+1) against K^GUE(k) for the grid values.

    One-dimensional projection: values ~ (1-lambda) K_k + lambda K_{k+1};
    the weight is clamped to [0, 1] and the clamping is reported.
    """
    if k < 0:
        raise InvalidParameterError(f"k must be nonnegative, got {k}")
    pts = grid.points()
    base = gue.gue_kernel_grid(k, pts)
    direction = gue.gue_kernel_grid(k + 1, pts) - base
    denom = float(np.sum(direction * direction))
    lam = float(np.sum((values - base) * direction) / denom) if denom > 0 else 0.0
    clamped = not 0.0 <= lam <= 1.0
    lam = min(max(lam, 0.0), 1.0)
    resid = values - base - lam * direction
    return LambdaFit(
        lambda_plus=lam,
        lambda_minus=1.0 - lam,
        residual=float(grid.step * np.sqrt(np.sum(resid * resid))),
        clamped=clamped,
    )


_COUNT_GL = leggauss(200)


def expected_count(
    potential: Potential,
    n: int,
    s: float,
    delta: float | None = None,
    total_nodes: int | None = None,
) -> float:
    """Integral of the kernel diagonal over [x*-delta, x*+delta].

    Counts the eigenvalues sitting in the nucleating band; default window
    is a quarter of the gap between the band edge and x*.
    """
    params = critical.make_scaling(potential, n, s)
    eq = critical.unit_equilibrium(potential)
    if delta is None:
        delta = (params.x_star - eq.b) / 4.0
    if delta <= 0 or params.x_star - delta <= eq.b:
        raise InvalidParameterError(
            f"window half-width {delta} overlaps the band [a, b]"
        )
    table = recurrence_for(potential, n, params.t, total_nodes)
    xs, ws = _COUNT_GL
    x = params.x_star + delta * xs
    if x.min() < table.rule.lo or x.max() > table.rule.hi:
        raise PrecisionLimitError("count window leaves the quadrature window")
    diag = orthopoly.kernel_diagonal(table, x)
    return float(delta * np.sum(ws * diag))


@dataclass(frozen=True)
class SweepRow:
    n: int
    s: float
    k: int
    delta: float
    sup_error: float
    l2_error: float
    lambda_plus: float
    expected_count: float
    decay_exponent: float


def convergence_sweep(
    potential: Potential,
    n_list,
    s_list,
    grid: GridSpec,
    total_nodes: int | None = None,
) -> list[SweepRow]:
    """One row per (n, s): best-single-kernel errors, interpolation weight,
    eigenvalue count, and a per-s log-log decay exponent of the sup error.

    Rows whose computation fails carry NaNs; the sweep continues.
    """
    rows: list[SweepRow] = []
    pts = grid.points()
    for s in s_list:
        partial = []
        for n in n_list:
            try:
                params = critical.make_scaling(potential, n, s)
                values = rescaled_kernel(potential, n, s, grid, total_nodes=total_nodes)
                j, sup = best_single_index(values, grid)
                diff = values - gue.gue_kernel_grid(j, pts)
                l2 = float(grid.step * np.sqrt(np.sum(diff * diff)))
                lam = lambda_fit(values, grid, params.k).lambda_plus
                count = expected_count(potential, n, s, total_nodes=total_nodes)
                partial.append(
                    dict(
                        n=n,
                        s=float(s),
                        k=params.k,
                        delta=params.delta,
                        sup_error=sup,
                        l2_error=l2,
                        lambda_plus=lam,
                        expected_count=count,
                    )
                )
            except RmtlabError:
                partial.append(
                    dict(
                        n=n,
                        s=float(s),
                        k=-1,
                        delta=float("nan"),
                        sup_error=float("nan"),
                        l2_error=float("nan"),
                        lambda_plus=float("nan"),
                        expected_count=float("nan"),
                    )
                )
        good = [p for p in partial if np.isfinite(p["sup_error"])]
        if len(good) >= 2:
            logn = np.log([p["n"] for p in good])
            loge = np.log([p["sup_error"] for p in good])
            slope = float(np.polyfit(logn, loge, 1)[0])
        else:
            slope = float("nan")
        for p in partial:
            rows.append(SweepRow(decay_exponent=slope, **p))
    return rows


def pipeline_report(
    potential: Potential, n: int, s: float, grid: GridSpec
) -> tuple[ScalingParams, ComparisonReport]:
    """Rescaled kernel compared against the GUE size chosen by the k-rule."""
    params = critical.make_scaling(potential, n, s)
    values = rescaled_kernel(potential, n, s, grid)
    return params, compare_to_gue(values, grid, params.k, n=n, s=s)
