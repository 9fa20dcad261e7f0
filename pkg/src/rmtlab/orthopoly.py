"""Orthonormal polynomials for exp(-n V_t) and the Christoffel-Darboux kernel.

Recurrence coefficients come from Lanczos with full reorthogonalization on
the diagonal operator of a discretized inner product (moment determinants
are hopelessly conditioned for these weights). The weight is rescaled by
exp(+n min V_t) internally; the rescaling cancels in every kernel value.

Weighted polynomial values psi_k = p_k exp(-n V_t / 2) are generated by the
three-term recurrence seeded with the weighted p_0, carrying a running
log-magnitude so intermediate values can neither overflow nor be flushed
to zero inside the quadrature window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from io import StringIO

import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.polynomial.legendre import leggauss

from .errors import (
    InvalidParameterError,
    NumericalBreakdownError,
    PrecisionLimitError,
)
from .potential import Potential

MAX_N = 400
_SUBLEVEL = 745.0 + 60.0
_PANELS = 32
_DIAG_SWITCH = 1e-8


@dataclass(frozen=True)
class QuadratureRule:
    lo: float
    hi: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    vt_min: float


@dataclass(frozen=True)
class WeightedValue:
    """sign * exp(log_mag); sign 0 forces the -inf sentinel."""

    log_mag: float
    sign: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * float(np.exp(self.log_mag))


@dataclass(frozen=True)
class RecurrenceTable:
    """Three-term recurrence data: x p_j = sqrt(b_{j+1}) p_{j+1} + a_j p_j + sqrt(b_j) p_{j-1}.

    alpha[j] for j = 0..N; beta[j] for j = 1..N (squared off-diagonals,
    beta[0] is a zero sentinel). log_gamma0 is the log of the weighted
    normalization of the constant polynomial.
    """

    potential: Potential
    n: int
    t: float
    N: int
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    log_gamma0: float
    rule: QuadratureRule = field(repr=False)

    def vt_coeffs(self) -> np.ndarray:
        return np.asarray(self.potential.coeffs) / self.t

    def log_weight_half(self, x):
        """log of exp(-n (V_t - min V_t) / 2) at x."""
        return -0.5 * self.n * (
            npoly.polyval(x, self.vt_coeffs()) - self.rule.vt_min
        )


def quadrature_support(
    potential: Potential, n: int, t: float, total_nodes: int | None = None
) -> QuadratureRule:
    """Composite Gauss-Legendre rule on the sublevel set n(V_t - min) <= 805.

    The window is expanded by ten percent of its width; outside it the
    weight is below the double-precision floor times a wide margin.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    vt = np.asarray(potential.coeffs) / t
    dvt = npoly.polyder(vt)
    crit = np.roots(dvt[::-1])
    crit = crit[np.abs(crit.imag) < 1e-9].real
    vt_min = float(np.min(npoly.polyval(crit, vt)))
    shifted = vt.copy()
    shifted[0] -= vt_min + _SUBLEVEL / n
    roots = np.roots(shifted[::-1])
    roots = roots[np.abs(roots.imag) < 1e-9].real
    lo, hi = float(roots.min()), float(roots.max())
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    total = total_nodes if total_nodes else max(4000, 30 * n)
    per_panel = int(np.ceil(total / _PANELS))
    xs, ws = leggauss(per_panel)
    edges = np.linspace(lo, hi, _PANELS + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + half[:, None] * xs[None, :]).ravel()
    weights = (half[:, None] * ws[None, :]).ravel()
    return QuadratureRule(lo=lo, hi=hi, nodes=nodes, weights=weights, vt_min=vt_min)


def build_recurrence(
    potential: Potential,
    n: int,
    t: float,
    N: int,
    total_nodes: int | None = None,
) -> RecurrenceTable:
    """Recurrence coefficients for degrees 0..N of the weight exp(-n V_t)."""
    if n > MAX_N:
        raise PrecisionLimitError(
            f"n = {n} exceeds the double-precision cap {MAX_N}"
        )
    if N > 1.2 * n + 10:
        raise InvalidParameterError(f"N = {N} too large for n = {n}")
    rule = quadrature_support(potential, n, t, total_nodes)
    vt = np.asarray(potential.coeffs) / t
    x = rule.nodes
    w = rule.weights * np.exp(-n * (npoly.polyval(x, vt) - rule.vt_min))
    total_mass = float(np.sum(w))
    if not np.isfinite(total_mass) or total_mass <= 0:
        raise NumericalBreakdownError("discretized weight has no usable mass")
    sq = np.sqrt(w)
    basis = np.zeros((N + 1, len(x)))
    alpha = np.zeros(N + 1)
    beta = np.zeros(N + 1)
    basis[0] = sq / np.linalg.norm(sq)
    for j in range(N + 1):
        u = x * basis[j]
        alpha[j] = basis[j] @ u
        u -= alpha[j] * basis[j]
        if j > 0:
            u -= np.sqrt(beta[j]) * basis[j - 1]
        for _ in range(2):  # twice-is-enough reorthogonalization
            u -= basis[: j + 1].T @ (basis[: j + 1] @ u)
        if j < N:
            nb = float(np.linalg.norm(u))
            if not np.isfinite(nb) or nb * nb <= 1e-28:
                raise NumericalBreakdownError(
                    f"off-diagonal collapsed at degree {j + 1}; "
                    "increase quadrature nodes or reduce n"
                )
            beta[j + 1] = nb * nb
            basis[j + 1] = u / nb
    return RecurrenceTable(
        potential=potential,
        n=n,
        t=t,
        N=N,
        alpha=alpha,
        beta=beta,
        log_gamma0=-0.5 * np.log(total_mass),
        rule=rule,
    )


def _sweep_scalar(table: RecurrenceTable, k: int, x: float):
    """Return (psi_{k-1}, psi_k) as (mantissa pair, shared log scale)."""
    sb = np.sqrt(table.beta)
    L = table.log_gamma0 + float(table.log_weight_half(x))
    prev, cur = 0.0, 1.0
    for j in range(k):
        nxt = ((x - table.alpha[j]) * cur - (sb[j] * prev if j > 0 else 0.0)) / sb[j + 1]
        prev, cur = cur, nxt
        mag = max(abs(prev), abs(cur))
        if mag > 1e100 or (0.0 < mag < 1e-100):
            L += np.log(mag)
            prev /= mag
            cur /= mag
    return prev, cur, L


def eval_weighted(table: RecurrenceTable, k: int, x: float) -> WeightedValue:
    """psi_k(x) = p_k(x) exp(-n V_t(x)/2) in overflow-safe form."""
    if k > table.N:
        raise InvalidParameterError(f"k = {k} exceeds table size N = {table.N}")
    _, cur, L = _sweep_scalar(table, k, x)
    if cur == 0.0:
        return WeightedValue(log_mag=-np.inf, sign=0)
    return WeightedValue(log_mag=L + np.log(abs(cur)), sign=1 if cur > 0 else -1)


def kernel(table: RecurrenceTable, x: float, y: float) -> float:
    """Rank-n projection kernel K_n(x, y), symmetric and continuous across x = y."""
    n = table.n
    if table.N < n:
        raise InvalidParameterError("table must hold degrees through n")
    if abs(x - y) < _DIAG_SWITCH * (1.0 + abs(x)):
        return _kernel_confluent(table, x, y)
    px1, px, Lx = _sweep_scalar(table, n, x)
    py1, py, Ly = _sweep_scalar(table, n, y)
    scale = Lx + Ly
    num = px * py1 - py * px1
    if num == 0.0 or scale < -700:
        return 0.0
    return float(np.sqrt(table.beta[n]) * num / (x - y) * np.exp(scale))


def _kernel_confluent(table: RecurrenceTable, x: float, y: float) -> float:
    """Sum form over degrees below n, stable at and near the diagonal."""
    n = table.n
    sb = np.sqrt(table.beta)
    shared = table.log_gamma0 * 2.0 + float(table.log_weight_half(x)) + float(
        table.log_weight_half(y)
    )
    ppx, pcx = 0.0, 1.0
    ppy, pcy = 0.0, 1.0
    acc = 0.0
    for j in range(n):
        acc += pcx * pcy * np.exp(shared)
        nx = ((x - table.alpha[j]) * pcx - (sb[j] * ppx if j > 0 else 0.0)) / sb[j + 1]
        ny = ((y - table.alpha[j]) * pcy - (sb[j] * ppy if j > 0 else 0.0)) / sb[j + 1]
        ppx, pcx, ppy, pcy = pcx, nx, pcy, ny
        mag = max(abs(pcx), abs(pcy))
        if mag > 1e100 or (0.0 < mag < 1e-100):
            shared += 2.0 * np.log(mag)
            ppx /= mag
            pcx /= mag
            ppy /= mag
            pcy /= mag
    return float(acc)


def weighted_sweep(table: RecurrenceTable, pts: np.ndarray):
    """Vectorized psi values at real points inside the quadrature window.

    Returns (psi_{n-1}, psi_n, diag) in absolute scale, where diag is the
    kernel diagonal sum over degrees below n. Inside the window absolute
    weighted values stay inside double range by construction.
    """
    n = table.n
    pts = np.asarray(pts, dtype=float)
    sb = np.sqrt(table.beta)
    L = table.log_gamma0 + table.log_weight_half(pts)
    prev = np.zeros_like(pts)
    cur = np.ones_like(pts)
    diag = np.zeros_like(pts)
    for j in range(n):
        diag += cur * cur * np.exp(2.0 * L)
        nxt = ((pts - table.alpha[j]) * cur - (sb[j] * prev if j > 0 else 0.0)) / sb[j + 1]
        prev, cur = cur, nxt
        mask = np.abs(cur) > 1e80
        if mask.any():
            f = np.where(mask, np.abs(cur), 1.0)
            L += np.log(f)
            prev /= f
            cur /= f
    scale = np.exp(L)
    return prev * scale, cur * scale, diag


def kernel_matrix(table: RecurrenceTable, pts: np.ndarray) -> np.ndarray:
    """Kernel on a point grid; Christoffel-Darboux off the diagonal, sum on it."""
    psi1, psi0, diag = weighted_sweep(table, pts)
    outer = np.outer(psi0, psi1)
    dx = np.subtract.outer(pts, pts)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.sqrt(table.beta[table.n]) * (outer - outer.T) / dx
    np.fill_diagonal(K, diag)
    return K


def kernel_diagonal(table: RecurrenceTable, pts: np.ndarray) -> np.ndarray:
    return weighted_sweep(table, pts)[2]


def gram_residual(table: RecurrenceTable, upto: int) -> float:
    """Max deviation from identity of the Gram matrix of p_0..p_upto."""
    x = table.rule.nodes
    w = table.rule.weights
    sb = np.sqrt(table.beta)
    L = table.log_gamma0 + table.log_weight_half(x)
    vals = np.zeros((upto + 1, len(x)))
    prev = np.zeros_like(x)
    cur = np.exp(L)
    vals[0] = cur
    for j in range(upto):
        nxt = ((x - table.alpha[j]) * cur - (sb[j] * prev if j > 0 else 0.0)) / sb[j + 1]
        prev, cur = cur, nxt
        vals[j + 1] = cur
    gram = (vals * w) @ vals.T
    return float(np.abs(gram - np.eye(upto + 1)).max())


def dump_recurrence_csv(table: RecurrenceTable) -> str:
    """CSV of the coefficients, beta_0 written as zero by convention."""
    out = StringIO()
    out.write("j,alpha,beta\n")
    for j in range(table.N + 1):
        out.write(f"{j},{table.alpha[j]:.17g},{table.beta[j]:.17g}\n")
    return out.getvalue()
