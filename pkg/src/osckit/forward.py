"""Spectral solver for the forced heat equation on (0, pi) x (0, T).

    u_t = u_xx + envelope(x, t) * factor(t, omega * t),   u = 0 on the
    parabolic boundary (t = 0 and x = 0, pi).

Each sine mode obeys ``u_n' = -n^2 u_n + f_n(t) r(t, omega t)`` and is
integrated by the Duhamel formula.  Catalog inputs reduce the oscillatory
part to complex-rate exponential moments, so cost and accuracy are
independent of omega; a composite-Gauss quadrature fallback covers sampled
sources.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import (
    GridFunction,
    SineSeries,
    SourceFactor,
    duhamel_oscillatory,
    duhamel_weight,
)

__all__ = ["HeatProblem", "solve_mode", "solve_heat", "trace"]


@dataclass(frozen=True)
class HeatProblem:
    """Forcing data ``envelope(x, t) * factor(t, omega t)`` plus horizon."""

    envelope: SineSeries
    factor: SourceFactor
    omega: float
    horizon: float
    n_max: int = 32

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def active_modes(self) -> list[int]:
        return [n for n in self.envelope.modes if n <= self.n_max]


def _mode_values_closed(problem: HeatProblem, n: int, t: np.ndarray) -> np.ndarray:
    fn = problem.envelope.coefficient(n)
    if fn.is_zero:
        return np.zeros(t.shape)
    out = np.zeros(t.shape)
    mean = problem.factor.mean
    if not mean.is_zero:
        out = out + duhamel_weight(n, fn * mean, t)
    for k, a, b in problem.factor.oscillation.harmonics:
        freq = k * problem.omega
        if not a.is_zero:
            out = out + duhamel_oscillatory(n, fn * a, freq, t).real
        if not b.is_zero:
            out = out + duhamel_oscillatory(n, fn * b, freq, t).imag
    return out


def _mode_values_quadrature(problem: HeatProblem, n: int, t: np.ndarray,
                            step: float) -> np.ndarray:
    """Exponential-integrator marching with per-panel Gauss quadrature.

    Marches u' = -n^2 u + q on panels no wider than ``step``; each panel
    integral of e^{-n^2 (t_{i+1}-s)} q(s) uses 8-point Gauss-Legendre.
    """
    if step > math.pi / (2.0 * problem.omega):
        raise ValueError(
            "quadrature step does not resolve the oscillation: "
            f"step {step:g} > pi/(2 omega) = {math.pi / (2 * problem.omega):g}"
        )
    fn = problem.envelope.modes.get(n)
    if fn is None:
        return np.zeros(t.shape)
    factor = problem.factor
    omega = problem.omega

    def forcing(s):
        return np.asarray(fn(s), dtype=float) * factor(s, omega * s)

    ref_x, ref_w = np.polynomial.legendre.leggauss(8)
    order = np.argsort(t)
    t_sorted = t[order]
    out_sorted = np.empty_like(t_sorted)
    u = 0.0
    pos = 0.0
    n2 = float(n * n)
    for idx, target in enumerate(t_sorted):
        span = target - pos
        if span > 0:
            panels = max(1, int(math.ceil(span / step)))
            edges = np.linspace(pos, target, panels + 1)
            half = np.diff(edges) / 2.0
            mid = (edges[:-1] + edges[1:]) / 2.0
            nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
            weights = (half[:, None] * ref_w[None, :]).ravel()
            vals = forcing(nodes) * np.exp(-n2 * (target - nodes))
            u = u * math.exp(-n2 * span) + float(weights @ vals)
            pos = target
        out_sorted[idx] = u
    out = np.empty_like(out_sorted)
    out[order] = out_sorted
    return out


def solve_mode(problem: HeatProblem, n: int, t, method: str = "auto",
               quadrature_step: float | None = None):
    """Mode amplitude ``u_n(t) = integral_0^t e^{-n^2(t-s)} f_n(s) r(s, omega s) ds``."""
    if not 1 <= n <= problem.n_max:
        raise ValueError(f"mode {n} outside 1..{problem.n_max}")
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if method == "auto":
        method = "closed" if problem.envelope.is_catalog else "quadrature"
    if method == "closed":
        out = _mode_values_closed(problem, n, arr)
    elif method == "quadrature":
        step = quadrature_step
        if step is None:
            step = 2.0 * math.pi / (32.0 * problem.omega)
        out = _mode_values_quadrature(problem, n, arr, step)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out[0]) if scalar else out


def _tail_estimate(problem: HeatProblem, horizon: float) -> float:
    tail = 0.0
    probe = np.linspace(0.0, horizon, 65)
    for n, coeff in problem.envelope.modes.items():
        if n > problem.n_max:
            sup = float(np.max(np.abs(np.asarray(coeff(probe), dtype=float))))
            tail += sup / (n * n)
    return tail


def solve_heat(problem: HeatProblem, x_count: int, t_count: int,
               tail_tol: float = 1e-9, method: str = "auto") -> GridFunction:
    """Field ``u(x_i, t_j)`` as a 2-D grid function (deterministic)."""
    if x_count < 2 or t_count < 2:
        raise ValueError("grid counts must be >= 2")
    x = np.linspace(0.0, math.pi, x_count)
    t = np.linspace(0.0, problem.horizon, t_count)
    values = np.zeros((x_count, t_count))
    for n in problem.active_modes:
        mode = solve_mode(problem, n, t, method=method)
        values += np.outer(np.sin(n * x), mode)
    meta = {"omega": problem.omega, "n_max": problem.n_max, "warnings": []}
    tail = _tail_estimate(problem, problem.horizon)
    meta["tail_estimate"] = tail
    if tail > tail_tol:
        meta["warnings"].append(
            f"mode truncation tail estimate {tail:.3e} above {tail_tol:.1e}"
        )
    return GridFunction((x, t), values, meta)


def trace(u: GridFunction, x0: float) -> GridFunction:
    """Time trace ``t -> u(x0, t)`` by linear interpolation in x."""
    if len(u.axes) != 2:
        raise ValueError("trace expects a 2-D grid function")
    x, t = u.axes
    if not (0.0 < x0 < math.pi):
        raise ValueError(f"x0 = {x0:g} outside (0, pi)")
    exact = np.nonzero(x == x0)[0]
    if exact.size:
        row = u.values[int(exact[0])].copy()
    else:
        hi = int(np.searchsorted(x, x0))
        lo = hi - 1
        w = (x0 - x[lo]) / (x[hi] - x[lo])
        row = (1.0 - w) * u.values[lo] + w * u.values[hi]
    return GridFunction((t,), row, dict(u.meta, x0=x0))
