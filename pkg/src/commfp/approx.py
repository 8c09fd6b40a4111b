"""Local-limit (CLT) approximations of frame potential and expressiveness.

For large t the walk W_t is close to a lattice Gaussian, so

    F~(t) = V_U / ((4 pi t)^(N/2) sqrt(det Var K))

and the expressiveness follows by dividing the Haar baseline by it.
Everything is carried in log2 because the values underflow quickly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateFit
from .exactfp import DyadicSeries

_LOG2_4PI = math.log2(4 * math.pi)


class LogValue(NamedTuple):
    value: float
    log2: float


def _lin(log2: float) -> float:
    return 2.0**log2


def log2_haar(n: int, t: int) -> float:
    return -math.log2(math.comb((1 << n) + t - 1, (1 << n) - 1))


def approx_frame_potential_log2(V_U: int, det_var_K: float, N: int, t: int) -> float:
    return math.log2(V_U) - 0.5 * N * (_LOG2_4PI + math.log2(t)) - 0.5 * math.log2(det_var_K)


def approx_frame_potential(V_U: int, det_var_K: float, N: int, t: int) -> LogValue:
    lg = approx_frame_potential_log2(V_U, det_var_K, N, t)
    return LogValue(_lin(lg), lg)


def approx_expressiveness(V_U: int, det_var_K: float, n: int, N: int, t: int) -> LogValue:
    lg = log2_haar(n, t) - approx_frame_potential_log2(V_U, det_var_K, N, t)
    return LogValue(_lin(lg), lg)


@dataclass(frozen=True)
class CltApproximation:
    n: int
    N: int
    V_U: int
    det_var_K: float
    t: tuple[int, ...]
    F_log2: tuple[float, ...]
    E_log2: tuple[float, ...]

    def F(self) -> list[float]:
        return [_lin(x) for x in self.F_log2]

    def E(self) -> list[float]:
        return [_lin(x) for x in self.E_log2]


def clt_series(V_U: int, det_var_K: float, n: int, N: int, t_max: int) -> CltApproximation:
    ts = tuple(range(1, t_max + 1))
    F = tuple(approx_frame_potential_log2(V_U, det_var_K, N, t) for t in ts)
    E = tuple(log2_haar(n, t) - f for t, f in zip(ts, F))
    return CltApproximation(n, N, V_U, float(det_var_K), ts, F, E)


def log2_abs_error(exact: DyadicSeries, approx_log2: Sequence[float]) -> list[float]:
    """``log2 |F - F~|`` per t, without cancellation loss.

    Uses ``|F - F~| = F * |expm1((log2 F~ - log2 F) ln 2)|``.
    """
    out = []
    for lf, la in zip(exact.log2(), approx_log2):
        rel = abs(math.expm1((la - lf) * math.log(2)))
        out.append(lf + math.log2(rel) if rel > 0 else -math.inf)
    return out


@dataclass(frozen=True)
class ErrorFit:
    c: float
    slope: float
    t_values: tuple[int, ...]
    points: int


def fit_error_constant(
    exact: DyadicSeries,
    V_U: int,
    N: int,
    *,
    det_var_K: float = 1.0,
    t_min: int = 3,
    t_max: int | None = None,
) -> ErrorFit:
    """Least-squares fit of ``log|F - F~| = log c + slope * log t``.

    Points with ``t < t_min`` are excluded; at least five usable points
    are required.
    """
    ts, ys = [], []
    errs = log2_abs_error(exact, [approx_frame_potential_log2(V_U, det_var_K, N, t) for t in exact.t])
    for t, e in zip(exact.t, errs):
        if t < t_min or (t_max is not None and t > t_max) or not math.isfinite(e):
            continue
        ts.append(t)
        ys.append(e * math.log(2))
    if len(ts) < 5:
        raise DegenerateFit(f"only {len(ts)} nonzero residuals in the fit range (need 5)")
    slope, intercept = np.polyfit(np.log(np.asarray(ts, dtype=float)), np.asarray(ys), 1)
    return ErrorFit(c=math.exp(intercept), slope=float(slope), t_values=tuple(ts), points=len(ts))


def scaled_errors(exact: DyadicSeries, V_U: int, N: int, det_var_K: float = 1.0) -> list[float]:
    """``|F - F~| * t^(N/2 + 1)`` per t."""
    errs = log2_abs_error(exact, [approx_frame_potential_log2(V_U, det_var_K, N, t) for t in exact.t])
    return [2.0 ** (e + (N / 2 + 1) * math.log2(t)) for t, e in zip(exact.t, errs)]


def relative_errors(exact: DyadicSeries, V_U: int, N: int, det_var_K: float = 1.0) -> list[float]:
    """``|F - F~| / F`` per t."""
    return [
        abs(math.expm1((approx_frame_potential_log2(V_U, det_var_K, N, t) - lf) * math.log(2)))
        for t, lf in zip(exact.t, exact.log2())
    ]


def expressiveness_ratio(v_N: int, v_N1: int, t: float) -> float:
    """Approximate gain ``E_{N+1} / E_N`` from adding one rotation."""
    return math.sqrt(math.pi * t) * v_N / v_N1
