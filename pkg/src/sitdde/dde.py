"""Fixed-step method-of-steps integrator with one discrete delay.

Classic RK4 advances the mesh; a cubic Hermite interpolant built from mesh
states and derivatives provides dense output, which is also what stage-time
lagged lookups use. Because h <= tau, every lagged argument falls in the
constant/callable pre-history or in an already-completed interval.

The three-species model goes through the compiled kernel in `_kernels` when the
pre-history is constant; arbitrary right-hand sides and callable histories use
the generic loop below, which exists mainly so linear test problems with known
exact solutions can exercise the same scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import _kernels
from .errors import BlowUpError, InvalidInputError, InvalidStepError, OutOfSpanError
from .model import ModelParams, State, omega_box, rhs_components

__all__ = [
    "ConstantHistory",
    "Trajectory",
    "constant_history",
    "default_step",
    "integrate",
    "integrate_generic",
    "sample",
]

HistoryFn = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class ConstantHistory:
    """History map equal to a fixed state on the whole initial interval."""

    value: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        return self.value


def constant_history(y0: Union[State, Sequence[float]]) -> ConstantHistory:
    arr = y0.as_array() if isinstance(y0, State) else np.asarray(y0, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("history state must be finite")
    return ConstantHistory(arr.copy())


class Trajectory:
    """Uniform mesh with per-interval cubic Hermite interpolants.

    Evaluation at mesh points reproduces the stored states exactly; times in
    [-tau, 0] fall back to the history function, so lagged lookups are defined
    over the whole integrated span.
    """

    def __init__(self, ts, ys, fs, h, tau, history: HistoryFn):
        self.ts = ts
        self.ys = ys
        self.fs = fs
        self.h = float(h)
        self.tau = float(tau)
        self.history = history

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    @property
    def dim(self) -> int:
        return self.ys.shape[1]

    def __len__(self) -> int:
        return self.ys.shape[0]

    def eval(self, t: float) -> np.ndarray:
        """Dense-output state at time t, with t in [-tau, t_end]."""
        tol = 1e-9 * max(1.0, abs(self.t_end))
        if t <= 0.0:
            if t < -self.tau - tol:
                raise OutOfSpanError(f"t = {t:.6g} precedes the history interval")
            return np.asarray(self.history(t), dtype=float)
        if t > self.t_end + tol:
            raise OutOfSpanError(f"t = {t:.6g} beyond integrated span {self.t_end:.6g}")
        n = len(self) - 1
        j = min(int(t / self.h), n - 1)
        # exact mesh hits reproduce stored states bit-for-bit
        if t == self.ts[j]:
            return self.ys[j].copy()
        if t == self.ts[j + 1]:
            return self.ys[j + 1].copy()
        th = (t - j * self.h) / self.h
        h00 = (1.0 + 2.0 * th) * (1.0 - th) ** 2
        h10 = th * (1.0 - th) ** 2
        h01 = th * th * (3.0 - 2.0 * th)
        h11 = th * th * (th - 1.0)
        return (
            h00 * self.ys[j]
            + h10 * self.h * self.fs[j]
            + h01 * self.ys[j + 1]
            + h11 * self.h * self.fs[j + 1]
        )

    def sample(self, times: Sequence[float]) -> np.ndarray:
        """States at the given times; every time must lie in [0, t_end]."""
        tol = 1e-9 * max(1.0, abs(self.t_end))
        out = np.empty((len(times), self.dim))
        for i, t in enumerate(times):
            if t < -tol or t > self.t_end + tol:
                raise OutOfSpanError(f"t = {t:.6g} outside [0, {self.t_end:.6g}]")
            out[i] = self.eval(max(t, 0.0))
        return out

    def component(self, idx: int) -> np.ndarray:
        """Mesh values of one component."""
        return self.ys[:, idx]


def sample(traj: Trajectory, times: Sequence[float]) -> np.ndarray:
    return traj.sample(times)


def default_step(p: ModelParams, tau: float | None = None) -> float:
    """Step that resolves the delay and keeps RK4 inside its stability region.

    The stiffest linear rate occurring inside the invariant box is bounded by
    max(xi) * (w_max + g_max + s_max) plus the recruitment rate max(a, r); the
    step keeps h * rate <= 2 (the real RK4 stability interval is ~2.79). For
    positive tau the result is rounded down to an exact divisor of tau so the
    mesh hits the delay breaking points.
    """
    tau = p.tau if tau is None else float(tau)
    box = omega_box(p)
    rate = max(p.xi1, p.xi2, p.xi3) * (box.w_max + box.g_max + box.s_max) + max(p.a, p.r)
    target = min(0.01, 2.0 / rate)
    if tau <= 0.0:
        return target
    target = min(target, tau / 40.0)
    n = max(1, int(math.ceil(tau / target - 1e-12)))
    return tau / n


def _n_steps(t_end: float, h: float) -> int:
    return max(1, int(math.ceil(t_end / h - 1e-9)))


def integrate_generic(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tau: float,
    history: HistoryFn,
    t_end: float,
    h: float,
) -> Trajectory:
    """Method of steps for an arbitrary rhs f(current, lagged) -> derivative.

    With tau = 0 the lagged argument is the current stage state and the scheme
    is plain fixed-step RK4.
    """
    if t_end <= 0.0:
        raise InvalidInputError("t_end must be > 0")
    if h <= 0.0:
        raise InvalidStepError("step must be > 0")
    if tau > 0.0 and h > tau * (1.0 + 1e-12):
        raise InvalidStepError(f"step {h} exceeds the delay {tau}")

    y0 = np.asarray(history(0.0), dtype=float)
    dim = y0.shape[0]
    n = _n_steps(t_end, h)
    ts = np.arange(n + 1) * h
    ys = np.empty((n + 1, dim))
    fs = np.empty((n + 1, dim))
    ys[0] = y0

    def lagged(t: float, i: int) -> np.ndarray:
        if t <= 0.0:
            return np.asarray(history(t), dtype=float)
        j = min(int(t / h), i - 1)
        th = (t - j * h) / h
        h00 = (1.0 + 2.0 * th) * (1.0 - th) ** 2
        h10 = th * (1.0 - th) ** 2
        h01 = th * th * (3.0 - 2.0 * th)
        h11 = th * th * (th - 1.0)
        return h00 * ys[j] + h10 * h * fs[j] + h01 * ys[j + 1] + h11 * h * fs[j + 1]

    fs[0] = f(ys[0], np.asarray(history(-tau), dtype=float) if tau > 0.0 else ys[0])
    # overflow on the way to a detected blow-up is expected, not reportable
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n):
            t = ts[i]
            y = ys[i]
            if tau == 0.0:
                k1 = np.asarray(f(y, y), dtype=float)
                y2 = y + 0.5 * h * k1
                k2 = np.asarray(f(y2, y2), dtype=float)
                y3 = y + 0.5 * h * k2
                k3 = np.asarray(f(y3, y3), dtype=float)
                y4 = y + h * k3
                k4 = np.asarray(f(y4, y4), dtype=float)
            else:
                k1 = np.asarray(f(y, lagged(t - tau, i)), dtype=float)
                zmid = lagged(t + 0.5 * h - tau, i)
                k2 = np.asarray(f(y + 0.5 * h * k1, zmid), dtype=float)
                k3 = np.asarray(f(y + 0.5 * h * k2, zmid), dtype=float)
                k4 = np.asarray(f(y + h * k3, lagged(t + h - tau, i)), dtype=float)
            ys[i + 1] = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(ys[i + 1])):
                partial = Trajectory(ts[: i + 1], ys[: i + 1], fs[: i + 1], h, tau, history)
                raise BlowUpError(float(ts[i + 1]), partial)
            if tau == 0.0:
                fs[i + 1] = f(ys[i + 1], ys[i + 1])
            else:
                fs[i + 1] = f(ys[i + 1], lagged(ts[i + 1] - tau, i + 1))
    return Trajectory(ts, ys, fs, h, tau, history)


def integrate(
    p: ModelParams,
    history: Union[State, Sequence[float], HistoryFn],
    t_end: float,
    h: float | None = None,
) -> Trajectory:
    """Integrate the three-species model from the given history.

    `history` may be a State (constant pre-history, the usual case) or any
    callable t -> state defined on [-tau, 0]. Constant histories run through the
    compiled kernel when the active backend allows it.
    """
    tau = p.tau
    if h is None:
        h = default_step(p)
    if t_end <= 0.0:
        raise InvalidInputError("t_end must be > 0")
    if h <= 0.0:
        raise InvalidStepError("step must be > 0")
    if tau > 0.0 and h > tau * (1.0 + 1e-12):
        raise InvalidStepError(f"step {h} exceeds the delay {tau}")

    if isinstance(history, (State, tuple, list, np.ndarray)):
        history = constant_history(history)

    if isinstance(history, ConstantHistory):
        n = _n_steps(t_end, h)
        ys, fs, blow = _kernels.integrate_const_history(p.rates(), tau, history.value, n, h)
        ts = np.arange(n + 1) * h
        if blow >= 0:
            partial = Trajectory(ts[:blow], ys[:blow], fs[:blow], h, tau, history)
            raise BlowUpError(float(blow * h), partial)
        return Trajectory(ts, ys, fs, h, tau, history)

    rates = p.rates()

    def f(y, yd):
        return np.array(rhs_components(y[0], y[1], y[2], yd[0], yd[1], yd[2], *rates))

    return integrate_generic(f, tau, history, t_end, h)
