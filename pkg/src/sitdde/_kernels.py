"""Hot integration loop with a compiled (numba) and an interpreted twin.

The stepping loop below is written once as a plain scalar-arithmetic Python
function. When the compiled backend is active it is wrapped with ``numba.njit``
(nogil, so parameter scans can run it from threads); otherwise the same
function object runs under the interpreter. Both paths execute the identical
sequence of floating-point operations, so results agree bit-for-bit.

Backend selection: environment variable ``SITDDE_BACKEND``:
    auto  (default) compile when numba imports cleanly
    numba           require the compiled path, raise if numba is missing
    numpy           force the interpreted fallback
"""

from __future__ import annotations

import os

import numpy as np

from .model import rhs_components

__all__ = ["backend_name", "using_numba", "integrate_const_history"]

_BACKEND_ENV = "SITDDE_BACKEND"


def _select_backend() -> str:
    choice = os.environ.get(_BACKEND_ENV, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_BACKEND_ENV} must be auto, numba or numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


_BACKEND = _select_backend()


def backend_name() -> str:
    return _BACKEND


def using_numba() -> bool:
    return _BACKEND == "numba"


def _lagged(ys, fs, h, i, t, w0, g0, s0):
    """State at time t from the constant pre-history or completed intervals.

    `i` is the index of the step being computed: mesh points 0..i are filled and
    intervals 0..i-1 have both endpoint derivatives available. For h <= tau every
    lagged time satisfies t <= i*h, so clamping to interval i-1 only ever maps the
    exact right endpoint onto its own interval.
    """
    if t <= 0.0:
        return w0, g0, s0
    j = int(t / h)
    if j > i - 1:
        j = i - 1
    th = (t - j * h) / h
    h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th)
    h10 = th * (1.0 - th) * (1.0 - th)
    h01 = th * th * (3.0 - 2.0 * th)
    h11 = th * th * (th - 1.0)
    w = h00 * ys[j, 0] + h10 * h * fs[j, 0] + h01 * ys[j + 1, 0] + h11 * h * fs[j + 1, 0]
    g = h00 * ys[j, 1] + h10 * h * fs[j, 1] + h01 * ys[j + 1, 1] + h11 * h * fs[j + 1, 1]
    s = h00 * ys[j, 2] + h10 * h * fs[j, 2] + h01 * ys[j + 1, 2] + h11 * h * fs[j + 1, 2]
    return w, g, s


def _loop_const3(a, b, c, r, x1, x2, x3, tau, w0, g0, s0, h, n, ys, fs):
    """RK4 method-of-steps for the three-species model, constant pre-history.

    Fills ys/fs ((n+1) x 3 mesh states and derivatives) in place and returns -1,
    or the index of the first non-finite mesh point.
    """
    ys[0, 0] = w0
    ys[0, 1] = g0
    ys[0, 2] = s0
    dw, dg, ds = rhs_components(w0, g0, s0, w0, g0, s0, a, b, c, r, x1, x2, x3)
    fs[0, 0] = dw
    fs[0, 1] = dg
    fs[0, 2] = ds

    for i in range(n):
        t = i * h
        yw = ys[i, 0]
        yg = ys[i, 1]
        yss = ys[i, 2]

        # stage 1
        if tau == 0.0:
            wd, gd, sd = yw, yg, yss
        else:
            wd, gd, sd = _lagged(ys, fs, h, i, t - tau, w0, g0, s0)
        k1w, k1g, k1s = rhs_components(yw, yg, yss, wd, gd, sd, a, b, c, r, x1, x2, x3)

        # stages 2 and 3 share the lagged time t + h/2 - tau
        cw = yw + 0.5 * h * k1w
        cg = yg + 0.5 * h * k1g
        cs = yss + 0.5 * h * k1s
        if tau == 0.0:
            wd, gd, sd = cw, cg, cs
        else:
            wd, gd, sd = _lagged(ys, fs, h, i, t + 0.5 * h - tau, w0, g0, s0)
        k2w, k2g, k2s = rhs_components(cw, cg, cs, wd, gd, sd, a, b, c, r, x1, x2, x3)

        cw = yw + 0.5 * h * k2w
        cg = yg + 0.5 * h * k2g
        cs = yss + 0.5 * h * k2s
        if tau == 0.0:
            wd, gd, sd = cw, cg, cs
        k3w, k3g, k3s = rhs_components(cw, cg, cs, wd, gd, sd, a, b, c, r, x1, x2, x3)

        # stage 4
        cw = yw + h * k3w
        cg = yg + h * k3g
        cs = yss + h * k3s
        if tau == 0.0:
            wd, gd, sd = cw, cg, cs
        else:
            wd, gd, sd = _lagged(ys, fs, h, i, t + h - tau, w0, g0, s0)
        k4w, k4g, k4s = rhs_components(cw, cg, cs, wd, gd, sd, a, b, c, r, x1, x2, x3)

        ys[i + 1, 0] = yw + (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        ys[i + 1, 1] = yg + (h / 6.0) * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        ys[i + 1, 2] = yss + (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)

        if not (
            np.isfinite(ys[i + 1, 0])
            and np.isfinite(ys[i + 1, 1])
            and np.isfinite(ys[i + 1, 2])
        ):
            return i + 1

        if tau == 0.0:
            wd, gd, sd = ys[i + 1, 0], ys[i + 1, 1], ys[i + 1, 2]
        else:
            wd, gd, sd = _lagged(ys, fs, h, i + 1, (i + 1) * h - tau, w0, g0, s0)
        dw, dg, ds = rhs_components(
            ys[i + 1, 0], ys[i + 1, 1], ys[i + 1, 2], wd, gd, sd, a, b, c, r, x1, x2, x3
        )
        fs[i + 1, 0] = dw
        fs[i + 1, 1] = dg
        fs[i + 1, 2] = ds
    return -1


if _BACKEND == "numba":
    from numba import njit

    # same source compiled; nogil lets scan workers run in parallel threads
    _rhs_jit = njit(cache=True, inline="always")(rhs_components)

    def _rebind(func, mapping):
        import types

        g = dict(func.__globals__)
        g.update(mapping)
        return types.FunctionType(func.__code__, g, func.__name__, func.__defaults__)

    _lagged_jit = njit(cache=True)(_lagged)
    _loop_jit = njit(cache=True, nogil=True)(
        _rebind(_loop_const3, {"rhs_components": _rhs_jit, "_lagged": _lagged_jit})
    )
    _active_loop = _loop_jit
else:
    _active_loop = _loop_const3


def integrate_const_history(p_rates, tau, y0, n, h):
    """Run the active stepping loop for n steps from a constant pre-history y0.

    Returns (ys, fs, blow_index) with blow_index = -1 on success. Overflow en
    route to a detected blow-up is expected, so fp warnings are silenced here.
    """
    ys = np.empty((n + 1, 3))
    fs = np.empty((n + 1, 3))
    w0, g0, s0 = y0
    with np.errstate(over="ignore", invalid="ignore"):
        blow = _active_loop(*p_rates, tau, w0, g0, s0, h, n, ys, fs)
    return ys, fs, int(blow)
