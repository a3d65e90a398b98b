"""Equilibria of the delay-free system: trivial, boundary, and positive.

Positive equilibria are parametrized by the total population N. The component
closed forms (square-root branch included) are assembled per total, and N is a
root of H(N) = N - (w* + g* + s*). Roots are located by a sign-change grid scan
over (0, N_max] followed by bisection; N_max is the sum of the invariant-box
bounds, beyond which no equilibrium can live.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ComplexBranchError, DegenerateParametersError, InvalidInputError
from .model import ModelParams, State, omega_box, rhs

__all__ = [
    "EquilibriumReport",
    "boundary_equilibrium",
    "equilibrium_from_total",
    "h_of_n",
    "positive_equilibria",
    "trivial_equilibrium",
]

log = logging.getLogger(__name__)

KIND_TRIVIAL = "trivial"
KIND_BOUNDARY = "boundary"
KIND_POSITIVE = "positive"

# acceptance thresholds for reported equilibria
_H_TOL = 1e-10
_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumReport:
    """A located equilibrium with its existence conditions and rhs residual."""

    kind: str
    location: State
    residual: float
    conditions: tuple[tuple[str, bool], ...]
    N: float | None = None


def _conditions(p: ModelParams) -> tuple[tuple[str, bool], ...]:
    return (
        ("H1 (xi3 > xi1)", p.xi3 > p.xi1),
        ("r > xi3", p.r > p.xi3),
    )


def _residual(loc: State, p: ModelParams) -> float:
    return rhs(loc, loc, p).norm()


def trivial_equilibrium(p: ModelParams) -> EquilibriumReport:
    loc = State(0.0, 0.0, 0.0)
    return EquilibriumReport(KIND_TRIVIAL, loc, _residual(loc, p), _conditions(p))


def boundary_equilibrium(p: ModelParams) -> EquilibriumReport | None:
    """(0, 0, (r - xi3)/xi3) when r > xi3 strictly; None otherwise."""
    if not p.r > p.xi3:
        return None
    loc = State(0.0, 0.0, (p.r - p.xi3) / p.xi3)
    return EquilibriumReport(KIND_BOUNDARY, loc, _residual(loc, p), _conditions(p))


def _check_degenerate(p: ModelParams) -> None:
    if p.xi1 == p.xi3:
        raise DegenerateParametersError("xi1 == xi3: positive-equilibrium closed form is undefined")
    if p.c == 0.0:
        raise DegenerateParametersError(
            "c == 0: the sterile component of the closed form divides by c*r"
        )


def _alpha(N: float, p: ModelParams) -> float:
    a, c, r, x1, x3 = p.a, p.c, p.r, p.xi1, p.xi3
    base = (x3 - x1) * N * (a + x1 * N * (N + 1.0)) + c * r
    return base * base + 4.0 * c * x1 * (x1 - x3) * (N + 1.0) * N * N * r


def equilibrium_from_total(N: float, p: ModelParams) -> State:
    """Component closed forms at total population N (the -sqrt branch for w)."""
    if not (math.isfinite(N) and N > 0.0):
        raise InvalidInputError(f"N must be a positive finite scalar, got {N!r}")
    _check_degenerate(p)
    alpha = _alpha(N, p)
    if alpha < 0.0:
        raise ComplexBranchError(f"alpha(N) = {alpha:.6g} < 0 at N = {N:.6g}")
    a, b, c, r, x1, x2, x3 = p.rates()
    sq = math.sqrt(alpha)
    core = (x1 - x3) * N * (a + x1 * N * (N + 1.0))
    w = ((x1 - x3) * N * (x1 * N * (N + 1.0) - a) + c * r - sq) / (2.0 * a * (x1 - x3) * N)
    g = (b * (c * r - core) - b * sq) / (2.0 * c * x2 * N * r)
    s = (core - c * r + sq) / (2.0 * (x1 - x3) * N * r)
    return State(w, g, s)


def h_of_n(N: float, p: ModelParams) -> float:
    """H(N) = N - (w* + g* + s*); its positive roots give the equilibrium totals."""
    st = equilibrium_from_total(N, p)
    return N - (st.w + st.g + st.s)


def _h_grid(Ns: np.ndarray, p: ModelParams) -> np.ndarray:
    """Vectorized H over a grid; NaN where alpha < 0 (excluded branch)."""
    a, b, c, r, x1, x2, x3 = p.rates()
    base = (x3 - x1) * Ns * (a + x1 * Ns * (Ns + 1.0)) + c * r
    alpha = base * base + 4.0 * c * x1 * (x1 - x3) * (Ns + 1.0) * Ns * Ns * r
    out = np.full_like(Ns, np.nan)
    ok = alpha >= 0.0
    if not np.all(ok):
        log.info("alpha < 0 on %d of %d grid points; intervals excluded", int((~ok).sum()), Ns.size)
    sq = np.sqrt(alpha[ok])
    N = Ns[ok]
    core = (x1 - x3) * N * (a + x1 * N * (N + 1.0))
    w = ((x1 - x3) * N * (x1 * N * (N + 1.0) - a) + c * r - sq) / (2.0 * a * (x1 - x3) * N)
    g = (b * (c * r - core) - b * sq) / (2.0 * c * x2 * N * r)
    s = (core - c * r + sq) / (2.0 * (x1 - x3) * N * r)
    out[ok] = N - (w + g + s)
    return out


def positive_equilibria(p: ModelParams, n_grid: int = 10_000) -> list[EquilibriumReport]:
    """All positive equilibria found on (0, N_max], ordered by N ascending.

    Sign changes of H on a uniform grid are refined by bisection to machine
    precision (well beyond the |H| <= 1e-10 * N_max certificate); candidates
    with any non-positive component, or failing the rhs-residual check, are
    dropped. An empty list is a valid outcome.
    """
    _check_degenerate(p)
    box = omega_box(p)
    n_max = box.w_max + box.g_max + box.s_max
    eps = 1e-6 * n_max
    grid = np.linspace(eps, n_max, n_grid)
    vals = _h_grid(grid, p)

    reports: list[EquilibriumReport] = []
    finite = np.isfinite(vals)
    for i in range(n_grid - 1):
        if not (finite[i] and finite[i + 1]):
            continue
        if vals[i] == 0.0:
            root = float(grid[i])
        elif np.sign(vals[i]) * np.sign(vals[i + 1]) < 0:
            lo, hi = float(grid[i]), float(grid[i + 1])
            flo = float(vals[i])
            for _ in range(200):
                if hi - lo <= 1e-15 * max(1.0, hi):
                    break
                mid = 0.5 * (lo + hi)
                fm = h_of_n(mid, p)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if np.sign(fm) == np.sign(flo):
                    lo, flo = mid, fm
                else:
                    hi = mid
            root = 0.5 * (lo + hi)
        else:
            continue
        if abs(h_of_n(root, p)) > _H_TOL * n_max:
            log.warning("discarding badly-converged root N = %.6g", root)
            continue
        loc = equilibrium_from_total(root, p)
        if not (loc.w > 0.0 and loc.g > 0.0 and loc.s > 0.0):
            continue
        res = _residual(loc, p)
        if res > _RESIDUAL_TOL * max(1.0, loc.norm()):
            log.warning("discarding root N = %.6g with residual %.3g", root, res)
            continue
        reports.append(EquilibriumReport(KIND_POSITIVE, loc, res, _conditions(p), N=root))
    reports.sort(key=lambda rep: rep.N)
    return reports
