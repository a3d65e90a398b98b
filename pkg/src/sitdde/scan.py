"""One-parameter bifurcation scans: per-grid-value attractor samples.

For every value of the swept parameter the model is integrated from the
configured constant history through a transient horizon, then the chosen
observable is sampled over the sampling horizon (local extrema by default, or a
fixed-period strobe). The sample set is clustered to label the point steady,
periodic(k) or chaotic. Grid points are independent and may be computed by a
thread pool; assembly is in grid order, so results do not depend on scheduling.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dde import Trajectory, default_step, integrate
from .errors import BlowUpError, InvalidInputError, InvalidStepError
from .model import ModelParams, State

__all__ = [
    "GridPoint",
    "ScanConfig",
    "ScanResult",
    "classify_samples",
    "extrema",
    "scan",
]

log = logging.getLogger(__name__)

STEADY = "steady"
PERIODIC = "periodic"
CHAOTIC = "chaotic"

_OBSERVABLES = {"w": 0, "g": 1, "s": 2}
_VARYABLE = ("tau", "a", "b", "c", "r", "xi1", "xi2", "xi3")

# plausibility envelope used for warnings only, never enforced
_PLAUSIBLE = {
    "a": (1.0, 20.0),
    "b": (5.0, 25.0),
    "c": (0.01, 25.0),
    "r": (1.0, 20.0),
    "xi1": (0.02, 3.5),
    "xi2": (1.5, 2.5),
    "xi3": (0.1, 2.5),
    "tau": (0.0, 7.0),
}

STEADY_SPREAD_TOL = 1e-6
CLUSTER_TOL = 1e-4
CHAOS_CLUSTERS = 16


@dataclass(frozen=True)
class ScanConfig:
    vary: str
    lo: float
    hi: float
    n_points: int
    history: State
    t_transient: float = 300.0
    t_sample: float = 200.0
    observable: str = "s"
    sampler: str = "extrema"
    strobe_period: float | None = None
    step: float | None = None  # overrides the stability-aware default

    def __post_init__(self):
        if self.vary not in _VARYABLE:
            raise InvalidInputError(f"vary must be one of {_VARYABLE}, got {self.vary!r}")
        if not self.lo < self.hi:
            raise InvalidInputError("scan range needs lo < hi")
        if self.n_points < 2:
            raise InvalidInputError("n_points must be >= 2")
        if self.t_transient <= 0.0 or self.t_sample <= 0.0:
            raise InvalidInputError("horizons must be > 0")
        if self.observable not in _OBSERVABLES:
            raise InvalidInputError("observable must be one of w, g, s")
        if self.sampler not in ("extrema", "strobe"):
            raise InvalidInputError("sampler must be extrema or strobe")
        if self.sampler == "strobe" and not (self.strobe_period and self.strobe_period > 0):
            raise InvalidInputError("strobe sampler needs a positive strobe_period")
        rng = _PLAUSIBLE[self.vary]
        if self.lo < rng[0] or self.hi > rng[1]:
            log.warning(
                "%s range [%g, %g] leaves the plausible envelope [%g, %g]",
                self.vary, self.lo, self.hi, rng[0], rng[1],
            )


@dataclass(frozen=True)
class GridPoint:
    value: float
    samples: np.ndarray
    classification: str
    n_clusters: int
    vmin: float
    vmax: float
    failed: bool = False
    error: str | None = None


@dataclass(frozen=True)
class ScanResult:
    config: ScanConfig
    points: tuple[GridPoint, ...] = field(default_factory=tuple)

    @property
    def values(self) -> np.ndarray:
        return np.array([pt.value for pt in self.points])

    @property
    def n_failures(self) -> int:
        return sum(1 for pt in self.points if pt.failed)


def extrema(traj: Trajectory, component: int, window: tuple[float, float]) -> list[tuple[float, float]]:
    """Interior local extrema of one component over the window.

    Sign changes of consecutive mesh differences locate an extremum; a parabola
    through the three surrounding mesh points refines both its time and value.
    Window endpoints are excluded; an empty list means the segment is monotone.
    """
    t_lo, t_hi = window
    if t_lo < -1e-9 or t_hi > traj.t_end + 1e-9 * max(1.0, traj.t_end):
        raise InvalidInputError("window outside the integrated span")
    h = traj.h
    i_lo = max(0, int(np.ceil(t_lo / h - 1e-9)))
    i_hi = min(len(traj) - 1, int(np.floor(t_hi / h + 1e-9)))
    y = traj.ys[i_lo : i_hi + 1, component]
    if y.size < 3:
        return []
    d = np.diff(y)
    out: list[tuple[float, float]] = []
    for k in range(1, d.size):
        if d[k - 1] == 0.0 or d[k - 1] * d[k] >= 0.0:
            continue
        y0, y1, y2 = y[k - 1], y[k], y[k + 1]
        denom = y0 - 2.0 * y1 + y2
        if denom != 0.0:
            dx = max(-1.0, min(1.0, 0.5 * (y0 - y2) / denom))
            t_star = (i_lo + k + dx) * h
            v_star = y1 - (y0 - y2) ** 2 / (8.0 * denom)
        else:
            t_star = (i_lo + k) * h
            v_star = y1
        out.append((t_star, v_star))
    return out


def classify_samples(values: np.ndarray) -> tuple[str, int]:
    """(label, cluster count) for a sample set.

    Steady: no samples, or spread within 1e-6 of the observable scale.
    Otherwise single-pass clustering at 1e-4 relative tolerance; 16 or more
    distinct clusters counts as chaotic.
    """
    if values.size == 0:
        return STEADY, 0
    spread = float(values.max() - values.min())
    scale = max(1.0, float(np.max(np.abs(values))))
    if spread <= STEADY_SPREAD_TOL * scale:
        return STEADY, 1
    sv = np.sort(values)
    clusters = [float(sv[0])]
    for v in sv[1:]:
        if abs(v - clusters[-1]) > CLUSTER_TOL * max(1.0, abs(clusters[-1])):
            clusters.append(float(v))
    k = len(clusters)
    return (CHAOTIC if k >= CHAOS_CLUSTERS else PERIODIC), k


def _grid_point(p: ModelParams, cfg: ScanConfig, value: float) -> GridPoint:
    pv = p.with_(**{cfg.vary: value})
    comp = _OBSERVABLES[cfg.observable]
    t_end = cfg.t_transient + cfg.t_sample
    h = cfg.step if cfg.step is not None else default_step(pv)
    try:
        traj = integrate(pv, cfg.history, t_end, h)
    except (BlowUpError, InvalidStepError) as exc:
        # a fixed step may be legal at some grid values of a tau sweep and not
        # at others; both kinds of per-point failure are recorded, never fatal
        return GridPoint(
            value=value,
            samples=np.array([]),
            classification="failed",
            n_clusters=0,
            vmin=np.nan,
            vmax=np.nan,
            failed=True,
            error=str(exc),
        )
    if cfg.sampler == "extrema":
        pts = extrema(traj, comp, (cfg.t_transient, traj.t_end))
        samples = np.array([v for _, v in pts])
        if samples.size == 0:
            samples = np.array([float(traj.ys[-1, comp])])
    else:
        # strictly after the transient horizon
        times = np.arange(cfg.t_transient + cfg.strobe_period, traj.t_end + 1e-12, cfg.strobe_period)
        samples = traj.sample(times)[:, comp]
    label, k = classify_samples(samples)
    return GridPoint(
        value=value,
        samples=samples,
        classification=label,
        n_clusters=k,
        vmin=float(samples.min()),
        vmax=float(samples.max()),
    )


def _n_workers(n_points: int) -> int:
    raw = os.environ.get("SITDDE_THREADS", "0").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        raise InvalidInputError(f"SITDDE_THREADS must be an integer, got {raw!r}")
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, min(n, n_points))


def scan(p: ModelParams, cfg: ScanConfig) -> ScanResult:
    """Sweep one parameter over a uniform grid and sample the attractor.

    Per-point integration failures are recorded on the point, never fatal to
    the scan. The compiled kernel releases the GIL, so the grid genuinely runs
    in parallel when more than one worker is allowed.
    """
    grid = np.linspace(cfg.lo, cfg.hi, cfg.n_points)
    workers = _n_workers(cfg.n_points)
    if workers == 1:
        points = [_grid_point(p, cfg, float(v)) for v in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(lambda v: _grid_point(p, cfg, float(v)), grid))
    return ScanResult(config=cfg, points=tuple(points))
