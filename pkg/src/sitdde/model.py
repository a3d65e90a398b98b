"""Model definition: parameters, state triples, the delayed vector field, and the
positively-invariant box used as a diagnostic region.

The model couples wild (w), sterile (g) and non-sterile (s) mosquito populations.
Wild recruitment saturates with total density and involves the non-sterile
population at a lagged time; non-sterile recruitment involves the lagged wild
population. Sterile dynamics are undelayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "ModelParams",
    "State",
    "OmegaBox",
    "rhs",
    "rhs_components",
    "omega_box",
    "in_omega",
]


@dataclass(frozen=True)
class ModelParams:
    """The eight biological parameters.

    a    : wild offspring production rate (per day, > 0)
    b    : sterile release rate (per day, > 0)
    c    : residual-fertility (non-sterile) release rate (per day, >= 0)
    r    : non-sterile offspring production rate (per day, > 0)
    xi1..xi3 : density-dependent death rates of w, g, s (per mosquito per day, > 0)
    tau  : delay (days, >= 0)
    """

    a: float
    b: float
    c: float
    r: float
    xi1: float
    xi2: float
    xi3: float
    tau: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "r", "xi1", "xi2", "xi3", "tau"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise InvalidInputError(f"parameter {name} must be finite, got {v!r}")
        for name in ("a", "b", "r", "xi1", "xi2", "xi3"):
            if getattr(self, name) <= 0.0:
                raise InvalidInputError(f"parameter {name} must be > 0")
        if self.c < 0.0:
            raise InvalidInputError("parameter c must be >= 0")
        if self.tau < 0.0:
            raise InvalidInputError("parameter tau must be >= 0")

    def with_(self, **kw) -> "ModelParams":
        """Copy with some fields replaced (used by parameter scans)."""
        return replace(self, **kw)

    def rates(self) -> tuple[float, ...]:
        """The seven rate constants, delay excluded, in kernel argument order."""
        return (self.a, self.b, self.c, self.r, self.xi1, self.xi2, self.xi3)


@dataclass(frozen=True)
class State:
    """A (w, g, s) triple.

    Represents either a population point (component-wise >= 0) or a derivative
    (sign unrestricted); only finiteness is enforced so the same type serves both.
    """

    w: float
    g: float
    s: float

    def __post_init__(self):
        for name in ("w", "g", "s"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise InvalidInputError(f"state component {name} must be finite, got {v!r}")

    def __iter__(self) -> Iterator[float]:
        return iter((self.w, self.g, self.s))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.g, self.s])

    @staticmethod
    def from_array(arr) -> "State":
        w, g, s = arr
        return State(float(w), float(g), float(s))

    def is_nonnegative(self) -> bool:
        return self.w >= 0.0 and self.g >= 0.0 and self.s >= 0.0

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.g * self.g + self.s * self.s)


@dataclass(frozen=True)
class OmegaBox:
    """Bounds of the invariant-candidate box: 0 <= w <= w_max, etc."""

    w_max: float
    g_max: float
    s_max: float


def rhs_components(w, g, s, wd, gd, sd, a, b, c, r, x1, x2, x3):
    """Vector field evaluated on scalars; (wd, gd, sd) is the lagged state.

    The lagged slots actually used are sd (in the w equation, both in the
    recruitment fraction and the death term) and wd (in the s equation); gd is
    accepted for uniformity but never read. Written once so the compiled kernel
    and the interpreted fallback share the exact same arithmetic.
    """
    dw = ((a * w + r * sd) / (1.0 + w + g + sd) - x1 * (w + g + sd)) * w
    dg = b * w / (1.0 + w) - x2 * (w + g + s) * g
    ds = c * w / (1.0 + w) + ((r * s + a * wd) / (1.0 + wd + g + s) - x3 * (wd + g + s)) * s
    return dw, dg, ds


def rhs(current: State, delayed: State, p: ModelParams) -> State:
    """Time derivative of (w, g, s) given the current and lagged states.

    `delayed` supplies s(t - tau) for the w equation and w(t - tau) for the
    s equation; the g equation uses current values only.
    """
    if not isinstance(current, State):
        current = State.from_array(current)
    if not isinstance(delayed, State):
        delayed = State.from_array(delayed)
    dw, dg, ds = rhs_components(
        current.w, current.g, current.s, delayed.w, delayed.g, delayed.s, *p.rates()
    )
    return State(dw, dg, ds)


def omega_box(p: ModelParams) -> OmegaBox:
    """Component-wise bounds of the diagnostic box.

    w_max = a/xi1, g_max = sqrt(b/xi2), s_max = (r + sqrt(r^2 + 4 xi3 c)) / (2 xi3).
    c = 0 is fine: s_max reduces to r/xi3.
    """
    return OmegaBox(
        w_max=p.a / p.xi1,
        g_max=math.sqrt(p.b / p.xi2),
        s_max=(p.r + math.sqrt(p.r * p.r + 4.0 * p.xi3 * p.c)) / (2.0 * p.xi3),
    )


def in_omega(x: State, box: OmegaBox) -> bool:
    """Membership in the closed box (faces included)."""
    return (
        0.0 <= x.w <= box.w_max
        and 0.0 <= x.g <= box.g_max
        and 0.0 <= x.s <= box.s_max
    )
