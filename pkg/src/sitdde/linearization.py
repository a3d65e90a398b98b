"""Quartic-expansion coefficients at an equilibrium, the Jacobian pair of the
linearized delay system, and the coefficients of its characteristic
quasi-polynomial.

Only ten of the expansion coefficients (a2, a3, a4, b4, b6, b7, c2, c3, c4, c8)
enter the spectral analysis; the full set is computed anyway so each closed
form can be cross-checked against finite differences of the vector field, and
so the nominally-zero constant terms (a1, b8, c1) can be asserted to vanish at
verified equilibria instead of assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import InvalidInputError
from .model import ModelParams, State

__all__ = [
    "CoefficientSet",
    "DeltaSet",
    "JacobianPair",
    "delta_coefficients",
    "expansion_coefficients",
    "jacobians",
]


@dataclass(frozen=True)
class CoefficientSet:
    """Taylor coefficients about (A1, A2, A3) = equilibrium components.

    a1..a12 belong to the w equation, b1..b8 to the g equation, c1..c12 to the
    s equation. a4 multiplies the lagged s deviation, c4 the lagged w deviation;
    a1, b8, c1 are the constant terms (zero at an exact equilibrium).
    """

    a1: float; a2: float; a3: float; a4: float; a5: float; a6: float
    a7: float; a8: float; a9: float; a10: float; a11: float; a12: float
    b1: float; b2: float; b3: float; b4: float; b5: float; b6: float
    b7: float; b8: float
    c1: float; c2: float; c3: float; c4: float; c5: float; c6: float
    c7: float; c8: float; c9: float; c10: float; c11: float; c12: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class JacobianPair:
    """J0 acts on the current deviation, J1 on the lagged one.

    J1 holds only a4 at (0, 2) and c4 at (2, 0); that sparsity is fixed by the
    placement of the lagged arguments in the model.
    """

    J0: np.ndarray
    J1: np.ndarray


@dataclass(frozen=True)
class DeltaSet:
    """Coefficients of det(lambda*I - J0 - J1*e^{-lambda*tau}) =
    lambda^3 + d1 + d2*lambda + d3*lambda^2
    + (d4*lambda + d5) e^{-lambda*tau} + (d6*lambda + d7) e^{-2*lambda*tau}.
    """

    d1: float
    d2: float
    d3: float
    d4: float
    d5: float
    d6: float
    d7: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.d1, self.d2, self.d3, self.d4, self.d5, self.d6, self.d7)


def expansion_coefficients(eq: State, p: ModelParams) -> CoefficientSet:
    """Evaluate every expansion coefficient at the given point."""
    if not isinstance(eq, State):
        eq = State.from_array(eq)
    A1, A2, A3 = eq.w, eq.g, eq.s
    if not all(math.isfinite(v) for v in (A1, A2, A3)):
        raise InvalidInputError("expansion point must be finite")
    a, b, c, r, x1, x2, x3 = p.rates()
    D = 1.0 + A1 + A2 + A3
    B = 1.0 + A1
    D2, D3, D4, D5 = D * D, D**3, D**4, D**5
    B2, B3, B4, B5 = B * B, B**3, B**4, B**5

    return CoefficientSet(
        a1=a * A1**2 / D + A3 * A1 * r / D - A1**2 * x1 - A2 * A1 * x1 - A3 * A1 * x1,
        a2=(-a * A1**2 / D2 + 2 * a * A1 / D - A3 * A1 * r / D2 + A3 * r / D
            - 2 * A1 * x1 - A2 * x1 - A3 * x1),
        a3=-a * A1**2 / D2 - A3 * A1 * r / D2 - A1 * x1,
        a4=-a * A1**2 / D2 + A1 * r / D - A3 * A1 * r / D2 - A1 * x1,
        a5=(a * A1**2 / D3 - 2 * a * A1 / D2 + a / D + A3 * A1 * r / D3
            - A3 * r / D2 - x1),
        a6=-a * A1**2 / D4 + 2 * a * A1 / D3 - a / D2 - A3 * A1 * r / D4 + A3 * r / D3,
        a7=a * A1**2 / D5 - 2 * a * A1 / D4 + a / D3 + A3 * A1 * r / D5 - A3 * r / D4,
        a8=a * A1**2 / D3 + A3 * A1 * r / D3,
        a9=-a * A1**2 / D4 - A3 * A1 * r / D4,
        a10=a * A1**2 / D5 + A3 * A1 * r / D5,
        a11=a * A1**2 / D3 - A1 * r / D2 + A3 * A1 * r / D3,
        a12=-a * A1**2 / D4 + A1 * r / D3 - A3 * A1 * r / D4,
        b1=A1 * b / B5 - b / B4,
        b2=b / B3 - A1 * b / B4,
        b3=A1 * b / B3 - b / B2,
        b4=b / B - A1 * b / B2 - A2 * x2,
        b5=-x2,
        b6=-A2 * x2,
        b7=-A1 * x2 - 2 * A2 * x2 - A3 * x2,
        b8=A1 * b / B - A2**2 * x2 - A1 * A2 * x2 - A3 * A2 * x2,
        c1=(a * A1 * A3 / D + A3**2 * r / D + A1 * c / B
            - A3**2 * x3 - A1 * A3 * x3 - A2 * A3 * x3),
        c2=-a * A1 * A3 / D2 - A3**2 * r / D2 - A3 * x3,
        c3=(-a * A1 * A3 / D2 + a * A1 / D - A3**2 * r / D2 + 2 * A3 * r / D
            - 2 * A3 * x3 - A1 * x3 - A2 * x3),
        c4=a * A3 / D - a * A1 * A3 / D2 - A3 * x3 - A3**2 * r / D2,
        c5=-a * A3 / D2 + a * A1 * A3 / D3 + A3**2 * r / D3,
        c6=a * A3 / D3 - a * A1 * A3 / D4 - A3**2 * r / D4,
        c7=-a * A3 / D4 + a * A1 * A3 / D5 + A3**2 * r / D5,
        c8=c / B - A1 * c / B2,
        c9=A1 * c / B3 - c / B2,
        c10=c / B3 - A1 * c / B4,
        c11=A1 * c / B5 - c / B4,
        c12=a * A1 * A3 / D3 + A3**2 * r / D3,
    )


def jacobians(cs: CoefficientSet) -> JacobianPair:
    """Assemble (J0, J1) of the linearized system from the linear coefficients."""
    J0 = np.array(
        [
            [cs.a2, cs.a3, 0.0],
            [cs.b4, cs.b7, cs.b6],
            [cs.c8, cs.c2, cs.c3],
        ]
    )
    J1 = np.zeros((3, 3))
    J1[0, 2] = cs.a4
    J1[2, 0] = cs.c4
    return JacobianPair(J0=J0, J1=J1)


def delta_coefficients(cs: CoefficientSet) -> DeltaSet:
    """Characteristic coefficients; algebraically these are the cofactor
    expansion of det(lambda*I - J0 - J1*e^{-lambda*tau}).
    """
    a2, a3, a4 = cs.a2, cs.a3, cs.a4
    b4, b6, b7 = cs.b4, cs.b6, cs.b7
    c2, c3, c4, c8 = cs.c2, cs.c3, cs.c4, cs.c8
    return DeltaSet(
        d1=a2 * b6 * c2 + a3 * b4 * c3 - a2 * b7 * c3 - a3 * b6 * c8,
        d2=-a3 * b4 + a2 * b7 + a2 * c3 - b6 * c2 + b7 * c3,
        d3=-a2 - b7 - c3,
        d4=-a4 * c8,
        d5=-a4 * b4 * c2 - a3 * b6 * c4 + a4 * b7 * c8,
        d6=-a4 * c4,
        d7=a4 * b7 * c4,
    )
