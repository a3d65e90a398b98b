"""Stability and Hopf machinery for the characteristic quasi-polynomial

    p(lambda) = lambda^3 + d1 + d2*lambda + d3*lambda^2
                + (d4*lambda + d5) e^{-lambda*tau}
                + (d6*lambda + d7) e^{-2*lambda*tau}.

Pure imaginary roots lambda = i*omega exist exactly when omega^2 is a positive
root of a degree-6 polynomial in m = omega^2 whose coefficients are polynomial
in the d's; for each such omega the delay follows from the cos/sin of tau*omega
obtained by solving the 2x2 linear system given by the real and imaginary parts
of p(i*omega) = 0. Every candidate crossing is certified by direct residual
evaluation, so transcription slips in the long coefficient formulas cannot
silently corrupt results.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryAbsentError,
    DegenerateCrossingError,
    InconsistentCrossingError,
    SingularDenominatorError,
)
from .linearization import DeltaSet
from .model import ModelParams, State, rhs

__all__ = [
    "BoundarySpectrum",
    "Crossing",
    "CriticalDelays",
    "GammaSet",
    "LemmaReport",
    "RouthHurwitz",
    "SpectralReport",
    "analyze",
    "boundary_spectrum",
    "collapsed_jacobian",
    "critical_delays",
    "crossing_frequencies",
    "crossing_trig",
    "delays_from_trig",
    "gamma_coefficients",
    "lemma_conditions",
    "quasipoly",
    "quasipoly_residual",
    "routh_hurwitz",
    "transversality",
]

# certification tolerances
RESIDUAL_TOL = 1e-8  # scaled by (1 + omega^3)
TRIG_TOL = 1e-6
ROOT_TOL = 1e-10  # scaled by max(1, |gamma|_inf)


@dataclass(frozen=True)
class RouthHurwitz:
    """tau = 0 cubic stability test: all four margins must be positive."""

    stable: bool
    linear: float       # d2 + d4 + d6
    quadratic: float    # d3
    constant: float     # d1 + d5 + d7
    product: float      # (d2 + d4 + d6) * d3 - (d1 + d5 + d7)


@dataclass(frozen=True)
class GammaSet:
    """Coefficients of m^6 + g1*m^5 + ... + g6, m = omega^2."""

    g1: float
    g2: float
    g3: float
    g4: float
    g5: float
    g6: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.g1, self.g2, self.g3, self.g4, self.g5, self.g6)


@dataclass(frozen=True)
class LemmaReport:
    gamma6: float
    h3_first: bool      # d5^2 < 2*d7^2
    h3_second: bool     # d1^4 + d7^4 + d5^2*d7^2 < 2*d5^2*d7*d1
    branch: str


@dataclass(frozen=True)
class CriticalDelays:
    """Validated delays for one crossing frequency."""

    omega: float
    cos_val: float
    sin_val: float
    theta: float
    taus: tuple[tuple[int, float], ...]      # (j, tau) pairs that certified
    rejected: tuple[tuple[int, float], ...]  # pairs failing the residual check


@dataclass(frozen=True)
class Crossing:
    omega: float
    m: float
    taus: tuple[tuple[int, float], ...]
    rejected: tuple[tuple[int, float], ...]
    transversality: int
    residual: float  # |p(i*omega)| at the first validated delay


@dataclass(frozen=True)
class SpectralReport:
    deltas: DeltaSet
    routh_hurwitz: RouthHurwitz
    gammas: GammaSet
    lemmas: LemmaReport
    crossings: tuple[Crossing, ...]
    tau0: float | None
    verdict: str


@dataclass(frozen=True)
class BoundarySpectrum:
    """Closed-form eigenvalues at the boundary equilibrium next to the numeric
    ones; the numeric Jacobian decides the classification."""

    lambda1: float
    lambda2: float
    lambda3: float
    numeric_eigenvalues: tuple[complex, complex, complex]
    classification: str
    closed_form_classification: str
    sign_mismatch: bool
    condition_source: bool  # repellor condition, evaluated as stated
    condition_sink: bool


def quasipoly(lam: complex, tau: float, d: DeltaSet) -> complex:
    """p(lambda) multiplied through by e^{lambda*tau} (root set unchanged)."""
    d1, d2, d3, d4, d5, d6, d7 = d.as_tuple()
    return (
        (lam**3 + d1 + d2 * lam + d3 * lam * lam) * cmath.exp(lam * tau)
        + (d4 * lam + d5)
        + (d6 * lam + d7) * cmath.exp(-lam * tau)
    )


def quasipoly_residual(lam: complex, tau: float, d: DeltaSet) -> float:
    return abs(quasipoly(lam, tau, d))


def routh_hurwitz(d: DeltaSet) -> RouthHurwitz:
    """Stability of the tau = 0 cubic lambda^3 + d3*lambda^2 +
    (d2+d4+d6)*lambda + (d1+d5+d7)."""
    lin = d.d2 + d.d4 + d.d6
    quad = d.d3
    const = d.d1 + d.d5 + d.d7
    prod = lin * quad - const
    return RouthHurwitz(
        stable=lin > 0.0 and quad > 0.0 and const > 0.0 and prod > 0.0,
        linear=lin,
        quadratic=quad,
        constant=const,
        product=prod,
    )


def gamma_coefficients(d: DeltaSet) -> GammaSet:
    """Coefficients of the crossing polynomial F(m) = m^6 + g1*m^5 + ... + g6.

    F is defined by |real part|^2 + |imag part|^2 of p(i*omega) = 0, i.e. by
    Dsq - Nc^2 - Ns^2 where Dsq is the squared trig denominator and Nc, Ns the
    cos/sin numerators of `crossing_trig`; the closed forms below are the
    collected coefficients of that polynomial. Roots m > 0 of F are exactly the
    squared frequencies at which cos^2 + sin^2 = 1 is achievable.
    """
    d1, d2, d3, d4, d5, d6, d7 = d.as_tuple()
    g1 = -4 * d2 + 2 * d3**2
    g2 = -4 * d1 * d3 + 6 * d2**2 - 4 * d2 * d3**2 + d3**4 - d4**2 - 2 * d6**2
    g3 = (
        2 * d1**2 + 8 * d1 * d2 * d3 - 4 * d1 * d3**3 - 4 * d2**3
        + 2 * d2**2 * d3**2 + 2 * d2 * d4**2 + 4 * d2 * d6**2
        - d3**2 * d4**2 - 2 * d3**2 * d6**2 - 2 * d4**2 * d6
        - d5**2 - 2 * d7**2
    )
    g4 = (
        -4 * d1**2 * d2 + 6 * d1**2 * d3**2 - 4 * d1 * d2**2 * d3
        + 2 * d1 * d3 * d4**2 + 4 * d1 * d3 * d6**2 + d2**4
        - d2**2 * d4**2 - 2 * d2**2 * d6**2 + 2 * d2 * d4**2 * d6
        + 2 * d2 * d5**2 + 4 * d2 * d7**2 - d3**2 * d5**2
        - 2 * d3**2 * d7**2 + 2 * d3 * d4**2 * d7 - 4 * d3 * d4 * d5 * d6
        - d4**2 * d6**2 - 4 * d4 * d5 * d7 + 2 * d5**2 * d6 + d6**4
    )
    g5 = (
        -4 * d1**3 * d3 + 2 * d1**2 * d2**2 - d1**2 * d4**2
        - 2 * d1**2 * d6**2 + 2 * d1 * d3 * d5**2 + 4 * d1 * d3 * d7**2
        - 2 * d1 * d4**2 * d7 + 4 * d1 * d4 * d5 * d6 - d2**2 * d5**2
        - 2 * d2**2 * d7**2 + 4 * d2 * d4 * d5 * d7 - 2 * d2 * d5**2 * d6
        - 2 * d3 * d5**2 * d7 - d4**2 * d7**2 - d5**2 * d6**2
        + 2 * d6**2 * d7**2
    )
    g6 = (d1 - d7) ** 2 * (d1 - d5 + d7) * (d1 + d5 + d7)
    return GammaSet(g1, g2, g3, g4, g5, g6)


def crossing_frequencies(g: GammaSet) -> list[float]:
    """Real positive roots m of F, companion-matrix seeded and Newton polished,
    sorted ascending. omega_k = sqrt(m_k). An empty list is a valid result.

    A polished root certifies when |F(m)| <= 1e-10 times the magnitude of the
    evaluation itself (sum of |gamma_k| m^(6-k) terms): a backward-error bound
    that stays meaningful for large roots, where an absolute bound in units of
    |gamma|_inf could never be met in double precision.
    """
    coeffs = np.array([1.0, *g.as_tuple()])
    roots = np.roots(coeffs)

    def F(m: float) -> float:
        return float(np.polyval(coeffs, m))

    def eval_scale(m: float) -> float:
        return max(1.0, float(np.polyval(np.abs(coeffs), abs(m))))

    dcoeffs = np.polyder(coeffs)

    out: list[float] = []
    for z in roots:
        if abs(z.imag) > 1e-8 * (1.0 + abs(z)):
            continue
        m = float(z.real)
        if m <= 0.0:
            continue
        best, best_val = m, abs(F(m))
        for _ in range(60):
            fp = float(np.polyval(dcoeffs, m))
            if fp == 0.0:
                break
            step = F(m) / fp
            m -= step
            val = abs(F(m))
            if val < best_val:
                best, best_val = m, val
            if abs(step) <= 1e-16 * max(1.0, abs(m)):
                break
        if best <= 0.0 or best_val > ROOT_TOL * eval_scale(best):
            continue
        out.append(best)
    out.sort()
    deduped: list[float] = []
    for m in out:
        if not deduped or abs(m - deduped[-1]) > 1e-9 * max(1.0, abs(m)):
            deduped.append(m)
    return deduped


def lemma_conditions(g: GammaSet, d: DeltaSet) -> LemmaReport:
    """Which of the sign conditions on g6 (and the auxiliary inequalities for
    the g6 > 0 case) apply."""
    h3a = d.d5**2 < 2.0 * d.d7**2
    h3b = d.d1**4 + d.d7**4 + d.d5**2 * d.d7**2 < 2.0 * d.d5**2 * d.d7 * d.d1
    if g.g6 < 0.0:
        branch = "at least one positive root (g6 < 0)"
    elif g.g6 > 0.0 and not (h3a and h3b):
        branch = "no positive root guaranteed (g6 > 0, auxiliary condition fails)"
    elif g.g6 > 0.0:
        branch = "necessary condition met (g6 > 0, auxiliary condition holds)"
    else:
        branch = "marginal (g6 = 0)"
    return LemmaReport(gamma6=g.g6, h3_first=h3a, h3_second=h3b, branch=branch)


def crossing_trig(omega: float, d: DeltaSet) -> tuple[float, float, float]:
    """(cos(tau*omega), sin(tau*omega), denominator) at a crossing frequency.

    Solves the 2x2 linear system from the real/imaginary split of
    p(i*omega) = 0 for the two trig values; the shared denominator is
    (omega^3 - d2*omega)^2 + (d1 - d3*omega^2)^2 - d6^2*omega^2 - d7^2.
    """
    d1, d2, d3, d4, d5, d6, d7 = d.as_tuple()
    w = omega
    den = (w**3 - d2 * w) ** 2 + (d1 - d3 * w * w) ** 2 - d6 * d6 * w * w - d7 * d7
    if den == 0.0:
        raise SingularDenominatorError(f"trig denominator vanishes at omega = {w:.6g}")
    cos_val = (d4 * w * w * (w * w - d2 + d6) + d5 * (d3 * w * w - d1 + d7)) / den
    sin_val = w * (d3 * d4 * w * w + d5 * (d2 + d6 - w * w) - d1 * d4 - d4 * d7) / den
    return cos_val, sin_val, den


def delays_from_trig(cos_val: float, sin_val: float, omega: float, j_max: int) -> list[float]:
    """tau^(j) = (theta + 2*pi*j)/omega with theta = atan2(sin, cos) in [0, 2*pi).

    atan2 on both trig values picks the correct quadrant; an arccos of the
    cosine alone would return spurious delays whenever sin(tau*omega) < 0.
    """
    theta = math.atan2(sin_val, cos_val) % (2.0 * math.pi)
    return [(theta + 2.0 * math.pi * j) / omega for j in range(j_max + 1)]


def critical_delays(omega: float, d: DeltaSet, j_max: int = 5) -> CriticalDelays:
    """Candidate delays for one crossing frequency, residual-certified.

    Raises InconsistentCrossingError when cos^2 + sin^2 strays from 1 beyond
    tolerance (a transcription or root-quality failure, not a model property).
    """
    cos_val, sin_val, _ = crossing_trig(omega, d)
    unit = cos_val * cos_val + sin_val * sin_val
    if abs(unit - 1.0) > TRIG_TOL:
        raise InconsistentCrossingError(
            f"cos^2 + sin^2 = {unit:.9f} at omega = {omega:.6g}"
        )
    theta = math.atan2(sin_val, cos_val) % (2.0 * math.pi)
    tol = RESIDUAL_TOL * (1.0 + omega**3)
    accepted: list[tuple[int, float]] = []
    rejected: list[tuple[int, float]] = []
    for j, tau in enumerate(delays_from_trig(cos_val, sin_val, omega, j_max)):
        if quasipoly_residual(1j * omega, tau, d) <= tol:
            accepted.append((j, tau))
        else:
            rejected.append((j, tau))
    return CriticalDelays(
        omega=omega,
        cos_val=cos_val,
        sin_val=sin_val,
        theta=theta,
        taus=tuple(accepted),
        rejected=tuple(rejected),
    )


def transversality(omega: float, tau: float, d: DeltaSet) -> int:
    """Sign of Re(d lambda / d tau) at the crossing (i*omega, tau).

    Evaluates sign Re[(3*lambda^2 + d2 + 2*d3*lambda) e^{lambda*tau} + d4
    + d6 e^{-lambda*tau}] / [lambda ((d4*lambda + d5) + 2(d6*lambda + d7)
    e^{-lambda*tau})] at lambda = i*omega as sign(rho1*rho3 + rho2*rho4); the
    -tau/lambda part of the resolvent is pure imaginary there and drops out.
    +1 certifies a left-to-right crossing as tau grows.
    """
    d1, d2, d3, d4, d5, d6, d7 = d.as_tuple()
    w = omega
    ct = math.cos(tau * w)
    st = math.sin(tau * w)
    rho1 = 2.0 * d7 * w * st - 2.0 * d6 * w * w * ct - d4 * w * w
    rho2 = d5 * w + 2.0 * d6 * w * w * st + 2.0 * d7 * w * ct
    rho3 = (d2 + d6 - 3.0 * w * w) * ct - 2.0 * d3 * w * st + d4
    rho4 = (d2 - d6 - 3.0 * w * w) * st + 2.0 * d3 * w * ct
    if rho1 == 0.0 and rho2 == 0.0:
        raise DegenerateCrossingError(f"rho1 = rho2 = 0 at omega = {w:.6g}")
    val = rho1 * rho3 + rho2 * rho4
    return 0 if val == 0.0 else (1 if val > 0.0 else -1)


def collapsed_jacobian(p: ModelParams, at: State, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the tau = 0 vector field (lagged state
    identified with the current one)."""
    x0 = at.as_array()
    J = np.empty((3, 3))
    for j in range(3):
        hj = step * max(1.0, abs(x0[j]))
        xp = x0.copy()
        xm = x0.copy()
        xp[j] += hj
        xm[j] -= hj
        fp = rhs(State.from_array(xp), State.from_array(xp), p).as_array()
        fm = rhs(State.from_array(xm), State.from_array(xm), p).as_array()
        J[:, j] = (fp - fm) / (2.0 * hj)
    return J


def _classify(real_parts) -> str:
    pos = sum(1 for x in real_parts if x > 0.0)
    if pos == 3:
        return "source"
    if pos == 0:
        return "sink"
    return f"saddle-{pos}"


def boundary_spectrum(p: ModelParams) -> BoundarySpectrum:
    """Eigenvalues and classification at (0, 0, (r - xi3)/xi3).

    The closed forms below are evaluated as stated, but they disagree with the
    actual spectrum for generic parameters (the true Jacobian there is lower
    triangular with diagonal (r - xi3)(xi3 - xi1)/xi3, xi2(xi3 - r)/xi3,
    -(r - xi3)^2/r), so classification follows the numerically assembled
    Jacobian and a mismatch flag reports any sign-pattern disagreement.
    """
    r, x1, x2, x3 = p.r, p.xi1, p.xi2, p.xi3
    if not r > x3:
        raise BoundaryAbsentError("boundary equilibrium requires r > xi3")
    lam1 = x2 * (x3 - r) / x3
    lam2 = (r - x3) ** 2 * (2.0 * x3**2 + 4.0 * r**2 - 7.0 * x3 * r) / x3**3
    lam3 = -(r - x3) * (x1 * x3**3 + r**4 - 4.0 * x3 * r**3 + 6.0 * x3**2 * r**2 - 4.0 * x3**3 * r) / x3**4

    xi1_bound = (4.0 * x3 * r**3 - 6.0 * x3**2 * r**2 - r**4 + 4.0 * x3**3 * r) / x3**3
    cond_source = (0.0 < r < (7.0 - math.sqrt(17.0)) * x3 / 8.0) and x1 > xi1_bound
    cond_sink = (x3 < r < (7.0 + math.sqrt(17.0)) * x3 / 8.0) and x1 > xi1_bound

    e0 = State(0.0, 0.0, (r - x3) / x3)
    eig = np.linalg.eigvals(collapsed_jacobian(p, e0))
    eig = tuple(sorted((complex(z) for z in eig), key=lambda z: z.real))
    numeric_class = _classify([z.real for z in eig])
    closed_class = _classify([lam1, lam2, lam3])
    return BoundarySpectrum(
        lambda1=lam1,
        lambda2=lam2,
        lambda3=lam3,
        numeric_eigenvalues=eig,
        classification=numeric_class,
        closed_form_classification=closed_class,
        sign_mismatch=numeric_class != closed_class,
        condition_source=cond_source,
        condition_sink=cond_sink,
    )


def analyze(d: DeltaSet, j_max: int = 5) -> SpectralReport:
    """Full crossing analysis for one equilibrium's DeltaSet.

    Assembles validated crossings with transversality signs, the smallest
    critical delay tau0, and a verdict string:
      "unstable at tau=0"                when the tau = 0 cubic already fails,
      "no crossing: absolutely stable"   when no certified crossing exists,
      "stable on [0, tau0)"              otherwise (tau = tau0 itself marginal).
    """
    rh = routh_hurwitz(d)
    g = gamma_coefficients(d)
    lemmas = lemma_conditions(g, d)
    crossings: list[Crossing] = []
    for m in crossing_frequencies(g):
        omega = math.sqrt(m)
        try:
            cd = critical_delays(omega, d, j_max=j_max)
        except (InconsistentCrossingError, SingularDenominatorError):
            # near-multiple roots can leave the trig identity outside tolerance
            # after polishing; such candidates are rejected, not fatal
            continue
        if not cd.taus:
            continue
        first_tau = cd.taus[0][1]
        sign = transversality(omega, first_tau, d)
        crossings.append(
            Crossing(
                omega=omega,
                m=m,
                taus=cd.taus,
                rejected=cd.rejected,
                transversality=sign,
                residual=quasipoly_residual(1j * omega, first_tau, d),
            )
        )
    tau0 = min((c.taus[0][1] for c in crossings), default=None)
    if not rh.stable:
        verdict = "unstable at tau=0"
    elif not crossings:
        verdict = "no crossing: absolutely stable"
    else:
        verdict = f"stable on [0, tau0), tau0 = {tau0:.9g}; marginal at tau = tau0"
    return SpectralReport(
        deltas=d,
        routh_hurwitz=rh,
        gammas=g,
        lemmas=lemmas,
        crossings=tuple(crossings),
        tau0=tau0,
        verdict=verdict,
    )
