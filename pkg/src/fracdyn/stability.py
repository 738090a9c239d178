"""Equilibrium stability classification for fractional-order systems.

The core test is the argument condition of Matignon: an equilibrium of a
system of order alpha is locally asymptotically stable iff every Jacobian
eigenvalue satisfies |arg(lambda)| > alpha*pi/2, and stable iff in
addition any eigenvalue sitting exactly on that ray has geometric
multiplicity one. Zero eigenvalues have arg 0 = 0 and therefore always
violate the condition; they are classified unstable rather than assigned
a margin.

For the feedback-controlled systems two root-free shortcuts are provided:
a fractional Routh-Hurwitz test on a monic cubic via its discriminant, and
the closed-form eigenvalue analysis of the diagonal-gain layout whose
characteristic polynomial splits into a linear factor and two quadratics.
Both always cross-check against the argument condition on explicit
eigenvalues; the catalogued inequality cases are reported as diagnostics
only, never as the verdict.
"""

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import numkit
from .systems import as_state, is_equilibrium, validate_alpha

__all__ = [
    "ZERO_TOL",
    "ARG_TOL",
    "GM_RANK_TOL",
    "Verdict",
    "RouthHurwitz",
    "EquilibriumReport",
    "matignon_margins",
    "matignon_classify",
    "classify_equilibrium",
    "stability_alpha_threshold",
    "CubicCoeffs",
    "cubic_discriminant",
    "cubic_from_gains",
    "routh_hurwitz_cubic",
    "E2GainReport",
    "e2_gain_condition",
]

# Eigenvalues with |lambda| below ZERO_TOL are treated as zero; margins
# within ARG_TOL of the critical ray count as critical.
ZERO_TOL = 1e-9
ARG_TOL = 1e-9
GM_RANK_TOL = 1e-7


class Verdict(enum.Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


def _fmt(x):
    return f"{float(x):.17g}"


def matignon_margins(eigs, alpha, zero_tol=ZERO_TOL):
    """Per-eigenvalue margins |arg(lambda)| - alpha*pi/2, None for zeros.

    Conjugate eigenvalues get equal margins. Margins grow as alpha shrinks,
    so a configuration stable at some alpha stays stable at any smaller one.
    """
    alpha = validate_alpha(alpha)
    values = np.asarray(eigs, dtype=complex).ravel()
    if values.size == 0:
        raise ValueError("eigenvalue list is empty")
    half_ray = alpha * math.pi / 2.0
    margins = []
    for lam in values:
        if abs(lam) <= zero_tol:
            margins.append(None)
        else:
            margins.append(abs(cmath.phase(lam)) - half_ray)
    return tuple(margins)


def _assess(eigs, alpha, jac=None, zero_tol=ZERO_TOL, arg_tol=ARG_TOL):
    values = np.asarray(eigs, dtype=complex).ravel()
    margins = matignon_margins(values, alpha, zero_tol)
    zero_count = sum(1 for m in margins if m is None)
    nonzero = [m for m in margins if m is not None]

    if any(m < -arg_tol for m in nonzero) or zero_count:
        return Verdict.UNSTABLE, margins, zero_count
    if all(m > arg_tol for m in nonzero):
        return Verdict.ASYMPTOTICALLY_STABLE, margins, zero_count
    # critical eigenvalues on the ray: stability needs geometric multiplicity one
    if jac is None:
        return Verdict.INDETERMINATE, margins, zero_count
    critical = [values[i] for i, m in enumerate(margins)
                if m is not None and abs(m) <= arg_tol]
    for lam in critical:
        if numkit.geometric_multiplicity(jac, lam, GM_RANK_TOL) != 1:
            return Verdict.UNSTABLE, margins, zero_count
    return Verdict.STABLE, margins, zero_count


def matignon_classify(eigs, alpha, jac=None, zero_tol=ZERO_TOL, arg_tol=ARG_TOL):
    """Argument-condition verdict for a set of Jacobian eigenvalues.

    Without the Jacobian a configuration with critical eigenvalues cannot be
    resolved (the multiplicity check needs the matrix) and comes back
    Indeterminate.
    """
    verdict, _, _ = _assess(eigs, alpha, jac, zero_tol, arg_tol)
    return verdict


def stability_alpha_threshold(eigs, zero_tol=ZERO_TOL):
    """Supremum of fractional orders passed by every eigenvalue.

    Equals (2/pi) * min |arg(lambda)| over nonzero eigenvalues, and 0.0 when
    a zero eigenvalue is present. The configuration is asymptotically stable
    for every alpha strictly below the threshold (capped at 1 in practice).
    """
    values = np.asarray(eigs, dtype=complex).ravel()
    if values.size == 0:
        raise ValueError("eigenvalue list is empty")
    threshold = math.inf
    for lam in values:
        if abs(lam) <= zero_tol:
            return 0.0
        threshold = min(threshold, 2.0 * abs(cmath.phase(lam)) / math.pi)
    return threshold


@dataclass(frozen=True)
class EquilibriumReport:
    """Classification of one equilibrium at one fractional order.

    margins holds |arg(lambda)| - alpha*pi/2 per eigenvalue, None where the
    eigenvalue is numerically zero; zero_eigs counts those.
    """

    point: tuple
    alpha: float
    eigenvalues: tuple
    margins: tuple
    verdict: Verdict
    zero_eigs: int

    def to_text(self):
        lines = [
            f"verdict: {self.verdict}",
            f"alpha: {_fmt(self.alpha)}",
            f"point: {' '.join(_fmt(v) for v in self.point)}",
            f"zero eigenvalues: {self.zero_eigs}",
            "eigenvalues (margin = |arg| - alpha*pi/2):",
        ]
        for lam, margin in zip(self.eigenvalues, self.margins):
            tag = "zero eigenvalue" if margin is None else f"margin {_fmt(margin)}"
            lines.append(f"  {_fmt(lam.real)} {lam.imag:+.17g}i  {tag}")
        return "\n".join(lines)

    def to_kv(self):
        pairs = [
            ("verdict", str(self.verdict)),
            ("alpha", _fmt(self.alpha)),
            ("dim", str(len(self.point))),
            ("zero_eigenvalues", str(self.zero_eigs)),
        ]
        for i, v in enumerate(self.point, start=1):
            pairs.append((f"point_{i}", _fmt(v)))
        for i, (lam, margin) in enumerate(zip(self.eigenvalues, self.margins), start=1):
            pairs.append((f"eig_{i}_re", _fmt(lam.real)))
            pairs.append((f"eig_{i}_im", _fmt(lam.imag)))
            pairs.append((f"margin_{i}", "undefined" if margin is None else _fmt(margin)))
        return "\n".join(f"{k}={v}" for k, v in pairs)


def classify_equilibrium(sys, x_e, alpha, equilibrium_tol=1e-10,
                         zero_tol=ZERO_TOL, arg_tol=ARG_TOL):
    """Full report for an equilibrium of a system: eigenvalues, margins, verdict."""
    point = as_state(x_e, sys.dim)
    if not is_equilibrium(sys, point, equilibrium_tol):
        raise ValueError(
            f"point is not an equilibrium of {sys.name} (tolerance {equilibrium_tol:g})"
        )
    jac = np.asarray(sys.jacobian(point), dtype=float)
    eigs = numkit.eigenvalues(jac)
    verdict, margins, zero_count = _assess(eigs, alpha, jac, zero_tol, arg_tol)
    return EquilibriumReport(
        point=tuple(float(v) for v in point),
        alpha=float(alpha),
        eigenvalues=tuple(complex(v) for v in eigs),
        margins=margins,
        verdict=verdict,
        zero_eigs=zero_count,
    )


def cubic_discriminant(a1, a2, a3):
    """Discriminant of the monic cubic x^3 + a1 x^2 + a2 x + a3.

    Plain arithmetic throughout, so exact input types (fractions) survive.
    """
    return (18 * a1 * a2 * a3 + a1 ** 2 * a2 ** 2
            - 4 * a3 * a1 ** 3 - 4 * a2 ** 3 - 27 * a3 ** 2)


@dataclass(frozen=True)
class CubicCoeffs:
    """Coefficients of a monic cubic with its discriminant attached."""

    a1: object
    a2: object
    a3: object
    discriminant: object = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "discriminant", cubic_discriminant(self.a1, self.a2, self.a3)
        )

    def polynomial(self):
        """Ascending coefficient sequence (a3, a2, a1, 1)."""
        return (self.a3, self.a2, self.a1, 1.0)


def cubic_from_gains(k3, k4, k5, m, n):
    """Cubic factor of the controlled characteristic polynomial at an
    equilibrium (m, n, 0, 0, 0) with m^2 + n^2 != 0.

    Coefficients are a1 = k3 + k4 + k5, a2 = k3*k4 + k3*k5 + k4*k5 + m^2 + n^2
    and a3 = k3*k4*k5 + k3*n^2 + k4*m^2. Exact input types survive.
    """
    if k3 <= 0 or k4 <= 0 or k5 < 0:
        raise numkit.DomainError("gains must satisfy k3 > 0, k4 > 0, k5 >= 0")
    if m * m + n * n == 0:
        raise numkit.DomainError("m and n must not both vanish")
    a1 = k3 + k4 + k5
    a2 = k3 * k4 + k3 * k5 + k4 * k5 + m * m + n * n
    a3 = k3 * k4 * k5 + k3 * n * n + k4 * m * m
    return CubicCoeffs(a1, a2, a3)


class RouthHurwitz(enum.Enum):
    """Outcome of the fractional Routh-Hurwitz cubic test."""

    STABLE_ALL_ALPHA = "StableAllAlpha01"
    STABLE_BELOW_TWO_THIRDS = "StableAlphaBelowTwoThirds"
    NOT_DECIDED = "NotDecided"

    def __str__(self):
        return self.value

    @property
    def alpha_range(self):
        """Guaranteed stability range as text, None when undecided."""
        if self is RouthHurwitz.STABLE_ALL_ALPHA:
            return "(0, 1)"
        if self is RouthHurwitz.STABLE_BELOW_TWO_THIRDS:
            return "(0, 2/3)"
        return None

    def covers(self, alpha):
        alpha = validate_alpha(alpha)
        if self is RouthHurwitz.STABLE_ALL_ALPHA:
            return alpha < 1.0
        if self is RouthHurwitz.STABLE_BELOW_TWO_THIRDS:
            return alpha < 2.0 / 3.0
        return False


def routh_hurwitz_cubic(coeffs, alpha=None):
    """Root-free stability ranges for a monic cubic with positive coefficients.

    Positive discriminant together with a1*a2 > a3 certifies stability for
    every order in (0, 1); negative discriminant certifies orders below 2/3.
    Anything else (including the zero-discriminant boundary) is NotDecided
    and should fall back to the argument test on explicit roots. Violated
    sign preconditions raise instead of classifying silently.
    """
    if not (coeffs.a1 > 0 and coeffs.a2 > 0 and coeffs.a3 > 0):
        raise numkit.DomainError(
            "fractional Routh-Hurwitz cubic test needs a1, a2, a3 all positive"
        )
    if alpha is not None:
        validate_alpha(alpha)
    d = coeffs.discriminant
    if d > 0 and coeffs.a1 * coeffs.a2 > coeffs.a3:
        return RouthHurwitz.STABLE_ALL_ALPHA
    if d < 0:
        return RouthHurwitz.STABLE_BELOW_TWO_THIRDS
    return RouthHurwitz.NOT_DECIDED


@dataclass(frozen=True, eq=False)
class E2GainReport:
    """Closed-form analysis of diagonal feedback at a point (0, 0, 0, 0, m).

    The characteristic polynomial splits into (lambda + k5) and the two
    quadratics lambda^2 + (k1 + k3)*lambda + k1*k3 - m and
    lambda^2 + (k2 + k4)*lambda + k2*k4 - m, giving the discriminants
    delta1 = (k1 - k3)^2 + 4m and delta2 = (k2 - k4)^2 + 4m together with
    the corner values u = -(k1 - k3)^2 / 4 and v = -(k2 - k4)^2 / 4.

    `conditions` evaluates the five catalogued stability windows C1..C5
    exactly as stated; `case_condition` evaluates the window belonging to
    the active discriminant sign case. Both are diagnostics. The verdict
    is always the argument test on the closed-form eigenvalues, and
    `stable_all_alpha` (stability for every order up to 1) is equivalent to
    all eigenvalues having negative real part.
    """

    gains: tuple
    m: object
    delta1: object
    delta2: object
    u: object
    v: object
    eigenvalues: tuple
    conditions: dict
    case: str
    case_condition: Optional[bool]
    disagreement: bool
    stable_all_alpha: bool

    def verdict(self, alpha):
        return matignon_classify(self.eigenvalues, alpha)


def e2_gain_condition(k, m):
    """Evaluate the closed-form gain analysis at (0, 0, 0, 0, m).

    All five gains must be strictly positive. Arithmetic on the reported
    quantities is plain Python, so exact rational inputs give exact
    rational delta1, delta2, u, v.
    """
    gains = tuple(k)
    if len(gains) != 5:
        raise numkit.DomainError("expected five feedback gains")
    if any(not g > 0 for g in gains):
        raise numkit.DomainError("all gains must be strictly positive")
    k1, k2, k3, k4, k5 = gains

    delta1 = (k1 - k3) ** 2 + 4 * m
    delta2 = (k2 - k4) ** 2 + 4 * m
    u = -((k1 - k3) ** 2) / 4
    v = -((k2 - k4) ** 2) / 4

    s1 = cmath.sqrt(complex(float(delta1), 0.0))
    s2 = cmath.sqrt(complex(float(delta2), 0.0))
    p13 = float(k1) + float(k3)
    p24 = float(k2) + float(k4)
    eigs = (
        complex(-float(k5), 0.0),
        (-p13 + s1) / 2.0,
        (-p13 - s1) / 2.0,
        (-p24 + s2) / 2.0,
        (-p24 - s2) / 2.0,
    )

    conditions = {
        "C1": bool(abs(k1 - k3) == abs(k2 - k4) and m == u and m != 0),
        "C2": bool(max(u, v) < m < min(k1 * k3, k2 * k4)),
        "C3": bool(u < m < min(v, k1 * k3)),
        "C4": bool(v < m < min(u, k2 * k4)),
        "C5": bool(m < min(u, v)),
    }

    if delta1 == 0 and delta2 == 0:
        case, window = "both_zero", True
    elif delta1 > 0 and delta2 > 0:
        case, window = "both_positive", bool(max(u, v) < m < min(k1 * k3, k2 * k4))
    elif delta1 > 0 and delta2 < 0:
        case, window = "pos_neg", bool(u < m < min(v, k1 * k3))
    elif delta1 < 0 and delta2 > 0:
        case, window = "neg_pos", bool(v < m < min(u, k2 * k4))
    elif delta1 < 0 and delta2 < 0:
        case, window = "both_negative", bool(m < min(u, v))
    else:
        # exactly one discriminant on its zero boundary: not catalogued
        case, window = "boundary", None

    stable = all(lam.real < 0.0 for lam in eigs)
    catalogued = any(conditions.values())
    disagreement = (catalogued != stable) or (window is not None and window != stable)

    return E2GainReport(
        gains=gains,
        m=m,
        delta1=delta1,
        delta2=delta2,
        u=u,
        v=v,
        eigenvalues=eigs,
        conditions=conditions,
        case=case,
        case_condition=window,
        disagreement=disagreement,
        stable_all_alpha=stable,
    )
