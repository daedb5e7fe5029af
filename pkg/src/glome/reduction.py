"""Canonical coordinates of the third generator and the order reduction.

omega = cos x cos y is invariant along chi3 = (sin y, -tan x cos y, 0);
tau = arctan(cot x sin y) translates at unit rate along the closed-form
one-parameter orbit.  In these coordinates the collapsed second-order
equation drops to a first-order relation between omega'(tau) and a
constant alpha; this module evaluates the relation, inverts it for alpha
at a sample, and checks alpha-constancy along integrated geodesics.

Branch conventions: tau is reported as a principal value, and the
closed-form orbit parametrizes the integral curve of (-sin y,
tan x cos y) — i.e. the generator with reversed parameter — while tau
still advances by +lambda along it.  Comparisons of tau across the orbit
therefore wrap mod pi (tau jumps by pi when the orbit crosses x = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jetcalc
from .chart import Jet1
from .geodesics import KConstant, Trajectory, _k_value
from .jetcalc import arcsin, arctan, cos, directional, sec, sin, tan


class InversionDomain(ValueError):
    """A sample cannot be inverted for alpha (degenerate or out of domain)."""


class BranchExit(RuntimeError):
    """The closed-form orbit left its principal branches."""

    def __init__(self, lam: float, detail: str = ""):
        self.lam = lam
        msg = f"flow left the principal branch at lambda = {lam:.6g}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)


@dataclass(frozen=True)
class CanonicalPair:
    """Canonical coordinates (tau, omega) of a chart point."""

    tau: float
    omega: float

    def __post_init__(self):
        if not (0.0 < self.omega <= 1.0):
            raise ValueError(f"omega must lie in (0, 1], got {self.omega}")


@dataclass(frozen=True)
class AlphaConstant:
    """Integration constant of the reduced first-order relation."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")

    def __float__(self) -> float:
        return self.alpha


def omega_coordinate(x, y):
    """The invariant coordinate cos x cos y; dual-capable."""
    return cos(x) * cos(y)


def tau_coordinate(x, y):
    """The translation coordinate arctan(cot x sin y); dual-capable.

    Undefined at x = 0 (cot x blows up); the jetcalc division guard turns
    that into a DomainError.
    """
    return arctan(cos(x) / sin(x) * sin(y))


def canonical(x: float, y: float) -> CanonicalPair:
    """Canonical coordinates of an open-chart point with x != 0."""
    if x == 0.0:
        raise jetcalc.DomainError("cot", 0.0, "canonical coordinates undefined at x = 0")
    return CanonicalPair(tau_coordinate(x, y), omega_coordinate(x, y))


def global_flow(x, y, lam):
    """Closed-form one-parameter orbit through (x, y).

    X = arcsin(sin x cos lam - cos x sin y sin lam)
    Y = arctan(tan y cos lam + tan x sec y sin lam)

    Valid for any lambda while the arcsin argument stays strictly inside
    (-1, 1); on the open chart its magnitude is bounded by
    sqrt(1 - omega^2) < 1, so BranchExit fires only for inputs at or
    beyond the chart poles.  Dual-capable in all three arguments.
    """
    s = sin(x) * cos(lam) - cos(x) * sin(y) * sin(lam)
    if abs(jetcalc.real_value(s)) >= 1.0:
        raise BranchExit(jetcalc.real_value(lam))
    X = arcsin(s)
    Y = arctan(tan(y) * cos(lam) + tan(x) * sec(y) * sin(lam))
    return X, Y


def wrap_mod_pi(delta: float) -> float:
    """Fold an angle difference into (-pi/2, pi/2]; tau lives mod pi."""
    return delta - math.pi * round(delta / math.pi)


def flow_generator_check(x: float, y: float) -> tuple[float, float]:
    """Residuals of the orbit's defining ODE at lambda = 0.

    The closed form runs the integral curve of (sin y, -tan x cos y) with
    reversed parameter (tau still shifts by +lambda), so it satisfies
    dX/dlam = -sin Y and dY/dlam = +tan X cos Y.  Both residuals of that
    system, taken with dual-number lambda-derivatives, are returned and
    vanish up to rounding.
    """
    dX = jetcalc.derivative(lambda lam: global_flow(x, y, lam)[0], 0.0)
    dY = jetcalc.derivative(lambda lam: global_flow(x, y, lam)[1], 0.0)
    return (dX + math.sin(y), dY - math.tan(x) * math.cos(y))


def omega_prime(j: Jet1) -> float:
    """d(omega)/d(tau) along the curve a jet represents.

    Chain rule through x: both coordinate differentials are taken along
    (1, y_x).  Raises InversionDomain where tau is stationary.
    """
    args = (j.x, j.y)
    direction = (1.0, j.y_x)
    _, d_omega = directional(omega_coordinate, args, direction)
    _, d_tau = directional(tau_coordinate, args, direction)
    if d_tau == 0.0:
        raise InversionDomain("tau is stationary along the jet; omega'(tau) diverges")
    return d_omega / d_tau


def _branch_sign(branch) -> float:
    if branch in (1, +1.0, "+", "plus"):
        return 1.0
    if branch in (-1, -1.0, "-", "minus"):
        return -1.0
    raise ValueError(f"branch must be '+' or '-', got {branch!r}")


def alpha_from_sample(tau: float, omega: float, omega_prime: float, k, branch="+") -> AlphaConstant:
    """Invert the reduced first-order relation for alpha at one sample.

    With S = omega^2 cos^2 tau + sin^2 tau and R = k/omega^2 - 1:

        alpha = S * (1 + R * cos^2(branch * (psi - theta)))

    where psi = arctan(omega' / (1 - omega^2)) and
    theta = atan2(omega, tan tau).  The cos^2 makes alpha insensitive to
    the branch sign and to mod-pi shifts of either angle; the branch
    matters only when reproducing omega' from alpha.
    """
    sgn = _branch_sign(branch)
    kv = _k_value(k)
    if not (0.0 < omega < 1.0):
        raise InversionDomain(f"omega must lie strictly inside (0, 1), got {omega}")
    if not math.isfinite(omega_prime):
        raise InversionDomain("omega' is not finite")
    t = math.tan(tau)
    if t == 0.0:
        raise InversionDomain("tan tau vanishes; theta undefined")
    S = omega * omega * math.cos(tau) ** 2 + math.sin(tau) ** 2
    R = kv / (omega * omega) - 1.0
    psi = math.atan(omega_prime / (1.0 - omega * omega))
    theta = math.atan2(omega, t)
    alpha = S * (1.0 + R * math.cos(sgn * (psi - theta)) ** 2)
    if not math.isfinite(alpha):
        raise InversionDomain("alpha evaluated non-finite")
    return AlphaConstant(alpha)


def reduced_omega_prime(tau: float, omega: float, alpha, k, branch="+") -> float:
    """Forward reduced relation: omega'(tau) from alpha.

        omega' = (1 - omega^2) tan(branch * arccos(sqrt(arg)) + theta),
        arg = (alpha - S) / (R * S)

    Raises InversionDomain when the arccos argument falls outside [0, 1].
    """
    sgn = _branch_sign(branch)
    kv = _k_value(k)
    av = float(alpha)
    if not (0.0 < omega < 1.0):
        raise InversionDomain(f"omega must lie strictly inside (0, 1), got {omega}")
    S = omega * omega * math.cos(tau) ** 2 + math.sin(tau) ** 2
    R = kv / (omega * omega) - 1.0
    if R * S == 0.0:
        raise InversionDomain("degenerate sample: R * S = 0")
    arg = (av - S) / (R * S)
    if arg < -1e-12 or arg > 1.0 + 1e-12:
        raise InversionDomain(f"arccos argument {arg} outside [0, 1]")
    arg = min(1.0, max(0.0, arg))
    theta = math.atan2(omega, math.tan(tau))
    return (1.0 - omega * omega) * math.tan(sgn * math.acos(math.sqrt(arg)) + theta)


def s2_residual(x, y, y_x, y_xx):
    """Residual of the 2-sphere geodesic equation; dual-capable.

        y_xx - 2 y_x tan x - y_x^3 sin x cos x
    """
    return y_xx - 2.0 * y_x * tan(x) - y_x**3 * sin(x) * cos(x)


def s2_fn(x, y, v, y_x, v_x, y_xx, v_xx):
    """The 2-sphere residual as a 7-slot jet function (for prolongations)."""
    return s2_residual(x, y, y_x, y_xx)


# Admissibility guards for the alpha pipeline: the inversion composes
# arctan/arccos near their sensitive ranges, so samples where omega is
# within OMEGA_GUARD of 1 (psi ill-conditioned) or tau within TAU_GUARD of
# a multiple of pi (theta ill-conditioned) are excluded and counted.
OMEGA_GUARD = 1e-4
TAU_GUARD = 1e-6


def alpha_series(traj: Trajectory, k, branch="+") -> tuple[np.ndarray, int]:
    """alpha at every admissible trajectory sample, plus the excluded count."""
    alphas = []
    excluded = 0
    for i in range(len(traj)):
        j = traj.jet(i)
        try:
            pair = canonical(j.x, j.y)
            if 1.0 - pair.omega < OMEGA_GUARD:
                raise InversionDomain("omega too close to 1")
            if abs(math.tan(pair.tau)) < TAU_GUARD:
                raise InversionDomain("tau too close to a multiple of pi")
            w_prime = omega_prime(j)
            alphas.append(float(alpha_from_sample(pair.tau, pair.omega, w_prime, k, branch)))
        except (InversionDomain, jetcalc.DomainError):
            excluded += 1
    return np.array(alphas), excluded


def reduction_report(traj: Trajectory, k=None) -> dict:
    """Map a trajectory through the reduction and test alpha-constancy.

    The branch is selected per trajectory by smaller relative alpha
    deviation ('+' on ties).  Returns the JSON-ready report dict.
    """
    if k is None:
        c = float(traj.noether[0])
        k = KConstant(c * c)
    kv = _k_value(k)
    best = None
    for branch in ("+", "-"):
        alphas, excluded = alpha_series(traj, kv, branch)
        if len(alphas) == 0:
            dev = math.inf
            mean = math.nan
        else:
            mean = float(np.mean(alphas))
            scale = abs(mean) if mean != 0.0 else 1.0
            dev = float((np.max(alphas) - np.min(alphas)) / scale)
        if best is None or dev < best["alpha_rel_dev"]:
            best = {
                "k": kv,
                "branch": branch,
                "alpha_mean": mean,
                "alpha_rel_dev": dev,
                "samples": int(len(alphas)),
                "excluded_rows": int(excluded),
            }
    return best
