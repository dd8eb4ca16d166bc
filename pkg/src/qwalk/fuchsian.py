"""Heun and Gauss operators, the concrete instances satisfied by the limit
densities, residual scans, and the ``z = t / tau`` confluence of Heun to Gauss.

Parameter bundles accept :class:`fractions.Fraction` so that limits can be
compared exactly; evaluation always happens in floating point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import InitVar, dataclass, fields, replace
from fractions import Fraction
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from ._powers import PowerProduct
from .core import QWalkError
from .density import measure_c, measure_d

FUCHS_TOL = 1e-12
SINGULAR_TOL = 1e-12
RESIDUAL_FLOOR = 1e-300


class SingularPoint(QWalkError, ValueError):
    """Operator evaluated on one of its singular points."""


class FuchsRelationError(QWalkError, ValueError):
    """``alpha + beta + 1 != gamma + delta + epsilon``."""


def _num(v):
    if isinstance(v, (int, float, Fraction)):
        return float(v)
    v = complex(v)
    return v.real if v.imag == 0 else v


@dataclass(frozen=True)
class HeunParams:
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    epsilon: complex
    q: complex
    theta: complex
    check: InitVar[bool] = True

    def __post_init__(self, check):
        if not check:
            return
        defect = abs(self.alpha + self.beta + 1 - self.gamma - self.delta - self.epsilon)
        if defect > FUCHS_TOL:
            raise FuchsRelationError(f"Fuchs relation violated by {float(defect):.3e}")
        if abs(self.theta) < SINGULAR_TOL or abs(self.theta - 1) < SINGULAR_TOL:
            raise ValueError("theta must differ from 0 and 1")

    def singular_points(self) -> tuple:
        return (0.0, 1.0, _num(self.theta))

    def coefficients(self, z):
        """``(1, p(z), r(z))`` for ``u'' + p u' + r u``."""
        al, be, ga, de, ep, q, th = (_num(getattr(self, f.name)) for f in fields(self))
        p = ga / z + de / (z - 1) + ep / (z - th)
        r = (al * be * z - q) / (z * (z - 1) * (z - th))
        return np.ones_like(p), p, r


@dataclass(frozen=True)
class GaussParams:
    alpha: complex
    beta: complex
    gamma: complex

    def singular_points(self) -> tuple:
        return (0.0, 1.0)

    def coefficients(self, z):
        """``(z(z-1), (alpha+beta+1) z - gamma, alpha beta)``."""
        al, be, ga = _num(self.alpha), _num(self.beta), _num(self.gamma)
        z = np.asarray(z)
        return z * (z - 1), (al + be + 1) * z - ga, np.full_like(z, al * be)


@dataclass(frozen=True)
class LinearODE:
    """``c2(x) u'' + c1(x) u' + c0(x) u = 0`` with explicit coefficient functions."""

    name: str
    coeffs: Callable
    singular: tuple

    def singular_points(self) -> tuple:
        return self.singular

    def coefficients(self, x):
        return self.coeffs(np.asarray(x))


def _guard(z, points) -> None:
    for s in points:
        if np.any(np.abs(np.asarray(z) - s) < SINGULAR_TOL):
            raise SingularPoint(f"z collides with singular point {s}")


def apply_operator(eq, u, du, d2u, z):
    _guard(z, eq.singular_points())
    c2, c1, c0 = eq.coefficients(z)
    return c2 * d2u + c1 * du + c0 * u


def heun_apply(p: HeunParams, u, du, d2u, z):
    """``u'' + (gamma/z + delta/(z-1) + epsilon/(z-theta)) u' + (alpha beta z - q) u / (z(z-1)(z-theta))``."""
    return apply_operator(p, u, du, d2u, z)


def gauss_apply(p: GaussParams, u, du, d2u, z):
    """``z(z-1) u'' + ((alpha+beta+1) z - gamma) u' + alpha beta u``."""
    return apply_operator(p, u, du, d2u, z)


# -- the instances ---------------------------------------------------------

def heun_thm1(theta, check: bool = True) -> HeunParams:
    """Heun instance for ``u^(d)``, with ``theta = |a|^2``."""
    h = Fraction(1, 2)
    return HeunParams(3 * h, 3 * h, h, 2, 3 * h, (2 * theta + 1) / 4, theta, check=check)


def heun_measure(theta, check: bool = True) -> HeunParams:
    """Heun instance for the measure form ``w^(d)``."""
    h = Fraction(1, 2)
    return HeunParams(2, 2, 3 * h, 2, 3 * h, (3 * theta + 2) / 2, theta, check=check)


def gauss_thm2() -> GaussParams:
    h = Fraction(1, 2)
    return GaussParams(h, h, h)


def gauss_measure() -> GaussParams:
    return GaussParams(1, 1, Fraction(3, 2))


HEUN_FAMILIES = {"thm1": heun_thm1, "appB_heun": heun_measure}
PRESETS = ("thm1", "thm2", "appB_heun", "appB_gauss")


def preset(name: str, a_abs: float | None = None):
    """Parameter bundle by name; the Heun ones take ``|a|`` and use ``theta = |a|^2``."""
    if name in HEUN_FAMILIES:
        if a_abs is None or not 0 < a_abs < 1:
            raise ValueError(f"{name} needs |a| in (0, 1)")
        return HEUN_FAMILIES[name](a_abs * a_abs)
    if name == "thm2":
        return gauss_thm2()
    if name == "appB_gauss":
        return gauss_measure()
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESETS}")


def perturbed(p, name: str, delta):
    """Copy of ``p`` with one field shifted, skipping the Fuchs check."""
    kw = {name: getattr(p, name) + delta}
    if isinstance(p, HeunParams):
        kw["check"] = False
    return replace(p, **kw)


def u_d_bundle(theta: float) -> PowerProduct:
    """``u^(d)(z) = sqrt(1-theta) / (pi (1-z) sqrt(theta-z))``."""
    return PowerProduct(math.sqrt(1.0 - theta) / math.pi, ((1.0, -1.0, -1.0), (theta, -1.0, -0.5)))


def u_c_bundle(nu: float) -> PowerProduct:
    """``u^(c)(z) = 1 / (2 nu pi sqrt(1-z))``."""
    return PowerProduct(1.0 / (2.0 * nu * math.pi), ((1.0, -1.0, -0.5),))


def w_d_bundle(a_abs: float) -> PowerProduct:
    return measure_d(a_abs).shape


def w_c_bundle(nu: float = 1.0) -> PowerProduct:
    return measure_c(nu).shape


def dtqw_x_equation(a_abs: float) -> LinearODE:
    """Second-order equation for ``f^(d)`` in the original variable ``x``."""
    a2 = a_abs * a_abs

    def coeffs(x):
        return (
            (1 - x * x) * (a2 - x * x),
            -x * (4 * a2 + 3 - 7 * x * x),
            9 * x * x - 2 * a2 - 1,
        )

    return LinearODE("dtqw_x", coeffs, (-1.0, -a_abs, a_abs, 1.0))


def ctqw_x_equation(nu: float) -> LinearODE:
    """Second-order equation for ``f^(c)`` in ``x``."""

    def coeffs(x):
        return 4 * nu * nu - x * x, -3 * x, -np.ones_like(x)

    return LinearODE("ctqw_x", coeffs, (-2 * nu, 2 * nu))


# -- residual scans --------------------------------------------------------

def chebyshev_points(lo: float, hi: float, n: int) -> np.ndarray:
    k = np.arange(n)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k + 1) * np.pi / (2 * n))


def fd_bundle(f: Callable, h: float = 1e-4) -> Callable:
    """``(u, u', u'')`` from fourth-order central differences of ``f``."""

    def bundle(z):
        fm2, fm1, f0, fp1, fp2 = (f(z + k * h) for k in (-2, -1, 0, 1, 2))
        d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
        d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
        return f0, d1, d2

    return bundle


def relative_residuals(eq, bundle, z) -> np.ndarray:
    """``|L u| / (|c2 u''| + |c1 u'| + |c0 u|)`` pointwise."""
    u, du, d2u = bundle(z)
    _guard(z, eq.singular_points())
    c2, c1, c0 = eq.coefficients(z)
    t2, t1, t0 = c2 * d2u, c1 * du, c0 * u
    return np.abs(t2 + t1 + t0) / (np.abs(t2) + np.abs(t1) + np.abs(t0) + RESIDUAL_FLOOR)


def residual_scan(eq, profile, domain: tuple[float, float], n: int = 100) -> float:
    """Max relative residual over ``n`` Chebyshev points of ``domain``.

    ``profile`` is a :class:`PowerProduct` (analytic derivatives) or any
    callable returning ``(u, u', u'')``.  Points are taken complex so a
    profile continued past a branch point stays on its principal branch.
    """
    z = chebyshev_points(domain[0], domain[1], n).astype(np.complex128)
    bundle = profile.bundle if isinstance(profile, PowerProduct) else profile
    return float(np.max(relative_residuals(eq, bundle, z)))


# -- confluence ------------------------------------------------------------

@dataclass(frozen=True)
class ScaledHeunCoefficients:
    """Polynomials in ``t`` multiplying ``v'', v', v`` after ``z = t / tau``.

    The Heun equation is first cleared of denominators
    (times ``z(z-1)(z-theta)``), then rewritten in ``t``.
    """

    tau: float
    a_abs2: float
    c2: Polynomial
    c1: Polynomial
    c0: Polynomial

    def normalized(self, t):
        """``(v', v)`` coefficients after dividing so the ``v''`` coefficient is ``t(t-1)``."""
        quot, rem = divmod(self.c2, Polynomial([0.0, -1.0, 1.0]))
        if np.max(np.abs(rem.coef)) > 1e-9 * np.max(np.abs(self.c2.coef)):
            # only exact when theta * tau = 1
            scale = self.c2(t) / (t * (t - 1))
        else:
            scale = quot(t)
        return self.c1(t) / scale, self.c0(t) / scale


def scaled_heun(tau: float, family: str = "thm1", a_abs2: float | None = None) -> ScaledHeunCoefficients:
    """Substitute ``z = t / tau`` with ``theta = 1 / tau`` unless ``a_abs2`` is given."""
    if not tau > 1:
        raise ValueError("tau must exceed 1")
    th = 1.0 / tau if a_abs2 is None else float(a_abs2)
    p = HEUN_FAMILIES[family](th)
    al, be, ga, de, ep, q = (_num(v) for v in (p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.q))
    z = Polynomial([0.0, 1.0 / tau])
    c2 = tau * tau * z * (z - 1) * (z - th)
    c1 = tau * (ga * (z - 1) * (z - th) + de * z * (z - th) + ep * z * (z - 1))
    c0 = al * be * z - q
    return ScaledHeunCoefficients(float(tau), th, c2, c1, c0)


def eq22_coefficients(tau: float, a_abs2: float) -> ScaledHeunCoefficients:
    """The scaled ``u^(d)`` equation written out term by term.

    Four times :func:`scaled_heun` for the ``thm1`` family; kept separately
    as an independent transcription.
    """
    t = Polynomial([0.0, 1.0])
    c2 = 4 * t * (a_abs2 * tau - t) * (1 - t / tau)
    c1 = 2 * (8 * t * t / tau - (5 * a_abs2 + 4) * t + a_abs2 * tau)
    c0 = 9 * t / tau - 2 * a_abs2 - 1
    return ScaledHeunCoefficients(float(tau), a_abs2, c2, c1, c0)


def limit_gauss(family: str = "thm1") -> GaussParams:
    """Gauss equation reached as ``tau -> inf`` with ``theta tau = 1``.

    The normalized coefficients tend to ``(gamma + epsilon) t - gamma`` and
    ``q(theta=0)``; alpha and beta are the roots of
    ``x^2 - (gamma + epsilon - 1) x + q(0)``.
    """
    raw = HEUN_FAMILIES[family](Fraction(0), check=False)
    ga, ep, q0 = raw.gamma, raw.epsilon, raw.q
    s = ga + ep - 1
    disc = s * s - 4 * q0
    if disc == 0:
        root = Fraction(0)
    elif isinstance(disc, Fraction) and disc > 0 and _is_square(disc):
        root = Fraction(math.isqrt(disc.numerator), math.isqrt(disc.denominator))
    else:
        root = cmath.sqrt(complex(disc))
    return GaussParams((s + root) / 2, (s - root) / 2, ga)


def _is_square(f: Fraction) -> bool:
    return math.isqrt(f.numerator) ** 2 == f.numerator and math.isqrt(f.denominator) ** 2 == f.denominator


def limit_coefficients(family: str, t):
    g = limit_gauss(family)
    al, be, ga = _num(g.alpha), _num(g.beta), _num(g.gamma)
    return (al + be + 1) * t - ga, al * be * np.ones_like(t)


def confluence_error(
    tau: float,
    grid: tuple[float, float] = (0.05, 0.95),
    n: int = 200,
    family: str = "thm1",
) -> float:
    """Max over ``n`` points of ``grid`` of the gap between normalized scaled-Heun
    coefficients and the limiting Gauss ones."""
    if not (0 < grid[0] < grid[1] < 1):
        raise ValueError("grid must lie inside (0, 1)")
    t = np.linspace(grid[0], grid[1], n)
    n1, n0 = scaled_heun(tau, family).normalized(t)
    g1, g0 = limit_coefficients(family, t)
    return float(max(np.max(np.abs(n1 - g1)), np.max(np.abs(n0 - g0))))
