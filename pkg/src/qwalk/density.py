"""Limit densities of ``X_t / t``, their measure forms in ``z``, CDFs and KS distance.

``konno_d``   discrete-time density on ``(-|a|, |a|)``
``arcsine_c`` continuous-time density on ``(-2 nu, 2 nu)``
``measure_d`` / ``measure_c`` the same measures written in ``z = x^2`` and
``z = x^2 / 4 nu^2``; the value is the coefficient of ``dz`` on the
``x > 0`` branch, the ``x < 0`` branch carries the opposite orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from ._powers import PowerProduct
from .core import OutOfSupport

KINDS = ("konno_d", "arcsine_c", "measure_d", "measure_c")
QUAD_EPSABS = 1e-12


def _check_a(a_abs: float) -> None:
    if not 0.0 < a_abs < 1.0:
        raise ValueError(f"|a| must lie in (0, 1), got {a_abs}")


def _check_nu(nu: float) -> None:
    if not nu > 0.0:
        raise ValueError(f"nu must be positive, got {nu}")


@dataclass(frozen=True)
class DensityProfile:
    kind: str
    param: float
    support: tuple[float, float]
    shape: PowerProduct

    def _require_inside(self, x) -> None:
        x = np.asarray(x)
        if np.iscomplexobj(x):
            return
        lo, hi = self.support
        if np.any(x <= lo) or np.any(x >= hi):
            raise OutOfSupport(f"{self.kind}: argument outside {self.support}")

    def value(self, x):
        self._require_inside(x)
        return self.shape.value(x)

    def deriv1(self, x):
        self._require_inside(x)
        return self.shape.deriv1(x)

    def deriv2(self, x):
        self._require_inside(x)
        return self.shape.deriv2(x)

    def cdf(self, x):
        return cdf(self, x)


def konno_d(a_abs: float) -> DensityProfile:
    _check_a(a_abs)
    a = float(a_abs)
    scale = math.sqrt(1.0 - a * a) / math.pi
    # (1 - x^2)^-1 (a^2 - x^2)^-1/2 split into linear factors
    factors = ((1.0, -1.0, -1.0), (1.0, 1.0, -1.0), (a, -1.0, -0.5), (a, 1.0, -0.5))
    return DensityProfile("konno_d", a, (-a, a), PowerProduct(scale, factors))


def arcsine_c(nu: float) -> DensityProfile:
    _check_nu(nu)
    r = 2.0 * nu
    factors = ((r, -1.0, -0.5), (r, 1.0, -0.5))
    return DensityProfile("arcsine_c", float(nu), (-r, r), PowerProduct(1.0 / math.pi, factors))


def measure_d(a_abs: float) -> DensityProfile:
    _check_a(a_abs)
    a2 = a_abs * a_abs
    scale = math.sqrt(1.0 - a2) / (2.0 * math.pi)
    factors = ((1.0, -1.0, -1.0), (0.0, 1.0, -0.5), (a2, -1.0, -0.5))
    return DensityProfile("measure_d", float(a_abs), (0.0, a2), PowerProduct(scale, factors))


def measure_c(nu: float) -> DensityProfile:
    """``f^(c)(x) dx`` pulled back to ``z = x^2 / 4 nu^2``: ``1 / (2 pi sqrt(z - z^2))``.

    The pulled-back coefficient does not depend on ``nu``.
    """
    _check_nu(nu)
    factors = ((0.0, 1.0, -0.5), (1.0, -1.0, -0.5))
    return DensityProfile("measure_c", float(nu), (0.0, 1.0), PowerProduct(0.5 / math.pi, factors))


_BUILDERS = {"konno_d": konno_d, "arcsine_c": arcsine_c, "measure_d": measure_d, "measure_c": measure_c}


def profile(kind: str, param: float) -> DensityProfile:
    try:
        return _BUILDERS[kind](param)
    except KeyError:
        raise ValueError(f"unknown density kind {kind!r}; expected one of {KINDS}") from None


def density_d(a_abs: float, x: float) -> float:
    """``sqrt(1-|a|^2) / (pi (1-x^2) sqrt(|a|^2-x^2))`` for ``|x| < |a|``."""
    _check_a(a_abs)
    if abs(x) >= a_abs:
        raise OutOfSupport(f"|x|={abs(x)} not below |a|={a_abs}")
    return math.sqrt(1.0 - a_abs**2) / (math.pi * (1.0 - x * x) * math.sqrt(a_abs**2 - x * x))


def density_c(nu: float, x: float) -> float:
    """``1 / (pi sqrt(4 nu^2 - x^2))`` for ``|x| < 2 nu``."""
    _check_nu(nu)
    if abs(x) >= 2.0 * nu:
        raise OutOfSupport(f"|x|={abs(x)} not below 2 nu={2.0 * nu}")
    return 1.0 / (math.pi * math.sqrt(4.0 * nu * nu - x * x))


def measure_density(kind: str, param: float, z: float) -> float:
    """Coefficient of ``dz`` on the ``x > 0`` branch."""
    if kind not in ("measure_d", "measure_c"):
        raise ValueError(f"{kind!r} is not a measure kind")
    return float(profile(kind, param).value(z))


def pull_back(kind: str, param: float, x: float) -> tuple[float, float, int]:
    """Map ``x`` to ``(z, w(z), orientation)``; orientation is the sign of ``dz/dx``."""
    if kind == "measure_d":
        z = x * x
    elif kind == "measure_c":
        z = x * x / (4.0 * param * param)
    else:
        raise ValueError(f"{kind!r} is not a measure kind")
    return z, measure_density(kind, param, z), (1 if x > 0 else -1)


def _substituted(p: DensityProfile) -> tuple[Callable[[float], float], float, Callable[[float], float]]:
    """Smooth integrand in ``s``, its lower limit, and the map ``x -> s``.

    The inverse-square-root endpoints are removed analytically by
    ``x = r sin s`` (or ``z = r sin^2 s`` for the measure forms).
    """
    c = p.param
    if p.kind == "konno_d":
        k = math.sqrt(1.0 - c * c) / math.pi
        return (lambda s: k / (1.0 - (c * math.sin(s)) ** 2)), -math.pi / 2, lambda x: math.asin(x / c)
    if p.kind == "arcsine_c":
        return (lambda s: 1.0 / math.pi), -math.pi / 2, lambda x: math.asin(x / (2.0 * c))
    if p.kind == "measure_d":
        # both signed branches: density of Z = X^2 is 2 w
        k = 2.0 * math.sqrt(1.0 - c * c) / math.pi
        return (lambda s: k / (1.0 - (c * math.sin(s)) ** 2)), 0.0, lambda z: math.asin(math.sqrt(z) / c)
    if p.kind == "measure_c":
        return (lambda s: 2.0 / math.pi), 0.0, lambda z: math.asin(math.sqrt(z))
    raise ValueError(p.kind)


def cdf(p: DensityProfile, x):
    """``int_{-inf}^x`` of the density, clamped to 0 and 1 outside the support.

    For the measure kinds this is the CDF of the pushed-forward variable
    ``Z`` (both branches), so it reaches 1 at the right end.
    """
    integrand, s0, to_s = _substituted(p)
    lo, hi = p.support

    def one(xv: float) -> float:
        if xv <= lo:
            return 0.0
        if xv >= hi:
            return 1.0
        val, _ = integrate.quad(integrand, s0, to_s(xv), epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)
        return min(max(val, 0.0), 1.0)

    xs = np.asarray(x, dtype=float)
    if xs.ndim == 0:
        return one(float(xs))
    return np.array([one(float(v)) for v in xs.ravel()]).reshape(xs.shape)


def total_mass(p: DensityProfile) -> float:
    """``int`` of the density over its support (the measure forms cover one branch)."""
    integrand, s0, to_s = _substituted(p)
    val, _ = integrate.quad(integrand, s0, to_s(p.support[1]), epsabs=QUAD_EPSABS, epsrel=1e-12)
    return val / 2.0 if p.kind.startswith("measure") else val


def ks_grid(p: DensityProfile, grid: int = 2001) -> np.ndarray:
    """Evenly spaced points on ``[-1, 1]``, widened when the support is wider."""
    if grid < 2:
        raise ValueError("grid needs at least two points")
    span = max(1.0, abs(p.support[0]), abs(p.support[1]))
    lo = 0.0 if p.kind.startswith("measure") else -span
    return np.linspace(lo, span, grid)


def ks_distance(empirical: Callable, p: DensityProfile, grid: int = 2001) -> float:
    """``max |F_emp - F_limit|`` over :func:`ks_grid`."""
    xs = ks_grid(p, grid)
    emp = np.asarray(empirical(xs), dtype=float)
    return float(np.max(np.abs(emp - cdf(p, xs))))
