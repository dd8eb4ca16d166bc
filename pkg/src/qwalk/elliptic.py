"""Weierstrass ``wp`` from Jacobi theta quotients, and the check that the
gauged ``u^(d)`` is an eigenfunction of a BC1 Inozemtsev Hamiltonian.

Half-period labels
------------------
A :class:`Lattice` is rectangular with generators ``omega`` (real) and
``omega' = tau * omega`` (``tau`` purely imaginary).  The three labelled
half-periods are::

    w1 = omega,   w3 = omega + omega',   w2 = -w1 - w3  (~ omega')

so ``e1 = wp(w1)`` is the largest ``e``-value, ``e2 = wp(w2)`` the smallest
and ``e3 = wp(w3)`` the middle one.  With this labelling the cross-ratio
``(e3 - e1) / (e2 - e1) = theta_4^4 / theta_3^4`` sweeps ``(0, 1)``, which
is what ``z = (wp(x) - e1) / (e2 - e1)`` needs to send ``w3`` to
``theta = |a|^2``.  (If ``w3`` were ``omega'`` itself the ratio would be
``theta_3^4 / theta_4^4 > 1``.)

Gauge and Hamiltonian
---------------------
Rewriting a Heun equation in ``x`` and removing the first-derivative term
forces the gauge ``z^(g/2-1/4) (z-1)^(d/2-1/4) (z-theta)^(e/2-1/4)``
(``g, d, e`` the Heun exponent parameters) and the couplings
``l_j (l_j + 1)`` of the resulting potential.  For ``u^(d)`` this gives
``g = u z^0 (1-z)^(3/4) (theta-z)^(1/2)`` and
``H = -d^2/dx^2 - 1/4 wp(x) + 3/4 wp(x + w2)`` with eigenvalue
``(2 - theta)/12 * (e1 - e2) = -e2 / 4``.  The printed variant
(``z^(1/4) (z-theta)^(3/4)`` with an extra ``2 wp(x + w3)``) is kept
as ``"printed"`` so it can be checked too; it does not satisfy the
relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._powers import PowerProduct
from .core import QWalkError
from .fuchsian import HeunParams, heun_measure, heun_thm1

POLE_TOL = 1e-6
BRANCH_TOL = 1e-10
FD6 = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])


class PolePoint(QWalkError, ValueError):
    """Argument sits on a lattice point."""


class BranchPoint(QWalkError, ValueError):
    """Gauge evaluated where ``z`` hits 0 or ``theta``."""


class NoConvergence(QWalkError, RuntimeError):
    """Lattice solve did not reach the requested cross-ratio."""


# -- theta functions -------------------------------------------------------

def _n_terms(tau: complex) -> int:
    # |q|^(n^2 - n) < 1e-17 once the argument is reduced to the central cell
    return int(math.ceil(0.5 + math.sqrt(0.25 + 40.0 / (math.pi * tau.imag)))) + 2


def thetas(v, tau: complex, derivative: bool = False):
    """Jacobi ``theta_1..theta_4`` at ``v`` with nome ``exp(i pi tau)``.

    With ``derivative=True`` also returns ``theta_1'`` and ``theta_2'``.
    Converges fastest for ``Im tau >= 1`` and ``|Im v| <= pi Im tau / 2``.
    """
    v = np.asarray(v, dtype=np.complex128)[..., None]
    n = np.arange(_n_terms(tau))
    qh = np.exp(1j * np.pi * tau * (n + 0.5) ** 2)  # q^((n+1/2)^2)
    qn = np.exp(1j * np.pi * tau * n[1:] ** 2)  # q^(n^2), n >= 1
    sign = (-1.0) ** n
    odd = (2 * n + 1) * v
    even = 2 * n[1:] * v
    t1 = 2 * np.sum(sign * qh * np.sin(odd), axis=-1)
    t2 = 2 * np.sum(qh * np.cos(odd), axis=-1)
    t3 = 1 + 2 * np.sum(qn * np.cos(even), axis=-1)
    t4 = 1 + 2 * np.sum(sign[1:] * qn * np.cos(even), axis=-1)
    if not derivative:
        return t1, t2, t3, t4
    d1 = 2 * np.sum(sign * qh * (2 * n + 1) * np.cos(odd), axis=-1)
    d2 = -2 * np.sum(qh * (2 * n + 1) * np.sin(odd), axis=-1)
    return t1, t2, t3, t4, d1, d2


def _cross_ratio(s: float) -> float:
    """``theta_4^4 / theta_3^4`` at ``tau = i s``, evaluated on the side with ``Im tau >= 1``."""
    if s >= 1.0:
        _, _, t3, t4 = thetas(0.0, 1j * s)
        return float((t4 / t3).real ** 4)
    # 1 - lambda(1/s), written without cancellation
    _, t2, t3, _ = thetas(0.0, 1j / s)
    return float((t2 / t3).real ** 4)


# -- lattice ---------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    omega: float
    tau: complex

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if abs(complex(self.tau).real) > 1e-15 or not complex(self.tau).imag > 0:
            raise ValueError("tau must be purely imaginary with positive imaginary part")

    @property
    def w1(self) -> complex:
        return complex(self.omega)

    @property
    def w3(self) -> complex:
        return self.omega * (1 + self.tau)

    @property
    def w2(self) -> complex:
        return -self.w1 - self.w3

    @property
    def nome(self) -> complex:
        """``exp(i pi tau)`` of the rectangular generators."""
        return complex(np.exp(1j * np.pi * self.tau))

    @cached_property
    def _basis(self) -> tuple[complex, complex, bool]:
        """``(omega_1, tau)`` used for series evaluation, with ``Im tau >= 1``."""
        tau = complex(self.tau)
        if tau.imag >= 1.0:
            return complex(self.omega), tau, False
        # same lattice generated by (omega', -omega)
        return self.omega * tau, -1.0 / tau, True

    @cached_property
    def _constants(self):
        om1, tau, _ = self._basis
        _, t2, t3, t4 = thetas(0.0, tau)
        K = np.pi / (2 * om1)
        return complex(K), complex(t2), complex(t3), complex(t4)

    @cached_property
    def e_values(self) -> tuple[complex, complex, complex]:
        """``(e1, e2, e3) = (wp(w1), wp(w2), wp(w3))``."""
        K, t2, t3, t4 = self._constants
        at_om1 = K * K * (t3**4 + t4**4) / 3
        at_sum = K * K * (t2**4 - t4**4) / 3
        at_om3 = -K * K * (t2**4 + t3**4) / 3
        swapped = self._basis[2]
        if swapped:
            # omega_1 ~ omega', omega_3 ~ omega
            return at_om3, at_om1, at_sum
        return at_om1, at_om3, at_sum

    @property
    def e1(self) -> complex:
        return self.e_values[0]

    @property
    def e2(self) -> complex:
        return self.e_values[1]

    @property
    def e3(self) -> complex:
        return self.e_values[2]

    @property
    def half_periods(self) -> tuple[complex, complex, complex]:
        return self.w1, self.w2, self.w3

    def cross_ratio(self) -> float:
        e1, e2, e3 = self.e_values
        return float(((e3 - e1) / (e2 - e1)).real)

    def reduce(self, x):
        """Shift ``x`` by periods into the cell centred on the origin."""
        om1, tau, _ = self._basis
        x = np.asarray(x, dtype=np.complex128)
        om3 = tau * om1
        # x = a * 2 om1 + b * 2 om3 with a, b real
        m = np.array([[2 * om1.real, 2 * om3.real], [2 * om1.imag, 2 * om3.imag]])
        ab = np.linalg.solve(m, np.stack([x.real.ravel(), x.imag.ravel()]))
        k = np.round(ab)
        red = x.ravel() - k[0] * 2 * om1 - k[1] * 2 * om3
        return red.reshape(x.shape)


def wp_eval(lat: Lattice, x):
    """``wp(x) = e + K^2 (theta_3 theta_4 theta_2(v) / theta_1(v))^2`` with ``v = pi x / (2 omega_1)``."""
    xr = lat.reduce(x)
    _pole_guard(lat, xr)
    om1, tau, _ = lat._basis
    K, _, t3, t4 = lat._constants
    t1v, t2v, _, _ = thetas(K * xr, tau)
    base = K * K * (t3**4 + t4**4) / 3
    out = base + (K * t3 * t4 * t2v / t1v) ** 2
    return out if out.ndim else complex(out)


def wp_derivative(lat: Lattice, x):
    """``wp'(x)`` from the derivative of the same theta quotient."""
    xr = lat.reduce(x)
    _pole_guard(lat, xr)
    _, tau, _ = lat._basis
    K, _, t3, t4 = lat._constants
    t1v, t2v, _, _, d1v, d2v = thetas(K * xr, tau, derivative=True)
    c = t3 * t4
    F = c * t2v / t1v
    dF = c * (d2v * t1v - t2v * d1v) / (t1v * t1v)
    out = 2 * K**3 * F * dF
    return out if out.ndim else complex(out)


def _pole_guard(lat: Lattice, xr) -> None:
    if np.any(np.abs(xr) < POLE_TOL * lat.omega):
        raise PolePoint("argument lies on the period lattice")


def solve_lattice(a_abs2: float, omega: float = 1.0, max_iter: int = 200) -> Lattice:
    """Rectangular lattice with ``(e3 - e1) / (e2 - e1) = a_abs2``.

    The cross-ratio increases monotonically in ``s = Im tau``; bisect on
    ``log s``.
    """
    if not 0.0 < a_abs2 < 1.0:
        raise ValueError("a_abs2 must lie in (0, 1)")
    lo, hi = math.log(1e-3), math.log(1e3)
    if not _cross_ratio(math.exp(lo)) < a_abs2 < _cross_ratio(math.exp(hi)):
        raise NoConvergence(f"cross-ratio {a_abs2} outside the bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if _cross_ratio(math.exp(mid)) < a_abs2:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    s = math.exp(0.5 * (lo + hi))
    lat = Lattice(omega, 1j * s)
    if abs(lat.cross_ratio() - a_abs2) > 1e-10:
        raise NoConvergence(f"cross-ratio {lat.cross_ratio()} after {max_iter} iterations")
    return lat


def z_map(lat: Lattice, x):
    """``(wp(x) - e1) / (e2 - e1)``: 0 at ``w1``, 1 at ``w2``, ``theta`` at ``w3``."""
    return (wp_eval(lat, x) - lat.e1) / (lat.e2 - lat.e1)


# -- gauges ----------------------------------------------------------------

@dataclass(frozen=True)
class Gauge:
    """``g = profile(z) * z^k0 * (1-z)^k1 * (theta-z)^k2`` with principal powers.

    Bases are chosen positive on ``0 < z < theta`` so no cut crosses the
    sampling segment; unimodular constants such as ``(-1)^(3/4)`` relating
    ``(z-theta)^k`` to ``(theta-z)^k`` are dropped.
    """

    name: str
    profile: PowerProduct
    exponents: tuple[float, float, float]


def liouville_exponents(p: HeunParams) -> tuple[float, float, float]:
    """Gauge exponents that remove the first-derivative term after ``z = z(x)``."""
    return tuple(float(v) / 2 - 0.25 for v in (p.gamma, p.delta, p.epsilon))


def _u_d(theta: float) -> PowerProduct:
    return PowerProduct(math.sqrt(1.0 - theta) / math.pi, ((1.0, -1.0, -1.0), (theta, -1.0, -0.5)))


def _w_d(theta: float) -> PowerProduct:
    k = math.sqrt(1.0 - theta) / (2 * math.pi)
    return PowerProduct(k, ((1.0, -1.0, -1.0), (0.0, 1.0, -0.5), (theta, -1.0, -0.5)))


def make_gauge(theta: float, variant: str = "liouville") -> Gauge:
    """``"liouville"`` (default), ``"printed"``, or ``"measure"`` (the ``w^(d)`` form)."""
    if variant == "liouville":
        return Gauge(variant, _u_d(theta), liouville_exponents(heun_thm1(theta)))
    if variant == "printed":
        return Gauge(variant, _u_d(theta), (0.25, 0.0, 0.75))
    if variant == "measure":
        return Gauge(variant, _w_d(theta), liouville_exponents(heun_measure(theta)))
    raise ValueError(f"unknown gauge {variant!r}")


def gauge_g(lat: Lattice, a_abs2: float, x, variant: str | Gauge = "liouville"):
    gauge = make_gauge(a_abs2, variant) if isinstance(variant, str) else variant
    z = np.asarray(z_map(lat, x))
    if np.any(np.abs(z) < BRANCH_TOL) or np.any(np.abs(z - a_abs2) < BRANCH_TOL):
        raise BranchPoint("z(x) hits a branch point of the gauge")
    k0, k1, k2 = gauge.exponents
    out = gauge.profile.value(z) * z**k0 * (1 - z) ** k1 * (a_abs2 - z) ** k2
    return out if out.ndim else complex(out)


# -- Hamiltonian -----------------------------------------------------------

@dataclass(frozen=True)
class InozemtsevParams:
    """Couplings ``l0..l3`` at shifts ``(0, w1, w2, w3)``."""

    name: str
    l: tuple[float, float, float, float]

    @property
    def couplings(self) -> tuple[float, ...]:
        return tuple(lj * (lj + 1) for lj in self.l)


# l3 = 1 as printed gives a 2 wp(x + w3) term; the Liouville reduction has none
PRESET_A_PRINTED = InozemtsevParams("A_printed", (-0.5, 0.0, -1.5, 1.0))
PRESET_A = InozemtsevParams("A", (-0.5, 0.0, -1.5, -1.0))
PRESET_B = InozemtsevParams("B", (-0.5, -1.0, -1.5, -1.0))
INOZEMTSEV_PRESETS = {p.name: p for p in (PRESET_A_PRINTED, PRESET_A, PRESET_B)}


def potential(params: InozemtsevParams, lat: Lattice, x):
    """``sum_j l_j (l_j + 1) wp(x + w_j)``; zero couplings are skipped."""
    x = np.asarray(x, dtype=np.complex128)
    shifts = (0.0, lat.w1, lat.w2, lat.w3)
    out = np.zeros_like(x)
    for c, w in zip(params.couplings, shifts):
        if c != 0:
            out = out + c * np.asarray(wp_eval(lat, x + w))
    return out


def second_derivative(f, x, h: float):
    """Sixth-order central difference along the real direction."""
    x = np.asarray(x, dtype=np.complex128)
    vals = [np.asarray(f(x + k * h)) for k in range(-3, 4)]
    return sum(c * v for c, v in zip(FD6, vals)) / (h * h)


def hamiltonian_apply(params: InozemtsevParams, lat: Lattice, f, x, h: float | None = None):
    """``-f''(x) + V(x) f(x)``."""
    if h is None:
        h = 1e-3 * abs(lat.w1)
    x = np.asarray(x, dtype=np.complex128)
    return -second_derivative(f, x, h) + potential(params, lat, x) * np.asarray(f(x))


def printed_eigenvalue(lat: Lattice, a_abs2: float) -> complex:
    """``(2 - |a|^2) / 12 * (wp(w1) - wp(-w1 - w3))``."""
    return (2.0 - a_abs2) / 12.0 * (lat.e1 - lat.e2)


def liouville_eigenvalue(lat: Lattice) -> complex:
    """Constant left over after the Liouville reduction: ``-e2 / 4``."""
    return -lat.e2 / 4.0


def sample_segment(lat: Lattice, n: int, inset: float = 0.1) -> np.ndarray:
    """``n`` points on the segment ``w1 -> w3``, trimmed by ``inset`` at each end."""
    s = np.linspace(inset, 1.0 - inset, n)
    return lat.w1 + s * (lat.w3 - lat.w1)


def eigen_residual(
    a_abs2: float,
    n: int = 50,
    variant: str = "liouville",
    params: InozemtsevParams | None = None,
    eigenvalue_scale: float = 1.0,
    h: float | None = None,
    lat: Lattice | None = None,
) -> float:
    """``max |H g - E g| / (|E g| + |g''|)`` along the sampling segment.

    ``E`` is always the printed eigenvalue (times ``eigenvalue_scale``).
    ``variant`` picks the gauge; the Hamiltonian defaults to the matching
    preset (``A_printed`` for ``"printed"``, ``A`` for ``"liouville"``,
    ``B`` for ``"measure"``).
    """
    if lat is None:
        lat = solve_lattice(a_abs2)
    if params is None:
        params = {"printed": PRESET_A_PRINTED, "liouville": PRESET_A, "measure": PRESET_B}[variant]
    if h is None:
        h = 1e-3 * abs(lat.w1)
    gauge = make_gauge(a_abs2, variant)
    E = eigenvalue_scale * printed_eigenvalue(lat, a_abs2)
    x = sample_segment(lat, n)

    def g(y):
        return gauge_g(lat, a_abs2, y, gauge)

    gx = np.asarray(g(x))
    d2 = second_derivative(g, x, h)
    Hg = -d2 + potential(params, lat, x) * gx
    res = np.abs(Hg - E * gx) / (np.abs(E * gx) + np.abs(d2) + 1e-300)
    return float(np.max(res))
