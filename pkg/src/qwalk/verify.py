"""Named verification suites producing JSON-ready reports.

Each suite returns a list of :class:`Check`; ``run_suite`` wraps them in the
versioned report ``{"schema": 1, "suite": ..., "checks": [...]}``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ctqw, density, dtqw, elliptic, fuchsian
from .core import hadamard

SCHEMA = 1
SUITES = ("heun", "gauss", "confluence", "inozemtsev", "convergence")
DEFAULT_A = (0.5, math.sqrt(0.5), math.sqrt(0.75))
HADAMARD_NU = 1.0 / (2.0 * math.sqrt(2.0))

TOLERANCES = {
    "residual": 1e-9,
    "fd_residual": 1e-5,
    "sensitivity": 1e-4,
    "confluence_ratio_lo": 5.0,
    "confluence_ratio_hi": 20.0,
    "e_sum": 1e-10,
    "wp_ode": 1e-10,
    "half_period": 1e-8,
    "cross_ratio": 1e-10,
    "period_ratio": 1e-8,
    "z_half_period": 1e-9,
    "eigen": 1e-6,
    "ks": 0.05,
    "ks_wiggle": 1.3,
    "backend": 1e-8,
    "norm_dtqw": 1e-10,
    "norm_ctqw": 1e-8,
}


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    relation: str = "<="  # "<=" or ">"

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.relation == "<=":
            return self.value <= self.tolerance
        return self.value > self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "pass": self.passed,
        }


def _tol(overrides: dict | None) -> dict:
    tol = dict(TOLERANCES)
    if overrides:
        unknown = set(overrides) - set(tol)
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        tol.update(overrides)
    return tol


# -- suites ----------------------------------------------------------------

def heun_checks(a_values=DEFAULT_A, tol=None) -> list[Check]:
    tol = _tol(tol)
    out = []
    for a in a_values:
        th = a * a
        tag = f"a2={th:.6g}"
        inside = (1e-3, th - 1e-3)
        thm1 = fuchsian.heun_thm1(th)
        meas = fuchsian.heun_measure(th)
        u, w = fuchsian.u_d_bundle(th), fuchsian.w_d_bundle(a)
        out.append(Check(f"heun_u_d[{tag}]", fuchsian.residual_scan(thm1, u, inside), tol["residual"]))
        out.append(Check(f"heun_w_d[{tag}]", fuchsian.residual_scan(meas, w, inside), tol["residual"]))
        out.append(Check(
            f"heun_u_d_continued[{tag}]",
            fuchsian.residual_scan(thm1, u, (th + 1e-3, 1 - 1e-3)),
            tol["residual"],
        ))
        fd_inside = (1e-2, th - 1e-2)
        for name, eq, prof in (("u_d", thm1, u), ("w_d", meas, w)):
            fd = fuchsian.fd_bundle(prof.value, 1e-4)
            out.append(Check(f"heun_{name}_fd[{tag}]", fuchsian.residual_scan(eq, fd, fd_inside), tol["fd_residual"]))
        f = density.konno_d(a)
        out.append(Check(
            f"x_equation_f_d[{tag}]",
            fuchsian.residual_scan(fuchsian.dtqw_x_equation(a), f.shape, (-a + 1e-3, a - 1e-3)),
            tol["residual"],
        ))
        for name in ("alpha", "beta", "gamma", "delta", "epsilon", "q", "theta"):
            for fam, eq, prof in (("u_d", thm1, u), ("w_d", meas, w)):
                val = fuchsian.residual_scan(fuchsian.perturbed(eq, name, 1e-2), prof, inside)
                out.append(Check(f"sensitivity_{fam}_{name}[{tag}]", val, tol["sensitivity"], ">"))
    return out


def gauss_checks(nu: float = HADAMARD_NU, tol=None) -> list[Check]:
    tol = _tol(tol)
    inside = (1e-3, 1 - 1e-3)
    cases = (("u_c", fuchsian.gauss_thm2(), fuchsian.u_c_bundle(nu)), ("w_c", fuchsian.gauss_measure(), fuchsian.w_c_bundle(nu)))
    out = []
    for name, eq, prof in cases:
        out.append(Check(f"gauss_{name}", fuchsian.residual_scan(eq, prof, inside), tol["residual"]))
        fd = fuchsian.fd_bundle(prof.value, 1e-4)
        out.append(Check(f"gauss_{name}_fd", fuchsian.residual_scan(eq, fd, (1e-2, 1 - 1e-2)), tol["fd_residual"]))
        for field in ("alpha", "beta", "gamma"):
            val = fuchsian.residual_scan(fuchsian.perturbed(eq, field, 1e-2), prof, inside)
            out.append(Check(f"sensitivity_{name}_{field}", val, tol["sensitivity"], ">"))
    f = density.arcsine_c(nu)
    r = 2 * nu
    out.append(Check(
        "x_equation_f_c",
        fuchsian.residual_scan(fuchsian.ctqw_x_equation(nu), f.shape, (-r + 1e-3, r - 1e-3)),
        tol["residual"],
    ))
    return out


def confluence_checks(taus=(1e2, 1e3, 1e4, 1e5), tol=None) -> list[Check]:
    tol = _tol(tol)
    out = []
    targets = {"thm1": fuchsian.gauss_thm2(), "appB_heun": fuchsian.gauss_measure()}
    for fam, target in targets.items():
        errs = [fuchsian.confluence_error(tau, family=fam) for tau in taus]
        for tau, e in zip(taus, errs):
            # first order in 1/tau with a generous constant
            out.append(Check(f"confluence_{fam}[tau={tau:g}]", e, 10.0 / tau))
        for (t0, e0), (t1, e1) in zip(zip(taus, errs), zip(taus[1:], errs[1:])):
            ratio = e0 / e1
            out.append(Check(f"confluence_{fam}_ratio_lo[{t0:g}->{t1:g}]", ratio, tol["confluence_ratio_lo"], ">"))
            out.append(Check(f"confluence_{fam}_ratio_hi[{t0:g}->{t1:g}]", ratio, tol["confluence_ratio_hi"]))
        lim = fuchsian.limit_gauss(fam)
        exact = lim == target and all(isinstance(v, Fraction) for v in (lim.alpha, lim.beta, lim.gamma))
        out.append(Check(f"confluence_{fam}_limit_exact", 0.0 if exact else 1.0, 0.0))
    # the explicit scaled equation matches the generic substitution
    a = fuchsian.scaled_heun(1e3, "thm1")
    b = fuchsian.eq22_coefficients(1e3, 1e-3)
    gap = max(float(np.max(np.abs((4 * getattr(a, c) - getattr(b, c)).coef))) for c in ("c2", "c1", "c0"))
    out.append(Check("scaled_equation_transcription", gap, 1e-9))
    return out


def lattice_checks(lat: elliptic.Lattice, tag: str, tol: dict, rng: np.random.Generator) -> list[Check]:
    e1, e2, e3 = lat.e_values
    out = [Check(f"e_sum[{tag}]", abs(e1 + e2 + e3), tol["e_sum"])]
    x = rng.uniform(-1, 1, 20) * lat.omega + 1j * rng.uniform(-1, 1, 20) * abs(lat.tau) * lat.omega
    p = np.asarray(elliptic.wp_eval(lat, x))
    dp = np.asarray(elliptic.wp_derivative(lat, x))
    ode = np.abs(dp**2 - 4 * (p - e1) * (p - e2) * (p - e3)) / np.abs(dp**2)
    out.append(Check(f"wp_ode[{tag}]", float(np.max(ode)), tol["wp_ode"]))
    crit = max(abs(elliptic.wp_derivative(lat, w)) for w in lat.half_periods)
    out.append(Check(f"half_period_critical[{tag}]", crit, tol["half_period"]))
    return out


def inozemtsev_checks(a2_values=(0.25, 0.5, 0.75), tol=None, printed: bool = False) -> list[Check]:
    tol = _tol(tol)
    rng = np.random.default_rng(20100101)
    out = []
    half = elliptic.solve_lattice(0.5)
    out.append(Check("period_ratio_square", abs(half.tau - 1j), tol["period_ratio"]))
    for th in a2_values:
        tag = f"a2={th:.6g}"
        lat = elliptic.solve_lattice(th)
        out.append(Check(f"cross_ratio[{tag}]", abs(lat.cross_ratio() - th), tol["cross_ratio"]))
        out.extend(lattice_checks(lat, tag, tol, rng))
        zs = [complex(elliptic.z_map(lat, w)) for w in lat.half_periods]
        zgap = max(abs(zs[0]), abs(zs[1] - 1), abs(zs[2] - th))
        out.append(Check(f"z_at_half_periods[{tag}]", zgap, tol["z_half_period"]))
        E_gap = abs(elliptic.printed_eigenvalue(lat, th) - elliptic.liouville_eigenvalue(lat))
        out.append(Check(f"eigenvalue_identity[{tag}]", E_gap, 1e-12 * max(1.0, abs(lat.e1))))
        for variant in ("liouville", "measure"):
            r = elliptic.eigen_residual(th, 50, variant=variant, lat=lat)
            out.append(Check(f"eigen_{variant}[{tag}]", r, tol["eigen"]))
        rp = elliptic.eigen_residual(th, 50, lat=lat, eigenvalue_scale=1 + 1e-3)
        out.append(Check(f"eigen_perturbed_E[{tag}]", rp, tol["sensitivity"], ">"))
        if printed:
            r = elliptic.eigen_residual(th, 50, variant="printed", lat=lat)
            out.append(Check(f"eigen_printed[{tag}]", r, tol["eigen"]))
    return out


def convergence_checks(
    walk: str = "dtqw",
    t: int = 500,
    trend=(125, 250, 500, 1000),
    nu: float = HADAMARD_NU,
    tol=None,
    backends: bool = True,
) -> list[Check]:
    tol = _tol(tol)
    out = []
    if walk == "dtqw":
        coin = hadamard()
        prof = density.konno_d(coin.a_abs)

        def state(tt):
            return dtqw.dtqw_evolve(coin, tt)

        norm_key = "norm_dtqw"
    elif walk == "ctqw":
        prof = density.arcsine_c(nu)

        def state(tt):
            return ctqw.ctqw_closed_form(nu, tt)

        norm_key = "norm_ctqw"
    else:
        raise ValueError(f"unknown walk {walk!r}")

    ks = {}
    for tt in sorted(set(trend) | {t}):
        s = state(tt)
        if tt == t:
            out.append(Check(f"{walk}_norm[t={tt}]", abs(float(s.probabilities().sum()) - 1.0), tol[norm_key]))
        ks[tt] = density.ks_distance(dtqw.rescaled_empirical_cdf(s), prof)
    out.append(Check(f"{walk}_ks[t={t}]", ks[t], tol["ks"]))
    ts = sorted(trend)
    for t0, t1 in zip(ts, ts[1:]):
        out.append(Check(f"{walk}_ks_trend[{t0}->{t1}]", ks[t1] / ks[t0], tol["ks_wiggle"]))
    if walk == "ctqw" and backends:
        a = ctqw.ctqw_integrate(nu, t)
        b = ctqw.ctqw_closed_form(nu, t, (a.lo, a.hi))
        out.append(Check(f"ctqw_backend_abs[t={t}]", float(np.max(np.abs(np.abs(a.amps) - np.abs(b.amps)))), tol["backend"]))
        out.append(Check(f"ctqw_integrator_norm[t={t}]", abs(float(a.probabilities().sum()) - 1.0), tol["norm_ctqw"]))
    return out


# -- reports ---------------------------------------------------------------

def report(suite: str, checks: list[Check]) -> dict:
    return {"schema": SCHEMA, "suite": suite, "checks": [c.as_dict() for c in checks]}


def run_suite(suite: str, options: dict | None = None) -> dict:
    opts = dict(options or {})
    tol = opts.get("tol")
    if suite == "heun":
        checks = heun_checks(opts.get("a_values") or DEFAULT_A, tol)
    elif suite == "gauss":
        checks = gauss_checks(opts.get("nu") or HADAMARD_NU, tol)
    elif suite == "confluence":
        checks = confluence_checks(tol=tol)
    elif suite == "inozemtsev":
        a_values = opts.get("a_values")
        a2 = tuple(a * a for a in a_values) if a_values else (0.25, 0.5, 0.75)
        checks = inozemtsev_checks(a2, tol, printed=opts.get("printed", False))
    elif suite == "convergence":
        walks = [opts["walk"]] if opts.get("walk") else ["dtqw", "ctqw"]
        checks = []
        for w in walks:
            checks += convergence_checks(w, t=opts.get("t") or 500, nu=opts.get("nu") or HADAMARD_NU, tol=tol)
    elif suite == "all":
        threads = max(1, int(os.environ.get("QWALK_THREADS", "1")))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda s: run_suite(s, opts)["checks"], SUITES))
        return {"schema": SCHEMA, "suite": "all", "checks": [c for part in parts for c in part]}
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return report(suite, checks)


def all_passed(rep: dict) -> bool:
    return all(c["pass"] for c in rep["checks"])
