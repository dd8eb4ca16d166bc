import math
from fractions import Fraction

import numpy as np
import pytest

from qwalk.density import arcsine_c, konno_d
from qwalk.fuchsian import (
    FuchsRelationError,
    GaussParams,
    HeunParams,
    SingularPoint,
    confluence_error,
    ctqw_x_equation,
    dtqw_x_equation,
    eq22_coefficients,
    fd_bundle,
    gauss_apply,
    gauss_measure,
    gauss_thm2,
    heun_apply,
    limit_gauss,
    perturbed,
    preset,
    residual_scan,
    scaled_heun,
    u_c_bundle,
    u_d_bundle,
    w_c_bundle,
    w_d_bundle,
)

S = 1 / math.sqrt(2)
NU = 1 / (2 * math.sqrt(2))
HEUN_FIELDS = ("alpha", "beta", "gamma", "delta", "epsilon", "q")


# -- presets -----------------------------------------------------------------

def test_thm1_preset_values():
    p = preset("thm1", S)
    h = Fraction(1, 2)
    assert (p.alpha, p.beta, p.gamma, p.delta, p.epsilon) == (3 * h, 3 * h, h, 2, 3 * h)
    assert p.q == pytest.approx(0.5, abs=1e-15)
    assert p.theta == pytest.approx(0.5, abs=1e-15)
    assert p.alpha + p.beta + 1 == p.gamma + p.delta + p.epsilon == 4


def test_measure_preset_values():
    a = 0.6
    p = preset("appB_heun", a)
    assert p.q == pytest.approx((3 * a * a + 2) / 2)
    assert (p.alpha, p.beta, p.gamma, p.delta, p.epsilon) == (2, 2, 1.5, 2, 1.5)
    assert preset("thm2") == GaussParams(0.5, 0.5, 0.5)
    assert preset("appB_gauss") == GaussParams(1, 1, 1.5)


def test_preset_errors():
    with pytest.raises(ValueError):
        preset("thm1")
    with pytest.raises(ValueError):
        preset("thm1", 1.2)
    with pytest.raises(ValueError):
        preset("nope")


def test_fuchs_relation_enforced():
    with pytest.raises(FuchsRelationError):
        HeunParams(1.5, 1.5, 0.5, 2, 1.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        HeunParams(1.5, 1.5, 0.5, 2, 1.5, 0.5, 1.0)
    # within tolerance is accepted
    HeunParams(1.5, 1.5 + 1e-14, 0.5, 2, 1.5, 0.5, 0.5)


# -- operators ---------------------------------------------------------------

def test_zero_function_gives_zero():
    p = preset("thm1", S)
    assert heun_apply(p, 0, 0, 0, 0.3 + 0.2j) == 0
    assert gauss_apply(GaussParams(0, 2, 5), 1.0, 0, 0, 0.7) == 0


def test_singular_points_rejected():
    p = preset("thm1", S)
    for z in (0.0, 1.0, 0.5):
        with pytest.raises(SingularPoint):
            heun_apply(p, 1, 1, 1, z)
    with pytest.raises(SingularPoint):
        gauss_apply(gauss_thm2(), 1, 1, 1, 1.0)


def test_pointwise_instances():
    th = 0.5
    u, du, d2u = u_d_bundle(th).bundle(0.3)
    scale = abs(d2u) + abs(du) + abs(u)
    assert abs(heun_apply(preset("thm1", S), u, du, d2u, 0.3)) <= 1e-10 * scale
    u, du, d2u = w_d_bundle(S).bundle(0.2)
    assert abs(heun_apply(preset("appB_heun", S), u, du, d2u, 0.2)) <= 1e-10 * (abs(d2u) + abs(du))
    u, du, d2u = u_c_bundle(NU).bundle(0.4)
    assert abs(gauss_apply(gauss_thm2(), u, du, d2u, 0.4)) <= 1e-12
    u, du, d2u = w_c_bundle().bundle(0.6)
    assert abs(gauss_apply(gauss_measure(), u, du, d2u, 0.6)) <= 1e-12


@pytest.mark.parametrize("a2", [0.25, 0.5, 0.75])
def test_heun_residual_scans(a2):
    a = math.sqrt(a2)
    dom = (1e-3, a2 - 1e-3)
    assert residual_scan(preset("thm1", a), u_d_bundle(a2), dom) <= 1e-9
    assert residual_scan(preset("appB_heun", a), w_d_bundle(a), dom) <= 1e-9


def test_gauss_residual_scans():
    dom = (1e-3, 1 - 1e-3)
    assert residual_scan(gauss_thm2(), u_c_bundle(NU), dom) <= 1e-9
    assert residual_scan(gauss_measure(), w_c_bundle(), dom) <= 1e-9


def test_finite_difference_bundle_agrees():
    a2 = 0.5
    b = u_d_bundle(a2)
    assert residual_scan(preset("thm1", S), fd_bundle(b.value, 1e-4), (0.05, 0.45)) <= 1e-5


def test_residual_continues_past_branch_point():
    # beyond theta the profile is complex on the principal branch but still a solution
    assert residual_scan(preset("thm1", S), u_d_bundle(0.5), (0.55, 0.95)) <= 1e-9


@pytest.mark.parametrize("name", HEUN_FIELDS)
def test_perturbed_parameters_detected(name):
    p = perturbed(preset("thm1", S), name, 0.01)
    assert residual_scan(p, u_d_bundle(0.5), (1e-3, 0.5 - 1e-3)) > 1e-4


@pytest.mark.parametrize("name", ("alpha", "beta", "gamma"))
def test_perturbed_gauss_detected(name):
    p = perturbed(gauss_thm2(), name, 0.01)
    assert residual_scan(p, u_c_bundle(NU), (1e-3, 1 - 1e-3)) > 1e-4


def test_x_space_equations():
    for a in (0.3, S, 0.9):
        assert residual_scan(dtqw_x_equation(a), konno_d(a).shape, (-a + 1e-3, a - 1e-3)) <= 1e-9
    nu = 1.7
    assert residual_scan(ctqw_x_equation(nu), arcsine_c(nu).shape, (-2 * nu + 1e-3, 2 * nu - 1e-3)) <= 1e-9


# -- confluence --------------------------------------------------------------

def test_limit_is_exact_gauss_instance():
    assert limit_gauss("thm1") == gauss_thm2()
    assert limit_gauss("appB_heun") == gauss_measure()
    assert isinstance(limit_gauss("thm1").alpha, Fraction)


def test_explicit_transcription_is_four_times_generic():
    for tau in (10.0, 1e3):
        g = scaled_heun(tau)
        e = eq22_coefficients(tau, 1 / tau)
        for pg, pe in ((g.c2, e.c2), (g.c1, e.c1), (g.c0, e.c0)):
            diff = (4 * pg - pe).coef
            assert np.max(np.abs(diff)) <= 1e-12 * max(1.0, np.max(np.abs(pe.coef)))


def test_confluence_error_decays_like_one_over_tau():
    errs = [confluence_error(tau) for tau in (1e2, 1e3, 1e4, 1e5)]
    for e, tau in zip(errs, (1e2, 1e3, 1e4, 1e5)):
        assert e <= 10 / tau
    for e0, e1 in zip(errs, errs[1:]):
        assert 5 <= e0 / e1 <= 20


def test_confluence_for_measure_family():
    e2, e3 = confluence_error(1e2, family="appB_heun"), confluence_error(1e3, family="appB_heun")
    assert e3 < e2 / 5


def test_scaled_heun_needs_tau_above_one():
    with pytest.raises(ValueError):
        scaled_heun(0.5)
    with pytest.raises(ValueError):
        confluence_error(100.0, grid=(0.0, 1.0))
