"""Scheme construction and Fourier-symbol analysis."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import resources

import numpy as np
import pytest

from advstab import stencil


def _manifest() -> dict:
    text = (
        resources.files("advstab")
        .joinpath("data/reference_targets.json")
        .read_text(encoding="utf-8")
    )
    return json.loads(text)


# ---------------------------------------------------------------------------
# construction and validation

def test_three_point_coefficients_exact() -> None:
    s = stencil.builtin("three-point", lam_a=0.5, nu=0.75)
    # a_{-1} = (lam*a + nu)/2, a_0 = 1 - nu, a_1 = (nu - lam*a)/2
    assert s.r == 1 and s.p == 1
    assert s.coefficients == (Fraction(5, 8), Fraction(1, 4), Fraction(1, 8))
    assert s.lam == 1 and s.velocity == Fraction(1, 2)


def test_lax_friedrichs_is_nu_equals_one() -> None:
    s = stencil.builtin("lax-friedrichs", lam_a=0.5)
    assert s.coefficients == (Fraction(3, 4), Fraction(0), Fraction(1, 4))


def test_lax_wendroff_is_nu_equals_cfl_squared() -> None:
    s = stencil.builtin("lax-wendroff", lam_a=0.5)
    assert s.coefficients == (Fraction(3, 8), Fraction(3, 4), Fraction(-1, 8))


def test_upwind_trims_to_two_point_stencil() -> None:
    s = stencil.builtin("upwind", lam_a=0.75)
    assert (s.r, s.p) == (1, 0)
    assert s.coefficients == (Fraction(3, 4), Fraction(1, 4))


def test_upwind_unit_cfl_is_pure_shift() -> None:
    # a_0 = 1 - nu = 0 is allowed at the right end because p = 0 there
    s = stencil.builtin("upwind", lam_a=1.0)
    assert (s.r, s.p) == (1, 0)
    assert s.coefficients == (Fraction(1), Fraction(0))


def test_identity_scheme() -> None:
    s = stencil.builtin("identity")
    assert (s.r, s.p) == (0, 0)
    assert s.coefficients == (Fraction(1),)
    assert s.velocity == 0


def test_builtin_names_cover_all_constructors() -> None:
    for name in stencil.builtin_names():
        if name == "three-point":
            stencil.builtin(name, lam_a=0.5, nu=0.5)
        elif name in ("lax-friedrichs", "upwind", "lax-wendroff"):
            stencil.builtin(name, lam_a=0.5)
        else:
            stencil.builtin(name)


def test_unknown_builtin_rejected() -> None:
    with pytest.raises(ValueError):
        stencil.builtin("nosuch")


def test_scheme_validation_rejects_bad_extents() -> None:
    with pytest.raises(ValueError):
        stencil.Scheme(
            name="bad", r=-1, p=0, coefficients=(Fraction(1),),
            lam=Fraction(1), velocity=Fraction(1),
        )
    with pytest.raises(ValueError):
        stencil.Scheme(
            name="bad", r=1, p=1, coefficients=(Fraction(1),),
            lam=Fraction(1), velocity=Fraction(1),
        )
    # zero endpoint with positive extent is not a valid support
    with pytest.raises(ValueError):
        stencil.Scheme(
            name="bad", r=1, p=1,
            coefficients=(Fraction(0), Fraction(1), Fraction(1)),
            lam=Fraction(1), velocity=Fraction(1),
        )


def test_coeffs_float_single_conversion_point() -> None:
    s = stencil.builtin("three-point", lam_a=0.5, nu=0.75)
    assert s.coeffs_float.dtype == np.float64
    assert [float(c) for c in s.coefficients] == list(s.coeffs_float)
    assert list(s.ells) == [-1, 0, 1]
    assert s.lam_a == 0.5


# ---------------------------------------------------------------------------
# consistency and amplification

def test_three_point_family_is_exactly_consistent() -> None:
    for lam_a, nu in ((0.5, 0.75), (0.3, 1.0), (1.0, 1.0), (0.7, 0.49)):
        s = stencil.builtin("three-point", lam_a=lam_a, nu=nu)
        assert stencil.consistency_residuals(s) == (0.0, 0.0)


def test_identity_consistency_with_zero_velocity() -> None:
    assert stencil.consistency_residuals(stencil.builtin("identity")) == (0.0, 0.0)


def test_wide_builtin_residuals_match_recorded_values() -> None:
    man = _manifest()["builtin_measured"]
    for name in ("coeff1", "coeff2"):
        r0, r1 = stencil.consistency_residuals(stencil.builtin(name))
        assert abs(r0 - man[name]["r0"]) <= 1e-15
        assert abs(r1 - man[name]["r1"]) <= 1e-15


def test_amplification_factor_lax_wendroff_at_pi() -> None:
    # C(pi) = a_0 - (a_{-1} + a_1) = 1 - 2 nu
    s = stencil.builtin("lax-wendroff", lam_a=0.5)
    sample = stencil.amplification_factor(s, math.pi)
    assert abs(sample.value - 0.5) < 1e-15
    assert abs(sample.modulus - 0.5) < 1e-15


def test_amplification_factor_at_zero_is_coefficient_sum() -> None:
    s = stencil.builtin("three-point", lam_a=0.3, nu=0.6)
    sample = stencil.amplification_factor(s, 0.0)
    assert abs(sample.value - 1.0) < 1e-15


# ---------------------------------------------------------------------------
# von Neumann supremum

def _brute_force_sup(s: stencil.Scheme, n: int = 200001) -> float:
    thetas = np.linspace(-math.pi, math.pi, n)
    vals = np.zeros(n, dtype=np.complex128)
    for a, ell in zip(s.coeffs_float, s.ells):
        vals += a * np.exp(1j * ell * thetas)
    return float(np.max(np.abs(vals)))


def test_sup_matches_brute_force_on_stable_scheme() -> None:
    s = stencil.builtin("lax-wendroff", lam_a=0.5)
    sup, argmax = stencil.von_neumann_sup(s)
    assert abs(sup - _brute_force_sup(s)) < 1e-9
    assert abs(sup - 1.0) < 1e-12
    assert argmax


def test_sup_matches_brute_force_on_unstable_scheme() -> None:
    # nu < (lam*a)^2 violates the dissipation bound, sup > 1
    s = stencil.builtin("three-point", lam_a=0.7, nu=0.2)
    sup, _ = stencil.von_neumann_sup(s)
    assert sup > 1.0 + 1e-3
    assert abs(sup - _brute_force_sup(s)) < 1e-9


def test_sup_excess_of_wide_builtins_matches_recorded() -> None:
    man = _manifest()["builtin_measured"]
    for name in ("coeff1", "coeff2"):
        sup, _ = stencil.von_neumann_sup(stencil.builtin(name))
        assert abs((sup - 1.0) - man[name]["von_neumann_sup_excess"]) <= 1e-12


def test_sup_rejects_undersampling() -> None:
    s = stencil.builtin("coeff1")
    with pytest.raises(ValueError):
        stencil.von_neumann_sup(s, n_samples=8)


# ---------------------------------------------------------------------------
# group velocity and mode tables

def test_group_velocity_upwind_shift() -> None:
    # C(theta) = e^{-i theta}: arg C is linear, v_g = a = 1 everywhere
    s = stencil.builtin("upwind", lam_a=1.0)
    for theta in (0.0, 0.3, -1.1, 2.5):
        assert abs(stencil.group_velocity(s, theta) - 1.0) < 1e-7


def test_group_velocity_lax_wendroff_at_origin_is_velocity() -> None:
    s = stencil.builtin("lax-wendroff", lam_a=0.5)
    assert abs(stencil.group_velocity(s, 0.0) - 0.5) < 1e-7


def test_group_velocity_rejects_zero_amplification() -> None:
    # at lam*a = 0, nu = 1 the symbol is cos(theta), zero at pi/2
    s = stencil.builtin("three-point", lam_a=0.0, nu=1.0)
    with pytest.raises(ValueError):
        stencil.group_velocity(s, math.pi / 2)


def test_lax_wendroff_single_mode_family() -> None:
    s = stencil.builtin("lax-wendroff", lam_a=0.5)
    modes = stencil.unimodular_modes(s)
    assert len(modes) == 1
    # |C| is quartically flat at 0, so the maximizer wanders O(1e-4) while
    # the modulus stays within an ulp of 1; z inherits the phase -lam*a*theta
    assert abs(modes[0].theta) < 1e-3
    assert abs(abs(modes[0].z) - 1.0) < 1e-12
    assert abs(modes[0].z - 1.0) < 1e-3
    assert abs(modes[0].group_velocity - 0.5) < 1e-6


def test_wide_builtin_mode_tables_match_recorded() -> None:
    man = _manifest()["builtin_measured"]
    for name in ("coeff1", "coeff2"):
        modes = stencil.unimodular_modes(stencil.builtin(name))
        ref = man[name]["modes"]
        assert len(modes) == len(ref) == 5
        for mode, row in zip(modes, ref):
            assert abs(mode.theta / math.pi - row["theta_over_pi"]) <= 1e-6
            assert abs(mode.group_velocity - row["group_velocity"]) <= 1e-8
            assert abs(mode.modulus_excess - row["modulus_excess"]) <= 1e-10
            assert abs(abs(mode.kappa) - 1.0) < 1e-12


def test_unimodular_modes_reject_unstable_scheme() -> None:
    s = stencil.builtin("three-point", lam_a=0.7, nu=0.2)
    with pytest.raises(ValueError):
        stencil.unimodular_modes(s)


# ---------------------------------------------------------------------------
# file round trip

def test_scheme_json_round_trip_exact(tmp_path) -> None:
    for name in ("coeff1", "coeff2"):
        s = stencil.builtin(name)
        path = str(tmp_path / f"{name}.json")
        stencil.save_scheme(s, path)
        back = stencil.load_scheme(path)
        assert back.coefficients == s.coefficients
        assert back.lam == s.lam and back.velocity == s.velocity
        assert (back.r, back.p) == (s.r, s.p)


def test_scheme_json_fractions_stay_rational(tmp_path) -> None:
    s = stencil.builtin("three-point", lam_a=0.5, nu=0.75)
    path = str(tmp_path / "tp.json")
    stencil.save_scheme(s, path)
    raw = json.loads(open(path).read())
    assert raw["coefficients"] == ["5/8", "1/4", "1/8"]
    assert raw["a"] == "1/2"
    back = stencil.load_scheme(path)
    assert back.coefficients == s.coefficients


def test_load_scheme_accepts_float_lambda(tmp_path) -> None:
    path = tmp_path / "s.json"
    path.write_text(
        json.dumps(
            {
                "name": "custom",
                "r": 1,
                "p": 0,
                "lambda": 0.5,
                "a": 2,
                "coefficients": ["1/2", "1/2"],
            }
        )
    )
    s = stencil.load_scheme(str(path))
    assert s.lam == Fraction(1, 2)
    assert s.lam_a == 1.0
