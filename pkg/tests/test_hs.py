from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from hspatch import (
    GeometricPatch,
    HsControls,
    HsPatchInput,
    InfeasiblePatchError,
    Policy,
    build_hs_patch,
    build_lambda,
    complete_twists,
    constraint_report,
    control_matrix,
    control_vector,
    eval_patch_jet,
    line_restriction_coeffs,
    project_tangents,
    rank_exact,
    verify_hs,
)
from hspatch.hs import _RESIDUAL_SIGNS, monomial_condition_forms

from conftest import (
    LIFTED_CORNER,
    UV_X,
    UV_Y,
    UV_Z,
    UV_Z_CONTROLS,
    e11_matrix,
    random_controls,
    random_feasible_controls,
    random_feasible_input,
)

# Frozen expected condition matrix over [x11, x12, x13, x14, x21, ..., x44],
# independently derived from the basis-column outer products by hand.
EXPECTED_LAMBDA = [
    [4, -4, 2, 2, -4, 4, -2, -2, 2, -2, 1, 1, 2, -2, 1, 1],
    [-12, 12, -7, -5, 12, -12, 7, 5, -7, 7, -4, -3, -5, 5, -3, -2],
    [9, -9, 8, 3, -9, 9, -8, -3, 8, -8, 6, 3, 3, -3, 3, 1],
    [-4, 4, -2, -2, 4, -4, 2, 2, -2, 2, -1, -1, -2, 2, -1, -1],
    [12, -12, 5, 7, -12, 12, -5, -7, 7, -7, 3, 4, 5, -5, 2, 3],
    [-9, 9, -3, -8, 9, -9, 3, 8, -8, 8, -3, -6, -3, 3, -1, -3],
]


class TestConditionMatrix:
    def test_entries_match_hand_derivation(self):
        lam = build_lambda()
        assert [[int(v) for v in row] for row in lam] == EXPECTED_LAMBDA

    def test_rank_is_five(self):
        assert rank_exact(build_lambda()) == 5

    def test_entries_are_integers(self):
        assert all(v.denominator == 1 for row in build_lambda() for v in row)

    def test_annihilates_uv_patch(self):
        xi = control_vector(UV_Z)
        for row in build_lambda():
            assert sum(c * v for c, v in zip(row, xi)) == 0

    def test_row_space_matches_power_basis_conditions(self):
        stacked = list(build_lambda()) + list(monomial_condition_forms())
        assert rank_exact(stacked) == 5
        assert rank_exact(list(monomial_condition_forms())) == 5


class TestConstraintReport:
    def test_uv_coordinate(self):
        r = constraint_report(UV_Z_CONTROLS)
        assert (r.phi, r.a, r.b, r.c) == (1, -2, -2, 0)
        assert r.residual == 0 and r.feasible
        assert r.alpha == 0.5 and r.beta == 0.5

    def test_lifted_corner_is_infeasible(self):
        r = constraint_report(LIFTED_CORNER)
        assert r.phi == 1 and r.a == 0 and r.b == 0 and r.c == 0
        assert r.residual == 4 and not r.feasible

    def test_all_zero_input(self):
        r = constraint_report(HsControls((0,) * 4, (0,) * 8))
        assert r.residual == 0 and r.feasible
        assert r.alpha is None and r.beta is None  # phi = 0

    def test_tolerance_is_scale_relative(self):
        # same shape at 1e6 scale: residual scales too, verdict unchanged
        base = random_feasible_controls(np.random.default_rng(2))
        scaled = HsControls(
            tuple(v * 1e6 for v in base.corners), tuple(v * 1e6 for v in base.tangents)
        )
        assert constraint_report(scaled).feasible


class TestCompleteTwists:
    def test_uv(self):
        assert complete_twists(UV_Z_CONTROLS) == (1, 1, 1, 1)

    def test_zero(self):
        assert complete_twists(HsControls((0,) * 4, (0,) * 8)) == (0, 0, 0, 0)

    def test_bilinear_v_with_zero_phi(self):
        c = HsControls(corners=(0, 1, 0, 1), tangents=(1, 1, 1, 1, 0, 0, 0, 0))
        assert complete_twists(c) == (0, 0, 0, 0)

    def test_twin_identities_exact_on_integers(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            c = HsControls(
                tuple(int(v) for v in rng.integers(-9, 10, size=4)),
                tuple(int(v) for v in rng.integers(-9, 10, size=8)),
            )
            x33, x34, x43, x44 = complete_twists(c)
            phi = c.corners[0] - c.corners[1] - c.corners[2] + c.corners[3]
            assert x33 + x44 == 2 * phi
            assert x34 + x43 == 2 * phi

    def test_alpha_beta_consistency(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            c = random_feasible_controls(rng)
            r = constraint_report(c)
            if r.alpha is None:
                continue
            x33, x34, x43, x44 = complete_twists(c)
            assert 2 * r.phi * r.alpha == pytest.approx(x44, rel=1e-12, abs=1e-12)
            assert 2 * r.phi * r.beta == pytest.approx(x43, rel=1e-12, abs=1e-12)


class TestProjectTangents:
    def test_feasible_input_unchanged_bitwise(self):
        out = project_tangents(UV_Z_CONTROLS)
        assert out is UV_Z_CONTROLS

    def test_lifted_corner_projection(self):
        out = project_tangents(LIFTED_CORNER)
        assert out.corners == LIFTED_CORNER.corners
        expected = tuple(Fraction(-s, 2) for s in _RESIDUAL_SIGNS)
        assert out.tangents == expected
        assert constraint_report(out).residual == 0

    def test_correction_norm_is_residual_over_sqrt8(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            c = random_controls(rng)
            r = constraint_report(c).residual
            out = project_tangents(c)
            delta = np.array(out.tangents) - np.array(c.tangents)
            assert np.linalg.norm(delta) == pytest.approx(abs(r) / sqrt(8.0), rel=1e-12)

    def test_correction_parallel_to_sign_vector(self):
        # KKT condition of the minimal-norm projection onto one hyperplane
        rng = np.random.default_rng(15)
        for _ in range(50):
            c = random_controls(rng)
            out = project_tangents(c)
            delta = np.array(out.tangents) - np.array(c.tangents)
            signs = np.array(_RESIDUAL_SIGNS, dtype=float)
            cross = delta - (delta @ signs / 8.0) * signs
            assert np.max(np.abs(cross)) <= 1e-12 * max(1.0, np.max(np.abs(delta)))

    def test_exact_arithmetic_preserved(self):
        out = project_tangents(HsControls((1, 0, 0, 0), (0,) * 8))
        assert all(isinstance(t, Fraction) for t in out.tangents)
        assert constraint_report(out).residual == 0


class TestBuildHsPatch:
    def _uv_input(self):
        return HsPatchInput(
            x=HsControls.from_matrix(UV_X),
            y=HsControls.from_matrix(UV_Y),
            z=UV_Z_CONTROLS,
        )

    def test_uv_strict_reproduces_exact_data(self):
        built = build_hs_patch(self._uv_input(), Policy.STRICT)
        assert not built.repaired
        assert np.array_equal(built.patch.x, np.array(UV_X, dtype=float))
        assert np.array_equal(built.patch.y, np.array(UV_Y, dtype=float))
        assert np.array_equal(built.patch.z, np.array(UV_Z, dtype=float))
        assert eval_patch_jet(built.patch, 0.5, 0.5).point[2] == pytest.approx(0.25, abs=1e-15)

    def test_lifted_corner_strict_rejects(self):
        inp = HsPatchInput(
            x=HsControls.from_matrix(UV_X), y=HsControls.from_matrix(UV_Y), z=LIFTED_CORNER
        )
        with pytest.raises(InfeasiblePatchError) as err:
            build_hs_patch(inp, Policy.STRICT)
        assert err.value.reports["z"].residual == 4

    def test_lifted_corner_project_builds_cubic_diagonals(self):
        inp = HsPatchInput(
            x=HsControls.from_matrix(UV_X), y=HsControls.from_matrix(UV_Y), z=LIFTED_CORNER
        )
        built = build_hs_patch(inp, Policy.PROJECT)
        assert built.repaired
        for coord in built.patch.coords():
            for slope, offset in [(1, 0.0), (-1, 1.0)]:
                poly = line_restriction_coeffs(coord, slope, offset)
                assert poly.effective_degree() <= 3

    def test_project_on_feasible_input_reports_unrepaired(self):
        built = build_hs_patch(self._uv_input(), Policy.PROJECT)
        assert not built.repaired
        assert np.array_equal(built.patch.z, np.array(UV_Z, dtype=float))

    def test_random_feasible_batch_has_cubic_slope_lines(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            built = build_hs_patch(random_feasible_input(rng), Policy.STRICT)
            for coord in built.patch.coords():
                for slope in (1, -1):
                    for offset in (-0.5, -0.25, 0.0, 0.25, 0.5):
                        off = offset if slope == 1 else offset + 1.0
                        poly = line_restriction_coeffs(coord, slope, off)
                        assert poly.effective_degree(1e-9) <= 3

    def test_strict_integer_builds_annihilated_exactly(self):
        # integer inputs made feasible by construction: solve the residual
        # for the last tangent, then check the full 16-vector exactly
        rng = np.random.default_rng(17)
        lam = build_lambda()
        for _ in range(100):
            vals = [int(v) for v in rng.integers(-9, 10, size=11)]
            corners, tangents = vals[:4], vals[4:]
            phi = corners[0] - corners[1] - corners[2] + corners[3]
            # residual = a+b+c+4*phi is linear with coefficient -1 on x42
            t = tangents + [0]
            partial = (t[1] - t[3] + t[6]) + (t[0] - t[2] + t[6]) + (t[4] - t[5] - t[6])
            x42 = partial + 4 * phi  # makes the residual vanish
            c = HsControls(tuple(corners), tuple(tangents + [x42]))
            assert constraint_report(c).residual == 0
            xi = control_vector(control_matrix(c))
            assert all(isinstance(v, int) for v in xi)
            for row in lam:
                assert sum(coef * v for coef, v in zip(row, xi)) == 0

    def test_reports_present_for_all_coordinates(self):
        built = build_hs_patch(self._uv_input(), Policy.STRICT)
        assert set(built.reports) == {"x", "y", "z"}
        assert all(r.feasible for r in built.reports.values())


class TestVerifyHs:
    def test_uv_true(self):
        ok, _ = verify_hs(UV_Z)
        assert ok

    def test_corner_basis_false_with_diagnostic(self):
        ok, diag = verify_hs(e11_matrix())
        assert not ok
        assert diag["u3v3"] == pytest.approx(4.0)

    def test_zero_true(self):
        ok, diag = verify_hs(np.zeros((4, 4)))
        assert ok
        assert all(v == 0 for v in diag.values())

    def test_completed_patches_verify(self):
        rng = np.random.default_rng(18)
        for _ in range(50):
            c = random_feasible_controls(rng)
            ok, _ = verify_hs(np.array(control_matrix(c), dtype=float))
            assert ok
